//! Classification conditions: integrability of the transversal
//! a-distribution, frame specialization and tensor transformation laws,
//! geodesic parallelism, hexagonality of cut subwebs, the conformal
//! curvature polynomial and the absolute invariant b.

use serde::Serialize;
use thiserror::Error;

use crate::config::AnalysisConfig;
use crate::exprlang::WebDefinition;
use crate::jets::JetError;
use crate::prolong::{self, sym3, Cov2, Curv, ProlongError, WebTensors};
use crate::webframe::{self, BasePoint, ChernData, FrameError};

#[derive(Debug, Clone, Error)]
pub enum InvariantError {
    #[error("transversal a-distribution undefined: |a| = {0:.3e} below tolerance")]
    DistributionUndefined(f64),
    #[error("degenerate frame change: |det| = {0:.3e}")]
    DegenerateFrameChange(f64),
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
}

/// A constant change of coframe. Row one of the matrix is the torsion
/// covector (or any chosen covector), row two is free subject to det != 0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrameChange {
    /// Forward matrix A = [[a1, a2], [c1, c2]], rows indexed by primed
    /// indices.
    pub a: [[f64; 2]; 2],
    pub det: f64,
    /// Inverse entries a^j_{i'}: `inv[j][ip]` with unprimed row j.
    pub inv: [[f64; 2]; 2],
}

impl FrameChange {
    pub fn new(row1: [f64; 2], row2: [f64; 2]) -> Result<FrameChange, InvariantError> {
        let det = row1[0] * row2[1] - row1[1] * row2[0];
        if det.abs() < 1e-12 * (1.0 + row1[0].abs() + row1[1].abs() + row2[0].abs() + row2[1].abs())
        {
            return Err(InvariantError::DegenerateFrameChange(det));
        }
        let inv = [
            [row2[1] / det, -row1[1] / det],
            [-row2[0] / det, row1[0] / det],
        ];
        Ok(FrameChange {
            a: [row1, row2],
            det,
            inv,
        })
    }

    pub fn identity() -> FrameChange {
        FrameChange::new([1.0, 0.0], [0.0, 1.0]).unwrap()
    }

    /// Residual of A * A^-1 against the identity.
    pub fn inverse_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let v: f64 = (0..2).map(|k| self.a[i][k] * self.inv[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                r = r.max((v - want).abs());
            }
        }
        r
    }
}

/// Covariant transform of a 0-2 tensor: t_{i'j'} = a^i_{i'} a^j_{j'} t_{ij}.
fn transform_cov2(t: &Cov2, f: &FrameChange) -> Cov2 {
    // contract one slot at a time
    let mut half = [[0.0; 2]; 2];
    for ip in 0..2 {
        for j in 0..2 {
            half[ip][j] = (0..2).map(|i| f.inv[i][ip] * t[i][j]).sum();
        }
    }
    let mut out = [[0.0; 2]; 2];
    for ip in 0..2 {
        for jp in 0..2 {
            out[ip][jp] = (0..2).map(|j| f.inv[j][jp] * half[ip][j]).sum();
        }
    }
    out
}

/// Curvature transform b^{i'}_{j'k'l'} = a^{i'}_i a^j_{j'} a^k_{k'} a^l_{l'}
/// b^i_{jkl}, applied one index mode at a time.
fn transform_curv(b: &Curv, f: &FrameChange) -> Curv {
    let mut up = [[[[0.0; 2]; 2]; 2]; 2];
    for ip in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    up[ip][j][k][l] = (0..2).map(|i| f.a[ip][i] * b[i][j][k][l]).sum();
                }
            }
        }
    }
    let mut s1 = [[[[0.0; 2]; 2]; 2]; 2];
    for ip in 0..2 {
        for jp in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    s1[ip][jp][k][l] = (0..2).map(|j| f.inv[j][jp] * up[ip][j][k][l]).sum();
                }
            }
        }
    }
    let mut s2 = [[[[0.0; 2]; 2]; 2]; 2];
    for ip in 0..2 {
        for jp in 0..2 {
            for kp in 0..2 {
                for l in 0..2 {
                    s2[ip][jp][kp][l] = (0..2).map(|k| f.inv[k][kp] * s1[ip][jp][k][l]).sum();
                }
            }
        }
    }
    let mut out = [[[[0.0; 2]; 2]; 2]; 2];
    for ip in 0..2 {
        for jp in 0..2 {
            for kp in 0..2 {
                for lp in 0..2 {
                    out[ip][jp][kp][lp] =
                        (0..2).map(|l| f.inv[l][lp] * s2[ip][jp][kp][l]).sum();
                }
            }
        }
    }
    out
}

/// Apply a constant frame change to the point tensors. The prolongation
/// tensors are dropped: a constant matrix transforms them only up to the
/// inhomogeneous connection terms, so they are stale in the new frame.
pub fn transform_tensors(t: &WebTensors, f: &FrameChange, frame_tag: &str) -> WebTensors {
    let a = [
        t.a[0] * f.inv[0][0] + t.a[1] * f.inv[1][0],
        t.a[0] * f.inv[0][1] + t.a[1] * f.inv[1][1],
    ];
    WebTensors {
        a,
        p: transform_cov2(&t.p, f),
        q: transform_cov2(&t.q, f),
        b: transform_curv(&t.b, f),
        prolongations: None,
        base: t.base,
        frame_tag: frame_tag.to_string(),
    }
}

fn pq_scale(t: &WebTensors) -> f64 {
    let mut s = t.a_norm();
    for i in 0..2 {
        for j in 0..2 {
            s = s.max(t.p[i][j].abs()).max(t.q[i][j].abs());
        }
    }
    s
}

fn require_distribution(t: &WebTensors, config: &AnalysisConfig) -> Result<(), InvariantError> {
    let n = t.a_norm();
    if n < config.classify_threshold(t.scale()) {
        return Err(InvariantError::DistributionUndefined(n));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegrabilityCheck {
    pub flag: bool,
    /// Residuals of the p- and q-conditions on the a-distribution.
    pub residuals: [f64; 2],
}

/// Integrability of the transversal a-distribution:
/// a2^2 p11 - 2 a1 a2 p_(12) + a1^2 p22 = 0 and likewise for q.
pub fn check_integrability(
    t: &WebTensors,
    config: &AnalysisConfig,
) -> Result<IntegrabilityCheck, InvariantError> {
    require_distribution(t, config)?;
    let [a1, a2] = t.a;
    let quad = |m: &Cov2| a2 * a2 * m[0][0] - a1 * a2 * (m[0][1] + m[1][0]) + a1 * a1 * m[1][1];
    let residuals = [quad(&t.p), quad(&t.q)];
    let thr = config.classify_threshold(pq_scale(t) * (1.0 + t.a_norm()).powi(2));
    Ok(IntegrabilityCheck {
        flag: residuals[0].abs() < thr && residuals[1].abs() < thr,
        residuals,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GeodesicParallelCheck {
    pub flag: bool,
    /// Residuals of a2 p12 - a1 p22, a1 p21 - a2 p11, and the q pair.
    pub residuals: [f64; 4],
}

/// Geodesic parallelism of the integral surfaces with respect to every
/// connection of the affine bundle.
pub fn check_geodesic_parallel(
    t: &WebTensors,
    config: &AnalysisConfig,
) -> Result<GeodesicParallelCheck, InvariantError> {
    require_distribution(t, config)?;
    let [a1, a2] = t.a;
    let residuals = [
        a2 * t.p[0][1] - a1 * t.p[1][1],
        a1 * t.p[1][0] - a2 * t.p[0][0],
        a2 * t.q[0][1] - a1 * t.q[1][1],
        a1 * t.q[1][0] - a2 * t.q[0][0],
    ];
    let thr = config.classify_threshold(pq_scale(t) * (1.0 + t.a_norm()));
    Ok(GeodesicParallelCheck {
        flag: residuals.iter().all(|r| r.abs() < thr),
        residuals,
    })
}

/// Rotate the coframe so the torsion covector becomes (1, 0).
///
/// Row one of the change is the covector itself; the default second row
/// (-a2, a1) is orthogonal to it, so the determinant is |a|^2 > 0.
pub fn specialize_frame(
    t: &WebTensors,
    row2: Option<(f64, f64)>,
    config: &AnalysisConfig,
) -> Result<(FrameChange, WebTensors), InvariantError> {
    require_distribution(t, config)?;
    let c = row2.map(|(c1, c2)| [c1, c2]).unwrap_or([-t.a[1], t.a[0]]);
    let f = FrameChange::new(t.a, c)?;
    let out = transform_tensors(t, &f, "specialized");
    Ok((f, out))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HexagonalityConditions {
    /// The contraction (b^1, b^2) built from the torsion and curvature.
    pub b_contraction: [f64; 2],
    /// Cross-check residual of the transformed-component route against the
    /// contraction route.
    pub cross_residual: f64,
}

/// The contraction b^i = (1/D^3)(-b^i_111 a2^3 + 3 b^i_(112) a2^2 a1
/// - 3 b^i_(122) a2 a1^2 + b^i_222 a1^3).
pub fn hexagonality_contraction(
    t: &WebTensors,
    f: &FrameChange,
    config: &AnalysisConfig,
) -> Result<HexagonalityConditions, InvariantError> {
    require_distribution(t, config)?;
    let [a1, a2] = [f.a[0][0], f.a[0][1]];
    let d3 = f.det.powi(3);
    let mut bi = [0.0; 2];
    for i in 0..2 {
        bi[i] = (-t.b[i][0][0][0] * a2.powi(3) + 3.0 * sym3(&t.b, i, 0, 0, 1) * a2 * a2 * a1
            - 3.0 * sym3(&t.b, i, 0, 1, 1) * a2 * a1 * a1
            + t.b[i][1][1][1] * a1.powi(3))
            / d3;
    }
    // cross-check through the full curvature transform: the primed
    // b^{i'}_{2'2'2'} components must equal A applied to the contraction pair
    let tb = transform_curv(&t.b, f);
    let mut cross = 0.0f64;
    for ip in 0..2 {
        let via_rows: f64 = (0..2).map(|i| f.a[ip][i] * bi[i]).sum();
        cross = cross.max((tb[ip][1][1][1] - via_rows).abs());
    }
    Ok(HexagonalityConditions {
        b_contraction: bi,
        cross_residual: cross,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HexagonalityCheck {
    pub flag: bool,
    pub b_contraction: [f64; 2],
    /// Curvature of the cut subwebs, K = b^2'_{2'2'2'} in the specialized
    /// frame.
    pub subweb_curvature: f64,
}

/// Hexagonality of the two-dimensional subwebs cut on the integral surfaces.
///
/// Requires the a-distribution to be integrable; callers that want the raw
/// conditions without the hypothesis use `hexagonality_contraction`.
pub fn check_hexagonal(
    t: &WebTensors,
    f: &FrameChange,
    config: &AnalysisConfig,
) -> Result<HexagonalityCheck, InvariantError> {
    let integ = check_integrability(t, config)?;
    if !integ.flag {
        return Err(InvariantError::PreconditionNotMet(
            "a-distribution is not integrable".to_string(),
        ));
    }
    let cond = hexagonality_contraction(t, f, config)?;
    let thr = config.classify_threshold(t.scale());
    let tb = transform_curv(&t.b, f);
    Ok(HexagonalityCheck {
        flag: cond.b_contraction[0].abs() < thr && cond.b_contraction[1].abs() < thr,
        b_contraction: cond.b_contraction,
        subweb_curvature: tb[1][1][1][1],
    })
}

/// Coefficients (C4, C3, C2, C1, C0) of the relative conformal curvature
/// polynomial C(t) of the transversal bivectors, from the symmetrized
/// curvature.
pub fn conformal_curvature_poly(t: &WebTensors) -> [f64; 5] {
    let s = t.b_symmetric();
    [
        s[1][0][0][0],
        -(3.0 * s[1][0][0][1] - s[0][0][0][0]),
        3.0 * (s[1][0][1][1] - s[0][0][0][1]),
        -(s[1][1][1][1] - 3.0 * s[0][0][1][1]),
        -s[0][1][1][1],
    ]
}

fn eval_poly(c: &[f64; 5], t: f64) -> f64 {
    c.iter().fold(0.0, |acc, ck| acc * t + ck)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvariantB {
    pub value: f64,
    /// Residual of the direct contraction against the grouped quartic
    /// expansion in (a1, a2).
    pub expansion_residual: f64,
    /// Residual of b + (a1^4 / D^3) C(a2/a1); absent when a1 is too small
    /// for the substitution.
    pub conformal_identity_residual: Option<f64>,
}

/// The absolute invariant b = b^i a_i, with its two algebraic cross-checks.
pub fn invariant_b(
    t: &WebTensors,
    f: &FrameChange,
    config: &AnalysisConfig,
) -> Result<InvariantB, InvariantError> {
    require_distribution(t, config)?;
    let cond = hexagonality_contraction(t, f, config)?;
    let [a1, a2] = t.a;
    let value = cond.b_contraction[0] * a1 + cond.b_contraction[1] * a2;

    // grouped quartic expansion of the same contraction
    let s = t.b_symmetric();
    let d3 = f.det.powi(3);
    let expansion = (-s[1][0][0][0] * a2.powi(4)
        + (3.0 * s[1][0][0][1] - s[0][0][0][0]) * a2.powi(3) * a1
        + 3.0 * (s[0][0][0][1] - s[1][0][1][1]) * a2 * a2 * a1 * a1
        + (s[1][1][1][1] - 3.0 * s[0][0][1][1]) * a2 * a1.powi(3)
        + s[0][1][1][1] * a1.powi(4))
        / d3;
    let expansion_residual = (value - expansion).abs();

    let conformal_identity_residual = if a1.abs() > 1e-6 * (1.0 + t.a_norm()) {
        let c = conformal_curvature_poly(t);
        Some((value + a1.powi(4) / d3 * eval_poly(&c, a2 / a1)).abs())
    } else {
        None
    };
    Ok(InvariantB {
        value,
        expansion_residual,
        conformal_identity_residual,
    })
}

/// One affine connection of the bundle over the web, given by the bundle
/// parameters (p, q): theta^i_j = omega^i_j + a^i_{jk} (p w1^k + q w2^k)
/// with the torsion tensor a^i_{jk} = (a_j d^i_k - a_k d^i_j) / 2.
#[derive(Debug, Clone, Copy)]
pub struct BundleConnection {
    /// Coefficients of theta^i_j on omega_1^k.
    pub theta_gamma: [[[f64; 2]; 2]; 2],
    /// Coefficients of theta^i_j on omega_2^k.
    pub theta_delta: [[[f64; 2]; 2]; 2],
}

pub fn bundle_connection(cd: &ChernData, p: f64, q: f64) -> BundleConnection {
    let a = [cd.a[0].value(), cd.a[1].value()];
    let torsion = |i: usize, j: usize, k: usize| {
        let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
        0.5 * (a[j] * d(i, k) - a[k] * d(i, j))
    };
    let mut theta_gamma = [[[0.0; 2]; 2]; 2];
    let mut theta_delta = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                theta_gamma[i][j][k] = cd.gamma[i][j][k].value() + p * torsion(i, j, k);
                theta_delta[i][j][k] = cd.delta[i][j][k].value() + q * torsion(i, j, k);
            }
        }
    }
    BundleConnection {
        theta_gamma,
        theta_delta,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TotallyGeodesicCheck {
    pub flag: bool,
    /// Coefficients of omega^1_2 restricted to the distribution:
    /// (-p22/a1, -q22/a1) in the specialized frame.
    pub restriction_coefficients: [f64; 2],
}

/// Theorem-4 mechanism: in the specialized frame the integral surfaces are
/// totally geodesic iff the restriction of omega^1_2 to the distribution
/// vanishes, i.e. iff p22 = q22 = 0.
pub fn check_totally_geodesic(
    t: &WebTensors,
    config: &AnalysisConfig,
) -> Result<TotallyGeodesicCheck, InvariantError> {
    let a_norm = t.a_norm();
    if t.a[1].abs() > 1e-9 * (1.0 + a_norm) {
        return Err(InvariantError::PreconditionNotMet(format!(
            "frame is not specialized: a2 = {:.3e}",
            t.a[1]
        )));
    }
    let a1 = t.a[0];
    if a1.abs() < config.classify_threshold(t.scale()) {
        return Err(InvariantError::DistributionUndefined(a_norm));
    }
    let coeffs = [-t.p[1][1] / a1, -t.q[1][1] / a1];
    let thr = config.classify_threshold(pq_scale(t) * (1.0 + a_norm).powi(2));
    Ok(TotallyGeodesicCheck {
        flag: t.p[1][1].abs() < thr && t.q[1][1].abs() < thr,
        restriction_coefficients: coeffs,
    })
}

/// Full classification report for a web at a point.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub web_name: Option<String>,
    pub base_point: BasePoint,
    pub frame_tag: String,
    pub tolerances: AnalysisConfig,
    pub torsion_covector: [f64; 2],
    pub isoclinicly_geodesic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_integrable: Option<IntegrabilityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geodesicly_parallel: Option<GeodesicParallelCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub totally_geodesic: Option<TotallyGeodesicCheck>,
    /// Raw hexagonality conditions; reported even when the integrability
    /// hypothesis of the subweb theorem fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hexagonality_conditions: Option<[f64; 2]>,
    /// Theorem-mode verdict; absent when the a-distribution is undefined or
    /// not integrable (conditions are then report-only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subwebs_hexagonal: Option<bool>,
    /// K = b^2'_{2'2'2'} in the specialized frame.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subweb_curvature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub principal_bivector: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant_b: Option<InvariantB>,
    pub c_coeffs: [f64; 5],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conformal_identity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub specialized_frame: Option<FrameChange>,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Prolong(#[from] ProlongError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Outputs of the full pipeline at a point.
pub struct Analysis {
    pub chern: ChernData,
    pub tensors: WebTensors,
    pub report: ClassificationReport,
}

/// Run the full pipeline: coframe, connection, tensors, classification.
pub fn classify(
    web: &WebDefinition,
    point: &BasePoint,
    config: &AnalysisConfig,
) -> Result<Analysis, AnalysisError> {
    let coframe = webframe::build_coframe(web, point, config)?;
    let chern = webframe::solve_chern(&coframe, config)?;
    let (_jets, tensors) = prolong::web_tensors(&chern, config)?;

    let c_coeffs = conformal_curvature_poly(&tensors);
    let isoclinic = tensors.a_norm() < config.classify_threshold(tensors.scale());

    let mut report = ClassificationReport {
        web_name: web.name.clone(),
        base_point: *point,
        frame_tag: tensors.frame_tag.clone(),
        tolerances: config.clone(),
        torsion_covector: tensors.a,
        isoclinicly_geodesic: isoclinic,
        delta_integrable: None,
        geodesicly_parallel: None,
        totally_geodesic: None,
        hexagonality_conditions: None,
        subwebs_hexagonal: None,
        subweb_curvature: None,
        principal_bivector: None,
        invariant_b: None,
        c_coeffs,
        conformal_identity_residual: None,
        specialized_frame: None,
    };

    if !isoclinic {
        let integ = check_integrability(&tensors, config)?;
        report.delta_integrable = Some(integ);
        let parallel = check_geodesic_parallel(&tensors, config)?;
        // the parallelism conditions contain the integrability ones
        debug_assert!(!parallel.flag || integ.flag);
        report.geodesicly_parallel = Some(parallel);

        let (frame, specialized) = specialize_frame(&tensors, config.frame_row2, config)?;
        report.specialized_frame = Some(frame);
        report.totally_geodesic = Some(check_totally_geodesic(&specialized, config)?);

        let cond = hexagonality_contraction(&tensors, &frame, config)?;
        report.hexagonality_conditions = Some(cond.b_contraction);
        report.subweb_curvature = Some(transform_curv(&tensors.b, &frame)[1][1][1][1]);
        if integ.flag {
            let hex = check_hexagonal(&tensors, &frame, config)?;
            report.subwebs_hexagonal = Some(hex.flag);
        }

        let inv = invariant_b(&tensors, &frame, config)?;
        let thr = config.classify_threshold(tensors.scale());
        report.principal_bivector = Some(inv.value.abs() < thr);
        report.conformal_identity_residual = inv.conformal_identity_residual;
        report.invariant_b = Some(inv);
    }

    Ok(Analysis {
        chern,
        tensors,
        report,
    })
}
