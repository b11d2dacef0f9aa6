//! Web-adapted coframe and the Chern connection.
//!
//! For a web given by z = f(x, y) the coframe is realized as
//! omega_1^i = Lambda^i_j dx^j and omega_2^i = Mu^i_j dy^j with
//! Lambda = f_x, Mu = f_y, so that omega_3^i := -dz^i closes the triple.
//! `solve_chern` reads the connection coefficients and the torsion covector
//! off the exterior derivatives of the coframe.

use serde::Serialize;
use thiserror::Error;

use crate::config::AnalysisConfig;
use crate::exprlang::WebDefinition;
use crate::jets::{jet_lift, Jet, JetError, Mat2, SINGULAR_TOL};

/// A point of M^4 in coordinates (x1, x2, y1, y2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasePoint {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
}

impl BasePoint {
    pub fn new(x1: f64, x2: f64, y1: f64, y2: f64) -> BasePoint {
        BasePoint { x1, x2, y1, y2 }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.x1, self.x2, self.y1, self.y2]
    }

    pub fn coord(&self, axis: usize) -> f64 {
        self.coords()[axis]
    }

    pub fn with_coord(&self, axis: usize, v: f64) -> BasePoint {
        let mut c = self.coords();
        c[axis] = v;
        BasePoint::new(c[0], c[1], c[2], c[3])
    }
}

#[derive(Debug, Clone, Error)]
pub enum FrameError {
    #[error("not a web at this point: |det {which}| = {det:.3e} below tolerance")]
    NotAWebAtPoint { which: &'static str, det: f64 },
    #[error("Chern solve inconsistency: residual {residual:.3e} exceeds {tol:.3e}")]
    ChernInconsistency { residual: f64, tol: f64 },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Jet-valued 1-form in the coordinate cobasis: px[m] dx^m + py[m] dy^m.
#[derive(Debug, Clone)]
pub struct Form1 {
    pub px: [Jet; 2],
    pub py: [Jet; 2],
}

/// Jet-valued 2-form in the coordinate cobasis.
///
/// `xx` multiplies dx1^dx2, `xy[m][n]` multiplies dx^m ^ dy^n and `yy`
/// multiplies dy1^dy2.
#[derive(Debug, Clone)]
pub struct Form2 {
    pub xx: Jet,
    pub xy: [[Jet; 2]; 2],
    pub yy: Jet,
}

impl Form1 {
    /// Exterior derivative, computed from jet partials.
    pub fn d(&self) -> Form2 {
        let xx = &self.px[1].partial(0) - &self.px[0].partial(1);
        let yy = &self.py[1].partial(2) - &self.py[0].partial(3);
        let xy = std::array::from_fn(|m| {
            std::array::from_fn(|n| &self.py[n].partial(m) - &self.px[m].partial(2 + n))
        });
        Form2 { xx, xy, yy }
    }

    pub fn wedge(&self, other: &Form1) -> Form2 {
        let xx = &(&self.px[0] * &other.px[1]) - &(&self.px[1] * &other.px[0]);
        let yy = &(&self.py[0] * &other.py[1]) - &(&self.py[1] * &other.py[0]);
        let xy = std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                &(&self.px[m] * &other.py[n]) - &(&self.py[n] * &other.px[m])
            })
        });
        Form2 { xx, xy, yy }
    }
}

/// 2-form components in the omega basis.
///
/// `w11` multiplies omega_1^1 ^ omega_1^2, `w12[k][l]` multiplies
/// omega_1^k ^ omega_2^l and `w22` multiplies omega_2^1 ^ omega_2^2.
#[derive(Debug, Clone)]
pub struct Omega2 {
    pub w11: Jet,
    pub w12: [[Jet; 2]; 2],
    pub w22: Jet,
}

/// The web coframe at a point, carried to jet order.
#[derive(Debug, Clone)]
pub struct CoframeJet {
    /// Lambda = f_x; omega_1^i = Lambda^i_j dx^j.
    pub lambda: Mat2,
    /// Mu = f_y; omega_2^i = Mu^i_j dy^j.
    pub mu: Mat2,
    pub lambda_inv: Mat2,
    pub mu_inv: Mat2,
    pub base: BasePoint,
}

impl CoframeJet {
    /// omega_1^i as a coordinate-cobasis 1-form.
    pub fn omega1(&self, i: usize) -> Form1 {
        let order = self.lambda.e[0][0].order();
        Form1 {
            px: [self.lambda.e[i][0].clone(), self.lambda.e[i][1].clone()],
            py: [Jet::zero(order), Jet::zero(order)],
        }
    }

    pub fn omega2(&self, i: usize) -> Form1 {
        let order = self.mu.e[0][0].order();
        Form1 {
            px: [Jet::zero(order), Jet::zero(order)],
            py: [self.mu.e[i][0].clone(), self.mu.e[i][1].clone()],
        }
    }

    /// Express a coordinate-cobasis 2-form in the omega basis.
    pub fn to_omega(&self, f: &Form2) -> Omega2 {
        let li = &self.lambda_inv;
        let mi = &self.mu_inv;
        let det_li = li.det();
        let det_mi = mi.det();
        let w11 = &f.xx * &det_li;
        let w22 = &f.yy * &det_mi;
        let w12 = std::array::from_fn(|k| {
            std::array::from_fn(|l| {
                let mut acc = Jet::zero(f.xy[0][0].order().min(li.e[0][0].order()));
                for m in 0..2 {
                    for n in 0..2 {
                        acc = &acc + &(&(&f.xy[m][n] * &li.e[m][k]) * &mi.e[n][l]);
                    }
                }
                acc
            })
        });
        Omega2 { w11, w12, w22 }
    }

    /// Express a coordinate-cobasis 1-form in the omega basis: returns the
    /// coefficients on omega_1^k and omega_2^k.
    pub fn one_form_to_omega(&self, f: &Form1) -> ([Jet; 2], [Jet; 2]) {
        let bar = std::array::from_fn(|k| {
            &(&f.px[0] * &self.lambda_inv.e[0][k]) + &(&f.px[1] * &self.lambda_inv.e[1][k])
        });
        let til = std::array::from_fn(|k| {
            &(&f.py[0] * &self.mu_inv.e[0][k]) + &(&f.py[1] * &self.mu_inv.e[1][k])
        });
        (bar, til)
    }
}

/// Jet-valued Chern connection data.
///
/// The connection form is omega^i_j = gamma^i_{jk} omega_1^k
/// + delta^i_{jk} omega_2^k; `a` is the torsion covector.
#[derive(Debug, Clone)]
pub struct ChernData {
    pub gamma: [[[Jet; 2]; 2]; 2],
    pub delta: [[[Jet; 2]; 2]; 2],
    pub a: [Jet; 2],
    pub coframe: CoframeJet,
    /// Residual of the two torsion determinations against each other.
    pub torsion_residual: f64,
    /// Max residual of the structure equations over all 2-form components.
    pub structure_residual: f64,
}

impl ChernData {
    /// Connection 1-form omega^i_j in the coordinate cobasis.
    pub fn connection_form(&self, i: usize, j: usize) -> Form1 {
        let px = std::array::from_fn(|m| {
            &(&self.gamma[i][j][0] * &self.coframe.lambda.e[0][m])
                + &(&self.gamma[i][j][1] * &self.coframe.lambda.e[1][m])
        });
        let py = std::array::from_fn(|m| {
            &(&self.delta[i][j][0] * &self.coframe.mu.e[0][m])
                + &(&self.delta[i][j][1] * &self.coframe.mu.e[1][m])
        });
        Form1 { px, py }
    }
}

/// Build the jet-valued coframe of a web at a point.
pub fn build_coframe(
    w: &WebDefinition,
    p: &BasePoint,
    config: &AnalysisConfig,
) -> Result<CoframeJet, FrameError> {
    let order = config.jet_order;
    let f = [
        jet_lift(&w.f1, p, order)?,
        jet_lift(&w.f2, p, order)?,
    ];
    let lambda = Mat2 {
        e: std::array::from_fn(|i| std::array::from_fn(|j| f[i].partial(j))),
    };
    let mu = Mat2 {
        e: std::array::from_fn(|i| std::array::from_fn(|j| f[i].partial(2 + j))),
    };
    let dl = lambda.det().value();
    let dm = mu.det().value();
    if dl.abs() < SINGULAR_TOL.max(config.tol_degenerate) {
        return Err(FrameError::NotAWebAtPoint { which: "Lambda", det: dl });
    }
    if dm.abs() < SINGULAR_TOL.max(config.tol_degenerate) {
        return Err(FrameError::NotAWebAtPoint { which: "Mu", det: dm });
    }
    let lambda_inv = lambda.inv()?;
    let mu_inv = mu.inv()?;
    Ok(CoframeJet {
        lambda,
        mu,
        lambda_inv,
        mu_inv,
        base: *p,
    })
}

/// Solve the structure equations for the Chern connection.
///
/// The mixed components of d omega_1 determine delta, the mixed components
/// of d omega_2 determine gamma, and the pure components determine the
/// torsion covector twice over; the two determinations are averaged (the
/// least-squares solution of the full equation set) and their disagreement
/// is the consistency residual.
pub fn solve_chern(c: &CoframeJet, config: &AnalysisConfig) -> Result<ChernData, FrameError> {
    let d1: [Omega2; 2] = std::array::from_fn(|i| c.to_omega(&c.omega1(i).d()));
    let d2: [Omega2; 2] = std::array::from_fn(|i| c.to_omega(&c.omega2(i).d()));

    // scale for the residual tolerance: the largest d-omega coefficient
    let mut scale = 0.0f64;
    for d in d1.iter().chain(d2.iter()) {
        scale = scale.max(d.w11.max_abs_coeff()).max(d.w22.max_abs_coeff());
        for k in 0..2 {
            for l in 0..2 {
                scale = scale.max(d.w12[k][l].max_abs_coeff());
            }
        }
    }
    let tol = config.tol_connection * (1.0 + scale);

    // (d) pure parts that must vanish identically for this coframe
    for d in d1.iter() {
        let r = d.w22.max_abs_coeff();
        if r > tol {
            return Err(FrameError::ChernInconsistency { residual: r, tol });
        }
    }
    for d in d2.iter() {
        let r = d.w11.max_abs_coeff();
        if r > tol {
            return Err(FrameError::ChernInconsistency { residual: r, tol });
        }
    }

    // (a) mixed part of d omega_1: d w1^i |_{w1^j ^ w2^k} = delta^i_{jk}
    let delta: [[[Jet; 2]; 2]; 2] = std::array::from_fn(|i| {
        std::array::from_fn(|j| std::array::from_fn(|k| d1[i].w12[j][k].clone()))
    });
    // (b) mixed part of d omega_2: d w2^i |_{w1^k ^ w2^j} = -gamma^i_{jk}
    let gamma: [[[Jet; 2]; 2]; 2] = std::array::from_fn(|i| {
        std::array::from_fn(|j| std::array::from_fn(|k| -&d2[i].w12[k][j]))
    });

    // (c) torsion covector, two independent determinations:
    //   from d omega_1 (coefficient T^i of w1^1 ^ w1^2):
    //     a2 = 2 gamma^1_[12] - T^1,  a1 = T^2 - 2 gamma^2_[12]
    //   from d omega_2 (coefficient S^i of w2^1 ^ w2^2):
    //     a2 = S^1 - 2 delta^1_[12],  a1 = 2 delta^2_[12] - S^2
    let two_bracket = |t: &[[[Jet; 2]; 2]; 2], i: usize| -> Jet {
        &t[i][0][1] - &t[i][1][0]
    };
    let a1_first = &d1[1].w11 - &two_bracket(&gamma, 1);
    let a2_first = &two_bracket(&gamma, 0) - &d1[0].w11;
    let a1_second = &two_bracket(&delta, 1) - &d2[1].w22;
    let a2_second = &d2[0].w22 - &two_bracket(&delta, 0);

    let a1 = (&a1_first + &a1_second).scale(0.5);
    let a2 = (&a2_first + &a2_second).scale(0.5);
    let torsion_residual = (&a1_first - &a1_second)
        .max_abs_coeff()
        .max((&a2_first - &a2_second).max_abs_coeff());
    if torsion_residual > tol {
        return Err(FrameError::ChernInconsistency {
            residual: torsion_residual,
            tol,
        });
    }

    let data = ChernData {
        gamma,
        delta,
        a: [a1, a2],
        coframe: c.clone(),
        torsion_residual,
        structure_residual: 0.0,
    };
    let structure_residual = structure_equation_residual(&data);
    if structure_residual > tol {
        return Err(FrameError::ChernInconsistency {
            residual: structure_residual,
            tol,
        });
    }
    Ok(ChernData {
        structure_residual,
        ..data
    })
}

/// Residual of both structure equations over every omega-basis 2-form
/// component, at the jet value level.
pub fn structure_equation_residual(cd: &ChernData) -> f64 {
    let c = &cd.coframe;
    let mut worst = 0.0f64;
    for i in 0..2 {
        // d w1^i - w1^j ^ w^i_j - a_j w1^j ^ w1^i
        let mut f = c.omega1(i).d();
        for j in 0..2 {
            sub_assign(&mut f, &c.omega1(j).wedge(&cd.connection_form(i, j)));
            let scaled = scale_form(&c.omega1(i), &cd.a[j]);
            sub_assign(&mut f, &c.omega1(j).wedge(&scaled));
        }
        worst = worst.max(omega_residual(&c.to_omega(&f)));

        // d w2^i - w2^j ^ w^i_j + a_j w2^j ^ w2^i
        let mut g = c.omega2(i).d();
        for j in 0..2 {
            sub_assign(&mut g, &c.omega2(j).wedge(&cd.connection_form(i, j)));
            let scaled = scale_form(&c.omega2(i), &cd.a[j]);
            add_assign(&mut g, &c.omega2(j).wedge(&scaled));
        }
        worst = worst.max(omega_residual(&c.to_omega(&g)));
    }
    worst
}

fn scale_form(f: &Form1, s: &Jet) -> Form1 {
    Form1 {
        px: [&f.px[0] * s, &f.px[1] * s],
        py: [&f.py[0] * s, &f.py[1] * s],
    }
}

fn sub_assign(f: &mut Form2, g: &Form2) {
    f.xx = &f.xx - &g.xx;
    f.yy = &f.yy - &g.yy;
    for m in 0..2 {
        for n in 0..2 {
            f.xy[m][n] = &f.xy[m][n] - &g.xy[m][n];
        }
    }
}

fn add_assign(f: &mut Form2, g: &Form2) {
    f.xx = &f.xx + &g.xx;
    f.yy = &f.yy + &g.yy;
    for m in 0..2 {
        for n in 0..2 {
            f.xy[m][n] = &f.xy[m][n] + &g.xy[m][n];
        }
    }
}

fn omega_residual(o: &Omega2) -> f64 {
    let mut r = o.w11.max_abs_coeff().max(o.w22.max_abs_coeff());
    for k in 0..2 {
        for l in 0..2 {
            r = r.max(o.w12[k][l].max_abs_coeff());
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_web;
    use approx::assert_relative_eq;

    fn cfg() -> AnalysisConfig {
        AnalysisConfig::default()
    }

    #[test]
    fn parallelizable_coframe_is_identity() {
        let w = parse_web("f1 = x1 + y1\nf2 = x2 + y2").unwrap();
        let c = build_coframe(&w, &BasePoint::new(0.3, -1.0, 2.0, 0.5), &cfg()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(c.lambda.e[i][j].value(), want);
                assert_relative_eq!(c.mu.e[i][j].value(), want);
                assert!(c.lambda.e[i][j].max_abs_coeff() <= 1.0);
            }
        }
    }

    #[test]
    fn affine_group_coframe_values() {
        let w = parse_web("f1 = x1 * y1\nf2 = x1 * y2 + x2").unwrap();
        let c = build_coframe(&w, &BasePoint::new(1.0, 0.0, 1.0, 0.0), &cfg()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(c.lambda.e[i][j].value(), want);
                assert_relative_eq!(c.mu.e[i][j].value(), want);
            }
        }
        // nonzero higher jet coefficients exist
        assert!(c.lambda.e[0][0].max_abs_coeff() > 0.0);
        assert!(c.mu.e[0][0].coeff([1, 0, 0, 0]).abs() > 0.0);
    }

    #[test]
    fn degenerate_point_is_an_error() {
        // f_y = [[x1, 0], [0, 1]] is singular at x1 = 0
        let w = parse_web("f1 = x1 * y1\nf2 = x2 + y2").unwrap();
        let err = build_coframe(&w, &BasePoint::new(0.0, 0.0, 1.0, 0.0), &cfg()).unwrap_err();
        assert!(matches!(err, FrameError::NotAWebAtPoint { which: "Mu", .. }));
    }

    #[test]
    fn parallelizable_chern_is_flat() {
        let w = parse_web("f1 = x1 + y1\nf2 = x2 + y2").unwrap();
        let c = build_coframe(&w, &BasePoint::new(0.0, 0.0, 0.0, 0.0), &cfg()).unwrap();
        let cd = solve_chern(&c, &cfg()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_eq!(cd.gamma[i][j][k].max_abs_coeff(), 0.0);
                    assert_eq!(cd.delta[i][j][k].max_abs_coeff(), 0.0);
                }
            }
        }
        assert_eq!(cd.a[0].max_abs_coeff(), 0.0);
        assert_eq!(cd.a[1].max_abs_coeff(), 0.0);
    }

    #[test]
    fn affine_group_torsion_value() {
        // gamma^2_21 - gamma^2_12 gives a_1 = -1/(x1 y1) = -1 at the base point
        let w = parse_web("f1 = x1 * y1\nf2 = x1 * y2 + x2").unwrap();
        let c = build_coframe(&w, &BasePoint::new(1.0, 0.0, 1.0, 0.0), &cfg()).unwrap();
        let cd = solve_chern(&c, &cfg()).unwrap();
        assert_relative_eq!(cd.a[0].value(), -1.0, epsilon = 1e-12);
        assert_relative_eq!(cd.a[1].value(), 0.0, epsilon = 1e-12);
        assert!(cd.torsion_residual < 1e-12);
        assert!(cd.structure_residual < 1e-12);
    }
}
