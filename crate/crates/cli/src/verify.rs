//! The `verify` subcommand: identity residual battery over one web (plus
//! optional seeded extras), with a perturbation-injection mode.
#![allow(clippy::needless_range_loop)]

use std::process::ExitCode;

use threeweb_core::config::AnalysisConfig;
use threeweb_core::corpus;
use threeweb_core::invariants::{
    invariant_b, specialize_frame, transform_tensors,
};
use threeweb_core::prolong::curvature_jets;
use threeweb_core::webframe::BasePoint;
use threeweb_core::{classify, verify_identities, WebDefinition, WebTensors};

use crate::{load_web, parse_point_arg, VerifyArgs, EXIT_DEGENERATE, EXIT_USAGE, EXIT_VERIFICATION};

struct Check {
    name: &'static str,
    residual: f64,
    tol: f64,
    skipped: bool,
}

impl Check {
    fn ok(&self) -> bool {
        self.skipped || self.residual <= self.tol
    }
}

struct Battery {
    checks: Vec<Check>,
}

impl Battery {
    fn new() -> Battery {
        let names = [
            "structure.closure",
            "curvature.purity",
            "antisym.p",
            "antisym.q",
            "prolong.bbar-skew",
            "prolong.btil-skew",
            "prolong.pbar-skew",
            "prolong.qtil-skew",
            "prolong.mixed-link",
            "antisym.pbar",
            "antisym.ptil",
            "antisym.qbar",
            "antisym.qtil",
            "decomposition",
            "frame.p-transform",
            "frame.b-transform",
            "invariant.conformal",
        ];
        Battery {
            checks: names
                .iter()
                .map(|&name| Check {
                    name,
                    residual: 0.0,
                    tol: 0.0,
                    skipped: true,
                })
                .collect(),
        }
    }

    fn record(&mut self, name: &str, residual: f64, tol: f64) {
        let c = self
            .checks
            .iter_mut()
            .find(|c| c.name == name)
            .expect("unknown check name");
        c.skipped = false;
        c.residual = c.residual.max(residual);
        c.tol = if c.tol == 0.0 { tol } else { c.tol.min(tol) };
    }
}

pub fn run(args: VerifyArgs) -> ExitCode {
    let web = match load_web(&args.web) {
        Ok(w) => w,
        Err(c) => return c,
    };
    let point = match parse_point_arg(&args.point) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let inject = match args.inject.as_deref().map(parse_injection).transpose() {
        Ok(i) => i,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let cfg = AnalysisConfig::default();
    let mut battery = Battery::new();
    let mut cases: Vec<(WebDefinition, BasePoint)> = vec![(web, point)];
    for seed in 0..args.seeds as u64 {
        cases.push(corpus::seeded_web(seed));
    }
    let ncases = cases.len();
    for (web, point) in cases {
        if let Err(e) = run_case(&web, &point, &cfg, inject, &mut battery) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_DEGENERATE);
        }
    }

    if ncases > 1 {
        println!("battery over {ncases} webs (max residual per family)");
    }
    let mut all_ok = true;
    for c in &battery.checks {
        if c.skipped {
            println!("{:<19} skipped", c.name);
            continue;
        }
        let ok = c.ok();
        all_ok &= ok;
        println!(
            "{:<19} {:>12.3e}  (tol {:.1e})  {}",
            c.name,
            c.residual,
            c.tol,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFICATION)
    }
}

#[derive(Clone, Copy)]
enum Injection {
    A(usize, f64),
    P(usize, usize, f64),
    Q(usize, usize, f64),
    B(usize, usize, usize, usize, f64),
}

/// Parse "b1112=+1" style perturbation specs (indices are 1-based).
fn parse_injection(spec: &str) -> Result<Injection, String> {
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| format!("bad injection `{spec}`: expected name=value"))?;
    let value: f64 = value
        .trim_start_matches('+')
        .parse()
        .map_err(|_| format!("bad injection value in `{spec}`"))?;
    let (head, digits) = name.split_at(1);
    let idx: Vec<usize> = digits
        .chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as usize)
                .filter(|&d| d == 1 || d == 2)
                .map(|d| d - 1)
                .ok_or_else(|| format!("bad index `{c}` in `{spec}`"))
        })
        .collect::<Result<_, _>>()?;
    match (head, idx.as_slice()) {
        ("a", [i]) => Ok(Injection::A(*i, value)),
        ("p", [i, j]) => Ok(Injection::P(*i, *j, value)),
        ("q", [i, j]) => Ok(Injection::Q(*i, *j, value)),
        ("b", [i, j, k, l]) => Ok(Injection::B(*i, *j, *k, *l, value)),
        _ => Err(format!(
            "bad injection `{spec}`: expected a<i>, p<ij>, q<ij> or b<ijkl>"
        )),
    }
}

fn apply_injection(t: &mut WebTensors, inj: Injection) {
    match inj {
        Injection::A(i, v) => t.a[i] += v,
        Injection::P(i, j, v) => t.p[i][j] += v,
        Injection::Q(i, j, v) => t.q[i][j] += v,
        Injection::B(i, j, k, l, v) => t.b[i][j][k][l] += v,
    }
}

fn run_case(
    web: &WebDefinition,
    point: &BasePoint,
    cfg: &AnalysisConfig,
    inject: Option<Injection>,
    battery: &mut Battery,
) -> Result<(), threeweb_core::AnalysisError> {
    let analysis = classify(web, point, cfg)?;
    let mut tensors = analysis.tensors.clone();
    if let Some(inj) = inject {
        apply_injection(&mut tensors, inj);
    }

    let conn_tol = cfg.tol_connection;
    battery.record(
        "structure.closure",
        analysis
            .chern
            .structure_residual
            .max(analysis.chern.torsion_residual),
        conn_tol * (1.0 + tensors.scale()),
    );
    let (_, impurity) = curvature_jets(&analysis.chern, cfg)?;
    battery.record("curvature.purity", impurity, conn_tol * (1.0 + tensors.scale()));

    let rep = verify_identities(&tensors);
    let tol = cfg.tol_identity * (1.0 + rep.scale);
    battery.record("antisym.p", rep.antisym[0], tol);
    battery.record("antisym.q", rep.antisym[1], tol);
    let prolong_names = [
        "prolong.bbar-skew",
        "prolong.btil-skew",
        "prolong.pbar-skew",
        "prolong.qtil-skew",
        "prolong.mixed-link",
    ];
    for (k, r) in rep.prolongation.iter().enumerate() {
        battery.record(prolong_names[k], *r, tol);
    }
    let diff_names = ["antisym.pbar", "antisym.ptil", "antisym.qbar", "antisym.qtil"];
    for (k, r) in rep.differentiated.iter().enumerate() {
        battery.record(diff_names[k], *r, tol);
    }
    battery.record("decomposition", rep.decomposition, tol);

    // frame-dependent checks need a usable covector
    if tensors.a_norm() >= cfg.classify_threshold(tensors.scale()) {
        let (frame, _) = specialize_frame(&tensors, cfg.frame_row2, cfg)?;

        // transformed p components against their closed-form expansions
        let tt = transform_tensors(&tensors, &frame, "check");
        let [a1, a2] = tensors.a;
        let (c1, c2) = (frame.a[1][0], frame.a[1][1]);
        let d2 = frame.det * frame.det;
        let p = &tensors.p;
        let want21 = c1 * (a2 * p[0][1] - a1 * p[1][1]) + c2 * (a1 * p[1][0] - a2 * p[0][0]);
        let quad_form = a2 * a2 * p[0][0] - a1 * a2 * (p[0][1] + p[1][0]) + a1 * a1 * p[1][1];
        let r_frame = (tt.p[1][0] * d2 - want21)
            .abs()
            .max((tt.p[1][1] * d2 - quad_form).abs());
        let pscale: f64 = p.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        battery.record(
            "frame.p-transform",
            r_frame,
            cfg.tol_identity * pscale * (1.0 + tensors.a_norm()).powi(2) * (1.0 + d2),
        );

        // curvature transform against the quadruple-loop contraction
        let mut r_b = 0.0f64;
        let mut bscale = 1.0f64;
        for ip in 0..2 {
            for jp in 0..2 {
                for kp in 0..2 {
                    for lp in 0..2 {
                        let mut want = 0.0;
                        for i in 0..2 {
                            for j in 0..2 {
                                for k in 0..2 {
                                    for l in 0..2 {
                                        want += frame.a[ip][i]
                                            * frame.inv[j][jp]
                                            * frame.inv[k][kp]
                                            * frame.inv[l][lp]
                                            * tensors.b[i][j][k][l];
                                    }
                                }
                            }
                        }
                        bscale = bscale.max(want.abs());
                        r_b = r_b.max((tt.b[ip][jp][kp][lp] - want).abs());
                    }
                }
            }
        }
        battery.record("frame.b-transform", r_b, 1e-10 * bscale);

        let inv = invariant_b(&tensors, &frame, cfg)?;
        let bscale = tensors.scale() * (1.0 + tensors.a_norm()).powi(4);
        if let Some(rc) = inv.conformal_identity_residual {
            battery.record(
                "invariant.conformal",
                rc.max(inv.expansion_residual),
                cfg.tol_identity * (1.0 + bscale),
            );
        }
    }
    Ok(())
}
