//! Named test webs and a seeded generator of random polynomial webs with
//! well-conditioned base points.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::AnalysisConfig;
use crate::exprlang::{parse_web, WebDefinition};
use crate::invariants::classify;
use crate::webframe::BasePoint;

/// f = x + y: the flat web, everything vanishes.
pub fn parallelizable() -> WebDefinition {
    parse_web("name = parallelizable\nf1 = x1 + y1\nf2 = x2 + y2").unwrap()
}

/// Web of the two-dimensional affine group: nonzero torsion, flat curvature.
pub fn affine_group() -> WebDefinition {
    parse_web("name = affine-group\nf1 = x1 * y1\nf2 = x1 * y2 + x2").unwrap()
}

/// A fixed polynomial web with nonvanishing torsion and curvature.
pub fn generic_poly() -> WebDefinition {
    parse_web("name = generic-poly\nf1 = x1 + y1 + x2 * y2\nf2 = x2 + y2 + x1 * y1 * y1").unwrap()
}

/// Generic base point for `generic_poly`.
pub fn generic_point() -> BasePoint {
    BasePoint::new(0.11, -0.07, 0.23, 0.15)
}

/// A seeded random polynomial web together with a base point at which it is
/// well conditioned: identity leading part plus small mixed monomials of
/// degree <= 3 so that the coframe determinants stay near one.
pub fn seeded_web(seed: u64) -> (WebDefinition, BasePoint) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monomials = [
        "x1 * y1", "x1 * y2", "x2 * y1", "x2 * y2", "x1 * y1 * y1", "x2 * y2 * y2",
        "x1 * x1 * y2", "x2 * x1 * y1", "x1 * y1 * y2", "x2 * y1 * y2",
    ];
    loop {
        let mut defs = Vec::new();
        for base in ["x1 + y1", "x2 + y2"] {
            let mut expr = base.to_string();
            for m in monomials {
                if rng.random_bool(0.5) {
                    let c = rng.random_range(-0.25..0.25f64);
                    // keep coefficients short so files stay readable
                    expr.push_str(&format!(" + {:.3} * {m}", c));
                }
            }
            defs.push(expr);
        }
        let text = format!("name = seeded-{seed}\nf1 = {}\nf2 = {}", defs[0], defs[1]);
        let web = parse_web(&text).unwrap();
        let point = BasePoint::new(
            rng.random_range(-0.35..0.35),
            rng.random_range(-0.35..0.35),
            rng.random_range(-0.35..0.35),
            rng.random_range(-0.35..0.35),
        );
        if let Some(pt) = well_conditioned(&web, point) {
            return (web, pt);
        }
    }
}

/// Accept a point when the pipeline runs, the torsion is comfortably
/// nonzero and no tensor is blowing up.
fn well_conditioned(web: &WebDefinition, point: BasePoint) -> Option<BasePoint> {
    let cfg = AnalysisConfig::default();
    let analysis = classify(web, &point, &cfg).ok()?;
    let t = &analysis.tensors;
    let a = t.a_norm();
    if !(0.02..20.0).contains(&a) {
        return None;
    }
    if t.scale() > 100.0 {
        return None;
    }
    // a1 bounded away from zero keeps the conformal-curvature substitution
    // usable on the whole corpus
    if t.a[0].abs() < 0.11 {
        return None;
    }
    Some(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_webs_are_reproducible_and_conditioned() {
        let (w1, p1) = seeded_web(42);
        let (w2, p2) = seeded_web(42);
        assert_eq!(w1, w2);
        assert_eq!(p1.coords(), p2.coords());
        let cfg = AnalysisConfig::default();
        let t = classify(&w1, &p1, &cfg).unwrap().tensors;
        assert!(t.a[0].abs() >= 0.11);
    }

    #[test]
    fn named_webs_parse() {
        assert_eq!(parallelizable().name.as_deref(), Some("parallelizable"));
        assert_eq!(affine_group().name.as_deref(), Some("affine-group"));
        assert_eq!(generic_poly().name.as_deref(), Some("generic-poly"));
    }
}
