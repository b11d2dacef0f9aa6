//! Richardson-extrapolated central finite differences on expressions.
//!
//! Verification support: these differentiators work through the plain f64
//! evaluator and share nothing with the jet arithmetic, so they can serve
//! as an independent oracle for any derivative the pipeline produces.

use crate::exprlang::{evaluate, EvalError, Expr};
use crate::webframe::BasePoint;

type Scalar<'a> = &'a dyn Fn(&BasePoint) -> Result<f64, EvalError>;

/// Central difference of `f` along `axis` with step `h`.
fn central(f: Scalar<'_>, p: &BasePoint, axis: usize, h: f64) -> Result<f64, EvalError> {
    let plus = f(&p.with_coord(axis, p.coord(axis) + h))?;
    let minus = f(&p.with_coord(axis, p.coord(axis) - h))?;
    Ok((plus - minus) / (2.0 * h))
}

/// One Richardson step: combines D(h) and D(h/2) to cancel the h^2 error.
fn richardson(f: Scalar<'_>, p: &BasePoint, axis: usize, h: f64) -> Result<f64, EvalError> {
    let coarse = central(f, p, axis, h)?;
    let fine = central(f, p, axis, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn mixed_dyn(f: Scalar<'_>, p: &BasePoint, axes: &[usize], h: f64) -> Result<f64, EvalError> {
    match axes.split_first() {
        None => f(p),
        Some((&first, rest)) => {
            let inner = move |q: &BasePoint| mixed_dyn(f, q, rest, h);
            richardson(&inner, p, first, h)
        }
    }
}

/// Mixed partial derivative d^|axes| f / (d axes...) at `p`, by nesting
/// Richardson-extrapolated central differences.
pub fn mixed_partial<F>(f: F, p: &BasePoint, axes: &[usize], h: f64) -> Result<f64, EvalError>
where
    F: Fn(&BasePoint) -> Result<f64, EvalError>,
{
    mixed_dyn(&f, p, axes, h)
}

/// Partial derivative of an expression by multi-index, divided by the
/// factorial of the multi-index so values are comparable with jet
/// coefficients.
pub fn taylor_coefficient(
    e: &Expr,
    p: &BasePoint,
    alpha: [u8; 4],
    h: f64,
) -> Result<f64, EvalError> {
    let mut axes = Vec::new();
    let mut fact = 1.0f64;
    for (axis, &mult) in alpha.iter().enumerate() {
        for k in 0..mult {
            axes.push(axis);
            fact *= f64::from(k) + 1.0;
        }
    }
    let d = mixed_partial(|q| evaluate(e, q), p, &axes, h)?;
    Ok(d / fact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_expr;
    use approx::assert_relative_eq;

    #[test]
    fn first_and_second_derivatives_of_products() {
        let e = parse_expr("x1 * x1 * y2").unwrap();
        let p = BasePoint::new(1.5, 0.0, 0.0, 2.0);
        let dx = mixed_partial(|q| evaluate(&e, q), &p, &[0], 1e-3).unwrap();
        assert_relative_eq!(dx, 2.0 * 1.5 * 2.0, epsilon = 1e-9);
        let dxx = mixed_partial(|q| evaluate(&e, q), &p, &[0, 0], 1e-3).unwrap();
        assert_relative_eq!(dxx, 2.0 * 2.0, epsilon = 1e-7);
        let dxy = mixed_partial(|q| evaluate(&e, q), &p, &[0, 3], 1e-3).unwrap();
        assert_relative_eq!(dxy, 2.0 * 1.5, epsilon = 1e-7);
    }

    #[test]
    fn transcendental_third_order() {
        let e = parse_expr("exp(x1 * y2)").unwrap();
        let p = BasePoint::new(0.4, 0.0, 0.0, 0.7);
        // d^3/dx1^3 exp(x1 y2) = y2^3 exp(x1 y2)
        let d3 = mixed_partial(|q| evaluate(&e, q), &p, &[0, 0, 0], 1e-2).unwrap();
        let want = 0.7f64.powi(3) * (0.4 * 0.7f64).exp();
        assert_relative_eq!(d3, want, epsilon = 1e-6);
    }
}
