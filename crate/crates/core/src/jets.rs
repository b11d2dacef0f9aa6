//! Order-tracked truncated Taylor arithmetic in the four base variables.
//!
//! A [`Jet`] stores the coefficients c_alpha = (d^alpha g / alpha!)(p) for
//! all multi-indices |alpha| <= order, densely, in graded-lex order. The
//! `order` field is the highest total degree whose coefficients are still
//! exact; differentiation lowers it by one, products and compositions take
//! the minimum of their operands. The pipeline lifts the web function at
//! order 4, which leaves exact values for every tensor through the third
//! prolongation order.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::exprlang::{BinOp, Expr, Func};
use crate::webframe::BasePoint;


/// Hard floor below which pivots, determinants and divisors are treated as
/// singular.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum JetError {
    #[error("singular evaluation of `{0}` (value {1:.3e})")]
    SingularEvaluation(String, f64),
    #[error("singular 2x2 jet matrix (|det| = {0:.3e})")]
    SingularMatrix(f64),
}

/// Multi-index enumeration shared by all jets of a given order, with a
/// precomputed list of index triples (ia, ib, iprod) for truncated products
/// and per-axis derivative index maps.
struct IndexTable {
    multi: Vec<[u8; 4]>,
    rank: HashMap<[u8; 4], usize>,
    products: Vec<(u32, u32, u32)>,
    /// derivative[axis][i] = index of multi[i] + e_axis in this table
    /// (usize::MAX when it would exceed the order), with the multiplier
    /// stored separately.
    derivative: [Vec<(usize, f64)>; 4],
}

fn build_table(order: usize) -> IndexTable {
    let mut multi = Vec::new();
    for total in 0..=order {
        for a in (0..=total).rev() {
            for b in (0..=total - a).rev() {
                for c in (0..=total - a - b).rev() {
                    let d = total - a - b - c;
                    multi.push([a as u8, b as u8, c as u8, d as u8]);
                }
            }
        }
    }
    let rank: HashMap<[u8; 4], usize> = multi
        .iter()
        .enumerate()
        .map(|(i, &m)| (m, i))
        .collect();
    let mut products = Vec::new();
    for (ia, ma) in multi.iter().enumerate() {
        let da = degree(ma);
        for (ib, mb) in multi.iter().enumerate() {
            if da + degree(mb) > order {
                continue;
            }
            let sum = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3]];
            products.push((ia as u32, ib as u32, rank[&sum] as u32));
        }
    }
    let derivative = std::array::from_fn(|axis| {
        multi
            .iter()
            .map(|m| {
                let mut up = *m;
                up[axis] += 1;
                match rank.get(&up) {
                    Some(&i) => (i, f64::from(up[axis])),
                    None => (usize::MAX, 0.0),
                }
            })
            .collect()
    });
    IndexTable {
        multi,
        rank,
        products,
        derivative,
    }
}

fn table(order: usize) -> &'static IndexTable {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static IndexTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(order)
        .or_insert_with(|| Box::leak(Box::new(build_table(order))))
}

fn degree(m: &[u8; 4]) -> usize {
    m.iter().map(|&x| x as usize).sum()
}

/// Truncated Taylor expansion of a scalar function at a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn zero(order: usize) -> Jet {
        Jet {
            order,
            coeffs: vec![0.0; table(order).multi.len()],
        }
    }

    pub fn constant(value: f64, order: usize) -> Jet {
        let mut j = Jet::zero(order);
        j.coeffs[0] = value;
        j
    }

    /// The coordinate function of axis `axis` (0..4) with the given value.
    pub fn variable(axis: usize, value: f64, order: usize) -> Jet {
        let mut j = Jet::constant(value, order);
        if order >= 1 {
            let mut m = [0u8; 4];
            m[axis] = 1;
            let idx = table(order).rank[&m];
            j.coeffs[idx] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficient for a multi-index, i.e. d^alpha g / alpha! at the point.
    pub fn coeff(&self, alpha: [u8; 4]) -> f64 {
        if degree(&alpha) > self.order {
            panic!("coefficient degree {} exceeds jet order {}", degree(&alpha), self.order);
        }
        self.coeffs[table(self.order).rank[&alpha]]
    }

    /// Partial derivative d/dv along `axis`; drops the order by one.
    pub fn partial(&self, axis: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let out_order = self.order - 1;
        let tout = table(out_order);
        // graded-lex order makes the first len(tout) indices shared, so the
        // derivative map of the smaller table applies directly
        let map = &table(self.order).derivative[axis];
        let mut out = Jet::zero(out_order);
        for i in 0..tout.multi.len() {
            let (src, mult) = map[i];
            out.coeffs[i] = self.coeffs[src] * mult;
        }
        out
    }

    /// Drop coefficients above `order` (no-op if already lower). Tables are
    /// graded, so lower orders are prefixes of higher ones.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let len = table(order).multi.len();
        Jet {
            order,
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn binary(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let order = self.order.min(other.order);
        let len = table(order).multi.len();
        Jet {
            order,
            coeffs: self.coeffs[..len]
                .iter()
                .zip(&other.coeffs[..len])
                .map(|(x, y)| f(*x, *y))
                .collect(),
        }
    }

    pub fn mul_jet(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let t = table(order);
        let mut out = Jet::zero(order);
        // the truncated views are plain prefixes of the coefficient vectors
        let a = &self.coeffs;
        let b = &other.coeffs;
        for &(ia, ib, ip) in &t.products {
            out.coeffs[ip as usize] += a[ia as usize] * b[ib as usize];
        }
        out
    }

    /// Compose a univariate analytic function given by the Taylor
    /// coefficients `series[k]` of h around self.value(): returns
    /// sum_k series[k] * (self - value)^k, truncated.
    fn compose(&self, series: &[f64]) -> Jet {
        let order = self.order;
        let mut w = self.clone();
        w.coeffs[0] = 0.0;
        let mut acc = Jet::constant(series[order], order);
        for k in (0..order).rev() {
            acc = acc.mul_jet(&w);
            acc.coeffs[0] += series[k];
        }
        acc
    }

    pub fn recip(&self, context: &str) -> Result<Jet, JetError> {
        let v = self.value();
        if v.abs() < SINGULAR_TOL {
            return Err(JetError::SingularEvaluation(context.to_string(), v));
        }
        let mut series = vec![0.0; self.order + 1];
        let mut c = 1.0 / v;
        for s in series.iter_mut() {
            *s = c;
            c *= -1.0 / v;
        }
        Ok(self.compose(&series))
    }

    pub fn div_jet(&self, other: &Jet, context: &str) -> Result<Jet, JetError> {
        Ok(self.mul_jet(&other.recip(context)?))
    }

    pub fn powi(&self, n: i32, context: &str) -> Result<Jet, JetError> {
        if n < 0 {
            let pos = self.powi(-n, context)?;
            return pos.recip(context);
        }
        let mut acc = Jet::constant(1.0, self.order);
        for _ in 0..n {
            acc = acc.mul_jet(self);
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Jet {
        let v = self.value().exp();
        let mut series = vec![0.0; self.order + 1];
        let mut fact = 1.0;
        for (k, s) in series.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *s = v / fact;
        }
        self.compose(&series)
    }

    pub fn ln(&self, context: &str) -> Result<Jet, JetError> {
        let v = self.value();
        if v <= SINGULAR_TOL {
            return Err(JetError::SingularEvaluation(context.to_string(), v));
        }
        let mut series = vec![0.0; self.order + 1];
        series[0] = v.ln();
        let mut sign = 1.0;
        for k in 1..=self.order {
            series[k] = sign / (k as f64 * v.powi(k as i32));
            sign = -sign;
        }
        Ok(self.compose(&series))
    }

    pub fn sin(&self) -> Jet {
        self.trig(true)
    }

    pub fn cos(&self) -> Jet {
        self.trig(false)
    }

    fn trig(&self, sin_first: bool) -> Jet {
        let v = self.value();
        let cycle = [v.sin(), v.cos(), -v.sin(), -v.cos()];
        let offset = if sin_first { 0 } else { 1 };
        let mut series = vec![0.0; self.order + 1];
        let mut fact = 1.0;
        for (k, s) in series.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *s = cycle[(k + offset) % 4] / fact;
        }
        self.compose(&series)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.binary(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.binary(rhs, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<&Jet> for Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        &self + rhs
    }
}

impl Sub<&Jet> for Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        &self - rhs
    }
}

/// Lift an expression to its order-`order` jet at `p`.
pub fn jet_lift(e: &Expr, p: &BasePoint, order: usize) -> Result<Jet, JetError> {
    match e {
        Expr::Var(v) => Ok(Jet::variable(v.axis(), p.coord(v.axis()), order)),
        Expr::Lit(r) => Ok(Jet::constant(*r.numer() as f64 / *r.denom() as f64, order)),
        Expr::Neg(a) => Ok(-&jet_lift(a, p, order)?),
        Expr::Bin(op, a, b) => {
            let (x, y) = (jet_lift(a, p, order)?, jet_lift(b, p, order)?);
            Ok(match op {
                BinOp::Add => &x + &y,
                BinOp::Sub => &x - &y,
                BinOp::Mul => &x * &y,
                BinOp::Div => x.div_jet(&y, &e.to_string())?,
            })
        }
        Expr::Pow(b, n) => jet_lift(b, p, order)?.powi(*n, &e.to_string()),
        Expr::Apply(f, a) => {
            let x = jet_lift(a, p, order)?;
            Ok(match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log => x.ln(&e.to_string())?,
            })
        }
    }
}

/// 2x2 matrix with jet entries, row-major.
#[derive(Debug, Clone)]
pub struct Mat2 {
    pub e: [[Jet; 2]; 2],
}

impl Mat2 {
    pub fn det(&self) -> Jet {
        &(&self.e[0][0] * &self.e[1][1]) - &(&self.e[0][1] * &self.e[1][0])
    }

    /// Inverse by adjugate over the jet determinant.
    pub fn inv(&self) -> Result<Mat2, JetError> {
        let det = self.det();
        if det.value().abs() < SINGULAR_TOL {
            return Err(JetError::SingularMatrix(det.value()));
        }
        let inv_det = det.recip("matrix determinant")?;
        Ok(Mat2 {
            e: [
                [&self.e[1][1] * &inv_det, (-&self.e[0][1]).mul_jet(&inv_det)],
                [(-&self.e[1][0]).mul_jet(&inv_det), &self.e[0][0] * &inv_det],
            ],
        })
    }

    pub fn mul_mat(&self, other: &Mat2) -> Mat2 {
        let prod = |i: usize, j: usize| {
            &(&self.e[i][0] * &other.e[0][j]) + &(&self.e[i][1] * &other.e[1][j])
        };
        Mat2 {
            e: [[prod(0, 0), prod(0, 1)], [prod(1, 0), prod(1, 1)]],
        }
    }
}

/// Invert a 2x2 jet matrix; exposed with the contract that M * M^-1 is the
/// identity to truncation order.
pub fn jet_invert_2x2(m: &Mat2) -> Result<Mat2, JetError> {
    m.inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_expr;
    use approx::assert_relative_eq;

    fn pt(x1: f64, x2: f64, y1: f64, y2: f64) -> BasePoint {
        BasePoint::new(x1, x2, y1, y2)
    }

    #[test]
    fn product_jet_of_x1_y1() {
        let e = parse_expr("x1 * y1").unwrap();
        let j = jet_lift(&e, &pt(2.0, 0.0, 3.0, 0.0), 2).unwrap();
        assert_relative_eq!(j.value(), 6.0);
        assert_relative_eq!(j.coeff([1, 0, 0, 0]), 3.0);
        assert_relative_eq!(j.coeff([0, 0, 1, 0]), 2.0);
        assert_relative_eq!(j.coeff([1, 0, 1, 0]), 1.0);
        for m in [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2], [0, 1, 1, 0]] {
            assert_eq!(j.coeff(m), 0.0, "expected zero at {m:?}");
        }
    }

    #[test]
    fn identity_jet() {
        let e = parse_expr("x1").unwrap();
        let j = jet_lift(&e, &pt(0.7, 1.0, -2.0, 4.0), 4).unwrap();
        assert_eq!(j.value(), 0.7);
        assert_eq!(j.coeff([1, 0, 0, 0]), 1.0);
        let nonzero: usize = (0..table(4).multi.len())
            .filter(|&i| j.coeffs[i] != 0.0)
            .count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn exp_series_univariate() {
        // exp(x1) at 0: coefficients 1/k!
        let e = parse_expr("exp(x1)").unwrap();
        let j = jet_lift(&e, &pt(0.0, 0.0, 0.0, 0.0), 4).unwrap();
        assert_relative_eq!(j.coeff([0, 0, 0, 0]), 1.0, epsilon = 1e-15);
        assert_relative_eq!(j.coeff([1, 0, 0, 0]), 1.0, epsilon = 1e-15);
        assert_relative_eq!(j.coeff([2, 0, 0, 0]), 0.5, epsilon = 1e-15);
        assert_relative_eq!(j.coeff([3, 0, 0, 0]), 1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(j.coeff([4, 0, 0, 0]), 1.0 / 24.0, epsilon = 1e-15);
    }

    #[test]
    fn log_and_division() {
        // log(1 + x1) at 0: 0, 1, -1/2, 1/3, -1/4
        let e = parse_expr("log(1 + x1)").unwrap();
        let j = jet_lift(&e, &pt(0.0, 0.0, 0.0, 0.0), 4).unwrap();
        assert_relative_eq!(j.coeff([1, 0, 0, 0]), 1.0, epsilon = 1e-15);
        assert_relative_eq!(j.coeff([2, 0, 0, 0]), -0.5, epsilon = 1e-15);
        assert_relative_eq!(j.coeff([3, 0, 0, 0]), 1.0 / 3.0, epsilon = 1e-15);
        // geometric series 1/(1-x1)
        let g = jet_lift(&parse_expr("1 / (1 - x1)").unwrap(), &pt(0.0, 0.0, 0.0, 0.0), 4).unwrap();
        for k in 0..=4u8 {
            assert_relative_eq!(g.coeff([k, 0, 0, 0]), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn singular_division_reports_subexpression() {
        let e = parse_expr("x1 / y1").unwrap();
        let err = jet_lift(&e, &pt(1.0, 0.0, 0.0, 0.0), 2).unwrap_err();
        match err {
            JetError::SingularEvaluation(what, _) => assert!(what.contains("y1")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncation_consistency() {
        let e = parse_expr("exp(x1 * y2) + sin(x2) * cos(y1)").unwrap();
        let p = pt(0.3, -0.2, 0.9, 0.4);
        let j4 = jet_lift(&e, &p, 4).unwrap();
        let j3 = jet_lift(&e, &p, 3).unwrap();
        assert_eq!(j4.truncate(3), j3);
    }

    #[test]
    fn derivative_lowers_order() {
        let e = parse_expr("x1 ^ 2 * y1").unwrap();
        let j = jet_lift(&e, &pt(2.0, 0.0, 5.0, 0.0), 3).unwrap();
        let dj = j.partial(0);
        assert_eq!(dj.order(), 2);
        assert_relative_eq!(dj.value(), 20.0); // d/dx1 (x1^2 y1) = 2 x1 y1
        assert_relative_eq!(dj.coeff([0, 0, 1, 0]), 4.0); // d/dy1 of that = 2 x1
    }

    #[test]
    fn invert_2x2_closed_form() {
        // M = [[y1, 0], [y2, 1]] at y = (1, 0); inverse [[1/y1, 0], [-y2/y1, 1]]
        let p = pt(0.0, 0.0, 1.0, 0.0);
        let lift = |s: &str| jet_lift(&parse_expr(s).unwrap(), &p, 4).unwrap();
        let m = Mat2 {
            e: [[lift("y1"), lift("0")], [lift("y2"), lift("1")]],
        };
        let inv = jet_invert_2x2(&m).unwrap();
        let want = Mat2 {
            e: [
                [lift("1 / y1"), lift("0")],
                [lift("0 - y2 / y1"), lift("1")],
            ],
        };
        for i in 0..2 {
            for j in 0..2 {
                let diff = &inv.e[i][j] - &want.e[i][j];
                assert!(diff.max_abs_coeff() < 1e-12, "entry ({i},{j})");
            }
        }
        // product residual
        let prod = m.mul_mat(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                let mut diff = prod.e[i][j].clone();
                diff.coeffs[0] -= want;
                assert!(diff.max_abs_coeff() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let p = pt(0.0, 0.0, 1.0, 0.0);
        let lift = |s: &str| jet_lift(&parse_expr(s).unwrap(), &p, 2).unwrap();
        let m = Mat2 {
            e: [[lift("y1"), lift("y1")], [lift("1"), lift("1")]],
        };
        assert!(matches!(jet_invert_2x2(&m), Err(JetError::SingularMatrix(_))));
    }
}
