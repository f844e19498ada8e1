//! Piecewise-linear functions on `[0, ∞)` and moduli of continuity.
//!
//! All checks here are exact. A piecewise-linear function is linear on each
//! cell of the arrangement cut out by its breakpoints, so inequalities between
//! such functions reduce to finitely many vertex evaluations plus the slopes of
//! the unbounded directions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{Extended, Rational};

/// A continuous piecewise-linear function on `[0, ∞)`.
///
/// `points` start at `x = 0` with strictly increasing `x`; beyond the last
/// point the function continues with slope `tail_slope`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    points: Vec<(Rational, Rational)>,
    tail_slope: Rational,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(Rational, Rational)>, tail_slope: Rational) -> Result<Self> {
        match points.first() {
            Some((x, _)) if x.is_zero() => {}
            _ => return Err(Error::InvalidModulus("first breakpoint must be at x = 0".into())),
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidModulus("breakpoints must be strictly increasing".into()));
        }
        Ok(PiecewiseLinear { points, tail_slope }.simplified())
    }

    /// `t ↦ slope · t`.
    pub fn linear(slope: Rational) -> Self {
        PiecewiseLinear { points: vec![(Rational::zero(), Rational::zero())], tail_slope: slope }
    }

    pub fn constant(c: Rational) -> Self {
        PiecewiseLinear { points: vec![(Rational::zero(), c)], tail_slope: Rational::zero() }
    }

    pub fn identity() -> Self {
        Self::linear(Rational::one())
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.points.iter().map(|(x, _)| x)
    }

    pub fn tail_slope(&self) -> &Rational {
        &self.tail_slope
    }

    fn last(&self) -> &(Rational, Rational) {
        self.points.last().expect("nonempty")
    }

    /// Slope of piece `i`; piece `points.len() - 1` is the tail.
    fn piece_slope(&self, i: usize) -> Rational {
        if i + 1 < self.points.len() {
            let (x0, y0) = &self.points[i];
            let (x1, y1) = &self.points[i + 1];
            (y1 - y0) / (x1 - x0)
        } else {
            self.tail_slope.clone()
        }
    }

    /// All piece slopes, tail last.
    pub fn slopes(&self) -> Vec<Rational> {
        (0..self.points.len()).map(|i| self.piece_slope(i)).collect()
    }

    fn piece_of(&self, t: &Rational) -> usize {
        match self.points.binary_search_by(|(x, _)| x.cmp(t)) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        assert!(!t.is_negative(), "evaluated at negative argument {t}");
        let i = self.piece_of(t);
        let (x0, y0) = &self.points[i];
        y0 + self.piece_slope(i) * (t - x0)
    }

    /// Slope immediately to the right of `t`.
    pub fn right_slope(&self, t: &Rational) -> Rational {
        self.piece_slope(self.piece_of(t))
    }

    /// `lim_{t→∞} f(t)`.
    pub fn limit(&self) -> Extended {
        if self.tail_slope.is_positive() {
            Extended::Infinite
        } else if self.tail_slope.is_zero() {
            Extended::Finite(self.last().1.clone())
        } else {
            panic!("limit of a function with negative tail slope")
        }
    }

    /// Points `t` in the interior of a non-flat piece with `f(t) = level`.
    /// Together with the breakpoints these cover every solution.
    pub fn preimages(&self, level: &Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        for i in 0..self.points.len() {
            let s = self.piece_slope(i);
            if s.is_zero() {
                continue;
            }
            let (x0, y0) = &self.points[i];
            let t = x0 + (level - y0) / &s;
            let inside = t > *x0 && (i + 1 == self.points.len() || t < self.points[i + 1].0);
            if inside {
                out.push(t);
            }
        }
        out
    }

    /// Drops breakpoints where the slope does not change.
    fn simplified(mut self) -> Self {
        let slopes = self.slopes();
        let mut keep = vec![true; self.points.len()];
        for i in 1..self.points.len() {
            if slopes[i - 1] == slopes[i] {
                keep[i] = false;
            }
        }
        let mut i = 0;
        self.points.retain(|_| {
            let k = keep[i];
            i += 1;
            k
        });
        self
    }

    /// Samples a function that is linear between consecutive `xs` and beyond the last one.
    fn from_samples<F: Fn(&Rational) -> Rational>(xs: BTreeSet<Rational>, f: F) -> Self {
        let xs: Vec<Rational> = xs.into_iter().collect();
        let points: Vec<(Rational, Rational)> = xs.iter().map(|x| (x.clone(), f(x))).collect();
        let (xl, yl) = points.last().expect("contains 0").clone();
        let tail = f(&(&xl + Rational::one())) - yl;
        PiecewiseLinear { points, tail_slope: tail }.simplified()
    }

    /// Pointwise combination by `op`, which must be one of sum, max or min, so
    /// that the result is linear wherever both inputs are and they do not cross.
    fn combine<F: Fn(Rational, Rational) -> Rational>(&self, other: &Self, op: F) -> Self {
        let mut xs: BTreeSet<Rational> = self.breakpoints().chain(other.breakpoints()).cloned().collect();
        let grid: Vec<Rational> = xs.iter().cloned().collect();
        for (i, x0) in grid.iter().enumerate() {
            // f − g is linear on [x0, next); add its zero if inside
            let d0 = self.eval(x0) - other.eval(x0);
            let ds = self.right_slope(x0) - other.right_slope(x0);
            if ds.is_zero() {
                continue;
            }
            let t = x0 - d0 / ds;
            if t > *x0 && grid.get(i + 1).is_none_or(|x1| t < *x1) {
                xs.insert(t);
            }
        }
        Self::from_samples(xs, |x| op(self.eval(x), other.eval(x)))
    }

    pub fn max(&self, other: &Self) -> Self {
        self.combine(other, Rational::max)
    }

    pub fn min(&self, other: &Self) -> Self {
        self.combine(other, Rational::min)
    }

    pub fn sum(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    /// `self ∘ inner`; `inner` must be nondecreasing and nonnegative.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut xs: BTreeSet<Rational> = inner.breakpoints().cloned().collect();
        for b in self.breakpoints() {
            xs.extend(inner.preimages(b));
        }
        Self::from_samples(xs, |x| self.eval(&inner.eval(x)))
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.slopes().iter().all(|s| !s.is_negative())
    }

    /// First vertex `(x, y)` with `f(x + y) > f(x) + f(y)`, or `None` if subadditive.
    ///
    /// The defect is linear on the cells cut by `x = b_i`, `y = b_j`,
    /// `x + y = b_k`; along every unbounded direction its slope is
    /// `s + s − s − s = 0` beyond the last breakpoint, so vertices suffice.
    pub fn subadditivity_witness(&self) -> Option<(Rational, Rational)> {
        let b: Vec<&Rational> = self.breakpoints().collect();
        let mut vertices: Vec<(Rational, Rational)> = Vec::new();
        for bi in &b {
            for bj in &b {
                vertices.push(((*bi).clone(), (*bj).clone()));
                if bj >= bi {
                    vertices.push(((*bi).clone(), *bj - *bi));
                    vertices.push((*bj - *bi, (*bi).clone()));
                }
            }
        }
        vertices.into_iter().find(|(x, y)| self.eval(&(x + y)) > self.eval(x) + self.eval(y))
    }
}

/// A modulus of continuity: piecewise-linear, nondecreasing, subadditive, `ω(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseLinear", into = "PiecewiseLinear")]
pub struct Modulus(PiecewiseLinear);

impl TryFrom<PiecewiseLinear> for Modulus {
    type Error = Error;
    fn try_from(f: PiecewiseLinear) -> Result<Self> {
        Modulus::from_pl(f)
    }
}

impl From<Modulus> for PiecewiseLinear {
    fn from(m: Modulus) -> Self {
        m.0
    }
}

impl Modulus {
    pub fn new(points: Vec<(Rational, Rational)>, tail_slope: Rational) -> Result<Self> {
        Self::from_pl(PiecewiseLinear::new(points, tail_slope)?)
    }

    pub fn from_pl(f: PiecewiseLinear) -> Result<Self> {
        if !f.points[0].1.is_zero() {
            return Err(Error::InvalidModulus(format!("ω(0) = {}", f.points[0].1)));
        }
        if !f.is_nondecreasing() {
            return Err(Error::InvalidModulus("not nondecreasing".into()));
        }
        if let Some((x, y)) = f.subadditivity_witness() {
            return Err(Error::NotSubadditive { x: Box::new(x), y: Box::new(y) });
        }
        Ok(Modulus(f))
    }

    pub fn identity() -> Self {
        Modulus(PiecewiseLinear::identity())
    }

    pub fn linear(slope: Rational) -> Result<Self> {
        Self::from_pl(PiecewiseLinear::linear(slope))
    }

    /// `t ↦ t ∧ c`.
    pub fn truncated_identity(c: Rational) -> Result<Self> {
        Self::new(vec![(Rational::zero(), Rational::zero()), (c.clone(), c)], Rational::zero())
    }

    pub fn pl(&self) -> &PiecewiseLinear {
        &self.0
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.0.eval(t)
    }

    pub fn tail_slope(&self) -> &Rational {
        self.0.tail_slope()
    }

    /// `ω⁻¹(0) = {0}`.
    pub fn is_positive(&self) -> bool {
        self.0.slopes()[0].is_positive()
    }

    pub fn limit(&self) -> Extended {
        self.0.limit()
    }
}

pub fn make_modulus(points: Vec<(Rational, Rational)>, tail_slope: Rational) -> Result<Modulus> {
    Modulus::new(points, tail_slope)
}

pub fn mod_max(a: &Modulus, b: &Modulus) -> Result<Modulus> {
    Modulus::from_pl(a.0.max(&b.0))
}

pub fn mod_min(a: &Modulus, b: &Modulus) -> Result<Modulus> {
    Modulus::from_pl(a.0.min(&b.0))
}

pub fn mod_sum(a: &Modulus, b: &Modulus) -> Result<Modulus> {
    Modulus::from_pl(a.0.sum(&b.0))
}

/// `a ∘ b`.
pub fn mod_compose(a: &Modulus, b: &Modulus) -> Result<Modulus> {
    Modulus::from_pl(a.0.compose(&b.0))
}

pub fn tail_slope(a: &Modulus) -> Rational {
    a.tail_slope().clone()
}

/// `(ω₀ ∨ τ₀, ϱ₀ + id, τ₀ ∧ ϱ(r))`, reading `ϱ(∞)` as the limit of `ϱ`.
pub fn build_ort_triple(
    omega0: &Modulus,
    rho0: &Modulus,
    tau0: &Modulus,
    r: crate::values::Cap,
) -> Result<(Modulus, Modulus, Modulus)> {
    let omega = mod_max(omega0, tau0)?;
    let rho = mod_sum(rho0, &Modulus::identity())?;
    let level = match r {
        crate::values::Cap::One => Extended::Finite(rho.eval(&Rational::one())),
        crate::values::Cap::Infinite => rho.limit(),
    };
    let tau = match level {
        Extended::Finite(c) => Modulus::from_pl(tau0.0.min(&PiecewiseLinear::constant(c)))?,
        Extended::Infinite => tau0.clone(),
    };
    Ok((omega, rho, tau))
}

/// A point where the two-modulus condition fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrtViolation {
    /// `τ(t) + ϱ(s) > ϱ(ω(t) + s)`.
    Vertex { t: Rational, s: Rational },
    /// The inequality fails for large `t`: `ω'·ϱ' < τ'` at infinity.
    Ray,
    /// `τ(1) > ϱ(1)` with cap 1.
    AtOne,
}

/// Exact check of `τ(t) + ϱ(s) ≤ ϱ(ω(t) + s)` for all `t, s ≥ 0`, plus
/// `τ(1) ≤ ϱ(1)` when `r = 1`.
///
/// The defect is linear on the cells cut by the breakpoints of `ω` and `τ`
/// in `t`, of `ϱ` in `s`, and by the curves `ω(t) + s = c` for breakpoints
/// `c` of `ϱ`; vertices are enumerated directly and the only unbounded
/// direction with nonzero slope is `t → ∞`.
pub fn ort_violation(omega: &Modulus, rho: &Modulus, tau: &Modulus, r: crate::values::Cap) -> Option<OrtViolation> {
    let (w, p, ta) = (&omega.0, &rho.0, &tau.0);
    let rb: Vec<&Rational> = p.breakpoints().collect();
    let mut ts: BTreeSet<Rational> = w.breakpoints().chain(ta.breakpoints()).cloned().collect();
    for c in &rb {
        for b in &rb {
            if c >= b {
                let level = *c - *b;
                ts.extend(w.preimages(&level));
            }
        }
    }
    for t in &ts {
        let wt = w.eval(t);
        let mut ss: BTreeSet<Rational> = rb.iter().map(|&b| b.clone()).collect();
        for c in &rb {
            let s = *c - &wt;
            if !s.is_negative() {
                ss.insert(s);
            }
        }
        for s in ss {
            if ta.eval(t) + p.eval(&s) > p.eval(&(&wt + &s)) {
                return Some(OrtViolation::Vertex { t: t.clone(), s });
            }
        }
    }
    // t → ∞ with s fixed
    let ray =
        if w.tail_slope().is_positive() { w.tail_slope() * p.tail_slope() - ta.tail_slope() } else { -ta.tail_slope() };
    if ray.is_negative() {
        return Some(OrtViolation::Ray);
    }
    if r == crate::values::Cap::One && tau.eval(&Rational::one()) > rho.eval(&Rational::one()) {
        return Some(OrtViolation::AtOne);
    }
    None
}

pub fn check_ort(omega: &Modulus, rho: &Modulus, tau: &Modulus, r: crate::values::Cap) -> bool {
    ort_violation(omega, rho, tau, r).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::Cap;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn pts(v: &[(i64, i64, i64, i64)]) -> Vec<(Rational, Rational)> {
        v.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect()
    }

    #[test]
    fn truncated_identity_in_omega_zero() {
        let w = Modulus::truncated_identity(Rational::one()).unwrap();
        assert_eq!(tail_slope(&w), Rational::zero());
        assert_eq!(w.eval(&q(5, 1)), Rational::one());
        assert_eq!(w.eval(&q(1, 3)), q(1, 3));
        assert_eq!(tail_slope(&Modulus::identity()), Rational::one());
    }

    #[test]
    fn non_subadditive_rejected() {
        // convex on [0, 2]: slope 0 then 1
        let f = Modulus::new(pts(&[(0, 1, 0, 1), (1, 1, 0, 1)]), Rational::one());
        assert!(matches!(f, Err(Error::NotSubadditive { .. })));
        // slope up after a flat: also fails
        let g = Modulus::new(pts(&[(0, 1, 0, 1), (1, 1, 1, 1), (2, 1, 1, 1)]), Rational::one());
        assert!(matches!(g, Err(Error::NotSubadditive { .. })));
        // concave is fine
        let h = Modulus::new(pts(&[(0, 1, 0, 1), (1, 1, 2, 1)]), q(1, 2));
        assert!(h.is_ok());
    }

    #[test]
    fn combinators() {
        let id = Modulus::identity();
        let half = Modulus::linear(q(1, 2)).unwrap();
        let t1 = Modulus::truncated_identity(Rational::one()).unwrap();
        let m = mod_max(&half, &t1).unwrap();
        assert_eq!(m.eval(&q(1, 2)), q(1, 2));
        assert_eq!(m.eval(&q(3, 1)), q(3, 2));
        assert_eq!(m.eval(&q(3, 2)), Rational::one());
        let n = mod_min(&id, &t1).unwrap();
        assert_eq!(n, t1);
        let s = mod_sum(&id, &t1).unwrap();
        assert_eq!(s.eval(&q(3, 1)), q(4, 1));
        let c = mod_compose(&t1, &Modulus::linear(q(2, 1)).unwrap()).unwrap();
        assert_eq!(c.eval(&q(1, 4)), q(1, 2));
        assert_eq!(c.eval(&q(1, 1)), Rational::one());
        assert_eq!(tail_slope(&c), Rational::zero());
    }

    #[test]
    fn ort_identity_triple() {
        let id = Modulus::identity();
        let (w, p, t) = build_ort_triple(&id, &id, &id, Cap::One).unwrap();
        assert_eq!(w, id);
        assert_eq!(p.eval(&q(3, 1)), q(6, 1));
        assert_eq!(t.eval(&q(1, 1)), q(1, 1));
        assert_eq!(t.eval(&q(5, 1)), q(2, 1));
        assert!(check_ort(&w, &p, &t, Cap::One));
        let (_, _, t_inf) = build_ort_triple(&id, &id, &id, Cap::Infinite).unwrap();
        assert_eq!(t_inf, id);
    }

    #[test]
    fn ort_failure_detected() {
        let id = Modulus::identity();
        let two = Modulus::linear(q(2, 1)).unwrap();
        // τ = 2t, ϱ = id, ω = id: 2t + s > t + s
        assert_eq!(ort_violation(&id, &id, &two, Cap::Infinite), Some(OrtViolation::Ray));
        let bent = Modulus::new(pts(&[(0, 1, 0, 1), (1, 1, 2, 1)]), Rational::one()).unwrap();
        assert!(matches!(ort_violation(&id, &id, &bent, Cap::Infinite), Some(OrtViolation::Vertex { .. })));
        let t1 = Modulus::truncated_identity(Rational::one()).unwrap();
        // ω bounded but τ unbounded: fails only at infinity or a vertex
        assert!(!check_ort(&t1, &id, &id, Cap::Infinite));
    }
}
