//! The free pseudovector group `L₀[H]` of step functions over a finite valued
//! group, with the integral norm `‖u‖_q = ∫ q(u(t)) dt`, and norming functions.
//!
//! Scalars are nonnegative rationals, so every norm identity is checked exactly.
//! A step function is stored as its right-open pieces `[t_{j-1}, t_j)` with
//! `t_0 = 0`; it vanishes from the last breakpoint on.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::modulus::PiecewiseLinear;
use crate::rational::Rational;
use crate::values::ValuedGroup;

#[derive(Clone, Debug)]
pub struct StepFunction {
    host: Arc<ValuedGroup>,
    pieces: Vec<(Rational, usize)>,
}

impl PartialEq for StepFunction {
    fn eq(&self, other: &Self) -> bool {
        same_host(&self.host, &other.host) && self.pieces == other.pieces
    }
}

impl Eq for StepFunction {}

fn same_host(a: &Arc<ValuedGroup>, b: &Arc<ValuedGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl StepFunction {
    /// Builds `Σ u_j χ_[t_{j-1}, t_j)` from `(t_j, u_j)` and brings it to normal form.
    pub fn new(host: Arc<ValuedGroup>, pieces: Vec<(Rational, usize)>) -> Result<Self> {
        let mut prev = Rational::zero();
        for (t, v) in &pieces {
            if *t <= prev {
                return Err(Error::Parse(format!("breakpoint {t} does not exceed {prev}")));
            }
            if *v >= host.order() {
                return Err(Error::MalformedElement(format!("index {v} outside host of order {}", host.order())));
            }
            prev = t.clone();
        }
        Ok(Self::normalized(host, pieces))
    }

    fn normalized(host: Arc<ValuedGroup>, pieces: Vec<(Rational, usize)>) -> Self {
        let mut out: Vec<(Rational, usize)> = Vec::with_capacity(pieces.len());
        for (t, v) in pieces {
            match out.last_mut() {
                Some(last) if last.1 == v => last.0 = t,
                _ => out.push((t, v)),
            }
        }
        while out.last().is_some_and(|p| p.1 == 0) {
            out.pop();
        }
        StepFunction { host, pieces: out }
    }

    pub fn zero(host: Arc<ValuedGroup>) -> Self {
        StepFunction { host, pieces: Vec::new() }
    }

    /// `ĥ = h · χ_[0,1)`.
    pub fn hat(host: Arc<ValuedGroup>, h: usize) -> Self {
        Self::normalized(host, vec![(Rational::one(), h)])
    }

    pub fn host(&self) -> &Arc<ValuedGroup> {
        &self.host
    }

    /// `(t_j, u_j)` in normal form.
    pub fn pieces(&self) -> &[(Rational, usize)] {
        &self.pieces
    }

    /// `(t_{j-1}, t_j, u_j)` for every piece.
    pub fn intervals(&self) -> impl Iterator<Item = (&Rational, &Rational, usize)> + '_ {
        static ZERO: std::sync::OnceLock<Rational> = std::sync::OnceLock::new();
        let zero = ZERO.get_or_init(Rational::zero);
        self.pieces.iter().enumerate().map(move |(j, (t, v))| {
            let left = if j == 0 { zero } else { &self.pieces[j - 1].0 };
            (left, t, *v)
        })
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn eval(&self, s: &Rational) -> usize {
        self.pieces.iter().find(|(t, _)| s < t).map_or(0, |p| p.1)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if !same_host(&self.host, &other.host) {
            return Err(Error::HostMismatch);
        }
        let mut cuts: Vec<&Rational> = self.pieces.iter().chain(&other.pieces).map(|p| &p.0).collect();
        cuts.sort();
        cuts.dedup();
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(cuts.len());
        for t in cuts {
            let a = self.pieces.get(i).map_or(0, |p| p.1);
            let b = other.pieces.get(j).map_or(0, |p| p.1);
            out.push((t.clone(), op(a, b)));
            if self.pieces.get(i).is_some_and(|p| &p.0 == t) {
                i += 1;
            }
            if other.pieces.get(j).is_some_and(|p| &p.0 == t) {
                j += 1;
            }
        }
        Ok(Self::normalized(self.host.clone(), out))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let g = self.host.group();
        self.zip_with(other, |a, b| g.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let g = self.host.group();
        self.zip_with(other, |a, b| g.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        let g = self.host.group();
        let pieces = self.pieces.iter().map(|(t, v)| (t.clone(), g.neg(*v))).collect();
        StepFunction { host: self.host.clone(), pieces }
    }

    /// `(t * u)(s) = u(s / t)`; `0 * u = 0`.
    pub fn act(&self, t: &Rational) -> Self {
        assert!(!t.is_negative(), "negative scalar {t}");
        if t.is_zero() {
            return Self::zero(self.host.clone());
        }
        let pieces = self.pieces.iter().map(|(s, v)| (s * t, *v)).collect();
        StepFunction { host: self.host.clone(), pieces }
    }

    /// `‖u‖_q = Σ (t_j − t_{j-1}) q(u_j)`.
    pub fn norm(&self) -> Rational {
        self.intervals().map(|(l, r, v)| (r - l) * self.host.value(v)).sum()
    }

    /// The unique `u = Σ t_j * ĥ_j` with `0 < t_1 < … < t_n` and nonzero `h_j`.
    pub fn decomposition(&self) -> Vec<(Rational, usize)> {
        let g = self.host.group();
        self.pieces
            .iter()
            .enumerate()
            .map(|(j, (t, v))| {
                let next = self.pieces.get(j + 1).map_or(0, |p| p.1);
                (t.clone(), g.sub(*v, next))
            })
            .collect()
    }

    pub fn from_decomposition(host: Arc<ValuedGroup>, terms: &[(Rational, usize)]) -> Result<Self> {
        let mut u = Self::zero(host.clone());
        for (t, h) in terms {
            u = u.add(&Self::hat(host.clone(), *h).act(t))?;
        }
        Ok(u)
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "0");
        }
        let g = self.host.group();
        let parts: Vec<String> = self.intervals().map(|(l, r, v)| format!("{}·χ[{l},{r})", g.coords(v))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A norming function `κ` with the single constant `L ≥ 1` that bounds both its
/// Lipschitz constant and `κ / ∇`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormingFunction {
    kappa: PiecewiseLinear,
    l: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormingKind {
    /// `κ(0) = 0`, so `id ≤ κ ≤ L·id`.
    Homogeneous,
    /// `κ(0) ≠ 0`, so `∇ ≤ κ ≤ (L + 1)·∇`.
    Subnorming,
}

impl NormingFunction {
    pub fn kappa(&self) -> &PiecewiseLinear {
        &self.kappa
    }

    pub fn l(&self) -> &Rational {
        &self.l
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.kappa.eval(t)
    }

    pub fn kind(&self) -> NormingKind {
        if self.kappa.eval(&Rational::zero()).is_zero() {
            NormingKind::Homogeneous
        } else {
            NormingKind::Subnorming
        }
    }

    pub fn identity() -> Self {
        norming_validate(&PiecewiseLinear::identity(), None).expect("id is norming")
    }

    /// `∇ = id ∨ 1`.
    pub fn nabla() -> Self {
        norming_validate(&nabla_pl(), None).expect("∇ is norming")
    }
}

pub fn nabla_pl() -> PiecewiseLinear {
    PiecewiseLinear::new(vec![(Rational::zero(), Rational::one()), (Rational::one(), Rational::one())], Rational::one())
        .expect("valid")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormingViolation {
    /// `κ(1) ≠ 1` or `κ(x) < x`.
    Nf1 { x: Rational },
    /// `κ(xy) > κ(x)κ(y)`.
    Nf2 { x: Rational, y: Rational },
    /// `κ(x) > κ(y)` with `x < y`.
    Nf3 { x: Rational, y: Rational },
    /// `|κ(x) − κ(y)| > L|x − y|` for the declared `L`.
    Nf4 { x: Rational, y: Rational, l: Rational },
    /// `κ(x) > L·∇(x)` for the declared `L`.
    Bound { x: Rational, l: Rational },
    /// The (P1)/(P2) sandwich fails at `x`.
    Class { x: Rational },
}

impl fmt::Display for NormingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormingViolation::Nf1 { x } => write!(f, "(NF1) fails at x = {x}"),
            NormingViolation::Nf2 { x, y } => write!(f, "(NF2) κ(xy) > κ(x)κ(y) at x = {x}, y = {y}"),
            NormingViolation::Nf3 { x, y } => write!(f, "(NF3) κ({x}) > κ({y})"),
            NormingViolation::Nf4 { x, y, l } => write!(f, "(NF4) slope on [{x}, {y}] exceeds L = {l}"),
            NormingViolation::Bound { x, l } => write!(f, "κ({x}) > {l}·∇({x})"),
            NormingViolation::Class { x } => write!(f, "(P1)/(P2) bound fails at x = {x}"),
        }
    }
}

/// Checks (NF1)–(NF4) exactly and returns `κ` with its constant `L`.
///
/// With `declared = None`, `L` is the least constant that works.
pub fn norming_validate(kappa: &PiecewiseLinear, declared: Option<&Rational>) -> Result<NormingFunction> {
    match norming_violation(kappa, declared) {
        Some(v) => Err(Error::Norming(v.to_string())),
        None => {
            let l = declared.cloned().unwrap_or_else(|| least_l(kappa));
            Ok(NormingFunction { kappa: kappa.clone(), l })
        }
    }
}

fn least_l(kappa: &PiecewiseLinear) -> Rational {
    let one = Rational::one();
    let mut l = one.clone();
    for s in kappa.slopes() {
        l = l.max(s);
    }
    for (x, y) in kappa.points() {
        if *x >= one {
            l = l.max(y / x);
        }
    }
    l
}

pub fn norming_violation(kappa: &PiecewiseLinear, declared: Option<&Rational>) -> Option<NormingViolation> {
    let zero = Rational::zero();
    let one = Rational::one();
    let pts = kappa.points();
    let tail = kappa.tail_slope();
    let last = &pts.last().unwrap().0;

    if kappa.eval(&one) != one {
        return Some(NormingViolation::Nf1 { x: one });
    }
    if let Some((x, _)) = pts.iter().find(|(x, y)| y < x) {
        return Some(NormingViolation::Nf1 { x: x.clone() });
    }
    if *tail < one {
        let b = last;
        let x = b + (kappa.eval(b) - b) / (&one - tail) + &one;
        return Some(NormingViolation::Nf1 { x });
    }
    for (w, s) in pts.windows(2).zip(kappa.slopes()) {
        if s.is_negative() {
            return Some(NormingViolation::Nf3 { x: w[0].0.clone(), y: w[1].0.clone() });
        }
    }

    if let Some(l) = declared {
        let slopes = kappa.slopes();
        for (i, s) in slopes.iter().enumerate() {
            if s > l {
                let x = pts[i].0.clone();
                let y = pts.get(i + 1).map_or_else(|| &x + &one, |p| p.0.clone());
                return Some(NormingViolation::Nf4 { x, y, l: l.clone() });
            }
        }
        let bound =
            PiecewiseLinear::new(vec![(zero.clone(), l.clone()), (one.clone(), l.clone())], l.clone()).expect("valid");
        if let Some(x) = le_witness(kappa, &bound) {
            return Some(NormingViolation::Bound { x, l: l.clone() });
        }
    }

    if let Some((x, y)) = submultiplicativity_witness(kappa) {
        return Some(NormingViolation::Nf2 { x, y });
    }

    let l1 = kappa.slopes().into_iter().max().unwrap();
    let (lower, upper) = if kappa.eval(&zero).is_zero() {
        (PiecewiseLinear::identity(), PiecewiseLinear::linear(l1))
    } else {
        let n = nabla_pl();
        let c = l1 + &one;
        let scaled =
            PiecewiseLinear::new(n.points().iter().map(|(x, y)| (x.clone(), y * &c)).collect(), n.tail_slope() * &c)
                .expect("valid");
        (n, scaled)
    };
    if let Some(x) = le_witness(&lower, kappa).or_else(|| le_witness(kappa, &upper)) {
        return Some(NormingViolation::Class { x });
    }
    None
}

/// Some `x` with `f(x) > g(x)`, if any.
fn le_witness(f: &PiecewiseLinear, g: &PiecewiseLinear) -> Option<Rational> {
    let mut cuts: Vec<&Rational> = f.breakpoints().chain(g.breakpoints()).collect();
    cuts.sort();
    cuts.dedup();
    if let Some(x) = cuts.iter().find(|x| f.eval(x) > g.eval(x)) {
        return Some((*x).clone());
    }
    if f.tail_slope() > g.tail_slope() {
        let b = *cuts.last().unwrap();
        let gap = g.eval(b) - f.eval(b);
        return Some(b + gap / (f.tail_slope() - g.tail_slope()) + Rational::one());
    }
    None
}

/// `(p, q)` with `κ(t) = p + q·t` on the piece containing `t` (right piece at breakpoints).
fn affine_at(kappa: &PiecewiseLinear, t: &Rational) -> (Rational, Rational) {
    let q = kappa.right_slope(t);
    (kappa.eval(t) - &q * t, q)
}

fn gap(kappa: &PiecewiseLinear, x: &Rational, y: &Rational) -> Rational {
    kappa.eval(&(x * y)) - kappa.eval(x) * kappa.eval(y)
}

/// Exact search for `κ(xy) > κ(x)κ(y)`, assuming (NF1) and (NF3) hold.
///
/// For fixed `x`, `y ↦ κ(xy) − κ(x)κ(y)` is piecewise linear with breakpoints
/// among the breakpoints `b` of `κ` and the points `c/x`, and does not increase
/// past the last one. Hence only `y = b` and `y = c/x` need checking, each of
/// which is again a finite one-variable problem.
fn submultiplicativity_witness(kappa: &PiecewiseLinear) -> Option<(Rational, Rational)> {
    let one = Rational::one();
    let bps: Vec<Rational> = kappa.breakpoints().cloned().collect();
    let tail = kappa.tail_slope();

    for b in &bps {
        let mut xs = bps.clone();
        if b.is_positive() {
            xs.extend(bps.iter().map(|c| c / b));
        }
        xs.sort();
        xs.dedup();
        if let Some(x) = xs.iter().find(|x| gap(kappa, x, b).is_positive()) {
            return Some((x.clone(), b.clone()));
        }
        let slope = tail * b - kappa.eval(b) * tail;
        if slope.is_positive() {
            let far = xs.last().unwrap();
            let g = gap(kappa, far, b);
            return Some((far - g / &slope + &one, b.clone()));
        }
    }

    for c in bps.iter().filter(|c| c.is_positive()) {
        let kc = kappa.eval(c);
        let mut xs: Vec<Rational> = bps.iter().filter(|a| a.is_positive()).flat_map(|a| [a.clone(), c / a]).collect();
        xs.sort();
        xs.dedup();
        if let Some(x) = xs.iter().find(|x| gap(kappa, x, &(c / *x)).is_positive()) {
            return Some((x.clone(), c / x));
        }
        let mut bounds: Vec<(Option<&Rational>, Option<&Rational>)> = Vec::new();
        bounds.push((None, xs.first()));
        bounds.extend(xs.windows(2).map(|w| (Some(&w[0]), Some(&w[1]))));
        bounds.push((xs.last(), None));
        for (lo, hi) in bounds {
            let m = match (lo, hi) {
                (Some(l), Some(h)) => (l + h) / Rational::from_integer(2),
                (None, Some(h)) => h / Rational::from_integer(2),
                (Some(l), None) => l + &one,
                (None, None) => one.clone(),
            };
            // κ(x)κ(c/x) = pr + qsc + qr·x + psc/x on this cell.
            let (p, q) = affine_at(kappa, &m);
            let (r, s) = affine_at(kappa, &(c / &m));
            let a = &q * &r;
            let b = &p * &s * c;
            let base = &p * &r + &q * &s * c;
            if a.is_positive() && b.is_positive() {
                let xstar2 = &b / &a;
                let inside = lo.is_none_or(|l| l * l < xstar2) && hi.is_none_or(|h| xstar2 < h * h);
                let d = &kc - &base;
                if inside && d.is_positive() && d.square() > Rational::from_integer(4) * &a * &b {
                    return Some(approximate_witness(kappa, c, &xstar2));
                }
            }
            // limits at an open end where the product stays bounded
            let limit_violated = match (lo, hi) {
                (None, _) if b.is_zero() => kc > base,
                (_, None) if a.is_zero() => kc > base,
                _ => false,
            };
            if limit_violated {
                let mut x = m.clone();
                for _ in 0..200 {
                    if gap(kappa, &x, &(c / &x)).is_positive() {
                        return Some((x.clone(), c / &x));
                    }
                    x = if lo.is_none() { x / Rational::from_integer(2) } else { x * Rational::from_integer(2) };
                }
            }
        }
    }
    None
}

/// A rational point near `x* = √xstar2` on the hyperbola `xy = c` where the gap is positive.
fn approximate_witness(kappa: &PiecewiseLinear, c: &Rational, xstar2: &Rational) -> (Rational, Rational) {
    let approx = xstar2.to_f64().sqrt();
    for digits in [1e3, 1e6, 1e9, 1e12] {
        if let Some(br) = BigRational::from_float((approx * digits).round() / digits) {
            let x = Rational::from(br);
            if x.is_positive() && gap(kappa, &x, &(c / &x)).is_positive() {
                return (x.clone(), c / &x);
            }
        }
    }
    let x = Rational::from(BigRational::from_float(approx).expect("finite"));
    (x.clone(), c / &x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaViolation {
    pub sample: usize,
    pub t: Rational,
    pub lhs: Rational,
    pub bound: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct KappaReport {
    pub checked: usize,
    pub violations: Vec<KappaViolation>,
    /// Whether `‖t*u‖ = t‖u‖` held on every pair.
    pub homogeneous: bool,
}

impl KappaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `‖t*u‖ ≤ κ(t)‖u‖` over all samples and scalars for the given norm.
pub fn check_kappa_norm(
    samples: &[StepFunction],
    ts: &[Rational],
    kappa: &NormingFunction,
    norm: impl Fn(&StepFunction) -> Rational,
) -> KappaReport {
    let mut report = KappaReport { homogeneous: true, ..Default::default() };
    for (i, u) in samples.iter().enumerate() {
        let nu = norm(u);
        for t in ts {
            let lhs = norm(&u.act(t));
            let bound = kappa.eval(t) * &nu;
            report.checked += 1;
            if lhs != t * &nu {
                report.homogeneous = false;
            }
            if lhs > bound {
                report.violations.push(KappaViolation { sample: i, t: t.clone(), lhs, bound });
            }
        }
    }
    report
}

/// `max_α p(α * u) / (α ∨ 1)` over a finite grid of `α`: a lower estimate of the subnorm built from `p`.
pub fn metriz_lower_estimate(u: &StepFunction, alphas: &[Rational], p: impl Fn(&StepFunction) -> Rational) -> Rational {
    let one = Rational::one();
    alphas.iter().map(|a| p(&u.act(a)) / a.clone().max(one.clone())).max().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;
    use crate::values::Cap;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn z2() -> Arc<ValuedGroup> {
        Arc::new(ValuedGroup::new(&FiniteAbelianGroup::cyclic(2), vec![r(0, 1), r(1, 1)], Cap::Infinite, 2).unwrap())
    }

    fn pl(points: &[(i64, i64, i64, i64)], tail: Rational) -> PiecewiseLinear {
        PiecewiseLinear::new(points.iter().map(|&(a, b, c, d)| (r(a, b), r(c, d))).collect(), tail).unwrap()
    }

    #[test]
    fn homogeneity_on_hat() {
        let g = StepFunction::hat(z2(), 1);
        assert_eq!(g.act(&r(2, 1)).norm(), r(2, 1));
        assert_eq!(g.norm(), r(1, 1));
        assert!(g.act(&r(0, 1)).is_zero());
    }

    #[test]
    fn cancellation() {
        let h = z2();
        let g = StepFunction::hat(h.clone(), 1);
        let s = g.add(&g.act(&r(3, 2))).unwrap();
        assert_eq!(s.pieces(), &[(r(1, 1), 0), (r(3, 2), 1)]);
        assert_eq!(s.norm(), r(1, 2));
        assert_eq!(s.eval(&r(1, 2)), 0);
        assert_eq!(s.eval(&r(5, 4)), 1);
        assert_eq!(s.eval(&r(3, 2)), 0);
    }

    #[test]
    fn decomposition_roundtrip() {
        let h = Arc::new(
            ValuedGroup::new(
                &FiniteAbelianGroup::cyclic(4),
                vec![r(0, 1), r(1, 1), r(3, 2), r(1, 1)],
                Cap::Infinite,
                4,
            )
            .unwrap(),
        );
        let u = StepFunction::new(h.clone(), vec![(r(1, 2), 1), (r(2, 1), 3), (r(3, 1), 2)]).unwrap();
        let d = u.decomposition();
        assert!(d.iter().all(|(_, x)| *x != 0));
        assert_eq!(StepFunction::from_decomposition(h, &d).unwrap(), u);
        assert_eq!(u.norm(), r(1, 2) + r(3, 2) + r(3, 2));
    }

    #[test]
    fn host_mismatch() {
        let other = Arc::new(
            ValuedGroup::new(&FiniteAbelianGroup::cyclic(2), vec![r(0, 1), r(2, 1)], Cap::Infinite, 2).unwrap(),
        );
        let a = StepFunction::hat(z2(), 1);
        let b = StepFunction::hat(other, 1);
        assert!(matches!(a.add(&b), Err(Error::HostMismatch)));
    }

    #[test]
    fn nabla_and_identity() {
        let n = NormingFunction::nabla();
        assert_eq!(n.kind(), NormingKind::Subnorming);
        assert_eq!(*n.l(), r(1, 1));
        let id = NormingFunction::identity();
        assert_eq!(id.kind(), NormingKind::Homogeneous);
    }

    #[test]
    fn square_rejected_by_lipschitz_bound() {
        let sq = pl(&[(0, 1, 0, 1), (1, 1, 1, 1), (2, 1, 4, 1), (3, 1, 9, 1), (4, 1, 16, 1)], r(7, 1));
        assert!(norming_validate(&sq, None).is_ok());
        match norming_violation(&sq, Some(&r(4, 1))) {
            Some(NormingViolation::Nf4 { x, .. }) => assert_eq!(x, r(2, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn axiom_failures() {
        assert!(matches!(
            norming_violation(&PiecewiseLinear::linear(r(2, 1)), None),
            Some(NormingViolation::Nf1 { .. })
        ));
        let below = pl(&[(0, 1, 0, 1), (1, 1, 1, 1)], r(1, 2));
        assert!(matches!(norming_violation(&below, None), Some(NormingViolation::Nf1 { .. })));
        // κ = 1 on [0,1], then slope 1 up to 2, then flat slope 1 from (3,2): κ(3) = 2 < 3
        let dip = pl(&[(0, 1, 2, 1), (1, 1, 1, 1)], r(1, 1));
        assert!(norming_violation(&dip, None).is_some());
    }

    #[test]
    fn interior_hyperbola_critical_point() {
        // on xy = 9 the product κ(x)κ(9/x) dips to 81/4 at x = 3, below κ(9) = 41/2,
        // while every breakpoint pair passes
        let k = pl(&[(0, 1, 1, 1), (1, 1, 1, 1), (2, 1, 4, 1), (4, 1, 5, 1), (9, 1, 41, 2), (16, 1, 25, 1)], r(1, 1));
        let bps: Vec<Rational> = k.breakpoints().cloned().collect();
        for a in &bps {
            for b in &bps {
                assert!(!gap(&k, a, b).is_positive());
            }
        }
        match norming_violation(&k, None) {
            Some(NormingViolation::Nf2 { x, y }) => {
                assert!(gap(&k, &x, &y).is_positive());
                assert!((x.to_f64() - 3.0).abs() < 0.2, "{x}");
            }
            other => panic!("{other:?}"),
        }
        let ok = pl(&[(0, 1, 0, 1), (1, 1, 1, 1)], r(3, 1));
        assert!(submultiplicativity_witness(&ok).is_none());
    }

    #[test]
    fn kappa_report() {
        let h = z2();
        let u = StepFunction::new(h.clone(), vec![(r(1, 2), 1), (r(3, 2), 0), (r(2, 1), 1)]).unwrap();
        let ts = [r(1, 2), r(1, 1), r(2, 1), r(10, 1)];
        let rep = check_kappa_norm(std::slice::from_ref(&u), &ts, &NormingFunction::nabla(), StepFunction::norm);
        assert!(rep.passed() && rep.homogeneous);
        let rep = check_kappa_norm(&[u], &ts, &NormingFunction::identity(), StepFunction::norm);
        assert!(rep.passed());
    }

    #[test]
    fn metriz_estimate() {
        let u = StepFunction::hat(z2(), 1);
        let capped = |v: &StepFunction| v.norm().min(Rational::one());
        let alphas = [r(1, 2), r(1, 1), r(4, 1)];
        assert_eq!(metriz_lower_estimate(&u, &alphas, capped), r(1, 1));
    }
}
