//! Large-deviation rates for sums of bounded uniform integers.
//!
//! `I(m, α)` is the Chernoff exponent for the event that `n` independent
//! uniform draws from `{0, …, m}` have sum at most `α·m·n`:
//!
//! ```text
//! I(m, α) = sup_{θ<0} ( αθ − log( (1 − e^{(1+1/m)θ}) / ((m+1)(1 − e^{θ/m})) ) )
//! ```
//!
//! and `J(s) = e^{−I(s−1, 1/3)}`. Optimization runs on `t = θ/m = log x`,
//! which keeps every exponential in `(0, 1]`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::slicerank::counting::weighted_tuple_count;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RateError {
    #[error("alpha must lie strictly inside (0, 1/2), got {0}")]
    AlphaOutOfRange(f64),
    #[error("m must be positive, got {0}")]
    MOutOfRange(f64),
    #[error("s must exceed 1, got {0}")]
    SOutOfRange(f64),
    #[error("the two evaluations of J({s}) disagree by {diff:e}")]
    CrossCheck { s: f64, diff: f64 },
    #[error("counting guard exceeded: n*m = {work} > {limit}")]
    Guard { work: u128, limit: u128 },
}

pub const TOLERANCE: f64 = 1e-12;
const MAX_ITER: usize = 200;
const SERIES_CUTOFF: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateQuery {
    pub m: u64,
    pub alpha: f64,
}

impl RateQuery {
    pub fn new(m: u64, alpha: f64) -> Result<Self, RateError> {
        if m == 0 {
            return Err(RateError::MOutOfRange(0.0));
        }
        check_alpha(alpha)?;
        Ok(RateQuery { m, alpha })
    }
}

fn check_alpha(alpha: f64) -> Result<(), RateError> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(RateError::AlphaOutOfRange(alpha))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub value: f64,
    /// Optimizer location: `θ` for rate functions, `x` or `z` for the `J` forms.
    pub argmax_theta: f64,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub epsilon: f64,
    pub delta: f64,
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..MAX_ITER {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Finds `L` with the maximizer of a concave `f` on `(−∞, 0)` inside `[−L, 0]`.
fn bracket_left(f: &impl Fn(f64) -> f64) -> f64 {
    let mut l = 1.0;
    while l < 1e6 && f(-l) >= f(-l / 2.0) {
        l *= 2.0;
    }
    l
}

/// `log E[x^a]` for `a` uniform on `{0, …, m}`, `x = e^t`, `t < 0`.
/// For real `m` this is `log((1 − x^{m+1}) / ((m+1)(1 − x)))`.
fn log_mgf(m: f64, t: f64) -> f64 {
    if t.abs() < SERIES_CUTOFF {
        return m * t / 2.0;
    }
    (-((m + 1.0) * t).exp_m1()).ln() - (-t.exp_m1()).ln() - (m + 1.0).ln()
}

fn rate_objective(m: f64, alpha: f64, t: f64) -> f64 {
    alpha * m * t - log_mgf(m, t)
}

/// `I(m, α)` for integer `m ≥ 1`.
pub fn rate_i(q: RateQuery) -> Result<RateResult, RateError> {
    rate_i_real(q.m as f64, q.alpha)
}

/// `I(m, α)` with real `m > 0`; needed for `J(s)` at non-integer `s`.
pub fn rate_i_real(m: f64, alpha: f64) -> Result<RateResult, RateError> {
    if m.is_nan() || m <= 0.0 {
        return Err(RateError::MOutOfRange(m));
    }
    check_alpha(alpha)?;
    let f = |t: f64| rate_objective(m, alpha, t);
    let l = bracket_left(&f);
    let (t, value) = golden_max(f, -l, 0.0, TOLERANCE);
    Ok(RateResult { value, argmax_theta: m * t, tolerance: TOLERANCE })
}

/// `J(s) = e^{−I(s−1, 1/3)}`, cross-checked against the direct form
/// `(1/s)·inf_{0<x<1} ((1 − x^s)/(1 − x))·x^{−(s−1)/3}`.
pub fn rate_j(s: f64) -> Result<RateResult, RateError> {
    if s.is_nan() || s <= 1.0 {
        return Err(RateError::SOutOfRange(s));
    }
    let via_rate = (-rate_i_real(s - 1.0, 1.0 / 3.0)?.value).exp();
    let (x, direct) = rate_j_direct(s);
    let diff = (via_rate - direct).abs();
    if diff > 1e-9 {
        return Err(RateError::CrossCheck { s, diff });
    }
    Ok(RateResult { value: via_rate, argmax_theta: x, tolerance: 1e-9 })
}

/// Direct form of `J(s)`, minimized by bisection on the derivative in
/// `t = log x`. Returns `(x*, J(s))`.
pub fn rate_j_direct(s: f64) -> (f64, f64) {
    let g = |t: f64| (-(s * t).exp_m1()).ln() - (-t.exp_m1()).ln() - (s - 1.0) * t / 3.0 - s.ln();
    // g'(t) = −s/expm1(−st) + 1/expm1(−t) − (s−1)/3, negative far left, positive near 0
    let dg = |t: f64| -s / (-s * t).exp_m1() + 1.0 / (-t).exp_m1() - (s - 1.0) / 3.0;
    let mut lo = -1.0;
    while dg(lo) > 0.0 {
        lo *= 2.0;
    }
    let mut hi = -1e-6;
    while dg(hi) < 0.0 && hi > -1e-300 {
        hi /= 2.0;
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if dg(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    (t.exp(), g(t).exp())
}

/// `lim_{s→∞} J(s) = inf_{z>1} (z − z^{−2})/(3 log z)`. The optimizer is
/// reported in `argmax_theta`.
pub fn rate_j_limit() -> RateResult {
    let h = |z: f64| (z - z.powi(-2)) / (3.0 * z.ln());
    let a = 1.0 + 1e-6;
    let mut b = 2.0;
    while h(2.0 * b) < h(b) {
        b *= 2.0;
    }
    b *= 2.0;
    let (z, neg) = golden_max(|z| -h(z), a, b, TOLERANCE);
    RateResult { value: -neg, argmax_theta: z, tolerance: TOLERANCE }
}

/// `lim_{m→∞} I(m, α) = sup_{θ<0} (αθ − log((e^θ − 1)/θ))`.
pub fn rate_i_limit(alpha: f64) -> Result<RateResult, RateError> {
    check_alpha(alpha)?;
    let f = |th: f64| {
        let lg = if th.abs() < SERIES_CUTOFF { th / 2.0 } else { (th.exp_m1() / th).ln() };
        alpha * th - lg
    };
    let l = bracket_left(&f);
    let (th, value) = golden_max(f, -l, 0.0, TOLERANCE);
    Ok(RateResult { value, argmax_theta: th, tolerance: TOLERANCE })
}

/// `δ = I(1, 1/3)` and `ε = δ/2`.
pub fn constants() -> Constants {
    let delta = rate_i_real(1.0, 1.0 / 3.0).expect("fixed valid query").value;
    Constants { epsilon: delta / 2.0, delta }
}

/// `log(2/3) + (2/3)·log 2`, the closed form of `δ`.
pub fn delta_closed_form() -> f64 {
    (2.0f64 / 3.0).ln() + (2.0 / 3.0) * 2.0f64.ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleFraction {
    #[serde(with = "crate::serde_biguint")]
    pub count: BigUint,
    #[serde(with = "crate::serde_biguint")]
    pub total: BigUint,
    #[serde(with = "crate::serde_rational")]
    pub fraction: BigRational,
}

pub const DEFAULT_COUNT_GUARD: u128 = 1_000_000;

/// Exact number of `a ∈ {0, …, m}^n` with `Σ a_i ≤ α·m·n`.
pub fn tuple_fraction_exact(m: u64, alpha: &BigRational, n: u32, guard: u128) -> Result<TupleFraction, RateError> {
    let work = m as u128 * n as u128;
    if work > guard {
        return Err(RateError::Guard { work, limit: guard });
    }
    if alpha.is_negative() {
        let total = BigUint::from(m + 1).pow(n);
        return Ok(TupleFraction { count: BigUint::zero(), total, fraction: BigRational::zero() });
    }
    let weights: Vec<i64> = (0..=m as i64).collect();
    let threshold = alpha * BigRational::from_integer((m as i64).into());
    let count = weighted_tuple_count(&weights, n, &threshold);
    let total = BigUint::from(m + 1).pow(n);
    let fraction = BigRational::new(count.clone().into(), total.clone().into());
    Ok(TupleFraction { count, total, fraction })
}

/// Chernoff-type bound `e^{−2n(1/2 − α)²}` on the same fraction.
pub fn hoeffding_bound(alpha: f64, n: u32) -> f64 {
    (-2.0 * n as f64 * (0.5 - alpha).powi(2)).exp()
}

/// Parses `a/b` or a decimal integer into a rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse().ok()?, d.trim().parse().ok()?),
        None => (text.parse().ok()?, num_bigint::BigInt::one()),
    };
    if den == num_bigint::BigInt::zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DELTA: f64 = 0.056_633_012_265_132_49;

    fn ri(m: u64, a: f64) -> f64 {
        rate_i(RateQuery::new(m, a).unwrap()).unwrap().value
    }

    #[test]
    fn delta_matches_closed_form() {
        let c = constants();
        assert!((c.delta - delta_closed_form()).abs() < 1e-12);
        assert!((c.delta - DELTA).abs() < 1e-12);
        assert_eq!(c.delta, 2.0 * c.epsilon);
    }

    #[test]
    fn small_m_values() {
        assert!((ri(2, 1.0 / 3.0) - 0.085_156_874_724_757_4).abs() < 1e-10);
        assert!((ri(3, 1.0 / 3.0) - 0.102_387_546_735_963_7).abs() < 1e-10);
        assert!(ri(2, 1.0 / 3.0) > ri(1, 1.0 / 3.0));
    }

    #[test]
    fn large_m_approaches_limit() {
        let lim = rate_i_limit(1.0 / 3.0).unwrap().value;
        assert!((lim - 0.172_647_257_289_419).abs() < 1e-9);
        assert!((ri(10_000, 1.0 / 3.0) - lim).abs() < 1e-3);
    }

    #[test]
    fn j_values() {
        assert!((rate_j(2.0).unwrap().value - (-DELTA).exp()).abs() < 1e-12);
        assert!((rate_j(3.0).unwrap().value - 0.918_368_204_341_211).abs() < 1e-10);
        assert!((rate_j(4.0).unwrap().value - 0.902_679_653_319_010).abs() < 1e-10);
        let x = rate_j(3.0).unwrap().argmax_theta;
        assert!((x - (33f64.sqrt() - 1.0) / 8.0).abs() < 1e-7);
    }

    #[test]
    fn j_limit() {
        let l = rate_j_limit();
        assert!((l.value - 0.841_434_372_343_300).abs() < 1e-10);
        assert!((l.argmax_theta - 2.046_999_918).abs() < 1e-5);
        let e = std::f64::consts::E;
        assert!((e - e.powi(-2)) / 3.0 >= l.value);
        assert!((rate_j(1e4).unwrap().value - l.value).abs() < 2e-3);
    }

    #[test]
    fn domain_errors() {
        assert!(RateQuery::new(1, 0.5).is_err());
        assert!(RateQuery::new(1, 0.0).is_err());
        assert!(RateQuery::new(0, 0.2).is_err());
        assert!(rate_j(1.0).is_err());
    }

    #[test]
    fn tuple_fractions() {
        let third = parse_rational("1/3").unwrap();
        let r = tuple_fraction_exact(1, &third, 6, DEFAULT_COUNT_GUARD).unwrap();
        assert_eq!(r.count, BigUint::from(22u32));
        assert_eq!(r.fraction, parse_rational("11/32").unwrap());
        assert!(0.34375 <= (-6.0 * DELTA).exp());
        let r = tuple_fraction_exact(2, &third, 6, DEFAULT_COUNT_GUARD).unwrap();
        assert_eq!(r.count, BigUint::from(168u32));
        let r = tuple_fraction_exact(1, &third, 1, DEFAULT_COUNT_GUARD).unwrap();
        assert_eq!(r.count, BigUint::from(1u32));
        assert_eq!(r.fraction, parse_rational("1/2").unwrap());
        assert!(tuple_fraction_exact(10, &third, 10, 50).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational(" 2/6 "), parse_rational("1/3"));
        assert_eq!(parse_rational("4"), Some(BigRational::from_integer(4.into())));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }
}
