//! Exact tuple counts behind the power bounds, and the bounds themselves.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::SliceRankError;
use crate::rates::rate_j;

/// Number of `n`-tuples drawn (with repetition) from the multiset `weights`
/// whose sum is at most `n · threshold`. Exact; zero for an empty multiset.
pub fn weighted_tuple_count(weights: &[i64], n: u32, threshold: &BigRational) -> BigUint {
    let Some(&min) = weights.iter().min() else {
        return BigUint::zero();
    };
    let max = *weights.iter().max().expect("nonempty");
    let span = (max - min) as usize;
    let mut mult = vec![BigUint::zero(); span + 1];
    for &w in weights {
        mult[(w - min) as usize] += 1u32;
    }
    let mut counts = vec![BigUint::from(1u32)];
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); counts.len() + span];
        for (s, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (d, m) in mult.iter().enumerate() {
                if !m.is_zero() {
                    next[s + d] += c * m;
                }
            }
        }
        counts = next;
    }
    // shifted sum s is admissible iff (s + n·min)·den ≤ n·num
    let n_big = BigInt::from(n);
    let rhs = &n_big * threshold.numer();
    let den = threshold.denom();
    counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (BigInt::from(*s as u64) + &n_big * min) * den <= rhs)
        .fold(BigUint::zero(), |acc, (_, c)| acc + c)
}

/// Exact finite-`n` slice-rank bound for the `n`-th power of a tensor with
/// triangle rank `k`, alongside the asymptotic form `3(k·J(k))^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleSliceBound {
    pub k: u64,
    pub n: u32,
    /// `#{a ∈ {0,…,k−1}^n : 3·Σa_i ≤ (k−1)n}`
    #[serde(with = "crate::serde_biguint")]
    pub count: BigUint,
    /// `3 · count`
    #[serde(with = "crate::serde_biguint")]
    pub bound: BigUint,
    pub asymptotic: f64,
}

pub fn triangle_to_slice_power_bound(k: u64, n: u32) -> Result<TriangleSliceBound, SliceRankError> {
    if k < 2 || n < 1 {
        return Err(SliceRankError::InvalidInput(format!("need k >= 2 and n >= 1, got k={k}, n={n}")));
    }
    let weights: Vec<i64> = (0..k as i64).collect();
    let threshold = BigRational::new(BigInt::from(k - 1), BigInt::from(3));
    let count = weighted_tuple_count(&weights, n, &threshold);
    let bound = &count * 3u32;
    let j = rate_j(k as f64).map_err(|e| SliceRankError::InvalidInput(e.to_string()))?.value;
    let asymptotic = 3.0 * (k as f64 * j).powi(n as i32);
    Ok(TriangleSliceBound { k, n, count, bound, asymptotic })
}

/// `(|X|^n + |Y|^n + |Z|^n) · e^{−2nε²}`.
pub fn power_slice_bound(dims: [usize; 3], epsilon: f64, n: u32) -> f64 {
    let s: f64 = dims.iter().map(|&d| (d as f64).powi(n as i32)).sum();
    s * (-2.0 * n as f64 * epsilon * epsilon).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn tuple_counts() {
        assert_eq!(weighted_tuple_count(&[0, 1], 6, &q("1/3")), BigUint::from(22u32));
        assert_eq!(weighted_tuple_count(&[0], 9, &q("0")), BigUint::from(1u32));
        assert_eq!(weighted_tuple_count(&[0, 1, 2], 6, &q("2/3")), BigUint::from(168u32));
        assert_eq!(weighted_tuple_count(&[], 3, &q("1")), BigUint::zero());
        // multiset: two copies of 0
        assert_eq!(weighted_tuple_count(&[0, 0, 5], 2, &q("0")), BigUint::from(4u32));
        // negative weights
        assert_eq!(weighted_tuple_count(&[-1, 1], 2, &q("0")), BigUint::from(3u32));
    }

    #[test]
    fn triangle_bounds() {
        let b = triangle_to_slice_power_bound(3, 6).unwrap();
        assert_eq!(b.count, BigUint::from(168u32));
        assert_eq!(b.bound, BigUint::from(504u32));
        assert!(b.bound < BigUint::from(2187u32));
        assert_eq!(triangle_to_slice_power_bound(2, 1).unwrap().bound, BigUint::from(3u32));
        assert_eq!(triangle_to_slice_power_bound(3, 1).unwrap().bound, BigUint::from(3u32));
        assert!(triangle_to_slice_power_bound(1, 3).is_err());
    }

    #[test]
    fn power_bounds() {
        assert_eq!(power_slice_bound([2, 2, 2], 0.0, 5), 96.0);
        assert!((power_slice_bound([3, 3, 3], 1.0 / 6.0, 1) - 8.513_635_220_160_89).abs() < 1e-12);
        assert!((power_slice_bound([2, 3, 4], 1.0 / 6.0, 2) - 25.950_340_187_616_723).abs() < 1e-12);
    }
}
