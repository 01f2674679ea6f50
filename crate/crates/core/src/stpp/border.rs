//! From STPP constructions to border sum-free sets, and from border sets to
//! genuine tricolored sum-free sets in a power of the group.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::{verify_stpp, STPPConstruction, StppError};
use crate::fftensor::Matching3;
use crate::groups::GroupElement;
use crate::sumfree::{BorderSumFreeSet, TricoloredSumFreeSet};

pub const DEFAULT_UNBORDER_GUARD: u128 = 1_000_000;

/// Most frequent value of `x + y + z` over `[n] × [m] × [p]` (1-based),
/// smallest on ties.
fn most_frequent_sum(n: i64, m: i64, p: i64) -> i64 {
    let mut counts = vec![0u64; (n + m + p + 1) as usize];
    for x in 1..=n {
        for y in 1..=m {
            for z in 1..=p {
                counts[(x + y + z) as usize] += 1;
            }
        }
    }
    let best = *counts.iter().max().expect("nonempty");
    counts.iter().position(|&c| c == best).expect("max exists") as i64
}

/// Border sum-free set with matched part `M = ∪ M_i`, where
/// `M_i = {(a−b, b−c, c−a) : α_i(a) + β_i(b) + γ_i(c) = r_i}`. Each list is
/// identified with `1..=len` in its given order.
pub fn border_from_stpp(c: &STPPConstruction) -> Result<BorderSumFreeSet, StppError> {
    if !verify_stpp(c)?.valid {
        return Err(StppError::Unverified);
    }
    let g = &c.group;
    let diff = |x: &GroupElement, y: &GroupElement| g.add_unchecked(x, &g.neg(y));
    let mut triples = Vec::new();
    let (mut alpha, mut beta, mut gamma) = (Vec::new(), Vec::new(), Vec::new());
    for t in &c.triples {
        let (n, m, p) = (t.a.len() as i64, t.b.len() as i64, t.c.len() as i64);
        let r = most_frequent_sum(n, m, p);
        for (x, a) in (1..).zip(&t.a) {
            for (y, b) in (1..).zip(&t.b) {
                let z = r - x - y;
                if !(1..=p).contains(&z) {
                    continue;
                }
                let cc = &t.c[(z - 1) as usize];
                triples.push((diff(a, b), diff(b, cc), diff(cc, a)));
                alpha.push(x * x + 2 * x * y - 2 * x * r + r * r);
                beta.push(y * y + 2 * y * z - 2 * y * r);
                gamma.push(z * z + 2 * z * x - 2 * z * r);
            }
        }
    }
    Ok(BorderSumFreeSet { group: g.clone(), matching: Matching3::new(triples), alpha, beta, gamma })
}

/// `Σ_i |A_i||B_i||C_i| / (|A_i| + |B_i| + |C_i|)`.
pub fn thm_main_lower_bound(c: &STPPConstruction) -> BigRational {
    c.sizes().iter().fold(BigRational::zero(), |acc, s| {
        let num = BigUint::from(s[0]) * s[1] * s[2];
        let den = BigUint::from(s[0] + s[1] + s[2]);
        acc + BigRational::new(num.into(), den.into())
    })
}

/// `⌈|M|^N / (2Nt + 1)^3⌉` with `t` the range of `b`.
pub fn unborder_lower_bound(b: &BorderSumFreeSet, n: u32) -> BigUint {
    let num = BigUint::from(b.len()).pow(n);
    let den = BigUint::from(2 * n as u64 * b.range().unsigned_abs() + 1).pow(3);
    num.div_ceil(&den)
}

/// Genuine tricolored sum-free set in `H^N`: the `N`-fold power of the
/// matching restricted to the most common weight pair `(α*, β*)`, the
/// lexicographically least among the most common.
pub fn unborder(b: &BorderSumFreeSet, n: u32, guard: u128) -> Result<TricoloredSumFreeSet, StppError> {
    if n == 0 {
        return Err(StppError::Malformed("power must be at least 1".into()));
    }
    let base = b.len();
    let total = (base as u128)
        .checked_pow(n)
        .filter(|&t| t <= guard)
        .ok_or_else(|| StppError::Guard(format!("{base}^{n} matched tuples exceed the guard {guard}")))?
        as usize;
    if b.alpha.len() != base || b.beta.len() != base || b.gamma.len() != base {
        return Err(StppError::Malformed("weight lists must align with the matching".into()));
    }
    let digits = |mut idx: usize| {
        let mut d = vec![0usize; n as usize];
        for slot in d.iter_mut().rev() {
            *slot = idx % base;
            idx /= base;
        }
        d
    };
    let mut counts: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    let key = |d: &[usize]| (d.iter().map(|&i| b.alpha[i]).sum::<i64>(), d.iter().map(|&i| b.beta[i]).sum::<i64>());
    for idx in 0..total {
        *counts.entry(key(&digits(idx))).or_default() += 1;
    }
    let group = b.group.power(n);
    let Some(best) = counts.values().copied().max() else {
        return Ok(TricoloredSumFreeSet { group, matching: Matching3::new(Vec::new()) });
    };
    let target = *counts.iter().find(|(_, &v)| v == best).expect("max exists").0;
    let m = &b.matching.triples;
    let triples = (0..total)
        .map(digits)
        .filter(|d| key(d) == target)
        .map(|d| {
            let side = |f: fn(&(GroupElement, GroupElement, GroupElement)) -> &GroupElement| {
                let parts: Vec<GroupElement> = d.iter().map(|&i| f(&m[i]).clone()).collect();
                b.group.power_element(&parts)
            };
            (side(|t| &t.0), side(|t| &t.1), side(|t| &t.2))
        })
        .collect();
    Ok(TricoloredSumFreeSet { group, matching: Matching3::new(triples) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;
    use crate::stpp::StppTriple;
    use crate::sumfree::{verify_border, verify_sumfree};

    fn el(v: u64) -> GroupElement {
        GroupElement(vec![v])
    }

    fn trivial_z2() -> STPPConstruction {
        STPPConstruction {
            group: GroupSpec::parse("Z2").unwrap(),
            triples: vec![StppTriple { a: vec![el(0)], b: vec![el(0)], c: vec![el(0)] }],
        }
    }

    #[test]
    fn modal_sum() {
        assert_eq!(most_frequent_sum(1, 1, 1), 3);
        assert_eq!(most_frequent_sum(2, 1, 1), 3);
        assert_eq!(most_frequent_sum(2, 2, 2), 4);
        assert_eq!(most_frequent_sum(3, 3, 3), 6);
    }

    #[test]
    fn trivial_triple_weights() {
        let b = border_from_stpp(&trivial_z2()).unwrap();
        assert_eq!(b.matching.triples, vec![(el(0), el(0), el(0))]);
        assert_eq!((b.alpha[0], b.beta[0], b.gamma[0]), (6, -3, -3));
        assert!(verify_border(&b).unwrap().valid);
        assert_eq!(thm_main_lower_bound(&trivial_z2()), BigRational::new(1.into(), 3.into()));
        let u = unborder(&b, 1, DEFAULT_UNBORDER_GUARD).unwrap();
        assert_eq!(u.len(), 1);
        assert!(verify_sumfree(&u).unwrap().valid);
    }

    #[test]
    fn zero_weights_keep_full_power() {
        let s = TricoloredSumFreeSet {
            group: GroupSpec::parse("Z3").unwrap(),
            matching: Matching3::new(vec![(el(0), el(0), el(0)), (el(1), el(1), el(1))]),
        };
        let b = BorderSumFreeSet::from_sumfree(&s);
        for n in 1..=3 {
            let u = unborder(&b, n, DEFAULT_UNBORDER_GUARD).unwrap();
            assert_eq!(u.len(), 1 << n);
            assert!(verify_sumfree(&u).unwrap().valid);
        }
    }

    #[test]
    fn z4_pipeline() {
        let c = STPPConstruction {
            group: GroupSpec::parse("Z4").unwrap(),
            triples: vec![StppTriple { a: vec![el(0), el(1)], b: vec![el(0)], c: vec![el(0)] }],
        };
        let b = border_from_stpp(&c).unwrap();
        assert!(verify_border(&b).unwrap().valid);
        assert!(BigRational::from_integer(b.len().into()) >= thm_main_lower_bound(&c));
        for n in 1..=2 {
            let u = unborder(&b, n, DEFAULT_UNBORDER_GUARD).unwrap();
            assert!(verify_sumfree(&u).unwrap().valid);
            assert!(BigUint::from(u.len()) >= unborder_lower_bound(&b, n));
        }
    }

    #[test]
    fn rejects_unverified_and_guard() {
        let mut c = trivial_z2();
        c.triples.push(c.triples[0].clone());
        assert_eq!(border_from_stpp(&c), Err(StppError::Unverified));
        let b = border_from_stpp(&trivial_z2()).unwrap();
        assert!(matches!(unborder(&b, 3, 0), Err(StppError::Guard(_))));
    }
}
