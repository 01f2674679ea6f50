//! Uniform STPP constructions in `H^{3N}` built from an arbitrary one in `H`.
//!
//! Triples are indexed by `(u, v, w) ∈ [n]^N × [n]^N × [n]^N` with
//!
//! ```text
//! Â = ∏ A_{u_l} × ∏ B_{v_l} × ∏ C_{w_l}
//! B̂ = ∏ B_{u_l} × ∏ C_{v_l} × ∏ A_{w_l}
//! Ĉ = ∏ C_{u_l} × ∏ A_{v_l} × ∏ B_{w_l}
//! ```
//!
//! and restricted to `u ∼ μ1`, `v ∼ μ2`, `w ∼ μ3` for fixed distributions.
//! Only sizes are computed; members are produced on demand by sampling.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{differences, verify_stpp, STPPConstruction, StppError};
use crate::groups::{GroupElement, GroupSpec};

/// Cap on the `(N+1)^n` candidate distributions.
pub const DEFAULT_DISTRIBUTION_GUARD: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicSTPP {
    pub base: STPPConstruction,
    pub power: u32,
    /// The ambient group `H^{3N}`.
    pub group: GroupSpec,
    pub mu1: Vec<u32>,
    pub mu2: Vec<u32>,
    pub mu3: Vec<u32>,
    #[serde(with = "crate::serde_biguint")]
    pub size_a: BigUint,
    #[serde(with = "crate::serde_biguint")]
    pub size_b: BigUint,
    #[serde(with = "crate::serde_biguint")]
    pub size_c: BigUint,
    /// Number of retained `(u, v, w)`.
    #[serde(with = "crate::serde_biguint")]
    pub triples: BigUint,
    /// `Σ |Â||B̂|` over the retained triples, and the two rotations.
    #[serde(with = "crate::serde_biguint")]
    pub packing_ab: BigUint,
    #[serde(with = "crate::serde_biguint")]
    pub packing_bc: BigUint,
    #[serde(with = "crate::serde_biguint")]
    pub packing_ca: BigUint,
    /// `(N+1)^{3n}`, the worst-case loss from fixing the distributions.
    #[serde(with = "crate::serde_biguint")]
    pub loss_factor: BigUint,
}

/// One retained index `(u, v, w)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UvwIndex {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub trials: usize,
    pub zero_sums: usize,
    pub violations: usize,
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn multinomial(mu: &[u32]) -> BigUint {
    let n: u32 = mu.iter().sum();
    mu.iter().fold(factorial(n), |acc, &k| acc / factorial(k))
}

/// `Σ_{u ∼ μ} ∏_l w_{u_l} = multinomial(μ) · ∏_j w_j^{μ_j}`.
fn distribution_sum(mu: &[u32], weights: &[u64]) -> BigUint {
    weights.iter().zip(mu).fold(multinomial(mu), |acc, (&w, &k)| acc * BigUint::from(w).pow(k))
}

fn weighted_product(mu: &[u32], weights: &[u64]) -> BigUint {
    weights.iter().zip(mu).fold(BigUint::one(), |acc, (&w, &k)| acc * BigUint::from(w).pow(k))
}

/// All `μ ∈ ℕ^n` with `Σ μ = total`, in lexicographic order.
fn distributions(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, n: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(prefix, n, left - k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(&mut Vec::with_capacity(n), n, total, &mut out);
    }
    out
}

/// First maximizer of `f` over the distributions.
fn argmax(ds: &[Vec<u32>], f: impl Fn(&[u32]) -> BigUint) -> Vec<u32> {
    let mut best: Option<(BigUint, &Vec<u32>)> = None;
    for d in ds {
        let v = f(d);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, d));
        }
    }
    best.expect("at least one distribution").1.clone()
}

pub fn uniformize(c: &STPPConstruction, power: u32, guard: u128) -> Result<SymbolicSTPP, StppError> {
    if power == 0 {
        return Err(StppError::Malformed("power must be at least 1".into()));
    }
    if !verify_stpp(c)?.valid {
        return Err(StppError::Unverified);
    }
    let n = c.triples.len();
    if n == 0 {
        return Err(StppError::Malformed("construction has no triples".into()));
    }
    let candidates = (power as u128 + 1).checked_pow(n as u32);
    if candidates.is_none_or(|k| k > guard) {
        return Err(StppError::Guard(format!("({}+1)^{n} distributions exceed the guard {guard}", power)));
    }
    let sizes = c.sizes();
    let col = |f: fn(&[u64; 3]) -> u64| sizes.iter().map(f).collect::<Vec<u64>>();
    let (a, b, cc) = (col(|s| s[0]), col(|s| s[1]), col(|s| s[2]));
    let prod = |x: &[u64], y: &[u64]| x.iter().zip(y).map(|(p, q)| p * q).collect::<Vec<u64>>();
    let (ab, bc, ca) = (prod(&a, &b), prod(&b, &cc), prod(&cc, &a));

    let ds = distributions(n, power);
    let mu1 = argmax(&ds, |m| distribution_sum(m, &ab));
    let mu2 = argmax(&ds, |m| distribution_sum(m, &bc));
    let mu3 = argmax(&ds, |m| distribution_sum(m, &ca));

    let size = |x: &[u64], y: &[u64], z: &[u64]| {
        weighted_product(&mu1, x) * weighted_product(&mu2, y) * weighted_product(&mu3, z)
    };
    let triples = multinomial(&mu1) * multinomial(&mu2) * multinomial(&mu3);
    let packing = |x: &[u64], y: &[u64], z: &[u64]| {
        distribution_sum(&mu1, x) * distribution_sum(&mu2, y) * distribution_sum(&mu3, z)
    };
    Ok(SymbolicSTPP {
        base: c.clone(),
        power,
        group: c.group.power(3 * power),
        size_a: size(&a, &b, &cc),
        size_b: size(&b, &cc, &a),
        size_c: size(&cc, &a, &b),
        packing_ab: packing(&ab, &bc, &ca),
        packing_bc: packing(&bc, &ca, &ab),
        packing_ca: packing(&ca, &ab, &bc),
        triples,
        loss_factor: BigUint::from(power + 1).pow(3 * n as u32),
        mu1,
        mu2,
        mu3,
    })
}

fn arrangement<R: Rng + ?Sized>(mu: &[u32], rng: &mut R) -> Vec<usize> {
    let mut seq: Vec<usize> = mu.iter().enumerate().flat_map(|(j, &k)| std::iter::repeat_n(j, k as usize)).collect();
    seq.shuffle(rng);
    seq
}

impl SymbolicSTPP {
    /// A uniformly random retained index.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> UvwIndex {
        UvwIndex { u: arrangement(&self.mu1, rng), v: arrangement(&self.mu2, rng), w: arrangement(&self.mu3, rng) }
    }

    /// Whether `idx` has the selected distributions.
    pub fn is_retained(&self, idx: &UvwIndex) -> bool {
        let count = |seq: &[usize]| {
            let mut mu = vec![0u32; self.base.triples.len()];
            for &j in seq {
                if j >= mu.len() {
                    return None;
                }
                mu[j] += 1;
            }
            Some(mu)
        };
        count(&idx.u).as_ref() == Some(&self.mu1)
            && count(&idx.v).as_ref() == Some(&self.mu2)
            && count(&idx.w).as_ref() == Some(&self.mu3)
    }

    /// `|Â|, |B̂|, |Ĉ|` computed directly from the index.
    pub fn sizes_at(&self, idx: &UvwIndex) -> [BigUint; 3] {
        let s = self.base.sizes();
        let side = |r: [usize; 3]| {
            let mut acc = BigUint::one();
            for (seq, &col) in [&idx.u, &idx.v, &idx.w].into_iter().zip(&r) {
                for &j in seq {
                    acc *= s[j][col];
                }
            }
            acc
        };
        [side([0, 1, 2]), side([1, 2, 0]), side([2, 0, 1])]
    }

    fn lists(&self, j: usize, col: usize) -> &[GroupElement] {
        let t = &self.base.triples[j];
        match col {
            0 => &t.a,
            1 => &t.b,
            _ => &t.c,
        }
    }

    fn sample_side<R: Rng + ?Sized>(&self, idx: &UvwIndex, rot: [usize; 3], rng: &mut R) -> GroupElement {
        let mut parts = Vec::with_capacity(3 * self.power as usize);
        for (seq, &col) in [&idx.u, &idx.v, &idx.w].into_iter().zip(&rot) {
            for &j in seq {
                let list = self.lists(j, col);
                parts.push(list[rng.random_range(0..list.len())].clone());
            }
        }
        self.base.group.power_element(&parts)
    }

    /// Random members of `Â`, `B̂`, `Ĉ` for the given index.
    pub fn sample_members<R: Rng + ?Sized>(&self, idx: &UvwIndex, rng: &mut R) -> [GroupElement; 3] {
        [
            self.sample_side(idx, [0, 1, 2], rng),
            self.sample_side(idx, [1, 2, 0], rng),
            self.sample_side(idx, [2, 0, 1], rng),
        ]
    }

    /// Randomized check of the cross condition in `H^{3N}`. Each trial draws
    /// `s ∈ Â_i − B̂_i` and `t ∈ B̂_j − Ĉ_j`, and locates the index `k` with
    /// `−(s+t) ∈ Ĉ_k − Â_k`, if any. Half the trials reuse `i` for `j` and
    /// share the `B̂` member so that zero sums actually occur.
    pub fn spot_check<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> SpotCheck {
        let g = &self.base.group;
        let owners = |f: fn(&super::StppTriple) -> (&[GroupElement], &[GroupElement])| {
            let mut map = HashMap::new();
            for (j, t) in self.base.triples.iter().enumerate() {
                let (x, y) = f(t);
                for d in differences(g, x, y) {
                    map.insert(d, j);
                }
            }
            map
        };
        let s_own = owners(|t| (&t.a, &t.b));
        let t_own = owners(|t| (&t.b, &t.c));
        let u_own = owners(|t| (&t.c, &t.a));
        let big = &self.group;
        let n = self.power as usize;
        let mut report = SpotCheck { trials, zero_sums: 0, violations: 0 };
        for trial in 0..trials {
            let i = self.sample_index(rng);
            let [a, b, _] = self.sample_members(&i, rng);
            let (j, b2, c2) = if trial % 2 == 0 {
                let [_, _, c] = self.sample_members(&i, rng);
                (i.clone(), b.clone(), c)
            } else {
                let j = self.sample_index(rng);
                let [_, b, c] = self.sample_members(&j, rng);
                (j, b, c)
            };
            let s = big.add_unchecked(&a, &big.neg(&b));
            let t = big.add_unchecked(&b2, &big.neg(&c2));
            let u = big.neg(&big.add_unchecked(&s, &t));
            let parts = g.split_power_element(&u, 3 * n);
            let locate = |range: std::ops::Range<usize>, own: &HashMap<GroupElement, usize>| {
                parts[range].iter().map(|x| own.get(x).copied()).collect::<Option<Vec<usize>>>()
            };
            let k = match (locate(0..n, &u_own), locate(n..2 * n, &s_own), locate(2 * n..3 * n, &t_own)) {
                (Some(u), Some(v), Some(w)) => UvwIndex { u, v, w },
                _ => continue,
            };
            if !self.is_retained(&k) {
                continue;
            }
            report.zero_sums += 1;
            if k != i || k != j {
                report.violations += 1;
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stpp::StppTriple;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn el(v: u64) -> GroupElement {
        GroupElement(vec![v])
    }

    // sizes (1,1,1) and (2,1,1); Z4 has no valid construction of this shape
    fn z5_two() -> STPPConstruction {
        STPPConstruction {
            group: GroupSpec::parse("Z5").unwrap(),
            triples: vec![
                StppTriple { a: vec![el(0)], b: vec![el(0)], c: vec![el(0)] },
                StppTriple { a: vec![el(0), el(1)], b: vec![el(2)], c: vec![el(4)] },
            ],
        }
    }

    #[test]
    fn distributions_count() {
        assert_eq!(distributions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(distributions(3, 4).len(), 15);
        assert_eq!(multinomial(&[1, 1]), BigUint::from(2u32));
        assert_eq!(multinomial(&[2, 1, 1]), BigUint::from(12u32));
    }

    #[test]
    fn single_triple() {
        let c = STPPConstruction {
            group: GroupSpec::parse("Z4").unwrap(),
            triples: vec![StppTriple { a: vec![el(0), el(1)], b: vec![el(0)], c: vec![el(0)] }],
        };
        let s = uniformize(&c, 3, DEFAULT_DISTRIBUTION_GUARD).unwrap();
        assert_eq!(s.size_a, BigUint::from(8u32));
        assert_eq!(s.size_b, BigUint::from(8u32));
        assert_eq!(s.size_c, BigUint::from(8u32));
        assert_eq!(s.triples, BigUint::one());
        assert_eq!(s.loss_factor, BigUint::from(64u32));
    }

    #[test]
    fn two_triples_brute_force() {
        let c = z5_two();
        assert!(verify_stpp(&c).unwrap().valid);
        let s = uniformize(&c, 2, DEFAULT_DISTRIBUTION_GUARD).unwrap();
        // brute force over all (u, v, w) in [2]^2 × [2]^2 × [2]^2, grouped by distributions
        let sizes = c.sizes();
        let seqs: Vec<Vec<usize>> = (0..4).map(|x| vec![x >> 1, x & 1]).collect();
        let dist = |q: &[usize]| {
            vec![q.iter().filter(|&&j| j == 0).count() as u32, q.iter().filter(|&&j| j == 1).count() as u32]
        };
        let mut best: Option<(BigUint, Vec<Vec<u32>>)> = None;
        for d1 in distributions(2, 2) {
            for d2 in distributions(2, 2) {
                for d3 in distributions(2, 2) {
                    let mut f = [BigUint::ZERO, BigUint::ZERO, BigUint::ZERO];
                    for (k, (d, cols)) in [(&d1, [0, 1]), (&d2, [1, 2]), (&d3, [2, 0])].into_iter().enumerate() {
                        for q in seqs.iter().filter(|q| dist(q) == *d) {
                            f[k] +=
                                q.iter().fold(BigUint::one(), |acc, &j| acc * sizes[j][cols[0]] * sizes[j][cols[1]]);
                        }
                    }
                    let p = &f[0] * &f[1] * &f[2];
                    if best.as_ref().is_none_or(|(b, _)| p > *b) {
                        best = Some((p, vec![d1.clone(), d2.clone(), d3.clone()]));
                    }
                }
            }
        }
        let (p, mus) = best.unwrap();
        assert_eq!(mus, vec![s.mu1.clone(), s.mu2.clone(), s.mu3.clone()]);
        assert_eq!(p, s.packing_ab);
        assert_eq!(s.mu1, vec![0, 2]);
        assert_eq!(s.mu3, vec![0, 2]);
    }

    #[test]
    fn uniform_sizes_and_spot_check() {
        let s = uniformize(&z5_two(), 2, DEFAULT_DISTRIBUTION_GUARD).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let idx = s.sample_index(&mut rng);
            assert!(s.is_retained(&idx));
            assert_eq!(s.sizes_at(&idx), [s.size_a.clone(), s.size_b.clone(), s.size_c.clone()]);
            let m = s.sample_members(&idx, &mut rng);
            assert!(m.iter().all(|x| s.group.contains(x)));
        }
        let r = s.spot_check(100, &mut rng);
        assert_eq!(r.violations, 0);
        assert!(r.zero_sums >= 50);
    }

    #[test]
    fn guard() {
        assert!(matches!(uniformize(&z5_two(), 2000, 1000), Err(StppError::Guard(_))));
    }
}
