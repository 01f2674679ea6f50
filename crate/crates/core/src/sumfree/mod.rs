//! Tricolored sum-free sets and their weighted (border) relaxation.

pub mod bounds;
pub mod search;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fftensor::Matching3;
use crate::groups::{GroupElement, GroupError, GroupSpec};

pub use bounds::{theorem_bound, TheoremBounds};
pub use search::{max_sumfree_exhaustive, ExhaustiveLimits, ExhaustiveResult};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SumFreeError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("malformed matching: {0}")]
    Malformed(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
}

/// A perfect matching `M` on `S × T × U` with `s + t + u = 0` exactly on `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TricoloredSumFreeSet {
    pub group: GroupSpec,
    pub matching: Matching3<GroupElement>,
}

/// Weighted relaxation: off-matching zero-sum triples are allowed when their
/// weights sum to something positive. Weights are aligned with the matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorderSumFreeSet {
    pub group: GroupSpec,
    pub matching: Matching3<GroupElement>,
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
    pub gamma: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct RawBorder {
    group: GroupSpec,
    matching: Matching3<GroupElement>,
    alpha: BTreeMap<String, i64>,
    beta: BTreeMap<String, i64>,
    gamma: BTreeMap<String, i64>,
}

impl Serialize for BorderSumFreeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map = |side: Vec<GroupElement>, w: &[i64]| -> BTreeMap<String, i64> {
            side.iter().zip(w).map(|(e, &v)| (e.key(), v)).collect()
        };
        RawBorder {
            group: self.group.clone(),
            matching: self.matching.clone(),
            alpha: map(self.matching.xs(), &self.alpha),
            beta: map(self.matching.ys(), &self.beta),
            gamma: map(self.matching.zs(), &self.gamma),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BorderSumFreeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawBorder::deserialize(d)?;
        let pick = |side: Vec<GroupElement>, map: &BTreeMap<String, i64>, name: &str| -> Result<Vec<i64>, D::Error> {
            side.iter()
                .map(|e| {
                    map.get(&e.key())
                        .copied()
                        .ok_or_else(|| serde::de::Error::custom(format!("{name} has no weight for {}", e.key())))
                })
                .collect()
        };
        Ok(BorderSumFreeSet {
            alpha: pick(raw.matching.xs(), &raw.alpha, "alpha")?,
            beta: pick(raw.matching.ys(), &raw.beta, "beta")?,
            gamma: pick(raw.matching.zs(), &raw.gamma, "gamma")?,
            group: raw.group,
            matching: raw.matching,
        })
    }
}

impl TricoloredSumFreeSet {
    pub fn len(&self) -> usize {
        self.matching.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matching.is_empty()
    }

    /// `{(s, s, −2s) : s ∈ S}` for a set without three-term progressions.
    pub fn from_progression_free(group: &GroupSpec, set: &[GroupElement]) -> Self {
        let triples = set
            .iter()
            .map(|s| {
                let two_s = group.add_unchecked(s, s);
                (s.clone(), s.clone(), group.neg(&two_s))
            })
            .collect();
        TricoloredSumFreeSet { group: group.clone(), matching: Matching3::new(triples) }
    }
}

impl BorderSumFreeSet {
    pub fn len(&self) -> usize {
        self.matching.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matching.is_empty()
    }

    /// Largest absolute weight.
    pub fn range(&self) -> i64 {
        self.alpha.iter().chain(&self.beta).chain(&self.gamma).map(|w| w.abs()).max().unwrap_or(0)
    }

    /// The same matching with all weights zero.
    pub fn from_sumfree(s: &TricoloredSumFreeSet) -> Self {
        let n = s.len();
        BorderSumFreeSet {
            group: s.group.clone(),
            matching: s.matching.clone(),
            alpha: vec![0; n],
            beta: vec![0; n],
            gamma: vec![0; n],
        }
    }
}

/// Why a candidate fails. Indices refer to positions in the matching:
/// the triple is `(s_i, t_j, u_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `s_i + t_i + u_i ≠ 0`.
    MatchedNonzero { i: usize, triple: (GroupElement, GroupElement, GroupElement) },
    /// Matched weights do not cancel.
    MatchedWeight { i: usize, weight: i64 },
    /// A zero-sum triple off the matching (with nonpositive weight, for border sets).
    OffMatching { i: usize, j: usize, k: usize, triple: (GroupElement, GroupElement, GroupElement), weight: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumFreeReport {
    pub valid: bool,
    pub size: usize,
    pub violation: Option<Violation>,
}

fn check_shape(g: &GroupSpec, m: &Matching3<GroupElement>) -> Result<(), SumFreeError> {
    for (s, t, u) in &m.triples {
        g.check(s)?;
        g.check(t)?;
        g.check(u)?;
    }
    if !m.is_matching() {
        return Err(SumFreeError::Malformed("some projection of the matching is not injective".into()));
    }
    Ok(())
}

/// Shared scan. For every pair `(i, j)` there is at most one `k` with
/// `s_i + t_j + u_k = 0`, found by lookup, so this visits exactly the
/// zero-sum triples of `S × T × U` in `(i, j, k)` order.
fn scan(
    g: &GroupSpec,
    m: &Matching3<GroupElement>,
    weights: Option<(&[i64], &[i64], &[i64])>,
) -> Result<SumFreeReport, SumFreeError> {
    check_shape(g, m)?;
    let n = m.len();
    let fail = |v| Ok(SumFreeReport { valid: false, size: n, violation: Some(v) });
    for (i, (s, t, u)) in m.triples.iter().enumerate() {
        if !GroupSpec::is_zero(&g.add_unchecked(&g.add_unchecked(s, t), u)) {
            return fail(Violation::MatchedNonzero { i, triple: (s.clone(), t.clone(), u.clone()) });
        }
        if let Some((a, b, c)) = weights {
            let weight = a[i] + b[i] + c[i];
            if weight != 0 {
                return fail(Violation::MatchedWeight { i, weight });
            }
        }
    }
    let u_index: HashMap<&GroupElement, usize> = m.triples.iter().enumerate().map(|(k, t)| (&t.2, k)).collect();
    for (i, (s, _, _)) in m.triples.iter().enumerate() {
        for (j, (_, t, _)) in m.triples.iter().enumerate() {
            let need = g.neg(&g.add_unchecked(s, t));
            let Some(&k) = u_index.get(&need) else { continue };
            if i == j && j == k {
                continue;
            }
            let weight = weights.map_or(0, |(a, b, c)| a[i] + b[j] + c[k]);
            if weights.is_none() || weight <= 0 {
                let triple = (s.clone(), t.clone(), need);
                return fail(Violation::OffMatching { i, j, k, triple, weight });
            }
        }
    }
    Ok(SumFreeReport { valid: true, size: n, violation: None })
}

pub fn verify_sumfree(s: &TricoloredSumFreeSet) -> Result<SumFreeReport, SumFreeError> {
    scan(&s.group, &s.matching, None)
}

pub fn verify_border(b: &BorderSumFreeSet) -> Result<SumFreeReport, SumFreeError> {
    let n = b.matching.len();
    if b.alpha.len() != n || b.beta.len() != n || b.gamma.len() != n {
        return Err(SumFreeError::Malformed("weight lists must align with the matching".into()));
    }
    scan(&b.group, &b.matching, Some((&b.alpha, &b.beta, &b.gamma)))
}
