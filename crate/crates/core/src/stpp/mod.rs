//! Simultaneous triple product property (STPP) constructions in abelian groups.

pub mod border;
pub mod generate;
pub mod uniform;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::groups::{GroupElement, GroupError, GroupSpec};

pub use border::{border_from_stpp, thm_main_lower_bound, unborder, unborder_lower_bound, DEFAULT_UNBORDER_GUARD};
pub use generate::{generate_random_stpp, GenerateParams};
pub use uniform::{uniformize, SymbolicSTPP, DEFAULT_DISTRIBUTION_GUARD};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StppError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("malformed construction: {0}")]
    Malformed(String),
    #[error("construction does not satisfy the simultaneous triple product property")]
    Unverified,
    #[error("inequality vacuous: {0}")]
    Vacuous(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StppTriple {
    #[serde(rename = "A")]
    pub a: Vec<GroupElement>,
    #[serde(rename = "B")]
    pub b: Vec<GroupElement>,
    #[serde(rename = "C")]
    pub c: Vec<GroupElement>,
}

impl StppTriple {
    pub fn sizes(&self) -> [u64; 3] {
        [self.a.len() as u64, self.b.len() as u64, self.c.len() as u64]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub struct STPPConstruction {
    pub group: GroupSpec,
    pub triples: Vec<StppTriple>,
}

impl STPPConstruction {
    /// Checks that all elements lie in the group and no list repeats.
    pub fn validate(&self) -> Result<(), StppError> {
        for (i, t) in self.triples.iter().enumerate() {
            for (name, list) in [("A", &t.a), ("B", &t.b), ("C", &t.c)] {
                if list.is_empty() {
                    return Err(StppError::Malformed(format!("{name}_{i} is empty")));
                }
                let mut seen = HashSet::new();
                for x in list {
                    self.group.check(x)?;
                    if !seen.insert(x) {
                        return Err(StppError::Malformed(format!("{name}_{i} repeats {}", x.key())));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sizes(&self) -> Vec<[u64; 3]> {
        self.triples.iter().map(StppTriple::sizes).collect()
    }
}

/// `{x - y : x ∈ xs, y ∈ ys}` as a list in first-seen order, without repeats.
pub(crate) fn differences(g: &GroupSpec, xs: &[GroupElement], ys: &[GroupElement]) -> Vec<GroupElement> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for x in xs {
        for y in ys {
            let d = g.add_unchecked(x, &g.neg(y));
            if seen.insert(d.clone()) {
                out.push(d);
            }
        }
    }
    out
}

/// Triple product property: `a + b + c = 0` with `a ∈ A−A`, `b ∈ B−B`,
/// `c ∈ C−C` only for `a = b = c = 0`. Also requires `|A−B| = |A||B|`.
pub fn verify_tpp(g: &GroupSpec, a: &[GroupElement], b: &[GroupElement], c: &[GroupElement]) -> bool {
    let qa = differences(g, a, a);
    let qb = differences(g, b, b);
    let qc: HashSet<GroupElement> = differences(g, c, c).into_iter().collect();
    for x in &qa {
        for y in &qb {
            if GroupSpec::is_zero(x) && GroupSpec::is_zero(y) {
                continue;
            }
            if qc.contains(&g.neg(&g.add_unchecked(x, y))) {
                return false;
            }
        }
    }
    differences(g, a, b).len() == a.len() * b.len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StppFailure {
    /// Triple `i` fails the triple product property.
    Tpp { i: usize },
    /// `s + t + u = 0` with `s ∈ S_i`, `t ∈ T_j`, `u ∈ U_k`, not all indices equal.
    Cross { i: usize, j: usize, k: usize, s: GroupElement, t: GroupElement, u: GroupElement },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StppReport {
    pub valid: bool,
    pub triples: usize,
    pub failure: Option<StppFailure>,
}

pub fn verify_stpp(c: &STPPConstruction) -> Result<StppReport, StppError> {
    verify_stpp_with(c, Exec::default())
}

pub fn verify_stpp_with(c: &STPPConstruction, exec: Exec) -> Result<StppReport, StppError> {
    c.validate()?;
    let g = &c.group;
    let n = c.triples.len();
    let report = |failure: Option<StppFailure>| Ok(StppReport { valid: failure.is_none(), triples: n, failure });
    if let Some(i) = exec.find_first(0..n, |i| {
        let t = &c.triples[i];
        (!verify_tpp(g, &t.a, &t.b, &t.c)).then_some(i)
    }) {
        return report(Some(StppFailure::Tpp { i }));
    }
    let s_sets: Vec<Vec<GroupElement>> = c.triples.iter().map(|t| differences(g, &t.a, &t.b)).collect();
    let t_sets: Vec<Vec<GroupElement>> = c.triples.iter().map(|t| differences(g, &t.b, &t.c)).collect();
    let mut u_owner: HashMap<GroupElement, Vec<usize>> = HashMap::new();
    for (k, t) in c.triples.iter().enumerate() {
        for u in differences(g, &t.c, &t.a) {
            u_owner.entry(u).or_default().push(k);
        }
    }
    let failure = exec.find_first(0..n, |i| {
        for s in &s_sets[i] {
            for (j, ts) in t_sets.iter().enumerate() {
                for t in ts {
                    let u = g.neg(&g.add_unchecked(s, t));
                    let Some(ks) = u_owner.get(&u) else { continue };
                    if let Some(&k) = ks.iter().find(|&&k| !(i == j && j == k)) {
                        return Some(StppFailure::Cross { i, j, k, s: s.clone(), t: t.clone(), u });
                    }
                }
            }
        }
        None
    });
    report(failure)
}

/// The three packing sums and their exponents relative to `|H|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub sum_ab: u128,
    pub sum_bc: u128,
    pub sum_ca: u128,
    pub c_ab: f64,
    pub c_bc: f64,
    pub c_ca: f64,
}

impl PackingReport {
    pub fn min_exponent(&self) -> f64 {
        self.c_ab.min(self.c_bc).min(self.c_ca)
    }
}

/// `None` when `|H| = 1`.
pub fn packing_from_sizes(sizes: &[[u64; 3]], ln_order: f64) -> Option<PackingReport> {
    if ln_order <= 0.0 {
        return None;
    }
    let sum = |x: usize, y: usize| sizes.iter().map(|s| s[x] as u128 * s[y] as u128).sum::<u128>();
    let (sum_ab, sum_bc, sum_ca) = (sum(0, 1), sum(1, 2), sum(2, 0));
    let e = |v: u128| (v as f64).ln() / ln_order;
    Some(PackingReport { sum_ab, sum_bc, sum_ca, c_ab: e(sum_ab), c_bc: e(sum_bc), c_ca: e(sum_ca) })
}

pub fn packing_report(c: &STPPConstruction) -> Option<PackingReport> {
    packing_from_sizes(&c.sizes(), c.group.ln_order())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    /// Largest `ω ∈ [2, 3]` with `Σ (|A_i||B_i||C_i|)^{ω/3} ≤ |H|`.
    pub omega_bound: f64,
    /// The unclamped solution; `None` when no `ω ≥ 0` is feasible.
    pub raw_omega: Option<f64>,
    /// Set when the inequality already fails at `ω = 2`.
    pub clamped: bool,
    pub warning: Option<String>,
    pub packing: Option<PackingReport>,
    /// `2/(1 - ε_pack)` with `ε_pack = (1 - min packing exponent)/3`.
    pub omega_floor: Option<f64>,
}

const OMEGA_ITERATIONS: usize = 60;

/// Absorbs rounding in `ln` so exact boundary cases such as `8^{2/3} = 4` stay feasible.
fn slack(ln_order: f64) -> f64 {
    16.0 * f64::EPSILON * ln_order.max(1.0)
}

fn ln_lhs(ln_products: &[f64], omega: f64) -> f64 {
    let top = ln_products.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) * omega / 3.0;
    top + ln_products.iter().map(|&l| (l * omega / 3.0 - top).exp()).sum::<f64>().ln()
}

fn bisect(ln_products: &[f64], ln_order: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..OMEGA_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if ln_lhs(ln_products, mid) <= ln_order + slack(ln_order) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// ω bound from the products `|A_i||B_i||C_i|` alone.
pub fn omega_from_products(products: &[u128], order: u128) -> Result<OmegaReport, StppError> {
    if order < 2 {
        return Err(StppError::Vacuous("group order must be at least 2".into()));
    }
    if !products.iter().any(|&p| p >= 2) {
        return Err(StppError::Vacuous("every product |A||B||C| is below 2".into()));
    }
    if products.contains(&0) {
        return Err(StppError::Vacuous("empty set in a triple".into()));
    }
    let lp: Vec<f64> = products.iter().map(|&p| (p as f64).ln()).collect();
    let ln_h = (order as f64).ln();
    let feasible = |w: f64| ln_lhs(&lp, w) <= ln_h + slack(ln_h);
    let (omega_bound, raw_omega, clamped) = if feasible(3.0) {
        (3.0, Some(3.0), false)
    } else if feasible(2.0) {
        let w = bisect(&lp, ln_h, 2.0, 3.0);
        (w, Some(w), false)
    } else if feasible(0.0) {
        (2.0, Some(bisect(&lp, ln_h, 0.0, 2.0)), true)
    } else {
        (2.0, None, true)
    };
    let warning = clamped.then(|| "bound < 2 clamps to 2".to_string());
    Ok(OmegaReport { omega_bound, raw_omega, clamped, warning, packing: None, omega_floor: None })
}

/// ω bound with packing diagnostics from per-triple sizes.
pub fn omega_bound(sizes: &[[u64; 3]], order: u128) -> Result<OmegaReport, StppError> {
    let products: Vec<u128> = sizes.iter().map(|s| s.iter().map(|&x| x as u128).product()).collect();
    let mut report = omega_from_products(&products, order)?;
    report.packing = packing_from_sizes(sizes, (order as f64).ln());
    report.omega_floor = report.packing.map(|p| omega_floor(p.min_exponent()));
    Ok(report)
}

pub fn omega_floor(min_packing_exponent: f64) -> f64 {
    let eps = (1.0 - min_packing_exponent) / 3.0;
    2.0 / (1.0 - eps)
}

pub fn omega_report(c: &STPPConstruction) -> Result<OmegaReport, StppError> {
    let order = c.group.order().try_into().map_err(|_| StppError::Guard("group order exceeds u128".into()))?;
    omega_bound(&c.sizes(), order)
}
