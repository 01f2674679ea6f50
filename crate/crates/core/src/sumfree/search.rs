//! Exhaustive maximum tricolored sum-free sets in small groups.
//!
//! Matchings are built with `s` strictly increasing. For a partial matching
//! with diagonal sums `D = {s_k + t_k}`, a new triple is admissible when its
//! sum is new to `D`, no cross sum `s_i + t_j` (`i ≠ j`) hits `D`, and the
//! new sum is not already a cross sum. These three rules are equivalent to
//! the sum-free condition and also force `S`, `T`, `U` to be injective.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::{SumFreeError, TricoloredSumFreeSet};
use crate::exec::Exec;
use crate::fftensor::Matching3;
use crate::groups::{CayleyTable, GroupSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExhaustiveLimits {
    pub max_order: u64,
    pub exec: Exec,
}

impl Default for ExhaustiveLimits {
    fn default() -> Self {
        ExhaustiveLimits { max_order: 9, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveResult {
    pub size: usize,
    pub witness: TricoloredSumFreeSet,
}

struct State<'a> {
    table: &'a CayleyTable,
    pairs: Vec<(usize, usize)>,
    in_diag: Vec<bool>,
    cross: Vec<u32>,
    best: Vec<(usize, usize)>,
    global: &'a AtomicUsize,
}

impl State<'_> {
    fn try_push(&mut self, s: usize, t: usize) -> bool {
        let tb = self.table;
        let d = tb.add(s, t);
        if self.in_diag[d] || self.cross[d] > 0 {
            return false;
        }
        for &(si, ti) in &self.pairs {
            let a = tb.add(s, ti);
            let b = tb.add(si, t);
            if a == d || b == d || self.in_diag[a] || self.in_diag[b] {
                return false;
            }
        }
        for &(si, ti) in &self.pairs {
            self.cross[tb.add(s, ti)] += 1;
            self.cross[tb.add(si, t)] += 1;
        }
        self.in_diag[d] = true;
        self.pairs.push((s, t));
        true
    }

    fn pop(&mut self) {
        let tb = self.table;
        let (s, t) = self.pairs.pop().expect("pop after push");
        self.in_diag[tb.add(s, t)] = false;
        for &(si, ti) in &self.pairs {
            self.cross[tb.add(s, ti)] -= 1;
            self.cross[tb.add(si, t)] -= 1;
        }
    }

    fn dfs(&mut self, next_s: usize) {
        let n = self.table.order;
        if self.pairs.len() > self.best.len() {
            self.best = self.pairs.clone();
            self.global.fetch_max(self.best.len(), Ordering::Relaxed);
        }
        for s in next_s..n {
            let bound = self.pairs.len() + (n - s);
            // ties with the global best are still explored so results do not
            // depend on scheduling
            if bound <= self.best.len() || bound < self.global.load(Ordering::Relaxed) {
                return;
            }
            for t in 0..n {
                if self.try_push(s, t) {
                    self.dfs(s + 1);
                    self.pop();
                }
            }
        }
    }
}

/// Largest tricolored sum-free set in `g`, with the lexicographically least
/// maximum matching (triples sorted by `s`) as witness.
pub fn max_sumfree_exhaustive(g: &GroupSpec, limits: &ExhaustiveLimits) -> Result<ExhaustiveResult, SumFreeError> {
    let table = g.cayley_table(limits.max_order).map_err(|e| SumFreeError::Guard(e.to_string()))?;
    let n = table.order;
    let global = AtomicUsize::new(1);
    // one task per first triple (s_0, t_0)
    let results = limits.exec.map_range(0..n * n, |task| {
        let (s0, t0) = (task / n, task % n);
        let mut st = State {
            table: &table,
            pairs: Vec::new(),
            in_diag: vec![false; n],
            cross: vec![0; n],
            best: Vec::new(),
            global: &global,
        };
        if n - s0 < global.load(Ordering::Relaxed) {
            return st.best;
        }
        st.try_push(s0, t0);
        st.dfs(s0 + 1);
        st.best
    });
    let best = results.into_iter().fold(Vec::new(), |acc, r| if r.len() > acc.len() { r } else { acc });
    let triples = best
        .iter()
        .map(|&(s, t)| {
            let u = table.neg(table.add(s, t));
            (g.element_at(s), g.element_at(t), g.element_at(u))
        })
        .collect();
    let witness = TricoloredSumFreeSet { group: g.clone(), matching: Matching3::new(triples) };
    Ok(ExhaustiveResult { size: best.len(), witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupElement;
    use crate::sumfree::verify_sumfree;

    fn run(s: &str, exec: Exec) -> ExhaustiveResult {
        max_sumfree_exhaustive(&GroupSpec::parse(s).unwrap(), &ExhaustiveLimits { exec, ..Default::default() }).unwrap()
    }

    #[test]
    fn small_groups() {
        assert_eq!(run("Z2", Exec::default()).size, 1);
        let z3 = run("Z3", Exec::default());
        assert_eq!(z3.size, 2);
        let e = |v: u64| GroupElement(vec![v]);
        assert_eq!(z3.witness.matching.triples, vec![(e(0), e(0), e(0)), (e(1), e(1), e(1))]);
        assert_eq!(run("1", Exec::default()).size, 1);
    }

    #[test]
    fn witnesses_verify_and_strategies_agree() {
        for g in ["Z4", "Z2^2", "Z5", "Z6", "Z7", "Z2^3", "Z8", "Z2 x Z4", "Z9", "Z3^2"] {
            let a = run(g, Exec::Sequential);
            let b = run(g, Exec::Parallel);
            assert_eq!(a, b, "{g}");
            assert!(verify_sumfree(&a.witness).unwrap().valid, "{g}");
        }
    }

    #[test]
    fn guard() {
        let g = GroupSpec::parse("Z10").unwrap();
        assert!(matches!(max_sumfree_exhaustive(&g, &ExhaustiveLimits::default()), Err(SumFreeError::Guard(_))));
    }
}
