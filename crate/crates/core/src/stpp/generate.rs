//! Randomized greedy search for small STPP constructions.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{verify_stpp_with, STPPConstruction, StppError, StppTriple};
use crate::exec::Exec;
use crate::groups::GroupSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateParams {
    pub max_triples: usize,
    pub max_set_size: usize,
    pub attempts: usize,
    pub max_order: u64,
}

impl Default for GenerateParams {
    fn default() -> Self {
        GenerateParams { max_triples: 4, max_set_size: 3, attempts: 200, max_order: 4096 }
    }
}

/// Proposes random triples and keeps each one that leaves the construction
/// valid. Never returns an empty construction: if nothing is accepted the
/// result is the single triple `{0}, {0}, {0}`.
pub fn generate_random_stpp<R: Rng + ?Sized>(
    g: &GroupSpec,
    params: &GenerateParams,
    rng: &mut R,
) -> Result<STPPConstruction, StppError> {
    let elements = g.elements(params.max_order)?;
    let cap = params.max_set_size.clamp(1, elements.len());
    let mut c = STPPConstruction { group: g.clone(), triples: Vec::new() };
    for _ in 0..params.attempts {
        if c.triples.len() >= params.max_triples {
            break;
        }
        let mut pick = || {
            let k = rng.random_range(1..=cap);
            elements.choose_multiple(rng, k).cloned().collect::<Vec<_>>()
        };
        let t = StppTriple { a: pick(), b: pick(), c: pick() };
        c.triples.push(t);
        if !verify_stpp_with(&c, Exec::Sequential)?.valid {
            c.triples.pop();
        }
    }
    if c.triples.is_empty() {
        let z = g.zero();
        c.triples.push(StppTriple { a: vec![z.clone()], b: vec![z.clone()], c: vec![z] });
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stpp::verify_stpp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_constructions_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for g in ["Z2", "Z4", "Z2^2", "Z8", "Z3^2", "Z2 x Z6"] {
            let g = GroupSpec::parse(g).unwrap();
            for _ in 0..5 {
                let c = generate_random_stpp(&g, &GenerateParams::default(), &mut rng).unwrap();
                assert!(!c.triples.is_empty());
                assert!(verify_stpp(&c).unwrap().valid);
            }
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = GroupSpec::parse("Z2^3").unwrap();
        let run =
            |seed| generate_random_stpp(&g, &GenerateParams::default(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert_eq!(run(5), run(5));
    }
}
