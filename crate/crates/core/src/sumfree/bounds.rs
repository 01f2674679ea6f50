//! Upper bounds on tricolored sum-free sets from the slice rank method.

use serde::{Deserialize, Serialize};

use crate::groups::{crt_primary_decomposition, largest_primary_block, GroupSpec, PrimaryBlock};
use crate::rates::{constants, rate_j};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremBounds {
    /// `3|H|^{1-ε/m}` for the bounded-exponent bound.
    #[serde(rename = "thmA")]
    pub thm_a: f64,
    /// The `m` used in `thm_a`: the largest prime power in the primary
    /// decomposition (3 for the trivial group).
    #[serde(rename = "thmA_m")]
    pub thm_a_m: u64,
    /// `3|H|^{1-δ/ln q}`, only when `H ≅ (Z/qZ)^n` with `q` a prime power.
    #[serde(rename = "thmAprime")]
    pub thm_a_prime: Option<f64>,
    /// `3|H|·J(q)^n` for the largest primary block `(Z/qZ)^n`.
    #[serde(rename = "thmZm")]
    pub thm_zm: Option<f64>,
    pub zm_block: Option<PrimaryBlock>,
}

pub fn theorem_bound(g: &GroupSpec) -> TheoremBounds {
    let c = constants();
    let ln_h = g.ln_order();
    let dec = crt_primary_decomposition(g);
    let blocks = dec.blocks();
    let m = blocks.iter().map(|b| b.q).max().unwrap_or(3);
    let thm_a = (3f64.ln() + ln_h * (1.0 - c.epsilon / m as f64)).exp();
    let thm_a_prime = match blocks {
        [b] => Some((3f64.ln() + ln_h * (1.0 - c.delta / (b.q as f64).ln())).exp()),
        _ => None,
    };
    let zm_block = largest_primary_block(g);
    let thm_zm = zm_block.map(|b| {
        let j = rate_j(b.q as f64).expect("prime powers are at least 2").value;
        (3f64.ln() + ln_h + b.n as f64 * j.ln()).exp()
    });
    TheoremBounds { thm_a, thm_a_m: m, thm_a_prime, thm_zm, zm_block }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> TheoremBounds {
        theorem_bound(&GroupSpec::parse(s).unwrap())
    }

    #[test]
    fn reference_values() {
        let z2 = b("Z2");
        assert!((z2.thm_zm.unwrap() - 5.669644724526929).abs() < 1e-9);
        let z3 = b("Z3");
        assert!((z3.thm_a_prime.unwrap() - 8.504467086790394).abs() < 1e-9);
        assert!((z3.thm_a - 8.907155627581266).abs() < 1e-9);
        assert_eq!(z3.thm_a_m, 3);
    }

    #[test]
    fn applicability() {
        assert!(b("Z6").thm_a_prime.is_none());
        assert!(b("Z2 x Z4").thm_a_prime.is_none());
        assert!(b("Z4^2").thm_a_prime.is_some());
        let t = b("1");
        assert!(t.thm_zm.is_none() && t.thm_a_prime.is_none());
        assert!((t.thm_a - 3.0).abs() < 1e-12);
        assert_eq!(b("Z6").zm_block.unwrap().q, 2);
    }

    #[test]
    fn growth_rate_for_z3_powers() {
        let a = b("Z3^10").thm_zm.unwrap();
        let c = b("Z3^11").thm_zm.unwrap();
        assert!((c / a - 2.755104613023633).abs() < 1e-9);
    }
}
