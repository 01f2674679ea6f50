//! Finite abelian groups presented as products of cyclic groups.
//!
//! A [`GroupSpec`] is kept in canonical form (factors sorted by modulus,
//! equal moduli merged, zero multiplicities dropped), so structural equality
//! is equality of groups-as-presented. Elements are residue vectors with one
//! entry per cyclic coordinate, in the canonical coordinate order.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("syntax error in group spec {text:?}: {reason}")]
    Syntax { text: String, reason: String },
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("element has {got} coordinates but the group has {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("residue {value} at coordinate {coord} is out of range for modulus {modulus}")]
    ResidueOutOfRange { coord: usize, value: u64, modulus: u64 },
    #[error("group of order {order} exceeds the enumeration limit {limit}")]
    TooLarge { order: String, limit: u64 },
}

/// An element of a finite abelian group: one residue per cyclic coordinate.
///
/// The derived ordering is lexicographic on the residue vector, which is the
/// enumeration order used throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u64>);

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Compact text key, e.g. `[1,0,2]`. Used for JSON maps keyed by elements.
    pub fn key(&self) -> String {
        serde_json::to_string(&self.0).expect("residue vectors always serialize")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct RawGroupSpec {
    factors: Vec<(u64, u32)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupSpecInput {
    Text(String),
    Raw(RawGroupSpec),
}

impl TryFrom<GroupSpecInput> for GroupSpec {
    type Error = GroupError;
    fn try_from(input: GroupSpecInput) -> Result<Self, Self::Error> {
        match input {
            GroupSpecInput::Text(t) => GroupSpec::parse(&t),
            GroupSpecInput::Raw(raw) => GroupSpec::new(raw.factors),
        }
    }
}

/// A finite abelian group `∏ (Z/mZ)^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupSpecInput", into = "RawGroupSpec")]
pub struct GroupSpec {
    factors: Vec<(u64, u32)>,
    moduli: Vec<u64>,
}

impl From<GroupSpec> for RawGroupSpec {
    fn from(g: GroupSpec) -> Self {
        RawGroupSpec { factors: g.factors }
    }
}

impl GroupSpec {
    /// Builds the canonical spec from `(modulus, multiplicity)` pairs.
    pub fn new(factors: impl IntoIterator<Item = (u64, u32)>) -> Result<Self, GroupError> {
        let mut merged: BTreeMap<u64, u32> = BTreeMap::new();
        for (m, k) in factors {
            if m < 2 {
                return Err(GroupError::ModulusTooSmall(m));
            }
            if k > 0 {
                *merged.entry(m).or_default() += k;
            }
        }
        let factors: Vec<(u64, u32)> = merged.into_iter().collect();
        let moduli = factors.iter().flat_map(|&(m, k)| std::iter::repeat_n(m, k as usize)).collect();
        Ok(GroupSpec { factors, moduli })
    }

    /// The trivial group (no cyclic coordinates, order 1).
    pub fn trivial() -> Self {
        GroupSpec { factors: Vec::new(), moduli: Vec::new() }
    }

    /// `(Z/mZ)^k`.
    pub fn cyclic_power(m: u64, k: u32) -> Result<Self, GroupError> {
        GroupSpec::new([(m, k)])
    }

    /// Parses `Z<m>[^<k>] ( "x" Z<m>[^<k>] )*`. Whitespace is ignored and
    /// `x`, `X`, `*` and `×` are accepted as the product sign. The literal `1`
    /// denotes the trivial group, as does any factor with exponent 0.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let err = |reason: &str| GroupError::Syntax { text: text.to_string(), reason: reason.to_string() };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        if compact == "1" {
            return Ok(GroupSpec::trivial());
        }
        let normalized = compact.replace(['X', '*', '×'], "x");
        let mut factors = Vec::new();
        for part in normalized.split('x') {
            let body = part.strip_prefix('Z').ok_or_else(|| err("each factor must start with 'Z'"))?;
            let (m_txt, k_txt) = match body.split_once('^') {
                Some((m, k)) => (m, Some(k)),
                None => (body, None),
            };
            if m_txt.is_empty() || !m_txt.chars().all(|c| c.is_ascii_digit()) {
                return Err(err("modulus must be a decimal integer"));
            }
            let m: u64 = m_txt.parse().map_err(|_| err("modulus out of range"))?;
            let k: u32 = match k_txt {
                Some(k) if !k.is_empty() && k.chars().all(|c| c.is_ascii_digit()) => {
                    k.parse().map_err(|_| err("exponent out of range"))?
                }
                Some(_) => return Err(err("exponent must be a decimal integer")),
                None => 1,
            };
            if m < 2 {
                return Err(GroupError::ModulusTooSmall(m));
            }
            factors.push((m, k));
        }
        GroupSpec::new(factors)
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// The modulus of every cyclic coordinate, in coordinate order.
    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Number of cyclic coordinates.
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.moduli.is_empty()
    }

    /// `|H|`, exactly.
    pub fn order(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, &(m, k)| acc * BigUint::from(m).pow(k))
    }

    /// `|H|` when it fits a `usize`.
    pub fn order_usize(&self) -> Option<usize> {
        self.order().to_usize()
    }

    /// `ln |H|`, computed without materializing the order.
    pub fn ln_order(&self) -> f64 {
        self.factors.iter().map(|&(m, k)| k as f64 * (m as f64).ln()).sum()
    }

    /// The exponent of the group: lcm of the factor moduli (1 when trivial).
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &(m, _)| acc.lcm(&m))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Validates a residue vector against this group.
    pub fn element(&self, residues: Vec<u64>) -> Result<GroupElement, GroupError> {
        let e = GroupElement(residues);
        self.check(&e)?;
        Ok(e)
    }

    pub fn check(&self, x: &GroupElement) -> Result<(), GroupError> {
        if x.len() != self.rank() {
            return Err(GroupError::ShapeMismatch { expected: self.rank(), got: x.len() });
        }
        for (coord, (&value, &modulus)) in x.0.iter().zip(&self.moduli).enumerate() {
            if value >= modulus {
                return Err(GroupError::ResidueOutOfRange { coord, value, modulus });
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.check(x).is_ok()
    }

    /// Coordinatewise sum modulo each modulus.
    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add_unchecked(x, y))
    }

    pub(crate) fn add_unchecked(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.moduli)
                .map(|((&a, &b), &m)| ((a as u128 + b as u128) % m as u128) as u64)
                .collect(),
        )
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        GroupElement(x.0.iter().zip(&self.moduli).map(|(&a, &m)| if a == 0 { 0 } else { m - a }).collect())
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement, GroupError> {
        self.add(x, &self.neg(y))
    }

    pub fn is_zero(x: &GroupElement) -> bool {
        x.0.iter().all(|&r| r == 0)
    }

    /// Lexicographic index of `x` (first coordinate most significant).
    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.0.iter().zip(&self.moduli).fold(0usize, |acc, (&r, &m)| acc * m as usize + r as usize)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut res = vec![0u64; self.rank()];
        for (slot, &m) in res.iter_mut().zip(&self.moduli).rev() {
            *slot = (index % m as usize) as u64;
            index /= m as usize;
        }
        GroupElement(res)
    }

    /// All elements in lexicographic order. Fails when `|H| > limit`.
    pub fn elements(&self, limit: u64) -> Result<Vec<GroupElement>, GroupError> {
        let n = self.enumerable_order(limit)?;
        Ok((0..n).map(|i| self.element_at(i)).collect())
    }

    pub(crate) fn enumerable_order(&self, limit: u64) -> Result<usize, GroupError> {
        let order = self.order();
        match order.to_u64() {
            Some(n) if n <= limit => Ok(n as usize),
            _ => Err(GroupError::TooLarge { order: order.to_string(), limit }),
        }
    }

    /// Addition and negation tables over element indices.
    pub fn cayley_table(&self, limit: u64) -> Result<CayleyTable, GroupError> {
        let n = self.enumerable_order(limit)?;
        let elems: Vec<GroupElement> = (0..n).map(|i| self.element_at(i)).collect();
        let mut add = vec![0usize; n * n];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                add[i * n + j] = self.index_of(&self.add_unchecked(x, y));
            }
        }
        let neg = elems.iter().map(|x| self.index_of(&self.neg(x))).collect();
        Ok(CayleyTable { order: n, add, neg })
    }

    /// `H^n`, laid out so that [`power_element`](Self::power_element) keeps
    /// the canonical coordinate order.
    pub fn power(&self, n: u32) -> GroupSpec {
        GroupSpec::new(self.factors.iter().map(|&(m, k)| (m, k * n))).expect("moduli already validated")
    }

    /// Embeds a tuple `(h_1, …, h_n)` of elements of `self` into `self.power(n)`.
    ///
    /// Within each cyclic factor the coordinates of `h_1` come first, then
    /// those of `h_2`, and so on.
    pub fn power_element(&self, parts: &[GroupElement]) -> GroupElement {
        let mut out = Vec::with_capacity(self.rank() * parts.len());
        let mut offset = 0usize;
        for &(_, k) in &self.factors {
            let k = k as usize;
            for p in parts {
                out.extend_from_slice(&p.0[offset..offset + k]);
            }
            offset += k;
        }
        GroupElement(out)
    }

    /// Inverse of [`power_element`](Self::power_element).
    pub fn split_power_element(&self, x: &GroupElement, n: usize) -> Vec<GroupElement> {
        let mut parts = vec![Vec::with_capacity(self.rank()); n];
        let mut offset = 0usize;
        for &(_, k) in &self.factors {
            let k = k as usize;
            for part in parts.iter_mut() {
                part.extend_from_slice(&x.0[offset..offset + k]);
                offset += k;
            }
        }
        parts.into_iter().map(GroupElement).collect()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        for (i, &(m, k)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            if k == 1 {
                write!(f, "Z{m}")?;
            } else {
                write!(f, "Z{m}^{k}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupSpec::parse(s)
    }
}

/// Index-based addition table of a small group.
#[derive(Clone, Debug)]
pub struct CayleyTable {
    pub order: usize,
    add: Vec<usize>,
    neg: Vec<usize>,
}

impl CayleyTable {
    #[inline]
    pub fn add(&self, i: usize, j: usize) -> usize {
        self.add[i * self.order + j]
    }

    #[inline]
    pub fn neg(&self, i: usize) -> usize {
        self.neg[i]
    }
}

/// Prime-power block `(Z/qZ)^n` with `q = p^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryBlock {
    pub q: u64,
    pub p: u64,
    pub n: u32,
}

/// The primary (prime-power) decomposition of a group together with an
/// explicit coordinate isomorphism.
#[derive(Clone, Debug)]
pub struct PrimaryDecomposition {
    source: GroupSpec,
    target: GroupSpec,
    blocks: Vec<PrimaryBlock>,
    // per source coordinate: (target coordinate, q) for each prime-power part
    coord_map: Vec<Vec<(usize, u64)>>,
}

impl PrimaryDecomposition {
    /// Blocks ordered by prime, then by prime power.
    pub fn blocks(&self) -> &[PrimaryBlock] {
        &self.blocks
    }

    /// The group the decomposition maps into.
    pub fn primary_group(&self) -> &GroupSpec {
        &self.target
    }

    pub fn source_group(&self) -> &GroupSpec {
        &self.source
    }

    /// `N = Σ n_i`.
    pub fn total_rank(&self) -> u32 {
        self.blocks.iter().map(|b| b.n).sum()
    }

    /// Number of distinct prime powers occurring.
    pub fn distinct_prime_powers(&self) -> usize {
        self.blocks.len()
    }

    pub fn to_primary(&self, x: &GroupElement) -> Result<GroupElement, GroupError> {
        self.source.check(x)?;
        let mut out = vec![0u64; self.target.rank()];
        for (&r, parts) in x.0.iter().zip(&self.coord_map) {
            for &(t, q) in parts {
                out[t] = r % q;
            }
        }
        Ok(GroupElement(out))
    }

    pub fn from_primary(&self, y: &GroupElement) -> Result<GroupElement, GroupError> {
        self.target.check(y)?;
        let out = self
            .coord_map
            .iter()
            .zip(self.source.moduli())
            .map(|(parts, &m)| {
                let residues: Vec<(u64, u64)> = parts.iter().map(|&(t, q)| (y.0[t], q)).collect();
                crt_combine(&residues, m)
            })
            .collect();
        Ok(GroupElement(out))
    }
}

fn crt_combine(residues: &[(u64, u64)], modulus: u64) -> u64 {
    let m = modulus as i128;
    let mut acc: i128 = 0;
    for &(r, q) in residues {
        let q = q as i128;
        let rest = m / q;
        let inv = mod_inverse_i128(rest % q, q);
        acc = (acc + (r as i128) * rest % m * inv) % m;
    }
    acc.rem_euclid(m) as u64
}

fn mod_inverse_i128(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let g = a.extended_gcd(&m);
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(m)
}

/// Prime factorization by trial division, as `(p, e)` pairs in increasing `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// `Some((p, e))` when `q = p^e` with `e ≥ 1`.
pub fn prime_power_base(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

/// All prime powers `q ≤ m`, increasing.
pub fn prime_powers_up_to(m: u64) -> Vec<u64> {
    (2..=m).filter(|&q| prime_power_base(q).is_some()).collect()
}

/// Splits every cyclic factor into its prime-power parts.
pub fn crt_primary_decomposition(g: &GroupSpec) -> PrimaryDecomposition {
    // (q, source coordinate) for every prime-power part
    let mut parts: Vec<(u64, u64, usize)> = Vec::new();
    for (coord, &m) in g.moduli().iter().enumerate() {
        for (p, e) in factorize(m) {
            parts.push((p.pow(e), p, coord));
        }
    }
    let mut target_order: Vec<usize> = (0..parts.len()).collect();
    target_order.sort_by_key(|&i| (parts[i].0, parts[i].2));
    let mut coord_map = vec![Vec::new(); g.rank()];
    for (t, &i) in target_order.iter().enumerate() {
        let (q, _, src) = parts[i];
        coord_map[src].push((t, q));
    }
    let mut counts: BTreeMap<(u64, u64), u32> = BTreeMap::new();
    for &(q, p, _) in &parts {
        *counts.entry((p, q)).or_default() += 1;
    }
    let blocks = counts.into_iter().map(|((p, q), n)| PrimaryBlock { q, p, n }).collect();
    let target = GroupSpec::new(parts.iter().map(|&(q, _, _)| (q, 1))).expect("prime powers are at least 2");
    PrimaryDecomposition { source: g.clone(), target, blocks, coord_map }
}

/// The primary block with the most coordinates; ties go to the smaller `q`.
/// `None` for the trivial group.
pub fn largest_primary_block(g: &GroupSpec) -> Option<PrimaryBlock> {
    crt_primary_decomposition(g).blocks.into_iter().min_by_key(|b| (std::cmp::Reverse(b.n), b.q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        let h = g("Z3^4");
        assert_eq!(h.factors(), &[(3, 4)]);
        assert_eq!(h.order(), BigUint::from(81u32));
        let h = g("Z2 x Z4 x Z3");
        assert_eq!(h.factors(), &[(2, 1), (3, 1), (4, 1)]);
        assert_eq!(h.order(), BigUint::from(24u32));
        assert_eq!(GroupSpec::parse("Z1"), Err(GroupError::ModulusTooSmall(1)));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "Z", "Y3", "Z3^", "Z3^a", "Z3 x", "Z-2", "Z3^2^2"] {
            assert!(matches!(GroupSpec::parse(bad), Err(GroupError::Syntax { .. })), "{bad}");
        }
        assert_eq!(GroupSpec::parse("Z0"), Err(GroupError::ModulusTooSmall(0)));
    }

    #[test]
    fn canonical_form_merges_and_sorts() {
        assert_eq!(g("Z3 x Z2 x Z3"), g("Z2 x Z3^2"));
        assert_eq!(g("Z2^0"), GroupSpec::trivial());
        assert_eq!(g("1"), GroupSpec::trivial());
        assert_eq!(g("Z5 x Z2^0").factors(), &[(5, 1)]);
        assert_eq!(g("Z4 x Z2^3").to_string(), "Z2^3 x Z4");
    }

    #[test]
    fn element_add_examples() {
        let h = g("Z3^2");
        let x = h.element(vec![1, 2]).unwrap();
        let y = h.element(vec![2, 2]).unwrap();
        assert_eq!(h.add(&x, &y).unwrap().0, vec![0, 1]);
        let h = g("Z4");
        assert_eq!(h.add(&GroupElement(vec![3]), &GroupElement(vec![1])).unwrap().0, vec![0]);
        assert!(matches!(
            h.add(&GroupElement(vec![3, 0]), &GroupElement(vec![1])),
            Err(GroupError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            h.add(&GroupElement(vec![4]), &GroupElement(vec![1])),
            Err(GroupError::ResidueOutOfRange { .. })
        ));
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(g("Z2 x Z4").exponent(), 4);
        assert_eq!(g("Z3^5").exponent(), 3);
        assert_eq!(g("Z6 x Z10").exponent(), 30);
        assert_eq!(GroupSpec::trivial().exponent(), 1);
    }

    #[test]
    fn crt_examples() {
        let blocks = |s: &str| -> Vec<(u64, u32)> {
            crt_primary_decomposition(&g(s)).blocks().iter().map(|b| (b.q, b.n)).collect()
        };
        assert_eq!(blocks("Z6"), vec![(2, 1), (3, 1)]);
        assert_eq!(blocks("Z12^2"), vec![(4, 2), (3, 2)]);
        assert_eq!(blocks("Z8"), vec![(8, 1)]);
        assert!(blocks("1").is_empty());
    }

    #[test]
    fn largest_block_examples() {
        let lb = |s: &str| largest_primary_block(&g(s)).map(|b| (b.q, b.n));
        assert_eq!(lb("Z2^3 x Z9"), Some((2, 3)));
        assert_eq!(lb("Z4 x Z3"), Some((3, 1)));
        assert_eq!(lb("Z12^2"), Some((3, 2)));
        assert_eq!(lb("1"), None);
    }

    #[test]
    fn crt_transport_roundtrip_exhaustive() {
        for s in ["Z6", "Z12 x Z10", "Z2 x Z30", "Z9 x Z6"] {
            let h = g(s);
            let d = crt_primary_decomposition(&h);
            assert_eq!(d.primary_group().order(), h.order());
            for x in h.elements(10_000).unwrap() {
                let y = d.to_primary(&x).unwrap();
                assert_eq!(d.from_primary(&y).unwrap(), x);
            }
        }
    }

    #[test]
    fn index_roundtrip_and_lex_order() {
        let h = g("Z2 x Z3 x Z4");
        let elems = h.elements(100).unwrap();
        assert_eq!(elems.len(), 24);
        assert!(elems.windows(2).all(|w| w[0] < w[1]));
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(h.index_of(e), i);
        }
        assert!(matches!(h.elements(10), Err(GroupError::TooLarge { .. })));
    }

    #[test]
    fn power_layout_roundtrip() {
        let h = g("Z2 x Z3^2");
        let hp = h.power(3);
        assert_eq!(hp.factors(), &[(2, 3), (3, 6)]);
        let parts = vec![
            h.element(vec![1, 0, 2]).unwrap(),
            h.element(vec![0, 1, 1]).unwrap(),
            h.element(vec![1, 2, 0]).unwrap(),
        ];
        let x = h.power_element(&parts);
        assert!(hp.contains(&x));
        assert_eq!(h.split_power_element(&x, 3), parts);
    }

    #[test]
    fn prime_power_count_below_two_m_over_log_m() {
        for m in 2..242u64 {
            let r = prime_powers_up_to(m).len() as f64;
            assert!(r < 2.0 * m as f64 / (m as f64).ln(), "m = {m}");
        }
    }

    #[test]
    fn serde_roundtrip_canonicalizes() {
        let h: GroupSpec = serde_json::from_str(r#"{"factors":[[4,1],[2,2],[2,1]]}"#).unwrap();
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"{"factors":[[2,3],[4,1]]}"#);
        assert!(serde_json::from_str::<GroupSpec>(r#"{"factors":[[1,2]]}"#).is_err());
        let h: GroupSpec = serde_json::from_str(r#""Z2 x Z4""#).unwrap();
        assert_eq!(h, g("Z4 x Z2"));
    }
}
