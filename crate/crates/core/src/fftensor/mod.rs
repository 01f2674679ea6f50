//! Prime fields, Lucas binomials and dense labeled 3-tensors over `F_p`.

pub mod linalg;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{is_prime, GroupElement, GroupError, GroupSpec};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("duplicate label {label} on axis {axis}")]
    DuplicateLabel { axis: char, label: String },
    #[error("unknown label {label} on axis {axis}")]
    UnknownLabel { axis: char, label: String },
    #[error("entry {value} is not reduced mod {p}")]
    EntryOutOfRange { value: u64, p: u64 },
    #[error("tensors live over different fields (F_{0} vs F_{1})")]
    FieldMismatch(u64, u64),
    #[error("tensor would have {entries} entries, above the cap {cap}")]
    TooLarge { entries: u128, cap: u128 },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The field `Z/pZ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    pub p: u64,
}

impl TryFrom<u64> for PrimeField {
    type Error = TensorError;
    fn try_from(p: u64) -> Result<Self, Self::Error> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, TensorError> {
        if p < (1 << 32) && is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(TensorError::NotPrime(p))
        }
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.p
    }

    #[inline]
    pub fn reduce_i64(self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        self.pow(a, self.p - 2)
    }
}

/// `C(m, k) mod p` via base-`p` digits.
pub fn lucas_binom(mut m: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 || m > 0 {
        let (mi, ki) = (m % p, k % p);
        if ki > mi {
            return 0;
        }
        acc = acc * small_binom_mod(mi, ki, p) % p;
        m /= p;
        k /= p;
    }
    acc % p
}

fn small_binom_mod(n: u64, k: u64, p: u64) -> u64 {
    // n < p, so the factorials are units
    let f = PrimeField { p };
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = f.mul(num, n - i);
        den = f.mul(den, i + 1);
    }
    f.mul(num, f.inv(den))
}

/// An axis label. Labels carry group elements through restrictions and
/// products so that sum-free checks can recover element identities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Index(u64),
    Token(String),
    Element(GroupElement),
    Pair { pair: (Box<Label>, Box<Label>) },
}

impl Label {
    pub fn pair(a: Label, b: Label) -> Label {
        Label::Pair { pair: (Box::new(a), Box::new(b)) }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(i) => write!(f, "{i}"),
            Label::Token(s) => write!(f, "{s}"),
            Label::Element(e) => write!(f, "{e}"),
            Label::Pair { pair } => write!(f, "<{},{}>", pair.0, pair.1),
        }
    }
}

impl From<GroupElement> for Label {
    fn from(e: GroupElement) -> Self {
        Label::Element(e)
    }
}

fn index_labels(n: usize) -> Vec<Label> {
    (0..n as u64).map(Label::Index).collect()
}

/// A set of triples whose three projections are injective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matching3<L> {
    pub triples: Vec<(L, L, L)>,
}

impl<L: Clone + Eq + Hash> Matching3<L> {
    pub fn new(triples: Vec<(L, L, L)>) -> Self {
        Matching3 { triples }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// True when no coordinate repeats on any of the three sides.
    pub fn is_matching(&self) -> bool {
        let n = self.triples.len();
        let xs: HashSet<&L> = self.triples.iter().map(|t| &t.0).collect();
        let ys: HashSet<&L> = self.triples.iter().map(|t| &t.1).collect();
        let zs: HashSet<&L> = self.triples.iter().map(|t| &t.2).collect();
        xs.len() == n && ys.len() == n && zs.len() == n
    }

    pub fn xs(&self) -> Vec<L> {
        self.triples.iter().map(|t| t.0.clone()).collect()
    }

    pub fn ys(&self) -> Vec<L> {
        self.triples.iter().map(|t| t.1.clone()).collect()
    }

    pub fn zs(&self) -> Vec<L> {
        self.triples.iter().map(|t| t.2.clone()).collect()
    }
}

/// A dense function `X × Y × Z → F_p` with labeled axes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor3 {
    field: PrimeField,
    x: Vec<Label>,
    y: Vec<Label>,
    z: Vec<Label>,
    entries: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawLabels {
    x: Vec<Label>,
    y: Vec<Label>,
    z: Vec<Label>,
}

#[derive(Serialize, Deserialize)]
struct RawTensor {
    p: u64,
    dims: [usize; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<RawLabels>,
    entries: Vec<u64>,
}

impl Serialize for Tensor3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawTensor {
            p: self.field.p,
            dims: self.dims(),
            labels: Some(RawLabels { x: self.x.clone(), y: self.y.clone(), z: self.z.clone() }),
            entries: self.entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tensor3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawTensor::deserialize(d)?;
        let field = PrimeField::new(raw.p).map_err(serde::de::Error::custom)?;
        let [nx, ny, nz] = raw.dims;
        let labels =
            raw.labels.unwrap_or_else(|| RawLabels { x: index_labels(nx), y: index_labels(ny), z: index_labels(nz) });
        for (axis, l, n) in [('x', &labels.x, nx), ('y', &labels.y, ny), ('z', &labels.z, nz)] {
            if l.len() != n {
                return Err(serde::de::Error::custom(format!("axis {axis} has {} labels but dimension {n}", l.len())));
            }
        }
        Tensor3::from_parts(field, labels.x, labels.y, labels.z, raw.entries).map_err(serde::de::Error::custom)
    }
}

fn check_distinct(axis: char, labels: &[Label]) -> Result<(), TensorError> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l) {
            return Err(TensorError::DuplicateLabel { axis, label: l.to_string() });
        }
    }
    Ok(())
}

impl Tensor3 {
    pub fn from_parts(
        field: PrimeField,
        x: Vec<Label>,
        y: Vec<Label>,
        z: Vec<Label>,
        entries: Vec<u64>,
    ) -> Result<Self, TensorError> {
        check_distinct('x', &x)?;
        check_distinct('y', &y)?;
        check_distinct('z', &z)?;
        let n = x.len() * y.len() * z.len();
        if entries.len() != n {
            return Err(TensorError::ShapeMismatch { expected: vec![n], got: vec![entries.len()] });
        }
        if let Some(&value) = entries.iter().find(|&&v| v >= field.p) {
            return Err(TensorError::EntryOutOfRange { value, p: field.p });
        }
        Ok(Tensor3 { field, x, y, z, entries })
    }

    /// Index-labeled tensor with entries `f(i, j, k)` reduced mod `p`.
    pub fn from_fn(field: PrimeField, dims: [usize; 3], f: impl Fn(usize, usize, usize) -> u64) -> Self {
        let [nx, ny, nz] = dims;
        let mut entries = Vec::with_capacity(nx * ny * nz);
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nz {
                    entries.push(field.reduce(f(i, j, k)));
                }
            }
        }
        Tensor3 { field, x: index_labels(nx), y: index_labels(ny), z: index_labels(nz), entries }
    }

    pub fn zeros(field: PrimeField, dims: [usize; 3]) -> Self {
        Self::from_fn(field, dims, |_, _, _| 0)
    }

    /// The `n × n × n` identity diagonal.
    pub fn diagonal(field: PrimeField, n: usize) -> Self {
        Self::from_fn(field, [n; 3], |i, j, k| u64::from(i == j && j == k))
    }

    /// Same entries, new labels.
    pub fn relabel(&self, x: Vec<Label>, y: Vec<Label>, z: Vec<Label>) -> Result<Self, TensorError> {
        Tensor3::from_parts(self.field, x, y, z, self.entries.clone())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.x.len(), self.y.len(), self.z.len()]
    }

    pub fn labels_x(&self) -> &[Label] {
        &self.x
    }

    pub fn labels_y(&self) -> &[Label] {
        &self.y
    }

    pub fn labels_z(&self) -> &[Label] {
        &self.z
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.y.len() + j) * self.z.len() + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.entries[self.index(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: u64) {
        let idx = self.index(i, j, k);
        self.entries[idx] = self.field.reduce(v);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    /// Nonzero entries as `(i, j, k, value)`.
    pub fn support(&self) -> Vec<(usize, usize, usize, u64)> {
        let [_, ny, nz] = self.dims();
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(idx, &v)| (idx / (ny * nz), (idx / nz) % ny, idx % nz, v))
            .collect()
    }

    pub fn same_shape(&self, other: &Tensor3) -> Result<(), TensorError> {
        if self.field != other.field {
            return Err(TensorError::FieldMismatch(self.field.p, other.field.p));
        }
        if self.dims() != other.dims() {
            return Err(TensorError::ShapeMismatch { expected: self.dims().to_vec(), got: other.dims().to_vec() });
        }
        Ok(())
    }

    /// Entrywise equality of values, ignoring labels.
    pub fn same_values(&self, other: &Tensor3) -> bool {
        self.field == other.field && self.dims() == other.dims() && self.entries == other.entries
    }

    /// Sub-tensor on the given labels, in the order given.
    pub fn restrict(&self, xs: &[Label], ys: &[Label], zs: &[Label]) -> Result<Tensor3, TensorError> {
        let pos = |axis: char, all: &[Label], want: &[Label]| -> Result<Vec<usize>, TensorError> {
            let map: HashMap<&Label, usize> = all.iter().enumerate().map(|(i, l)| (l, i)).collect();
            want.iter()
                .map(|l| map.get(l).copied().ok_or_else(|| TensorError::UnknownLabel { axis, label: l.to_string() }))
                .collect()
        };
        let ix = pos('x', &self.x, xs)?;
        let iy = pos('y', &self.y, ys)?;
        let iz = pos('z', &self.z, zs)?;
        let mut entries = Vec::with_capacity(ix.len() * iy.len() * iz.len());
        for &i in &ix {
            for &j in &iy {
                for &k in &iz {
                    entries.push(self.get(i, j, k));
                }
            }
        }
        Tensor3::from_parts(self.field, xs.to_vec(), ys.to_vec(), zs.to_vec(), entries)
    }

    /// Support as a matching when it is a perfect matching with nonzero
    /// entries on equally sized axes.
    pub fn is_diagonal(&self) -> Option<Matching3<Label>> {
        let [nx, ny, nz] = self.dims();
        if nx != ny || ny != nz {
            return None;
        }
        let support = self.support();
        if support.len() != nx {
            return None;
        }
        let m = Matching3::new(
            support.iter().map(|&(i, j, k, _)| (self.x[i].clone(), self.y[j].clone(), self.z[k].clone())).collect(),
        );
        m.is_matching().then_some(m)
    }
}

/// `D_H(x, y, z) = 1` iff `x + y + z = 0`, labeled by group elements.
pub fn group_tensor(g: &GroupSpec, p: u64, cap: u128) -> Result<Tensor3, TensorError> {
    let field = PrimeField::new(p)?;
    let order = g.order();
    let n: u128 = order.clone().try_into().unwrap_or(u128::MAX);
    let entries_needed = n.checked_pow(3).unwrap_or(u128::MAX);
    if entries_needed > cap {
        return Err(TensorError::TooLarge { entries: entries_needed, cap });
    }
    let table = g.cayley_table(u64::MAX)?;
    let n = table.order;
    let mut entries = vec![0u64; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let k = table.neg(table.add(i, j));
            entries[(i * n + j) * n + k] = 1 % p;
        }
    }
    let labels: Vec<Label> = (0..n).map(|i| Label::Element(g.element_at(i))).collect();
    Ok(Tensor3 { field, x: labels.clone(), y: labels.clone(), z: labels, entries })
}

/// `(F ⊗ G)((x',x''),(y',y''),(z',z'')) = F(x',y',z')·G(x'',y'',z'')`.
/// The pair `(i', i'')` sits at index `i'·n'' + i''`.
pub fn tensor_product(f: &Tensor3, g: &Tensor3) -> Result<Tensor3, TensorError> {
    if f.field != g.field {
        return Err(TensorError::FieldMismatch(f.field.p, g.field.p));
    }
    let fld = f.field;
    let [fx, fy, fz] = f.dims();
    let [gx, gy, gz] = g.dims();
    let (nx, ny, nz) = (fx * gx, fy * gy, fz * gz);
    let mut entries = vec![0u64; nx * ny * nz];
    for (i1, j1, k1, a) in f.support() {
        for (i2, j2, k2, b) in g.support() {
            let (i, j, k) = (i1 * gx + i2, j1 * gy + j2, k1 * gz + k2);
            entries[(i * ny + j) * nz + k] = fld.mul(a, b);
        }
    }
    let pairs = |a: &[Label], b: &[Label]| -> Vec<Label> {
        a.iter().flat_map(|l| b.iter().map(move |m| Label::pair(l.clone(), m.clone()))).collect()
    };
    Ok(Tensor3 { field: fld, x: pairs(&f.x, &g.x), y: pairs(&f.y, &g.y), z: pairs(&f.z, &g.z), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn pascal(n: usize) -> Vec<Vec<BigUint>> {
        let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::from(1u32)]];
        for m in 1..=n {
            let prev = &rows[m - 1];
            let row = (0..=m)
                .map(|k| {
                    let a = if k > 0 { prev[k - 1].clone() } else { BigUint::from(0u32) };
                    let b = prev.get(k).cloned().unwrap_or_default();
                    a + b
                })
                .collect();
            rows.push(row);
        }
        rows
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(lucas_binom(5, 2, 3), 1);
        assert_eq!(lucas_binom(4, 2, 2), 0);
        assert_eq!(lucas_binom(17, 0, 5), 1);
    }

    #[test]
    fn lucas_matches_big_binomials() {
        let table = pascal(200);
        for p in [2u64, 3, 5, 7] {
            for m in 0..=200u64 {
                for k in 0..=200u64 {
                    let want: u64 = match table[m as usize].get(k as usize) {
                        Some(c) => (c % p).try_into().unwrap(),
                        None => 0,
                    };
                    assert_eq!(lucas_binom(m, k, p), want, "C({m},{k}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn lucas_periodic_mod_prime_power() {
        for (p, r) in [(2u64, 3u32), (3, 2), (5, 1), (2, 2)] {
            let q = p.pow(r);
            for k in 0..q {
                for m in 0..=5 * q {
                    assert_eq!(lucas_binom(m, k, p), lucas_binom(m % q, k, p));
                }
            }
        }
    }

    #[test]
    fn field_rejects_composites() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert_eq!(f(7).inv(3), 5);
    }

    #[test]
    fn group_tensor_z2_support() {
        let g = GroupSpec::parse("Z2").unwrap();
        let t = group_tensor(&g, 2, 1 << 20).unwrap();
        let sup: Vec<_> = t.support().iter().map(|&(i, j, k, _)| (i, j, k)).collect();
        assert_eq!(sup, vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]);
    }

    #[test]
    fn group_tensor_z3_entries_and_cap() {
        let g = GroupSpec::parse("Z3").unwrap();
        let t = group_tensor(&g, 3, 1 << 20).unwrap();
        assert_eq!(t.get(1, 1, 1), 1);
        assert_eq!(t.get(1, 1, 0), 0);
        assert_eq!(t.support().len(), 9);
        assert!(matches!(group_tensor(&g, 3, 26), Err(TensorError::TooLarge { .. })));
    }

    #[test]
    fn restrict_examples() {
        let g = GroupSpec::parse("Z3").unwrap();
        let t = group_tensor(&g, 3, 1 << 20).unwrap();
        let full = t.restrict(t.labels_x(), t.labels_y(), t.labels_z()).unwrap();
        assert_eq!(full, t);
        let s: Vec<Label> = vec![Label::Element(GroupElement(vec![0])), Label::Element(GroupElement(vec![1]))];
        let r = t.restrict(&s, &s, &s).unwrap();
        let m = r.is_diagonal().unwrap();
        assert_eq!(m.len(), 2);
        let empty = t.restrict(&[], &s, &s).unwrap();
        assert_eq!(empty.dims(), [0, 2, 2]);
        let bad = [Label::Index(7)];
        assert!(matches!(t.restrict(&bad, &s, &s), Err(TensorError::UnknownLabel { .. })));
    }

    #[test]
    fn product_of_z2_tensors_is_z2_squared() {
        let z2 = GroupSpec::parse("Z2").unwrap();
        let d = group_tensor(&z2, 2, 1 << 20).unwrap();
        let dd = tensor_product(&d, &d).unwrap();
        let big = group_tensor(&GroupSpec::parse("Z2^2").unwrap(), 2, 1 << 20).unwrap();
        // pair (a, b) of Z2 elements is the Z2^2 element (a, b) at index 2a + b
        assert!(dd.same_values(&big));
        let one = Tensor3::from_fn(f(2), [1, 1, 1], |_, _, _| 1);
        assert!(tensor_product(&d, &one).unwrap().same_values(&d));
        let zero = Tensor3::zeros(f(2), [2, 2, 2]);
        assert!(tensor_product(&zero, &d).unwrap().is_zero());
        assert!(matches!(tensor_product(&d, &Tensor3::zeros(f(3), [1, 1, 1])), Err(TensorError::FieldMismatch(2, 3))));
    }

    #[test]
    fn diagonal_detection() {
        assert_eq!(Tensor3::diagonal(f(3), 3).is_diagonal().unwrap().len(), 3);
        let d = group_tensor(&GroupSpec::parse("Z2").unwrap(), 2, 1 << 20).unwrap();
        assert!(d.is_diagonal().is_none());
        let mut t = Tensor3::diagonal(f(3), 3);
        t.set(1, 1, 1, 0);
        assert!(t.is_diagonal().is_none());
    }

    #[test]
    fn json_roundtrip() {
        let g = GroupSpec::parse("Z2").unwrap();
        let t = group_tensor(&g, 2, 1 << 20).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.starts_with(r#"{"p":2,"dims":[2,2,2],"labels":{"x":[[0],[1]]"#));
        let back: Tensor3 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let plain: Tensor3 = serde_json::from_str(r#"{"p":3,"dims":[1,1,2],"entries":[2,0]}"#).unwrap();
        assert_eq!(plain.get(0, 0, 0), 2);
        assert!(serde_json::from_str::<Tensor3>(r#"{"p":3,"dims":[1,1,2],"entries":[3,0]}"#).is_err());
        assert!(serde_json::from_str::<Tensor3>(r#"{"p":4,"dims":[1,1,1],"entries":[0]}"#).is_err());
    }
}
