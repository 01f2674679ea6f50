//! Weighted-basis instability certificates.
//!
//! A certificate fixes bases `f_a`, `g_b`, `h_c` of the three function
//! spaces and integer weights `u`, `v`, `w`. It is valid for `F` when every
//! nonzero coefficient of `F` in the product basis has
//! `u_a + v_b + w_c ≤ R`, where
//!
//! ```text
//! R = (u_avg + v_avg + w_avg) − ε·((u_max − u_min) + (v_max − v_min) + (w_max − w_min)).
//! ```

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::decomposition::SliceDecomposition;
use super::SliceRankError;
use crate::exec::Exec;
use crate::fftensor::linalg::{self, Matrix};
use crate::fftensor::{PrimeField, Tensor3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstabilityCertificate {
    pub p: u64,
    /// Basis functions on `X`, one per row.
    pub f: Matrix,
    pub g: Matrix,
    pub h: Matrix,
    pub u: Vec<i64>,
    pub v: Vec<i64>,
    pub w: Vec<i64>,
    #[serde(with = "crate::serde_rational")]
    pub epsilon: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum InstabilityVerdict {
    Valid,
    TrivialWeights,
    NegativeEpsilon,
    Violation { a: usize, b: usize, c: usize, weight: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstabilityReport {
    #[serde(flatten)]
    pub verdict: InstabilityVerdict,
    #[serde(with = "crate::serde_rational")]
    pub cutoff: BigRational,
    /// Largest `u_a + v_b + w_c` over nonzero coefficients, if any.
    pub max_support_weight: Option<i64>,
}

impl InstabilityReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == InstabilityVerdict::Valid
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn avg(u: &[i64]) -> BigRational {
    ratio(u.iter().sum(), u.len() as i64)
}

fn spread(u: &[i64]) -> i64 {
    u.iter().max().unwrap_or(&0) - u.iter().min().unwrap_or(&0)
}

fn dual(f: PrimeField, b: &[Vec<u64>], n: usize, axis: char) -> Result<Matrix, SliceRankError> {
    if b.len() != n || b.iter().any(|r| r.len() != n) {
        return Err(SliceRankError::Malformed(format!("basis on axis {axis} must be {n}x{n}")));
    }
    linalg::inverse(f, &linalg::transpose(b, n)).ok_or(SliceRankError::SingularBasis(axis))
}

/// Coefficients `r_{abc} = Σ F(x,y,z) f'_a(x) g'_b(y) h'_c(z)` for dual
/// functions `f'`, `g'`, `h'`, flattened row-major.
fn coefficients(t: &Tensor3, fd: &[Vec<u64>], gd: &[Vec<u64>], hd: &[Vec<u64>]) -> Vec<u64> {
    let fld = t.field();
    let [nx, ny, nz] = t.dims();
    // contract one axis at a time
    let mut s1 = vec![0u64; nx * ny * nz];
    for (i, x, y, z, v) in t.support().into_iter().flat_map(|(x, y, z, v)| (0..nx).map(move |i| (i, x, y, z, v))) {
        let idx = (i * ny + y) * nz + z;
        s1[idx] = fld.add(s1[idx], fld.mul(fd[i][x], v));
    }
    let mut s2 = vec![0u64; nx * ny * nz];
    for i in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let v = s1[(i * ny + y) * nz + z];
                if v == 0 {
                    continue;
                }
                for j in 0..ny {
                    let idx = (i * ny + j) * nz + z;
                    s2[idx] = fld.add(s2[idx], fld.mul(gd[j][y], v));
                }
            }
        }
    }
    let mut r = vec![0u64; nx * ny * nz];
    for i in 0..nx {
        for j in 0..ny {
            for z in 0..nz {
                let v = s2[(i * ny + j) * nz + z];
                if v == 0 {
                    continue;
                }
                for k in 0..nz {
                    let idx = (i * ny + j) * nz + k;
                    r[idx] = fld.add(r[idx], fld.mul(hd[k][z], v));
                }
            }
        }
    }
    r
}

/// Checks a certificate exactly. Errors on malformed or singular bases.
pub fn verify_instability_certificate(
    t: &Tensor3,
    c: &InstabilityCertificate,
) -> Result<InstabilityReport, SliceRankError> {
    let fld = PrimeField::new(c.p)?;
    if fld != t.field() {
        return Err(SliceRankError::Malformed(format!("certificate over F_{} for a tensor over F_{}", c.p, t.p())));
    }
    let [nx, ny, nz] = t.dims();
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(SliceRankError::Malformed("instability needs nonempty axes".into()));
    }
    if c.u.len() != nx || c.v.len() != ny || c.w.len() != nz {
        return Err(SliceRankError::Malformed("weight vectors do not match the tensor shape".into()));
    }
    let fd = dual(fld, &c.f, nx, 'x')?;
    let gd = dual(fld, &c.g, ny, 'y')?;
    let hd = dual(fld, &c.h, nz, 'z')?;
    let cutoff = avg(&c.u) + avg(&c.v) + avg(&c.w)
        - &c.epsilon * BigRational::from_integer((spread(&c.u) + spread(&c.v) + spread(&c.w)).into());
    let r = coefficients(t, &fd, &gd, &hd);
    let mut max_w: Option<i64> = None;
    let mut violation = None;
    for (idx, &rv) in r.iter().enumerate() {
        if rv == 0 {
            continue;
        }
        let (a, b, cc) = (idx / (ny * nz), (idx / nz) % ny, idx % nz);
        let weight = c.u[a] + c.v[b] + c.w[cc];
        max_w = Some(max_w.map_or(weight, |m| m.max(weight)));
        if violation.is_none() && BigRational::from_integer(weight.into()) > cutoff {
            violation = Some(InstabilityVerdict::Violation { a, b, c: cc, weight });
        }
    }
    let verdict = if spread(&c.u) == 0 && spread(&c.v) == 0 && spread(&c.w) == 0 {
        InstabilityVerdict::TrivialWeights
    } else if c.epsilon.is_negative() {
        InstabilityVerdict::NegativeEpsilon
    } else {
        violation.unwrap_or(InstabilityVerdict::Valid)
    };
    Ok(InstabilityReport { verdict, cutoff, max_support_weight: max_w })
}

/// Linearly independent subset of `rows`, greedily in order.
fn independent(f: PrimeField, rows: &[Vec<u64>], n: usize) -> Matrix {
    let mut out: Matrix = Vec::new();
    for r in rows {
        out.push(r.clone());
        if linalg::rank(f, &out, n) < out.len() {
            out.pop();
        }
    }
    out
}

/// The certificate read off a slice decomposition of size below the
/// smallest axis: weight −1 on the span of the univariate factors of each
/// axis (completed to a basis), 0 elsewhere.
pub fn instability_from_slice(
    d: &SliceDecomposition,
    dims: [usize; 3],
) -> Result<InstabilityCertificate, SliceRankError> {
    if d.dims != dims {
        return Err(SliceRankError::Malformed(format!("decomposition dims {:?} differ from {:?}", d.dims, dims)));
    }
    let fld = PrimeField::new(d.p)?;
    let min = *dims.iter().min().expect("three axes");
    if d.size() >= min {
        return Err(SliceRankError::NotBelowMinDims { size: d.size(), min });
    }
    let singles = |terms: &[super::decomposition::SliceTerm]| -> Vec<Vec<u64>> {
        terms.iter().map(|t| t.single.clone()).collect()
    };
    let axes = [singles(&d.yz), singles(&d.xz), singles(&d.xy)];
    let mut spans: Vec<Matrix> = axes.iter().zip(dims).map(|(s, n)| independent(fld, s, n)).collect();
    if spans.iter().all(Vec::is_empty) {
        // zero tensor: any nontrivial weighting works
        let axis = dims
            .iter()
            .position(|&n| n >= 2)
            .ok_or_else(|| SliceRankError::InvalidInput("every axis has size 1, no nontrivial weights exist".into()))?;
        let mut e0 = vec![0u64; dims[axis]];
        e0[0] = 1;
        spans[axis] = vec![e0];
    }
    let mut bases = Vec::with_capacity(3);
    let mut weights = Vec::with_capacity(3);
    let mut avg_sum = BigRational::zero();
    let mut spread_sum = 0i64;
    for (span, n) in spans.iter().zip(dims) {
        let k = span.len();
        bases.push(linalg::complete_basis(fld, span, n));
        let u: Vec<i64> = (0..n).map(|i| if i < k { -1 } else { 0 }).collect();
        avg_sum += avg(&u);
        spread_sum += spread(&u);
        weights.push(u);
    }
    // every coefficient has weight ≤ −1, so R = −1 is reachable
    let epsilon = (avg_sum + BigRational::from_integer(1.into())) / BigRational::from_integer(spread_sum.into());
    let mut it_b = bases.into_iter();
    let mut it_w = weights.into_iter();
    Ok(InstabilityCertificate {
        p: d.p,
        f: it_b.next().unwrap(),
        g: it_b.next().unwrap(),
        h: it_b.next().unwrap(),
        u: it_w.next().unwrap(),
        v: it_w.next().unwrap(),
        w: it_w.next().unwrap(),
        epsilon,
    })
}

/// One basis per complete flag of `F_p^n`. Row `i` and all later rows span
/// the `i`-th flag subspace from the top.
pub fn flag_bases(f: PrimeField, n: usize) -> Vec<Matrix> {
    fn rec(f: PrimeField, n: usize, tail: &mut Vec<Vec<u64>>, out: &mut Vec<Matrix>) {
        if tail.len() == n {
            out.push(tail.iter().rev().cloned().collect());
            return;
        }
        let (_, pivots) = linalg::rref(f, tail, n);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let total = (f.p as usize).pow(free.len() as u32);
        for code in 1..total {
            let mut w = vec![0u64; n];
            let mut c = code;
            for &col in &free {
                w[col] = (c % f.p as usize) as u64;
                c /= f.p as usize;
            }
            if w.iter().find(|&&x| x != 0) != Some(&1) {
                continue;
            }
            tail.push(w);
            rec(f, n, tail, out);
            tail.pop();
        }
    }
    let mut out = Vec::new();
    rec(f, n, &mut Vec::new(), &mut out);
    out
}

/// Nonincreasing integer vectors of length `n` in `[0, max]` ending in 0.
fn weight_vectors(n: usize, max: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, hi: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() + 1 == n {
            cur.push(0);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in (0..=hi).rev() {
            cur.push(v);
            rec(n, v, cur, out);
            cur.pop();
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    rec(n, max, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_weight: i64,
    pub max_dim: usize,
    pub max_flag_triples: u128,
    pub exec: Exec,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_weight: 3, max_dim: 4, max_flag_triples: 2_000_000, exec: Exec::default() }
    }
}

/// Searches weighted bases with weights in `[0, max_weight]` for a
/// certificate with `ε > 0`. Returns the best one found, or `None`.
///
/// Validity depends on a basis only through the flag of its weight
/// filtration, so one basis per complete flag and sorted weights cover
/// every certificate in range.
pub fn search_instability_certificate(
    t: &Tensor3,
    limits: &SearchLimits,
) -> Result<Option<InstabilityCertificate>, SliceRankError> {
    let fld = t.field();
    let dims = t.dims();
    let [nx, ny, nz] = dims;
    if dims.iter().any(|&d| d == 0 || d > limits.max_dim) {
        return Err(SliceRankError::GuardExceeded(format!(
            "instability search needs axes in 1..={}, got {dims:?}",
            limits.max_dim
        )));
    }
    if t.is_zero() {
        return instability_from_slice(&SliceDecomposition::empty(t.p(), dims), dims).map(Some);
    }
    let flags: Vec<Vec<Matrix>> = dims.iter().map(|&n| flag_bases(fld, n)).collect();
    let triples = flags.iter().map(|f| f.len() as u128).product::<u128>();
    if triples > limits.max_flag_triples {
        return Err(SliceRankError::GuardExceeded(format!(
            "{triples} flag triples exceed the limit {}",
            limits.max_flag_triples
        )));
    }
    let duals: Vec<Vec<Matrix>> = flags
        .iter()
        .zip(dims)
        .map(|(fs, n)| fs.iter().map(|b| dual(fld, b, n, '?').expect("flag bases are invertible")).collect())
        .collect();

    // distinct support patterns, each with its first flag triple
    let per_x = limits.exec.map_range(0..flags[0].len(), |ix| {
        let mut seen: HashMap<u64, (usize, usize, usize)> = HashMap::new();
        for iy in 0..flags[1].len() {
            for iz in 0..flags[2].len() {
                let r = coefficients(t, &duals[0][ix], &duals[1][iy], &duals[2][iz]);
                let mask = r.iter().enumerate().fold(0u64, |m, (i, &v)| if v != 0 { m | (1 << i) } else { m });
                seen.entry(mask).or_insert((ix, iy, iz));
            }
        }
        seen
    });
    let mut patterns: HashMap<u64, (usize, usize, usize)> = HashMap::new();
    for m in per_x {
        for (mask, rep) in m {
            patterns.entry(mask).and_modify(|r| *r = (*r).min(rep)).or_insert(rep);
        }
    }
    let mut patterns: Vec<(u64, (usize, usize, usize))> = patterns.into_iter().collect();
    patterns.sort_by_key(|&(_, rep)| rep);

    let wx = weight_vectors(nx, limits.max_weight);
    let wy = weight_vectors(ny, limits.max_weight);
    let wz = weight_vectors(nz, limits.max_weight);
    let scale = (nx * ny * nz) as i64;
    // ε = num / den with num = scale·(avg_sum − max_support), den = scale·spread_sum
    let best = limits.exec.map_slice(&patterns, |&(mask, rep)| {
        let mut best: Option<(i64, i64, usize, usize, usize)> = None;
        for (a, u) in wx.iter().enumerate() {
            for (b, v) in wy.iter().enumerate() {
                for (c, w) in wz.iter().enumerate() {
                    let spread_sum = spread(u) + spread(v) + spread(w);
                    if spread_sum == 0 {
                        continue;
                    }
                    let avg_scaled = u.iter().sum::<i64>() * (ny * nz) as i64
                        + v.iter().sum::<i64>() * (nx * nz) as i64
                        + w.iter().sum::<i64>() * (nx * ny) as i64;
                    let max_support = (0..nx * ny * nz)
                        .filter(|&i| mask >> i & 1 == 1)
                        .map(|i| u[i / (ny * nz)] + v[(i / nz) % ny] + w[i % nz])
                        .max()
                        .expect("nonzero tensor has nonzero coefficients");
                    let num = avg_scaled - max_support * scale;
                    let den = spread_sum * scale;
                    if num <= 0 {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bn, bd, ..)) => (num as i128) * (bd as i128) > (bn as i128) * (den as i128),
                    };
                    if better {
                        best = Some((num, den, a, b, c));
                    }
                }
            }
        }
        best.map(|b| (b, rep))
    });
    let winner =
        best.into_iter().flatten().fold(None, |acc: Option<((i64, i64, usize, usize, usize), _)>, cand| match acc {
            Some(ref cur) if (cand.0 .0 as i128) * (cur.0 .1 as i128) <= (cur.0 .0 as i128) * (cand.0 .1 as i128) => {
                acc
            }
            _ => Some(cand),
        });
    let Some(((num, den, a, b, c), (ix, iy, iz))) = winner else {
        return Ok(None);
    };
    let cert = InstabilityCertificate {
        p: t.p(),
        f: flags[0][ix].clone(),
        g: flags[1][iy].clone(),
        h: flags[2][iz].clone(),
        u: wx[a].clone(),
        v: wy[b].clone(),
        w: wz[c].clone(),
        epsilon: ratio(num, den),
    };
    debug_assert!(verify_instability_certificate(t, &cert).map(|r| r.is_valid()).unwrap_or(false));
    Ok(Some(cert))
}
