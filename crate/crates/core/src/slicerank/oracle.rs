//! Exact slice rank of small tensors.
//!
//! `slicerank(F) ≤ a + b + c` iff `F` vanishes on `V_X × V_Y × V_Z` for
//! subspaces of codimensions `a`, `b`, `c`. For fixed `V_X`, `V_Y` the best
//! `V_Z` is the annihilator of the contractions `F(u, v, ·)`, so the search
//! only ranges over pairs of subspaces.

use super::decomposition::{SliceDecomposition, SliceTerm};
use super::SliceRankError;
use crate::exec::Exec;
use crate::fftensor::linalg::{self, Matrix};
use crate::fftensor::{PrimeField, Tensor3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_dim: usize,
    pub max_p: u64,
    pub exec: Exec,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_dim: 4, max_p: 3, exec: Exec::default() }
    }
}

/// The optimum together with a decomposition of exactly that size.
#[derive(Clone, Debug)]
pub struct SliceRankWitness {
    pub rank: usize,
    pub vx: Matrix,
    pub vy: Matrix,
    pub decomposition: SliceDecomposition,
}

fn check_guard(t: &Tensor3, limits: &OracleLimits) -> Result<(), SliceRankError> {
    let dims = t.dims();
    if dims.iter().any(|&d| d > limits.max_dim) || t.p() > limits.max_p {
        return Err(SliceRankError::GuardExceeded(format!(
            "exact slice rank needs dims <= {} and p <= {}, got {:?} over F_{}",
            limits.max_dim,
            limits.max_p,
            dims,
            t.p()
        )));
    }
    Ok(())
}

fn all_subspaces(f: PrimeField, n: usize) -> Vec<Matrix> {
    (0..=n).flat_map(|d| linalg::subspaces(f, n, d)).collect()
}

/// `F(u, ·, ·)` as a `|Y| × |Z|` table.
fn contract_x(t: &Tensor3, u: &[u64]) -> Matrix {
    let f = t.field();
    let [nx, ny, nz] = t.dims();
    let mut m = vec![vec![0u64; nz]; ny];
    for (i, &ui) in u.iter().enumerate().take(nx) {
        if ui == 0 {
            continue;
        }
        for (j, row) in m.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = f.add(*v, f.mul(ui, t.get(i, j, k)));
            }
        }
    }
    m
}

/// Span of `F(u, v, ·)` over basis vectors `u ∈ vx`, `v ∈ vy`.
fn contractions(t: &Tensor3, vx: &[Vec<u64>], vy: &[Vec<u64>]) -> Matrix {
    let f = t.field();
    let nz = t.dims()[2];
    let mut rows = Vec::with_capacity(vx.len() * vy.len());
    for u in vx {
        let m = contract_x(t, u);
        for v in vy {
            let mut w = vec![0u64; nz];
            for (j, &vj) in v.iter().enumerate() {
                if vj == 0 {
                    continue;
                }
                for (k, wk) in w.iter_mut().enumerate() {
                    *wk = f.add(*wk, f.mul(vj, m[j][k]));
                }
            }
            rows.push(w);
        }
    }
    rows
}

fn search(t: &Tensor3, limits: &OracleLimits) -> Result<(usize, Matrix, Matrix), SliceRankError> {
    check_guard(t, limits)?;
    let f = t.field();
    let [nx, ny, nz] = t.dims();
    let xs = all_subspaces(f, nx);
    let ys = all_subspaces(f, ny);
    let best = limits.exec.map_range(0..xs.len(), |ix| {
        let vx = &xs[ix];
        let mut best: Option<(usize, usize)> = None;
        for (iy, vy) in ys.iter().enumerate() {
            let base = (nx - vx.len()) + (ny - vy.len());
            if best.is_some_and(|(b, _)| base >= b) {
                continue;
            }
            let c = linalg::rank(f, &contractions(t, vx, vy), nz);
            let total = base + c;
            if best.is_none_or(|(b, _)| total < b) {
                best = Some((total, iy));
            }
        }
        best.map(|(v, iy)| (v, ix, iy))
    });
    let (rank, ix, iy) = best.into_iter().flatten().min().expect("the zero subspaces are always candidates");
    Ok((rank, xs[ix].clone(), ys[iy].clone()))
}

/// Minimum number of slices summing to `t`.
pub fn exact_slice_rank(t: &Tensor3, limits: &OracleLimits) -> Result<usize, SliceRankError> {
    search(t, limits).map(|(r, _, _)| r)
}

/// The slice rank and a decomposition achieving it.
pub fn slice_rank_witness(t: &Tensor3, limits: &OracleLimits) -> Result<SliceRankWitness, SliceRankError> {
    let (rank, vx, vy) = search(t, limits)?;
    let decomposition = decomposition_from_subspaces(t, &vx, &vy);
    debug_assert_eq!(decomposition.size(), rank);
    Ok(SliceRankWitness { rank, vx, vy, decomposition })
}

/// Complement first, then the subspace basis.
fn adapted_basis(f: PrimeField, v: &[Vec<u64>], n: usize) -> (Matrix, usize) {
    let full = linalg::complete_basis(f, v, n);
    let codim = n - v.len();
    let mut out: Matrix = full[v.len()..].to_vec();
    out.extend_from_slice(v);
    (out, codim)
}

/// Functions `g_i` with `Σ_x g_i(x) b_{i'}(x) = δ_{ii'}`.
fn dual(f: PrimeField, b: &[Vec<u64>], n: usize) -> Matrix {
    if n == 0 {
        return Vec::new();
    }
    linalg::inverse(f, &linalg::transpose(b, n)).expect("adapted bases are invertible")
}

/// A decomposition of size `codim V_X + codim V_Y + codim V_Z` where `V_Z`
/// annihilates every `F(u, v, ·)`.
pub fn decomposition_from_subspaces(t: &Tensor3, vx: &[Vec<u64>], vy: &[Vec<u64>]) -> SliceDecomposition {
    let f = t.field();
    let [nx, ny, nz] = t.dims();
    let w = contractions(t, vx, vy);
    let vz = linalg::nullspace(f, &w, nz);
    let (bx, a) = adapted_basis(f, vx, nx);
    let (by, b) = adapted_basis(f, vy, ny);
    let (bz, c) = adapted_basis(f, &vz, nz);
    let (gx, gy, gz) = (dual(f, &bx, nx), dual(f, &by, ny), dual(f, &bz, nz));

    // r[i][j][k] = F(bx_i, by_j, bz_k)
    let mut r = vec![0u64; nx * ny * nz];
    for i in 0..nx {
        let m = contract_x(t, &bx[i]);
        for j in 0..ny {
            for k in 0..nz {
                let mut acc = 0;
                for y in 0..ny {
                    if by[j][y] == 0 {
                        continue;
                    }
                    for z in 0..nz {
                        acc = f.add(acc, f.mul(f.mul(by[j][y], bz[k][z]), m[y][z]));
                    }
                }
                r[(i * ny + j) * nz + k] = acc;
            }
        }
    }
    let coeff = |i: usize, j: usize, k: usize| r[(i * ny + j) * nz + k];

    let mut d = SliceDecomposition::empty(t.p(), [nx, ny, nz]);
    for i in 0..a {
        let mut pair = vec![0u64; ny * nz];
        for j in 0..ny {
            for k in 0..nz {
                let rc = coeff(i, j, k);
                if rc == 0 {
                    continue;
                }
                for y in 0..ny {
                    for z in 0..nz {
                        let idx = y * nz + z;
                        pair[idx] = f.add(pair[idx], f.mul(rc, f.mul(gy[j][y], gz[k][z])));
                    }
                }
            }
        }
        d.yz.push(SliceTerm { pair, single: gx[i].clone() });
    }
    for j in 0..b {
        let mut pair = vec![0u64; nx * nz];
        for i in a..nx {
            for k in 0..nz {
                let rc = coeff(i, j, k);
                if rc == 0 {
                    continue;
                }
                for x in 0..nx {
                    for z in 0..nz {
                        let idx = x * nz + z;
                        pair[idx] = f.add(pair[idx], f.mul(rc, f.mul(gx[i][x], gz[k][z])));
                    }
                }
            }
        }
        d.xz.push(SliceTerm { pair, single: gy[j].clone() });
    }
    for k in 0..c {
        let mut pair = vec![0u64; nx * ny];
        for i in a..nx {
            for j in b..ny {
                let rc = coeff(i, j, k);
                if rc == 0 {
                    continue;
                }
                for x in 0..nx {
                    for y in 0..ny {
                        let idx = x * ny + y;
                        pair[idx] = f.add(pair[idx], f.mul(rc, f.mul(gx[i][x], gy[j][y])));
                    }
                }
            }
        }
        d.xy.push(SliceTerm { pair, single: gz[k].clone() });
    }
    d
}
