//! Slice decompositions, rank-one expansions and their tensor products.

use serde::{Deserialize, Serialize};

use super::SliceRankError;
use crate::fftensor::{tensor_product, PrimeField, Tensor3};

/// One slice: a function of two axes times a function of the third.
///
/// `pair` is row-major over the two named axes in `(x, y, z)` order, so an
/// xz-term stores `pair[i·|Z| + k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceTerm {
    pub pair: Vec<u64>,
    pub single: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceDecomposition {
    pub p: u64,
    pub dims: [usize; 3],
    /// `f(x, y) · g(z)`
    pub xy: Vec<SliceTerm>,
    /// `f(x, z) · g(y)`
    pub xz: Vec<SliceTerm>,
    /// `f(y, z) · g(x)`
    pub yz: Vec<SliceTerm>,
}

impl SliceDecomposition {
    pub fn empty(p: u64, dims: [usize; 3]) -> Self {
        SliceDecomposition { p, dims, xy: Vec::new(), xz: Vec::new(), yz: Vec::new() }
    }

    pub fn size(&self) -> usize {
        self.xy.len() + self.xz.len() + self.yz.len()
    }

    fn check_shapes(&self) -> Result<PrimeField, SliceRankError> {
        let f = PrimeField::new(self.p)?;
        let [nx, ny, nz] = self.dims;
        let groups = [(&self.xy, nx * ny, nz), (&self.xz, nx * nz, ny), (&self.yz, ny * nz, nx)];
        for (terms, np, ns) in groups {
            for t in terms {
                if t.pair.len() != np || t.single.len() != ns {
                    return Err(SliceRankError::Malformed(format!(
                        "slice term has shape ({}, {}), expected ({np}, {ns})",
                        t.pair.len(),
                        t.single.len()
                    )));
                }
                if t.pair.iter().chain(&t.single).any(|&v| v >= self.p) {
                    return Err(SliceRankError::Malformed(format!("slice term value not reduced mod {}", self.p)));
                }
            }
        }
        Ok(f)
    }

    /// The tensor the decomposition sums to.
    pub fn reconstruct(&self) -> Result<Tensor3, SliceRankError> {
        let f = self.check_shapes()?;
        let [nx, ny, nz] = self.dims;
        let mut acc = vec![0u64; nx * ny * nz];
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nz {
                    let mut v = 0;
                    for t in &self.xy {
                        v = f.add(v, f.mul(t.pair[i * ny + j], t.single[k]));
                    }
                    for t in &self.xz {
                        v = f.add(v, f.mul(t.pair[i * nz + k], t.single[j]));
                    }
                    for t in &self.yz {
                        v = f.add(v, f.mul(t.pair[j * nz + k], t.single[i]));
                    }
                    acc[(i * ny + j) * nz + k] = v;
                }
            }
        }
        Ok(Tensor3::from_fn(f, self.dims, |i, j, k| acc[(i * ny + j) * nz + k]))
    }
}

/// True iff `d` sums to `t` entrywise.
pub fn verify_slice_decomposition(t: &Tensor3, d: &SliceDecomposition) -> Result<bool, SliceRankError> {
    if t.p() != d.p || t.dims() != d.dims {
        return Err(SliceRankError::ShapeMismatch { tensor: (t.p(), t.dims()), decomposition: (d.p, d.dims) });
    }
    Ok(d.reconstruct()?.entries() == t.entries())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOneTerm {
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub z: Vec<u64>,
}

/// A sum of rank-one tensors `a(x)·b(y)·c(z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorDecomposition {
    pub p: u64,
    pub dims: [usize; 3],
    pub terms: Vec<RankOneTerm>,
}

impl TensorDecomposition {
    /// One term per nonzero entry.
    pub fn from_support(t: &Tensor3) -> Self {
        let [nx, ny, nz] = t.dims();
        let terms = t
            .support()
            .into_iter()
            .map(|(i, j, k, v)| {
                let mut x = vec![0; nx];
                let mut y = vec![0; ny];
                let mut z = vec![0; nz];
                x[i] = v;
                y[j] = 1;
                z[k] = 1;
                RankOneTerm { x, y, z }
            })
            .collect();
        TensorDecomposition { p: t.p(), dims: t.dims(), terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn verify(&self, t: &Tensor3) -> Result<bool, SliceRankError> {
        if t.p() != self.p || t.dims() != self.dims {
            return Err(SliceRankError::ShapeMismatch {
                tensor: (t.p(), t.dims()),
                decomposition: (self.p, self.dims),
            });
        }
        let f = t.field();
        let [nx, ny, nz] = self.dims;
        for term in &self.terms {
            if term.x.len() != nx || term.y.len() != ny || term.z.len() != nz {
                return Err(SliceRankError::Malformed("rank-one term has the wrong shape".into()));
            }
        }
        let mut acc = vec![0u64; nx * ny * nz];
        for term in &self.terms {
            for i in 0..nx {
                if term.x[i] == 0 {
                    continue;
                }
                for j in 0..ny {
                    let a = f.mul(term.x[i], term.y[j]);
                    if a == 0 {
                        continue;
                    }
                    for k in 0..nz {
                        let idx = (i * ny + j) * nz + k;
                        acc[idx] = f.add(acc[idx], f.mul(a, term.z[k]));
                    }
                }
            }
        }
        Ok(acc == t.entries())
    }
}

/// How to split the second factor when forming `F ⊗ G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductMode {
    /// Expand `G` into rank-one terms; `None` uses one term per nonzero entry.
    TensorRank(Option<TensorDecomposition>),
    /// Expand `G` along one of its axes with delta functions.
    MaxAxis,
}

fn outer(a: &[u64], b: &[u64], f: PrimeField) -> Vec<u64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| f.mul(x, y))).collect()
}

/// Reindexes a product function on `(A' × B') × (A'' × B'')` into
/// `(A' × A'') × (B' × B'')` order.
fn interleave(left: &[u64], right: &[u64], dims: [usize; 4], f: PrimeField) -> Vec<u64> {
    let [a1, b1, a2, b2] = dims;
    let mut out = vec![0u64; a1 * a2 * b1 * b2];
    for i1 in 0..a1 {
        for j1 in 0..b1 {
            let l = left[i1 * b1 + j1];
            if l == 0 {
                continue;
            }
            for i2 in 0..a2 {
                for j2 in 0..b2 {
                    let (i, j) = (i1 * a2 + i2, j1 * b2 + j2);
                    out[i * (b1 * b2) + j] = f.mul(l, right[i2 * b2 + j2]);
                }
            }
        }
    }
    out
}

/// A slice decomposition of `F ⊗ G` built from one of `F`.
///
/// Sizes: at most `size(dF) · ℓ` in rank mode with `ℓ` rank-one terms, and at
/// most `size(dF) · max(|X''|, |Y''|, |Z''|)` in max-axis mode.
pub fn product_slice_decomposition(
    f_tensor: &Tensor3,
    df: &SliceDecomposition,
    g: &Tensor3,
    mode: &ProductMode,
) -> Result<SliceDecomposition, SliceRankError> {
    if !verify_slice_decomposition(f_tensor, df)? {
        return Err(SliceRankError::Unverified("decomposition of the first factor".into()));
    }
    if f_tensor.p() != g.p() {
        return Err(SliceRankError::Malformed(format!("field mismatch: {} vs {}", f_tensor.p(), g.p())));
    }
    let fld = g.field();
    let [x1, y1, z1] = df.dims;
    let [x2, y2, z2] = g.dims();
    let dims = [x1 * x2, y1 * y2, z1 * z2];
    let mut out = SliceDecomposition::empty(df.p, dims);
    match mode {
        ProductMode::TensorRank(cp) => {
            let cp = match cp {
                Some(cp) => {
                    if !cp.verify(g)? {
                        return Err(SliceRankError::Unverified("rank-one expansion of the second factor".into()));
                    }
                    cp.clone()
                }
                None => TensorDecomposition::from_support(g),
            };
            for term in &cp.terms {
                for s in &df.xy {
                    out.xy.push(SliceTerm {
                        pair: interleave(&s.pair, &outer(&term.x, &term.y, fld), [x1, y1, x2, y2], fld),
                        single: outer(&s.single, &term.z, fld),
                    });
                }
                for s in &df.xz {
                    out.xz.push(SliceTerm {
                        pair: interleave(&s.pair, &outer(&term.x, &term.z, fld), [x1, z1, x2, z2], fld),
                        single: outer(&s.single, &term.y, fld),
                    });
                }
                for s in &df.yz {
                    out.yz.push(SliceTerm {
                        pair: interleave(&s.pair, &outer(&term.y, &term.z, fld), [y1, z1, y2, z2], fld),
                        single: outer(&s.single, &term.x, fld),
                    });
                }
            }
        }
        ProductMode::MaxAxis => {
            let delta = |n: usize, at: usize| -> Vec<u64> { (0..n).map(|i| u64::from(i == at)).collect() };
            // G(·, ·, ζ), G(·, η, ·), G(ξ, ·, ·) as two-variable tables
            let g_at_z = |zeta: usize| -> Vec<u64> { (0..x2 * y2).map(|ij| g.get(ij / y2, ij % y2, zeta)).collect() };
            let g_at_y = |eta: usize| -> Vec<u64> { (0..x2 * z2).map(|ik| g.get(ik / z2, eta, ik % z2)).collect() };
            let g_at_x = |xi: usize| -> Vec<u64> { (0..y2 * z2).map(|jk| g.get(xi, jk / z2, jk % z2)).collect() };
            for s in &df.xy {
                for zeta in 0..z2 {
                    out.xy.push(SliceTerm {
                        pair: interleave(&s.pair, &g_at_z(zeta), [x1, y1, x2, y2], fld),
                        single: outer(&s.single, &delta(z2, zeta), fld),
                    });
                }
            }
            for s in &df.xz {
                for eta in 0..y2 {
                    out.xz.push(SliceTerm {
                        pair: interleave(&s.pair, &g_at_y(eta), [x1, z1, x2, z2], fld),
                        single: outer(&s.single, &delta(y2, eta), fld),
                    });
                }
            }
            for s in &df.yz {
                for xi in 0..x2 {
                    out.yz.push(SliceTerm {
                        pair: interleave(&s.pair, &g_at_x(xi), [y1, z1, y2, z2], fld),
                        single: outer(&s.single, &delta(x2, xi), fld),
                    });
                }
            }
        }
    }
    debug_assert!(verify_slice_decomposition(&tensor_product(f_tensor, g)?, &out).unwrap_or(false));
    Ok(out)
}
