//! Triangle-rank decompositions `Σ_{a+b+c<k} r_{abc} f_a(x) g_b(y) h_c(z)`.

use serde::{Deserialize, Serialize};

use super::SliceRankError;
use crate::fftensor::linalg;
use crate::fftensor::{lucas_binom, PrimeField, Tensor3};
use crate::groups::prime_power_base;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleDecomposition {
    pub p: u64,
    pub k: usize,
    /// `f[a][x]` for `a < k`.
    pub f: Vec<Vec<u64>>,
    pub g: Vec<Vec<u64>>,
    pub h: Vec<Vec<u64>>,
    /// `(a, b, c, r_{abc})`, only nonzero coefficients.
    pub coeffs: Vec<(usize, usize, usize, u64)>,
    /// The decomposition describes `(x, y, z) ↦ t(x, y, z + shift)`.
    #[serde(default)]
    pub z_shift: usize,
}

impl TriangleDecomposition {
    pub fn dims(&self) -> [usize; 3] {
        let len = |v: &Vec<Vec<u64>>| v.first().map_or(0, Vec::len);
        [len(&self.f), len(&self.g), len(&self.h)]
    }

    fn validate(&self) -> Result<PrimeField, SliceRankError> {
        let fld = PrimeField::new(self.p)?;
        let dims = self.dims();
        for (fs, n) in [(&self.f, dims[0]), (&self.g, dims[1]), (&self.h, dims[2])] {
            if fs.len() != self.k || fs.iter().any(|v| v.len() != n) {
                return Err(SliceRankError::Malformed("triangle factor tables have inconsistent shapes".into()));
            }
        }
        for &(a, b, c, _) in &self.coeffs {
            if a + b + c >= self.k {
                return Err(SliceRankError::Malformed(format!("coefficient ({a},{b},{c}) outside a+b+c < {}", self.k)));
            }
        }
        Ok(fld)
    }

    /// Entries of `Σ r_{abc} f_a ⊗ g_b ⊗ h_c`, row-major.
    pub fn reconstruct(&self) -> Result<Vec<u64>, SliceRankError> {
        let fld = self.validate()?;
        let [nx, ny, nz] = self.dims();
        let mut acc = vec![0u64; nx * ny * nz];
        for &(a, b, c, r) in &self.coeffs {
            for x in 0..nx {
                let fx = fld.mul(r, self.f[a][x]);
                if fx == 0 {
                    continue;
                }
                for y in 0..ny {
                    let fxy = fld.mul(fx, self.g[b][y]);
                    if fxy == 0 {
                        continue;
                    }
                    for z in 0..nz {
                        let idx = (x * ny + y) * nz + z;
                        acc[idx] = fld.add(acc[idx], fld.mul(fxy, self.h[c][z]));
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// True iff `td` reproduces `t(x, y, z + shift)` entrywise.
pub fn verify_triangle_decomposition(t: &Tensor3, td: &TriangleDecomposition) -> Result<bool, SliceRankError> {
    let dims = td.dims();
    if t.p() != td.p || t.dims() != dims {
        return Err(SliceRankError::ShapeMismatch { tensor: (t.p(), t.dims()), decomposition: (td.p, dims) });
    }
    let rec = td.reconstruct()?;
    let [nx, ny, nz] = dims;
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                if rec[(x * ny + y) * nz + z] != t.get(x, y, (z + td.z_shift) % nz) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `D_{Z/qZ}(x, y, z + 1) = Σ_{a+b+c=q−1} C(x,a) C(y,b) C(z,c)` over `F_p`.
pub fn triangle_decomposition_cyclic(q: u64) -> Result<TriangleDecomposition, SliceRankError> {
    let (p, _) =
        prime_power_base(q).ok_or_else(|| SliceRankError::InvalidInput(format!("{q} is not a prime power")))?;
    let k = q as usize;
    let binoms: Vec<Vec<u64>> = (0..q).map(|a| (0..q).map(|x| lucas_binom(x, a, p)).collect()).collect();
    let mut coeffs = Vec::new();
    for a in 0..k {
        for b in 0..k - a {
            coeffs.push((a, b, k - 1 - a - b, 1));
        }
    }
    Ok(TriangleDecomposition { p, k, f: binoms.clone(), g: binoms.clone(), h: binoms, coeffs, z_shift: 1 })
}

/// Triangle form of `(x, y, z) ↦ P(x + y + z)` over `F_p`, from the
/// interpolating polynomial of `P` and multinomial expansion.
pub fn triangle_decomposition_poly(values: &[u64], p: u64) -> Result<TriangleDecomposition, SliceRankError> {
    let fld = PrimeField::new(p)?;
    if values.len() != p as usize {
        return Err(SliceRankError::InvalidInput(format!("expected {p} values, got {}", values.len())));
    }
    let k = p as usize;
    // Vandermonde V[s][d] = s^d; solve V c = P
    let v: Vec<Vec<u64>> = (0..p).map(|s| (0..p).map(|d| fld.pow(s, d)).collect()).collect();
    let vinv = linalg::inverse(fld, &v).expect("Vandermonde on distinct nodes is invertible");
    let c: Vec<u64> = vinv
        .iter()
        .map(|row| row.iter().zip(values).fold(0, |acc, (&a, &b)| fld.add(acc, fld.mul(a, fld.reduce(b)))))
        .collect();
    let fact: Vec<u64> = (0..p)
        .scan(1u64, |acc, i| {
            let cur = *acc;
            *acc = fld.mul(*acc, i + 1);
            Some(cur)
        })
        .collect();
    let mut coeffs = Vec::new();
    for (d, &cd) in c.iter().enumerate() {
        if cd == 0 {
            continue;
        }
        for a in 0..=d {
            for b in 0..=d - a {
                let cc = d - a - b;
                let multinomial = fld.mul(fact[d], fld.inv(fld.mul(fld.mul(fact[a], fact[b]), fact[cc])));
                let r = fld.mul(cd, multinomial);
                if r != 0 {
                    coeffs.push((a, b, cc, r));
                }
            }
        }
    }
    let monomials: Vec<Vec<u64>> = (0..p).map(|a| (0..p).map(|x| fld.pow(x, a)).collect()).collect();
    Ok(TriangleDecomposition { p, k, f: monomials.clone(), g: monomials.clone(), h: monomials, coeffs, z_shift: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fftensor::group_tensor;
    use crate::groups::GroupSpec;

    fn cyclic_tensor(q: u64, p: u64) -> Tensor3 {
        group_tensor(&GroupSpec::cyclic_power(q, 1).unwrap(), p, 1 << 24).unwrap()
    }

    #[test]
    fn cyclic_examples() {
        for q in [2u64, 3, 4, 5, 8, 9] {
            let td = triangle_decomposition_cyclic(q).unwrap();
            assert_eq!(td.k, q as usize);
            assert!(verify_triangle_decomposition(&cyclic_tensor(q, td.p), &td).unwrap(), "q = {q}");
        }
        assert!(triangle_decomposition_cyclic(6).is_err());
    }

    #[test]
    fn q2_is_parity() {
        let td = triangle_decomposition_cyclic(2).unwrap();
        let rec = td.reconstruct().unwrap();
        for idx in 0..8 {
            let (x, y, z) = (idx / 4, (idx / 2) % 2, idx % 2);
            assert_eq!(rec[idx], ((x + y + z) % 2) as u64);
        }
    }

    #[test]
    fn poly_examples() {
        let td = triangle_decomposition_poly(&[1, 1, 1], 3).unwrap();
        assert_eq!(td.coeffs, vec![(0, 0, 0, 1)]);
        let td = triangle_decomposition_poly(&[1, 0, 0], 3).unwrap();
        assert!(verify_triangle_decomposition(&cyclic_tensor(3, 3), &td).unwrap());
        let td = triangle_decomposition_poly(&[0, 1], 2).unwrap();
        let rec = td.reconstruct().unwrap();
        for idx in 0..8 {
            assert_eq!(rec[idx], ((idx / 4 + (idx / 2) % 2 + idx % 2) % 2) as u64);
        }
    }

    #[test]
    fn mutation_is_detected() {
        let mut td = triangle_decomposition_cyclic(3).unwrap();
        td.coeffs[0].3 = 2;
        assert!(!verify_triangle_decomposition(&cyclic_tensor(3, 3), &td).unwrap());
        let zero = Tensor3::zeros(PrimeField::new(3).unwrap(), [3, 3, 3]);
        td.coeffs.clear();
        assert!(verify_triangle_decomposition(&zero, &td).unwrap());
        td.coeffs.push((1, 1, 1, 1));
        assert!(td.reconstruct().is_err());
    }
}
