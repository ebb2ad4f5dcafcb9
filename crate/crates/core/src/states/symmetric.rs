//! Dicke states and the compressed representation of symmetric-subspace states.
//!
//! A state supported on the symmetric subspace of `N` qubits is stored by its
//! `N + 1` Dicke coefficients. For an `m : N-m` cut the branching rule
//!
//! ```text
//! |D_k^N⟩ = Σ_j c(k, j) |D_j^m⟩ |D_{k-j}^{N-m}⟩,   c(k, j) = sqrt(C(m,j) C(N-m,k-j) / C(N,k))
//! ```
//!
//! maps it isometrically into `Sym_m ⊗ Sym_{N-m}`, a space of dimension
//! `(m+1)(N-m+1)`. Because every Dicke vector is real in the computational
//! basis, partial transposes taken in these coordinates agree with the true
//! ones on the symmetric sector.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, HermitianOperator, C64};

/// Largest qubit count for which full `2^N` vectors are materialized.
pub const MAX_FULL_QUBITS: usize = 14;

const NORM_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-10;

/// `C(n, k)` as a float; zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_full(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FULL_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "full-space construction supports 1..={MAX_FULL_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

/// `|D_k^N⟩` in the `2^N` computational basis.
pub fn dicke_state(n: usize, k: usize) -> Result<DVector<f64>> {
    check_full(n)?;
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "Dicke excitation {k} outside 0..={n}"
        )));
    }
    let amp = binomial(n, k).sqrt().recip();
    Ok(DVector::from_fn(1 << n, |i, _| {
        if i.count_ones() as usize == k {
            amp
        } else {
            0.0
        }
    }))
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(n: usize) -> Result<DVector<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("GHZ needs N ≥ 2, got {n}")));
    }
    check_full(n)?;
    let mut v = DVector::zeros(1 << n);
    v[0] = 0.5f64.sqrt();
    v[(1 << n) - 1] = 0.5f64.sqrt();
    Ok(v)
}

/// `(|W_N⟩ + |W̄_N⟩)/√2` with `|W̄_N⟩ = |D_{N-1}^N⟩`.
pub fn wwbar_state(n: usize) -> Result<DVector<f64>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("WW̄ needs N ≥ 3, got {n}")));
    }
    let w = dicke_state(n, 1)?;
    let wbar = dicke_state(n, n - 1)?;
    let overlap = w.dot(&wbar);
    assert!(overlap.abs() < 1e-15, "W and W̄ overlap {overlap}");
    Ok((w + wbar) * 0.5f64.sqrt())
}

/// Pure state of the symmetric subspace, stored by its Dicke coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricState {
    coeffs: Vec<C64>,
}

impl SymmetricState {
    /// Coefficients on `|D_0^N⟩ … |D_N^N⟩`; must have unit norm.
    pub fn from_coefficients(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidParameter(
                "symmetric state needs at least 2 Dicke coefficients".into(),
            ));
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "Dicke coefficient vector has norm {norm}"
            )));
        }
        Ok(Self { coeffs })
    }

    /// Projects a `2^N` amplitude vector onto the Dicke basis; rejects it when
    /// the residual reaches `1e-10`.
    pub fn from_full(n: usize, amplitudes: &DVector<C64>) -> Result<Self> {
        check_full(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::DimsMismatch {
                dims: vec![2; n],
                order: amplitudes.len(),
            });
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        for (i, a) in amplitudes.iter().enumerate() {
            let k = i.count_ones() as usize;
            coeffs[k] += a / binomial(n, k).sqrt();
        }
        let mut residual = 0.0;
        for (i, a) in amplitudes.iter().enumerate() {
            let k = i.count_ones() as usize;
            residual += (a - coeffs[k] / binomial(n, k).sqrt()).norm_sqr();
        }
        let residual = residual.sqrt();
        if residual >= SYMMETRY_TOL {
            return Err(Error::NotSymmetric { residual });
        }
        Self::from_coefficients(coeffs)
    }

    pub fn dicke(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidParameter(format!(
                "Dicke excitation {k} outside 0..={n}"
            )));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[k] = C64::new(1.0, 0.0);
        Self::from_coefficients(coeffs)
    }

    pub fn w(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("W needs N ≥ 2, got {n}")));
        }
        Self::dicke(n, 1)
    }

    pub fn ghz(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("GHZ needs N ≥ 2, got {n}")));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[0] = C64::new(0.5f64.sqrt(), 0.0);
        coeffs[n] = C64::new(0.5f64.sqrt(), 0.0);
        Self::from_coefficients(coeffs)
    }

    pub fn wwbar(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("WW̄ needs N ≥ 3, got {n}")));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[1] = C64::new(0.5f64.sqrt(), 0.0);
        coeffs[n - 1] = C64::new(0.5f64.sqrt(), 0.0);
        Self::from_coefficients(coeffs)
    }

    pub fn n_qubits(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn to_full(&self) -> Result<DVector<C64>> {
        let n = self.n_qubits();
        check_full(n)?;
        Ok(DVector::from_fn(1 << n, |i, _| {
            let k = i.count_ones() as usize;
            self.coeffs[k] / binomial(n, k).sqrt()
        }))
    }
}

/// `(1-x)/(N+1) I + x |φ⟩⟨φ|` written in Dicke coordinates.
pub(crate) fn dicke_density(state: &SymmetricState, x: f64) -> DMatrix<C64> {
    let n = state.n_qubits();
    let c = state.coefficients();
    let noise = (1.0 - x) / (n + 1) as f64;
    DMatrix::from_fn(n + 1, n + 1, |k, l| {
        let mut v = c[k] * c[l].conj() * x;
        if k == l {
            v += noise;
        }
        v
    })
}

/// Full `2^N` matrix `Σ_{kl} M_kl |D_k⟩⟨D_l|` for a Dicke-coordinate matrix `M`.
pub(crate) fn embed_dicke(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = m.nrows() - 1;
    check_full(n)?;
    let dim = 1 << n;
    let inv_sqrt: Vec<f64> = (0..=n).map(|k| binomial(n, k).sqrt().recip()).collect();
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        let (ki, kj) = (i.count_ones() as usize, j.count_ones() as usize);
        m[(ki, kj)] * (inv_sqrt[ki] * inv_sqrt[kj])
    }))
}

/// Branching coefficients `c(k, j)` for an `m : N-m` split, indexed `[k][j]`
/// (zero where `k - j` falls outside `0..=N-m`).
pub fn branching_coefficients(n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..=n)
        .map(|k| {
            (0..=m)
                .map(|j| {
                    if j > k || k - j > n - m {
                        0.0
                    } else {
                        (binomial(m, j) * binomial(n - m, k - j) / binomial(n, k)).sqrt()
                    }
                })
                .collect()
        })
        .collect()
}

/// Symmetric-subspace state written in `Sym_m ⊗ Sym_{N-m}` Dicke coordinates.
#[derive(Clone, Debug)]
pub struct SymmetricCutRepresentation {
    pub n_qubits: usize,
    pub m_split: usize,
    /// Density matrix on factor dims `(m+1, N-m+1)`.
    pub matrix: DensityMatrix,
    pub branching: Vec<Vec<f64>>,
}

impl SymmetricCutRepresentation {
    pub(crate) fn from_dicke(dicke: &DMatrix<C64>, m: usize) -> Result<Self> {
        let n = dicke.nrows() - 1;
        if m == 0 || m >= n {
            return Err(Error::InvalidCut(format!(
                "split {m} must lie in 1..={} for {n} qubits",
                n - 1
            )));
        }
        let branching = branching_coefficients(n, m);
        let nb = n - m + 1;
        // Isometry V: Dicke_N -> Sym_m ⊗ Sym_{N-m}, V[(j, k-j), k] = c(k, j).
        let mut v = DMatrix::<C64>::zeros((m + 1) * nb, n + 1);
        for (k, row) in branching.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    v[(j * nb + (k - j), k)] = C64::new(c, 0.0);
                }
            }
        }
        let matrix = &v * dicke * v.adjoint();
        let op = HermitianOperator::from_product(vec![m + 1, nb], matrix);
        Ok(Self {
            n_qubits: n,
            m_split: m,
            matrix: DensityMatrix::trusted(op),
            branching,
        })
    }

    /// Maps back to the `2^N` computational basis, with the first `m` qubits as side A.
    pub fn embed(&self) -> Result<DensityMatrix> {
        let (n, m) = (self.n_qubits, self.m_split);
        check_full(n)?;
        let nb = n - m + 1;
        let dim = 1usize << n;
        let low_mask = (1usize << (n - m)) - 1;
        let coord: Vec<(usize, f64)> = (0..dim)
            .map(|i| {
                let ja = (i >> (n - m)).count_ones() as usize;
                let lb = (i & low_mask).count_ones() as usize;
                let amp = (binomial(m, ja) * binomial(n - m, lb)).sqrt().recip();
                (ja * nb + lb, amp)
            })
            .collect();
        let c = self.matrix.matrix();
        let full = DMatrix::from_fn(dim, dim, |i, j| {
            let (a, wa) = coord[i];
            let (b, wb) = coord[j];
            c[(a, b)] * (wa * wb)
        });
        Ok(DensityMatrix::trusted(HermitianOperator::from_product(
            vec![2; n],
            full,
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dicke_examples() {
        let w3 = dicke_state(3, 1).unwrap();
        let a = 1.0 / 3f64.sqrt();
        for (i, v) in w3.iter().enumerate() {
            let expect = if [1, 2, 4].contains(&i) { a } else { 0.0 };
            assert!((v - expect).abs() < 1e-15);
        }
        let d = dicke_state(2, 0).unwrap();
        assert_eq!(d.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
        let d = dicke_state(4, 2).unwrap();
        assert_eq!(d.iter().filter(|&&v| v != 0.0).count(), 6);
        assert!(d.iter().filter(|&&v| v != 0.0).all(|v| (v - 6f64.sqrt().recip()).abs() < 1e-15));
        assert!(dicke_state(3, 4).is_err());
    }

    #[test]
    fn dicke_basis_is_orthonormal() {
        for n in 1..=8 {
            for k in 0..=n {
                let a = dicke_state(n, k).unwrap();
                assert!(a.iter().all(|&v| v >= 0.0));
                for l in 0..=n {
                    let b = dicke_state(n, l).unwrap();
                    let expect = if k == l { 1.0 } else { 0.0 };
                    assert!((a.dot(&b) - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ghz_and_wwbar() {
        let g = ghz_state(3).unwrap();
        assert!((g[0] - 0.5f64.sqrt()).abs() < 1e-15 && (g[7] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(ghz_state(1).is_err());
        for n in 3..=9 {
            assert!((wwbar_state(n).unwrap().norm() - 1.0).abs() < 1e-14);
        }
        let w3 = wwbar_state(3).unwrap();
        let expect = (dicke_state(3, 1).unwrap() + dicke_state(3, 2).unwrap()) * 0.5f64.sqrt();
        assert!((w3 - expect).norm() < 1e-15);
    }

    #[test]
    fn branching_rows_are_normalized() {
        for n in 2..=40 {
            for m in 1..n {
                for row in branching_coefficients(n, m) {
                    let s: f64 = row.iter().map(|c| c * c).sum();
                    assert!((s - 1.0).abs() < 1e-12, "n={n} m={m} s={s}");
                }
            }
        }
    }

    #[test]
    fn branching_of_w3() {
        // |D_1^3⟩ = √(2/3)|0⟩|D_1^2⟩ + √(1/3)|1⟩|D_0^2⟩
        let c = branching_coefficients(3, 1);
        assert!((c[1][0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((c[1][1] - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn branching_mirror_symmetry() {
        let n = 7;
        let lo = branching_coefficients(n, 1);
        let hi = branching_coefficients(n, n - 1);
        for k in 0..=n {
            // c_{m=1}(k, j) = c_{m=N-1}(k, k-j)
            for j in 0..=1usize {
                if j <= k && k - j < n {
                    assert!((lo[k][j] - hi[k][k - j]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn from_full_projects_and_rejects() {
        let w = dicke_state(4, 1).unwrap().map(|v| C64::new(v, 0.0));
        let s = SymmetricState::from_full(4, &w).unwrap();
        assert!((s.coefficients()[1].re - 1.0).abs() < 1e-14);
        let mut bad = DVector::<C64>::zeros(8);
        bad[1] = C64::new(1.0, 0.0);
        assert!(matches!(
            SymmetricState::from_full(3, &bad),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(5, 6), 0.0);
        assert!((binomial(64, 32) - 1.832_624_140_942_590_5e18).abs() / 1.8e18 < 1e-14);
    }
}
