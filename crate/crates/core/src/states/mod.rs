//! Pure states and one-parameter noisy state families.
//!
//! Every family maps a mixing parameter `x` to a [`DensityMatrix`]. Symmetric
//! families (white noise restricted to the symmetric subspace plus a symmetric
//! pure state) can be evaluated in the full `2^N` space or compressed onto an
//! `m : N-m` cut with [`StateFamily::compress`].

pub mod io;
pub mod symmetric;

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, HermitianOperator, C64};

pub use symmetric::{
    binomial, branching_coefficients, dicke_state, ghz_state, wwbar_state, SymmetricCutRepresentation,
    SymmetricState,
};

const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    NoisyW,
    NoisyGhz,
    NoisyWWbar,
    NoisySymmetricCustom,
    NoisyNonSymmetric,
    NoisyQudit,
    IsotropicQutrit,
    QubitQutritX,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyKind::NoisyW => "noisy-w",
            FamilyKind::NoisyGhz => "noisy-ghz",
            FamilyKind::NoisyWWbar => "noisy-wwbar",
            FamilyKind::NoisySymmetricCustom => "noisy-symmetric",
            FamilyKind::NoisyNonSymmetric => "noisy-nonsymmetric",
            FamilyKind::NoisyQudit => "noisy-qudit",
            FamilyKind::IsotropicQutrit => "isotropic-qutrit",
            FamilyKind::QubitQutritX => "qubit-qutrit-x",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
enum Law {
    /// `(1-x)/(N+1) P_N + x|φ⟩⟨φ|`, optionally compressed onto a leading-`m` cut.
    Symmetric {
        state: SymmetricState,
        split: Option<usize>,
    },
    /// `(1-x)/D I_D + x|ψ⟩⟨ψ|`.
    WhiteNoise { dims: Vec<usize>, psi: DVector<C64> },
    Isotropic,
    XState,
}

/// A named map `x ↦ ρ(x)` over a closed parameter domain.
#[derive(Clone, Debug)]
pub struct StateFamily {
    kind: FamilyKind,
    law: Law,
    domain: (f64, f64),
}

fn check_unit(psi: &DVector<C64>) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidParameter(format!("pure state has norm {norm}")));
    }
    Ok(())
}

fn to_complex(v: DVector<f64>) -> DVector<C64> {
    v.map(|a| C64::new(a, 0.0))
}

/// `Σ_k |k…k⟩ / √d` on `n` qudits.
pub fn generalized_ghz(n: usize, d: usize) -> Result<DVector<C64>> {
    if n < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!(
            "generalized GHZ needs N ≥ 2 and d ≥ 2, got N={n}, d={d}"
        )));
    }
    let dim = d.pow(n as u32);
    let step: usize = (0..n).map(|p| d.pow(p as u32)).sum();
    let amp = C64::new((d as f64).sqrt().recip(), 0.0);
    let mut v = DVector::zeros(dim);
    for k in 0..d {
        v[k * step] = amp;
    }
    Ok(v)
}

impl StateFamily {
    pub fn noisy_w(n: usize) -> Result<Self> {
        Self::symmetric(FamilyKind::NoisyW, SymmetricState::w(n)?)
    }

    pub fn noisy_ghz(n: usize) -> Result<Self> {
        Self::symmetric(FamilyKind::NoisyGhz, SymmetricState::ghz(n)?)
    }

    pub fn noisy_wwbar(n: usize) -> Result<Self> {
        Self::symmetric(FamilyKind::NoisyWWbar, SymmetricState::wwbar(n)?)
    }

    /// `(1-x)/(N+1) P_N + x|φ⟩⟨φ|` for an arbitrary symmetric `φ`.
    pub fn symmetric_noisy(state: SymmetricState) -> Result<Self> {
        Self::symmetric(FamilyKind::NoisySymmetricCustom, state)
    }

    fn symmetric(kind: FamilyKind, state: SymmetricState) -> Result<Self> {
        Ok(Self {
            kind,
            law: Law::Symmetric { state, split: None },
            domain: (0.0, 1.0),
        })
    }

    /// `(1-x)/2^N I + x|ψ⟩⟨ψ|` for any `N`-qubit unit vector.
    pub fn nonsymmetric_noisy(n: usize, psi: DVector<C64>) -> Result<Self> {
        Self::white_noise(FamilyKind::NoisyNonSymmetric, vec![2; n], psi)
    }

    /// `(1-x)/d^N I + x|ψ⟩⟨ψ|` on `N` qudits of dimension `d`.
    pub fn qudit_noisy(n: usize, d: usize, psi: DVector<C64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("qudit dimension {d} < 2")));
        }
        Self::white_noise(FamilyKind::NoisyQudit, vec![d; n], psi)
    }

    fn white_noise(kind: FamilyKind, dims: Vec<usize>, psi: DVector<C64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("need at least one subsystem".into()));
        }
        let order: usize = dims.iter().product();
        if psi.len() != order {
            return Err(Error::DimsMismatch {
                dims,
                order: psi.len(),
            });
        }
        check_unit(&psi)?;
        Ok(Self {
            kind,
            law: Law::WhiteNoise { dims, psi },
            domain: (0.0, 1.0),
        })
    }

    /// `((1-x)/8) I_9 + ((9x-1)/8) |Φ⟩⟨Φ|`, `|Φ⟩ = (|00⟩+|11⟩+|22⟩)/√3`.
    pub fn isotropic_qutrit() -> Self {
        Self {
            kind: FamilyKind::IsotropicQutrit,
            law: Law::Isotropic,
            domain: (0.0, 1.0),
        }
    }

    /// The 6×6 qubit-qutrit X state `(1/8)[diag(2,1,1,1,1,2) + 8x(|0⟩⟨5| + |5⟩⟨0|)]`.
    pub fn qubit_qutrit_x() -> Self {
        Self {
            kind: FamilyKind::QubitQutritX,
            law: Law::XState,
            domain: (0.0, 0.25),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Factor dimensions of the matrices this family produces.
    pub fn dims(&self) -> Vec<usize> {
        match &self.law {
            Law::Symmetric { state, split: None } => vec![2; state.n_qubits()],
            Law::Symmetric {
                state,
                split: Some(m),
            } => vec![m + 1, state.n_qubits() - m + 1],
            Law::WhiteNoise { dims, .. } => dims.clone(),
            Law::Isotropic => vec![3, 3],
            Law::XState => vec![2, 3],
        }
    }

    /// Number of physical qubits for qubit families.
    pub fn n_qubits(&self) -> Option<usize> {
        match &self.law {
            Law::Symmetric { state, .. } => Some(state.n_qubits()),
            Law::WhiteNoise { dims, .. } if dims.iter().all(|&d| d == 2) => Some(dims.len()),
            _ => None,
        }
    }

    /// The `m` of the compressed `m : N-m` representation, if any.
    pub fn compressed_split(&self) -> Option<usize> {
        match &self.law {
            Law::Symmetric { split, .. } => *split,
            _ => None,
        }
    }

    pub fn symmetric_state(&self) -> Option<&SymmetricState> {
        match &self.law {
            Law::Symmetric { state, .. } => Some(state),
            _ => None,
        }
    }

    /// Same family evaluated in `Sym_m ⊗ Sym_{N-m}` coordinates (factor dims `(m+1, N-m+1)`).
    pub fn compress(&self, m: usize) -> Result<Self> {
        match &self.law {
            Law::Symmetric { state, .. } => {
                let n = state.n_qubits();
                if m == 0 || m >= n {
                    return Err(Error::InvalidCut(format!(
                        "split {m} must lie in 1..={} for {n} qubits",
                        n - 1
                    )));
                }
                Ok(Self {
                    kind: self.kind,
                    law: Law::Symmetric {
                        state: state.clone(),
                        split: Some(m),
                    },
                    domain: self.domain,
                })
            }
            _ => Err(self.not_symmetric()),
        }
    }

    fn not_symmetric(&self) -> Error {
        match &self.law {
            Law::WhiteNoise { dims, .. } if dims.iter().all(|&d| d == 2) => {
                // weight of the full white noise outside the symmetric subspace
                let n = dims.len();
                let residual = 1.0 - (n + 1) as f64 / 2f64.powi(n as i32);
                Error::NotSymmetric { residual }
            }
            _ => Error::InvalidParameter(format!("{} is not a symmetric qubit family", self.kind)),
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        if !(lo..=hi).contains(&x) {
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        Ok(())
    }

    /// Family member at parameter `x`.
    pub fn at(&self, x: f64) -> Result<DensityMatrix> {
        self.check_domain(x)?;
        match &self.law {
            Law::Symmetric { state, split } => {
                let dicke = symmetric::dicke_density(state, x);
                match split {
                    Some(m) => {
                        Ok(SymmetricCutRepresentation::from_dicke(&dicke, *m)?.matrix)
                    }
                    None => {
                        let full = symmetric::embed_dicke(&dicke)?;
                        let n = state.n_qubits();
                        Ok(DensityMatrix::trusted(HermitianOperator::from_product(
                            vec![2; n],
                            full,
                        )))
                    }
                }
            }
            Law::WhiteNoise { dims, psi } => {
                let order = psi.len();
                let mut m = psi * psi.adjoint() * C64::new(x, 0.0);
                let noise = (1.0 - x) / order as f64;
                for i in 0..order {
                    m[(i, i)] += noise;
                }
                Ok(DensityMatrix::trusted(HermitianOperator::from_product(
                    dims.clone(),
                    m,
                )))
            }
            Law::Isotropic => {
                let phi = generalized_ghz(2, 3)?;
                let mut m = &phi * phi.adjoint() * C64::new((9.0 * x - 1.0) / 8.0, 0.0);
                for i in 0..9 {
                    m[(i, i)] += (1.0 - x) / 8.0;
                }
                Ok(DensityMatrix::trusted(HermitianOperator::from_product(
                    vec![3, 3],
                    m,
                )))
            }
            Law::XState => {
                let mut m = DMatrix::<C64>::zeros(6, 6);
                for (i, d) in [2.0, 1.0, 1.0, 1.0, 1.0, 2.0].into_iter().enumerate() {
                    m[(i, i)] = C64::new(d / 8.0, 0.0);
                }
                m[(0, 5)] = C64::new(x, 0.0);
                m[(5, 0)] = C64::new(x, 0.0);
                Ok(DensityMatrix::trusted(HermitianOperator::from_product(
                    vec![2, 3],
                    m,
                )))
            }
        }
    }

    /// Compressed `m : N-m` representation at `x`, with branching data attached.
    pub fn symmetric_cut(&self, x: f64, m: usize) -> Result<SymmetricCutRepresentation> {
        self.check_domain(x)?;
        match &self.law {
            Law::Symmetric { state, .. } => {
                SymmetricCutRepresentation::from_dicke(&symmetric::dicke_density(state, x), m)
            }
            _ => Err(self.not_symmetric()),
        }
    }
}

/// Named pure states for the qubit families, as complex amplitude vectors.
pub fn w_state(n: usize) -> Result<DVector<C64>> {
    Ok(to_complex(dicke_state(n, 1)?))
}

pub fn ghz(n: usize) -> Result<DVector<C64>> {
    Ok(to_complex(ghz_state(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::BipartiteCut;

    fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
    }

    fn all_families() -> Vec<StateFamily> {
        vec![
            StateFamily::noisy_w(4).unwrap(),
            StateFamily::noisy_ghz(4).unwrap(),
            StateFamily::noisy_wwbar(3).unwrap(),
            StateFamily::noisy_w(6).unwrap().compress(2).unwrap(),
            StateFamily::nonsymmetric_noisy(3, w_state(3).unwrap()).unwrap(),
            StateFamily::qudit_noisy(2, 3, generalized_ghz(2, 3).unwrap()).unwrap(),
            StateFamily::isotropic_qutrit(),
            StateFamily::qubit_qutrit_x(),
        ]
    }

    #[test]
    fn every_family_yields_valid_states_on_grid() {
        for fam in all_families() {
            let (lo, hi) = fam.domain();
            for x in grid(lo, hi, 101) {
                let rho = fam.at(x).unwrap();
                // re-validate through the checked constructor
                DensityMatrix::new(rho.op().clone())
                    .unwrap_or_else(|e| panic!("{} at x={x}: {e}", fam.kind()));
            }
        }
    }

    #[test]
    fn families_are_affine_in_x() {
        for fam in all_families() {
            let (lo, hi) = fam.domain();
            let a = fam.at(lo).unwrap();
            let b = fam.at(hi).unwrap();
            let mid = fam.at(0.5 * (lo + hi)).unwrap();
            let avg = a.op().combine(0.5, b.op(), 0.5).unwrap();
            assert!(mid.op().frobenius_distance(&avg) < 1e-13, "{}", fam.kind());
        }
    }

    #[test]
    fn symmetric_family_endpoints() {
        let fam = StateFamily::noisy_w(4).unwrap();
        let rho0 = fam.at(0.0).unwrap();
        let nz = rho0.spectrum().nonzero(1e-12);
        assert_eq!(nz.len(), 5);
        assert!(nz.iter().all(|v| (v - 0.2).abs() < 1e-13));
        let rho1 = fam.at(1.0).unwrap();
        let w = w_state(4).unwrap();
        let pure = HermitianOperator::projector(vec![2; 4], &w).unwrap();
        assert!(rho1.op().frobenius_distance(&pure) < 1e-14);
    }

    #[test]
    fn noisy_w3_half_spectrum() {
        // Dicke-basis diagonalization: {0.125 ×3, 0.625}
        let rho = StateFamily::noisy_w(3).unwrap().at(0.5).unwrap();
        let nz = rho.spectrum().nonzero(1e-12);
        let expect = [0.625, 0.125, 0.125, 0.125];
        assert_eq!(nz.len(), 4);
        for (v, e) in nz.iter().zip(expect) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn nonsymmetric_spectrum_is_rank_one_update() {
        let n = 3;
        let fam = StateFamily::nonsymmetric_noisy(n, w_state(n).unwrap()).unwrap();
        for x in [0.0, 0.2, 0.7] {
            let eigs = fam.at(x).unwrap().spectrum();
            let base = (1.0 - x) / 8.0;
            assert!((eigs.values[0] - (base + x)).abs() < 1e-14);
            assert!(eigs.values[1..].iter().all(|v| (v - base).abs() < 1e-14));
        }
        let white = fam.at(0.0).unwrap();
        let id = HermitianOperator::identity(vec![2; 3]).scale(0.125);
        assert!(white.op().frobenius_distance(&id) < 1e-15);
    }

    #[test]
    fn qudit_purity_matches_expansion() {
        let (n, d) = (2usize, 3usize);
        let psi = generalized_ghz(n, d).unwrap();
        let fam = StateFamily::qudit_noisy(n, d, psi).unwrap();
        let dim = (d as f64).powi(n as i32);
        for x in [0.0, 0.3, 0.8, 1.0] {
            let m = fam.at(x).unwrap().matrix().clone();
            let purity = (&m * &m).trace().re;
            // Tr[(a I + x P)^2] = a^2 D + 2 a x + x^2, a = (1-x)/D
            let a = (1.0 - x) / dim;
            let expect = a * a * dim + 2.0 * a * x + x * x;
            assert!((purity - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn isotropic_examples() {
        let fam = StateFamily::isotropic_qutrit();
        let rho = fam.at(1.0 / 9.0).unwrap();
        let id = HermitianOperator::identity(vec![3, 3]).scale(1.0 / 9.0);
        assert!(rho.op().frobenius_distance(&id) < 1e-15);
        for x in [0.0, 0.2, 0.5, 1.0] {
            let m = fam.at(x).unwrap().partial_trace(&[0]).unwrap();
            let id3 = HermitianOperator::identity(vec![3]).scale(1.0 / 3.0);
            assert!(m.op().frobenius_distance(&id3) < 1e-15);
        }
        let pure = fam.at(1.0).unwrap();
        assert!((pure.spectrum().max() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn x_state_examples() {
        let fam = StateFamily::qubit_qutrit_x();
        for x in [0.0, 0.1, 0.25] {
            let rho = fam.at(x).unwrap();
            let qutrit = rho.partial_trace(&[1]).unwrap();
            let diag: Vec<f64> = (0..3).map(|i| qutrit.matrix()[(i, i)].re).collect();
            assert_eq!(diag, vec![3.0 / 8.0, 2.0 / 8.0, 3.0 / 8.0]);
            assert!(qutrit.matrix()[(0, 2)].norm() < 1e-16);
            let qubit = rho.partial_trace(&[0]).unwrap();
            let half = HermitianOperator::identity(vec![2]).scale(0.5);
            assert!(qubit.op().frobenius_distance(&half) < 1e-16);
        }
        assert!(matches!(fam.at(0.3), Err(Error::OutOfDomain { .. })));
        assert!(matches!(fam.at(-0.01), Err(Error::OutOfDomain { .. })));
        let cut = BipartiteCut::leading(1, 2).unwrap();
        let pt = fam.at(0.0).unwrap().partial_transpose(&cut).unwrap();
        assert!(pt.min_eigenvalue() >= 0.0);
    }

    #[test]
    fn w_single_qubit_marginal_formula() {
        for n in 3..=10 {
            let fam = StateFamily::noisy_w(n).unwrap();
            for x in grid(0.0, 1.0, 11) {
                let rho = fam.at(x).unwrap();
                let m = rho.partial_trace(&[0]).unwrap();
                let nf = n as f64;
                let p0 = (nf + (nf - 2.0) * x) / (2.0 * nf);
                let p1 = (nf - (nf - 2.0) * x) / (2.0 * nf);
                assert!((m.matrix()[(0, 0)].re - p0).abs() < 1e-13);
                assert!((m.matrix()[(1, 1)].re - p1).abs() < 1e-13);
                assert!(m.matrix()[(0, 1)].norm() < 1e-15);
            }
        }
    }

    #[test]
    fn maximally_mixed_qubit_marginals() {
        let mut fams = vec![];
        for n in 2..=8 {
            fams.push(StateFamily::noisy_ghz(n).unwrap());
        }
        for n in 4..=8 {
            fams.push(StateFamily::noisy_wwbar(n).unwrap());
        }
        let half = HermitianOperator::identity(vec![2]).scale(0.5);
        for fam in fams {
            for x in grid(0.0, 1.0, 11) {
                let m = fam.at(x).unwrap().partial_trace(&[0]).unwrap();
                assert!(m.op().frobenius_distance(&half) < 1e-12, "{}", fam.kind());
            }
        }
        // WW̄ at N = 3 is the exception: off-diagonal 2x/6
        let m = StateFamily::noisy_wwbar(3).unwrap().at(0.6).unwrap().partial_trace(&[0]).unwrap();
        assert!((m.matrix()[(0, 1)].re - 0.2).abs() < 1e-14);
    }

    #[test]
    fn compressed_matches_full_embedding() {
        for n in 3..=8 {
            for m in 1..n {
                let fam = StateFamily::noisy_wwbar(n).unwrap();
                for x in [0.0, 0.37, 1.0] {
                    let rep = fam.symmetric_cut(x, m).unwrap();
                    let full = fam.at(x).unwrap();
                    let back = rep.embed().unwrap();
                    assert!(back.op().frobenius_distance(full.op()) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn compression_rejects_nonsymmetric() {
        let fam = StateFamily::nonsymmetric_noisy(3, w_state(3).unwrap()).unwrap();
        assert!(matches!(fam.compress(1), Err(Error::NotSymmetric { .. })));
        assert!(StateFamily::isotropic_qutrit().compress(1).is_err());
        assert!(StateFamily::noisy_w(4).unwrap().compress(4).is_err());
    }

    #[test]
    fn rejects_unnormalized_pure_state() {
        let psi = DVector::from_element(8, C64::new(1.0, 0.0));
        assert!(StateFamily::nonsymmetric_noisy(3, psi).is_err());
    }
}
