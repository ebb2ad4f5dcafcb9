//! Dense Hermitian linear algebra with tensor-factor bookkeeping.
//!
//! Every operator carries the list of its tensor-factor dimensions, so partial
//! traces, partial transposes and `I_A ⊗ ρ_B` embeddings can be expressed by
//! factor index instead of by hand-computed strides. Factor 0 is the leftmost
//! tensor slot; a basis index is `Σ digit_f · stride_f` with the last factor
//! varying fastest.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Entrywise tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Allowed deviation of a density matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_FLOOR, 0)` are solver noise and are clamped to zero.
pub const PSD_FLOOR: f64 = 1e-10;
/// Eigenvalues at or below this are treated as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Largest weight a state may place outside the support of its reference operator.
pub const SUPPORT_LEAK_TOL: f64 = 1e-9;

/// Largest `|m_ij - conj(m_ji)|` over all entries.
pub fn max_asymmetry(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(m: DMatrix<C64>) -> DMatrix<C64> {
    let adj = m.adjoint();
    (m + adj).scale(0.5)
}

fn check_dims(dims: &[usize], order: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != order
    {
        return Err(Error::DimsMismatch {
            dims: dims.to_vec(),
            order,
        });
    }
    Ok(())
}

/// Dense complex Hermitian matrix tagged with its tensor-factor dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dims: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl HermitianOperator {
    /// Validates squareness, factor dimensions and Hermiticity within
    /// [`HERMITICITY_TOL`]. The stored matrix is the exact Hermitian part of
    /// the input.
    pub fn new(dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        check_dims(&dims, matrix.nrows())?;
        let max_asymmetry = max_asymmetry(&matrix);
        if max_asymmetry > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        Ok(Self {
            dims,
            matrix: hermitian_part(matrix),
        })
    }

    pub fn from_real(dims: Vec<usize>, matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(dims, matrix.map(|v| C64::new(v, 0.0)))
    }

    /// For results of products that are Hermitian in exact arithmetic.
    pub(crate) fn from_product(dims: Vec<usize>, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.nrows());
        Self {
            dims,
            matrix: hermitian_part(matrix),
        }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            matrix: DMatrix::identity(n, n),
        }
    }

    /// `|v⟩⟨v|` (no normalization applied).
    pub fn projector(dims: Vec<usize>, v: &DVector<C64>) -> Result<Self> {
        check_dims(&dims, v.len())?;
        let matrix = v * v.adjoint();
        Ok(Self::from_product(dims, matrix))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Full spectrum with eigenvectors, eigenvalues sorted descending.
    pub fn eig(&self) -> Spectrum {
        let se = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
        let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.order(), self.order(), |r, c| {
            se.eigenvectors[(r, order[c])]
        });
        Spectrum {
            values,
            vectors: Some(vectors),
        }
    }

    /// Eigenvalues only, sorted descending.
    pub fn eigenvalues(&self) -> Spectrum {
        let mut values: Vec<f64> = self.matrix.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum {
            values,
            vectors: None,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().min()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().max()
    }

    /// Pseudo-power on the support: eigenvalues above `support_tol` map to
    /// `e^alpha`, the rest to zero.
    pub fn frac_power_on_support(&self, alpha: f64, support_tol: f64) -> Result<Self> {
        let matrix = self.eig().power_on_support(alpha, support_tol)?;
        Ok(Self::from_product(self.dims.clone(), matrix))
    }

    /// Tensor product `self ⊗ other`; factor lists are concatenated.
    pub fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: self.matrix.scale(c),
        }
    }

    /// `a·self + b·other` for operators on the same factor layout.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::InvalidParameter(format!(
                "factor layouts differ: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: self.matrix.scale(a) + other.matrix.scale(b),
        })
    }

    /// `self · inner · self`.
    pub fn sandwich(&self, inner: &Self) -> Self {
        Self::from_product(inner.dims.clone(), &self.matrix * &inner.matrix * &self.matrix)
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    /// Traces out every factor not listed in `keep`. Kept factors stay in
    /// ascending index order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let split = FactorSplit::new(&self.dims, keep)?;
        let dk = split.kept_dim;
        let mut out = DMatrix::<C64>::zeros(dk, dk);
        for t in 0..split.traced_dim {
            let rows = split.group(t);
            for (a, &i) in rows.iter().enumerate() {
                for (b, &j) in rows.iter().enumerate() {
                    out[(a, b)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(Self::from_product(split.kept_dims, out))
    }

    /// Embeds this operator, living on `factors` of a system with `full_dims`,
    /// as `op ⊗ I` on the remaining factors (respecting factor positions).
    pub fn extend_with_identity(&self, factors: &[usize], full_dims: &[usize]) -> Result<Self> {
        let split = FactorSplit::new(full_dims, factors)?;
        if split.kept_dims != self.dims {
            return Err(Error::InvalidParameter(format!(
                "operator factors {:?} do not match selected dims {:?}",
                self.dims, split.kept_dims
            )));
        }
        let n = full_dims.iter().product();
        let mut out = DMatrix::<C64>::zeros(n, n);
        for t in 0..split.traced_dim {
            let rows = split.group(t);
            for (a, &i) in rows.iter().enumerate() {
                for (b, &j) in rows.iter().enumerate() {
                    out[(i, j)] = self.matrix[(a, b)];
                }
            }
        }
        Ok(Self {
            dims: full_dims.to_vec(),
            matrix: out,
        })
    }

    /// Transpose applied to the indices of the listed factors only.
    pub fn partial_transpose(&self, factors: &[usize]) -> Result<Self> {
        validate_factor_set(factors, self.dims.len())?;
        let strides = strides(&self.dims);
        let n = self.order();
        // Offset contributed by the transposed factors for every basis index.
        let offset: Vec<usize> = (0..n)
            .map(|i| {
                factors
                    .iter()
                    .map(|&f| (i / strides[f]) % self.dims[f] * strides[f])
                    .sum()
            })
            .collect();
        let mut out = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            let ri = i - offset[i];
            for j in 0..n {
                let rj = j - offset[j];
                out[(ri + offset[j], rj + offset[i])] = self.matrix[(i, j)];
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: out,
        })
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        s[f] = s[f + 1] * dims[f + 1];
    }
    s
}

fn validate_factor_set(factors: &[usize], n_factors: usize) -> Result<()> {
    if factors.is_empty() {
        return Err(Error::InvalidCut("empty factor set".into()));
    }
    let mut seen = vec![false; n_factors];
    for &f in factors {
        if f >= n_factors {
            return Err(Error::InvalidCut(format!(
                "factor index {f} out of range for {n_factors} factors"
            )));
        }
        if seen[f] {
            return Err(Error::InvalidCut(format!("factor index {f} repeated")));
        }
        seen[f] = true;
    }
    Ok(())
}

/// Groups full basis indices by the value of their traced-out digits.
struct FactorSplit {
    kept_dims: Vec<usize>,
    kept_dim: usize,
    traced_dim: usize,
    /// `members[t * kept_dim + k]` is the full index with traced part `t`, kept part `k`.
    members: Vec<usize>,
}

impl FactorSplit {
    fn new(dims: &[usize], keep: &[usize]) -> Result<Self> {
        validate_factor_set(keep, dims.len())?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let traced: Vec<usize> = (0..dims.len()).filter(|f| !keep.contains(f)).collect();
        let kept_dims: Vec<usize> = keep.iter().map(|&f| dims[f]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&f| dims[f]).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let traced_dim: usize = traced_dims.iter().product();
        let full = strides(dims);
        let ks = strides(&kept_dims);
        let ts = strides(&traced_dims);
        let n = kept_dim * traced_dim;
        let mut members = vec![0; n];
        for i in 0..n {
            let digit = |f: usize| (i / full[f]) % dims[f];
            let k: usize = keep.iter().zip(&ks).map(|(&f, &s)| digit(f) * s).sum();
            let t: usize = traced.iter().zip(&ts).map(|(&f, &s)| digit(f) * s).sum();
            members[t * kept_dim + k] = i;
        }
        Ok(Self {
            kept_dims,
            kept_dim,
            traced_dim,
            members,
        })
    }

    fn group(&self, t: usize) -> &[usize] {
        &self.members[t * self.kept_dim..(t + 1) * self.kept_dim]
    }
}

/// Hermitian operator with unit trace and no eigenvalue below `-PSD_FLOOR`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::Trace { trace });
        }
        let min_eigenvalue = op.min_eigenvalue();
        if min_eigenvalue < -PSD_FLOOR {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self { op })
    }

    pub fn from_matrix(dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        Self::new(HermitianOperator::new(dims, matrix)?)
    }

    /// Skips the eigenvalue check; used by factories whose output is PSD by construction.
    pub(crate) fn trusted(op: HermitianOperator) -> Self {
        debug_assert!((op.trace() - 1.0).abs() <= TRACE_TOL, "trace {}", op.trace());
        Self { op }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.op.matrix()
    }

    pub fn order(&self) -> usize {
        self.op.order()
    }

    /// Reduced state on the `keep` factors.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Ok(Self::trusted(self.op.partial_trace(keep)?))
    }

    pub fn partial_transpose(&self, cut: &BipartiteCut) -> Result<HermitianOperator> {
        cut.check_against(self.dims())?;
        self.op.partial_transpose(cut.a())
    }

    /// `I_A ⊗ ρ_B`, the reference operator for conditional entropies.
    pub fn conditioning_operator(&self, cut: &BipartiteCut) -> Result<HermitianOperator> {
        cut.check_against(self.dims())?;
        let rho_b = self.op.partial_trace(cut.b())?;
        rho_b.extend_with_identity(cut.b(), self.dims())
    }

    pub fn spectrum(&self) -> Spectrum {
        self.op.eigenvalues()
    }
}

/// Eigenvalues sorted descending, optionally with the matching eigenvector columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<DMatrix<C64>>,
}

impl Spectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self {
            values,
            vectors: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// Eigenvalues strictly above `tol`.
    pub fn nonzero(&self, tol: f64) -> Vec<f64> {
        self.values.iter().copied().filter(|&v| v > tol).collect()
    }

    /// `U Λ U†`; `None` when eigenvectors were not retained.
    pub fn reconstruct(&self) -> Option<DMatrix<C64>> {
        self.map_values(Some).ok()
    }

    /// `U diag(e^alpha on support, 0 elsewhere) U†`.
    pub fn power_on_support(&self, alpha: f64, support_tol: f64) -> Result<DMatrix<C64>> {
        if let Some(&min_eigenvalue) = self.values.last() {
            if min_eigenvalue < -support_tol.max(PSD_FLOOR) {
                return Err(Error::NotPsd { min_eigenvalue });
            }
        }
        self.map_values(|v| if v > support_tol { Some(v.powf(alpha)) } else { None })
    }

    /// Orthogonal projector onto the span of eigenvectors with eigenvalue above `tol`.
    pub fn support_projector(&self, tol: f64) -> Result<DMatrix<C64>> {
        self.map_values(|v| if v > tol { Some(1.0) } else { None })
    }

    fn map_values(&self, f: impl Fn(f64) -> Option<f64>) -> Result<DMatrix<C64>> {
        let u = self
            .vectors
            .as_ref()
            .ok_or_else(|| Error::Numerical("eigenvectors were not retained".into()))?;
        let n = u.nrows();
        let mut scaled = DMatrix::<C64>::zeros(n, n);
        let mut cols = Vec::new();
        for (c, &v) in self.values.iter().enumerate() {
            if let Some(w) = f(v) {
                scaled.set_column(c, &u.column(c).scale(w));
                cols.push(c);
            }
        }
        let mut out = DMatrix::<C64>::zeros(n, n);
        for c in cols {
            out += scaled.column(c) * u.column(c).adjoint();
        }
        Ok(out)
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter(format!("q must be positive and finite, got {q}")));
    }
    Ok(())
}

/// `ln Σ λ^q`, accumulated as a max-shifted sum of `exp(q ln λ)`.
///
/// Eigenvalues in `[-PSD_FLOOR, 0]` contribute nothing; an all-zero spectrum
/// gives `-inf`.
pub fn log_power_sum(values: &[f64], q: f64) -> Result<f64> {
    check_q(q)?;
    if let Some(&min_eigenvalue) = values.iter().min_by(|a, b| a.total_cmp(b)) {
        if min_eigenvalue < -PSD_FLOOR {
            return Err(Error::NotPsd { min_eigenvalue });
        }
    }
    let logs: Vec<f64> = values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| q * v.ln())
        .collect();
    let Some(peak) = logs.iter().copied().reduce(f64::max) else {
        return Ok(f64::NEG_INFINITY);
    };
    let sum: f64 = logs.iter().map(|&l| (l - peak).exp()).sum();
    Ok(peak + sum.ln())
}

/// `Σ λ^q`; overflows to `+inf` only when the true result does.
pub fn power_sum(values: &[f64], q: f64) -> Result<f64> {
    Ok(log_power_sum(values, q)?.exp())
}

/// `-Σ λ ln λ` over positive eigenvalues (natural log, `0 ln 0 = 0`).
pub fn von_neumann_entropy(values: &[f64]) -> f64 {
    -values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

/// Partition of the tensor factors into subsystems A and B.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteCut {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl BipartiteCut {
    pub fn new(mut a: Vec<usize>, mut b: Vec<usize>, n_factors: usize) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidCut("both sides must be nonempty".into()));
        }
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        validate_factor_set(&all, n_factors)?;
        all.sort_unstable();
        if all.len() != n_factors {
            return Err(Error::InvalidCut(format!(
                "sides {a:?} | {b:?} do not cover all {n_factors} factors"
            )));
        }
        a.sort_unstable();
        b.sort_unstable();
        Ok(Self { a, b })
    }

    /// A is the listed factors, B the complement.
    pub fn from_a(a: Vec<usize>, n_factors: usize) -> Result<Self> {
        let b = (0..n_factors).filter(|f| !a.contains(f)).collect();
        Self::new(a, b, n_factors)
    }

    /// A is the first `m` factors.
    pub fn leading(m: usize, n_factors: usize) -> Result<Self> {
        Self::from_a((0..m).collect(), n_factors)
    }

    /// A is the last `m` factors (conditioning on the first `n - m`).
    pub fn trailing(m: usize, n_factors: usize) -> Result<Self> {
        Self::from_a((n_factors.saturating_sub(m)..n_factors).collect(), n_factors)
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn n_factors(&self) -> usize {
        self.a.len() + self.b.len()
    }

    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    pub(crate) fn check_against(&self, dims: &[usize]) -> Result<()> {
        if self.n_factors() != dims.len() {
            return Err(Error::InvalidCut(format!(
                "cut covers {} factors but the state has {}",
                self.n_factors(),
                dims.len()
            )));
        }
        Ok(())
    }
}
