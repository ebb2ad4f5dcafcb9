//! Conditional and relative entropies built on the sandwiched trace functional
//!
//! ```text
//! Q̃_q(ρ‖σ) = Tr[(σ^{(1-q)/2q} ρ σ^{(1-q)/2q})^q]
//! ```
//!
//! Powers of `σ` are pseudo-powers on its support. All `λ^q` sums run in the
//! log domain, so `Q̃_q` itself may be reported as `ln Q̃_q` when it would
//! overflow. Logarithms are natural.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{
    log_power_sum, von_neumann_entropy, BipartiteCut, DensityMatrix, HermitianOperator, Spectrum,
    C64, PSD_FLOOR, SUPPORT_LEAK_TOL, SUPPORT_TOL,
};

/// Largest `q` evaluated directly; larger orders must use the `q → ∞` limit routines.
pub const MAX_Q: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Cstre,
    Ar,
    SandwichedRenyi,
    VonNeumann,
    TsallisRelative,
    SandwichedTsallisRelative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    pub method: Method,
    pub q: f64,
    pub value: f64,
    /// `ln Q̃_q` (sandwiched methods) or `ln(Tr ρ_AB^q / Tr ρ_B^q)` (AR).
    pub log_trace: Option<f64>,
    pub sandwiched_spectrum: Option<Spectrum>,
}

/// `Q̃_q(ρ‖σ)` in log form, with the spectrum of the sandwiched matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SandwichedTrace {
    pub log_value: f64,
    pub spectrum: Spectrum,
}

impl SandwichedTrace {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= MAX_Q) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in (0, {MAX_Q:e}], got {q}"
        )));
    }
    Ok(())
}

fn check_layout(rho: &DensityMatrix, sigma: &HermitianOperator) -> Result<()> {
    if rho.dims() != sigma.dims() {
        return Err(Error::InvalidParameter(format!(
            "state dims {:?} differ from reference dims {:?}",
            rho.dims(),
            sigma.dims()
        )));
    }
    Ok(())
}

/// `Re Tr(AB)` without forming the product.
fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Spectrum of `σ` plus the weight `ρ` places outside its support.
pub(crate) fn support_checked(rho: &DensityMatrix, sigma: &HermitianOperator) -> Result<Spectrum> {
    let eigs = sigma.eig();
    if eigs.min() < -PSD_FLOOR {
        return Err(Error::NotPsd {
            min_eigenvalue: eigs.min(),
        });
    }
    let proj = eigs.support_projector(SUPPORT_TOL)?;
    let leaked = rho.op().trace() - trace_product(&proj, rho.matrix());
    if leaked > SUPPORT_LEAK_TOL {
        return Err(Error::SupportViolation { leaked });
    }
    Ok(eigs)
}

pub fn sandwiched_q_trace(
    rho: &DensityMatrix,
    sigma: &HermitianOperator,
    q: f64,
) -> Result<SandwichedTrace> {
    check_q(q)?;
    check_layout(rho, sigma)?;
    let eigs = support_checked(rho, sigma)?;
    let alpha = (1.0 - q) / (2.0 * q);
    let side = HermitianOperator::from_product(
        sigma.dims().to_vec(),
        eigs.power_on_support(alpha, SUPPORT_TOL)?,
    );
    let spectrum = side.sandwich(rho.op()).eigenvalues();
    // numerical zeros would otherwise dominate the sum for q < 1
    let log_value = log_power_sum(&spectrum.nonzero(SUPPORT_TOL), q)?;
    Ok(SandwichedTrace {
        log_value,
        spectrum,
    })
}

/// Conditional sandwiched Tsallis relative entropy `(Q̃_q(ρ_AB‖I_A⊗ρ_B) - 1)/(1 - q)`.
///
/// `q = 1` is evaluated as the von Neumann conditional entropy.
pub fn cstre(rho: &DensityMatrix, cut: &BipartiteCut, q: f64) -> Result<EntropyReport> {
    if q == 1.0 {
        return von_neumann_conditional(rho, cut);
    }
    let sigma = rho.conditioning_operator(cut)?;
    let t = sandwiched_q_trace(rho, &sigma, q)?;
    Ok(EntropyReport {
        method: Method::Cstre,
        q,
        value: t.log_value.exp_m1() / (1.0 - q),
        log_trace: Some(t.log_value),
        sandwiched_spectrum: Some(t.spectrum),
    })
}

/// Conditional sandwiched Rényi relative entropy `ln Q̃_q / (1 - q)`.
pub fn sandwiched_renyi_conditional(
    rho: &DensityMatrix,
    cut: &BipartiteCut,
    q: f64,
) -> Result<EntropyReport> {
    if q == 1.0 {
        return von_neumann_conditional(rho, cut);
    }
    let sigma = rho.conditioning_operator(cut)?;
    let t = sandwiched_q_trace(rho, &sigma, q)?;
    if !t.log_value.is_finite() {
        return Err(Error::Numerical(format!(
            "sandwiched trace is not positive (ln Q = {})",
            t.log_value
        )));
    }
    Ok(EntropyReport {
        method: Method::SandwichedRenyi,
        q,
        value: t.log_value / (1.0 - q),
        log_trace: Some(t.log_value),
        sandwiched_spectrum: Some(t.spectrum),
    })
}

/// Abe–Rajagopal conditional Tsallis entropy `(Tr ρ_AB^q / Tr ρ_B^q - 1)/(1 - q)`.
pub fn ar_conditional(rho: &DensityMatrix, cut: &BipartiteCut, q: f64) -> Result<EntropyReport> {
    if q == 1.0 {
        return von_neumann_conditional(rho, cut);
    }
    check_q(q)?;
    cut.check_against(rho.dims())?;
    let joint = log_power_sum(&rho.spectrum().nonzero(SUPPORT_TOL), q)?;
    let marginal = log_power_sum(&rho.partial_trace(cut.b())?.spectrum().nonzero(SUPPORT_TOL), q)?;
    let log_ratio = joint - marginal;
    Ok(EntropyReport {
        method: Method::Ar,
        q,
        value: log_ratio.exp_m1() / (1.0 - q),
        log_trace: Some(log_ratio),
        sandwiched_spectrum: None,
    })
}

/// `S(ρ_AB) - S(ρ_B)`.
pub fn von_neumann_conditional(rho: &DensityMatrix, cut: &BipartiteCut) -> Result<EntropyReport> {
    cut.check_against(rho.dims())?;
    let joint = von_neumann_entropy(&rho.spectrum().values);
    let marginal = von_neumann_entropy(&rho.partial_trace(cut.b())?.spectrum().values);
    Ok(EntropyReport {
        method: Method::VonNeumann,
        q: 1.0,
        value: joint - marginal,
        log_trace: None,
        sandwiched_spectrum: None,
    })
}

fn check_relative_q(q: f64) -> Result<()> {
    check_q(q)?;
    if q == 1.0 {
        return Err(Error::InvalidParameter(
            "relative Tsallis entropies are undefined at q = 1".into(),
        ));
    }
    Ok(())
}

/// Traditional Tsallis relative entropy `(Tr(ρ^q σ^{1-q}) - 1)/(q - 1)`.
pub fn tsallis_relative(rho: &DensityMatrix, sigma: &HermitianOperator, q: f64) -> Result<f64> {
    check_relative_q(q)?;
    check_layout(rho, sigma)?;
    let sigma_spec = support_checked(rho, sigma)?;
    let rho_q = rho.op().eig().power_on_support(q, 0.0)?;
    let sigma_p = sigma_spec.power_on_support(1.0 - q, SUPPORT_TOL)?;
    Ok((trace_product(&rho_q, &sigma_p) - 1.0) / (q - 1.0))
}

/// Sandwiched Tsallis relative entropy `(Q̃_q(ρ‖σ) - 1)/(q - 1)`.
pub fn sandwiched_tsallis_relative(
    rho: &DensityMatrix,
    sigma: &HermitianOperator,
    q: f64,
) -> Result<f64> {
    check_relative_q(q)?;
    let t = sandwiched_q_trace(rho, sigma, q)?;
    Ok(t.log_value.exp_m1() / (q - 1.0))
}
