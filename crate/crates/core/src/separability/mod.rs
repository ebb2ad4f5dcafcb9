//! Separability verdicts and thresholds.
//!
//! Every criterion is reduced to a real *margin* whose negative values certify
//! entanglement. Verdicts classify a margin within [`BOUNDARY_TOL`] of zero as
//! a boundary point; thresholds bisect on "margin < -BOUNDARY_TOL" so that
//! exact zeros (kernel directions of the partial transpose, say) never count
//! as detections.

pub mod closed_form;
pub mod trace;

use std::fmt;

use crate::entropy::{self, MAX_Q};
use crate::error::{Error, Result};
use crate::linalg::{BipartiteCut, DensityMatrix, HermitianOperator, SUPPORT_TOL};
use crate::states::{symmetric::MAX_FULL_QUBITS, StateFamily};

pub use closed_form::{
    closed_form_ghz_eigs, closed_form_thresholds, closed_form_w_eigs, EigenBranch,
};
pub use trace::{convergence_trace, ConvergenceTrace, TraceKind, TraceRow};

pub const BOUNDARY_TOL: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const MIN_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Negative,
    Nonnegative,
    Boundary,
}

impl Verdict {
    pub fn from_margin(margin: f64) -> Self {
        if margin.abs() < BOUNDARY_TOL {
            Verdict::Boundary
        } else if margin < 0.0 {
            Verdict::Negative
        } else {
            Verdict::Nonnegative
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Negative => "NEGATIVE",
            Verdict::Nonnegative => "NONNEGATIVE",
            Verdict::Boundary => "BOUNDARY",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Criterion {
    CstreQinf,
    CstreAt(f64),
    ArQinf,
    ArAt(f64),
    RenyiAt(f64),
    VonNeumann,
    Ppt,
    Reduction,
}

impl Criterion {
    /// Short name used in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            Criterion::CstreQinf | Criterion::CstreAt(_) => "cstre",
            Criterion::ArQinf | Criterion::ArAt(_) => "ar",
            Criterion::RenyiAt(_) => "renyi",
            Criterion::VonNeumann => "vn",
            Criterion::Ppt => "ppt",
            Criterion::Reduction => "reduction",
        }
    }

    /// Entropic order: `Some(inf)` for the limits, `Some(1)` for von Neumann,
    /// `None` for the spectral criteria.
    pub fn q(&self) -> Option<f64> {
        match *self {
            Criterion::CstreQinf | Criterion::ArQinf => Some(f64::INFINITY),
            Criterion::CstreAt(q) | Criterion::ArAt(q) | Criterion::RenyiAt(q) => Some(q),
            Criterion::VonNeumann => Some(1.0),
            Criterion::Ppt | Criterion::Reduction => None,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.q() {
            Some(q) if q.is_infinite() => write!(f, "{}(q=inf)", self.name()),
            Some(q) if *self != Criterion::VonNeumann => write!(f, "{}(q={q})", self.name()),
            _ => f.write_str(self.name()),
        }
    }
}

/// `I_A ⊗ ρ_B - ρ_AB`.
pub fn reduction_operator(rho: &DensityMatrix, cut: &BipartiteCut) -> Result<HermitianOperator> {
    rho.conditioning_operator(cut)?.combine(1.0, rho.op(), -1.0)
}

/// `1 - λ_max(σ^{-1/2} ρ σ^{-1/2})` with `σ = I_A ⊗ ρ_B` (pseudo-inverse on the support).
///
/// This is the `q → ∞` limit of the CSTRE sign test and agrees in sign with
/// the reduction criterion.
pub fn cstre_qinf_margin(rho: &DensityMatrix, cut: &BipartiteCut) -> Result<f64> {
    let sigma = rho.conditioning_operator(cut)?;
    let sigma_eigs = entropy::support_checked(rho, &sigma)?;
    let side = HermitianOperator::from_product(
        sigma.dims().to_vec(),
        sigma_eigs.power_on_support(-0.5, SUPPORT_TOL)?,
    );
    Ok(1.0 - side.sandwich(rho.op()).max_eigenvalue())
}

pub fn cstre_qinf_verdict(rho: &DensityMatrix, cut: &BipartiteCut) -> Result<Verdict> {
    cstre_qinf_margin(rho, cut).map(Verdict::from_margin)
}

/// `ln λ_max(ρ_B) - ln λ_max(ρ_AB)`; the AR entropy tends to `-∞` exactly when this is negative.
pub fn ar_qinf_margin(rho: &DensityMatrix, cut: &BipartiteCut) -> Result<f64> {
    cut.check_against(rho.dims())?;
    let joint = rho.spectrum().max();
    let marginal = rho.partial_trace(cut.b())?.spectrum().max();
    Ok(marginal.ln() - joint.ln())
}

/// Smallest eigenvalue of the partial transpose on side A.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, cut: &BipartiteCut) -> Result<f64> {
    Ok(rho.partial_transpose(cut)?.min_eigenvalue())
}

fn check_finite_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= MAX_Q) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in (0, {MAX_Q:e}], got {q}"
        )));
    }
    Ok(())
}

/// Signed margin of `criterion`: negative certifies entanglement.
pub fn criterion_margin(rho: &DensityMatrix, cut: &BipartiteCut, criterion: Criterion) -> Result<f64> {
    match criterion {
        Criterion::CstreQinf => cstre_qinf_margin(rho, cut),
        Criterion::ArQinf => ar_qinf_margin(rho, cut),
        Criterion::Ppt => ppt_min_eigenvalue(rho, cut),
        Criterion::Reduction => Ok(reduction_operator(rho, cut)?.min_eigenvalue()),
        Criterion::VonNeumann => Ok(entropy::von_neumann_conditional(rho, cut)?.value),
        Criterion::CstreAt(q) => {
            check_finite_q(q)?;
            Ok(entropy::cstre(rho, cut, q)?.value)
        }
        Criterion::ArAt(q) => {
            check_finite_q(q)?;
            Ok(entropy::ar_conditional(rho, cut, q)?.value)
        }
        Criterion::RenyiAt(q) => {
            check_finite_q(q)?;
            Ok(entropy::sandwiched_renyi_conditional(rho, cut, q)?.value)
        }
    }
}

pub fn detected(margin: f64) -> bool {
    margin < -BOUNDARY_TOL
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdOptions {
    /// Search interval; the family domain when `None`.
    pub bracket: Option<(f64, f64)>,
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            bracket: None,
            tol: DEFAULT_TOL,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

impl ThresholdOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdResult {
    pub criterion: Criterion,
    /// Midpoint of the final bracket, or `None` when the detection status is
    /// the same at both ends of the search interval.
    pub x_star: Option<f64>,
    /// Final bracket (the search interval itself when there is no crossing).
    pub bracket: (f64, f64),
    pub search_interval: (f64, f64),
    pub tol: f64,
    pub iterations: usize,
    /// Margins at the two ends of the search interval.
    pub end_margins: (f64, f64),
}

/// Bisects the detection boundary of `criterion` along the family parameter.
pub fn threshold(
    family: &StateFamily,
    cut: &BipartiteCut,
    criterion: Criterion,
    opts: &ThresholdOptions,
) -> Result<ThresholdResult> {
    if !(opts.tol >= MIN_TOL && opts.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be at least {MIN_TOL:e}, got {}",
            opts.tol
        )));
    }
    let (dlo, dhi) = family.domain();
    let (mut lo, mut hi) = opts.bracket.unwrap_or((dlo, dhi));
    if !(lo < hi && lo >= dlo && hi <= dhi) {
        return Err(Error::InvalidParameter(format!(
            "bracket ({lo}, {hi}) must be increasing and inside [{dlo}, {dhi}]"
        )));
    }
    let margin = |x: f64| criterion_margin(&family.at(x)?, cut, criterion);
    let end_margins = (margin(lo)?, margin(hi)?);
    let search_interval = (lo, hi);
    let at_lo = detected(end_margins.0);
    if at_lo == detected(end_margins.1) {
        return Ok(ThresholdResult {
            criterion,
            x_star: None,
            bracket: search_interval,
            search_interval,
            tol: opts.tol,
            iterations: 0,
            end_margins,
        });
    }
    let mut iterations = 0;
    while hi - lo > opts.tol && iterations < opts.max_iterations {
        let mid = 0.5 * (lo + hi);
        if detected(margin(mid)?) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdResult {
        criterion,
        x_star: Some(0.5 * (lo + hi)),
        bracket: (lo, hi),
        search_interval,
        tol: opts.tol,
        iterations,
        end_margins,
    })
}

pub fn ppt_threshold(
    family: &StateFamily,
    cut: &BipartiteCut,
    opts: &ThresholdOptions,
) -> Result<ThresholdResult> {
    threshold(family, cut, Criterion::Ppt, opts)
}

/// Cheapest exact representation of a symmetric family for the `m : N-m`
/// cut whose side A is the first `m` qubits.
///
/// Entropic and reduction criteria only see the state inside
/// `Sym_m ⊗ Sym_{N-m}`, so the compressed family is exact for them. The
/// partial transpose is only basis independent on a side that is a single
/// qubit; when neither side is, the full `2^N` space is used.
pub fn symmetric_setup(
    family: &StateFamily,
    m: usize,
    criterion: Criterion,
) -> Result<(StateFamily, BipartiteCut)> {
    let n = family
        .symmetric_state()
        .map(|s| s.n_qubits())
        .ok_or_else(|| {
            Error::InvalidParameter(format!("{} is not a symmetric qubit family", family.kind()))
        })?;
    if m == 0 || m >= n {
        return Err(Error::InvalidCut(format!(
            "split {m} must lie in 1..={} for {n} qubits",
            n - 1
        )));
    }
    let base = family.compress(m)?;
    let compressed_cut = BipartiteCut::leading(1, 2)?;
    if criterion != Criterion::Ppt || m == 1 {
        return Ok((base, compressed_cut));
    }
    if n - m == 1 {
        // transpose the single-qubit side instead; the spectra agree
        return Ok((base, compressed_cut.swapped()));
    }
    if n > MAX_FULL_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "PPT on a {m}:{} cut needs the full space, limited to {MAX_FULL_QUBITS} qubits",
            n - m
        )));
    }
    let full = StateFamily::symmetric_noisy(family.symmetric_state().unwrap().clone())?;
    Ok((full, BipartiteCut::leading(m, n)?))
}

/// [`threshold`] on the `m : N-m` cut of a symmetric family, via [`symmetric_setup`].
pub fn symmetric_threshold(
    family: &StateFamily,
    m: usize,
    criterion: Criterion,
    opts: &ThresholdOptions,
) -> Result<ThresholdResult> {
    let (fam, cut) = symmetric_setup(family, m, criterion)?;
    threshold(&fam, &cut, criterion, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::StateFamily;

    fn singlet() -> DensityMatrix {
        // (|01⟩ - |10⟩)/√2
        let mut m = nalgebra::DMatrix::<f64>::zeros(4, 4);
        m[(1, 1)] = 0.5;
        m[(2, 2)] = 0.5;
        m[(1, 2)] = -0.5;
        m[(2, 1)] = -0.5;
        DensityMatrix::new(HermitianOperator::from_real(vec![2, 2], m).unwrap()).unwrap()
    }

    #[test]
    fn singlet_margins() {
        let cut = BipartiteCut::leading(1, 2).unwrap();
        let rho = singlet();
        assert!((reduction_operator(&rho, &cut).unwrap().min_eigenvalue() + 0.5).abs() < 1e-12);
        assert!((ppt_min_eigenvalue(&rho, &cut).unwrap() + 0.5).abs() < 1e-12);
        // σ = I/2 so σ^{-1/2} ρ σ^{-1/2} = 2ρ
        assert!((cstre_qinf_margin(&rho, &cut).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(cstre_qinf_verdict(&rho, &cut).unwrap(), Verdict::Negative);
    }

    #[test]
    fn separable_point_is_nonnegative() {
        for fam in [
            StateFamily::noisy_w(4).unwrap(),
            StateFamily::noisy_ghz(4).unwrap(),
            StateFamily::noisy_wwbar(4).unwrap(),
        ] {
            let rho = fam.at(0.0).unwrap();
            let cut = BipartiteCut::leading(1, 4).unwrap();
            assert_ne!(cstre_qinf_verdict(&rho, &cut).unwrap(), Verdict::Negative);
            assert!(reduction_operator(&rho, &cut).unwrap().min_eigenvalue() > -1e-12);
        }
    }

    #[test]
    fn w3_reduction_threshold() {
        let fam = StateFamily::noisy_w(3).unwrap();
        let cut = BipartiteCut::leading(1, 3).unwrap();
        let r = threshold(&fam, &cut, Criterion::Reduction, &ThresholdOptions::default()).unwrap();
        let expect = (-3.0 + 12f64.sqrt()) / 3.0;
        assert!((r.x_star.unwrap() - expect).abs() < 1e-7);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-8);
    }

    #[test]
    fn no_crossing_is_not_an_error() {
        let fam = StateFamily::noisy_w(3).unwrap();
        let cut = BipartiteCut::leading(1, 3).unwrap();
        let opts = ThresholdOptions {
            bracket: Some((0.0, 0.1)),
            ..ThresholdOptions::default()
        };
        let r = threshold(&fam, &cut, Criterion::CstreQinf, &opts).unwrap();
        assert_eq!(r.x_star, None);
        assert_eq!(r.iterations, 0);
        assert!(r.end_margins.0 >= 0.0 && r.end_margins.1 >= 0.0);
    }

    #[test]
    fn bad_options_are_rejected() {
        let fam = StateFamily::noisy_w(3).unwrap();
        let cut = BipartiteCut::leading(1, 3).unwrap();
        let tiny = ThresholdOptions::with_tol(1e-12);
        assert!(threshold(&fam, &cut, Criterion::Ppt, &tiny).is_err());
        let outside = ThresholdOptions {
            bracket: Some((0.5, 1.5)),
            ..ThresholdOptions::default()
        };
        assert!(threshold(&fam, &cut, Criterion::Ppt, &outside).is_err());
    }

    #[test]
    fn compressed_setup_matches_full_space() {
        let fam = StateFamily::noisy_w(5).unwrap();
        let opts = ThresholdOptions::default();
        for criterion in [Criterion::CstreQinf, Criterion::Ppt, Criterion::ArQinf] {
            for m in [1, 2, 4] {
                let fast = symmetric_threshold(&fam, m, criterion, &opts).unwrap();
                let full = threshold(&fam, &BipartiteCut::leading(m, 5).unwrap(), criterion, &opts)
                    .unwrap();
                let (a, b) = (fast.x_star.unwrap(), full.x_star.unwrap());
                assert!((a - b).abs() < 1e-7, "{criterion} m={m}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn criterion_names() {
        assert_eq!(Criterion::CstreQinf.to_string(), "cstre(q=inf)");
        assert_eq!(Criterion::ArAt(2.0).to_string(), "ar(q=2)");
        assert_eq!(Criterion::VonNeumann.to_string(), "vn");
        assert_eq!(Verdict::from_margin(-5e-10), Verdict::Boundary);
    }
}
