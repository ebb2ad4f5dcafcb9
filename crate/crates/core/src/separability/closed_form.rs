//! Closed-form spectra and thresholds for the noisy W and GHZ families on the
//! `1 : N-1` cut (side A is one qubit, conditioning on the other `N-1`).

use crate::error::{Error, Result};
use crate::separability::Criterion;
use crate::states::FamilyKind;

/// One distinct eigenvalue of the sandwiched matrix and how often it occurs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenBranch {
    pub value: f64,
    pub multiplicity: usize,
}

/// `b^e` with the pseudo-power convention `0^e = 0`.
fn ppow(base: f64, e: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        base.powf(e)
    }
}

fn check_args(n: usize, q: f64, x: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("closed forms need N ≥ 3, got {n}")));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain { x, lo: 0.0, hi: 1.0 });
    }
    Ok(())
}

/// Nonzero eigenvalues of `σ^a ρ_W(x) σ^a`, `a = (1-q)/2q`, as `[λ1 (N-2 fold), λ2, λ3, λ4]`.
pub fn closed_form_w_eigs(n: usize, q: f64, x: f64) -> Result<Vec<EigenBranch>> {
    check_args(n, q, x)?;
    let nf = n as f64;
    let e = (1.0 - q) / q;
    let w = (1.0 - x) / (nf + 1.0);
    let inv_root = (1.0 / nf).powf(1.0 / q);
    let lifted = 1.0 + (nf - 2.0) * x;
    Ok(vec![
        EigenBranch {
            value: w * ppow((1.0 - x) / nf, e),
            multiplicity: n - 2,
        },
        EigenBranch {
            value: w * (1.0 / nf).powf(e),
            multiplicity: 1,
        },
        EigenBranch {
            value: w * inv_root * ((nf - 2.0) * ppow(1.0 - x, e) + 2.0 * lifted.powf(e)),
            multiplicity: 1,
        },
        EigenBranch {
            value: (1.0 + nf * x) / (nf + 1.0)
                * inv_root
                * (1.0 + (nf - 1.0) * lifted.powf(e)),
            multiplicity: 1,
        },
    ])
}

/// Nonzero eigenvalues for the GHZ family, `[μ1 (N-3 fold), μ2, μ3, μ4 (2 fold)]`.
/// At `N = 3` the `μ1` branch does not exist and is omitted.
pub fn closed_form_ghz_eigs(n: usize, q: f64, x: f64) -> Result<Vec<EigenBranch>> {
    check_args(n, q, x)?;
    let nf = n as f64;
    let e = (1.0 - q) / q;
    let w = (1.0 - x) / (nf + 1.0);
    let marg = (2.0 + x * (nf - 2.0)) / (2.0 * nf);
    let mut out = Vec::with_capacity(4);
    if n > 3 {
        out.push(EigenBranch {
            value: w * ppow((1.0 - x) / nf, e),
            multiplicity: n - 3,
        });
    }
    out.push(EigenBranch {
        value: w * marg.powf(e),
        multiplicity: 1,
    });
    out.push(EigenBranch {
        value: (1.0 + nf * x) / (nf + 1.0) * marg.powf(e),
        multiplicity: 1,
    });
    out.push(EigenBranch {
        value: w
            * (1.0 / nf).powf(1.0 / q)
            * ((nf - 1.0) * ppow(1.0 - x, e) + (1.0 + (nf / 2.0 - 1.0) * x).powf(e)),
        multiplicity: 2,
    });
    Ok(out)
}

/// Branches expanded by multiplicity, sorted descending.
pub fn expand_branches(branches: &[EigenBranch]) -> Vec<f64> {
    let mut v: Vec<f64> = branches
        .iter()
        .flat_map(|b| std::iter::repeat_n(b.value, b.multiplicity))
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `Σ m_i λ_i`; equals one at `q = 1`.
pub fn weighted_sum(branches: &[EigenBranch]) -> f64 {
    branches.iter().map(|b| b.multiplicity as f64 * b.value).sum()
}

/// Analytic `1 : N-1` separability thresholds.
///
/// Supported: CSTRE(q→∞) on W (N ≥ 3), GHZ (N ≥ 3) and WW̄ (N ≥ 4); AR(q→∞) on
/// W (`1/(N+2)`), GHZ and WW̄ (N ≥ 4).
pub fn closed_form_thresholds(kind: FamilyKind, criterion: Criterion, n: usize) -> Result<f64> {
    let nf = n as f64;
    let unsupported = || {
        Error::InvalidParameter(format!(
            "no closed-form threshold for {kind} with {criterion} at N={n}"
        ))
    };
    if n < 3 {
        return Err(unsupported());
    }
    let ghz_like = 2.0 / (nf * nf + nf + 2.0);
    match (kind, criterion) {
        (FamilyKind::NoisyW, Criterion::CstreQinf) => {
            Ok((-nf + (2.0 * nf * (nf - 1.0)).sqrt()) / (nf * (nf - 2.0)))
        }
        (FamilyKind::NoisyW, Criterion::ArQinf) => Ok(1.0 / (nf + 2.0)),
        (FamilyKind::NoisyGhz, Criterion::CstreQinf | Criterion::ArQinf) => Ok(ghz_like),
        (FamilyKind::NoisyWWbar, Criterion::CstreQinf | Criterion::ArQinf) if n >= 4 => {
            Ok(ghz_like)
        }
        _ => Err(unsupported()),
    }
}

/// `k·term` with unit coefficients dropped.
fn times(k: usize, term: &str) -> String {
    if k == 1 {
        term.to_string()
    } else {
        format!("{k}{term}")
    }
}

/// Symbolic rendering of one row of the W eigenvalue table, `[λ1, λ2, λ3, λ4]`.
pub fn symbolic_w_row(n: usize) -> [String; 4] {
    let e = "^((1-q)/q)";
    let w = format!("((1-x)/{})", n + 1);
    let lifted = format!("(1+{})", times(n - 2, "x"));
    [
        format!("{w}((1-x)/{n}){e}"),
        format!("{w}(1/{n}){e}"),
        format!("{w}(1/{n})^(1/q)[{}{e} + 2{lifted}{e}]", times(n - 2, "(1-x)")),
        format!(
            "((1+{})/{})(1/{n})^(1/q)[1 + {}{e}]",
            times(n, "x"),
            n + 1,
            times(n - 1, &lifted)
        ),
    ]
}

/// Symbolic rendering of one GHZ row, `[μ1, μ2, μ3, μ4]`; `μ1` is `None` at `N = 3`.
pub fn symbolic_ghz_row(n: usize) -> [Option<String>; 4] {
    let e = "^((1-q)/q)";
    let w = format!("((1-x)/{})", n + 1);
    let marg = format!("((2+{})/{})", times(n - 2, "x"), 2 * n);
    let half = if n.is_multiple_of(2) {
        times(n / 2 - 1, "x")
    } else {
        format!("{}/2", times(n - 2, "x"))
    };
    [
        (n > 3).then(|| format!("{w}((1-x)/{n}){e}")),
        Some(format!("{w}{marg}{e}")),
        Some(format!("((1+{})/{}){marg}{e}", times(n, "x"), n + 1)),
        Some(format!(
            "{w}(1/{n})^(1/q)[{}{e} + (1+{half}){e}]",
            times(n - 1, "(1-x)")
        )),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w3_row_matches_table_entries() {
        // λ3 at N=3: ((1-x)/4)(1/3)^(1/q)[(1-x)^e + 2(1+x)^e]
        let (q, x) = (2.5, 0.2);
        let e = (1.0 - q) / q;
        let b = closed_form_w_eigs(3, q, x).unwrap();
        let l3 = (0.8 / 4.0) * (1f64 / 3.0).powf(1.0 / q) * (0.8f64.powf(e) + 2.0 * 1.2f64.powf(e));
        assert!((b[2].value - l3).abs() < 1e-15);
        assert_eq!(b[0].multiplicity, 1);
    }

    #[test]
    fn ghz3_has_no_first_branch() {
        let (q, x) = (3.0, 0.4);
        let b = closed_form_ghz_eigs(3, q, x).unwrap();
        assert_eq!(b.len(), 3);
        let e = (1.0 - q) / q;
        let expect = (1.0 - x) / 4.0 * ((2.0 + x) / 6.0f64).powf(e);
        assert!((b[0].value - expect).abs() < 1e-15);
        assert_eq!(symbolic_ghz_row(3)[0], None);
    }

    #[test]
    fn unit_weight_at_q_one() {
        for n in 3..=12 {
            for x in [0.0, 0.1, 0.5, 1.0] {
                let w = weighted_sum(&closed_form_w_eigs(n, 1.0, x).unwrap());
                let g = weighted_sum(&closed_form_ghz_eigs(n, 1.0, x).unwrap());
                assert!((w - 1.0).abs() < 1e-12 && (g - 1.0).abs() < 1e-12, "N={n} x={x}");
            }
        }
    }

    #[test]
    fn multiplicities_total_n_plus_one() {
        for n in 3..=9 {
            let w: usize = closed_form_w_eigs(n, 2.0, 0.3).unwrap().iter().map(|b| b.multiplicity).sum();
            let g: usize = closed_form_ghz_eigs(n, 2.0, 0.3).unwrap().iter().map(|b| b.multiplicity).sum();
            assert_eq!((w, g), (n + 1, n + 1));
        }
    }

    #[test]
    fn threshold_formulas() {
        let w = |n| closed_form_thresholds(FamilyKind::NoisyW, Criterion::CstreQinf, n).unwrap();
        assert!((w(3) - 0.1547).abs() < 5e-5);
        assert!((w(5) - 0.0883).abs() < 5e-5);
        assert!((w(6) - 0.07275).abs() < 5e-6);
        let g = closed_form_thresholds(FamilyKind::NoisyGhz, Criterion::CstreQinf, 3).unwrap();
        assert!((g - 2.0 / 14.0).abs() < 1e-15);
        assert!(closed_form_thresholds(FamilyKind::NoisyWWbar, Criterion::CstreQinf, 3).is_err());
        assert!(closed_form_thresholds(FamilyKind::NoisyW, Criterion::Ppt, 4).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(closed_form_w_eigs(2, 2.0, 0.1).is_err());
        assert!(closed_form_ghz_eigs(4, 0.0, 0.1).is_err());
        assert!(closed_form_ghz_eigs(4, 2.0, 1.5).is_err());
    }
}
