use std::fs;
use std::path::Path;

use nalgebra::DVector;
use qsep::entropy::MAX_Q;
use qsep::separability::symmetric_setup;
use qsep::states::io::load_state;
use qsep::states::symmetric::{SymmetricState, MAX_FULL_QUBITS};
use qsep::states::{generalized_ghz, w_state};
use qsep::{BipartiteCut, Criterion, DensityMatrix, StateFamily, C64};
use serde::Deserialize;

use crate::args::{CriterionName, FamilyName, SourceArgs};
use crate::output::{invalid, CliResult};

/// Order given on the command line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Finite(f64),
    Inf,
}

fn parse_number(s: &str, what: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| invalid(format!("{what}: cannot parse {s:?} as a number")))?;
    if !v.is_finite() {
        return Err(invalid(format!("{what}: {s:?} is not finite")));
    }
    Ok(v)
}

pub fn parse_orders(s: &str) -> CliResult<Vec<Order>> {
    let orders = s
        .split(',')
        .map(|t| {
            if t.trim().eq_ignore_ascii_case("inf") {
                return Ok(Order::Inf);
            }
            let q = parse_number(t, "--q")?;
            if !(q > 0.0 && q <= MAX_Q) {
                return Err(invalid(format!("--q: {q} outside (0, {MAX_Q:e}]")));
            }
            Ok(Order::Finite(q))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(orders)
}

pub fn parse_number_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(|t| parse_number(t, what)).collect()
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(invalid(format!("--x-grid: expected start:stop:step, got {s:?}")));
    };
    let (start, stop, step) = (
        parse_number(start, "--x-grid")?,
        parse_number(stop, "--x-grid")?,
        parse_number(step, "--x-grid")?,
    );
    if step <= 0.0 {
        return Err(invalid(format!("--x-grid: step must be positive, got {step}")));
    }
    if stop < start {
        return Err(invalid(format!("--x-grid: stop {stop} is below start {start}")));
    }
    let span = (stop - start) / step;
    if span > 1e7 {
        return Err(invalid(format!("--x-grid: {span:.0} points is too many")));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| (start + k as f64 * step).min(stop))
        .collect())
}

pub fn parse_range(s: &str, what: &str) -> CliResult<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| invalid(format!("{what}: expected lo:hi, got {s:?}")))?;
    Ok((parse_number(lo, what)?, parse_number(hi, what)?))
}

#[derive(Clone, Debug, PartialEq)]
pub enum CutArg {
    /// First `m` factors against the rest.
    Leading(usize),
    Explicit(Vec<usize>, Vec<usize>),
}

fn parse_indices(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| invalid(format!("--cut: bad factor index {t:?}")))
        })
        .collect()
}

pub fn parse_cut(s: &str, n_factors: usize) -> CliResult<CutArg> {
    if let Some((a, b)) = s.split_once('|') {
        return Ok(CutArg::Explicit(parse_indices(a)?, parse_indices(b)?));
    }
    let (m, rest) = s
        .split_once(':')
        .ok_or_else(|| invalid(format!("--cut: expected \"m:rest\" or \"0,2|1,3\", got {s:?}")))?;
    let m: usize = m
        .trim()
        .parse()
        .map_err(|_| invalid(format!("--cut: bad size {m:?}")))?;
    let rest = rest.trim();
    if m == 0 || m >= n_factors {
        return Err(invalid(format!(
            "--cut: side A size {m} must lie in 1..={} for {n_factors} factors",
            n_factors.saturating_sub(1)
        )));
    }
    if rest != "rest" {
        let k: usize = rest
            .parse()
            .map_err(|_| invalid(format!("--cut: bad size {rest:?}")))?;
        if m + k != n_factors {
            return Err(invalid(format!(
                "--cut: {m}:{k} does not cover {n_factors} factors"
            )));
        }
    }
    Ok(CutArg::Leading(m))
}

impl CutArg {
    pub fn to_cut(&self, n_factors: usize) -> CliResult<BipartiteCut> {
        let cut = match self {
            CutArg::Leading(m) => BipartiteCut::leading(*m, n_factors),
            CutArg::Explicit(a, b) => BipartiteCut::new(a.clone(), b.clone(), n_factors),
        };
        cut.map_err(invalid)
    }
}

pub fn criterion(name: CriterionName, order: Option<Order>) -> CliResult<Criterion> {
    use CriterionName as N;
    let needs_q = || invalid(format!("--criterion {}: --q is required", label(name)));
    let no_q = || invalid(format!("--criterion {}: --q does not apply", label(name)));
    Ok(match (name, order) {
        (N::Cstre, Some(Order::Inf)) => Criterion::CstreQinf,
        (N::Cstre, Some(Order::Finite(q))) => Criterion::CstreAt(q),
        (N::Ar, Some(Order::Inf)) => Criterion::ArQinf,
        (N::Ar, Some(Order::Finite(q))) => Criterion::ArAt(q),
        (N::Renyi, Some(Order::Finite(q))) => Criterion::RenyiAt(q),
        (N::Renyi, Some(Order::Inf)) => {
            return Err(invalid("--criterion renyi: q=inf is not supported; use cstre or ar"))
        }
        (N::Cstre | N::Ar | N::Renyi, None) => return Err(needs_q()),
        (N::Vn, None | Some(Order::Finite(1.0))) => Criterion::VonNeumann,
        (N::Ppt, None) => Criterion::Ppt,
        (N::Reduction, None) => Criterion::Reduction,
        (N::Vn | N::Ppt | N::Reduction, Some(_)) => return Err(no_q()),
    })
}

pub fn label(name: CriterionName) -> &'static str {
    use CriterionName as N;
    match name {
        N::Cstre => "cstre",
        N::Ar => "ar",
        N::Renyi => "renyi",
        N::Vn => "vn",
        N::Ppt => "ppt",
        N::Reduction => "reduction",
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PureFile {
    dims: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

fn load_pure(path: &Path) -> CliResult<(Vec<usize>, DVector<C64>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let file: PureFile = serde_json::from_str(&text)
        .map_err(|e| invalid(format!("malformed pure state {}: {e}", path.display())))?;
    let order: usize = file.dims.iter().product();
    if file.dims.is_empty() || order != file.amplitudes.len() {
        return Err(invalid(format!(
            "pure state dims {:?} do not match {} amplitudes",
            file.dims,
            file.amplitudes.len()
        )));
    }
    let v = DVector::from_iterator(order, file.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)));
    Ok((file.dims, v))
}

/// A parameterized family or one fixed matrix, with the cut to evaluate it on.
pub enum Resolved {
    Family {
        family: StateFamily,
        cut: BipartiteCut,
        label: String,
    },
    Fixed { state: DensityMatrix, cut: BipartiteCut },
}

impl Resolved {
    pub fn into_family(self, command: &str) -> CliResult<(StateFamily, BipartiteCut, String)> {
        match self {
            Resolved::Family { family, cut, label } => Ok((family, cut, label)),
            Resolved::Fixed { .. } => Err(invalid(format!(
                "{command} needs a parameterized --family, not a fixed --state-file"
            ))),
        }
    }
}

fn require_n(args: &SourceArgs, name: &str) -> CliResult<usize> {
    args.n
        .ok_or_else(|| invalid(format!("--family {name} requires --n")))
}

fn reject(flag: bool, what: &str, name: &str) -> CliResult<()> {
    if flag {
        return Err(invalid(format!("{what} does not apply to --family {name}")));
    }
    Ok(())
}

/// Builds the family named on the command line in full (uncompressed) form.
pub fn build_family(args: &SourceArgs, name: FamilyName) -> CliResult<StateFamily> {
    use FamilyName as F;
    let tag = format!("{name:?}").to_lowercase();
    let pure = args.pure.as_deref().map(load_pure).transpose()?;
    if !matches!(name, F::Qudit) {
        reject(args.d.is_some(), "--d", &tag)?;
    }
    if !matches!(name, F::Symmetric | F::Nonsymmetric | F::Qudit) {
        reject(pure.is_some(), "--pure", &tag)?;
    }
    let qubits = |dims: &[usize]| -> CliResult<usize> {
        if dims.iter().any(|&d| d != 2) {
            return Err(invalid(format!("--family {tag} needs qubit dims, got {dims:?}")));
        }
        if args.n.is_some_and(|n| n != dims.len()) {
            return Err(invalid("--n disagrees with the --pure dims"));
        }
        Ok(dims.len())
    };
    let family = match name {
        F::W => StateFamily::noisy_w(require_n(args, &tag)?),
        F::Ghz => StateFamily::noisy_ghz(require_n(args, &tag)?),
        F::Wwbar => StateFamily::noisy_wwbar(require_n(args, &tag)?),
        F::Symmetric => {
            let (dims, psi) =
                pure.ok_or_else(|| invalid("--family symmetric requires --pure"))?;
            let n = qubits(&dims)?;
            SymmetricState::from_full(n, &psi).and_then(StateFamily::symmetric_noisy)
        }
        F::Nonsymmetric => match pure {
            Some((dims, psi)) => {
                let n = qubits(&dims)?;
                StateFamily::nonsymmetric_noisy(n, psi)
            }
            None => {
                let n = require_n(args, &tag)?;
                w_state(n).and_then(|psi| StateFamily::nonsymmetric_noisy(n, psi))
            }
        },
        F::Qudit => match pure {
            Some((dims, psi)) => {
                let d = dims[0];
                if dims.iter().any(|&e| e != d) || args.d.is_some_and(|e| e != d) {
                    return Err(invalid(format!("qudit dims {dims:?} must all equal --d")));
                }
                if args.n.is_some_and(|n| n != dims.len()) {
                    return Err(invalid("--n disagrees with the --pure dims"));
                }
                StateFamily::qudit_noisy(dims.len(), d, psi)
            }
            None => {
                let n = require_n(args, &tag)?;
                let d = args
                    .d
                    .ok_or_else(|| invalid("--family qudit requires --d"))?;
                generalized_ghz(n, d).and_then(|psi| StateFamily::qudit_noisy(n, d, psi))
            }
        },
        F::Isotropic | F::Xstate => {
            reject(args.n.is_some(), "--n", &tag)?;
            Ok(if name == F::Isotropic {
                StateFamily::isotropic_qutrit()
            } else {
                StateFamily::qubit_qutrit_x()
            })
        }
    };
    family.map_err(invalid)
}

fn check_full_order(dims: &[usize]) -> CliResult<()> {
    let order: f64 = dims.iter().map(|&d| d as f64).product();
    if order > 2f64.powi(MAX_FULL_QUBITS as i32) {
        return Err(invalid(format!(
            "dense evaluation of dims {dims:?} exceeds the order limit 2^{MAX_FULL_QUBITS}"
        )));
    }
    Ok(())
}

/// Resolves the source and cut. `criterion` only matters for symmetric
/// families, whose cheapest exact representation depends on it.
pub fn resolve(args: &SourceArgs, criterion: Criterion) -> CliResult<Resolved> {
    if let Some(path) = &args.state_file {
        let state = load_state(path).map_err(invalid)?;
        let shape = parse_cut(&args.cut, state.dims().len())?;
        let cut = shape.to_cut(state.dims().len())?;
        return Ok(Resolved::Fixed { state, cut });
    }
    let name = args
        .family
        .ok_or_else(|| invalid("one of --family or --state-file is required"))?;
    let family = build_family(args, name)?;
    let dims = family.dims();
    let shape = parse_cut(&args.cut, dims.len())?;
    let label = match family.n_qubits() {
        Some(n) => format!("{}(n={n}) cut {}", family.kind(), args.cut),
        None => format!("{} cut {}", family.kind(), args.cut),
    };
    if let (Some(_), CutArg::Leading(m), false) =
        (family.symmetric_state(), &shape, args.full_space)
    {
        let (family, cut) = symmetric_setup(&family, *m, criterion).map_err(invalid)?;
        return Ok(Resolved::Family { family, cut, label });
    }
    check_full_order(&dims)?;
    let cut = shape.to_cut(dims.len())?;
    Ok(Resolved::Family { family, cut, label })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_include_the_endpoint() {
        let g = parse_grid("0:1:0.01").unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(parse_grid("0.1:0.1:0.5").unwrap(), vec![0.1]);
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(
            parse_orders("1,2.5,inf").unwrap(),
            vec![Order::Finite(1.0), Order::Finite(2.5), Order::Inf]
        );
        assert!(parse_orders("0").is_err());
        assert!(parse_orders("2e6").is_err());
        assert!(parse_orders("nan").is_err());
        assert!(parse_orders("two").is_err());
    }

    #[test]
    fn cuts() {
        assert_eq!(parse_cut("1:rest", 5).unwrap(), CutArg::Leading(1));
        assert_eq!(parse_cut("2:3", 5).unwrap(), CutArg::Leading(2));
        assert!(parse_cut("2:2", 5).is_err());
        assert!(parse_cut("0:rest", 5).is_err());
        assert!(parse_cut("5:rest", 5).is_err());
        let e = parse_cut("0,2|1,3", 4).unwrap();
        assert_eq!(e, CutArg::Explicit(vec![0, 2], vec![1, 3]));
        assert_eq!(e.to_cut(4).unwrap().a(), &[0, 2]);
        assert!(parse_cut("0,2|1", 4).unwrap().to_cut(4).is_err());
    }

    #[test]
    fn criteria_and_orders_combine() {
        use CriterionName as N;
        assert_eq!(criterion(N::Cstre, Some(Order::Inf)).unwrap(), Criterion::CstreQinf);
        assert_eq!(criterion(N::Ar, Some(Order::Finite(2.0))).unwrap(), Criterion::ArAt(2.0));
        assert_eq!(criterion(N::Vn, None).unwrap(), Criterion::VonNeumann);
        assert!(criterion(N::Cstre, None).is_err());
        assert!(criterion(N::Ppt, Some(Order::Inf)).is_err());
        assert!(criterion(N::Renyi, Some(Order::Inf)).is_err());
    }
}
