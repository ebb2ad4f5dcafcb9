use std::fmt::Write as _;
use std::fs;

use qsep::checks::{acceptance_checks, closed_form_residual, special_case_checks, CheckRow};
use qsep::separability::closed_form::{symbolic_ghz_row, symbolic_w_row};
use qsep::separability::trace::check_trace_q;
use qsep::separability::{
    closed_form_thresholds, convergence_trace, criterion_margin, symmetric_threshold, threshold,
    TraceKind, MIN_TOL,
};
use qsep::states::io::{format_state, load_state};
use qsep::{BipartiteCut, Criterion, DensityMatrix, FamilyKind, StateFamily, ThresholdOptions, Verdict};
use rayon::prelude::*;

use crate::args::{CheckArgs, ConvertArgs, ScanArgs, ThresholdArgs, TraceArgs};
use crate::input::{
    build_family, criterion, parse_grid, parse_number_list, parse_orders, parse_range, resolve, Order, Resolved,
};
use crate::output::{check_destination, csv_row, emit, float, invalid, write_atomic, CliResult, Failure};

pub const SCAN_HEADER: [&str; 6] = ["x", "q", "criterion", "value", "verdict", "error"];

fn q_column(c: Criterion) -> String {
    c.q().map(float).unwrap_or_default()
}

/// Rows for one parameter value; a failure lands in the `error` column.
fn scan_rows(
    x: Option<f64>,
    state: qsep::Result<DensityMatrix>,
    cut: &BipartiteCut,
    criteria: &[Criterion],
) -> String {
    let x_col = x.map(float).unwrap_or_default();
    let mut out = String::new();
    for &c in criteria {
        let value = state
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|rho| criterion_margin(rho, cut, c).map_err(|e| e.to_string()));
        let (value, verdict, error) = match value {
            Ok(v) if v.is_finite() => (float(v), Verdict::from_margin(v).to_string(), String::new()),
            // the sign survives overflow, so the verdict is still sound
            Ok(v) if v.is_infinite() => (
                float(v),
                Verdict::from_margin(v).to_string(),
                "value overflows f64".into(),
            ),
            Ok(v) => (float(v), String::new(), "value is not a number".into()),
            Err(e) => (String::new(), String::new(), e),
        };
        let row = [x_col.clone(), q_column(c), c.name().into(), value, verdict, error];
        out.push_str(&csv_row(&row));
    }
    out
}

pub fn scan(args: ScanArgs) -> CliResult<()> {
    let orders: Vec<Option<Order>> = match &args.q {
        Some(s) => parse_orders(s)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let criteria = orders
        .into_iter()
        .map(|o| criterion(args.criterion, o))
        .collect::<CliResult<Vec<_>>>()?;
    if let Some(p) = &args.out {
        check_destination(p)?;
    }
    let resolved = resolve(&args.source, criteria[0])?;
    let mut csv = csv_row(&SCAN_HEADER);
    match resolved {
        Resolved::Family { family, cut, .. } => {
            let xs = match (&args.x_grid, &args.x) {
                (Some(g), _) => parse_grid(g)?,
                (None, Some(list)) => parse_number_list(list, "--x")?,
                (None, None) => return Err(invalid("scan over a family needs --x-grid or --x")),
            };
            let (lo, hi) = family.domain();
            if let Some(x) = xs.iter().find(|x| !(lo..=hi).contains(*x)) {
                return Err(invalid(format!("x = {x} outside family domain [{lo}, {hi}]")));
            }
            let blocks: Vec<String> = xs
                .par_iter()
                .map(|&x| scan_rows(Some(x), family.at(x), &cut, &criteria))
                .collect();
            blocks.iter().for_each(|b| csv.push_str(b));
        }
        Resolved::Fixed { state, cut, .. } => {
            if args.x_grid.is_some() || args.x.is_some() {
                return Err(invalid("--x-grid and --x do not apply to a fixed --state-file"));
            }
            csv.push_str(&scan_rows(None, Ok(state), &cut, &criteria));
        }
    }
    emit(args.out.as_deref(), &csv)
}

fn options(tol: f64, bracket: Option<(f64, f64)>) -> ThresholdOptions {
    ThresholdOptions {
        bracket,
        ..ThresholdOptions::with_tol(tol)
    }
}

pub const THRESHOLD_HEADER: [&str; 8] = [
    "source", "criterion", "x_star", "bracket_lo", "bracket_hi", "tol", "iterations", "crossing",
];

pub fn threshold_cmd(args: ThresholdArgs) -> CliResult<()> {
    let order = args.q.as_deref().map(parse_orders).transpose()?;
    let order = match order.as_deref() {
        None => None,
        Some([o]) => Some(*o),
        Some(_) => return Err(invalid("threshold takes a single --q")),
    };
    let c = criterion(args.criterion, order)?;
    let bracket = args
        .bracket
        .as_deref()
        .map(|b| parse_range(b, "--bracket"))
        .transpose()?;
    if let Some(p) = &args.out {
        check_destination(p)?;
    }
    let (family, cut, label) = resolve(&args.source, c)?.into_family("threshold")?;
    let r = threshold(&family, &cut, c, &options(args.tol, bracket))?;
    let x_star = r.x_star.map(float).unwrap_or_else(|| "none".into());
    println!(
        "criterion={} x_star={} bracket=[{},{}] tol={:e} iterations={}",
        r.criterion,
        x_star,
        float(r.bracket.0),
        float(r.bracket.1),
        r.tol,
        r.iterations
    );
    if let Some(path) = &args.out {
        let mut contents = match fs::read_to_string(path) {
            Ok(s) if !s.is_empty() => s,
            Ok(_) => csv_row(&THRESHOLD_HEADER),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => csv_row(&THRESHOLD_HEADER),
            Err(e) => return Err(invalid(format!("cannot read {}: {e}", path.display()))),
        };
        if !contents.ends_with('\n') {
            contents.push('\n');
        }
        contents.push_str(&csv_row(&[
            label,
            r.criterion.to_string(),
            x_star,
            float(r.bracket.0),
            float(r.bracket.1),
            format!("{:e}", r.tol),
            r.iterations.to_string(),
            r.x_star.is_some().to_string(),
        ]));
        write_atomic(path, contents.as_bytes())?;
    }
    Ok(())
}

const DEFAULT_TRACE_GRID: [f64; 14] = [
    1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1e3, 1e4, 1e5, 1e6,
];

fn trace_kind(name: &str) -> CliResult<TraceKind> {
    match name.trim().to_ascii_lowercase().as_str() {
        "cstre" => Ok(TraceKind::Cstre),
        "ar" => Ok(TraceKind::Ar),
        "renyi" => Ok(TraceKind::Renyi),
        other => Err(invalid(format!(
            "--criteria: {other:?} has no finite-q trace (use cstre, ar, renyi)"
        ))),
    }
}

pub fn trace(args: TraceArgs) -> CliResult<()> {
    let names: Vec<String> = args.criteria.split(',').map(|s| s.trim().to_ascii_lowercase()).collect();
    let kinds = names.iter().map(|n| trace_kind(n)).collect::<CliResult<Vec<_>>>()?;
    let qs = match &args.q {
        Some(s) => parse_number_list(s, "--q")?,
        None => DEFAULT_TRACE_GRID.to_vec(),
    };
    for &q in &qs {
        check_trace_q(q).map_err(invalid)?;
    }
    if !(args.tol >= MIN_TOL && args.tol.is_finite()) {
        return Err(invalid(format!("--tol must be at least {MIN_TOL:e}, got {}", args.tol)));
    }
    if let Some(p) = &args.out {
        check_destination(p)?;
    }
    let (family, cut, _) = resolve(&args.source, Criterion::CstreAt(2.0))?.into_family("trace")?;
    let opts = options(args.tol, None);
    let columns: Vec<Vec<Option<f64>>> = kinds
        .iter()
        .map(|&k| {
            qs.par_iter()
                .map(|&q| {
                    let t = convergence_trace(&family, &cut, k, &[q], &opts)?;
                    Ok(t.rows[0].x)
                })
                .collect::<qsep::Result<Vec<_>>>()
        })
        .collect::<qsep::Result<_>>()?;
    let mut header = vec!["q".to_string()];
    header.extend(names.iter().map(|n| format!("x_{n}")));
    let mut csv = csv_row(&header);
    for (i, &q) in qs.iter().enumerate() {
        let mut row = vec![float(q)];
        row.extend(
            columns
                .iter()
                .map(|col| col[i].map(float).unwrap_or_else(|| "none".into())),
        );
        csv.push_str(&csv_row(&row));
    }
    emit(args.out.as_deref(), &csv)
}

const RESIDUAL_LIMIT: f64 = 1e-9;
const TABLE_SAMPLES: [(f64, f64); 4] = [(1.5, 0.05), (2.0, 0.3), (5.0, 0.1), (20.0, 0.7)];

pub fn tables() -> CliResult<()> {
    let mut out = String::new();
    let e = "e = (1-q)/q";
    let _ = writeln!(out, "# W family: nonzero eigenvalues of the sandwiched matrix, 1:N-1 cut ({e})");
    for n in 3..=6 {
        let row = symbolic_w_row(n);
        let mult = [format!("x{}", n - 2), "x1".into(), "x1".into(), "x1".into()];
        for (k, (s, m)) in row.iter().zip(&mult).enumerate() {
            let _ = writeln!(out, "N={n} lambda{} ({m}) = {s}", k + 1);
        }
    }
    let _ = writeln!(out, "\n# GHZ family: nonzero eigenvalues of the sandwiched matrix, 1:N-1 cut");
    for n in 3..=6 {
        let row = symbolic_ghz_row(n);
        let mult = [format!("x{}", n.saturating_sub(3)), "x1".into(), "x1".into(), "x2".into()];
        for (k, (s, m)) in row.iter().zip(&mult).enumerate() {
            match s {
                Some(s) => {
                    let _ = writeln!(out, "N={n} mu{} ({m}) = {s}", k + 1);
                }
                None => {
                    let _ = writeln!(out, "N={n} mu{} = --", k + 1);
                }
            }
        }
    }

    let _ = writeln!(out, "\n# closed form vs dense spectrum, max abs deviation");
    let _ = writeln!(out, "N,q,x,residual_w,residual_ghz");
    let mut worst = 0.0f64;
    for n in 3..=6 {
        for (q, x) in TABLE_SAMPLES {
            let (w, g) = closed_form_residual(n, q, x)?;
            worst = worst.max(w).max(g);
            let _ = writeln!(out, "{n},{q},{x},{},{}", float(w), float(g));
        }
    }

    let _ = writeln!(out, "\n# 1:N-1 thresholds, closed form vs bisection");
    let _ = writeln!(out, "family,N,criterion,closed_form,bisection,difference");
    let opts = ThresholdOptions::default();
    let mut worst_threshold = 0.0f64;
    for (kind, ns) in [
        (FamilyKind::NoisyW, 3..=8),
        (FamilyKind::NoisyGhz, 3..=8),
        (FamilyKind::NoisyWWbar, 4..=8),
    ] {
        for n in ns {
            let family = match kind {
                FamilyKind::NoisyW => StateFamily::noisy_w(n)?,
                FamilyKind::NoisyGhz => StateFamily::noisy_ghz(n)?,
                _ => StateFamily::noisy_wwbar(n)?,
            };
            for c in [Criterion::CstreQinf, Criterion::ArQinf] {
                let exact = closed_form_thresholds(kind, c, n)?;
                let found = symmetric_threshold(&family, 1, c, &opts)?
                    .x_star
                    .ok_or_else(|| Failure::Numerical(format!("{kind} N={n} {c}: no crossing")))?;
                worst_threshold = worst_threshold.max((found - exact).abs());
                let _ = writeln!(
                    out,
                    "{kind},{n},{c},{},{},{}",
                    float(exact),
                    float(found),
                    float(found - exact)
                );
            }
        }
    }
    let _ = writeln!(out, "\nmax residual {} (limit {RESIDUAL_LIMIT:e})", float(worst));
    emit(None, &out)?;
    if worst > RESIDUAL_LIMIT {
        return Err(Failure::Check(format!(
            "closed-form residual {worst:e} exceeds {RESIDUAL_LIMIT:e}"
        )));
    }
    if worst_threshold > 1e-6 {
        return Err(Failure::Check(format!(
            "bisected threshold deviates from closed form by {worst_threshold:e}"
        )));
    }
    Ok(())
}

fn print_rows(title: &str, rows: &[CheckRow], out: &mut String) -> usize {
    let _ = writeln!(out, "# {title}");
    let mut failed = 0;
    for r in rows {
        if !r.passed {
            failed += 1;
        }
        let _ = writeln!(
            out,
            "[{}] {}: expected {} computed {} tolerance {:e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            float(r.expected),
            float(r.computed),
            r.tolerance
        );
    }
    failed
}

pub fn check(args: CheckArgs) -> CliResult<()> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(invalid(format!("--tol must be positive, got {}", args.tol)));
    }
    let mut out = String::new();
    let special = special_case_checks(args.tol)?;
    let mut total = special.len();
    let mut failed = print_rows("special cases", &special, &mut out);
    if !args.quick {
        let acceptance = acceptance_checks()?;
        total += acceptance.len();
        failed += print_rows("acceptance", &acceptance, &mut out);
    }
    let _ = writeln!(out, "{} of {total} checks passed", total - failed);
    emit(None, &out)?;
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} of {total} checks failed")));
    }
    Ok(())
}

pub fn convert(args: ConvertArgs) -> CliResult<()> {
    check_destination(&args.out)?;
    let state = match (&args.source.state_file, args.source.family) {
        (Some(path), _) => {
            if args.x.is_some() {
                return Err(invalid("--x does not apply to a fixed --state-file"));
            }
            load_state(path).map_err(invalid)?
        }
        (None, Some(name)) => {
            let x = args.x.ok_or_else(|| invalid("converting a family member needs --x"))?;
            // state files hold the physical matrix, never the compressed one
            build_family(&args.source, name)?.at(x)?
        }
        (None, None) => return Err(invalid("one of --family or --state-file is required")),
    };
    write_atomic(&args.out, format_state(&state).as_bytes())?;
    println!("dims={:?} order={} out={}", state.dims(), state.order(), args.out.display());
    Ok(())
}
