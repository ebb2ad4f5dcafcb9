//! Crossing point `x(q)` of a finite-`q` criterion, tracked over a grid of orders.

use crate::entropy::MAX_Q;
use crate::error::{Error, Result};
use crate::linalg::BipartiteCut;
use crate::separability::{threshold, Criterion, ThresholdOptions};
use crate::states::StateFamily;

/// Which finite-`q` functional to track.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TraceKind {
    Cstre,
    Ar,
    Renyi,
}

impl TraceKind {
    pub fn at(self, q: f64) -> Criterion {
        match self {
            TraceKind::Cstre => Criterion::CstreAt(q),
            TraceKind::Ar => Criterion::ArAt(q),
            TraceKind::Renyi => Criterion::RenyiAt(q),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub q: f64,
    /// `None` when the criterion does not change sign inside the bracket.
    pub x: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTrace {
    pub kind: TraceKind,
    pub rows: Vec<TraceRow>,
}

impl ConvergenceTrace {
    pub fn last_crossing(&self) -> Option<f64> {
        self.rows.iter().rev().find_map(|r| r.x)
    }
}

pub fn check_trace_q(q: f64) -> Result<()> {
    if !(q > 1.0 && q <= MAX_Q) {
        return Err(Error::InvalidParameter(format!(
            "trace orders must lie in (1, {MAX_Q:e}], got {q}"
        )));
    }
    Ok(())
}

pub fn convergence_trace(
    family: &StateFamily,
    cut: &BipartiteCut,
    kind: TraceKind,
    q_grid: &[f64],
    opts: &ThresholdOptions,
) -> Result<ConvergenceTrace> {
    for &q in q_grid {
        check_trace_q(q)?;
    }
    let rows = q_grid
        .iter()
        .map(|&q| {
            threshold(family, cut, kind.at(q), opts).map(|r| TraceRow { q, x: r.x_star })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTrace { kind, rows })
}
