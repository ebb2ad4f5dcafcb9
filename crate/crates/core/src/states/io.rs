//! State files.
//!
//! One JSON object per file:
//!
//! ```text
//! {"dims": [d1, d2, ...], "matrix": [[[re, im], ...], ...]}
//! ```
//!
//! Rows are listed in order; entries are written with 17 significant digits so
//! that a save/load round trip is exact. Readers enforce squareness, factor
//! dimensions, Hermiticity, unit trace and positivity, each with its own error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, HermitianOperator, C64};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Parses a state document.
pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let rows = file.matrix.len();
    if rows == 0 {
        return Err(Error::Format("matrix has no rows".into()));
    }
    if let Some(bad) = file.matrix.iter().find(|r| r.len() != rows) {
        return Err(Error::NotSquare {
            rows,
            cols: bad.len(),
        });
    }
    let matrix = DMatrix::from_fn(rows, rows, |i, j| {
        let [re, im] = file.matrix[i][j];
        C64::new(re, im)
    });
    DensityMatrix::new(HermitianOperator::new(file.dims, matrix)?)
}

/// Serializes with 17 significant digits per real number.
pub fn format_state(rho: &DensityMatrix) -> String {
    let dims: Vec<String> = rho.dims().iter().map(|d| d.to_string()).collect();
    let mut out = format!("{{\n  \"dims\": [{}],\n  \"matrix\": [\n", dims.join(", "));
    let m = rho.matrix();
    for i in 0..m.nrows() {
        out.push_str("    [");
        for j in 0..m.ncols() {
            if j > 0 {
                out.push_str(", ");
            }
            let z = m[(i, j)];
            write!(out, "[{:.16e}, {:.16e}]", z.re, z.im).unwrap();
        }
        out.push(']');
        if i + 1 < m.nrows() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn load_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    parse_state(&std::fs::read_to_string(path)?)
}

/// Writes to a temporary file beside `path` and renames it into place.
pub fn save_state(rho: &DensityMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(format_state(rho).as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::StateFamily;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let fams = [
            StateFamily::noisy_wwbar(3).unwrap(),
            StateFamily::qubit_qutrit_x(),
            StateFamily::isotropic_qutrit(),
        ];
        for (i, fam) in fams.iter().enumerate() {
            let rho = fam.at(0.123456789).unwrap();
            let path = dir.path().join(format!("s{i}.json"));
            save_state(&rho, &path).unwrap();
            let back = load_state(&path).unwrap();
            assert_eq!(back.dims(), rho.dims());
            assert_eq!(back.matrix(), rho.matrix());
        }
    }

    #[test]
    fn hand_typed_x_state() {
        let x = 0.1;
        let e = |v: f64| format!("[{v}, 0]");
        let mut rows = vec![];
        let diag = [2.0, 1.0, 1.0, 1.0, 1.0, 2.0];
        for (i, d) in diag.iter().enumerate() {
            let row: Vec<String> = (0..6)
                .map(|j| {
                    if i == j {
                        e(d / 8.0)
                    } else if (i, j) == (0, 5) || (i, j) == (5, 0) {
                        e(8.0 * x / 8.0)
                    } else {
                        e(0.0)
                    }
                })
                .collect();
            rows.push(format!("[{}]", row.join(",")));
        }
        let text = format!("{{\"dims\":[2,3],\"matrix\":[{}]}}", rows.join(","));
        let rho = parse_state(&text).unwrap();
        let fam = StateFamily::qubit_qutrit_x().at(x).unwrap();
        assert_eq!(rho.matrix(), fam.matrix());
    }

    #[test]
    fn distinct_errors() {
        let trace = r#"{"dims":[2],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.4,0]]]}"#;
        match parse_state(trace) {
            Err(Error::Trace { trace }) => assert!((trace - 0.9).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        let dims = r#"{"dims":[3],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
        assert!(matches!(parse_state(dims), Err(Error::DimsMismatch { .. })));
        let psd = r#"{"dims":[2],"matrix":[[[1.5,0],[0,0]],[[0,0],[-0.5,0]]]}"#;
        assert!(matches!(parse_state(psd), Err(Error::NotPsd { .. })));
        let herm = r#"{"dims":[2],"matrix":[[[0.5,0],[0.2,0]],[[0,0],[0.5,0]]]}"#;
        assert!(matches!(parse_state(herm), Err(Error::NotHermitian { .. })));
        assert!(matches!(parse_state("{\"dims\": [2]"), Err(Error::Format(_))));
        let ragged = r#"{"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0]]]}"#;
        assert!(matches!(parse_state(ragged), Err(Error::NotSquare { .. })));
    }
}
