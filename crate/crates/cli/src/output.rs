use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use tempfile::NamedTempFile;

/// Why a command stopped; each kind owns one exit code.
#[derive(Debug)]
pub enum Failure {
    Check(String),
    Invalid(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Check(_) => "check-failed",
            Failure::Invalid(_) => "invalid-input",
            Failure::Numerical(_) => "numerical-failure",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Invalid(m) | Failure::Numerical(m) => m,
        }
    }

    /// One JSON object on one line.
    pub fn line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            exit_code: u8,
            message: &'a str,
        }
        serde_json::to_string(&Line {
            error: self.kind(),
            exit_code: self.code(),
            message: self.message(),
        })
        .expect("plain struct serializes")
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

/// Anything raised while reading or validating input.
pub fn invalid(e: impl fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

impl From<qsep::Error> for Failure {
    fn from(e: qsep::Error) -> Self {
        use qsep::Error as E;
        match e {
            E::Numerical(_) | E::NotPsd { .. } | E::SupportViolation { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Fails early when the destination directory is missing, before any work is done.
pub fn check_destination(path: &Path) -> CliResult<()> {
    let dir = parent_dir(path);
    if !dir.is_dir() {
        return Err(invalid(format!("output directory {} does not exist", dir.display())));
    }
    if path.is_dir() {
        return Err(invalid(format!("output path {} is a directory", path.display())));
    }
    Ok(())
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Writes through a temporary sibling and renames, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let io_fail = |e: io::Error| invalid(format!("cannot write {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(parent_dir(path)).map_err(io_fail)?;
    tmp.write_all(contents).map_err(io_fail)?;
    tmp.as_file().sync_all().map_err(io_fail)?;
    tmp.persist(path).map_err(|e| io_fail(e.error))?;
    Ok(())
}

/// To `path` atomically, or to stdout.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| invalid(format!("cannot write to stdout: {e}")))
        }
    }
}

/// 17 significant digits, '.' separator, `inf`/`nan` spelled out.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// RFC 4180 quoting when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row<S: AsRef<str>>(fields: &[S]) -> String {
    let mut line = fields
        .iter()
        .map(|f| csv_field(f.as_ref()))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_and_ignore_locale() {
        for v in [0.1, 1.0 / 3.0, 2e-300, -7.25e12, 0.0] {
            let s = float(v);
            assert!(!s.contains(','));
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(float(f64::INFINITY), "inf");
    }

    #[test]
    fn fields_are_quoted_only_when_needed() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a, b"), "\"a, b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(csv_row(&["1", "x,y"]), "1,\"x,y\"\n");
    }

    #[test]
    fn error_line_is_single_json_object() {
        let f = Failure::Invalid("bad\ncut".into());
        let line = f.line();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["exit_code"], 2);
        assert_eq!(v["error"], "invalid-input");
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        let numerical: Failure = qsep::Error::Numerical("eig did not converge".into()).into();
        assert_eq!(numerical.code(), 3);
        let input: Failure = qsep::Error::InvalidCut("empty side".into()).into();
        assert_eq!(input.code(), 2);
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"first").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(check_destination(&dir.path().join("missing/out.csv")).is_err());
    }
}
