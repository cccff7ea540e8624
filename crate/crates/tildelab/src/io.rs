//! Structured-text state and operator files.
//!
//! ```json
//! {"dims": [2, 2], "kind": "pure", "amplitudes": [[0.7071067811865476e0, 0.0e0], ...]}
//! ```
//!
//! Mixed states use `"kind": "mixed"` and a row-major `"matrix"`; Hamiltonians
//! use `"kind": "operator"` and a `"matrix"` on the parties they act on.
//! Numbers are written with 17 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tildelab_core::{CMatrix, DensityOperator, HilbertDims, PureState, C64};

/// Amplitude norms further than this from 1 are rejected.
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("field `{field}`: {message}")]
    Field {
        field: &'static str,
        message: String,
    },

    #[error("field `{field}`: {source}")]
    Invalid {
        field: &'static str,
        source: tildelab_core::Error,
    },
}

/// Contents of a state file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFile {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl StateFile {
    pub fn dims(&self) -> &HilbertDims {
        match self {
            StateFile::Pure(p) => p.dims(),
            StateFile::Mixed(m) => m.dims(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            StateFile::Pure(_) => "pure",
            StateFile::Mixed(_) => "mixed",
        }
    }

    pub fn to_density(&self) -> DensityOperator {
        match self {
            StateFile::Pure(p) => p.to_density(),
            StateFile::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            StateFile::Pure(p) => Some(p),
            StateFile::Mixed(_) => None,
        }
    }
}

impl From<PureState> for StateFile {
    fn from(p: PureState) -> Self {
        StateFile::Pure(p)
    }
}

impl From<DensityOperator> for StateFile {
    fn from(m: DensityOperator) -> Self {
        StateFile::Mixed(m)
    }
}

/// Operator on a group of parties, e.g. a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFile {
    pub dims: HilbertDims,
    pub matrix: CMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    dims: Vec<usize>,
    kind: String,
    amplitudes: Option<Vec<[f64; 2]>>,
    matrix: Option<Vec<[f64; 2]>>,
}

fn parse_raw(text: &str) -> Result<Raw, FileError> {
    serde_json::from_str(text).map_err(|e| FileError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn dims_of(raw: &Raw) -> Result<HilbertDims, FileError> {
    HilbertDims::new(&raw.dims).map_err(|source| FileError::Invalid {
        field: "dims",
        source,
    })
}

fn complex(pairs: &[[f64; 2]]) -> Vec<C64> {
    pairs.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

fn take(
    field: &'static str,
    values: Option<Vec<[f64; 2]>>,
    expected: usize,
) -> Result<Vec<C64>, FileError> {
    let values = values.ok_or(FileError::Field {
        field,
        message: "missing".into(),
    })?;
    if values.len() != expected {
        return Err(FileError::Field {
            field,
            message: format!("expected {expected} entries, found {}", values.len()),
        });
    }
    if let Some(i) = values
        .iter()
        .position(|p| !(p[0].is_finite() && p[1].is_finite()))
    {
        return Err(FileError::Field {
            field,
            message: format!("entry {i} is not finite"),
        });
    }
    Ok(complex(&values))
}

fn forbid(
    field: &'static str,
    values: &Option<Vec<[f64; 2]>>,
    kind: &str,
) -> Result<(), FileError> {
    match values {
        Some(_) => Err(FileError::Field {
            field,
            message: format!("not allowed for kind `{kind}`"),
        }),
        None => Ok(()),
    }
}

pub fn parse_state(text: &str) -> Result<StateFile, FileError> {
    let raw = parse_raw(text)?;
    let dims = dims_of(&raw)?;
    let n = dims.total();
    match raw.kind.as_str() {
        "pure" => {
            forbid("matrix", &raw.matrix, "pure")?;
            let amp = take("amplitudes", raw.amplitudes, n)?;
            let psi =
                PureState::from_amplitudes(dims, &amp).map_err(|source| FileError::Invalid {
                    field: "amplitudes",
                    source,
                })?;
            if (psi.norm() - 1.0).abs() > NORM_TOLERANCE {
                return Err(FileError::Field {
                    field: "amplitudes",
                    message: format!("norm {} is not 1", psi.norm()),
                });
            }
            Ok(StateFile::Pure(psi))
        }
        "mixed" => {
            forbid("amplitudes", &raw.amplitudes, "mixed")?;
            let m = CMatrix::from_row_iterator(n, n, take("matrix", raw.matrix, n * n)?);
            DensityOperator::new(dims, m)
                .map(StateFile::Mixed)
                .map_err(|source| FileError::Invalid {
                    field: "matrix",
                    source,
                })
        }
        other => Err(FileError::Field {
            field: "kind",
            message: format!("expected `pure` or `mixed`, found `{other}`"),
        }),
    }
}

pub fn parse_operator(text: &str) -> Result<OperatorFile, FileError> {
    let raw = parse_raw(text)?;
    if raw.kind != "operator" {
        return Err(FileError::Field {
            field: "kind",
            message: format!("expected `operator`, found `{}`", raw.kind),
        });
    }
    forbid("amplitudes", &raw.amplitudes, "operator")?;
    let dims = dims_of(&raw)?;
    let n = dims.total();
    let matrix = CMatrix::from_row_iterator(n, n, take("matrix", raw.matrix, n * n)?);
    Ok(OperatorFile { dims, matrix })
}

fn read(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.into(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FileError> {
    std::fs::write(path, text).map_err(|source| FileError::Write {
        path: path.into(),
        source,
    })
}

/// Reads a state file and returns it with the raw bytes used for digests.
pub fn read_state(path: &Path) -> Result<(StateFile, String), FileError> {
    let text = read(path)?;
    Ok((parse_state(&text)?, text))
}

pub fn read_operator(path: &Path) -> Result<OperatorFile, FileError> {
    parse_operator(&read(path)?)
}

fn push_pairs<'a, I: Iterator<Item = &'a C64>>(out: &mut String, values: I) {
    out.push('[');
    for (i, z) in values.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "[{:.16e}, {:.16e}]", z.re, z.im).expect("string write");
    }
    out.push(']');
}

fn document(dims: &HilbertDims, kind: &str, field: &str, values: Vec<C64>) -> String {
    let mut out = String::new();
    let dims: Vec<String> = dims.as_slice().iter().map(|d| d.to_string()).collect();
    write!(
        out,
        "{{\n  \"dims\": [{}],\n  \"kind\": \"{kind}\",\n  \"{field}\": ",
        dims.join(", ")
    )
    .expect("string write");
    push_pairs(&mut out, values.iter());
    out.push_str("\n}\n");
    out
}

fn row_major(m: &CMatrix) -> Vec<C64> {
    (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| m[(r, c)]))
        .collect()
}

pub fn format_state(state: &StateFile) -> String {
    match state {
        StateFile::Pure(p) => document(
            p.dims(),
            "pure",
            "amplitudes",
            p.amplitudes().iter().copied().collect(),
        ),
        StateFile::Mixed(m) => document(m.dims(), "mixed", "matrix", row_major(m.matrix())),
    }
}

pub fn format_operator(op: &OperatorFile) -> String {
    document(&op.dims, "operator", "matrix", row_major(&op.matrix))
}

pub fn write_state(path: &Path, state: &StateFile) -> Result<(), FileError> {
    write_text(path, &format_state(state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tildelab_core::random::{random_mixed, random_pure};

    #[test]
    fn pure_round_trip_is_exact() {
        let psi = random_pure(&HilbertDims::new(&[2, 3]).unwrap(), 1);
        let text = format_state(&psi.clone().into());
        assert_eq!(parse_state(&text).unwrap(), StateFile::Pure(psi));
    }

    #[test]
    fn mixed_round_trip_is_exact() {
        let rho = random_mixed(&HilbertDims::new(&[2, 2]).unwrap(), 3, 2).unwrap();
        let text = format_state(&rho.clone().into());
        match parse_state(&text).unwrap() {
            StateFile::Mixed(m) => assert_eq!(m.matrix(), rho.matrix()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        let psi = PureState::ghz(2).unwrap();
        let text = format_state(&psi.into());
        assert!(text.contains("7.0710678118654746e-1") || text.contains("7.0710678118654757e-1"));
    }

    #[test]
    fn errors_carry_context() {
        let e = parse_state("{\"dims\": [2],\n \"kind\": \"pure\", \"amplitudes\": [[1, 0]]}")
            .unwrap_err();
        assert!(
            matches!(
                e,
                FileError::Field {
                    field: "amplitudes",
                    ..
                }
            ),
            "{e}"
        );
        let e =
            parse_state("{\"dims\": [2],\n \"kind\": \"pure\" \"amplitudes\": []}").unwrap_err();
        assert!(matches!(e, FileError::Syntax { line: 2, .. }), "{e}");
        let e = parse_state("{\"dims\": [2], \"kind\": \"odd\"}").unwrap_err();
        assert!(matches!(e, FileError::Field { field: "kind", .. }));
        let e =
            parse_state("{\"dims\": [2], \"kind\": \"pure\", \"amplitudes\": [[2, 0], [0, 0]]}")
                .unwrap_err();
        assert!(e.to_string().contains("norm"));
        let many = format!("{{\"dims\": {:?}, \"kind\": \"pure\"}}", vec![1usize; 17]);
        let e = parse_state(&many).unwrap_err();
        assert!(matches!(
            e,
            FileError::Invalid {
                field: "dims",
                source: tildelab_core::Error::TooManyParties(17)
            }
        ));
        let e = parse_state(
            "{\"dims\": [2], \"kind\": \"mixed\", \"matrix\": [[1,0],[0,0],[0,0],[1,0]]}",
        )
        .unwrap_err();
        assert!(matches!(
            e,
            FileError::Invalid {
                field: "matrix",
                ..
            }
        ));
        let e = parse_state("{\"dims\": [2], \"kind\": \"pure\", \"extra\": 1}").unwrap_err();
        assert!(e.to_string().contains("extra"));
    }

    #[test]
    fn operator_files() {
        let op = OperatorFile {
            dims: HilbertDims::new(&[2]).unwrap(),
            matrix: CMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(1.0, 0.0),
                    C64::new(0.0, -1.0),
                    C64::new(0.0, 1.0),
                    C64::new(-1.0, 0.0),
                ],
            ),
        };
        assert_eq!(parse_operator(&format_operator(&op)).unwrap(), op);
        let state = format_state(&PureState::ghz(2).unwrap().into());
        assert!(matches!(
            parse_operator(&state),
            Err(FileError::Field { field: "kind", .. })
        ));
    }
}
