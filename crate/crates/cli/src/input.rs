//! JSON input formats.

use std::fmt;

use lamicone::system::{validate_system, SystemSpec};
use lamicone::{parse_rational, BuiltinFamily, InverseConeSystem, Rational, RationalMatrix, StageRule};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::CliError;

/// Exact number in a file: a JSON integer, or a string holding an integer,
/// a decimal or `p/q`. JSON floats are refused because they are not exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Num(pub Rational);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NumVisitor;

        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a string such as \"7/22\" or \"0.125\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Err(E::custom(format!("float {v} is not exact; write it as a string, e.g. \"{v}\"")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                parse_rational(v).map(Num).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(NumVisitor)
    }
}

pub type RawMatrix = Vec<Vec<Num>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default)]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub matrices: Vec<RawMatrix>,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Periodic { matrices: Vec<RawMatrix> },
    Builtin { name: String },
    TriangularShift,
}

/// Input of `realize`: one matrix per stage.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StagesFile {
    pub stages: Vec<RawMatrix>,
}

pub fn to_matrix(raw: RawMatrix, what: &str) -> Result<RationalMatrix, CliError> {
    let rows = raw.into_iter().map(|r| r.into_iter().map(|n| n.0).collect()).collect();
    RationalMatrix::from_rows(rows).map_err(|e| CliError::Invariant(format!("{what}: {e}")))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, source: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{source}: {e}")))
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_system(text: &str, source: &str) -> Result<InverseConeSystem, CliError> {
    let file: SystemFile = parse_json(text, source)?;
    let matrices = file
        .matrices
        .into_iter()
        .enumerate()
        .map(|(k, m)| to_matrix(m, &format!("matrix {}", k + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let rule = match file.generator {
        None => None,
        Some(GeneratorSpec::Periodic { matrices }) => Some(StageRule::Periodic(
            matrices
                .into_iter()
                .enumerate()
                .map(|(k, m)| to_matrix(m, &format!("generator matrix {}", k + 1)))
                .collect::<Result<_, _>>()?,
        )),
        Some(GeneratorSpec::Builtin { name }) => Some(StageRule::Builtin(
            BuiltinFamily::from_name(&name).map_err(|e| CliError::Parse(format!("{source}: {e}")))?,
        )),
        Some(GeneratorSpec::TriangularShift) => Some(StageRule::TriangularShift),
    };
    validate_system(SystemSpec { dims: file.dims, matrices, rule }).map_err(|e| CliError::Invariant(e.to_string()))
}

/// Stage matrices for `realize`: `{"stages": [...]}` or a single bare matrix.
pub fn parse_stages(text: &str, source: &str) -> Result<Vec<RationalMatrix>, CliError> {
    let value: serde_json::Value = parse_json(text, source)?;
    let decoded = if value.is_object() {
        serde_json::from_value::<StagesFile>(value).map(|f| f.stages)
    } else {
        serde_json::from_value::<RawMatrix>(value).map(|m| vec![m])
    };
    let stages = decoded.map_err(|e| CliError::Parse(format!("{source}: {e}")))?;
    stages.into_iter().enumerate().map(|(k, m)| to_matrix(m, &format!("stage {}", k + 1))).collect()
}

/// A bare matrix, as read by `approx`.
pub fn parse_matrix(text: &str, source: &str) -> Result<RationalMatrix, CliError> {
    let raw: RawMatrix = parse_json(text, source)?;
    to_matrix(raw, "matrix")
}

pub fn parse_rational_arg(value: &str, flag: &str) -> Result<Rational, CliError> {
    parse_rational(value).map_err(|e| CliError::Parse(format!("--{flag}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lamicone::scalar::{int, ratio};

    #[test]
    fn explicit_system() {
        let text = r#"{"dims": [1, 2], "matrices": [[["1/2", 1]]]}"#;
        let sys = parse_system(text, "t").unwrap();
        assert_eq!(sys.transition(1).unwrap().row(0), &[ratio(1, 2), int(1)]);
    }

    #[test]
    fn generators() {
        let periodic = r#"{"generator": {"kind": "periodic", "matrices": [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]}}"#;
        assert_eq!(parse_system(periodic, "t").unwrap().dim(7), Some(2));
        let builtin = r#"{"generator": {"kind": "builtin", "name": "example-4.4"}}"#;
        assert_eq!(parse_system(builtin, "t").unwrap().dim(3), Some(4));
        let shift = r#"{"generator": {"kind": "triangular-shift"}}"#;
        assert_eq!(parse_system(shift, "t").unwrap().dim(5), Some(5));
    }

    #[test]
    fn parse_failures_are_exit_2() {
        for bad in [
            r#"{"dims": [1], "extra": 1}"#,
            r#"{"matrices": [[[0.5]]]}"#,
            r#"{"matrices": [[["1/0"]]]}"#,
            r#"{"generator": {"kind": "spiral"}}"#,
            r#"{"generator": {"kind": "builtin", "name": "nope"}}"#,
            "{",
        ] {
            assert_eq!(parse_system(bad, "t").unwrap_err().exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn invalid_systems_are_exit_3() {
        for bad in [
            r#"{}"#,
            r#"{"dims": [2, 3], "matrices": [[[1, 1], [1, 1]]]}"#,
            r#"{"dims": [1, 1], "matrices": [[[-1]]]}"#,
            r#"{"matrices": [[[1, 1], [1]]]}"#,
        ] {
            assert_eq!(parse_system(bad, "t").unwrap_err().exit_code(), 3, "{bad}");
        }
    }

    #[test]
    fn stage_files() {
        assert_eq!(parse_stages(r#"[[1, 1]]"#, "t").unwrap().len(), 1);
        assert_eq!(parse_stages(r#"{"stages": [[[1]], [[1]]]}"#, "t").unwrap().len(), 2);
        assert_eq!(parse_stages(r#"{"stages": []}"#, "t").unwrap().len(), 0);
    }
}
