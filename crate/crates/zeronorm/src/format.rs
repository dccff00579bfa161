//! The JSON instance file.
//!
//! ```json
//! { "m": 1, "n": 2, "l": 1,
//!   "A": [["1", "0.5"]], "B": [["-1", "0"]],
//!   "y": ["1"], "b": ["0"], "epsilon": "1/10" }
//! ```
//!
//! Every number is a string holding a decimal or a fraction `p/q`, parsed
//! exactly. With `"l": 0` the keys `"B"` and `"b"` may be omitted.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use zeronorm_core::rat::{format_rat, parse_rat};
use zeronorm_core::{MatQ, ProblemInstance, Rat, VecQ};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("value error: {0}")]
    Value(String),
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    m: usize,
    n: usize,
    l: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b_mat: Option<Vec<Vec<String>>>,
    y: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<String>>,
    epsilon: String,
}

fn number(token: &str) -> Result<Rat, FormatError> {
    parse_rat(token).map_err(|e| FormatError::Parse(e.to_string()))
}

fn vector(name: &str, tokens: &[String], len: usize) -> Result<VecQ, FormatError> {
    if tokens.len() != len {
        return Err(FormatError::Dimension(format!("{name} has {} entries, expected {len}", tokens.len())));
    }
    tokens.iter().map(|t| number(t)).collect()
}

fn matrix(name: &str, rows: &[Vec<String>], r: usize, c: usize) -> Result<MatQ, FormatError> {
    if rows.len() != r {
        return Err(FormatError::Dimension(format!("{name} has {} rows, expected {r}", rows.len())));
    }
    let mut data = Vec::with_capacity(r * c);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(FormatError::Dimension(format!(
                "{name} row {} has {} entries, expected {c}",
                i + 1,
                row.len()
            )));
        }
        for t in row {
            data.push(number(t)?);
        }
    }
    Ok(MatQ::from_vec(r, c, data))
}

pub fn parse_instance(text: &str) -> Result<ProblemInstance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    if file.m == 0 || file.n == 0 {
        return Err(FormatError::Dimension(format!("m and n must be positive, got m = {}, n = {}", file.m, file.n)));
    }
    let a = matrix("A", &file.a, file.m, file.n)?;
    let y = vector("y", &file.y, file.m)?;
    let (b_mat, b) = match (&file.b_mat, &file.b) {
        (Some(rows), Some(b)) => (matrix("B", rows, file.l, file.n)?, vector("b", b, file.l)?),
        (None, None) if file.l == 0 => (MatQ::zeros(0, file.n), Vec::new()),
        _ => return Err(FormatError::Dimension(String::from("\"B\" and \"b\" are required when l > 0"))),
    };
    let epsilon = number(&file.epsilon)?;
    ProblemInstance::new(a, b_mat, y, b, epsilon).map_err(|e| match e {
        zeronorm_core::Error::NegativeEpsilon => FormatError::Value(String::from("epsilon must be nonnegative")),
        other => FormatError::Dimension(other.to_string()),
    })
}

fn strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

fn rows(m: &MatQ) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| strings(m.row(r))).collect()
}

/// Pretty-printed instance file that parses back to the same instance.
pub fn serialize_instance(inst: &ProblemInstance) -> String {
    let file = InstanceFile {
        m: inst.m(),
        n: inst.n(),
        l: inst.l(),
        a: rows(inst.a()),
        b_mat: Some(rows(inst.b_mat())),
        y: strings(inst.y()),
        b: Some(strings(inst.b())),
        epsilon: format_rat(inst.epsilon()),
    };
    serde_json::to_string_pretty(&file).expect("instance serializes")
}

/// Parses a comma-separated list of numbers such as `"0,1,-1/2,0"`.
pub fn parse_point(text: &str, n: usize) -> Result<VecQ, FormatError> {
    let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
    if tokens.len() != n {
        return Err(FormatError::Dimension(format!("point has {} entries, expected {n}", tokens.len())));
    }
    tokens.into_iter().map(number).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use zeronorm_core::rat::{int, ratio};

    const EXAMPLE: &str = include_str!("../data/example.json");

    #[test]
    fn example_file() {
        let inst = parse_instance(EXAMPLE).unwrap();
        assert_eq!((inst.m(), inst.n(), inst.l()), (3, 4, 3));
        assert_eq!(*inst.epsilon(), ratio(1, 10));
        assert_eq!(inst.a()[(0, 2)], int(-2));
        assert_eq!(inst.b_mat()[(0, 3)], ratio(-5, 2));
    }

    #[test]
    fn round_trip() {
        let inst = parse_instance(EXAMPLE).unwrap();
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn short_row_is_dimension_error() {
        let text = r#"{"m":1,"n":4,"l":0,"A":[["1","2","3"]],"y":["1"],"epsilon":"0"}"#;
        assert!(matches!(parse_instance(text), Err(FormatError::Dimension(_))));
    }

    #[test]
    fn unconstrained_instance_without_b() {
        let text = r#"{"m":1,"n":2,"l":0,"A":[["1","1"]],"y":["2"],"epsilon":"0"}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.l(), 0);
        let missing = r#"{"m":1,"n":2,"l":1,"A":[["1","1"]],"y":["2"],"epsilon":"0"}"#;
        assert!(matches!(parse_instance(missing), Err(FormatError::Dimension(_))));
    }

    #[test]
    fn bad_tokens_and_values() {
        let bad = r#"{"m":1,"n":1,"l":0,"A":[["1e3"]],"y":["2"],"epsilon":"0"}"#;
        assert!(matches!(parse_instance(bad), Err(FormatError::Parse(_))));
        let neg = r#"{"m":1,"n":1,"l":0,"A":[["1"]],"y":["2"],"epsilon":"-0.1"}"#;
        assert!(matches!(parse_instance(neg), Err(FormatError::Value(_))));
        assert!(matches!(parse_instance("{"), Err(FormatError::Parse(_))));
        let numeric = r#"{"m":1,"n":1,"l":0,"A":[[1]],"y":["2"],"epsilon":"0"}"#;
        assert!(matches!(parse_instance(numeric), Err(FormatError::Parse(_))));
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("0, 1,-1/2,0", 4).unwrap(), vec![int(0), int(1), ratio(-1, 2), int(0)]);
        assert!(matches!(parse_point("1,2", 4), Err(FormatError::Dimension(_))));
        assert!(matches!(parse_point("1,x", 2), Err(FormatError::Parse(_))));
    }
}
