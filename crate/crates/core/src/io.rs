//! JSON encoding of observables, joint observables and states.
//!
//! A matrix is a list of rows; each entry is either a number or a pair
//! `[re, im]`.
//!
//! ```json
//! {"dim": 2, "outcomes": [1, -1], "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}
//! {"dim": 2, "outcomes": [[1, -1], ["a", "b"]], "effects": [m11, m12, m21, m22]}
//! {"dim": 2, "matrix": [[0.5, 0], [0, 0.5]]}
//! ```
//!
//! Joint effects are listed in row-major order of the outcome tuples.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};
use crate::objects::{BiObservable, MultiObservable, Observable, Outcome, State};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

type RawMatrix = Vec<Vec<Entry>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservable {
    dim: usize,
    outcomes: Vec<Outcome>,
    effects: Vec<RawMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJoint {
    dim: usize,
    outcomes: Vec<Vec<Outcome>>,
    effects: Vec<RawMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    dim: usize,
    matrix: RawMatrix,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let out: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse(format!("line {} column {} at `{}`: {}", inner.line(), inner.column(), path, inner))
    })?;
    Ok(out)
}

fn to_matrix(raw: &RawMatrix, dim: usize, field: &str) -> Result<ComplexMatrix> {
    if raw.len() != dim {
        return Err(Error::Parse(format!("`{field}`: expected {dim} rows, found {}", raw.len())));
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, row) in raw.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Parse(format!("`{field}[{i}]`: expected {dim} entries, found {}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            let (re, im) = match *e {
                Entry::Real(x) => (x, 0.0),
                Entry::Complex([x, y]) => (x, y),
            };
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("`{field}[{i}][{j}]`: non-finite entry")));
            }
            m[(i, j)] = c(re, im);
        }
    }
    Ok(m)
}

fn effects(raw: &[RawMatrix], dim: usize) -> Result<Vec<ComplexMatrix>> {
    if dim == 0 {
        return Err(Error::Parse("`dim`: must be positive".into()));
    }
    raw.iter().enumerate().map(|(k, m)| to_matrix(m, dim, &format!("effects[{k}]"))).collect()
}

fn context(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse(_) => e,
        other => Error::Parse(format!("`{field}`: {other}")),
    }
}

pub fn parse_observable(text: &str) -> Result<Observable> {
    let raw: RawObservable = parse(text)?;
    if raw.outcomes.len() != raw.effects.len() {
        return Err(Error::Parse(format!(
            "`effects`: {} effects for {} outcomes",
            raw.effects.len(),
            raw.outcomes.len()
        )));
    }
    let eff = effects(&raw.effects, raw.dim)?;
    Observable::new(raw.outcomes, eff).map_err(context("effects"))
}

pub fn parse_multi_observable(text: &str) -> Result<MultiObservable> {
    let raw: RawJoint = parse(text)?;
    let expected: usize = raw.outcomes.iter().map(|o| o.len()).product();
    if raw.outcomes.is_empty() || expected != raw.effects.len() {
        return Err(Error::Parse(format!(
            "`effects`: {} effects for {} outcome tuples",
            raw.effects.len(),
            expected
        )));
    }
    let eff = effects(&raw.effects, raw.dim)?;
    MultiObservable::new(raw.outcomes, eff).map_err(context("effects"))
}

pub fn parse_bi_observable(text: &str) -> Result<BiObservable> {
    let m = parse_multi_observable(text)?;
    if m.arity() != 2 {
        return Err(Error::Parse(format!("`outcomes`: expected 2 outcome sets, found {}", m.arity())));
    }
    m.to_bi().map_err(context("outcomes"))
}

pub fn parse_state(text: &str) -> Result<State> {
    let raw: RawState = parse(text)?;
    if raw.dim == 0 {
        return Err(Error::Parse("`dim`: must be positive".into()));
    }
    let m = to_matrix(&raw.matrix, raw.dim, "matrix")?;
    State::new(m).map_err(context("matrix"))
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array((0..m.ncols()).map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im])).collect())
            })
            .collect(),
    )
}

pub fn observable_to_json(o: &Observable) -> Value {
    serde_json::json!({
        "dim": o.dim(),
        "outcomes": o.outcomes(),
        "effects": o.effects().iter().map(matrix_value).collect::<Vec<_>>(),
    })
}

pub fn multi_observable_to_json(m: &MultiObservable) -> Value {
    serde_json::json!({
        "dim": m.dim(),
        "outcomes": m.outcome_sets(),
        "effects": m.effects().iter().map(matrix_value).collect::<Vec<_>>(),
    })
}

pub fn bi_observable_to_json(m: &BiObservable) -> Value {
    multi_observable_to_json(m.as_multi())
}

pub fn state_to_json(s: &State) -> Value {
    serde_json::json!({ "dim": s.dim(), "matrix": matrix_value(s.matrix()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_line_and_path() {
        let text = "{\"dim\": 2,\n \"outcomes\": [1, 2],\n \"effects\": [[[1, 0], [0, \"x\"]]]}";
        let err = parse_observable(text).unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("effects[0][1][1]"), "{err}");
        let short = "{\"dim\": 2, \"outcomes\": [1, 2], \"effects\": [[[1, 0], [0]], [[0, 0], [0, 1]]]}";
        let err = parse_observable(short).unwrap_err().to_string();
        assert!(err.contains("effects[0][1]"), "{err}");
    }

    #[test]
    fn round_trip() {
        let o = crate::spin::spin_observable([0.6, 0.0, 0.8]).unwrap();
        let back = parse_observable(&observable_to_json(&o).to_string()).unwrap();
        assert_eq!(back, o);
        let m = crate::spin::m_gamma(0.3).unwrap();
        let back = parse_bi_observable(&bi_observable_to_json(&m).to_string()).unwrap();
        assert_eq!(back.effects(), m.effects());
    }
}
