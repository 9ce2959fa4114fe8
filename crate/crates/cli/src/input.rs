//! Reading matrices and channels from files or inline JSON.

use std::path::Path;

use qexp::channels::Channel;
use qexp::json::{ChannelJson, MatrixJson};
use qexp::{BlockMatrix, HermitianElement, PositiveFunctional, SelfAdjointFunctional};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Parses `arg` as inline JSON when it starts with `{` or `[`, otherwise
/// reads it as a path.
pub fn load_value(arg: &str, field: &str) -> CliResult<Value> {
    let text = arg.trim_start();
    let content = if text.starts_with('{') || text.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|source| CliError::Io {
            path: arg.into(),
            source,
        })?
    };
    serde_json::from_str(&content).map_err(|e| CliError::parse(field, format!("malformed JSON: {e}")))
}

fn matrix_from_value(v: Value, field: &str) -> CliResult<BlockMatrix> {
    let mj: MatrixJson = serde_json::from_value(v).map_err(|e| CliError::parse(field, format!("does not match the matrix schema: {e}")))?;
    mj.to_block_matrix().map_err(|e| e.in_field(field).into())
}

pub fn matrix(arg: &str, field: &str) -> CliResult<BlockMatrix> {
    matrix_from_value(load_value(arg, field)?, field)
}

pub fn positive(arg: &str, field: &str) -> CliResult<PositiveFunctional> {
    PositiveFunctional::new(matrix(arg, field)?).map_err(|e| e.in_field(field).into())
}

pub fn hermitian(arg: &str, field: &str) -> CliResult<HermitianElement> {
    HermitianElement::new(matrix(arg, field)?).map_err(|e| e.in_field(field).into())
}

pub fn self_adjoint(arg: &str, field: &str) -> CliResult<SelfAdjointFunctional> {
    SelfAdjointFunctional::new(matrix(arg, field)?).map_err(|e| e.in_field(field).into())
}

pub fn channel(arg: &str, field: &str) -> CliResult<Channel> {
    let cj: ChannelJson = serde_json::from_value(load_value(arg, field)?)
        .map_err(|e| CliError::parse(field, format!("does not match the channel schema: {e}")))?;
    cj.to_channel().map_err(|e| e.in_field(field).into())
}

/// A JSON array of matrices, or an object `{"family": [...]}`.
pub fn hermitian_list(arg: &str, field: &str) -> CliResult<Vec<HermitianElement>> {
    let v = load_value(arg, field)?;
    let items = match v {
        Value::Array(items) => items,
        Value::Object(mut o) => match o.remove("family") {
            Some(Value::Array(items)) => items,
            _ => return Err(CliError::parse(field, "expected an array of matrices or {\"family\": [...]}")),
        },
        _ => return Err(CliError::parse(field, "expected an array of matrices")),
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let f = format!("{field}[{i}]");
            let m = matrix_from_value(item, &f)?;
            HermitianElement::new(m).map_err(|e| e.in_field(&f).into())
        })
        .collect()
}

/// Positive tolerance check.
pub fn tolerance(x: f64, field: &str) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::parse(field, format!("tolerance must be positive, got {x}")))
    }
}
