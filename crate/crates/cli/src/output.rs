//! JSON output: floats with 17 significant digits, non-finite values as
//! strings.

use std::io;

use qexp::json::MatrixJson;
use qexp::BlockMatrix;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// A finite float as a JSON number; `±∞` and NaN as `"inf"`, `"-inf"`,
/// `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map(Value::Number).expect("finite")
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn matrix(m: &BlockMatrix) -> Value {
    serde_json::to_value(MatrixJson::from_block_matrix(m)).expect("plain data")
}

/// Ordered JSON object builder.
#[derive(Default, Debug, Clone)]
pub struct Obj(Map<String, Value>);

impl Obj {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), v.into());
        self
    }

    pub fn f(self, key: &str, x: f64) -> Self {
        self.set(key, num(x))
    }

    pub fn insert(&mut self, key: &str, v: impl Into<Value>) {
        self.0.insert(key.to_string(), v.into());
    }
}

impl From<Obj> for Value {
    fn from(o: Obj) -> Value {
        Value::Object(o.0)
    }
}

struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value == 0.0 {
            // keeps the sign of −0 out of reports
            return w.write_all(b"0.0");
        }
        write!(w, "{value:.16e}")
    }
}

/// Serializes with [`SciFormatter`]; output is byte-stable for equal values.
pub fn to_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    v.serialize(&mut ser).expect("in-memory write");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_and_inf() {
        let v: Value = Obj::new().f("x", 0.1).f("y", f64::INFINITY).set("n", 3).into();
        assert_eq!(to_string(&v), r#"{"x":1.0000000000000001e-1,"y":"inf","n":3}"#);
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }
}
