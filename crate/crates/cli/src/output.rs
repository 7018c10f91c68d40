use std::io;

use melscope::{ComplexMatrix, C64};
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Compact JSON with every float written to 17 significant digits.
struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        // Adding +0.0 maps -0.0 to 0.0.
        write!(writer, "{:.16e}", value + 0.0)
    }
}

pub fn to_json_string(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut ser).expect("Value serialisation is infallible");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Same digits as the JSON writer, for CSV cells.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v + 0.0)
    } else {
        v.to_string()
    }
}

/// Floats that may be infinite become the strings `"inf"` / `"-inf"`.
pub fn real(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// `[re, im]`.
pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector(v: &[C64]) -> Value {
    Value::Array(v.iter().copied().map(complex).collect())
}

/// Row-major nested arrays of `[re, im]`.
pub fn matrix(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array((0..m.cols()).map(|c| complex(m[(r, c)])).collect()))
            .collect(),
    )
}

pub struct CommandResult {
    pub command: &'static str,
    pub parameters: Map<String, Value>,
    pub status: String,
    pub payload: Value,
    pub seed: u64,
}

impl CommandResult {
    /// `elapsed_ms` is written last so everything before it is reproducible.
    pub fn render(self, elapsed_ms: u128) -> String {
        let mut doc = Map::new();
        doc.insert("command".into(), json!(self.command));
        doc.insert("parameters".into(), Value::Object(self.parameters));
        doc.insert("status".into(), json!(self.status));
        doc.insert("payload".into(), self.payload);
        doc.insert("seed".into(), json!(self.seed));
        doc.insert("elapsed_ms".into(), json!(elapsed_ms as u64));
        let mut s = to_json_string(&Value::Object(doc));
        s.push('\n');
        s
    }
}
