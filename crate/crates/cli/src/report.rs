//! Report documents and their canonical serialization: sorted keys, floats
//! with 17 significant digits, `-0` written as `0`, one trailing newline.

use std::io;

use multspec_core::Cplx;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

struct Canonical;

impl Formatter for Canonical {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        let v = if v == 0.0 { 0.0 } else { v };
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
}

pub fn canonical_bytes(value: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Canonical);
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    out
}

pub fn pair(z: Cplx<f64>) -> Value {
    json!([z.re, z.im])
}

pub fn pairs(v: &[Cplx<f64>]) -> Value {
    Value::Array(v.iter().map(|z| pair(*z)).collect())
}

/// What a run produced; serialized with [`ReportDocument::to_bytes`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub command: String,
    pub argv: Vec<String>,
    pub config: Map<String, Value>,
    pub results: Map<String, Value>,
    pub exit_status: i32,
    pub error: Option<Value>,
}

impl ReportDocument {
    pub fn new(command: &str, argv: &[String]) -> Self {
        ReportDocument {
            command: command.to_string(),
            argv: argv.to_vec(),
            config: Map::new(),
            results: Map::new(),
            exit_status: 0,
            error: None,
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "tool": { "name": "multspec", "version": env!("CARGO_PKG_VERSION") },
            "command": { "name": self.command, "argv": self.argv },
            "config": self.config,
            "results": self.results,
            "status": { "exit": self.exit_status, "error": self.error },
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        canonical_bytes(&self.to_value())
    }
}

pub fn emit_report(r: &ReportDocument) -> Vec<u8> {
    r.to_bytes()
}
