//! CSV and JSON artifacts.
//!
//! Every CSV starts with `#` comment lines: the artifact kind, the config
//! hash and the resolved config. The data follow with a header row.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::config::sha256_hex;
use crate::error::{LabError, Result};

/// Comment block written above the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub kind: String,
    pub config_hash: String,
    pub echo: Vec<String>,
}

impl Provenance {
    fn render(&self) -> String {
        let mut s = format!("# canetoads {}\n# config-sha256 = {}\n", self.kind, self.config_hash);
        for line in &self.echo {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}

/// Renders a CSV document to bytes.
pub fn render_csv(prov: &Provenance, columns: &[&str], rows: &[Vec<f64>]) -> Result<Vec<u8>> {
    let mut buf = prov.render().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let err = |e: csv::Error| LabError::format("<csv>", e);
        w.write_record(columns).map_err(err)?;
        for r in rows {
            w.write_record(r.iter().map(|v| v.to_string())).map_err(err)?;
        }
        w.flush().map_err(LabError::io("<csv>"))?;
    }
    Ok(buf)
}

/// Writes `bytes` and returns their SHA-256.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<String> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(LabError::io(dir))?;
    }
    fs::write(path, bytes).map_err(LabError::io(path))?;
    Ok(sha256_hex(bytes))
}

pub fn write_csv(path: &Path, prov: &Provenance, columns: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    write_bytes(path, &render_csv(prov, columns, rows)?)
}

/// A numeric table read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

pub fn parse_csv(text: &str, origin: &Path) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns = r.headers().map_err(|e| LabError::format(origin, e))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| LabError::format(origin, e))?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| LabError::format(origin, format!("`{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).map_err(LabError::io(path))?;
    parse_csv(&text, path)
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialise");
    s.push('\n');
    s.into_bytes()
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(LabError::io(path))?;
    serde_json::from_str(&text).map_err(|e| LabError::format(path, e))
}

/// Echo lines as a JSON object; defaulted keys are listed separately.
pub fn echo_json(echo: &[String]) -> Value {
    let mut map = serde_json::Map::new();
    let mut defaulted = Vec::new();
    for line in echo {
        let (body, is_default) = match line.strip_suffix("  # default") {
            Some(b) => (b, true),
            None => (line.as_str(), false),
        };
        if let Some((k, v)) = body.split_once(" = ") {
            let v = v.trim_matches('"');
            let value = v.parse::<f64>().map(|x| json!(x)).unwrap_or_else(|_| match v {
                "true" => json!(true),
                "false" => json!(false),
                _ => json!(v),
            });
            map.insert(k.to_string(), value);
            if is_default {
                defaulted.push(json!(k));
            }
        }
    }
    map.insert("defaulted".into(), Value::Array(defaulted));
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance { kind: "rho".into(), config_hash: "ab".into(), echo: vec!["model = \"local\"".into()] }
    }

    #[test]
    fn round_trip() {
        let rows = vec![vec![0.0, -1.5, 2.0], vec![0.25, 1e-300, f64::NAN]];
        let bytes = render_csv(&prov(), &["t", "x", "rho"], &rows).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("# canetoads rho\n# config-sha256 = ab\n# model = \"local\"\nt,x,rho\n"));
        let t = parse_csv(&text, Path::new("mem")).unwrap();
        assert_eq!(t.columns, ["t", "x", "rho"]);
        assert_eq!(t.rows[0], rows[0]);
        assert_eq!(t.rows[1][1], 1e-300);
        assert!(t.rows[1][2].is_nan());
        assert_eq!(t.column("rho"), Some(2));
    }

    #[test]
    fn bad_number_is_format_error() {
        let e = parse_csv("a,b\n1,zz\n", Path::new("mem")).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn echo_to_json() {
        let v = echo_json(&["model = \"local\"".into(), "dt = 0.05  # default".into(), "write = false".into()]);
        assert_eq!(v["model"], "local");
        assert_eq!(v["dt"], 0.05);
        assert_eq!(v["write"], false);
        assert_eq!(v["defaulted"], json!(["dt"]));
    }
}
