//! Row-oriented result emitters (CSV with a commented header, or JSON lines).

use std::io::Write;

use serde::Serialize;
use serde_json::json;

use crate::error::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

/// One (parameter point, metric) observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub param: String,
    pub param_value: String,
    pub label: String,
    pub metric: String,
    pub value: f64,
    pub error_bound: Option<f64>,
}

impl Row {
    pub fn new(param: &str, param_value: impl ToString, label: impl ToString, metric: &str, value: f64) -> Self {
        Row {
            param: param.to_string(),
            param_value: param_value.to_string(),
            label: label.to_string(),
            metric: metric.to_string(),
            value,
            error_bound: None,
        }
    }

    pub fn with_error(mut self, e: f64) -> Self {
        self.error_bound = Some(e);
        self
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes the report. `config` is embedded verbatim; `wall_clock` is the only
/// non-deterministic field.
pub fn write_report<W: Write, C: Serialize>(
    mut out: W,
    format: Format,
    command: &str,
    config: &C,
    rows: &[Row],
    wall_clock: f64,
) -> Result<()> {
    let config = serde_json::to_value(config).expect("config is serializable");
    match format {
        Format::Csv => {
            writeln!(out, "# multl1 {TOOL_VERSION}")?;
            writeln!(out, "# command: {command}")?;
            writeln!(out, "# config: {config}")?;
            writeln!(out, "# wall_clock_seconds: {wall_clock:.3}")?;
            writeln!(out, "param,param_value,label,metric,value,error_bound")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{:?},{}",
                    csv_field(&r.param),
                    csv_field(&r.param_value),
                    csv_field(&r.label),
                    csv_field(&r.metric),
                    r.value,
                    r.error_bound.map(|e| format!("{e:?}")).unwrap_or_default()
                )?;
            }
        }
        Format::Jsonl => {
            let header = json!({"type": "header", "tool": "multl1", "version": TOOL_VERSION, "command": command, "config": config});
            writeln!(out, "{header}")?;
            for r in rows {
                let mut v = serde_json::to_value(r).expect("row is serializable");
                v["type"] = json!("row");
                writeln!(out, "{v}")?;
            }
            writeln!(out, "{}", json!({"type": "trailer", "rows": rows.len(), "wall_clock_seconds": wall_clock}))?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = vec![Row::new("N", 256, "one", "l1", 1.5).with_error(0.25), Row::new("N", 512, "a,b", "l2", 2.0)];
        let mut buf = Vec::new();
        write_report(&mut buf, Format::Csv, "l1norm", &json!({"n": 512}), &rows, 0.1).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[4], "param,param_value,label,metric,value,error_bound");
        assert_eq!(lines[5], "N,256,one,l1,1.5,0.25");
        assert_eq!(lines[6], "N,512,\"a,b\",l2,2.0,");
    }

    #[test]
    fn jsonl_layout() {
        let rows = vec![Row::new("Q", 4, "f", "major_fraction", 0.5)];
        let mut buf = Vec::new();
        write_report(&mut buf, Format::Jsonl, "arcs-energy", &json!({}), &rows, 0.0).unwrap();
        let lines: Vec<serde_json::Value> =
            String::from_utf8(buf).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0]["type"], "header");
        assert_eq!(lines[1]["metric"], "major_fraction");
        assert_eq!(lines[2]["rows"], 1);
    }
}
