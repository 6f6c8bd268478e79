//! Flat key/value reports rendered as aligned text or a JSON object.

use clap::ValueEnum;
use qcldpc::params::SystemParams;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    fields: Map<String, Value>,
    /// Extra rows printed after the fields in table form only.
    table_tail: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.set("command", command);
        r
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_owned(), value.into());
        self
    }

    /// Copy every top-level field of a serializable value, prefixing keys.
    pub fn extend_from<T: serde::Serialize>(&mut self, prefix: &str, value: &T) -> &mut Self {
        if let Ok(Value::Object(map)) = serde_json::to_value(value) {
            for (k, v) in map {
                self.fields.insert(format!("{prefix}{k}"), v);
            }
        }
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.set("seed", format!("{seed:#x}"))
    }

    pub fn params(&mut self, p: &SystemParams) -> &mut Self {
        self.set("n0", p.n0)
            .set("dv", p.dv)
            .set("p", p.p)
            .set("m", p.m)
            .set("t_prime", p.t_prime)
            .set("n", p.n())
            .set("k", p.k())
    }

    pub fn push_table_row(&mut self, row: String) {
        self.table_tail.push(row);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                serde_json::to_string_pretty(&self.fields).expect("plain JSON values") + "\n"
            }
            Format::Table => {
                let width = self.fields.keys().map(String::len).max().unwrap_or(0);
                let mut out = String::new();
                for (k, v) in &self.fields {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        Value::Number(n) => match n.as_f64() {
                            Some(f) if !n.is_i64() && !n.is_u64() => format!("{f:.2}"),
                            _ => n.to_string(),
                        },
                        other => other.to_string(),
                    };
                    out.push_str(&format!("{k:<width$}  {v}\n"));
                }
                for row in &self.table_tail {
                    out.push_str(row);
                    out.push('\n');
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keeps_insertion_order_and_is_flat() {
        let mut r = Report::new("analyze");
        r.seed(0xab).set("log2_wf", 152.98).set("threshold_w", 179);
        let text = r.render(Format::Json);
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["seed"], "0xab");
        assert!(parsed.as_object().unwrap().values().all(|v| !v.is_object()));
        let keys: Vec<&String> = parsed.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["command", "seed", "log2_wf", "threshold_w"]);
    }

    #[test]
    fn table_rounds_floats() {
        let mut r = Report::new("x");
        r.set("wf", 65.5712).set("w", 3);
        assert_eq!(
            r.render(Format::Table),
            "command  x\nwf       65.57\nw        3\n"
        );
    }
}
