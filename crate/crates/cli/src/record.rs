use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Column-ordered result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

/// One command invocation with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub params: Value,
    pub duration_secs: f64,
    pub payload: Table,
}

/// Float cell; non-finite values become `null`.
pub fn num(v: f64) -> Value {
    Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

pub fn int(v: u64) -> Value {
    Value::Number(v.into())
}

pub fn text(v: &str) -> Value {
    Value::String(v.to_string())
}

fn cell_to_csv(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (None, Some(i)) => i.to_string(),
            // Debug keeps a decimal point and round-trips exactly
            _ => format!("{:?}", n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn cell_from_csv(s: &str) -> Value {
    if s.is_empty() {
        return Value::Null;
    }
    if s == "true" || s == "false" {
        return Value::Bool(s == "true");
    }
    if s.bytes().all(|b| b.is_ascii_digit() || b == b'-') {
        if let Ok(u) = s.parse::<u64>() {
            return int(u);
        }
        if let Ok(i) = s.parse::<i64>() {
            return Value::Number(i.into());
        }
    }
    match s.parse::<f64>() {
        Ok(f) if f.is_finite() => num(f),
        _ => text(s),
    }
}

impl RunRecord {
    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Metadata as `# key: value` lines, then the table.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# version: {}\n", self.version));
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# duration_secs: {:?}\n", self.duration_secs));
        out.push_str(&format!("# params: {}\n", serde_json::to_string(&self.params)?));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.payload.columns)?;
        for row in &self.payload.rows {
            w.write_record(row.iter().map(cell_to_csv))?;
        }
        let body = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        out.push_str(&String::from_utf8_lossy(&body));
        Ok(out)
    }

    pub fn from_csv(s: &str) -> Result<Self, CliError> {
        let mut meta = std::collections::HashMap::new();
        let mut body = String::new();
        for line in s.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                if let Some((k, v)) = rest.split_once(": ") {
                    meta.insert(k.to_string(), v.to_string());
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let get = |k: &str| {
            meta.get(k)
                .cloned()
                .ok_or_else(|| CliError::Parse(format!("missing '{k}' line")))
        };
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(cell_from_csv).collect()))
            .collect::<Result<_, _>>()?;
        Ok(RunRecord {
            command: get("command")?,
            version: get("version")?,
            seed: get("seed")?.parse().map_err(|_| CliError::Parse("bad seed".into()))?,
            duration_secs: get("duration_secs")?
                .parse()
                .map_err(|_| CliError::Parse("bad duration".into()))?,
            params: serde_json::from_str(&get("params")?)?,
            payload: Table { columns, rows },
        })
    }
}
