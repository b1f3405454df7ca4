//! Experiment reports: one JSON document plus one CSV file per table, each
//! stamped with hashes of the configuration and of the alphabet in use.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize)]
pub struct Stamp {
    pub config_sha256: String,
    pub alphabet_sha256: String,
    pub version: String,
}

impl Stamp {
    pub fn new(config: &Value, alphabet: &Value) -> Self {
        Stamp {
            config_sha256: sha256_hex(config.to_string().as_bytes()),
            alphabet_sha256: sha256_hex(alphabet.to_string().as_bytes()),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        };
        w.write_record(&self.header).map_err(|e| Error::Parse(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r.iter().map(cell)).map_err(|e| Error::Parse(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub kind: String,
    pub pass: bool,
    pub stamp: Stamp,
    pub config: Value,
    pub summary: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Writes `<kind>.json` and `<kind>_<table>.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let json = dir.join(format!("{}.json", self.kind));
        std::fs::write(&json, serde_json::to_string_pretty(&self.to_json())?)?;
        out.push(json);
        for t in &self.tables {
            let path = dir.join(format!("{}_{}.csv", self.kind, t.name));
            std::fs::write(&path, t.to_csv()?)?;
            out.push(path);
        }
        Ok(out)
    }
}
