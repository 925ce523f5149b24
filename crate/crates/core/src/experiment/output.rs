//! CSV helpers, artifacts and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiment::config::RunConfig;

/// Version embedded as the first column of every CSV this crate writes.
pub const SCHEMA_VERSION: u32 = 1;

/// One output file held in memory until the run is complete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

/// Writes rows with a leading `schema_version` column.
pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["schema_version"];
        header.extend_from_slice(columns);
        writer.write_record(&header).expect("in-memory write");
        CsvTable { writer }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        let mut rec = vec![SCHEMA_VERSION.to_string()];
        rec.extend(fields);
        self.writer.write_record(&rec).expect("in-memory write");
    }

    pub fn finish(self, name: &str) -> Artifact {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        Artifact { name: name.to_string(), bytes }
    }
}

/// Shortest round-trip text of a float; empty for `None`.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// JSON lines, one serialized record per line.
pub fn jsonl<T: Serialize>(name: &str, records: &[T]) -> Result<Artifact> {
    let mut bytes = Vec::new();
    for r in records {
        serde_json::to_writer(&mut bytes, r).map_err(|e| Error::Io(e.to_string()))?;
        bytes.push(b'\n');
    }
    Ok(Artifact { name: name.to_string(), bytes })
}

#[derive(Clone, Debug, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub code_version: String,
    /// Budgets, caps and tolerances the run derived or used.
    pub derived: BTreeMap<String, serde_json::Value>,
    pub wall_time_seconds: f64,
    pub files: Vec<FileDigest>,
}

impl RunManifest {
    pub fn new(
        config: &RunConfig,
        derived: BTreeMap<String, serde_json::Value>,
        wall_time_seconds: f64,
        artifacts: &[Artifact],
    ) -> Self {
        RunManifest {
            config: config.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            derived,
            wall_time_seconds,
            files: artifacts
                .iter()
                .map(|a| FileDigest { name: a.name.clone(), bytes: a.bytes.len(), sha256: a.sha256() })
                .collect(),
        }
    }
}

/// Writes `manifest.json` first, then every artifact.
pub fn write_outputs(dir: &Path, manifest: &RunManifest, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let manifest_path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&manifest_path, text + "\n")?;
    let mut paths = vec![manifest_path];
    for a in artifacts {
        let p = dir.join(&a.name);
        std::fs::write(&p, &a.bytes)?;
        paths.push(p);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_schema_column() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.row(vec!["1".into(), fmt_opt(None)]);
        let a = t.finish("x.csv");
        assert_eq!(String::from_utf8(a.bytes).unwrap(), "schema_version,a,b\n1,1,\n");
    }

    #[test]
    fn digest_is_sha256() {
        let a = Artifact { name: "x".into(), bytes: b"abc".to_vec() };
        assert_eq!(a.sha256(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
