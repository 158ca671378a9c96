use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use addcomb::SCHEMA_VERSION;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    record: &'a str,
    #[serde(flatten)]
    data: &'a T,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub format: &'static str,
    pub records: usize,
    pub bytes: u64,
}

/// Collects the data files of one run under its output directory.
pub struct Sink {
    dir: PathBuf,
    jsonl: Vec<(String, Vec<u8>, usize)>,
    csv: Vec<(String, Vec<u8>, usize)>,
}

impl Sink {
    pub fn new(dir: PathBuf) -> Self {
        Sink {
            dir,
            jsonl: Vec::new(),
            csv: Vec::new(),
        }
    }

    /// Appends one record to `<name>.jsonl`.
    pub fn record<T: Serialize>(&mut self, name: &str, kind: &str, data: &T) -> io::Result<()> {
        let line = serde_json::to_vec(&Envelope {
            schema_version: SCHEMA_VERSION,
            record: kind,
            data,
        })?;
        let slot = match self.jsonl.iter().position(|(n, _, _)| n == name) {
            Some(i) => i,
            None => {
                self.jsonl.push((name.to_string(), Vec::new(), 0));
                self.jsonl.len() - 1
            }
        };
        let (_, buf, count) = &mut self.jsonl[slot];
        buf.extend_from_slice(&line);
        buf.push(b'\n');
        *count += 1;
        Ok(())
    }

    /// Writes `<name>.csv` with a leading `schema_version` column.
    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = vec!["schema_version"];
        head.extend_from_slice(header);
        w.write_record(&head)?;
        let version = SCHEMA_VERSION.to_string();
        for r in rows {
            w.write_record(std::iter::once(&version).chain(r))?;
        }
        let buf = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        self.csv.push((name.to_string(), buf, rows.len()));
        Ok(())
    }

    /// Flushes every collected file; returns their descriptions in write order.
    pub fn finish(self) -> io::Result<Vec<OutputFile>> {
        fs::create_dir_all(&self.dir)?;
        let mut out = Vec::new();
        for (name, buf, records, ext, format) in self
            .jsonl
            .into_iter()
            .map(|(n, b, r)| (n, b, r, "jsonl", "json-lines"))
            .chain(self.csv.into_iter().map(|(n, b, r)| (n, b, r, "csv", "csv")))
        {
            let file = format!("{name}.{ext}");
            let mut f = BufWriter::new(File::create(self.dir.join(&file))?);
            f.write_all(&buf)?;
            f.flush()?;
            out.push(OutputFile {
                file,
                format,
                records,
                bytes: buf.len() as u64,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    /// Arguments after the program name, without `--out-dir`.
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub threads: usize,
    pub out_dir: String,
    pub outputs: Vec<OutputFile>,
    pub exit_code: i32,
    pub wall_ms: u128,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        let mut buf = serde_json::to_vec_pretty(self)?;
        buf.push(b'\n');
        fs::write(dir.join("manifest.json"), buf)
    }
}

/// Drops `--out-dir <path>` and `--out-dir=<path>` from an argument list.
pub fn strip_out_dir(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out-dir" {
            skip = true;
            continue;
        }
        if a.starts_with("--out-dir=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}
