use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};
use tlchan_core::recoupling::SpectrumReport;
use tlchan_core::{Error, GroupKind, GroupSpec, Result};

pub const SCHEMA_VERSION: &str = "1";

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Fields shared by every JSON report.
pub struct Envelope<'a> {
    pub group: &'a GroupSpec,
    pub triple: Option<(usize, usize, usize)>,
    pub traced: Option<&'a str>,
    pub operation: &'a str,
    pub seed: Option<u64>,
    pub tolerances: Map<String, Value>,
}

impl Envelope<'_> {
    pub fn wrap(self, result: Value) -> Value {
        json!({
            "group": self.group.label(),
            "N": match self.group.kind {
                GroupKind::OnPlus => Value::from(self.group.n),
                GroupKind::Su2 => Value::Null,
            },
            "triple": self.triple.map(|(k, l, m)| vec![k, l, m]),
            "traced": self.traced,
            "operation": self.operation,
            "result": result,
            "tolerances": self.tolerances,
            "seed": self.seed,
            "version": SCHEMA_VERSION,
        })
    }
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are finite JSON");
    s.push('\n');
    s
}

pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut s = String::from("l,eigenvalue,multiplicity\n");
    for e in &report.entries {
        s.push_str(&format!("{},{:e},{}\n", e.l, e.eigenvalue, e.multiplicity));
    }
    s
}

/// Print to stdout, or write to `out` via a temporary file in the same directory and a rename.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("cannot write output: {e}"));
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io)?;
            stdout.flush().map_err(io)
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(text.as_bytes()).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}
