//! CSV ingestion: one `<NAME>.csv` per relation, header row matching the
//! declared attribute order, values interned as opaque strings.

use crate::query_file::QueryFile;
use pandaq_core::relalg::{degree, Database, Relation};
use pandaq_core::rational::count_within_pow2;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// String interner; values become dense `u32` ids.
#[derive(Default, Debug)]
pub struct Interner {
    by_value: BTreeMap<String, u32>,
    values: Vec<String>,
}

impl Interner {
    pub fn intern(&mut self, value: &str) -> u32 {
        if let Some(&id) = self.by_value.get(value) {
            return id;
        }
        let id = self.values.len() as u32;
        self.values.push(value.to_string());
        self.by_value.insert(value.to_string(), id);
        id
    }

    pub fn resolve(&self, id: u32) -> &str {
        &self.values[id as usize]
    }
}

#[derive(Debug)]
pub enum IngestError {
    Io(String),
    Format(String),
    Violations(Vec<String>),
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::Io(m) | IngestError::Format(m) => write!(f, "{m}"),
            IngestError::Violations(v) => {
                writeln!(f, "declared constraints violated by the data:")?;
                for line in v {
                    writeln!(f, "  {line}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for IngestError {}

/// Reads every declared relation from `dir`, validating measured sizes and
/// degrees against the declared constraints. With `trust`, violations are
/// reported on stderr but the data is accepted.
pub fn ingest_csv(
    dir: &Path,
    qf: &QueryFile,
    trust: bool,
) -> Result<(Database, Interner), IngestError> {
    let mut interner = Interner::default();
    let mut data: Database = BTreeMap::new();
    for decl in &qf.relations {
        let path = dir.join(format!("{}.csv", decl.name));
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(&path)
            .map_err(|e| IngestError::Io(format!("{}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| IngestError::Format(format!("{}: {e}", path.display())))?;
        let expected: Vec<&str> = decl
            .attrs
            .iter()
            .map(|&v| qf.attr_names[v].as_str())
            .collect();
        let got: Vec<&str> = headers.iter().collect();
        if got != expected {
            return Err(IngestError::Format(format!(
                "{}: header {:?} does not match declared attributes {:?}",
                path.display(),
                got,
                expected
            )));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record =
                record.map_err(|e| IngestError::Format(format!("{}: {e}", path.display())))?;
            if record.len() != decl.attrs.len() {
                return Err(IngestError::Format(format!(
                    "{}: row arity {} does not match header",
                    path.display(),
                    record.len()
                )));
            }
            rows.push(record.iter().map(|v| interner.intern(v)).collect());
        }
        let rel = Relation::new(decl.attrs.clone(), rows)
            .map_err(|e| IngestError::Format(format!("{}: {e}", path.display())))?;
        data.insert(decl.id, rel);
    }

    let mut violations = Vec::new();
    for decl in &qf.relations {
        if let Some(size) = decl.size {
            let actual = data[&decl.id].len() as u64;
            if actual > size {
                violations.push(format!(
                    "relation {} declared size {size}, data has {actual} rows",
                    decl.name
                ));
            }
        }
    }
    for c in &qf.rule.constraints {
        let Some(guard) = c.guard else { continue };
        let rel = &data[&guard];
        let measured = degree(rel, c.y, c.x)
            .map_err(|e| IngestError::Format(e.to_string()))?;
        let ok = match c.raw_bound {
            Some(n) => measured <= n,
            None => count_within_pow2(measured, c.log_bound.bits()),
        };
        if !ok {
            violations.push(format!(
                "deg({} | {}) measured {measured} exceeds the declared bound",
                qf.attr_set_names(c.y),
                qf.attr_set_names(c.x),
            ));
        }
    }
    if !violations.is_empty() {
        if trust {
            for v in &violations {
                eprintln!("warning (trusted anyway): {v}");
            }
        } else {
            return Err(IngestError::Violations(violations));
        }
    }
    Ok((data, interner))
}
