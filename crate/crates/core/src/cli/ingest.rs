//! CSV ingestion with feature-space inference.

use std::path::Path;

use crate::afa::BackgroundData;
use crate::error::{Error, Result};
use crate::model::{FeatureDescriptor, FeatureSpace};

#[derive(Debug, Clone)]
pub struct Ingested {
    pub space: FeatureSpace,
    pub background: BackgroundData,
    /// Whether the space was inferred from the data.
    pub inferred: bool,
}

impl Ingested {
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} rows, {} features ({})\n",
            self.background.len(),
            self.space.len(),
            if self.inferred {
                "inferred"
            } else {
                "declared"
            }
        );
        for f in self.space.features() {
            match (f.range(), f.categories()) {
                (Some((lo, hi)), _) => {
                    out.push_str(&format!("  {}: numeric [{lo}, {hi}]\n", f.name))
                }
                (_, Some(cats)) => out.push_str(&format!(
                    "  {}: categorical {{{}}}\n",
                    f.name,
                    cats.join(", ")
                )),
                _ => {}
            }
        }
        out
    }
}

pub fn ingest_csv(path: &Path, declared: Option<&FeatureSpace>) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Data(format!("{}: missing header", path.display())));
    }
    let mut cells: Vec<Vec<String>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => Error::Data(format!(
                "{}: ragged row {} has {len} fields, expected {expected_len}",
                path.display(),
                line + 1
            )),
            _ => Error::Csv(e),
        })?;
        cells.push(record.iter().map(str::to_string).collect());
    }
    if cells.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }

    let (space, inferred) = match declared {
        Some(space) => {
            if header != space.names() {
                return Err(Error::Data(format!(
                    "CSV columns [{}] do not match declared features [{}]",
                    header.join(", "),
                    space.names().join(", ")
                )));
            }
            (space.clone(), false)
        }
        None => (infer_space(&header, &cells)?, true),
    };
    let rows = cells
        .iter()
        .map(|r| space.parse_instance(r))
        .collect::<Result<Vec<_>>>()?;
    let background = BackgroundData::loaded(&space, rows)?;
    Ok(Ingested {
        space,
        background,
        inferred,
    })
}

fn infer_space(header: &[String], cells: &[Vec<String>]) -> Result<FeatureSpace> {
    let features = header
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let column: Vec<&str> = cells.iter().map(|r| r[k].as_str()).collect();
            let parsed: Vec<Option<f64>> = column
                .iter()
                .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect();
            let numeric = parsed.iter().filter(|v| v.is_some()).count();
            if numeric == column.len() {
                let (lo, hi) = parsed
                    .iter()
                    .flatten()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                        (lo.min(v), hi.max(v))
                    });
                if lo == hi {
                    return Err(Error::Data(format!(
                        "column `{name}` has a degenerate numeric range (min = max = {lo})"
                    )));
                }
                FeatureDescriptor::numeric(name.clone(), lo, hi)
            } else if numeric == 0 {
                let mut categories: Vec<String> = Vec::new();
                for s in column {
                    if !categories.iter().any(|c| c == s) {
                        categories.push(s.to_string());
                    }
                }
                FeatureDescriptor::categorical(name.clone(), categories)
            } else {
                Err(Error::Data(format!(
                    "column `{name}` mixes numeric and non-numeric values"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureSpace::new(features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn infers_numeric_and_categorical() {
        let f = write("a,b\n0.5,red\n1.5,blue\n-1,red\n");
        let ing = ingest_csv(f.path(), None).unwrap();
        assert!(ing.inferred);
        assert_eq!(ing.background.len(), 3);
        assert_eq!(ing.space.feature(0).range(), Some((-1.0, 1.5)));
        assert_eq!(
            ing.space.feature(1).categories().unwrap(),
            &["red".to_string(), "blue".to_string()]
        );
    }

    #[test]
    fn error_cases() {
        let constant = write("a,b\n1,0\n1,1\n");
        let err = ingest_csv(constant.path(), None).unwrap_err();
        assert!(err.to_string().contains("degenerate"), "{err}");

        let header_only = write("a,b\n");
        let err = ingest_csv(header_only.path(), None).unwrap_err();
        assert!(err.to_string().contains("no data rows"), "{err}");

        let ragged = write("a,b\n1,2\n3\n");
        let err = ingest_csv(ragged.path(), None).unwrap_err();
        assert!(err.to_string().contains("ragged"), "{err}");

        let mixed = write("a\n1\nx\n");
        let err = ingest_csv(mixed.path(), None).unwrap_err();
        assert!(err.to_string().contains("mixes"), "{err}");
    }

    #[test]
    fn declared_space_is_enforced() {
        let space = FeatureSpace::numeric(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let ok = write("x1,x2\n0,0.5\n1,1\n");
        let ing = ingest_csv(ok.path(), Some(&space)).unwrap();
        assert!(!ing.inferred);
        let out = write("x1,x2\n0,1.5\n");
        assert!(matches!(
            ingest_csv(out.path(), Some(&space)),
            Err(Error::OutOfRange { .. })
        ));
        let renamed = write("a,b\n0,0\n");
        assert!(ingest_csv(renamed.path(), Some(&space)).is_err());
    }
}
