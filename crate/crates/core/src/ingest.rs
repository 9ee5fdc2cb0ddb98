//! CSV ingestion of `(Z, Ŷ, Y)` records.
//!
//! Values are categorical strings taken verbatim (no trimming or numeric
//! parsing). Binarize numeric columns beforehand; for the UCI Adult data,
//! for example:
//!
//! ```text
//! awk -F', *' 'BEGIN{OFS=","; print "sex,income"} NF>=15 {print $10, ($15 ~ />50K/)}' adult.data > adult.csv
//! ```

use std::path::Path;

use crate::dist::{from_samples, JointDist, SampleRecord};
use crate::error::{Error, Result};

/// Prediction label used when no prediction column is given.
pub const DATASET_ONLY_LABEL: &str = "-";

/// Column names to read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvColumns {
    pub z: String,
    pub y: String,
    /// `None` selects dataset-only mode: every record gets the prediction
    /// [`DATASET_ONLY_LABEL`], so only `I(Z;Y)` is meaningful.
    pub yhat: Option<String>,
}

impl CsvColumns {
    pub fn new(z: &str, y: &str, yhat: Option<&str>) -> Self {
        Self {
            z: z.to_owned(),
            y: y.to_owned(),
            yhat: yhat.map(str::to_owned),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub dist: JointDist,
    pub records: usize,
    pub dataset_only: bool,
    /// Non-fatal findings, such as a column holding a single value.
    pub warnings: Vec<String>,
}

/// Reads records from a headered CSV file and estimates their joint
/// distribution with additive `smoothing`.
///
/// Errors name the offending row (1-based, header is row 1) and column.
pub fn ingest_csv(path: &Path, columns: &CsvColumns, smoothing: f64) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::IngestFile(format!("cannot open {}: {e}", path.display())))?;
    let header = reader.headers().map_err(|e| csv_error(e, "header"))?.clone();
    let find = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| Error::Ingest {
            row: 1,
            column: name.to_owned(),
            message: "column not found in header".into(),
        })
    };
    let iz = find(&columns.z)?;
    let iy = find(&columns.y)?;
    let iyh = columns.yhat.as_deref().map(find).transpose()?;

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(e, ""))?;
        let line = row.position().map_or(i + 2, |p| p.line() as usize);
        let cell = |idx: usize, name: &str| -> Result<String> {
            match row.get(idx) {
                Some(v) if !v.is_empty() => Ok(v.to_owned()),
                _ => Err(Error::Ingest {
                    row: line,
                    column: name.to_owned(),
                    message: "empty value".into(),
                }),
            }
        };
        let z = cell(iz, &columns.z)?;
        let y = cell(iy, &columns.y)?;
        let yhat = match (iyh, &columns.yhat) {
            (Some(idx), Some(name)) => cell(idx, name)?,
            _ => DATASET_ONLY_LABEL.to_owned(),
        };
        records.push(SampleRecord { z, y, yhat });
    }
    if records.is_empty() {
        return Err(Error::IngestFile(format!("{} has no data rows", path.display())));
    }

    let dist = from_samples(&records, smoothing)?;
    let mut warnings = Vec::new();
    let named = [(&columns.z, 0), (&columns.y, 2)]
        .into_iter()
        .chain(columns.yhat.as_ref().map(|n| (n, 1)));
    for (name, axis) in named {
        let alphabet = &dist.alphabets()[axis];
        if alphabet.len() == 1 {
            warnings.push(format!("column '{name}' holds the single value '{}'", alphabet.label(0)));
        }
    }
    Ok(Ingested {
        dist,
        records: records.len(),
        dataset_only: columns.yhat.is_none(),
        warnings,
    })
}

fn csv_error(e: csv::Error, column: &str) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    Error::Ingest {
        row,
        column: column.to_owned(),
        message: e.to_string(),
    }
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
    fn enumerated_cells_give_uniform_joint() {
        let f = write("z,y,yhat\na,0,p\na,1,p\nb,0,p\nb,1,p\n");
        let got = ingest_csv(f.path(), &CsvColumns::new("z", "y", Some("yhat")), 0.0).unwrap();
        assert_eq!(got.records, 4);
        assert_eq!(got.dist.shape(), [2, 1, 2]);
        assert!(got.dist.probs().iter().all(|&p| p == 0.25));
        assert_eq!(got.warnings.len(), 1);
        assert!(got.warnings[0].contains("yhat"));
    }

    #[test]
    fn empty_cell_names_row_and_column() {
        let f = write("z,y,yhat\na,0,1\nb,,1\n");
        match ingest_csv(f.path(), &CsvColumns::new("z", "y", Some("yhat")), 0.0) {
            Err(Error::Ingest { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "y");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_reported_on_header_row() {
        let f = write("z,y\na,0\n");
        match ingest_csv(f.path(), &CsvColumns::new("z", "y", Some("pred")), 0.0) {
            Err(Error::Ingest { row: 1, column, .. }) => assert_eq!(column, "pred"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_row_is_an_ingestion_error() {
        let f = write("z,y,yhat\na,0,1\nb,1\n");
        assert!(matches!(
            ingest_csv(f.path(), &CsvColumns::new("z", "y", Some("yhat")), 0.0),
            Err(Error::Ingest { row: 3, .. })
        ));
    }

    #[test]
    fn quoted_fields_follow_rfc4180() {
        let f = write("z,y\n\"a,1\",0\n\"b\"\"\",1\n");
        let got = ingest_csv(f.path(), &CsvColumns::new("z", "y", None), 0.0).unwrap();
        assert!(got.dataset_only);
        assert_eq!(got.dist.alphabets()[0].symbols(), ["a,1", "b\""]);
    }

    #[test]
    fn missing_file() {
        let err = ingest_csv(Path::new("/nonexistent/x.csv"), &CsvColumns::new("z", "y", None), 0.0);
        assert!(matches!(err, Err(Error::IngestFile(_))));
    }
}
