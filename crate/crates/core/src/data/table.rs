//! CSV ingestion: UTF-8, header row, `.` decimal, comma separator.

use std::path::Path;

use ndarray::Array2;

use super::{label_from_activity, ActivityRecord, DataError, Dataset};

/// Ingestion side report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    /// Rows dropped because a selected cell failed numeric parsing.
    pub dropped_rows: usize,
}

enum LabelKind<'a> {
    Binary(&'a str),
    /// Activity column scaled to nanomolar by the factor; labels via the
    /// pIC50 >= 6 threshold.
    Activity { column: &'a str, nm_per_unit: f64 },
}

/// Loads a CSV with a binary 0/1 label column.
///
/// `feature_columns = None` selects every column other than the label and id
/// columns that parses as numeric for at least one row; rows with
/// unparseable cells in selected columns are dropped and counted.
pub fn load_table(
    path: &Path,
    label_column: &str,
    feature_columns: Option<&[String]>,
    id_column: Option<&str>,
) -> Result<(Dataset, LoadReport), DataError> {
    load_impl(path, LabelKind::Binary(label_column), feature_columns, id_column)
}

/// Loads a CSV labeled through an activity column; `nm_per_unit` converts
/// the column's unit to nanomolar (1 for nM, 1e3 for uM).
pub fn load_table_activity(
    path: &Path,
    activity_column: &str,
    nm_per_unit: f64,
    feature_columns: Option<&[String]>,
    id_column: Option<&str>,
) -> Result<(Dataset, LoadReport), DataError> {
    load_impl(
        path,
        LabelKind::Activity {
            column: activity_column,
            nm_per_unit,
        },
        feature_columns,
        id_column,
    )
}

fn load_impl(
    path: &Path,
    label: LabelKind<'_>,
    feature_columns: Option<&[String]>,
    id_column: Option<&str>,
) -> Result<(Dataset, LoadReport), DataError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| DataError::Csv(e.to_string()))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();

    let column_index = |name: &str| -> Result<usize, DataError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };

    let label_name = match label {
        LabelKind::Binary(name) => name,
        LabelKind::Activity { column, .. } => column,
    };
    let label_idx = column_index(label_name)?;
    let id_idx = match id_column {
        Some(name) => Some(column_index(name)?),
        None => None,
    };

    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| DataError::Csv(e.to_string()))
        })
        .collect::<Result<_, _>>()?;

    let feature_idx: Vec<usize> = match feature_columns {
        Some(names) => names
            .iter()
            .map(|n| column_index(n))
            .collect::<Result<_, _>>()?,
        None => {
            // Auto-selection: keep columns, in header order, that parse as
            // numeric for at least one row. Fully textual columns (ids,
            // SMILES strings) are treated as metadata and skipped.
            (0..headers.len())
                .filter(|&i| i != label_idx && Some(i) != id_idx)
                .filter(|&i| {
                    rows.iter()
                        .any(|row| row.get(i).is_some_and(|c| c.trim().parse::<f64>().is_ok()))
                })
                .collect()
        }
    };
    if feature_idx.is_empty() {
        return Err(DataError::EmptyDataset);
    }

    let mut x_rows: Vec<Vec<f64>> = Vec::new();
    let mut y: Vec<u8> = Vec::new();
    let mut ids: Vec<String> = Vec::new();
    let mut dropped = 0usize;

    'rows: for (row_no, row) in rows.iter().enumerate() {
        let mut features = Vec::with_capacity(feature_idx.len());
        for &i in &feature_idx {
            match row.get(i).map(|c| c.trim().parse::<f64>()) {
                Some(Ok(v)) if v.is_finite() => features.push(v),
                _ => {
                    dropped += 1;
                    continue 'rows;
                }
            }
        }
        let label_cell = row.get(label_idx).map(|c| c.trim()).unwrap_or("");
        let parsed = match label_cell.parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => {
                dropped += 1;
                continue 'rows;
            }
        };
        let label_value = match label {
            LabelKind::Binary(_) => {
                if parsed == 0.0 {
                    0
                } else if parsed == 1.0 {
                    1
                } else {
                    return Err(DataError::NonBinaryLabel {
                        row: row_no,
                        value: label_cell.to_string(),
                    });
                }
            }
            LabelKind::Activity { nm_per_unit, .. } => label_from_activity(&ActivityRecord {
                id: row_no.to_string(),
                ic50_nm: parsed * nm_per_unit,
            })?,
        };
        let id = match id_idx {
            Some(i) => row.get(i).cloned().unwrap_or_else(|| row_no.to_string()),
            None => row_no.to_string(),
        };
        x_rows.push(features);
        y.push(label_value);
        ids.push(id);
    }

    if x_rows.is_empty() {
        return Err(DataError::EmptyDataset);
    }

    let n = x_rows.len();
    let d = feature_idx.len();
    let flat: Vec<f64> = x_rows.into_iter().flatten().collect();
    let x = Array2::from_shape_vec((n, d), flat).expect("row-major shape");
    let feature_names = feature_idx.iter().map(|&i| headers[i].clone()).collect();

    let dataset = Dataset::new(x, y, feature_names, ids)?;
    Ok((dataset, LoadReport { dropped_rows: dropped }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn loads_a_small_table() {
        let f = write_csv("id,f1,f2,label\na,1.0,2.0,0\nb,3.0,4.0,1\nc,5.0,6.0,0\n");
        let (ds, report) = load_table(f.path(), "label", None, Some("id")).unwrap();
        assert_eq!(ds.n_rows(), 3);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.y, vec![0, 1, 0]);
        assert_eq!(ds.ids, vec!["a", "b", "c"]);
        assert_eq!(report.dropped_rows, 0);
    }

    #[test]
    fn missing_label_column_errors() {
        let f = write_csv("f1,f2\n1,2\n");
        assert_eq!(
            load_table(f.path(), "label", None, None).unwrap_err(),
            DataError::MissingColumn("label".to_string())
        );
    }

    #[test]
    fn unparseable_rows_are_dropped_and_counted() {
        let f = write_csv("f1,label\n1.0,0\nNA,1\n2.0,1\n");
        let (ds, report) = load_table(f.path(), "label", None, None).unwrap();
        assert_eq!(ds.n_rows(), 2);
        assert_eq!(report.dropped_rows, 1);
    }

    #[test]
    fn non_binary_label_errors() {
        let f = write_csv("f1,label\n1.0,2\n");
        assert!(matches!(
            load_table(f.path(), "label", None, None),
            Err(DataError::NonBinaryLabel { .. })
        ));
    }

    #[test]
    fn textual_columns_are_skipped_in_auto_mode() {
        let f = write_csv("smiles,f1,label\nCCO,1.0,0\nCC,2.0,1\n");
        let (ds, _) = load_table(f.path(), "label", None, None).unwrap();
        assert_eq!(ds.feature_names, vec!["f1"]);
    }

    #[test]
    fn activity_labeling_applies_the_threshold() {
        let f = write_csv("f1,ic50\n1.0,500\n2.0,2000\n3.0,1000\n");
        let (ds, _) = load_table_activity(f.path(), "ic50", 1.0, None, None).unwrap();
        assert_eq!(ds.y, vec![1, 0, 1]);
    }

    #[test]
    fn activity_unit_factor_rescales_before_thresholding() {
        // Values in micromolar: 0.5 uM = 500 nM (active), 2 uM (inactive).
        let f = write_csv("f1,ic50\n1.0,0.5\n2.0,2.0\n");
        let (ds, _) = load_table_activity(f.path(), "ic50", 1e3, None, None).unwrap();
        assert_eq!(ds.y, vec![1, 0]);
    }

    #[test]
    fn empty_table_errors() {
        let f = write_csv("f1,label\n");
        assert_eq!(
            load_table(f.path(), "label", None, None).unwrap_err(),
            DataError::EmptyDataset
        );
    }

    #[test]
    fn explicit_feature_columns_are_respected() {
        let f = write_csv("f1,f2,label\n1,2,0\n3,4,1\n");
        let cols = vec!["f2".to_string()];
        let (ds, _) = load_table(f.path(), "label", Some(&cols), None).unwrap();
        assert_eq!(ds.feature_names, vec!["f2"]);
        assert_eq!(ds.x.column(0).to_vec(), vec![2.0, 4.0]);
    }
}
