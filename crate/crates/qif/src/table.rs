//! Rectangular result tables with provenance metadata; the unit of CSV/JSON
//! export shared by sweeps, predictions and plotting.

use std::collections::BTreeMap;

use crate::error::{QifError, Result};

/// Named numeric columns plus sorted key=value metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, String>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable {
            columns,
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(QifError::numerical(format!(
                "row width {} does not match {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn with_metadata(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_metadata(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// CSV with `# key=value` metadata lines, a header, then shortest
    /// round-trip float formatting (byte-reproducible across runs).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| {
                            (
                                c.clone(),
                                serde_json::Number::from_f64(*v)
                                    .map(serde_json::Value::Number)
                                    .unwrap_or(serde_json::Value::Null),
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        let body = serde_json::json!({
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_string_pretty(&body).expect("json encode")
    }

    /// Parse the CSV form back, including metadata lines.
    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut metadata = BTreeMap::new();
        let mut lines = s.lines().peekable();
        while let Some(line) = lines.peek() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
                lines.next();
            } else {
                break;
            }
        }
        let header = lines
            .next()
            .ok_or_else(|| QifError::config("table: missing header line"))?;
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        if columns.is_empty() || columns.iter().any(|c| c.is_empty()) {
            return Err(QifError::config("table: empty column name in header"));
        }
        // a leading '#' would read back as a metadata line
        if columns[0].starts_with('#') {
            return Err(QifError::config("table: header may not start with '#'"));
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|cell| {
                    cell.trim()
                        .parse::<f64>()
                        .map_err(|_| {
                            QifError::config(format!(
                                "table: non-numeric cell {cell:?} on data line {}",
                                lineno + 1
                            ))
                        })
                        .and_then(|v| {
                            if v.is_finite() {
                                Ok(v)
                            } else {
                                Err(QifError::config("table: non-finite cell"))
                            }
                        })
                })
                .collect::<Result<_>>()?;
            if row.len() != columns.len() {
                return Err(QifError::config(format!(
                    "table: ragged row on data line {}",
                    lineno + 1
                )));
            }
            rows.push(row);
        }
        Ok(ResultTable {
            columns,
            rows,
            metadata,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_preserves_everything() {
        let mut t = ResultTable::new(vec!["f_mhz".into(), "contrast".into()])
            .with_metadata("seed", 42u64)
            .with_metadata("experiment", "freq_response");
        t.push_row(vec![0.25, 0.9999]).unwrap();
        t.push_row(vec![1.35, 0.0017]).unwrap();
        let csv = t.to_csv();
        let back = ResultTable::from_csv_str(&csv).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn ragged_and_bad_rows_rejected() {
        assert!(ResultTable::from_csv_str("a,b\n1.0\n").is_err());
        assert!(ResultTable::from_csv_str("a,b\n1.0,x\n").is_err());
        assert!(ResultTable::from_csv_str("").is_err());
        let mut t = ResultTable::new(vec!["a".into()]);
        assert!(t.push_row(vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn header_that_would_read_back_as_metadata_is_rejected() {
        // fuzz finding: "\r#" used to parse into a table whose own CSV no
        // longer parsed
        assert!(ResultTable::from_csv_str("\r#").is_err());
        assert!(ResultTable::from_csv_str(" # x\n1.0\n").is_err());
    }

    #[test]
    fn column_lookup() {
        let mut t = ResultTable::new(vec!["x".into(), "y".into()]);
        t.push_row(vec![1.0, 10.0]).unwrap();
        t.push_row(vec![2.0, 20.0]).unwrap();
        assert_eq!(t.column("y").unwrap(), vec![10.0, 20.0]);
        assert!(t.column("z").is_none());
    }
}
