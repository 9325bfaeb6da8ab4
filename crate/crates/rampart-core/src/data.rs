//! Dense tabular containers shared by every other module.
//!
//! A [`Dataset`] is a fully materialized N x M feature matrix plus a response
//! vector; [`TrueImportance`] carries ground-truth importance magnitudes and
//! the 0-based ranks derived from them by the counting rule in [`true_ranks`].

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Prediction task kind. Classification is restricted to binary 0/1 labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Regression,
    Classification,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Regression => write!(f, "regression"),
            Task::Classification => write!(f, "classification"),
        }
    }
}

/// An immutable dataset: observations in rows, features in columns.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DVector<f64>,
    task: Task,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset and validates it (finiteness, matching lengths,
    /// binary labels under classification).
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, task: Task) -> Result<Self> {
        let ds = Self {
            x,
            y,
            task,
            feature_names: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Attaches one name per feature column.
    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                what: "feature names",
                expected: self.n_features(),
                got: names.len(),
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Number of observations N.
    pub fn n_obs(&self) -> usize {
        self.x.nrows()
    }

    /// Number of features M.
    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    /// Checks every dataset invariant, reporting the first offending index.
    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.x.nrows(), self.x.ncols());
        if n == 0 || m == 0 {
            return Err(Error::EmptyDataset { rows: n, cols: m });
        }
        if self.y.len() != n {
            return Err(Error::DimensionMismatch {
                what: "response length",
                expected: n,
                got: self.y.len(),
            });
        }
        for col in 0..m {
            for row in 0..n {
                if !self.x[(row, col)].is_finite() {
                    return Err(Error::NonFiniteEntry { row, col });
                }
            }
        }
        for (index, &v) in self.y.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue {
                    what: "response",
                    index,
                });
            }
            if self.task == Task::Classification && v != 0.0 && v != 1.0 {
                return Err(Error::NonBinaryLabel { index, value: v });
            }
        }
        Ok(())
    }

    /// FNV-1a hash over the raw matrix and response bits. Used by the harness
    /// to log that all methods within a trial consumed the same data.
    pub fn checksum(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut eat = |v: f64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        for row in 0..self.x.nrows() {
            for col in 0..self.x.ncols() {
                eat(self.x[(row, col)]);
            }
        }
        for &v in self.y.iter() {
            eat(v);
        }
        h
    }

    /// Reads a dataset from CSV: one observation per row, response in the
    /// last column. `has_header` controls whether the first row carries
    /// column names (all but the last become feature names).
    pub fn from_csv<R: Read>(reader: R, has_header: bool, task: Task) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let feature_names = if has_header {
            let headers = rdr.headers()?.clone();
            if headers.len() < 2 {
                return Err(Error::CsvRow {
                    line: 1,
                    msg: format!("need at least 2 columns, got {}", headers.len()),
                });
            }
            Some(
                headers
                    .iter()
                    .take(headers.len() - 1)
                    .map(str::to_owned)
                    .collect::<Vec<_>>(),
            )
        } else {
            None
        };

        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        let mut width: Option<usize> = None;
        for record in rdr.records() {
            let record = record?;
            let line = record
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(rows.len() + 1);
            if record.len() < 2 {
                return Err(Error::CsvRow {
                    line,
                    msg: format!("need at least 2 columns, got {}", record.len()),
                });
            }
            if let Some(w) = width {
                if record.len() != w {
                    return Err(Error::CsvRow {
                        line,
                        msg: format!("expected {} columns, got {}", w, record.len()),
                    });
                }
            } else {
                width = Some(record.len());
            }
            let mut vals = Vec::with_capacity(record.len() - 1);
            for (idx, field) in record.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| Error::CsvRow {
                    line,
                    msg: format!("column {}: cannot parse '{}' as a number", idx + 1, field),
                })?;
                if idx + 1 == record.len() {
                    ys.push(v);
                } else {
                    vals.push(v);
                }
            }
            rows.push(vals);
        }

        if rows.is_empty() {
            return Err(Error::EmptyDataset { rows: 0, cols: 0 });
        }
        let m = rows[0].len();
        let x = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
        let y = DVector::from_vec(ys);
        let ds = Dataset::new(x, y, task)?;
        match feature_names {
            Some(names) => ds.with_feature_names(names),
            None => Ok(ds),
        }
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P, has_header: bool, task: Task) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv(std::io::BufReader::new(file), has_header, task)
    }

    /// Writes the dataset as CSV, features first and the response last.
    pub fn write_csv<W: Write>(&self, writer: W, write_header: bool) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        if write_header {
            let mut header: Vec<String> = match &self.feature_names {
                Some(names) => names.clone(),
                None => (0..self.n_features()).map(|j| format!("x{j}")).collect(),
            };
            header.push("y".to_owned());
            wtr.write_record(&header)?;
        }
        for i in 0..self.n_obs() {
            let mut record: Vec<String> = (0..self.n_features())
                .map(|j| self.x[(i, j)].to_string())
                .collect();
            record.push(self.y[i].to_string());
            wtr.write_record(&record)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Ground-truth importance magnitudes and the ranks they induce.
#[derive(Debug, Clone)]
pub struct TrueImportance {
    pub phi: Vec<f64>,
    pub ranks: Vec<usize>,
}

impl TrueImportance {
    /// Derives ranks from importance magnitudes via [`true_ranks`].
    pub fn from_phi(phi: Vec<f64>) -> Result<Self> {
        let ranks = true_ranks(&phi)?;
        Ok(Self { phi, ranks })
    }
}

/// 0-based ranks by the counting rule: `rank[j]` is the number of features
/// whose importance magnitude strictly exceeds `|phi[j]|`. Ties share the
/// lower count.
pub fn true_ranks(phi: &[f64]) -> Result<Vec<usize>> {
    for (index, &v) in phi.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue {
                what: "importance",
                index,
            });
        }
    }
    let mut order: Vec<usize> = (0..phi.len()).collect();
    order.sort_by(|&a, &b| phi[b].abs().total_cmp(&phi[a].abs()).then(a.cmp(&b)));
    let mut ranks = vec![0usize; phi.len()];
    let mut current = 0usize;
    for (pos, &j) in order.iter().enumerate() {
        if pos > 0 && phi[j].abs() != phi[order[pos - 1]].abs() {
            current = pos;
        }
        ranks[j] = current;
    }
    Ok(ranks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset_2x2() -> Dataset {
        let x = DMatrix::from_row_slice(2, 2, &[0.5, -1.0, 2.0, 0.25]);
        let y = DVector::from_vec(vec![0.0, 1.0]);
        Dataset::new(x, y, Task::Classification).unwrap()
    }

    #[test]
    fn validate_accepts_minimal_classification_input() {
        dataset_2x2();
    }

    #[test]
    fn validate_rejects_response_length_mismatch() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        match Dataset::new(x, y, Task::Regression) {
            Err(Error::DimensionMismatch { expected: 2, got: 3, .. }) => {}
            other => panic!("expected dimension error, got {other:?}"),
        }
    }

    #[test]
    fn validate_reports_nan_location() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, f64::NAN, 4.0]);
        let y = DVector::from_vec(vec![0.0, 1.0]);
        match Dataset::new(x, y, Task::Regression) {
            Err(Error::NonFiniteEntry { row: 1, col: 0 }) => {}
            other => panic!("expected non-finite error at (1,0), got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_non_binary_labels() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        let y = DVector::from_vec(vec![0.0, 0.5]);
        match Dataset::new(x, y, Task::Classification) {
            Err(Error::NonBinaryLabel { index: 1, .. }) => {}
            other => panic!("expected label error, got {other:?}"),
        }
    }

    #[test]
    fn true_ranks_counts_strictly_larger_magnitudes() {
        assert_eq!(true_ranks(&[3.0, 1.0, 2.0]).unwrap(), vec![0, 2, 1]);
        assert_eq!(true_ranks(&[1.0, 1.0, 2.0]).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn true_ranks_matches_pairwise_counting_oracle() {
        // Independent oracle: the O(M^2) pairwise count.
        fn oracle(phi: &[f64]) -> Vec<usize> {
            phi.iter()
                .map(|&a| phi.iter().filter(|&&b| b.abs() > a.abs()).count())
                .collect()
        }
        let phi = [-5.0, 4.0, 0.0, 0.0];
        assert_eq!(true_ranks(&phi).unwrap(), vec![0, 1, 2, 2]);
        assert_eq!(true_ranks(&phi).unwrap(), oracle(&phi));
    }

    #[test]
    fn true_ranks_rejects_non_finite() {
        match true_ranks(&[1.0, f64::INFINITY]) {
            Err(Error::NonFiniteValue { index: 1, .. }) => {}
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_preserves_data() {
        let ds = dataset_2x2().with_feature_names(vec!["a".into(), "b".into()]).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf, true).unwrap();
        let back = Dataset::from_csv(buf.as_slice(), true, Task::Classification).unwrap();
        assert_eq!(back.x(), ds.x());
        assert_eq!(back.y(), ds.y());
        assert_eq!(back.feature_names().unwrap(), ds.feature_names().unwrap());
    }

    #[test]
    fn csv_parse_error_reports_line() {
        let text = "1.0,2.0,0\n1.0,oops,1\n";
        match Dataset::from_csv(text.as_bytes(), false, Task::Regression) {
            Err(Error::CsvRow { line: 2, .. }) => {}
            other => panic!("expected row error on line 2, got {other:?}"),
        }
    }

    #[test]
    fn checksum_is_sensitive_to_any_entry() {
        let a = dataset_2x2();
        let mut x = a.x().clone();
        x[(0, 0)] += 1e-9;
        let b = Dataset::new(x, a.y().clone(), a.task()).unwrap();
        assert_ne!(a.checksum(), b.checksum());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Ranks are invariant under strictly increasing transforms of |phi|.
            #[test]
            fn ranks_invariant_under_monotone_transform(
                phi in proptest::collection::vec(-100.0f64..100.0, 1..40)
            ) {
                let base = true_ranks(&phi).unwrap();
                let scaled: Vec<f64> = phi.iter().map(|v| v * 3.0).collect();
                let cubed: Vec<f64> = phi.iter().map(|v| v * v * v.abs()).collect();
                prop_assert_eq!(&base, &true_ranks(&scaled).unwrap());
                prop_assert_eq!(&base, &true_ranks(&cubed).unwrap());
            }

            // Some feature always attains rank 0.
            #[test]
            fn rank_zero_always_present(
                phi in proptest::collection::vec(-100.0f64..100.0, 1..40)
            ) {
                let ranks = true_ranks(&phi).unwrap();
                prop_assert!(ranks.iter().any(|&r| r == 0));
            }
        }
    }
}
