//! Input containers for the backfitting estimators.

use crate::grid::Interval;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("dataset must contain at least one observation")]
    Empty,
    #[error("dataset must have at least one covariate column")]
    NoCovariates,
    #[error("column {column} has {got} rows, expected {expected}")]
    ColumnLength {
        column: usize,
        expected: usize,
        got: usize,
    },
    #[error("expected {expected} intervals, got {got}")]
    IntervalCount { expected: usize, got: usize },
    #[error("value at row {row}, column {column} is not finite")]
    NonFinite { row: usize, column: usize },
    #[error("response at row {0} is not finite")]
    NonFiniteResponse(usize),
    #[error("covariate at row {row}, column {column} ({value}) lies outside [{a}, {b}]")]
    OutOfInterval {
        row: usize,
        column: usize,
        value: f64,
        a: f64,
        b: f64,
    },
    #[error("weight at row {0} must be strictly positive and finite")]
    BadWeight(usize),
}

fn validate_columns(
    n: usize,
    x: &[Vec<f64>],
    intervals: &[Interval],
) -> Result<(), DataError> {
    if x.is_empty() {
        return Err(DataError::NoCovariates);
    }
    if intervals.len() != x.len() {
        return Err(DataError::IntervalCount {
            expected: x.len(),
            got: intervals.len(),
        });
    }
    for (j, col) in x.iter().enumerate() {
        if col.len() != n {
            return Err(DataError::ColumnLength {
                column: j,
                expected: n,
                got: col.len(),
            });
        }
        let iv = intervals[j];
        for (i, &v) in col.iter().enumerate() {
            if !v.is_finite() {
                return Err(DataError::NonFinite { row: i, column: j });
            }
            if !iv.contains(v) {
                return Err(DataError::OutOfInterval {
                    row: i,
                    column: j,
                    value: v,
                    a: iv.a,
                    b: iv.b,
                });
            }
        }
    }
    Ok(())
}

/// Responses with covariate columns pinned to their support intervals.
#[derive(Debug, Clone)]
pub struct Dataset {
    y: Vec<f64>,
    x: Vec<Vec<f64>>,
    intervals: Vec<Interval>,
}

impl Dataset {
    /// `x` is column-major: `x[j][i]` is covariate `j` of observation `i`.
    pub fn new(y: Vec<f64>, x: Vec<Vec<f64>>, intervals: Vec<Interval>) -> Result<Self, DataError> {
        if y.is_empty() {
            return Err(DataError::Empty);
        }
        for (i, &v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(DataError::NonFiniteResponse(i));
            }
        }
        validate_columns(y.len(), &x, &intervals)?;
        Ok(Dataset { y, x, intervals })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.x.len()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.x[j]
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }
}

/// Pseudo-responses with strictly positive observation weights, the input of
/// the weighted least-squares backfitting estimators.
#[derive(Debug, Clone)]
pub struct WeightedDataset {
    z: Vec<f64>,
    x: Vec<Vec<f64>>,
    weights: Vec<f64>,
    intervals: Vec<Interval>,
}

impl WeightedDataset {
    pub fn new(
        z: Vec<f64>,
        x: Vec<Vec<f64>>,
        weights: Vec<f64>,
        intervals: Vec<Interval>,
    ) -> Result<Self, DataError> {
        if z.is_empty() {
            return Err(DataError::Empty);
        }
        for (i, &v) in z.iter().enumerate() {
            if !v.is_finite() {
                return Err(DataError::NonFiniteResponse(i));
            }
        }
        if weights.len() != z.len() {
            return Err(DataError::ColumnLength {
                column: usize::MAX,
                expected: z.len(),
                got: weights.len(),
            });
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(DataError::BadWeight(i));
            }
        }
        validate_columns(z.len(), &x, &intervals)?;
        Ok(WeightedDataset {
            z,
            x,
            weights,
            intervals,
        })
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn d(&self) -> usize {
        self.x.len()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.x[j]
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }
}
