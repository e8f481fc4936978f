use super::ModelError;

/// Per-column z-score transform fit on a training matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    /// Columns with zero variance; these pass through unscaled.
    pub constant: Vec<bool>,
}

impl Scaler {
    /// Fits on row-major data. Needs at least one row; a single row makes
    /// every column constant.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Scaler, ModelError> {
        let first = rows.first().ok_or(ModelError::EmptyDataset)?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut means = vec![0.0; d];
        for r in rows {
            if r.len() != d {
                return Err(ModelError::Schema(format!("row width {} differs from {d}", r.len())));
            }
            for (m, x) in means.iter_mut().zip(r) {
                *m += x;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut sds = vec![0.0; d];
        for r in rows {
            for j in 0..d {
                sds[j] += (r[j] - means[j]).powi(2);
            }
        }
        let mut constant = vec![false; d];
        for j in 0..d {
            sds[j] = (sds[j] / n).sqrt();
            constant[j] = sds[j] <= 1e-12 * means[j].abs().max(1.0);
        }
        Ok(Scaler { means, sds, constant })
    }

    /// Identity transform of width `d`.
    pub fn identity(d: usize) -> Scaler {
        Scaler { means: vec![0.0; d], sds: vec![1.0; d], constant: vec![true; d] }
    }

    pub fn width(&self) -> usize {
        self.means.len()
    }

    pub fn scale(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &x)| if self.constant[j] { x } else { (x - self.means[j]) / self.sds[j] })
            .collect()
    }

    pub fn unscale(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &z)| if self.constant[j] { z } else { z * self.sds[j] + self.means[j] })
            .collect()
    }
}
