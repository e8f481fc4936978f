use super::ModelError;

/// Stored training set for k-nearest-neighbour regression.
#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    pub k: usize,
    /// Standardized training points.
    pub points: Vec<Vec<f64>>,
    /// Targets in model space.
    pub targets: Vec<f64>,
}

impl Knn {
    pub fn fit(points: Vec<Vec<f64>>, targets: Vec<f64>, k: usize) -> Result<Knn, ModelError> {
        let n = points.len();
        if n == 0 {
            return Err(ModelError::EmptyDataset);
        }
        if k == 0 || k > n {
            return Err(ModelError::KOutOfRange { k, n });
        }
        if targets.len() != n {
            return Err(ModelError::Schema(format!("{n} points but {} targets", targets.len())));
        }
        Ok(Knn { k, points, targets })
    }

    /// Indices and distances of the k nearest points, nearest first; equal
    /// distances go to the lower index.
    pub fn neighbours(&self, x: &[f64]) -> Vec<(usize, f64)> {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(self.k + 1);
        for (i, p) in self.points.iter().enumerate() {
            let d2: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.len() == self.k && d2 >= best[self.k - 1].0 {
                continue;
            }
            let pos = best.partition_point(|&(bd, _)| bd <= d2);
            best.insert(pos, (d2, i));
            best.truncate(self.k);
        }
        best.into_iter().map(|(d2, i)| (i, d2.sqrt())).collect()
    }

    /// Inverse-distance weighted mean of the neighbours' targets. Points at
    /// distance zero take all the weight.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let nb = self.neighbours(x);
        let exact: Vec<f64> = nb.iter().filter(|(_, d)| *d == 0.0).map(|(i, _)| self.targets[*i]).collect();
        if !exact.is_empty() {
            return exact.iter().sum::<f64>() / exact.len() as f64;
        }
        let (mut num, mut den) = (0.0, 0.0);
        for (i, d) in nb {
            num += self.targets[i] / d;
            den += 1.0 / d;
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_returns_the_training_target() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]];
        let m = Knn::fit(pts.clone(), vec![1.0, 2.0, 3.0], 1).unwrap();
        for (p, y) in pts.iter().zip([1.0, 2.0, 3.0]) {
            assert_eq!(m.predict(p), y);
        }
    }

    #[test]
    fn equidistant_neighbours_average() {
        let pts = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]];
        let m = Knn::fit(pts, vec![1.0, 2.0, 3.0], 3).unwrap();
        assert!((m.predict(&[0.0, 0.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ties_break_by_index() {
        let m = Knn::fit(vec![vec![1.0], vec![-1.0], vec![1.0]], vec![0.0; 3], 2).unwrap();
        let nb = m.neighbours(&[0.0]);
        assert_eq!(nb.iter().map(|x| x.0).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn k_range() {
        assert!(matches!(Knn::fit(vec![vec![0.0]], vec![1.0], 2), Err(ModelError::KOutOfRange { k: 2, n: 1 })));
        assert!(matches!(Knn::fit(vec![vec![0.0]], vec![1.0], 0), Err(ModelError::KOutOfRange { .. })));
    }
}
