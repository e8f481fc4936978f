//! ε-insensitive support-vector regression with an RBF kernel, trained by
//! sequential minimal optimization on the dual.
//!
//! The dual is written over 2n variables `a = (α, α*)` with labels
//! `y = (+1…, −1…)`:
//!
//! ```text
//! min ½ aᵀQa + pᵀa   s.t. yᵀa = 0, 0 ≤ a ≤ C
//! Q_st = y_s y_t K(s, t),  p = (ε − z, ε + z)
//! ```
//!
//! Working pairs use second-order selection. The fitted coefficients are
//! `β = α − α*` and the model is `f(x) = Σ β_j K(x_j, x) − ρ`.

use std::collections::HashMap;

use super::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    /// RBF width; `None` means 1/d.
    pub gamma: Option<f64>,
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams { c: 10.0, epsilon: 0.01, gamma: None, tolerance: 1e-3, max_iter: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Svr {
    pub gamma: f64,
    pub rho: f64,
    /// Support vectors and their coefficients β.
    pub support: Vec<Vec<f64>>,
    pub coef: Vec<f64>,
    /// Dual objective at the solution (minimization form).
    pub objective: f64,
    pub iterations: usize,
}

pub fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

const TAU: f64 = 1e-12;
const FULL_MATRIX_LIMIT: usize = 3000;
const CACHE_BYTES: usize = 256 << 20;

/// Kernel rows over the n training points, either precomputed or cached.
struct Kernel<'a> {
    x: &'a [Vec<f64>],
    gamma: f64,
    full: Option<Vec<Vec<f64>>>,
    cache: HashMap<usize, (Vec<f64>, u64)>,
    capacity: usize,
    clock: u64,
}

impl<'a> Kernel<'a> {
    fn new(x: &'a [Vec<f64>], gamma: f64) -> Self {
        let n = x.len();
        let full =
            (n <= FULL_MATRIX_LIMIT).then(|| x.iter().map(|a| x.iter().map(|b| rbf(gamma, a, b)).collect()).collect());
        let capacity = (CACHE_BYTES / (8 * n.max(1))).max(2);
        Kernel { x, gamma, full, cache: HashMap::new(), capacity, clock: 0 }
    }

    fn row(&mut self, i: usize) -> &[f64] {
        if self.full.is_some() {
            return &self.full.as_ref().unwrap()[i];
        }
        self.clock += 1;
        let clock = self.clock;
        if !self.cache.contains_key(&i) {
            if self.cache.len() >= self.capacity {
                let oldest = self.cache.iter().min_by_key(|(_, (_, t))| *t).map(|(k, _)| *k).unwrap();
                self.cache.remove(&oldest);
            }
            let xi = &self.x[i];
            let row = self.x.iter().map(|b| rbf(self.gamma, xi, b)).collect();
            self.cache.insert(i, (row, clock));
        }
        let entry = self.cache.get_mut(&i).unwrap();
        entry.1 = clock;
        &entry.0
    }
}

impl Svr {
    pub fn fit(x: &[Vec<f64>], z: &[f64], p: &SvrParams) -> Result<Svr, ModelError> {
        let n = x.len();
        if n == 0 {
            return Err(ModelError::EmptyDataset);
        }
        if z.len() != n {
            return Err(ModelError::Schema(format!("{n} points but {} targets", z.len())));
        }
        let d = x[0].len().max(1);
        let gamma = p.gamma.unwrap_or(1.0 / d as f64);
        let bad = |what: &str| Err(ModelError::Invalid(what.to_string()));
        if !(p.c > 0.0 && p.c.is_finite()) {
            return bad("c must be positive");
        }
        if !(p.epsilon >= 0.0 && p.epsilon.is_finite()) {
            return bad("epsilon must be non-negative");
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return bad("gamma must be positive");
        }
        let c = p.c;
        let l2 = 2 * n;
        let y = |t: usize| if t < n { 1.0 } else { -1.0 };
        let pt: Vec<f64> = (0..l2).map(|t| if t < n { p.epsilon - z[t] } else { p.epsilon + z[t - n] }).collect();
        let mut a = vec![0.0; l2];
        let mut g = pt.clone();
        let mut kern = Kernel::new(x, gamma);
        let qd: Vec<f64> = (0..n).map(|i| rbf(gamma, &x[i], &x[i])).collect();

        let mut iterations = 0;
        loop {
            // i: maximal violator in I_up
            let mut gmax = f64::NEG_INFINITY;
            let mut i = usize::MAX;
            for t in 0..l2 {
                let up = if y(t) > 0.0 { a[t] < c } else { a[t] > 0.0 };
                if up && (i == usize::MAX || -y(t) * g[t] > gmax) {
                    gmax = -y(t) * g[t];
                    i = t;
                }
            }
            let mut gmax2 = f64::NEG_INFINITY;
            let mut j = usize::MAX;
            let mut best = f64::INFINITY;
            if i != usize::MAX {
                let ki = kern.row(i % n);
                for t in 0..l2 {
                    let low = if y(t) > 0.0 { a[t] > 0.0 } else { a[t] < c };
                    if !low {
                        continue;
                    }
                    let v = y(t) * g[t];
                    if v > gmax2 {
                        gmax2 = v;
                    }
                    let grad_diff = gmax + v;
                    if grad_diff > 0.0 {
                        let quad = qd[i % n] + qd[t % n] - 2.0 * ki[t % n];
                        let obj = -grad_diff * grad_diff / if quad > 0.0 { quad } else { TAU };
                        if obj < best {
                            best = obj;
                            j = t;
                        }
                    }
                }
            }
            let violation = gmax + gmax2;
            if i == usize::MAX || j == usize::MAX || violation < p.tolerance {
                break;
            }
            if iterations >= p.max_iter {
                return Err(ModelError::NonConvergence { iterations, gap: duality_gap(&a, &g, z, n, c, p.epsilon) });
            }
            iterations += 1;

            let kij = kern.row(i % n)[j % n];
            let qij = y(i) * y(j) * kij;
            let (old_i, old_j) = (a[i], a[j]);
            if y(i) != y(j) {
                let mut quad = qd[i % n] + qd[j % n] + 2.0 * qij;
                if quad <= 0.0 {
                    quad = TAU;
                }
                let delta = (-g[i] - g[j]) / quad;
                let diff = a[i] - a[j];
                a[i] += delta;
                a[j] += delta;
                if diff > 0.0 {
                    if a[j] < 0.0 {
                        a[j] = 0.0;
                        a[i] = diff;
                    }
                } else if a[i] < 0.0 {
                    a[i] = 0.0;
                    a[j] = -diff;
                }
                if diff > 0.0 {
                    if a[i] > c {
                        a[i] = c;
                        a[j] = c - diff;
                    }
                } else if a[j] > c {
                    a[j] = c;
                    a[i] = c + diff;
                }
            } else {
                let mut quad = qd[i % n] + qd[j % n] - 2.0 * qij;
                if quad <= 0.0 {
                    quad = TAU;
                }
                let delta = (g[i] - g[j]) / quad;
                let sum = a[i] + a[j];
                a[i] -= delta;
                a[j] += delta;
                if sum > c {
                    if a[i] > c {
                        a[i] = c;
                        a[j] = sum - c;
                    }
                } else if a[j] < 0.0 {
                    a[j] = 0.0;
                    a[i] = sum;
                }
                if sum > c {
                    if a[j] > c {
                        a[j] = c;
                        a[i] = sum - c;
                    }
                } else if a[i] < 0.0 {
                    a[i] = 0.0;
                    a[j] = sum;
                }
            }
            let (di, dj) = (a[i] - old_i, a[j] - old_j);
            let (yi, yj) = (y(i), y(j));
            let ki: Vec<f64> = kern.row(i % n).to_vec();
            let kj = kern.row(j % n);
            for t in 0..l2 {
                let yt = y(t);
                g[t] += yt * (yi * ki[t % n] * di + yj * kj[t % n] * dj);
            }
        }

        let rho = bias(&a, &g, n, c);
        let objective = 0.5 * (0..l2).map(|t| a[t] * (g[t] + pt[t])).sum::<f64>();
        let mut beta: Vec<f64> = (0..n).map(|i| a[i] - a[i + n]).collect();
        symmetrize_duplicates(x, z, &mut beta);
        let (support, coef) = x.iter().zip(&beta).filter(|(_, b)| **b != 0.0).map(|(xi, b)| (xi.clone(), *b)).unzip();
        Ok(Svr { gamma, rho, support, coef, objective, iterations })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.support.iter().zip(&self.coef).map(|(s, b)| b * rbf(self.gamma, s, x)).sum::<f64>() - self.rho
    }
}

/// ρ from free variables, or the midpoint of the feasible range.
fn bias(a: &[f64], g: &[f64], n: usize, c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum, mut nfree) = (0.0, 0usize);
    for t in 0..2 * n {
        let y = if t < n { 1.0 } else { -1.0 };
        let yg = y * g[t];
        if a[t] >= c {
            if y < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if a[t] <= 0.0 {
            if y > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            nfree += 1;
            sum += yg;
        }
    }
    if nfree > 0 {
        sum / nfree as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// Primal objective minus the negated dual objective at the current point.
fn duality_gap(a: &[f64], g: &[f64], z: &[f64], n: usize, c: f64, eps: f64) -> f64 {
    let rho = bias(a, g, n, c);
    // (Kβ)_i recovered from the gradient of the α half.
    let kb: Vec<f64> = (0..n).map(|i| g[i] - eps + z[i]).collect();
    let beta: Vec<f64> = (0..n).map(|i| a[i] - a[i + n]).collect();
    let quad: f64 = beta.iter().zip(&kb).map(|(b, k)| b * k).sum();
    let slack: f64 = (0..n).map(|i| ((z[i] - (kb[i] - rho)).abs() - eps).max(0.0)).sum();
    let primal = 0.5 * quad + c * slack;
    let dual = 0.5 * quad + eps * a.iter().sum::<f64>() - z.iter().zip(&beta).map(|(zi, b)| zi * b).sum::<f64>();
    primal + dual
}

/// Exact duplicates (same input and target) share their coefficient mass
/// equally; any split between them is optimal, the even one is canonical.
fn symmetrize_duplicates(x: &[Vec<f64>], z: &[f64], beta: &mut [f64]) {
    let mut groups: HashMap<(Vec<u64>, u64), Vec<usize>> = HashMap::new();
    for i in 0..x.len() {
        groups.entry((x[i].iter().map(|v| v.to_bits()).collect(), z[i].to_bits())).or_default().push(i);
    }
    for idx in groups.values().filter(|g| g.len() > 1) {
        let mean = idx.iter().map(|&i| beta[i]).sum::<f64>() / idx.len() as f64;
        for &i in idx {
            beta[i] = mean;
        }
    }
}
