//! Slow, independently written reference implementations and generators
//! shared by the integration tests.

#![allow(dead_code)]

pub mod props;

use std::collections::BTreeMap;

use dram_oracle::trace::{MemoryAccess, MemoryTrace, ReuseProfile, WorkloadSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn spec(name: &str, cpi: f64) -> WorkloadSpec {
    WorkloadSpec {
        name: name.into(),
        n_instructions: 1,
        footprint_words: 1,
        target_access_rate: 0.5,
        cpi,
        write_fraction: 0.5,
        value_alphabet_size: 1,
        reuse_profile: ReuseProfile::Uniform,
        threads: 1,
        seed: 0,
    }
}

/// Random trace written access by access, independent of the generator.
pub fn random_trace(r: &mut ChaCha8Rng, max_len: usize) -> MemoryTrace {
    let n = r.random_range(1..=max_len);
    let words = r.random_range(1..=(n as u64).max(2));
    let alphabet = r.random_range(1..=64u32);
    let mut instr = 0u64;
    let mut accesses = Vec::with_capacity(n);
    for _ in 0..n {
        instr += r.random_range(1..=50);
        let addr = r.random_range(0..words) * 8;
        accesses.push(if r.random_bool(0.4) {
            MemoryAccess::write(instr, addr, r.random_range(0..alphabet) * 0x0101_0101)
        } else {
            MemoryAccess::read(instr, addr)
        });
    }
    let mut s = spec("random", r.random_range(0.5..3.0));
    s.n_instructions = instr + 1;
    MemoryTrace::new(s, accesses)
}

/// Mean reuse distance in seconds via an ordered map of last-seen indices.
pub fn reuse_oracle(t: &MemoryTrace, f_clk: f64) -> Option<f64> {
    let mut last: BTreeMap<u64, u64> = BTreeMap::new();
    let mut gaps: Vec<u64> = Vec::new();
    for a in &t.accesses {
        let w = a.address / 8;
        if let Some(p) = last.get(&w) {
            gaps.push(a.instr_index - p);
        }
        last.insert(w, a.instr_index);
    }
    if gaps.is_empty() {
        return None;
    }
    let total: u128 = gaps.iter().map(|&g| g as u128).sum();
    Some(t.spec.cpi * (total as f64 / gaps.len() as f64) / f_clk)
}

/// Entropy in bits of written values from a histogram.
pub fn entropy_oracle(t: &MemoryTrace) -> Option<f64> {
    let mut hist: BTreeMap<u32, f64> = BTreeMap::new();
    let mut n = 0.0;
    for a in &t.accesses {
        if let Some(v) = a.kind.value() {
            *hist.entry(v).or_default() += 1.0;
            n += 1.0;
        }
    }
    (n > 0.0).then(|| hist.values().map(|c| c / n).map(|p| -p * p.ln() / std::f64::consts::LN_2).sum::<f64>().max(0.0))
}

/// Pearson correlation of average ranks found by counting, O(n²).
pub fn spearman_oracle(xs: &[f64], ys: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| {
                let less = v.iter().filter(|b| *b < a).count() as f64;
                let equal = v.iter().filter(|b| *b == a).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(xs), rank(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Inverse-distance weighted KNN by sorting every distance.
pub fn knn_oracle(points: &[Vec<f64>], targets: &[f64], k: usize, q: &[f64]) -> f64 {
    let mut d: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(), i))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let nearest = &d[..k];
    let zero: Vec<f64> = nearest.iter().filter(|(dist, _)| *dist == 0.0).map(|(_, i)| targets[*i]).collect();
    if !zero.is_empty() {
        return zero.iter().sum::<f64>() / zero.len() as f64;
    }
    let w: f64 = nearest.iter().map(|(dist, _)| 1.0 / dist).sum();
    nearest.iter().map(|(dist, i)| targets[*i] / dist).sum::<f64>() / w
}

/// Regression tree grown by trying every feature and every midpoint-free
/// threshold and scoring children by their summed squared error.
pub enum OracleTree {
    Leaf(f64),
    Split { feature: usize, threshold: f64, left: Box<OracleTree>, right: Box<OracleTree> },
}

impl OracleTree {
    pub fn grow(x: &[Vec<f64>], y: &[f64], idx: &[usize], min_leaf: usize) -> OracleTree {
        let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64;
        let sse = |set: &[usize]| -> f64 {
            let m = set.iter().map(|&i| y[i]).sum::<f64>() / set.len() as f64;
            set.iter().map(|&i| (y[i] - m).powi(2)).sum()
        };
        if idx.iter().all(|&i| y[i] == y[idx[0]]) || idx.len() < 2 * min_leaf {
            return OracleTree::Leaf(mean);
        }
        let parent = sse(idx);
        let mut best: Option<(f64, usize, f64)> = None;
        for f in 0..x[0].len() {
            let mut values: Vec<f64> = idx.iter().map(|&i| x[i][f]).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            for &t in &values[..values.len() - 1] {
                let l: Vec<usize> = idx.iter().copied().filter(|&i| x[i][f] <= t).collect();
                let r: Vec<usize> = idx.iter().copied().filter(|&i| x[i][f] > t).collect();
                if l.len() < min_leaf || r.len() < min_leaf {
                    continue;
                }
                let cost = sse(&l) + sse(&r);
                if cost < parent - 1e-12 * parent && best.is_none_or(|b| cost < b.0) {
                    best = Some((cost, f, t));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return OracleTree::Leaf(mean);
        };
        let l: Vec<usize> = idx.iter().copied().filter(|&i| x[i][feature] <= threshold).collect();
        let r: Vec<usize> = idx.iter().copied().filter(|&i| x[i][feature] > threshold).collect();
        OracleTree::Split {
            feature,
            threshold,
            left: Box::new(OracleTree::grow(x, y, &l, min_leaf)),
            right: Box::new(OracleTree::grow(x, y, &r, min_leaf)),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            OracleTree::Leaf(_) => 1,
            OracleTree::Split { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    pub fn predict(&self, q: &[f64]) -> f64 {
        match self {
            OracleTree::Leaf(v) => *v,
            OracleTree::Split { feature, threshold, left, right } => {
                if q[*feature] <= *threshold {
                    left.predict(q)
                } else {
                    right.predict(q)
                }
            }
        }
    }
}

/// ε-SVR dual, minimization form, over (α, α*) ∈ [0, C]^2n with
/// Σα = Σα*, solved by accelerated projected gradient. Returns the objective.
pub fn svr_dual_oracle(x: &[Vec<f64>], z: &[f64], c: f64, eps: f64, gamma: f64, iters: usize) -> f64 {
    let n = x.len();
    let k: Vec<Vec<f64>> = x
        .iter()
        .map(|a| {
            x.iter().map(|b| (-gamma * a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>()).exp()).collect()
        })
        .collect();
    let objective = |v: &[f64]| -> f64 {
        let beta: Vec<f64> = (0..n).map(|i| v[i] - v[n + i]).collect();
        let quad: f64 = (0..n).map(|i| (0..n).map(|j| beta[i] * k[i][j] * beta[j]).sum::<f64>()).sum();
        0.5 * quad + eps * v.iter().sum::<f64>() - (0..n).map(|i| z[i] * beta[i]).sum::<f64>()
    };
    let gradient = |v: &[f64]| -> Vec<f64> {
        let beta: Vec<f64> = (0..n).map(|i| v[i] - v[n + i]).collect();
        let kb: Vec<f64> = (0..n).map(|i| (0..n).map(|j| k[i][j] * beta[j]).sum()).collect();
        (0..2 * n).map(|t| if t < n { kb[t] + eps - z[t] } else { -kb[t - n] + eps + z[t - n] }).collect()
    };
    // Euclidean projection onto the box intersected with Σ s_t v_t = 0.
    let project = |v: &[f64]| -> Vec<f64> {
        let s = |t: usize| if t < n { 1.0 } else { -1.0 };
        let at = |lambda: f64| -> Vec<f64> { (0..2 * n).map(|t| (v[t] - lambda * s(t)).clamp(0.0, c)).collect() };
        let balance = |w: &[f64]| -> f64 { (0..2 * n).map(|t| s(t) * w[t]).sum() };
        let (mut lo, mut hi) = (-1e6, 1e6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if balance(&at(mid)) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi))
    };
    let lipschitz = 2.0 * n as f64;
    let step = 1.0 / lipschitz;
    let mut v = vec![0.0; 2 * n];
    let mut y = v.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let g = gradient(&y);
        let next = project(&y.iter().zip(&g).map(|(a, b)| a - step * b).collect::<Vec<_>>());
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        y = next.iter().zip(&v).map(|(a, b)| a + (t - 1.0) / t_next * (a - b)).collect();
        v = next;
        t = t_next;
    }
    objective(&v)
}
