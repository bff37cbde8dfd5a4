//! Evaluation: matching estimated tones to the truth.

use crate::distributions::dist;
use crate::error::{arg, Result};
use crate::signal::Tone;

/// Largest size solved exactly; larger problems use a greedy assignment.
pub const EXACT_LIMIT: usize = 10;

/// Minimum-cost assignment for a square cost matrix: `out[i]` is the column
/// assigned to row `i`. Exact (Hungarian method with potentials, `O(n³)`) for
/// `n ≤ 10`, greedy by increasing cost above.
pub fn assign(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    if n > EXACT_LIMIT {
        return greedy(cost);
    }
    // 1-based arrays; column 0 is a virtual start.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        out[p[j] - 1] = j - 1;
    }
    out
}

fn greedy(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    pairs.sort_by(|a, b| cost[a.0][a.1].total_cmp(&cost[b.0][b.1]));
    let mut out = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (i, j) in pairs {
        if out[i] == usize::MAX && !taken[j] {
            out[i] = j;
            taken[j] = true;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `permutation[j]` is the estimate matched to true tone `j`.
    pub permutation: Vec<usize>,
    pub max_mean_error: f64,
    pub max_weight_error: f64,
}

/// Minimum total Euclidean mean distance matching of `estimates` to `truth`.
pub fn match_tones(estimates: &[Tone], truth: &[Tone]) -> Result<Matching> {
    if estimates.len() != truth.len() {
        return arg(format!("cannot match {} estimates to {} true tones", estimates.len(), truth.len()));
    }
    if estimates.iter().chain(truth).any(|t| t.freq.len() != truth.first().map_or(0, |t| t.freq.len())) {
        return arg("tones must share one dimension");
    }
    let cost: Vec<Vec<f64>> = truth.iter().map(|t| estimates.iter().map(|e| dist(&t.freq, &e.freq)).collect()).collect();
    let permutation = assign(&cost);
    let mut max_mean_error: f64 = 0.0;
    let mut max_weight_error: f64 = 0.0;
    for (j, &e) in permutation.iter().enumerate() {
        max_mean_error = max_mean_error.max(cost[j][e]);
        max_weight_error = max_weight_error.max((truth[j].weight - estimates[e].weight).norm());
    }
    Ok(Matching { permutation, max_mean_error, max_weight_error })
}
