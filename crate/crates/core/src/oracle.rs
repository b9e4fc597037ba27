//! Independent brute-force references used to validate the solvers on tiny
//! instances before trusting them at scale. Nothing here shares code with
//! the solver or linear-algebra modules beyond basic arithmetic.

use crate::activation::ActivationMatrix;
use crate::error::{Error, Result};
use crate::learn::Loss;
use crate::rkbs::GramMatrix;
use crate::spaces::SampleFunction;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_cols: usize,
    pub max_rows: usize,
    pub iter_budget: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_cols: 12,
            max_rows: 3,
            iter_budget: 2_000_000,
        }
    }
}

/// Exact minimum-ℓ1 interpolation value by enumerating every column subset
/// of size at most n and solving the subsystem directly: any LP vertex is
/// supported on linearly independent columns, so the enumeration is exact.
pub fn oracle_min_l1(
    a: &ActivationMatrix,
    f: &SampleFunction,
    budget: &OracleBudget,
) -> Result<f64> {
    let n = a.rows();
    let m = a.cols();
    if n > budget.max_rows || m > budget.max_cols {
        return Err(Error::BudgetExceeded(format!(
            "{n}x{m} exceeds oracle range {}x{}",
            budget.max_rows, budget.max_cols
        )));
    }
    if f.len() != n {
        return Err(Error::Dimension(format!(
            "target of length {} against {n} rows",
            f.len()
        )));
    }
    let f_norm = f.values().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let feas = 1e-9 * (1.0 + f_norm);
    if f_norm == 0.0 {
        return Ok(0.0);
    }

    let mut best: Option<f64> = None;
    // All nonempty subsets of columns with |S| ≤ n, by bitmask.
    for mask in 1u32..(1u32 << m) {
        let k = mask.count_ones() as usize;
        if k > n {
            continue;
        }
        let subset: Vec<usize> = (0..m).filter(|j| mask & (1 << j) != 0).collect();
        if let Some(mu) = solve_subset(a, f, &subset, feas) {
            let cost: f64 = mu.iter().map(|v| v.abs()).sum();
            best = Some(best.map_or(cost, |b: f64| b.min(cost)));
        }
    }
    best.ok_or(Error::NotRepresentable { residual: f_norm })
}

/// Least-squares solve of the n×k subsystem by normal equations with its own
/// Gaussian elimination; `None` when the subset is rank-deficient or the
/// residual exceeds the feasibility tolerance.
fn solve_subset(
    a: &ActivationMatrix,
    f: &SampleFunction,
    subset: &[usize],
    feas: f64,
) -> Option<Vec<f64>> {
    let n = a.rows();
    let k = subset.len();
    // Normal equations G μ = g with G = SᵀS, g = Sᵀf.
    let mut gram = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for (ci, &ji) in subset.iter().enumerate() {
        for (cj, &jj) in subset.iter().enumerate() {
            let mut s = 0.0;
            for r in 0..n {
                s += a.entry(r, ji) * a.entry(r, jj);
            }
            gram[ci * k + cj] = s;
        }
        let mut s = 0.0;
        for r in 0..n {
            s += a.entry(r, ji) * f.values()[r];
        }
        rhs[ci] = s;
    }
    let scale = gram.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // Gaussian elimination with partial pivoting.
    let mut aug = vec![0.0; k * (k + 1)];
    for i in 0..k {
        for j in 0..k {
            aug[i * (k + 1) + j] = gram[i * k + j];
        }
        aug[i * (k + 1) + k] = rhs[i];
    }
    for c in 0..k {
        let mut piv_row = c;
        for r in (c + 1)..k {
            if aug[r * (k + 1) + c].abs() > aug[piv_row * (k + 1) + c].abs() {
                piv_row = r;
            }
        }
        if aug[piv_row * (k + 1) + c].abs() <= 1e-12 * scale.max(1.0) {
            return None; // rank-deficient subset; a smaller subset covers it
        }
        if piv_row != c {
            for j in 0..=k {
                aug.swap(c * (k + 1) + j, piv_row * (k + 1) + j);
            }
        }
        let piv = aug[c * (k + 1) + c];
        for r in 0..k {
            if r == c {
                continue;
            }
            let factor = aug[r * (k + 1) + c] / piv;
            if factor == 0.0 {
                continue;
            }
            for j in c..=k {
                aug[r * (k + 1) + j] -= factor * aug[c * (k + 1) + j];
            }
        }
    }
    let mu: Vec<f64> = (0..k)
        .map(|i| aug[i * (k + 1) + k] / aug[i * (k + 1) + i])
        .collect();
    // Residual in the original system.
    let mut worst = 0.0f64;
    for r in 0..n {
        let mut lhs = 0.0;
        for (ci, &j) in subset.iter().enumerate() {
            lhs += a.entry(r, j) * mu[ci];
        }
        worst = worst.max((lhs - f.values()[r]).abs());
    }
    if worst > feas {
        return None;
    }
    Some(mu)
}

/// Plain subgradient descent on R_{L,D}(Aμ) + λ‖μ‖₁ with diminishing steps.
/// Returns the best objective seen; accurate to O(1/√iters), so callers pair
/// it with a loose tolerance.
pub fn oracle_subgradient(
    a: &ActivationMatrix,
    labels: &SampleFunction,
    loss: Loss,
    lambda: f64,
    budget: &OracleBudget,
) -> f64 {
    let n = a.rows();
    let m = a.cols();
    let nf = n as f64;
    let objective = |mu: &[f64]| -> f64 {
        let mut risk = 0.0;
        for r in 0..n {
            let mut t = 0.0;
            for j in 0..m {
                t += a.entry(r, j) * mu[j];
            }
            risk += loss.value(labels.values()[r], t);
        }
        risk / nf + lambda * mu.iter().map(|v| v.abs()).sum::<f64>()
    };
    let mut col_norm_sq = 0.0f64;
    for j in 0..m {
        let mut s = 0.0;
        for r in 0..n {
            s += a.entry(r, j) * a.entry(r, j);
        }
        col_norm_sq = col_norm_sq.max(s);
    }
    let base_step = 1.0 / (1.0 + col_norm_sq);
    let mut mu = vec![0.0; m];
    let mut best = objective(&mu);
    let iters = budget.iter_budget.min(2_000_000);
    for it in 0..iters {
        // Subgradient of the composite objective.
        let mut grad = vec![0.0; m];
        for r in 0..n {
            let mut t = 0.0;
            for j in 0..m {
                t += a.entry(r, j) * mu[j];
            }
            let g = loss.gradient(labels.values()[r], t) / nf;
            if g != 0.0 {
                for j in 0..m {
                    grad[j] += g * a.entry(r, j);
                }
            }
        }
        for j in 0..m {
            grad[j] += lambda * sign(mu[j]);
        }
        let step = base_step / ((it + 1) as f64).sqrt();
        for j in 0..m {
            mu[j] -= step * grad[j];
        }
        if it % 64 == 0 {
            let obj = objective(&mu);
            if obj < best {
                best = obj;
            }
        }
    }
    best.min(objective(&mu))
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Eigenvalues of a symmetric matrix by classical cyclic Jacobi rotations,
/// iterated until the off-diagonal Frobenius mass is at most 1e−12, sorted
/// nonincreasing. Admissible up to 16×16.
pub fn oracle_eigensolve(k: &GramMatrix) -> Result<Vec<f64>> {
    let n = k.size();
    if n > 16 {
        return Err(Error::BudgetExceeded(format!(
            "oracle eigensolver admits up to 16 rows, got {n}"
        )));
    }
    let mut a: Vec<f64> = (0..n * n).map(|i| k.entry(i / n, i % n)).collect();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-12 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p * n + i];
                    let aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(vals)
}
