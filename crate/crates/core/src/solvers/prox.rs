//! Accelerated proximal gradient (soft-thresholding) and exact coordinate
//! descent for λ-regularized empirical risk over effective feature columns.
//!
//! Two deliberately different algorithms cover the same convex problems so
//! the reformulation verifiers can compare independent solution paths.

use crate::error::{Error, Result};
use crate::learn::Loss;
use crate::linalg::{self, Mat};
use crate::solvers::SolverOptions;

/// A regularized empirical-risk problem over explicit feature columns:
/// minimize R(Σ_j col_j x_j) + λ Σ_j w_j |x_j| with mean-reduced loss R.
pub(crate) struct Composite<'a> {
    pub cols: &'a [Vec<f64>],
    pub labels: &'a [f64],
    pub loss: Loss,
    pub lambda: f64,
    /// Per-column ℓ1 weights; `None` means all ones.
    pub l1_weights: Option<&'a [f64]>,
}

pub(crate) struct ProxOutcome {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub kkt_surplus: f64,
    pub converged: bool,
}

impl<'a> Composite<'a> {
    fn n(&self) -> usize {
        self.labels.len()
    }

    fn m(&self) -> usize {
        self.cols.len()
    }

    fn weight(&self, j: usize) -> f64 {
        self.l1_weights.map_or(1.0, |w| w[j])
    }

    fn predictions(&self, x: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.n()];
        for (j, col) in self.cols.iter().enumerate() {
            if x[j] != 0.0 {
                for (ui, &c) in u.iter_mut().zip(col) {
                    *ui += x[j] * c;
                }
            }
        }
        u
    }

    fn risk(&self, u: &[f64]) -> f64 {
        let n = self.n() as f64;
        u.iter()
            .zip(self.labels)
            .map(|(&t, &y)| self.loss.value(y, t))
            .sum::<f64>()
            / n
    }

    fn risk_gradient(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n() as f64;
        u.iter()
            .zip(self.labels)
            .map(|(&t, &y)| self.loss.gradient(y, t) / n)
            .collect()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let u = self.predictions(x);
        let reg: f64 = x
            .iter()
            .enumerate()
            .map(|(j, &v)| self.weight(j) * v.abs())
            .sum();
        self.risk(&u) + self.lambda * reg
    }

    /// Certificate c_j = col_jᵀ ∇R at the given predictions.
    fn certificate(&self, u: &[f64]) -> Vec<f64> {
        let g = self.risk_gradient(u);
        self.cols.iter().map(|col| linalg::dot(col, &g)).collect()
    }

    /// Worst violation of the stationarity conditions, scaled by λ:
    /// off support |c_j| ≤ λ w_j, on support c_j = −λ w_j sign(x_j).
    fn kkt_violation(&self, x: &[f64], cert: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (j, &c) in cert.iter().enumerate() {
            let lw = self.lambda * self.weight(j);
            let v = if x[j] == 0.0 {
                c.abs() - lw
            } else {
                (c + lw * x[j].signum()).abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    /// max_j (|c_j| − λ w_j): the off-support surplus reported to callers.
    pub fn kkt_surplus(&self, x: &[f64]) -> f64 {
        let cert = self.certificate(&self.predictions(x));
        cert.iter()
            .enumerate()
            .map(|(j, c)| c.abs() - self.lambda * self.weight(j))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn spectral_bound(&self) -> f64 {
        let n = self.n();
        let m = self.m();
        let mut mat = Mat::zeros(n, m);
        for (j, col) in self.cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                *mat.at_mut(r, j) = v;
            }
        }
        let gram = linalg::weighted_gram(&mat, None);
        let (vals, _) = linalg::sym_eigen(&gram);
        vals.first().copied().unwrap_or(0.0).max(0.0)
    }
}

fn soft(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// FISTA with adaptive restart for smooth losses; proximal subgradient with
/// diminishing steps for the hinge loss. Starts at zero, so the threshold
/// identity λ ≥ ‖certificate(0)‖_∞ / w returns the exact zero vector.
pub(crate) fn fista_l1(problem: &Composite, opts: &SolverOptions) -> ProxOutcome {
    let m = problem.m();
    let sigma_sq = problem.spectral_bound();
    let mut x = vec![0.0; m];

    // Exact-zero fast path shared by both branches.
    let cert0 = problem.certificate(&problem.predictions(&x));
    let surplus0 = cert0
        .iter()
        .enumerate()
        .map(|(j, c)| c.abs() - problem.lambda * problem.weight(j))
        .fold(f64::NEG_INFINITY, f64::max);
    if surplus0 <= 0.0 {
        return ProxOutcome {
            objective: problem.objective(&x),
            x,
            iterations: 0,
            kkt_surplus: surplus0,
            converged: true,
        };
    }

    match problem.loss.curvature_bound() {
        Some(curv) => {
            let lip = (curv / problem.n() as f64) * sigma_sq;
            let step = if lip > 0.0 { 1.0 / lip } else { 1.0 };
            let mut y = x.clone();
            let mut t = 1.0f64;
            let mut iterations = 0usize;
            let tol = opts.opt_tol * problem.lambda;
            while iterations < opts.max_iters {
                let grad = {
                    let u = problem.predictions(&y);
                    problem.certificate(&u)
                };
                let mut x_new = vec![0.0; m];
                for j in 0..m {
                    x_new[j] = soft(
                        y[j] - step * grad[j],
                        step * problem.lambda * problem.weight(j),
                    );
                }
                let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
                let beta = (t - 1.0) / t_new;
                let mut restart = 0.0;
                let mut y_new = vec![0.0; m];
                for j in 0..m {
                    let dx = x_new[j] - x[j];
                    restart += (y[j] - x_new[j]) * dx;
                    y_new[j] = x_new[j] + beta * dx;
                }
                if restart > 0.0 {
                    t = 1.0;
                    y_new.copy_from_slice(&x_new);
                } else {
                    t = t_new;
                }
                x = x_new;
                y = y_new;
                iterations += 1;
                if iterations % 8 == 0 || iterations == opts.max_iters {
                    let cert = problem.certificate(&problem.predictions(&x));
                    if problem.kkt_violation(&x, &cert) <= tol {
                        return ProxOutcome {
                            objective: problem.objective(&x),
                            kkt_surplus: cert
                                .iter()
                                .enumerate()
                                .map(|(j, c)| c.abs() - problem.lambda * problem.weight(j))
                                .fold(f64::NEG_INFINITY, f64::max),
                            x,
                            iterations,
                            converged: true,
                        };
                    }
                }
            }
            let surplus = problem.kkt_surplus(&x);
            ProxOutcome {
                objective: problem.objective(&x),
                kkt_surplus: surplus,
                x,
                iterations: opts.max_iters,
                converged: false,
            }
        }
        None => {
            // Hinge: proximal subgradient, diminishing steps, best iterate kept.
            let base = if sigma_sq > 0.0 {
                problem.n() as f64 / sigma_sq
            } else {
                1.0
            };
            let mut best = x.clone();
            let mut best_obj = problem.objective(&x);
            let mut iterations = 0usize;
            while iterations < opts.max_iters.min(50_000) {
                let step = base / ((iterations + 1) as f64).sqrt();
                let grad = problem.certificate(&problem.predictions(&x));
                for j in 0..m {
                    x[j] = soft(
                        x[j] - step * grad[j],
                        step * problem.lambda * problem.weight(j),
                    );
                }
                iterations += 1;
                if iterations % 16 == 0 {
                    let obj = problem.objective(&x);
                    if obj < best_obj {
                        best_obj = obj;
                        best = x.clone();
                    }
                }
            }
            let obj = problem.objective(&x);
            if obj < best_obj {
                best_obj = obj;
                best = x;
            }
            let cert = problem.certificate(&problem.predictions(&best));
            let violation = problem.kkt_violation(&best, &cert);
            let surplus = cert
                .iter()
                .enumerate()
                .map(|(j, c)| c.abs() - problem.lambda * problem.weight(j))
                .fold(f64::NEG_INFINITY, f64::max);
            ProxOutcome {
                objective: best_obj,
                kkt_surplus: surplus,
                converged: violation <= opts.opt_tol * problem.lambda,
                x: best,
                iterations,
            }
        }
    }
}

/// Cyclic exact coordinate descent for smooth losses. Squared loss gets the
/// closed-form update; logistic gets a monotone bisection on the coordinate
/// subgradient. Hinge is rejected: coordinate descent is not valid for a
/// nonsmooth, non-separable risk.
pub(crate) fn coordinate_descent_l1(
    problem: &Composite,
    opts: &SolverOptions,
) -> Result<ProxOutcome> {
    if !problem.loss.is_smooth() {
        return Err(Error::UnsupportedLoss(
            "coordinate descent requires a smooth loss",
        ));
    }
    let n = problem.n() as f64;
    let m = problem.m();
    let mut x = vec![0.0; m];
    let mut u = vec![0.0; problem.n()];
    let tol = opts.opt_tol * problem.lambda;
    let max_sweeps = (opts.max_iters / m.max(1)).max(64);
    let mut sweeps = 0usize;

    let col_sq: Vec<f64> = problem.cols.iter().map(|c| linalg::dot(c, c)).collect();

    for sweep in 0..max_sweeps {
        sweeps = sweep + 1;
        for j in 0..m {
            let col = &problem.cols[j];
            if col_sq[j] == 0.0 {
                continue;
            }
            let lw = problem.lambda * problem.weight(j);
            match problem.loss {
                Loss::Squared => {
                    // Quadratic coordinate model is exact.
                    let h = 2.0 / n * col_sq[j];
                    let g: f64 = col
                        .iter()
                        .zip(&u)
                        .zip(problem.labels)
                        .map(|((&c, &ui), &y)| c * 2.0 / n * (ui - y))
                        .sum();
                    let target = soft(x[j] - g / h, lw / h);
                    let delta = target - x[j];
                    if delta != 0.0 {
                        for (ui, &c) in u.iter_mut().zip(col) {
                            *ui += delta * c;
                        }
                        x[j] = target;
                    }
                }
                Loss::Logistic => {
                    let psi = |t: f64| -> f64 {
                        col.iter()
                            .zip(&u)
                            .zip(problem.labels)
                            .map(|((&c, &ui), &y)| {
                                c * problem.loss.gradient(y, ui + c * (t - x[j])) / n
                            })
                            .sum()
                    };
                    let target = minimize_scalar(psi, lw, x[j]);
                    let delta = target - x[j];
                    if delta != 0.0 {
                        for (ui, &c) in u.iter_mut().zip(col) {
                            *ui += delta * c;
                        }
                        x[j] = target;
                    }
                }
                Loss::Hinge => unreachable!(),
            }
        }
        let cert = problem.certificate(&u);
        if problem.kkt_violation(&x, &cert) <= tol {
            let surplus = cert
                .iter()
                .enumerate()
                .map(|(j, c)| c.abs() - problem.lambda * problem.weight(j))
                .fold(f64::NEG_INFINITY, f64::max);
            return Ok(ProxOutcome {
                objective: problem.objective(&x),
                kkt_surplus: surplus,
                x,
                iterations: sweeps * m,
                converged: true,
            });
        }
    }
    let surplus = problem.kkt_surplus(&x);
    Ok(ProxOutcome {
        objective: problem.objective(&x),
        kkt_surplus: surplus,
        x,
        iterations: sweeps * m,
        converged: false,
    })
}

/// Scaled-form ADMM for the squared-loss problem, splitting μ = z. The
/// μ-update is a linear solve through a cached eigendecomposition of
/// (2/n)AᵀA (reused across penalty updates), which keeps the method robust
/// on correlated columns where coordinate methods crawl.
pub(crate) fn admm_l1_squared(problem: &Composite, opts: &SolverOptions) -> Result<ProxOutcome> {
    if problem.loss != Loss::Squared {
        return Err(Error::UnsupportedLoss(
            "admm route requires the squared loss",
        ));
    }
    let m = problem.m();
    let n = problem.n() as f64;
    // M = (2/n) AᵀA and q = (2/n) Aᵀ y.
    let mut mmat = Mat::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = 2.0 / n * linalg::dot(&problem.cols[i], &problem.cols[j]);
            *mmat.at_mut(i, j) = v;
            *mmat.at_mut(j, i) = v;
        }
    }
    let q: Vec<f64> = problem
        .cols
        .iter()
        .map(|c| 2.0 / n * linalg::dot(c, problem.labels))
        .collect();
    let (evals, evecs) = linalg::sym_eigen(&mmat);
    let solve_shifted = |rhs: &[f64], rho: f64| -> Vec<f64> {
        // (M + ρI)⁻¹ rhs through the eigenbasis.
        let mut coef = vec![0.0; m];
        for c in 0..m {
            let mut dot = 0.0;
            for r in 0..m {
                dot += evecs.at(r, c) * rhs[r];
            }
            coef[c] = dot / (evals[c].max(0.0) + rho);
        }
        let mut out = vec![0.0; m];
        for r in 0..m {
            let mut acc = 0.0;
            for c in 0..m {
                acc += evecs.at(r, c) * coef[c];
            }
            out[r] = acc;
        }
        out
    };

    let mut rho = 1.0f64.max(problem.lambda);
    let mut z = vec![0.0; m];
    let mut u = vec![0.0; m];
    let tol = opts.opt_tol * problem.lambda;
    let mut iterations = 0usize;
    while iterations < opts.max_iters {
        let rhs: Vec<f64> = (0..m).map(|j| q[j] + rho * (z[j] - u[j])).collect();
        let x = solve_shifted(&rhs, rho);
        let z_old = z.clone();
        for j in 0..m {
            z[j] = soft(x[j] + u[j], problem.lambda * problem.weight(j) / rho);
            u[j] += x[j] - z[j];
        }
        iterations += 1;
        if iterations % 16 == 0 || iterations == opts.max_iters {
            let cert = problem.certificate(&problem.predictions(&z));
            if problem.kkt_violation(&z, &cert) <= tol {
                return Ok(ProxOutcome {
                    objective: problem.objective(&z),
                    kkt_surplus: cert
                        .iter()
                        .enumerate()
                        .map(|(j, c)| c.abs() - problem.lambda * problem.weight(j))
                        .fold(f64::NEG_INFINITY, f64::max),
                    x: z,
                    iterations,
                    converged: true,
                });
            }
            // Residual balancing keeps the penalty in a productive range.
            let primal: f64 = (0..m).map(|j| (x[j] - z[j]).powi(2)).sum::<f64>().sqrt();
            let dual: f64 = (0..m)
                .map(|j| (rho * (z[j] - z_old[j])).powi(2))
                .sum::<f64>()
                .sqrt();
            if primal > 10.0 * dual {
                rho *= 2.0;
                for ui in u.iter_mut() {
                    *ui /= 2.0;
                }
            } else if dual > 10.0 * primal {
                rho /= 2.0;
                for ui in u.iter_mut() {
                    *ui *= 2.0;
                }
            }
        }
    }
    let surplus = problem.kkt_surplus(&z);
    Ok(ProxOutcome {
        objective: problem.objective(&z),
        kkt_surplus: surplus,
        x: z,
        iterations,
        converged: false,
    })
}

/// Independent search used by the reformulation verifiers opposite FISTA:
/// ADMM for the squared loss, coordinate bisection descent for the logistic.
pub(crate) fn hypothesis_search_l1(
    problem: &Composite,
    opts: &SolverOptions,
) -> Result<ProxOutcome> {
    match problem.loss {
        Loss::Squared => admm_l1_squared(problem, opts),
        Loss::Logistic => coordinate_descent_l1(problem, opts),
        Loss::Hinge => Err(Error::UnsupportedLoss(
            "reformulation verification requires a smooth loss",
        )),
    }
}

/// Minimize φ(t) = smooth(t) + lw·|t| for a scalar convex smooth part given
/// through its nondecreasing derivative ψ.
fn minimize_scalar(psi: impl Fn(f64) -> f64, lw: f64, start: f64) -> f64 {
    let at_zero = psi(0.0);
    if at_zero.abs() <= lw {
        return 0.0;
    }
    // Optimal t has sign opposite to ψ(0); solve ψ(t) + lw·sign(t) = 0.
    let sign = if at_zero < -lw { 1.0 } else { -1.0 };
    let target = -lw * sign;
    let g = |t: f64| psi(t) - target;
    let mut lo = 0.0f64;
    let mut hi = if start * sign > 0.0 { start.abs() } else { 1.0 };
    // Expand the bracket until the derivative changes sign.
    for _ in 0..200 {
        if (g(sign * hi) >= 0.0) == (sign > 0.0) {
            break;
        }
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let v = g(sign * mid);
        if (v >= 0.0) == (sign > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    sign * 0.5 * (lo + hi)
}

/// FISTA for R(Σ col_j x_j) + λ‖x‖₂ (the non-squared group norm), used by the
/// direct-sum reformulation at p = 2. The prox is vector soft-thresholding.
pub(crate) fn fista_group_l2(problem: &Composite, opts: &SolverOptions) -> Result<ProxOutcome> {
    let curv = problem
        .loss
        .curvature_bound()
        .ok_or(Error::UnsupportedLoss(
            "group solver requires a smooth loss",
        ))?;
    let m = problem.m();
    let sigma_sq = problem.spectral_bound();
    let lip = (curv / problem.n() as f64) * sigma_sq;
    let step = if lip > 0.0 { 1.0 / lip } else { 1.0 };
    let lambda = problem.lambda;
    let tol = opts.opt_tol * lambda;

    let group_kkt = |x: &[f64], cert: &[f64]| -> f64 {
        let norm = linalg::norm2(x);
        if norm == 0.0 {
            (linalg::norm2(cert) - lambda).max(0.0)
        } else {
            let r: Vec<f64> = cert
                .iter()
                .zip(x)
                .map(|(c, xi)| c + lambda * xi / norm)
                .collect();
            linalg::norm2(&r)
        }
    };

    let mut x = vec![0.0; m];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut iterations = 0usize;
    while iterations < opts.max_iters {
        let grad = problem.certificate(&problem.predictions(&y));
        let mut v = vec![0.0; m];
        for j in 0..m {
            v[j] = y[j] - step * grad[j];
        }
        let vnorm = linalg::norm2(&v);
        let shrink = (1.0 - step * lambda / vnorm.max(1e-300)).max(0.0);
        let x_new: Vec<f64> = v.iter().map(|vi| shrink * vi).collect();
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_new;
        let mut restart = 0.0;
        let mut y_new = vec![0.0; m];
        for j in 0..m {
            let dx = x_new[j] - x[j];
            restart += (y[j] - x_new[j]) * dx;
            y_new[j] = x_new[j] + beta * dx;
        }
        if restart > 0.0 {
            t = 1.0;
            y_new.copy_from_slice(&x_new);
        } else {
            t = t_new;
        }
        x = x_new;
        y = y_new;
        iterations += 1;
        if iterations % 8 == 0 || iterations == opts.max_iters {
            let cert = problem.certificate(&problem.predictions(&x));
            if group_kkt(&x, &cert) <= tol {
                let u = problem.predictions(&x);
                return Ok(ProxOutcome {
                    objective: problem.risk(&u) + lambda * linalg::norm2(&x),
                    kkt_surplus: group_kkt(&x, &cert),
                    x,
                    iterations,
                    converged: true,
                });
            }
        }
    }
    let cert = problem.certificate(&problem.predictions(&x));
    let u = problem.predictions(&x);
    Ok(ProxOutcome {
        objective: problem.risk(&u) + lambda * linalg::norm2(&x),
        kkt_surplus: group_kkt(&x, &cert),
        x,
        iterations: opts.max_iters,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squared_problem<'a>(cols: &'a [Vec<f64>], labels: &'a [f64], lambda: f64) -> Composite<'a> {
        Composite {
            cols,
            labels,
            loss: Loss::Squared,
            lambda,
            l1_weights: None,
        }
    }

    #[test]
    fn fista_matches_scalar_soft_threshold() {
        // Single column: closed form x* = soft(aᵀy, nλ/2)/‖a‖².
        let cols = vec![vec![1.0, 2.0]];
        let labels = vec![1.0, 1.0];
        let lambda = 0.4;
        let p = squared_problem(&cols, &labels, lambda);
        let out = fista_l1(&p, &SolverOptions::default());
        let aty = 3.0;
        let expect = (aty - 2.0 * lambda / 2.0 * 2.0 / 2.0).max(0.0); // soft(3, nλ/2) with n = 2
        let expect = expect / 5.0;
        assert!(out.converged);
        assert!((out.x[0] - expect).abs() < 1e-8, "{} vs {expect}", out.x[0]);
    }

    #[test]
    fn threshold_lambda_gives_exact_zero() {
        let cols = vec![vec![1.0, -0.5], vec![0.25, 1.0]];
        let labels = vec![0.7, -0.2];
        // λ_max = ‖(2/n)Aᵀy‖_∞ with n = 2.
        let lam_max = cols
            .iter()
            .map(|c: &Vec<f64>| (c[0] * labels[0] + c[1] * labels[1]).abs())
            .fold(0.0f64, f64::max);
        let p = squared_problem(&cols, &labels, lam_max * 1.000001);
        let out = fista_l1(&p, &SolverOptions::default());
        assert!(out.x.iter().all(|&v| v == 0.0));
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn cd_and_fista_agree_on_random_instances() {
        let mut rng = crate::rng::SplitMix64::new(77);
        for _ in 0..20 {
            let n = rng.int_in(2, 5);
            let m = rng.int_in(2, 10);
            let cols: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect())
                .collect();
            let labels: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let lambda = rng.uniform(0.01, 0.3);
            let p = squared_problem(&cols, &labels, lambda);
            let opts = SolverOptions::default();
            let a = fista_l1(&p, &opts);
            let b = coordinate_descent_l1(&p, &opts).unwrap();
            assert!(a.converged && b.converged);
            let scale = 1.0f64.max(a.objective.abs());
            assert!(
                (a.objective - b.objective).abs() <= 1e-8 * scale,
                "fista {} vs cd {}",
                a.objective,
                b.objective
            );
        }
    }

    #[test]
    fn admm_and_fista_agree_including_weighted_l1() {
        let mut rng = crate::rng::SplitMix64::new(88);
        for trial in 0..20 {
            let n = rng.int_in(2, 5);
            let m = rng.int_in(2, 12);
            let cols: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect())
                .collect();
            let labels: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let weights: Vec<f64> = (0..m).map(|_| rng.uniform(0.05, 1.0)).collect();
            let lambda = rng.uniform(0.01, 0.3);
            let p = Composite {
                cols: &cols,
                labels: &labels,
                loss: Loss::Squared,
                lambda,
                l1_weights: if trial % 2 == 0 { Some(&weights) } else { None },
            };
            let opts = SolverOptions::default();
            let a = fista_l1(&p, &opts);
            let b = admm_l1_squared(&p, &opts).unwrap();
            assert!(a.converged && b.converged);
            let scale = 1.0f64.max(a.objective.abs());
            assert!(
                (a.objective - b.objective).abs() <= 1e-8 * scale,
                "fista {} vs admm {}",
                a.objective,
                b.objective
            );
        }
    }

    #[test]
    fn cd_rejects_hinge() {
        let cols = vec![vec![1.0]];
        let labels = vec![1.0];
        let p = Composite {
            cols: &cols,
            labels: &labels,
            loss: Loss::Hinge,
            lambda: 0.1,
            l1_weights: None,
        };
        assert!(matches!(
            coordinate_descent_l1(&p, &SolverOptions::default()),
            Err(Error::UnsupportedLoss(_))
        ));
    }

    #[test]
    fn logistic_cd_reaches_fista_optimum() {
        let mut rng = crate::rng::SplitMix64::new(3);
        for _ in 0..5 {
            let n = 4;
            let m = 6;
            let cols: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect())
                .collect();
            let labels: Vec<f64> = (0..n)
                .map(|_| if rng.next_f64() < 0.5 { -1.0 } else { 1.0 })
                .collect();
            let p = Composite {
                cols: &cols,
                labels: &labels,
                loss: Loss::Logistic,
                lambda: 0.05,
                l1_weights: None,
            };
            let opts = SolverOptions::default();
            let a = fista_l1(&p, &opts);
            let b = coordinate_descent_l1(&p, &opts).unwrap();
            assert!(
                (a.objective - b.objective).abs() <= 1e-6 * 1.0f64.max(a.objective),
                "{} vs {}",
                a.objective,
                b.objective
            );
        }
    }
}
