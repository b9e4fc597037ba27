//! Losses and empirical risk, total-variation-regularized training of
//! one-layer networks, pre-dual certificates, representer extraction, and
//! the reformulation-scheme verifiers.

use crate::activation::{
    eval_activation, ActivationFamily, ActivationMatrix, ParameterPoint, SamplePoint,
};
use crate::error::{Error, Result};
use crate::linalg::{self, PsdEigen};
use crate::rkbs::{
    integral_norm, pnorm_rkbs_norm, rkhs_norm, GramMatrix, InstanceCheck, VerificationReport,
};
use crate::solvers::{
    min_l1_interpolate,
    prox::{fista_group_l2, fista_l1, hypothesis_search_l1, Composite},
    FeatureBlock, SolveReport, SolveStatus, SolverOptions,
};
use crate::spaces::{tv_norm, DiscreteMeasure, ParameterGrid, SampleFunction};
use serde::{Deserialize, Serialize};

/// Convex margin/regression losses, always mean-reduced over the sample set.
/// The signature is L(y, t) with t the prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    Squared,
    Logistic,
    Hinge,
}

impl Loss {
    pub fn value(&self, y: f64, t: f64) -> f64 {
        match self {
            Loss::Squared => (y - t) * (y - t),
            Loss::Logistic => softplus(-y * t),
            Loss::Hinge => (1.0 - y * t).max(0.0),
        }
    }

    /// Derivative in t; for the hinge this is the subgradient choice that is
    /// zero at the kink.
    pub fn gradient(&self, y: f64, t: f64) -> f64 {
        match self {
            Loss::Squared => 2.0 * (t - y),
            Loss::Logistic => -y * sigmoid(-y * t),
            Loss::Hinge => {
                if 1.0 - y * t > 0.0 {
                    -y
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper bound on the second derivative in t, when one exists.
    pub fn curvature_bound(&self) -> Option<f64> {
        match self {
            Loss::Squared => Some(2.0),
            Loss::Logistic => Some(0.25),
            Loss::Hinge => None,
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, Loss::Hinge)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Empirical risk (1/n) Σ_k L(y_k, f(x_k)).
pub fn empirical_risk(
    loss: Loss,
    predictions: &SampleFunction,
    labels: &SampleFunction,
) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} predictions against {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    let n = predictions.len() as f64;
    Ok(predictions
        .values()
        .iter()
        .zip(labels.values())
        .map(|(&t, &y)| loss.value(y, t))
        .sum::<f64>()
        / n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Accelerated proximal gradient over the whole grid.
    FullGrid,
    /// Certificate-driven atom insertion with restricted-support solves.
    Exchange,
}

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub lambda: f64,
    pub options: SolverOptions,
    pub strategy: Strategy,
}

impl TrainConfig {
    pub fn new(lambda: f64, strategy: Strategy) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Invalid(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            lambda,
            options: SolverOptions::default(),
            strategy,
        })
    }
}

/// One atom of a finite representer solution a_j σ(·, w_j).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepresenterAtom {
    pub index: usize,
    pub weight: f64,
    pub point: ParameterPoint,
}

/// Pruned finite-atom minimizer together with its fitted sample values and
/// regularized objective.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepresenterSolution {
    pub atoms: Vec<RepresenterAtom>,
    pub fitted: SampleFunction,
    pub objective: f64,
}

impl RepresenterSolution {
    pub fn measure(&self, grid_size: usize) -> DiscreteMeasure {
        let mut weights = vec![0.0; grid_size];
        for atom in &self.atoms {
            weights[atom.index] = atom.weight;
        }
        DiscreteMeasure::new(weights).expect("finite atom weights")
    }
}

/// A signed discrete measure on the sample points; pairing it against the
/// activation columns gives the pre-dual certificate function on the grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleMeasure {
    weights: Vec<f64>,
}

impl SampleMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Invalid("non-finite sample measure weight".into()));
        }
        Ok(Self { weights })
    }

    pub fn dirac(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::Dimension(format!("sample {at} out of range {n}")));
        }
        let mut weights = vec![0.0; n];
        weights[at] = 1.0;
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Discretized pre-dual pairing g(w_j) = Σ_k ρ_k σ(x_k, w_j), evaluated σ by
/// σ (the transpose-product identity is what the tests check against).
pub fn dual_certificate(
    family: &ActivationFamily,
    samples: &[SamplePoint],
    grid: &ParameterGrid,
    rho: &SampleMeasure,
) -> Result<Vec<f64>> {
    if rho.weights().len() != samples.len() {
        return Err(Error::Alignment(format!(
            "{} measure weights against {} samples",
            rho.weights().len(),
            samples.len()
        )));
    }
    let mut out = Vec::with_capacity(grid.size());
    for w in grid.atoms() {
        let mut acc = 0.0;
        for (x, &r) in samples.iter().zip(rho.weights()) {
            if r != 0.0 {
                acc += r * eval_activation(family, x, w)?;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// The smallest λ for which the squared-loss training problem has the zero
/// solution: ‖(2/n) Aᵀ y‖_∞. Computed through the same certificate
/// arithmetic the solvers evaluate at the zero measure, so training with
/// λ ≥ this value returns the exact zero vector.
pub fn lambda_max_squared(a: &ActivationMatrix, labels: &SampleFunction) -> f64 {
    let n = labels.len() as f64;
    let grad: Vec<f64> = labels
        .values()
        .iter()
        .map(|&y| Loss::Squared.gradient(y, 0.0) / n)
        .collect();
    (0..a.cols())
        .map(|j| linalg::dot(&a.column(j), &grad).abs())
        .fold(0.0, f64::max)
}

/// Minimize R_{L,D}(Aμ) + λ ‖μ‖_TV and return the measure, its pruned
/// representer, and the solve report.
pub fn train_tv(
    a: &ActivationMatrix,
    grid: &ParameterGrid,
    labels: &SampleFunction,
    loss: Loss,
    config: &TrainConfig,
) -> Result<(DiscreteMeasure, RepresenterSolution, SolveReport)> {
    if grid.size() != a.cols() {
        return Err(Error::Dimension(format!(
            "grid of {} atoms against {} columns",
            grid.size(),
            a.cols()
        )));
    }
    if labels.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "{} labels against {} samples",
            labels.len(),
            a.rows()
        )));
    }
    let (mu, report) = match config.strategy {
        Strategy::FullGrid => {
            crate::solvers::prox_grad_lasso(a, labels, loss, config.lambda, &config.options)?
        }
        Strategy::Exchange => {
            let (mu, report, _trace) = train_exchange(a, labels, loss, config)?;
            (mu, report)
        }
    };
    let representer =
        extract_representer(&mu, a, grid, labels, loss, config.lambda, &config.options)?;
    Ok((mu, representer, report))
}

/// Exchange strategy: start from the empty support, insert the atom with the
/// largest certificate magnitude (ties to the lowest index), re-solve on the
/// restricted support, stop once max_j |certificate_j| ≤ λ(1 + opt_tol).
/// Returns the objective trace across outer iterations, which is
/// nonincreasing because each restricted optimum stays feasible later.
pub(crate) fn train_exchange(
    a: &ActivationMatrix,
    labels: &SampleFunction,
    loss: Loss,
    config: &TrainConfig,
) -> Result<(DiscreteMeasure, SolveReport, Vec<f64>)> {
    let opts = &config.options;
    opts.validate()?;
    let lambda = config.lambda;
    let m = a.cols();
    let n = labels.len() as f64;
    let cols: Vec<Vec<f64>> = (0..m).map(|j| a.column(j)).collect();

    let mut x = vec![0.0; m];
    let mut support: Vec<usize> = Vec::new();
    let mut iterations = 0usize;
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIters;
    let mut surplus = f64::INFINITY;

    let objective = |x: &[f64]| -> f64 {
        let mut u = vec![0.0; labels.len()];
        for (j, col) in cols.iter().enumerate() {
            if x[j] != 0.0 {
                for (ui, &c) in u.iter_mut().zip(col) {
                    *ui += x[j] * c;
                }
            }
        }
        let risk: f64 = u
            .iter()
            .zip(labels.values())
            .map(|(&t, &y)| loss.value(y, t))
            .sum::<f64>()
            / n;
        risk + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    };

    for _outer in 0..=m {
        // Certificate at the current iterate.
        let mut u = vec![0.0; labels.len()];
        for (j, col) in cols.iter().enumerate() {
            if x[j] != 0.0 {
                for (ui, &c) in u.iter_mut().zip(col) {
                    *ui += x[j] * c;
                }
            }
        }
        let grad: Vec<f64> = u
            .iter()
            .zip(labels.values())
            .map(|(&t, &y)| loss.gradient(y, t) / n)
            .collect();
        let cert: Vec<f64> = cols.iter().map(|c| linalg::dot(c, &grad)).collect();
        let (mut best_j, mut best_c) = (0usize, 0.0f64);
        for (j, c) in cert.iter().enumerate() {
            if c.abs() > best_c {
                best_c = c.abs();
                best_j = j;
            }
        }
        trace.push(objective(&x));
        surplus = best_c - lambda;
        if best_c <= lambda * (1.0 + opts.opt_tol) {
            status = SolveStatus::Optimal;
            break;
        }
        if support.contains(&best_j) {
            // The certificate still flags an active atom: the restricted
            // solve cannot improve further at this tolerance.
            break;
        }
        support.push(best_j);
        // Restricted-support solve.
        let sub_cols: Vec<Vec<f64>> = support.iter().map(|&j| cols[j].clone()).collect();
        let problem = Composite {
            cols: &sub_cols,
            labels: labels.values(),
            loss,
            lambda,
            l1_weights: None,
        };
        let sub = fista_l1(&problem, opts);
        iterations += sub.iterations.max(1);
        for v in x.iter_mut() {
            *v = 0.0;
        }
        for (&j, &v) in support.iter().zip(&sub.x) {
            x[j] = v;
        }
        if iterations >= opts.max_iters {
            break;
        }
    }

    let obj = objective(&x);
    Ok((
        DiscreteMeasure::new(x)?,
        SolveReport {
            objective: obj,
            iterations,
            primal_residual: 0.0,
            status,
            dual: None,
            kkt_surplus: Some(surplus),
        },
        trace,
    ))
}

/// Prune a near-optimal measure to a representer with at most n atoms:
/// weights below 1e−8 · max|a_j| are dropped, and if more than n atoms
/// survive, the minimal-TV measure with the same fitted values is re-solved
/// by the basic-solution LP (which cannot increase the TV norm).
pub fn extract_representer(
    mu: &DiscreteMeasure,
    a: &ActivationMatrix,
    grid: &ParameterGrid,
    labels: &SampleFunction,
    loss: Loss,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<RepresenterSolution> {
    if mu.len() != a.cols() || grid.size() != a.cols() {
        return Err(Error::Dimension(format!(
            "measure of {} weights against {} columns and {} atoms",
            mu.len(),
            a.cols(),
            grid.size()
        )));
    }
    let target_fit = a.apply_measure(mu)?;
    let pruned = prune_weights(mu.weights());
    let kept = pruned.iter().filter(|&&w| w != 0.0).count();
    let final_weights = if kept > a.rows() {
        let (resolved, _) = min_l1_interpolate(a, &target_fit, opts)?;
        prune_weights(resolved.weights())
    } else {
        pruned
    };
    let atoms: Vec<RepresenterAtom> = final_weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(index, &weight)| RepresenterAtom {
            index,
            weight,
            point: grid.atoms()[index].clone(),
        })
        .collect();
    let measure = DiscreteMeasure::new(final_weights)?;
    let fitted = a.apply_measure(&measure)?;
    let objective = empirical_risk(loss, &fitted, labels)? + lambda * tv_norm(&measure);
    Ok(RepresenterSolution {
        atoms,
        fitted,
        objective,
    })
}

fn prune_weights(weights: &[f64]) -> Vec<f64> {
    let max = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let threshold = 1e-8 * max;
    weights
        .iter()
        .map(|&w| if w.abs() <= threshold { 0.0 } else { w })
        .collect()
}

/// Feature-space against hypothesis-space optimum for the TV-regularized
/// problem: route (i) solves in measure coordinates by accelerated proximal
/// gradient; route (ii) searches over representable fits with an
/// independent method (ADMM for the squared loss) and evaluates the
/// candidate through the norm's LP. The report also checks that the
/// transferred minimizer f* = Aμ* attains the hypothesis-space optimum.
pub fn verify_reformulation(
    a: &ActivationMatrix,
    labels: &SampleFunction,
    loss: Loss,
    lambda: f64,
    opts: &SolverOptions,
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let (mu_star, report) = crate::solvers::prox_grad_lasso(a, labels, loss, lambda, opts)?;
    let opt_feature = report.objective;

    let cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    let problem = Composite {
        cols: &cols,
        labels: labels.values(),
        loss,
        lambda,
        l1_weights: None,
    };
    let search = hypothesis_search_l1(&problem, opts)?;
    let f_search = a.apply_measure(&DiscreteMeasure::new(search.x)?)?;
    let opt_hypothesis =
        empirical_risk(loss, &f_search, labels)? + lambda * integral_norm(a, &f_search, opts)?;

    let f_star = a.apply_measure(&mu_star)?;
    let transferred =
        empirical_risk(loss, &f_star, labels)? + lambda * integral_norm(a, &f_star, opts)?;

    let checks = vec![
        InstanceCheck::equality(seed, "optimum", opt_feature, opt_hypothesis),
        InstanceCheck::equality(seed, "transfer", transferred, opt_hypothesis),
    ];
    Ok(VerificationReport::from_checks(
        "reformulation",
        tolerance,
        checks,
    ))
}

/// Direct-sum version of the reformulation check over feature blocks: the
/// ⊕^p feature-space optimum equals the ⊕^p hypothesis-space optimum and the
/// transferred block minimizer attains it. p = 1 compares FISTA against
/// coordinate descent with per-block LP norms; p = 2 compares the weighted
/// density parametrization against the kernel square-root parametrization.
pub fn verify_block_reformulation(
    blocks: &[FeatureBlock],
    labels: &SampleFunction,
    loss: Loss,
    lambda: f64,
    p: u8,
    opts: &SolverOptions,
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput("feature blocks"));
    }
    let n = labels.len();
    for b in blocks {
        if b.rows() != n {
            return Err(Error::Alignment(
                "blocks with differing sample counts".into(),
            ));
        }
    }
    match p {
        1 => block_reformulation_l1(blocks, labels, loss, lambda, opts, tolerance, seed),
        2 => block_reformulation_l2(blocks, labels, loss, lambda, opts, tolerance, seed),
        other => Err(Error::UnsupportedExponent(other as u32)),
    }
}

fn block_reformulation_l1(
    blocks: &[FeatureBlock],
    labels: &SampleFunction,
    loss: Loss,
    lambda: f64,
    opts: &SolverOptions,
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut cols = Vec::new();
    let mut weights = Vec::new();
    let mut spans = Vec::new();
    for b in blocks {
        let start = cols.len();
        for j in 0..b.cols() {
            cols.push(b.effective_column(j));
            weights.push(b.l1_cost(j));
        }
        spans.push(start..cols.len());
    }
    let problem = Composite {
        cols: &cols,
        labels: labels.values(),
        loss,
        lambda,
        l1_weights: Some(&weights),
    };
    let feature = fista_l1(&problem, opts);
    let opt_feature = feature.objective;

    let search = hypothesis_search_l1(&problem, opts)?;
    let hypothesis_value = |coef: &[f64]| -> Result<f64> {
        let mut total = SampleFunction::zeros(labels.len());
        let mut norm_sum = 0.0;
        for (b, span) in blocks.iter().zip(&spans) {
            let fi = b.apply(&coef[span.clone()])?;
            total = total.plus(&fi)?;
            norm_sum += match &b.weights {
                Some(pi) => pnorm_rkbs_norm(&b.matrix, &fi, pi, 1, opts)?,
                None => integral_norm(&b.matrix, &fi, opts)?,
            };
        }
        Ok(empirical_risk(loss, &total, labels)? + lambda * norm_sum)
    };
    let opt_hypothesis = hypothesis_value(&search.x)?;
    let transferred = hypothesis_value(&feature.x)?;

    let checks = vec![
        InstanceCheck::equality(seed, "optimum_p1", opt_feature, opt_hypothesis),
        InstanceCheck::equality(seed, "transfer_p1", transferred, opt_hypothesis),
    ];
    Ok(VerificationReport::from_checks(
        "block_reformulation",
        tolerance,
        checks,
    ))
}

fn block_reformulation_l2(
    blocks: &[FeatureBlock],
    labels: &SampleFunction,
    loss: Loss,
    lambda: f64,
    opts: &SolverOptions,
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let n = labels.len();
    // Route (i): density side in √π-scaled coordinates, group ℓ2 prox.
    let mut cols = Vec::new();
    let mut spans = Vec::new();
    for b in blocks {
        let start = cols.len();
        for j in 0..b.cols() {
            let scale = b.weights.as_ref().map_or(1.0, |w| w.weights()[j].sqrt());
            cols.push(
                b.matrix
                    .column(j)
                    .into_iter()
                    .map(|v| scale * v)
                    .collect::<Vec<f64>>(),
            );
        }
        spans.push(start..cols.len());
    }
    let problem = Composite {
        cols: &cols,
        labels: labels.values(),
        loss,
        lambda,
        l1_weights: None,
    };
    let feature = fista_group_l2(&problem, opts)?;
    let opt_feature = feature.objective;

    // Route (ii): kernel side through per-block square roots.
    let grams: Vec<GramMatrix> = blocks
        .iter()
        .map(|b| {
            let g =
                linalg::weighted_gram(&b.matrix.as_mat(), b.weights.as_ref().map(|w| w.weights()));
            GramMatrix::new(n, g.data)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut kcols = Vec::new();
    let mut kspans = Vec::new();
    for g in &grams {
        let start = kcols.len();
        let sqrt = PsdEigen::new(&g.as_mat(), opts.svd_cutoff_ratio).sqrt_matrix();
        for c in 0..n {
            kcols.push((0..n).map(|r| sqrt.at(r, c)).collect::<Vec<f64>>());
        }
        kspans.push(start..kcols.len());
    }
    let kproblem = Composite {
        cols: &kcols,
        labels: labels.values(),
        loss,
        lambda,
        l1_weights: None,
    };
    let kernel = fista_group_l2(&kproblem, opts)?;

    let fits_from = |coef: &[f64],
                     cols: &[Vec<f64>],
                     spans: &[std::ops::Range<usize>]|
     -> Vec<SampleFunction> {
        spans
            .iter()
            .map(|span| {
                let mut fi = vec![0.0; n];
                for j in span.clone() {
                    if coef[j] != 0.0 {
                        for (o, &c) in fi.iter_mut().zip(&cols[j]) {
                            *o += coef[j] * c;
                        }
                    }
                }
                SampleFunction::new(fi).expect("finite fit")
            })
            .collect()
    };
    let hypothesis_value = |fits: &[SampleFunction]| -> Result<f64> {
        let mut total = SampleFunction::zeros(n);
        let mut acc = 0.0;
        for (g, fi) in grams.iter().zip(fits) {
            total = total.plus(fi)?;
            let norm = rkhs_norm(g, fi, opts)?;
            acc += norm * norm;
        }
        Ok(empirical_risk(loss, &total, labels)? + lambda * acc.sqrt())
    };
    let opt_hypothesis = hypothesis_value(&fits_from(&kernel.x, &kcols, &kspans))?;
    let transferred = hypothesis_value(&fits_from(&feature.x, &cols, &spans))?;

    let checks = vec![
        InstanceCheck::equality(seed, "optimum_p2", opt_feature, opt_hypothesis),
        InstanceCheck::equality(seed, "transfer_p2", transferred, opt_hypothesis),
    ];
    Ok(VerificationReport::from_checks(
        "block_reformulation",
        tolerance,
        checks,
    ))
}

/// KKT surplus of a measure for the training problem, re-derived outside the
/// solvers: max_j |(Aᵀ∇R)_j| − λ.
pub fn training_kkt_surplus(
    a: &ActivationMatrix,
    mu: &DiscreteMeasure,
    labels: &SampleFunction,
    loss: Loss,
    lambda: f64,
) -> Result<f64> {
    let cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    let problem = Composite {
        cols: &cols,
        labels: labels.values(),
        loss,
        lambda,
        l1_weights: None,
    };
    Ok(problem.kkt_surplus(mu.weights()))
}

/// Certificate vector Aᵀ∇R(Aμ) at a measure, used for on-support KKT checks.
pub fn training_certificate(
    a: &ActivationMatrix,
    mu: &DiscreteMeasure,
    labels: &SampleFunction,
    loss: Loss,
) -> Result<Vec<f64>> {
    let fitted = a.apply_measure(mu)?;
    let n = labels.len() as f64;
    let grad: Vec<f64> = fitted
        .values()
        .iter()
        .zip(labels.values())
        .map(|(&t, &y)| loss.gradient(y, t) / n)
        .collect();
    Ok((0..a.cols())
        .map(|j| linalg::dot(&a.column(j), &grad))
        .collect())
}
