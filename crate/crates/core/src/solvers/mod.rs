//! In-house convex solvers behind every norm in the laboratory: a
//! basis-pursuit LP with basic (vertex) optimal solutions, weighted
//! least-norm via eigen-pseudoinverse, accelerated proximal gradient for
//! ℓ1-regularized empirical risk, and block-structured minimum-norm programs.

pub(crate) mod prox;
pub(crate) mod simplex;

use crate::activation::ActivationMatrix;
use crate::error::{Error, Result};
use crate::learn::Loss;
use crate::linalg::{self, PsdEigen};
use crate::spaces::{
    BlockComponent, BlockMeasure, DensityVector, DiscreteMeasure, ProbabilityWeights,
    SampleFunction,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub max_iters: usize,
    pub svd_cutoff_ratio: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            opt_tol: 1e-8,
            max_iters: 200_000,
            svd_cutoff_ratio: 1e-10,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.feas_tol > 0.0 && self.opt_tol > 0.0 && self.svd_cutoff_ratio > 0.0) {
            return Err(Error::Invalid("solver tolerances must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    MaxIters,
    Infeasible,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub status: SolveStatus,
    /// Dual vector for LP solves, for external KKT re-derivation.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dual: Option<Vec<f64>>,
    /// max_j(|Aᵀ∇R|_j) − λ for regularized-risk solves.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kkt_surplus: Option<f64>,
}

/// One summand of a direct-sum feature space: an activation matrix together
/// with optional block probability weights. With weights the block is an
/// L^p(π) space acting by (Ah)(x_k) = Σ_j π_j A[k][j] h_j; without weights it
/// is a measure block in the total-variation norm acting by Aμ.
#[derive(Clone, Debug)]
pub struct FeatureBlock {
    pub matrix: ActivationMatrix,
    pub weights: Option<ProbabilityWeights>,
}

impl FeatureBlock {
    pub fn new(matrix: ActivationMatrix, weights: Option<ProbabilityWeights>) -> Result<Self> {
        if let Some(w) = &weights {
            if w.len() != matrix.cols() {
                return Err(Error::Alignment(format!(
                    "{} weights against {} matrix columns",
                    w.len(),
                    matrix.cols()
                )));
            }
        }
        Ok(Self { matrix, weights })
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Column j of the effective linear operator.
    pub(crate) fn effective_column(&self, j: usize) -> Vec<f64> {
        let scale = self.weights.as_ref().map_or(1.0, |w| w.weights()[j]);
        self.matrix
            .column(j)
            .into_iter()
            .map(|v| scale * v)
            .collect()
    }

    /// ℓ1 cost of coefficient j (π_j for weighted blocks, 1 otherwise).
    pub(crate) fn l1_cost(&self, j: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w.weights()[j])
    }

    /// Sample values produced by a coefficient vector on this block.
    pub fn apply(&self, coefficients: &[f64]) -> Result<SampleFunction> {
        if coefficients.len() != self.cols() {
            return Err(Error::Alignment(format!(
                "{} coefficients against {} columns",
                coefficients.len(),
                self.cols()
            )));
        }
        match &self.weights {
            Some(pi) => self
                .matrix
                .apply_density(&DensityVector::new(coefficients.to_vec())?, pi),
            None => self
                .matrix
                .apply_measure(&DiscreteMeasure::new(coefficients.to_vec())?),
        }
    }

    fn component(&self, coefficients: Vec<f64>) -> BlockComponent {
        BlockComponent {
            values: coefficients,
            weights: self.weights.clone(),
        }
    }
}

fn check_lengths(a: &ActivationMatrix, f: &SampleFunction) -> Result<()> {
    if f.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "target of length {} against {} samples",
            f.len(),
            a.rows()
        )));
    }
    Ok(())
}

/// Least-squares representability test: residual of projecting f onto the
/// range of the effective operator, accepted when ≤ feas_tol · (1 + ‖f‖).
fn representability_residual(
    a: &ActivationMatrix,
    weights: Option<&[f64]>,
    f: &SampleFunction,
    opts: &SolverOptions,
) -> Result<PsdEigen> {
    let gram = linalg::weighted_gram(&a.as_mat(), weights);
    let eig = PsdEigen::new(&gram, opts.svd_cutoff_ratio);
    let residual = eig.range_residual(f.values());
    if residual > opts.feas_tol * (1.0 + linalg::norm2(f.values())) {
        return Err(Error::NotRepresentable { residual });
    }
    Ok(eig)
}

/// Minimize Σ_j |μ_j| subject to Aμ = f. The simplex returns a vertex of the
/// split-variable polytope, so the minimizer has at most n nonzero weights
/// and its objective is the discretized integral-RKBS norm of f.
///
/// Feasibility is decided inside the LP preprocessing: the least-squares
/// residual of f against the independent constraint rows must stay within
/// feas_tol · (1 + ‖f‖), otherwise the solve fails as not representable.
pub fn min_l1_interpolate(
    a: &ActivationMatrix,
    f: &SampleFunction,
    opts: &SolverOptions,
) -> Result<(DiscreteMeasure, SolveReport)> {
    opts.validate()?;
    check_lengths(a, f)?;
    if f.values().iter().all(|&v| v == 0.0) {
        return Ok((
            DiscreteMeasure::zeros(a.cols()),
            SolveReport {
                objective: 0.0,
                iterations: 0,
                primal_residual: 0.0,
                status: SolveStatus::Optimal,
                dual: Some(vec![0.0; a.rows()]),
                kkt_surplus: None,
            },
        ));
    }
    let cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    let costs = vec![1.0; a.cols()];
    let (coef, report) = weighted_l1_lp(&cols, &costs, f, opts)?;
    Ok((DiscreteMeasure::new(coef)?, report))
}

/// Shared LP core for weighted minimum-ℓ1 interpolation over explicit
/// columns: minimize Σ_j c_j |x_j| subject to Σ_j col_j x_j = f.
pub(crate) fn weighted_l1_lp(
    cols: &[Vec<f64>],
    costs: &[f64],
    f: &SampleFunction,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let m = cols.len();
    let mut split_cols = Vec::with_capacity(2 * m);
    let mut split_cost = Vec::with_capacity(2 * m);
    for (col, &c) in cols.iter().zip(costs) {
        split_cols.push(col.clone());
        split_cols.push(col.iter().map(|v| -v).collect());
        split_cost.push(c);
        split_cost.push(c);
    }
    let inst = simplex::LpInstance {
        cols: split_cols,
        cost: split_cost,
        rhs: f.values().to_vec(),
    };
    let out = simplex::solve_equality_lp(&inst, opts.feas_tol, opts.max_iters)?;
    let coef: Vec<f64> = (0..m).map(|j| out.x[2 * j] - out.x[2 * j + 1]).collect();
    let status = if out.max_iters_hit {
        SolveStatus::MaxIters
    } else {
        SolveStatus::Optimal
    };
    Ok((
        coef,
        SolveReport {
            objective: out.objective,
            iterations: out.iterations,
            primal_residual: out.residual,
            status,
            dual: Some(out.dual),
            kkt_surplus: None,
        },
    ))
}

/// Minimum π-weighted L² density with (Ah)(x_k) = Σ_j π_j A[k][j] h_j = f_k,
/// computed through the eigen-pseudoinverse of K = A diag(π) Aᵀ with relative
/// cutoff: h = Aᵀ K⁺ f and the objective satisfies objective² = fᵀ K⁺ f.
pub fn min_l2_interpolate(
    a: &ActivationMatrix,
    f: &SampleFunction,
    pi: &ProbabilityWeights,
    opts: &SolverOptions,
) -> Result<(DensityVector, SolveReport)> {
    opts.validate()?;
    check_lengths(a, f)?;
    if pi.len() != a.cols() {
        return Err(Error::Alignment(format!(
            "{} weights against {} columns",
            pi.len(),
            a.cols()
        )));
    }
    let eig = representability_residual(a, Some(pi.weights()), f, opts)?;
    let nu = eig.pinv_apply(f.values());
    let h = a.as_mat().tr_matvec(&nu);
    let density = DensityVector::new(h)?;
    let objective = crate::spaces::lp_norm(&density, pi, 2)?;
    let fitted = a.apply_density(&density, pi)?;
    // The truncated spectrum must still reproduce f; otherwise the target is
    // effectively outside the retained range.
    let gap: Vec<f64> = fitted
        .values()
        .iter()
        .zip(f.values())
        .map(|(a, b)| a - b)
        .collect();
    let gap2 = linalg::norm2(&gap);
    if gap2 > opts.feas_tol * (1.0 + linalg::norm2(f.values())) {
        return Err(Error::NotRepresentable { residual: gap2 });
    }
    let residual = gap.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    Ok((
        density,
        SolveReport {
            objective,
            iterations: 0,
            primal_residual: residual,
            status: SolveStatus::Optimal,
            dual: None,
            kkt_surplus: None,
        },
    ))
}

/// Approximately minimize R_{L,D}(Aμ) + λ Σ_j |μ_j| by accelerated proximal
/// gradient with soft-thresholding. On optimal exit the KKT surplus
/// max_j |Aᵀ∇R|_j − λ is at most opt_tol · λ.
pub fn prox_grad_lasso(
    a: &ActivationMatrix,
    labels: &SampleFunction,
    loss: Loss,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<(DiscreteMeasure, SolveReport)> {
    opts.validate()?;
    check_lengths(a, labels)?;
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::Invalid(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    let problem = prox::Composite {
        cols: &cols,
        labels: labels.values(),
        loss,
        lambda,
        l1_weights: None,
    };
    let out = prox::fista_l1(&problem, opts);
    Ok((
        DiscreteMeasure::new(out.x)?,
        SolveReport {
            objective: out.objective,
            iterations: out.iterations,
            primal_residual: 0.0,
            status: if out.converged {
                SolveStatus::Optimal
            } else {
                SolveStatus::MaxIters
            },
            dual: None,
            kkt_surplus: Some(out.kkt_surplus),
        },
    ))
}

/// Minimize (Σ_i ‖coef_i‖^p)^{1/p} subject to Σ_i A_i coef_i = f over a list
/// of feature blocks. p = 1 is one basis-pursuit LP on the concatenated
/// effective columns; p = 2 is the least-norm solve on the concatenated
/// weighted system through the summed Gram matrix.
pub fn block_min_norm(
    blocks: &[FeatureBlock],
    f: &SampleFunction,
    p: u8,
    opts: &SolverOptions,
) -> Result<(BlockMeasure, SolveReport)> {
    opts.validate()?;
    if blocks.is_empty() {
        return Err(Error::EmptyInput("feature blocks"));
    }
    let n = blocks[0].rows();
    if f.len() != n {
        return Err(Error::Dimension(format!(
            "target of length {} against {} samples",
            f.len(),
            n
        )));
    }
    for b in blocks {
        if b.rows() != n {
            return Err(Error::Alignment(
                "blocks with differing sample counts".into(),
            ));
        }
    }
    match p {
        1 => {
            let mut cols = Vec::new();
            let mut costs = Vec::new();
            let mut spans = Vec::new();
            for b in blocks {
                let start = cols.len();
                for j in 0..b.cols() {
                    cols.push(b.effective_column(j));
                    costs.push(b.l1_cost(j));
                }
                spans.push(start..cols.len());
            }
            let (coef, report) = weighted_l1_lp(&cols, &costs, f, opts)?;
            let components = blocks
                .iter()
                .zip(&spans)
                .map(|(b, span)| b.component(coef[span.clone()].to_vec()))
                .collect();
            Ok((BlockMeasure::new(components, 1)?, report))
        }
        2 => {
            let mut ksum = crate::linalg::Mat::zeros(n, n);
            for b in blocks {
                let g = linalg::weighted_gram(
                    &b.matrix.as_mat(),
                    b.weights.as_ref().map(|w| w.weights()),
                );
                for (kv, gv) in ksum.data.iter_mut().zip(&g.data) {
                    *kv += gv;
                }
            }
            let eig = PsdEigen::new(&ksum, opts.svd_cutoff_ratio);
            let residual = eig.range_residual(f.values());
            if residual > opts.feas_tol * (1.0 + linalg::norm2(f.values())) {
                return Err(Error::NotRepresentable { residual });
            }
            let nu = eig.pinv_apply(f.values());
            let components: Vec<BlockComponent> = blocks
                .iter()
                .map(|b| b.component(b.matrix.as_mat().tr_matvec(&nu)))
                .collect();
            let bm = BlockMeasure::new(components, 2)?;
            let objective = crate::spaces::block_norm(&bm)?;
            let mut fitted = SampleFunction::zeros(n);
            for (b, c) in blocks.iter().zip(&bm.components) {
                fitted = fitted.plus(&b.apply(&c.values)?)?;
            }
            let gap: Vec<f64> = fitted
                .values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| a - b)
                .collect();
            let gap2 = linalg::norm2(&gap);
            if gap2 > opts.feas_tol * (1.0 + linalg::norm2(f.values())) {
                return Err(Error::NotRepresentable { residual: gap2 });
            }
            let primal_residual = gap.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            Ok((
                bm,
                SolveReport {
                    objective,
                    iterations: 0,
                    primal_residual,
                    status: SolveStatus::Optimal,
                    dual: None,
                    kkt_surplus: None,
                },
            ))
        }
        other => Err(Error::UnsupportedExponent(other as u32)),
    }
}
