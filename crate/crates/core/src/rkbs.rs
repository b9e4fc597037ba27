//! The theorem layer: every function-space norm of the laboratory as an
//! operation, Gram/kernel machinery for the L²-type spaces, and numerical
//! verifiers for the decomposition, compatibility, and inclusion identities.
//!
//! Functions are identified with their values on the finite sample set, so
//! each identity below is an exact finite-dimensional statement checked by
//! solving both of its sides with independent code paths.

use crate::activation::{assemble_matrix, ActivationFamily, ActivationMatrix, SamplePoint};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, PsdEigen};
use crate::solvers::{
    block_min_norm, min_l1_interpolate, min_l2_interpolate, weighted_l1_lp, FeatureBlock,
    SolverOptions,
};
use crate::spaces::{
    DensityVector, ParameterGrid, ProbabilityWeights, SampleFunction, SingularPartition,
};
use serde::{Deserialize, Serialize};

/// Relative tolerance for identities checked solver against solver.
pub const TOL_SOLVER_IDENTITY: f64 = 1e-6;
/// Relative tolerance for closed-form (pseudoinverse) identities.
pub const TOL_CLOSED_FORM: f64 = 1e-8;
/// Tolerance for identities that are exact linear algebra at finite scale.
pub const TOL_EXACT: f64 = 1e-12;

/// Kernel matrix K[a][b] = Σ_j π_j σ(x_a, w_j) σ(x_b, w_j).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramMatrix {
    n: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("gram matrix"));
        }
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "gram matrix needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        let k = Self { n, data };
        let mut trace = 0.0;
        for i in 0..n {
            trace += k.entry(i, i);
            for j in (i + 1)..n {
                if (k.entry(i, j) - k.entry(j, i)).abs() > 1e-12 * (1.0 + trace.abs()) {
                    return Err(Error::Invalid(format!(
                        "gram matrix asymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let (vals, _) = linalg::sym_eigen(&k.as_mat());
        if let Some(&min) = vals.last() {
            if min < -1e-9 * trace.abs().max(1.0) {
                return Err(Error::Invalid(format!(
                    "gram matrix has negative eigenvalue {min}"
                )));
            }
        }
        Ok(k)
    }

    pub fn from_activation(a: &ActivationMatrix, pi: &ProbabilityWeights) -> Result<Self> {
        if pi.len() != a.cols() {
            return Err(Error::Alignment(format!(
                "{} weights against {} columns",
                pi.len(),
                a.cols()
            )));
        }
        let g = linalg::weighted_gram(&a.as_mat(), Some(pi.weights()));
        Self::new(a.rows(), g.data)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub(crate) fn as_mat(&self) -> Mat {
        Mat {
            rows: self.n,
            cols: self.n,
            data: self.data.clone(),
        }
    }
}

/// K = A_block · diag(π) · A_blockᵀ assembled from a family, the sample set,
/// and one block's atoms.
pub fn gram_matrix(
    family: &ActivationFamily,
    samples: &[SamplePoint],
    atoms: &ParameterGrid,
    pi: &ProbabilityWeights,
) -> Result<GramMatrix> {
    let a = assemble_matrix(family, samples, atoms)?;
    GramMatrix::from_activation(&a, pi)
}

/// Entrywise sum of kernels: the Gram matrix of the 2-sum of the RKHSs.
pub fn sum_kernel(grams: &[GramMatrix]) -> Result<GramMatrix> {
    let first = grams.first().ok_or(Error::EmptyInput("gram matrices"))?;
    let n = first.size();
    let mut data = vec![0.0; n * n];
    for g in grams {
        if g.size() != n {
            return Err(Error::Dimension(format!(
                "summing gram matrices of sizes {n} and {}",
                g.size()
            )));
        }
        for (d, v) in data.iter_mut().zip(&g.data) {
            *d += v;
        }
    }
    GramMatrix::new(n, data)
}

/// √(fᵀ K⁺ f), the native-space norm of f against a kernel matrix.
pub fn rkhs_norm(k: &GramMatrix, f: &SampleFunction, opts: &SolverOptions) -> Result<f64> {
    if f.len() != k.size() {
        return Err(Error::Dimension(format!(
            "target of length {} against {}x{} kernel",
            f.len(),
            k.size(),
            k.size()
        )));
    }
    let eig = PsdEigen::new(&k.as_mat(), opts.svd_cutoff_ratio);
    let residual = eig.range_residual(f.values());
    if residual > opts.feas_tol * (1.0 + linalg::norm2(f.values())) {
        return Err(Error::NotRepresentable { residual });
    }
    Ok(eig.quad_pinv(f.values()).sqrt())
}

/// Discretized integral-RKBS norm: the least total variation over measures
/// with Aμ = f, computed by the basis-pursuit LP.
pub fn integral_norm(
    a: &ActivationMatrix,
    f: &SampleFunction,
    opts: &SolverOptions,
) -> Result<f64> {
    let (_, report) = min_l1_interpolate(a, f, opts)?;
    Ok(report.objective)
}

/// Discretized p-norm-RKBS norm: the least L^p(π) norm over densities with
/// (Ah) = f. p = 1 solves the weighted LP in density coordinates; p = 2 is
/// the pseudoinverse least-norm solve.
pub fn pnorm_rkbs_norm(
    a: &ActivationMatrix,
    f: &SampleFunction,
    pi: &ProbabilityWeights,
    p: u8,
    opts: &SolverOptions,
) -> Result<f64> {
    if pi.len() != a.cols() {
        return Err(Error::Alignment(format!(
            "{} weights against {} columns",
            pi.len(),
            a.cols()
        )));
    }
    match p {
        1 => {
            // Atoms with π_j = 0 are invisible to the operator; drop them.
            let active: Vec<usize> = (0..a.cols()).filter(|&j| pi.weights()[j] > 0.0).collect();
            if active.is_empty() {
                return Err(Error::NotRepresentable {
                    residual: linalg::norm2(f.values()),
                });
            }
            let cols: Vec<Vec<f64>> = active
                .iter()
                .map(|&j| {
                    a.column(j)
                        .into_iter()
                        .map(|v| pi.weights()[j] * v)
                        .collect()
                })
                .collect();
            let costs: Vec<f64> = active.iter().map(|&j| pi.weights()[j]).collect();
            let (_, report) = weighted_l1_lp(&cols, &costs, f, opts)?;
            Ok(report.objective)
        }
        2 => {
            let (_, report) = min_l2_interpolate(a, f, pi, opts)?;
            Ok(report.objective)
        }
        other => Err(Error::UnsupportedExponent(other as u32)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumMode {
    /// One program over the direct sum of feature spaces.
    Joint,
    /// Program in the per-block fit variables f_i with the inner norms
    /// expanded, the infimal-convolution form of the sum norm.
    Nested,
}

/// Norm of f in the sum of the block spaces. Joint and nested mode must
/// agree; the compatibility verifier checks exactly that.
pub fn sum_rkbs_norm(
    blocks: &[FeatureBlock],
    f: &SampleFunction,
    p: u8,
    mode: SumMode,
    opts: &SolverOptions,
) -> Result<f64> {
    match mode {
        SumMode::Joint => {
            let (_, report) = block_min_norm(blocks, f, p, opts)?;
            Ok(report.objective)
        }
        SumMode::Nested => match p {
            1 => nested_sum_l1(blocks, f, opts),
            2 => nested_sum_l2(blocks, f, opts),
            other => Err(Error::UnsupportedExponent(other as u32)),
        },
    }
}

/// Nested p = 1: explicit LP over decompositions f = Σ f_i. Variables are
/// the block coefficients and the per-block fits; rows tie each fit to its
/// block and the fits to f.
fn nested_sum_l1(blocks: &[FeatureBlock], f: &SampleFunction, opts: &SolverOptions) -> Result<f64> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput("feature blocks"));
    }
    let n = f.len();
    let k = blocks.len();
    let rows = k * n + n;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut cost: Vec<f64> = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        if b.rows() != n {
            return Err(Error::Alignment(
                "blocks with differing sample counts".into(),
            ));
        }
        for j in 0..b.cols() {
            let eff = b.effective_column(j);
            let mut col = vec![0.0; rows];
            col[i * n..(i + 1) * n].copy_from_slice(&eff);
            let neg: Vec<f64> = col.iter().map(|v| -v).collect();
            cols.push(col);
            cols.push(neg);
            cost.push(b.l1_cost(j));
            cost.push(b.l1_cost(j));
        }
    }
    // Free fit variables f_i[r], split into positive and negative parts:
    // −1 in the block row, +1 in the coupling row, zero cost.
    for i in 0..k {
        for r in 0..n {
            let mut col = vec![0.0; rows];
            col[i * n + r] = -1.0;
            col[k * n + r] = 1.0;
            let neg: Vec<f64> = col.iter().map(|v| -v).collect();
            cols.push(col);
            cols.push(neg);
            cost.push(0.0);
            cost.push(0.0);
        }
    }
    let mut rhs = vec![0.0; rows];
    rhs[k * n..].copy_from_slice(f.values());
    let inst = crate::solvers::simplex::LpInstance { cols, cost, rhs };
    let out = crate::solvers::simplex::solve_equality_lp(&inst, opts.feas_tol, opts.max_iters)?;
    Ok(out.objective)
}

/// Nested p = 2: minimize (Σ_i ‖f_i‖²_{B_i})^{1/2} over f = Σ f_i with each
/// inner norm expanded through its block kernel. The minimizing fits are
/// f_i = K_i (ΣK)⁺ f and the value is evaluated kernel-side per block.
fn nested_sum_l2(blocks: &[FeatureBlock], f: &SampleFunction, opts: &SolverOptions) -> Result<f64> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput("feature blocks"));
    }
    let n = f.len();
    let grams: Vec<GramMatrix> = blocks
        .iter()
        .map(|b| {
            if b.rows() != n {
                return Err(Error::Alignment(
                    "blocks with differing sample counts".into(),
                ));
            }
            let g =
                linalg::weighted_gram(&b.matrix.as_mat(), b.weights.as_ref().map(|w| w.weights()));
            GramMatrix::new(n, g.data)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = sum_kernel(&grams)?;
    let eig = PsdEigen::new(&total.as_mat(), opts.svd_cutoff_ratio);
    let residual = eig.range_residual(f.values());
    if residual > opts.feas_tol * (1.0 + linalg::norm2(f.values())) {
        return Err(Error::NotRepresentable { residual });
    }
    let nu = eig.pinv_apply(f.values());
    let mut acc = 0.0;
    let mut total_fit = vec![0.0; n];
    for g in &grams {
        let fi = g.as_mat().matvec(&nu);
        for (t, v) in total_fit.iter_mut().zip(&fi) {
            *t += v;
        }
        let block_eig = PsdEigen::new(&g.as_mat(), opts.svd_cutoff_ratio);
        acc += block_eig.quad_pinv(&fi);
    }
    let gap: Vec<f64> = total_fit
        .iter()
        .zip(f.values())
        .map(|(a, b)| a - b)
        .collect();
    let gap2 = linalg::norm2(&gap);
    if gap2 > opts.feas_tol * (1.0 + linalg::norm2(f.values())) {
        return Err(Error::NotRepresentable { residual: gap2 });
    }
    Ok(acc.sqrt())
}

/// One verified left/right comparison inside a suite report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceCheck {
    pub seed: u64,
    pub descriptor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    #[serde(skip)]
    pub abs_err: f64,
}

impl InstanceCheck {
    /// Equality check: discrepancy |lhs − rhs| relative to max(1, |lhs|, |rhs|).
    pub fn equality(seed: u64, descriptor: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let abs = (lhs - rhs).abs();
        let scale = 1.0f64.max(lhs.abs()).max(rhs.abs());
        Self {
            seed,
            descriptor: descriptor.into(),
            lhs,
            rhs,
            rel_err: abs / scale,
            abs_err: abs,
        }
    }

    /// One-sided check lhs ≤ rhs: the discrepancy is the violation only.
    pub fn upper_bound(seed: u64, descriptor: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let abs = (lhs - rhs).max(0.0);
        let scale = 1.0f64.max(lhs.abs()).max(rhs.abs());
        Self {
            seed,
            descriptor: descriptor.into(),
            lhs,
            rhs,
            rel_err: abs / scale,
            abs_err: abs,
        }
    }
}

/// Machine-readable outcome of a verification suite; pass holds exactly when
/// the worst relative discrepancy is within tolerance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub tolerance: f64,
    pub instances: Vec<InstanceCheck>,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn from_checks(
        suite: impl Into<String>,
        tolerance: f64,
        instances: Vec<InstanceCheck>,
    ) -> Self {
        let max_abs_err = instances.iter().fold(0.0f64, |m, c| m.max(c.abs_err));
        let max_rel_err = instances.iter().fold(0.0f64, |m, c| m.max(c.rel_err));
        Self {
            suite: suite.into(),
            tolerance,
            instances,
            max_abs_err,
            max_rel_err,
            pass: max_rel_err <= tolerance,
        }
    }

    pub fn merged(
        suite: impl Into<String>,
        tolerance: f64,
        parts: Vec<VerificationReport>,
    ) -> Self {
        let instances = parts.into_iter().flat_map(|p| p.instances).collect();
        Self::from_checks(suite, tolerance, instances)
    }
}

/// Joint and nested sum norms must coincide; report their discrepancy.
pub fn verify_compatibility(
    blocks: &[FeatureBlock],
    f: &SampleFunction,
    p: u8,
    opts: &SolverOptions,
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let joint = sum_rkbs_norm(blocks, f, p, SumMode::Joint, opts)?;
    let nested = sum_rkbs_norm(blocks, f, p, SumMode::Nested, opts)?;
    let check = InstanceCheck::equality(seed, format!("joint_vs_nested_p{p}"), joint, nested);
    Ok(VerificationReport::from_checks(
        "compatibility",
        tolerance,
        vec![check],
    ))
}

/// The integral norm against the block Σ-L¹ norm over a covering partition.
/// Both sides are LPs related by an exact diagonal change of variables.
pub fn verify_decomposition(
    a: &ActivationMatrix,
    partition: &SingularPartition,
    f: &SampleFunction,
    opts: &SolverOptions,
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport> {
    if partition.grid_size() != a.cols() {
        return Err(Error::Dimension(format!(
            "partition over {} atoms against {} columns",
            partition.grid_size(),
            a.cols()
        )));
    }
    if let Some(atom) = partition.first_uncovered() {
        return Err(Error::PartitionNotCovering(atom));
    }
    let lhs = integral_norm(a, f, opts)?;
    let blocks = partition_blocks(a, partition)?;
    let rhs = sum_rkbs_norm(&blocks, f, 1, SumMode::Joint, opts)?;
    let check = InstanceCheck::equality(seed, "integral_vs_block_sum_l1", lhs, rhs);
    Ok(VerificationReport::from_checks(
        "decomposition",
        tolerance,
        vec![check],
    ))
}

/// Feature blocks carved out of a global activation matrix by a partition.
pub fn partition_blocks(
    a: &ActivationMatrix,
    partition: &SingularPartition,
) -> Result<Vec<FeatureBlock>> {
    partition
        .blocks()
        .iter()
        .zip(partition.block_weights())
        .map(|(idx, pi)| FeatureBlock::new(a.select_columns(idx)?, Some(pi.clone())))
        .collect()
}

/// Builds f_i = A_i h_i and f = Σ f_i, then checks the norm chain
/// integral ≤ Σ‖·‖_{L¹(π_i)} ≤ Σ‖·‖_{L²(π_i)} together with the per-block
/// L¹ ≤ L² comparisons.
pub fn verify_inclusion(
    a: &ActivationMatrix,
    partition: &SingularPartition,
    densities: &[DensityVector],
    opts: &SolverOptions,
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport> {
    if densities.len() != partition.n_blocks() {
        return Err(Error::Alignment(format!(
            "{} densities against {} blocks",
            densities.len(),
            partition.n_blocks()
        )));
    }
    let blocks = partition_blocks(a, partition)?;
    let mut f = SampleFunction::zeros(a.rows());
    let mut fits = Vec::with_capacity(blocks.len());
    for (b, h) in blocks.iter().zip(densities) {
        let fi = b.apply(h.values())?;
        f = f.plus(&fi)?;
        fits.push(fi);
    }
    let integral = integral_norm(a, &f, opts)?;
    let mut checks = Vec::new();
    let mut sum_l1 = 0.0;
    let mut sum_l2 = 0.0;
    for (i, (b, fi)) in blocks.iter().zip(&fits).enumerate() {
        let pi = b.weights.as_ref().expect("partition blocks carry weights");
        let n1 = pnorm_rkbs_norm(&b.matrix, fi, pi, 1, opts)?;
        let n2 = pnorm_rkbs_norm(&b.matrix, fi, pi, 2, opts)?;
        checks.push(InstanceCheck::upper_bound(
            seed,
            format!("block{i}_l1_le_l2"),
            n1,
            n2,
        ));
        sum_l1 += n1;
        sum_l2 += n2;
    }
    checks.insert(
        0,
        InstanceCheck::upper_bound(seed, "integral_le_sum_l1", integral, sum_l1),
    );
    checks.insert(
        1,
        InstanceCheck::upper_bound(seed, "sum_l1_le_sum_l2", sum_l1, sum_l2),
    );
    Ok(VerificationReport::from_checks(
        "inclusion",
        tolerance,
        checks,
    ))
}
