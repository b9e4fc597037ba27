//! Acceptance suite: one test per criterion, each printing a pass line.
//! Batch sizes and tolerances are pinned here; instance streams are keyed by
//! fixed seeds so the batches are reproducible.

use rkbslab_core::activation::spectrum;
use rkbslab_core::learn::{
    lambda_max_squared, train_tv, training_kkt_surplus, Loss, Strategy, TrainConfig,
};
use rkbslab_core::oracle::{oracle_eigensolve, oracle_min_l1, OracleBudget};
use rkbslab_core::rkbs::GramMatrix;
use rkbslab_core::rng::{derive_seed, SplitMix64};
use rkbslab_core::solvers::{min_l1_interpolate, SolverOptions};
use rkbslab_core::spaces::{
    lp_norm, measure_from_blocks, split_to_blocks, tv_norm, DensityVector, DiscreteMeasure,
    SampleFunction, SingularPartition,
};
use rkbslab_core::suites;
use std::time::Instant;

const SEED: u64 = 20_240_817;

fn pass(criterion: usize, name: &str, detail: String) {
    println!("ACCEPTANCE {criterion} ({name}): PASS  [{detail}]");
}

#[test]
fn criterion_01_decomposition() {
    let start = Instant::now();
    let report = suites::decomposition_suite(200, SEED, 1e-6).expect("suite runs");
    let elapsed = start.elapsed();
    assert!(
        report.pass,
        "decomposition max rel err {} > 1e-6",
        report.max_rel_err
    );
    assert_eq!(report.instances.len(), 200);
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "decomposition suite took {elapsed:?}, budget 60 s"
    );
    pass(
        1,
        "decomposition",
        format!(
            "200 instances, max rel err {:.3e}, {:.2} s",
            report.max_rel_err,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_compatibility() {
    for p in [1u8, 2] {
        let report = suites::compatibility_suite(100, SEED, 1e-6, p).expect("suite runs");
        assert!(
            report.pass,
            "compatibility p={p} max rel err {} > 1e-6",
            report.max_rel_err
        );
        assert_eq!(report.instances.len(), 100);
    }
    pass(
        2,
        "compatibility",
        "100 instances each for p=1 and p=2".into(),
    );
}

#[test]
fn criterion_03_kernel_duality() {
    let duality = suites::kernel_duality_suite(100, SEED, 1e-8).expect("suite runs");
    assert!(
        duality.pass,
        "kernel duality max rel err {} > 1e-8",
        duality.max_rel_err
    );
    assert_eq!(duality.instances.len(), 100);
    let sum = suites::kernel_sum_suite(100, SEED, 1e-6).expect("suite runs");
    assert!(
        sum.pass,
        "sum-kernel max rel err {} > 1e-6",
        sum.max_rel_err
    );
    pass(
        3,
        "kernel duality",
        format!(
            "duality max rel err {:.3e}, sum-kernel max rel err {:.3e}",
            duality.max_rel_err, sum.max_rel_err
        ),
    );
}

#[test]
fn criterion_04_inclusion() {
    let report = suites::inclusion_suite(100, SEED, 1e-8).expect("suite runs");
    // Chain slack ≥ −1e−8 in absolute terms, and every per-block p=1 ≤ p=2
    // comparison is part of the instance list.
    assert!(
        report.max_abs_err <= 1e-8,
        "worst chain violation {} > 1e-8",
        report.max_abs_err
    );
    assert!(report.pass);
    let block_checks = report
        .instances
        .iter()
        .filter(|c| c.descriptor.contains("l1_le_l2"))
        .count();
    assert!(block_checks >= 100, "per-block comparisons missing");
    pass(
        4,
        "inclusion",
        format!(
            "100 instances, worst violation {:.3e}, {} per-block l1<=l2 checks",
            report.max_abs_err, block_checks
        ),
    );
}

#[test]
fn criterion_05_reformulation() {
    let single = suites::reformulation_suite(50, SEED, 1e-6).expect("suite runs");
    assert!(
        single.pass,
        "reformulation max rel err {} > 1e-6",
        single.max_rel_err
    );
    let block = suites::block_reformulation_suite(50, SEED, 1e-6).expect("suite runs");
    assert!(
        block.pass,
        "block reformulation max rel err {} > 1e-6",
        block.max_rel_err
    );
    // Both optimum equality and minimizer transfer are checked per instance.
    for report in [&single, &block] {
        assert!(report
            .instances
            .iter()
            .any(|c| c.descriptor.contains("optimum")));
        assert!(report
            .instances
            .iter()
            .any(|c| c.descriptor.contains("transfer")));
    }
    pass(
        5,
        "reformulation",
        format!(
            "50 single (max {:.3e}) + 50 direct-sum (max {:.3e})",
            single.max_rel_err, block.max_rel_err
        ),
    );
}

#[test]
fn criterion_06_representer() {
    let mut worst_surplus_ratio = 0.0f64;
    let mut worst_fit_drift = 0.0f64;
    let mut worst_strategy_gap = 0.0f64;
    for idx in 0..50u64 {
        let mut rng = SplitMix64::new(derive_seed(SEED, 0x6e9 + idx));
        let n = rng.int_in(2, 6);
        let m = rng.int_in(4, 16);
        let (a, grid, labels, lambda) = suites::gen::training_instance(&mut rng, n, m);
        let full = TrainConfig::new(lambda, Strategy::FullGrid).expect("lambda > 0");
        let (mu, rep, _) =
            train_tv(&a, &grid, &labels, Loss::Squared, &full).expect("training runs");
        assert!(
            rep.atoms.len() <= n,
            "representer kept {} atoms with n = {n}",
            rep.atoms.len()
        );
        let direct_fit = a.apply_measure(&mu).expect("aligned");
        for (x, y) in rep.fitted.values().iter().zip(direct_fit.values()) {
            worst_fit_drift = worst_fit_drift.max((x - y).abs());
            assert!(
                (x - y).abs() <= 1e-8,
                "fitted values drifted {}",
                (x - y).abs()
            );
        }
        let surplus =
            training_kkt_surplus(&a, &mu, &labels, Loss::Squared, lambda).expect("aligned");
        assert!(
            surplus <= 1e-4 * lambda,
            "KKT surplus {surplus} > 1e-4 lambda ({lambda})"
        );
        worst_surplus_ratio = worst_surplus_ratio.max(surplus / lambda);
        let exch = TrainConfig::new(lambda, Strategy::Exchange).expect("lambda > 0");
        let (_, rep_ex, _) =
            train_tv(&a, &grid, &labels, Loss::Squared, &exch).expect("training runs");
        let scale = 1.0f64.max(rep.objective.abs());
        let gap = (rep.objective - rep_ex.objective).abs() / scale;
        assert!(
            gap <= 1e-5,
            "strategy objectives differ by {gap} (full {}, exchange {})",
            rep.objective,
            rep_ex.objective
        );
        worst_strategy_gap = worst_strategy_gap.max(gap);
    }
    pass(
        6,
        "representer",
        format!(
            "50 runs, worst surplus/lambda {:.2e}, fit drift {:.2e}, strategy gap {:.2e}",
            worst_surplus_ratio, worst_fit_drift, worst_strategy_gap
        ),
    );
}

#[test]
fn criterion_07_threshold_identity() {
    for idx in 0..20u64 {
        let mut rng = SplitMix64::new(derive_seed(SEED, 0x7e0 + idx));
        let n = rng.int_in(2, 6);
        let m = rng.int_in(4, 16);
        let (a, grid, labels, _) = suites::gen::training_instance(&mut rng, n, m);
        let lam_max = lambda_max_squared(&a, &labels);
        // At the threshold itself and strictly above it.
        let factor = if idx % 2 == 0 {
            1.0
        } else {
            rng.uniform(1.0, 3.0)
        };
        let config = TrainConfig::new(lam_max * factor, Strategy::FullGrid).expect("lambda > 0");
        let (mu, rep, _) =
            train_tv(&a, &grid, &labels, Loss::Squared, &config).expect("training runs");
        assert!(
            mu.weights().iter().all(|&w| w == 0.0),
            "trained measure not exactly zero at lambda = {factor} * lambda_max"
        );
        assert!(rep.atoms.is_empty());
    }
    pass(
        7,
        "threshold identity",
        "20 instances, trained measure exactly zero".into(),
    );
}

#[test]
fn criterion_08_oracle_agreement() {
    let opts = SolverOptions::default();
    let budget = OracleBudget::default();
    let mut worst_l1 = 0.0f64;
    let mut worst_spec = 0.0f64;
    for idx in 0..50u64 {
        let mut rng = SplitMix64::new(derive_seed(SEED, 0x8e0 + idx));
        let n = rng.int_in(1, 3);
        let m = rng.int_in(2, 10);
        let (_, a, f) = suites::gen::representable_instance(&mut rng, n, m);
        let exact = oracle_min_l1(&a, &f, &budget).expect("oracle runs");
        let (_, report) = min_l1_interpolate(&a, &f, &opts).expect("solver runs");
        let gap = (exact - report.objective).abs();
        assert!(
            gap <= 1e-8 * (1.0 + exact),
            "simplex {} vs oracle {exact}",
            report.objective
        );
        worst_l1 = worst_l1.max(gap / (1.0 + exact));

        // Squared singular values against the oracle eigensolver on AAᵀ,
        // with the Gram matrix built by an independent triple loop.
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for c in 0..m {
                    s += a.entry(i, c) * a.entry(j, c);
                }
                gram[i * n + j] = s;
            }
        }
        let k = GramMatrix::new(n, gram).expect("psd by construction");
        let eigs = oracle_eigensolve(&k).expect("within oracle range");
        let sv = spectrum(&a);
        for (s, l) in sv.iter().zip(&eigs) {
            let gap = (s * s - l).abs();
            assert!(
                gap <= 1e-8 * (1.0 + l.abs()),
                "spectrum {} vs eig {l}",
                s * s
            );
            worst_spec = worst_spec.max(gap / (1.0 + l.abs()));
        }
    }
    pass(
        8,
        "oracle agreement",
        format!("50 instances, worst l1 gap {worst_l1:.2e}, worst spectrum gap {worst_spec:.2e}"),
    );
}

#[test]
fn criterion_09_isometry_round_trip() {
    let mut worst = 0.0f64;
    for idx in 0..200u64 {
        let mut rng = SplitMix64::new(derive_seed(SEED, 0x9e0 + idx));
        let m = rng.int_in(2, 32);
        let partition = if idx % 2 == 0 {
            suites::gen::covering_partition(&mut rng, m, 6)
        } else {
            // Non-covering variant: keep a strict subset of the blocks.
            let full = suites::gen::covering_partition(&mut rng, m, 6);
            let keep = rng.int_in(1, full.n_blocks());
            SingularPartition::new(
                m,
                full.blocks()[..keep].to_vec(),
                full.block_weights()[..keep].to_vec(),
            )
            .expect("prefix of a valid partition")
        };
        let densities: Vec<DensityVector> = partition
            .blocks()
            .iter()
            .map(|b| {
                DensityVector::new(b.iter().map(|_| rng.uniform(-5.0, 5.0)).collect())
                    .expect("finite")
            })
            .collect();
        let mu = measure_from_blocks(&partition, &densities).expect("aligned");
        let block_l1: f64 = densities
            .iter()
            .zip(partition.block_weights())
            .map(|(h, pi)| lp_norm(h, pi, 1).expect("aligned"))
            .sum();
        let gap = (tv_norm(&mu) - block_l1).abs();
        assert!(gap <= 1e-12, "isometry gap {gap}");
        worst = worst.max(gap);
        let back = split_to_blocks(&mu, &partition).expect("supported");
        let again = measure_from_blocks(&partition, &back).expect("aligned");
        assert_eq!(
            mu.weights(),
            again.weights(),
            "measure round trip not exact"
        );
        // Density round trip for measures built from densities.
        for (h, b) in densities.iter().zip(&back) {
            for (x, y) in h.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
        // Zero measures split to zero densities.
        let zero = DiscreteMeasure::zeros(m);
        let parts = split_to_blocks(&zero, &partition).expect("aligned");
        assert!(parts.iter().all(|h| h.values().iter().all(|&v| v == 0.0)));
    }
    pass(
        9,
        "theta isometry",
        format!("200 partitions, worst isometry gap {worst:.2e}"),
    );
}

// Criterion 10 (byte-identical verify reports) exercises the command-line
// pipeline and lives in the cli crate's acceptance tests.

#[test]
fn evaluation_functional_bound_on_acceptance_instances() {
    // Companion invariant: |f(x_k)| ≤ max_j |A[k][j]| · ‖f‖ for every
    // computed integral norm.
    let opts = SolverOptions::default();
    for idx in 0..50u64 {
        let mut rng = SplitMix64::new(derive_seed(SEED, 0xeb0 + idx));
        let n = rng.int_in(1, 6);
        let m = rng.int_in(2, 24);
        let (_, a, f) = suites::gen::representable_instance(&mut rng, n, m);
        let norm = rkbslab_core::rkbs::integral_norm(&a, &f, &opts).expect("representable");
        for k in 0..a.rows() {
            let row_max = a.row(k).iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
            assert!(f.values()[k].abs() <= row_max * norm + 1e-9);
        }
    }
}

#[test]
fn sample_function_helper_behaves() {
    let f = SampleFunction::new(vec![1.0, -2.0]).unwrap();
    let g = f.scaled(-0.5);
    assert_eq!(g.values(), &[-0.5, 1.0]);
    let h = f.plus(&g).unwrap();
    assert_eq!(h.values(), &[0.5, -1.0]);
}
