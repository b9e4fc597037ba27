//! The five batch subcommands: assemble, spectrum, norm, train, verify.
//! Reports go to files under the output directory; logs go to stderr only.

use crate::config::{ExperimentConfig, Instance, SuiteName};
use crate::jsonfmt::canonical;
use crate::CliError;
use rkbslab_core::activation::spectrum;
use rkbslab_core::learn::{train_tv, TrainConfig};
use rkbslab_core::rkbs::partition_blocks;
use rkbslab_core::rkbs::{
    integral_norm, pnorm_rkbs_norm, sum_rkbs_norm, SumMode, VerificationReport,
};
use rkbslab_core::solvers::SolverOptions;
use rkbslab_core::spaces::ProbabilityWeights;
use rkbslab_core::suites;
use serde_json::{json, Value};
use std::path::Path;

pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub digest: String,
    pub out_dir: &'a Path,
}

impl Context<'_> {
    fn write_text(&self, name: &str, text: &str) -> Result<(), CliError> {
        std::fs::create_dir_all(self.out_dir).map_err(|e| {
            CliError::Config(format!("cannot create {}: {e}", self.out_dir.display()))
        })?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    /// Envelope every JSON report with the config digest and the seed.
    fn write_report(&self, name: &str, mut payload: Value) -> Result<(), CliError> {
        let obj = payload.as_object_mut().expect("reports are json objects");
        obj.insert("config_digest".into(), json!(self.digest));
        obj.insert("seed".into(), json!(self.config.seed));
        self.write_text(name, &canonical(&payload))
    }
}

pub fn assemble(ctx: &Context, instance: &Instance) -> Result<i32, CliError> {
    ctx.write_text("matrix.csv", &instance.matrix.to_csv())?;
    Ok(0)
}

pub fn spectrum_cmd(ctx: &Context, instance: &Instance) -> Result<i32, CliError> {
    let values = spectrum(&instance.matrix);
    let mut text = format!("1,{}\n", values.len());
    let row: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
    text.push_str(&row.join(","));
    text.push('\n');
    ctx.write_text("spectrum.csv", &text)?;
    Ok(0)
}

pub fn norm(ctx: &Context, instance: &Instance) -> Result<i32, CliError> {
    let opts = SolverOptions::default();
    let a = &instance.matrix;
    let f = &instance.labels;
    let uniform = ProbabilityWeights::uniform(a.cols()).map_err(CliError::from_core)?;
    let integral = integral_norm(a, f, &opts).map_err(CliError::from_core)?;
    let p1 = pnorm_rkbs_norm(a, f, &uniform, 1, &opts).map_err(CliError::from_core)?;
    let p2 = pnorm_rkbs_norm(a, f, &uniform, 2, &opts).map_err(CliError::from_core)?;
    let blocks = partition_blocks(a, &instance.partition).map_err(CliError::from_core)?;
    let joint = sum_rkbs_norm(&blocks, f, 1, SumMode::Joint, &opts).map_err(CliError::from_core)?;
    let nested =
        sum_rkbs_norm(&blocks, f, 1, SumMode::Nested, &opts).map_err(CliError::from_core)?;
    ctx.write_report(
        "norm.json",
        json!({
            "integral": integral,
            "pnorm_p1": p1,
            "pnorm_p2": p2,
            "sum_joint": joint,
            "sum_nested": nested,
        }),
    )?;
    Ok(0)
}

pub fn train(ctx: &Context, instance: &Instance) -> Result<i32, CliError> {
    for (i, &lambda) in ctx.config.lambdas.iter().enumerate() {
        let mut config =
            TrainConfig::new(lambda, ctx.config.strategy).map_err(CliError::from_core)?;
        config.options.seed = ctx.config.seed;
        let (_, representer, report) = train_tv(
            &instance.matrix,
            &instance.grid,
            &instance.labels,
            ctx.config.loss,
            &config,
        )
        .map_err(CliError::from_core)?;
        let atoms: Vec<Value> = representer
            .atoms
            .iter()
            .map(|atom| {
                let mut entry = json!({
                    "index": atom.index,
                    "weight": atom.weight,
                    "theta": atom.point.theta,
                    "bias": atom.point.bias,
                });
                if let Some(tag) = atom.point.tag {
                    entry
                        .as_object_mut()
                        .unwrap()
                        .insert("tag".into(), json!(tag));
                }
                entry
            })
            .collect();
        let mut payload = json!({
            "lambda": lambda,
            "loss": ctx.config.loss,
            "objective": representer.objective,
            "kkt_surplus": report.kkt_surplus,
            "atoms": atoms,
        });
        if let Some(teacher) = &instance.teacher {
            payload.as_object_mut().unwrap().insert(
                "teacher".into(),
                serde_json::to_value(teacher).expect("teacher encodes"),
            );
        }
        ctx.write_report(&format!("train_{i:03}.json"), payload)?;
    }
    Ok(0)
}

pub fn verify(ctx: &Context) -> Result<i32, CliError> {
    let selection = if ctx.config.suites.is_empty() {
        SuiteName::all()
    } else {
        ctx.config.suites.clone()
    };
    let counts = &ctx.config.suite_instances;
    let tol = &ctx.config.tolerances;
    let seed = ctx.config.seed;
    let mut all_pass = true;
    for suite in selection {
        let reports: Vec<(String, VerificationReport)> = match suite {
            SuiteName::Decomposition => vec![(
                "decomposition.json".into(),
                suites::decomposition_suite(counts.decomposition, seed, tol.solver_identity)
                    .map_err(CliError::from_core)?,
            )],
            SuiteName::Compatibility => {
                let p1 =
                    suites::compatibility_suite(counts.compatibility, seed, tol.solver_identity, 1)
                        .map_err(CliError::from_core)?;
                let p2 =
                    suites::compatibility_suite(counts.compatibility, seed, tol.solver_identity, 2)
                        .map_err(CliError::from_core)?;
                vec![(
                    "compatibility.json".into(),
                    VerificationReport::merged("compatibility", tol.solver_identity, vec![p1, p2]),
                )]
            }
            SuiteName::Inclusion => vec![(
                "inclusion.json".into(),
                suites::inclusion_suite(counts.inclusion, seed, tol.closed_form)
                    .map_err(CliError::from_core)?,
            )],
            SuiteName::Kernel => vec![
                (
                    "kernel_duality.json".into(),
                    suites::kernel_duality_suite(counts.kernel, seed, tol.closed_form)
                        .map_err(CliError::from_core)?,
                ),
                (
                    "kernel_sum.json".into(),
                    suites::kernel_sum_suite(counts.kernel, seed, tol.solver_identity)
                        .map_err(CliError::from_core)?,
                ),
            ],
            SuiteName::Reformulation => vec![
                (
                    "reformulation.json".into(),
                    suites::reformulation_suite(counts.reformulation, seed, tol.solver_identity)
                        .map_err(CliError::from_core)?,
                ),
                (
                    "block_reformulation.json".into(),
                    suites::block_reformulation_suite(
                        counts.reformulation,
                        seed,
                        tol.solver_identity,
                    )
                    .map_err(CliError::from_core)?,
                ),
            ],
        };
        for (name, report) in reports {
            eprintln!(
                "suite {}: {} (max rel err {:.3e} at tolerance {:.1e}, {} checks)",
                report.suite,
                if report.pass { "pass" } else { "FAIL" },
                report.max_rel_err,
                report.tolerance,
                report.instances.len()
            );
            all_pass &= report.pass;
            let payload = serde_json::to_value(&report).expect("report encodes");
            ctx.write_report(&name, payload)?;
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}
