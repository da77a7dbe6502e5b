use std::fs;
use std::process::ExitCode;

use serde_json::{Map, Value};

use prophet_core::analytics::{bound_table, poisson_optimal_lambda};
use prophet_core::hardinstances::{half_tight_instance, tightness_experiment, HardInstanceParams};
use prophet_core::montecarlo::{estimate_ratio, sweep_r, Estimator};
use prophet_core::oracle::verify_lemmas;
use prophet_core::report::{self, Cell, Table};
use prophet_core::{DistributionSpec, Instance, PricePolicy, SimConfig};

use crate::output::{emit, CliError};
use crate::{Command, Common, EstimatorArg, Format, InstanceArgs, PolicyArgs};

const DEFAULT_N: usize = 20;
const DEFAULT_K: usize = 1;

type Flags = Vec<(String, String)>;

fn flag(flags: &mut Flags, key: &str, value: impl ToString) {
    flags.push((key.to_string(), value.to_string()));
}

fn float(x: f64) -> String {
    Cell::Float(x).to_string()
}

fn sim_config(common: &Common) -> SimConfig {
    let mut cfg = SimConfig::new(common.trials, common.seed)
        .with_threads(common.threads)
        .with_estimator(match common.estimator {
            EstimatorArg::Plain => Estimator::Plain,
            EstimatorArg::ConditionLast => Estimator::ConditionLast,
        });
    cfg.ci_level = common.ci_level;
    cfg
}

fn sim_flags(common: &Common, flags: &mut Flags) {
    flag(flags, "trials", common.trials);
    flag(flags, "seed", common.seed);
    flag(flags, "estimator", sim_config(common).estimator.label());
    flag(flags, "ci_level", float(common.ci_level));
}

fn build_instance(args: &InstanceArgs, flags: &mut Flags) -> Result<Instance, CliError> {
    let n = args.n.unwrap_or(DEFAULT_N);
    let k = args.k.unwrap_or(DEFAULT_K);
    let preset = |dists: Vec<DistributionSpec>| Instance::new(dists, k);
    let instance = match args.instance.as_str() {
        "iid-uniform" => preset(vec![DistributionSpec::uniform(0.0, 1.0)?; n])?,
        "iid-exponential" => preset(vec![DistributionSpec::exponential(1.0)?; n])?,
        "exp-heterogeneous" => preset(
            (1..=n)
                .map(|i| DistributionSpec::exponential(i as f64 / n as f64))
                .collect::<Result<_, _>>()?,
        )?,
        "half-tight" => {
            let scale = args.spike_scale.unwrap_or(n as f64);
            flag(flags, "instance", "half-tight");
            flag(flags, "n", n);
            flag(flags, "k", k);
            flag(flags, "delta", float(args.delta));
            flag(flags, "spike_scale", float(scale));
            return Ok(half_tight_instance(&HardInstanceParams::new(n, k, args.delta, scale)?)?);
        }
        source => {
            let text = if source.trim_start().starts_with('{') {
                source.to_string()
            } else {
                fs::read_to_string(source).map_err(|e| {
                    CliError::Usage(format!("cannot read instance file {source}: {e}"))
                })?
            };
            let mut instance = Instance::from_json(&text)?;
            if let Some(k) = args.k {
                instance = instance.with_k(k)?;
            }
            flag(flags, "instance", instance.to_json());
            return Ok(instance);
        }
    };
    flag(flags, "instance", &args.instance);
    flag(flags, "n", n);
    flag(flags, "k", k);
    Ok(instance)
}

fn build_policy(args: &PolicyArgs, instance: &Instance) -> Result<PricePolicy, CliError> {
    let policy = if let Some(r) = args.r {
        PricePolicy::SampleOrderStatistic { r }
    } else if let Some(p) = args.price {
        PricePolicy::FixedPrice { p }
    } else if let Some(q) = args.demand {
        PricePolicy::ExpectedDemandPrice { q }
    } else if let Some(text) = &args.policy {
        PricePolicy::from_json(text)?
    } else {
        PricePolicy::SampleOrderStatistic { r: instance.k() }
    };
    policy.validate()?;
    Ok(policy)
}

fn render(table: &Table, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json(),
    })
}

pub fn run(common: &Common, command: &Command) -> Result<ExitCode, CliError> {
    let format = common.format.unwrap_or(Format::Csv);
    let out = common.out.as_deref();
    let mut flags = Flags::new();
    match command {
        Command::Simulate { instance, policy } => {
            flag(&mut flags, "command", "simulate");
            let instance = build_instance(instance, &mut flags)?;
            let policy = build_policy(policy, &instance)?;
            flag(&mut flags, "policy", policy.to_json());
            sim_flags(common, &mut flags);
            let rep = estimate_ratio(&instance, &policy, &sim_config(common))?;
            emit(out, &render(&report::sim_table(flags, &[rep])?, format)?)?;
        }
        Command::SweepR { instance, r_max } => {
            flag(&mut flags, "command", "sweep-r");
            let instance = build_instance(instance, &mut flags)?;
            let r_max = r_max.unwrap_or(instance.n());
            flag(&mut flags, "r_max", r_max);
            sim_flags(common, &mut flags);
            let rows = sweep_r(&instance, &sim_config(common), r_max)?;
            let reports: Vec<_> = rows.into_iter().map(|(_, rep)| rep).collect();
            emit(out, &render(&report::sim_table(flags, &reports)?, format)?)?;
        }
        Command::BoundTable { k } => {
            flag(&mut flags, "command", "bound-table");
            flag(&mut flags, "k", join(k));
            let rows = bound_table(k)?;
            emit(out, &render(&report::bound_table_report(flags, &rows)?, format)?)?;
        }
        Command::PoissonOpt { k } => {
            flag(&mut flags, "command", "poisson-opt");
            flag(&mut flags, "k", join(k));
            let mut ks = k.clone();
            ks.sort_unstable();
            ks.dedup();
            let rows = ks
                .iter()
                .map(|&k| poisson_optimal_lambda(k))
                .collect::<Result<Vec<_>, _>>()?;
            emit(out, &render(&report::poisson_table(flags, &rows)?, format)?)?;
        }
        Command::HardInstance {
            k,
            epsilon,
            n,
            spike_scale,
            r,
        } => {
            flag(&mut flags, "command", "hard-instance");
            let rs = if r.is_empty() { vec![*k] } else { r.clone() };
            flag(&mut flags, "k", k);
            flag(&mut flags, "epsilon", float(*epsilon));
            flag(&mut flags, "n", n);
            flag(&mut flags, "spike_scale", float(*spike_scale));
            flag(&mut flags, "r", join(&rs));
            sim_flags(common, &mut flags);
            let cfg = sim_config(common);
            let reports = rs
                .iter()
                .map(|&r| tightness_experiment(*k, *epsilon, *n, *spike_scale, r, &cfg))
                .collect::<Result<Vec<_>, _>>()?;
            emit(out, &render(&report::tightness_table(flags, &reports)?, format)?)?;
        }
        Command::VerifyLemmas { n_max } => {
            flag(&mut flags, "command", "verify-lemmas");
            flag(&mut flags, "n_max", n_max);
            let summary = verify_lemmas(*n_max, common.threads)?;
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let mut doc = Map::new();
                    doc.insert(
                        "flags".into(),
                        Value::Object(flags.into_iter().map(|(k, v)| (k, Value::String(v))).collect()),
                    );
                    let body = serde_json::to_value(&summary).map_err(prophet_core::Error::from)?;
                    if let Value::Object(fields) = body {
                        doc.extend(fields);
                    }
                    let mut text = serde_json::to_string_pretty(&Value::Object(doc))
                        .map_err(prophet_core::Error::from)?;
                    text.push('\n');
                    text
                }
                Format::Csv => {
                    flag(&mut flags, "scenarios_checked", summary.scenarios_checked);
                    let mut table = Table::new(
                        flags,
                        vec!["lemma".into(), "tuples_checked".into(), "violations".into()],
                    );
                    for (lemma, count) in &summary.tuples_checked_per_lemma {
                        let bad = summary.violations.iter().filter(|v| &v.lemma == lemma).count();
                        table.push(vec![lemma.as_str().into(), (*count).into(), bad.into()])?;
                    }
                    table.to_csv()?
                }
            };
            emit(out, &text)?;
            if !summary.violations.is_empty() {
                for v in &summary.violations {
                    eprintln!("violation: {}", serde_json::to_string(v).unwrap_or_default());
                }
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}
