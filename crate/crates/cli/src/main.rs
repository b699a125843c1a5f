mod args;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use interferox::experiments::{
    duality_summary, duality_summary_with_prefix, load_manifest, run_afshar, run_bggp, run_bggp_sweep, run_bohm,
    run_gha, run_impulsive, run_weak, AfsharConfig, AfsharStage, BggpConfig, BohmConfig, ExperimentError, GhaConfig,
    ImpulsiveConfig, ScenarioResult, WeakConfig,
};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use args::{Cli, Command, MeasureMode};
use config::{ConfigError, ConfigFile};

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Experiment(_) => 1,
        }
    }
}

type Job = Box<dyn Fn() -> Result<ScenarioResult, ExperimentError> + Send + Sync>;

struct Runner {
    file: ConfigFile,
    globals: Map<String, Value>,
}

impl Runner {
    fn resolve<T>(&self, section: &str, extra: Map<String, Value>) -> Result<T, ConfigError>
    where
        T: Default + serde::Serialize + serde::de::DeserializeOwned,
    {
        let mut overrides = self.globals.clone();
        overrides.extend(extra);
        self.file.resolve(section, overrides)
    }
}

fn flags(pairs: &[(&str, Option<Value>)]) -> Map<String, Value> {
    pairs
        .iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
        .collect()
}

fn print_summary(result: &ScenarioResult, manifest: &Path) {
    println!("{} -> {}", result.scenario, manifest.display());
    for (k, v) in &result.metrics {
        println!("  {k} = {v}");
    }
}

fn write(mut result: ScenarioResult, dir: &Path) -> Result<ScenarioResult, CliError> {
    let manifest = result.write(dir)?;
    print_summary(&result, &manifest);
    Ok(result)
}

fn afshar_job(runner: &Runner, stage: AfsharStage, extra: Map<String, Value>) -> Result<Job, CliError> {
    let cfg: AfsharConfig = runner.resolve("afshar", extra)?;
    Ok(Box::new(move || run_afshar(stage, &cfg)))
}

fn duality_result(from: &Path) -> Result<ScenarioResult, ExperimentError> {
    let source = load_manifest(from)?;
    let report = duality_summary(&source)?;
    let mut result = ScenarioResult::new("duality", &json!({ "from": from, "source_scenario": source.scenario }));
    let mut reports = vec![("", report)];
    if let Ok(control) = duality_summary_with_prefix(&source, "control_") {
        reports.push(("control_", control));
    }
    for (prefix, r) in &reports {
        result.metric(format!("{prefix}visibility"), r.v);
        result.metric(format!("{prefix}predictability"), r.p);
        result.metric(format!("{prefix}wz_information_nats"), r.h_nats);
        result.metric(format!("{prefix}duality_sum_pred"), r.duality_sum_pred);
        if let (Some(d), Some(sum)) = (r.d_trace, r.duality_sum_trace) {
            result.metric(format!("{prefix}d_trace"), d);
            result.metric(format!("{prefix}duality_sum_trace"), sum);
        }
    }
    let body: Map<String, Value> = reports
        .iter()
        .map(|(prefix, r)| {
            let key = if prefix.is_empty() { "two_pinholes" } else { "control" };
            (key.to_string(), serde_json::to_value(r).expect("report serializes"))
        })
        .collect();
    result.artifact(
        "duality_report.json",
        serde_json::to_string_pretty(&body).expect("report serializes") + "\n",
    );
    result.finish()
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let out_base = cli.out.clone().or_else(|| file.out_dir());
    let out_for =
        |scenario: &str| -> PathBuf { out_base.clone().unwrap_or_else(|| PathBuf::from("runs").join(scenario)) };
    let runner = Runner {
        globals: flags(&[
            ("seed", cli.seed.map(Value::from)),
            ("shots", cli.shots.map(Value::from)),
            ("grid_points", cli.grid_points.map(Value::from)),
        ]),
        file,
    };

    let (name, job): (&str, Job) = match cli.command {
        Command::Gha { gaps } => {
            let cfg: GhaConfig = runner.resolve("gha", flags(&[("gaps", gaps.map(|g| json!(g)))]))?;
            ("gha", Box::new(move || run_gha(&cfg)))
        }
        Command::Bggp { angle, sweep } => {
            let cfg: BggpConfig = runner.resolve("bggp", flags(&[("angle", angle.map(Value::from))]))?;
            match sweep {
                Some(n) => {
                    let angles: Vec<f64> = (0..n).map(|i| i as f64 * std::f64::consts::PI / n as f64).collect();
                    ("bggp", Box::new(move || run_bggp_sweep(&cfg, &angles)))
                }
                None => ("bggp", Box::new(move || run_bggp(&cfg))),
            }
        }
        Command::Afshar { stage, wire_width } => (
            "afshar",
            afshar_job(&runner, stage, flags(&[("wire_width", wire_width.map(Value::from))]))?,
        ),
        Command::Bohm { particles, steps } => {
            let cfg: BohmConfig = runner.resolve(
                "bohm",
                flags(&[
                    ("particles", particles.map(Value::from)),
                    ("steps", steps.map(Value::from)),
                ]),
            )?;
            ("bohm", Box::new(move || run_bohm(&cfg)))
        }
        Command::Measure {
            mode: MeasureMode::Impulsive { kappa },
        } => {
            let cfg: ImpulsiveConfig = runner.resolve("impulsive", flags(&[("kappa", kappa.map(Value::from))]))?;
            ("impulsive", Box::new(move || run_impulsive(&cfg)))
        }
        Command::Measure {
            mode: MeasureMode::Weak { chi, alpha },
        } => {
            let cfg: WeakConfig = runner.resolve(
                "weak",
                flags(&[("chi", chi.map(Value::from)), ("alpha", alpha.map(Value::from))]),
            )?;
            ("weak", Box::new(move || run_weak(&cfg)))
        }
        Command::Duality { from } => ("duality", Box::new(move || duality_result(&from))),
        Command::All => return run_all(&runner, &out_for("all"), cli.parallel),
    };
    write(job()?, &out_for(name))?;
    Ok(())
}

fn run_all(runner: &Runner, base: &Path, parallel: bool) -> Result<(), CliError> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    let gha: GhaConfig = runner.resolve("gha", Map::new())?;
    jobs.push(("gha".into(), Box::new(move || run_gha(&gha))));
    let bggp: BggpConfig = runner.resolve("bggp", Map::new())?;
    jobs.push(("bggp".into(), Box::new(move || run_bggp(&bggp))));
    for stage in AfsharStage::ALL {
        jobs.push((format!("afshar{stage}"), afshar_job(runner, stage, Map::new())?));
    }
    let bohm: BohmConfig = runner.resolve("bohm", Map::new())?;
    jobs.push(("bohm".into(), Box::new(move || run_bohm(&bohm))));
    let imp: ImpulsiveConfig = runner.resolve("impulsive", Map::new())?;
    jobs.push(("impulsive".into(), Box::new(move || run_impulsive(&imp))));
    let weak: WeakConfig = runner.resolve("weak", Map::new())?;
    jobs.push(("weak".into(), Box::new(move || run_weak(&weak))));

    let results: Vec<Result<ScenarioResult, ExperimentError>> = if parallel {
        jobs.par_iter().map(|(_, job)| job()).collect()
    } else {
        jobs.iter().map(|(_, job)| job()).collect()
    };
    for ((name, _), result) in jobs.iter().zip(results) {
        write(result?, &base.join(name))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
