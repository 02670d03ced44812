//! `herglotz` experiment runner.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or the
//! computation errors, 2 for usage and configuration errors.

mod experiments;
mod settings;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use experiments::{Report, EXPERIMENTS};
use settings::Settings;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl From<herglotz::Error> for CliError {
    fn from(e: herglotz::Error) -> Self {
        match e {
            herglotz::Error::Domain(_) | herglotz::Error::Variant(_) => Self::Usage(e.to_string()),
            _ => Self::Failed(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "herglotz",
    version,
    about = "Shift-sampled boundary values of Herglotz functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "herglotz-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Also write samples.jsonl.
    #[arg(long)]
    dump_samples: bool,
    /// Any config key, as key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Clone)]
struct GeneratorFlags {
    #[arg(long)]
    generator: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    /// Matrix size for gue and diagonal.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    e0: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Boole's identity on a random atomic measure.
    Boole {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        atoms: Option<u64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Boundary-value law against the predicted Cauchy distribution.
    Cauchy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        generator: GeneratorFlags,
    },
    /// Number variance with a log fit.
    NumberVariance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        process: Option<String>,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Baricenter estimate by one route.
    Gamma {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        route: Option<String>,
        #[command(flatten)]
        generator: GeneratorFlags,
    },
    /// Metric inequalities on random measures.
    MetricsSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pairs: Option<u64>,
    },
    /// Shift covariance under window doubling.
    ShiftCovariance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// *-continuity modulus (diagnostic).
    StarModulus {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        generator: Option<String>,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Runs the experiment named by the `experiment` key of a config file.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "herglotz-out")]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        dump_samples: bool,
    },
    /// Re-runs a manifest and compares the summaries byte for byte.
    Replay {
        manifest: PathBuf,
        /// Defaults to `replay/` next to the manifest.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Lists the experiment families.
    List,
}

/// Named flags that map onto config keys.
type Flags = Vec<(&'static str, Option<Value>)>;

fn flag<T: Into<Value>>(key: &'static str, v: Option<T>) -> (&'static str, Option<Value>) {
    (key, v.map(Into::into))
}

fn generator_flags(g: GeneratorFlags) -> Flags {
    vec![
        flag("generator", g.generator),
        flag("samples", g.samples),
        flag("n", g.n),
        flag("e0", g.e0),
    ]
}

fn settings_for(common: &Common, flags: Flags) -> Result<Settings, CliError> {
    let mut s = match &common.config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    if let Some(name) = s.take("experiment") {
        return Err(CliError::Usage(format!(
            "config names experiment {name}; use `herglotz run` for that"
        )));
    }
    s.apply_pairs(&common.set)?;
    if let Some(seed) = common.seed {
        s.set("seed", Value::from(seed));
    }
    for (k, v) in flags {
        if let Some(v) = v {
            s.set(k, v);
        }
    }
    Ok(s)
}

fn init_workers(workers: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failed(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))
}

fn summary_text(experiment: &str, config: &BTreeMap<String, Value>, report: &Report) -> String {
    let pass = report.checks.iter().all(|c| c.pass);
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "experiment": experiment,
        "config": config,
        "results": report.results,
        "checks": report.checks,
        "pass": pass,
    });
    serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"
}

struct Outcome {
    pass: bool,
    summary: String,
}

/// Runs one experiment and writes its artifacts to `out`.
fn execute(
    experiment: &str,
    cfg: &Settings,
    out: &Path,
    dump_samples: bool,
    workers: Option<usize>,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let report = experiments::run(experiment, cfg)?;
    let wall = start.elapsed().as_secs_f64();
    let config = cfg.resolved();
    let summary = summary_text(experiment, &config, &report);
    fs::create_dir_all(out)
        .map_err(|e| CliError::Failed(format!("cannot create {}: {e}", out.display())))?;
    let mut outputs = vec!["summary.json".to_string()];
    write(&out.join("summary.json"), &summary)?;
    for (name, contents) in &report.files {
        write(&out.join(name), contents)?;
        outputs.push(name.clone());
    }
    if dump_samples {
        let mut lines = String::new();
        for s in &report.samples {
            lines.push_str(&serde_json::to_string(s).expect("sample serializes"));
            lines.push('\n');
        }
        write(&out.join("samples.jsonl"), &lines)?;
        outputs.push("samples.jsonl".into());
    }
    let config_text = serde_json::to_string(&config).expect("config serializes");
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "experiment": experiment,
        "seed": config.get("seed"),
        "config": config,
        "config_hash": sha256_hex(config_text.as_bytes()),
        "git_revision": env!("HERGLOTZ_GIT_REVISION"),
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": wall,
        "workers": workers.unwrap_or_else(rayon::current_num_threads),
        "dump_samples": dump_samples,
        "outputs": outputs,
    });
    write(
        &out.join("MANIFEST.json"),
        &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"),
    )?;
    let pass = report.checks.iter().all(|c| c.pass);
    for c in &report.checks {
        println!(
            "{} {}: {} (limit {})",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.value,
            c.limit
        );
    }
    println!(
        "{experiment}: {} in {wall:.2} s, artifacts in {}",
        if pass { "pass" } else { "FAIL" },
        out.display()
    );
    Ok(Outcome { pass, summary })
}

fn replay(manifest: &Path, out: Option<PathBuf>, workers: Option<usize>) -> Result<bool, CliError> {
    let bad = |msg: String| CliError::Usage(format!("replay: {msg}"));
    let text =
        fs::read_to_string(manifest).map_err(|e| bad(format!("{}: {e}", manifest.display())))?;
    let m: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if m["schema_version"].as_u64() != Some(SCHEMA_VERSION) {
        return Err(bad(format!(
            "schema version {} is not {SCHEMA_VERSION}",
            m["schema_version"]
        )));
    }
    let experiment = m["experiment"]
        .as_str()
        .ok_or_else(|| bad("no experiment".into()))?;
    let config: BTreeMap<String, Value> =
        serde_json::from_value(m["config"].clone()).map_err(|e| bad(format!("config: {e}")))?;
    let config_text = serde_json::to_string(&config).expect("config serializes");
    if m["config_hash"].as_str() != Some(sha256_hex(config_text.as_bytes()).as_str()) {
        return Err(bad("config hash does not match the recorded config".into()));
    }
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let recorded = fs::read_to_string(dir.join("summary.json"))
        .map_err(|e| bad(format!("summary.json next to the manifest: {e}")))?;
    let out = out.unwrap_or_else(|| dir.join("replay"));
    let dump = m["dump_samples"].as_bool().unwrap_or(false);
    let cfg = Settings::from_map(config);
    let outcome = execute(experiment, &cfg, &out, dump, workers)?;
    let same = outcome.summary == recorded;
    println!(
        "replay: summary {}",
        if same { "identical" } else { "DIFFERS" }
    );
    Ok(same)
}

fn dispatch(command: Command) -> Result<bool, CliError> {
    let (name, common, flags) = match command {
        Command::List => {
            for (name, about) in EXPERIMENTS {
                println!("{name:<17} {about}");
            }
            println!(
                "{:<17} re-run a MANIFEST.json and compare summaries",
                "replay"
            );
            return Ok(true);
        }
        Command::Replay {
            manifest,
            out,
            workers,
        } => {
            init_workers(workers)?;
            return replay(&manifest, out, workers);
        }
        Command::Run {
            config,
            out,
            workers,
            dump_samples,
        } => {
            let mut cfg = Settings::from_file(&config)?;
            let name = match cfg.take("experiment") {
                Some(Value::String(s)) => s,
                _ => {
                    return Err(CliError::Usage(
                        "config needs experiment = \"<name>\"".into(),
                    ))
                }
            };
            init_workers(workers)?;
            return Ok(execute(&name, &cfg, &out, dump_samples, workers)?.pass);
        }
        Command::Boole {
            common,
            atoms,
            t,
            trials,
        } => (
            "boole",
            common,
            vec![flag("atoms", atoms), flag("t", t), flag("trials", trials)],
        ),
        Command::Cauchy { common, generator } => ("cauchy", common, generator_flags(generator)),
        Command::NumberVariance {
            common,
            process,
            samples,
        } => (
            "number-variance",
            common,
            vec![flag("process", process), flag("samples", samples)],
        ),
        Command::Gamma {
            common,
            route,
            generator,
        } => {
            let mut flags = generator_flags(generator);
            flags.push(flag("route", route));
            ("gamma", common, flags)
        }
        Command::MetricsSweep { common, pairs } => {
            ("metrics-sweep", common, vec![flag("pairs", pairs)])
        }
        Command::ShiftCovariance { common, samples } => {
            ("shift-covariance", common, vec![flag("samples", samples)])
        }
        Command::StarModulus {
            common,
            generator,
            samples,
        } => (
            "star-modulus",
            common,
            vec![flag("generator", generator), flag("samples", samples)],
        ),
    };
    let cfg = settings_for(&common, flags)?;
    init_workers(common.workers)?;
    Ok(execute(name, &cfg, &common.out, common.dump_samples, common.workers)?.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::parse_value;

    #[test]
    fn hash_is_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn value_parsing() {
        assert_eq!(parse_value("3").unwrap(), json!(3));
        assert_eq!(parse_value("0.5").unwrap(), json!(0.5));
        assert_eq!(parse_value("gue").unwrap(), json!("gue"));
        assert_eq!(parse_value("\"x\"").unwrap(), json!("x"));
    }
}
