use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;

use sapa_rrm::experiment::{parse_budgets, run_experiment, scene_for, summarize, write_csv, RunConfig, Sidecar, DEFAULT_BUDGETS};
use sapa_rrm::qram::{AftParams, AllocationMode};
use sapa_rrm::scenario::SceneVariant;

/// Monte Carlo budget sweeps for split-aperture radar resource allocation.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// full, split-unconstrained, split-constrained or all; comma separated.
    #[arg(long, default_value = "all")]
    mode: String,
    /// 70km or 250km.
    #[arg(long, default_value = "70km")]
    scene: SceneVariant,
    #[arg(long, default_value_t = 60)]
    targets: usize,
    /// Monte Carlo runs.
    #[arg(long, default_value_t = 100)]
    mc: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma list or start:step:end.
    #[arg(long, default_value = DEFAULT_BUDGETS)]
    budgets: String,
    #[arg(long, default_value_t = 0.7)]
    aft_alpha1: f64,
    #[arg(long, default_value_t = 2)]
    aft_n1: usize,
    #[arg(long, default_value_t = 3)]
    aft_n2: usize,
    #[arg(long, default_value_t = 3)]
    aft_n3: usize,
    /// Metrics CSV; the JSON sidecar and summary go next to it.
    #[arg(long, default_value = "metrics.csv")]
    out: PathBuf,
    /// Replay a scene saved with --dump-scenes.
    #[arg(long)]
    scene_file: Option<PathBuf>,
    /// Directory for per-run, per-budget array schedules of the coupled mode.
    #[arg(long)]
    dump_packing: Option<PathBuf>,
    /// Directory for the JSON of every generated scene.
    #[arg(long)]
    dump_scenes: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Write zero wall times so repeated runs give identical files.
    #[arg(long)]
    no_timing: bool,
}

fn modes(s: &str) -> Result<Vec<AllocationMode>> {
    if s == "all" {
        return Ok(AllocationMode::ALL.to_vec());
    }
    s.split(',').map(|m| Ok(m.trim().parse()?)).collect()
}

fn main() -> Result<()> {
    let args = Args::parse();
    let config = RunConfig {
        modes: modes(&args.mode)?,
        scene: args.scene,
        n_targets: args.targets,
        n_mc: args.mc,
        budgets: parse_budgets(&args.budgets)?,
        seed: args.seed,
        aft: AftParams {
            alpha1: args.aft_alpha1,
            n1: args.aft_n1,
            n2: args.aft_n2,
            n3: args.aft_n3,
        },
        scene_file: args.scene_file.clone(),
        threads: args.threads,
        timing: !args.no_timing,
    };
    config.validate()?;

    for dir in [&args.dump_packing, &args.dump_scenes].into_iter().flatten() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    if let Some(dir) = &args.dump_scenes {
        let runs = if config.scene_file.is_some() { 1 } else { config.n_mc };
        for run in 0..runs as u64 {
            fs::write(dir.join(format!("scene_run{run}.json")), scene_for(&config, run)?.to_json()?)?;
        }
    }

    let rows = run_experiment(&config, args.dump_packing.as_deref())?;

    let csv = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(&rows, BufWriter::new(csv))?;
    fs::write(args.out.with_extension("json"), serde_json::to_string_pretty(&Sidecar::new(&config))?)?;
    fs::write(
        args.out.with_extension("summary.json"),
        serde_json::to_string_pretty(&summarize(&rows))?,
    )?;
    eprintln!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}
