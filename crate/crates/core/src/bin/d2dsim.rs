use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use social_assoc::geometry::Point;
use social_assoc::matching::{
    brute_force_optimum, is_pairwise_stable, run_cluster_matching, AnnealSchedule, ClusterView,
    PtSign,
};
use social_assoc::network::Network;
use social_assoc::sim::{export_results, run_experiment, Approach, ScenarioConfig};
use social_assoc::social::{SocialGraph, SocialMatrices, SocialParams};
use social_assoc::wireless::{ChannelModel, NetworkTopology};
use social_assoc::{Error, Result};

#[derive(Parser)]
#[command(name = "d2dsim", version, about = "Social-aware D2D user association simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproachArg {
    Proposed,
    MaxRssi,
    Random,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PtSignArg {
    Standard,
    Inverted,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo campaign and write result files.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "scbs")]
        n_scbs: Option<usize>,
        #[arg(long)]
        ues_per_scbs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, value_enum, default_value = "all")]
        approach: ApproachArg,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long)]
        count_max: Option<usize>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, value_enum)]
        pt_sign: Option<PtSignArg>,
        /// Allow single-UE moves besides pairwise swaps.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        allow_moves: Option<bool>,
    },
    /// Check a configuration file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Exhaustive optimum and stability scan of a tiny JSON instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
}

/// Tiny single-cluster instance for the `oracle` command.
#[derive(Deserialize)]
struct OracleInstance {
    scbs: Vec<(f64, f64)>,
    ues: Vec<(f64, f64)>,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
    /// `(ue, scbs)` pairs.
    #[serde(default)]
    important: Vec<(usize, usize)>,
    #[serde(default)]
    seed: u64,
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig> {
    match path {
        Some(p) => ScenarioConfig::load(p),
        None => Ok(ScenarioConfig::default()),
    }
}

fn oracle(path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let inst: OracleInstance = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let topo = NetworkTopology::with_positions(
        inst.scbs.into_iter().map(Point::from).collect(),
        inst.ues.into_iter().map(Point::from).collect(),
    );
    let graph = SocialGraph::from_edges(topo.n_ues(), &inst.edges)?;
    let social = SocialMatrices::compute(&graph, &topo.ue_positions, SocialParams::default())?;
    let net = Network::new(topo, ChannelModel::default(), false, graph, social, &inst.important)?;
    let cluster = ClusterView::whole_network(&net);
    let initial = net.anchor_association();
    let (best, welfare) = brute_force_optimum(&net, &cluster, &initial)?;
    let run = run_cluster_matching(&net, &cluster, &initial, &AnnealSchedule::default(), inst.seed, 0)?;
    let stable = is_pairwise_stable(&net, &cluster, &run.best, false);
    let out = serde_json::json!({
        "optimum_welfare": welfare,
        "optimum": best.serving.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "matching_welfare": run.best_welfare,
        "matching": run.best.serving.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "ratio": if welfare > 0.0 { run.best_welfare / welfare } else { 1.0 },
        "pairwise_stable": stable.stable,
        "pairs_checked": stable.pairs_checked,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            n_scbs,
            ues_per_scbs,
            seed,
            runs,
            approach,
            out,
            t_max,
            count_max,
            omega,
            pt_sign,
            allow_moves,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.n_scbs = n_scbs.unwrap_or(cfg.n_scbs);
            cfg.ues_per_scbs = ues_per_scbs.unwrap_or(cfg.ues_per_scbs);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.runs = runs.unwrap_or(cfg.runs);
            cfg.t_max = t_max.unwrap_or(cfg.t_max);
            cfg.count_max = count_max.unwrap_or(cfg.count_max);
            cfg.omega = omega.unwrap_or(cfg.omega);
            cfg.allow_moves = allow_moves.unwrap_or(cfg.allow_moves);
            if let Some(s) = pt_sign {
                cfg.pt_sign = match s {
                    PtSignArg::Standard => PtSign::Standard,
                    PtSignArg::Inverted => PtSign::Inverted,
                };
            }
            let approaches: Vec<Approach> = match approach {
                ApproachArg::Proposed => vec![Approach::Proposed],
                ApproachArg::MaxRssi => vec![Approach::MaxRssi],
                ApproachArg::Random => vec![Approach::Random],
                ApproachArg::All => Approach::ALL.to_vec(),
            };
            let result = run_experiment(&cfg, &approaches)?;
            let paths = export_results(&result, &out)?;
            for s in &result.report.approaches {
                println!(
                    "{:<9} avg sum rate {:>12.4} Mbit/s  p5 {:>8.4}  p50 {:>8.4}  p95 {:>8.4} Mbit/s",
                    s.approach.name(),
                    s.avg_sum_rate / 1e6,
                    s.p5 / 1e6,
                    s.p50 / 1e6,
                    s.p95 / 1e6
                );
            }
            println!("results written to {}", paths.summary.parent().unwrap_or(&out).display());
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            cfg.validate()?;
            println!("{}: ok", config.display());
            Ok(())
        }
        Command::Oracle { instance } => oracle(&instance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
