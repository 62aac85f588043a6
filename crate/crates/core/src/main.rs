use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use launchrisk::bundle::CexList;
use launchrisk::features::FeatureConfig;
use launchrisk::io::{CorpusLayout, OutputLayout};
use launchrisk::parser::ParserConfig;
use launchrisk::pipeline::{self, BacktestConfig, PipelineConfig};
use launchrisk::risk::{AnnotateConfig, RiskLevel, Thresholds};
use launchrisk::sim::{self, Profile, ProfileMix, ScenarioConfig};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "launchrisk", version, about = "Launchpad memecoin launch analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Dirs {
    /// Corpus directory (simulator output or imported data).
    #[arg(long)]
    corpus: PathBuf,
    /// Output directory for pipeline artifacts.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct AnnotateArgs {
    /// Minutes after migration searched for the minimum price.
    #[arg(long, default_value_t = 20)]
    window_minutes: u32,
    /// collapse_ratio,manipulated_score,stable_ratio,clean_score
    #[arg(long, default_value = "0.3,0.7,0.7,0.3")]
    thresholds: Thresholds,
}

impl AnnotateArgs {
    fn config(&self) -> AnnotateConfig {
        AnnotateConfig { window_minutes: self.window_minutes, thresholds: self.thresholds }
    }
}

#[derive(Args, Clone)]
struct FeatureArgs {
    /// Seconds after creation in which buyers count as snipers.
    #[arg(long, default_value_t = 5)]
    sniper_window: i64,
    /// Width of pre-migration time-series buckets in seconds.
    #[arg(long, default_value_t = 10)]
    bucket_seconds: i64,
    /// Extra exchange wallets, one address per line.
    #[arg(long)]
    cex: Option<PathBuf>,
    /// Token supply used to derive the parser dust threshold.
    #[arg(long, default_value_t = 1_000_000_000)]
    total_supply: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled corpus of simulated launches.
    Simulate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// e.g. high=0.74,medium=0.11,low=0.05,manipulated=0.10
        #[arg(long, default_value_t = ProfileMix::default())]
        mix: ProfileMix,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the default scenario for a profile as JSON.
    Scenario {
        profile: Profile,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify transactions into events and write the breakdown.
    Parse {
        #[command(flatten)]
        dirs: Dirs,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Cluster bundled accounts.
    Cluster {
        #[command(flatten)]
        dirs: Dirs,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Compute the feature table and pre-migration time series.
    Features {
        #[command(flatten)]
        dirs: Dirs,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Label risk levels from post-migration series.
    Annotate {
        #[command(flatten)]
        dirs: Dirs,
        #[command(flatten)]
        annotate: AnnotateArgs,
        /// CSV `mint,normal_probability` read as manipulation probability.
        #[arg(long)]
        manipulation_scores: Option<PathBuf>,
    },
    /// Build the screened binary task table.
    Task {
        #[arg(long)]
        out: PathBuf,
    },
    /// Token-selection backtest.
    Backtest {
        #[command(flatten)]
        dirs: Dirs,
        /// Detector output `mint,normal_probability`.
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long = "k", default_values_t = vec![10, 20])]
        k: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Per-level distribution summaries of the key features.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
    /// parse, cluster, features, annotate, task and report in one go.
    Pipeline {
        #[command(flatten)]
        dirs: Dirs,
        #[command(flatten)]
        features: FeatureArgs,
        #[command(flatten)]
        annotate: AnnotateArgs,
    },
}

fn pipeline_config(f: &FeatureArgs, a: Option<&AnnotateArgs>) -> Result<PipelineConfig> {
    let cex = match &f.cex {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let mut list = CexList::builtin();
            list.extend(CexList::parse(&text));
            Some(list)
        }
        None => None,
    };
    Ok(PipelineConfig {
        parser: ParserConfig::for_supply(f.total_supply),
        features: FeatureConfig { sniper_window_s: f.sniper_window, bucket_seconds: f.bucket_seconds },
        annotate: a.map(AnnotateArgs::config).unwrap_or_default(),
        cex,
    })
}

fn layouts(d: &Dirs) -> (CorpusLayout, OutputLayout) {
    (CorpusLayout::new(&d.corpus), OutputLayout::new(&d.out))
}

fn print_levels(report: &launchrisk::risk::AnnotationReport) {
    for l in RiskLevel::ALL {
        println!("{l}: {} ({:.2}%)", report.level_count(l), 100.0 * report.level_share(l));
    }
    if !report.skipped.is_empty() {
        println!("skipped (no post-migration series): {}", report.skipped.len());
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { out, n, mix, seed } => {
            let s = sim::simulate_corpus(&out, n, &mix, seed)?;
            println!("wrote {} launches ({} transactions) to {}", s.launches, s.transactions, out.display());
            for (p, c) in Profile::ALL.iter().zip(s.per_profile) {
                println!("{p}: {c}");
            }
        }
        Command::Scenario { profile, seed } => {
            println!("{}", serde_json::to_string_pretty(&ScenarioConfig::preset(profile, seed))?);
        }
        Command::Parse { dirs, features } => {
            let (c, o) = layouts(&dirs);
            let r = pipeline::parse_stage(&c, &o, &pipeline_config(&features, None)?)?;
            for (k, n, p) in r.rows() {
                println!("{k}: {n} ({p:.2}%)");
            }
            if let Some(rate) = r.prebuy_rate() {
                println!("create_and_buy share of mints: {:.2}%", 100.0 * rate);
            }
        }
        Command::Cluster { dirs, features } => {
            let (c, o) = layouts(&dirs);
            let stats = pipeline::cluster_stage(&c, &o, &pipeline_config(&features, None)?)?;
            let all: Vec<_> = stats.iter().filter(|s| s.heuristic == "all").collect();
            println!("{} launches, {} bundles", all.len(), all.iter().map(|s| s.bundle_num).sum::<usize>());
        }
        Command::Features { dirs, features } => {
            let (c, o) = layouts(&dirs);
            let rows = pipeline::features_stage(&c, &o, &pipeline_config(&features, None)?)?;
            println!("{} feature rows", rows.len());
        }
        Command::Annotate { dirs, annotate, manipulation_scores } => {
            let (c, o) = layouts(&dirs);
            let cfg = PipelineConfig { annotate: annotate.config(), ..Default::default() };
            let r = pipeline::annotate_stage(&c, &o, &cfg, manipulation_scores.as_deref())?;
            print_levels(&r);
        }
        Command::Task { out } => {
            let r = pipeline::task_stage(&OutputLayout::new(out))?;
            for (name, n) in r.rows() {
                println!("{name}: {n}");
            }
        }
        Command::Backtest { dirs, scores, k, samples, seed } => {
            let (c, o) = layouts(&dirs);
            let rows = pipeline::backtest_stage(&c, &o, scores.as_deref(), &BacktestConfig { ks: k, samples, seed })?;
            for r in rows {
                println!("{} k={}: loss {:.2}% precision {:.4}", r.strategy, r.k, r.mean_loss, r.precision);
            }
        }
        Command::Report { out } => {
            let rows = pipeline::report_stage(&OutputLayout::new(out))?;
            println!("{} distribution rows", rows.len());
        }
        Command::Pipeline { dirs, features, annotate } => {
            let cfg = pipeline_config(&features, Some(&annotate))?;
            let s = pipeline::run_pipeline(&dirs.corpus, &dirs.out, &cfg)?;
            println!("{} launches, {} transactions, {} feature rows", s.launches, s.breakdown.total, s.feature_rows);
            print_levels(&s.labels);
            println!("task rows: {} ({} high)", s.task.kept, s.task.positive);
        }
    }
    Ok(())
}
