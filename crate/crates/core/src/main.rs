use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use malbench::error::{Error, Result};
use malbench::game::{enumerate_distinct_2x2, figure_one_game, game_from_json, game_to_json, ClassFilter, GameClass};
use malbench::harness::{aggregate_overall, paired_samples, paired_t_test, equivalence_pairs, run_suite, Metric, SuiteConfig, SuiteKind};
use malbench::learners::LearnerRegistry;
use malbench::report::{emit_polytope_figure, overall_to_text, read_store, write_store, ReportTable, SIGNIFICANCE_LEVEL};

#[derive(Parser)]
#[command(name = "malbench", version, about = "Benchmark learners in repeated strictly ordinal games")]
struct Cli {
    /// Directory for games, result stores and figures.
    #[arg(long, env = "MALBENCH_OUT_DIR", default_value = "malbench-out", global = true)]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    All,
    NoConflict,
    Conflict,
}

#[derive(Subcommand)]
enum Command {
    /// Write the structurally distinct 2x2 strictly ordinal games.
    Enumerate {
        #[arg(long, value_enum, default_value = "all")]
        class: ClassArg,
    },
    /// Run a suite and store its results under <out-dir>/<suite>.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        sweeps: Option<usize>,
        #[arg(long)]
        repetitions: Option<usize>,
        #[arg(long)]
        games: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated learner names.
        #[arg(long, value_delimiter = ',')]
        roster: Option<Vec<String>>,
    },
    /// Print per-suite tables from result stores.
    Report {
        /// Store directories; defaults to every suite store under the output directory.
        stores: Vec<PathBuf>,
        /// Print the normalised cross-suite summary instead.
        #[arg(long)]
        normalized: bool,
        /// Also write each table as CSV into this directory.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Paired t-test between two algorithms of a store.
    Stats {
        store: PathBuf,
        #[arg(long, default_value = "fexp")]
        metric: String,
        /// Two learner names, comma-separated.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        pair: Vec<String>,
    },
    /// Draw the payoff polytope and Pareto front of a 2-player game as SVG.
    Figure {
        /// Game file; the built-in example game when omitted.
        #[arg(long)]
        game: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::UnknownLearner(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let registry = LearnerRegistry::standard();
    match cli.command {
        Command::Enumerate { class } => enumerate(&cli.out_dir, class),
        Command::Run {
            config,
            suite,
            sweeps,
            repetitions,
            games,
            seed,
            roster,
        } => {
            let mut cfg = match config {
                Some(path) => SuiteConfig::from_path(&path)?,
                None => SuiteConfig::default(),
            };
            if let Some(s) = suite {
                cfg.suite = s.parse()?;
            }
            cfg.sweeps = sweeps.unwrap_or(cfg.sweeps);
            cfg.repetitions = repetitions.unwrap_or(cfg.repetitions);
            cfg.games = games.unwrap_or(cfg.games);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.roster = roster.unwrap_or(cfg.roster);
            cfg.validate()?;
            for name in &cfg.roster {
                if !registry.contains(name) {
                    return Err(Error::UnknownLearner(name.clone()));
                }
            }
            let rows = run_suite(&cfg, &registry)?;
            let dir = cli.out_dir.join(cfg.suite.as_str());
            write_store(&dir, &cfg, &rows)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("{} rows written to {} ({failed} failed plays)", rows.len(), dir.display());
            Ok(())
        }
        Command::Report { stores, normalized, csv } => {
            let stores = if stores.is_empty() {
                SuiteKind::ALL
                    .iter()
                    .map(|k| cli.out_dir.join(k.as_str()))
                    .filter(|d| d.join(malbench::report::MANIFEST_FILE).exists())
                    .collect()
            } else {
                stores
            };
            if stores.is_empty() {
                return Err(Error::InvalidInput(format!("no result stores under {}", cli.out_dir.display())));
            }
            let mut all_rows = Vec::new();
            let mut roster: Vec<String> = Vec::new();
            for dir in &stores {
                let (manifest, rows) = read_store(dir)?;
                for name in &manifest.config.roster {
                    if !roster.contains(name) {
                        roster.push(name.clone());
                    }
                }
                if !normalized {
                    let table = ReportTable::build(&rows, &manifest.config.roster, &registry, !manifest.complete);
                    println!("{}", table.to_text());
                    if let Some(csv_dir) = &csv {
                        fs::create_dir_all(csv_dir)?;
                        let path = csv_dir.join(format!("{}.csv", manifest.config.suite));
                        fs::write(path, table.to_csv()?)?;
                    }
                }
                all_rows.extend(rows);
            }
            if normalized {
                let summary = aggregate_overall(&all_rows, &roster, SIGNIFICANCE_LEVEL);
                print!("{}", overall_to_text(&summary, &registry));
            }
            Ok(())
        }
        Command::Stats { store, metric, pair } => {
            let metric: Metric = metric.parse()?;
            let (manifest, rows) = read_store(&store)?;
            let (a, b) = match pair.as_slice() {
                [a, b] => (a.clone(), b.clone()),
                [] if manifest.config.roster.len() >= 2 => {
                    (manifest.config.roster[0].clone(), manifest.config.roster[1].clone())
                }
                _ => return Err(Error::InvalidInput("--pair needs exactly two learner names".into())),
            };
            for name in [&a, &b] {
                if !rows.iter().any(|r| r.seating.contains(name)) {
                    return Err(Error::InvalidInput(format!("`{name}` does not appear in the store")));
                }
            }
            let (xs, ys) = paired_samples(&rows, metric, &a, &b, false);
            let test = paired_t_test(&xs, &ys, SIGNIFICANCE_LEVEL)?;
            println!("metric: {}", metric.header());
            println!("pairs: {}", xs.len());
            println!("t = {:.4} (df {}), p = {:.4}", test.t, test.df, test.p_value);
            let verdict = if test.significant { "significant" } else { "equivalent" };
            println!("{a} vs {b}: {verdict} at 5%");
            let groups: Vec<String> = equivalence_pairs(&rows, metric, &manifest.config.roster, SIGNIFICANCE_LEVEL, false)
                .into_iter()
                .map(|(x, y)| format!("{} / {}", label(&registry, &x), label(&registry, &y)))
                .collect();
            println!("equivalence groups: {}", if groups.is_empty() { "none".to_string() } else { groups.join(", ") });
            Ok(())
        }
        Command::Figure { game, output } => {
            let game = match game {
                Some(path) => game_from_json(&fs::read_to_string(path)?)?,
                None => figure_one_game(),
            };
            let svg = emit_polytope_figure(&game)?;
            let path = output.unwrap_or_else(|| cli.out_dir.join("polytope.svg"));
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(&path, svg)?;
            println!("figure written to {}", path.display());
            Ok(())
        }
    }
}

fn label(registry: &LearnerRegistry, name: &str) -> String {
    registry.label(name).unwrap_or(name).to_string()
}

fn enumerate(out_dir: &Path, class: ClassArg) -> Result<()> {
    let (filter, name) = match class {
        ClassArg::All => (ClassFilter::All, "all"),
        ClassArg::NoConflict => (ClassFilter::Only(GameClass::NoConflict), "no-conflict"),
        ClassArg::Conflict => (ClassFilter::Only(GameClass::Conflict), "conflict"),
    };
    let games = enumerate_distinct_2x2(filter);
    let dir = out_dir.join("games").join(name);
    fs::create_dir_all(&dir)?;
    let mut manifest = Vec::new();
    let (mut no_conflict, mut conflict) = (0, 0);
    for (i, g) in games.iter().enumerate() {
        let file = format!("game_{i:03}.json");
        fs::write(dir.join(&file), game_to_json(g)?)?;
        let class = malbench::game::classify(g);
        match class {
            GameClass::NoConflict => no_conflict += 1,
            GameClass::Conflict => conflict += 1,
        }
        manifest.push(serde_json::json!({ "id": i, "file": file, "class": class.to_string() }));
    }
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    println!("no-conflict: {no_conflict}");
    println!("conflict: {conflict}");
    println!("total: {}", games.len());
    println!("written to {}", dir.display());
    Ok(())
}
