//! `kgsqueeze`: select, sweep, score and budget probability-graph compressions.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or validation errors.
//! Every failure prints exactly one `error[<code>]: <message>` line on stderr
//! and leaves the output path untouched.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kgsqueeze::io::{emit_metrics, emit_selection, emit_sweep_table, parse_graph_document, parse_selection};
use kgsqueeze::metrics::{similarity, verbalize, DEFAULT_PHI};
use kgsqueeze::selection::{budget_to_quota, select, ChannelBudget, SelectionConfig, Strategy};
use kgsqueeze::sweep::{run_sweep, SweepConfig};
use kgsqueeze::ProbabilityGraph;

const SEED_ENV: &str = "KGSQUEEZE_SEED";

#[derive(Parser, Debug)]
#[command(name = "kgsqueeze", version, about = "Entropy-driven knowledge graph compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Select quadruples from a graph document.
    Select {
        #[arg(long)]
        input: PathBuf,
        /// Compression coefficient in (0, 1].
        #[arg(long, value_parser = parse_compression)]
        k: f64,
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value = "proposed", value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long, env = SEED_ENV)]
        seed: Option<u64>,
        /// Output path; stdout when omitted or `-`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate every strategy over a grid of compression coefficients.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        k_from: f64,
        #[arg(long, default_value_t = 1.0)]
        k_to: f64,
        #[arg(long, default_value_t = 0.1)]
        k_step: f64,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, env = SEED_ENV)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_PHI, value_parser = parse_phi)]
        phi: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads; defaults to rayon's choice.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        threads: Option<u64>,
        /// Also write every random-baseline run as CSV.
        #[arg(long)]
        dump_runs: Option<PathBuf>,
    },
    /// Score a selection against the original and recovered text.
    Metrics {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        selection: PathBuf,
        /// Recovered text; the built-in verbalizer is used when omitted.
        #[arg(long)]
        recovered: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PHI, value_parser = parse_phi)]
        phi: f64,
        #[arg(long)]
        case_insensitive: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Convert channel resources into a quadruple quota.
    Budget {
        #[arg(long, value_parser = parse_positive)]
        time: f64,
        #[arg(long, value_parser = parse_positive)]
        bandwidth: f64,
        #[arg(long, value_parser = parse_non_negative)]
        power: f64,
        #[arg(long, value_parser = parse_non_negative)]
        gain: f64,
        #[arg(long, value_parser = parse_positive)]
        noise: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        bits_per_quad: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        graph_size: u64,
    },
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not finite"))
    }
}

fn parse_compression(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("K must lie in (0, 1], got {v}"))
    }
}

fn parse_phi(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("phi must lie in [0, 1], got {v}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive value, got {v}"))
    }
}

fn parse_non_negative(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a non-negative value, got {v}"))
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e| format!("{e}"))
}

struct Failure {
    exit: u8,
    code: String,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { exit: 1, code: "usage".into(), message: message.into() }
    }

    fn data(code: &str, message: impl ToString) -> Self {
        Failure { exit: 2, code: code.into(), message: message.to_string() }
    }
}

macro_rules! data_err {
    ($e:expr) => {
        $e.map_err(|e| Failure::data(e.code(), &e))
    };
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::data("io", format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<ProbabilityGraph, Failure> {
    let graph = data_err!(parse_graph_document(&read(path)?))?;
    for w in graph.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(graph)
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, bytes).map_err(|e| Failure::data("io", format!("{}: {e}", p.display())))
        }
        _ => std::io::stdout().write_all(bytes).map_err(|e| Failure::data("io", e)),
    }
}

/// The given seed, or a fresh one flagged for echoing once the command succeeds.
fn seed_or_fresh(seed: Option<u64>) -> (u64, bool) {
    match seed {
        Some(s) => (s, false),
        None => (rand::random::<u64>(), true),
    }
}

fn echo_seed((seed, fresh): (u64, bool)) {
    if fresh {
        eprintln!("seed={seed}");
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Select { input, k, depth, strategy, seed, output } => {
            let graph = load_graph(&input)?;
            let mut config = data_err!(SelectionConfig::new(k, depth, strategy))?;
            let seed = seed_or_fresh(seed);
            if strategy == Strategy::Random {
                config = config.with_seed(seed.0);
            }
            let result = data_err!(select(&graph, &config))?;
            let bytes = emit_selection(&result, &graph);
            write_output(output.as_deref(), &bytes)?;
            if strategy == Strategy::Random {
                echo_seed(seed);
            }
            eprintln!(
                "SU={} effective_depth={} H={}{}",
                result.semantic_uncertainty,
                result.effective_depth,
                result.quota,
                if result.disconnected_fallback { " disconnected_fallback" } else { "" }
            );
        }
        Command::Sweep { input, k_from, k_to, k_step, depth, runs, seed, phi, output, threads, dump_runs } => {
            let graph = load_graph(&input)?;
            let seed = seed_or_fresh(seed);
            let cfg = SweepConfig { k_from, k_to, k_step, max_depth: depth, runs: runs as usize, seed: seed.0, phi };
            let out = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n as usize)
                    .build()
                    .map_err(|e| Failure::data("threads", e))?
                    .install(|| run_sweep(&graph, &cfg)),
                None => run_sweep(&graph, &cfg),
            };
            let out = out.map_err(|e| {
                let exit = if e.code() == "invalid_grid" { 1 } else { 2 };
                Failure { exit, code: e.code().into(), message: e.to_string() }
            })?;
            let table = emit_sweep_table(&out.rows);
            let dump = dump_runs.as_ref().map(|_| {
                let mut s = String::from("K,run,SU,SS\n");
                for r in &out.random_runs {
                    let _ = writeln!(
                        s,
                        "{},{},{},{}",
                        kgsqueeze::io::format_significant(r.compression, 9),
                        r.run,
                        kgsqueeze::io::format_significant(r.semantic_uncertainty, 9),
                        kgsqueeze::io::format_significant(r.similarity, 9)
                    );
                }
                s
            });
            write_output(output.as_deref(), &table)?;
            if let (Some(p), Some(d)) = (dump_runs, dump) {
                write_output(Some(&p), d.as_bytes())?;
            }
            echo_seed(seed);
        }
        Command::Metrics { input, selection, recovered, phi, case_insensitive, output } => {
            let graph = load_graph(&input)?;
            let result = data_err!(parse_selection(&read(&selection)?, &graph))?;
            let recovered_text = match recovered {
                Some(p) => String::from_utf8(read(&p)?)
                    .map_err(|_| Failure::data("io", format!("{}: not UTF-8", p.display())))?,
                None => verbalize(&result, &graph),
            };
            let report = data_err!(similarity(&graph, &result, &recovered_text, phi, case_insensitive))?;
            write_output(output.as_deref(), &emit_metrics(&report))?;
        }
        Command::Budget { time, bandwidth, power, gain, noise, bits_per_quad, graph_size } => {
            let budget = ChannelBudget::new(time, bandwidth, power, gain, noise, bits_per_quad)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let g = graph_size as usize;
            let h = budget_to_quota(&budget, g);
            let mut doc = serde_json::json!({
                "capacity_bits": budget.capacity_bits(),
                "H": h,
                "G": g,
                "K": h as f64 / g as f64,
            });
            if h == 0 {
                doc["note"] = "nothing transmittable".into();
            }
            let mut bytes = serde_json::to_vec_pretty(&doc).expect("json");
            bytes.push(b'\n');
            write_output(None, &bytes)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid usage");
            eprintln!("error[usage]: {}", line.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.code, f.message.replace('\n', " "));
            ExitCode::from(f.exit)
        }
    }
}
