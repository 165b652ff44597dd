//! Command-line front end: construct codes, analyze their spectra, verify
//! the library's invariant suites and run FER campaigns.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use rowmerge::checks;
use rowmerge::construct::{self, CodeSpec};
use rowmerge::sim::{self, SimConfig};
use rowmerge::weight;

#[derive(Parser)]
#[command(
    name = "rowmerge",
    about = "Row-merged pre-transformed polar-like codes: construction, analysis, simulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write its JSON description.
    Construct {
        /// Recursion depth; the block length is 2^n.
        #[arg(long)]
        n: usize,
        /// Order of the underlying RM information set.
        #[arg(long)]
        r: usize,
        /// Number of extra information bits encoded by merged triples.
        #[arg(long, default_value_t = 0)]
        m: usize,
        /// Support overlap of the merged (t, v) pairs: 0 or 1.
        #[arg(long, default_value_t = 1)]
        overlap: usize,
        /// Cap on merged pairs (default: all that fit).
        #[arg(long)]
        pair_budget: Option<usize>,
        /// Write the code description here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weight analysis of a stored code description.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = AnalyzeMode::Exhaustive)]
        mode: AnalyzeMode,
        /// List size for list-search mode.
        #[arg(long, default_value_t = 50_000)]
        list_size: usize,
        /// Number of jittered list-search trials.
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Run an invariant suite and print one line per property.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Width range for the weight suite, e.g. 2..5.
        #[arg(long, default_value = "2..7")]
        n_range: String,
    },
    /// Monte Carlo frame-error-rate campaign.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated Eb/N0 grid in dB.
        #[arg(long)]
        snr: String,
        #[arg(long, default_value_t = 32)]
        list: usize,
        #[arg(long, default_value_t = 200)]
        min_errors: u64,
        #[arg(long, default_value_t = 10_000_000)]
        max_frames: u64,
        /// RNG seed; generated and printed when omitted.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: ROWMERGE_WORKERS or all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv_out: Option<PathBuf>,
        /// Also write the results as JSON.
        #[arg(long)]
        json_out: Option<PathBuf>,
        /// Record measured wall time in the CSV (breaks byte-for-byte
        /// reproducibility of the output file).
        #[arg(long, default_value_t = false)]
        timing: bool,
    },
    /// Sweep the construction table and compare with the published entries.
    Table1,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeMode {
    Exhaustive,
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Weights,
    Theorems,
    Appendix,
    Codec,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Construct {
            n,
            r,
            m,
            overlap,
            pair_budget,
            out,
        } => cmd_construct(n, r, m, overlap, pair_budget, out),
        Command::Analyze {
            spec,
            mode,
            list_size,
            trials,
        } => cmd_analyze(&spec, mode, list_size, trials),
        Command::Verify { suite, n_range } => cmd_verify(suite, &n_range),
        Command::Simulate {
            spec,
            snr,
            list,
            min_errors,
            max_frames,
            seed,
            workers,
            csv_out,
            json_out,
            timing,
        } => cmd_simulate(
            &spec, &snr, list, min_errors, max_frames, seed, workers, csv_out, json_out, timing,
        ),
        Command::Table1 => cmd_table1(),
    }
}

fn cmd_construct(
    n: usize,
    r: usize,
    m: usize,
    overlap: usize,
    pair_budget: Option<usize>,
    out: Option<PathBuf>,
) -> Result<()> {
    let (spec, report) = construct::build(n, r, m, overlap, pair_budget)
        .with_context(|| format!("construction failed for n={n}, r={r}, m={m}"))?;
    let spec_json = serde_json::to_string_pretty(&spec)?;
    let report_json = serde_json::to_string_pretty(&report)?;
    match out {
        Some(path) => {
            fs::write(&path, spec_json + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
            println!("{report_json}");
            eprintln!(
                "wrote ({},{}) code with design distance {} to {}",
                spec.block_len(),
                spec.k(),
                spec.design_d(),
                path.display()
            );
        }
        None => {
            println!("{spec_json}");
            println!("{report_json}");
        }
    }
    Ok(())
}

fn load_spec(path: &PathBuf) -> Result<CodeSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: CodeSpec =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    spec.validate().context("invalid code description")?;
    Ok(spec)
}

fn cmd_analyze(path: &PathBuf, mode: AnalyzeMode, list_size: usize, trials: usize) -> Result<()> {
    let spec = load_spec(path)?;
    let report = match mode {
        AnalyzeMode::Exhaustive => weight::spectrum_exhaustive(&spec)?,
        AnalyzeMode::List => weight::min_weight_list_search(&spec, list_size, trials)?,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_verify(suite: Suite, n_range: &str) -> Result<()> {
    let (lo, hi) = parse_range(n_range)?;
    let outcomes = match suite {
        Suite::Weights => checks::suite_weights(lo, hi),
        Suite::Theorems => checks::suite_theorems(),
        Suite::Appendix => checks::suite_appendix(hi.min(5)),
        Suite::Codec => checks::suite_codec(),
    };
    let mut failures = 0;
    for o in &outcomes {
        println!("{}", o.line());
        failures += usize::from(!o.pass);
    }
    if failures > 0 {
        bail!("{failures} of {} checks failed", outcomes.len());
    }
    Ok(())
}

fn parse_range(text: &str) -> Result<(usize, usize)> {
    if let Some((a, b)) = text.split_once("..") {
        let lo: usize = a.trim().parse().context("range start")?;
        let hi: usize = b.trim_start_matches('=').trim().parse().context("range end")?;
        Ok((lo, hi))
    } else {
        let v: usize = text.trim().parse().context("range value")?;
        Ok((v, v))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &PathBuf,
    snr: &str,
    list: usize,
    min_errors: u64,
    max_frames: u64,
    seed: Option<u64>,
    workers: Option<usize>,
    csv_out: Option<PathBuf>,
    json_out: Option<PathBuf>,
    timing: bool,
) -> Result<()> {
    let spec = load_spec(path)?;
    let grid: Vec<f64> = snr
        .split(',')
        .map(|s| s.trim().parse::<f64>().context("SNR grid entry"))
        .collect::<Result<_>>()?;
    let seed = seed.unwrap_or_else(|| {
        let generated = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0x5eed);
        eprintln!("no --seed given; using generated seed {generated}");
        generated
    });
    let workers = workers
        .or_else(|| {
            std::env::var("ROWMERGE_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        });
    let cfg = SimConfig {
        spec,
        ebno_db_grid: grid,
        list_size: list,
        min_errors,
        max_frames,
        seed,
        workers,
    };
    let results = sim::run(&cfg)?;
    for r in &results {
        eprintln!(
            "{:.3} dB: {} errors / {} frames, fer {:.3e}{}, {:.1} s",
            r.ebno_db,
            r.errors,
            r.frames,
            r.fer,
            if r.hit_max_frames {
                " (frame budget hit)"
            } else {
                ""
            },
            r.elapsed_s
        );
    }
    let mut csv = Vec::new();
    sim::write_csv(&mut csv, &results, timing)?;
    match csv_out {
        Some(path) => {
            fs::write(&path, &csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(&csv)?,
    }
    if let Some(path) = json_out {
        fs::write(&path, serde_json::to_string_pretty(&results)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Published construction table: (n, r) -> (m, k, d).
const PUBLISHED: [(usize, usize, Option<(usize, usize, usize)>); 8] = [
    (6, 2, Some((1, 23, 16))),
    (6, 3, None),
    (6, 4, None),
    (6, 5, None),
    (7, 2, None),
    (7, 3, Some((2, 66, 16))),
    (7, 4, Some((1, 100, 8))),
    (7, 5, None),
];

fn cmd_table1() -> Result<()> {
    println!("{:<4} {:<3} {:<14} {:<14} match", "n", "r", "achieved", "published");
    let mut mismatches = 0;
    for (n, r, published) in PUBLISHED {
        let achieved = achievable(n, r);
        let same = achieved == published;
        mismatches += usize::from(!same);
        let fmt = |t: Option<(usize, usize, usize)>| match t {
            Some((m, k, d)) => format!("({m},{k},{d})"),
            None => "-".to_string(),
        };
        println!(
            "{:<4} {:<3} {:<14} {:<14} {}",
            n,
            r,
            fmt(achieved),
            fmt(published),
            if same { "yes" } else { "MISMATCH" }
        );
    }
    if mismatches > 0 {
        println!("{mismatches} entries differ from the published table; see the row marked MISMATCH");
    }
    Ok(())
}

/// Largest ensemble this library can actually construct for RM(n, r).
fn achievable(n: usize, r: usize) -> Option<(usize, usize, usize)> {
    if n <= r + 2 {
        return None; // triples need row weight at least 2
    }
    let level = n - r - 1;
    if level < 2 {
        return None;
    }
    let mut best_m = 0usize;
    for t in rowmerge::merge::enumerate_triples(n, level) {
        if let Ok((c, _)) = rowmerge::merge::canonicalize(&t) {
            best_m = best_m.max(c.kappa() + 1);
        }
    }
    if best_m == 0 {
        return None;
    }
    let k = construct::rm_info_set(n, r).len() + best_m;
    Some((best_m, k, 1 << (n - r)))
}
