//! `entsort`: sort sequences with counted comparisons, measure empirical
//! entropy, run the corpus benchmark, and generate synthetic corpora.

mod input;

use std::fs::File;
use std::hash::Hash;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use entsort::bench::{
    evaluate_bounds, generate, reference_permutation, run_sorter, run_spec, standard_corpus,
    Report, RunPlan, RunRecord, Sorter, SourceKind, SourceSpec,
};

use input::{parse, read_source, write_elements, write_symbols, Mode};

#[derive(Parser)]
#[command(
    name = "entsort",
    version,
    about = "Entropy-adaptive comparison sorting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sort a sequence and report comparison counts against their budgets.
    Sort(SortArgs),
    /// Print H₀ … H_L of a sequence.
    Entropy(EntropyArgs),
    /// Run every sorter over a corpus of generated sequences.
    Bench(BenchArgs),
    /// Write a synthetic sequence.
    Gen(GenArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input file; stdin when absent or `-`.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Bytes)]
    mode: Mode,
    /// Keep a trailing newline in bytes and chars mode.
    #[arg(long)]
    keep_newline: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Permutation,
    Sorted,
    None,
}

#[derive(Args)]
struct SortArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Context order ℓ. Order 0 uses the single-tree sorter.
    #[arg(short = 'l', long, default_value_t = 0)]
    order: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit with status 1 if any bound fails.
    #[arg(long)]
    check_bounds: bool,
    /// Destination of the emitted output; stdout by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also run the merge-sort baseline and report its count.
    #[arg(long)]
    baseline: bool,
    /// Emit 0-based positions.
    #[arg(long)]
    zero_based: bool,
    #[arg(long, value_enum, default_value_t = Emit::Permutation)]
    emit: Emit,
    /// Where to write the report; stderr by default, or the output
    /// destination with `--emit none`.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Highest order L.
    #[arg(short = 'l', long, default_value_t = 0)]
    order: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Run the context sorter at every order 0..=L.
    #[arg(short = 'l', long, default_value_t = 3)]
    order: usize,
    /// Seed for the standard corpus.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON array or JSON lines of source specs, replacing the standard
    /// corpus.
    #[arg(long)]
    specs: Option<PathBuf>,
    /// Skip corpus entries longer than this.
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long)]
    baseline: bool,
    #[arg(long)]
    check_bounds: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "uniform")]
    kind: SourceKind,
    /// Alphabet size.
    #[arg(short = 'n', long, default_value_t = 16)]
    alphabet: usize,
    #[arg(short = 'm', long, default_value_t = 1000)]
    length: usize,
    /// Markov order.
    #[arg(
        short = 'l',
        long = "order",
        alias = "markov-order",
        default_value_t = 1
    )]
    order: usize,
    /// Zipf exponent.
    #[arg(long, default_value_t = 1.0)]
    skew: f64,
    /// Markov noise probability.
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Pattern for periodic sources.
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output encoding. Periodic sources write their pattern's characters.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sort(args) => cmd_sort(args),
        Command::Entropy(args) => cmd_entropy(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(code) => code,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        let kind = e
            .downcast_ref::<std::io::Error>()
            .map(std::io::Error::kind)
            .or_else(|| {
                e.downcast_ref::<serde_json::Error>()
                    .and_then(serde_json::Error::io_error_kind)
            });
        kind == Some(std::io::ErrorKind::BrokenPipe)
    })
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn write_reports<'a>(
    reports: impl IntoIterator<Item = &'a Report>,
    format: Format,
    out: &mut dyn Write,
) -> Result<()> {
    match format {
        Format::Json => {
            for r in reports {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(Report::CSV_HEADER)?;
            for r in reports {
                w.write_record(r.csv_record())?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn bound_exit(check: bool, violations: &[String]) -> ExitCode {
    if check && !violations.is_empty() {
        for v in violations {
            eprintln!("bound violated: {v}");
        }
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn sort_report<T: Ord + Hash + Eq>(
    seq: &[T],
    order: usize,
    baseline: bool,
) -> Result<(Vec<usize>, Report)> {
    let bounds = evaluate_bounds(seq, order);
    let oracle = reference_permutation(seq);
    let sorter = if order == 0 {
        Sorter::Sort0
    } else {
        Sorter::SortEll
    };
    let run = run_sorter(seq, sorter, &bounds, &oracle, None)?;
    let mut report = run.report;
    if baseline {
        let base = run_sorter(seq, Sorter::Baseline, &bounds, &oracle, None)?;
        report.comparisons.baseline = Some(base.report.comparisons.total);
        report.violations.extend(
            base.report
                .violations
                .iter()
                .map(|v| format!("baseline: {v}")),
        );
    }
    Ok((run.permutation, report))
}

fn cmd_sort(args: SortArgs) -> Result<ExitCode> {
    let raw = read_source(args.input.input.as_deref())?;
    let seq = parse(raw, args.input.mode, args.input.keep_newline)?;
    let (permutation, report) =
        with_sequence!(&seq, |s| sort_report(s, args.order, args.baseline))?;

    let mut out = open_out(args.out.as_deref())?;
    match args.emit {
        Emit::Permutation => {
            let shift = usize::from(args.zero_based);
            for &i in &permutation {
                writeln!(out, "{}", i - shift)?;
            }
        }
        Emit::Sorted => write_elements(&seq, &permutation, &mut *out)?,
        Emit::None => write_reports([&report], args.format, &mut *out)?,
    }
    out.flush()?;
    if args.emit != Emit::None {
        match &args.report {
            Some(p) => {
                let mut w = open_out(Some(p))?;
                write_reports([&report], args.format, &mut *w)?;
                w.flush()?;
            }
            None => write_reports([&report], args.format, &mut std::io::stderr().lock())?,
        }
    }
    Ok(bound_exit(args.check_bounds, &report.violations))
}

#[derive(Serialize)]
struct EntropyLine {
    m: usize,
    n: usize,
    entropy: Vec<f64>,
}

fn cmd_entropy(args: EntropyArgs) -> Result<ExitCode> {
    let raw = read_source(args.input.input.as_deref())?;
    let seq = parse(raw, args.input.mode, args.input.keep_newline)?;
    let prof = with_sequence!(&seq, |s| entsort::profile(s, args.order));
    let mut entropy = prof.h.clone();
    entropy.resize(args.order + 1, 0.0);
    let line = EntropyLine {
        m: prof.m,
        n: prof.n,
        entropy,
    };

    let mut out = open_out(args.out.as_deref())?;
    match args.format {
        Format::Json => {
            serde_json::to_writer(&mut out, &line)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            let mut header = vec!["m".to_owned(), "n".to_owned()];
            header.extend((0..line.entropy.len()).map(|k| format!("H{k}")));
            w.write_record(&header)?;
            let mut row = vec![line.m.to_string(), line.n.to_string()];
            row.extend(line.entropy.iter().map(f64::to_string));
            w.write_record(&row)?;
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn load_specs(path: &Path) -> Result<Vec<SourceSpec>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).context("parsing spec array");
    }
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).with_context(|| format!("parsing spec {l:?}")))
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let mut specs = match &args.specs {
        Some(p) => load_specs(p)?,
        None => standard_corpus(args.seed),
    };
    if let Some(limit) = args.max_length {
        specs.retain(|s| s.kind == SourceKind::File || s.length <= limit);
    }
    let plan = RunPlan {
        sort0: true,
        orders: (0..=args.order).collect(),
        baseline: args.baseline,
    };
    let records: Vec<RunRecord> = specs
        .par_iter()
        .map(|spec| run_spec(spec, &plan).with_context(|| spec.label()))
        .collect::<Result<_>>()?;

    let mut out = open_out(args.out.as_deref())?;
    match args.format {
        Format::Json => {
            for r in &records {
                serde_json::to_writer(&mut out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => write_reports(
            records.iter().flat_map(|r| &r.reports),
            Format::Csv,
            &mut *out,
        )?,
    }
    out.flush()?;
    let violations: Vec<String> = records
        .iter()
        .flat_map(|rec| {
            rec.violations().map(|(r, v)| {
                format!(
                    "{} {} l={}: {v}",
                    r.source.as_deref().unwrap_or("?"),
                    r.sorter.label(),
                    r.order
                )
            })
        })
        .collect();
    Ok(bound_exit(args.check_bounds, &violations))
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let spec = match args.kind {
        SourceKind::Uniform => SourceSpec::uniform(args.alphabet, args.length, args.seed),
        SourceKind::Zipf => SourceSpec::zipf(args.alphabet, args.length, args.skew, args.seed),
        SourceKind::Markov => SourceSpec::markov(
            args.alphabet,
            args.length,
            args.order,
            args.noise,
            args.seed,
        ),
        SourceKind::Periodic => {
            SourceSpec::periodic(args.pattern.as_deref().unwrap_or(""), args.length)
        }
        SourceKind::File => anyhow::bail!("gen cannot produce a file source"),
    };
    let symbols = generate(&spec)?;
    let mode = args.mode.unwrap_or(match args.kind {
        SourceKind::Periodic => Mode::Chars,
        _ if args.alphabet <= 256 => Mode::Bytes,
        _ => Mode::Ints,
    });
    let mut out = open_out(args.out.as_deref())?;
    write_symbols(&symbols, mode, &mut *out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
