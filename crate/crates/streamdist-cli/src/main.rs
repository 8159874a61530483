use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use streamdist::{Execution, Symbol};
use streamdist_cli::commands::{self, RunOptions, TextModel};
use streamdist_cli::format::{self, Format, Header, SymbolReader};
use streamdist_cli::tsv;
use streamdist_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "streamdist", version, about = "Streaming approximate pattern matching under Hamming and Lp distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Uniform,
    Planted,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a pattern file and a text file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        sigma: u32,
        #[arg(long)]
        text_len: usize,
        #[arg(long, value_enum, default_value = "uniform")]
        mode: Mode,
        #[arg(long, default_value_t = 0.1)]
        noise_rate: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// raw or dec; raw needs sigma ≤ 256.
        #[arg(long, default_value = "dec")]
        format: Format,
        #[arg(long)]
        pattern_out: PathBuf,
        #[arg(long)]
        text_out: PathBuf,
    },
    /// Stream the text and print one estimate per alignment.
    Run {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 7)]
        reps: usize,
        #[arg(long)]
        block_len: Option<usize>,
        /// Run lanes one after another.
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print exact distances for every alignment.
    Oracle {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a run table against an oracle table.
    Eval {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long)]
        epsilon: f64,
    },
    /// Measure stored words and work per character over a grid.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [1024usize, 4096, 16384])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25])]
        epsilon: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        sigma: u32,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(clap::Args)]
struct Inputs {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    text: PathBuf,
    #[arg(long)]
    p: f64,
    /// Alphabet size; defaults to the file headers, then the largest pattern symbol.
    #[arg(long)]
    sigma: Option<u32>,
    /// Force raw or dec instead of reading the header.
    #[arg(long)]
    format: Option<Format>,
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn resolve_sigma(flag: Option<u32>, headers: &[Option<Header>], pattern: &[Symbol]) -> u32 {
    flag.or_else(|| headers.iter().filter_map(|h| h.and_then(|h| h.sigma)).max())
        .unwrap_or_else(|| pattern.iter().copied().max().unwrap_or(1))
}

fn open_out(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Io {
            path: p.to_path_buf(),
            source: e,
        })?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn output_error(e: std::io::Error) -> CliError {
    CliError::Io {
        path: "<output>".into(),
        source: e,
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen {
            n,
            sigma,
            text_len,
            mode,
            noise_rate,
            seed,
            format,
            pattern_out,
            text_out,
        } => {
            let model = match mode {
                Mode::Uniform => TextModel::Uniform,
                Mode::Planted => TextModel::Planted { noise_rate },
            };
            let seed = commands::resolve_seed(seed)?;
            let data = commands::generate(n, sigma, text_len, model, seed)?;
            format::write_word(&pattern_out, &data.pattern, format, sigma)?;
            format::write_word(&text_out, &data.text, format, sigma)?;
            if let Some(end) = data.planted_end {
                eprintln!("planted alignment ends at {end}");
            }
        }
        Command::Run {
            inputs,
            epsilon,
            seed,
            reps,
            block_len,
            sequential,
            out,
        } => {
            let (pattern, ph) = format::read_word(&inputs.pattern, inputs.format)?;
            let mut text = SymbolReader::open(&inputs.text, inputs.format)?;
            let sigma = resolve_sigma(inputs.sigma, &[ph, text.header], &pattern);
            let opts = RunOptions {
                p: inputs.p,
                epsilon,
                seed: commands::resolve_seed(seed)?,
                repetitions: reps,
                block_len,
                execution: execution(sequential),
            };
            let cfg = commands::build_config(pattern.len(), sigma, &opts)?;
            let mut sink = open_out(out.as_deref())?;
            let summary = commands::run_stream(&pattern, &mut text, &cfg, &mut sink)?;
            sink.flush().map_err(output_error)?;
            eprintln!(
                "# rows={} block_len={} peak_words={} work_per_char={} lookup_failures={} wall_ms={}",
                summary.rows,
                summary.block_len,
                summary.peak_words,
                tsv::fmt_sig(summary.work_per_char),
                summary.lookup_failures,
                summary.wall.as_millis()
            );
        }
        Command::Oracle { inputs, out } => {
            let (pattern, ph) = format::read_word(&inputs.pattern, inputs.format)?;
            let (text, th) = format::read_word(&inputs.text, inputs.format)?;
            let sigma = resolve_sigma(inputs.sigma, &[ph, th], &pattern);
            streamdist::config::validate_word(&pattern, sigma, true)?;
            streamdist::config::validate_word(&text, sigma, true)?;
            let rows = commands::oracle_rows(&pattern, &text, inputs.p)?;
            let mut sink = open_out(out.as_deref())?;
            sink.write_all(&tsv::render(&rows, inputs.p > 0.0)).map_err(output_error)?;
            sink.flush().map_err(output_error)?;
        }
        Command::Eval { run, oracle, epsilon } => {
            let run_rows = tsv::read_rows_file(&run)?;
            let oracle_rows = tsv::read_rows_file(&oracle)?;
            let report = commands::evaluate(&run_rows, &oracle_rows, epsilon)?;
            let mut out = std::io::stdout().lock();
            report.write(&mut out, epsilon).map_err(output_error)?;
        }
        Command::Bench {
            n,
            epsilon,
            p,
            sigma,
            reps,
            seed,
            sequential,
        } => {
            let mut grid = Vec::new();
            for &e in &epsilon {
                for &q in &p {
                    grid.extend(n.iter().map(|&m| (m, e, q)));
                }
            }
            let seed = commands::resolve_seed(seed)?;
            let points = commands::bench(&grid, sigma, reps, seed, execution(sequential))?;
            let mut out = std::io::stdout().lock();
            commands::write_bench(&mut out, &points).map_err(output_error)?;
            for &e in &epsilon {
                for &q in &p {
                    let series: Vec<(f64, f64)> = points
                        .iter()
                        .filter(|pt| pt.epsilon == e && pt.p == q)
                        .map(|pt| (pt.n as f64, pt.peak_words as f64))
                        .collect();
                    if let Some(slope) = commands::growth_exponent(&series) {
                        writeln!(
                            out,
                            "# growth_exponent epsilon={} p={} slope={}",
                            tsv::fmt_sig(e),
                            tsv::fmt_sig(q),
                            tsv::fmt_sig(slope)
                        )
                        .map_err(output_error)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("streamdist: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
