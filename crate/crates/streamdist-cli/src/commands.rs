//! Subcommand bodies, independent of argument parsing.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streamdist::{all_alignments_exact, Engine, Execution, ProblemConfig, Symbol};

use crate::error::{CliError, CliResult};
use crate::format::SymbolReader;
use crate::tsv::{write_header, write_row, Row};

pub const SEED_ENV: &str = "STREAMDIST_SEED";

/// Seed precedence: environment, then flag, then 0.
pub fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TextModel {
    Uniform,
    /// Pattern copied into the text with i.i.d. resampling at `noise_rate`.
    Planted { noise_rate: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub pattern: Vec<Symbol>,
    pub text: Vec<Symbol>,
    /// End position of the planted copy.
    pub planted_end: Option<usize>,
}

pub fn generate(n: usize, sigma: u32, text_len: usize, model: TextModel, seed: u64) -> CliResult<Generated> {
    if n == 0 || sigma == 0 {
        return Err(CliError::Usage("n and sigma must be positive".into()));
    }
    if text_len < n {
        return Err(CliError::Usage(format!("text length {text_len} is shorter than the pattern ({n})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pattern: Vec<Symbol> = (0..n).map(|_| rng.gen_range(1..=sigma)).collect();
    let mut text: Vec<Symbol> = (0..text_len).map(|_| rng.gen_range(1..=sigma)).collect();
    let planted_end = match model {
        TextModel::Uniform => None,
        TextModel::Planted { noise_rate } => {
            if !(0.0..=1.0).contains(&noise_rate) {
                return Err(CliError::Usage(format!("noise rate {noise_rate} outside [0, 1]")));
            }
            let start = rng.gen_range(0..=text_len - n);
            for (t, &s) in text[start..start + n].iter_mut().zip(&pattern) {
                *t = if rng.gen_bool(noise_rate) { rng.gen_range(1..=sigma) } else { s };
            }
            Some(start + n)
        }
    };
    Ok(Generated {
        pattern,
        text,
        planted_end,
    })
}

/// Engine knobs taken from the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub p: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub repetitions: usize,
    pub block_len: Option<usize>,
    pub execution: Execution,
}

pub fn build_config(n: usize, sigma: u32, opts: &RunOptions) -> CliResult<ProblemConfig> {
    let mut cfg = ProblemConfig::new(n, sigma, opts.p, opts.epsilon)?
        .with_seed(opts.seed)
        .with_repetitions(opts.repetitions)
        .with_execution(opts.execution);
    if let Some(b) = opts.block_len {
        cfg = cfg.with_block_len(b);
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSummary {
    pub rows: usize,
    pub block_len: usize,
    pub peak_words: usize,
    pub work_per_char: f64,
    pub lookup_failures: u64,
    pub wall: Duration,
}

/// Streams the text through a fresh engine, writing one row per alignment.
///
/// The text is consumed one block at a time.
pub fn run_stream(
    pattern: &[Symbol],
    text: &mut SymbolReader,
    cfg: &ProblemConfig,
    out: &mut impl Write,
) -> CliResult<RunSummary> {
    let started = Instant::now();
    let mut engine = Engine::new(pattern, cfg)?;
    let b = engine.block_len();
    let io = |e| CliError::io("<output>", e);
    write_header(out, cfg.p > 0.0).map_err(io)?;
    let mut chunk = Vec::with_capacity(b);
    let mut rows = 0;
    loop {
        chunk.clear();
        while chunk.len() < b {
            match text.next_symbol()? {
                Some(s) if s == 0 || s > cfg.sigma => {
                    return Err(CliError::parse(
                        text.path(),
                        text.position(),
                        format!("symbol {s} outside 1..={}", cfg.sigma),
                    ))
                }
                Some(s) => chunk.push(s),
                None => break,
            }
        }
        if chunk.is_empty() {
            break;
        }
        for est in engine.process_text(&chunk)? {
            write_row(out, &Row::from(&est)).map_err(io)?;
            rows += 1;
        }
    }
    let snap = engine.measure_state();
    Ok(RunSummary {
        rows,
        block_len: b,
        peak_words: snap.peak_total,
        work_per_char: snap.work_per_character(),
        lookup_failures: snap.lookup_failures,
        wall: started.elapsed(),
    })
}

/// Exact rows for every alignment.
pub fn oracle_rows(pattern: &[Symbol], text: &[Symbol], p: f64) -> CliResult<Vec<Row>> {
    let exact = all_alignments_exact(pattern, text, p)?;
    let n = pattern.len();
    Ok(exact
        .values
        .iter()
        .enumerate()
        .map(|(t, &v)| Row {
            end_pos: n + t,
            value: v,
            norm: (p > 0.0).then(|| v.powf(1.0 / p)),
        })
        .collect())
}

/// Accuracy summary of a run against the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub rows: usize,
    pub successes: usize,
    pub zero_rows: usize,
    /// Relative errors at quantiles 0.5, 0.9, 0.99 and 1.
    pub quantiles: [f64; 4],
}

impl Report {
    pub fn success_rate(&self) -> f64 {
        if self.rows == 0 {
            1.0
        } else {
            self.successes as f64 / self.rows as f64
        }
    }

    pub fn write(&self, out: &mut impl Write, epsilon: f64) -> std::io::Result<()> {
        writeln!(out, "rows\t{}", self.rows)?;
        writeln!(out, "epsilon\t{}", crate::tsv::fmt_sig(epsilon))?;
        writeln!(out, "success_rate\t{}", crate::tsv::fmt_sig(self.success_rate()))?;
        writeln!(out, "zero_rows\t{}", self.zero_rows)?;
        for (name, q) in ["rel_err_p50", "rel_err_p90", "rel_err_p99", "rel_err_max"].iter().zip(self.quantiles) {
            writeln!(out, "{name}\t{}", crate::tsv::fmt_sig(q))?;
        }
        Ok(())
    }
}

/// Relative error; an exact zero admits only a zero estimate.
pub fn relative_error(estimate: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        if estimate == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (estimate - exact).abs() / exact
    }
}

pub fn evaluate(run: &[Row], oracle: &[Row], epsilon: f64) -> CliResult<Report> {
    if run.len() != oracle.len() {
        return Err(CliError::Usage(format!(
            "run has {} rows but the oracle has {}",
            run.len(),
            oracle.len()
        )));
    }
    let mut errors = Vec::with_capacity(run.len());
    let mut successes = 0;
    let mut zero_rows = 0;
    for (r, o) in run.iter().zip(oracle) {
        if r.end_pos != o.end_pos {
            return Err(CliError::Usage(format!(
                "row for end position {} faces oracle row {}",
                r.end_pos, o.end_pos
            )));
        }
        if o.value == 0.0 {
            zero_rows += 1;
        }
        if (r.value - o.value).abs() <= epsilon * o.value {
            successes += 1;
        }
        errors.push(relative_error(r.value, o.value));
    }
    errors.sort_by(f64::total_cmp);
    let q = |f: f64| -> f64 {
        if errors.is_empty() {
            return 0.0;
        }
        let idx = ((f * errors.len() as f64).ceil() as usize).clamp(1, errors.len()) - 1;
        errors[idx]
    };
    Ok(Report {
        rows: run.len(),
        successes,
        zero_rows,
        quantiles: [q(0.5), q(0.9), q(0.99), q(1.0)],
    })
}

/// One point of a scaling sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchPoint {
    pub n: usize,
    pub epsilon: f64,
    pub p: f64,
    pub block_len: usize,
    pub peak_words: usize,
    pub work_per_char: f64,
    pub wall: Duration,
}

/// Runs every `(n, ε, p)` of the grid on uniform inputs (text length 2n).
pub fn bench(
    grid: &[(usize, f64, f64)],
    sigma: u32,
    repetitions: usize,
    seed: u64,
    execution: Execution,
) -> CliResult<Vec<BenchPoint>> {
    grid.iter()
        .map(|&(n, epsilon, p)| {
            let data = generate(n, sigma, 2 * n, TextModel::Uniform, seed)?;
            let opts = RunOptions {
                p,
                epsilon,
                seed,
                repetitions,
                block_len: None,
                execution,
            };
            let cfg = build_config(n, sigma, &opts)?;
            let started = Instant::now();
            let mut engine = Engine::new(&data.pattern, &cfg)?;
            engine.process_text(&data.text)?;
            let snap = engine.measure_state();
            Ok(BenchPoint {
                n,
                epsilon,
                p,
                block_len: engine.block_len(),
                peak_words: snap.peak_total,
                work_per_char: snap.work_per_character(),
                wall: started.elapsed(),
            })
        })
        .collect()
}

pub fn write_bench(out: &mut impl Write, points: &[BenchPoint]) -> std::io::Result<()> {
    writeln!(out, "n\tepsilon\tp\tblock_len\tpeak_words\twork_per_char\twall_ms")?;
    for pt in points {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            pt.n,
            crate::tsv::fmt_sig(pt.epsilon),
            crate::tsv::fmt_sig(pt.p),
            pt.block_len,
            pt.peak_words,
            crate::tsv::fmt_sig(pt.work_per_char),
            pt.wall.as_millis()
        )?;
    }
    Ok(())
}

/// Least-squares slope of `log y` against `log x`.
pub fn growth_exponent(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_square_root() {
        let pts: Vec<_> = [1.0, 4.0, 16.0].iter().map(|&x: &f64| (x, 3.0 * x.sqrt())).collect();
        assert!((growth_exponent(&pts).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(growth_exponent(&pts[..1]), None);
    }

    #[test]
    fn zero_rule() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert!(relative_error(0.1, 0.0).is_infinite());
        let oracle = vec![Row { end_pos: 3, value: 0.0, norm: None }];
        let run = vec![Row { end_pos: 3, value: 1.0, norm: None }];
        assert_eq!(evaluate(&run, &oracle, 0.25).unwrap().success_rate(), 0.0);
        assert_eq!(evaluate(&oracle, &oracle, 0.25).unwrap().success_rate(), 1.0);
    }

    #[test]
    fn mismatched_rows_rejected() {
        let a = vec![Row { end_pos: 3, value: 1.0, norm: None }];
        let b = vec![Row { end_pos: 4, value: 1.0, norm: None }];
        assert!(evaluate(&a, &b, 0.1).is_err());
        assert!(evaluate(&a, &[], 0.1).is_err());
    }

    #[test]
    fn planted_without_noise_is_exact_copy() {
        let g = generate(50, 4, 200, TextModel::Planted { noise_rate: 0.0 }, 9).unwrap();
        let end = g.planted_end.unwrap();
        assert_eq!(&g.text[end - 50..end], &g.pattern[..]);
    }

    #[test]
    fn short_text_rejected() {
        assert!(generate(10, 4, 9, TextModel::Uniform, 0).is_err());
    }
}
