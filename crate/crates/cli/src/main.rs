use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use combtrie::experiment::{
    mixing_table, return_time_report, strictly_decreasing, strictly_increasing, trend_report, trie_sweep, write_csv,
    ExperimentConfig, MixRow, Numeric, OutputFormat,
};
use combtrie::sampler::LetterStream;
use combtrie::{CombKind, Prob, Word};
use serde::Serialize;

const OUT_DIR_VAR: &str = "COMBTRIE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "combtrie", version, about = "Comb-source experiments: mixing coefficients, return times and suffix tries")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON experiment config; the flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// logarithmic, factorial, logn or custom
    #[arg(long, global = true)]
    comb: Option<CombKind>,
    /// q-list for a custom comb, e.g. `1/2,0.3,1/4` (the last value repeats)
    #[arg(long, global = true, value_delimiter = ',')]
    q: Option<Vec<String>>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    runs: Option<u64>,
    /// Series order N.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Output file; defaults to a file under $COMBTRIE_OUT_DIR, else stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Record wall time in the `millis` column.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run the oracle battery and print a pass/fail table.
    Verify,
    /// Grow tries to each checkpoint and emit one CSV row per run and checkpoint.
    TrieSweep {
        /// Comma-separated, strictly increasing trie sizes.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<u64>>,
    },
    /// psi(n, A, B) with the enumeration value where affordable.
    Mixing {
        #[arg(long)]
        a: Word,
        #[arg(long)]
        b: Word,
        /// Comma-separated gap lengths.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_enum, default_value = "exact")]
        numeric: NumericArg,
    },
    /// Moments, law head and Monte Carlo mean of the second return of 10^(k-1).
    ReturnTime {
        #[arg(long)]
        k: usize,
        /// Number of law coefficients to emit.
        #[arg(long, default_value_t = 32)]
        head: usize,
        /// Monte Carlo runs (0 to skip).
        #[arg(long, default_value_t = 1000)]
        mc_runs: u64,
    },
    /// Stationary probability of a word.
    Pi {
        word: Word,
    },
    /// Write a raw letter stream as ASCII 0/1.
    Generate {
        #[arg(long)]
        letters: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NumericArg {
    Exact,
    Float,
}

fn parse_prob(s: &str) -> Result<Prob, String> {
    let s = s.trim();
    if s.contains('/') {
        s.parse().map(Prob::Exact).map_err(|e| format!("bad probability {s:?}: {e}"))
    } else {
        s.parse().map(Prob::Float).map_err(|e| format!("bad probability {s:?}: {e}"))
    }
}

fn load_config(c: &Common) -> Result<ExperimentConfig, String> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            ExperimentConfig::from_json(&text).map_err(|e| e.to_string())?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(kind) = c.comb {
        cfg.comb.kind = kind;
        if kind != CombKind::Custom {
            cfg.comb.q.clear();
        }
    }
    if let Some(q) = &c.q {
        cfg.comb.q = q.iter().map(|s| parse_prob(s)).collect::<Result<_, _>>()?;
    }
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(runs) = c.runs {
        cfg.runs = runs;
    }
    if let Some(order) = c.order {
        cfg.series_order = order;
    }
    if let Some(out) = &c.out {
        cfg.output = Some(out.display().to_string());
    }
    if let Some(f) = c.format {
        cfg.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    cfg.timing |= c.timing;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Explicit output path, else `$COMBTRIE_OUT_DIR/<default_name>`, else stdout.
fn open_output(cfg: &ExperimentConfig, default_name: &str) -> Result<(Box<dyn Write>, Option<PathBuf>), String> {
    let path = match &cfg.output {
        Some(p) => Some(PathBuf::from(p)),
        None => std::env::var_os(OUT_DIR_VAR).map(|d| PathBuf::from(d).join(default_name)),
    };
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            let f = File::create(&p).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok((Box::new(BufWriter::new(f)), Some(p)))
        }
        None => Ok((Box::new(BufWriter::new(io::stdout().lock())), None)),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<(), String> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(|e| e.to_string())?;
    writeln!(out).map_err(|e| e.to_string())
}

fn cmd_verify(cfg: &ExperimentConfig) -> Result<bool, String> {
    let comb = cfg.comb.build().map_err(|e| e.to_string())?;
    println!("oracle battery, {} comb", comb.name());
    let checks = combtrie::verify::run_all(&comb);
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!("{} {:width$}  {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} passed, {failed} failed", checks.len() - failed);
    Ok(failed == 0)
}

fn cmd_trie_sweep(mut cfg: ExperimentConfig, checkpoints: Option<Vec<u64>>) -> Result<bool, String> {
    if let Some(c) = checkpoints {
        cfg.checkpoints = c;
        cfg.validate().map_err(|e| e.to_string())?;
    }
    let res = trie_sweep(&cfg).map_err(|e| e.to_string())?;
    let name = format!("trie_sweep_{}.{}", cfg.comb.kind.name(), ext(cfg.format));
    let (mut out, path) = open_output(&cfg, &name)?;
    match cfg.format {
        OutputFormat::Csv => write_csv(&res.records, &mut out).map_err(|e| e.to_string())?,
        OutputFormat::Json => write_json(&mut out, &res)?,
    }
    out.flush().map_err(|e| e.to_string())?;
    drop(out);
    // the summary goes to stderr so stdout stays pure data
    let mut err = io::stderr().lock();
    let _ = writeln!(err, "{} runs, {} aborted by the letter cap", cfg.runs, res.aborted_runs);
    let _ = writeln!(err, "{:>10} {:>5} {:>10} {:>10}", "n", "runs", "mean H", "mean l");
    for m in &res.means {
        let _ = writeln!(err, "{:>10} {:>5} {:>10.3} {:>10.3}", m.n, m.runs, m.mean_height, m.mean_saturation);
    }
    if res.means.iter().filter(|m| m.runs > 0).count() >= 3 {
        let t = trend_report(cfg.comb.kind.name(), &res.means).map_err(|e| e.to_string())?;
        let _ = writeln!(
            err,
            "H vs ln n: slope {:.4} +/- {:.4}, R2 {:.4}",
            t.height_vs_ln.slope, t.height_vs_ln.slope_ci95, t.height_vs_ln.r2
        );
        let _ = writeln!(
            err,
            "l vs ln n: slope {:.4} +/- {:.4}, R2 {:.4}",
            t.saturation_vs_ln.slope, t.saturation_vs_ln.slope_ci95, t.saturation_vs_ln.r2
        );
        let _ = writeln!(err, "ln H vs ln n: slope {:.4} +/- {:.4}", t.height_loglog.slope, t.height_loglog.slope_ci95);
        let _ = writeln!(
            err,
            "H/ln n increasing: {}, l/ln n decreasing: {}",
            strictly_increasing(&t.height_over_ln),
            strictly_decreasing(&t.saturation_over_ln)
        );
    }
    if let Some(p) = path {
        let _ = writeln!(err, "wrote {}", p.display());
    }
    Ok(true)
}

fn ext(f: OutputFormat) -> &'static str {
    match f {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn cmd_mixing(cfg: &ExperimentConfig, a: &Word, b: &Word, ns: &[usize], numeric: NumericArg) -> Result<bool, String> {
    let comb = cfg.comb.build().map_err(|e| e.to_string())?;
    let numeric = match numeric {
        NumericArg::Exact => Numeric::Exact,
        NumericArg::Float => Numeric::Float,
    };
    let rows: Vec<MixRow> = mixing_table(&comb, a, b, ns, numeric, cfg.enumeration_max).map_err(|e| e.to_string())?;
    let (mut out, _) = open_output(cfg, &format!("mixing_{}_{a}_{b}.{}", comb.name(), ext(cfg.format)))?;
    match cfg.format {
        OutputFormat::Json => write_json(&mut out, &rows)?,
        OutputFormat::Csv => {
            writeln!(out, "n,case,a,b,psi,n3_psi,psi_2pi_n,brute,difference,psi_exact").map_err(|e| e.to_string())?;
            for r in &rows {
                let brute = r.brute.map(|v| format!("{v:e}")).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{:e},{:e},{:e},{},{},{}",
                    r.n,
                    r.case_id,
                    r.a,
                    r.b,
                    r.psi,
                    r.n3_psi,
                    r.psi_2pi_n,
                    brute,
                    r.difference.as_deref().unwrap_or(""),
                    r.psi_exact.as_deref().unwrap_or("")
                )
                .map_err(|e| e.to_string())?;
            }
        }
    }
    out.flush().map_err(|e| e.to_string())?;
    Ok(true)
}

fn cmd_return_time(cfg: &ExperimentConfig, k: usize, head: usize, mc_runs: u64) -> Result<bool, String> {
    let comb = cfg.comb.build().map_err(|e| e.to_string())?;
    let report = return_time_report(&comb, k, head, mc_runs, cfg.seed).map_err(|e| e.to_string())?;
    let (mut out, _) = open_output(cfg, &format!("return_time_{}_k{k}.json", comb.name()))?;
    write_json(&mut out, &report)?;
    out.flush().map_err(|e| e.to_string())?;
    Ok(true)
}

#[derive(Serialize)]
struct PiReport {
    comb: String,
    word: String,
    pi: f64,
    exact: Option<String>,
}

fn cmd_pi(cfg: &ExperimentConfig, w: &Word) -> Result<bool, String> {
    let comb = cfg.comb.build().map_err(|e| e.to_string())?;
    let pi = comb.pi_word(w);
    let report = PiReport {
        comb: comb.name().into(),
        word: w.to_string(),
        pi: pi.to_f64(),
        exact: pi.as_exact().map(|r| r.to_string()),
    };
    write_json(&mut io::stdout().lock(), &report)?;
    Ok(true)
}

fn cmd_generate(cfg: &ExperimentConfig, letters: u64) -> Result<bool, String> {
    let comb = cfg.comb.build().map_err(|e| e.to_string())?;
    let (mut out, _) = open_output(cfg, &format!("letters_{}_{}.txt", comb.name(), cfg.seed))?;
    let mut stream = LetterStream::new(&comb, cfg.seed);
    let mut line = Vec::with_capacity(80);
    for i in 0..letters {
        line.push(b'0' + stream.next_letter());
        if line.len() == 80 || i + 1 == letters {
            line.push(b'\n');
            out.write_all(&line).map_err(|e| e.to_string())?;
            line.clear();
        }
    }
    out.flush().map_err(|e| e.to_string())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli.common).and_then(|cfg| match cli.cmd {
        Cmd::Verify => cmd_verify(&cfg),
        Cmd::TrieSweep { checkpoints } => cmd_trie_sweep(cfg, checkpoints),
        Cmd::Mixing { a, b, n, numeric } => cmd_mixing(&cfg, &a, &b, &n, numeric),
        Cmd::ReturnTime { k, head, mc_runs } => cmd_return_time(&cfg, k, head, mc_runs),
        Cmd::Pi { word } => cmd_pi(&cfg, &word),
        Cmd::Generate { letters } => cmd_generate(&cfg, letters),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
