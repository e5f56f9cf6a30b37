//! Experiment configuration, trie sweeps and the mixing / return-time reports.

use std::io::Write;
use std::time::Instant;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::comb::{Comb, CombKind, Prob, DEFAULT_CONVERGENCE_HORIZON};
use crate::error::{Error, Result};
use crate::mixing::{classify, mixing_bruteforce, CaseId, MixingEngine, MAX_ENUMERATION};
use crate::return_time::{moments_printed, moments, scan_second_occurrence, pattern, DEFAULT_SCAN_CAP};
use crate::sampler::{run_seed, LetterStream};
use crate::series::SeriesKit;
use crate::trie::{SuffixTrie, DEFAULT_LETTER_CAP};
use crate::word::Word;

pub const CSV_HEADER: [&str; 8] = ["comb", "seed", "run_id", "n", "height", "saturation", "letters", "millis"];

/// Which comb to use; `q` is only read for custom combs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombSelector {
    pub kind: CombKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q: Vec<Prob>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

impl CombSelector {
    pub fn builtin(kind: CombKind) -> Self {
        CombSelector { kind, q: Vec::new(), horizon: None }
    }

    pub fn build(&self) -> Result<Comb> {
        match self.kind {
            CombKind::Custom => Comb::custom(&self.q, self.horizon.unwrap_or(DEFAULT_CONVERGENCE_HORIZON)),
            kind => {
                if !self.q.is_empty() {
                    return Err(Error::InvalidComb(format!("q-list given for builtin comb {}", kind.name())));
                }
                Comb::from_kind(kind)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub comb: CombSelector,
    pub seed: u64,
    pub runs: u64,
    pub checkpoints: Vec<u64>,
    pub series_order: usize,
    pub enumeration_max: usize,
    pub letter_cap: u64,
    pub output: Option<String>,
    pub format: OutputFormat,
    /// Record wall time per row; off by default so output is byte-stable.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            comb: CombSelector::builtin(CombKind::Logarithmic),
            seed: 1,
            runs: 25,
            checkpoints: (10..=18).map(|e| 1u64 << e).collect(),
            series_order: crate::series::DEFAULT_RATIONAL_ORDER,
            enumeration_max: 14,
            letter_cap: DEFAULT_LETTER_CAP,
            output: None,
            format: OutputFormat::Csv,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.comb.build()?;
        if self.runs == 0 {
            return Err(Error::Argument("runs must be >= 1".into()));
        }
        if self.checkpoints.is_empty() || self.checkpoints[0] == 0 {
            return Err(Error::Argument("checkpoints must be nonempty and positive".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("checkpoints must be strictly increasing".into()));
        }
        if self.series_order == 0 {
            return Err(Error::Argument("series_order must be >= 1".into()));
        }
        if self.enumeration_max > MAX_ENUMERATION {
            return Err(Error::Budget { n: self.enumeration_max, max: MAX_ENUMERATION });
        }
        Ok(())
    }
}

/// One CSV row. `height` and `saturation` are empty for a run aborted by
/// its letter budget; the row then reports where it stopped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub comb: String,
    pub seed: u64,
    pub run_id: u64,
    pub n: u64,
    pub height: Option<usize>,
    pub saturation: Option<usize>,
    pub letters: u64,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckpointMean {
    pub n: u64,
    pub runs: u64,
    pub mean_height: f64,
    pub mean_saturation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub records: Vec<RunRecord>,
    pub means: Vec<CheckpointMean>,
    pub aborted_runs: u64,
}

/// Grows one trie per run through all checkpoints.
pub fn run_trie(comb: &Comb, seed: u64, run_id: u64, checkpoints: &[u64], letter_cap: u64, timing: bool) -> Vec<RunRecord> {
    let run_seed = run_seed(seed, run_id);
    let mut trie = SuffixTrie::with_cap(LetterStream::new(comb, run_seed), letter_cap);
    let start = Instant::now();
    let mut out = Vec::with_capacity(checkpoints.len());
    for &n in checkpoints {
        let grown = trie.grow_to(n);
        let millis = if timing { start.elapsed().as_millis() as u64 } else { 0 };
        let (height, saturation) = match grown {
            Ok(()) => (Some(trie.height()), Some(trie.saturation())),
            Err(_) => (None, None),
        };
        out.push(RunRecord {
            comb: comb.name().to_string(),
            seed,
            run_id,
            n: if grown.is_ok() { n } else { trie.n() },
            height,
            saturation,
            letters: trie.letters().len() as u64,
            millis,
        });
        if grown.is_err() {
            break;
        }
    }
    out
}

/// All runs of a sweep, in run order. Runs are spread over the available
/// threads; the result does not depend on how many there are.
pub fn trie_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let comb = cfg.comb.build()?;
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(cfg.runs as usize).max(1);
    let mut per_run: Vec<Vec<RunRecord>> = vec![Vec::new(); cfg.runs as usize];
    if workers == 1 {
        for (r, slot) in per_run.iter_mut().enumerate() {
            *slot = run_trie(&comb, cfg.seed, r as u64, &cfg.checkpoints, cfg.letter_cap, cfg.timing);
        }
    } else {
        std::thread::scope(|scope| {
            for (w, chunk) in per_run.chunks_mut(cfg.runs.div_ceil(workers as u64) as usize).enumerate() {
                let comb = &comb;
                let base = w * cfg.runs.div_ceil(workers as u64) as usize;
                scope.spawn(move || {
                    for (i, slot) in chunk.iter_mut().enumerate() {
                        *slot = run_trie(comb, cfg.seed, (base + i) as u64, &cfg.checkpoints, cfg.letter_cap, cfg.timing);
                    }
                });
            }
        });
    }
    let aborted_runs = per_run.iter().filter(|rows| rows.iter().any(|r| r.height.is_none())).count() as u64;
    let records: Vec<RunRecord> = per_run.into_iter().flatten().collect();
    let means = checkpoint_means(&records, &cfg.checkpoints);
    Ok(SweepResult { records, means, aborted_runs })
}

/// Per-checkpoint means over the runs that reached it.
pub fn checkpoint_means(records: &[RunRecord], checkpoints: &[u64]) -> Vec<CheckpointMean> {
    checkpoints
        .iter()
        .map(|&n| {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.n == n && r.height.is_some()).collect();
            let k = rows.len() as f64;
            let mh = rows.iter().map(|r| r.height.unwrap() as f64).sum::<f64>() / k;
            let ms = rows.iter().map(|r| r.saturation.unwrap() as f64).sum::<f64>() / k;
            CheckpointMean { n, runs: rows.len() as u64, mean_height: mh, mean_saturation: ms }
        })
        .collect()
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::Argument(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Argument(format!("csv: {e}")))?;
    Ok(())
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub slope_ci95: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return Err(Error::Argument("a fit needs at least three paired points".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Argument("degenerate x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let t = student_t_975(n - 2);
    Ok(LinearFit { slope, intercept, r2, slope_ci95: t * se })
}

/// Two-sided 95% quantile of Student's t.
fn student_t_975(dof: usize) -> f64 {
    use statrs::distribution::{ContinuousCDF, StudentsT};
    StudentsT::new(0.0, 1.0, dof as f64).map(|t| t.inverse_cdf(0.975)).unwrap_or(1.96)
}

/// Fitted trends of the checkpoint means.
#[derive(Clone, Debug, Serialize)]
pub struct TrendReport {
    pub comb: String,
    pub means: Vec<CheckpointMean>,
    /// Mean height against `ln n`.
    pub height_vs_ln: LinearFit,
    /// Mean saturation against `ln n`.
    pub saturation_vs_ln: LinearFit,
    /// `ln` mean height against `ln n`.
    pub height_loglog: LinearFit,
    pub height_over_ln: Vec<f64>,
    pub saturation_over_ln: Vec<f64>,
}

pub fn trend_report(comb: &str, means: &[CheckpointMean]) -> Result<TrendReport> {
    let means: Vec<CheckpointMean> = means.iter().filter(|m| m.runs > 0).cloned().collect();
    let ln: Vec<f64> = means.iter().map(|m| (m.n as f64).ln()).collect();
    let h: Vec<f64> = means.iter().map(|m| m.mean_height).collect();
    let l: Vec<f64> = means.iter().map(|m| m.mean_saturation).collect();
    let ln_h: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    Ok(TrendReport {
        comb: comb.to_string(),
        height_vs_ln: linear_fit(&ln, &h)?,
        saturation_vs_ln: linear_fit(&ln, &l)?,
        height_loglog: linear_fit(&ln, &ln_h)?,
        height_over_ln: h.iter().zip(&ln).map(|(a, b)| a / b).collect(),
        saturation_over_ln: l.iter().zip(&ln).map(|(a, b)| a / b).collect(),
        means,
    })
}

pub fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] > w[1])
}

/// Coefficient arithmetic used by a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Numeric {
    Exact,
    Float,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixRow {
    pub n: usize,
    pub case_id: CaseId,
    pub a: usize,
    pub b: usize,
    pub psi: f64,
    /// The exact value as `p/q` when computed in rational mode.
    pub psi_exact: Option<String>,
    pub n3_psi: f64,
    /// `|psi| (2 pi)^n`.
    pub psi_2pi_n: f64,
    pub brute: Option<f64>,
    /// `psi - brute`, exact in rational mode.
    pub difference: Option<String>,
}

/// `psi(n, A, B)` for each `n`, with the enumeration value where `n` is
/// within `enumeration_max`.
pub fn mixing_table(comb: &Comb, a: &Word, b: &Word, ns: &[usize], numeric: Numeric, enumeration_max: usize) -> Result<Vec<MixRow>> {
    match numeric {
        Numeric::Exact => mixing_rows::<BigRational>(comb, a, b, ns, enumeration_max),
        Numeric::Float => mixing_rows::<f64>(comb, a, b, ns, enumeration_max),
    }
}

fn mixing_rows<C: Coeff + std::fmt::Display>(comb: &Comb, a: &Word, b: &Word, ns: &[usize], enumeration_max: usize) -> Result<Vec<MixRow>> {
    let case = classify(a, b)?;
    let top = ns.iter().copied().max().ok_or_else(|| Error::Argument("no n given".into()))?;
    let shift = case.a + case.b;
    let brute_top = ns.iter().copied().filter(|&n| n <= enumeration_max).max().unwrap_or(0);
    let horizon = (top + shift + 4).max(a.len() + b.len() + brute_top + 1);
    let nums = comb.numbers::<C>(horizon);
    let engine = MixingEngine::from_numbers(nums.clone(), top + 2, shift)?;
    let values = engine.psi_many(&case, ns)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut rows = Vec::with_capacity(ns.len());
    for (&n, v) in ns.iter().zip(values) {
        let brute = if n <= enumeration_max.min(MAX_ENUMERATION) { Some(mixing_bruteforce(&nums, a, b, n)?) } else { None };
        let psi = v.to_f64();
        rows.push(MixRow {
            n,
            case_id: case.case_id,
            a: case.a,
            b: case.b,
            psi,
            psi_exact: C::EXACT.then(|| v.to_string()),
            n3_psi: (n as f64).powi(3) * psi,
            psi_2pi_n: psi.abs() * two_pi.powi(n as i32),
            brute: brute.as_ref().map(|x| x.to_f64()),
            difference: brute.map(|x| (v.clone() - x).to_string()),
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarlo {
    pub runs: u64,
    pub mean_t: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReturnTimeReport {
    pub comb: String,
    pub k: usize,
    pub mean_tau2: f64,
    pub var_tau2: f64,
    pub mean_t: f64,
    pub var_t: f64,
    pub mean_t_over_k4: f64,
    pub var_t_over_k8: f64,
    pub exact_mean_tau2: Option<String>,
    pub exact_var_tau2: Option<String>,
    /// Mean of `tau2` under the printed `S_w` (equal to `mean_tau2` for `k = 1`).
    pub printed_mean_tau2: f64,
    /// `P(tau2 = m)` for `m < dist_head.len()`.
    pub dist_head: Vec<f64>,
    pub dist_defect: f64,
    pub monte_carlo: Option<MonteCarlo>,
}

/// Moments, the head of the law of `tau2` and a Monte Carlo summary for `w = 10^(k-1)`.
pub fn return_time_report(comb: &Comb, k: usize, head: usize, mc_runs: u64, seed: u64) -> Result<ReturnTimeReport> {
    let exact = comb.s1_exact().is_some();
    let (mean_tau2, var_tau2, mean_t, var_t, exact_mean, exact_var, printed) = if exact {
        let nums = comb.numbers::<BigRational>(k + 1);
        let m = moments(&nums, k)?;
        let p = moments_printed(&nums, k)?;
        (
            m.mean_tau2.to_f64(),
            m.var_tau2.to_f64(),
            m.mean_t.to_f64(),
            m.var_t.to_f64(),
            Some(m.mean_tau2.to_string()),
            Some(m.var_tau2.to_string()),
            p.mean_tau2.to_f64(),
        )
    } else {
        let nums = comb.numbers::<f64>(k + 1);
        let m = moments(&nums, k)?;
        let p = moments_printed(&nums, k)?;
        (m.mean_tau2, m.var_tau2, m.mean_t, m.var_t, None, None, p.mean_tau2)
    };
    let order = head.max(2 * k + 1);
    let kit = SeriesKit::<f64>::new(comb, order, k + 1);
    let (_, phi2) = crate::return_time::phi_series(&kit, k)?;
    let mut dist_head = phi2.coeffs();
    dist_head.truncate(head);
    let dist_defect = 1.0 - dist_head.iter().sum::<f64>();
    let monte_carlo = (mc_runs > 0).then(|| monte_carlo_t(comb, k, mc_runs, seed)).transpose()?;
    let k4 = (k as f64).powi(4);
    Ok(ReturnTimeReport {
        comb: comb.name().to_string(),
        k,
        mean_tau2,
        var_tau2,
        mean_t,
        var_t,
        mean_t_over_k4: mean_t / k4,
        var_t_over_k8: var_t / (k4 * k4),
        exact_mean_tau2: exact_mean,
        exact_var_tau2: exact_var,
        printed_mean_tau2: printed,
        dist_head,
        dist_defect,
        monte_carlo,
    })
}

/// Mean of the start `T` of the second occurrence of `10^(k-1)` over
/// `runs` seeded streams.
pub fn monte_carlo_t(comb: &Comb, k: usize, runs: u64, seed: u64) -> Result<MonteCarlo> {
    let w = pattern(k);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for r in 0..runs {
        let stream = LetterStream::new(comb, run_seed(seed, r));
        let t = scan_second_occurrence(stream, &w, DEFAULT_SCAN_CAP)?.t as f64;
        sum += t;
        sum2 += t * t;
    }
    let n = runs as f64;
    let mean = sum / n;
    let var = if runs > 1 { (sum2 - n * mean * mean) / (n - 1.0) } else { 0.0 };
    Ok(MonteCarlo { runs, mean_t: mean, stderr: (var / n).sqrt() })
}
