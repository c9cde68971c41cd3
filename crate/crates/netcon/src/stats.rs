//! Statistics over batches of runs: hidden coefficients, power-law fits,
//! counting success rates and census windows.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use netcon_core::protocol::builtin;
use netcon_core::SchedulerKind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::results::ResultRow;

/// Largest step budget ever derived automatically.
pub const MAX_STEP_CAP: u64 = 5_000_000_000;
/// Default budget as a multiple of the protocol's complexity function.
pub const DEFAULT_BUDGET_FACTOR: f64 = 50.0;

/// Normalizing function `f(n)` of a hidden coefficient. Logarithms are natural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Complexity {
    #[serde(rename = "n^2")]
    Quadratic,
    #[serde(rename = "n^2 ln n")]
    QuadraticLog,
    #[serde(rename = "n^3")]
    Cubic,
}

impl Complexity {
    pub fn eval(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Complexity::Quadratic => n * n,
            Complexity::QuadraticLog => n * n * n.ln(),
            Complexity::Cubic => n * n * n,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Complexity::Quadratic => "n^2",
            Complexity::QuadraticLog => "n^2 ln n",
            Complexity::Cubic => "n^3",
        }
    }

    /// The known bound of a built-in protocol; cubic for anything else.
    pub fn for_protocol(name: &str) -> Complexity {
        match name {
            builtin::CYCLE_COVER => Complexity::Quadratic,
            builtin::GLOBAL_STAR | builtin::COUNTING_UPPER_BOUND => Complexity::QuadraticLog,
            _ => Complexity::Cubic,
        }
    }

    /// `50 f(n)`, capped at five billion steps.
    pub fn default_budget(self, n: usize) -> u64 {
        let steps = DEFAULT_BUDGET_FACTOR * self.eval(n);
        if steps >= MAX_STEP_CAP as f64 {
            MAX_STEP_CAP
        } else {
            steps.ceil() as u64
        }
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Complexity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "n2" | "n^2" => Ok(Complexity::Quadratic),
            "n2logn" | "n^2 ln n" | "n2ln" => Ok(Complexity::QuadraticLog),
            "n3" | "n^3" => Ok(Complexity::Cubic),
            _ => Err(format!("unknown complexity `{s}` (expected n2, n2logn or n3)")),
        }
    }
}

/// Statistics of one (scheduler, n) cell. Non-converged runs are counted
/// but excluded from the moments; a cell without converged runs has no
/// mean and no coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCell {
    pub scheduler: String,
    pub n: usize,
    pub runs: usize,
    pub converged: usize,
    pub excluded: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub coefficient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub alpha: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerFit {
    pub scheduler: String,
    pub sizes: Vec<usize>,
    #[serde(flatten)]
    pub fit: ExponentFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientReport {
    pub complexity: Complexity,
    pub log_base: String,
    pub cells: Vec<CoefficientCell>,
    /// Only schedulers with at least three sizes of at least five
    /// converged runs get a fit.
    pub fits: Vec<SchedulerFit>,
}

impl CoefficientReport {
    pub fn cell(&self, scheduler: &str, n: usize) -> Option<&CoefficientCell> {
        self.cells.iter().find(|c| c.scheduler == scheduler && c.n == n)
    }

    pub fn fit(&self, scheduler: &str) -> Option<&ExponentFit> {
        self.fits.iter().find(|f| f.scheduler == scheduler).map(|f| &f.fit)
    }
}

pub const MIN_FIT_SIZES: usize = 3;
pub const MIN_FIT_REPS: usize = 5;

fn scheduler_rank(name: &str) -> (usize, String) {
    let rank = name.parse::<SchedulerKind>().map(|k| k as usize).unwrap_or(usize::MAX);
    (rank, name.to_string())
}

/// Groups runs by (scheduler, n), in scheduler order then by size.
fn cells(rows: &[ResultRow]) -> BTreeMap<((usize, String), usize), Vec<&ResultRow>> {
    let mut map: BTreeMap<_, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        map.entry((scheduler_rank(&r.scheduler), r.n)).or_default().push(r);
    }
    map
}

pub fn mean_std(values: &[f64]) -> (f64, Option<f64>) {
    let len = values.len() as f64;
    let mean = values.iter().sum::<f64>() / len;
    let std = (values.len() > 1).then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0)).sqrt());
    (mean, std)
}

type SizeSamples = Vec<(usize, Vec<f64>)>;

pub fn estimate_coefficient(rows: &[ResultRow], complexity: Complexity) -> CoefficientReport {
    let mut out = Vec::new();
    let mut by_scheduler: BTreeMap<(usize, String), SizeSamples> = BTreeMap::new();
    for ((sched, n), runs) in cells(rows) {
        let times: Vec<f64> = runs.iter().filter(|r| r.converged).map(|r| r.total as f64).collect();
        let (mean, std, coefficient) = if times.is_empty() {
            (None, None, None)
        } else {
            let (m, s) = mean_std(&times);
            (Some(m), s, Some(m / complexity.eval(n)))
        };
        out.push(CoefficientCell {
            scheduler: sched.1.clone(),
            n,
            runs: runs.len(),
            converged: times.len(),
            excluded: runs.len() - times.len(),
            mean,
            std,
            coefficient,
        });
        by_scheduler.entry(sched).or_default().push((n, times));
    }
    let fits = by_scheduler
        .into_iter()
        .filter_map(|((_, scheduler), sizes)| {
            let fit = fit_exponent(&sizes).ok()?;
            Some(SchedulerFit { scheduler, sizes: sizes.iter().map(|s| s.0).collect(), fit })
        })
        .collect();
    CoefficientReport { complexity, log_base: "natural".into(), cells: out, fits }
}

/// Least-squares fit of `ln mean(T)` on `ln n`. Needs at least three
/// distinct sizes with at least five samples each.
pub fn fit_exponent(samples: &[(usize, Vec<f64>)]) -> Result<ExponentFit> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (n, ts) in samples {
        by_n.entry(*n).or_default().extend(ts);
    }
    if by_n.len() < MIN_FIT_SIZES {
        return Err(Error::Stats(format!("exponent fit needs {MIN_FIT_SIZES} distinct sizes, got {}", by_n.len())));
    }
    let mut points = Vec::with_capacity(by_n.len());
    for (n, ts) in &by_n {
        if ts.len() < MIN_FIT_REPS {
            return Err(Error::Stats(format!(
                "exponent fit needs {MIN_FIT_REPS} samples per size, n={n} has {}",
                ts.len()
            )));
        }
        points.push((*n as f64, mean_std(ts).0));
    }
    fit_power_law(&points)
}

/// Ordinary least squares on `(ln x, ln y)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Stats("power-law fit needs positive values".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let len = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / len;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if logs.len() < 2 || sxx <= f64::EPSILON {
        return Err(Error::Stats("degenerate sizes: fit refused".into()));
    }
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let r2 = if syy <= f64::EPSILON { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(ExponentFit { alpha, intercept, r2 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessRate {
    pub threshold: f64,
    pub runs: usize,
    pub successes: usize,
    pub halted: usize,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Fraction of counting runs that halted with `r0 >= threshold * n`.
/// Runs that never halted count as failures.
pub fn counting_success_rate(rows: &[ResultRow], threshold: f64) -> Result<SuccessRate> {
    if rows.is_empty() {
        return Err(Error::Stats("no runs to rate".into()));
    }
    let mut successes = 0;
    let mut halted = 0;
    for r in rows {
        let r0 =
            r.r0.ok_or_else(|| Error::Stats(format!("run seed={} of `{}` is not a counting run", r.seed, r.protocol)))?;
        if r.converged {
            halted += 1;
            if r0 as f64 >= threshold * r.n as f64 {
                successes += 1;
            }
        }
    }
    let (wilson_low, wilson_high) = wilson_interval(successes, rows.len(), 1.96);
    Ok(SuccessRate {
        threshold,
        runs: rows.len(),
        successes,
        halted,
        rate: successes as f64 / rows.len() as f64,
        wilson_low,
        wilson_high,
    })
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Streaming longest window of consecutive steps during which every state
/// has multiplicity at least `alpha * n`.
#[derive(Debug, Clone)]
pub struct CensusWindow {
    threshold: f64,
    current: u64,
    longest: u64,
    steps: u64,
}

impl CensusWindow {
    pub fn new(alpha: f64, n: usize) -> Self {
        CensusWindow { threshold: alpha * n as f64, current: 0, longest: 0, steps: 0 }
    }

    /// Feeds the census after one interaction.
    pub fn push(&mut self, census: &[u32]) {
        self.steps += 1;
        if census.iter().all(|&c| c as f64 >= self.threshold) {
            self.current += 1;
            self.longest = self.longest.max(self.current);
        } else {
            self.current = 0;
        }
    }

    pub fn longest(&self) -> u64 {
        self.longest
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusWindowReport {
    pub alpha: f64,
    pub window: u64,
    pub normalized: f64,
    pub total_interactions: u64,
    pub warning: Option<String>,
}

/// Warns when `alpha` makes the window trivially full (`alpha <= 0`) or
/// unattainable (`alpha >= 1/|Q|`).
pub fn alpha_warning(alpha: f64, num_states: usize) -> Option<String> {
    if alpha <= 0.0 {
        Some(format!("alpha={alpha} <= 0: every census qualifies"))
    } else if alpha * num_states as f64 >= 1.0 {
        Some(format!("alpha={alpha} >= 1/|Q| = 1/{num_states}: the window is degenerate"))
    } else {
        None
    }
}

/// One-pass census window over a recorded trace of per-step censuses.
pub fn census_window<'a>(
    trace: impl IntoIterator<Item = &'a [u32]>,
    alpha: f64,
    n: usize,
    num_states: usize,
) -> CensusWindowReport {
    let mut w = CensusWindow::new(alpha, n);
    for census in trace {
        w.push(census);
    }
    CensusWindowReport {
        alpha,
        window: w.longest(),
        normalized: w.longest() as f64 / n as f64,
        total_interactions: w.steps(),
        warning: alpha_warning(alpha, num_states),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(scheduler: &str, n: usize, total: u64, converged: bool) -> ResultRow {
        ResultRow {
            protocol: "p".into(),
            scheduler: scheduler.into(),
            detector: "line".into(),
            n,
            rep: 0,
            seed: 0,
            b: None,
            converged,
            total,
            effective: 0,
            r0: None,
            r1: None,
            census_window: None,
        }
    }

    #[test]
    fn coefficient_arithmetic() {
        let rep = estimate_coefficient(&[row("random", 100, 800_000, true)], Complexity::Cubic);
        let c = rep.cell("random", 100).unwrap();
        assert!((c.coefficient.unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(c.std, None);
        assert_eq!(rep.log_base, "natural");
    }

    #[test]
    fn non_converged_runs_are_excluded_and_counted() {
        let rows = [row("random", 10, 100, true), row("random", 10, 5000, false), row("history", 10, 7, false)];
        let rep = estimate_coefficient(&rows, Complexity::Quadratic);
        let c = rep.cell("random", 10).unwrap();
        assert_eq!((c.runs, c.converged, c.excluded), (2, 1, 1));
        assert_eq!(c.mean, Some(100.0));
        let h = rep.cell("history", 10).unwrap();
        assert_eq!((h.mean, h.coefficient), (None, None));
        // scheduler order follows the scheduler enumeration
        assert_eq!(rep.cells[0].scheduler, "random");
    }

    #[test]
    fn exact_power_law() {
        let samples: Vec<(usize, Vec<f64>)> =
            [10usize, 20, 40, 80].iter().map(|&n| (n, vec![2.0 * (n as f64).powi(3); 5])).collect();
        let fit = fit_exponent(&samples).unwrap();
        assert!((fit.alpha - 3.0).abs() < 1e-12);
        assert!((fit.intercept - 2f64.ln()).abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_refusals() {
        let two_sizes = vec![(10, vec![1.0; 5]), (20, vec![2.0; 5])];
        assert!(fit_exponent(&two_sizes).is_err());
        let few_reps = vec![(10, vec![1.0; 5]), (20, vec![2.0; 4]), (30, vec![3.0; 5])];
        assert!(fit_exponent(&few_reps).is_err());
        assert!(fit_power_law(&[(5.0, 1.0), (5.0, 2.0), (5.0, 3.0)]).is_err());
    }

    #[test]
    fn wilson_contains_estimate() {
        for (s, t) in [(0, 10), (5, 10), (10, 10), (499, 500), (1, 3)] {
            let (lo, hi) = wilson_interval(s, t, 1.96);
            let p = s as f64 / t as f64;
            assert!(lo <= p && p <= hi, "{s}/{t}: [{lo}, {hi}]");
        }
        // textbook value for 5/10
        let (lo, hi) = wilson_interval(5, 10, 1.96);
        assert!((lo - 0.2366).abs() < 1e-3 && (hi - 0.7634).abs() < 1e-3);
    }

    #[test]
    fn success_rate_requires_counters() {
        assert!(counting_success_rate(&[row("random", 10, 1, true)], 0.5).is_err());
        let mut r = row("random", 10, 1, true);
        r.r0 = Some(9);
        r.r1 = Some(9);
        let rate = counting_success_rate(&[r], 0.9).unwrap();
        assert_eq!(rate.rate, 1.0);
    }

    #[test]
    fn census_window_edges() {
        let constant = vec![[5u32, 5]; 40];
        let rep = census_window(constant.iter().map(|c| &c[..]), 0.2, 10, 2);
        assert_eq!(rep.window, 40);
        assert_eq!(rep.total_interactions, 40);
        let missing = vec![[10u32, 0]; 40];
        assert_eq!(census_window(missing.iter().map(|c| &c[..]), 0.2, 10, 2).window, 0);
        assert!(census_window(missing.iter().map(|c| &c[..]), 0.6, 10, 2).warning.is_some());
    }

    #[test]
    fn census_window_picks_longest_run() {
        let trace = [[5u32, 5], [5, 5], [9, 1], [5, 5], [5, 5], [5, 5], [8, 2]];
        assert_eq!(census_window(trace.iter().map(|c| &c[..]), 0.3, 10, 2).window, 3);
    }

    #[test]
    fn default_budget_is_capped() {
        assert_eq!(Complexity::Quadratic.default_budget(100), 500_000);
        assert_eq!(Complexity::Cubic.default_budget(10_000), MAX_STEP_CAP);
    }
}
