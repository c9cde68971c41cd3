use netcon::report::{build_report, write_results};
use netcon::results::{read_csv_file, ResultRow};
use netcon::stats::{census_window, fit_exponent, wilson_interval, CensusWindow};
use netcon::Complexity;
use proptest::prelude::*;

fn row(scheduler: &str, n: usize, rep: usize, total: u64, converged: bool) -> ResultRow {
    ResultRow {
        protocol: "fast-global-line".into(),
        scheduler: scheduler.into(),
        detector: "line".into(),
        n,
        rep,
        seed: rep as u64,
        b: None,
        converged,
        total,
        effective: total / 2,
        r0: None,
        r1: None,
        census_window: None,
    }
}

#[test]
fn exact_power_law_is_recovered() {
    let samples: Vec<(usize, Vec<f64>)> =
        [10usize, 20, 40, 80].iter().map(|&n| (n, vec![2.0 * (n as f64).powi(3); 5])).collect();
    let fit = fit_exponent(&samples).unwrap();
    assert!((fit.alpha - 3.0).abs() < 1e-9);
    assert!((fit.intercept - 2f64.ln()).abs() < 1e-9);
    assert!((fit.r2 - 1.0).abs() < 1e-9);
    assert!(fit_exponent(&samples[..2]).is_err());
}

#[test]
fn csv_round_trip_preserves_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = Vec::new();
    for (i, &n) in [10usize, 20, 40].iter().enumerate() {
        for rep in 0..6 {
            rows.push(row("random", n, rep, (n * n * n) as u64 + rep as u64 * 7 + i as u64, rep != 5));
            rows.push(row("history", n, rep, 3 * (n * n * n) as u64 + rep as u64, true));
        }
    }
    let report = build_report(&rows, Complexity::Cubic);
    let (csv, _) = write_results(&rows, &report, dir.path()).unwrap();
    let back = read_csv_file(&csv).unwrap();
    assert_eq!(back, rows);
    assert_eq!(build_report(&back, Complexity::Cubic), report);

    // hand-computed oracle for one cell: non-converged runs are excluded
    let cell = report.coefficients.cell("random", 20).unwrap();
    let totals: Vec<f64> = (0..5).map(|rep| (8000 + rep * 7 + 1) as f64).collect();
    let mean = totals.iter().sum::<f64>() / 5.0;
    assert_eq!((cell.runs, cell.converged, cell.excluded), (6, 5, 1));
    assert!((cell.coefficient.unwrap() - mean / 8000.0).abs() < 1e-12);
    let var = totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / 4.0;
    assert!((cell.std.unwrap() - var.sqrt()).abs() < 1e-9);
    assert!((report.coefficients.fit("history").unwrap().alpha - 3.0).abs() < 1e-3);
}

#[test]
fn counting_rates_in_report() {
    let mut rows = Vec::new();
    for rep in 0..10 {
        let mut r = row("random", 100, rep, 1000, rep != 0);
        r.protocol = "counting-upper-bound".into();
        r.b = Some(2);
        r.r0 = Some(if rep < 3 { 40 } else { 95 });
        r.r1 = r.r0;
        rows.push(r);
    }
    let report = build_report(&rows, Complexity::QuadraticLog);
    let s = &report.counting[0];
    // rep 0 never halted, reps 1 and 2 halted low
    assert_eq!(s.rates[0].successes, 7);
    assert_eq!(s.rates[0].halted, 9);
    let (lo, hi) = wilson_interval(7, 10, 1.96);
    assert_eq!((s.rates[0].wilson_low, s.rates[0].wilson_high), (lo, hi));
    assert!(lo < 0.7 && 0.7 < hi);
}

#[test]
fn constant_census_window_spans_the_run() {
    let census = [5u32, 5, 5, 5];
    let trace = vec![&census[..]; 1000];
    let rep = census_window(trace, 0.2, 20, 4);
    assert_eq!(rep.window, 1000);
    assert_eq!(rep.total_interactions, 1000);
    assert!(rep.warning.is_none());
    assert!(census_window(vec![&census[..]; 3], 0.3, 20, 4).warning.is_some());
}

proptest! {
    #[test]
    fn census_window_is_monotone_in_alpha(
        trace in prop::collection::vec(prop::collection::vec(0u32..20, 3), 0..300),
        a in 0.0f64..0.4,
        b in 0.0f64..0.4,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut wl = CensusWindow::new(lo, 20);
        let mut wh = CensusWindow::new(hi, 20);
        for c in &trace {
            wl.push(c);
            wh.push(c);
        }
        prop_assert!(wl.longest() >= wh.longest());
        prop_assert!(wl.longest() <= trace.len() as u64);
    }
}
