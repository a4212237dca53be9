use chrono::NaiveDate;
use dte_core::events::{forward_return, regret_table, vix_quintiles, RegretSpec, Trough};
use dte_core::ingest::{ingest_reader, CsvFormat};
use dte_core::portfolio::{
    benchmark_7030, constraint_spectrum, default_caps, simulate_overlay, OverlayPolicy,
    SpectrumInputs,
};
use dte_core::regime::{classify, RegimeThresholds};
use dte_core::rolling::{
    moving_average, rolling_avg_pairwise_corr, rolling_corr, rolling_vol, WindowSpec,
};
use dte_core::series::{compound, returns_from_prices};
use dte_core::stats::{mean, pearson, sample_std};
use dte_core::{AssetPanel, Series, TradingCalendar, Unit};
use proptest::prelude::*;

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 1, 4).unwrap()
}

fn series(v: Vec<f64>, unit: Unit) -> Series {
    Series::new(
        TradingCalendar::weekdays_from(start(), v.len()).unwrap(),
        v,
        unit,
    )
    .unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a.is_nan() && b.is_nan()) || (a - b).abs() <= tol
}

fn returns_strategy(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.05f64..0.05, min..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prices_returns_round_trip(r in returns_strategy(2, 400), p0 in 1.0f64..500.0) {
        let wealth = compound(&r, p0);
        let prices = series(wealth.clone(), Unit::Price);
        let back = returns_from_prices(&prices).unwrap();
        let rebuilt = compound(back.values(), p0);
        for (a, b) in rebuilt.iter().zip(&wealth) {
            prop_assert!(((a - b) / b).abs() < 1e-10);
        }
    }

    #[test]
    fn rolling_ops_match_brute_force(r in returns_strategy(30, 200), q in returns_strategy(30, 200), len in 2usize..25) {
        let n = r.len().min(q.len());
        let (a, b) = (series(r[..n].to_vec(), Unit::SimpleReturn), series(q[..n].to_vec(), Unit::SimpleReturn));
        let w = WindowSpec::new(len).unwrap();
        let ma = moving_average(&a, w).unwrap();
        let vol = rolling_vol(&a, w).unwrap();
        let corr = rolling_corr(&a, &b, w).unwrap();
        prop_assert_eq!(ma.len(), n - len + 1);
        prop_assert_eq!(ma.dates(), &a.dates()[len - 1..]);
        for k in 0..ma.len() {
            let win = &r[k..k + len];
            let m = win.iter().sum::<f64>() / len as f64;
            let sd = (win.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (len - 1) as f64).sqrt();
            prop_assert!(close(ma.values()[k], m, 1e-12));
            prop_assert!(close(vol.values()[k], sd * 252f64.sqrt(), 1e-12));
            let expect = pearson(win, &q[k..k + len]).unwrap_or(f64::NAN);
            prop_assert!(close(corr.values()[k], expect, 1e-12));
        }
    }

    #[test]
    fn pairwise_correlation_is_mean_of_pairs(cols in prop::collection::vec(returns_strategy(40, 41), 2..5), len in 3usize..20) {
        let named: Vec<(String, Series)> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("S{i}"), series(c.clone(), Unit::SimpleReturn)))
            .collect();
        let panel = AssetPanel::from_series(named).unwrap();
        let avg = rolling_avg_pairwise_corr(&panel, WindowSpec::new(len).unwrap()).unwrap();
        for k in 0..avg.len() {
            let mut vals = Vec::new();
            for i in 0..cols.len() {
                for j in i + 1..cols.len() {
                    if let Some(c) = pearson(&cols[i][k..k + len], &cols[j][k..k + len]) {
                        vals.push(c);
                    }
                }
            }
            prop_assert!(close(avg.values()[k], mean(&vals), 1e-12));
        }
    }

    #[test]
    fn ingest_is_insensitive_to_column_order(v in prop::collection::vec((1.0f64..100.0, 1.0f64..100.0, 1.0f64..100.0), 1..30)) {
        let cal = TradingCalendar::weekdays_from(start(), v.len()).unwrap();
        let mut ab = String::from("date,A,B,C\n");
        let mut ca = String::from("date,C,A,B\n");
        for (d, (a, b, c)) in cal.dates().iter().zip(&v) {
            ab.push_str(&format!("{d},{a},{b},{c}\n"));
            ca.push_str(&format!("{d},{c},{a},{b}\n"));
        }
        let x = ingest_reader(ab.as_bytes(), &CsvFormat::default()).unwrap();
        let y = ingest_reader(ca.as_bytes(), &CsvFormat::default()).unwrap();
        for s in ["A", "B", "C"] {
            prop_assert_eq!(x.panel.get(s), y.panel.get(s));
        }
    }

    #[test]
    fn quintiles_partition_the_sample(v in prop::collection::vec(5.0f64..80.0, 5..300)) {
        let q = vix_quintiles(&series(v.clone(), Unit::Level)).unwrap();
        let counts = q.counts();
        prop_assert_eq!(counts.iter().sum::<usize>(), v.len());
        prop_assert!(q.boundaries.windows(2).all(|w| w[0] <= w[1]));
        let distinct = { let mut s = v.clone(); s.sort_by(f64::total_cmp); s.dedup(); s.len() };
        if distinct == v.len() {
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            prop_assert!(hi - lo <= 1 + v.len() % 5);
        }
    }

    #[test]
    fn forward_return_composes_daily_returns(r in returns_strategy(30, 300), h in 1usize..29) {
        let prices = series(compound(&r, 100.0), Unit::Price);
        let daily = returns_from_prices(&prices).unwrap();
        let f = forward_return(&prices, h).unwrap();
        for t in 0..f.len() {
            let c = daily.values()[t..t + h].iter().fold(1.0, |a, x| a * (1.0 + x)) - 1.0;
            prop_assert!((f.values()[t] - c).abs() < 1e-12);
        }
    }

    #[test]
    fn regret_is_antisymmetric(eq in returns_strategy(120, 121), bd in returns_strategy(120, 121), w1 in 0.0f64..1.0, w2 in 0.0f64..1.0) {
        let (e, b) = (series(eq, Unit::SimpleReturn), series(bd, Unit::SimpleReturn));
        let t = Trough { crisis: "x".into(), date: e.dates()[5], max_drawdown: 0.1, vix: None };
        let a = regret_table(&e, &b, std::slice::from_ref(&t), &[21, 63], RegretSpec { stay_eq: w1, derisk_eq: w2 }).unwrap();
        let s = regret_table(&e, &b, std::slice::from_ref(&t), &[21, 63], RegretSpec { stay_eq: w2, derisk_eq: w1 }).unwrap();
        for (x, y) in a[0].rows.iter().zip(&s[0].rows) {
            prop_assert_eq!(x.regret_pp, -y.regret_pp);
        }
    }
}

struct Fixture {
    eq: Series,
    bd: Series,
    spread: Series,
    vix: Series,
}

fn fixture(seed: u64, n: usize) -> Fixture {
    use dte_core::synth::{synth_regime_panel, SynthParams, BENCH_BD, BENCH_EQ, SPREAD, VIX};
    let p = synth_regime_panel(&SynthParams {
        horizon_days: n,
        seed,
        ..Default::default()
    })
    .unwrap()
    .panel;
    let get = |s: &str| p.get(s).unwrap().clone();
    Fixture {
        eq: get(BENCH_EQ),
        bd: get(BENCH_BD),
        spread: get(SPREAD),
        vix: get(VIX),
    }
}

fn truncate(s: &Series, n: usize) -> Series {
    s.slice(0..n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn overlay_has_no_look_ahead(seed in 0u64..1000, cut in 100usize..1400) {
        let f = fixture(seed, 1500);
        let w = WindowSpec::new(63).unwrap();
        let run = |f: &Fixture| {
            let bench = benchmark_7030(&f.eq, &f.bd).unwrap();
            let regimes = classify(&f.vix, WindowSpec::new(21).unwrap(), RegimeThresholds::default()).unwrap();
            [OverlayPolicy::static_te(0.02), OverlayPolicy::dynamic().with_ceiling(0.03)]
                .map(|p| simulate_overlay(&bench, &f.spread, &regimes, &p, w).unwrap())
        };
        let full = run(&f);
        let cut_f = Fixture {
            eq: truncate(&f.eq, cut),
            bd: truncate(&f.bd, cut),
            spread: truncate(&f.spread, cut),
            vix: truncate(&f.vix, cut),
        };
        let part = run(&cut_f);
        for (a, b) in full.iter().zip(&part) {
            let m = b.len();
            prop_assert_eq!(&a.portfolio.values()[..m], b.portfolio.values());
            prop_assert_eq!(&a.theta[..m], &b.theta[..]);
            prop_assert_eq!(&a.benchmark.values()[..m], b.benchmark.values());
            if let Some(tb) = &b.realized_te {
                let ta = a.realized_te.as_ref().unwrap();
                prop_assert_eq!(&ta.values()[..tb.len()], tb.values());
            }
        }
    }

    #[test]
    fn spectrum_bounds_and_monotone_targets(seed in 0u64..1000) {
        let f = fixture(seed, 2000);
        let bench = benchmark_7030(&f.eq, &f.bd).unwrap();
        let regimes = classify(&f.vix, WindowSpec::new(21).unwrap(), RegimeThresholds::default()).unwrap();
        let policy = OverlayPolicy::dynamic();
        let inputs = SpectrumInputs { benchmark: &bench, spread: &f.spread, regimes: &regimes, policy: &policy, vol_window: WindowSpec::new(63).unwrap() };
        let caps = default_caps(11);
        let runs = constraint_spectrum(&inputs, &caps).unwrap();
        let uncapped = simulate_overlay(&bench, &f.spread, &regimes, &policy, WindowSpec::new(63).unwrap()).unwrap();
        for pair in runs.windows(2) {
            for (lo, hi) in pair[0].targets.iter().zip(&pair[1].targets) {
                prop_assert!(lo <= hi);
            }
        }
        for run in &runs {
            prop_assert!(run.theta.iter().all(|t| t.abs() <= policy.theta_cap));
            for (c, u) in run.targets.iter().zip(&uncapped.targets) {
                prop_assert!(c <= u);
            }
            let diff: Vec<f64> = run.portfolio.values().iter().zip(run.benchmark.values()).map(|(p, b)| p - b).collect();
            for ((d, t), s) in diff.iter().zip(&run.theta).zip(f.spread.starting_at(run.calendar().first()).unwrap().values()) {
                prop_assert!((d - t * s).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn dynamic_te_is_more_volatile_than_static() {
    for seed in 0..5 {
        let f = fixture(seed, 5000);
        let bench = benchmark_7030(&f.eq, &f.bd).unwrap();
        let regimes = classify(
            &f.vix,
            WindowSpec::new(21).unwrap(),
            RegimeThresholds::default(),
        )
        .unwrap();
        let w = WindowSpec::new(63).unwrap();
        let te_sigma = |p: OverlayPolicy| {
            let sim = simulate_overlay(&bench, &f.spread, &regimes, &p, w).unwrap();
            let te: Vec<f64> = sim.realized_te.unwrap().valid().map(|(_, v)| v).collect();
            sample_std(&te).unwrap()
        };
        assert!(te_sigma(OverlayPolicy::dynamic()) > te_sigma(OverlayPolicy::static_te(0.02)));
    }
}
