//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero when any criterion fails.
//!
//! Criteria 1-8 run on synthetic data. Criteria 9-13 need a files-mode run
//! config named by `DTE_DATA_CONFIG` and are skipped without it.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use chrono::NaiveDate;
use dte_cli::exhibits::{regret_reports, spectrum, sweep_report, troughs};
use dte_cli::study::main_run;
use dte_cli::{Dataset, RunConfig};
use dte_core::events::omega_table;
use dte_core::inference::{
    circular_block_bootstrap, newey_west_mean_test, sharpe_equality_test, BootstrapSpec, Statistic,
};
use dte_core::model::{
    brute_force_optimum, compound_active_return, jensen_advantage, optimal_theta, theta_grid,
    RegimeParams,
};
use dte_core::portfolio::{constraint_spectrum, SimResult, SpectrumInputs};
use dte_core::regime::{fit_markov_switching_with, smoothed_high_prob, weekly_returns, MsOptions};
use dte_core::rolling::{
    moving_average, rolling_avg_pairwise_corr, rolling_corr, rolling_vol, WindowSpec,
};
use dte_core::synth::{synth_regime_panel, HiddenState, SynthParams, BENCH_EQ};
use dte_core::{AssetPanel, Execution, Series, TradingCalendar, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Outcome);
type DataCriterion = (u8, &'static str, fn(&DataRun) -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bits_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn calendar(n: usize) -> TradingCalendar {
    TradingCalendar::weekdays_from(NaiveDate::from_ymd_opt(1990, 1, 2).unwrap(), n).unwrap()
}

// ---------------------------------------------------------------------------
// 1-2: closed forms

fn c1_proposition_oracle() -> Outcome {
    const DRAWS: usize = 10_000;
    const STEP: f64 = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws: Vec<(f64, f64)> = (0..DRAWS)
        .map(|_| (rng.random_range(-0.15..0.15), rng.random_range(0.05..0.40)))
        .collect();
    let results = Execution::default().map_slice(&draws, |&(alpha, sigma)| {
        let star = optimal_theta(alpha, sigma).unwrap();
        let grid = theta_grid(alpha, sigma, STEP).unwrap();
        let best = brute_force_optimum(alpha, sigma, &grid).unwrap();
        let identity =
            (compound_active_return(star, alpha, sigma) - 0.5 * (alpha / sigma).powi(2)).abs();
        ((best - star).abs(), identity)
    });
    let worst_grid = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let worst_identity = results.iter().map(|r| r.1).fold(0.0, f64::max);
    check(
        worst_grid <= STEP && worst_identity <= 1e-12,
        format!("{DRAWS} draws, max |argmax - a/s^2| = {worst_grid:.2e} (step {STEP:e}), max identity error {worst_identity:.2e}"),
    )
}

fn c2_jensen_advantage() -> Outcome {
    const DRAWS: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut negative = 0;
    let mut moment_gap = 0.0f64;
    for _ in 0..DRAWS {
        let alpha = [rng.random_range(-0.10..0.20), rng.random_range(-0.10..0.20)];
        let sigma = [rng.random_range(0.02..0.40), rng.random_range(0.02..0.40)];
        let params = RegimeParams::new(alpha, sigma, rng.random_range(0.0..=1.0)).unwrap();
        let d = jensen_advantage(&params);
        if d < 0.0 {
            negative += 1;
        }
        let [l, h] = params.ir();
        let p = params.p;
        let moments = 0.5 * ((1.0 - p) * l * l + p * h * h - ((1.0 - p) * l + p * h).powi(2));
        moment_gap = moment_gap.max((moments - d).abs());
    }
    let mut nonzero = 0;
    for _ in 0..DRAWS {
        let a = rng.random_range(-0.10..0.20);
        let s = rng.random_range(0.02..0.40);
        // a power-of-two scale keeps alpha / sigma bit-identical across states
        let k = 2f64.powi(rng.random_range(-3..=3));
        let p = rng.random_range(0.0..=1.0);
        let equal_ir = RegimeParams::new([a, k * a], [s, k * s], p).unwrap();
        let other = [rng.random_range(-0.10..0.20), rng.random_range(0.02..0.40)];
        let p0 = RegimeParams::new([a, other[0]], [s, other[1]], 0.0).unwrap();
        let p1 = RegimeParams::new([a, other[0]], [s, other[1]], 1.0).unwrap();
        nonzero += [equal_ir, p0, p1]
            .iter()
            .filter(|q| jensen_advantage(q) != 0.0)
            .count();
    }
    check(
        negative == 0 && nonzero == 0 && moment_gap < 1e-12,
        format!(
            "{DRAWS} draws: {negative} negative; {nonzero} non-zero of {} boundary cases; max gap to moment form {moment_gap:.1e}",
            3 * DRAWS
        ),
    )
}

// ---------------------------------------------------------------------------
// 3-4: end-to-end synthetic panels

const PANEL_SEEDS: u64 = 20;
const EXTRA_CAPS: [f64; 4] = [0.06, 0.08, 0.10, 0.15];

struct PanelResult {
    seed: u64,
    cagr_static: f64,
    cagr_dynamic: f64,
    te_sigma_static: f64,
    te_sigma_dynamic: f64,
    /// (cap, te_sigma, sharpe, ci width, identical to uncapped) over the cap spectrum.
    caps: Vec<(f64, f64, f64, f64, bool)>,
    extra_identical: bool,
}

fn panel(seed: u64) -> PanelResult {
    let cfg = RunConfig {
        seed,
        ..Default::default()
    };
    let ds = Dataset::load(&cfg).unwrap();
    let run = main_run(&ds, &cfg).unwrap();
    let perf = run.performance(&ds.rf).unwrap();
    let rows = spectrum(&ds, &run, &cfg).unwrap();
    let uncapped = rows.last().unwrap().sim.portfolio.values().to_vec();
    let caps = rows
        .iter()
        .filter_map(|r| {
            r.cap.map(|c| {
                (
                    c,
                    r.report.te_sigma.unwrap(),
                    r.report.sharpe,
                    r.ci.width(),
                    bits_eq(r.sim.portfolio.values(), &uncapped),
                )
            })
        })
        .collect();
    let inputs = SpectrumInputs {
        benchmark: &run.benchmark,
        spread: &ds.spread,
        regimes: &run.regimes,
        policy: &run.dynamic_policy,
        vol_window: run.vol_window,
    };
    let start = rows.last().unwrap().sim.calendar().first();
    let extra_identical = constraint_spectrum(&inputs, &EXTRA_CAPS)
        .unwrap()
        .iter()
        .all(|s| bits_eq(s.starting_at(start).unwrap().portfolio.values(), &uncapped));
    PanelResult {
        seed,
        cagr_static: perf[1].cagr,
        cagr_dynamic: perf[2].cagr,
        te_sigma_static: perf[1].te_sigma.unwrap(),
        te_sigma_dynamic: perf[2].te_sigma.unwrap(),
        caps,
        extra_identical,
    }
}

fn panels() -> &'static [PanelResult] {
    static PANELS: OnceLock<Vec<PanelResult>> = OnceLock::new();
    PANELS.get_or_init(|| (0..PANEL_SEEDS).map(|s| panel(1000 + s)).collect())
}

fn c3_dynamic_beats_static() -> Outcome {
    let p = SynthParams::default();
    let ir = [
        p.spread_alpha[0] / p.spread_sigma[0],
        p.spread_alpha[1] / p.spread_sigma[1],
    ];
    if (ir[1] - 2.0 * ir[0]).abs() > 1e-12 || p.horizon_days != 12_600 {
        return Err(format!(
            "synthetic defaults are not a 50-year IR(H)=2 IR(L) panel: {ir:?}"
        ));
    }
    let ps = panels();
    let n = ps.len() as f64;
    let mean_static = ps.iter().map(|r| r.cagr_static).sum::<f64>() / n;
    let mean_dynamic = ps.iter().map(|r| r.cagr_dynamic).sum::<f64>() / n;
    let ratios: Vec<f64> = ps
        .iter()
        .map(|r| r.te_sigma_dynamic / r.te_sigma_static)
        .collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let low: Vec<u64> = ps
        .iter()
        .zip(&ratios)
        .filter(|(_, q)| **q <= 2.0)
        .map(|(r, _)| r.seed)
        .collect();
    check(
        mean_dynamic > mean_static && low.is_empty(),
        format!(
            "{} seeds: mean CAGR dynamic {:.3}% vs static {:.3}%; min sigma(TE) ratio {min_ratio:.2}; seeds at or below 2x: {low:?}",
            ps.len(),
            100.0 * mean_dynamic,
            100.0 * mean_static
        ),
    )
}

fn c4_convergence_shape() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for r in panels() {
        let te: Vec<f64> = r.caps.iter().map(|c| c.1).collect();
        if !te.windows(2).all(|w| w[1] >= w[0]) {
            failures.push(format!("seed {}: sigma(TE) not monotone", r.seed));
        }
        if !r.caps.iter().filter(|c| c.0 >= 0.05).all(|c| c.4) || !r.extra_identical {
            failures.push(format!(
                "seed {}: a cap >= 5% differs from the uncapped path",
                r.seed
            ));
        }
        let sharpe = r.caps.iter().map(|c| c.2);
        let range =
            sharpe.clone().fold(f64::NEG_INFINITY, f64::max) - sharpe.fold(f64::INFINITY, f64::min);
        let narrowest = r.caps.iter().map(|c| c.3).fold(f64::INFINITY, f64::min);
        worst_margin = worst_margin.min(narrowest - range);
        if range >= narrowest {
            failures.push(format!(
                "seed {}: Sharpe range {range:.4} >= narrowest CI {narrowest:.4}",
                r.seed
            ));
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{} seeds x {} caps; min (narrowest CI - Sharpe range) {worst_margin:.4}{}",
            panels().len(),
            panels()[0].caps.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    )
}

// ---------------------------------------------------------------------------
// 5: rolling statistics against direct recomputation

fn brute_mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn brute_std(x: &[f64]) -> f64 {
    let m = brute_mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

fn brute_corr(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (brute_mean(x), brute_mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

fn c5_rolling_equivalence() -> Outcome {
    const FIXTURES: usize = 1000;
    const TOL: f64 = 1e-12;
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for f in 0..FIXTURES {
        let mut rng = ChaCha8Rng::seed_from_u64(50_000 + f as u64);
        let n = rng.random_range(3..300);
        let w = rng.random_range(2..=n.min(80));
        let k = rng.random_range(2..6);
        let cal = calendar(n);
        let cols: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| 0.01 * normal(&mut rng)).collect())
            .collect();
        let level: Vec<f64> = (0..n).map(|_| 20.0 + 5.0 * normal(&mut rng)).collect();
        let spec = WindowSpec::new(w).unwrap();
        let ret = |v: &Vec<f64>| Series::new(cal.clone(), v.clone(), Unit::SimpleReturn).unwrap();
        let (a, b) = (ret(&cols[0]), ret(&cols[1]));
        let panel =
            AssetPanel::from_series((0..k).map(|j| (format!("s{j}"), ret(&cols[j]))).collect())
                .unwrap();

        let ma = moving_average(
            &Series::new(cal.clone(), level.clone(), Unit::Level).unwrap(),
            spec,
        )
        .unwrap();
        let vol = rolling_vol(&a, spec).unwrap();
        let corr = rolling_corr(&a, &b, spec).unwrap();
        let pair = rolling_avg_pairwise_corr(&panel, spec).unwrap();
        let mut err = 0.0f64;
        let mut misaligned = [&ma, &vol, &corr, &pair]
            .iter()
            .any(|s| s.len() != n - w + 1 || s.dates()[0] != cal.dates()[w - 1]);
        for i in w - 1..n {
            let r = i + 1 - w..i + 1;
            let expect = [
                brute_mean(&level[r.clone()]),
                brute_std(&cols[0][r.clone()]) * 252f64.sqrt(),
                brute_corr(&cols[0][r.clone()], &cols[1][r.clone()]),
                {
                    let mut s = 0.0;
                    let mut c = 0;
                    for p in 0..k {
                        for q in p + 1..k {
                            s += brute_corr(&cols[p][r.clone()], &cols[q][r.clone()]);
                            c += 1;
                        }
                    }
                    s / c as f64
                },
            ];
            let got = [&ma, &vol, &corr, &pair].map(|s| s.values()[i + 1 - w]);
            for (g, e) in got.iter().zip(expect) {
                if !(g.is_finite() && e.is_finite()) {
                    misaligned |= g.is_finite() != e.is_finite();
                    continue;
                }
                err = err.max((g - e).abs());
            }
        }
        worst = worst.max(err);
        if err > TOL || misaligned {
            bad.push(f);
        }
    }
    check(
        bad.is_empty(),
        format!("{FIXTURES} fixtures x 4 operations, max abs error {worst:.2e}; failing fixtures {bad:?}"),
    )
}

// ---------------------------------------------------------------------------
// 6: inference calibration

fn nw_size() -> (bool, String) {
    const SEEDS: usize = 1000;
    let inside = Execution::default().map_indices(SEEDS, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(60_000 + s as u64);
        let x: Vec<f64> = (0..5000).map(|_| normal(&mut rng)).collect();
        newey_west_mean_test(&x, 21).unwrap().t.abs() < 2.0
    });
    let share = inside.iter().filter(|b| **b).count() as f64 / SEEDS as f64;
    (
        share >= 0.93,
        format!("NW |t|<2 in {:.1}% of {SEEDS} seeds", 100.0 * share),
    )
}

fn bootstrap_coverage() -> (bool, String) {
    const TRIALS: usize = 500;
    const N: usize = 2520;
    let (vol, true_sharpe) = (0.01, 0.5);
    let mu = true_sharpe / 252f64.sqrt() * vol;
    let covered = Execution::default().map_indices(TRIALS, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(61_000 + t as u64);
        let x: Vec<f64> = (0..N).map(|_| mu + vol * normal(&mut rng)).collect();
        let spec = BootstrapSpec {
            seed: 62_000 + t as u64,
            ..Default::default()
        };
        let ci = circular_block_bootstrap(&x, &spec, &Statistic::Sharpe { rf: 0.0 }).unwrap();
        ci.ci_lo <= true_sharpe && true_sharpe <= ci.ci_hi
    });
    let share = covered.iter().filter(|b| **b).count() as f64 / TRIALS as f64;
    (
        (share - 0.95).abs() <= 0.03,
        format!(
            "bootstrap Sharpe CI coverage {:.1}% over {TRIALS} trials",
            100.0 * share
        ),
    )
}

/// Rejection rate at 5% for annualized Sharpe 0.2 versus 1.0 with return correlation `rho`.
fn jk_power(rho: f64, seeds: usize) -> f64 {
    let vol = 0.01;
    let (m1, m2) = (0.2 / 252f64.sqrt() * vol, 1.0 / 252f64.sqrt() * vol);
    let rejected = Execution::default().map_indices(seeds, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(63_000 + s as u64);
        let (mut a, mut b) = (Vec::with_capacity(5000), Vec::with_capacity(5000));
        for _ in 0..5000 {
            let (z1, z2) = (normal(&mut rng), normal(&mut rng));
            a.push(m1 + vol * z1);
            b.push(m2 + vol * (rho * z1 + (1.0 - rho * rho).sqrt() * z2));
        }
        sharpe_equality_test(&a, &b).unwrap().p < 0.05
    });
    rejected.iter().filter(|r| **r).count() as f64 / seeds as f64
}

fn c6_inference_calibration() -> Outcome {
    let (nw_ok, nw) = nw_size();
    let (boot_ok, boot) = bootstrap_coverage();
    let power = jk_power(0.5, 1000);
    let independent = jk_power(0.0, 1000);
    let mut rng = ChaCha8Rng::seed_from_u64(64_000);
    let x: Vec<f64> = (0..5000)
        .map(|_| 0.0004 + 0.01 * normal(&mut rng))
        .collect();
    let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
    let z = sharpe_equality_test(&x, &x2).unwrap().z;
    check(
        nw_ok && boot_ok && power >= 0.90 && z.abs() < 1e-8,
        format!(
            "{nw}; {boot}; JK power {:.1}% (rho 0.5, {:.1}% if independent); z(x, 2x) = {z:.1e}",
            100.0 * power,
            100.0 * independent
        ),
    )
}

// ---------------------------------------------------------------------------
// 7: Markov switching

fn c7_markov_switching() -> Outcome {
    const SEEDS: u64 = 10;
    let mut worst_drop = 0.0f64;
    let mut runs = 0;
    let mut concordances = Vec::new();
    for seed in 0..SEEDS {
        let params = SynthParams {
            transition: [[0.998, 0.002], [0.006, 0.994]],
            eq_drift: [0.12, -0.20],
            eq_vol: [0.10, 0.40],
            horizon_days: 30 * 252,
            seed: 700 + seed,
            ..Default::default()
        };
        let synth = synth_regime_panel(&params).unwrap();
        let daily = synth.panel.require(BENCH_EQ).unwrap();
        let weekly = weekly_returns(daily).unwrap();
        let fit = fit_markov_switching_with(
            &weekly,
            &MsOptions {
                seed: 71 + seed,
                ..Default::default()
            },
        )
        .unwrap();
        for trace in &fit.traces {
            runs += 1;
            for w in trace.windows(2) {
                worst_drop = worst_drop.max(w[0] - w[1]);
            }
        }
        let prob = smoothed_high_prob(&fit.model, &weekly).unwrap();
        let agree = prob
            .dates()
            .iter()
            .zip(prob.values())
            .filter(|(d, p)| {
                let i = daily.calendar().index_of(**d).unwrap();
                (synth.states[i] == HiddenState::High) == (**p > 0.5)
            })
            .count();
        concordances.push(agree as f64 / prob.len() as f64);
    }
    let min_conc = concordances.iter().copied().fold(f64::INFINITY, f64::min);
    check(
        worst_drop <= 0.0 && min_conc >= 0.90,
        format!(
            "{runs} EM runs over {SEEDS} seeds, largest log-likelihood decrease {worst_drop:.2e}; min concordance {:.1}%",
            100.0 * min_conc
        ),
    )
}

// ---------------------------------------------------------------------------
// 8: no look-ahead

fn series_prefix(full: &Series, part: &Series) -> bool {
    let n = part.len();
    n <= full.len()
        && full.dates()[..n] == *part.dates()
        && bits_eq(&full.values()[..n], part.values())
}

fn sim_prefix(full: &SimResult, part: &SimResult) -> bool {
    let n = part.len();
    let vec_prefix = |a: &[f64], b: &[f64]| b.len() == n && a.len() >= n && bits_eq(&a[..n], b);
    let te = match (&full.realized_te, &part.realized_te) {
        (Some(f), Some(p)) => series_prefix(f, p),
        (_, None) => true,
        (None, Some(_)) => false,
    };
    series_prefix(&full.portfolio, &part.portfolio)
        && series_prefix(&full.benchmark, &part.benchmark)
        && vec_prefix(&full.theta, &part.theta)
        && vec_prefix(&full.targets, &part.targets)
        && vec_prefix(&full.sizing_vol, &part.sizing_vol)
        && vec_prefix(&full.active, &part.active)
        && te
}

fn c8_no_look_ahead() -> Outcome {
    const CUTS: usize = 100;
    let cfg = RunConfig {
        seed: 8,
        ..Default::default()
    };
    let ds = Dataset::load(&cfg).unwrap();
    let run = main_run(&ds, &cfg).unwrap();
    let spectrum_of = |ds: &Dataset, run: &dte_cli::study::MainRun| {
        let inputs = SpectrumInputs {
            benchmark: &run.benchmark,
            spread: &ds.spread,
            regimes: &run.regimes,
            policy: &run.dynamic_policy,
            vol_window: run.vol_window,
        };
        constraint_spectrum(&inputs, &cfg.caps).unwrap()
    };
    let full_spectrum = spectrum_of(&ds, &run);
    let first = ds.calendar.index_of(run.start).unwrap() + 300;
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let mut broken = Vec::new();
    for _ in 0..CUTS {
        let t = ds.calendar.dates()[rng.random_range(first..ds.calendar.len() - 1)];
        let cut = RunConfig {
            end: Some(t),
            ..cfg.clone()
        };
        let ds_t = Dataset::load(&cut).unwrap();
        let run_t = main_run(&ds_t, &cut).unwrap();
        let regimes_ok = series_prefix(run.regimes.signal(), run_t.regimes.signal())
            && run.regimes.labels()[..run_t.regimes.labels().len()] == *run_t.regimes.labels();
        let ok = ds_t.calendar.last() == t
            && run_t.start == run.start
            && series_prefix(&run.smoothed_vix, &run_t.smoothed_vix)
            && regimes_ok
            && sim_prefix(&run.benchmark, &run_t.benchmark)
            && sim_prefix(&run.static_run, &run_t.static_run)
            && sim_prefix(&run.dynamic_run, &run_t.dynamic_run)
            && full_spectrum
                .iter()
                .zip(spectrum_of(&ds_t, &run_t))
                .all(|(f, p)| sim_prefix(f, &p));
        if !ok {
            broken.push(t);
        }
    }
    check(
        broken.is_empty(),
        format!("{CUTS} truncation dates; quantities changed at {broken:?}"),
    )
}

// ---------------------------------------------------------------------------
// 9-13: supplied data

struct DataRun {
    cfg: RunConfig,
    ds: Dataset,
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn c9_exhibit3(d: &DataRun) -> Outcome {
    let run = main_run(&d.ds, &d.cfg).map_err(|e| e.to_string())?;
    let perf = run.performance(&d.ds.rf).map_err(|e| e.to_string())?;
    let (s, y) = (&perf[1], &perf[2]);
    let pct = |v: Option<f64>| 100.0 * v.unwrap_or(f64::NAN);
    let vals = [
        100.0 * s.cagr,
        100.0 * y.cagr,
        pct(s.te_sigma),
        pct(y.te_sigma),
        pct(s.te_level),
        pct(y.te_level),
    ];
    let ok = within(vals[0], 9.80, 0.5)
        && within(vals[1], 10.33, 0.5)
        && within(vals[2], 0.50, 0.25)
        && within(vals[3], 1.51, 0.25)
        && within(vals[4], 2.08, 0.3)
        && within(vals[5], 2.65, 0.3);
    check(
        ok,
        format!(
            "CAGR static {:.2}% dynamic {:.2}%; sigma(TE) {:.2}% vs {:.2}%; mean TE {:.2}% vs {:.2}%",
            vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]
        ),
    )
}

fn c10_exhibit5(d: &DataRun) -> Outcome {
    let rep = omega_table(&d.ds.vix_full, &d.ds.eq_prices_full, &[21, 63, 126, 252])
        .map_err(|e| e.to_string())?;
    let spread: Vec<f64> = rep.rows.iter().map(|r| 100.0 * r.spread).collect();
    let t1 = rep.rows[0].nw_t;
    let ok = within(spread[0], 12.8, 3.0)
        && within(t1, 2.05, 0.5)
        && spread[1] > spread[2]
        && spread[2] > spread[3];
    check(
        ok,
        format!(
            "Q5-Q1 spread 1M {:.1}pp (NW t {t1:.2}), 3M {:.1}pp, 6M {:.1}pp, 12M {:.1}pp",
            spread[0], spread[1], spread[2], spread[3]
        ),
    )
}

fn c11_exhibit6b(d: &DataRun) -> Outcome {
    let run = main_run(&d.ds, &d.cfg).map_err(|e| e.to_string())?;
    let found = troughs(&d.ds, &run, &d.cfg).map_err(|e| e.to_string())?;
    let reports = regret_reports(&d.ds, &found, &d.cfg).map_err(|e| e.to_string())?;
    let targets = [("GFC", 25.4), ("COVID", 29.6), ("2022", 8.8)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (key, target) in targets {
        let value = reports
            .iter()
            .find(|r| r.trough.crisis.contains(key))
            .and_then(|r| r.rows.iter().find(|row| row.horizon == 252))
            .map(|row| row.regret_pp);
        match value {
            Some(v) => {
                ok &= within(v, target, 2.0);
                parts.push(format!("{key} 12M {v:.1}pp"));
            }
            None => {
                ok = false;
                parts.push(format!("{key} 12M missing"));
            }
        }
    }
    check(ok, parts.join(", "))
}

fn c12_exhibit7(d: &DataRun) -> Outcome {
    let run = main_run(&d.ds, &d.cfg).map_err(|e| e.to_string())?;
    let rows = spectrum(&d.ds, &run, &d.cfg).map_err(|e| e.to_string())?;
    let capped: Vec<_> = rows.iter().filter(|r| r.cap.is_some()).collect();
    let sharpe = capped.iter().map(|r| r.report.sharpe);
    let range =
        sharpe.clone().fold(f64::NEG_INFINITY, f64::max) - sharpe.fold(f64::INFINITY, f64::min);
    let te = capped.iter().map(|r| r.report.te_sigma.unwrap_or(f64::NAN));
    let (lo, hi) = (
        te.clone().fold(f64::INFINITY, f64::min),
        te.fold(f64::NEG_INFINITY, f64::max),
    );
    check(
        range <= 0.02 && hi / lo >= 8.0,
        format!(
            "{} caps: Sharpe range {range:.4}; sigma(TE) {:.2}%..{:.2}% (ratio {:.1})",
            capped.len(),
            100.0 * lo,
            100.0 * hi,
            hi / lo
        ),
    )
}

fn c13_sweep(d: &DataRun) -> Outcome {
    let rep = sweep_report(&d.ds, &d.cfg).map_err(|e| e.to_string())?;
    let positive = rep.rows.iter().all(|r| r.excess_cagr_bps > 0.0);
    let w21 = rep
        .rows
        .iter()
        .find(|r| r.window == 21)
        .map(|r| r.passes_both());
    let detail = rep
        .rows
        .iter()
        .map(|r| {
            format!(
                "{}d {:+.0}bps{}",
                r.window,
                r.excess_cagr_bps,
                if r.passes_both() { " (both)" } else { "" }
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    check(positive && w21 == Some(true), detail)
}

// ---------------------------------------------------------------------------

fn report(id: u8, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let secs = t0.elapsed().as_secs_f64();
    let (tag, detail, ok) = match outcome {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!("{tag} criterion {id:>2} {name}: {detail} [{secs:.1}s]");
    ok
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let mut failed = 0;
    let unconditional: [Criterion; 8] = [
        (1, "proposition oracle", c1_proposition_oracle),
        (2, "jensen advantage", c2_jensen_advantage),
        (
            3,
            "dynamic beats static on synthetic panels",
            c3_dynamic_beats_static,
        ),
        (4, "convergence shape", c4_convergence_shape),
        (5, "rolling-stat equivalence", c5_rolling_equivalence),
        (6, "inference calibration", c6_inference_calibration),
        (7, "markov-switching EM", c7_markov_switching),
        (8, "no look-ahead", c8_no_look_ahead),
    ];
    for (id, name, f) in unconditional {
        failed += usize::from(!report(id, name, f));
    }

    let conditional: [DataCriterion; 5] = [
        (9, "exhibit 3 on supplied data", c9_exhibit3),
        (10, "exhibit 5 on supplied data", c10_exhibit5),
        (11, "exhibit 6B on supplied data", c11_exhibit6b),
        (12, "exhibit 7 on supplied data", c12_exhibit7),
        (13, "window sweep on supplied data", c13_sweep),
    ];
    match std::env::var_os("DTE_DATA_CONFIG") {
        None => {
            for (id, name, _) in conditional {
                println!("SKIP criterion {id:>2} {name}: DTE_DATA_CONFIG is not set");
            }
        }
        Some(path) => {
            let loaded = RunConfig::load(std::path::Path::new(&path)).and_then(|cfg| {
                let ds = Dataset::load(&cfg)?;
                Ok(DataRun { cfg, ds })
            });
            match loaded {
                Ok(d) => {
                    for (id, name, f) in conditional {
                        failed += usize::from(!report(id, name, || f(&d)));
                    }
                }
                Err(e) => {
                    for (id, name, _) in conditional {
                        println!(
                            "FAIL criterion {id:>2} {name}: could not load {}: {e}",
                            path.to_string_lossy()
                        );
                        failed += 1;
                    }
                }
            }
        }
    }
    println!(
        "acceptance: {failed} failed, total {:.1}s",
        t0.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
