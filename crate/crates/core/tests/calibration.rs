use chrono::NaiveDate;
use dte_core::events::{omega_table, vol_surprise_regression, DEFAULT_HORIZONS, SURPRISE_HORIZON};
use dte_core::regime::{fit_markov_switching, smoothed_high_prob, weekly_returns};
use dte_core::rolling::WindowSpec;
use dte_core::synth::{synth_regime_panel, HiddenState, SynthParams, BENCH_EQ};
use dte_core::{Execution, Series, TradingCalendar, Unit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const SEEDS: usize = 1000;
const DAYS: usize = 5000;

fn calendar(n: usize) -> TradingCalendar {
    TradingCalendar::weekdays_from(NaiveDate::from_ymd_opt(1990, 1, 2).unwrap(), n).unwrap()
}

fn gaussian_prices(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut p = 100.0;
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            p *= 1.0 + 0.0003 + 0.01 * z;
            p
        })
        .collect()
}

fn gaussian_level(rng: &mut ChaCha8Rng, n: usize, centre: f64, sd: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            centre + sd * z
        })
        .collect()
}

/// Share of seeds, per horizon, whose omega t-statistic lies inside +-2.
fn omega_size() -> Vec<f64> {
    let cal = calendar(DAYS);
    let hits = Execution::default().map_indices(SEEDS, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let prices =
            Series::new(cal.clone(), gaussian_prices(&mut rng, DAYS), Unit::Price).unwrap();
        let vix = Series::new(
            cal.clone(),
            gaussian_level(&mut rng, DAYS, 20.0, 6.0),
            Unit::Level,
        )
        .unwrap();
        let rep = omega_table(&vix, &prices, &DEFAULT_HORIZONS).unwrap();
        rep.rows
            .iter()
            .map(|r| r.nw_t.abs() < 2.0)
            .collect::<Vec<_>>()
    });
    (0..DEFAULT_HORIZONS.len())
        .map(|k| hits.iter().filter(|h| h[k]).count() as f64 / SEEDS as f64)
        .collect()
}

#[test]
fn omega_nw_test_controls_size() {
    let size = omega_size();
    eprintln!("omega |t|<2 share by horizon {DEFAULT_HORIZONS:?}: {size:?}");
    assert!(size.iter().all(|s| *s >= 0.93), "{size:?}");
}

#[test]
fn omega_spread_within_two_se_for_most_seeds() {
    let size = omega_size();
    assert!(size.iter().all(|s| *s >= 0.95), "{size:?}");
}

#[test]
fn vol_surprise_t_stats_within_two_under_independence() {
    let cal = calendar(DAYS);
    let hits = Execution::default().map_indices(SEEDS, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed as u64);
        let prices =
            Series::new(cal.clone(), gaussian_prices(&mut rng, DAYS), Unit::Price).unwrap();
        let iv = Series::new(
            cal.clone(),
            gaussian_level(&mut rng, DAYS, 16.0, 2.0),
            Unit::Level,
        )
        .unwrap();
        let fit = vol_surprise_regression(&prices, &iv, WindowSpec::new(SURPRISE_HORIZON).unwrap())
            .unwrap();
        fit.fit.t[1].abs() < 2.0 && fit.fit.t[2].abs() < 2.0
    });
    let share = hits.iter().filter(|h| **h).count() as f64 / SEEDS as f64;
    eprintln!("vol-surprise share of seeds with both |t|<2: {share}");
    assert!(share >= 0.95, "{share}");
}

#[test]
fn markov_switching_recovers_planted_states() {
    for seed in 0..3 {
        let params = SynthParams {
            transition: [[0.998, 0.002], [0.006, 0.994]],
            eq_drift: [0.12, -0.20],
            eq_vol: [0.10, 0.40],
            horizon_days: 30 * 252,
            seed,
            ..Default::default()
        };
        let synth = synth_regime_panel(&params).unwrap();
        let daily = synth.panel.get(BENCH_EQ).unwrap();
        let weekly = weekly_returns(daily).unwrap();
        let fit = fit_markov_switching(&weekly, 20, 1e-8, 1000).unwrap();
        for trace in &fit.traces {
            assert!(trace
                .windows(2)
                .all(|w| w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0)));
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
        let concordance = agree as f64 / prob.len() as f64;
        assert!(concordance >= 0.9, "seed {seed}: {concordance}");
        assert!(fit.model.variances[1] > fit.model.variances[0]);
    }
}
