//! Exhibit tables and the auxiliary studies, each returned as artifacts.

use dte_core::events::{
    find_trough, omega_table, regret_csv, regret_table, vol_surprise_regression, window_sweep,
    RegretReport, RegretSpec, SweepInputs, SweepReport, Trough,
};
use dte_core::inference::{circular_block_bootstrap, BootstrapCi, Statistic};
use dte_core::metrics::{MetricsReport, RiskFree};
use dte_core::model::proposition_suite;
use dte_core::portfolio::{
    constraint_spectrum, rebalanced_mix, simulate_overlay, SimResult, SpectrumInputs,
};
use dte_core::regime::{
    fit_markov_switching_with, signal_agreement, smoothed_high_prob, weekly_returns, MsOptions,
};
use dte_core::rolling::{rolling_avg_pairwise_corr, rolling_corr, WindowSpec};
use dte_core::series::compound;
use dte_core::synth::{synth_regime_panel, HiddenState, SynthParams};
use dte_core::Series;

use crate::artifact::{cell, csv_table, line_chart, opt_cell, Artifact, Line};
use crate::config::{DataSource, RunConfig};
use crate::data::Dataset;
use crate::error::CliError;
use crate::study::{main_run, summarize, MainRun};

fn needs(what: &str, field: &str) -> CliError {
    CliError::Unavailable(format!("{what} needs `{field}` in the data configuration"))
}

/// Rolling average pairwise sector correlation with the VIX alongside.
pub fn exhibit1(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let sectors = ds
        .sectors
        .as_ref()
        .ok_or_else(|| needs("exhibit 1", "data.files.sectors"))?;
    let corr = rolling_avg_pairwise_corr(sectors, WindowSpec::new(cfg.windows.sector_corr)?)?;
    let vix: Vec<f64> = corr
        .dates()
        .iter()
        .map(|d| ds.vix_full.get(*d).unwrap_or(f64::NAN))
        .collect();
    let rows = corr
        .dates()
        .iter()
        .zip(corr.values())
        .zip(&vix)
        .map(|((d, c), v)| vec![d.to_string(), cell(*c), cell(*v)]);
    let table = Artifact::new(
        "exhibit1",
        csv_table(&["date", "avg_pairwise_corr", "vix"], rows),
    )
    .with_svg(line_chart(
        "Rolling average pairwise sector correlation",
        &[Line {
            name: "avg pairwise corr",
            dates: corr.dates(),
            values: corr.values(),
        }],
    ));
    let valid: Vec<(chrono::NaiveDate, f64)> = corr.valid().collect();
    let summary = if valid.is_empty() {
        csv_table::<String>(&["statistic", "value", "date"], Vec::new())
    } else {
        let mean = valid.iter().map(|p| p.1).sum::<f64>() / valid.len() as f64;
        let max = valid
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        let min = valid
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        csv_table(
            &["statistic", "value", "date"],
            vec![
                vec!["mean".to_string(), cell(mean), String::new()],
                vec!["max".to_string(), cell(max.1), max.0.to_string()],
                vec!["min".to_string(), cell(min.1), min.0.to_string()],
                vec![
                    "observations".to_string(),
                    valid.len().to_string(),
                    String::new(),
                ],
            ],
        )
    };
    Ok(vec![table, Artifact::new("exhibit1_summary", summary)])
}

/// Rolling stock-bond correlations against the bond leg and, when given, TLT.
pub fn exhibit2(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let w = WindowSpec::new(cfg.windows.stock_bond_corr)?;
    let bd = rolling_corr(&ds.eq, &ds.bd, w)?;
    let tlt = match &ds.tlt {
        Some(t) => {
            let cal = ds.eq.calendar().intersect(t.calendar())?;
            Some(rolling_corr(&ds.eq.align_to(&cal)?, &t.align_to(&cal)?, w)?)
        }
        None => None,
    };
    let rows = bd.dates().iter().zip(bd.values()).map(|(d, v)| {
        let t = tlt.as_ref().and_then(|s| s.get(*d)).unwrap_or(f64::NAN);
        vec![d.to_string(), cell(*v), cell(t)]
    });
    let mut lines = vec![Line {
        name: "equity vs bond",
        dates: bd.dates(),
        values: bd.values(),
    }];
    if let Some(t) = &tlt {
        lines.push(Line {
            name: "equity vs TLT",
            dates: t.dates(),
            values: t.values(),
        });
    }
    let table = Artifact::new(
        "exhibit2",
        csv_table(&["date", "corr_eq_bd", "corr_eq_tlt"], rows),
    )
    .with_svg(line_chart("Rolling stock-bond correlation", &lines));
    let mean = |s: &Series| {
        let v: Vec<f64> = s.valid().map(|p| p.1).collect();
        (v.iter().sum::<f64>() / v.len() as f64, v.len())
    };
    let mut summary = vec![{
        let (m, n) = mean(&bd);
        vec!["corr_eq_bd".to_string(), cell(m), n.to_string()]
    }];
    if let Some(t) = &tlt {
        let (m, n) = mean(t);
        summary.push(vec!["corr_eq_tlt".to_string(), cell(m), n.to_string()]);
    }
    Ok(vec![
        table,
        Artifact::new(
            "exhibit2_summary",
            csv_table(&["pair", "mean", "observations"], summary),
        ),
    ])
}

fn performance_csv(rows: &[(MetricsReport, Option<&SimResult>)]) -> String {
    let mut header: Vec<&str> = MetricsReport::COLUMNS.to_vec();
    header.extend(["turnover", "start", "end", "days"]);
    let body = rows.iter().map(|(r, sim)| {
        let mut row: Vec<String> = r.csv_row().split(',').map(str::to_string).collect();
        match sim {
            Some(s) => row.extend([
                s.policy
                    .as_ref()
                    .map(|_| cell(s.turnover))
                    .unwrap_or_default(),
                s.calendar().first().to_string(),
                s.calendar().last().to_string(),
                s.len().to_string(),
            ]),
            None => row.extend([String::new(), String::new(), String::new(), String::new()]),
        }
        row
    });
    csv_table(&header, body)
}

/// Benchmark, static-TE and dynamic-TE summary statistics.
pub fn exhibit3(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let run = main_run(ds, cfg)?;
    Ok(vec![exhibit3_from(&run, &ds.rf)?])
}

pub fn exhibit3_from(run: &MainRun, rf: &RiskFree) -> Result<Artifact, CliError> {
    let perf = run.performance(rf)?;
    let bench = run.benchmark.starting_at(run.start)?;
    let sims = [&bench, &run.static_run, &run.dynamic_run];
    let rows: Vec<(MetricsReport, Option<&SimResult>)> = perf
        .into_iter()
        .zip(sims)
        .map(|(r, s)| (r, Some(s)))
        .collect();
    Ok(Artifact::new("exhibit3", performance_csv(&rows)))
}

/// Realized tracking-error paths of the static and dynamic portfolios.
pub fn exhibit4(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let run = main_run(ds, cfg)?;
    let (Some(st), Some(dy)) = (&run.static_run.realized_te, &run.dynamic_run.realized_te) else {
        return Err(CliError::Unavailable(
            "sample too short for a realized tracking-error path".into(),
        ));
    };
    let vix: Vec<f64> = st
        .dates()
        .iter()
        .map(|d| run.smoothed_vix.get(*d).unwrap_or(f64::NAN))
        .collect();
    let rows = st.dates().iter().enumerate().map(|(i, d)| {
        vec![
            d.to_string(),
            cell(st.values()[i]),
            cell(dy.values()[i]),
            cell(vix[i]),
        ]
    });
    let table = Artifact::new(
        "exhibit4",
        csv_table(&["date", "te_static", "te_dynamic", "vix_smoothed"], rows),
    )
    .with_svg(line_chart(
        "Realized tracking error",
        &[
            Line {
                name: "static",
                dates: st.dates(),
                values: st.values(),
            },
            Line {
                name: "dynamic",
                dates: dy.dates(),
                values: dy.values(),
            },
        ],
    ));
    Ok(vec![table])
}

/// VIX-quintile forward returns, quintile boundaries, and the vol-surprise regression.
pub fn exhibit5(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let report = omega_table(&ds.vix_full, &ds.eq_prices_full, &cfg.horizons)?;
    let surprise = vol_surprise_regression(
        &ds.eq_prices_full,
        &ds.vix_full,
        WindowSpec::new(cfg.surprise_horizon)?,
    )?;
    Ok(vec![
        Artifact::new("exhibit5", report.to_csv()),
        Artifact::new("exhibit5_boundaries", report.boundaries_csv()),
        Artifact::new("exhibit5_surprise", surprise.to_csv()),
    ])
}

pub fn troughs(ds: &Dataset, run: &MainRun, cfg: &RunConfig) -> Result<Vec<Trough>, CliError> {
    cfg.crises
        .iter()
        .map(|c| Ok(find_trough(&run.benchmark, Some(&ds.vix), c)?))
        .collect()
}

pub fn regret_reports(
    ds: &Dataset,
    found: &[Trough],
    cfg: &RunConfig,
) -> Result<Vec<RegretReport>, CliError> {
    Ok(regret_table(
        &ds.eq,
        &ds.bd,
        found,
        &cfg.regret_horizons,
        RegretSpec::default(),
    )?)
}

/// Drawdown panel, regret table, and post-trough differential paths.
pub fn exhibit6(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let run = main_run(ds, cfg)?;
    let mut out = vec![exhibit6a(ds, &run, cfg)?];
    let found = troughs(ds, &run, cfg)?;
    let reports = regret_reports(ds, &found, cfg)?;
    out.push(Artifact::new("exhibit6", regret_csv(&reports)));
    out.push(exhibit6c(ds, &found, cfg)?);
    Ok(out)
}

fn exhibit6a(ds: &Dataset, run: &MainRun, cfg: &RunConfig) -> Result<Artifact, CliError> {
    let bench = &run.benchmark.portfolio;
    let wealth = compound(bench.values(), 1.0);
    let mut peak = 1.0f64;
    let dd: Vec<f64> = wealth[1..]
        .iter()
        .map(|w| {
            peak = peak.max(*w);
            w / peak - 1.0
        })
        .collect();
    let corr = match &ds.sectors {
        Some(p) => Some(rolling_avg_pairwise_corr(
            p,
            WindowSpec::new(cfg.windows.sector_corr)?,
        )?),
        None => None,
    };
    let rows = bench.dates().iter().enumerate().map(|(i, d)| {
        let c = corr.as_ref().and_then(|s| s.get(*d)).unwrap_or(f64::NAN);
        vec![
            d.to_string(),
            cell(dd[i]),
            cell(ds.vix.values()[i]),
            cell(c),
        ]
    });
    Ok(Artifact::new(
        "exhibit6_drawdown",
        csv_table(&["date", "drawdown", "vix", "avg_pairwise_corr"], rows),
    )
    .with_svg(line_chart(
        "Benchmark drawdown",
        &[Line {
            name: "70/30 drawdown",
            dates: bench.dates(),
            values: &dd,
        }],
    )))
}

fn exhibit6c(ds: &Dataset, found: &[Trough], cfg: &RunConfig) -> Result<Artifact, CliError> {
    let horizon = cfg.regret_horizons.iter().copied().max().unwrap_or(252);
    let spec = RegretSpec::default();
    let mut rows = Vec::new();
    for t in found {
        let i = ds.calendar.index_of(t.date).ok_or_else(|| {
            CliError::Unavailable(format!("trough {} outside the return sample", t.date))
        })?;
        let end = (i + 1 + horizon).min(ds.eq.len());
        if end <= i + 1 {
            continue;
        }
        let (e, b) = (ds.eq.slice(i + 1..end)?, ds.bd.slice(i + 1..end)?);
        let stay = compound(rebalanced_mix(&e, &b, spec.stay_eq)?.returns.values(), 1.0);
        let derisk = compound(
            rebalanced_mix(&e, &b, spec.derisk_eq)?.returns.values(),
            1.0,
        );
        for k in 1..stay.len() {
            rows.push(vec![
                t.crisis.clone(),
                k.to_string(),
                e.dates()[k - 1].to_string(),
                cell(stay[k] - 1.0),
                cell(derisk[k] - 1.0),
                cell((stay[k] - derisk[k]) * 100.0),
            ]);
        }
    }
    Ok(Artifact::new(
        "exhibit6_paths",
        csv_table(
            &["crisis", "day", "date", "stay", "derisk", "forgone_pp"],
            rows,
        ),
    ))
}

fn sharpe_ci(sim: &SimResult, rf: &RiskFree, cfg: &RunConfig) -> Result<BootstrapCi, CliError> {
    let (values, rate) = match rf {
        RiskFree::Constant(r) => (sim.portfolio.values().to_vec(), *r),
        RiskFree::Series(s) => {
            let s = s.align_to(sim.calendar())?;
            (
                sim.portfolio
                    .values()
                    .iter()
                    .zip(s.values())
                    .map(|(p, f)| p - f)
                    .collect(),
                0.0,
            )
        }
    };
    Ok(circular_block_bootstrap(
        &values,
        &cfg.bootstrap,
        &Statistic::Sharpe { rf: rate },
    )?)
}

/// One row of the constraint spectrum.
#[derive(Debug, Clone)]
pub struct SpectrumRow {
    pub cap: Option<f64>,
    pub report: MetricsReport,
    pub ci: BootstrapCi,
    pub sim: SimResult,
}

pub fn spectrum(
    ds: &Dataset,
    run: &MainRun,
    cfg: &RunConfig,
) -> Result<Vec<SpectrumRow>, CliError> {
    let inputs = SpectrumInputs {
        benchmark: &run.benchmark,
        spread: &ds.spread,
        regimes: &run.regimes,
        policy: &run.dynamic_policy,
        vol_window: run.vol_window,
    };
    let mut uncapped_policy = run.dynamic_policy.clone();
    uncapped_policy.te_ceiling = None;
    let uncapped = simulate_overlay(
        &run.benchmark,
        &ds.spread,
        &run.regimes,
        &uncapped_policy,
        run.vol_window,
    )?;
    let mut sims: Vec<(Option<f64>, SimResult)> = cfg
        .caps
        .iter()
        .copied()
        .map(Some)
        .zip(constraint_spectrum(&inputs, &cfg.caps)?)
        .collect();
    sims.push((None, uncapped));
    let start = sims
        .iter()
        .map(|s| s.1.calendar().first())
        .max()
        .expect("at least one run");
    sims.into_iter()
        .map(|(cap, sim)| {
            let sim = sim.starting_at(start)?;
            let label = cap
                .map(|c| format!("cap_{c}"))
                .unwrap_or_else(|| "uncapped".into());
            Ok(SpectrumRow {
                cap,
                report: summarize(&label, &sim, &run.smoothed_vix, &ds.rf)?,
                ci: sharpe_ci(&sim, &ds.rf, cfg)?,
                sim,
            })
        })
        .collect()
}

/// Constraint spectrum with bootstrap Sharpe intervals and TE paths per cap.
pub fn exhibit7(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let run = main_run(ds, cfg)?;
    let rows = spectrum(ds, &run, cfg)?;
    let uncapped = rows
        .last()
        .expect("uncapped row")
        .sim
        .portfolio
        .values()
        .to_vec();
    let header = [
        "te_cap",
        "cagr",
        "vol",
        "sharpe",
        "sharpe_ci_lo",
        "sharpe_ci_hi",
        "max_drawdown",
        "te_level",
        "te_sigma",
        "turnover",
        "identical_to_uncapped",
    ];
    let body = rows.iter().map(|r| {
        vec![
            r.cap.map(cell).unwrap_or_else(|| "none".into()),
            cell(r.report.cagr),
            cell(r.report.vol),
            cell(r.report.sharpe),
            cell(r.ci.ci_lo),
            cell(r.ci.ci_hi),
            cell(r.report.max_drawdown),
            opt_cell(r.report.te_level),
            opt_cell(r.report.te_sigma),
            cell(r.sim.turnover),
            (r.sim.portfolio.values() == uncapped.as_slice()).to_string(),
        ]
    });
    let table = Artifact::new("exhibit7", csv_table(&header, body));

    let te: Vec<(String, &Series)> = rows
        .iter()
        .filter_map(|r| {
            r.sim
                .realized_te
                .as_ref()
                .map(|t| (r.report.label.clone(), t))
        })
        .collect();
    let mut paths_header = vec!["date".to_string()];
    paths_header.extend(te.iter().map(|(l, _)| l.clone()));
    let header_refs: Vec<&str> = paths_header.iter().map(String::as_str).collect();
    let paths = match te.first() {
        Some((_, first)) => {
            let rows = first.dates().iter().enumerate().map(|(i, d)| {
                let mut row = vec![d.to_string()];
                row.extend(te.iter().map(|(_, s)| cell(s.values()[i])));
                row
            });
            let lines: Vec<Line<'_>> = te
                .iter()
                .step_by(te.len().div_ceil(4).max(1))
                .map(|(l, s)| Line {
                    name: l,
                    dates: s.dates(),
                    values: s.values(),
                })
                .collect();
            Artifact::new("exhibit7_te_paths", csv_table(&header_refs, rows))
                .with_svg(line_chart("Realized tracking error by constraint", &lines))
        }
        None => Artifact::new(
            "exhibit7_te_paths",
            csv_table::<String>(&header_refs, Vec::new()),
        ),
    };
    Ok(vec![table, paths])
}

pub fn omega(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    exhibit5(ds, cfg)
}

pub fn regret(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let run = main_run(ds, cfg)?;
    let found = troughs(ds, &run, cfg)?;
    let reports = regret_reports(ds, &found, cfg)?;
    Ok(vec![Artifact::new("exhibit6", regret_csv(&reports))])
}

pub fn converge(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    exhibit7(ds, cfg)
}

pub fn sweep_report(ds: &Dataset, cfg: &RunConfig) -> Result<SweepReport, CliError> {
    let benchmark = dte_core::portfolio::benchmark_7030(&ds.eq, &ds.bd)?;
    let (dynamic, static_policy) = (cfg.policy.dynamic_policy(), cfg.policy.static_policy());
    let inputs = SweepInputs {
        benchmark: &benchmark,
        spread: &ds.spread,
        vix: &ds.vix,
        dynamic: &dynamic,
        static_policy: &static_policy,
        vol_window: WindowSpec::new(cfg.windows.spread_vol)?,
        rf: &ds.rf,
    };
    let [lo, hi] = cfg.sweep.percentiles;
    Ok(window_sweep(&inputs, &cfg.sweep.windows, (lo, hi))?)
}

/// Smoothing-window robustness table.
pub fn sweep(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    Ok(vec![Artifact::new(
        "window_sweep",
        sweep_report(ds, cfg)?.to_csv(),
    )])
}

pub fn props(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let report = proposition_suite(&cfg.regime_params()?, &cfg.governance()?)?;
    Ok(vec![Artifact::new("propositions", report.to_csv())])
}

/// Markov-switching fit on weekly equity returns against the VIX regime signal.
pub fn markov(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let run = main_run(ds, cfg)?;
    let weekly = weekly_returns(&ds.eq)?;
    let opts = MsOptions {
        restarts: cfg.markov_restarts,
        seed: cfg.seed,
        ..Default::default()
    };
    let fit = fit_markov_switching_with(&weekly, &opts)?;
    let prob = smoothed_high_prob(&fit.model, &weekly)?;
    let aligned = prob.starting_at(run.regimes.calendar().first())?;
    let agreement = signal_agreement(&run.regimes, &aligned)?;
    let m = &fit.model;
    let model_rows = vec![
        vec!["mean_low".to_string(), cell(m.means[0])],
        vec!["mean_high".to_string(), cell(m.means[1])],
        vec!["var_low".to_string(), cell(m.variances[0])],
        vec!["var_high".to_string(), cell(m.variances[1])],
        vec!["p_stay_low".to_string(), cell(m.transition[0][0])],
        vec!["p_stay_high".to_string(), cell(m.transition[1][1])],
        vec!["log_likelihood".to_string(), cell(m.log_likelihood)],
        vec!["converged".to_string(), fit.converged.to_string()],
        vec!["spearman".to_string(), cell(agreement.spearman)],
        vec!["concordance".to_string(), cell(agreement.concordance)],
        vec!["weeks".to_string(), agreement.weeks.to_string()],
    ];
    let probs = prob
        .dates()
        .iter()
        .zip(prob.values())
        .map(|(d, p)| vec![d.to_string(), cell(*p)]);
    Ok(vec![
        Artifact::new("markov_fit", csv_table(&["quantity", "value"], model_rows)),
        Artifact::new("markov_probs", csv_table(&["week_end", "prob_high"], probs)),
    ])
}

/// Synthetic panel plus its hidden-state path.
pub fn synth(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let params = match &cfg.data {
        DataSource::Synthetic(p) => SynthParams {
            seed: cfg.seed,
            ..p.clone()
        },
        DataSource::Files(_) => SynthParams {
            seed: cfg.seed,
            ..SynthParams::default()
        },
    };
    let out = synth_regime_panel(&params)?;
    let mut buf = Vec::new();
    dte_core::ingest::write_panel_csv(&out.panel, &mut buf).map_err(|e| CliError::Ingest {
        context: "synthetic panel".into(),
        source: e,
    })?;
    let panel = String::from_utf8(buf).expect("utf-8 csv");
    let states = out
        .panel
        .calendar()
        .dates()
        .iter()
        .zip(&out.states)
        .map(|(d, s)| {
            vec![
                d.to_string(),
                match s {
                    HiddenState::Low => "low".to_string(),
                    HiddenState::High => "high".to_string(),
                },
            ]
        });
    Ok(vec![
        Artifact::new("synth_panel", panel),
        Artifact::new("synth_states", csv_table(&["date", "state"], states)),
    ])
}

/// Exhibit `n` in 1..=7.
pub fn exhibit(n: u8, ds: &Dataset, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    match n {
        1 => exhibit1(ds, cfg),
        2 => exhibit2(ds, cfg),
        3 => exhibit3(ds, cfg),
        4 => exhibit4(ds, cfg),
        5 => exhibit5(ds, cfg),
        6 => exhibit6(ds, cfg),
        7 => exhibit7(ds, cfg),
        _ => Err(CliError::Config {
            field: "exhibit".into(),
            message: format!("{n} is not in 1..=7"),
        }),
    }
}
