//! The `fit`, `rate-sweep`, `weights-diag` and `simulate` commands.

use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluation::{cpe_analytic, cpe_monte_carlo, mcpe_analytic, Population};
use crate::harness::config::{DiagConfig, HarnessConfig, Method};
use crate::harness::io::{default_names, read_inputs, read_training, write_dataset, write_matrix, write_rows};
use crate::harness::pipeline::{run_pipeline, simulated_importance, PipelineOutcome};
use crate::harness::records::*;
use crate::model::{Dataset, FitResult};
use crate::par::{map_indexed, Execution};
use crate::rng::derive_seed;
use crate::simulation::{draw_dataset_with, make_population, ScenarioConfig};
use crate::weighting::{fit_gaussian_importance_on, trimmed_importance, ImportanceModel, ScheduleMode};
use crate::VERSION;

const TASK_CPE: u64 = 3;
const TASK_DIAG: u64 = 11;

/// Overrides given on the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct CommandOptions {
    pub seed: Option<u64>,
    pub method: Option<Method>,
    pub execution: Execution,
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn seeded_scenario(cfg: &HarnessConfig, command: &str, opts: &CommandOptions) -> Result<ScenarioConfig> {
    let mut scen = cfg.require_scenario(command)?.clone();
    if let Some(seed) = opts.seed {
        scen.seed = seed;
    }
    Ok(scen)
}

fn importance_coords(cfg: &HarnessConfig, scen: &ScenarioConfig) -> Result<Vec<usize>> {
    let coords = cfg
        .weights
        .as_ref()
        .and_then(|w| w.importance_coords.clone())
        .unwrap_or_else(|| vec![scen.shift_coord]);
    if coords.iter().any(|&j| j >= scen.p) {
        return Err(Error::Config(format!("importance_coords outside 0..{}", scen.p)));
    }
    Ok(coords)
}

/// `(cpe, se)`: exact under correct specification, Monte Carlo otherwise.
fn cpe_of(pop: &Population, fit: &FitResult, mc_draws: usize, seed: u64) -> Result<(f64, Option<f64>)> {
    if pop.correctly_specified() {
        Ok((cpe_analytic(pop, fit)?, None))
    } else {
        let mc = cpe_monte_carlo(pop, fit, mc_draws, derive_seed(seed, TASK_CPE, 0))?;
        Ok((mc.estimate, Some(mc.std_error)))
    }
}

fn record_from(
    outcome: &PipelineOutcome,
    data: &Dataset,
    seed: Option<u64>,
    scenario: Option<ScenarioConfig>,
    input: Option<InputDescriptor>,
) -> RunRecord {
    let fit = outcome.selected_fit();
    RunRecord {
        library_version: VERSION.to_string(),
        method: outcome.method,
        seed,
        scenario,
        input,
        schedule: outcome.schedule.clone(),
        selected_k: outcome.trace.selected_k,
        selected_model: fit.model.clone(),
        selected_names: data
            .feature_names()
            .map(|names| fit.model.iter().map(|&j| names[j].clone()).collect()),
        alpha: fit.alpha,
        beta: fit.beta.clone(),
        mcpe: None,
        cpe: None,
        cpe_std_error: None,
        path_stop: outcome.path.stop(),
        path_order: outcome.path.order().to_vec(),
        sigma2_trace: outcome.path.sigma2_trace().to_vec(),
        criterion_trace: outcome.trace.values.clone(),
        wall_time_ms: 0,
    }
}

fn check_record(r: &RunRecord) -> Result<()> {
    let scalars = [Some(r.alpha), r.mcpe, r.cpe, r.cpe_std_error];
    let finite = scalars.iter().flatten().all(|v| v.is_finite())
        && r.beta.iter().chain(&r.sigma2_trace).chain(&r.criterion_trace).all(|v| v.is_finite());
    if !finite {
        return Err(Error::Numerical("run produced non-finite values".into()));
    }
    if r.selected_k < 1 || r.selected_k > r.schedule.k_n {
        return Err(Error::Numerical(format!("selected k {} outside [1, {}]", r.selected_k, r.schedule.k_n)));
    }
    Ok(())
}

/// Fits one dataset (simulated from `[scenario]` or read from `[input]`).
pub fn cmd_fit(cfg: &HarnessConfig, opts: &CommandOptions) -> Result<RunRecord> {
    let start = Instant::now();
    let method = cfg.resolve_method(opts.method);
    let mut record = if cfg.scenario.is_some() {
        let scen = seeded_scenario(cfg, "fit", opts)?;
        let pop = make_population(&scen)?;
        let draw = draw_dataset_with(&pop, scen.n, scen.n_test(), scen.seed)?;
        let coords = importance_coords(cfg, &scen)?;
        let importance = simulated_importance(method, &pop, draw.train.x(), &draw.test_inputs, &coords)?;
        let outcome = run_pipeline(&draw.train, method, &cfg.schedule, importance.as_ref(), opts.execution)?;
        let fit = outcome.selected_fit();
        let mcpe = mcpe_analytic(&pop, fit)?;
        let (cpe, cpe_se) = cpe_of(&pop, fit, cfg.evaluation.mc_draws, scen.seed)?;
        let mut r = record_from(&outcome, &draw.train, Some(scen.seed), Some(scen), None);
        r.mcpe = Some(mcpe);
        r.cpe = Some(cpe);
        r.cpe_std_error = cpe_se;
        r
    } else {
        let input = cfg
            .input
            .as_ref()
            .ok_or_else(|| Error::Config("`fit` needs a [scenario] or an [input] table".into()))?;
        let csv = read_training(&input.train, input.weight_column.as_deref())?;
        let data = &csv.data;
        let importance = match method {
            Method::OgaHdic => None,
            Method::IwogaHdiwic => Some(ImportanceModel::Precomputed(csv.weights.clone().ok_or_else(|| {
                Error::Config("iwoga+hdiwic on CSV input needs input.weight_column".into())
            })?)),
            Method::IwogaHdiwicS => {
                let path = input.test_inputs.as_ref().ok_or_else(|| {
                    Error::Config("iwoga+hdiwic_s on CSV input needs input.test_inputs".into())
                })?;
                let names = data.feature_names().map(<[String]>::to_vec).unwrap_or_default();
                let test = read_inputs(path, &names)?;
                let coords = match cfg.weights.as_ref().and_then(|w| w.importance_coords.clone()) {
                    Some(c) => c,
                    None => (0..data.p()).collect(),
                };
                Some(fit_gaussian_importance_on(data.x(), &test, &coords)?)
            }
        };
        let outcome = run_pipeline(data, method, &cfg.schedule, importance.as_ref(), opts.execution)?;
        let descriptor = InputDescriptor {
            train: input.train.display().to_string(),
            test_inputs: input.test_inputs.as_ref().map(|p| p.display().to_string()),
            weight_column: input.weight_column.clone(),
            n: data.n(),
            p: data.p(),
        };
        record_from(&outcome, data, opts.seed, None, Some(descriptor))
    };
    check_record(&record)?;
    record.wall_time_ms = elapsed_ms(start);
    Ok(record)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Numerical(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(std::fs::File::create(path)?))
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `run.json` and `trace.csv`.
pub fn save_fit(record: &RunRecord, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    write_json(&out.join("run.json"), record)?;
    let rows: Vec<Vec<String>> = record
        .sigma2_trace
        .iter()
        .zip(&record.criterion_trace)
        .enumerate()
        .map(|(i, (s, c))| vec![(i + 1).to_string(), num(*s), num(*c)])
        .collect();
    write_rows(create(&out.join("trace.csv"))?, &["k", "sigma2", "criterion"], &rows)
}

fn run_replication(
    cfg: &HarnessConfig,
    method: Method,
    pop: &Population,
    scen: &ScenarioConfig,
    coords: &[usize],
    true_importance: Option<&ImportanceModel>,
    seed: u64,
) -> Result<(usize, usize, f64, f64)> {
    let draw = draw_dataset_with(pop, scen.n, scen.n_test(), seed)?;
    let fitted;
    let importance = match method {
        Method::IwogaHdiwicS => {
            fitted = fit_gaussian_importance_on(draw.train.x(), &draw.test_inputs, coords)?;
            Some(&fitted)
        }
        _ => true_importance,
    };
    let outcome = run_pipeline(&draw.train, method, &cfg.schedule, importance, Execution::Serial)?;
    let fit = outcome.selected_fit();
    let mcpe = mcpe_analytic(pop, fit)?;
    let (cpe, _) = cpe_of(pop, fit, cfg.evaluation.mc_draws, seed)?;
    Ok((outcome.trace.selected_k, outcome.schedule.k_n, mcpe, cpe))
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Ordinary least squares of `y` on `x` with the slope's standard error.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    let m = x.len();
    if m < 3 || y.len() != m {
        return Err(Error::Invalid("slope fit needs at least three points".into()));
    }
    let mx = x.iter().sum::<f64>() / m as f64;
    let my = y.iter().sum::<f64>() / m as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Invalid("slope fit needs distinct abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        std_error: (ssr / (m as f64 - 2.0) / sxx).sqrt(),
        intercept,
    })
}

/// Replicated pipeline runs over a grid of sample sizes, with a log-log
/// slope of the mean error against the rate.
pub fn cmd_rate_sweep(cfg: &HarnessConfig, opts: &CommandOptions) -> Result<RateSweepResult> {
    let start = Instant::now();
    let base = seeded_scenario(cfg, "rate-sweep", opts)?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("`rate-sweep` needs a [sweep] table".into()))?;
    if sweep.replications < 20 {
        return Err(Error::Config(format!(
            "rate sweeps need at least 20 replications, got {}",
            sweep.replications
        )));
    }
    let mut distinct = sweep.n_grid.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::Config("n_grid needs at least four distinct sizes".into()));
    }
    let method = cfg.resolve_method(opts.method);
    let reps = sweep.replications;

    struct Cell {
        scen: ScenarioConfig,
        pop: Population,
        coords: Vec<usize>,
        importance: Option<ImportanceModel>,
    }
    let cells = sweep
        .n_grid
        .iter()
        .map(|&n| {
            let mut scen = base.clone();
            scen.n = n;
            scen.p = ((sweep.p_ratio * n as f64).round() as usize).max(2);
            let pop = make_population(&scen)?;
            let importance = match method {
                Method::IwogaHdiwic => Some(pop.importance_model()?),
                _ => None,
            };
            Ok(Cell {
                coords: importance_coords(cfg, &scen)?,
                scen,
                pop,
                importance,
            })
        })
        .collect::<Result<Vec<Cell>>>()?;

    let outcomes = map_indexed(opts.execution, cells.len() * reps, |task| {
        let (ci, rep) = (task / reps, task % reps);
        let cell = &cells[ci];
        let seed = derive_seed(base.seed, ci as u64, rep as u64);
        let res = run_replication(cfg, method, &cell.pop, &cell.scen, &cell.coords, cell.importance.as_ref(), seed);
        let mut o = ReplicationOutcome {
            cell: ci,
            n: cell.scen.n,
            p: cell.scen.p,
            replication: rep,
            seed,
            selected_k: None,
            k_n: None,
            mcpe: None,
            cpe: None,
            failure: None,
        };
        match res {
            Ok((k, k_n, mcpe, cpe)) => {
                o.selected_k = Some(k);
                o.k_n = Some(k_n);
                o.mcpe = Some(mcpe);
                o.cpe = Some(cpe);
            }
            Err(e) => o.failure = Some(e.to_string()),
        }
        o
    });

    let mut summaries = Vec::with_capacity(cells.len());
    for (ci, cell) in cells.iter().enumerate() {
        let ok: Vec<&ReplicationOutcome> = outcomes.iter().filter(|o| o.cell == ci && o.failure.is_none()).collect();
        if ok.len() < 2 {
            let reason = outcomes
                .iter()
                .find(|o| o.cell == ci && o.failure.is_some())
                .and_then(|o| o.failure.clone())
                .unwrap_or_default();
            return Err(Error::Numerical(format!(
                "cell {ci} (n={}, p={}): fewer than two successful replications; first failure: {reason}",
                cell.scen.n, cell.scen.p
            )));
        }
        let mcpe: Vec<f64> = ok.iter().filter_map(|o| o.mcpe).collect();
        let cpe: Vec<f64> = ok.iter().filter_map(|o| o.cpe).collect();
        let ks: Vec<f64> = ok.iter().filter_map(|o| o.selected_k).map(|k| k as f64).collect();
        let (mean_mcpe, se) = mean_se(&mcpe);
        let (mean_cpe, cpe_se) = mean_se(&cpe);
        let sched = cfg.schedule.resolve(cell.scen.n, cell.scen.p, method.schedule_mode())?;
        summaries.push(SweepCell {
            n: cell.scen.n,
            p: cell.scen.p,
            c_n: sched.c_n,
            d_n: sched.d_n,
            b_n: sched.b_n,
            k_n: sched.k_n,
            rate: sched.penalty_rate(),
            mean_mcpe,
            se,
            mean_cpe,
            cpe_se,
            mean_selected_k: ks.iter().sum::<f64>() / ks.len() as f64,
            ok_replications: ok.len(),
            failed_replications: reps - ok.len(),
        });
    }

    let xi = base.xi;
    let mut result = RateSweepResult {
        library_version: VERSION.to_string(),
        method,
        scenario: base.clone(),
        schedule: cfg.schedule.clone(),
        replications: reps,
        grid: summaries.iter().map(|c| (c.n, c.p)).collect(),
        rate_axis: match method.schedule_mode() {
            ScheduleMode::Iwoga => "d_n",
            ScheduleMode::Oga => "c_n",
        }
        .to_string(),
        metric: match method {
            Method::OgaHdic => ErrorMetric::Cpe,
            _ => ErrorMetric::Mcpe,
        },
        cells: summaries,
        slope: None,
        slope_skipped: None,
        target_exponent: (1.0 + 2.0 * xi) / (1.0 + xi),
        degraded_exponent: 2.0 * xi / (1.0 + xi),
        outcomes,
        wall_time_ms: 0,
    };
    let means = result.metric_means();
    if base.noise_sd < 1e-6 {
        result.slope_skipped = Some(format!(
            "noise_sd = {} is effectively zero; the error is bias-dominated",
            base.noise_sd
        ));
    } else if means.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
        result.slope_skipped = Some("a cell has a non-positive mean error".into());
    } else {
        let x: Vec<f64> = result.cells.iter().map(|c| c.rate.ln()).collect();
        let y: Vec<f64> = means.iter().map(|m| m.ln()).collect();
        match ols_slope(&x, &y) {
            Ok(fit) => result.slope = Some(fit),
            Err(e) => result.slope_skipped = Some(e.to_string()),
        }
    }
    result.wall_time_ms = elapsed_ms(start);
    Ok(result)
}

/// Writes `sweep.json`, `sweep.csv` and `replications.csv`.
pub fn save_sweep(result: &RateSweepResult, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    write_json(&out.join("sweep.json"), result)?;
    let rows: Vec<Vec<String>> = result
        .cells
        .iter()
        .map(|c| {
            vec![
                c.n.to_string(),
                c.p.to_string(),
                num(c.d_n),
                num(c.mean_mcpe),
                num(c.se),
                num(c.c_n),
                num(c.mean_cpe),
                num(c.cpe_se),
                num(c.mean_selected_k),
                c.k_n.to_string(),
                c.ok_replications.to_string(),
            ]
        })
        .collect();
    write_rows(
        create(&out.join("sweep.csv"))?,
        &["n", "p", "d_n", "mean_mcpe", "se", "c_n", "mean_cpe", "cpe_se", "mean_selected_k", "k_n", "ok_replications"],
        &rows,
    )?;
    let reps: Vec<Vec<String>> = result
        .outcomes
        .iter()
        .map(|o| {
            vec![
                o.cell.to_string(),
                o.n.to_string(),
                o.p.to_string(),
                o.replication.to_string(),
                o.seed.to_string(),
                opt(o.selected_k),
                opt(o.k_n),
                o.mcpe.map(num).unwrap_or_default(),
                o.cpe.map(num).unwrap_or_default(),
                o.failure.clone().unwrap_or_default(),
            ]
        })
        .collect();
    write_rows(
        create(&out.join("replications.csv"))?,
        &["cell", "n", "p", "replication", "seed", "selected_k", "k_n", "mcpe", "cpe", "failure"],
        &reps,
    )
}

/// Discrepancy between true and estimated trimmed importance values.
///
/// `v` and `v_hat` are the trimmed values before normalization; `noise` is
/// the regression error of each training row.
pub fn weight_diagnostics(x: &DMatrix<f64>, noise: &[f64], v: &[f64], v_hat: &[f64]) -> Result<WeightDiagnostics> {
    let n = x.nrows();
    if v.len() != n || v_hat.len() != n || noise.len() != n {
        return Err(Error::DimensionMismatch("diagnostic inputs disagree on n".into()));
    }
    let mean = |a: &[f64]| a.iter().sum::<f64>() / n as f64;
    let (mv, mh) = (mean(v), mean(v_hat));
    if !(mv > 0.0 && mh > 0.0) {
        return Err(Error::ZeroWeights);
    }
    let max_weight_diff = v
        .iter()
        .zip(v_hat)
        .map(|(a, b)| (a / mv - b / mh).abs())
        .fold(0.0, f64::max);
    let p1 = x.ncols() + 1;
    let design = DMatrix::from_fn(n, p1, |t, j| if j == 0 { 1.0 } else { x[(t, j - 1)] });
    let diff: Vec<f64> = v.iter().zip(v_hat).map(|(a, b)| a - b).collect();
    let scaled = DMatrix::from_fn(n, p1, |t, j| design[(t, j)] * diff[t]);
    let gram = design.tr_mul(&scaled) / n as f64;
    let gram_stat = gram.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let noise_stat = (0..p1)
        .map(|j| (0..n).map(|t| scaled[(t, j)] * noise[t]).sum::<f64>().abs() / n as f64)
        .fold(0.0, f64::max);
    Ok(WeightDiagnostics {
        max_weight_diff,
        gram_stat,
        noise_stat,
    })
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Compares Gaussian-estimated weights with the exact ones on simulated data.
pub fn cmd_weights_diag(cfg: &HarnessConfig, opts: &CommandOptions) -> Result<WeightsDiagReport> {
    let start = Instant::now();
    let scen = seeded_scenario(cfg, "weights-diag", opts)?;
    let diag = cfg.diag.clone().unwrap_or_default();
    let DiagConfig {
        estimation_sizes,
        replications,
    } = diag;
    let sizes = estimation_sizes.unwrap_or_else(|| vec![scen.n, 10 * scen.n]);
    if replications == 0 || sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Config("weights-diag needs positive replications and estimation sizes".into()));
    }
    let pop = make_population(&scen)?;
    let schedule = cfg.schedule.resolve(scen.n, scen.p, ScheduleMode::Iwoga)?;
    let coords = importance_coords(cfg, &scen)?;
    let exact = pop.importance_model()?;
    let largest = *sizes.iter().max().expect("non-empty");

    let per_rep = map_indexed(opts.execution, replications, |rep| -> Result<Vec<DiagReplication>> {
        let seed = derive_seed(scen.seed, TASK_DIAG, rep as u64);
        let draw = draw_dataset_with(&pop, scen.n, largest, seed)?;
        let x = draw.train.x();
        let noise: Vec<f64> = (0..scen.n)
            .map(|t| draw.train.y()[t] - pop.regression(&draw.train.row(t)))
            .collect();
        let v = trimmed_importance(&exact, x, schedule.b_n)?;
        sizes
            .iter()
            .map(|&size| {
                let est = fit_gaussian_importance_on(x, &draw.test_inputs.rows(0, size).into_owned(), &coords)?;
                let v_hat = trimmed_importance(&est, x, schedule.b_n)?;
                let d = weight_diagnostics(x, &noise, &v, &v_hat)?;
                Ok(DiagReplication {
                    n_estimation: size,
                    replication: rep,
                    seed,
                    max_weight_diff: d.max_weight_diff,
                    gram_over_dn: d.gram_stat / schedule.d_n,
                    noise_over_dn: d.noise_stat / schedule.d_n,
                })
            })
            .collect()
    });
    let rows: Vec<DiagReplication> = per_rep.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let summaries = sizes
        .iter()
        .map(|&size| {
            let pick = |f: fn(&DiagReplication) -> f64| {
                median(rows.iter().filter(|r| r.n_estimation == size).map(f).collect())
            };
            DiagSummary {
                n_estimation: size,
                median_max_weight_diff: pick(|r| r.max_weight_diff),
                median_gram_over_dn: pick(|r| r.gram_over_dn),
                median_noise_over_dn: pick(|r| r.noise_over_dn),
            }
        })
        .collect();
    Ok(WeightsDiagReport {
        library_version: VERSION.to_string(),
        scenario: scen,
        schedule,
        importance_coords: coords,
        summaries,
        replications: rows,
        wall_time_ms: elapsed_ms(start),
    })
}

/// Writes `weights_diag.json` and `weights_diag.csv`.
pub fn save_weights_diag(report: &WeightsDiagReport, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    write_json(&out.join("weights_diag.json"), report)?;
    let rows: Vec<Vec<String>> = report
        .replications
        .iter()
        .map(|r| {
            vec![
                r.n_estimation.to_string(),
                r.replication.to_string(),
                r.seed.to_string(),
                num(r.max_weight_diff),
                num(r.gram_over_dn),
                num(r.noise_over_dn),
            ]
        })
        .collect();
    write_rows(
        create(&out.join("weights_diag.csv"))?,
        &["n_estimation", "replication", "seed", "max_weight_diff", "gram_over_dn", "noise_over_dn"],
        &rows,
    )
}

/// Draws one dataset and writes `train.csv`, `test_inputs.csv` and `simulate.json`.
pub fn cmd_simulate(cfg: &HarnessConfig, opts: &CommandOptions, out: &Path) -> Result<SimulateSummary> {
    let scen = seeded_scenario(cfg, "simulate", opts)?;
    let pop = make_population(&scen)?;
    let draw = draw_dataset_with(&pop, scen.n, scen.n_test(), scen.seed)?;
    std::fs::create_dir_all(out)?;
    write_dataset(create(&out.join("train.csv"))?, &draw.train)?;
    write_matrix(create(&out.join("test_inputs.csv"))?, &default_names(scen.p), &draw.test_inputs)?;
    let summary = SimulateSummary {
        library_version: VERSION.to_string(),
        seed: scen.seed,
        n: scen.n,
        p: scen.p,
        n_test: scen.n_test(),
        files: vec!["train.csv".into(), "test_inputs.csv".into()],
        scenario: scen,
    };
    write_json(&out.join("simulate.json"), &summary)?;
    Ok(summary)
}
