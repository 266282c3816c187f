//! The four subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use bql_core::data::{
    mode_sum, random_etaphi, random_real_field, random_wave_packets, rng_from_seed, w_from_etaphi,
};
use bql_core::dynamics::{monitor, picard_solve, simulate, Monitor, Trajectory, TrajectoryMeta};
use bql_core::estimates::{
    bessel_j, decay_fit, frac_leibniz_defect, h_envelope_check, maximal_ratio, smoothing_ratio,
    strichartz_exponent, strichartz_ratio, van_der_corput_check, KernelOptions,
};
use bql_core::norms::norm_report;
use bql_core::reformulations::{State, StateEtaPhi, StateW};
use bql_core::{Error, Field, Grid};

use crate::cells;
use crate::config::{Family, InitialData, RunConfig, Subcommand};
use crate::error::{CliError, Context};
use crate::report::CsvReport;
use crate::snapshot::{read_fields, write_snapshot};

/// Runs `cfg` on a pool of `cfg.threads` workers and returns the written
/// artifacts.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    pool.install(|| match cfg.subcommand {
        Subcommand::Simulate => run_simulate(cfg),
        Subcommand::Picard => run_picard(cfg),
        Subcommand::Norms => run_norms(cfg),
        Subcommand::VerifyEstimates => run_estimates(cfg),
    })
}

fn grid(cfg: &RunConfig) -> Result<Grid, CliError> {
    Grid::new(cfg.grid).map_err(|e| CliError::Config(format!("grid: {e}")))
}

/// Initial `w` from the configured data.
pub fn initial_w(cfg: &RunConfig) -> Result<StateW, CliError> {
    let etaphi = match &cfg.data {
        InitialData::Zero => return Ok(StateW::zeros(&grid(cfg)?)),
        InitialData::Gaussian(g) => g.etaphi(&grid(cfg)?).context("gaussian data")?,
        InitialData::Modes(terms) => mode_sum(&grid(cfg)?, terms),
        InitialData::Random { jmax, amplitude } => {
            let mut rng = rng_from_seed(cfg.seed);
            let a = Complex64::new(*amplitude, 0.0);
            random_etaphi(&grid(cfg)?, &mut rng, *jmax).map_fields(|f| f.scaled(a))
        }
        InitialData::Snapshot(path) => {
            let (_, fields) = read_fields(path, cfg.grid.dealias_fraction)?;
            match fields.len() {
                4 => return StateW::from_fields(fields).context("snapshot data"),
                2 => StateEtaPhi::from_fields(fields).context("snapshot data")?,
                n => {
                    return Err(CliError::Format {
                        path: path.clone(),
                        message: format!("{n} fields; expected 2 (eta, Phi) or 4 (w)"),
                    })
                }
            }
        }
    };
    w_from_etaphi(&etaphi).context("initial data")
}

fn snapshot_name(i: usize) -> String {
    format!("snap_{i:06}.bql")
}

fn write_trajectory(cfg: &RunConfig, traj: &Trajectory<StateW>) -> Result<Vec<PathBuf>, CliError> {
    let last = traj.len() - 1;
    let mut out = Vec::new();
    for (i, (t, w)) in traj.times().iter().zip(traj.states()).enumerate() {
        if i % cfg.save_every == 0 || i == last {
            let path = cfg.out.join(snapshot_name(i));
            write_snapshot(w, *t, &path)?;
            out.push(path);
        }
    }
    Ok(out)
}

fn write_monitors(cfg: &RunConfig, monitors: &[Monitor]) -> Result<PathBuf, CliError> {
    let mut csv = CsvReport::create(
        &cfg.out.join("monitors.csv"),
        &cfg.hash(),
        &[
            "step",
            "time",
            "curl_u",
            "curl_v",
            "reality_defect",
            "conjugation_defect",
            "l2_norm",
        ],
    )?;
    for (i, m) in monitors.iter().enumerate() {
        csv.row(cells![
            i,
            m.time,
            m.curl_u,
            m.curl_v,
            m.reality_defect,
            m.conjugation_defect,
            m.l2_norm
        ])?;
    }
    csv.finish()
}

fn run_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let w0 = initial_w(cfg)?;
    let traj = simulate(&w0, cfg.t_final, cfg.dt).context("simulate")?;
    let mut out = write_trajectory(cfg, &traj)?;
    out.push(write_monitors(cfg, &traj.monitors)?);
    Ok(out)
}

fn write_picard_report(
    cfg: &RunConfig,
    report: &bql_core::dynamics::PicardReport,
) -> Result<PathBuf, CliError> {
    let mut csv = CsvReport::create(
        &cfg.out.join("picard.csv"),
        &cfg.hash(),
        &[
            "iteration",
            "successive_diff",
            "converged",
            "contraction_ratio_estimate",
        ],
    )?;
    for (i, d) in report.successive_diffs.iter().enumerate() {
        csv.row(cells![
            i + 1,
            d,
            report.converged,
            report.contraction_ratio_estimate
        ])?;
    }
    csv.finish()
}

fn run_picard(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let w0 = initial_w(cfg)?;
    let (traj, report) = match picard_solve(&w0, cfg.t_final, cfg.nt, cfg.max_iter, cfg.tol) {
        Ok(done) => done,
        Err(Error::NonConvergence(report)) => {
            write_picard_report(cfg, &report)?;
            return Err(Error::NonConvergence(report)).context("picard");
        }
        Err(e) => return Err(e).context("picard"),
    };
    let monitors = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, w)| monitor(t, w))
        .collect::<bql_core::Result<Vec<_>>>()
        .context("picard monitors")?;
    let mut out = write_trajectory(cfg, &traj)?;
    out.push(write_monitors(cfg, &monitors)?);
    out.push(write_picard_report(cfg, &report)?);
    Ok(out)
}

/// Snapshot files of a trajectory directory, in name order.
pub fn snapshot_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("snap_") && n.ends_with(".bql"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Format {
            path: dir.into(),
            message: "no snap_*.bql files".into(),
        });
    }
    Ok(files)
}

fn read_component(cfg: &RunConfig, dir: &Path) -> Result<Trajectory<Field>, CliError> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    for path in snapshot_files(dir)? {
        let (header, mut fields) = read_fields(&path, cfg.grid.dealias_fraction)?;
        if cfg.component >= fields.len() {
            return Err(CliError::Format {
                path,
                message: format!(
                    "no component {} among {} fields",
                    cfg.component,
                    fields.len()
                ),
            });
        }
        times.push(header.t);
        states.push(fields.swap_remove(cfg.component));
    }
    let dt = if times.len() > 1 {
        times[1] - times[0]
    } else {
        0.0
    };
    let meta = TrajectoryMeta {
        stepper: "snapshots".into(),
        dt,
        dealias_fraction: cfg.grid.dealias_fraction,
    };
    Trajectory::new(times, states, meta).context("trajectory snapshots")
}

fn run_norms(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dir = cfg.trajectory.as_ref().expect("validated");
    let traj = read_component(cfg, dir)?;
    let report = norm_report(&traj, &cfg.indices, &[]).context("norms")?;
    let mut csv = CsvReport::create(
        &cfg.out.join("norms.csv"),
        &cfg.hash(),
        &["quantity", "value"],
    )?;
    csv.row(cells!["final_time", report.final_time])?;
    csv.row(cells!["dt", report.dt])?;
    for (name, value) in &report.entries {
        csv.row(cells![name, value])?;
    }
    Ok(vec![csv.finish()?])
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(a.ln(), b.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect();
    out[0] = a;
    out[n - 1] = b;
    out
}

fn run_estimates(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let family = cfg.family.expect("validated");
    let est = &cfg.estimate;
    let path = cfg.out.join(format!("{family}.csv"));
    let hash = cfg.hash();
    let context = format!("verify-estimates {family}");
    let mut rng = rng_from_seed(cfg.seed);

    let csv = match family {
        Family::Decay => {
            let times = est
                .times
                .clone()
                .unwrap_or_else(|| vec![0.002, 0.004, 0.008, 0.016]);
            let opts = KernelOptions {
                t_min: times[0],
                ..KernelOptions::default()
            };
            let fit = decay_fit(est.beta, &times, &opts).context(&context)?;
            let mut csv = CsvReport::create(
                &path,
                &hash,
                &[
                    "beta",
                    "t",
                    "sup_value",
                    "fitted_slope",
                    "slope_stderr",
                    "expected_slope",
                ],
            )?;
            for (t, v) in fit.times.iter().zip(&fit.sup_values) {
                csv.row(cells![
                    fit.beta,
                    t,
                    v,
                    fit.fitted_slope,
                    fit.slope_stderr,
                    fit.expected_slope()
                ])?;
            }
            csv
        }
        Family::Strichartz | Family::Smoothing | Family::Maximal => {
            let g = grid(cfg)?;
            let delta = est.delta.unwrap_or(cfg.indices.delta);
            let (columns, param): (&[&str], f64) = match family {
                Family::Strichartz => (&["sample", "delta", "q", "ratio"], delta),
                Family::Smoothing => (&["sample", "t_final", "ratio"], cfg.t_final),
                _ => (&["sample", "s", "ratio"], cfg.indices.s),
            };
            let mut csv = CsvReport::create(&path, &hash, columns)?;
            for i in 0..est.samples {
                let w0 = random_wave_packets(&g, &mut rng);
                let row = match family {
                    Family::Strichartz => {
                        let q = strichartz_exponent(delta).context(&context)?;
                        let r =
                            strichartz_ratio(&w0, delta, cfg.t_final, cfg.dt).context(&context)?;
                        cells![i, param, q, r]
                    }
                    Family::Smoothing => {
                        cells![
                            i,
                            param,
                            smoothing_ratio(&w0, cfg.t_final, cfg.dt).context(&context)?
                        ]
                    }
                    _ => cells![
                        i,
                        param,
                        maximal_ratio(&w0, param, cfg.t_final, cfg.dt).context(&context)?
                    ],
                };
                csv.row(row)?;
            }
            csv
        }
        Family::Bessel => {
            let m = est.m.unwrap_or(0.0);
            let radii = linspace(
                est.r_min.unwrap_or(0.0),
                est.r_max.unwrap_or(20.0),
                est.points,
            );
            let mut csv = CsvReport::create(&path, &hash, &["m", "r", "value"])?;
            for r in radii {
                csv.row(cells![m, r, bessel_j(m, r).context(&context)?])?;
            }
            csv
        }
        Family::HEnvelope => {
            let radii = logspace(
                est.r_min.unwrap_or(50.0),
                est.r_max.unwrap_or(500.0),
                est.points,
            );
            let rep = h_envelope_check(est.k, &radii).context(&context)?;
            let mut csv = CsvReport::create(
                &path,
                &hash,
                &[
                    "k",
                    "r",
                    "magnitude",
                    "fitted_exponent",
                    "exponent_stderr",
                    "expected_exponent",
                ],
            )?;
            for (r, v) in rep.radii.iter().zip(&rep.magnitudes) {
                csv.row(cells![
                    rep.k,
                    r,
                    v,
                    rep.fitted_exponent,
                    rep.exponent_stderr,
                    rep.expected_exponent
                ])?;
            }
            csv
        }
        Family::Leibniz => {
            let g = grid(cfg)?;
            let m = est.m.unwrap_or(cfg.indices.m);
            let mut csv = CsvReport::create(&path, &hash, &["sample", "m", "p", "defect"])?;
            for i in 0..est.samples {
                let f = random_real_field(&g, &mut rng, est.jmax);
                let h = random_real_field(&g, &mut rng, est.jmax);
                let d = frac_leibniz_defect(&f, &h, m, est.p).context(&context)?;
                csv.row(cells![i, m, est.p, d])?;
            }
            csv
        }
        Family::Vdc => {
            let lambdas = est
                .lambdas
                .clone()
                .unwrap_or_else(|| vec![1e2, 1e3, 1e4, 1e5]);
            // Fresnel-type phase with a linear amplitude on [0, 1]
            let rep = van_der_corput_check(&|x| x * x, &|x| 1.0 + x, 0.0, 1.0, &lambdas)
                .context(&context)?;
            let mut csv = CsvReport::create(
                &path,
                &hash,
                &["lambda", "integral", "bound", "ratio", "normalized"],
            )?;
            for i in 0..rep.lambdas.len() {
                csv.row(cells![
                    rep.lambdas[i],
                    rep.integrals[i],
                    rep.bounds[i],
                    rep.ratios[i],
                    rep.normalized[i]
                ])?;
            }
            csv
        }
    };
    Ok(vec![csv.finish()?])
}
