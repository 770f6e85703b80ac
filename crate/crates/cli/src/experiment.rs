//! Inverse experiments and forward runs with their file outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use subdiff_core::elliptic::{assemble, default_mode_count, eigensystem, observe_weights, EllipticCoefficients};
use subdiff_core::inverse_cg::{add_noise, reconstruct, ForwardMap, ReconstructionResult, StopReason};
use subdiff_core::pde_solver::{observe, solve_forward_l1, solve_forward_spectral, SourceSpec};
use subdiff_core::TimeSeries;

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{ensure_dir, format_f64, write_columns, write_text};

/// In-memory result of one reconstruction.
#[derive(Debug, Clone)]
pub struct InversionRun {
    pub g_true: TimeSeries,
    pub clean: TimeSeries,
    pub noisy: TimeSeries,
    pub fitted: TimeSeries,
    pub result: ReconstructionResult,
    pub elapsed: Duration,
}

/// Synthesises data from the ground truth, adds noise and reconstructs.
pub fn run_inversion(cfg: &ExperimentConfig) -> CliResult<InversionRun> {
    let start = Instant::now();
    let inv = cfg.inverse_config()?;
    let g_true = cfg.g_true.sample(inv.time)?;
    let map = ForwardMap::new(&inv)?;
    let clean = map.apply(&g_true)?;
    let noisy = add_noise(&clean, inv.delta, inv.seed)?;
    let result = reconstruct(&inv, &noisy, Some(&g_true))?;
    let fitted = map.apply(&result.g_rec)?;
    Ok(InversionRun {
        g_true,
        clean,
        noisy,
        fitted,
        result,
        elapsed: start.elapsed(),
    })
}

/// Summary of an inverse experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: Vec<(String, String)>,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub rel_error: Option<f64>,
    pub residuals: Vec<f64>,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn new(cfg: &ExperimentConfig, run: &InversionRun) -> Self {
        Self {
            config: cfg.echo(),
            iterations: run.result.iterations,
            stop_reason: run.result.stop_reason,
            rel_error: run.result.rel_error,
            residuals: run.result.residual_history.clone(),
            wall_time: run.elapsed,
        }
    }

    /// Plain `key = value` text. Wall time is left out so that reruns are
    /// byte-identical.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.config {
            writeln!(s, "{k} = {v}").unwrap();
        }
        writeln!(s, "iterations = {}", self.iterations).unwrap();
        writeln!(s, "stop_reason = {}", self.stop_reason.as_str()).unwrap();
        match self.rel_error {
            Some(e) => writeln!(s, "rel_error = {}", format_f64(e)).unwrap(),
            None => writeln!(s, "rel_error = none").unwrap(),
        }
        if let Some(r) = self.residuals.last() {
            writeln!(s, "final_residual = {}", format_f64(*r)).unwrap();
        }
        s
    }
}

/// Files written by [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentFiles {
    pub g_rec: PathBuf,
    pub residuals: PathBuf,
    pub report: PathBuf,
    pub observation: Option<PathBuf>,
}

/// Runs an experiment and writes `g_rec.csv` (`t,g_true,g_rec`),
/// `residuals.csv` (`iteration,residual,objective,gradient`), `report.txt` and,
/// with plot data enabled, `observation.csv` (`t,clean,noisy,fitted`).
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<(RunReport, ExperimentFiles)> {
    let run = run_inversion(cfg)?;
    let report = RunReport::new(cfg, &run);
    let dir = &cfg.out_dir;
    ensure_dir(dir)?;
    let t = run.g_true.grid().nodes();
    let files = ExperimentFiles {
        g_rec: dir.join("g_rec.csv"),
        residuals: dir.join("residuals.csv"),
        report: dir.join("report.txt"),
        observation: cfg.emit_plot_data.then(|| dir.join("observation.csv")),
    };
    write_columns(
        &files.g_rec,
        &["t", "g_true", "g_rec"],
        &[&t, run.g_true.values(), run.result.g_rec.values()],
    )?;
    let res = &run.result;
    let iters: Vec<f64> = (0..res.residual_history.len()).map(|k| k as f64).collect();
    write_columns(
        &files.residuals,
        &["iteration", "residual", "objective", "gradient"],
        &[&iters, &res.residual_history, &res.objective_history, &res.gradient_history],
    )?;
    if let Some(path) = &files.observation {
        write_columns(
            path,
            &["t", "clean", "noisy", "fitted"],
            &[&t, run.clean.values(), run.noisy.values(), run.fitted.values()],
        )?;
    }
    write_text(&files.report, &report.to_text())?;
    Ok((report, files))
}

/// Result of a forward run.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardSummary {
    /// Relative `L²(Ω×(0,T))` difference between the L1 and spectral fields.
    pub scheme_difference: f64,
    pub field: PathBuf,
    pub observation: PathBuf,
}

/// Solves the forward problem with source `g_true(t) sin πx` and zero initial
/// value by both solvers; writes `field.csv` (`t,x,u_l1,u_spectral`) and
/// `observation.csv` (`t,l1,spectral`).
pub fn run_forward(cfg: &ExperimentConfig) -> CliResult<ForwardSummary> {
    let spec = cfg.spec()?;
    let space = cfg.space_grid()?;
    let time = cfg.time_grid()?;
    let op = assemble(&space, &EllipticCoefficients::laplacian())?;
    let eig = eigensystem(&op, default_mode_count(&space))?;
    let g = cfg.g_true.sample(time)?;
    let src = SourceSpec::new(g, space.sample(|x| (std::f64::consts::PI * x).sin()))?;
    let zero = vec![0.0; space.n_nodes()];
    let l1 = solve_forward_l1(&spec, &op, &zero, &src, time)?;
    let sp = solve_forward_spectral(&spec, &eig, &zero, &src, time, &cfg.contour()?)?;
    let weights = observe_weights(&space, &cfg.subdomain()?)?;

    ensure_dir(&cfg.out_dir)?;
    let field = cfg.out_dir.join("field.csv");
    let (mut tc, mut xc, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for k in 0..time.len() {
        for i in 0..space.n_nodes() {
            tc.push(time.node(k));
            xc.push(space.node(i));
            a.push(l1.at(i, k));
            b.push(sp.at(i, k));
        }
    }
    write_columns(&field, &["t", "x", "u_l1", "u_spectral"], &[&tc, &xc, &a, &b])?;
    let observation = cfg.out_dir.join("observation.csv");
    write_columns(
        &observation,
        &["t", "l1", "spectral"],
        &[
            &time.nodes(),
            observe(&l1, &weights)?.values(),
            observe(&sp, &weights)?.values(),
        ],
    )?;
    let scheme_difference = if sp.norm_l2() > 0.0 { l1.rel_l2_error(&sp)? } else { l1.norm_l2() };
    Ok(ForwardSummary {
        scheme_difference,
        field,
        observation,
    })
}

/// Reads a `g_rec.csv` back into `(t, g_true, g_rec)`.
pub fn read_reconstruction(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let t = crate::output::read_table(path)?;
    let col = |n: &str| {
        t.column(n)
            .map(<[f64]>::to_vec)
            .ok_or_else(|| crate::error::CliError::Config(format!("{}: missing column {n}", path.display())))
    };
    Ok((col("t")?, col("g_true")?, col("g_rec")?))
}
