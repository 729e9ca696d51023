//! Executes one configured experiment and writes its artifacts.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use dtdvp_core::fock::{ground_state, integrate_exact, DenseLindblad, DensityMatrix};
use dtdvp_core::gaussian::{gaussify, purity_from_cm, CovarianceMatrix};
use dtdvp_core::gaussified::{compare_trajectories, integrate_gaussified, CmGenerator};
use dtdvp_core::hubbard::{build_hubbard, occupations, spin_order, StateRef};
use dtdvp_core::metrics::AlphaMetric;
use dtdvp_core::random;
use dtdvp_core::tdvp::{integrate_tdvp, tdvp_velocity, GaussianChart};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{ExperimentConfig, Mode};
use crate::error::RunError;
use crate::output::{write_table, Table};

/// Observable columns shared by every trajectory file.
pub const OBSERVABLES: [&str; 6] = ["t", "n_up", "n_down", "purity", "C1", "m_s"];

/// Largest relative velocity discrepancy accepted by `verify-theorem1`.
pub const THEOREM1_TOL: f64 = 1e-6;

/// Files written and the headline numbers of a run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

fn observables(state: StateRef<'_>, purity: f64, periodic: bool) -> Result<[f64; 5], RunError> {
    let occ = occupations(state)?;
    let order = spin_order(state, periodic)?;
    Ok([occ.n_up, occ.n_down, purity, order.c1, order.staggered])
}

fn dense_row(t: f64, rho: &DensityMatrix, periodic: bool) -> Result<Vec<f64>, RunError> {
    let mut row = vec![t];
    row.extend(observables(StateRef::Dense(rho), rho.purity(), periodic)?);
    Ok(row)
}

fn gaussian_row(t: f64, cm: &CovarianceMatrix, periodic: bool) -> Result<Vec<f64>, RunError> {
    let mut row = vec![t];
    row.extend(observables(StateRef::Gaussian(cm), purity_from_cm(cm), periodic)?);
    Ok(row)
}

fn relative(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

fn last_value(table: &Table, column: &str) -> serde_json::Value {
    table.column(column).and_then(|c| c.last().copied()).map_or(serde_json::Value::Null, |v| json!(v))
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    files: Vec<PathBuf>,
}

impl Context<'_> {
    fn write(&mut self, stem: &str, table: &Table) -> Result<(), RunError> {
        let format = self.config.output.format;
        let path = self.config.output.directory.join(format!("{stem}.{}", format.extension()));
        write_table(&path, table, format)?;
        self.files.push(path);
        Ok(())
    }
}

/// Runs the experiment, writing trajectory files and `manifest.json` into the
/// output directory.
pub fn run(config: &ExperimentConfig) -> Result<RunReport, RunError> {
    config.validate()?;
    let start = Instant::now();
    fs::create_dir_all(&config.output.directory)?;
    let mut ctx = Context { config, files: Vec::new() };
    let summary = match config.run.mode {
        Mode::Exact => run_exact(&mut ctx)?,
        Mode::Gaussified => run_gaussified(&mut ctx)?,
        Mode::Tdvp => run_tdvp(&mut ctx)?,
        Mode::Compare => run_compare(&mut ctx)?,
        Mode::VerifyTheorem1 => run_theorem1(&mut ctx)?,
    };
    let time_unit = if config.model.kappa > 0.0 { "1/kappa" } else { "1/J (kappa = 0)" };
    let manifest = json!({
        "mode": config.run.mode.name(),
        "seed": config.run.seed,
        "versions": { "dtdvp": env!("CARGO_PKG_VERSION"), "dtdvp-core": dtdvp_core::VERSION },
        "config": config,
        "time_unit": time_unit,
        "files": ctx.files.iter().map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned())).collect::<Vec<_>>(),
        "summary": summary,
        "wall_time_seconds": start.elapsed().as_secs_f64(),
    });
    let manifest_path = config.output.directory.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    let mut files = ctx.files;
    files.push(manifest_path);
    let verdict = summary.get("passed").and_then(|v| v.as_bool());
    if verdict == Some(false) {
        return Err(RunError::Numerical(format!("verification failed: {summary}")));
    }
    Ok(RunReport { files, summary })
}

struct Setup {
    spec: dtdvp_core::model::LindbladSpec,
    generator: DenseLindblad,
    rho0: DensityMatrix,
    periodic: bool,
}

fn setup(config: &ExperimentConfig) -> Result<Setup, RunError> {
    let params = config.model.params();
    let spec = build_hubbard(&params).map_err(|e| RunError::Config(format!("model: {e}")))?;
    let generator = DenseLindblad::from_spec(&spec)?;
    let rho0 = ground_state(&generator.hamiltonian().to_dense())?;
    Ok(Setup { spec, generator, rho0, periodic: params.periodic })
}

fn run_exact(ctx: &mut Context<'_>) -> Result<serde_json::Value, RunError> {
    let s = setup(ctx.config)?;
    let traj = integrate_exact(&s.generator, &s.rho0, &ctx.config.grid()?)?;
    let mut table = Table::new(&OBSERVABLES);
    for (t, rho) in traj.iter() {
        table.push(dense_row(t, rho, s.periodic)?);
    }
    ctx.write("exact", &table)?;
    Ok(json!({ "final_purity": last_value(&table, "purity"), "final_n_down": last_value(&table, "n_down") }))
}

fn run_gaussified(ctx: &mut Context<'_>) -> Result<serde_json::Value, RunError> {
    let s = setup(ctx.config)?;
    let traj = integrate_gaussified(&gaussify(&s.rho0)?, &s.spec, &ctx.config.grid()?)?;
    let mut table = Table::new(&OBSERVABLES);
    for (t, cm) in traj.iter() {
        table.push(gaussian_row(t, cm, s.periodic)?);
    }
    ctx.write("gaussified", &table)?;
    Ok(json!({ "final_purity": last_value(&table, "purity"), "final_n_down": last_value(&table, "n_down") }))
}

fn run_tdvp(ctx: &mut Context<'_>) -> Result<serde_json::Value, RunError> {
    let s = setup(ctx.config)?;
    let grid = ctx.config.grid()?;
    let cm0 = gaussify(&s.rho0)?;
    let chart = GaussianChart::new(cm0.modes())?;
    let mut finals = Vec::new();
    for (alpha, metric) in ctx.config.run.alpha.clone().into_iter().zip(ctx.config.metrics()?) {
        let traj = integrate_tdvp(&chart, &cm0.upper(), &metric, &s.generator, &grid)?;
        let mut table = Table::new(&OBSERVABLES);
        for (t, x) in traj.iter() {
            table.push(gaussian_row(t, &chart.covariance(x)?, s.periodic)?);
        }
        ctx.write(&format!("tdvp_alpha_{alpha}"), &table)?;
        finals.push(json!({ "alpha": alpha, "final_purity": last_value(&table, "purity") }));
    }
    Ok(json!({ "runs": finals }))
}

fn run_compare(ctx: &mut Context<'_>) -> Result<serde_json::Value, RunError> {
    let s = setup(ctx.config)?;
    let grid = ctx.config.grid()?;
    let exact = integrate_exact(&s.generator, &s.rho0, &grid)?;
    let gauss = integrate_gaussified(&gaussify(&s.rho0)?, &s.spec, &grid)?;
    let distances = compare_trajectories(&exact, &gauss, ctx.config.run.norm.into())?;
    let mut columns: Vec<String> = OBSERVABLES.iter().map(|c| c.to_string()).collect();
    columns.extend(OBSERVABLES[1..].iter().map(|c| format!("{c}_G")));
    columns.extend(["dGamma".to_string(), "dRho".to_string()]);
    let mut table = Table { columns, rows: Vec::new() };
    for (((t, rho), (_, cm)), d) in exact.iter().zip(gauss.iter()).zip(&distances) {
        let mut row = dense_row(t, rho, s.periodic)?;
        row.extend(observables(StateRef::Gaussian(cm), purity_from_cm(cm), s.periodic)?);
        row.extend([d.d_gamma, d.d_rho]);
        table.push(row);
    }
    ctx.write("compare", &table)?;
    let peak = distances.iter().map(|d| d.d_gamma).fold(0.0f64, f64::max);
    Ok(json!({
        "final_purity": last_value(&table, "purity"),
        "final_purity_G": last_value(&table, "purity_G"),
        "peak_dGamma": peak,
        "final_dGamma": last_value(&table, "dGamma"),
        "final_dRho": last_value(&table, "dRho"),
    }))
}

/// Metrics compared in `verify-theorem1`: every configured exponent plus an
/// equal-weight combination of the first and last.
fn theorem1_metrics(config: &ExperimentConfig) -> Result<Vec<AlphaMetric>, RunError> {
    let mut metrics = config.metrics()?;
    let alphas = &config.run.alpha;
    if alphas.len() > 1 {
        let pair = [(0.5, alphas[0]), (0.5, alphas[alphas.len() - 1])];
        metrics.push(AlphaMetric::convex(&pair).map_err(|e| RunError::Config(format!("run.alpha: {e}")))?);
    }
    Ok(metrics)
}

fn run_theorem1(ctx: &mut Context<'_>) -> Result<serde_json::Value, RunError> {
    let run = &ctx.config.run;
    let modes = run.verify_modes;
    let metrics = theorem1_metrics(ctx.config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let chart = GaussianChart::new(modes)?;
    let mut table = Table::new(&["sample", "metric", "deviation_vs_gaussified", "deviation_across_metrics"]);
    let (mut worst_g, mut worst_m) = (0.0f64, 0.0f64);
    for sample in 0..run.verify_samples {
        let cm = random::random_covariance(&mut rng, modes, 0.9);
        let spec = random::random_lindblad(&mut rng, modes, 2, 1.0)?;
        let generator = DenseLindblad::from_spec(&spec)?;
        let expected = CmGenerator::new(&spec)?.rate_upper(cm.matrix());
        let mut reference: Option<Vec<f64>> = None;
        for (m, metric) in metrics.iter().enumerate() {
            let v = tdvp_velocity(&chart, &cm.upper(), metric, &generator)?.v;
            let dg = relative(&v, &expected);
            let dm = reference.as_ref().map_or(0.0, |r| relative(&v, r));
            reference.get_or_insert(v);
            worst_g = worst_g.max(dg);
            worst_m = worst_m.max(dm);
            table.push(vec![sample as f64, m as f64, dg, dm]);
        }
    }
    ctx.write("theorem1", &table)?;
    let labels: Vec<String> = metrics.iter().map(|m| format!("{:?}", m.terms())).collect();
    Ok(json!({
        "modes": modes,
        "samples": run.verify_samples,
        "metrics": labels,
        "max_deviation_vs_gaussified": worst_g,
        "max_deviation_across_metrics": worst_m,
        "tolerance": THEOREM1_TOL,
        "passed": worst_g < THEOREM1_TOL && worst_m < THEOREM1_TOL,
    }))
}
