//! One CSV producer per subcommand.

use berry_core::berry_phase::{compare_routes, compare_routes_many, figure1_rows, OdeOptions};
use berry_core::observables::{eigen_residual, invariant_expectation_of};
use berry_core::params::{self, InitialData, ParameterState};
use berry_core::propagator::{propagate_with_checkpoints, PropagationConfig};
use berry_core::wavefunction::{self, residual_from_samples};
use berry_core::{Grid, Result};
use rayon::prelude::*;

use crate::args::{GridSpec, RunConfig};
use crate::format::{fmt_g, push_row};

/// Box used by `propagate` when no grid is given.
const PROPAGATION_BOX: (f64, f64, usize) = (-12.0, 12.0, 2401);
/// Spacing, in units of 1/|β(t)|, of the fitted grids used by `verify`.
const QUADRATURE_SPACING: f64 = 0.005;
/// Absolute spacing for the Schrödinger residual check.
const RESIDUAL_SPACING: f64 = 0.0025;
const RESIDUAL_DT: f64 = 1e-4;
/// δ₀ shift applied by the fault hook.
const FAULT_SHIFT: f64 = 0.25;

pub fn params_csv(config: &RunConfig) -> Result<String> {
    let mut out = String::from("t,mu,alpha,beta,gamma,delta,eps,kappa\n");
    for s in params::evaluate_trajectory(&config.data, &config.times())? {
        let fields = [s.t, s.mu, s.alpha, s.beta, s.gamma, s.delta, s.eps, s.kappa];
        push_row(&mut out, &fields.map(fmt_g));
    }
    Ok(out)
}

fn fitted(state: &ParameterState, n: u32, spacing: f64) -> Result<Grid> {
    Grid::covering(&[*state], n, spacing)
}

pub fn wavefunction_csv(config: &RunConfig) -> Result<String> {
    let data = &config.data;
    let top = config.n_list.iter().copied().max().unwrap_or(0);
    let grid = match config.grid {
        GridSpec::Fixed(grid) => grid,
        GridSpec::Auto => {
            let state = params::evaluate(data, config.t)?;
            fitted(&state, top, 0.01 / state.beta.abs())?
        }
    };
    let samples = config
        .n_list
        .iter()
        .map(|&n| wavefunction::sample(data, n, &grid, config.t))
        .collect::<Result<Vec<_>>>()?;

    let mut out = String::from("x");
    for n in &config.n_list {
        out.push_str(&format!(",re_psi_n{n},im_psi_n{n},abs2_psi_n{n}"));
    }
    out.push('\n');
    for (i, x) in grid.points().enumerate() {
        let mut fields = vec![fmt_g(x)];
        for s in &samples {
            let v = s.values[i];
            fields.extend([fmt_g(v.re), fmt_g(v.im), fmt_g(v.norm_sqr())]);
        }
        push_row(&mut out, &fields);
    }
    Ok(out)
}

pub fn phase_csv(config: &RunConfig) -> Result<String> {
    let jobs: Vec<(InitialData, u32)> = config.n_list.iter().map(|&n| (config.data, n)).collect();
    let table = compare_routes_many(&jobs, &config.times(), &OdeOptions::default())?;
    let mut out = String::from("n,t,theta_ode,theta_closed,theta_gamma,max_pairwise_diff\n");
    for (&(_, n), rows) in jobs.iter().zip(&table) {
        for r in rows {
            let mut fields = vec![n.to_string()];
            fields.extend(
                [r.t, r.ode, r.closed_form, r.gamma_route, r.max_pairwise_diff()].map(fmt_g),
            );
            push_row(&mut out, &fields);
        }
    }
    Ok(out)
}

pub fn figure1_csv(config: &RunConfig) -> String {
    let mut out = String::from("t,theta_n0,theta_n1\n");
    for (t, a, b) in figure1_rows(&config.data) {
        push_row(&mut out, &[t, a, b].map(fmt_g));
    }
    out
}

pub fn propagate_csv(config: &RunConfig) -> Result<String> {
    let grid = match config.grid {
        GridSpec::Fixed(grid) => grid,
        GridSpec::Auto => {
            let (lo, hi, count) = PROPAGATION_BOX;
            Grid::new(lo, hi, count)?
        }
    };
    let prop = PropagationConfig::new(grid, config.dt, config.t_end)?;
    let every = (config.t_step / config.dt).round().max(1.0) as usize;
    let runs = config
        .n_list
        .par_iter()
        .map(|&n| propagate_with_checkpoints(&config.data, n, &prop, every))
        .collect::<Result<Vec<_>>>()?;

    let mut out = String::from("n,t,max_error,norm2,invariant\n");
    for (n, run) in config.n_list.iter().zip(&runs) {
        for cp in run {
            let mut fields = vec![n.to_string()];
            fields.extend([cp.t, cp.max_error, cp.norm_sqr, cp.invariant].map(fmt_g));
            push_row(&mut out, &fields);
        }
    }
    Ok(out)
}

/// One line of the `verify` report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub n: u32,
    pub t: f64,
    pub value: f64,
    pub threshold: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

pub const CHECKS: [(&str, f64); 5] = [
    ("normalization", 1e-8),
    ("eigen_residual", 1e-6),
    ("invariant", 1e-6),
    ("schroedinger_residual", 1e-4),
    ("phase_routes", 1e-6),
];

fn row(index: usize, n: u32, t: f64, value: f64) -> CheckRow {
    let (check, threshold) = CHECKS[index];
    CheckRow {
        check,
        n,
        t,
        // NaN must fail, so it is reported as +inf.
        value: if value.is_nan() { f64::INFINITY } else { value },
        threshold,
    }
}

/// Checks at one (n, t). `truth` defines the expected state; the samples are
/// drawn from `drawn`, which differs only when the fault hook is active.
fn grid_checks(
    truth: &InitialData,
    drawn: &InitialData,
    n: u32,
    t: f64,
    grid: GridSpec,
) -> Result<Vec<CheckRow>> {
    let state = params::evaluate(drawn, t)?;
    let quad_grid = match grid {
        GridSpec::Fixed(g) => g,
        GridSpec::Auto => fitted(&state, n, QUADRATURE_SPACING / state.beta.abs())?,
    };
    let sample = wavefunction::sample(drawn, n, &quad_grid, t)?;
    let norm = sample.norm_sqr()?;
    let eigen = eigen_residual(truth, &sample)?;
    let e = invariant_expectation_of(truth, &sample)?.value;

    let states = [t - RESIDUAL_DT, t, t + RESIDUAL_DT]
        .map(|s| params::evaluate(drawn, s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let res_grid = Grid::covering(&states, n, RESIDUAL_SPACING)?;
    let [before, now, after] =
        [t - RESIDUAL_DT, t, t + RESIDUAL_DT].map(|s| wavefunction::sample(drawn, n, &res_grid, s));
    let residual = residual_from_samples(&before?, &now?, &after?, RESIDUAL_DT)?;

    Ok(vec![
        row(0, n, t, (norm - truth.norm_sqr()).abs()),
        row(1, n, t, eigen),
        row(2, n, t, (e - (f64::from(n) + 0.5)).abs()),
        row(3, n, t, residual),
    ])
}

pub fn verify_rows(config: &RunConfig) -> Result<Vec<CheckRow>> {
    let data = config.data;
    let perturbed = InitialData {
        delta0: data.delta0 + FAULT_SHIFT,
        ..data
    };
    let times = config.times();
    let jobs: Vec<(u32, f64)> = config
        .n_list
        .iter()
        .flat_map(|&n| times.iter().map(move |&t| (n, t)))
        .collect();
    let grid_rows = jobs
        .par_iter()
        .map(|&(n, t)| {
            let drawn = if config.inject_fault && t >= 0.5 * config.t_end {
                &perturbed
            } else {
                &data
            };
            grid_checks(&data, drawn, n, t, config.grid)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(jobs.len() * CHECKS.len());
    let mut grid_rows = grid_rows.into_iter();
    for &n in &config.n_list {
        let phases = compare_routes(&data, n, &times, &OdeOptions::default())?;
        for p in phases {
            rows.extend(grid_rows.next().expect("one entry per (n, t)"));
            rows.push(row(4, n, p.t, p.max_pairwise_diff()));
        }
    }
    Ok(rows)
}

pub fn verify_csv(rows: &[CheckRow]) -> String {
    let mut out = String::from("check,n,t,value,threshold,status\n");
    for r in rows {
        push_row(
            &mut out,
            &[
                r.check.to_string(),
                r.n.to_string(),
                fmt_g(r.t),
                fmt_g(r.value),
                fmt_g(r.threshold),
                if r.passed() { "pass" } else { "fail" }.to_string(),
            ],
        );
    }
    out
}

/// Human-readable per-check summary.
pub fn verify_table(rows: &[CheckRow]) -> String {
    let mut out = format!(
        "{:<22} {:>6} {:>6} {:>12} {:>10}  {}\n",
        "check", "cases", "failed", "worst", "threshold", "status"
    );
    for (name, threshold) in CHECKS {
        let mine: Vec<&CheckRow> = rows.iter().filter(|r| r.check == name).collect();
        let failed = mine.iter().filter(|r| !r.passed()).count();
        let worst = mine.iter().map(|r| r.value).fold(0.0, f64::max);
        out.push_str(&format!(
            "{:<22} {:>6} {:>6} {:>12.3e} {:>10.0e}  {}\n",
            name,
            mine.len(),
            failed,
            worst,
            threshold,
            if failed == 0 { "PASS" } else { "FAIL" }
        ));
    }
    out
}
