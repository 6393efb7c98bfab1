//! Exit criteria. Each test prints one `[PASS]`/`[FAIL]` line with the
//! measured quantity against its pinned threshold, then asserts.
//!
//! Run with `cargo test -p berry-core --test acceptance -- --nocapture` to
//! see the lines.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use berry_core::berry_phase::{
    closed_form_phase, compare_routes, compare_routes_many, figure1_rows, integrate_phase_ode_with,
    OdeOptions,
};
use berry_core::observables::{eigen_residual, invariant_expectation_of};
use berry_core::params::{self, InitialData};
use berry_core::propagator::{propagate_with_checkpoints, PropagationConfig};
use berry_core::wavefunction::{self, schroedinger_residual, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Criterion {
    id: &'static str,
    title: &'static str,
    started: Instant,
    budget: Duration,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn start(id: &'static str, title: &'static str, budget_secs: u64) -> Self {
        Self {
            id,
            title,
            started: Instant::now(),
            budget: Duration::from_secs(budget_secs),
            checks: Vec::new(),
        }
    }

    /// Records `measured <= limit`.
    fn at_most(&mut self, what: &str, measured: f64, limit: f64) {
        self.checks
            .push((format!("{what} = {measured:.3e} (<= {limit:.0e})"), measured <= limit));
    }

    fn within(&mut self, what: &str, measured: f64, lo: f64, hi: f64) {
        self.checks.push((
            format!("{what} = {measured:.4} (in [{lo}, {hi}])"),
            (lo..=hi).contains(&measured),
        ));
    }

    fn finish(mut self) {
        let elapsed = self.started.elapsed();
        self.checks.push((
            format!("runtime = {:.2}s (< {}s)", elapsed.as_secs_f64(), self.budget.as_secs()),
            elapsed < self.budget,
        ));
        let ok = self.checks.iter().all(|(_, pass)| *pass);
        let detail: Vec<&str> = self.checks.iter().map(|(d, _)| d.as_str()).collect();
        println!(
            "[{}] {} {}: {}",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            detail.join("; ")
        );
        for (d, pass) in &self.checks {
            assert!(*pass, "{} failed: {d}", self.id);
        }
    }
}

fn uniform(end: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| end * i as f64 / (count - 1) as f64).collect()
}

#[test]
fn ac1_textbook_zero_phase() {
    let mut c = Criterion::start("AC1", "textbook zero phase", 1);
    let data = InitialData::textbook();
    let times = uniform(2.0 * PI, 200);
    let mut worst: f64 = 0.0;
    for n in 0..=2 {
        for row in compare_routes(&data, n, &times, &OdeOptions::default()).unwrap() {
            worst = worst
                .max(row.ode.abs())
                .max(row.closed_form.abs())
                .max(row.gamma_route.abs());
        }
    }
    c.at_most("max |theta|", worst, 1e-8);
    c.finish();
}

#[test]
fn ac2_shape_preserving_n_independence() {
    let mut c = Criterion::start("AC2", "shape-preserving n-independence", 1);
    let data = InitialData::new(1.0, 0.0, 1.0, 0.0, 1.0, 0.5, 0.0).unwrap();
    let (mut spread, mut off): (f64, f64) = (0.0, 0.0);
    for t in uniform(2.0 * PI, 200) {
        let expected = t * (1.0 + 0.25) / 2.0;
        let base = closed_form_phase(&data, 0, t);
        for n in 0..=5 {
            let v = closed_form_phase(&data, n, t);
            spread = spread.max((v - base).abs());
            off = off.max((v - expected).abs());
        }
    }
    c.at_most("max |theta_n - theta_0|", spread, 1e-12);
    c.at_most("max |theta_n - t(d0^2+e0^2)/2|", off, 1e-12);
    c.finish();
}

#[test]
fn ac3_figure1_reproduction() {
    let mut c = Criterion::start("AC3", "Figure 1 reproduction", 5);
    let data = InitialData::figure1();
    let rows = figure1_rows(&data);
    let (t_pi, theta0, theta1) = rows[200];
    assert!((t_pi - PI).abs() < 1e-15);
    c.at_most("|theta0(pi) - 97pi/144|", (theta0 - 97.0 * PI / 144.0).abs(), 1e-6);
    c.at_most("|theta1(pi) - 49pi/48|", (theta1 - 49.0 * PI / 48.0).abs(), 1e-6);

    // The golden values are only trusted because the fine ODE route agrees.
    let fine = OdeOptions {
        step: 1e-4,
        ..OdeOptions::default()
    };
    let times = uniform(PI, 401);
    let ode0 = integrate_phase_ode_with(&data, 0, &times, &fine).unwrap();
    let ode1 = integrate_phase_ode_with(&data, 1, &times, &fine).unwrap();
    let agree = (ode0.values[400] - theta0)
        .abs()
        .max((ode1.values[400] - theta1).abs());
    c.at_most("|ode(step 1e-4) - closed| at pi", agree, 1e-8);

    let jump = rows
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs().max((w[1].2 - w[0].2).abs()))
        .fold(0.0, f64::max);
    c.at_most("max adjacent jump", jump, 0.1);
    c.finish();
}

#[test]
fn ac4_three_route_equivalence() {
    let mut c = Criterion::start("AC4", "three-route equivalence sweep", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE44);
    let mut jobs = Vec::new();
    for _ in 0..20 {
        let data = InitialData::new(
            1.0,
            rng.gen_range(-2.0..=2.0),
            rng.gen_range(0.3..=3.0),
            rng.gen_range(-10.0..=10.0),
            rng.gen_range(-2.0..=2.0),
            rng.gen_range(-2.0..=2.0),
            rng.gen_range(-10.0..=10.0),
        )
        .unwrap()
        .normalized();
        for n in 0..=3 {
            jobs.push((data, n));
        }
    }
    let times = uniform(2.0 * PI, 50);
    let table = compare_routes_many(&jobs, &times, &OdeOptions::default()).unwrap();
    let (mut ode_closed, mut closed_gamma): (f64, f64) = (0.0, 0.0);
    for rows in &table {
        for r in rows {
            ode_closed = ode_closed.max((r.ode - r.closed_form).abs());
            closed_gamma = closed_gamma.max((r.closed_form - r.gamma_route).abs());
        }
    }
    c.at_most("max |ode - closed|", ode_closed, 1e-6);
    c.at_most("max |closed - gamma|", closed_gamma, 1e-9);
    c.finish();
}

#[test]
fn ac5_invariant_eigenproblem_and_conservation() {
    let mut c = Criterion::start("AC5", "invariant eigenproblem and conservation", 60);
    let grid = Grid::new(-14.0, 14.0, 2801).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xE16E);
    let (mut worst_e, mut worst_res): (f64, f64) = (0.0, 0.0);
    let mut accepted = 0;
    while accepted < 10 {
        let data = InitialData::new(
            1.0,
            rng.gen_range(-0.2..=0.2),
            rng.gen_range(0.8..=1.25),
            rng.gen_range(-3.0..=3.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-3.0..=3.0),
        )
        .unwrap()
        .normalized();
        let times: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        // Only parameter sets the fixed box can hold for every n ≤ 5.
        let fits = times.iter().all(|&t| {
            let state = params::evaluate(&data, t).unwrap();
            grid.check_truncation(&state, 5).is_ok()
        });
        if !fits {
            continue;
        }
        accepted += 1;
        for n in 0..=5 {
            for &t in &times {
                let sample = wavefunction::sample(&data, n, &grid, t).unwrap();
                let e = invariant_expectation_of(&data, &sample).unwrap();
                worst_e = worst_e.max((e.value - (f64::from(n) + 0.5)).abs());
                worst_res = worst_res.max(eigen_residual(&data, &sample).unwrap());
            }
        }
    }
    c.at_most("max |<E> - (n+1/2)|", worst_e, 1e-6);
    c.at_most("max eigen-residual", worst_res, 1e-6);
    c.finish();
}

#[test]
fn ac6_schroedinger_residual() {
    let mut c = Criterion::start("AC6", "Schroedinger residual convergence", 60);
    let sets = [
        InitialData::textbook(),
        InitialData::figure1(),
        InitialData::new(1.0, 0.4, 0.9, 0.3, 1.1, -0.6, 0.2).unwrap().normalized(),
        InitialData::new(1.0, -0.5, 1.3, -1.0, -0.7, 0.8, 1.5).unwrap().normalized(),
        InitialData::new(1.0, 0.2, 0.6, 2.0, 0.5, 0.3, -0.4).unwrap().normalized(),
    ];
    let (t, dt) = (0.7, 1e-4);
    let mut worst: f64 = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for data in &sets {
        let states: Vec<_> = [t - dt, t, t + dt]
            .iter()
            .map(|&s| params::evaluate(data, s).unwrap())
            .collect();
        for n in 0..=3 {
            let grid = Grid::covering(&states, n, 0.0025).unwrap();
            let base = schroedinger_residual(data, n, &grid, t, dt).unwrap();
            let half = schroedinger_residual(data, n, &grid.refined(), t, dt / 2.0).unwrap();
            worst = worst.max(base);
            lo = lo.min(base / half);
            hi = hi.max(base / half);
        }
    }
    c.at_most("max baseline residual", worst, 1e-4);
    c.within("min halving ratio", lo, 3.5, 4.5);
    c.within("max halving ratio", hi, 3.5, 4.5);
    c.finish();
}

#[test]
fn ac7_propagator_cross_validation() {
    let mut c = Criterion::start("AC7", "Crank-Nicolson cross-validation", 120);
    let grid = Grid::new(-12.0, 12.0, 2401).unwrap();
    let config = PropagationConfig::new(grid, 5e-4, 1.0).unwrap();
    let (mut err, mut drift, mut invariant): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for data in [InitialData::textbook(), InitialData::figure1()] {
        for n in 0..=1 {
            let run = propagate_with_checkpoints(&data, n, &config, 50).unwrap();
            let first = run[0];
            let last = run.last().unwrap();
            assert!((last.t - 1.0).abs() < 1e-12);
            err = err.max(last.max_error);
            for cp in &run {
                drift = drift.max((cp.norm_sqr - first.norm_sqr).abs());
                invariant = invariant.max((cp.invariant - (f64::from(n) + 0.5)).abs());
            }
        }
    }
    c.at_most("max |psi_cn - psi_exact| at t=1", err, 5e-4);
    c.at_most("max norm drift", drift, 1e-10);
    c.at_most("max |<E>_cn - (n+1/2)|", invariant, 1e-4);
    c.finish();
}

#[test]
fn ac8_normalization_law() {
    let mut c = Criterion::start("AC8", "normalization law", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0A0A);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let data = InitialData::new(
            rng.gen_range(0.3..=3.0),
            rng.gen_range(-2.0..=2.0),
            rng.gen_range(0.3..=3.0),
            rng.gen_range(-5.0..=5.0),
            rng.gen_range(-2.0..=2.0),
            rng.gen_range(-2.0..=2.0),
            rng.gen_range(-5.0..=5.0),
        )
        .unwrap();
        let t = rng.gen_range(0.0..2.0 * PI);
        let state = params::evaluate(&data, t).unwrap();
        for n in 0..=10 {
            let grid = Grid::covering(&[state], n, 0.05 / state.beta.abs()).unwrap();
            let norm = wavefunction::sample(&data, n, &grid, t).unwrap().norm_sqr().unwrap();
            worst = worst.max((norm - 1.0 / (data.beta0 * data.mu0)).abs());
        }
    }
    c.at_most("max |norm^2 - 1/(b0 mu0)|", worst, 1e-8);
    c.finish();
}
