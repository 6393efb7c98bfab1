//! Berry phase θₙ(t) of the dynamic oscillator states, by three routes:
//!
//! * `Ode`: integrate the phase rate
//!   dθ/dt = −β⁻²(ε² + n + ½) dα/dt + εβ⁻¹ dδ/dt − dκ/dt
//!   with finite-difference parameter derivatives and classical RK4;
//! * `ClosedForm`: the integrated elementary-function expression;
//! * `GammaRoute`: (2n + 1)(γ(t) − γ₀) + ⟨H⟩ t.
//!
//! Every route is anchored at θₙ(0) = 0, and both closed forms use the
//! continuous branch of their arctangents so they stay smooth across
//! t = π/2 + kπ.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::observables::hamiltonian_expectation_closed;
use crate::par;
use crate::params::{self, InitialData, DEFAULT_DERIVATIVE_STEP};

/// Largest spacing accepted between consecutive times handed to
/// [`integrate_phase_ode`].
pub const MAX_SAMPLE_SPACING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Ode,
    ClosedForm,
    GammaRoute,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Ode => "ode",
            Route::ClosedForm => "closed_form",
            Route::GammaRoute => "gamma_route",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// θₙ sampled at `times` (starting at 0) by one route.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub data: InitialData,
    pub n: u32,
    pub route: Route,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl PhaseTrace {
    /// Largest |θ(tᵢ₊₁) − θ(tᵢ)|.
    pub fn max_jump(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }
}

/// Integrator settings for the ODE route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Largest RK4 step.
    pub step: f64,
    /// Five-point stencil step for dα/dt, dδ/dt, dκ/dt.
    pub derivative_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            derivative_step: DEFAULT_DERIVATIVE_STEP,
        }
    }
}

/// dθₙ/dt at `t` with the default stencil step.
pub fn phase_derivative(data: &InitialData, n: u32, t: f64) -> Result<f64> {
    phase_derivative_with_step(data, n, t, DEFAULT_DERIVATIVE_STEP)
}

pub fn phase_derivative_with_step(data: &InitialData, n: u32, t: f64, h: f64) -> Result<f64> {
    let p = params::evaluate(data, t)?;
    let d = params::parameter_derivatives(data, t, h)?;
    let order = f64::from(n) + 0.5;
    Ok(-(p.eps * p.eps + order) * d.alpha / (p.beta * p.beta) + p.eps / p.beta * d.delta - d.kappa)
}

fn rk4_step<F>(f: &F, t: f64, y: f64, h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, y + 0.5 * h * k1)?;
    let k3 = f(t + 0.5 * h, y + 0.5 * h * k2)?;
    let k4 = f(t + h, y + h * k3)?;
    Ok(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

fn check_times(times: &[f64], max_spacing: f64) -> Result<()> {
    match times.first() {
        None => return Err(Error::InvalidTimes("no times given".into())),
        Some(&t0) if t0 != 0.0 => {
            return Err(Error::InvalidTimes(format!("must start at 0, starts at {t0}")))
        }
        _ => {}
    }
    for w in times.windows(2) {
        let gap = w[1] - w[0];
        if !w[1].is_finite() || gap <= 0.0 {
            return Err(Error::InvalidTimes(format!(
                "must be finite and strictly increasing, got {} after {}",
                w[1], w[0]
            )));
        }
        if gap > max_spacing * (1.0 + 1e-9) {
            return Err(Error::InvalidTimes(format!(
                "spacing {gap} between {} and {} exceeds {max_spacing}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// θₙ at each of `times` by integrating the phase rate from 0.
pub fn integrate_phase_ode(data: &InitialData, n: u32, times: &[f64]) -> Result<PhaseTrace> {
    integrate_phase_ode_with(data, n, times, &OdeOptions::default())
}

pub fn integrate_phase_ode_with(
    data: &InitialData,
    n: u32,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<PhaseTrace> {
    data.validate()?;
    check_times(times, MAX_SAMPLE_SPACING)?;
    if !(opts.step > 0.0 && opts.step.is_finite()) {
        return Err(Error::InvalidStep(opts.step));
    }
    let rate = |t: f64, _theta: f64| phase_derivative_with_step(data, n, t, opts.derivative_step);
    let mut values = Vec::with_capacity(times.len());
    let mut theta = 0.0;
    values.push(theta);
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let substeps = (span / opts.step).ceil().max(1.0) as usize;
        let h = span / substeps as f64;
        for k in 0..substeps {
            theta = rk4_step(&rate, w[0] + h * k as f64, theta, h)?;
        }
        values.push(theta);
    }
    Ok(PhaseTrace {
        data: *data,
        n,
        route: Route::Ode,
        times: times.to_vec(),
        values,
    })
}

/// Continuous branch of arctan[(2α₀ + (4α₀² + β₀⁴) tan t)/β₀²].
///
/// The argument equals the slope of P(t) = (β₀² cos t, 2α₀ cos t + c sin t),
/// a positively oriented linear image of the unit circle, so the continuous
/// arctangent is the continuous angle of P. That angle is computed by period
/// reduction, which sidesteps tan t at its poles.
fn continuous_arctan(data: &InitialData, t: f64) -> f64 {
    let b2 = data.beta0 * data.beta0;
    let c = 4.0 * data.alpha0 * data.alpha0 + b2 * b2;
    let base = arctan_at_zero(data);
    let periods = (t / PI).floor();
    let r = t - periods * PI;
    let (s, co) = r.sin_cos();
    let mut angle = (2.0 * data.alpha0 * co + c * s).atan2(b2 * co);
    // On one period the angle runs over [base, base + π); atan2 reports the
    // upper part of that range shifted down by 2π.
    if angle < base - PI / 2.0 {
        angle += 2.0 * PI;
    }
    periods * PI + angle
}

/// arctan(2α₀/β₀²), written as atan2 so it is bit-identical to
/// `continuous_arctan(data, 0)`.
fn arctan_at_zero(data: &InitialData) -> f64 {
    (2.0 * data.alpha0).atan2(data.beta0 * data.beta0)
}

/// The three pieces the closed form is assembled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormIngredients {
    /// (ε/β)²α − εδ/β + κ, in its simplified trigonometric form.
    pub constant_term: f64,
    /// An antiderivative of α d(ε/β)²/dt − δ d(ε/β)/dt (constant as printed,
    /// not anchored).
    pub free_integral: f64,
    /// ∫₀ᵗ β⁻² dα/dt, continuous branch.
    pub n_integral: f64,
}

pub fn closed_form_ingredients(data: &InitialData, t: f64) -> ClosedFormIngredients {
    let InitialData {
        alpha0: a0,
        beta0: b0,
        delta0: d0,
        eps0: e0,
        kappa0: k0,
        ..
    } = *data;
    let b2 = b0 * b0;
    let drift = data.drift();
    let (s2, c2) = (2.0 * t).sin_cos();
    let oscillating = 2.0 * e0 * drift * c2 + (drift * drift - e0 * e0) * s2;
    let scale = 4.0 * b2;
    let constant_term = (2.0 * b0 * (2.0 * b0 * k0 - d0 * e0) + oscillating) / scale;
    let free_integral = (2.0 * t * (drift * drift + e0 * e0) + oscillating) / scale;
    let c = 4.0 * a0 * a0 + b2 * b2;
    let n_integral =
        -t * (c + 1.0) / (2.0 * b2) + continuous_arctan(data, t) - arctan_at_zero(data);
    ClosedFormIngredients {
        constant_term,
        free_integral,
        n_integral,
    }
}

/// θₙ(t) in closed form.
pub fn closed_form_phase(data: &InitialData, n: u32, t: f64) -> f64 {
    let InitialData {
        alpha0: a0,
        beta0: b0,
        eps0: e0,
        ..
    } = *data;
    let b2 = b0 * b0;
    let c = 4.0 * a0 * a0 + b2 * b2;
    let order = f64::from(n) + 0.5;
    let drift = data.drift();
    let bracket = continuous_arctan(data, t) - arctan_at_zero(data) - t * (c + 1.0) / (2.0 * b2);
    -order * bracket + t * (drift * drift + e0 * e0) / (2.0 * b2)
}

/// θₙ(t) = (2n + 1)(γ(t) − γ₀) + ⟨H⟩ t, with γ on its continuous branch.
pub fn gamma_route_phase(data: &InitialData, n: u32, t: f64) -> f64 {
    let gamma_shift = -0.5 * params::winding_angle(data, t);
    (2.0 * f64::from(n) + 1.0) * gamma_shift + hamiltonian_expectation_closed(data, n) * t
}

pub fn closed_form_trace(data: &InitialData, n: u32, times: &[f64]) -> PhaseTrace {
    PhaseTrace {
        data: *data,
        n,
        route: Route::ClosedForm,
        times: times.to_vec(),
        values: times.iter().map(|&t| closed_form_phase(data, n, t)).collect(),
    }
}

pub fn gamma_route_trace(data: &InitialData, n: u32, times: &[f64]) -> PhaseTrace {
    PhaseTrace {
        data: *data,
        n,
        route: Route::GammaRoute,
        times: times.to_vec(),
        values: times.iter().map(|&t| gamma_route_phase(data, n, t)).collect(),
    }
}

/// One time sample of all three routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRow {
    pub t: f64,
    pub ode: f64,
    pub closed_form: f64,
    pub gamma_route: f64,
}

impl PhaseRow {
    pub fn max_pairwise_diff(&self) -> f64 {
        let a = (self.ode - self.closed_form).abs();
        let b = (self.closed_form - self.gamma_route).abs();
        let c = (self.ode - self.gamma_route).abs();
        a.max(b).max(c)
    }
}

/// Inserts extra points so no gap exceeds `max_spacing`; returns the dense
/// times and the index of each original time within them.
fn refine_times(times: &[f64], max_spacing: f64) -> (Vec<f64>, Vec<usize>) {
    let mut dense = vec![0.0];
    let mut index = Vec::with_capacity(times.len());
    let mut last = 0.0;
    for &t in times {
        if t > last {
            let parts = ((t - last) / max_spacing).ceil() as usize;
            let h = (t - last) / parts as f64;
            dense.extend((1..parts).map(|k| last + h * k as f64));
            dense.push(t);
            last = t;
        }
        index.push(dense.len() - 1);
    }
    (dense, index)
}

/// All three routes at arbitrary non-negative, non-decreasing `times`; the
/// ODE route is integrated on a refined grid and read off at each time.
pub fn compare_routes(data: &InitialData, n: u32, times: &[f64], opts: &OdeOptions) -> Result<Vec<PhaseRow>> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidTimes("times must be finite, non-negative and sorted".into()));
    }
    let (dense, index) = refine_times(times, MAX_SAMPLE_SPACING);
    let ode = integrate_phase_ode_with(data, n, &dense, opts)?;
    Ok(times
        .iter()
        .zip(index)
        .map(|(&t, i)| PhaseRow {
            t,
            ode: ode.values[i],
            closed_form: closed_form_phase(data, n, t),
            gamma_route: gamma_route_phase(data, n, t),
        })
        .collect())
}

/// [`compare_routes`] for many (data, n) jobs at once.
pub fn compare_routes_many(
    jobs: &[(InitialData, u32)],
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<PhaseRow>>> {
    par::map_items(jobs, |(data, n)| compare_routes(data, *n, times, opts))
        .into_iter()
        .collect()
}

/// Intervals of the Figure 1 series over [0, 2π], i.e. a spacing of π/200.
pub const FIGURE1_INTERVALS: usize = 400;

/// (t, θ₀(t), θ₁(t)) by the closed form at tᵢ = i·π/200, i = 0..=400.
pub fn figure1_rows(data: &InitialData) -> Vec<(f64, f64, f64)> {
    let spacing = PI / 200.0;
    (0..=FIGURE1_INTERVALS)
        .map(|i| {
            let t = spacing * i as f64;
            (t, closed_form_phase(data, 0, t), closed_form_phase(data, 1, t))
        })
        .collect()
}
