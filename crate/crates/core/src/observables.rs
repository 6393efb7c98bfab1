//! Quadrature and expectation values: the quadratic invariant
//! E = ½[(p − 2αx − δ)²/β² + (βx + ε)²], its eigen-residual, and ⟨H⟩.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{self, InitialData};
use crate::par;
use crate::wavefunction::{self, Grid, WaveSample};

/// Stencil half-width of the fourth-order differences; this many points at
/// each edge are left out of operator applications.
const HALO: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationReport {
    pub t: f64,
    pub n: u32,
    pub value: f64,
    /// |Simpson − trapezoid| on the same samples, scaled like `value`.
    pub quadrature_error_estimate: f64,
}

/// Composite Simpson rule over the whole grid.
pub fn integrate(values: &[f64], grid: &Grid) -> Result<f64> {
    if values.len() != grid.count() {
        return Err(Error::LengthMismatch {
            expected: grid.count(),
            actual: values.len(),
        });
    }
    if values.len().is_multiple_of(2) {
        return Err(Error::EvenCount(values.len()));
    }
    let last = values.len() - 1;
    let inner: f64 = values[1..last]
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    Ok(grid.dx() / 3.0 * (values[0] + inner + values[last]))
}

fn trapezoid(values: &[f64], grid: &Grid) -> f64 {
    let last = values.len() - 1;
    grid.dx() * (values[1..last].iter().sum::<f64>() + 0.5 * (values[0] + values[last]))
}

/// First and second derivative by five-point central differences at interior
/// index `i` (requires `HALO ≤ i < len − HALO`).
#[inline]
fn derivatives(v: &[Complex64], i: usize, dx: f64) -> (Complex64, Complex64) {
    let (m2, m1, c, p1, p2) = (v[i - 2], v[i - 1], v[i], v[i + 1], v[i + 2]);
    let first = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * dx);
    let second = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * dx * dx);
    (first, second)
}

/// E ψ with the parameters at `sample.t`.
///
/// With g = 2αx + δ the square expands exactly to
/// (p − g)²ψ = −ψ'' + 2i g ψ' + 2iα ψ + g² ψ, which is applied term by term;
/// the result is zero on the `HALO` points next to each edge.
pub fn apply_invariant(data: &InitialData, sample: &WaveSample) -> Result<WaveSample> {
    let state = params::evaluate(data, sample.t)?;
    let grid = sample.grid;
    let count = grid.count();
    if count < 2 * HALO + 1 {
        return Err(Error::InvalidGrid(format!(
            "need at least {} points for the invariant stencil",
            2 * HALO + 1
        )));
    }
    let dx = grid.dx();
    let psi = &sample.values;
    let i = Complex64::i();
    let inv_beta2 = 1.0 / (state.beta * state.beta);
    let values = par::map_range(count, |k| {
        if k < HALO || k >= count - HALO {
            return Complex64::new(0.0, 0.0);
        }
        let x = grid.x(k);
        let (d1, d2) = derivatives(psi, k, dx);
        let g = 2.0 * state.alpha * x + state.delta;
        let kinetic = -d2 + 2.0 * i * g * d1 + 2.0 * i * state.alpha * psi[k] + g * g * psi[k];
        let xi = state.beta * x + state.eps;
        0.5 * (kinetic * inv_beta2 + xi * xi * psi[k])
    });
    Ok(WaveSample {
        values,
        ..sample.clone()
    })
}

/// ‖Eψ − (n + ½)ψ‖ / ‖ψ‖ over the stencil interior.
pub fn eigen_residual(data: &InitialData, sample: &WaveSample) -> Result<f64> {
    let applied = apply_invariant(data, sample)?;
    let eigenvalue = f64::from(sample.n) + 0.5;
    let count = sample.grid.count();
    let (mut num, mut den) = (0.0, 0.0);
    for k in HALO..count - HALO {
        num += (applied.values[k] - eigenvalue * sample.values[k]).norm_sqr();
        den += sample.values[k].norm_sqr();
    }
    Ok((num / den).sqrt())
}

/// ⟨ψ|Eψ⟩ / ⟨ψ|ψ⟩ for an arbitrary sample, e.g. a numerically propagated one.
pub fn invariant_expectation_of(data: &InitialData, sample: &WaveSample) -> Result<ExpectationReport> {
    let applied = apply_invariant(data, sample)?;
    let integrand: Vec<f64> = sample
        .values
        .iter()
        .zip(&applied.values)
        .map(|(p, e)| (p.conj() * e).re)
        .collect();
    ratio_report(sample, &integrand)
}

/// Quadrature ⟨E⟩ for ψₙ at time `t`. Equals n + ½ for every t.
pub fn invariant_expectation(data: &InitialData, n: u32, grid: &Grid, t: f64) -> Result<ExpectationReport> {
    let sample = wavefunction::sample(data, n, grid, t)?;
    invariant_expectation_of(data, &sample)
}

/// ½(⟨p²⟩ + ⟨x²⟩) for an arbitrary sample.
pub fn hamiltonian_expectation_of(sample: &WaveSample) -> Result<ExpectationReport> {
    let grid = sample.grid;
    let count = grid.count();
    if count < 2 * HALO + 1 {
        return Err(Error::InvalidGrid("grid too small for the kinetic stencil".into()));
    }
    let dx = grid.dx();
    let psi = &sample.values;
    let integrand = par::map_range(count, |k| {
        let x = grid.x(k);
        let potential = x * x * psi[k].norm_sqr();
        let kinetic = if k < HALO || k >= count - HALO {
            0.0
        } else {
            let (_, d2) = derivatives(psi, k, dx);
            (psi[k].conj() * -d2).re
        };
        0.5 * (kinetic + potential)
    });
    ratio_report(sample, &integrand)
}

/// Quadrature ⟨H⟩ for ψₙ at time `t`.
pub fn hamiltonian_expectation(data: &InitialData, n: u32, grid: &Grid, t: f64) -> Result<ExpectationReport> {
    let sample = wavefunction::sample(data, n, grid, t)?;
    hamiltonian_expectation_of(&sample)
}

/// ⟨H⟩ in closed form:
/// (n + ½)(1 + 4α₀² + β₀⁴)/(2β₀²) + ((2α₀ε₀ − β₀δ₀)² + ε₀²)/(2β₀²).
pub fn hamiltonian_expectation_closed(data: &InitialData, n: u32) -> f64 {
    let b2 = data.beta0 * data.beta0;
    let order = f64::from(n) + 0.5;
    let drift = data.drift();
    order * (1.0 + 4.0 * data.alpha0 * data.alpha0 + b2 * b2) / (2.0 * b2)
        + (drift * drift + data.eps0 * data.eps0) / (2.0 * b2)
}

fn ratio_report(sample: &WaveSample, integrand: &[f64]) -> Result<ExpectationReport> {
    let grid = sample.grid;
    let density: Vec<f64> = sample.values.iter().map(|v| v.norm_sqr()).collect();
    let norm = integrate(&density, &grid)?;
    let numerator = integrate(integrand, &grid)?;
    let value = numerator / norm;
    let coarse = trapezoid(integrand, &grid) / trapezoid(&density, &grid);
    Ok(ExpectationReport {
        t: sample.t,
        n: sample.n,
        value,
        quadrature_error_estimate: (value - coarse).abs(),
    })
}

/// [`invariant_expectation`] for every (n, t) pair, in row-major order over
/// `ns × ts`.
pub fn invariant_expectations(
    data: &InitialData,
    ns: &[u32],
    ts: &[f64],
    grid: &Grid,
) -> Result<Vec<ExpectationReport>> {
    let jobs: Vec<(u32, f64)> = ns.iter().flat_map(|&n| ts.iter().map(move |&t| (n, t))).collect();
    par::map_items(&jobs, |&(n, t)| invariant_expectation(data, n, grid, t))
        .into_iter()
        .collect()
}
