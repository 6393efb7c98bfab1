//! Pointwise and gridded evaluation of the dynamic oscillator states, and a
//! finite-difference check that they solve `2iψ_t + ψ_xx − x²ψ = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{self, InitialData, ParameterState};
use crate::par;
use crate::special_functions::weighted_hermite;

/// Gaussian tail allowance, in units of the scaled coordinate βx + ε, past
/// the classical turning point √(2n+1).
pub const TAIL_MARGIN: f64 = 8.0;

/// Uniform grid on `[x_min, x_max]` with `count` points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    count: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if count < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 points, got {count}")));
        }
        Ok(Self {
            x_min,
            x_max,
            count,
        })
    }

    /// Smallest odd-count grid with spacing at most `spacing` that passes
    /// [`Grid::check_truncation`] for every given state.
    pub fn covering(states: &[ParameterState], n: u32, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidStep(spacing));
        }
        let reach = required_reach(n) + 0.5;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in states {
            let a = (-reach - s.eps) / s.beta;
            let b = (reach - s.eps) / s.beta;
            lo = lo.min(a.min(b));
            hi = hi.max(a.max(b));
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidGrid("no states to cover".into()));
        }
        let mut intervals = ((hi - lo) / spacing).ceil() as usize;
        if intervals % 2 == 1 {
            intervals += 1;
        }
        Self::new(lo, hi, intervals.max(2) + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.count - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.count - 1 {
            self.x_max
        } else {
            self.x_min + self.dx() * i as f64
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.x(i))
    }

    /// Same interval at double resolution.
    pub fn refined(&self) -> Self {
        Self {
            count: 2 * self.count - 1,
            ..*self
        }
    }

    /// Distance of the nearer edge from the packet centre in scaled units,
    /// min over both edges of |β x_edge + ε|.
    pub fn truncation_reach(&self, state: &ParameterState) -> f64 {
        let left = (state.beta * self.x_min + state.eps).abs();
        let right = (state.beta * self.x_max + state.eps).abs();
        left.min(right)
    }

    /// Rejects grids whose edges cut into the Gaussian tail of ψₙ at this
    /// state, which would make quadrature over the grid untrustworthy.
    pub fn check_truncation(&self, state: &ParameterState, n: u32) -> Result<()> {
        let reach = self.truncation_reach(state);
        let required = required_reach(n);
        // The packet must also lie between the edges, not beyond one of them.
        let inside = (state.beta * self.x_min + state.eps).signum()
            != (state.beta * self.x_max + state.eps).signum();
        if reach < required || !inside {
            return Err(Error::TruncatedGrid {
                x_min: self.x_min,
                x_max: self.x_max,
                t: state.t,
                reach,
                required,
            });
        }
        Ok(())
    }
}

/// √(2n+1) + [`TAIL_MARGIN`].
pub fn required_reach(n: u32) -> f64 {
    (2.0 * f64::from(n) + 1.0).sqrt() + TAIL_MARGIN
}

/// Complex wavefunction values on a grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSample {
    pub grid: Grid,
    pub t: f64,
    pub n: u32,
    pub values: Vec<Complex64>,
}

impl WaveSample {
    pub fn new(grid: Grid, t: f64, n: u32, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::LengthMismatch {
                expected: grid.count(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, t, n, values })
    }

    /// ∫|ψ|² dx by composite Simpson.
    pub fn norm_sqr(&self) -> Result<f64> {
        let density: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        crate::observables::integrate(&density, &self.grid)
    }

    /// dx·Σ|ψᵢ|², the norm the Crank–Nicolson step conserves exactly.
    pub fn discrete_norm_sqr(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Pointwise product with `f(x)`. Handy for building non-solutions.
    pub fn modulated(&self, f: impl Fn(f64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * f(self.grid.x(i)))
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }
}

/// ψₙ(x) at already-evaluated parameters.
///
/// For μ < 0 the root √μ is taken as i√|μ|, so the whole state picks up the
/// constant factor −i; densities are unaffected.
pub fn psi_at(state: &ParameterState, n: u32, x: f64) -> Complex64 {
    let order = 2.0 * f64::from(n) + 1.0;
    let phase = state.alpha * x * x + state.delta * x + state.kappa + order * state.gamma;
    let amplitude = weighted_hermite(n, state.beta * x + state.eps) / state.mu.abs().sqrt();
    let value = Complex64::from_polar(amplitude, phase);
    if state.mu < 0.0 {
        value * Complex64::new(0.0, -1.0)
    } else {
        value
    }
}

/// ψₙ(x, t).
pub fn psi(data: &InitialData, n: u32, x: f64, t: f64) -> Result<Complex64> {
    let state = params::evaluate(data, t)?;
    Ok(psi_at(&state, n, x))
}

/// ψₙ on every grid point at time `t`, rejecting grids that truncate the
/// state (see [`Grid::check_truncation`]).
pub fn sample(data: &InitialData, n: u32, grid: &Grid, t: f64) -> Result<WaveSample> {
    let state = params::evaluate(data, t)?;
    grid.check_truncation(&state, n)?;
    Ok(sample_state(&state, n, grid))
}

/// [`sample`] without the truncation check, for callers that guard the
/// boundary some other way.
pub fn sample_unchecked(data: &InitialData, n: u32, grid: &Grid, t: f64) -> Result<WaveSample> {
    let state = params::evaluate(data, t)?;
    Ok(sample_state(&state, n, grid))
}

fn sample_state(state: &ParameterState, n: u32, grid: &Grid) -> WaveSample {
    let values = par::map_range(grid.count(), |i| psi_at(state, n, grid.x(i)));
    WaveSample {
        grid: *grid,
        t: state.t,
        n,
        values,
    }
}

/// Relative residual ‖2iψ_t + ψ_xx − x²ψ‖ / ‖ψ‖ over interior grid points,
/// with ψ_t a central difference across `t ± dt` and ψ_xx the three-point
/// second difference.
pub fn schroedinger_residual(data: &InitialData, n: u32, grid: &Grid, t: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    let before = sample_unchecked(data, n, grid, t - dt)?;
    let now = sample_unchecked(data, n, grid, t)?;
    let after = sample_unchecked(data, n, grid, t + dt)?;
    residual_from_samples(&before, &now, &after, dt)
}

/// The residual of [`schroedinger_residual`] for three arbitrary samples
/// taken at `t − dt`, `t`, `t + dt` on one grid.
pub fn residual_from_samples(
    before: &WaveSample,
    now: &WaveSample,
    after: &WaveSample,
    dt: f64,
) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    let grid = now.grid;
    for s in [before, after] {
        if s.grid != grid {
            return Err(Error::InvalidGrid("samples live on different grids".into()));
        }
    }
    let count = grid.count();
    let dx2 = grid.dx() * grid.dx();
    let psi = &now.values;
    let i2 = Complex64::new(0.0, 2.0);
    let terms = par::map_range(count - 2, |k| {
        let i = k + 1;
        let x = grid.x(i);
        let dt_psi = (after.values[i] - before.values[i]) / (2.0 * dt);
        let dxx_psi = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / dx2;
        let r = i2 * dt_psi + dxx_psi - x * x * psi[i];
        (r.norm_sqr(), psi[i].norm_sqr())
    });
    let (num, den) = terms
        .iter()
        .fold((0.0, 0.0), |(a, b), (r, p)| (a + r, b + p));
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(-1.0, 1.0, 2).is_err());
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.points().collect::<Vec<_>>(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.refined().count(), 9);
    }

    #[test]
    fn ground_state_at_origin() {
        let v = psi(&InitialData::textbook(), 0, 0.0, 0.0).unwrap();
        assert_relative_eq!(v.re, 0.7511255444649425, max_relative = 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn textbook_ground_state_rotates_in_place() {
        let data = InitialData::textbook();
        for &t in &[0.3, 1.7, 4.4] {
            for &x in &[-2.0, -0.5, 0.0, 1.25] {
                let got = psi(&data, 0, x, t).unwrap();
                let want = Complex64::from_polar(PI.powf(-0.25) * (-0.5 * x * x).exp(), -t / 2.0);
                assert!((got - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn matches_high_precision_transcription() {
        // Reference from an independent 40-digit transcription of the formulas.
        let data = InitialData::new(1.0, 0.0, 2.0 / 3.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let v = psi(&data, 0, 0.5, 0.8).unwrap();
        assert!((v.re - 0.8355400198424311).abs() < 1e-10);
        assert!((v.im + 0.11116019816714287).abs() < 1e-10);
    }

    #[test]
    fn negative_mu_is_a_global_phase() {
        let pos = InitialData::new(1.5, 0.3, 0.8, 0.0, 0.2, 0.1, 0.0).unwrap();
        let neg = InitialData { mu0: -1.5, ..pos };
        let a = psi(&pos, 2, 0.4, 1.1).unwrap();
        let b = psi(&neg, 2, 0.4, 1.1).unwrap();
        assert!((b - a * Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn sample_rejects_truncating_grid() {
        let grid = Grid::new(-5.0, 5.0, 101).unwrap();
        let err = sample(&InitialData::textbook(), 0, &grid, 0.0).unwrap_err();
        assert!(matches!(err, Error::TruncatedGrid { .. }));
        // Packet displaced entirely past the right edge.
        let far = InitialData {
            eps0: -40.0,
            ..InitialData::textbook()
        };
        let grid = Grid::new(-12.0, 12.0, 101).unwrap();
        assert!(sample(&far, 0, &grid, 0.0).is_err());
    }

    #[test]
    fn normalization_examples() {
        let grid = Grid::new(-10.0, 10.0, 2001).unwrap();
        let s = sample(&InitialData::textbook(), 0, &grid, 0.0).unwrap();
        assert!((s.norm_sqr().unwrap() - 1.0).abs() < 1e-10);

        let half = InitialData {
            mu0: 2.0 / 0.9,
            ..InitialData::new(1.0, 0.2, 0.9, 1.0, -0.4, 0.3, 2.0).unwrap()
        };
        let state = params::evaluate(&half, 0.6).unwrap();
        let grid = Grid::covering(&[state], 4, 0.01).unwrap();
        let s = sample(&half, 4, &grid, 0.6).unwrap();
        assert!((s.norm_sqr().unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn density_ignores_global_phases() {
        let base = InitialData::new(1.2, -0.3, 1.4, 0.0, 0.5, -0.2, 0.0).unwrap();
        let shifted = InitialData {
            gamma0: 2.3,
            kappa0: -7.1,
            ..base
        };
        for &x in &[-1.0, 0.2, 0.9] {
            let a = psi(&base, 3, x, 0.7).unwrap().norm_sqr();
            let b = psi(&shifted, 3, x, 0.7).unwrap().norm_sqr();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn textbook_residual_is_pure_truncation_error() {
        // For the ground state ψ'''' = (x⁴ − 6x² + 3)ψ, and the three-point
        // second difference leaves (dx²/12)ψ''''; ⟨(x⁴ − 6x² + 3)²⟩ = 105/16.
        let grid = Grid::new(-10.0, 10.0, 2001).unwrap();
        let r = schroedinger_residual(&InitialData::textbook(), 0, &grid, 1.0, 1e-4).unwrap();
        let predicted = 1e-4 / 12.0 * (105.0f64 / 16.0).sqrt();
        assert!((r / predicted - 1.0).abs() < 1e-2, "{r} vs {predicted}");
        assert!(schroedinger_residual(&InitialData::textbook(), 0, &grid, 1.0, 0.0).is_err());
    }

    #[test]
    fn figure1_residual_converges_quadratically() {
        let data = InitialData::figure1();
        let state = params::evaluate(&data, 0.7).unwrap();
        let grid = Grid::covering(&[state], 1, 0.005).unwrap();
        let coarse = schroedinger_residual(&data, 1, &grid, 0.7, 1e-4).unwrap();
        let fine = schroedinger_residual(&data, 1, &grid.refined(), 0.7, 1e-4).unwrap();
        assert!(coarse <= 1e-4, "{coarse}");
        let ratio = coarse / fine;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn corrupted_state_fails_residual() {
        let data = InitialData::textbook();
        let grid = Grid::new(-10.0, 10.0, 2001).unwrap();
        let bump = |x: f64| Complex64::new(1.0 + 0.01 * x, 0.0);
        let samples: Vec<_> = [1.0 - 1e-4, 1.0, 1.0 + 1e-4]
            .iter()
            .map(|&t| sample(&data, 0, &grid, t).unwrap().modulated(bump))
            .collect();
        let r = residual_from_samples(&samples[0], &samples[1], &samples[2], 1e-4).unwrap();
        assert!(r > 1e-2, "{r}");
    }
}
