//! Crank–Nicolson evolution of iψ_t = ½(−ψ_xx + x²ψ) on a Dirichlet box,
//! used as an independent check of the analytic states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::observables;
use crate::params::InitialData;
use crate::wavefunction::{self, Grid, WaveSample};

/// Largest |ψ| tolerated on the boundary before the box is declared too
/// small.
pub const LEAK_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub grid: Grid,
    pub dt: f64,
    pub t_final: f64,
}

impl PropagationConfig {
    pub fn new(grid: Grid, dt: f64, t_final: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidStep(dt));
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidTimes(format!("t_final must be finite and >= 0, got {t_final}")));
        }
        Ok(Self { grid, dt, t_final })
    }

    /// Number of steps to reach `t_final`; the step is shrunk slightly when
    /// `t_final` is not a multiple of `dt`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        match self.steps() {
            0 => self.dt,
            k => self.t_final / k as f64,
        }
    }
}

/// Factored Crank–Nicolson operator for one grid and step. Edge points are
/// held at zero; the interior system (I + i dt H/2) is tridiagonal and its
/// forward-elimination coefficients are computed once.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    grid: Grid,
    dt: f64,
    rhs_diag: Vec<Complex64>,
    rhs_off: Complex64,
    lhs_off: Complex64,
    /// Modified super-diagonal c'ᵢ of the Thomas sweep.
    upper: Vec<Complex64>,
    /// 1 / (bᵢ − a cᵢ₋₁') pivots of the Thomas sweep.
    pivot_inv: Vec<Complex64>,
}

impl CrankNicolson {
    pub fn new(grid: Grid, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidStep(dt));
        }
        let dx = grid.dx();
        let interior = grid.count() - 2;
        let half = Complex64::new(0.0, 0.5 * dt);
        let kinetic_diag = 1.0 / (dx * dx);
        let kinetic_off = -0.5 / (dx * dx);

        let h_diag: Vec<f64> = (1..=interior)
            .map(|i| {
                let x = grid.x(i);
                kinetic_diag + 0.5 * x * x
            })
            .collect();
        let lhs_diag: Vec<Complex64> = h_diag.iter().map(|h| 1.0 + half * h).collect();
        let rhs_diag = h_diag.iter().map(|h| 1.0 - half * h).collect();
        let lhs_off = half * kinetic_off;
        let rhs_off = -half * kinetic_off;

        let mut upper = Vec::with_capacity(interior);
        let mut pivot_inv = Vec::with_capacity(interior);
        let mut prev_upper = Complex64::new(0.0, 0.0);
        for diag in &lhs_diag {
            let inv = 1.0 / (diag - lhs_off * prev_upper);
            pivot_inv.push(inv);
            prev_upper = lhs_off * inv;
            upper.push(prev_upper);
        }
        Ok(Self {
            grid,
            dt,
            rhs_diag,
            rhs_off,
            lhs_off,
            upper,
            pivot_inv,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `values` by one step in place.
    pub fn advance(&self, values: &mut [Complex64]) -> Result<()> {
        let count = self.grid.count();
        if values.len() != count {
            return Err(Error::LengthMismatch {
                expected: count,
                actual: values.len(),
            });
        }
        self.check_leak(values, 0)?;
        self.check_leak(values, count - 1)?;

        let interior = count - 2;
        let zero = Complex64::new(0.0, 0.0);
        // rhs = (I − i dt H/2) ψ, with zero ghost values beyond the box.
        let mut rhs = Vec::with_capacity(interior);
        for k in 0..interior {
            let i = k + 1;
            let left = if k == 0 { zero } else { values[i - 1] };
            let right = if k + 1 == interior { zero } else { values[i + 1] };
            rhs.push(self.rhs_diag[k] * values[i] + self.rhs_off * (left + right));
        }
        // Forward elimination.
        let mut carry = zero;
        for (r, inv) in rhs.iter_mut().zip(&self.pivot_inv) {
            carry = (*r - self.lhs_off * carry) * inv;
            *r = carry;
        }
        // Back substitution.
        for k in (0..interior - 1).rev() {
            rhs[k] = rhs[k] - self.upper[k] * rhs[k + 1];
        }
        values[0] = zero;
        values[count - 1] = zero;
        values[1..count - 1].copy_from_slice(&rhs);

        self.check_leak(values, 1)?;
        self.check_leak(values, count - 2)
    }

    fn check_leak(&self, values: &[Complex64], i: usize) -> Result<()> {
        let magnitude = values[i].norm();
        if magnitude > LEAK_THRESHOLD {
            return Err(Error::BoundaryLeak {
                x: self.grid.x(i),
                magnitude,
            });
        }
        Ok(())
    }
}

/// One Crank–Nicolson step of `state` on `config.grid` with `config.dt`.
pub fn step(state: &WaveSample, config: &PropagationConfig) -> Result<WaveSample> {
    if state.grid != config.grid {
        return Err(Error::InvalidGrid("state is not on the propagation grid".into()));
    }
    let cn = CrankNicolson::new(config.grid, config.dt)?;
    let mut next = state.clone();
    cn.advance(&mut next.values)?;
    next.t += config.dt;
    Ok(next)
}

/// Snapshot of a propagation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    /// max |ψ_propagated − ψ_analytic| over the grid, phase included.
    pub max_error: f64,
    /// dx Σ |ψ|² of the propagated state.
    pub norm_sqr: f64,
    /// ⟨E⟩ of the propagated state.
    pub invariant: f64,
}

fn max_error(a: &WaveSample, b: &WaveSample) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Evolves ψₙ(·, 0) to `t_final` and records a checkpoint at t = 0, every
/// `every` steps, and at the end.
pub fn propagate_with_checkpoints(
    data: &InitialData,
    n: u32,
    config: &PropagationConfig,
    every: usize,
) -> Result<Vec<Checkpoint>> {
    data.validate()?;
    let steps = config.steps();
    let dt = config.effective_dt();
    let cn = CrankNicolson::new(config.grid, dt)?;
    let mut state = wavefunction::sample_unchecked(data, n, &config.grid, 0.0)?;
    let every = every.max(1);

    let checkpoint = |state: &WaveSample| -> Result<Checkpoint> {
        let exact = wavefunction::sample_unchecked(data, n, &config.grid, state.t)?;
        Ok(Checkpoint {
            t: state.t,
            max_error: max_error(state, &exact),
            norm_sqr: state.discrete_norm_sqr(),
            invariant: observables::invariant_expectation_of(data, state)?.value,
        })
    };

    let mut out = vec![checkpoint(&state)?];
    for k in 1..=steps {
        cn.advance(&mut state.values)?;
        state.t = dt * k as f64;
        if k % every == 0 || k == steps {
            out.push(checkpoint(&state)?);
        }
    }
    Ok(out)
}

/// Largest pointwise complex deviation between the propagated and the
/// analytic state at `t_final`. No global phase is divided out.
pub fn propagate_and_compare(data: &InitialData, n: u32, config: &PropagationConfig) -> Result<f64> {
    data.validate()?;
    let steps = config.steps();
    let dt = config.effective_dt();
    let cn = CrankNicolson::new(config.grid, dt)?;
    let mut state = wavefunction::sample_unchecked(data, n, &config.grid, 0.0)?;
    for _ in 0..steps {
        cn.advance(&mut state.values)?;
    }
    state.t = config.t_final;
    let exact = wavefunction::sample_unchecked(data, n, &config.grid, config.t_final)?;
    Ok(max_error(&state, &exact))
}
