//! Time-dependent parameters μ, α, β, γ, δ, ε, κ of the dynamic oscillator
//! states, evaluated from their seven initial values.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Five-point stencil step used when callers do not pick one.
pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-4;

/// The seven real constants selecting one member of the solution family.
///
/// All quantities are dimensionless (ℏ = m = ω = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub mu0: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub gamma0: f64,
    pub delta0: f64,
    pub eps0: f64,
    pub kappa0: f64,
}

impl InitialData {
    pub fn new(
        mu0: f64,
        alpha0: f64,
        beta0: f64,
        gamma0: f64,
        delta0: f64,
        eps0: f64,
        kappa0: f64,
    ) -> Result<Self> {
        let data = Self {
            mu0,
            alpha0,
            beta0,
            gamma0,
            delta0,
            eps0,
            kappa0,
        };
        data.validate()?;
        Ok(data)
    }

    /// μ₀ = β₀ = 1, everything else zero: the separable textbook eigenstates.
    pub fn textbook() -> Self {
        Self {
            mu0: 1.0,
            alpha0: 0.0,
            beta0: 1.0,
            gamma0: 0.0,
            delta0: 0.0,
            eps0: 0.0,
            kappa0: 0.0,
        }
    }

    /// α₀ = γ₀ = ε₀ = κ₀ = 0, β₀ = 2/3, δ₀ = 1, with μ₀ = 1/β₀ so the states
    /// are unit normalized.
    pub fn figure1() -> Self {
        let beta0 = 2.0 / 3.0;
        Self {
            mu0: 1.0 / beta0,
            alpha0: 0.0,
            beta0,
            gamma0: 0.0,
            delta0: 1.0,
            eps0: 0.0,
            kappa0: 0.0,
        }
    }

    /// Same data with μ₀ = 1/β₀, i.e. ∫|ψ|² = 1.
    pub fn normalized(self) -> Self {
        Self {
            mu0: 1.0 / self.beta0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mu0,
            self.alpha0,
            self.beta0,
            self.gamma0,
            self.delta0,
            self.eps0,
            self.kappa0,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInitialData("all initial data must be finite"));
        }
        if self.mu0 == 0.0 {
            return Err(Error::InvalidInitialData("mu0 must be nonzero"));
        }
        if self.beta0 == 0.0 {
            return Err(Error::InvalidInitialData("beta0 must be nonzero"));
        }
        Ok(())
    }

    /// ∫|ψₙ|² dx, which is the same for every n and t.
    pub fn norm_sqr(&self) -> f64 {
        1.0 / (self.beta0 * self.mu0).abs()
    }

    /// 2α₀ε₀ − β₀δ₀, recurring in every phase formula.
    pub(crate) fn drift(&self) -> f64 {
        2.0 * self.alpha0 * self.eps0 - self.beta0 * self.delta0
    }
}

/// Parameter values at one instant. `gamma` is on the continuous branch
/// anchored at γ(0) = γ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterState {
    pub t: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eps: f64,
    pub kappa: f64,
}

/// β₀⁴ sin²t + (2α₀ sin t + cos t)², the denominator shared by every
/// parameter function. Always ≥ min eigenvalue of a positive definite 2×2
/// form, hence strictly positive.
pub fn denominator(data: &InitialData, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let b2 = data.beta0 * data.beta0;
    let u = 2.0 * data.alpha0 * s + c;
    b2 * b2 * s * s + u * u
}

/// Continuous angle of the point (2α₀ sin t + cos t, β₀² sin t), zero at
/// t = 0 and gaining exactly π over every period of length π.
///
/// For r ∈ [0, π) the point sits in the closed upper half plane, so the
/// two-argument arctangent is already continuous there; whole periods are
/// added back on.
pub(crate) fn winding_angle(data: &InitialData, t: f64) -> f64 {
    let periods = (t / PI).floor();
    let r = t - periods * PI;
    let (s, c) = r.sin_cos();
    let b2 = data.beta0 * data.beta0;
    // Rounding can leave r at π with sin r ≈ −0, where atan2 reports −π for
    // what is the +π end of the period.
    let mut angle = (b2 * s).atan2(2.0 * data.alpha0 * s + c);
    if angle < -PI / 2.0 {
        angle += 2.0 * PI;
    }
    periods * PI + angle
}

/// All seven parameter functions at time `t`.
pub fn evaluate(data: &InitialData, t: f64) -> Result<ParameterState> {
    if !t.is_finite() {
        return Err(Error::NonFiniteTime(t));
    }
    let InitialData {
        mu0,
        alpha0: a0,
        beta0: b0,
        gamma0: g0,
        delta0: d0,
        eps0: e0,
        kappa0: k0,
    } = *data;
    let (s, c) = t.sin_cos();
    let (s2, c2) = (2.0 * t).sin_cos();
    let b2 = b0 * b0;
    let b4 = b2 * b2;
    let u = 2.0 * a0 * s + c;
    let den = b4 * s * s + u * u;
    let root = den.sqrt();

    let mu = mu0 * root;
    let alpha = (a0 * c2 + s2 * (b4 + 4.0 * a0 * a0 - 1.0) / 4.0) / den;
    let beta = b0 / root;
    let gamma = g0 - 0.5 * winding_angle(data, t);
    let delta = (d0 * u + e0 * b2 * b0 * s) / den;
    let eps = (e0 * u - b0 * d0 * s) / root;
    let kappa = k0
        + s * s * (e0 * b2 * (a0 * e0 - b0 * d0) - a0 * d0 * d0) / den
        + 0.25 * s2 * (e0 * e0 * b2 - d0 * d0) / den;

    Ok(ParameterState {
        t,
        mu,
        alpha,
        beta,
        gamma,
        delta,
        eps,
        kappa,
    })
}

/// [`evaluate`] over an ordered list of times.
pub fn evaluate_trajectory(data: &InitialData, times: &[f64]) -> Result<Vec<ParameterState>> {
    times.iter().map(|&t| evaluate(data, t)).collect()
}

/// Time derivatives of the quantities entering the phase rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterDerivatives {
    pub alpha: f64,
    pub delta: f64,
    pub kappa: f64,
    pub eps_over_beta: f64,
}

/// Five-point central differences of α, δ, κ and ε/β at `t` with step `h`.
///
/// Deliberately numerical: the phase obtained by integrating these stays
/// independent of the hand-integrated closed form.
pub fn parameter_derivatives(data: &InitialData, t: f64, h: f64) -> Result<ParameterDerivatives> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidStep(h));
    }
    let m2 = evaluate(data, t - 2.0 * h)?;
    let m1 = evaluate(data, t - h)?;
    let p1 = evaluate(data, t + h)?;
    let p2 = evaluate(data, t + 2.0 * h)?;
    let stencil = |f: fn(&ParameterState) -> f64| {
        (f(&m2) - 8.0 * f(&m1) + 8.0 * f(&p1) - f(&p2)) / (12.0 * h)
    };
    Ok(ParameterDerivatives {
        alpha: stencil(|p| p.alpha),
        delta: stencil(|p| p.delta),
        kappa: stencil(|p| p.kappa),
        eps_over_beta: stencil(|p| p.eps / p.beta),
    })
}
