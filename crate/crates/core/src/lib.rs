//! Six-parameter family of square-integrable harmonic-oscillator states,
//! their quadratic dynamic invariant, and their Berry phase.
//!
//! Units are natural (ℏ = m = ω = 1), so the states solve
//! `2iψ_t + ψ_xx − x²ψ = 0`. The modules build on each other bottom-up:
//!
//! * [`special_functions`]: Hermite polynomials and Hermite functions;
//! * [`params`]: the seven time-dependent parameters of a state;
//! * [`wavefunction`]: ψₙ(x, t) on points and grids, Schrödinger residual;
//! * [`observables`]: quadrature, the invariant E, ⟨E⟩ and ⟨H⟩;
//! * [`berry_phase`]: θₙ(t) by ODE integration and two closed forms;
//! * [`propagator`]: Crank–Nicolson evolution for an independent check.
//!
//! Grid sweeps and batch evaluations run on rayon when the default
//! `parallel` feature is enabled and sequentially otherwise.

pub mod berry_phase;
pub mod error;
pub mod observables;
mod par;
pub mod params;
pub mod propagator;
pub mod special_functions;
pub mod wavefunction;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use par::is_parallel;
pub use params::{InitialData, ParameterState};
pub use wavefunction::{Grid, WaveSample};
