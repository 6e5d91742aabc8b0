//! Electron-positron pair creation from the Dirac vacuum in a combined static
//! and linearly chirped oscillating Sauter well.
//!
//! The field operator is expanded in free positive- and negative-energy plane
//! waves. Every initial negative-energy mode is propagated through the pulse
//! with a Strang-split spectral integrator of the 1+1D two-component Dirac
//! equation, and the overlaps with positive-energy modes give the Bogoliubov
//! coefficients `U_pn` from which particle number, density, and energy
//! spectra follow.
//!
//! All quantities are in atomic units (`ħ = e = mₑ = 1`, `c = 137.036`).

pub mod error;
pub mod grid;
pub mod observables;
pub mod potential;
pub mod propagator;
pub mod run;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use grid::{FreeBasis, Grid, Representation, SpinorState};
pub use observables::{
    bound_states, density, energy_spectrum, number_of_electrons, BoundState, BoundStateSet,
    EnergySpectrum,
};
pub use potential::{pulse_spectrum, PotentialConfig, PulseSpectrum, RampMode, Window};
pub use propagator::{
    evolve_basis, oracle_step, split_step, BogoliubovMatrix, EvolveOptions, Evolution,
    EvolutionSchedule,
};
pub use run::{Preset, Resolution, RunResult, Simulation};
pub use sweep::{find_peaks, run_sweep, PeakReport, SweepAxis, SweepOptions, SweepParam, SweepResult, SweepSpec};
pub use units::{C, C2};

/// Complex amplitude type used throughout.
pub type Complex = num_complex::Complex64;
