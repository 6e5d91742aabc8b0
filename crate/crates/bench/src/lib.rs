//! Shared fixtures for the benchmarks.

use diracwell_core::{PotentialConfig, Preset, Resolution, Simulation};

/// A shortened pulse (t1 = 4/c², t0 = 1/c²) on an `nz`-point lattice.
pub fn short_pulse(nz: usize, omega0_c2: f64, b_c2_per_t1: f64) -> Simulation {
    let resolution = Resolution {
        nz,
        ..Preset::Custom.resolution()
    };
    let potential = PotentialConfig {
        omega0_c2,
        b_c2_per_t1,
        t0_inv_c2: 1.0,
        t1_inv_c2: 4.0,
        ..Default::default()
    };
    Simulation::new(potential, resolution)
}
