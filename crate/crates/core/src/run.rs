//! One complete pulse: resolution presets, evolution, and derived outputs.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{FreeBasis, Grid};
use crate::observables::{self, EnergySpectrum, DEFAULT_BIN_WIDTH_C2};
use crate::potential::PotentialConfig;
use crate::propagator::{evolve_basis, BogoliubovMatrix, EvolutionSchedule, EvolveOptions};
use crate::units::C;

/// Named lattice/time-step choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `Nz = 2048`, `dt = 1e−6`: momentum cutoff 23.5c over `L = 2`.
    Paper,
    /// `Nz = 512`, `dt = 5e−6`: minutes-scale sweeps.
    Ci,
    Custom,
}

impl Preset {
    pub fn resolution(self) -> Resolution {
        match self {
            Preset::Paper => Resolution {
                preset: self,
                length_au: 2.0,
                nz: 2048,
                dt_au: 1e-6,
                checkpoint_stride: 8,
            },
            Preset::Ci | Preset::Custom => Resolution {
                preset: self,
                length_au: 2.0,
                nz: 512,
                dt_au: 5e-6,
                checkpoint_stride: 4,
            },
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Preset::Paper),
            "ci" => Ok(Preset::Ci),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::config("preset", format!("unknown preset `{other}` (paper, ci, custom)"))),
        }
    }
}

/// Lattice and time-step parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    pub preset: Preset,
    pub length_au: f64,
    pub nz: usize,
    pub dt_au: f64,
    pub checkpoint_stride: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Preset::Ci.resolution()
    }
}

impl Resolution {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.length_au, self.nz)
    }

    pub fn schedule(&self, cfg: &PotentialConfig) -> Result<EvolutionSchedule> {
        EvolutionSchedule::for_pulse(cfg, self.dt_au, self.checkpoint_stride)
    }
}

/// A fully specified single run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub potential: PotentialConfig,
    pub resolution: Resolution,
}

/// Everything a single run produces.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub grid: Grid,
    pub basis: FreeBasis,
    pub schedule: EvolutionSchedule,
    pub matrix: BogoliubovMatrix,
    pub times: Vec<f64>,
    pub numbers: Vec<f64>,
    pub n_final: f64,
    pub density: Vec<f64>,
    pub spectrum: EnergySpectrum,
    pub wall_time_s: f64,
}

impl Simulation {
    pub fn new(potential: PotentialConfig, resolution: Resolution) -> Self {
        Self { potential, resolution }
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        let grid = self.resolution.grid()?;
        self.resolution.schedule(&self.potential)?.validate(&self.potential)?;
        if grid.max_momentum() < 8.0 * C {
            log::debug!(
                "momentum cutoff {:.1}c is below 8c; high-energy pairs are truncated",
                grid.max_momentum() / C
            );
        }
        Ok(())
    }

    /// Stable digest of everything that determines the result.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("plain data serializes");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }

    pub fn evolve(&self, options: EvolveOptions) -> Result<RunResult> {
        self.validate()?;
        let start = Instant::now();
        let grid = self.resolution.grid()?;
        let basis = FreeBasis::new(&grid);
        let schedule = self.resolution.schedule(&self.potential)?;
        let evo = evolve_basis(&grid, &basis, &self.potential, &schedule, options)?;
        let n_final = observables::number_of_electrons(&evo.matrix);
        if !n_final.is_finite() {
            return Err(Error::LinearAlgebra("particle number is not finite".into()));
        }
        let density = observables::density(&evo.matrix, &grid, &basis)?;
        let spectrum = observables::energy_spectrum(&evo.matrix, &basis, DEFAULT_BIN_WIDTH_C2)?;
        Ok(RunResult {
            grid,
            basis,
            schedule,
            matrix: evo.matrix,
            times: evo.times,
            numbers: evo.numbers,
            n_final,
            density,
            spectrum,
            wall_time_s: start.elapsed().as_secs_f64(),
        })
    }

    /// Particle number after the pulse, skipping density and spectrum.
    pub fn final_number(&self) -> Result<f64> {
        self.validate()?;
        let grid = self.resolution.grid()?;
        let basis = FreeBasis::new(&grid);
        let schedule = self.resolution.schedule(&self.potential)?;
        let options = EvolveOptions {
            keep_nn: false,
            include_positive: false,
        };
        let evo = evolve_basis(&grid, &basis, &self.potential, &schedule, options)?;
        let n = observables::number_of_electrons(&evo.matrix);
        if !n.is_finite() {
            return Err(Error::LinearAlgebra("particle number is not finite".into()));
        }
        Ok(n)
    }
}
