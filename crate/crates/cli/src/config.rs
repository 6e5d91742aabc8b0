//! Run configuration: a JSON file merged with command-line overrides.
//!
//! Units follow the reporting convention: energies and frequencies in `c²`,
//! chirp in `c²/t₁`, lengths in `λ_e` (grid length in a.u.), times in `1/c²`
//! (time step in a.u.).

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use diracwell_core::potential::{PotentialConfig, RampMode, Window};
use diracwell_core::run::{Preset, Resolution, Simulation};
use diracwell_core::sweep::{SweepAxis, SweepParam};
use serde::{Deserialize, Serialize};

use crate::ConfigError;

/// Optional lattice overrides on top of the preset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolutionOverrides {
    pub length_au: Option<f64>,
    pub nz: Option<usize>,
    pub dt_au: Option<f64>,
    pub checkpoint_stride: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub axis1: Option<SweepAxis>,
    pub axis2: Option<SweepAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Preset,
    pub potential: PotentialConfig,
    pub resolution: ResolutionOverrides,
    pub scan: ScanConfig,
    pub output_dir: PathBuf,
    pub spectrum_bin_width_c2: f64,
    pub pulse_samples: usize,
    pub pulse_window: Window,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: Preset::Ci,
            potential: PotentialConfig::default(),
            resolution: ResolutionOverrides::default(),
            scan: ScanConfig::default(),
            output_dir: PathBuf::from("out"),
            spectrum_bin_width_c2: diracwell_core::observables::DEFAULT_BIN_WIDTH_C2,
            pulse_samples: 4096,
            pulse_window: Window::Rectangular,
        }
    }
}

impl RunConfig {
    /// Reads a config file; a `meta.json` written by a previous run is
    /// accepted too and yields that run's resolved configuration.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(|e| ConfigError(format!("{e:#}")))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let value = match value.get("config") {
            Some(inner) if value.get("n_final").is_some() || value.get("version").is_some() => inner.clone(),
            _ => value,
        };
        serde_json::from_value(value).map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
    }

    pub fn resolution(&self) -> Resolution {
        let mut r = self.preset.resolution();
        let o = &self.resolution;
        if let Some(v) = o.length_au {
            r.length_au = v;
        }
        if let Some(v) = o.nz {
            r.nz = v;
        }
        if let Some(v) = o.dt_au {
            r.dt_au = v;
        }
        if let Some(v) = o.checkpoint_stride {
            r.checkpoint_stride = v;
        }
        if *o != ResolutionOverrides::default() && self.preset != Preset::Custom {
            r.preset = Preset::Custom;
        }
        r
    }

    pub fn simulation(&self) -> Simulation {
        Simulation::new(self.potential, self.resolution())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spectrum_bin_width_c2.is_finite() && self.spectrum_bin_width_c2 > 0.0) {
            return Err(ConfigError("`spectrum_bin_width_c2` must be positive".into()).into());
        }
        self.simulation().validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(())
    }
}

/// Flags that override config values; unset flags leave the file's value.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Resolution preset: paper (Nz=2048, dt=1e-6) or ci (Nz=512, dt=5e-6)
    #[arg(long)]
    pub preset: Option<String>,
    /// Static well depth V1 [c²]
    #[arg(long, allow_negative_numbers = true)]
    pub v1: Option<f64>,
    /// Oscillating well depth V2 [c²]
    #[arg(long, allow_negative_numbers = true)]
    pub v2: Option<f64>,
    /// Edge width W [λ_e]
    #[arg(long, allow_negative_numbers = true)]
    pub w: Option<f64>,
    /// Well width D [λ_e]
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Fundamental frequency ω0 [c²]
    #[arg(long, allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    /// Chirp parameter b [c²/t1]
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Phase φ [rad]
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Ramp duration t0 [1/c²]
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// Interaction duration t1 [1/c²]
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Box length L [a.u.]
    #[arg(long, allow_negative_numbers = true)]
    pub length: Option<f64>,
    /// Lattice points
    #[arg(long)]
    pub nz: Option<usize>,
    /// Time step [a.u.]
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Use the turn-on branch cos(πt/2t0) verbatim (full depth at t = 0)
    #[arg(long)]
    pub literal_ramp: bool,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(p) = &self.preset {
            cfg.preset = p.parse().map_err(|e: diracwell_core::Error| ConfigError(e.to_string()))?;
        }
        let pot = &mut cfg.potential;
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut pot.v1_c2, self.v1);
        set(&mut pot.v2_c2, self.v2);
        set(&mut pot.w_lambda, self.w);
        set(&mut pot.d_lambda, self.d);
        set(&mut pot.omega0_c2, self.omega0);
        set(&mut pot.b_c2_per_t1, self.b);
        set(&mut pot.phi_rad, self.phi);
        set(&mut pot.t0_inv_c2, self.t0);
        set(&mut pot.t1_inv_c2, self.t1);
        if self.literal_ramp {
            pot.ramp = RampMode::Literal;
        }
        let res = &mut cfg.resolution;
        if self.length.is_some() {
            res.length_au = self.length;
        }
        if self.nz.is_some() {
            res.nz = self.nz;
        }
        if self.dt.is_some() {
            res.dt_au = self.dt;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(())
    }
}

/// Parses `START:STEP:COUNT`.
pub fn parse_range(param: SweepParam, text: &str) -> Result<SweepAxis> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || ConfigError(format!("range `{text}` must look like START:STEP:COUNT"));
    if parts.len() != 3 {
        return Err(bad().into());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let step: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(SweepAxis::range(param, start, step, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_geometry() {
        let c = RunConfig::default();
        let p = c.potential;
        assert_eq!((p.v1_c2, p.v2_c2, p.w_lambda, p.d_lambda), (1.5, 1.5, 0.3, 10.0));
        assert_eq!(p.t0_inv_c2, 5.0);
        assert_eq!(p.t1_inv_c2, 20.0 * std::f64::consts::PI);
        assert_eq!(p.phi_rad, 0.0);
        assert_eq!(c.resolution().length_au, 2.0);
    }

    #[test]
    fn unknown_key_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"potential": {"omega_c2": 1.0}}"#).unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        assert!(format!("{err:#}").contains("omega_c2"));
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::default();
        let o = Overrides {
            omega0: Some(1.9),
            nz: Some(256),
            preset: Some("paper".into()),
            ..Default::default()
        };
        o.apply(&mut c).unwrap();
        assert_eq!(c.potential.omega0_c2, 1.9);
        let r = c.resolution();
        assert_eq!((r.nz, r.dt_au, r.preset), (256, 1e-6, Preset::Custom));
    }

    #[test]
    fn ranges() {
        let a = parse_range(SweepParam::BC2PerT1, "0:0.1:21").unwrap();
        assert_eq!(a.values.len(), 21);
        assert!((a.values[20] - 2.0).abs() < 1e-12);
        assert!(parse_range(SweepParam::BC2PerT1, "0:0.1").is_err());
    }
}
