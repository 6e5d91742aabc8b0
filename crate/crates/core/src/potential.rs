//! Combined static + chirped oscillating Sauter well.
//!
//! `V(z,t) = S(z)·[V₁·f_s(t) + V₂·f_o(t)]` with the Sauter profile
//! `S(z) = {tanh[(z−D/2)/W] − tanh[(z+D/2)/W]}/2` and three temporal phases:
//! a cosine turn-on over `t₀`, the chirped interaction
//! `cos(b(t−t₀)² + ω₀(t−t₀) + φ)` over `t₁`, and a cosine turn-off over `t₀`
//! that holds the oscillating phase at its final value.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::units::{self, C2};
use crate::Complex;

/// Shape of the turn-on branch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampMode {
    /// `cos(π(t−t₀)/2t₀)`: rises from 0 at `t = 0` to full depth at `t₀`.
    #[default]
    TurnOn,
    /// `cos(πt/2t₀)` taken verbatim; full depth at `t = 0`, zero at `t₀`.
    Literal,
}

/// Well parameters in reporting units: energies and frequencies in `c²`,
/// lengths in `λ_e`, chirp in `c²/t₁`, times in `1/c²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub v1_c2: f64,
    pub v2_c2: f64,
    pub w_lambda: f64,
    pub d_lambda: f64,
    pub omega0_c2: f64,
    pub b_c2_per_t1: f64,
    pub phi_rad: f64,
    pub t0_inv_c2: f64,
    pub t1_inv_c2: f64,
    /// Well center; zero unless testing translation invariance.
    pub center_lambda: f64,
    pub ramp: RampMode,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            v1_c2: 1.5,
            v2_c2: 1.5,
            w_lambda: 0.3,
            d_lambda: 10.0,
            omega0_c2: 0.5,
            b_c2_per_t1: 0.42,
            phi_rad: 0.0,
            t0_inv_c2: 5.0,
            t1_inv_c2: 20.0 * PI,
            center_lambda: 0.0,
            ramp: RampMode::TurnOn,
        }
    }
}

impl PotentialConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("v1_c2", self.v1_c2),
            ("v2_c2", self.v2_c2),
            ("w_lambda", self.w_lambda),
            ("d_lambda", self.d_lambda),
            ("omega0_c2", self.omega0_c2),
            ("b_c2_per_t1", self.b_c2_per_t1),
            ("phi_rad", self.phi_rad),
            ("t0_inv_c2", self.t0_inv_c2),
            ("t1_inv_c2", self.t1_inv_c2),
            ("center_lambda", self.center_lambda),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        for (key, v) in [
            ("t0_inv_c2", self.t0_inv_c2),
            ("t1_inv_c2", self.t1_inv_c2),
            ("w_lambda", self.w_lambda),
            ("d_lambda", self.d_lambda),
        ] {
            if v <= 0.0 {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        for (key, v) in [("omega0_c2", self.omega0_c2), ("b_c2_per_t1", self.b_c2_per_t1)] {
            if v < 0.0 {
                return Err(Error::config(key, format!("must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn v1(&self) -> f64 {
        units::from_c2(self.v1_c2)
    }

    pub fn v2(&self) -> f64 {
        units::from_c2(self.v2_c2)
    }

    pub fn edge_width(&self) -> f64 {
        units::from_lambda(self.w_lambda)
    }

    pub fn well_width(&self) -> f64 {
        units::from_lambda(self.d_lambda)
    }

    pub fn center(&self) -> f64 {
        units::from_lambda(self.center_lambda)
    }

    pub fn t0(&self) -> f64 {
        units::from_inv_c2(self.t0_inv_c2)
    }

    pub fn t1(&self) -> f64 {
        units::from_inv_c2(self.t1_inv_c2)
    }

    /// Pulse duration `t₁ + 2t₀`.
    pub fn t_total(&self) -> f64 {
        self.t1() + 2.0 * self.t0()
    }

    /// `ω₀` in a.u.
    pub fn omega_abs(&self) -> f64 {
        units::from_c2(self.omega0_c2)
    }

    /// `b` in a.u. (`b_rel·c²/t₁`).
    pub fn b_abs(&self) -> f64 {
        self.b_c2_per_t1 * C2 / self.t1()
    }

    /// `ω₀ + b·t₁` in units of `c²`: the midpoint of the linear sweep.
    pub fn effective_frequency_c2(&self) -> f64 {
        self.omega0_c2 + self.b_c2_per_t1
    }

    /// Instantaneous frequency `ω₀ + 2b(t−t₀)` at the end of the interaction, in `c²`.
    pub fn final_frequency_c2(&self) -> f64 {
        self.omega0_c2 + 2.0 * self.b_c2_per_t1
    }

    /// Largest accepted propagation step, `0.4/(c² + |V₁| + |V₂|)`.
    pub fn dt_max(&self) -> f64 {
        0.4 / (C2 + self.v1().abs() + self.v2().abs())
    }

    /// Sauter profile, even about the well center, in `[−1, 0]`.
    pub fn shape(&self, z: f64) -> f64 {
        let x = z - self.center();
        let (d, w) = (self.well_width(), self.edge_width());
        0.5 * (((x - 0.5 * d) / w).tanh() - ((x + 0.5 * d) / w).tanh())
    }

    /// Phase of the oscillating well during the interaction, `τ = t − t₀`.
    fn chirp_phase(&self, tau: f64) -> f64 {
        self.b_abs() * tau * tau + self.omega_abs() * tau + self.phi_rad
    }

    /// `(f_s, f_o)` such that `V(z,t) = S(z)·[V₁f_s + V₂f_o]`.
    pub fn time_factor(&self, t: f64) -> Result<(f64, f64)> {
        let (t0, t1, total) = (self.t0(), self.t1(), self.t_total());
        let slack = 1e-12 * total;
        if !(t >= -slack && t <= total + slack) {
            return Err(Error::TimeOutOfRange { t, t_total: total });
        }
        let t = t.clamp(0.0, total);
        if t < t0 {
            match self.ramp {
                RampMode::TurnOn => {
                    let r = (PI * (t - t0) / (2.0 * t0)).cos();
                    Ok((r, r * self.phi_rad.cos()))
                }
                RampMode::Literal => {
                    let r = (PI * t / (2.0 * t0)).cos();
                    Ok((r, r))
                }
            }
        } else if t < t0 + t1 {
            Ok((1.0, self.chirp_phase(t - t0).cos()))
        } else {
            let r = (PI * (t - t1 - t0) / (2.0 * t0)).cos();
            Ok((r, r * self.chirp_phase(t1).cos()))
        }
    }

    /// Spatially uniform depth factor `V₁f_s + V₂f_o` in a.u.
    pub fn depth(&self, t: f64) -> Result<f64> {
        let (fs, fo) = self.time_factor(t)?;
        Ok(self.v1() * fs + self.v2() * fo)
    }

    pub fn potential(&self, z: f64, t: f64) -> Result<f64> {
        Ok(self.shape(z) * self.depth(t)?)
    }

    pub fn potential_on_grid(&self, grid: &Grid, t: f64) -> Result<Vec<f64>> {
        let depth = self.depth(t)?;
        Ok(grid.positions().iter().map(|&z| self.shape(z) * depth).collect())
    }

    /// Static-only profile `V₁·S(z)` used for the bound-state problem.
    pub fn static_well_on_grid(&self, grid: &Grid) -> Vec<f64> {
        let v1 = self.v1();
        grid.positions().iter().map(|&z| v1 * self.shape(z)).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

/// Magnitude spectrum of the oscillating factor over the interaction window.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpectrum {
    /// Angular frequencies in units of `c²`, ascending from zero.
    pub frequencies_c2: Vec<f64>,
    /// Magnitudes normalized to a peak of 1.
    pub magnitudes: Vec<f64>,
}

impl PulseSpectrum {
    /// Power-weighted mean frequency in `c²`.
    pub fn centroid_c2(&self) -> f64 {
        let (num, den) = self
            .frequencies_c2
            .iter()
            .zip(&self.magnitudes)
            .fold((0.0, 0.0), |(n, d), (&w, &m)| (n + w * m * m, d + m * m));
        num / den
    }

    pub fn peak_frequency_c2(&self) -> f64 {
        let (i, _) = self
            .magnitudes
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &m)| if m > acc.1 { (i, m) } else { acc });
        self.frequencies_c2[i]
    }

    pub fn bin_width_c2(&self) -> f64 {
        self.frequencies_c2.get(1).copied().unwrap_or(0.0)
    }
}

/// DFT magnitude of `f_o(t)` sampled at `t₀ + j·t₁/n` for `j = 0..n`.
///
/// Only non-negative frequencies are returned; bin spacing is `2π/t₁`.
pub fn pulse_spectrum(cfg: &PotentialConfig, n_samples: usize, window: Window) -> Result<PulseSpectrum> {
    cfg.validate()?;
    if n_samples < 1024 || !n_samples.is_power_of_two() {
        return Err(Error::config(
            "n_samples",
            format!("must be a power of two of at least 1024, got {n_samples}"),
        ));
    }
    let t1 = cfg.t1();
    let step = t1 / n_samples as f64;
    let mut buf: Vec<Complex> = (0..n_samples)
        .map(|j| {
            let w = match window {
                Window::Rectangular => 1.0,
                Window::Hann => 0.5 - 0.5 * (2.0 * PI * j as f64 / n_samples as f64).cos(),
            };
            Complex::new(w * cfg.chirp_phase(j as f64 * step).cos(), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n_samples).process(&mut buf);
    let half = n_samples / 2;
    let mags: Vec<f64> = buf[..=half].iter().map(|c| c.norm()).collect();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    let magnitudes = mags.iter().map(|m| if peak > 0.0 { m / peak } else { 0.0 }).collect();
    let frequencies_c2 = (0..=half)
        .map(|k| units::to_c2(2.0 * PI * k as f64 / t1))
        .collect();
    Ok(PulseSpectrum {
        frequencies_c2,
        magnitudes,
    })
}
