//! Periodic spatial lattice, its momentum dual, and the free Dirac eigenbasis.
//!
//! The two-component reduction of the 1+1D Dirac equation uses `α_z → σ₁`
//! and `β → σ₃`, so the free Hamiltonian at momentum `p` is
//! `H(p) = [[c², cp], [cp, −c²]]`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{C, C2};
use crate::Complex;

/// Two-component spinor.
pub type Spinor = [Complex; 2];

/// Uniform periodic grid `z_j = −L/2 + j·dz` with FFT-ordered momenta.
///
/// Momentum index `k` holds `p_k = 2πm/L` with `m = k` for `k < Nz/2` and
/// `m = k − Nz` otherwise, so index `Nz/2` is the single Nyquist value
/// `−πNz/L`.
#[derive(Clone)]
pub struct Grid {
    length: f64,
    nz: usize,
    dz: f64,
    positions: Vec<f64>,
    momenta: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("length", &self.length)
            .field("nz", &self.nz)
            .field("dz", &self.dz)
            .finish()
    }
}

impl Grid {
    /// Smallest accepted lattice.
    pub const MIN_POINTS: usize = 16;

    pub fn new(length: f64, nz: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if nz % 2 != 0 {
            return Err(Error::InvalidGrid(format!("point count must be even, got {nz}")));
        }
        if nz < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "point count must be at least {}, got {nz}",
                Self::MIN_POINTS
            )));
        }
        let dz = length / nz as f64;
        let positions = (0..nz).map(|j| -0.5 * length + j as f64 * dz).collect();
        let momenta = (0..nz)
            .map(|k| 2.0 * PI * signed_index(k, nz) as f64 / length)
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            length,
            nz,
            dz,
            positions,
            momenta,
            forward: planner.plan_fft_forward(nz),
            inverse: planner.plan_fft_inverse(nz),
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.nz == 0
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn max_momentum(&self) -> f64 {
        PI * self.nz as f64 / self.length
    }

    /// Momentum index of `−p_k`, with the Nyquist index mapping to itself.
    pub fn mirror_index(&self, k: usize) -> usize {
        (self.nz - k) % self.nz
    }

    pub(crate) fn fft_forward(&self) -> &Arc<dyn Fft<f64>> {
        &self.forward
    }

    pub(crate) fn fft_inverse(&self) -> &Arc<dyn Fft<f64>> {
        &self.inverse
    }

    /// Sign `(−1)^k` that shifts the DFT origin from `z_0 = −L/2` to `z = 0`.
    #[inline]
    pub(crate) fn origin_sign(k: usize) -> f64 {
        if k % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn check(&self, state: &SpinorState, repr: Representation) -> Result<()> {
        if state.len() != self.nz {
            return Err(Error::DimensionMismatch {
                expected: self.nz,
                found: state.len(),
            });
        }
        if state.repr != repr {
            return Err(Error::WrongRepresentation {
                expected: repr,
                found: state.repr,
            });
        }
        Ok(())
    }

    /// Unitary transform `ψ̃_k = Nz^{-1/2} Σ_j ψ_j e^{−i p_k z_j}` per component.
    pub fn to_momentum(&self, state: &SpinorState) -> Result<SpinorState> {
        self.check(state, Representation::Position)?;
        let mut out = state.clone();
        let scale = 1.0 / (self.nz as f64).sqrt();
        for comp in [&mut out.upper, &mut out.lower] {
            self.forward.process(comp);
            for (k, a) in comp.iter_mut().enumerate() {
                *a *= scale * Self::origin_sign(k);
            }
        }
        out.repr = Representation::Momentum;
        Ok(out)
    }

    /// Inverse of [`Grid::to_momentum`].
    pub fn to_position(&self, state: &SpinorState) -> Result<SpinorState> {
        self.check(state, Representation::Momentum)?;
        let mut out = state.clone();
        let scale = 1.0 / (self.nz as f64).sqrt();
        for comp in [&mut out.upper, &mut out.lower] {
            for (k, a) in comp.iter_mut().enumerate() {
                *a *= scale * Self::origin_sign(k);
            }
            self.inverse.process(comp);
        }
        out.repr = Representation::Position;
        Ok(out)
    }
}

fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Position,
    Momentum,
}

/// Energy sign of a free solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergySign {
    Positive,
    Negative,
}

/// Spinor field sampled on the grid, stored as one array per component.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    pub upper: Vec<Complex>,
    pub lower: Vec<Complex>,
    pub repr: Representation,
}

impl SpinorState {
    pub fn zeros(nz: usize, repr: Representation) -> Self {
        Self {
            upper: vec![Complex::new(0.0, 0.0); nz],
            lower: vec![Complex::new(0.0, 0.0); nz],
            repr,
        }
    }

    pub fn from_components(upper: Vec<Complex>, lower: Vec<Complex>, repr: Representation) -> Result<Self> {
        if upper.len() != lower.len() {
            return Err(Error::DimensionMismatch {
                expected: upper.len(),
                found: lower.len(),
            });
        }
        Ok(Self { upper, lower, repr })
    }

    /// Free plane wave `u·e^{i p_k z}/√Nz`, returned in momentum representation.
    pub fn plane_wave(nz: usize, k: usize, spinor: Spinor) -> Self {
        let mut s = Self::zeros(nz, Representation::Momentum);
        s.upper[k] = spinor[0];
        s.lower[k] = spinor[1];
        s
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    /// `Σ_j Σ_s |ψ_{j,s}|²`, summed in ascending index order.
    pub fn norm_sqr(&self) -> f64 {
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum()
    }

    /// Largest pointwise component difference.
    pub fn max_abs_diff(&self, other: &SpinorState) -> f64 {
        self.upper
            .iter()
            .zip(&other.upper)
            .chain(self.lower.iter().zip(&other.lower))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Free Dirac eigenpair `(E, u)` at momentum `p`.
///
/// `E = ±√(c⁴ + c²p²)`; `u₊ ∝ (E + c², cp)` and `u₋ ∝ (−cp, E + c²)` with
/// `E = |E|`, normalized, and phased so the first nonzero component is real
/// and positive.
pub fn free_eigenpair(p: f64, sign: EnergySign) -> (f64, Spinor) {
    let e = (C2 * C2 + C2 * p * p).sqrt();
    let a = e + C2;
    let b = C * p;
    let norm = (a * a + b * b).sqrt();
    let zero = Complex::new(0.0, 0.0);
    match sign {
        EnergySign::Positive => (e, [Complex::new(a / norm, 0.0), Complex::new(b / norm, 0.0)]),
        EnergySign::Negative => {
            let (u0, u1) = (-b / norm, a / norm);
            let spinor = if u0 < 0.0 {
                [Complex::new(-u0, 0.0), Complex::new(-u1, 0.0)]
            } else if u0 == 0.0 {
                [zero, Complex::new(1.0, 0.0)]
            } else {
                [Complex::new(u0, 0.0), Complex::new(u1, 0.0)]
            };
            (-e, spinor)
        }
    }
}

/// Free eigenpairs for every momentum of a grid.
#[derive(Debug, Clone)]
pub struct FreeBasis {
    energies: Vec<f64>,
    plus: Vec<Spinor>,
    minus: Vec<Spinor>,
}

impl FreeBasis {
    pub fn new(grid: &Grid) -> Self {
        let mut energies = Vec::with_capacity(grid.len());
        let mut plus = Vec::with_capacity(grid.len());
        let mut minus = Vec::with_capacity(grid.len());
        for &p in grid.momenta() {
            let (e, up) = free_eigenpair(p, EnergySign::Positive);
            let (_, um) = free_eigenpair(p, EnergySign::Negative);
            energies.push(e);
            plus.push(up);
            minus.push(um);
        }
        Self { energies, plus, minus }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Positive energy `E(p_k)`.
    pub fn energy(&self, k: usize) -> f64 {
        self.energies[k]
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn plus(&self, k: usize) -> Spinor {
        self.plus[k]
    }

    pub fn minus(&self, k: usize) -> Spinor {
        self.minus[k]
    }
}

/// `⟨u|ψ⟩` for a two-spinor.
#[inline]
pub fn project(u: &Spinor, a: Complex, b: Complex) -> Complex {
    u[0].conj() * a + u[1].conj() * b
}
