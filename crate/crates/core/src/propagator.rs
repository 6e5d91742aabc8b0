//! Strang-split spectral propagation of the two-component Dirac equation.
//!
//! One step is `e^{−iK dt/2} · e^{−iV(t+dt/2) dt} · e^{−iK dt/2}`. The kinetic
//! factor is diagonal in momentum and uses the closed form
//! `e^{−iH(p)τ} = cos(Eτ) − i sin(Eτ) H(p)/E`; the electrostatic factor is a
//! scalar phase per lattice point.

use faer::prelude::Solve;
use faer::Mat;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{project, FreeBasis, Grid, Representation, SpinorState};
use crate::potential::PotentialConfig;
use crate::units::{C, C2};
use crate::Complex;

const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

/// Largest lattice accepted by the dense oracle.
pub const ORACLE_MAX_POINTS: usize = 256;

/// Lattice size above which the full `U` matrices become memory-hungry.
pub const LARGE_MATRIX_POINTS: usize = 4096;

/// Uniform time stepping over the whole pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionSchedule {
    pub dt: f64,
    pub n_steps: usize,
    pub t_total: f64,
    pub checkpoint_stride: usize,
}

impl EvolutionSchedule {
    /// Covers `[0, t_total]` with the smallest step count whose step does not
    /// exceed `dt_target`, so `dt·n_steps = t_total`.
    pub fn new(t_total: f64, dt_target: f64, checkpoint_stride: usize) -> Result<Self> {
        if !(dt_target.is_finite() && dt_target > 0.0) {
            return Err(Error::config("dt", format!("must be positive, got {dt_target}")));
        }
        if !(t_total.is_finite() && t_total > 0.0) {
            return Err(Error::config("t_total", "must be positive"));
        }
        if checkpoint_stride == 0 {
            return Err(Error::config("checkpoint_stride", "must be at least 1"));
        }
        let n_steps = (t_total / dt_target * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok(Self {
            dt: t_total / n_steps as f64,
            n_steps,
            t_total,
            checkpoint_stride,
        })
    }

    pub fn for_pulse(cfg: &PotentialConfig, dt_target: f64, checkpoint_stride: usize) -> Result<Self> {
        Self::new(cfg.t_total(), dt_target, checkpoint_stride)
    }

    pub fn validate(&self, cfg: &PotentialConfig) -> Result<()> {
        check_dt(self.dt, cfg)
    }
}

fn check_dt(dt: f64, cfg: &PotentialConfig) -> Result<()> {
    let dt_max = cfg.dt_max();
    if !dt.is_finite() || dt.abs() > dt_max {
        return Err(Error::StepTooLarge { dt, dt_max });
    }
    Ok(())
}

/// `e^{−iH(p)τ}` as a row-major 2×2 matrix.
fn kinetic_factor(p: f64, energy: f64, tau: f64) -> [Complex; 4] {
    let (s, c) = (energy * tau).sin_cos();
    let a = s / energy;
    [
        Complex::new(c, -a * C2),
        Complex::new(0.0, -a * C * p),
        Complex::new(0.0, -a * C * p),
        Complex::new(c, a * C2),
    ]
}

fn kinetic_table(grid: &Grid, basis: &FreeBasis, tau: f64) -> Vec<[Complex; 4]> {
    grid.momenta()
        .iter()
        .enumerate()
        .map(|(k, &p)| kinetic_factor(p, basis.energy(k), tau))
        .collect()
}

#[inline]
fn apply_kinetic(table: &[[Complex; 4]], up: &mut [Complex], down: &mut [Complex]) {
    for ((m, a), b) in table.iter().zip(up.iter_mut()).zip(down.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = m[0] * x + m[1] * y;
        *b = m[2] * x + m[3] * y;
    }
}

/// Single Strang step of an arbitrary state; the result keeps the input's
/// representation.
pub fn split_step(
    state: &SpinorState,
    t: f64,
    dt: f64,
    grid: &Grid,
    cfg: &PotentialConfig,
) -> Result<SpinorState> {
    check_dt(dt, cfg)?;
    if state.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: state.len(),
        });
    }
    let basis = FreeBasis::new(grid);
    let half = kinetic_table(grid, &basis, 0.5 * dt);
    let potential = cfg.potential_on_grid(grid, t + 0.5 * dt)?;

    let mut m = match state.repr {
        Representation::Momentum => state.clone(),
        Representation::Position => grid.to_momentum(state)?,
    };
    apply_kinetic(&half, &mut m.upper, &mut m.lower);
    let mut x = grid.to_position(&m)?;
    for ((a, b), &v) in x.upper.iter_mut().zip(x.lower.iter_mut()).zip(&potential) {
        let phase = Complex::from_polar(1.0, -v * dt);
        *a *= phase;
        *b *= phase;
    }
    let mut m = grid.to_momentum(&x)?;
    apply_kinetic(&half, &mut m.upper, &mut m.lower);
    match state.repr {
        Representation::Momentum => Ok(m),
        Representation::Position => grid.to_position(&m),
    }
}

/// Dense Crank–Nicolson step `(1 + iH dt/2)ψ' = (1 − iH dt/2)ψ` with `H`
/// assembled at `t + dt/2` in the position basis.
///
/// The kinetic operator is `F†·diag(p)·F` built from the grid's own
/// transforms, so the oracle shares the lattice but not the integrator.
pub fn oracle_step(
    state: &SpinorState,
    t: f64,
    dt: f64,
    grid: &Grid,
    cfg: &PotentialConfig,
) -> Result<SpinorState> {
    let n = grid.len();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::SizeGuard {
            what: "dense oracle",
            size: n,
            limit: ORACLE_MAX_POINTS,
        });
    }
    if state.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.len(),
        });
    }
    let x = match state.repr {
        Representation::Position => state.clone(),
        Representation::Momentum => grid.to_position(state)?,
    };
    let h = dense_hamiltonian(grid, &cfg.potential_on_grid(grid, t + 0.5 * dt)?)?;
    let half = Complex::new(0.0, 0.5 * dt);
    let dim = 2 * n;
    let lhs = Mat::<Complex>::from_fn(dim, dim, |i, j| {
        let id = if i == j { Complex::new(1.0, 0.0) } else { ZERO };
        id + half * h[(i, j)]
    });
    let psi: Vec<Complex> = x.upper.iter().chain(&x.lower).copied().collect();
    let rhs = Mat::<Complex>::from_fn(dim, 1, |i, _| {
        let mut acc = psi[i];
        for (j, &v) in psi.iter().enumerate() {
            acc -= half * h[(i, j)] * v;
        }
        acc
    });
    let sol = lhs.partial_piv_lu().solve(&rhs);
    let upper = (0..n).map(|i| sol[(i, 0)]).collect();
    let lower = (n..dim).map(|i| sol[(i, 0)]).collect();
    let out = SpinorState::from_components(upper, lower, Representation::Position)?;
    match state.repr {
        Representation::Position => Ok(out),
        Representation::Momentum => grid.to_momentum(&out),
    }
}

/// Dense `2Nz × 2Nz` Hamiltonian `cσ₁p̂ + σ₃c² + V` in the position basis,
/// upper component first.
pub fn dense_hamiltonian(grid: &Grid, potential: &[f64]) -> Result<Mat<Complex>> {
    let n = grid.len();
    if potential.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: potential.len(),
        });
    }
    let mut p_hat = Mat::<Complex>::zeros(n, n);
    for j in 0..n {
        let mut e = SpinorState::zeros(n, Representation::Position);
        e.upper[j] = Complex::new(1.0, 0.0);
        let mut m = grid.to_momentum(&e)?;
        for (a, &p) in m.upper.iter_mut().zip(grid.momenta()) {
            *a *= p;
        }
        let col = grid.to_position(&m)?;
        for i in 0..n {
            p_hat[(i, j)] = col.upper[i];
        }
    }
    let mut h = Mat::<Complex>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let kin = p_hat[(i, j)] * C;
            h[(i, n + j)] = kin;
            h[(n + i, j)] = kin;
        }
        h[(i, i)] = Complex::new(C2 + potential[i], 0.0);
        h[(n + i, n + i)] = Complex::new(-C2 + potential[i], 0.0);
    }
    Ok(h)
}

/// Bogoliubov coefficients at one instant.
///
/// Matrices are stored column-major: entry `(row, col)` lives at
/// `col·Nz + row`, where rows index final free states and columns index
/// the evolved initial states, both by momentum index.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovMatrix {
    nz: usize,
    pub time: f64,
    /// `U_pn`: positive-energy rows, initial negative-energy columns.
    pub pn: Vec<Complex>,
    /// `U_n'n`: negative-energy rows, initial negative-energy columns.
    pub nn: Option<Vec<Complex>>,
    /// `U_np'`: negative-energy rows, initial positive-energy columns.
    pub np: Option<Vec<Complex>>,
    /// `U_pp'`: positive-energy rows, initial positive-energy columns.
    pub pp: Option<Vec<Complex>>,
}

impl BogoliubovMatrix {
    pub fn zeros(nz: usize, time: f64) -> Self {
        Self {
            nz,
            time,
            pn: vec![ZERO; nz * nz],
            nn: None,
            np: None,
            pp: None,
        }
    }

    pub fn size(&self) -> usize {
        self.nz
    }

    #[inline]
    pub fn pn(&self, p: usize, n: usize) -> Complex {
        self.pn[n * self.nz + p]
    }

    /// Column `n` of `U_pn`.
    pub fn pn_column(&self, n: usize) -> &[Complex] {
        &self.pn[n * self.nz..(n + 1) * self.nz]
    }

    /// `Σ_p |U_pn|² + Σ_n' |U_n'n|² − 1` per column; `None` without `U_nn`.
    pub fn unitarity_defects(&self) -> Option<Vec<f64>> {
        let nn = self.nn.as_ref()?;
        Some(
            (0..self.nz)
                .map(|n| {
                    let range = n * self.nz..(n + 1) * self.nz;
                    let s: f64 = self.pn[range.clone()]
                        .iter()
                        .chain(&nn[range])
                        .map(|c| c.norm_sqr())
                        .sum();
                    s - 1.0
                })
                .collect(),
        )
    }

    /// Created positrons `Σ_{n,p} |U_np|²`; `None` unless positive-energy
    /// states were evolved.
    pub fn positron_number(&self) -> Option<f64> {
        self.np.as_ref().map(|np| np.iter().map(|c| c.norm_sqr()).sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolveOptions {
    /// Record `U_n'n` for unitarity checks.
    pub keep_nn: bool,
    /// Also evolve the positive-energy states to obtain `U_np` and `U_pp`.
    pub include_positive: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            keep_nn: true,
            include_positive: false,
        }
    }
}

/// Outcome of [`evolve_basis`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub matrix: BogoliubovMatrix,
    /// Checkpoint times including `t = 0` and `t_total`.
    pub times: Vec<f64>,
    /// `N(t)` at each checkpoint.
    pub numbers: Vec<f64>,
}

/// Column state kept in the unscaled FFT domain: `a_k = (−1)^k ψ̃_k`.
struct Column {
    up: Vec<Complex>,
    down: Vec<Complex>,
}

/// Evolves every free negative-energy plane wave (and optionally every
/// positive one) through the whole pulse and projects onto the free basis.
///
/// Columns advance together one checkpoint block at a time and share the
/// per-step potential phase tables. All reductions run sequentially in
/// ascending index order, so results do not depend on the thread count.
pub fn evolve_basis(
    grid: &Grid,
    basis: &FreeBasis,
    cfg: &PotentialConfig,
    schedule: &EvolutionSchedule,
    options: EvolveOptions,
) -> Result<Evolution> {
    cfg.validate()?;
    schedule.validate(cfg)?;
    let nz = grid.len();
    if basis.len() != nz {
        return Err(Error::DimensionMismatch {
            expected: nz,
            found: basis.len(),
        });
    }
    if nz > LARGE_MATRIX_POINTS {
        log::warn!(
            "Nz = {nz}: each U block needs {:.1} GiB",
            (nz * nz * 16) as f64 / (1u64 << 30) as f64
        );
    }

    let dt = schedule.dt;
    let half = kinetic_table(grid, basis, 0.5 * dt);
    let full = kinetic_table(grid, basis, dt);
    let inv_n = 1.0 / nz as f64;

    let n_cols = if options.include_positive { 2 * nz } else { nz };
    let mut columns: Vec<Column> = (0..n_cols)
        .map(|c| {
            let (k, u) = if c < nz {
                (c, basis.minus(c))
            } else {
                (c - nz, basis.plus(c - nz))
            };
            let mut up = vec![ZERO; nz];
            let mut down = vec![ZERO; nz];
            let s = Grid::origin_sign(k);
            up[k] = u[0] * s;
            down[k] = u[1] * s;
            Column { up, down }
        })
        .collect();

    let fwd = grid.fft_forward().clone();
    let inv = grid.fft_inverse().clone();
    let scratch_len = fwd
        .get_inplace_scratch_len()
        .max(inv.get_inplace_scratch_len());

    let mut times = vec![0.0];
    let mut numbers = vec![created_number(basis, &columns[..nz])];

    let mut step = 0;
    while step < schedule.n_steps {
        let block = schedule.checkpoint_stride.min(schedule.n_steps - step);
        let phases: Vec<Vec<Complex>> = (0..block)
            .map(|i| {
                let t_mid = (step + i) as f64 * dt + 0.5 * dt;
                let v = cfg.potential_on_grid(grid, t_mid)?;
                Ok(v.iter()
                    .map(|&v| Complex::from_polar(inv_n, -v * dt))
                    .collect())
            })
            .collect::<Result<_>>()?;

        columns.par_iter_mut().for_each_init(
            || vec![ZERO; scratch_len],
            |scratch, col| {
                apply_kinetic(&half, &mut col.up, &mut col.down);
                for (i, phase) in phases.iter().enumerate() {
                    inv.process_with_scratch(&mut col.up, scratch);
                    inv.process_with_scratch(&mut col.down, scratch);
                    for ((a, b), ph) in col.up.iter_mut().zip(col.down.iter_mut()).zip(phase) {
                        *a *= ph;
                        *b *= ph;
                    }
                    fwd.process_with_scratch(&mut col.up, scratch);
                    fwd.process_with_scratch(&mut col.down, scratch);
                    let table = if i + 1 == phases.len() { &half } else { &full };
                    apply_kinetic(table, &mut col.up, &mut col.down);
                }
            },
        );
        step += block;
        times.push(if step == schedule.n_steps {
            schedule.t_total
        } else {
            step as f64 * dt
        });
        numbers.push(created_number(basis, &columns[..nz]));
    }

    let (neg, pos) = columns.split_at(nz);
    let project_all = |cols: &[Column], positive_rows: bool| -> Vec<Complex> {
        let mut out = vec![ZERO; nz * nz];
        out.par_chunks_mut(nz).zip(cols.par_iter()).for_each(|(dst, col)| {
            for (k, d) in dst.iter_mut().enumerate() {
                let u = if positive_rows { basis.plus(k) } else { basis.minus(k) };
                let s = Grid::origin_sign(k);
                *d = project(&u, col.up[k] * s, col.down[k] * s);
            }
        });
        out
    };
    let mut matrix = BogoliubovMatrix::zeros(nz, schedule.t_total);
    matrix.pn = project_all(neg, true);
    if options.keep_nn {
        matrix.nn = Some(project_all(neg, false));
    }
    if options.include_positive {
        matrix.np = Some(project_all(pos, false));
        matrix.pp = Some(project_all(pos, true));
    }
    Ok(Evolution {
        matrix,
        times,
        numbers,
    })
}

/// `Σ_n Σ_p |⟨p|ψ_n⟩|²` over negative-energy columns.
fn created_number(basis: &FreeBasis, columns: &[Column]) -> f64 {
    let per_column: Vec<f64> = columns
        .par_iter()
        .map(|col| {
            let mut acc = 0.0;
            for k in 0..col.up.len() {
                // the origin sign drops out of the modulus
                acc += project(&basis.plus(k), col.up[k], col.down[k]).norm_sqr();
            }
            acc
        })
        .collect();
    per_column.iter().sum()
}
