//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line.
//!
//! Fast criteria run with `cargo test`. The reproduction criteria need
//! production-resolution runs or hundreds of cells and are `#[ignore]`d; run
//! them with
//!
//! ```text
//! cargo test -p diracwell-core --test acceptance -- --ignored --nocapture
//! ```

use std::f64::consts::PI;

use diracwell_core::observables::{self, state_resolved_spectrum};
use diracwell_core::propagator::{oracle_step, split_step, EvolveOptions};
use diracwell_core::sweep::{find_peaks, run_sweep, SweepAxis, SweepOptions, SweepParam, SweepSpec};
use diracwell_core::{bound_states, Complex, Grid, PotentialConfig, Preset, Representation, Simulation, SpinorState};

/// Per-column `Σ|U_pn|² + Σ|U_n'n|² − 1`.
const UNITARITY_TOL: f64 = 1e-8;
/// Particle number with the field switched off.
const NULL_TOL: f64 = 1e-10;
/// Split-operator vs Crank–Nicolson amplitude deviation after 100 steps.
const ORACLE_TOL: f64 = 1e-6;
/// Bound levels in units of `c²`.
const BOUND_TOL_C2: f64 = 0.005;
/// Reference particle numbers (relative).
const TABLE_REL_TOL: f64 = 0.10;
/// Chirp enhancement ratio (relative).
const RATIO_REL_TOL: f64 = 0.15;
/// Peak period of the fine b-scan in `c²/t₁`.
const PEAK_PERIOD: f64 = 0.1;
const PEAK_PERIOD_TOL: f64 = 0.02;
/// Row argmax distance from `ω₀ + b·t₁ = 2c²`.
const RIDGE_TOL_C2: f64 = 0.2;
/// Spectral maxima distance from `E_i + ω₀` (one bin).
const SPECTRUM_TOL_C2: f64 = 0.02;
/// Lattice/step refinement (relative).
const REFINEMENT_TOL: f64 = 0.03;
/// Box doubling (relative).
const BOX_TOL: f64 = 0.01;

/// Bound levels of the static well, `V₁ = 1.5c²`, `D = 10λ_e`, `W = 0.3λ_e`.
const REFERENCE_LEVELS_C2: [f64; 8] = [-0.4247, -0.3069, -0.1361, 0.0680, 0.2919, 0.5260, 0.7618, 0.9778];

fn report(name: &str, pass: bool, detail: String) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn ci() -> diracwell_core::Resolution {
    Preset::Ci.resolution()
}

fn baseline(omega0_c2: f64, b_c2_per_t1: f64) -> PotentialConfig {
    PotentialConfig {
        omega0_c2,
        b_c2_per_t1,
        ..Default::default()
    }
}

#[test]
fn unitarity_after_full_pulse() {
    let sim = Simulation::new(PotentialConfig::default(), ci());
    let res = sim
        .evolve(EvolveOptions {
            keep_nn: true,
            include_positive: false,
        })
        .unwrap();
    let defects = res.matrix.unitarity_defects().unwrap();
    let worst = defects.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let pass = worst <= UNITARITY_TOL;
    report(
        "unitarity (Nz=512, default pulse)",
        pass,
        format!("max column defect {worst:.2e} (tol {UNITARITY_TOL:.0e}), N = {:.4}", res.n_final),
    );
    assert!(pass);
}

#[test]
fn null_field_creates_nothing() {
    let cfg = PotentialConfig {
        v1_c2: 0.0,
        v2_c2: 0.0,
        ..Default::default()
    };
    let n = Simulation::new(cfg, ci()).final_number().unwrap();
    let pass = n <= NULL_TOL;
    report("null field", pass, format!("N = {n:.3e} (tol {NULL_TOL:.0e})"));
    assert!(pass);
}

#[test]
fn split_step_matches_dense_oracle() {
    let grid = Grid::new(2.0, 64).unwrap();
    let cfg = baseline(1.0, 1.2);
    // deterministic pseudo-random start, normalized
    let mut x = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        (x >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let upper: Vec<Complex> = (0..64).map(|_| Complex::new(next(), next())).collect();
    let lower: Vec<Complex> = (0..64).map(|_| Complex::new(next(), next())).collect();
    let mut s = SpinorState::from_components(upper, lower, Representation::Position).unwrap();
    let norm = s.norm_sqr().sqrt();
    s.upper.iter_mut().chain(s.lower.iter_mut()).for_each(|a| *a /= norm);

    let dt = 1e-7;
    // straddle the end of the turn-on so both branches are exercised
    let t_start = cfg.t0() - 50.0 * dt;
    let (mut a, mut b) = (s.clone(), s);
    for i in 0..100 {
        let t = t_start + i as f64 * dt;
        a = split_step(&a, t, dt, &grid, &cfg).unwrap();
        b = oracle_step(&b, t, dt, &grid, &cfg).unwrap();
    }
    let dev = a.max_abs_diff(&b);
    let pass = dev <= ORACLE_TOL;
    report(
        "split-step vs Crank-Nicolson oracle (Nz=64, 100 x 1e-7)",
        pass,
        format!("max amplitude deviation {dev:.2e} (tol {ORACLE_TOL:.0e})"),
    );
    assert!(pass);
}

#[test]
fn bound_state_levels() {
    let grid = Grid::new(2.0, 1024).unwrap();
    let static_only = bound_states(&grid, &PotentialConfig::default()).unwrap().energies_c2();
    // alternative reading: the full combined depth V1 + V2
    let combined_cfg = PotentialConfig {
        v1_c2: 3.0,
        ..Default::default()
    };
    let combined = bound_states(&grid, &combined_cfg).unwrap().energies_c2();
    println!("static-well levels (V1):      {static_only:.4?}");
    println!("combined-depth levels (V1+V2): {combined:.4?}");

    let worst = |levels: &[f64]| -> Option<f64> {
        (levels.len() == REFERENCE_LEVELS_C2.len()).then(|| {
            levels
                .iter()
                .zip(REFERENCE_LEVELS_C2)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    };
    let dev_static = worst(&static_only);
    let dev_combined = worst(&combined);
    let pass = dev_static.is_some_and(|d| d <= BOUND_TOL_C2);
    report(
        "bound states (8 levels within 0.005c^2)",
        pass,
        format!(
            "V1-only: {} levels, max deviation {:?}; V1+V2: {} levels, max deviation {:?}",
            static_only.len(),
            dev_static,
            combined.len(),
            dev_combined
        ),
    );
    assert_eq!(static_only.len(), 8, "level count");
    assert!(pass, "level positions");
}

#[test]
fn refinement_and_box_convergence() {
    let cfg = baseline(1.0, 0.0);
    let coarse = Simulation::new(cfg, ci()).final_number().unwrap();
    let fine_res = diracwell_core::Resolution {
        nz: 1024,
        dt_au: 2.5e-6,
        ..ci()
    };
    let fine = Simulation::new(cfg, fine_res).final_number().unwrap();
    let wide_res = diracwell_core::Resolution {
        nz: 1024,
        length_au: 4.0,
        ..ci()
    };
    let wide = Simulation::new(cfg, wide_res).final_number().unwrap();
    let refine = (fine - coarse).abs() / fine;
    let boxed = (wide - coarse).abs() / coarse;
    let pass_refine = refine <= REFINEMENT_TOL;
    let pass_box = boxed <= BOX_TOL;
    report(
        "refinement (512/5e-6 vs 1024/2.5e-6)",
        pass_refine,
        format!("N = {coarse:.4} vs {fine:.4}, rel. change {refine:.3} (tol {REFINEMENT_TOL})"),
    );
    report(
        "box doubling (L=2 vs L=4 at equal dz)",
        pass_box,
        format!("N = {coarse:.6} vs {wide:.6}, rel. change {boxed:.2e} (tol {BOX_TOL})"),
    );
    assert!(pass_refine && pass_box);
}

#[test]
#[ignore = "slow tier: two production-resolution pulses"]
fn reference_particle_numbers() {
    let res = Preset::Paper.resolution();
    let n_fixed = Simulation::new(baseline(1.0, 0.0), res).final_number().unwrap();
    let n_chirp = Simulation::new(baseline(1.0, 1.2), res).final_number().unwrap();
    let ratio = n_chirp / n_fixed;
    let ok_fixed = ((n_fixed - 2.30) / 2.30).abs() <= TABLE_REL_TOL;
    let ok_chirp = ((n_chirp - 5.13) / 5.13).abs() <= TABLE_REL_TOL;
    let ok_ratio = ((ratio - 2.23) / 2.23).abs() <= RATIO_REL_TOL;
    report("reference N: w0=1.0, b=0", ok_fixed, format!("N = {n_fixed:.4} (expect 2.30 +/- 10%)"));
    report("reference N: w0=1.0, b=1.2", ok_chirp, format!("N = {n_chirp:.4} (expect 5.13 +/- 10%)"));
    report("reference N: ratio", ok_ratio, format!("R = {ratio:.4} (expect 2.23 +/- 15%)"));
    assert!(ok_fixed && ok_chirp && ok_ratio);
}

#[test]
#[ignore = "slow tier: 101-cell b-scan"]
fn chirp_scan_peak_period() {
    let spec = SweepSpec::new(
        Simulation::new(baseline(1.0, 0.0), ci()),
        SweepAxis::range(SweepParam::BC2PerT1, 0.0, 0.02, 101),
        None,
    );
    let result = run_sweep(&spec, &SweepOptions::default()).unwrap();
    let bs: Vec<f64> = result.cells.iter().map(|c| c.b_c2_per_t1).collect();
    let ns: Vec<f64> = result.cells.iter().map(|c| c.n.unwrap()).collect();
    for (b, n) in bs.iter().zip(&ns) {
        println!("b = {b:.2}  N = {n:.5}");
    }
    let peaks = find_peaks(&bs, &ns).unwrap();
    let spacing = peaks.mean_spacing.unwrap_or(f64::NAN);
    let pass = (spacing - PEAK_PERIOD).abs() <= PEAK_PERIOD_TOL;
    let (i_max, n_max) = ns.iter().enumerate().fold((0, f64::MIN), |a, (i, &n)| if n > a.1 { (i, n) } else { a });
    // diagnostic only: how many maxima sit on the 0.1 lattice
    let on_lattice = peaks
        .positions
        .iter()
        .filter(|b| ((*b / PEAK_PERIOD).round() * PEAK_PERIOD - *b).abs() < 1e-9)
        .count();
    println!(
        "{on_lattice} of {} maxima lie on multiples of {PEAK_PERIOD}",
        peaks.positions.len()
    );
    let positions: Vec<String> = peaks.positions.iter().map(|b| format!("{b:.2}")).collect();
    report(
        "b-scan peak period (w0=1.0, step 0.02)",
        pass,
        format!(
            "peaks at [{}], mean spacing {spacing:.4} (expect 0.1 +/- 0.02); global max N = {n_max:.4} at b = {:.2}",
            positions.join(", "),
            bs[i_max]
        ),
    );
    assert!(pass);
}

#[test]
#[ignore = "slow tier: 400-cell contour"]
fn contour_ridge() {
    let spec = SweepSpec::new(
        Simulation::new(baseline(1.0, 0.0), ci()),
        SweepAxis::range(SweepParam::Omega0C2, 0.1, 0.1, 20),
        Some(SweepAxis::range(SweepParam::BC2PerT1, 0.1, 0.1, 20)),
    );
    let dir = std::env::var_os("DIRACWELL_CONTOUR_CHECKPOINT").map(std::path::PathBuf::from);
    let result = run_sweep(&spec, &SweepOptions { checkpoint: dir }).unwrap();
    assert_eq!(result.cells.len(), 400);
    assert_eq!(result.failures(), 0);
    let mut pass = true;
    for i in 0..20 {
        let omega = spec.axis1.values[i];
        let row = result.row(i);
        let j = row
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |a, (j, &n)| if n > a.1 { (j, n) } else { a })
            .0;
        let b = spec.axis2.as_ref().unwrap().values[j];
        let off = omega + b - 2.0;
        let checked = omega <= 1.5 + 1e-9;
        // inclusive bound; grid sums like 0.3 + 1.9 carry rounding noise
        let ok = off.abs() <= RIDGE_TOL_C2 + 1e-9;
        if checked {
            pass &= ok;
        }
        println!(
            "w0 = {omega:.1}: argmax b = {b:.1}, w0 + b = {:.1}, N_max = {:.4}{}",
            omega + b,
            row[j],
            if checked { if ok { "" } else { "  <- off ridge" } } else { "  (not checked)" }
        );
    }
    report("contour ridge w0 + b*t1 = 2.0c^2 (rows w0 <= 1.5)", pass, "see rows above".into());
    assert!(pass);
}

#[test]
#[ignore = "slow tier: one production-resolution pulse"]
fn multiphoton_spectrum_peaks() {
    let omega = 1.9;
    let res = Simulation::new(baseline(omega, 0.0), Preset::Paper.resolution())
        .evolve(EvolveOptions {
            keep_nn: false,
            include_positive: false,
        })
        .unwrap();
    let curve = state_resolved_spectrum(&res.matrix, &res.grid, &res.basis);
    let maxima: Vec<(f64, f64)> = (1..curve.len() - 1)
        .filter(|&i| curve[i].1 > curve[i - 1].1 && curve[i].1 > curve[i + 1].1)
        .map(|i| curve[i])
        .collect();
    let binned = observables::energy_spectrum(&res.matrix, &res.basis, SPECTRUM_TOL_C2).unwrap();
    println!("N = {:.4}", res.n_final);
    for (e, d) in curve.iter().filter(|(e, _)| *e < 3.2) {
        println!("E = {e:.4}  dN/dE = {d:.4}");
    }
    let mut pass = true;
    for (i, level) in REFERENCE_LEVELS_C2.iter().enumerate().skip(1) {
        let target = level + omega;
        let nearest = maxima
            .iter()
            .map(|(e, _)| *e)
            .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
            .unwrap_or(f64::NAN);
        let ok = (nearest - target).abs() <= SPECTRUM_TOL_C2;
        pass &= ok;
        println!(
            "E_{} + w0 = {target:.4}: nearest maximum {nearest:.4} ({})",
            i + 1,
            if ok { "ok" } else { "off" }
        );
    }
    println!("binned integral {:.4}", binned.integral());
    report("spectrum maxima at E_i + 1.9c^2, i = 2..8", pass, format!("{} local maxima below 3.2c^2", maxima.iter().filter(|m| m.0 < 3.2).count()));
    assert!(pass);
}

#[test]
fn unit_conventions() {
    let cfg = PotentialConfig::default();
    assert!((cfg.t1() - 20.0 * PI / diracwell_core::C2).abs() < 1e-18);
}
