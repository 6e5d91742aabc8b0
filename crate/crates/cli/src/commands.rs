use std::time::Instant;

use anyhow::{bail, Result};
use diracwell_core::observables::{self, BoundStateSet};
use diracwell_core::propagator::EvolveOptions;
use diracwell_core::sweep::{run_sweep, CellStatus, SweepOptions, SweepParam, SweepSpec};
use diracwell_core::units;
use diracwell_core::{pulse_spectrum as compute_pulse_spectrum, Error, Simulation};
use serde::Serialize;

use crate::config::{parse_range, RunConfig};
use crate::output::OutputSet;
use crate::ConfigError;

/// Parameters after unit conversion, recorded alongside the input config.
#[derive(Debug, Serialize)]
struct Resolved {
    preset_hash: String,
    preset: diracwell_core::Preset,
    length_au: f64,
    nz: usize,
    dz_au: f64,
    max_momentum_c: f64,
    dt_au: f64,
    n_steps: usize,
    t0_au: f64,
    t1_au: f64,
    t_total_au: f64,
    v1_au: f64,
    v2_au: f64,
    w_au: f64,
    d_au: f64,
    omega0_au: f64,
    b_au: f64,
    /// ω0 + b·t1, midpoint of the sweep [c²]
    effective_frequency_c2: f64,
    /// ω0 + 2b·t1, instantaneous frequency at the end of the interaction [c²]
    final_frequency_c2: f64,
}

fn resolve(sim: &Simulation) -> Result<Resolved> {
    let p = &sim.potential;
    let r = &sim.resolution;
    let grid = r.grid()?;
    let sched = r.schedule(p)?;
    Ok(Resolved {
        preset_hash: sim.digest(),
        preset: r.preset,
        length_au: r.length_au,
        nz: r.nz,
        dz_au: grid.dz(),
        max_momentum_c: grid.max_momentum() / units::C,
        dt_au: sched.dt,
        n_steps: sched.n_steps,
        t0_au: p.t0(),
        t1_au: p.t1(),
        t_total_au: p.t_total(),
        v1_au: p.v1(),
        v2_au: p.v2(),
        w_au: p.edge_width(),
        d_au: p.well_width(),
        omega0_au: p.omega_abs(),
        b_au: p.b_abs(),
        effective_frequency_c2: p.effective_frequency_c2(),
        final_frequency_c2: p.final_frequency_c2(),
    })
}

#[derive(Debug, Serialize)]
struct Meta<'a, T: Serialize> {
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    resolved: Resolved,
    wall_time_s: f64,
    #[serde(flatten)]
    summary: T,
}

fn meta<'a, T: Serialize>(command: &'static str, cfg: &'a RunConfig, wall_time_s: f64, summary: T) -> Result<Meta<'a, T>> {
    Ok(Meta {
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        resolved: resolve(&cfg.simulation())?,
        wall_time_s,
        summary,
    })
}

pub fn evolve(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let sim = cfg.simulation();
    let mut out = OutputSet::new(&cfg.output_dir)?;
    let result = sim.evolve(EvolveOptions {
        keep_nn: false,
        include_positive: false,
    })?;
    let spectrum = observables::energy_spectrum(&result.matrix, &result.basis, cfg.spectrum_bin_width_c2)?;

    out.csv(
        "number_vs_time.csv",
        &["t_au", "N"],
        result.times.iter().zip(&result.numbers),
    )?;
    out.csv(
        "spectrum.csv",
        &["E_c2", "dN_dE"],
        spectrum.bin_centers_c2().into_iter().zip(spectrum.counts.iter()),
    )?;
    out.csv(
        "density.csv",
        &["z_au", "rho"],
        result.grid.positions().iter().zip(&result.density),
    )?;

    #[derive(Serialize)]
    struct Summary {
        n_final: f64,
    }
    out.json(
        "meta.json",
        &meta("evolve", cfg, result.wall_time_s, Summary { n_final: result.n_final })?,
    )?;
    out.commit();
    println!("N_final = {:.6}", result.n_final);
    Ok(())
}

pub fn scan(cfg: &mut RunConfig, omega0: Option<&str>, b: Option<&str>, restart: bool) -> Result<()> {
    match (omega0, b) {
        (Some(o), Some(b)) => {
            cfg.scan.axis1 = Some(parse_range(SweepParam::Omega0C2, o)?);
            cfg.scan.axis2 = Some(parse_range(SweepParam::BC2PerT1, b)?);
        }
        (Some(o), None) => {
            cfg.scan.axis1 = Some(parse_range(SweepParam::Omega0C2, o)?);
            cfg.scan.axis2 = None;
        }
        (None, Some(b)) => {
            cfg.scan.axis1 = Some(parse_range(SweepParam::BC2PerT1, b)?);
            cfg.scan.axis2 = None;
        }
        (None, None) => {}
    }
    let Some(axis1) = cfg.scan.axis1.clone() else {
        return Err(ConfigError("scan needs --omega0-scan, --b-scan, or `scan.axis1` in the config".into()).into());
    };
    cfg.validate()?;
    let spec = SweepSpec::new(cfg.simulation(), axis1, cfg.scan.axis2.clone());
    spec.validate().map_err(|e| ConfigError(e.to_string()))?;

    let mut out = OutputSet::new(&cfg.output_dir)?;
    let checkpoint = out.path("checkpoint.jsonl");
    if restart && checkpoint.exists() {
        std::fs::remove_file(&checkpoint)?;
    }
    let start = Instant::now();
    let result = run_sweep(
        &spec,
        &SweepOptions {
            checkpoint: Some(checkpoint),
        },
    )?;
    let rows = result.cells.iter().map(|c| {
        (
            c.omega0_c2,
            c.b_c2_per_t1,
            c.n.unwrap_or(f64::NAN),
            match c.status {
                CellStatus::Ok => "ok",
                CellStatus::Failed => "failed",
            },
            c.runtime_s,
        )
    });
    out.csv("scan.csv", &["omega0_c2", "b_c2_per_t1", "N", "status", "runtime_s"], rows)?;

    #[derive(Serialize)]
    struct Summary {
        cells: usize,
        resumed_cells: usize,
        failed_cells: usize,
    }
    let failed = result.failures();
    out.json(
        "meta.json",
        &meta(
            "scan",
            cfg,
            start.elapsed().as_secs_f64(),
            Summary {
                cells: result.cells.len(),
                resumed_cells: result.resumed,
                failed_cells: failed,
            },
        )?,
    )?;
    out.commit();
    println!(
        "{} cells ({} resumed, {} failed)",
        result.cells.len(),
        result.resumed,
        failed
    );
    if failed > 0 {
        bail!(Error::LinearAlgebra(format!("{failed} scan cells failed; rerun to retry them")));
    }
    Ok(())
}

pub fn bound_states(cfg: &RunConfig) -> Result<()> {
    cfg.potential.validate().map_err(|e| ConfigError(e.to_string()))?;
    let res = cfg.resolution();
    let grid = res.grid().map_err(|e| ConfigError(e.to_string()))?;
    let set: BoundStateSet = observables::bound_states(&grid, &cfg.potential)?;
    println!("{:>3}  {:>12}  {:>12}", "i", "E [c²]", "localization");
    for (i, l) in set.levels.iter().enumerate() {
        println!("{:>3}  {:>12.6}  {:>12.6}", i + 1, l.energy_c2, l.localization);
    }
    if set.is_empty() {
        println!("no bound states");
    }
    let mut out = OutputSet::new(&cfg.output_dir)?;
    out.csv(
        "bound_states.csv",
        &["index", "E_c2", "localization"],
        set.levels.iter().enumerate().map(|(i, l)| (i + 1, l.energy_c2, l.localization)),
    )?;
    out.commit();
    Ok(())
}

pub fn pulse_spectrum(cfg: &RunConfig) -> Result<()> {
    let s = compute_pulse_spectrum(&cfg.potential, cfg.pulse_samples, cfg.pulse_window)
        .map_err(|e| ConfigError(e.to_string()))?;
    let mut out = OutputSet::new(&cfg.output_dir)?;
    out.csv(
        "pulse_spectrum.csv",
        &["omega_c2", "magnitude"],
        s.frequencies_c2.iter().zip(&s.magnitudes),
    )?;
    out.commit();
    println!(
        "peak at {:.3} c², power centroid {:.3} c², ω0 + b·t1 = {:.3} c² ({} bins of {:.4} c²)",
        s.peak_frequency_c2(),
        s.centroid_c2(),
        cfg.potential.effective_frequency_c2(),
        s.magnitudes.len(),
        s.bin_width_c2()
    );
    Ok(())
}
