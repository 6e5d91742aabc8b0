//! One- and two-dimensional scans over `(ω₀, b)` with an append-only
//! checkpoint log for resumption.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::run::Simulation;

/// Default ceiling on the number of cells in a sweep.
pub const DEFAULT_CELL_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Omega0C2,
    BC2PerT1,
}

impl SweepParam {
    fn apply(self, sim: &mut Simulation, value: f64) {
        match self {
            SweepParam::Omega0C2 => sim.potential.omega0_c2 = value,
            SweepParam::BC2PerT1 => sim.potential.b_c2_per_t1 = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepAxis {
    /// `count` values `start + i·step`, computed by multiplication so the
    /// grid is reproducible.
    pub fn range(param: SweepParam, start: f64, step: f64, count: usize) -> Self {
        Self {
            param,
            values: (0..count).map(|i| start + i as f64 * step).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis1: SweepAxis,
    #[serde(default)]
    pub axis2: Option<SweepAxis>,
    pub base: Simulation,
    #[serde(default = "default_budget")]
    pub max_cells: usize,
}

fn default_budget() -> usize {
    DEFAULT_CELL_BUDGET
}

impl SweepSpec {
    pub fn new(base: Simulation, axis1: SweepAxis, axis2: Option<SweepAxis>) -> Self {
        Self {
            axis1,
            axis2,
            base,
            max_cells: DEFAULT_CELL_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for axis in std::iter::once(&self.axis1).chain(self.axis2.as_ref()) {
            if axis.values.is_empty() {
                return Err(Error::InvalidSweep(format!("axis {:?} has no values", axis.param)));
            }
            if axis.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSweep(format!("axis {:?} has non-finite values", axis.param)));
            }
        }
        if let Some(a2) = &self.axis2 {
            if a2.param == self.axis1.param {
                return Err(Error::InvalidSweep("both axes scan the same parameter".into()));
            }
        }
        if self.cell_count() > self.max_cells {
            return Err(Error::InvalidSweep(format!(
                "{} cells exceed the budget of {}",
                self.cell_count(),
                self.max_cells
            )));
        }
        self.base.validate()
    }

    pub fn shape(&self) -> (usize, usize) {
        (
            self.axis1.values.len(),
            self.axis2.as_ref().map_or(1, |a| a.values.len()),
        )
    }

    pub fn cell_count(&self) -> usize {
        let (a, b) = self.shape();
        a * b
    }

    /// Simulation for cell `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> Simulation {
        let mut sim = self.base;
        self.axis1.param.apply(&mut sim, self.axis1.values[i]);
        if let Some(a2) = &self.axis2 {
            a2.param.apply(&mut sim, a2.values[j]);
        }
        sim
    }

    /// Digest of the base configuration; checkpoint lines from a different
    /// base, or whose axis values no longer match, are ignored on resume.
    pub fn preset_hash(&self) -> String {
        self.base.digest()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed,
}

/// One checkpoint line and one result cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub i: usize,
    pub j: usize,
    pub omega0_c2: f64,
    pub b_c2_per_t1: f64,
    pub n: Option<f64>,
    pub status: CellStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub runtime_s: f64,
    pub preset_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub shape: (usize, usize),
    /// Cells in row-major `(i, j)` order.
    pub cells: Vec<CellRecord>,
    /// How many cells came from an existing checkpoint.
    pub resumed: usize,
}

impl SweepResult {
    pub fn cell(&self, i: usize, j: usize) -> &CellRecord {
        &self.cells[i * self.shape.1 + j]
    }

    /// Row `i` of particle numbers (NaN for failed cells).
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.shape.1)
            .map(|j| self.cell(i, j).n.unwrap_or(f64::NAN))
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.status == CellStatus::Failed).count()
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Append-only JSON-lines log; existing successful records are reused.
    pub checkpoint: Option<PathBuf>,
}

fn load_checkpoint(path: &PathBuf, spec: &SweepSpec) -> Result<BTreeMap<(usize, usize), CellRecord>> {
    let hash = spec.preset_hash();
    let shape = spec.shape();
    let mut done = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e.into()),
    };
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // a torn final line from an interrupted write is skipped
        let rec: CellRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("checkpoint line {} unreadable, skipping: {e}", lineno + 1);
                continue;
            }
        };
        if rec.preset_hash != hash || rec.i >= shape.0 || rec.j >= shape.1 {
            continue;
        }
        let p = spec.cell(rec.i, rec.j).potential;
        if p.omega0_c2.to_bits() != rec.omega0_c2.to_bits() || p.b_c2_per_t1.to_bits() != rec.b_c2_per_t1.to_bits() {
            continue;
        }
        if rec.status == CellStatus::Ok {
            done.insert((rec.i, rec.j), rec);
        }
    }
    Ok(done)
}

/// Evaluates the final particle number on every cell.
///
/// Cells run in parallel and each completed cell is appended to the
/// checkpoint by a single writer. Failed cells are recorded and the sweep
/// continues; a later resume retries them.
pub fn run_sweep(spec: &SweepSpec, options: &SweepOptions) -> Result<SweepResult> {
    spec.validate()?;
    let shape = spec.shape();
    let hash = spec.preset_hash();
    let mut done = match &options.checkpoint {
        Some(path) => load_checkpoint(path, spec)?,
        None => BTreeMap::new(),
    };
    let resumed = done.len();

    let writer = match &options.checkpoint {
        Some(path) => {
            let mut f = OpenOptions::new().create(true).append(true).read(true).open(path)?;
            // terminate a torn line so new records start cleanly
            let len = f.metadata()?.len();
            if len > 0 {
                use std::io::{Read, Seek, SeekFrom};
                let mut last = [0u8; 1];
                f.seek(SeekFrom::Start(len - 1))?;
                f.read_exact(&mut last)?;
                if last[0] != b'\n' {
                    f.write_all(b"\n")?;
                }
            }
            Some(Mutex::new(f))
        }
        None => None,
    };

    let pending: Vec<(usize, usize)> = (0..shape.0)
        .flat_map(|i| (0..shape.1).map(move |j| (i, j)))
        .filter(|key| !done.contains_key(key))
        .collect();

    let fresh: Vec<CellRecord> = pending
        .par_iter()
        .map(|&(i, j)| {
            let sim = spec.cell(i, j);
            let start = Instant::now();
            let outcome = sim.final_number();
            let runtime_s = start.elapsed().as_secs_f64();
            let (n, status, error) = match outcome {
                Ok(n) => (Some(n), CellStatus::Ok, None),
                Err(e) => {
                    log::warn!("cell ({i}, {j}) failed: {e}");
                    (None, CellStatus::Failed, Some(e.to_string()))
                }
            };
            let rec = CellRecord {
                i,
                j,
                omega0_c2: sim.potential.omega0_c2,
                b_c2_per_t1: sim.potential.b_c2_per_t1,
                n,
                status,
                error,
                runtime_s,
                preset_hash: hash.clone(),
            };
            if let Some(w) = &writer {
                let line = serde_json::to_string(&rec)?;
                let mut f = w.lock().expect("checkpoint writer poisoned");
                writeln!(f, "{line}")?;
                f.flush()?;
            }
            log::info!("cell ({i}, {j}) N = {:?} in {runtime_s:.1}s", rec.n);
            Ok(rec)
        })
        .collect::<Result<_>>()?;

    for rec in fresh {
        done.insert((rec.i, rec.j), rec);
    }
    Ok(SweepResult {
        shape,
        cells: done.into_values().collect(),
        resumed,
    })
}

/// Local maxima of a uniformly sampled series.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub indices: Vec<usize>,
    pub positions: Vec<f64>,
    /// Mean distance between adjacent peaks, if there are at least two.
    pub mean_spacing: Option<f64>,
}

/// Interior points strictly greater than both neighbours.
pub fn find_peaks(xs: &[f64], ys: &[f64]) -> Result<PeakReport> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 5 {
        return Err(Error::TooFewPoints {
            needed: 5,
            got: xs.len(),
        });
    }
    let step = xs[1] - xs[0];
    if step <= 0.0 || xs.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs().max(1.0)) {
        return Err(Error::NonUniformSpacing);
    }
    let indices: Vec<usize> = (1..ys.len() - 1)
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] > ys[i + 1])
        .collect();
    let positions: Vec<f64> = indices.iter().map(|&i| xs[i]).collect();
    let mean_spacing = (positions.len() >= 2)
        .then(|| (positions[positions.len() - 1] - positions[0]) / (positions.len() - 1) as f64);
    Ok(PeakReport {
        indices,
        positions,
        mean_spacing,
    })
}
