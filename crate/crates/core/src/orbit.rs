//! Orbit iteration with exact lattice bookkeeping, displacement and
//! Birkhoff-average computation over single points and seed grids.
//!
//! The iteration state is a torus representative in [0,1)² plus an exact
//! integer deck element. Float round-off accumulates only in the fractional
//! part (like n·ε), never in the lattice part, so displacement integers are
//! exact for arbitrarily long orbits.

use crate::error::{Error, Result};
use crate::geom::{LatticeVec, Vec2};
use crate::map::{split_plane, TorusLift};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A plane point stored as torus representative + deck element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftedPoint {
    /// Torus representative in [0,1)².
    pub base: Vec2,
    /// Exact integer part; plane position = base + lattice.
    pub lattice: LatticeVec,
}

impl LiftedPoint {
    pub fn from_plane(p: Vec2) -> Self {
        let (base, lattice) = split_plane(p);
        LiftedPoint { base, lattice }
    }

    pub fn plane(&self) -> Vec2 {
        self.base + self.lattice.as_vec2()
    }

    /// One step of the lifted dynamics: evaluate at the representative and
    /// fold the integer jump into the accumulator.
    pub fn step(&mut self, lift: &TorusLift) -> Result<()> {
        let image = lift.eval(self.base)?;
        let (base, jump) = split_plane(image);
        self.base = base;
        self.lattice += jump;
        Ok(())
    }
}

/// Displacement of one orbit segment: delta = F̃ⁿ(x̃) − x̃.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DisplacementRecord {
    pub start: Vec2,
    pub n: u64,
    pub delta: Vec2,
    pub average: Vec2,
}

/// A regular seed grid on the torus. Default offsets put seeds at cell
/// midpoints so symmetric maps don't place every seed on a symmetry axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: u32,
    pub offset: Vec2,
}

impl GridSpec {
    pub fn new(resolution: u32, offset: Vec2) -> Result<Self> {
        if resolution < 1 {
            return Err(Error::InvalidArgument("grid resolution must be ≥ 1".into()));
        }
        if !(0.0..1.0).contains(&offset.x) || !(0.0..1.0).contains(&offset.y) {
            return Err(Error::InvalidArgument(
                "grid offsets must lie in [0,1)".into(),
            ));
        }
        Ok(GridSpec { resolution, offset })
    }

    /// Midpoint grid: offset (0.5/res, 0.5/res).
    pub fn midpoint(resolution: u32) -> Result<Self> {
        let h = 0.5 / resolution.max(1) as f64;
        Self::new(resolution, Vec2::new(h, h))
    }

    pub fn len(&self) -> usize {
        (self.resolution as usize) * (self.resolution as usize)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Seed points in row-major order (x fastest), reduced mod 1.
    pub fn points(&self) -> Vec<Vec2> {
        let res = self.resolution as usize;
        let inv = 1.0 / self.resolution as f64;
        let mut out = Vec::with_capacity(res * res);
        for j in 0..res {
            for i in 0..res {
                let p = Vec2::new(
                    self.offset.x + i as f64 * inv,
                    self.offset.y + j as f64 * inv,
                );
                out.push(crate::map::project_torus(p));
            }
        }
        out
    }
}

fn displacement_from(
    start: Vec2,
    lp0: &LiftedPoint,
    lp: &LiftedPoint,
    n: u64,
) -> DisplacementRecord {
    // integer part exact, fractional part within accumulated ulps; the
    // average divides directly so exact rationals stay correctly rounded
    let delta = (lp.base - lp0.base) + (lp.lattice - lp0.lattice).as_vec2();
    DisplacementRecord {
        start,
        n,
        delta,
        average: delta / n as f64,
    }
}

/// Iterate n steps from x and report the displacement.
pub fn displacement(lift: &TorusLift, x: Vec2, n: u64) -> Result<DisplacementRecord> {
    if n < 1 {
        return Err(Error::InvalidArgument("orbit length n must be ≥ 1".into()));
    }
    let lp0 = LiftedPoint::from_plane(x);
    let mut lp = lp0;
    for _ in 0..n {
        lp.step(lift)?;
    }
    Ok(displacement_from(x, &lp0, &lp, n))
}

/// Displacements at several checkpoints of a single orbit, in one pass.
/// `checkpoints` must be strictly increasing and ≥ 1.
pub fn displacement_checkpoints(
    lift: &TorusLift,
    x: Vec2,
    checkpoints: &[u64],
) -> Result<Vec<DisplacementRecord>> {
    validate_checkpoints(checkpoints)?;
    let lp0 = LiftedPoint::from_plane(x);
    let mut lp = lp0;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let n_max = *checkpoints.last().unwrap();
    for step in 1..=n_max {
        lp.step(lift)?;
        if step == checkpoints[next] {
            out.push(displacement_from(x, &lp0, &lp, step));
            next += 1;
        }
    }
    Ok(out)
}

fn validate_checkpoints(checkpoints: &[u64]) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(Error::InvalidArgument("checkpoint list is empty".into()));
    }
    if checkpoints[0] < 1 {
        return Err(Error::InvalidArgument("checkpoints must be ≥ 1".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Birkhoff average of the displacement function over n steps:
/// (1/n) Σ φ∘fⁱ(x) = (F̃ⁿ(x̃) − x̃)/n.
pub fn birkhoff_average(lift: &TorusLift, x: Vec2, n: u64) -> Result<Vec2> {
    Ok(displacement(lift, x, n)?.average)
}

/// Displacement records over a seed grid, in row-major order. The output is
/// identical for any worker count: seeds are independent and results are
/// reduced back into grid order.
pub fn batch_displacements(
    lift: &TorusLift,
    grid: &GridSpec,
    n: u64,
) -> Result<Vec<DisplacementRecord>> {
    let table = batch_displacement_checkpoints(lift, grid, &[n])?;
    Ok(table.into_iter().map(|mut v| v.pop().unwrap()).collect())
}

/// Checkpointed displacements for every grid seed (row-major outer order,
/// checkpoint order inner). The workhorse behind rotation-set estimation and
/// the deviation probes: one orbit pass serves every checkpoint.
pub fn batch_displacement_checkpoints(
    lift: &TorusLift,
    grid: &GridSpec,
    checkpoints: &[u64],
) -> Result<Vec<Vec<DisplacementRecord>>> {
    validate_checkpoints(checkpoints)?;
    let seeds = grid.points();
    let results: Vec<Result<Vec<DisplacementRecord>>> = seeds
        .par_iter()
        .map(|&seed| displacement_checkpoints(lift, seed, checkpoints))
        .collect();
    // surface the first faulting seed in row-major order
    let mut out = Vec::with_capacity(results.len());
    for (seed, res) in seeds.iter().zip(results) {
        match res {
            Ok(records) => out.push(records),
            Err(e) => return Err(Error::batch(*seed, e)),
        }
    }
    Ok(out)
}

/// ⟨F̃ⁿ(x̃) − x̃ − n·ω, v⊥⟩ — the directional deviation probed by the
/// uniform-bound checks. `v_perp` must be unit length (‖·‖ within 1e-12).
pub fn directional_deviation(
    lift: &TorusLift,
    x: Vec2,
    n: u64,
    omega: Vec2,
    v_perp: Vec2,
) -> Result<f64> {
    debug_assert!((v_perp.norm() - 1.0).abs() <= 1e-12, "v_perp must be unit");
    let rec = displacement(lift, x, n)?;
    Ok(deviation_of(&rec, omega, v_perp))
}

/// Directional deviation from an existing displacement record.
#[inline]
pub fn deviation_of(rec: &DisplacementRecord, omega: Vec2, v_perp: Vec2) -> f64 {
    (rec.delta - rec.n as f64 * omega).dot(v_perp)
}
