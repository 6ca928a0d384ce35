//! Greedy lattice staircase tracking an arbitrary direction with unit steps.
//!
//! Given a unit direction v = (a, b) with a ≥ 0 and the guide line r through
//! the origin along v, the staircase appends steps nᵢ ∈ {(1,0), (0,1)}: at
//! each step it compares |⟨v⊥, S + (1,0)⟩| against |⟨v⊥, S + (0,1)⟩| for the
//! current partial sum S and takes the horizontal step on ties. The signed
//! distance Δᵢ = ⟨v⊥, n₀ + … + nᵢ⟩ then satisfies |Δᵢ| ≤ 1 at every prefix,
//! and Δ = 0 identifies a rational direction together with its exact lattice
//! period.
//!
//! Rational directions supplied as coprime integer pairs run entirely in
//! integer arithmetic: with v⊥ ∝ (−b, a) unnormalized, Δᵢ is the integer
//! ⟨(−b, a), S⟩ and the distance invariant reads Δᵢ² ≤ a² + b². Float-input
//! staircases never report a rational period: an exact Δ = 0 from rounding
//! noise would be spurious.
//!
//! Negative slopes (a > 0, b < 0) run the y-reflection conjugate of the
//! same construction: the vertical unit step becomes (0,−1) and all
//! invariants carry over unchanged.

use crate::error::{Error, Result};
use crate::geom::LatticeVec;
use serde::Serialize;

/// One staircase step: horizontal (1,0) or vertical (0,1). For directions
/// with b < 0 the construction is the y-reflection conjugate and V denotes
/// the downward unit step (0,−1); [`Step::lattice`] takes the direction to
/// resolve the sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Step {
    H,
    V,
}

impl Step {
    pub fn lattice(self, dir: &Direction) -> LatticeVec {
        match self {
            Step::H => LatticeVec::new(1, 0),
            Step::V => LatticeVec::new(0, if dir.b() < 0.0 { -1 } else { 1 }),
        }
    }
}

/// A direction normalized to a² + b² = 1 with a ≥ 0, optionally carrying an
/// exact coprime integer form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Direction {
    a: f64,
    b: f64,
    exact: Option<(i64, i64)>,
}

fn gcd(mut x: i64, mut y: i64) -> i64 {
    x = x.abs();
    y = y.abs();
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

impl Direction {
    /// Float direction from arbitrary components (normalized, sign-fixed).
    pub fn from_components(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument("direction must be finite".into()));
        }
        let norm = a.hypot(b);
        if norm == 0.0 {
            return Err(Error::InvalidArgument("direction must be nonzero".into()));
        }
        let (mut a, mut b) = (a / norm, b / norm);
        if a < 0.0 || (a == 0.0 && b < 0.0) {
            a = -a;
            b = -b;
        }
        Ok(Direction { a, b, exact: None })
    }

    pub fn from_angle(theta: f64) -> Result<Self> {
        Self::from_components(theta.cos(), theta.sin())
    }

    /// Exact rational direction from an integer pair; reduced to coprime
    /// form with a ≥ 0.
    pub fn exact(a_int: i64, b_int: i64) -> Result<Self> {
        if a_int == 0 && b_int == 0 {
            return Err(Error::InvalidArgument("direction must be nonzero".into()));
        }
        let g = gcd(a_int, b_int);
        let (mut a_int, mut b_int) = (a_int / g, b_int / g);
        if a_int < 0 || (a_int == 0 && b_int < 0) {
            a_int = -a_int;
            b_int = -b_int;
        }
        let norm = ((a_int as f64).powi(2) + (b_int as f64).powi(2)).sqrt();
        Ok(Direction {
            a: a_int as f64 / norm,
            b: b_int as f64 / norm,
            exact: Some((a_int, b_int)),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn exact_pair(&self) -> Option<(i64, i64)> {
        self.exact
    }
}

/// The constructed step sequence with its distance diary.
#[derive(Clone, Debug, Serialize)]
pub struct StaircasePath {
    pub direction: Direction,
    pub steps: Vec<Step>,
    /// Δᵢ = ⟨v⊥, n₀ + … + nᵢ⟩ in normalized units (distance to guide line).
    pub deltas: Vec<f64>,
    /// Integer Δᵢ diary for exact directions, in units of ⟨(−b, a), S⟩.
    pub deltas_int: Option<Vec<i64>>,
    /// Exact step-sum at the first Δ = 0; only set for exact directions.
    pub rational_period: Option<LatticeVec>,
    /// 3 + 2·d for the configured building-block diameter d.
    pub width_bound: f64,
}

impl StaircasePath {
    /// Running step sums S₀, S₁, … (prefix lattice points on the positive side).
    pub fn prefix_sums(&self) -> Vec<LatticeVec> {
        let mut out = Vec::with_capacity(self.steps.len());
        let mut s = LatticeVec::ZERO;
        for step in &self.steps {
            s += step.lattice(&self.direction);
            out.push(s);
        }
        out
    }

    pub fn max_abs_delta(&self) -> f64 {
        self.deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()))
    }
}

/// Build the staircase with the default (zero) building-block diameter.
pub fn build_staircase(dir: &Direction, max_steps: usize) -> Result<StaircasePath> {
    build_staircase_with_diameter(dir, max_steps, 0.0)
}

/// Build the staircase; `rect_diameter` is the abstract diameter d ≥ 0 of
/// the translated building blocks, reported through the width bound 3 + 2d.
pub fn build_staircase_with_diameter(
    dir: &Direction,
    max_steps: usize,
    rect_diameter: f64,
) -> Result<StaircasePath> {
    if max_steps < 1 {
        return Err(Error::InvalidArgument("max_steps must be ≥ 1".into()));
    }
    if !rect_diameter.is_finite() || rect_diameter < 0.0 {
        return Err(Error::InvalidArgument("rect_diameter must be ≥ 0".into()));
    }
    let width_bound = 3.0 + 2.0 * rect_diameter;
    match dir.exact {
        Some((ai, bi)) => build_exact(dir, ai, bi, max_steps, width_bound),
        None => Ok(build_float(dir, max_steps, width_bound)),
    }
}

fn build_float(dir: &Direction, max_steps: usize, width_bound: f64) -> StaircasePath {
    let (a, b) = (dir.a, dir.b);
    // for b < 0 the vertical step is (0,−1): ⟨v⊥, (0,−1)⟩ = −a
    let v_inc = if b < 0.0 { -a } else { a };
    let mut steps = Vec::with_capacity(max_steps);
    let mut deltas = Vec::with_capacity(max_steps);
    let mut delta = 0.0f64;
    for _ in 0..max_steps {
        // ⟨v⊥, S + (1,0)⟩ = Δ − b and ⟨v⊥, S + (0,±1)⟩ = Δ ± a
        let cand_h = delta - b;
        let cand_v = delta + v_inc;
        if cand_h.abs() <= cand_v.abs() {
            steps.push(Step::H);
            delta = cand_h;
        } else {
            steps.push(Step::V);
            delta = cand_v;
        }
        deltas.push(delta);
    }
    StaircasePath {
        direction: *dir,
        steps,
        deltas,
        deltas_int: None,
        rational_period: None,
        width_bound,
    }
}

fn build_exact(
    dir: &Direction,
    a_int: i64,
    b_int: i64,
    max_steps: usize,
    width_bound: f64,
) -> Result<StaircasePath> {
    let inv_norm = 1.0 / ((a_int as f64).powi(2) + (b_int as f64).powi(2)).sqrt();
    // for b < 0 the vertical step is (0,−1): ⟨v⊥, (0,−1)⟩ = −a
    let v_sign: i64 = if b_int < 0 { -1 } else { 1 };
    let mut steps = Vec::new();
    let mut deltas = Vec::new();
    let mut deltas_int = Vec::new();
    let mut delta = 0i64;
    let mut sum = LatticeVec::ZERO;
    for _ in 0..max_steps {
        let cand_h = delta - b_int;
        let cand_v = delta + v_sign * a_int;
        if cand_h.abs() <= cand_v.abs() {
            steps.push(Step::H);
            sum += LatticeVec::new(1, 0);
            delta = cand_h;
        } else {
            steps.push(Step::V);
            sum += LatticeVec::new(0, v_sign);
            delta = cand_v;
        }
        deltas_int.push(delta);
        deltas.push(delta as f64 * inv_norm);
        if delta == 0 {
            return Ok(StaircasePath {
                direction: *dir,
                steps,
                deltas,
                deltas_int: Some(deltas_int),
                rational_period: Some(sum),
                width_bound,
            });
        }
    }
    // a coprime direction must close up after a + |b| steps
    if max_steps as i64 >= a_int + b_int.abs() {
        return Err(Error::Internal(format!(
            "exact staircase for ({a_int}, {b_int}) did not close within {} steps",
            a_int + b_int.abs()
        )));
    }
    Ok(StaircasePath {
        direction: *dir,
        steps,
        deltas,
        deltas_int: Some(deltas_int),
        rational_period: None,
        width_bound,
    })
}

/// Lattice checkpoints on the negative side: −(n₀ + … + nᵢ) for each prefix.
/// Their distances to the guide line equal |Δᵢ| by sign symmetry.
pub fn extend_negative(path: &StaircasePath) -> Vec<LatticeVec> {
    path.prefix_sums().into_iter().map(|s| -s).collect()
}

/// Invariant check report.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InvariantReport {
    pub ok: bool,
    pub max_abs_delta: f64,
}

/// Verify the distance invariant |Δᵢ| ≤ 1 along the whole path: exactly in
/// integer mode (Δᵢ² ≤ a² + b²), with a 1e-12 slack in float mode.
pub fn check_invariant(path: &StaircasePath) -> InvariantReport {
    match (&path.deltas_int, path.direction.exact) {
        (Some(ints), Some((a, b))) => {
            let bound = (a as i128) * (a as i128) + (b as i128) * (b as i128);
            let ok = ints.iter().all(|&d| (d as i128) * (d as i128) <= bound);
            InvariantReport {
                ok,
                max_abs_delta: path.max_abs_delta(),
            }
        }
        _ => {
            let max = path.max_abs_delta();
            InvariantReport {
                ok: max <= 1.0 + 1e-12,
                max_abs_delta: max,
            }
        }
    }
}
