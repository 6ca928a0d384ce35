//! Periodic orbits realizing rational rotation vectors.
//!
//! A point with rotation vector (p/q, s/q) is a root of
//! G(x) = F̃^q(x̃) − x̃ − (p, s). The search runs damped Newton from grid
//! seeds with the chain-rule Jacobian D(F^q) − I, deduplicates converged
//! roots modulo ℤ² and modulo orbit equivalence, and classifies the linear
//! type from the 2×2 eigenvalues of D(F^q) along the orbit.

use crate::error::{Error, Result};
use crate::geom::{LatticeVec, Mat2, Vec2};
use crate::map::{project_torus, TorusLift};
use crate::orbit::{GridSpec, LiftedPoint};
use crate::rotset::RotationSetEstimate;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Linear type of a periodic orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitClass {
    Saddle,
    Elliptic,
    Parabolic,
}

/// A converged, classified periodic orbit, reported by its representative.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicOrbitRecord {
    /// Lexicographically smallest orbit point, in [0,1)².
    pub point: Vec2,
    pub q: u32,
    /// Lattice displacement over one period.
    pub t: LatticeVec,
    /// (p/q, s/q) as floats; `t` and `q` carry the exact rational.
    pub rotation_vector: Vec2,
    /// ‖F̃^q(x) − x − t‖ at the representative.
    pub residual: f64,
    pub classification: OrbitClass,
    /// Trace of D(F^q) along the orbit.
    pub trace: f64,
    pub eigenvalues: [Complex64; 2],
}

/// Newton search knobs.
#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub seed_grid: GridSpec,
    pub newton_tol: f64,
    pub max_newton_iters: u32,
    pub dedupe_radius: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed_grid: GridSpec::midpoint(16).expect("static grid"),
            newton_tol: 1e-12,
            max_newton_iters: 60,
            dedupe_radius: 1e-6,
        }
    }
}

/// G(x) and the accumulated Jacobian D(F^q)(x) for a torus representative x.
fn eval_g(lift: &TorusLift, x: Vec2, q: u32, t: LatticeVec) -> Result<(Vec2, Mat2)> {
    let mut lp = LiftedPoint {
        base: x,
        lattice: LatticeVec::ZERO,
    };
    let mut jac = Mat2::IDENTITY;
    for _ in 0..q {
        jac = lift.jacobian(lp.base)?.mul_mat(jac);
        lp.step(lift)?;
    }
    let g = (lp.base - x) + (lp.lattice - t).as_vec2();
    Ok((g, jac))
}

/// Steepest-residual polish over the ±1-ulp neighbor lattice. Newton stalls
/// one or two ulps from a root; when an exact float root exists (G bit-zero)
/// this descent lands on it, and otherwise it returns the local residual
/// minimizer. Deterministic.
fn ulp_polish(lift: &TorusLift, x: Vec2, q: u32, t: LatticeVec) -> Result<(Vec2, f64)> {
    let mut best = x;
    let mut best_res = eval_g(lift, x, q, t)?.0.norm();
    for _ in 0..32 {
        if best_res == 0.0 {
            break;
        }
        let mut improved = false;
        'scan: for dx in [-1i32, 0, 1] {
            for dy in [-1i32, 0, 1] {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let cand = Vec2::new(nudge(best.x, dx), nudge(best.y, dy));
                let res = eval_g(lift, cand, q, t)?.0.norm();
                if res < best_res {
                    best = cand;
                    best_res = res;
                    improved = true;
                    break 'scan;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok((best, best_res))
}

fn nudge(v: f64, dir: i32) -> f64 {
    match dir {
        0 => v,
        d if d > 0 => next_up(v),
        _ => next_down(v),
    }
}

fn next_up(v: f64) -> f64 {
    if v == 0.0 {
        f64::MIN_POSITIVE
    } else {
        let bits = v.to_bits();
        f64::from_bits(if v > 0.0 { bits + 1 } else { bits - 1 })
    }
}

fn next_down(v: f64) -> f64 {
    if v == 0.0 {
        -f64::MIN_POSITIVE
    } else {
        let bits = v.to_bits();
        f64::from_bits(if v > 0.0 { bits - 1 } else { bits + 1 })
    }
}

/// Damped Newton from one seed. `None` when the iteration hits a singular
/// Jacobian, stops making progress, or runs out of iterations.
fn newton_from_seed(
    lift: &TorusLift,
    seed: Vec2,
    q: u32,
    t: LatticeVec,
    cfg: &SearchConfig,
) -> Result<Option<(Vec2, f64)>> {
    let mut x = seed;
    let (mut g, mut jac) = eval_g(lift, x, q, t)?;
    let mut res = g.norm();
    let mut converged = false;
    let mut extra = 0u32;
    for _ in 0..cfg.max_newton_iters {
        if res == 0.0 {
            return Ok(Some((x, res)));
        }
        if res <= cfg.newton_tol {
            converged = true;
            // a few more full steps push the residual to machine limit,
            // putting the ulp polish within reach of an exact float root
            extra += 1;
            if extra > 4 {
                break;
            }
        }
        let newton_mat = jac - Mat2::IDENTITY;
        let Some(step) = newton_mat.solve(-g) else {
            break; // singular at this point
        };
        // step halving on residual increase
        let mut lambda = 1.0f64;
        let mut accepted = None;
        for _ in 0..20 {
            let cand = project_torus(x + step * lambda);
            let (gc, jc) = eval_g(lift, cand, q, t)?;
            let rc = gc.norm();
            if rc < res {
                accepted = Some((cand, gc, jc, rc));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((cand, gc, jc, rc)) => {
                x = cand;
                g = gc;
                jac = jc;
                res = rc;
            }
            None => break, // no descent direction left
        }
    }
    if converged && res <= cfg.newton_tol {
        let (px, pres) = ulp_polish(lift, x, q, t)?;
        return Ok(Some((px, pres)));
    }
    Ok(None)
}

/// Torus distance (min over deck translates).
fn torus_dist(a: Vec2, b: Vec2) -> f64 {
    let wrap = |d: f64| {
        let d = (d - d.round()).abs();
        d.min(1.0 - d)
    };
    wrap(a.x - b.x).hypot(wrap(a.y - b.y))
}

/// The q torus points of the orbit through x.
fn orbit_points(lift: &TorusLift, x: Vec2, q: u32) -> Result<Vec<Vec2>> {
    let mut out = Vec::with_capacity(q as usize);
    let mut lp = LiftedPoint {
        base: x,
        lattice: LatticeVec::ZERO,
    };
    for _ in 0..q {
        out.push(lp.base);
        lp.step(lift)?;
    }
    Ok(out)
}

fn classify_from_jacobian(jac: Mat2) -> (OrbitClass, f64, [Complex64; 2]) {
    let tr = jac.trace();
    let det = jac.det();
    let disc = tr * tr - 4.0 * det;
    let eigen = if disc >= 0.0 {
        let r = disc.sqrt();
        [
            Complex64::new((tr + r) / 2.0, 0.0),
            Complex64::new((tr - r) / 2.0, 0.0),
        ]
    } else {
        let i = (-disc).sqrt() / 2.0;
        [Complex64::new(tr / 2.0, i), Complex64::new(tr / 2.0, -i)]
    };
    const EPS_CLS: f64 = 1e-9;
    let class = if (det - 1.0).abs() <= 1e-6 {
        // unit determinant: |trace| against 2 decides the type
        if tr.abs() > 2.0 + EPS_CLS {
            OrbitClass::Saddle
        } else if tr.abs() < 2.0 - EPS_CLS {
            OrbitClass::Elliptic
        } else {
            OrbitClass::Parabolic
        }
    } else {
        // non-conservative fallback: compare |λ| with 1
        let m0 = eigen[0].norm();
        let m1 = eigen[1].norm();
        if (m0 - 1.0) * (m1 - 1.0) < -EPS_CLS {
            OrbitClass::Saddle
        } else if disc < 0.0 {
            OrbitClass::Elliptic
        } else {
            OrbitClass::Parabolic
        }
    };
    (class, tr, eigen)
}

fn build_record(
    lift: &TorusLift,
    rep: Vec2,
    residual: f64,
    q: u32,
    t: LatticeVec,
) -> Result<PeriodicOrbitRecord> {
    let (_, jac) = eval_g(lift, rep, q, t)?;
    let (classification, trace, eigenvalues) = classify_from_jacobian(jac);
    Ok(PeriodicOrbitRecord {
        point: rep,
        q,
        t,
        rotation_vector: Vec2::new(t.a as f64 / q as f64, t.b as f64 / q as f64),
        residual,
        classification,
        trace,
        eigenvalues,
    })
}

/// Search for periodic points with F̃^q(x) = x + t. Converged roots are
/// deduplicated modulo ℤ² and orbit equivalence; each surviving orbit is
/// reported once via its lexicographically smallest point. An empty result
/// is a legitimate outcome, not an error.
pub fn find_periodic(
    lift: &TorusLift,
    q: u32,
    t: LatticeVec,
    cfg: &SearchConfig,
) -> Result<Vec<PeriodicOrbitRecord>> {
    if q < 1 {
        return Err(Error::InvalidArgument("period q must be ≥ 1".into()));
    }
    if !cfg.newton_tol.is_finite() || cfg.newton_tol <= 0.0 {
        return Err(Error::InvalidArgument("newton_tol must be positive".into()));
    }
    if !cfg.dedupe_radius.is_finite() || cfg.dedupe_radius <= 0.0 {
        return Err(Error::InvalidArgument(
            "dedupe_radius must be positive".into(),
        ));
    }
    let seeds = cfg.seed_grid.points();
    let raw: Vec<Result<Option<(Vec2, f64)>>> = seeds
        .par_iter()
        .map(|&seed| newton_from_seed(lift, seed, q, t, cfg))
        .collect();

    // sequential, seed-ordered merge keeps the output deterministic
    let mut reps: Vec<(Vec2, f64)> = Vec::new();
    for (seed, res) in seeds.iter().zip(raw) {
        let Some((root, residual)) = res.map_err(|e| Error::batch(*seed, e))? else {
            continue;
        };
        if residual > cfg.newton_tol {
            continue;
        }
        let orbit = orbit_points(lift, root, q)?;
        let rep = orbit
            .iter()
            .copied()
            .reduce(|best, p| if p.lex_le(best) { p } else { best })
            .unwrap();
        // polish the representative so the reported residual is its own
        let (rep, rep_res) = ulp_polish(lift, rep, q, t)?;
        let duplicate = reps.iter().any(|(existing, _)| {
            orbit
                .iter()
                .any(|&p| torus_dist(p, *existing) <= cfg.dedupe_radius)
                || torus_dist(rep, *existing) <= cfg.dedupe_radius
        });
        if !duplicate && rep_res <= cfg.newton_tol {
            reps.push((rep, rep_res));
        }
    }
    reps.sort_by(|a, b| (a.0.x, a.0.y).partial_cmp(&(b.0.x, b.0.y)).unwrap());
    reps.into_iter()
        .map(|(rep, residual)| build_record(lift, rep, residual, q, t))
        .collect()
}

/// Recompute classification data for a record (e.g. after re-seeding).
pub fn classify(record: &PeriodicOrbitRecord, lift: &TorusLift) -> Result<PeriodicOrbitRecord> {
    build_record(lift, record.point, record.residual, record.q, record.t)
}

/// An exact rational vector (p/q, s/q) in lowest common form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RationalVec {
    pub p: i64,
    pub s: i64,
    pub q: u32,
}

impl RationalVec {
    pub fn new(p: i64, s: i64, q: u32) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidArgument("denominator must be ≥ 1".into()));
        }
        let mut g = gcd3(p.unsigned_abs(), s.unsigned_abs(), q as u64);
        if g == 0 {
            g = 1;
        }
        Ok(RationalVec {
            p: p / g as i64,
            s: s / g as i64,
            q: (q as u64 / g) as u32,
        })
    }

    pub fn as_vec2(&self) -> Vec2 {
        Vec2::new(self.p as f64 / self.q as f64, self.s as f64 / self.q as f64)
    }
}

fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    fn gcd(mut x: u64, mut y: u64) -> u64 {
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    }
    gcd(gcd(a, b), c)
}

/// Outcome of a rational realization attempt.
#[derive(Clone, Debug, Serialize)]
pub struct Realization {
    pub found: bool,
    pub records: Vec<PeriodicOrbitRecord>,
    /// Whether the target lies in the current hull estimate.
    pub inside_hull: bool,
    /// Search-power diagnostic; an empty result for an interior target
    /// suggests finer seeding, never a refutation.
    pub note: Option<String>,
}

/// Try to realize the rational rotation vector r = (p/q, s/q) by a periodic
/// orbit of period q with lattice displacement (p, s).
pub fn realize_rational(
    lift: &TorusLift,
    rotset: &RotationSetEstimate,
    r: RationalVec,
    cfg: &SearchConfig,
) -> Result<Realization> {
    let records = find_periodic(lift, r.q, LatticeVec::new(r.p, r.s), cfg)?;
    let found = !records.is_empty();
    let inside_hull = rotset.hull.contains(r.as_vec2());
    let note = if !found && inside_hull {
        Some(format!(
            "({}/{q}, {}/{q}) lies in the hull estimate but no orbit converged; \
             consider a finer seed grid",
            r.p,
            r.s,
            q = r.q
        ))
    } else if !found {
        Some("target lies outside the hull estimate".into())
    } else {
        None
    };
    Ok(Realization {
        found,
        records,
        inside_hull,
        note,
    })
}
