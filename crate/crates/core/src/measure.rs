//! Rotation vectors of measures: Lebesgue via quadrature or Monte Carlo,
//! orbit empirical measures via Birkhoff averages, area-preservation checks,
//! and the interior test for the rotation vector of the area measure.
//!
//! The rotation vector of an invariant measure μ is ∫ φ dμ with
//! φ(x) = F̃(x̃) − x̃ the displacement function. Lebesgue needs no dynamics,
//! only integration; orbit measures ride on the Birkhoff identity.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::map::TorusLift;
use crate::orbit::displacement_checkpoints;
use crate::rotset::RotationSetEstimate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeasureMethod {
    GridQuadrature,
    MonteCarlo,
    OrbitAverage,
}

/// A rotation-vector estimate with its uncertainty and provenance.
/// Serializes to the record shape {vector, method, error, samples, seed}.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeasureRotationResult {
    pub vector: Vec2,
    pub method: MeasureMethod,
    #[serde(rename = "error")]
    pub error_estimate: f64,
    #[serde(rename = "samples")]
    pub sample_count: u64,
    /// RNG seed for Monte Carlo results; `None` for deterministic methods.
    pub seed: Option<u64>,
}

/// Neumaier-compensated accumulator; summation error stays O(ε) regardless
/// of length, and the fixed block order keeps results thread-count
/// independent.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

fn quadrature_mean(lift: &TorusLift, res: u32) -> Result<Vec2> {
    let inv = 1.0 / res as f64;
    // midpoint rule over res² cells; rows in parallel, combined in order
    let rows: Vec<Result<(Kahan, Kahan)>> = (0..res)
        .into_par_iter()
        .map(|j| {
            let y = (j as f64 + 0.5) * inv;
            let mut sx = Kahan::default();
            let mut sy = Kahan::default();
            for i in 0..res {
                let p = Vec2::new((i as f64 + 0.5) * inv, y);
                let phi = lift.eval(p)? - p;
                sx.add(phi.x);
                sy.add(phi.y);
            }
            Ok((sx, sy))
        })
        .collect();
    let mut tx = Kahan::default();
    let mut ty = Kahan::default();
    for row in rows {
        let (sx, sy) = row?;
        tx.add(sx.value());
        ty.add(sy.value());
    }
    let count = (res as f64) * (res as f64);
    Ok(Vec2::new(tx.value() / count, ty.value() / count))
}

/// ρ(Leb) by midpoint quadrature on a res × res grid. The error estimate is
/// the difference against the half-resolution rule.
pub fn lebesgue_quadrature(lift: &TorusLift, resolution: u32) -> Result<MeasureRotationResult> {
    if resolution < 1 {
        return Err(Error::InvalidArgument(
            "quadrature resolution must be ≥ 1".into(),
        ));
    }
    let fine = quadrature_mean(lift, resolution)?;
    let error_estimate = if resolution >= 2 {
        let coarse = quadrature_mean(lift, resolution / 2)?;
        (fine - coarse).norm()
    } else {
        0.0
    };
    Ok(MeasureRotationResult {
        vector: fine,
        method: MeasureMethod::GridQuadrature,
        error_estimate,
        sample_count: resolution as u64 * resolution as u64,
        seed: None,
    })
}

/// Method-dispatching front for ρ(Leb). `size` is the grid resolution per
/// axis for quadrature and the sample count for Monte Carlo; `seed` is used
/// by Monte Carlo only.
pub fn lebesgue_rotation_vector(
    lift: &TorusLift,
    method: MeasureMethod,
    size: u64,
    seed: u64,
) -> Result<MeasureRotationResult> {
    match method {
        MeasureMethod::GridQuadrature => {
            let res = u32::try_from(size)
                .map_err(|_| Error::InvalidArgument("quadrature resolution too large".into()))?;
            lebesgue_quadrature(lift, res)
        }
        MeasureMethod::MonteCarlo => lebesgue_monte_carlo(lift, size, seed),
        MeasureMethod::OrbitAverage => Err(Error::InvalidArgument(
            "the Lebesgue measure has no orbit-average method; use orbit_rotation_vector".into(),
        )),
    }
}

const MC_BLOCK: u64 = 1 << 14;

/// ρ(Leb) by seeded Monte Carlo with a standard-error estimate. Samples are
/// drawn in fixed blocks, each block from its own ChaCha stream, so the
/// result is reproducible and independent of the worker count.
pub fn lebesgue_monte_carlo(
    lift: &TorusLift,
    n_samples: u64,
    seed: u64,
) -> Result<MeasureRotationResult> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 MC samples".into()));
    }
    let n_blocks = n_samples.div_ceil(MC_BLOCK);
    let blocks: Vec<Result<[Kahan; 4]>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b + 1);
            let lo = b * MC_BLOCK;
            let hi = ((b + 1) * MC_BLOCK).min(n_samples);
            let mut acc = [Kahan::default(); 4];
            for _ in lo..hi {
                let p = Vec2::new(rng.gen::<f64>(), rng.gen::<f64>());
                let phi = lift.eval(p)? - p;
                acc[0].add(phi.x);
                acc[1].add(phi.y);
                acc[2].add(phi.x * phi.x);
                acc[3].add(phi.y * phi.y);
            }
            Ok(acc)
        })
        .collect();
    let mut tot = [Kahan::default(); 4];
    for block in blocks {
        let acc = block?;
        for (t, a) in tot.iter_mut().zip(acc) {
            t.add(a.value());
        }
    }
    let n = n_samples as f64;
    let mean = Vec2::new(tot[0].value() / n, tot[1].value() / n);
    let var_x = (tot[2].value() / n - mean.x * mean.x).max(0.0);
    let var_y = (tot[3].value() / n - mean.y * mean.y).max(0.0);
    let error_estimate = ((var_x + var_y) / n).sqrt();
    Ok(MeasureRotationResult {
        vector: mean,
        method: MeasureMethod::MonteCarlo,
        error_estimate,
        sample_count: n_samples,
        seed: Some(seed),
    })
}

/// Rotation vector of the orbit empirical measure: the Birkhoff average over
/// the last `tail_fraction` of an n-step orbit. The error estimate compares
/// the second-half average with the full average.
pub fn orbit_rotation_vector(
    lift: &TorusLift,
    x: Vec2,
    n: u64,
    tail_fraction: f64,
) -> Result<MeasureRotationResult> {
    if n < 10 {
        return Err(Error::InvalidArgument("orbit length must be ≥ 10".into()));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(
            "tail_fraction must be in (0, 1]".into(),
        ));
    }
    let window = ((n as f64 * tail_fraction).round() as u64).clamp(1, n);
    let m0 = n - window;
    let half = n / 2;
    let mut checkpoints: Vec<u64> = [m0, half, n].into_iter().filter(|&c| c >= 1).collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let recs = displacement_checkpoints(lift, x, &checkpoints)?;
    let at = |k: u64| -> Vec2 {
        if k == 0 {
            Vec2::ZERO
        } else {
            recs.iter().find(|r| r.n == k).unwrap().delta
        }
    };
    let tail_avg = (at(n) - at(m0)) / (n - m0) as f64;
    let half_avg = (at(n) - at(half)) / (n - half) as f64;
    let full_avg = at(n) / n as f64;
    Ok(MeasureRotationResult {
        vector: tail_avg,
        method: MeasureMethod::OrbitAverage,
        error_estimate: (half_avg - full_avg).norm(),
        sample_count: n,
        seed: None,
    })
}

/// Area-preservation report: max |det DF − 1| over seeded samples.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AreaCheckReport {
    pub pass: bool,
    pub max_det_defect: f64,
    pub samples: u32,
    pub tol: f64,
}

pub fn area_preservation_check(
    lift: &TorusLift,
    n_samples: u32,
    seed: u64,
    tol: f64,
) -> Result<AreaCheckReport> {
    if n_samples < 1 {
        return Err(Error::InvalidArgument("n_samples must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_det_defect = 0.0f64;
    for _ in 0..n_samples {
        let p = Vec2::new(rng.gen::<f64>(), rng.gen::<f64>());
        let det = lift.jacobian(p)?.det();
        max_det_defect = max_det_defect.max((det - 1.0).abs());
    }
    Ok(AreaCheckReport {
        pass: max_det_defect <= tol,
        max_det_defect,
        samples: n_samples,
        tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoylandStatus {
    InteriorWithMargin,
    BoundaryIndeterminate,
    OutsideViolation,
}

/// Verdict of the interior test for ρ(Leb) against a rotation-set estimate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoylandVerdict {
    pub verdict: BoylandStatus,
    /// The margin actually tested: caller margin plus the measure error.
    pub margin_used: f64,
    /// Signed distance of ρ(Leb) to the hull boundary (positive inside).
    pub distance_to_boundary: f64,
}

/// Decide whether the measured ρ(Leb) sits in the interior of the hull
/// estimate with the requested margin. A violation is only declared when
/// the point falls outside by more than the combined error budget (measure
/// error plus the hull's final stabilization diagnostic); for an
/// area-preserving map that is a red-flag diagnostic, not an expected
/// outcome.
pub fn boyland_check(
    rotset: &RotationSetEstimate,
    leb: &MeasureRotationResult,
    margin: f64,
) -> BoylandVerdict {
    let margin_used = margin + leb.error_estimate;
    let distance_to_boundary = rotset.hull.signed_inner_distance(leb.vector);
    if rotset.hull.is_degenerate() {
        return BoylandVerdict {
            verdict: BoylandStatus::BoundaryIndeterminate,
            margin_used,
            distance_to_boundary,
        };
    }
    let verdict = if distance_to_boundary >= margin_used {
        BoylandStatus::InteriorWithMargin
    } else if -distance_to_boundary > leb.error_estimate + rotset.final_hausdorff() {
        BoylandStatus::OutsideViolation
    } else {
        BoylandStatus::BoundaryIndeterminate
    };
    BoylandVerdict {
        verdict,
        margin_used,
        distance_to_boundary,
    }
}
