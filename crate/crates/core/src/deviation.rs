//! Empirical probes of the uniform deviation bound.
//!
//! For a boundary point ω of the rotation set with supporting line direction
//! v and outward unit normal v⊥, the deviation bound says
//! ⟨F̃ⁿ(x̃) − x̃ − n·ω, v⊥⟩ stays below a map constant for every x̃ and n.
//! That is a universal statement; the probe samples a seed grid and an orbit
//! schedule, so what it asserts is the growth rate: the least-squares slope
//! of D(n) = max over the grid of the directional deviation. Slope ≈ 0 means
//! the support point holds up; a positive slope measures exactly how far the
//! hull underestimates the support in that direction.

use crate::error::{Error, Result};
use crate::geom::{Mat2, Vec2};
use crate::hull::{halfplane_intersection, supporting_line, ConvexPolygon, HalfPlane};
use crate::map::TorusLift;
use crate::orbit::{batch_displacement_checkpoints, deviation_of, GridSpec, LiftedPoint};
use crate::rotset::RotationSetEstimate;
use rayon::prelude::*;
use serde::Serialize;

/// Default fraction of the schedule used for the tail-slope fit.
pub const DEFAULT_FIT_FRACTION: f64 = 0.5;

/// Deviation probe result for one direction.
#[derive(Clone, Debug, Serialize)]
pub struct DeviationReport {
    /// Probed outward-normal angle, radians.
    pub theta: f64,
    pub omega: Vec2,
    pub v_perp: Vec2,
    /// (n, D_n) with D_n the grid maximum of the directional deviation.
    pub samples: Vec<(u64, f64)>,
    pub sup_observed: f64,
    /// Least-squares slope of D_n versus n over the fit window.
    pub tail_slope: f64,
}

/// Max-over-grid deviation profile for an explicit (ω, v⊥) pair.
pub fn deviation_profile(
    lift: &TorusLift,
    omega: Vec2,
    v_perp: Vec2,
    grid: &GridSpec,
    n_schedule: &[u64],
) -> Result<Vec<(u64, f64)>> {
    let table = batch_displacement_checkpoints(lift, grid, n_schedule)?;
    Ok(profile_from_table(&table, omega, v_perp, n_schedule))
}

fn profile_from_table(
    table: &[Vec<crate::orbit::DisplacementRecord>],
    omega: Vec2,
    v_perp: Vec2,
    n_schedule: &[u64],
) -> Vec<(u64, f64)> {
    n_schedule
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let d = table
                .iter()
                .map(|recs| deviation_of(&recs[i], omega, v_perp))
                .fold(f64::NEG_INFINITY, f64::max);
            (n, d)
        })
        .collect()
}

/// Least-squares slope over the trailing `fit_fraction` of the samples.
pub fn tail_slope(samples: &[(u64, f64)], fit_fraction: f64) -> f64 {
    let k = ((samples.len() as f64 * fit_fraction).ceil() as usize)
        .clamp(2.min(samples.len()), samples.len());
    let window = &samples[samples.len() - k..];
    if window.len() < 2 {
        return 0.0;
    }
    let n = window.len() as f64;
    let mean_x = window.iter().map(|&(x, _)| x as f64).sum::<f64>() / n;
    let mean_y = window.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in window {
        let dx = x as f64 - mean_x;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Probe the deviation bound in several directions against a hull estimate.
/// Works for point and segment hulls too (a rigid translation is the
/// canonical exact case).
pub fn probe_theorem1(
    lift: &TorusLift,
    rotset: &RotationSetEstimate,
    thetas: &[f64],
    grid: &GridSpec,
    n_schedule: &[u64],
    fit_fraction: f64,
) -> Result<Vec<DeviationReport>> {
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("need at least one direction".into()));
    }
    if rotset.hull.is_empty() {
        return Err(Error::InvalidArgument("rotation-set hull is empty".into()));
    }
    if !(fit_fraction > 0.0 && fit_fraction <= 1.0) {
        return Err(Error::InvalidArgument(
            "fit_fraction must be in (0, 1]".into(),
        ));
    }
    let table = batch_displacement_checkpoints(lift, grid, n_schedule)?;
    Ok(thetas
        .iter()
        .map(|&theta| {
            let line = supporting_line(&rotset.hull, theta);
            let samples = profile_from_table(&table, line.omega, line.v_perp, n_schedule);
            let sup_observed = samples
                .iter()
                .map(|&(_, d)| d)
                .fold(f64::NEG_INFINITY, f64::max);
            DeviationReport {
                theta,
                omega: line.omega,
                v_perp: line.v_perp,
                sup_observed,
                tail_slope: tail_slope(&samples, fit_fraction),
                samples,
            }
        })
        .collect())
}

/// Rebuild a hull as the intersection of support half-planes
/// {⟨p, u_θ⟩ ≤ ĥ(u_θ)} with ĥ the grid support maximum at orbit length
/// `n_ref`. The result can exceed the cloud hull in directions where the
/// cloud under-samples; by the deviation bound it overshoots the true
/// support by at most M̂/n_ref.
pub fn refine_hull_by_deviation(
    lift: &TorusLift,
    rotset: &RotationSetEstimate,
    thetas: &[f64],
    grid: &GridSpec,
    n_ref: u64,
) -> Result<ConvexPolygon> {
    let n_max = rotset.n_schedule.last().copied().unwrap_or(1);
    if n_ref < n_max {
        return Err(Error::InvalidArgument(format!(
            "n_ref = {n_ref} must be ≥ the estimate's longest orbit {n_max}"
        )));
    }
    if thetas.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least three directions to bound a region".into(),
        ));
    }
    let table = batch_displacement_checkpoints(lift, grid, &[n_ref])?;
    let planes: Vec<HalfPlane> = thetas
        .iter()
        .map(|&theta| {
            let u = Vec2::new(theta.cos(), theta.sin());
            let hi = table
                .iter()
                .map(|recs| recs[0].average.dot(u))
                .fold(f64::NEG_INFINITY, f64::max);
            HalfPlane {
                normal: u,
                offset: hi,
            }
        })
        .collect();
    halfplane_intersection(&planes)
}

/// Orbit-support boundedness report: the running extreme of
/// |⟨F̃ⁿ(x̃) − x̃ − n·ρ(μ), v⊥⟩| along one orbit.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupportBoundReport {
    pub rho_mu: Vec2,
    pub max_abs_deviation: f64,
    pub n_max: u64,
    pub two_sided: bool,
}

/// Track the deviation of a single orbit against a claimed rotation vector.
/// `x` should approximate a point in the support of a measure with rotation
/// vector `rho_mu`; if the orbit average drifts from `rho_mu` by more than
/// 10/n_max a warning is logged (the membership itself is not checkable).
pub fn probe_support_bound(
    lift: &TorusLift,
    x: Vec2,
    rho_mu: Vec2,
    v_perp: Vec2,
    n_max: u64,
    two_sided: bool,
) -> Result<SupportBoundReport> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be ≥ 1".into()));
    }
    let lp0 = LiftedPoint::from_plane(x);
    let mut lp = lp0;
    let mut extreme = f64::NEG_INFINITY;
    for n in 1..=n_max {
        lp.step(lift)?;
        let delta = (lp.base - lp0.base) + (lp.lattice - lp0.lattice).as_vec2();
        let d = (delta - n as f64 * rho_mu).dot(v_perp);
        extreme = extreme.max(if two_sided { d.abs() } else { d });
        if n == n_max {
            let drift = (delta / n as f64 - rho_mu).norm();
            if drift > 10.0 / n_max as f64 {
                log::warn!(
                    "orbit average drifts {drift:.3e} from claimed rho_mu ({}, {})",
                    rho_mu.x,
                    rho_mu.y
                );
            }
        }
    }
    Ok(SupportBoundReport {
        rho_mu,
        max_abs_deviation: extreme,
        n_max,
        two_sided,
    })
}

/// Combine two directional bounds |⟨w, v₁⟩| ≤ m₁ and |⟨w, v₂⟩| ≤ m₂ for
/// non-parallel unit v₁, v₂ into a full-norm bound on w: the exact maximum
/// of ‖A⁻¹ c‖ over the corner values c = (±m₁, ±m₂). `None` when the
/// directions are (near-)parallel.
pub fn norm_bound_from_directional(m1: f64, v1: Vec2, m2: f64, v2: Vec2) -> Option<f64> {
    let a = Mat2::new(v1.x, v1.y, v2.x, v2.y);
    if a.det().abs() < 1e-9 {
        return None;
    }
    let mut best = 0.0f64;
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            let w = a.solve(Vec2::new(sx * m1, sy * m2))?;
            best = best.max(w.norm());
        }
    }
    Some(best)
}

/// Grid maxima of deviation profiles computed with a parallel reduction;
/// max is associative and exact, so the result is worker-count independent.
pub fn grid_max_deviation(
    lift: &TorusLift,
    omega: Vec2,
    v_perp: Vec2,
    grid: &GridSpec,
    n: u64,
) -> Result<f64> {
    let seeds = grid.points();
    let devs: Vec<Result<f64>> = seeds
        .par_iter()
        .map(|&seed| crate::orbit::directional_deviation(lift, seed, n, omega, v_perp))
        .collect();
    let mut best = f64::NEG_INFINITY;
    for (seed, d) in seeds.iter().zip(devs) {
        match d {
            Ok(v) => best = best.max(v),
            Err(e) => return Err(Error::batch(*seed, e)),
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::TorusLift;
    use crate::rotset::estimate_rotation_set;

    fn translation_estimate() -> (TorusLift, RotationSetEstimate, GridSpec) {
        let lift = TorusLift::translation(0.25, 0.75).unwrap();
        let grid = GridSpec::midpoint(4).unwrap();
        let est = estimate_rotation_set(&lift, &grid, &[5, 10]).unwrap();
        (lift, est, grid)
    }

    #[test]
    fn translation_deviations_vanish() {
        let (lift, est, grid) = translation_estimate();
        let thetas: Vec<f64> = (0..8)
            .map(|k| k as f64 * std::f64::consts::TAU / 8.0)
            .collect();
        let reports = probe_theorem1(&lift, &est, &thetas, &grid, &[10, 20, 40], 0.5).unwrap();
        for r in reports {
            assert!(r.sup_observed.abs() < 1e-10, "sup {}", r.sup_observed);
            assert!(r.tail_slope.abs() < 1e-12);
        }
    }

    #[test]
    fn shifted_omega_slope_equals_shift() {
        // moving ω inward by δ along v⊥ adds exactly n·δ to D_n
        let (lift, est, grid) = translation_estimate();
        let delta = 0.1;
        let line = supporting_line(&est.hull, 0.3);
        let shifted = line.omega - delta * line.v_perp;
        let samples =
            deviation_profile(&lift, shifted, line.v_perp, &grid, &[10, 20, 30, 40]).unwrap();
        let slope = tail_slope(&samples, 1.0);
        assert!((slope - delta).abs() < 1e-12, "slope {slope}");
    }

    #[test]
    fn refine_translation_returns_same_point() {
        let (lift, est, grid) = translation_estimate();
        let thetas: Vec<f64> = (0..16)
            .map(|k| k as f64 * std::f64::consts::TAU / 16.0)
            .collect();
        let refined = refine_hull_by_deviation(&lift, &est, &thetas, &grid, 40).unwrap();
        assert!(refined.distance_to(Vec2::new(0.25, 0.75)) < 1e-9);
        assert!(refined.len() <= 2);
    }

    #[test]
    fn refine_requires_long_enough_n() {
        let (lift, est, grid) = translation_estimate();
        let thetas: Vec<f64> = (0..4)
            .map(|k| k as f64 * std::f64::consts::TAU / 4.0)
            .collect();
        assert!(refine_hull_by_deviation(&lift, &est, &thetas, &grid, 5).is_err());
    }

    #[test]
    fn support_bound_translation_zero() {
        let lift = TorusLift::translation(0.3, 0.4).unwrap();
        let rep = probe_support_bound(
            &lift,
            Vec2::new(0.8, 0.8),
            Vec2::new(0.3, 0.4),
            Vec2::new(1.0, 0.0),
            500,
            true,
        )
        .unwrap();
        // zero up to the per-step wrap rounding
        assert!(rep.max_abs_deviation < 1e-12);
    }

    #[test]
    fn support_bound_fixed_point_constant() {
        // exact fixed point of the two-shear: deviation identically zero
        let lift = TorusLift::two_shear(1.2, 1.2, 0.0, 0.0).unwrap();
        let rep_short = probe_support_bound(
            &lift,
            Vec2::new(0.5, 0.5),
            Vec2::ZERO,
            Vec2::new(0.0, 1.0),
            100,
            true,
        )
        .unwrap();
        let rep_long = probe_support_bound(
            &lift,
            Vec2::new(0.5, 0.5),
            Vec2::ZERO,
            Vec2::new(0.0, 1.0),
            10_000,
            true,
        )
        .unwrap();
        assert_eq!(rep_short.max_abs_deviation, 0.0);
        assert_eq!(rep_long.max_abs_deviation, rep_short.max_abs_deviation);
    }

    #[test]
    fn two_directional_bounds_give_full_norm_bound() {
        // on an island orbit with rotation vector (1,1), bounded deviations
        // along two non-parallel normals reconstruct a finite norm bound
        let lift = TorusLift::two_shear(1.04, 1.04, 0.0, 0.0).unwrap();
        let x = Vec2::new(0.2942843572378574, 0.20571564276214263);
        let rho = Vec2::new(1.0, 1.0);
        let v1 = Vec2::new(1.0, 0.0);
        let v2 = Vec2::new(0.0, 1.0);
        let r1 = probe_support_bound(&lift, x, rho, v1, 2000, true).unwrap();
        let r2 = probe_support_bound(&lift, x, rho, v2, 2000, true).unwrap();
        let bound = norm_bound_from_directional(r1.max_abs_deviation, v1, r2.max_abs_deviation, v2)
            .unwrap();
        assert!(bound.is_finite());
        assert!(bound >= r1.max_abs_deviation.max(r2.max_abs_deviation));
        // the island librates with bounded deviation, so the bound is small
        assert!(bound < 10.0, "bound {bound}");
    }

    #[test]
    fn norm_reconstruction_from_two_directions() {
        let b = norm_bound_from_directional(1.0, Vec2::new(1.0, 0.0), 2.0, Vec2::new(0.0, 1.0))
            .unwrap();
        assert!((b - 5f64.sqrt()).abs() < 1e-12);
        assert!(
            norm_bound_from_directional(1.0, Vec2::new(1.0, 0.0), 1.0, Vec2::new(1.0, 0.0))
                .is_none()
        );
    }

    #[test]
    fn grid_refinement_monotone() {
        // nested grids: offset 1/32 at res 16 ⊂ offset 1/32 at res 32
        let lift = TorusLift::two_shear(1.2, 1.2, 0.0, 0.0).unwrap();
        let coarse = GridSpec::new(16, Vec2::new(1.0 / 32.0, 1.0 / 32.0)).unwrap();
        let fine = GridSpec::new(32, Vec2::new(1.0 / 32.0, 1.0 / 32.0)).unwrap();
        let omega = Vec2::ZERO;
        let v_perp = Vec2::new(0.0, 1.0);
        for n in [50u64, 200] {
            let d_c = grid_max_deviation(&lift, omega, v_perp, &coarse, n).unwrap();
            let d_f = grid_max_deviation(&lift, omega, v_perp, &fine, n).unwrap();
            assert!(d_f >= d_c - 1e-12, "finer grid max {d_f} < coarse {d_c}");
        }
    }

    #[test]
    fn halfplane_restore_clipped_square() {
        // a square support reconstructed from 8 directions, one of which
        // the cloud hull under-represents: the refined polygon restores it
        let planes: Vec<HalfPlane> = (0..8)
            .map(|k| {
                let th = k as f64 * std::f64::consts::TAU / 8.0;
                let u = Vec2::new(th.cos(), th.sin());
                // support of the unit square centered at origin
                let hi = 0.5 * (u.x.abs() + u.y.abs()).max((u.x.abs()).max(u.y.abs()) * 1.0);
                HalfPlane {
                    normal: u,
                    offset: hi,
                }
            })
            .collect();
        let poly = halfplane_intersection(&planes).unwrap();
        // the octagon contains the square's edge midpoints exactly
        assert!(poly.contains(Vec2::new(0.5, 0.0)));
        assert!(poly.contains(Vec2::new(0.0, 0.5)));
        assert!(!poly.contains(Vec2::new(0.7, 0.7)));
    }
}
