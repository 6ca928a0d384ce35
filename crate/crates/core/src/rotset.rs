//! Finite-sample rotation-set estimation.
//!
//! The rotation set of a lift is the nested intersection over i of the
//! closures of { (F̃ⁿ(z̃) − z̃)/n : n ≥ i, z̃ ∈ ℝ² }. The finite surrogate
//! samples z̃ on a seed grid and n on a schedule: the tail cloud at schedule
//! index i collects the displacement averages for all scheduled n ≥ nᵢ, and
//! the estimate is the hull of the last tail. Hausdorff distances between
//! successive tail hulls quantify stabilization, because the true set is the
//! nested limit.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::hull::{convex_hull, hausdorff_distance, ConvexPolygon};
use crate::map::TorusLift;
use crate::orbit::{batch_displacement_checkpoints, GridSpec};
use serde::Serialize;

/// Hull estimate with its stabilization diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct RotationSetEstimate {
    /// Hull of the final tail cloud.
    pub hull: ConvexPolygon,
    pub n_schedule: Vec<u64>,
    /// Hausdorff distances between successive tail hulls; length is one
    /// less than the schedule.
    pub hausdorff_diag: Vec<f64>,
    pub grid: GridSpec,
}

impl RotationSetEstimate {
    /// The last stabilization diagnostic (0 for single-entry schedules).
    pub fn final_hausdorff(&self) -> f64 {
        self.hausdorff_diag.last().copied().unwrap_or(0.0)
    }
}

/// Estimate the rotation set over `grid` with orbit lengths `n_schedule`
/// (strictly increasing, at least two entries).
pub fn estimate_rotation_set(
    lift: &TorusLift,
    grid: &GridSpec,
    n_schedule: &[u64],
) -> Result<RotationSetEstimate> {
    if n_schedule.len() < 2 {
        return Err(Error::InvalidArgument(
            "n_schedule needs at least two entries".into(),
        ));
    }
    let table = batch_displacement_checkpoints(lift, grid, n_schedule)?;
    let k = n_schedule.len();

    // cloud[i] = displacement averages at schedule entry i over all seeds
    let clouds: Vec<Vec<Vec2>> = (0..k)
        .map(|i| table.iter().map(|recs| recs[i].average).collect())
        .collect();

    let tail_hulls: Vec<ConvexPolygon> = (0..k)
        .map(|i| {
            let tail: Vec<Vec2> = clouds[i..].iter().flatten().copied().collect();
            convex_hull(&tail)
        })
        .collect::<Result<_>>()?;

    let hausdorff_diag = tail_hulls
        .windows(2)
        .map(|w| hausdorff_distance(&w[0], &w[1]))
        .collect();

    Ok(RotationSetEstimate {
        hull: tail_hulls.last().unwrap().clone(),
        n_schedule: n_schedule.to_vec(),
        hausdorff_diag,
        grid: *grid,
    })
}

/// One-sided support estimate in direction `u` (unit vector):
/// `hi` is the exact grid maximum of ⟨Δₙ(x)/n, u⟩ and, by the uniform
/// deviation bound, the true support value lies in [hi − M̂/n, hi].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupportEstimate {
    pub lo: f64,
    pub hi: f64,
}

/// Estimate the support function h(u) from orbit length n. `m_hat` is the
/// deviation-constant estimate; see [`default_m_hat`].
pub fn support_function_estimate(
    lift: &TorusLift,
    u: Vec2,
    grid: &GridSpec,
    n: u64,
    m_hat: f64,
) -> Result<SupportEstimate> {
    if (u.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "direction u must be unit length".into(),
        ));
    }
    if m_hat < 0.0 {
        return Err(Error::InvalidArgument("m_hat must be nonnegative".into()));
    }
    let table = batch_displacement_checkpoints(lift, grid, &[n])?;
    let hi = table
        .iter()
        .map(|recs| recs[0].average.dot(u))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SupportEstimate {
        lo: hi - m_hat / n as f64,
        hi,
    })
}

/// Default deviation-constant estimate M̂ = 2 · sup over the grid of the
/// one-step displacement norm. The theoretical constant is not computable
/// at this scale, so this is a user-facing knob with a displacement-sized
/// default.
pub fn default_m_hat(lift: &TorusLift, grid: &GridSpec) -> Result<f64> {
    let mut sup = 0.0f64;
    for p in grid.points() {
        let phi = lift.eval(p)? - p;
        sup = sup.max(phi.norm());
    }
    Ok(2.0 * sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::TorusLift;

    #[test]
    fn translation_estimate_is_point() {
        let lift = TorusLift::translation(0.25, 0.75).unwrap();
        for res in [1u32, 3, 8] {
            let grid = GridSpec::midpoint(res).unwrap();
            let est = estimate_rotation_set(&lift, &grid, &[1, 2, 4]).unwrap();
            assert!(est.hull.is_point());
            let v = est.hull.vertices()[0];
            assert!((v - Vec2::new(0.25, 0.75)).norm() < 1e-12);
            assert!(est.hausdorff_diag.iter().all(|&d| d < 1e-12));
        }
    }

    #[test]
    fn pure_translation_via_constants() {
        // a = b = 0 kills the shears; the c's are a rigid translation
        let lift = TorusLift::two_shear(0.0, 0.0, 0.25, 0.75).unwrap();
        let grid = GridSpec::midpoint(4).unwrap();
        let est = estimate_rotation_set(&lift, &grid, &[2, 5]).unwrap();
        assert!(est.hull.is_point());
        assert!((est.hull.vertices()[0] - Vec2::new(0.25, 0.75)).norm() < 1e-12);
    }

    #[test]
    fn schedule_needs_two_entries() {
        let lift = TorusLift::translation(0.1, 0.1).unwrap();
        let grid = GridSpec::midpoint(2).unwrap();
        assert!(estimate_rotation_set(&lift, &grid, &[5]).is_err());
        assert!(estimate_rotation_set(&lift, &grid, &[5, 5]).is_err());
        assert!(estimate_rotation_set(&lift, &grid, &[5, 4]).is_err());
    }

    #[test]
    fn support_translation_exact() {
        let lift = TorusLift::translation(0.3, -0.2).unwrap();
        let grid = GridSpec::midpoint(4).unwrap();
        let u = Vec2::new(0.6, 0.8);
        for n in [1u64, 10, 100] {
            let s = support_function_estimate(&lift, u, &grid, n, 1.0).unwrap();
            let want = Vec2::new(0.3, -0.2).dot(u);
            assert!((s.hi - want).abs() < 1e-12);
            assert!(s.lo <= s.hi);
            assert!((s.hi - s.lo - 1.0 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn support_singleton_grid() {
        let lift = TorusLift::two_shear(0.9, 0.9, 0.0, 0.0).unwrap();
        let grid = GridSpec::new(1, Vec2::new(0.3, 0.6)).unwrap();
        let n = 50;
        let u = Vec2::new(0.0, 1.0);
        let s = support_function_estimate(&lift, u, &grid, n, 0.0).unwrap();
        let avg = crate::orbit::birkhoff_average(&lift, Vec2::new(0.3, 0.6), n).unwrap();
        assert!((s.hi - avg.y).abs() < 1e-15);
    }

    #[test]
    fn support_envelope_stabilizes_where_support_is_realized() {
        // seed inside the stable accelerator island of the a = b = 1.04
        // two-shear (rotation vector (1,1)): the support estimate from that
        // orbit stabilizes, and the n vs 4n values agree within M̂/n
        let lift = TorusLift::two_shear(1.04, 1.04, 0.0, 0.0).unwrap();
        let island = Vec2::new(0.2942843572378574, 0.20571564276214263);
        let grid = GridSpec::new(1, island).unwrap();
        let m_hat = default_m_hat(&lift, &grid).unwrap();
        let u = Vec2::new(0.0, 1.0);
        let s1 = support_function_estimate(&lift, u, &grid, 1000, m_hat).unwrap();
        let s2 = support_function_estimate(&lift, u, &grid, 4000, m_hat).unwrap();
        assert!((s1.hi - 1.0).abs() < 1e-2, "island support {}", s1.hi);
        assert!(
            (s1.hi - s2.hi).abs() <= m_hat / 1000.0,
            "{} vs {}",
            s1.hi,
            s2.hi
        );
        assert!(s1.lo <= s1.hi);
    }

    #[test]
    fn support_upper_estimate_shrinks_without_islands() {
        // strongly mixing parameters: the finite-orbit maximum decays
        // toward the center, so the n-envelope is monotone from above
        let lift = TorusLift::two_shear(1.2, 1.2, 0.0, 0.0).unwrap();
        let grid = GridSpec::midpoint(24).unwrap();
        let u = Vec2::new(0.0, 1.0);
        let s1 = support_function_estimate(&lift, u, &grid, 1000, 0.0).unwrap();
        let s2 = support_function_estimate(&lift, u, &grid, 4000, 0.0).unwrap();
        assert!(s2.hi <= s1.hi + 1e-12);
    }

    #[test]
    fn default_m_hat_translation() {
        let lift = TorusLift::translation(0.3, 0.4).unwrap();
        let grid = GridSpec::midpoint(4).unwrap();
        let m = default_m_hat(&lift, &grid).unwrap();
        assert!((m - 1.0).abs() < 1e-12); // 2·‖(0.3, 0.4)‖ = 1
    }
}
