//! `rotor boyland`: area-preservation check, ρ(Leb), rotation-set estimate,
//! and the interior verdict, all recorded in verdict.json.
//!
//! Exit codes: 0 for InteriorWithMargin and (with a warning) for
//! BoundaryIndeterminate or an unmet area hypothesis; 3 for OutsideViolation.

use super::{exit_code_for, Invocation, EXIT_OK, EXIT_VIOLATION};
use crate::artifacts::write_json;
use rotor_core::measure::{area_preservation_check, boyland_check, BoylandStatus};
use rotor_core::rotset::estimate_rotation_set;
use serde_json::json;
use std::time::Instant;

pub fn run(inv: &Invocation) -> i32 {
    match execute(inv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("boyland: {e}");
            exit_code_for(&e)
        }
    }
}

fn execute(inv: &Invocation) -> Result<i32, rotor_core::Error> {
    let start = Instant::now();
    let lift = inv.config.lift()?;
    let tol = &inv.config.tolerances;
    let seed = inv.config.run.seed;

    let area = area_preservation_check(&lift, 256, seed, tol.area_tol)?;
    let leb = super::leb::measure(inv, &lift)?;
    let est = estimate_rotation_set(&lift, &inv.config.grid, &inv.config.run.n_schedule)?;

    let mut obj = serde_json::Map::new();
    obj.insert("map".into(), inv.map_json());
    obj.insert("grid".into(), inv.grid_json());
    obj.insert("area_check".into(), serde_json::to_value(area).unwrap());
    obj.insert("lebesgue".into(), serde_json::to_value(leb).unwrap());
    obj.insert(
        "rotation_set".into(),
        json!({
            "schedule": est.n_schedule,
            "hausdorff_diagnostics": est.hausdorff_diag,
            "vertices": est.hull.vertices().iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
            "area": est.hull.area(),
        }),
    );

    let code = if !area.pass {
        obj.insert(
            "verdict".into(),
            json!({
                "status": "NotAreaPreserving",
                "max_det_defect": area.max_det_defect,
            }),
        );
        eprintln!(
            "warning: map is not area preserving (defect {:.3e}); the interior prediction does not apply",
            area.max_det_defect
        );
        EXIT_OK
    } else {
        let verdict = boyland_check(&est, &leb, tol.margin);
        obj.insert("verdict".into(), serde_json::to_value(verdict).unwrap());
        match verdict.verdict {
            BoylandStatus::InteriorWithMargin => {
                println!(
                    "ρ(Leb) = ({:.6}, {:.6}) lies in the interior with margin {:.4} (distance {:.4})",
                    leb.vector.x, leb.vector.y, verdict.margin_used, verdict.distance_to_boundary
                );
                EXIT_OK
            }
            BoylandStatus::BoundaryIndeterminate => {
                eprintln!(
                    "warning: interior test indeterminate (distance to boundary {:.4}, margin {:.4})",
                    verdict.distance_to_boundary, verdict.margin_used
                );
                EXIT_OK
            }
            BoylandStatus::OutsideViolation => {
                eprintln!(
                    "VIOLATION: ρ(Leb) sits outside the hull estimate by {:.4}, beyond the error budget",
                    -verdict.distance_to_boundary
                );
                EXIT_VIOLATION
            }
        }
    };

    inv.maybe_timing(&mut obj, start.elapsed().as_secs_f64());
    write_json(&inv.out("verdict.json"), &obj)
        .map_err(|e| rotor_core::Error::InvalidArgument(format!("cannot write artifact: {e}")))?;
    Ok(code)
}
