//! `rotor rotset`: estimate the rotation set, optionally refine it by
//! directional support estimates, and emit hull.csv, hull.svg, and
//! diagnostics.json.

use super::{exit_code_for, Invocation, EXIT_OK};
use crate::artifacts::{fmt_f64, write_csv, write_json, Svg};
use rotor_core::deviation::refine_hull_by_deviation;
use rotor_core::orbit::batch_displacement_checkpoints;
use rotor_core::rotset::estimate_rotation_set;
use rotor_core::{ConvexPolygon, Vec2};
use serde_json::json;
use std::time::Instant;

pub fn run(inv: &Invocation) -> i32 {
    match execute(inv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rotset: {e}");
            exit_code_for(&e)
        }
    }
}

fn hull_json(hull: &ConvexPolygon) -> serde_json::Value {
    json!({
        "vertices": hull.vertices().iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
        "area": hull.area(),
        "degenerate": hull.is_degenerate(),
    })
}

fn execute(inv: &Invocation) -> Result<i32, rotor_core::Error> {
    let start = Instant::now();
    let lift = inv.config.lift()?;
    let grid = inv.config.grid;
    let schedule = &inv.config.run.n_schedule;

    let est = estimate_rotation_set(&lift, &grid, schedule)?;

    // final-tail cloud for the scatter plot
    let n_max = *schedule.last().unwrap();
    let cloud: Vec<Vec2> = batch_displacement_checkpoints(&lift, &grid, &[n_max])?
        .into_iter()
        .map(|recs| recs[0].average)
        .collect();

    let refined = if inv.refine {
        let thetas = inv.config.run.directions.angles();
        let n_ref = if inv.config.deviate.n_ref == 0 {
            n_max
        } else {
            inv.config.deviate.n_ref
        };
        Some(refine_hull_by_deviation(
            &lift, &est, &thetas, &grid, n_ref,
        )?)
    } else {
        None
    };

    let reported = refined.as_ref().unwrap_or(&est.hull);
    let rows: Vec<Vec<String>> = reported
        .vertices()
        .iter()
        .map(|v| vec![fmt_f64(v.x), fmt_f64(v.y)])
        .collect();
    write_csv(&inv.out("hull.csv"), &["x", "y"], &rows).map_err(io_err)?;

    let mut svg = Svg::covering([cloud.as_slice(), reported.vertices()]);
    svg.scatter(&cloud, 1.5, "#4878cf");
    svg.polygon(&est.hull, "#d1495b");
    if let Some(r) = &refined {
        svg.polygon(r, "#2e7d32");
    }
    svg.write(&inv.out("hull.svg")).map_err(io_err)?;

    let mut diag = serde_json::Map::new();
    diag.insert("map".into(), inv.map_json());
    diag.insert("grid".into(), inv.grid_json());
    diag.insert("schedule".into(), json!(schedule));
    diag.insert("hausdorff_diagnostics".into(), json!(est.hausdorff_diag));
    diag.insert("hull".into(), hull_json(&est.hull));
    if let Some(r) = &refined {
        diag.insert("refined_hull".into(), hull_json(r));
    }
    inv.maybe_timing(&mut diag, start.elapsed().as_secs_f64());
    write_json(&inv.out("diagnostics.json"), &diag).map_err(io_err)?;

    println!(
        "rotation set estimate: {} vertices, area {:.6}, final Hausdorff diagnostic {:.6}",
        est.hull.len(),
        est.hull.area(),
        est.final_hausdorff()
    );
    Ok(EXIT_OK)
}

fn io_err(e: std::io::Error) -> rotor_core::Error {
    rotor_core::Error::InvalidArgument(format!("cannot write artifact: {e}"))
}
