//! `rotor deviate`: probe the boundary deviation growth D(n) in a fan of
//! directions against the hull estimate (optionally refined), with an
//! optional inward-shift sensitivity control.

use super::{exit_code_for, Invocation, EXIT_OK};
use crate::artifacts::{fmt_f64, write_csv, write_json, Svg};
use rotor_core::deviation::{
    deviation_profile, probe_theorem1, refine_hull_by_deviation, tail_slope,
};
use rotor_core::rotset::estimate_rotation_set;
use rotor_core::{RotationSetEstimate, Vec2};
use serde_json::json;
use std::time::Instant;

pub fn run(inv: &Invocation) -> i32 {
    match execute(inv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("deviate: {e}");
            exit_code_for(&e)
        }
    }
}

fn execute(inv: &Invocation) -> Result<i32, rotor_core::Error> {
    let start = Instant::now();
    let lift = inv.config.lift()?;
    let grid = inv.config.grid;
    let schedule = &inv.config.run.n_schedule;
    let thetas = inv.config.run.directions.angles();
    let fit = inv.config.tolerances.fit_fraction;

    let est = estimate_rotation_set(&lift, &grid, schedule)?;
    let n_max = *schedule.last().unwrap();
    let probe_target = if inv.refine {
        let n_ref = if inv.config.deviate.n_ref == 0 {
            n_max
        } else {
            inv.config.deviate.n_ref
        };
        let refined = refine_hull_by_deviation(&lift, &est, &thetas, &grid, n_ref)?;
        RotationSetEstimate {
            hull: refined,
            n_schedule: est.n_schedule.clone(),
            hausdorff_diag: est.hausdorff_diag.clone(),
            grid,
        }
    } else {
        est
    };

    let reports = probe_theorem1(&lift, &probe_target, &thetas, &grid, schedule, fit)?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for r in &reports {
        for (n, d) in &r.samples {
            rows.push(vec![fmt_f64(r.theta), n.to_string(), fmt_f64(*d)]);
        }
    }
    write_csv(&inv.out("deviations.csv"), &["theta", "n", "d_n"], &rows).map_err(io_err)?;

    // optional sensitivity control: shift ω inward by δ along v⊥
    let shift = inv.config.deviate.shift;
    let mut summaries = Vec::new();
    for r in &reports {
        let mut entry = json!({
            "theta": r.theta,
            "omega": [r.omega.x, r.omega.y],
            "v_perp": [r.v_perp.x, r.v_perp.y],
            "sup_observed": r.sup_observed,
            "tail_slope": r.tail_slope,
        });
        if shift > 0.0 {
            let omega = r.omega - shift * r.v_perp;
            let samples = deviation_profile(&lift, omega, r.v_perp, &grid, schedule)?;
            entry["shifted_tail_slope"] = json!(tail_slope(&samples, fit));
            entry["shift"] = json!(shift);
        }
        summaries.push(entry);
    }

    let mut svg = Svg::covering([&plot_points(&reports)[..]]);
    for r in &reports {
        svg.polyline(
            &r.samples
                .iter()
                .map(|&(n, d)| Vec2::new(n as f64, d))
                .collect::<Vec<_>>(),
            "#4878cf",
        );
    }
    svg.write(&inv.out("deviations.svg")).map_err(io_err)?;

    let max_slope = reports
        .iter()
        .map(|r| r.tail_slope)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut obj = serde_json::Map::new();
    obj.insert("map".into(), inv.map_json());
    obj.insert("grid".into(), inv.grid_json());
    obj.insert("schedule".into(), json!(schedule));
    obj.insert("refined".into(), json!(inv.refine));
    obj.insert("fit_fraction".into(), json!(fit));
    obj.insert("directions".into(), json!(summaries));
    obj.insert("max_tail_slope".into(), json!(max_slope));
    inv.maybe_timing(&mut obj, start.elapsed().as_secs_f64());
    write_json(&inv.out("deviate.json"), &obj).map_err(io_err)?;

    println!(
        "deviation probe over {} directions: max tail slope {:.6}",
        reports.len(),
        max_slope
    );
    Ok(EXIT_OK)
}

fn plot_points(reports: &[rotor_core::deviation::DeviationReport]) -> Vec<Vec2> {
    reports
        .iter()
        .flat_map(|r| r.samples.iter().map(|&(n, d)| Vec2::new(n as f64, d)))
        .collect()
}

fn io_err(e: std::io::Error) -> rotor_core::Error {
    rotor_core::Error::InvalidArgument(format!("cannot write artifact: {e}"))
}
