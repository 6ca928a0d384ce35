//! `rotor periodic`: Newton search for periodic orbits realizing the
//! rational rotation vector (p/q, s/q), with a stdout table and CSV/JSON
//! artifacts.

use super::{exit_code_for, Invocation, EXIT_OK};
use crate::artifacts::{fmt_f64, write_csv, write_json};
use rotor_core::orbit::GridSpec;
use rotor_core::periodic::{realize_rational, RationalVec, SearchConfig};
use rotor_core::rotset::estimate_rotation_set;
use serde_json::json;

pub fn run(inv: &Invocation) -> i32 {
    match execute(inv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("periodic: {e}");
            exit_code_for(&e)
        }
    }
}

fn execute(inv: &Invocation) -> Result<i32, rotor_core::Error> {
    let lift = inv.config.lift()?;
    let section = &inv.config.periodic;
    let target = RationalVec::new(section.p, section.s, section.q)?;
    let cfg = SearchConfig {
        seed_grid: GridSpec::midpoint(section.seed_resolution)?,
        newton_tol: inv.config.tolerances.newton_tol,
        max_newton_iters: 60,
        dedupe_radius: section.dedupe_radius,
    };

    let est = estimate_rotation_set(&lift, &inv.config.grid, &inv.config.run.n_schedule)?;
    let outcome = realize_rational(&lift, &est, target, &cfg)?;

    let rows: Vec<Vec<String>> = outcome
        .records
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.point.x),
                fmt_f64(r.point.y),
                r.q.to_string(),
                r.t.a.to_string(),
                r.t.b.to_string(),
                fmt_f64(r.rotation_vector.x),
                fmt_f64(r.rotation_vector.y),
                fmt_f64(r.residual),
                fmt_f64(r.trace),
                format!("{:?}", r.classification),
            ]
        })
        .collect();
    write_csv(
        &inv.out("orbits.csv"),
        &[
            "x", "y", "q", "p", "s", "rot_x", "rot_y", "residual", "trace", "class",
        ],
        &rows,
    )
    .map_err(io_err)?;

    let mut obj = serde_json::Map::new();
    obj.insert("map".into(), inv.map_json());
    obj.insert(
        "target".into(),
        json!({ "p": target.p, "s": target.s, "q": target.q }),
    );
    obj.insert("found".into(), json!(outcome.found));
    obj.insert("inside_hull".into(), json!(outcome.inside_hull));
    obj.insert("note".into(), json!(outcome.note));
    obj.insert(
        "records".into(),
        serde_json::to_value(&outcome.records).unwrap(),
    );
    write_json(&inv.out("orbits.json"), &obj).map_err(io_err)?;

    println!(
        "target ({}/{q}, {}/{q}): {} orbit(s) found{}",
        target.p,
        target.s,
        outcome.records.len(),
        if outcome.inside_hull {
            " (target inside hull estimate)"
        } else {
            ""
        },
        q = target.q,
    );
    if !outcome.records.is_empty() {
        println!(
            "{:>12} {:>12} {:>3} {:>12} {:>10}",
            "x", "y", "q", "trace", "class"
        );
        for r in &outcome.records {
            println!(
                "{:>12.8} {:>12.8} {:>3} {:>12.4} {:>10}",
                r.point.x,
                r.point.y,
                r.q,
                r.trace,
                format!("{:?}", r.classification)
            );
        }
    }
    if let Some(note) = &outcome.note {
        eprintln!("note: {note}");
    }
    Ok(EXIT_OK)
}

fn io_err(e: std::io::Error) -> rotor_core::Error {
    rotor_core::Error::InvalidArgument(format!("cannot write artifact: {e}"))
}
