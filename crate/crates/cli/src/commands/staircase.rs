//! `rotor staircase`: build the greedy lattice staircase for a direction and
//! emit the step diary as CSV, a JSON summary, and an SVG of the path
//! against its guide line.

use super::{exit_code_for, Invocation, EXIT_CONFIG, EXIT_OK};
use crate::artifacts::{fmt_f64, write_csv, write_json, Svg};
use crate::config::parse_exact_dir;
use rotor_core::staircase::{
    build_staircase_with_diameter, check_invariant, extend_negative, Direction, Step,
};
use rotor_core::Vec2;

pub fn run(inv: &Invocation, dir_flag: Option<&str>) -> i32 {
    match execute(inv, dir_flag) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("staircase: {e}");
            exit_code_for(&e)
        }
    }
}

fn resolve_direction(
    inv: &Invocation,
    dir_flag: Option<&str>,
) -> Result<Option<Direction>, rotor_core::Error> {
    let section = &inv.config.staircase;
    let dir_text = dir_flag.or(section.dir.as_deref());
    if let Some(text) = dir_text {
        let (a, b) = match parse_exact_dir(text) {
            Ok(pair) => pair,
            Err(e) => return Err(rotor_core::Error::InvalidArgument(e.0)),
        };
        return Ok(Some(Direction::exact(a, b)?));
    }
    if let Some(angle) = section.angle {
        return Ok(Some(Direction::from_angle(angle)?));
    }
    Ok(None)
}

fn execute(inv: &Invocation, dir_flag: Option<&str>) -> Result<i32, rotor_core::Error> {
    let Some(direction) = resolve_direction(inv, dir_flag)? else {
        eprintln!("staircase: no direction given (set [staircase] dir = \"a/b\" or angle = θ, or pass --dir)");
        return Ok(EXIT_CONFIG);
    };
    let section = &inv.config.staircase;
    let path = build_staircase_with_diameter(&direction, section.max_steps, section.rect_diameter)?;
    let report = check_invariant(&path);

    let rows: Vec<Vec<String>> = path
        .steps
        .iter()
        .zip(&path.deltas)
        .enumerate()
        .map(|(i, (step, delta))| {
            vec![
                i.to_string(),
                match step {
                    Step::H => "H".to_string(),
                    Step::V => "V".to_string(),
                },
                fmt_f64(*delta),
            ]
        })
        .collect();
    write_csv(
        &inv.out("staircase.csv"),
        &["index", "step", "delta"],
        &rows,
    )
    .map_err(io_err)?;

    let h_count = path.steps.iter().filter(|&&s| s == Step::H).count();
    let mut obj = serde_json::Map::new();
    obj.insert(
        "direction".into(),
        serde_json::json!({
            "a": direction.a(),
            "b": direction.b(),
            "exact": direction.exact_pair().map(|(a, b)| [a, b]),
        }),
    );
    obj.insert("steps".into(), serde_json::json!(path.steps.len()));
    obj.insert("h_steps".into(), serde_json::json!(h_count));
    obj.insert(
        "v_steps".into(),
        serde_json::json!(path.steps.len() - h_count),
    );
    obj.insert(
        "rational_period".into(),
        serde_json::json!(path.rational_period.map(|p| [p.a, p.b])),
    );
    obj.insert("width_bound".into(), serde_json::json!(path.width_bound));
    obj.insert(
        "max_abs_delta".into(),
        serde_json::json!(report.max_abs_delta),
    );
    obj.insert("invariant_ok".into(), serde_json::json!(report.ok));
    write_json(&inv.out("staircase.json"), &obj).map_err(io_err)?;

    // lattice path on both sides of the origin, plus the guide line
    let mut pts: Vec<Vec2> = extend_negative(&path)
        .iter()
        .rev()
        .map(|s| Vec2::new(s.a as f64, s.b as f64))
        .collect();
    pts.push(Vec2::ZERO);
    let mut sum = Vec2::ZERO;
    for step in &path.steps {
        let lv = step.lattice(&direction);
        sum = sum + Vec2::new(lv.a as f64, lv.b as f64);
        pts.push(sum);
    }
    let reach = pts.last().map(|p| p.norm()).unwrap_or(1.0);
    let guide = [
        Vec2::new(-direction.a() * reach, -direction.b() * reach),
        Vec2::new(direction.a() * reach, direction.b() * reach),
    ];
    let mut svg = Svg::covering([&pts[..], &guide[..]]);
    svg.polyline(&guide, "#bbbbbb");
    svg.polyline(&pts, "#d1495b");
    svg.marker(Vec2::ZERO, "#333333");
    svg.write(&inv.out("staircase.svg")).map_err(io_err)?;

    match path.rational_period {
        Some(p) => println!(
            "staircase closed after {} steps with rational period ({}, {}); max |Δ| = {:.6}",
            path.steps.len(),
            p.a,
            p.b,
            report.max_abs_delta
        ),
        None => println!(
            "staircase ran {} steps (no rational period); max |Δ| = {:.6}",
            path.steps.len(),
            report.max_abs_delta
        ),
    }
    Ok(EXIT_OK)
}

fn io_err(e: std::io::Error) -> rotor_core::Error {
    rotor_core::Error::InvalidArgument(format!("cannot write artifact: {e}"))
}
