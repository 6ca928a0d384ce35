//! `rotor leb`: rotation vector of the area measure, by midpoint quadrature
//! or seeded Monte Carlo.

use super::{exit_code_for, Invocation, EXIT_OK};
use crate::artifacts::write_json;
use rotor_core::measure::{lebesgue_monte_carlo, lebesgue_quadrature, MeasureRotationResult};
use rotor_core::TorusLift;

pub fn run(inv: &Invocation) -> i32 {
    match execute(inv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("leb: {e}");
            exit_code_for(&e)
        }
    }
}

/// Shared by `leb` and `boyland`.
pub fn measure(
    inv: &Invocation,
    lift: &TorusLift,
) -> Result<MeasureRotationResult, rotor_core::Error> {
    let cfg = &inv.config.leb;
    match cfg.method.as_str() {
        "quadrature" => lebesgue_quadrature(lift, cfg.resolution),
        "monte_carlo" => lebesgue_monte_carlo(lift, cfg.samples, inv.config.run.seed),
        other => Err(rotor_core::Error::InvalidArgument(format!(
            "unknown leb.method `{other}` (expected quadrature or monte_carlo)"
        ))),
    }
}

fn execute(inv: &Invocation) -> Result<i32, rotor_core::Error> {
    let lift = inv.config.lift()?;
    let result = measure(inv, &lift)?;
    let mut obj = serde_json::Map::new();
    obj.insert("map".into(), inv.map_json());
    obj.insert("result".into(), serde_json::to_value(result).unwrap());
    write_json(&inv.out("leb.json"), &obj)
        .map_err(|e| rotor_core::Error::InvalidArgument(format!("cannot write artifact: {e}")))?;
    println!(
        "ρ(Leb) ≈ ({:.9}, {:.9}) ± {:.3e} ({:?}, {} samples)",
        result.vector.x, result.vector.y, result.error_estimate, result.method, result.sample_count
    );
    Ok(EXIT_OK)
}
