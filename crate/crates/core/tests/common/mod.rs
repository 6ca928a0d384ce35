#![allow(dead_code)] // shared across test binaries; each uses a subset

//! Shared test utilities: double-double arithmetic and the plain-plane
//! iteration oracle it powers. Everything here is oracle-side code and
//! deliberately avoids the library's own evaluation paths.

pub mod dd;

use rotor_core::{Mat2, TorusLift, Vec2};

/// Central finite-difference Jacobian, the cross-validation oracle for the
/// analytic/symbolic derivatives.
pub fn fd_jacobian(lift: &TorusLift, p: Vec2, h: f64) -> Mat2 {
    let ex = Vec2::new(h, 0.0);
    let ey = Vec2::new(0.0, h);
    let fxp = lift.eval(p + ex).unwrap();
    let fxm = lift.eval(p - ex).unwrap();
    let fyp = lift.eval(p + ey).unwrap();
    let fym = lift.eval(p - ey).unwrap();
    Mat2::new(
        (fxp.x - fxm.x) / (2.0 * h),
        (fyp.x - fym.x) / (2.0 * h),
        (fxp.y - fxm.y) / (2.0 * h),
        (fyp.y - fym.y) / (2.0 * h),
    )
}

pub fn max_abs_entry(m: Mat2) -> f64 {
    m.a11
        .abs()
        .max(m.a12.abs())
        .max(m.a21.abs())
        .max(m.a22.abs())
}
