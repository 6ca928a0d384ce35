//! Torus-map lifts: built-in analytic families, expression-defined maps,
//! Jacobians, and deck-commutation validation.
//!
//! A lift is a map F: ℝ² → ℝ² covering a torus map homotopic to the
//! identity, so F(p + m) = F(p) + m for every integer vector m. All orbit
//! machinery evaluates F only at torus representatives in [0,1)² and keeps
//! the integer part in an exact lattice accumulator, so the float magnitude
//! fed into F stays bounded.

pub mod expr;

use crate::error::{Error, Result};
use crate::geom::{LatticeVec, Mat2, Vec2};
use expr::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// sin(2πt), with the argument folded to a quarter period before calling
/// libm. The folding keeps the function exactly 1-periodic on exactly
/// representable inputs and makes sin(2π·k/2) = 0 and sin(2π·(k ± 1/4)) = ±1
/// bit-exact, which in turn makes the symmetric fixed points of the built-in
/// families exact float fixed points.
pub fn sin_two_pi(t: f64) -> f64 {
    let u = t - t.round();
    // u ∈ [-1/2, 1/2]
    if u > 0.25 {
        (2.0 * PI * (0.5 - u)).sin()
    } else if u < -0.25 {
        -(2.0 * PI * (0.5 + u)).sin()
    } else {
        (2.0 * PI * u).sin()
    }
}

/// cos(2πt) with the same quarter-period folding as [`sin_two_pi`].
pub fn cos_two_pi(t: f64) -> f64 {
    let u = (t - t.round()).abs();
    // u ∈ [0, 1/2]
    if u > 0.25 {
        -(2.0 * PI * (0.5 - u)).cos()
    } else {
        (2.0 * PI * u).cos()
    }
}

/// Split a real into fractional part in [0,1) and integer floor part.
/// Values within half an ulp of the next integer are snapped up, so the
/// fractional part never rounds to 1.0 under float noise.
#[inline]
pub fn split_unit(t: f64) -> (f64, i64) {
    let f = t.floor();
    let r = t - f;
    if r >= 1.0 - f64::EPSILON / 2.0 {
        (0.0, f as i64 + 1)
    } else {
        (r, f as i64)
    }
}

/// The covering projection ℝ² → [0,1)², coordinate-wise mod 1.
pub fn project_torus(p: Vec2) -> Vec2 {
    Vec2::new(split_unit(p.x).0, split_unit(p.y).0)
}

/// Declarative description of a lift; the data half of [`TorusLift`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TorusMapSpec {
    /// F(x, y) = (x + α, y + β).
    Translation { alpha: f64, beta: f64 },
    /// V ∘ H with H(x,y) = (x + a·sin(2πy) + c₁, y) and
    /// V(x,y) = (x, y + b·sin(2πx) + c₂): an area-preserving pair of shears,
    /// homotopic to the identity. c₁, c₂ move the rotation vector of the
    /// area measure without breaking area preservation.
    TwoShear { a: f64, b: f64, c1: f64, c2: f64 },
    /// User-supplied coordinate expressions; see [`expr`] for the grammar.
    Expression {
        expr_x: String,
        expr_y: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

#[derive(Clone, Debug)]
struct CompiledExpr {
    fx: Expr,
    fy: Expr,
    /// [∂fx/∂x, ∂fx/∂y, ∂fy/∂x, ∂fy/∂y], or the reason they don't exist.
    partials: std::result::Result<Box<[Expr; 4]>, String>,
}

#[derive(Clone, Debug)]
enum LiftKind {
    Translation { alpha: f64, beta: f64 },
    TwoShear { a: f64, b: f64, c1: f64, c2: f64 },
    Expression(CompiledExpr),
}

/// An evaluable lift with Jacobian access. Immutable after construction;
/// safe to share across worker threads.
#[derive(Clone, Debug)]
pub struct TorusLift {
    spec: TorusMapSpec,
    kind: LiftKind,
}

/// Deck-commutation check report.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeriodicityReport {
    pub pass: bool,
    pub max_defect: f64,
}

/// Samples and tolerance used by the mandatory load-time deck check.
const LOAD_CHECK_SAMPLES: u32 = 64;
const LOAD_CHECK_TOL: f64 = 1e-9;

impl TorusLift {
    /// Build and validate a lift. Expression maps must parse and pass the
    /// deck-commutation check; failure aborts with a diagnostic.
    pub fn new(spec: TorusMapSpec) -> Result<Self> {
        let lift = Self::new_unchecked(spec)?;
        if matches!(lift.spec, TorusMapSpec::Expression { .. }) {
            let report = check_periodicity(&lift, LOAD_CHECK_SAMPLES, LOAD_CHECK_TOL)?;
            if !report.pass {
                return Err(Error::NotPeriodic {
                    defect: report.max_defect,
                    tol: LOAD_CHECK_TOL,
                });
            }
        }
        Ok(lift)
    }

    /// Build a lift without the deck-commutation gate. Expression sources
    /// still have to parse. Intended for running the check itself and for
    /// tests that exercise invalid maps.
    pub fn new_unchecked(spec: TorusMapSpec) -> Result<Self> {
        let kind = match &spec {
            TorusMapSpec::Translation { alpha, beta } => {
                if !alpha.is_finite() || !beta.is_finite() {
                    return Err(Error::InvalidArgument(
                        "translation parameters must be finite".into(),
                    ));
                }
                LiftKind::Translation {
                    alpha: *alpha,
                    beta: *beta,
                }
            }
            TorusMapSpec::TwoShear { a, b, c1, c2 } => {
                if ![a, b, c1, c2].iter().all(|v| v.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "two-shear parameters must be finite".into(),
                    ));
                }
                LiftKind::TwoShear {
                    a: *a,
                    b: *b,
                    c1: *c1,
                    c2: *c2,
                }
            }
            TorusMapSpec::Expression {
                expr_x,
                expr_y,
                params,
            } => {
                let fx = expr::parse_expr(expr_x, params)?;
                let fy = expr::parse_expr(expr_y, params)?;
                let partials = (|| -> Result<Box<[Expr; 4]>> {
                    Ok(Box::new([
                        fx.diff(true)?,
                        fx.diff(false)?,
                        fy.diff(true)?,
                        fy.diff(false)?,
                    ]))
                })()
                .map_err(|e| e.to_string());
                LiftKind::Expression(CompiledExpr { fx, fy, partials })
            }
        };
        Ok(TorusLift { spec, kind })
    }

    pub fn spec(&self) -> &TorusMapSpec {
        &self.spec
    }

    /// Evaluate F(p).
    pub fn eval(&self, p: Vec2) -> Result<Vec2> {
        match &self.kind {
            LiftKind::Translation { alpha, beta } => Ok(Vec2::new(p.x + alpha, p.y + beta)),
            LiftKind::TwoShear { a, b, c1, c2 } => {
                let xh = p.x + a * sin_two_pi(p.y) + c1;
                let yh = p.y + b * sin_two_pi(xh) + c2;
                Ok(Vec2::new(xh, yh))
            }
            LiftKind::Expression(c) => {
                let x = c.fx.eval(p.x, p.y)?;
                let y = c.fy.eval(p.x, p.y)?;
                let out = Vec2::new(x, y);
                if !out.is_finite() {
                    return Err(Error::EvalFault {
                        offset: 0,
                        message: "non-finite map value".into(),
                        x: p.x,
                        y: p.y,
                    });
                }
                Ok(out)
            }
        }
    }

    /// Jacobian DF(p). Built-in families use closed-form derivatives;
    /// expression maps use the symbolic derivative of the parsed tree.
    pub fn jacobian(&self, p: Vec2) -> Result<Mat2> {
        match &self.kind {
            LiftKind::Translation { .. } => Ok(Mat2::IDENTITY),
            LiftKind::TwoShear { a, b, c1, .. } => {
                let xh = p.x + a * sin_two_pi(p.y) + c1;
                let cy = cos_two_pi(p.y);
                let cxh = cos_two_pi(xh);
                let two_pi = 2.0 * PI;
                // chain rule for V ∘ H
                let dxh_dy = two_pi * a * cy;
                let dyh_dx = two_pi * b * cxh;
                Ok(Mat2::new(1.0, dxh_dy, dyh_dx, dyh_dx * dxh_dy + 1.0))
            }
            LiftKind::Expression(c) => {
                let parts = c
                    .partials
                    .as_ref()
                    .map_err(|msg| Error::NonDifferentiable {
                        offset: 0,
                        message: msg.clone(),
                    })?;
                let m = Mat2::new(
                    parts[0].eval(p.x, p.y)?,
                    parts[1].eval(p.x, p.y)?,
                    parts[2].eval(p.x, p.y)?,
                    parts[3].eval(p.x, p.y)?,
                );
                if !m.is_finite() {
                    return Err(Error::EvalFault {
                        offset: 0,
                        message: "non-finite Jacobian entry".into(),
                        x: p.x,
                        y: p.y,
                    });
                }
                Ok(m)
            }
        }
    }
}

/// Parse a coordinate-expression pair into a map spec, rejecting unknown
/// identifiers and malformed source. The result still has to pass the
/// deck-commutation gate when turned into a lift with [`TorusLift::new`].
pub fn parse_map_expr(
    source_x: &str,
    source_y: &str,
    params: &BTreeMap<String, f64>,
) -> Result<TorusMapSpec> {
    expr::parse_expr(source_x, params)?;
    expr::parse_expr(source_y, params)?;
    Ok(TorusMapSpec::Expression {
        expr_x: source_x.to_string(),
        expr_y: source_y.to_string(),
        params: params.clone(),
    })
}

/// Evaluate the deck-commutation defects F(p+e) − F(p) − e for both basis
/// translations on seeded pseudo-random samples in [0,1)².
pub fn check_periodicity(lift: &TorusLift, n_samples: u32, tol: f64) -> Result<PeriodicityReport> {
    if n_samples < 1 {
        return Err(Error::InvalidArgument("n_samples must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let mut max_defect: f64 = 0.0;
    for _ in 0..n_samples {
        let p = Vec2::new(rng.gen::<f64>(), rng.gen::<f64>());
        let fp = lift.eval(p)?;
        for e in [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)] {
            let shifted = lift.eval(p + e)?;
            let defect = (shifted - fp - e).norm();
            max_defect = max_defect.max(defect);
        }
    }
    Ok(PeriodicityReport {
        pass: max_defect <= tol,
        max_defect,
    })
}

/// Convenience constructors matching the built-in families.
impl TorusLift {
    pub fn translation(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(TorusMapSpec::Translation { alpha, beta })
    }

    pub fn two_shear(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::new(TorusMapSpec::TwoShear { a, b, c1, c2 })
    }

    pub fn expression(expr_x: &str, expr_y: &str, params: BTreeMap<String, f64>) -> Result<Self> {
        Self::new(TorusMapSpec::Expression {
            expr_x: expr_x.to_string(),
            expr_y: expr_y.to_string(),
            params,
        })
    }
}

/// Exact split of a plane point into torus representative and deck element.
pub fn split_plane(p: Vec2) -> (Vec2, LatticeVec) {
    let (fx, ix) = split_unit(p.x);
    let (fy, iy) = split_unit(p.y);
    (Vec2::new(fx, fy), LatticeVec::new(ix, iy))
}
