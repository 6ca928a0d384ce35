//! Plane vectors, integer lattice vectors, and 2×2 matrices.
//!
//! Everything downstream works in the universal cover ℝ² of the torus
//! T² = ℝ²/ℤ², so the two basic scalar types are a plane point (`Vec2`)
//! and an exact integer deck translation (`LatticeVec`).

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// A point or vector in the plane ℝ².
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self × other`.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Rotate by +π/2 (counter-clockwise quarter turn).
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic order: by `x`, ties by `y`. Total because callers
    /// guarantee finite coordinates.
    #[inline]
    pub fn lex_le(self, other: Vec2) -> bool {
        (self.x, self.y) <= (other.x, other.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

/// An exact integer vector (a, b) ∈ ℤ², used for deck translations and
/// lattice jump bookkeeping. Arithmetic never rounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeVec {
    pub a: i64,
    pub b: i64,
}

impl LatticeVec {
    pub const ZERO: LatticeVec = LatticeVec { a: 0, b: 0 };

    #[inline]
    pub const fn new(a: i64, b: i64) -> Self {
        LatticeVec { a, b }
    }

    #[inline]
    pub fn as_vec2(self) -> Vec2 {
        Vec2::new(self.a as f64, self.b as f64)
    }
}

impl Add for LatticeVec {
    type Output = LatticeVec;
    #[inline]
    fn add(self, rhs: LatticeVec) -> LatticeVec {
        LatticeVec::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl AddAssign for LatticeVec {
    #[inline]
    fn add_assign(&mut self, rhs: LatticeVec) {
        self.a += rhs.a;
        self.b += rhs.b;
    }
}

impl Sub for LatticeVec {
    type Output = LatticeVec;
    #[inline]
    fn sub(self, rhs: LatticeVec) -> LatticeVec {
        LatticeVec::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for LatticeVec {
    type Output = LatticeVec;
    #[inline]
    fn neg(self) -> LatticeVec {
        LatticeVec::new(-self.a, -self.b)
    }
}

/// Row-major 2×2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a11: 1.0,
        a12: 0.0,
        a21: 0.0,
        a22: 1.0,
    };

    #[inline]
    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    #[inline]
    pub fn det(self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    #[inline]
    pub fn trace(self) -> f64 {
        self.a11 + self.a22
    }

    #[inline]
    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.a11 * v.x + self.a12 * v.y,
            self.a21 * v.x + self.a22 * v.y,
        )
    }

    #[inline]
    pub fn mul_mat(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }

    /// Solve `self · x = rhs` by Cramer's rule. `None` when the matrix is
    /// singular to working precision.
    pub fn solve(self, rhs: Vec2) -> Option<Vec2> {
        let det = self.det();
        if det.abs() < 1e-300 || !det.is_finite() {
            return None;
        }
        Some(Vec2::new(
            (rhs.x * self.a22 - rhs.y * self.a12) / det,
            (rhs.y * self.a11 - rhs.x * self.a21) / det,
        ))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }
}
