//! Minimal double-double arithmetic (~31 significant digits) for the
//! plain-plane iteration oracle. Error-free transformations follow the
//! classic two-sum/two-product constructions; the product uses the fused
//! multiply-add.

#[derive(Clone, Copy, Debug, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    /// 2π to double-double precision: hi is the f64 nearest 2π, lo the
    /// correction term.
    #[allow(clippy::approx_constant)]
    pub const TWO_PI: Dd = Dd {
        hi: 6.283185307179586,
        lo: 2.4492935982947064e-16,
    };

    #[inline]
    pub fn from_f64(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn add_f64(self, other: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, other);
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, other: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, other);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * other);
        Dd { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q0 = self.hi / d;
        let (p1, p2) = two_prod(q0, d);
        let r = self.sub(Dd { hi: p1, lo: p2 });
        let q1 = (r.hi + r.lo) / d;
        let (hi, lo) = quick_two_sum(q0, q1);
        Dd { hi, lo }
    }

    /// sin(2π · self) with quarter-period folding, Taylor core on |arg| ≤ π/2.
    pub fn sin_two_pi(self) -> Dd {
        let n = self.hi.round();
        let mut u = self.add_f64(-n);
        // fold into [-1/4, 1/4] using sin(2πu) symmetries
        let mut sign = 1.0;
        if u.hi > 0.25 {
            u = Dd::from_f64(0.5).sub(u); // sin(2πu) = sin(2π(1/2 − u))
        } else if u.hi < -0.25 {
            u = Dd::from_f64(0.5).add(u); // sin(2πu) = −sin(2π(1/2 + u))
            sign = -1.0;
        }
        let x = u.mul(Dd::TWO_PI);
        sin_taylor(x).mul_f64(sign)
    }
}

/// Taylor series for sin on |x| ≤ π/2; 20 terms reach ~1e-35.
fn sin_taylor(x: Dd) -> Dd {
    let x2 = x.mul(x);
    let mut term = x;
    let mut sum = x;
    let mut k: f64 = 1.0;
    for _ in 0..20 {
        // term ← −term · x² / ((k+1)(k+2))
        term = term.mul(x2).div_f64(-(k + 1.0) * (k + 2.0));
        sum = sum.add(term);
        k += 2.0;
        if term.hi.abs() < 1e-36 {
            break;
        }
    }
    sum
}

/// Plain-plane double-double iteration of the two-shear family: raw plane
/// coordinates, no torus reduction, no lattice bookkeeping. Returns the
/// displacement after n steps.
pub fn two_shear_displacement_oracle(
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
    x0: f64,
    y0: f64,
    n: u64,
) -> (Dd, Dd) {
    let mut x = Dd::from_f64(x0);
    let mut y = Dd::from_f64(y0);
    for _ in 0..n {
        x = x.add(y.sin_two_pi().mul_f64(a)).add_f64(c1);
        y = y.add(x.sin_two_pi().mul_f64(b)).add_f64(c2);
    }
    (x.add_f64(-x0), y.add_f64(-y0))
}

/// Same oracle for rigid translations.
pub fn translation_displacement_oracle(alpha: f64, beta: f64, n: u64) -> (Dd, Dd) {
    let mut x = Dd::ZERO;
    let mut y = Dd::ZERO;
    for _ in 0..n {
        x = x.add_f64(alpha);
        y = y.add_f64(beta);
    }
    (x, y)
}
