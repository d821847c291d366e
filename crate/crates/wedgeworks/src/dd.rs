//! Double-double arithmetic (about 32 significant digits), real and complex.
//!
//! Used internally where alternating series lose many digits to cancellation,
//! chiefly the Kummer series at purely imaginary argument.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> DD {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, o: DD) -> DD {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        DD { hi, lo }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, o: DD) -> DD {
        self + (-o)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, o: DD) -> DD {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        DD { hi, lo }
    }
}

impl Mul<f64> for DD {
    type Output = DD;
    fn mul(self, o: f64) -> DD {
        let (p1, p2) = two_prod(self.hi, o);
        let p2 = p2 + self.lo * o;
        let (hi, lo) = quick_two_sum(p1, p2);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, o: DD) -> DD {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::new(q3)
    }
}

/// Complex double-double number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CDD {
    pub re: DD,
    pub im: DD,
}

impl CDD {
    pub const ZERO: CDD = CDD {
        re: DD::ZERO,
        im: DD::ZERO,
    };
    pub const ONE: CDD = CDD {
        re: DD::ONE,
        im: DD::ZERO,
    };

    pub fn from_c64(z: Complex64) -> CDD {
        CDD {
            re: DD::new(z.re),
            im: DD::new(z.im),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Cheap magnitude (leading parts only), adequate for stopping tests.
    pub fn norm_f64(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn scale(self, s: DD) -> CDD {
        CDD {
            re: self.re * s,
            im: self.im * s,
        }
    }
}

impl Add for CDD {
    type Output = CDD;
    fn add(self, o: CDD) -> CDD {
        CDD {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Mul for CDD {
    type Output = CDD;
    fn mul(self, o: CDD) -> CDD {
        CDD {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Div for CDD {
    type Output = CDD;
    fn div(self, o: CDD) -> CDD {
        let den = o.re * o.re + o.im * o.im;
        let num = CDD {
            re: self.re * o.re + self.im * o.im,
            im: self.im * o.re - self.re * o.im,
        };
        CDD {
            re: num.re / den,
            im: num.im / den,
        }
    }
}
