//! Double-double arithmetic (about 106 significand bits) for oracle computations.
//!
//! Only what the oracles need: the four operations, `exp`/`ln` on reals, complex
//! multiply/divide, and the power series `log(1 + ε)` and `exp(s)` for small arguments.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
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

const LN2: DD = DD { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    pub fn powi(self, n: u32) -> Self {
        let (mut acc, mut base, mut k) = (DD::ONE, self, n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DD::ZERO;
        }
        let x = self.hi.sqrt();
        // one Newton step in double-double
        let r = DD::new(x);
        r + (self - r * r) / r.mul_f64(2.0)
    }

    /// `e^x` by reduction `x = k ln 2 + r`, `|r| ≤ ln2/2`, then Taylor in `r/2^8` and squaring.
    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DD::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DD::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).mul_f64(1.0 / 256.0);
        let mut term = DD::ONE;
        let mut sum = DD::ONE;
        for n in 1..=20 {
            term = (term * r) / DD::new(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        for _ in 0..8 {
            sum = sum * sum;
        }
        sum.mul_f64(2f64.powi(k as i32))
    }

    /// Natural log by Newton on `exp(y) = x`.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DD::new(f64::NAN);
        }
        let mut y = DD::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - DD::ONE;
        }
        y
    }
}

impl From<f64> for DD {
    fn from(x: f64) -> Self {
        DD::new(x)
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, b: DD) -> DD {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DD { hi, lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, b: DD) -> DD {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::new(q3)
    }
}

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CDD {
    pub re: DD,
    pub im: DD,
}

impl CDD {
    pub const ONE: CDD = CDD { re: DD::ONE, im: DD::ZERO };

    pub fn new(re: DD, im: DD) -> Self {
        Self { re, im }
    }

    pub fn from_c64(z: C64) -> Self {
        Self { re: DD::new(z.re), im: DD::new(z.im) }
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_sqr(self) -> DD {
        self.re * self.re + self.im * self.im
    }

    /// `log|z|`.
    pub fn ln_abs(self) -> DD {
        self.norm_sqr().ln().mul_f64(0.5)
    }

    pub fn scale(self, s: DD) -> Self {
        Self { re: self.re * s, im: self.im * s }
    }

    pub fn powi(self, n: u32) -> Self {
        let (mut acc, mut base, mut k) = (CDD::ONE, self, n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Principal `log(1 + ε)` by its power series; requires `|ε| ≤ 1/2`.
    pub fn log1p_series(eps: CDD) -> CDD {
        debug_assert!(eps.norm_sqr().hi <= 0.25 + 1e-12);
        let mut pow = eps;
        let mut sum = CDD::default();
        for k in 1..=120u32 {
            let term = pow.scale(DD::ONE / DD::new(k as f64));
            sum = if k % 2 == 1 { sum + term } else { sum - term };
            if term.norm_sqr().hi < 1e-70 {
                break;
            }
            pow = pow * eps;
        }
        sum
    }

    /// `exp(s)` by Taylor series after halving `s` until it is small, then squaring.
    pub fn exp_series(s: CDD) -> CDD {
        let mut halvings = 0;
        let mut r = s;
        while r.norm_sqr().hi > 1e-4 {
            r = r.scale(DD::new(0.5));
            halvings += 1;
        }
        let mut term = CDD::ONE;
        let mut sum = CDD::ONE;
        for n in 1..=30 {
            term = (term * r).scale(DD::ONE / DD::new(n as f64));
            sum = sum + term;
            if term.norm_sqr().hi < 1e-70 {
                break;
            }
        }
        for _ in 0..halvings {
            sum = sum * sum;
        }
        sum
    }
}

impl Add for CDD {
    type Output = CDD;
    fn add(self, b: CDD) -> CDD {
        CDD { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for CDD {
    type Output = CDD;
    fn sub(self, b: CDD) -> CDD {
        CDD { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Mul for CDD {
    type Output = CDD;
    fn mul(self, b: CDD) -> CDD {
        CDD { re: self.re * b.re - self.im * b.im, im: self.re * b.im + self.im * b.re }
    }
}

impl Div for CDD {
    type Output = CDD;
    fn div(self, b: CDD) -> CDD {
        let den = b.norm_sqr();
        let num = self * CDD { re: b.re, im: -b.im };
        CDD { re: num.re / den, im: num.im / den }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_third_round_trips() {
        let third = DD::ONE / DD::new(3.0);
        let back = third.mul_f64(3.0) - DD::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_ln_consistency() {
        for &x in &[0.1, 1.0, 2.5, 37.0, 1e-5] {
            let y = DD::new(x);
            let back = y.ln().exp() - y;
            assert!(back.to_f64().abs() < 1e-29 * x, "{x}: {}", back.to_f64());
        }
        // ln 2 against the stored constant
        assert!((DD::new(2.0).ln() - LN2).to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_of_one_matches_e() {
        let e = DD::ONE.exp();
        // e = 2.718281828459045 + 1.4456468917292502e-16
        assert_eq!(e.hi, std::f64::consts::E);
        assert!((e.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-29, "{}", e.lo);
    }

    #[test]
    fn complex_series_are_inverse() {
        let eps = CDD::from_c64(C64::new(0.2, -0.3));
        let l = CDD::log1p_series(eps);
        let back = CDD::exp_series(l) - CDD::ONE - eps;
        assert!(back.norm_sqr().hi.sqrt() < 1e-30);
    }

    #[test]
    fn sqrt_two() {
        let s = DD::new(2.0).sqrt();
        assert!((s * s - DD::new(2.0)).to_f64().abs() < 1e-31);
    }
}
