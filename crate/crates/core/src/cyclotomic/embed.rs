//! Certified complex embeddings of cyclotomic integers in binary fixed point.
//!
//! A value is stored as `(re + i·im) / 2^scale` with a disc of radius `rad / 2^scale`
//! around it. Every root of unity ζ_N^k is evaluated with absolute error at most
//! `2^-(bits + 32)` where the working scale is `bits + 64`; the accumulated radius is
//! that bound times the ℓ¹ norm of the coefficient vector.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

const GUARD: u32 = 64;
/// log2 of the per-root error bound in working ulps.
const ROOT_ERR_ULPS_LOG2: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: BigInt,
    pub im: BigInt,
    pub rad: BigInt,
    pub scale: u32,
}

fn shr_floor(x: BigInt, k: u32) -> BigInt {
    // arithmetic shift on BigInt floors toward -inf
    x >> k
}

fn shr_ceil(x: BigInt, k: u32) -> BigInt {
    -((-x) >> k)
}

impl ComplexInterval {
    pub fn zero(scale: u32) -> Self {
        ComplexInterval {
            re: BigInt::zero(),
            im: BigInt::zero(),
            rad: BigInt::zero(),
            scale,
        }
    }

    fn unit(&self) -> f64 {
        (-(self.scale as f64)).exp2()
    }

    pub fn re_f64(&self) -> f64 {
        big_to_f64(&self.re) * self.unit()
    }

    pub fn im_f64(&self) -> f64 {
        big_to_f64(&self.im) * self.unit()
    }

    pub fn radius_f64(&self) -> f64 {
        big_to_f64(&self.rad) * self.unit()
    }

    /// Upper bound on |midpoint| in scaled units.
    fn abs_mid_ceil(&self) -> BigInt {
        let s = &self.re * &self.re + &self.im * &self.im;
        let r = s.sqrt();
        if &r * &r == s {
            r
        } else {
            r + 1
        }
    }

    /// Distance from (x, y) to the disc, zero when the point lies inside.
    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        let dx = self.re_f64() - x;
        let dy = self.im_f64() - y;
        ((dx * dx + dy * dy).sqrt() - self.radius_f64()).max(0.0)
    }

    /// Sign of the real part when the disc does not meet the imaginary axis.
    pub fn certain_re_sign(&self) -> Option<i32> {
        if self.re.abs() > self.rad {
            Some(if self.re.is_positive() { 1 } else { -1 })
        } else {
            None
        }
    }

    /// Disc product; sound enclosure of the product of any two contained points.
    pub fn mul(&self, other: &ComplexInterval) -> ComplexInterval {
        assert_eq!(self.scale, other.scale, "interval scales differ");
        let k = self.scale;
        let re = &self.re * &other.re - &self.im * &other.im;
        let im = &self.re * &other.im + &self.im * &other.re;
        let rad = self.abs_mid_ceil() * &other.rad + other.abs_mid_ceil() * &self.rad
            + &self.rad * &other.rad;
        ComplexInterval {
            re: shr_floor(re, k),
            im: shr_floor(im, k),
            // +2 covers the two floor roundings of the midpoint
            rad: shr_ceil(rad, k) + 2,
            scale: k,
        }
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// atan(1/x) · 2^w, each term floored.
fn atan_inv(x: u64, w: u32) -> BigInt {
    let one = BigInt::one() << w;
    let xb = BigInt::from(x);
    let x2 = &xb * &xb;
    let mut power = one / &xb;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// π · 2^w with error below 2^12 ulps.
pub(crate) fn pi_fixed(w: u32) -> BigInt {
    let extra = 16;
    let ww = w + extra;
    let pi = atan_inv(5, ww) * 16 - atan_inv(239, ww) * 4;
    pi >> extra
}

/// (cos r, sin r) · 2^w for |r| ≤ π/8 given as r · 2^w.
fn cos_sin_small(r: &BigInt, w: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << w;
    let r2 = (r * r) >> w;
    // sin
    let mut term = r.clone();
    let mut sin = r.clone();
    let mut k: u64 = 1;
    while !term.is_zero() {
        term = -((&term * &r2) >> w) / BigInt::from((2 * k) * (2 * k + 1));
        sin += &term;
        k += 1;
    }
    let mut term = one.clone();
    let mut cos = one;
    let mut k: u64 = 1;
    while !term.is_zero() {
        term = -((&term * &r2) >> w) / BigInt::from((2 * k - 1) * (2 * k));
        cos += &term;
        k += 1;
    }
    (cos, sin)
}

/// Fixed-point values of exp(2πi k / n) at scale `w`.
pub(crate) struct RootTable {
    n: usize,
    w: u32,
    pi: BigInt,
    half_sqrt2: BigInt,
}

impl RootTable {
    pub(crate) fn new(n: usize, w: u32) -> Self {
        // floor(2^w / sqrt 2) = floor(sqrt(2^(2w-1)))
        let half_sqrt2 = (BigInt::one() << (2 * w - 1)).sqrt();
        RootTable {
            n,
            w,
            pi: pi_fixed(w),
            half_sqrt2,
        }
    }

    pub(crate) fn root(&self, k: usize) -> (BigInt, BigInt) {
        let n = self.n as u128;
        let k = (k % self.n) as u128;
        // nearest octant q with 2πk/n = qπ/4 + r, |r| ≤ π/8
        let q = ((8 * k + n / 2) / n) as i128;
        let num = 8 * k as i128 - q * n as i128;
        let r = (&self.pi * BigInt::from(num)) / BigInt::from(4 * n as i128);
        let (c, s) = cos_sin_small(&r, self.w);
        let q = q.rem_euclid(8) as u32;
        let h = &self.half_sqrt2;
        let w = self.w;
        // multiply (c + i s) by exp(i q π/4)
        match q {
            0 => (c, s),
            2 => (-s, c),
            4 => (-c, -s),
            6 => (s, -c),
            1 => (((&c - &s) * h) >> w, ((&c + &s) * h) >> w),
            3 => ((-(&c + &s) * h) >> w, ((&c - &s) * h) >> w),
            5 => (((&s - &c) * h) >> w, (-(&c + &s) * h) >> w),
            7 => (((&c + &s) * h) >> w, ((&s - &c) * h) >> w),
            _ => unreachable!(),
        }
    }
}

/// Enclose Σ c_k exp(2πik/n) at `bits` bits of absolute accuracy per unit coefficient.
pub(crate) fn embed(coeffs: &[BigInt], bits: u32) -> ComplexInterval {
    let n = coeffs.len();
    let w = bits + GUARD;
    let mut out = ComplexInterval::zero(w);
    if coeffs.iter().all(|c| c.is_zero()) {
        return out;
    }
    let table = RootTable::new(n, w);
    let mut l1 = BigInt::zero();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (re, im) = table.root(k);
        out.re += c * re;
        out.im += c * im;
        l1 += c.abs();
    }
    out.rad = l1 << (GUARD - ROOT_ERR_ULPS_LOG2);
    out
}
