//! Exact cyclotomic integers and the group μ₈ of Weil-index values.
//!
//! Elements of Z[ζ_N] are stored as coefficient vectors in Z[x]/(x^N − 1). Ring
//! operations act on that representative directly; equality reduces modulo the
//! cyclotomic polynomial Φ_N first, so two representatives of the same algebraic
//! integer compare equal.

mod embed;
pub(crate) mod phi;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::bigint_serde;
use crate::error::{Error, Result};

pub use embed::ComplexInterval;

/// Default cap on cyclotomic orders built by the engine.
pub const DEFAULT_ORDER_CAP: usize = 1 << 20;

/// Above this many term products, small-coefficient multiplication packs
/// both operands into big integers instead of convolving term by term.
const KRONECKER_THRESHOLD: u128 = 1 << 20;

fn pack(v: &[i64], negative: bool, slot: usize) -> num_bigint::BigUint {
    let mut words = vec![0u32; (v.len() * slot).div_ceil(32) + 1];
    for (i, &x) in v.iter().enumerate() {
        let mag = if (x < 0) == negative { x.unsigned_abs() } else { 0 };
        let bit = i * slot;
        let (w, off) = (bit / 32, bit % 32);
        let wide = (mag as u128) << off;
        for k in 0..4 {
            if w + k < words.len() {
                words[w + k] |= (wide >> (32 * k)) as u32;
            }
        }
    }
    num_bigint::BigUint::new(words)
}

fn unpack(x: &num_bigint::BigUint, slot: usize, count: usize) -> Vec<u128> {
    let words = x.to_u32_digits();
    let mask = if slot >= 128 { u128::MAX } else { (1u128 << slot) - 1 };
    (0..count)
        .map(|i| {
            let bit = i * slot;
            let (w, off) = (bit / 32, bit % 32);
            let mut acc = 0u128;
            for k in 0..5 {
                if let Some(&d) = words.get(w + k) {
                    let at = 32 * k;
                    acc |= if at >= off {
                        (d as u128).checked_shl((at - off) as u32).unwrap_or(0)
                    } else {
                        (d as u128) >> (off - at)
                    };
                }
            }
            acc & mask
        })
        .collect()
}

/// a·b in Z[x]/(x^n − 1) by Kronecker substitution; `bound` caps every
/// coefficient of the nonnegative partial products.
fn kronecker_cyclic(a: &[i64], b: &[i64], bound: u128) -> Vec<i128> {
    let n = a.len();
    let slot = (128 - bound.leading_zeros() as usize).max(1) + 1;
    let parts = |v: &[i64]| [pack(v, false, slot), pack(v, true, slot)];
    let (pa, pb) = (parts(a), parts(b));
    let mut out = vec![0i128; n];
    for (i, x) in pa.iter().enumerate() {
        for (j, y) in pb.iter().enumerate() {
            let sign = if i == j { 1 } else { -1 };
            for (k, c) in unpack(&(x * y), slot, 2 * n).into_iter().enumerate() {
                out[k % n] += sign * c as i128;
            }
        }
    }
    out
}

/// ζ₈^k, the value group of Weil indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Mu8(u8);

impl Mu8 {
    pub const ONE: Mu8 = Mu8(0);

    pub fn new(exponent: i64) -> Self {
        Mu8(exponent.rem_euclid(8) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn inv(self) -> Self {
        Mu8::new(-(self.0 as i64))
    }

    pub fn pow(self, k: i64) -> Self {
        Mu8::new(self.0 as i64 * k)
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    /// The angle 2πk/8 in radians.
    pub fn angle(self) -> f64 {
        std::f64::consts::PI * self.0 as f64 / 4.0
    }

    /// This root of unity as an element of Z[ζ_8].
    pub fn to_cyc(self) -> CycInt {
        CycInt::zeta(8, self.0 as i64)
    }
}

impl TryFrom<i64> for Mu8 {
    type Error = String;

    fn try_from(v: i64) -> std::result::Result<Self, Self::Error> {
        if (0..8).contains(&v) {
            Ok(Mu8(v as u8))
        } else {
            Err(format!("Mu8 exponent must be in 0..8, got {v}"))
        }
    }
}

impl From<Mu8> for i64 {
    fn from(m: Mu8) -> i64 {
        m.0 as i64
    }
}

impl std::ops::Mul for Mu8 {
    type Output = Mu8;

    fn mul(self, rhs: Mu8) -> Mu8 {
        Mu8::new(self.0 as i64 + rhs.0 as i64)
    }
}

impl std::ops::MulAssign for Mu8 {
    fn mul_assign(&mut self, rhs: Mu8) {
        *self = *self * rhs;
    }
}

impl std::iter::Product for Mu8 {
    fn product<I: Iterator<Item = Mu8>>(iter: I) -> Mu8 {
        iter.fold(Mu8::ONE, |a, b| a * b)
    }
}

impl fmt::Display for Mu8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "1"),
            4 => write!(f, "-1"),
            k => write!(f, "ζ8^{k}"),
        }
    }
}

/// Σ c_i ζ_N^i with arbitrary-precision integer coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycInt {
    order: usize,
    #[serde(
        serialize_with = "bigint_serde::serialize_vec",
        deserialize_with = "bigint_serde::deserialize_vec"
    )]
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(order: usize) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        CycInt {
            order,
            coeffs: vec![BigInt::zero(); order],
        }
    }

    pub fn from_int(order: usize, n: impl Into<BigInt>) -> Self {
        let mut z = CycInt::zero(order);
        z.coeffs[0] = n.into();
        z
    }

    pub fn one(order: usize) -> Self {
        CycInt::from_int(order, 1)
    }

    /// ζ_N^k.
    pub fn zeta(order: usize, k: i64) -> Self {
        let mut z = CycInt::zero(order);
        z.coeffs[k.rem_euclid(order as i64) as usize] = BigInt::one();
        z
    }

    pub fn from_coeffs(order: usize, coeffs: Vec<BigInt>) -> Result<Self> {
        if order == 0 || coeffs.len() != order {
            return Err(Error::Input(format!(
                "coefficient vector of length {} for order {order}",
                coeffs.len()
            )));
        }
        Ok(CycInt { order, coeffs })
    }

    /// Build from exponent multiplicities: Σ counts[k] ζ_N^k.
    pub fn from_counts(counts: &[u64]) -> Self {
        CycInt {
            order: counts.len(),
            coeffs: counts.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn same_order(&self, other: &CycInt) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch(self.order, other.order))
        }
    }

    pub fn checked_add(&self, other: &CycInt) -> Result<CycInt> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycInt {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &CycInt) -> Result<CycInt> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycInt {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &CycInt) -> Result<CycInt> {
        self.same_order(other)?;
        let n = self.order;
        if let Some(out) = self.mul_small(other) {
            return Ok(out);
        }
        let mut out = vec![BigInt::zero(); n];
        let rhs: Vec<(usize, &BigInt)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, b) in &rhs {
                let k = if i + j >= n { i + j - n } else { i + j };
                out[k] += a * b;
            }
        }
        Ok(CycInt {
            order: n,
            coeffs: out,
        })
    }

    /// Product in i128 when no partial sum can overflow.
    fn mul_small(&self, other: &CycInt) -> Option<CycInt> {
        let small = |c: &[BigInt]| -> Option<(Vec<i64>, u64)> {
            let v: Vec<i64> = c.iter().map(|x| x.to_i64()).collect::<Option<_>>()?;
            let max = v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
            Some((v, max))
        };
        let (a, ma) = small(&self.coeffs)?;
        let (b, mb) = small(&other.coeffs)?;
        let n = self.order;
        let bound = (ma as u128).checked_mul(mb as u128)?.checked_mul(n as u128)?;
        if bound > i128::MAX as u128 {
            return None;
        }
        let nnz = |v: &[i64]| v.iter().filter(|&&x| x != 0).count() as u128;
        if nnz(&a) * nnz(&b) > KRONECKER_THRESHOLD {
            return Some(CycInt {
                order: n,
                coeffs: kronecker_cyclic(&a, &b, bound).into_iter().map(BigInt::from).collect(),
            });
        }
        let rhs: Vec<(usize, i128)> = b
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j, c as i128))
            .collect();
        let mut out = vec![0i128; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as i128;
            for &(j, y) in &rhs {
                let k = if i + j >= n { i + j - n } else { i + j };
                out[k] += x * y;
            }
        }
        Some(CycInt {
            order: n,
            coeffs: out.into_iter().map(BigInt::from).collect(),
        })
    }

    /// Lift both operands to `common` (a multiple of both orders), then add.
    pub fn add_in(&self, other: &CycInt, common: usize) -> Result<CycInt> {
        self.lift(common)?.checked_add(&other.lift(common)?)
    }

    pub fn sub_in(&self, other: &CycInt, common: usize) -> Result<CycInt> {
        self.lift(common)?.checked_sub(&other.lift(common)?)
    }

    pub fn mul_in(&self, other: &CycInt, common: usize) -> Result<CycInt> {
        self.lift(common)?.checked_mul(&other.lift(common)?)
    }

    pub fn neg(&self) -> CycInt {
        CycInt {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> CycInt {
        CycInt {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Complex conjugation ζ ↦ ζ^(N−1).
    pub fn conj(&self) -> CycInt {
        let n = self.order;
        let mut coeffs = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(n - i) % n] = c.clone();
        }
        CycInt { order: n, coeffs }
    }

    /// Multiply by ζ_N^k (a rotation of the coefficient vector).
    pub fn mul_zeta(&self, k: i64) -> CycInt {
        let n = self.order;
        let s = k.rem_euclid(n as i64) as usize;
        let mut coeffs = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(i + s) % n] = c.clone();
        }
        CycInt { order: n, coeffs }
    }

    /// Embed Z[ζ_N] → Z[ζ_M] for N | M.
    pub fn lift(&self, m: usize) -> Result<CycInt> {
        if m == 0 || m % self.order != 0 {
            return Err(Error::OrderMismatch(self.order, m));
        }
        if m == self.order {
            return Ok(self.clone());
        }
        let step = m / self.order;
        let mut coeffs = vec![BigInt::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * step] = c.clone();
        }
        Ok(CycInt { order: m, coeffs })
    }

    /// Coordinates in the basis 1, ζ, …, ζ^(φ(N)−1) of Z[ζ_N].
    pub fn canonical(&self) -> Vec<BigInt> {
        phi::reduce_big(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().iter().all(|c| c.is_zero())
    }

    /// If this element is an integer, return it.
    pub fn as_integer(&self) -> Option<BigInt> {
        let c = self.canonical();
        if c.iter().skip(1).all(|x| x.is_zero()) {
            Some(c.first().cloned().unwrap_or_else(BigInt::zero))
        } else {
            None
        }
    }

    /// Exact division by an integer, if every canonical coordinate is divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<CycInt> {
        let c = self.canonical();
        if c.iter().any(|x| !x.is_multiple_of(d)) {
            return None;
        }
        let mut coeffs: Vec<BigInt> = c.into_iter().map(|x| x / d).collect();
        coeffs.resize(self.order, BigInt::zero());
        Some(CycInt {
            order: self.order,
            coeffs,
        })
    }

    /// Certified disc containing the complex value under ζ_N ↦ exp(2πi/N).
    pub fn embed_complex(&self, precision_bits: u32) -> ComplexInterval {
        assert!(precision_bits >= 16, "precision_bits must be at least 16");
        embed::embed(&self.coeffs, precision_bits)
    }

    /// Sum of absolute values of the stored coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &CycInt) -> bool {
        let m = self.order.lcm(&other.order);
        match (self.lift(m), other.lift(m)) {
            (Ok(a), Ok(b)) => a
                .checked_sub(&b)
                .map(|d| d.is_zero())
                .unwrap_or(false),
            _ => false,
        }
    }
}

impl Eq for CycInt {}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.canonical().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write!(f, "ζ{}^{i}", self.order)?,
                (_, false) => write!(f, "{a}·ζ{}^{i}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Recover γ ∈ μ₈ from s = √m · γ.
///
/// The exact part checks s·s̄ = m and s² = m·δ with δ ∈ μ₄; the two square roots of δ
/// are antipodal, so a certified enclosure of s·ζ₈^(−e) with radius below √m decides
/// the sign.
pub fn recognize_scaled_mu8(s: &CycInt, m: u64) -> Result<Mu8> {
    if m == 0 {
        return Err(Error::Input("recognize_scaled_mu8 needs m >= 1".into()));
    }
    let mb = BigInt::from(m);
    let l = s.order().lcm(&8);
    let sl = s.lift(l)?;
    // s² = m·i^e forces |σ(s)|² = m for every embedding σ
    let sq = s.checked_mul(s)?.lift(l)?;
    let e = (0..4i64)
        .find(|&e| {
            let target = CycInt::zeta(l, e * (l as i64 / 4)).scale(&mb);
            sq.checked_sub(&target).map(|d| d.is_zero()).unwrap_or(false)
        })
        .ok_or_else(|| {
            let norm = s.checked_mul(&s.conj()).ok().and_then(|x| x.as_integer());
            if norm.as_ref() != Some(&mb) {
                Error::Degenerate(format!("|s|^2 differs from {m}"))
            } else {
                Error::NotWeilIndex(format!("s^2 = {sq} is not m·μ4"))
            }
        })?;
    // s·ζ8^(−e) = ±√m
    let rotated = sl.mul_zeta(-e * (l as i64 / 8));
    let mut bits = 32;
    loop {
        if let Some(sign) = rotated.embed_complex(bits).certain_re_sign() {
            return Ok(Mu8::new(if sign > 0 { e } else { e + 4 }));
        }
        if bits > 4096 {
            return Err(Error::Precision(
                "sign of scaled root of unity not separated".into(),
            ));
        }
        bits *= 2;
    }
}
