//! Elements with tracked precision.
//!
//! A nonzero non-archimedean element is π^val·u with u a unit known modulo π^prec
//! (relative precision prec). Zero carries the absolute precision to which it is
//! known, or none when it is exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use super::{FieldKind, FqElem, LocalField};
use crate::arith;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Repr {
    Zero { abs_prec: Option<i64> },
    /// characteristic 0: power-basis coordinates of the unit
    Adic { val: i64, unit: Vec<BigInt>, prec: i64 },
    /// F_q((u)): digits[i] is the coefficient of u^(val+i)
    Series { val: i64, digits: Vec<FqElem> },
    Real(BigRational),
    Complex(BigRational, BigRational),
}

#[derive(Clone, Debug)]
pub struct LocalFieldElement {
    field: LocalField,
    repr: Repr,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

fn pbig(f: &LocalField) -> BigInt {
    BigInt::from(f.p())
}

/// p^k for the coordinate j of an element of π^r·O.
fn coord_modulus(f: &LocalField, j: usize, r: i64) -> BigInt {
    let k = if f.kind() == FieldKind::Eisenstein {
        ceil_div(r - j as i64, f.e())
    } else {
        r
    };
    pbig(f).pow(k.max(0) as u32)
}

fn reduce_coords(f: &LocalField, c: &mut [BigInt], r: i64) {
    for (j, x) in c.iter_mut().enumerate() {
        let m = coord_modulus(f, j, r);
        *x = x.mod_floor(&m);
    }
}

/// O-valuation of Σ c_j β^j in π units, capped at `cap`.
pub(crate) fn ord_coords(f: &LocalField, c: &[BigInt], cap: i64) -> i64 {
    let eis = f.kind() == FieldKind::Eisenstein;
    c.iter()
        .enumerate()
        .filter_map(|(j, x)| {
            arith::vp_int(x, f.p()).map(|v| {
                if eis {
                    f.e() * v + j as i64
                } else {
                    v
                }
            })
        })
        .min()
        .unwrap_or(cap)
        .min(cap)
}

fn mul_coords(f: &LocalField, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let poly = f.poly();
    let n = poly.len() - 1;
    let mut prod = vec![BigInt::zero(); 2 * n - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for k in (n..2 * n - 1).rev() {
        let c = std::mem::take(&mut prod[k]);
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            prod[k - n + i] -= &c * &poly[i];
        }
    }
    prod.truncate(n);
    prod
}

fn times_pi(f: &LocalField, c: &[BigInt]) -> Vec<BigInt> {
    if f.kind() != FieldKind::Eisenstein {
        let p = pbig(f);
        return c.iter().map(|x| x * &p).collect();
    }
    let poly = f.poly();
    let e = c.len();
    let top = c[e - 1].clone();
    let mut out = vec![BigInt::zero(); e];
    out[1..e].clone_from_slice(&c[..(e - 1)]);
    for i in 0..e {
        out[i] -= &top * &poly[i];
    }
    out
}

/// π⁻¹·c for c ∈ πO, exact modulo π^t after division.
fn div_pi(f: &LocalField, c: &[BigInt], t: i64) -> Vec<BigInt> {
    let p = pbig(f);
    if f.kind() != FieldKind::Eisenstein {
        return c
            .iter()
            .map(|x| {
                debug_assert!((x % &p).is_zero());
                x / &p
            })
            .collect();
    }
    let poly = f.poly();
    let e = c.len();
    let k = ceil_div(t.max(1), f.e()) + 2;
    let m = p.pow(k as u32);
    debug_assert!((&c[0] % &p).is_zero());
    let u0 = &poly[0] / &p;
    let inv = arith::mod_inv(&u0, &m).expect("Eisenstein constant term is p times a unit");
    let t0 = ((&c[0] / &p) * inv).mod_floor(&m);
    (0..e)
        .map(|j| {
            let next = if j + 1 < e { c[j + 1].clone() } else { BigInt::zero() };
            next - &t0 * &poly[j + 1]
        })
        .collect()
}

/// Inverse of a unit modulo π^r by Newton iteration from the residue inverse.
fn inv_unit(f: &LocalField, u: &[BigInt], r: i64) -> Result<Vec<BigInt>> {
    let n = u.len();
    let p = pbig(f);
    let mut y = vec![BigInt::zero(); n];
    if f.kind() == FieldKind::Unramified {
        let fq = f.residue_field()?;
        let res: Vec<u64> = u.iter().map(|x| x.mod_floor(&p).to_u64().unwrap()).collect();
        let inv = fq.inv(&fq.from_poly(&res))?;
        for (yj, c) in y.iter_mut().zip(inv) {
            *yj = BigInt::from(c);
        }
    } else {
        y[0] = arith::mod_inv(&u[0], &p)
            .ok_or_else(|| Error::Domain("inverse of a non-unit".into()))?;
    }
    let mut two = vec![BigInt::zero(); n];
    two[0] = BigInt::from(2);
    let mut k = 1;
    while k < r {
        k = (2 * k).min(r);
        let uy = mul_coords(f, u, &y);
        let corr: Vec<BigInt> = two.iter().zip(&uy).map(|(a, b)| a - b).collect();
        y = mul_coords(f, &y, &corr);
        reduce_coords(f, &mut y, k);
    }
    reduce_coords(f, &mut y, r);
    Ok(y)
}

/// The unit p/π^e (1 when unramified).
fn eps_unit(f: &LocalField, r: i64) -> Result<Vec<BigInt>> {
    let n = f.degree();
    let mut one = vec![BigInt::zero(); n];
    one[0] = BigInt::one();
    if f.kind() != FieldKind::Eisenstein {
        return Ok(one);
    }
    // P(π) = 0 gives p = −π^e · (Σ_{i<e} (P_i/p) π^i)⁻¹
    let p = pbig(f);
    let s: Vec<BigInt> = f.poly()[..n].iter().map(|c| -(c / &p)).collect();
    inv_unit(f, &s, r)
}

fn normalize_adic(f: &LocalField, c: Vec<BigInt>, val: i64, abs: i64) -> Repr {
    let t = abs - val;
    if t <= 0 {
        return Repr::Zero { abs_prec: Some(abs) };
    }
    let o = ord_coords(f, &c, t);
    if o >= t {
        return Repr::Zero { abs_prec: Some(abs) };
    }
    let mut c = c;
    for _ in 0..o {
        c = div_pi(f, &c, t);
    }
    let r = t - o;
    reduce_coords(f, &mut c, r);
    Repr::Adic {
        val: val + o,
        unit: c,
        prec: r,
    }
}

fn normalize_series(f: &LocalField, digits: Vec<FqElem>, val: i64) -> Repr {
    let fq = f.residue_field().expect("equal characteristic field");
    let abs = val + digits.len() as i64;
    match digits.iter().position(|d| !fq.is_zero(d)) {
        None => Repr::Zero { abs_prec: Some(abs) },
        Some(k) => Repr::Series {
            val: val + k as i64,
            digits: digits[k..].to_vec(),
        },
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LocalFieldElement {
    fn new(field: &LocalField, repr: Repr) -> Self {
        LocalFieldElement {
            field: field.clone(),
            repr,
        }
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    /// Exact zero.
    pub fn zero(field: &LocalField) -> Self {
        match field.kind() {
            FieldKind::Real => Self::new(field, Repr::Real(BigRational::zero())),
            FieldKind::Complex => {
                Self::new(field, Repr::Complex(BigRational::zero(), BigRational::zero()))
            }
            _ => Self::new(field, Repr::Zero { abs_prec: None }),
        }
    }

    /// Zero known modulo π^abs_prec.
    pub fn zero_mod(field: &LocalField, abs_prec: i64) -> Self {
        Self::new(
            field,
            Repr::Zero {
                abs_prec: Some(abs_prec),
            },
        )
    }

    pub fn one(field: &LocalField, prec: i64) -> Self {
        Self::from_rational(field, &BigRational::one(), prec).expect("1 lies in every field")
    }

    /// Image of a rational number, with relative precision `prec`.
    pub fn from_rational(field: &LocalField, r: &BigRational, prec: i64) -> Result<Self> {
        match field.kind() {
            FieldKind::Real => return Ok(Self::new(field, Repr::Real(r.clone()))),
            FieldKind::Complex => {
                return Ok(Self::new(field, Repr::Complex(r.clone(), BigRational::zero())))
            }
            _ => {}
        }
        if r.is_zero() {
            return Ok(Self::zero(field));
        }
        if prec < 1 {
            return Err(Error::Precision(format!("relative precision {prec} < 1")));
        }
        let p = field.p();
        if field.kind() == FieldKind::EqChar {
            let fq = field.residue_field()?;
            let m = BigInt::from(p);
            let c = arith::rat_mod(r, &m).ok_or_else(|| {
                Error::Domain(format!("{r} has p in the denominator; no image in F_{p}((u))"))
            })?;
            let c = fq.from_int(c.to_i64().unwrap());
            if fq.is_zero(&c) {
                return Ok(Self::zero(field));
            }
            let mut digits = vec![fq.zero(); prec as usize];
            digits[0] = c;
            return Ok(Self::new(field, Repr::Series { val: 0, digits }));
        }
        let (v, u) = arith::split_p(r, p).expect("nonzero");
        let e = field.e();
        let k = ceil_div(prec, e) + 1;
        let m = BigInt::from(p).pow(k as u32);
        let mut unit = vec![BigInt::zero(); field.degree()];
        unit[0] = arith::rat_mod(&u, &m).expect("p-adic unit");
        if e > 1 && v != 0 {
            let eps = eps_unit(field, prec)?;
            let eps = if v > 0 { eps } else { inv_unit(field, &eps, prec)? };
            for _ in 0..v.unsigned_abs() {
                unit = mul_coords(field, &unit, &eps);
                reduce_coords(field, &mut unit, prec);
            }
        }
        reduce_coords(field, &mut unit, prec);
        Ok(Self::new(
            field,
            Repr::Adic {
                val: e * v,
                unit,
                prec,
            },
        ))
    }

    pub fn from_int(field: &LocalField, n: i64, prec: i64) -> Self {
        Self::from_rational(field, &arith::rat_int(n), prec).expect("integers lie in every field")
    }

    /// A rational known only modulo π^abs_prec.
    pub fn from_rational_abs(field: &LocalField, r: &BigRational, abs_prec: i64) -> Result<Self> {
        if field.is_archimedean() {
            return Self::from_rational(field, r, 1);
        }
        if r.is_zero() {
            return Ok(Self::zero_mod(field, abs_prec));
        }
        let v = arith::vp_rat(r, field.p()).unwrap() * field.e();
        if v >= abs_prec {
            return Ok(Self::zero_mod(field, abs_prec));
        }
        Self::from_rational(field, r, abs_prec - v)
    }

    /// Σ c_j β^j in the power basis, with relative precision at least `prec`.
    pub fn from_coords(field: &LocalField, coords: &[BigRational], prec: i64) -> Result<Self> {
        if !field.is_char_zero_adic() {
            return Err(Error::Domain(format!("{field} has no power basis")));
        }
        let n = field.degree();
        if coords.len() > n {
            return Err(Error::Input(format!("{} coordinates for degree {n}", coords.len())));
        }
        let p = field.p();
        let vals: Vec<i64> = coords.iter().filter_map(|c| arith::vp_rat(c, p)).collect();
        if vals.is_empty() {
            return Ok(Self::zero(field));
        }
        let s = (-vals.iter().min().unwrap()).max(0);
        let ps = BigRational::from_integer(BigInt::from(p).pow(s as u32));
        let top = vals.iter().max().unwrap() + s;
        let k = top + ceil_div(prec, field.e()) + 1;
        let m = BigInt::from(p).pow(k as u32);
        let mut c = vec![BigInt::zero(); n];
        for (j, x) in coords.iter().enumerate() {
            c[j] = arith::rat_mod(&(x * &ps), &m).unwrap();
        }
        let w = Self::new(field, normalize_adic(field, c, 0, field.e() * k));
        if s == 0 {
            return Ok(w);
        }
        let inv_ps = Self::from_rational(field, &(BigRational::one() / ps), prec.max(1))?;
        let out = w.mul(&inv_ps)?;
        Ok(out.truncate_rel(prec))
    }

    /// The uniformizer π (p for unramified fields, u for F_q((u))).
    pub fn uniformizer(field: &LocalField, prec: i64) -> Result<Self> {
        match field.kind() {
            FieldKind::EqChar => {
                let fq = field.residue_field()?;
                let mut digits = vec![fq.zero(); prec.max(1) as usize];
                digits[0] = fq.one();
                Ok(Self::new(field, Repr::Series { val: 1, digits }))
            }
            FieldKind::Real | FieldKind::Complex => {
                Err(Error::Domain("archimedean fields have no uniformizer".into()))
            }
            _ => {
                let mut unit = vec![BigInt::zero(); field.degree()];
                unit[0] = BigInt::one();
                Ok(Self::new(
                    field,
                    Repr::Adic {
                        val: 1,
                        unit,
                        prec: prec.max(1),
                    },
                ))
            }
        }
    }

    /// F_q((u)) element u^val·Σ digits[i]·u^i with relative precision digits.len().
    pub fn from_series(field: &LocalField, val: i64, digits: Vec<FqElem>) -> Result<Self> {
        if field.kind() != FieldKind::EqChar {
            return Err(Error::Domain(format!("{field} is not an equal-characteristic field")));
        }
        let fq = field.residue_field()?;
        if digits.iter().any(|d| d.len() != fq.degree() || d.iter().any(|&c| c >= fq.p())) {
            return Err(Error::Input("digit outside the residue field".into()));
        }
        Ok(Self::new(field, normalize_series(field, digits, val)))
    }

    /// A residue-field element lifted coordinatewise.
    pub fn lift_residue(field: &LocalField, a: &[u64], prec: i64) -> Result<Self> {
        let fq = field.residue_field()?;
        if fq.is_zero(a) {
            return Ok(Self::zero(field));
        }
        match field.kind() {
            FieldKind::EqChar => {
                let mut digits = vec![fq.zero(); prec.max(1) as usize];
                digits[0] = a.to_vec();
                Ok(Self::new(field, Repr::Series { val: 0, digits }))
            }
            FieldKind::Unramified => {
                let coords: Vec<BigRational> =
                    a.iter().map(|&c| arith::rat_int(c as i64)).collect();
                Self::from_coords(field, &coords, prec)
            }
            _ => Self::from_rational(field, &arith::rat_int(a[0] as i64), prec),
        }
    }

    pub fn real(r: BigRational) -> Self {
        Self::new(&LocalField::real(), Repr::Real(r))
    }

    pub fn complex(re: BigRational, im: BigRational) -> Self {
        Self::new(&LocalField::complex(), Repr::Complex(re, im))
    }

    /// Valuation in uniformizer units; None for zero and archimedean values.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Adic { val, .. } | Repr::Series { val, .. } => Some(*val),
            _ => None,
        }
    }

    pub fn rel_prec(&self) -> Option<i64> {
        match &self.repr {
            Repr::Adic { prec, .. } => Some(*prec),
            Repr::Series { digits, .. } => Some(digits.len() as i64),
            _ => None,
        }
    }

    /// None when exact.
    pub fn abs_prec(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs_prec } => *abs_prec,
            Repr::Adic { val, prec, .. } => Some(val + prec),
            Repr::Series { val, digits } => Some(val + digits.len() as i64),
            _ => None,
        }
    }

    /// Zero to the known precision.
    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Zero { .. } => true,
            Repr::Real(r) => r.is_zero(),
            Repr::Complex(a, b) => a.is_zero() && b.is_zero(),
            _ => false,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Real(r) => Some(r),
            Repr::Complex(r, i) if i.is_zero() => Some(r),
            _ => None,
        }
    }

    /// Power-basis coordinates of the unit part (characteristic 0).
    pub fn unit_coords(&self) -> Option<&[BigInt]> {
        match &self.repr {
            Repr::Adic { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// F_q digits of the unit part (equal characteristic).
    pub fn digits(&self) -> Option<&[FqElem]> {
        match &self.repr {
            Repr::Series { digits, .. } => Some(digits),
            _ => None,
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "elements of {} and {} cannot be combined",
                self.field, other.field
            )))
        }
    }

    /// Reduce the relative precision to at most r.
    pub fn truncate_rel(&self, r: i64) -> Self {
        match &self.repr {
            Repr::Adic { val, unit, prec } if *prec > r => {
                let mut u = unit.clone();
                reduce_coords(&self.field, &mut u, r);
                Self::new(
                    &self.field,
                    Repr::Adic {
                        val: *val,
                        unit: u,
                        prec: r,
                    },
                )
            }
            Repr::Series { val, digits } if digits.len() as i64 > r => Self::new(
                &self.field,
                Repr::Series {
                    val: *val,
                    digits: digits[..r.max(1) as usize].to_vec(),
                },
            ),
            _ => self.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        let repr = match &self.repr {
            Repr::Zero { abs_prec } => Repr::Zero { abs_prec: *abs_prec },
            Repr::Adic { val, unit, prec } => {
                let mut u: Vec<BigInt> = unit.iter().map(|x| -x).collect();
                reduce_coords(&self.field, &mut u, *prec);
                Repr::Adic {
                    val: *val,
                    unit: u,
                    prec: *prec,
                }
            }
            Repr::Series { val, digits } => {
                let fq = self.field.residue_field().unwrap();
                Repr::Series {
                    val: *val,
                    digits: digits.iter().map(|d| fq.neg(d)).collect(),
                }
            }
            Repr::Real(r) => Repr::Real(-r),
            Repr::Complex(a, b) => Repr::Complex(-a, -b),
        };
        Self::new(&self.field, repr)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let f = &self.field;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Real(a), Repr::Real(b)) => Repr::Real(a + b),
            (Repr::Complex(a, b), Repr::Complex(c, d)) => Repr::Complex(a + c, b + d),
            (Repr::Zero { abs_prec: a }, Repr::Zero { abs_prec: b }) => Repr::Zero {
                abs_prec: min_opt(*a, *b),
            },
            (Repr::Zero { abs_prec }, _) => return Ok(other.limited_to(*abs_prec)),
            (_, Repr::Zero { abs_prec }) => return Ok(self.limited_to(*abs_prec)),
            (
                Repr::Adic {
                    val: v1,
                    unit: u1,
                    prec: r1,
                },
                Repr::Adic {
                    val: v2,
                    unit: u2,
                    prec: r2,
                },
            ) => {
                let v = (*v1).min(*v2);
                let abs = (v1 + r1).min(v2 + r2);
                let shift = |u: &[BigInt], k: i64| {
                    let mut w = u.to_vec();
                    for _ in 0..k {
                        w = times_pi(f, &w);
                    }
                    w
                };
                let a = shift(u1, v1 - v);
                let b = shift(u2, v2 - v);
                let sum: Vec<BigInt> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                normalize_adic(f, sum, v, abs)
            }
            (Repr::Series { val: v1, digits: d1 }, Repr::Series { val: v2, digits: d2 }) => {
                let fq = f.residue_field()?;
                let v = (*v1).min(*v2);
                let abs = (v1 + d1.len() as i64).min(v2 + d2.len() as i64);
                let mut out = vec![fq.zero(); (abs - v).max(0) as usize];
                for (k, slot) in out.iter_mut().enumerate() {
                    let ex = v + k as i64;
                    for (vv, d) in [(*v1, d1), (*v2, d2)] {
                        let i = ex - vv;
                        if i >= 0 && (i as usize) < d.len() {
                            *slot = fq.add(slot, &d[i as usize]);
                        }
                    }
                }
                normalize_series(f, out, v)
            }
            _ => return Err(Error::Input("mismatched element representations".into())),
        };
        Ok(Self::new(f, repr))
    }

    /// Same element, known only modulo π^abs (no-op for None).
    pub fn limited_to(&self, abs: Option<i64>) -> Self {
        let Some(abs) = abs else {
            return self.clone();
        };
        match (self.valuation(), self.rel_prec()) {
            (Some(v), Some(r)) => {
                if v >= abs {
                    Self::zero_mod(&self.field, abs)
                } else if v + r > abs {
                    self.truncate_rel(abs - v)
                } else {
                    self.clone()
                }
            }
            _ => match &self.repr {
                Repr::Zero { abs_prec } => Self::zero_mod(
                    &self.field,
                    min_opt(*abs_prec, Some(abs)).unwrap(),
                ),
                _ => self.clone(),
            },
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let f = &self.field;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Real(a), Repr::Real(b)) => Repr::Real(a * b),
            (Repr::Complex(a, b), Repr::Complex(c, d)) => {
                Repr::Complex(a * c - b * d, a * d + b * c)
            }
            (Repr::Zero { abs_prec: a }, Repr::Zero { abs_prec: b }) => Repr::Zero {
                abs_prec: match (a, b) {
                    (Some(x), Some(y)) => Some(x + y),
                    _ => None,
                },
            },
            (Repr::Zero { abs_prec }, _) | (_, Repr::Zero { abs_prec }) => {
                let nz = if matches!(self.repr, Repr::Zero { .. }) {
                    other
                } else {
                    self
                };
                Repr::Zero {
                    abs_prec: abs_prec.map(|a| a + nz.valuation().unwrap_or(0)),
                }
            }
            (
                Repr::Adic {
                    val: v1,
                    unit: u1,
                    prec: r1,
                },
                Repr::Adic {
                    val: v2,
                    unit: u2,
                    prec: r2,
                },
            ) => {
                let r = (*r1).min(*r2);
                let mut u = mul_coords(f, u1, u2);
                reduce_coords(f, &mut u, r);
                Repr::Adic {
                    val: v1 + v2,
                    unit: u,
                    prec: r,
                }
            }
            (Repr::Series { val: v1, digits: d1 }, Repr::Series { val: v2, digits: d2 }) => {
                let fq = f.residue_field()?;
                let r = d1.len().min(d2.len());
                let mut out = vec![fq.zero(); r];
                for i in 0..r {
                    for j in 0..r - i {
                        out[i + j] = fq.add(&out[i + j], &fq.mul(&d1[i], &d2[j]));
                    }
                }
                Repr::Series {
                    val: v1 + v2,
                    digits: out,
                }
            }
            _ => return Err(Error::Input("mismatched element representations".into())),
        };
        Ok(Self::new(f, repr))
    }

    pub fn inv(&self) -> Result<Self> {
        let f = &self.field;
        let repr = match &self.repr {
            Repr::Zero { abs_prec } => {
                return Err(Error::Precision(match abs_prec {
                    Some(a) => format!("cannot invert an element known only to be 0 mod π^{a}"),
                    None => "inverse of zero".into(),
                }))
            }
            Repr::Real(r) => {
                if r.is_zero() {
                    return Err(Error::Domain("inverse of zero".into()));
                }
                Repr::Real(r.recip())
            }
            Repr::Complex(a, b) => {
                let n = a * a + b * b;
                if n.is_zero() {
                    return Err(Error::Domain("inverse of zero".into()));
                }
                Repr::Complex(a / &n, -b / &n)
            }
            Repr::Adic { val, unit, prec } => Repr::Adic {
                val: -val,
                unit: inv_unit(f, unit, *prec)?,
                prec: *prec,
            },
            Repr::Series { val, digits } => {
                let fq = f.residue_field()?;
                let a0 = fq.inv(&digits[0])?;
                let r = digits.len();
                let mut b: Vec<FqElem> = vec![fq.zero(); r];
                b[0] = a0.clone();
                for k in 1..r {
                    let mut s = fq.zero();
                    for i in 1..=k {
                        s = fq.add(&s, &fq.mul(&digits[i], &b[k - i]));
                    }
                    b[k] = fq.neg(&fq.mul(&a0, &s));
                }
                Repr::Series {
                    val: -val,
                    digits: b,
                }
            }
        };
        Ok(Self::new(f, repr))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = Self::one(&self.field, self.rel_prec().unwrap_or(1).max(1));
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base)?;
        }
        Ok(out)
    }

    /// Multiply by π^k.
    pub fn shift(&self, k: i64) -> Self {
        let repr = match &self.repr {
            Repr::Zero { abs_prec } => Repr::Zero {
                abs_prec: abs_prec.map(|a| a + k),
            },
            Repr::Adic { val, unit, prec } => Repr::Adic {
                val: val + k,
                unit: unit.clone(),
                prec: *prec,
            },
            Repr::Series { val, digits } => Repr::Series {
                val: val + k,
                digits: digits.clone(),
            },
            other => other.clone(),
        };
        Self::new(&self.field, repr)
    }

    /// Image in the residue field; needs valuation ≥ 0.
    pub fn residue(&self) -> Result<FqElem> {
        let fq = self.field.residue_field()?;
        match &self.repr {
            Repr::Zero { abs_prec } => match abs_prec {
                Some(a) if *a < 1 => Err(Error::Precision(format!(
                    "residue of an element known only mod π^{a}"
                ))),
                _ => Ok(fq.zero()),
            },
            Repr::Adic { val, .. } | Repr::Series { val, .. } if *val < 0 => {
                Err(Error::Domain(format!("residue of an element of valuation {val}")))
            }
            Repr::Adic { val, .. } | Repr::Series { val, .. } if *val > 0 => Ok(fq.zero()),
            Repr::Adic { unit, .. } => {
                let p = pbig(&self.field);
                let coords: Vec<u64> = unit
                    .iter()
                    .map(|x| x.mod_floor(&p).to_u64().unwrap())
                    .collect();
                Ok(match self.field.kind() {
                    FieldKind::Unramified => fq.from_poly(&coords),
                    _ => fq.from_poly(&coords[..1]),
                })
            }
            Repr::Series { digits, .. } => Ok(digits[0].clone()),
            _ => Err(Error::Domain("archimedean values have no residue".into())),
        }
    }

    /// Tr_{F/ℚ_p}(self) as an element of ℚ_p.
    pub fn trace_to_base(&self) -> Result<Self> {
        let f = &self.field;
        if !f.is_char_zero_adic() {
            return Err(Error::Domain(format!("trace is only defined on extensions of ℚ_p, not {f}")));
        }
        let base = f.base()?;
        let e = f.e();
        match &self.repr {
            Repr::Zero { abs_prec: None } => Ok(Self::zero(&base)),
            Repr::Zero { abs_prec: Some(a) } => {
                let delta = f.different_valuation()?;
                Ok(Self::zero_mod(&base, (a + delta).div_euclid(e)))
            }
            Repr::Adic { val, unit, prec } => {
                // x = p^−s·w with w integral
                let s = if *val < 0 { ceil_div(-val, e) } else { 0 };
                let mut w = unit.clone();
                if s > 0 {
                    let eps = eps_unit(f, *prec)?;
                    for _ in 0..s {
                        w = mul_coords(f, &w, &eps);
                    }
                }
                for _ in 0..(val + e * s) {
                    w = times_pi(f, &w);
                }
                let abs_w = val + prec + e * s;
                let tr: BigInt = w.iter().zip(f.traces()).map(|(c, t)| c * t).sum();
                // Tr(π^k·O) ⊂ p^j·Z_p exactly when k + δ ≥ e·j
                let delta = f.different_valuation()?;
                let abs = (abs_w + delta).div_euclid(e) - s;
                let r = BigRational::new(tr, BigInt::from(f.p()).pow(s as u32));
                Self::from_rational_abs(&base, &r, abs)
            }
            _ => unreachable!(),
        }
    }

    /// Whether a unit is a square (odd residue characteristic, or ℚ₂).
    pub fn is_square_unit(&self) -> Result<bool> {
        match &self.repr {
            Repr::Real(r) => return Ok(r.is_positive()),
            Repr::Complex(..) => return Ok(!self.is_zero()),
            _ => {}
        }
        if self.valuation() != Some(0) {
            return Err(Error::Domain(format!(
                "is_square_unit needs a unit, got valuation {:?}",
                self.valuation()
            )));
        }
        let f = &self.field;
        if f.p() != 2 {
            let fq = f.residue_field()?;
            return Ok(fq.is_square(&self.residue()?));
        }
        match (&self.repr, f.kind()) {
            (Repr::Adic { unit, prec, .. }, FieldKind::PAdic) => {
                if *prec < 3 {
                    return Err(Error::Precision(format!(
                        "2-adic square test needs 3 digits, have {prec}"
                    )));
                }
                Ok(unit[0].mod_floor(&BigInt::from(8)) == BigInt::one())
            }
            _ => Err(Error::Unsupported(format!("square test in {f}"))),
        }
    }

    /// p^val·(first coordinate) as a rational, for ℚ_p elements.
    pub fn to_rational_approx(&self) -> Option<BigRational> {
        match &self.repr {
            Repr::Zero { .. } => Some(BigRational::zero()),
            Repr::Adic { val, unit, .. } if self.field.kind() == FieldKind::PAdic => {
                let p = BigRational::from_integer(pbig(&self.field));
                let pv = if *val >= 0 {
                    p.pow(*val as i32)
                } else {
                    p.recip().pow((-val) as i32)
                };
                Some(pv * BigRational::from_integer(unit[0].clone()))
            }
            Repr::Real(r) => Some(r.clone()),
            _ => None,
        }
    }

    /// Difference is zero to the combined precision.
    pub fn eq_to_prec(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }
}

impl fmt::Display for LocalFieldElement {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = &self.field;
        let pi = match f.kind() {
            FieldKind::PAdic | FieldKind::Unramified => f.p().to_string(),
            FieldKind::Eisenstein => "π".to_string(),
            _ => "u".to_string(),
        };
        match &self.repr {
            Repr::Zero { abs_prec: None } => write!(out, "0"),
            Repr::Zero { abs_prec: Some(a) } => write!(out, "O({pi}^{a})"),
            Repr::Real(r) => write!(out, "{}", arith::format_rational(r)),
            Repr::Complex(a, b) => write!(
                out,
                "{} + {}i",
                arith::format_rational(a),
                arith::format_rational(b)
            ),
            Repr::Adic { val, unit, prec } => {
                let u: Vec<String> = unit.iter().map(|c| c.to_string()).collect();
                write!(out, "{pi}^{val}·[{}] + O({pi}^{})", u.join(","), val + prec)
            }
            Repr::Series { val, digits } => {
                let shown: Vec<String> = digits
                    .iter()
                    .take(6)
                    .map(|d| {
                        if d.len() == 1 {
                            d[0].to_string()
                        } else {
                            format!("{d:?}")
                        }
                    })
                    .collect();
                write!(
                    out,
                    "u^{val}·[{}{}] + O(u^{})",
                    shown.join(","),
                    if digits.len() > 6 { ",…" } else { "" },
                    val + digits.len() as i64
                )
            }
        }
    }
}

/// `{"val": v, "digits": [...], "prec": r}`; archimedean values as `{"value": "a/b"}`.
impl Serialize for LocalFieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match &self.repr {
            Repr::Zero { abs_prec } => {
                m.serialize_entry("zero", &true)?;
                m.serialize_entry("abs_prec", abs_prec)?;
            }
            Repr::Adic { val, unit, prec } => {
                m.serialize_entry("val", val)?;
                let digits: Vec<String> = unit.iter().map(|c| c.to_string()).collect();
                m.serialize_entry("digits", &digits)?;
                m.serialize_entry("prec", prec)?;
            }
            Repr::Series { val, digits } => {
                m.serialize_entry("val", val)?;
                m.serialize_entry("digits", digits)?;
                m.serialize_entry("prec", &digits.len())?;
            }
            Repr::Real(r) => m.serialize_entry("value", &arith::format_rational(r))?,
            Repr::Complex(a, b) => {
                m.serialize_entry("re", &arith::format_rational(a))?;
                m.serialize_entry("im", &arith::format_rational(b))?;
            }
        }
        m.end()
    }
}

/// Input form of an element: a rational number (any field), power-basis
/// coordinates times π^shift (characteristic 0), or u^val·Σ digits (F_q((u))).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ElementSpec {
    Rational {
        #[serde(with = "arith::rational_serde")]
        rational: BigRational,
    },
    Coords {
        #[serde(
            serialize_with = "arith::rational_serde::serialize_vec",
            deserialize_with = "arith::rational_serde::deserialize_vec"
        )]
        coords: Vec<BigRational>,
        #[serde(default)]
        shift: i64,
    },
    Series {
        val: i64,
        digits: Vec<FqElem>,
    },
}

impl ElementSpec {
    pub fn to_element(&self, field: &LocalField, prec: i64) -> Result<LocalFieldElement> {
        match self {
            ElementSpec::Rational { rational } => match field.kind() {
                FieldKind::Real => Ok(LocalFieldElement::real(rational.clone())),
                FieldKind::Complex => Ok(LocalFieldElement::complex(rational.clone(), BigRational::zero())),
                _ => LocalFieldElement::from_rational(field, rational, prec),
            },
            ElementSpec::Coords { coords, shift } => {
                Ok(LocalFieldElement::from_coords(field, coords, prec)?.shift(*shift))
            }
            ElementSpec::Series { val, digits } => LocalFieldElement::from_series(field, *val, digits.clone()),
        }
    }
}
