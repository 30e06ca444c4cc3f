//! Exact rational functions over ℚ, viewed inside ℚ((t)) through their order at
//! t = 0 and lowest coefficient.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::diag::PivotScalar;
use crate::arith::{self, rational_serde};
use crate::error::{Error, Result};

/// Σ coeffs[i]·t^(low+i).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentPoly {
    #[serde(default)]
    pub low: i64,
    #[serde(
        serialize_with = "rational_serde::serialize_vec",
        deserialize_with = "rational_serde::deserialize_vec"
    )]
    pub coeffs: Vec<BigRational>,
}

impl LaurentPoly {
    pub fn monomial(c: BigRational, k: i64) -> Self {
        LaurentPoly {
            low: k,
            coeffs: vec![c],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| Zero::is_zero(c))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(i, c)| {
                let k = self.low + i as i64;
                let c = arith::format_rational(c);
                match k {
                    0 => c,
                    1 => format!("{c}*t"),
                    _ => format!("{c}*t^{k}"),
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

type Poly = Vec<BigRational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| Zero::is_zero(c)) {
        p.pop();
    }
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn padd(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    trim(&mut out);
    out
}

fn pneg(a: &Poly) -> Poly {
    a.iter().map(|c| -c).collect()
}

fn prem_quot(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let c = r.last().unwrap() / &lead;
        let shift = r.len() - 1 - db;
        q[shift] = c.clone();
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn pgcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let (_, r) = prem_quot(&a, &b);
        a = b;
        b = r;
    }
    let lead = a.last().cloned().unwrap_or_else(BigRational::one);
    a.iter().map(|c| c / &lead).collect()
}

fn low_index(p: &Poly) -> usize {
    p.iter().position(|c| !Zero::is_zero(c)).unwrap_or(0)
}

/// num/den in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    fn reduce(mut num: Poly, mut den: Poly) -> Result<Self> {
        trim(&mut num);
        trim(&mut den);
        if den.is_empty() {
            return Err(Error::Degenerate("division by the zero rational function".into()));
        }
        if num.is_empty() {
            return Ok(RatFunc {
                num,
                den: vec![BigRational::one()],
            });
        }
        let g = pgcd(&num, &den);
        if g.len() > 1 {
            num = prem_quot(&num, &g).0;
            den = prem_quot(&den, &g).0;
        }
        let lead = den.last().unwrap().clone();
        Ok(RatFunc {
            num: num.iter().map(|c| c / &lead).collect(),
            den: den.iter().map(|c| c / &lead).collect(),
        })
    }

    pub fn from_rational(c: BigRational) -> Self {
        RatFunc::reduce(vec![c], vec![BigRational::one()]).unwrap()
    }

    pub fn from_laurent(l: &LaurentPoly) -> Self {
        let (num, den) = if l.low >= 0 {
            let mut n = vec![BigRational::zero(); l.low as usize];
            n.extend(l.coeffs.iter().cloned());
            (n, vec![BigRational::one()])
        } else {
            let mut d = vec![BigRational::zero(); (-l.low) as usize];
            d.push(BigRational::one());
            (l.coeffs.clone(), d)
        };
        RatFunc::reduce(num, den).unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Order at t = 0.
    pub fn ord(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(low_index(&self.num) as i64 - low_index(&self.den) as i64)
    }

    /// Coefficient of t^ord.
    pub fn leading(&self) -> Option<BigRational> {
        if self.is_zero() {
            return None;
        }
        Some(&self.num[low_index(&self.num)] / &self.den[low_index(&self.den)])
    }

    pub fn add(&self, o: &Self) -> Self {
        RatFunc::reduce(
            padd(&pmul(&self.num, &o.den), &pmul(&o.num, &self.den)),
            pmul(&self.den, &o.den),
        )
        .unwrap()
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: pneg(&self.num),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        RatFunc::reduce(pmul(&self.num, &o.num), pmul(&self.den, &o.den)).unwrap()
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::Degenerate("division by the zero rational function".into()));
        }
        RatFunc::reduce(pmul(&self.num, &o.den), pmul(&self.den, &o.num))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Poly| crate::laurent::poly_to_string(p);
        if self.den.len() == 1 {
            write!(f, "{}", show(&self.num))
        } else {
            write!(f, "({})/({})", show(&self.num), show(&self.den))
        }
    }
}

impl PivotScalar for RatFunc {
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn is_exact_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn pivot_key(&self) -> i64 {
        self.ord().unwrap_or(i64::MAX)
    }
    fn zero_like(&self) -> Self {
        RatFunc::from_rational(BigRational::zero())
    }
    fn one_like(&self) -> Self {
        RatFunc::from_rational(BigRational::one())
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(RatFunc::add(self, o))
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(RatFunc::add(self, &o.neg()))
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(RatFunc::mul(self, o))
    }
    fn div(&self, o: &Self) -> Result<Self> {
        RatFunc::div(self, o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    fn lp(low: i64, c: &[i64]) -> RatFunc {
        RatFunc::from_laurent(&LaurentPoly {
            low,
            coeffs: c.iter().map(|&x| rat_int(x)).collect(),
        })
    }

    #[test]
    fn order_and_leading() {
        let a = lp(-2, &[0, 3, 1]);
        assert_eq!((a.ord(), a.leading()), (Some(-1), Some(rat_int(3))));
        let b = lp(0, &[1, 0, -1]);
        let q = a.div(&b).unwrap();
        assert_eq!((q.ord(), q.leading()), (Some(-1), Some(rat_int(3))));
        let s = a.add(&a.neg());
        assert!(s.is_zero());
        let h = lp(1, &[2]).div(&lp(0, &[4, 2])).unwrap();
        assert_eq!((h.ord(), h.leading()), (Some(1), Some(rat(1, 2))));
    }

    #[test]
    fn reduces_common_factors() {
        let a = lp(0, &[-1, 0, 1]).div(&lp(0, &[1, 1])).unwrap();
        assert_eq!(a, lp(0, &[-1, 1]));
    }
}
