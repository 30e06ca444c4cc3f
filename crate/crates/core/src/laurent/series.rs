//! Truncated power series over a local field: coefficient k is the s^k term,
//! and everything from s^len on is unknown.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::local_fields::{LocalField, LocalFieldElement};

#[derive(Clone, Debug)]
pub struct PowerSeries {
    field: LocalField,
    coeffs: Vec<LocalFieldElement>,
}

impl PowerSeries {
    pub fn new(field: &LocalField, coeffs: Vec<LocalFieldElement>) -> Self {
        PowerSeries {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn constant(c: LocalFieldElement, n: usize) -> Self {
        let field = c.field().clone();
        let mut coeffs = vec![LocalFieldElement::zero(&field); n];
        if n > 0 {
            coeffs[0] = c;
        }
        PowerSeries { field, coeffs }
    }

    /// s itself.
    pub fn variable(field: &LocalField, n: usize, prec: i64) -> Self {
        let mut coeffs = vec![LocalFieldElement::zero(field); n];
        if n > 1 {
            coeffs[1] = LocalFieldElement::one(field, prec);
        }
        PowerSeries {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[LocalFieldElement] {
        &self.coeffs
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn truncate(&self, n: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.truncate(n);
        PowerSeries::new(&self.field, c)
    }

    /// Extend with exact zeros (for polynomials, which are known exactly).
    pub fn pad(&self, n: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(n.max(c.len()), LocalFieldElement::zero(&self.field));
        PowerSeries::new(&self.field, c)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let n = self.len().min(o.len());
        let c = (0..n)
            .map(|k| self.coeffs[k].add(&o.coeffs[k]))
            .collect::<Result<_>>()?;
        Ok(PowerSeries::new(&self.field, c))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        let n = self.len().min(o.len());
        let c = (0..n)
            .map(|k| self.coeffs[k].sub(&o.coeffs[k]))
            .collect::<Result<_>>()?;
        Ok(PowerSeries::new(&self.field, c))
    }

    pub fn scale(&self, a: &LocalFieldElement) -> Result<Self> {
        let c = self.coeffs.iter().map(|x| x.mul(a)).collect::<Result<_>>()?;
        Ok(PowerSeries::new(&self.field, c))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let n = self.len().min(o.len());
        let mut c = vec![LocalFieldElement::zero(&self.field); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() && self.coeffs[i].abs_prec().is_none() {
                continue;
            }
            for j in 0..n - i {
                c[i + j] = c[i + j].add(&self.coeffs[i].mul(&o.coeffs[j])?)?;
            }
        }
        Ok(PowerSeries::new(&self.field, c))
    }

    /// Needs an invertible constant term.
    pub fn inv(&self) -> Result<Self> {
        let n = self.len();
        if n == 0 {
            return Ok(self.clone());
        }
        let b0 = self.coeffs[0]
            .inv()
            .map_err(|e| e.context("inverting a power series"))?;
        let mut b = vec![b0.clone()];
        for k in 1..n {
            let mut s = LocalFieldElement::zero(&self.field);
            for i in 1..=k {
                s = s.add(&self.coeffs[i].mul(&b[k - i])?)?;
            }
            b.push(s.mul(&b0)?.neg());
        }
        Ok(PowerSeries::new(&self.field, b))
    }

    /// self^e for e ≠ 0 (negative powers need an invertible constant term).
    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out: Option<Self> = None;
        let mut k = e.unsigned_abs();
        if k == 0 {
            return Err(Error::Input("zeroth power of a power series".into()));
        }
        while k > 0 {
            if k & 1 == 1 {
                out = Some(match out {
                    Some(o) => o.mul(&base)?,
                    None => base.clone(),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(out.unwrap())
    }

    pub fn derivative(&self) -> Result<Self> {
        let c = (1..self.len())
            .map(|k| {
                let c = &self.coeffs[k];
                let r = c.rel_prec().unwrap_or(1);
                c.mul(&LocalFieldElement::from_int(&self.field, k as i64, r))
            })
            .collect::<Result<_>>()?;
        Ok(PowerSeries::new(&self.field, c))
    }

    /// Q(self) for a polynomial with rational coefficients, low to high.
    pub fn eval_poly(&self, q: &[BigRational], prec: i64) -> Result<Self> {
        let n = self.len();
        let mut acc = PowerSeries::constant(LocalFieldElement::zero(&self.field), n);
        for c in q.iter().rev() {
            acc = acc.mul(self)?;
            let c = LocalFieldElement::from_rational(&self.field, c, prec)?;
            acc.coeffs[0] = acc.coeffs[0].add(&c)?;
        }
        Ok(acc)
    }

    /// Index and value of the first coefficient that is provably nonzero.
    pub fn leading(&self) -> Result<(usize, &LocalFieldElement)> {
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                return Ok((k, c));
            }
            if c.abs_prec().is_some() {
                return Err(Error::Precision(format!(
                    "coefficient {k} of a power series vanishes to working precision"
                )));
            }
        }
        Err(Error::Degenerate("power series is zero".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    #[test]
    fn geometric_series() {
        let f = LocalField::padic(5).unwrap();
        let s = PowerSeries::variable(&f, 6, 20);
        let one_minus = PowerSeries::constant(LocalFieldElement::one(&f, 20), 6)
            .sub(&s)
            .unwrap();
        let g = one_minus.inv().unwrap();
        for c in g.coeffs() {
            assert!(c.eq_to_prec(&LocalFieldElement::one(&f, 20)).unwrap());
        }
        let sq = one_minus.pow(-2).unwrap();
        for (k, c) in sq.coeffs().iter().enumerate() {
            let want = LocalFieldElement::from_int(&f, k as i64 + 1, 20);
            assert!(c.eq_to_prec(&want).unwrap());
        }
        let q = s.eval_poly(&[rat_int(1), rat_int(2), rat_int(1)], 20).unwrap();
        let want = s.pad(6).add(&PowerSeries::constant(LocalFieldElement::one(&f, 20), 6)).unwrap().pow(2).unwrap();
        for (a, b) in q.coeffs().iter().zip(want.coeffs()) {
            assert!(a.eq_to_prec(b).unwrap());
        }
    }
}
