//! Additive characters: ψ_std(p^−s·Tr(x)) in characteristic 0, the coefficient
//! of u^(s−1) in F_q((u)), and exp(±2πix) at the archimedean places.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{FieldKind, LocalField, LocalFieldElement};
use crate::arith;
use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveCharacter {
    field: LocalField,
    shift: i64,
    sign: i8,
}

/// Fractional part of a rational whose denominator is a power of p.
fn frac(y: &BigRational) -> BigRational {
    let d = y.denom();
    BigRational::new(y.numer().mod_floor(d), d.clone())
}

/// Parameters of a character, as they appear in scenario files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSpec {
    pub shift: i64,
    pub sign: i8,
}

impl AdditiveCharacter {
    /// exp(2πi{x}_p) on ℚ_p composed with the trace; a_{−1} ↦ ζ_p^Tr(a_{−1}) on F_q((u));
    /// exp(−2πix) on ℝ and ℂ.
    pub fn standard(field: &LocalField) -> Self {
        let sign = if field.is_archimedean() { -1 } else { 1 };
        AdditiveCharacter {
            field: field.clone(),
            shift: 0,
            sign,
        }
    }

    /// x ↦ ψ_std(sign·p^−shift·Tr x) (characteristic 0), or the coefficient of
    /// u^(shift−1) times sign (F_q((u))).
    pub fn new(field: &LocalField, shift: i64, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Input(format!("character sign must be ±1, got {sign}")));
        }
        if field.is_archimedean() && shift != 0 {
            return Err(Error::Unsupported("shifted archimedean characters".into()));
        }
        Ok(AdditiveCharacter {
            field: field.clone(),
            shift,
            sign,
        })
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn spec(&self) -> CharacterSpec {
        CharacterSpec {
            shift: self.shift,
            sign: self.sign,
        }
    }

    /// The same base character pulled back to another field by the trace.
    pub fn lift_to(&self, field: &LocalField) -> Result<Self> {
        if self.field.is_char_zero_adic()
            && field.is_char_zero_adic()
            && self.field.kind() == FieldKind::PAdic
            && field.p() == self.field.p()
        {
            return Self::new(field, self.shift, self.sign);
        }
        if self.field == *field {
            return Ok(self.clone());
        }
        Err(Error::Unsupported(format!(
            "lifting a character of {} to {field}",
            self.field
        )))
    }

    /// c with ψ trivial on π^c·O and not on π^(c−1)·O.
    pub fn conductor(&self) -> Result<i64> {
        match self.field.kind() {
            FieldKind::EqChar => Ok(self.shift),
            FieldKind::Real | FieldKind::Complex => Err(Error::Domain(
                "archimedean characters have no conductor".into(),
            )),
            _ => Ok(self.field.e() * self.shift - self.field.different_valuation()?),
        }
    }

    /// r ∈ [0,1) with ψ(a) = exp(2πi·r).
    pub fn char_exponent(&self, a: &LocalFieldElement) -> Result<BigRational> {
        if a.field() != &self.field {
            return Err(Error::Input(format!(
                "character of {} applied to an element of {}",
                self.field,
                a.field()
            )));
        }
        if self.field.is_archimedean() {
            return Err(Error::Domain(
                "archimedean characters are not evaluated pointwise".into(),
            ));
        }
        let c = self.conductor()?;
        if let Some(abs) = a.abs_prec() {
            if abs < c {
                return Err(Error::Precision(format!(
                    "character of conductor {c} needs digits up to π^{}, element known to π^{abs}",
                    c - 1
                )));
            }
        }
        if a.is_zero() || a.valuation().is_some_and(|v| v >= c) {
            return Ok(BigRational::zero());
        }
        let p = self.field.p();
        let r = if self.field.kind() == FieldKind::EqChar {
            let v = a.valuation().unwrap();
            let digit = &a.digits().unwrap()[(c - 1 - v) as usize];
            let fq = self.field.residue_field()?;
            BigRational::new(BigInt::from(fq.trace(digit)), BigInt::from(p))
        } else {
            let t = a.trace_to_base()?;
            let y = t
                .to_rational_approx()
                .expect("trace lies in ℚ_p");
            let scale = BigRational::from_integer(arith::pow_p(p, self.shift.unsigned_abs() as u32));
            if self.shift >= 0 {
                y / scale
            } else {
                y * scale
            }
        };
        let r = if self.sign < 0 { -r } else { r };
        Ok(frac(&r))
    }

    /// ψ(a) as an exact root of unity.
    pub fn eval(&self, a: &LocalFieldElement) -> Result<CycInt> {
        let r = self.char_exponent(a)?;
        let order = r
            .denom()
            .to_usize()
            .ok_or_else(|| Error::size("character value order", u128::MAX, usize::MAX as u128))?;
        let k = r.numer().to_i64().unwrap();
        Ok(if k == 0 {
            CycInt::one(1)
        } else {
            CycInt::zeta(order, k)
        })
    }

    /// Whether ψ vanishes on every generator.
    pub fn is_trivial_on(&self, gens: &[LocalFieldElement]) -> Result<bool> {
        for g in gens {
            if !self.char_exponent(g)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl std::fmt::Display for AdditiveCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = if self.sign < 0 { "-" } else { "" };
        if self.shift == 0 {
            write!(f, "psi_std({s}x) on {}", self.field)
        } else {
            write!(f, "psi_std({s}p^{}x) on {}", -self.shift, self.field)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    #[test]
    fn qp_examples() {
        let f = LocalField::padic(3).unwrap();
        let psi = AdditiveCharacter::standard(&f);
        let a = LocalFieldElement::from_rational(&f, &rat(1, 3), 8).unwrap();
        assert_eq!(psi.eval(&a).unwrap(), CycInt::zeta(3, 1));
        let b = LocalFieldElement::from_int(&f, 2, 8);
        assert_eq!(psi.eval(&b).unwrap(), CycInt::one(1));
        assert_eq!(psi.conductor(), Ok(0));
        let shifted = AdditiveCharacter::new(&f, 1, 1).unwrap();
        assert_eq!(shifted.eval(&b).unwrap(), CycInt::zeta(3, 2));
    }

    #[test]
    fn eqchar_example() {
        let f = LocalField::eqchar(3, None).unwrap();
        let psi = AdditiveCharacter::standard(&f);
        let u = LocalFieldElement::uniformizer(&f, 6).unwrap();
        let a = LocalFieldElement::from_int(&f, 2, 6).mul(&u.inv().unwrap()).unwrap();
        // oracle: the u⁻¹ coefficient of 2u⁻¹ is 2
        assert_eq!(psi.eval(&a).unwrap(), CycInt::zeta(3, 2));
        let neg = AdditiveCharacter::new(&f, 0, -1).unwrap();
        assert_eq!(neg.eval(&a).unwrap(), CycInt::zeta(3, 1));
    }

    #[test]
    fn precision_is_checked() {
        let f = LocalField::padic(3).unwrap();
        let psi = AdditiveCharacter::new(&f, 3, 1).unwrap();
        let a = LocalFieldElement::from_rational_abs(&f, &rat_int(1), 2).unwrap();
        assert!(matches!(psi.eval(&a), Err(Error::Precision(_))));
    }

    /// Smallest k with Tr(π^(k+j)) ∈ ℤ_p for all j < e, found by evaluating ψ.
    fn brute_conductor(f: &LocalField) -> i64 {
        let psi = AdditiveCharacter::standard(f);
        let pi = LocalFieldElement::uniformizer(f, 20).unwrap();
        let trivial = |k: i64| {
            (0..f.e()).all(|j| {
                let g = pi.pow(k + j).unwrap();
                psi.char_exponent(&g).unwrap().is_zero()
            })
        };
        let mut k = 10;
        while trivial(k - 1) {
            k -= 1;
        }
        assert!(trivial(k));
        k
    }

    #[test]
    fn conductor_matches_brute_force() {
        for (p, poly) in [(5, vec![-5, 0, 1]), (3, vec![-3, 0, 0, 1]), (2, vec![-2, 0, 1])] {
            let f = LocalField::eisenstein(p, &poly).unwrap();
            let psi = AdditiveCharacter::standard(&f);
            assert_eq!(psi.conductor().unwrap(), brute_conductor(&f), "{f}");
        }
        let f = LocalField::unramified(5, &[-2, 0, 1]).unwrap();
        assert_eq!(AdditiveCharacter::standard(&f).conductor(), Ok(0));
        assert_eq!(brute_conductor(&f), 0);
    }

    #[test]
    fn additivity_on_samples() {
        let f = LocalField::eisenstein(3, &[-3, 0, 0, 1]).unwrap();
        let psi = AdditiveCharacter::new(&f, 1, -1).unwrap();
        let pi = LocalFieldElement::uniformizer(&f, 20).unwrap();
        for (i, j) in [(-4, 0), (-3, -7), (-1, 2), (-6, -5)] {
            let a = pi.pow(i).unwrap();
            let b = pi.pow(j).unwrap().mul(&LocalFieldElement::from_int(&f, 7, 20)).unwrap();
            let s = psi.char_exponent(&a.add(&b).unwrap()).unwrap();
            let t = frac(&(psi.char_exponent(&a).unwrap() + psi.char_exponent(&b).unwrap()));
            assert_eq!(s, t);
        }
    }
}
