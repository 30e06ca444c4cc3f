//! Differentials ω = p^a·u(t)·∏P_j^e_j·dt on Spec ℤ_p[[t]] and their data along
//! the formal curves through (p, t): the fiber y_p and the distinguished curves P = 0.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{check_monic, eval_at, is_eisenstein, point_field, poly_to_string, Factor};
use crate::arith::{self, rational_serde};
use crate::error::{Error, Result};
use crate::local_fields::{LocalField, LocalFieldElement};

/// u(t) is a polynomial with p-integral coefficients and unit constant term;
/// every P_j is linear or Eisenstein distinguished.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDifferential {
    pub p_power: i64,
    #[serde(
        serialize_with = "rational_serde::serialize_vec",
        deserialize_with = "rational_serde::deserialize_vec"
    )]
    pub unit_series: Vec<BigRational>,
    #[serde(default)]
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormalCurve {
    Fiber,
    Poly(
        #[serde(
            serialize_with = "rational_serde::serialize_vec",
            deserialize_with = "rational_serde::deserialize_vec"
        )]
        Vec<BigRational>,
    ),
}

impl fmt::Display for FormalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormalCurve::Fiber => write!(f, "y_p"),
            FormalCurve::Poly(p) => write!(f, "y_({})", poly_to_string(p)),
        }
    }
}

/// ord of ω along y and its leading coefficient: in F_p((t)) for the fiber,
/// in K_P for a distinguished curve.
#[derive(Clone, Debug)]
pub struct SurfaceData {
    pub curve: FormalCurve,
    pub ord: i64,
    pub leading: LocalFieldElement,
}

fn distinguished(poly: &[BigRational], p: u64) -> bool {
    let n = poly.len() - 1;
    poly[..n]
        .iter()
        .all(|c| arith::vp_rat(c, p).is_none_or(|v| v >= 1))
}

impl SurfaceDifferential {
    pub fn validate(&self, p: u64) -> Result<()> {
        let Some(u0) = self.unit_series.first() else {
            return Err(Error::Input("unit series is empty".into()));
        };
        if arith::vp_rat(u0, p) != Some(0) {
            return Err(Error::Input(format!(
                "unit series constant term {} is not a {p}-adic unit",
                arith::format_rational(u0)
            )));
        }
        if let Some(c) = self
            .unit_series
            .iter()
            .find(|c| arith::vp_rat(c, p).is_some_and(|v| v < 0))
        {
            return Err(Error::Input(format!(
                "unit series coefficient {} is not {p}-integral",
                arith::format_rational(c)
            )));
        }
        for (i, fac) in self.factors.iter().enumerate() {
            check_monic(&fac.poly)?;
            if fac.exp == 0 {
                return Err(Error::Input("factor exponent 0".into()));
            }
            if !distinguished(&fac.poly, p) {
                return Err(Error::Input(format!(
                    "({}) is not a distinguished polynomial at {p}",
                    poly_to_string(&fac.poly)
                )));
            }
            if self.factors[..i].iter().any(|g| g.poly == fac.poly) {
                return Err(Error::Input(format!(
                    "factor ({}) listed twice",
                    poly_to_string(&fac.poly)
                )));
            }
            curve_kind(&fac.poly, p)?;
        }
        Ok(())
    }

    pub fn curves(&self) -> Vec<FormalCurve> {
        let mut out = vec![FormalCurve::Fiber];
        out.extend(self.factors.iter().map(|f| FormalCurve::Poly(f.poly.clone())));
        out
    }

    fn exponent_of(&self, poly: &[BigRational]) -> i64 {
        self.factors
            .iter()
            .find(|f| f.poly == poly)
            .map_or(0, |f| f.exp)
    }
}

impl fmt::Display for SurfaceDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p^{}·({})", self.p_power, poly_to_string(&self.unit_series))?;
        for fac in &self.factors {
            write!(f, "·({})", poly_to_string(&fac.poly))?;
            if fac.exp != 1 {
                write!(f, "^{}", fac.exp)?;
            }
        }
        write!(f, " dt")
    }
}

/// Linear curves and Eisenstein curves are supported.
fn curve_kind(poly: &[BigRational], p: u64) -> Result<()> {
    if poly.len() == 2 {
        return Ok(());
    }
    let ints: Option<Vec<i64>> = poly
        .iter()
        .map(|c| if c.is_integer() { c.numer().to_i64() } else { None })
        .collect();
    match ints {
        Some(v) if is_eisenstein(&v, p) => Ok(()),
        _ => Err(Error::Unsupported(format!(
            "distinguished curve ({}) is neither linear nor Eisenstein",
            poly_to_string(poly)
        ))),
    }
}

pub fn surface_data(
    p: u64,
    omega: &SurfaceDifferential,
    y: &FormalCurve,
    prec: i64,
) -> Result<SurfaceData> {
    omega.validate(p)?;
    match y {
        FormalCurve::Fiber => {
            // reduction mod p: P_j ↦ t^deg P_j, u ↦ ū
            let f = LocalField::eqchar(p, None)?;
            let fq = f.residue_field()?;
            let m = BigInt::from(p);
            let val: i64 = omega
                .factors
                .iter()
                .map(|fac| (fac.poly.len() as i64 - 1) * fac.exp)
                .sum();
            let n = prec.max(omega.unit_series.len() as i64) as usize;
            let digits = (0..n)
                .map(|i| match omega.unit_series.get(i) {
                    Some(c) => fq.from_int(arith::rat_mod(c, &m).unwrap().to_i64().unwrap()),
                    None => fq.zero(),
                })
                .collect();
            Ok(SurfaceData {
                curve: y.clone(),
                ord: omega.p_power,
                leading: LocalFieldElement::from_series(&f, val, digits)?,
            })
        }
        FormalCurve::Poly(poly) => {
            check_monic(poly)?;
            if !distinguished(poly, p) {
                return Err(Error::Input(format!(
                    "({}) is not a distinguished polynomial at {p}",
                    poly_to_string(poly)
                )));
            }
            curve_kind(poly, p)?;
            let (field, theta) = point_field(p, poly, prec)?;
            let ctx = |e: Error| e.context(&format!("curve ({})", poly_to_string(poly)));
            // t_P = P(t), dt = dt_P / P′(θ) + …
            let deriv: Vec<BigRational> = poly
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect();
            let pa = LocalFieldElement::from_rational(
                &field,
                &arith::rat_int(p as i64).pow(omega.p_power as i32),
                prec,
            )?;
            let mut lead = pa
                .mul(&eval_at(&omega.unit_series, &theta, prec)?)?
                .div(&eval_at(&deriv, &theta, prec)?)
                .map_err(ctx)?;
            for fac in &omega.factors {
                if fac.poly == *poly {
                    continue;
                }
                let q = eval_at(&fac.poly, &theta, prec)?;
                lead = lead.mul(&q.pow(fac.exp).map_err(ctx)?)?;
            }
            if lead.is_zero() {
                return Err(ctx(Error::Precision("leading coefficient vanishes to working precision".into())));
            }
            Ok(SurfaceData {
                curve: y.clone(),
                ord: omega.exponent_of(poly),
                leading: lead,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;
    use crate::laurent::{expand_at, ClosedPoint, FactoredDifferential, FactoredRatFunc};

    fn poly(c: &[i64]) -> Vec<BigRational> {
        c.iter().map(|&x| rat_int(x)).collect()
    }

    fn omega(a: i64, u: &[i64], factors: &[(&[i64], i64)]) -> SurfaceDifferential {
        SurfaceDifferential {
            p_power: a,
            unit_series: poly(u),
            factors: factors
                .iter()
                .map(|(p, e)| Factor {
                    poly: poly(p),
                    exp: *e,
                })
                .collect(),
        }
    }

    #[test]
    fn fiber_data() {
        let w = omega(1, &[1], &[]);
        let d = surface_data(5, &w, &FormalCurve::Fiber, 8).unwrap();
        assert_eq!(d.ord, 1);
        assert_eq!(d.leading.valuation(), Some(0));
        assert_eq!(d.leading.digits().unwrap()[0], vec![1]);
        let w = omega(0, &[1], &[(&[-5, 0, 1], 1)]);
        let d = surface_data(5, &w, &FormalCurve::Fiber, 8).unwrap();
        assert_eq!((d.ord, d.leading.valuation()), (0, Some(2)));
    }

    #[test]
    fn linear_curve() {
        let w = omega(0, &[1], &[(&[-5, 1], 1)]);
        let d = surface_data(5, &w, &FormalCurve::Poly(poly(&[-5, 1])), 10).unwrap();
        assert_eq!(d.ord, 1);
        let one = LocalFieldElement::one(d.leading.field(), 10);
        assert!(d.leading.eq_to_prec(&one).unwrap());
    }

    #[test]
    fn agrees_with_curve_expansion_for_polynomial_units() {
        // u = 1 + 5t: compare with expanding (t + 1/5)·5 at the Eisenstein point
        let w = omega(2, &[1, 5], &[(&[-5, 0, 1], -1), (&[-10, 1], 2)]);
        let d = surface_data(5, &w, &FormalCurve::Poly(poly(&[-5, 0, 1])), 16).unwrap();
        let curve = FactoredDifferential::new(
            FactoredRatFunc::new(
                rat_int(125),
                vec![
                    Factor { poly: vec![BigRational::new(1.into(), 5.into()), rat_int(1)], exp: 1 },
                    Factor { poly: poly(&[-5, 0, 1]), exp: -1 },
                    Factor { poly: poly(&[-10, 1]), exp: 2 },
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let e = expand_at(&curve, &ClosedPoint::Finite(poly(&[-5, 0, 1])), 5, 1, 16).unwrap();
        assert_eq!(d.ord, e.ord);
        assert!(d.leading.eq_to_prec(e.leading()).unwrap());
    }

    #[test]
    fn validation() {
        assert!(matches!(
            omega(0, &[5], &[]).validate(5),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            omega(0, &[1], &[(&[-1, 1], 1)]).validate(5),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            omega(0, &[1], &[(&[-25, 0, 1], 1)]).validate(5),
            Err(Error::Unsupported(_))
        ));
    }
}
