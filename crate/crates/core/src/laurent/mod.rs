//! Factored rational differentials on ℙ¹ over ℚ_p: Laurent expansions at closed
//! points, orders, leading coefficients and residues. The formal curves through
//! (p, t) on Spec ℤ_p[[t]] live in [`surface`].

pub mod series;
pub mod surface;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, rational_serde};
use crate::error::{Error, Result};
use crate::local_fields::{Fq, LocalField, LocalFieldElement};

pub use series::PowerSeries;
pub use surface::{surface_data, FormalCurve, SurfaceData, SurfaceDifferential};

/// One factor P^exp with P monic, coefficients low to high.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    #[serde(
        serialize_with = "rational_serde::serialize_vec",
        deserialize_with = "rational_serde::deserialize_vec"
    )]
    pub poly: Vec<BigRational>,
    pub exp: i64,
}

/// constant · ∏ P_j^e_j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoredRatFunc {
    #[serde(with = "rational_serde")]
    pub constant: BigRational,
    #[serde(default)]
    pub factors: Vec<Factor>,
}

/// ω = num · dt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactoredDifferential {
    pub num: FactoredRatFunc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosedPoint {
    Finite(
        #[serde(
            serialize_with = "rational_serde::serialize_vec",
            deserialize_with = "rational_serde::deserialize_vec"
        )]
        Vec<BigRational>,
    ),
    Infinity,
}

/// ord, and coefficients of t_v^ord, t_v^(ord+1), … in k_v.
#[derive(Clone, Debug)]
pub struct LaurentExpansion {
    pub point: ClosedPoint,
    pub field: LocalField,
    pub ord: i64,
    pub coeffs: Vec<LocalFieldElement>,
}

impl LaurentExpansion {
    pub fn leading(&self) -> &LocalFieldElement {
        &self.coeffs[0]
    }
}

pub(crate) fn poly_to_string(poly: &[BigRational]) -> String {
    let mut terms = Vec::new();
    for (i, c) in poly.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let coef = arith::format_rational(c);
        let term = match (i, c.is_one()) {
            (0, _) => coef,
            (1, true) => "t".to_string(),
            (1, false) => format!("{coef}*t"),
            (_, true) => format!("t^{i}"),
            (_, false) => format!("{coef}*t^{i}"),
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for ClosedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedPoint::Finite(p) => write!(f, "({})", poly_to_string(p)),
            ClosedPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Display for FactoredRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", arith::format_rational(&self.constant))?;
        for fac in &self.factors {
            write!(f, "·({})", poly_to_string(&fac.poly))?;
            if fac.exp != 1 {
                write!(f, "^{}", fac.exp)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for FactoredDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dt", self.num)
    }
}

pub(crate) fn check_monic(poly: &[BigRational]) -> Result<()> {
    if poly.len() < 2 || !poly.last().unwrap().is_one() {
        return Err(Error::Input(format!(
            "factor [{}] must be monic of positive degree (coefficients low to high)",
            poly.iter().map(arith::format_rational).collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_deriv(a: &[BigRational]) -> Vec<BigRational> {
    if a.len() <= 1 {
        return vec![BigRational::zero()];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

/// Evaluate a rational polynomial at a field element.
pub(crate) fn eval_at(poly: &[BigRational], x: &LocalFieldElement, prec: i64) -> Result<LocalFieldElement> {
    let f = x.field();
    let mut acc = LocalFieldElement::zero(f);
    for c in poly.iter().rev() {
        acc = acc
            .mul(x)?
            .add(&LocalFieldElement::from_rational(f, c, prec)?)?;
    }
    Ok(acc)
}

/// Integer coefficients of a polynomial, if it has them.
fn integer_coeffs(poly: &[BigRational]) -> Option<Vec<i64>> {
    poly.iter()
        .map(|c| {
            if c.is_integer() {
                c.numer().to_i64()
            } else {
                None
            }
        })
        .collect()
}

pub(crate) fn is_eisenstein(poly: &[i64], p: u64) -> bool {
    let n = poly.len() - 1;
    let pi = p as i64;
    n >= 1
        && poly[..n].iter().all(|c| c % pi == 0)
        && poly[0] % (pi * pi) != 0
}

/// The residue field k_v = ℚ_p[t]/(P) of a supported closed point and the image θ of t.
pub fn point_field(p: u64, poly: &[BigRational], prec: i64) -> Result<(LocalField, LocalFieldElement)> {
    check_monic(poly)?;
    if poly.len() == 2 {
        let f = LocalField::padic(p)?;
        let theta = LocalFieldElement::from_rational(&f, &-poly[0].clone(), prec)?;
        return Ok((f, theta));
    }
    let unsupported = || {
        Error::Unsupported(format!(
            "closed point ({}) over Q_{p}: only linear, Eisenstein, and integral polynomials irreducible mod p are supported",
            poly_to_string(poly)
        ))
    };
    let ints = integer_coeffs(poly).ok_or_else(unsupported)?;
    if is_eisenstein(&ints, p) {
        let f = LocalField::eisenstein(p, &ints)?;
        let theta = LocalFieldElement::uniformizer(&f, prec)?;
        return Ok((f, theta));
    }
    if Fq::new(p, &ints).is_ok() {
        let f = LocalField::unramified(p, &ints)?;
        let theta = LocalFieldElement::from_coords(
            &f,
            &[BigRational::zero(), BigRational::one()],
            prec,
        )?;
        return Ok((f, theta));
    }
    Err(unsupported())
}

impl FactoredRatFunc {
    pub fn new(constant: BigRational, factors: Vec<Factor>) -> Result<Self> {
        let f = FactoredRatFunc { constant, factors };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.constant.is_zero() {
            return Err(Error::Input("constant must be nonzero".into()));
        }
        for (i, fac) in self.factors.iter().enumerate() {
            check_monic(&fac.poly)?;
            if fac.exp == 0 {
                return Err(Error::Input(format!(
                    "factor ({}) has exponent 0",
                    poly_to_string(&fac.poly)
                )));
            }
            if self.factors[..i].iter().any(|g| g.poly == fac.poly) {
                return Err(Error::Input(format!(
                    "factor ({}) listed twice",
                    poly_to_string(&fac.poly)
                )));
            }
        }
        Ok(())
    }

    /// Every factor is a supported closed point over ℚ_p.
    pub fn check_supported(&self, p: u64) -> Result<()> {
        self.validate()?;
        for fac in &self.factors {
            point_field(p, &fac.poly, 2)?;
        }
        Ok(())
    }

    /// Total degree Σ deg(P_j)·e_j.
    pub fn degree(&self) -> i64 {
        self.factors
            .iter()
            .map(|f| (f.poly.len() as i64 - 1) * f.exp)
            .sum()
    }

    pub fn exponent_of(&self, poly: &[BigRational]) -> i64 {
        self.factors
            .iter()
            .find(|f| f.poly == poly)
            .map_or(0, |f| f.exp)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for g in &other.factors {
            match factors.iter_mut().find(|f| f.poly == g.poly) {
                Some(f) => f.exp += g.exp,
                None => factors.push(g.clone()),
            }
        }
        factors.retain(|f| f.exp != 0);
        FactoredRatFunc {
            constant: &self.constant * &other.constant,
            factors,
        }
    }

    /// f(x) at a rational point away from the zeros and poles.
    pub fn eval_rational(&self, x: &BigRational) -> Option<BigRational> {
        let mut acc = self.constant.clone();
        for fac in &self.factors {
            let v = fac
                .poly
                .iter()
                .rev()
                .fold(BigRational::zero(), |a, c| a * x + c);
            if v.is_zero() {
                return None;
            }
            acc *= if fac.exp >= 0 {
                v.pow(fac.exp as i32)
            } else {
                v.recip().pow((-fac.exp) as i32)
            };
        }
        Some(acc)
    }
}

impl FactoredDifferential {
    pub fn new(num: FactoredRatFunc) -> Result<Self> {
        num.validate()?;
        Ok(FactoredDifferential { num })
    }

    /// Support of div ω: the factor points and ∞.
    pub fn support(&self) -> Vec<ClosedPoint> {
        let mut pts: Vec<ClosedPoint> = self
            .num
            .factors
            .iter()
            .map(|f| ClosedPoint::Finite(f.poly.clone()))
            .collect();
        pts.push(ClosedPoint::Infinity);
        pts
    }

    /// f·ω.
    pub fn times(&self, f: &FactoredRatFunc) -> Self {
        FactoredDifferential {
            num: self.num.mul(f),
        }
    }
}

/// Order of ω at v; exact from the factorization.
pub fn ord_at(omega: &FactoredDifferential, v: &ClosedPoint) -> i64 {
    match v {
        ClosedPoint::Finite(poly) => omega.num.exponent_of(poly),
        ClosedPoint::Infinity => -omega.num.degree() - 2,
    }
}

/// Expansion of ω at v in k_v((t_v)), `terms` coefficients from t_v^ord on.
pub fn expand_at(
    omega: &FactoredDifferential,
    v: &ClosedPoint,
    p: u64,
    terms: usize,
    prec: i64,
) -> Result<LaurentExpansion> {
    match v {
        ClosedPoint::Finite(poly) => {
            expand_with_parameter(omega, poly, &[BigRational::one()], p, terms, prec)
        }
        ClosedPoint::Infinity => expand_at_infinity(omega, p, terms, prec),
    }
}

/// Expansion at the point P = 0 with local parameter t_v = P·U, where U(θ) ≠ 0.
pub fn expand_with_parameter(
    omega: &FactoredDifferential,
    poly: &[BigRational],
    unit: &[BigRational],
    p: u64,
    terms: usize,
    prec: i64,
) -> Result<LaurentExpansion> {
    omega.num.validate()?;
    let terms = terms.max(1);
    let (field, theta) = point_field(p, poly, prec)?;
    let ctx = |e: Error| e.context(&format!("expansion at ({})", poly_to_string(poly)));
    if eval_at(unit, &theta, prec).map_err(ctx)?.is_zero() {
        return Err(Error::Input("local parameter unit vanishes at the point".into()));
    }
    let big_f = poly_mul(poly, unit);
    let big_df = poly_deriv(&big_f);
    let n = terms + 1;

    // Newton iteration on F(t(s)) = s, doubling the number of correct terms
    let mut t = PowerSeries::constant(theta.clone(), 1);
    let mut k = 1;
    while k < n {
        k = (2 * k).min(n);
        let tk = t.pad(k);
        let s = PowerSeries::variable(&field, k, prec);
        let r = tk.eval_poly(&big_f, prec)?.sub(&s)?;
        let d = tk.eval_poly(&big_df, prec)?;
        t = tk.sub(&r.mul(&d.inv().map_err(ctx)?)?)?;
    }

    let e_p = omega.num.exponent_of(poly);
    let c = LocalFieldElement::from_rational(&field, &omega.num.constant, prec)?;
    let mut g = t.derivative()?.truncate(terms).scale(&c)?;
    let tt = t.truncate(terms);
    for fac in &omega.num.factors {
        if fac.poly == poly {
            continue;
        }
        let q = tt.eval_poly(&fac.poly, prec)?;
        g = g.mul(&q.pow(fac.exp).map_err(ctx)?)?;
    }
    if e_p != 0 && unit.len() > 1 {
        let u = tt.eval_poly(unit, prec)?;
        g = g.mul(&u.pow(-e_p).map_err(ctx)?)?;
    }
    let (lead, _) = g.leading().map_err(ctx)?;
    if lead != 0 {
        return Err(ctx(Error::Precision("leading coefficient lost".into())));
    }
    Ok(LaurentExpansion {
        point: ClosedPoint::Finite(poly.to_vec()),
        field,
        ord: e_p,
        coeffs: g.coeffs().to_vec(),
    })
}

/// s = 1/t: ω = −c·s^(−D−2)·∏ P̃_j(s)^e_j ds with P̃(s) = s^deg·P(1/s).
fn expand_at_infinity(
    omega: &FactoredDifferential,
    p: u64,
    terms: usize,
    prec: i64,
) -> Result<LaurentExpansion> {
    omega.num.validate()?;
    let field = LocalField::padic(p)?;
    let terms = terms.max(1);
    let c = LocalFieldElement::from_rational(&field, &-omega.num.constant.clone(), prec)?;
    let mut g = PowerSeries::constant(c, terms);
    for fac in &omega.num.factors {
        let rev: Vec<LocalFieldElement> = (0..terms)
            .map(|i| {
                let deg = fac.poly.len() - 1;
                if i <= deg {
                    LocalFieldElement::from_rational(&field, &fac.poly[deg - i], prec)
                } else {
                    Ok(LocalFieldElement::zero(&field))
                }
            })
            .collect::<Result<_>>()?;
        g = g.mul(&PowerSeries::new(&field, rev).pow(fac.exp)?)?;
    }
    Ok(LaurentExpansion {
        point: ClosedPoint::Infinity,
        field,
        ord: ord_at(omega, &ClosedPoint::Infinity),
        coeffs: g.coeffs().to_vec(),
    })
}

pub fn leading_coeff(
    omega: &FactoredDifferential,
    v: &ClosedPoint,
    p: u64,
    prec: i64,
) -> Result<LocalFieldElement> {
    Ok(expand_at(omega, v, p, 1, prec)?.coeffs[0].clone())
}

/// Tr_{k_v/ℚ_p} of the t_v^(−1) coefficient of f·ω.
pub fn residue_at(
    f: &FactoredRatFunc,
    omega: &FactoredDifferential,
    v: &ClosedPoint,
    p: u64,
    prec: i64,
) -> Result<LocalFieldElement> {
    let fw = omega.times(f);
    let ord = ord_at(&fw, v);
    if ord >= 0 {
        return Ok(LocalFieldElement::zero(&LocalField::padic(p)?));
    }
    let exp = expand_at(&fw, v, p, (-ord) as usize, prec)?;
    let r = &exp.coeffs[(-1 - ord) as usize];
    r.trace_to_base()
}

/// Σ_v Res_v(ω) over the support; zero by the residue theorem.
pub fn residue_sum(omega: &FactoredDifferential, p: u64, prec: i64) -> Result<LocalFieldElement> {
    let one = FactoredRatFunc {
        constant: BigRational::one(),
        factors: Vec::new(),
    };
    let mut acc = LocalFieldElement::zero(&LocalField::padic(p)?);
    for v in omega.support() {
        acc = acc.add(&residue_at(&one, omega, &v, p, prec)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    fn poly(c: &[i64]) -> Vec<BigRational> {
        c.iter().map(|&x| rat_int(x)).collect()
    }

    fn diff(constant: BigRational, factors: &[(&[i64], i64)]) -> FactoredDifferential {
        FactoredDifferential::new(
            FactoredRatFunc::new(
                constant,
                factors
                    .iter()
                    .map(|(p, e)| Factor {
                        poly: poly(p),
                        exp: *e,
                    })
                    .collect(),
            )
            .unwrap(),
        )
        .unwrap()
    }

    fn is_rat(x: &LocalFieldElement, r: BigRational) -> bool {
        let f = x.field().clone();
        x.eq_to_prec(&LocalFieldElement::from_rational(&f, &r, 30).unwrap())
            .unwrap()
    }

    #[test]
    fn simple_expansions() {
        let w = diff(rat_int(1), &[(&[0, 1], 1)]);
        let e = expand_at(&w, &ClosedPoint::Finite(poly(&[0, 1])), 5, 3, 20).unwrap();
        assert_eq!(e.ord, 1);
        assert!(is_rat(e.leading(), rat_int(1)));
        let e = expand_at(&w, &ClosedPoint::Infinity, 5, 3, 20).unwrap();
        assert_eq!(e.ord, -3);
        assert!(is_rat(e.leading(), rat_int(-1)));
        let w = diff(rat_int(1), &[(&[-1, 1], 2)]);
        let e = expand_at(&w, &ClosedPoint::Finite(poly(&[-1, 1])), 3, 2, 20).unwrap();
        assert_eq!((e.ord, is_rat(e.leading(), rat_int(1))), (2, true));
    }

    #[test]
    fn eisenstein_point() {
        let w = diff(rat_int(1), &[(&[-5, 0, 1], -1)]);
        let v = ClosedPoint::Finite(poly(&[-5, 0, 1]));
        let e = expand_at(&w, &v, 5, 3, 20).unwrap();
        assert_eq!(e.ord, -1);
        // oracle: c₀ = 1/(2θ) = θ/10
        let theta = LocalFieldElement::uniformizer(&e.field, 20).unwrap();
        let want = theta
            .mul(&LocalFieldElement::from_rational(&e.field, &rat(1, 10), 20).unwrap())
            .unwrap();
        assert!(e.leading().eq_to_prec(&want).unwrap());
        let inf = expand_at(&w, &ClosedPoint::Infinity, 5, 2, 20).unwrap();
        assert_eq!(inf.ord, 0);
        assert!(is_rat(inf.leading(), rat_int(-1)));
        let one = FactoredRatFunc::new(rat_int(1), vec![]).unwrap();
        assert!(residue_at(&one, &w, &v, 5, 20).unwrap().is_zero());
    }

    #[test]
    fn newton_parametrization_inverts_p() {
        // at v = (t² − 5), ω = t·dt: compare t(s)·t′(s) with 1/2 (d(t²) = ds)
        let w = diff(rat_int(1), &[(&[0, 1], 1)]);
        let v = ClosedPoint::Finite(poly(&[-5, 0, 1]));
        let e = expand_at(&w, &v, 5, 4, 24).unwrap();
        assert_eq!(e.ord, 0);
        assert!(is_rat(&e.coeffs[0], rat(1, 2)));
        for c in &e.coeffs[1..] {
            assert!(c.is_zero(), "{c}");
        }
    }

    #[test]
    fn residues() {
        let one = FactoredRatFunc::new(rat_int(1), vec![]).unwrap();
        let w = diff(rat_int(1), &[(&[0, 1], -1)]);
        let r0 = residue_at(&one, &w, &ClosedPoint::Finite(poly(&[0, 1])), 7, 20).unwrap();
        assert!(is_rat(&r0, rat_int(1)));
        let ri = residue_at(&one, &w, &ClosedPoint::Infinity, 7, 20).unwrap();
        assert!(is_rat(&ri, rat_int(-1)));
    }

    #[test]
    fn residue_theorem_mixed_points() {
        // over ℚ₃: t² + 1 is unramified, t² − 3 Eisenstein, t − 2 rational
        let w = diff(
            rat(2, 7),
            &[(&[1, 0, 1], -2), (&[-3, 0, 1], -1), (&[-2, 1], -3), (&[0, 1], 1)],
        );
        let s = residue_sum(&w, 3, 30).unwrap();
        assert!(s.is_zero(), "{s}");
    }

    #[test]
    fn residue_independent_of_parameter() {
        let one = FactoredRatFunc::new(rat_int(1), vec![]).unwrap();
        let w = diff(rat_int(3), &[(&[-1, 1], -2), (&[2, 0, 1], 1)]);
        let pt = poly(&[-1, 1]);
        let a = residue_at(&one, &w, &ClosedPoint::Finite(pt.clone()), 5, 20).unwrap();
        let alt = expand_with_parameter(&w, &pt, &poly(&[1, 1]), 5, 2, 20).unwrap();
        let b = alt.coeffs[1].trace_to_base().unwrap();
        assert!(a.eq_to_prec(&b).unwrap(), "{a} vs {b}");
        // oracle: ω = 3(t² + 2)/(t − 1)² dt has residue 3·d/dt(t² + 2)|₁ = 6
        assert!(is_rat(&a, rat_int(6)));
    }

    #[test]
    fn unsupported_points() {
        let w = diff(rat_int(1), &[(&[-6, 0, 1], 1)]);
        // t² − 6 ≡ (t − 1)(t + 1) mod 5
        assert!(matches!(
            expand_at(&w, &ClosedPoint::Finite(poly(&[-6, 0, 1])), 5, 1, 10),
            Err(Error::Unsupported(_))
        ));
        assert!(FactoredRatFunc::new(rat_int(1), vec![Factor { poly: poly(&[1, 2]), exp: 1 }]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"constant":"3/2","factors":[{"poly":[-5,0,1],"exp":-1}]}"#;
        let w: FactoredDifferential = serde_json::from_str(s).unwrap();
        assert_eq!(w.num.constant, rat(3, 2));
        let back: FactoredDifferential = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(w, back);
        assert!(serde_json::from_str::<FactoredDifferential>(r#"{"constant":1,"bogus":[]}"#).is_err());
    }
}
