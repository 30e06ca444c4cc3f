//! γ(h) for h(x) = ψ(½·a·x²) on a local field, by reduction to a finite quotient
//! π^d·O / π^d′·O with d′ = c − m − d.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::diag::diagonalize_symmetric;
use crate::arith::{self, rat};
use crate::error::{Error, Result};
use crate::finite_quadratic::FiniteQuadraticChar;
use crate::local_fields::{AdditiveCharacter, FieldKind, LocalField, LocalFieldElement};
use crate::{Limits, Mu8};

/// h(x) = ψ(½·a·x²).
#[derive(Clone, Debug)]
pub struct QuadraticCharDescriptor {
    a: LocalFieldElement,
    psi: AdditiveCharacter,
}

/// Exponents d with U = π^d·O usable for the reduction, restricted to quotients
/// under a size cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeWindow {
    pub d_low: i64,
    pub d_high: i64,
}

impl LatticeWindow {
    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.d_low..=self.d_high
    }
}

/// Outcome of the reduction at the largest admissible d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalIndex {
    pub value: Mu8,
    pub d: i64,
    /// U⊥ρ⁻¹ = U, so no quotient was formed.
    pub self_dual: bool,
    pub quotient_orders: Vec<u64>,
}

impl QuadraticCharDescriptor {
    pub fn new(a: LocalFieldElement, psi: AdditiveCharacter) -> Result<Self> {
        if a.field() != psi.field() {
            return Err(Error::Input(format!(
                "coefficient in {} but character on {}",
                a.field(),
                psi.field()
            )));
        }
        if a.is_zero() {
            return Err(Error::Degenerate(match a.abs_prec() {
                Some(k) => format!("coefficient vanishes modulo π^{k}"),
                None => "coefficient is zero".into(),
            }));
        }
        if a.field().kind() == FieldKind::EqChar && a.field().p() == 2 {
            return Err(Error::Unsupported(
                "½·a·x² in characteristic 2".into(),
            ));
        }
        Ok(QuadraticCharDescriptor { a, psi })
    }

    pub fn from_rational(psi: &AdditiveCharacter, a: &BigRational, prec: i64) -> Result<Self> {
        let a = LocalFieldElement::from_rational(psi.field(), a, prec)?;
        Self::new(a, psi.clone())
    }

    pub fn field(&self) -> &LocalField {
        self.psi.field()
    }

    pub fn coefficient(&self) -> &LocalFieldElement {
        &self.a
    }

    pub fn character(&self) -> &AdditiveCharacter {
        &self.psi
    }

    fn nonarch(&self) -> Result<()> {
        if self.field().is_archimedean() {
            return Err(Error::Domain("lattice reduction needs a non-archimedean field".into()));
        }
        Ok(())
    }

    fn m(&self) -> i64 {
        self.a.valuation().expect("nonzero non-archimedean coefficient")
    }

    /// d′ with (π^d·O)⊥ρ⁻¹ = π^d′·O.
    pub fn dual_exponent(&self, d: i64) -> Result<i64> {
        self.nonarch()?;
        Ok(self.psi.conductor()? - self.m() - d)
    }

    fn work_prec(&self) -> i64 {
        self.a.rel_prec().unwrap_or(1) + self.field().e() + 2
    }

    fn half_a(&self) -> Result<LocalFieldElement> {
        let r = self.a.rel_prec().unwrap_or(1);
        let half = LocalFieldElement::from_rational(self.field(), &rat(1, 2), r + self.field().e())?;
        self.a.mul(&half)
    }

    /// Z_p- (or F_p-) generators of π^k·O, with the valuation of each and the
    /// number of them needed to span π^k·O / π^(k+len)·O.
    fn generators(&self, k: i64, len: i64) -> Result<Vec<(LocalFieldElement, u32)>> {
        let f = self.field();
        let prec = self.work_prec();
        let mut out = Vec::new();
        if f.kind() == FieldKind::EqChar {
            let fq = f.residue_field()?;
            let deg = fq.degree();
            for i in 0..len.max(0) {
                for j in 0..deg {
                    let mut digits = vec![fq.zero(); prec as usize];
                    digits[0][j] = 1;
                    out.push((LocalFieldElement::from_series(f, k + i, digits)?, 1));
                }
            }
            return Ok(out);
        }
        let n = f.degree();
        let e = f.e();
        for j in 0..n {
            let vj = if f.kind() == FieldKind::Eisenstein { j as i64 } else { 0 };
            let ord = (-(-(len - vj)).div_euclid(e)).max(0);
            let mut coords = vec![BigRational::zero(); n];
            coords[j] = BigRational::one();
            let beta = LocalFieldElement::from_coords(f, &coords, prec)?;
            out.push((beta.shift(k), ord as u32));
        }
        Ok(out)
    }

    /// h trivial on π^d′·O and d′ ≥ d.
    pub fn is_admissible(&self, d: i64) -> Result<bool> {
        let dp = self.dual_exponent(d)?;
        if dp < d {
            return Ok(false);
        }
        let c = self.psi.conductor()?;
        let half_a = self.half_a()?;
        // only generators g with v(½·a·g²) < c can be nontrivial
        let span = c - self.m() - 2 * dp + 2 * self.field().e() + 2;
        for (g, _) in self.generators(dp, span.max(1))? {
            let x = half_a.mul(&g)?.mul(&g)?;
            if !self.psi.char_exponent(&x)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest admissible d.
    pub fn d_high(&self) -> Result<i64> {
        let c = self.psi.conductor()?;
        let top = (c - self.m()).div_euclid(2);
        let steps = 2 * self.field().e() + 4;
        for d in (top - steps..=top).rev() {
            if self.is_admissible(d)? {
                return Ok(d);
            }
        }
        Err(Error::IllDefined(format!(
            "no admissible lattice within {steps} steps of π^{top}·O"
        )))
    }

    fn quotient_exponent(&self, d: i64) -> Result<u32> {
        let len = self.dual_exponent(d)? - d;
        let f = self.field();
        if f.kind() == FieldKind::EqChar {
            return Ok((len * f.f()) as u32);
        }
        Ok(self.generators(d, len)?.iter().map(|(_, k)| k).sum())
    }

    /// Admissible d from d_high down to the last one whose quotient has at most
    /// `size_cap` elements.
    pub fn window(&self, size_cap: u64) -> Result<LatticeWindow> {
        let d_high = self.d_high()?;
        let p = self.field().p() as u128;
        let mut d_low = d_high;
        loop {
            let k = self.quotient_exponent(d_low - 1)?;
            match p.checked_pow(k) {
                Some(s) if s <= size_cap as u128 => d_low -= 1,
                _ => break,
            }
        }
        Ok(LatticeWindow { d_low, d_high })
    }

    /// (π^d·O / π^d′·O, h̄) as a finite quadratic character.
    pub fn quotient(&self, d: i64, limits: &Limits) -> Result<FiniteQuadraticChar> {
        if !self.is_admissible(d)? {
            return Err(Error::Input(format!("π^{d}·O is not admissible for {self}")));
        }
        let dp = self.dual_exponent(d)?;
        let p = self.field().p();
        let size_exp = self.quotient_exponent(d)?;
        match (p as u128).checked_pow(size_exp) {
            Some(s) if s <= limits.enumeration_cap as u128 => {}
            _ => {
                return Err(Error::size(
                    format!("quotient π^{d}·O/π^{dp}·O"),
                    (p as u128).checked_pow(size_exp).unwrap_or(u128::MAX),
                    limits.enumeration_cap as u128,
                ))
            }
        }
        let gens: Vec<(LocalFieldElement, u64)> = self
            .generators(d, dp - d)?
            .into_iter()
            .filter(|(_, k)| *k > 0)
            .map(|(g, k)| (g, p.pow(k)))
            .collect();
        let half_a = self.half_a()?;
        let n = gens.len();
        let mut gram = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let x = gens[i].0.mul(&gens[j].0)?;
                let r = if i == j {
                    self.psi.char_exponent(&half_a.mul(&x)?)?
                } else {
                    self.psi.char_exponent(&self.a.mul(&x)?)? / arith::rat_int(2)
                };
                gram[i][j] = r.clone();
                gram[j][i] = r;
            }
        }
        FiniteQuadraticChar::new(gens.iter().map(|g| g.1).collect(), gram)
    }

    /// The finite-quotient route at a given admissible d, without the self-dual shortcut.
    pub fn weil_index_at(&self, d: i64, limits: &Limits) -> Result<Mu8> {
        let q = self.quotient(d, limits)?;
        if q.group().rank() == 0 {
            return Ok(Mu8::ONE);
        }
        q.weil_index_finite_with(limits)
    }

    pub fn reduce(&self, limits: &Limits) -> Result<LocalIndex> {
        self.nonarch()?;
        let d = self.d_high()?;
        if self.dual_exponent(d)? == d {
            return Ok(LocalIndex {
                value: Mu8::ONE,
                d,
                self_dual: true,
                quotient_orders: Vec::new(),
            });
        }
        let q = self.quotient(d, limits)?;
        Ok(LocalIndex {
            value: q.weil_index_finite_with(limits)?,
            d,
            self_dual: false,
            quotient_orders: q.group().orders().to_vec(),
        })
    }
}

impl std::fmt::Display for QuadraticCharDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x ↦ {}(½·({})·x²)", self.psi, self.a)
    }
}

/// γ of ψ(½·a·x²) on a non-archimedean field.
pub fn weil_index_local(h: &QuadraticCharDescriptor, limits: &Limits) -> Result<Mu8> {
    Ok(h.reduce(limits)?.value)
}

/// γ of x ↦ exp(−πi·a·x²) on ℝ (standard character), or of the analogous
/// character on ℂ.
pub fn weil_index_arch(place: &LocalField, a: &BigRational) -> Result<Mu8> {
    arch_with_sign(place, a, -1)
}

fn arch_with_sign(place: &LocalField, a: &BigRational, sign: i8) -> Result<Mu8> {
    if a.is_zero() {
        return Err(Error::Degenerate("coefficient is zero".into()));
    }
    match place.kind() {
        FieldKind::Real => Ok(Mu8::new(sign as i64 * arith::sign_of(a) as i64)),
        FieldKind::Complex => Ok(Mu8::ONE),
        _ => Err(Error::Domain(format!("{place} is not archimedean"))),
    }
}

/// γ(h) at any place.
pub fn weil_index(h: &QuadraticCharDescriptor, limits: &Limits) -> Result<Mu8> {
    let f = h.field();
    match f.kind() {
        FieldKind::Real => {
            let a = h.a.as_rational().expect("real value");
            arch_with_sign(f, a, h.psi.sign())
        }
        FieldKind::Complex => Ok(Mu8::ONE),
        _ => weil_index_local(h, limits),
    }
}

/// γ of ψ(½·a·x²) for rational a.
pub fn weil_index_rational(psi: &AdditiveCharacter, a: &BigRational, limits: &Limits) -> Result<Mu8> {
    let h = QuadraticCharDescriptor::from_rational(psi, a, limits.precision)?;
    weil_index(&h, limits)
}

/// γ of ψ(½·xᵀQx) for a rational symmetric Q.
pub fn weil_index_form(
    psi: &AdditiveCharacter,
    q: &[Vec<BigRational>],
    limits: &Limits,
) -> Result<Mu8> {
    let d = diagonalize_symmetric(q)?;
    d.diag
        .iter()
        .map(|a| weil_index_rational(psi, a, limits))
        .product()
}

/// γ of ψ(½·xᵀQx) for Q with entries in the field of ψ.
pub fn weil_index_form_local(
    psi: &AdditiveCharacter,
    q: &[Vec<LocalFieldElement>],
    limits: &Limits,
) -> Result<Mu8> {
    let d = diagonalize_symmetric(q)?;
    d.diag
        .into_iter()
        .map(|a| weil_index(&QuadraticCharDescriptor::new(a, psi.clone())?, limits))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    fn lim() -> Limits {
        Limits::default()
    }

    fn qp(p: u64) -> LocalField {
        LocalField::padic(p).unwrap()
    }

    fn idx(psi: &AdditiveCharacter, a: BigRational) -> Mu8 {
        weil_index_rational(psi, &a, &lim()).unwrap()
    }

    /// Σ_{x mod p} exp(2πi·k·x²/p) / √p by brute force in floating point.
    fn gauss_oracle(p: u64, k: i64) -> Mu8 {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for x in 0..p as i64 {
            let t = 2.0 * std::f64::consts::PI * ((k * x * x).rem_euclid(p as i64)) as f64 / p as f64;
            re += t.cos();
            im += t.sin();
        }
        let ang = im.atan2(re);
        Mu8::new((ang / (std::f64::consts::PI / 4.0)).round() as i64)
    }

    #[test]
    fn unit_coefficients_are_self_dual() {
        let psi = AdditiveCharacter::standard(&qp(5));
        let h = QuadraticCharDescriptor::from_rational(&psi, &rat_int(1), 20).unwrap();
        let r = h.reduce(&lim()).unwrap();
        assert!(r.self_dual);
        assert_eq!(r.value, Mu8::ONE);
    }

    #[test]
    fn q3_coefficient_three_matches_gauss_sum() {
        let psi = AdditiveCharacter::standard(&qp(3));
        let h = QuadraticCharDescriptor::from_rational(&psi, &rat_int(3), 20).unwrap();
        let r = h.reduce(&lim()).unwrap();
        assert_eq!(r.quotient_orders, vec![3]);
        // x = s/3: ψ(½·3·s²/9) = exp(2πi·2s²/3) since ½ ≡ 2 mod 3
        assert_eq!(r.value, gauss_oracle(3, 2));
    }

    #[test]
    fn dyadic_unit() {
        let psi = AdditiveCharacter::standard(&qp(2));
        let h = QuadraticCharDescriptor::from_rational(&psi, &rat_int(1), 20).unwrap();
        let r = h.reduce(&lim()).unwrap();
        assert_eq!(r.quotient_orders, vec![4]);
        // Σ_{k mod 4} ζ8^(k²) = 2ζ8
        assert_eq!(r.value, Mu8::new(1));
    }

    #[test]
    fn arch_values() {
        let r = LocalField::real();
        assert_eq!(weil_index_arch(&r, &rat_int(1)).unwrap(), Mu8::new(7));
        assert_eq!(weil_index_arch(&r, &rat_int(-1)).unwrap(), Mu8::new(1));
        assert_eq!(weil_index_arch(&LocalField::complex(), &rat_int(1)).unwrap(), Mu8::ONE);
        assert!(matches!(weil_index_arch(&r, &rat_int(0)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn q1_product_over_places() {
        let mut prod = weil_index_arch(&LocalField::real(), &rat_int(1)).unwrap();
        for p in [2, 3, 5, 7] {
            prod *= idx(&AdditiveCharacter::standard(&qp(p)), rat_int(1));
        }
        assert!(prod.is_one());
    }

    #[test]
    fn window_is_consistent() {
        for (p, a) in [(2u64, rat(3, 4)), (2, rat_int(6)), (3, rat_int(9)), (5, rat(2, 5)), (2, rat_int(5))] {
            for shift in [-1, 0, 2] {
                let psi = AdditiveCharacter::new(&qp(p), shift, 1).unwrap();
                let h = QuadraticCharDescriptor::from_rational(&psi, &a, 24).unwrap();
                let w = h.window(5000).unwrap();
                let want = weil_index_local(&h, &lim()).unwrap();
                for d in w.iter() {
                    if h.dual_exponent(d).unwrap() > d {
                        assert_eq!(h.weil_index_at(d, &lim()).unwrap(), want, "p={p} a={a} d={d}");
                    }
                }
                assert!(w.d_low < w.d_high);
                assert!(!h.is_admissible(w.d_high + 1).unwrap());
            }
        }
    }

    #[test]
    fn extensions() {
        let l = lim();
        let fields = [
            LocalField::unramified(3, &[1, 0, 1]).unwrap(),
            LocalField::eisenstein(5, &[-5, 0, 1]).unwrap(),
            LocalField::eisenstein(3, &[-3, 0, 0, 1]).unwrap(),
            LocalField::eisenstein(2, &[-2, 0, 1]).unwrap(),
            LocalField::unramified(2, &[1, 1, 1]).unwrap(),
            LocalField::eqchar(5, None).unwrap(),
            LocalField::eqchar(3, Some(&[1, 0, 1])).unwrap(),
        ];
        for f in &fields {
            for shift in [0, 1] {
                let psi = AdditiveCharacter::new(f, shift, 1).unwrap();
                for a in [rat_int(1), rat_int(f.p() as i64), rat_int(-1)] {
                    let h = match f.kind() {
                        FieldKind::EqChar => {
                            let u = LocalFieldElement::uniformizer(f, 16).unwrap();
                            let x = LocalFieldElement::from_rational(f, &a, 16)
                                .unwrap_or_else(|_| LocalFieldElement::one(f, 16));
                            let x = if x.is_zero() { u } else { x };
                            QuadraticCharDescriptor::new(x, psi.clone()).unwrap()
                        }
                        _ => QuadraticCharDescriptor::from_rational(&psi, &a, 16).unwrap(),
                    };
                    let w = h.window(3000).unwrap();
                    let want = weil_index_local(&h, &l).unwrap();
                    for d in w.iter() {
                        if h.dual_exponent(d).unwrap() > d {
                            assert_eq!(h.weil_index_at(d, &l).unwrap(), want, "{h} d={d}");
                        }
                    }
                    // conjugation
                    let hc = QuadraticCharDescriptor::new(h.coefficient().neg(), psi.clone()).unwrap();
                    assert!((want * weil_index_local(&hc, &l).unwrap()).is_one(), "{h}");
                }
            }
        }
    }

    #[test]
    fn multiplicativity_and_hyperbolic() {
        let l = lim();
        for p in [2u64, 3, 5] {
            let psi = AdditiveCharacter::standard(&qp(p));
            let a = rat(3, 2);
            let b = rat_int(10);
            let q = vec![vec![a.clone(), rat_int(0)], vec![rat_int(0), b.clone()]];
            assert_eq!(
                weil_index_form(&psi, &q, &l).unwrap(),
                idx(&psi, a) * idx(&psi, b)
            );
            let hyp = vec![vec![rat_int(0), rat_int(1)], vec![rat_int(1), rat_int(0)]];
            assert!(weil_index_form(&psi, &hyp, &l).unwrap().is_one());
        }
        let r = AdditiveCharacter::standard(&LocalField::real());
        let q = vec![vec![rat_int(1), rat_int(0)], vec![rat_int(0), rat_int(-1)]];
        assert!(weil_index_form(&r, &q, &l).unwrap().is_one());
    }

    #[test]
    fn unit_square_invariance() {
        for p in [2u64, 3, 7] {
            let psi = AdditiveCharacter::standard(&qp(p));
            for a in [rat_int(1), rat(5, 4), rat_int(p as i64 * 3)] {
                for u in [3i64, 5, 11, 13] {
                    if u as u64 % p == 0 {
                        continue;
                    }
                    let au = &a * rat_int(u * u);
                    assert_eq!(idx(&psi, a.clone()), idx(&psi, au));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let psi = AdditiveCharacter::standard(&qp(5));
        assert!(matches!(
            QuadraticCharDescriptor::from_rational(&psi, &rat_int(0), 10),
            Err(Error::Degenerate(_))
        ));
        let f2 = LocalField::eqchar(2, None).unwrap();
        let x = LocalFieldElement::one(&f2, 4);
        assert!(matches!(
            QuadraticCharDescriptor::new(x, AdditiveCharacter::standard(&f2)),
            Err(Error::Unsupported(_))
        ));
    }
}
