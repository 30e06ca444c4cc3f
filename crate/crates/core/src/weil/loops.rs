//! Two-stage reductions: loop spaces k((t)) with the residue pairing, and the
//! two-dimensional local fields attached to formal curves through (p, t).
//!
//! Stage 1 over k((t)): for h(x) = ψ(Res ½·b·x²·dt) with m = ord_t b, the lattice
//! t^d·k[[t]] has dual t^(−m−d)·k[[t]]. Even m gives a self-dual lattice; odd m
//! leaves the one-dimensional quotient t^d·k with d = (−m−1)/2, on which h is
//! ψ(½·b₀·x²) for the leading coefficient b₀.

use num_rational::BigRational;

use super::diag::diagonalize_symmetric;
use super::local::{weil_index, weil_index_rational, QuadraticCharDescriptor};
use super::ratfunc::{LaurentPoly, RatFunc};
use crate::error::{Error, Result};
use crate::laurent::{FormalCurve, SurfaceData};
use crate::local_fields::AdditiveCharacter;
use crate::{Limits, Mu8};

/// γ of x ↦ ψ(Res ½·a·x²·w·dt) on k((t)), k the field of ψ.
pub fn weil_index_loop(
    psi: &AdditiveCharacter,
    a: &RatFunc,
    w: &RatFunc,
    limits: &Limits,
) -> Result<Mu8> {
    let b = a.mul(w);
    let (Some(m), Some(b0)) = (b.ord(), b.leading()) else {
        return Err(Error::Degenerate("a(t)·w(t) is zero".into()));
    };
    loop_index(psi, m, &b0, limits)
}

fn loop_index(psi: &AdditiveCharacter, m: i64, b0: &BigRational, limits: &Limits) -> Result<Mu8> {
    if m.rem_euclid(2) == 0 {
        return Ok(Mu8::ONE);
    }
    weil_index_rational(psi, b0, limits)
}

/// Diagonal of a symmetric matrix over ℚ(t), pivoting on least t-order.
pub fn loop_diagonal(q: &[Vec<LaurentPoly>]) -> Result<Vec<RatFunc>> {
    let m: Vec<Vec<RatFunc>> = q
        .iter()
        .map(|row| row.iter().map(RatFunc::from_laurent).collect())
        .collect();
    Ok(diagonalize_symmetric(&m)?.diag)
}

/// γ of x ↦ ψ(Res ½·xᵀQx·w·dt) on k((t))ⁿ.
pub fn weil_index_loop_form(
    psi: &AdditiveCharacter,
    q: &[Vec<LaurentPoly>],
    w: &LaurentPoly,
    limits: &Limits,
) -> Result<Mu8> {
    let w = RatFunc::from_laurent(w);
    loop_diagonal(q)?
        .iter()
        .map(|d| weil_index_loop(psi, d, &w, limits))
        .product()
}

/// γ along a formal curve y through (p, t), for ψ on ℚ_p of conductor c_ψ.
///
/// Fiber y_p: parity of ord − c_ψ, then ψ_p(a) = ψ₀(−a_{−1}) on F_p((t)).
/// Curve P = 0: parity of ord, then ψ∘Tr on K_P.
pub fn weil_index_2dlocal(y: &SurfaceData, c_psi: i64, limits: &Limits) -> Result<Mu8> {
    let field = y.leading.field();
    let (parity, psi) = match &y.curve {
        FormalCurve::Fiber => (y.ord - c_psi, AdditiveCharacter::new(field, 0, -1)?),
        FormalCurve::Poly(_) => (y.ord, AdditiveCharacter::new(field, c_psi, 1)?),
    };
    if parity.rem_euclid(2) == 0 {
        return Ok(Mu8::ONE);
    }
    let h = QuadraticCharDescriptor::new(y.leading.clone(), psi)
        .map_err(|e| e.context(&y.curve.to_string()))?;
    weil_index(&h, limits).map_err(|e| e.context(&y.curve.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;
    use crate::laurent::{surface_data, Factor, SurfaceDifferential};
    use crate::local_fields::LocalField;

    fn lp(low: i64, c: &[i64]) -> LaurentPoly {
        LaurentPoly {
            low,
            coeffs: c.iter().map(|&x| rat_int(x)).collect(),
        }
    }

    fn rf(low: i64, c: &[i64]) -> RatFunc {
        RatFunc::from_laurent(&lp(low, c))
    }

    #[test]
    fn parity_rule() {
        let l = Limits::default();
        let q5 = AdditiveCharacter::standard(&LocalField::padic(5).unwrap());
        let r = AdditiveCharacter::standard(&LocalField::real());
        let one = rf(0, &[1]);
        assert!(weil_index_loop(&q5, &one, &rf(0, &[1]), &l).unwrap().is_one());
        assert!(weil_index_loop(&q5, &one, &rf(1, &[1]), &l).unwrap().is_one());
        assert_eq!(weil_index_loop(&r, &one, &rf(1, &[1]), &l).unwrap(), Mu8::new(7));
        let q2 = AdditiveCharacter::standard(&LocalField::padic(2).unwrap());
        assert_eq!(weil_index_loop(&q2, &one, &rf(1, &[1]), &l).unwrap(), Mu8::new(1));
        assert!(matches!(
            weil_index_loop(&q5, &rf(0, &[0]), &one, &l),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn loop_forms() {
        let l = Limits::default();
        for k in [
            LocalField::padic(5).unwrap(),
            LocalField::padic(2).unwrap(),
            LocalField::real(),
        ] {
            let psi = AdditiveCharacter::standard(&k);
            let z = lp(0, &[0]);
            let diag = vec![vec![lp(1, &[1]), z.clone()], vec![z.clone(), lp(-1, &[1])]];
            // two odd orders with leading coefficient 1: γ(½x²)², trivial only over ℚ₅
            let g = weil_index_rational(&psi, &rat_int(1), &l).unwrap();
            assert_eq!(weil_index_loop_form(&psi, &diag, &lp(0, &[1]), &l).unwrap(), g * g);
            let hyp = vec![vec![z.clone(), lp(0, &[1])], vec![lp(0, &[1]), z.clone()]];
            for m in -2..=2 {
                assert!(weil_index_loop_form(&psi, &hyp, &lp(m, &[1]), &l).unwrap().is_one());
            }
            let id = vec![vec![lp(0, &[1]), z.clone()], vec![z, lp(0, &[1])]];
            assert!(weil_index_loop_form(&psi, &id, &lp(0, &[1]), &l).unwrap().is_one());
        }
    }

    fn omega(a: i64, factors: &[(&[i64], i64)]) -> SurfaceDifferential {
        SurfaceDifferential {
            p_power: a,
            unit_series: vec![rat_int(1)],
            factors: factors
                .iter()
                .map(|(p, e)| Factor {
                    poly: p.iter().map(|&x| rat_int(x)).collect(),
                    exp: *e,
                })
                .collect(),
        }
    }

    /// Σ_{s mod p} exp(2πi·k·s²/p) rounded to μ₈, in floating point.
    fn gauss_oracle(p: u64, k: i64) -> Mu8 {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for s in 0..p as i64 {
            let t = 2.0 * std::f64::consts::PI * (k * s * s).rem_euclid(p as i64) as f64 / p as f64;
            re += t.cos();
            im += t.sin();
        }
        Mu8::new((im.atan2(re) / (std::f64::consts::PI / 4.0)).round() as i64)
    }

    #[test]
    fn surface_examples() {
        let l = Limits::default();
        let w = omega(0, &[]);
        let d = surface_data(5, &w, &FormalCurve::Fiber, 16).unwrap();
        assert!(weil_index_2dlocal(&d, 0, &l).unwrap().is_one());
        let w = omega(1, &[]);
        let d = surface_data(5, &w, &FormalCurve::Fiber, 16).unwrap();
        let g = weil_index_2dlocal(&d, 0, &l).unwrap();
        // c̄ = 1, m = 0, c = 0: self-dual in t, so trivial
        assert!(g.is_one());
        // ω = 5·(t − 5)·dt: both curves have odd order
        let w = omega(1, &[(&[-5, 1], 1)]);
        let fib = surface_data(5, &w, &FormalCurve::Fiber, 16).unwrap();
        let cur = surface_data(5, &w, &FormalCurve::Poly(vec![rat_int(-5), rat_int(1)]), 16).unwrap();
        let gf = weil_index_2dlocal(&fib, 0, &l).unwrap();
        let gc = weil_index_2dlocal(&cur, 0, &l).unwrap();
        // fiber: c̄ = t, quotient t⁻¹F₅[[t]]/F₅[[t]], h(s·t⁻¹) = ζ₅^(−½s²) = ζ₅^(2s²)
        assert_eq!(gf, gauss_oracle(5, 2));
        // curve: c₀ = 5 in ℚ₅, h(s/5) = ψ(s²/10) = ζ₅^(3s²)
        assert_eq!(gc, gauss_oracle(5, 3));
        assert!((gf * gc).is_one());
        // (t − 5) alone: unit coefficient over ℚ₅
        let w = omega(0, &[(&[-5, 1], 1)]);
        let cur = surface_data(5, &w, &FormalCurve::Poly(vec![rat_int(-5), rat_int(1)]), 16).unwrap();
        assert!(weil_index_2dlocal(&cur, 0, &l).unwrap().is_one());
    }
}
