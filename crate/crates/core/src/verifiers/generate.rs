//! Seeded scenario generators. Every output satisfies the engine's
//! preconditions: non-degenerate data, supported point kinds, and quotients far
//! below the enumeration cap.

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::{rat, rat_int};
use crate::laurent::{Factor, FactoredDifferential, FactoredRatFunc, SurfaceDifferential};
use crate::local_fields::{AdditiveCharacter, CharacterSpec, ElementSpec, Fq, LocalField, LocalFieldElement};
use crate::weil::{diagonalize_symmetric, loop_diagonal, LaurentPoly, QuadraticCharDescriptor};

fn nonzero(rng: &mut impl Rng, lo: i64, hi: i64) -> i64 {
    loop {
        let x = rng.gen_range(lo..=hi);
        if x != 0 {
            return x;
        }
    }
}

/// Symmetric nonsingular n×n (n ≤ 3) with entries of height ≤ 50; about half
/// the entries off the diagonal are nonzero, and some entries are fractions.
pub fn random_global_form(rng: &mut impl Rng) -> Vec<Vec<BigRational>> {
    loop {
        let n = rng.gen_range(1..=3);
        let mut q = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let x = if i != j && rng.gen_bool(0.5) {
                    BigRational::zero()
                } else if rng.gen_bool(0.25) {
                    rat(nonzero(rng, -50, 50), rng.gen_range(1..=50))
                } else {
                    rat_int(nonzero(rng, -50, 50))
                };
                q[i][j] = x.clone();
                q[j][i] = x;
            }
        }
        if diagonalize_symmetric(&q).is_ok() {
            return q;
        }
    }
}

fn random_laurent(rng: &mut impl Rng) -> LaurentPoly {
    let low = rng.gen_range(-3..=3i64);
    let len = rng.gen_range(1..=(4 - low).min(3) as usize);
    let mut coeffs: Vec<BigRational> = (0..len).map(|_| rat_int(rng.gen_range(-9..=9))).collect();
    coeffs[0] = rat_int(nonzero(rng, -9, 9));
    LaurentPoly { low, coeffs }
}

/// Q(t) with n ≤ 2 and t-orders in [−3, 3], and ω = t^m·dt with m ∈ [−2, 2].
pub fn random_loop(rng: &mut impl Rng) -> (Vec<Vec<LaurentPoly>>, LaurentPoly) {
    loop {
        let n = rng.gen_range(1..=2);
        let zero = LaurentPoly::monomial(BigRational::zero(), 0);
        let mut q = vec![vec![zero; n]; n];
        for i in 0..n {
            for j in i..n {
                let x = random_laurent(rng);
                q[i][j] = x.clone();
                q[j][i] = x;
            }
        }
        if loop_diagonal(&q).is_ok() {
            let w = LaurentPoly::monomial(rat_int(1), rng.gen_range(-2..=2));
            return (q, w);
        }
    }
}

fn unramified_point(rng: &mut impl Rng, p: u64) -> Vec<i64> {
    loop {
        let b = rng.gen_range(0..p as i64);
        let c = rng.gen_range(0..p as i64);
        if Fq::new(p, &[c, b, 1]).is_ok() {
            let k = p as i64 * rng.gen_range(-1..=1);
            return vec![c + k, b, 1];
        }
    }
}

fn eisenstein_point(rng: &mut impl Rng, p: u64) -> Vec<i64> {
    let pi = p as i64;
    let c = pi * nonzero(rng, 1, pi - 1) * if rng.gen_bool(0.5) { 1 } else { -1 };
    if rng.gen_bool(0.3) {
        vec![c, pi * rng.gen_range(-1..=1), 0, 1]
    } else {
        vec![c, pi * rng.gen_range(-1..=1), 1]
    }
}

fn to_rat(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| rat_int(x)).collect()
}

fn exponent(rng: &mut impl Rng, max: i64) -> i64 {
    nonzero(rng, -max, max)
}

/// ω on ℙ¹ over ℚ_p whose support has a rational point, an unramified quadratic
/// point, an Eisenstein point and ∞.
pub fn random_curve(rng: &mut impl Rng, p: u64) -> FactoredDifferential {
    let pi = p as i64;
    let mut factors: Vec<Factor> = Vec::new();
    let mut push = |poly: Vec<BigRational>, e: i64| {
        if !factors.iter().any(|f| f.poly == poly) {
            factors.push(Factor { poly, exp: e });
        }
    };
    let rational = |rng: &mut dyn rand::RngCore| -> Vec<BigRational> {
        let a = match rng.gen_range(0..3) {
            0 => rat_int(rng.gen_range(-2 * pi..=2 * pi)),
            1 => rat_int(pi * rng.gen_range(-3..=3)),
            _ => rat(rng.gen_range(-9..=9), pi),
        };
        vec![-a, rat_int(1)]
    };
    push(rational(rng), exponent(rng, 3));
    push(to_rat(&unramified_point(rng, p)), exponent(rng, 3));
    push(to_rat(&eisenstein_point(rng, p)), exponent(rng, 3));
    for _ in 0..rng.gen_range(0..=2) {
        let poly = match rng.gen_range(0..3) {
            0 => rational(rng),
            1 => to_rat(&unramified_point(rng, p)),
            _ => to_rat(&eisenstein_point(rng, p)),
        };
        push(poly, exponent(rng, 3));
    }
    let k = rng.gen_range(-2..=2);
    let constant = rat(nonzero(rng, -9, 9), nonzero(rng, 1, 9)) * rat_int(pi).pow(k);
    FactoredDifferential::new(FactoredRatFunc::new(constant, factors).expect("valid factors"))
        .expect("valid differential")
}

/// p^a·u(t)·∏P_j^e_j·dt with linear and Eisenstein distinguished factors, and c_ψ ∈ {−1, 0, 1}.
pub fn random_surface(rng: &mut impl Rng, p: u64) -> (SurfaceDifferential, i64) {
    let pi = p as i64;
    let len = rng.gen_range(1..=3);
    let mut unit: Vec<BigRational> = (0..len).map(|_| rat_int(rng.gen_range(-5..=5))).collect();
    unit[0] = rat_int(nonzero(rng, 1, pi - 1) + pi * rng.gen_range(-1..=1));
    let mut ks: Vec<i64> = (0..3).collect();
    ks.shuffle(rng);
    let mut factors = vec![
        Factor { poly: to_rat(&[-pi * ks[0], 1]), exp: exponent(rng, 2) },
        Factor { poly: to_rat(&eisenstein_point(rng, p)), exp: exponent(rng, 2) },
    ];
    if rng.gen_bool(0.5) {
        factors.push(Factor { poly: to_rat(&[-pi * ks[1], 1]), exp: exponent(rng, 2) });
    }
    let omega = SurfaceDifferential {
        p_power: rng.gen_range(-2..=2),
        unit_series: unit,
        factors,
    };
    (omega, rng.gen_range(-1..=1))
}

/// A random h(x) = ψ(½·a·x²) over one of ℚ_p (p ≤ 7), small unramified and
/// Eisenstein extensions, or F_p((u)), with a shifted character.
pub fn random_local_config(rng: &mut impl Rng) -> QuadraticCharDescriptor {
    let (field, spec, a) = random_local_parts(rng);
    let psi = AdditiveCharacter::new(&field, spec.shift, spec.sign).expect("valid character");
    let a = a.to_element(&field, LOCAL_PREC).expect("valid coefficient");
    QuadraticCharDescriptor::new(a, psi).expect("nonzero coefficient")
}

const LOCAL_PREC: i64 = 24;

/// The data behind [`random_local_config`], in serializable form.
pub fn random_local_parts(rng: &mut impl Rng) -> (LocalField, CharacterSpec, ElementSpec) {
    let fields = [
        LocalField::padic(2),
        LocalField::padic(3),
        LocalField::padic(5),
        LocalField::padic(7),
        LocalField::unramified(2, &[1, 1, 1]),
        LocalField::unramified(3, &[1, 0, 1]),
        LocalField::eisenstein(2, &[-2, 0, 1]),
        LocalField::eisenstein(2, &[2, 2, 1]),
        LocalField::eisenstein(3, &[-3, 0, 1]),
        LocalField::eisenstein(5, &[5, 0, 1]),
        LocalField::eisenstein(3, &[3, 0, 0, 1]),
        LocalField::eqchar(3, None),
        LocalField::eqchar(5, None),
        LocalField::eqchar(3, Some(&[1, 0, 1])),
    ];
    let field = fields[rng.gen_range(0..fields.len())].clone().expect("valid field");
    let spec = CharacterSpec {
        shift: rng.gen_range(-2..=2),
        sign: if rng.gen_bool(0.5) { 1 } else { -1 },
    };
    loop {
        let a = if field.is_char_zero_adic() {
            let coords: Vec<BigRational> = (0..field.degree())
                .map(|_| rat_int(rng.gen_range(-20..=20)))
                .collect();
            match LocalFieldElement::from_coords(&field, &coords, LOCAL_PREC) {
                Ok(x) if !x.is_zero() => ElementSpec::Coords {
                    coords,
                    shift: rng.gen_range(-3..=3),
                },
                _ => continue,
            }
        } else {
            let fq = field.residue_field().expect("residue field");
            let digits: Vec<_> = (0..LOCAL_PREC)
                .map(|_| (0..fq.degree()).map(|_| rng.gen_range(0..field.p())).collect())
                .collect();
            let val = rng.gen_range(-3..=3);
            match LocalFieldElement::from_series(&field, val, digits.clone()) {
                Ok(x) if !x.is_zero() => ElementSpec::Series { val, digits },
                _ => continue,
            }
        };
        return (field, spec, a);
    }
}
