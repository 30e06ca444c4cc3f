//! Cyclotomic polynomials in sparse form and reduction modulo them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use std::ops::{AddAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_traits::Zero;

/// Φ_N as a sparse list of (exponent, coefficient) with the leading term last.
#[derive(Debug)]
pub(crate) struct SparsePhi {
    pub degree: usize,
    pub terms: Vec<(usize, i64)>,
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den monic (leading coefficient 1)
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; num.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd];
        q[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    q
}

/// Dense Φ_r for squarefree r via Φ_{mq}(x) = Φ_m(x^q) / Φ_m(x).
fn dense_squarefree(primes: &[usize]) -> Vec<i64> {
    let mut phi = vec![-1i64, 1];
    for &q in primes {
        let mut spread = vec![0i64; (phi.len() - 1) * q + 1];
        for (i, &c) in phi.iter().enumerate() {
            spread[i * q] = c;
        }
        phi = poly_div_exact(&spread, &phi);
    }
    phi
}

fn build(n: usize) -> SparsePhi {
    let primes = prime_divisors(n);
    let rad: usize = primes.iter().product();
    let stretch = n / rad;
    let dense = dense_squarefree(&primes);
    let terms: Vec<(usize, i64)> = dense
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i * stretch, c))
        .collect();
    SparsePhi {
        degree: (dense.len() - 1) * stretch,
        terms,
    }
}

pub(crate) fn phi(n: usize) -> Arc<SparsePhi> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SparsePhi>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = Arc::new(build(n));
    cache.lock().unwrap().insert(n, p.clone());
    p
}

#[cfg(test)]
fn euler_phi(n: usize) -> usize {
    phi(n).degree
}

/// Linear-time reduction when rad(N) is 1, 2, q or 2q for an odd prime q.
///
/// With s = N/rad(N), Φ_N(x) = Φ_rad(x^s), so each residue class of exponents
/// mod s reduces separately; Φ_2q(y) = Φ_q(−y) up to sign, and Φ_q(z) divides
/// z^q − 1 with all-ones coefficients.
fn reduce_folded<T>(coeffs: &[T]) -> Option<Vec<T>>
where
    T: Clone + Zero + Neg<Output = T> + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>,
{
    let n = coeffs.len();
    let primes = prime_divisors(n);
    let odd: Vec<usize> = primes.iter().copied().filter(|&q| q != 2).collect();
    if odd.len() > 1 {
        return None;
    }
    let m = odd.first().copied().unwrap_or(1);
    let even = primes.contains(&2);
    let rad = if even { 2 * m } else { m };
    let s = n / rad;
    let deg = if m == 1 { 1 } else { m - 1 };
    let mut out = vec![T::zero(); s * deg];
    let flip = |j: usize, x: T| if even && j % 2 == 1 { -x } else { x };
    for r in 0..s {
        let mut c: Vec<T> = (0..m).map(|j| flip(j, coeffs[r + j * s].clone())).collect();
        if even {
            for j in 0..m {
                let x = flip(j + m, coeffs[r + (j + m) * s].clone());
                c[j] += &x;
            }
        }
        if m > 1 {
            let top = c[m - 1].clone();
            for x in c.iter_mut().take(m - 1) {
                *x -= &top;
            }
        }
        for (j, x) in c.into_iter().take(deg).enumerate() {
            out[r + j * s] = flip(j, x);
        }
    }
    Some(out)
}

/// Reduce a length-N coefficient vector modulo Φ_N; returns φ(N) coefficients.
pub(crate) fn reduce_big(coeffs: &[BigInt]) -> Vec<BigInt> {
    if let Some(v) = reduce_folded(coeffs) {
        return v;
    }
    let n = coeffs.len();
    let ph = phi(n);
    let deg = ph.degree;
    let mut a = coeffs.to_vec();
    let lower = &ph.terms[..ph.terms.len() - 1];
    for i in (deg..n).rev() {
        if a[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut a[i]);
        let base = i - deg;
        for &(j, cj) in lower {
            a[base + j] -= &c * cj;
        }
    }
    a.truncate(deg);
    a
}

/// Same as [`reduce_big`] for machine-word coefficients.
pub(crate) fn reduce_i64(coeffs: &[i64]) -> Vec<i64> {
    if let Some(v) = reduce_folded(coeffs) {
        return v;
    }
    let n = coeffs.len();
    let ph = phi(n);
    let deg = ph.degree;
    let mut a = coeffs.to_vec();
    let lower = &ph.terms[..ph.terms.len() - 1];
    for i in (deg..n).rev() {
        let c = a[i];
        if c == 0 {
            continue;
        }
        a[i] = 0;
        let base = i - deg;
        for &(j, cj) in lower {
            a[base + j] -= c * cj;
        }
    }
    a.truncate(deg);
    a
}
