//! Finite fields F_q = F_p[x]/(m(x)) with elements as coefficient vectors of length f.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fq {
    p: u64,
    /// monic modulus, low to high, length f + 1
    modulus: Vec<u64>,
}

pub type FqElem = Vec<u64>;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Polynomials over F_p, low to high, trimmed.
fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod_p(m[dm], p);
    while r.len() > dm {
        let c = mulmod(*r.last().unwrap(), lead_inv, p);
        let shift = r.len() - 1 - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mulmod(c, mi, p)) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
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

impl Fq {
    /// F_p itself.
    pub fn prime(p: u64) -> Self {
        Fq {
            p,
            modulus: vec![0, 1],
        }
    }

    /// F_p[x]/(m); m is reduced mod p, must be monic of degree ≥ 1 and irreducible.
    pub fn new(p: u64, modulus: &[i64]) -> Result<Self> {
        let mut m: Vec<u64> = modulus
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u64)
            .collect();
        trim(&mut m);
        if m.len() < 2 || *m.last().unwrap() != 1 {
            return Err(Error::Input(format!(
                "modulus {modulus:?} is not monic of positive degree mod {p}"
            )));
        }
        let f = Fq { p, modulus: m };
        if !f.modulus_irreducible() {
            return Err(Error::Input(format!("{modulus:?} is reducible mod {p}")));
        }
        Ok(f)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn order(&self) -> Option<u64> {
        self.p.checked_pow(self.degree() as u32)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FqElem {
        vec![0; self.degree()]
    }

    pub fn one(&self) -> FqElem {
        self.from_int(1)
    }

    pub fn from_int(&self, a: i64) -> FqElem {
        let mut v = self.zero();
        v[0] = a.rem_euclid(self.p as i64) as u64;
        v
    }

    /// Reduce an arbitrary F_p polynomial into the field.
    pub fn from_poly(&self, a: &[u64]) -> FqElem {
        let mut r = poly_rem(a, &self.modulus, self.p);
        r.resize(self.degree(), 0);
        r
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> FqElem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> FqElem {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> FqElem {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn scale(&self, a: &[u64], k: u64) -> FqElem {
        a.iter().map(|&x| mulmod(x, k, self.p)).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> FqElem {
        let f = self.degree();
        let mut prod = vec![0u64; 2 * f];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulmod(x, y, self.p)) % self.p;
            }
        }
        self.from_poly(&prod)
    }

    pub fn pow(&self, a: &[u64], mut e: u128) -> FqElem {
        let mut r = self.one();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    fn order_u128(&self) -> u128 {
        (self.p as u128).pow(self.degree() as u32)
    }

    pub fn inv(&self, a: &[u64]) -> Result<FqElem> {
        if self.is_zero(a) {
            return Err(Error::Domain("inverse of zero in residue field".into()));
        }
        Ok(self.pow(a, self.order_u128() - 2))
    }

    /// Tr_{F_q/F_p}(a) = Σ a^(p^k).
    pub fn trace(&self, a: &[u64]) -> u64 {
        let mut acc = a.to_vec();
        let mut cur = a.to_vec();
        for _ in 1..self.degree() {
            cur = self.pow(&cur, self.p as u128);
            acc = self.add(&acc, &cur);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0));
        acc[0]
    }

    /// Euler's criterion for odd p; in characteristic 2 every element is a square.
    pub fn is_square(&self, a: &[u64]) -> bool {
        if self.is_zero(a) || self.p == 2 {
            return true;
        }
        self.pow(a, (self.order_u128() - 1) / 2) == self.one()
    }

    /// x^(p^k) mod m as a polynomial.
    fn frobenius_power_of_x(&self, k: usize) -> FqElem {
        let mut x = self.from_poly(&[0, 1]);
        for _ in 0..k {
            x = self.pow(&x, self.p as u128);
        }
        x
    }

    /// Rabin's test: x^(p^f) ≡ x and gcd(x^(p^(f/r)) − x, m) = 1 for primes r | f.
    fn modulus_irreducible(&self) -> bool {
        let f = self.degree();
        if f == 1 {
            return true;
        }
        let x = self.from_poly(&[0, 1]);
        if self.frobenius_power_of_x(f) != x {
            return false;
        }
        for r in prime_divisors(f as u64) {
            let xp = self.frobenius_power_of_x(f / r as usize);
            let diff = self.sub(&xp, &x);
            let g = poly_gcd(&self.modulus, &diff, self.p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    /// All field elements, in base-p counting order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        let f = self.degree();
        let q = self.order().expect("field too large to enumerate");
        (0..q).map(move |mut k| {
            let mut v = vec![0u64; f];
            for c in v.iter_mut() {
                *c = k % self.p;
                k /= self.p;
            }
            v
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_arithmetic() {
        let f = Fq::new(3, &[1, 0, 1]).unwrap();
        assert_eq!(f.order(), Some(9));
        let x = vec![0, 1];
        assert_eq!(f.mul(&x, &x), f.from_int(-1));
        for a in f.elements().filter(|a| !f.is_zero(a)) {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        }
        // every element of F_3 is a square in F_9
        assert!(f.is_square(&f.from_int(2)));
        assert_eq!(f.elements().filter(|a| f.is_square(a)).count(), 5);
        assert_eq!(f.trace(&x), 0);
        assert_eq!(f.trace(&f.one()), 2);
    }

    #[test]
    fn irreducibility() {
        assert!(Fq::new(3, &[1, 0, 1]).is_ok());
        assert!(Fq::new(5, &[-2, 0, 1]).is_ok());
        // x² + 1 = (x + 2)(x + 3) mod 5
        assert!(Fq::new(5, &[1, 0, 1]).is_err());
        assert!(Fq::new(2, &[1, 1, 0, 1]).is_ok());
        assert!(Fq::new(2, &[1, 0, 0, 0, 1]).is_err());
    }

    #[test]
    fn prime_field_squares() {
        let f = Fq::prime(5);
        assert!(f.is_square(&f.from_int(4)));
        assert!(!f.is_square(&f.from_int(2)));
    }
}
