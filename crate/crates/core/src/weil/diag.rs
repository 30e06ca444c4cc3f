//! Symmetric Gaussian elimination over any field of characteristic ≠ 2.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::local_fields::LocalFieldElement;

/// Scalars the elimination can pivot on.
pub trait PivotScalar: Clone {
    /// Zero to the known precision.
    fn is_zero(&self) -> bool;
    /// Known to be exactly zero.
    fn is_exact_zero(&self) -> bool;
    /// Preference for pivots: smaller is better.
    fn pivot_key(&self) -> i64;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn mul(&self, o: &Self) -> Result<Self>;
    fn div(&self, o: &Self) -> Result<Self>;
}

impl PivotScalar for BigRational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn pivot_key(&self) -> i64 {
        0
    }
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if Zero::is_zero(o) {
            return Err(Error::Degenerate("division by zero".into()));
        }
        Ok(self / o)
    }
}

impl PivotScalar for LocalFieldElement {
    fn is_zero(&self) -> bool {
        LocalFieldElement::is_zero(self)
    }
    fn is_exact_zero(&self) -> bool {
        LocalFieldElement::is_zero(self) && self.abs_prec().is_none()
    }
    fn pivot_key(&self) -> i64 {
        self.valuation().unwrap_or(0)
    }
    fn zero_like(&self) -> Self {
        LocalFieldElement::zero(self.field())
    }
    fn one_like(&self) -> Self {
        let r = self.rel_prec().unwrap_or(1).max(1);
        LocalFieldElement::one(self.field(), r)
    }
    fn add(&self, o: &Self) -> Result<Self> {
        LocalFieldElement::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        LocalFieldElement::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        LocalFieldElement::mul(self, o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        LocalFieldElement::div(self, o)
    }
}

/// Diagonal D and change of basis M with MᵀQM = diag(D).
#[derive(Clone, Debug)]
pub struct Diagonalization<T> {
    pub diag: Vec<T>,
    pub basis: Vec<Vec<T>>,
}

pub fn diagonalize_symmetric<T: PivotScalar>(q: &[Vec<T>]) -> Result<Diagonalization<T>> {
    let n = q.len();
    if n == 0 {
        return Ok(Diagonalization {
            diag: Vec::new(),
            basis: Vec::new(),
        });
    }
    if q.iter().any(|r| r.len() != n) {
        return Err(Error::Input("matrix is not square".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if !q[i][j].sub(&q[j][i])?.is_zero() {
                return Err(Error::Input(format!("matrix not symmetric at ({i},{j})")));
            }
        }
    }
    let zero = q[0][0].zero_like();
    let one = q[0][0].one_like();
    let mut a: Vec<Vec<T>> = q.to_vec();
    let mut m: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect())
        .collect();
    let mut diag = Vec::with_capacity(n);
    for s in 0..n {
        // pivot: nonzero diagonal entry of least key
        let mut piv = (s..n)
            .filter(|&i| !a[i][i].is_zero())
            .min_by_key(|&i| (a[i][i].pivot_key(), i));
        if piv.is_none() {
            let pair = (s..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by_key(|&(i, j)| (a[i][j].pivot_key(), i, j));
            match pair {
                Some((i, j)) => {
                    // x_i ← x_i + x_j
                    add_to(&mut a, &mut m, i, j)?;
                    if a[i][i].is_zero() {
                        return Err(Error::Precision(
                            "pivot vanishes to working precision after x_i ← x_i + x_j".into(),
                        ));
                    }
                    piv = Some(i);
                }
                None => {
                    let exact = (s..n).all(|i| (s..n).all(|j| a[i][j].is_exact_zero()));
                    return Err(if exact {
                        Error::Degenerate("symmetric matrix is singular".into())
                    } else {
                        Error::Precision("remaining block vanishes to working precision".into())
                    });
                }
            }
        }
        let p = piv.unwrap();
        swap(&mut a, &mut m, s, p);
        let pv = a[s][s].clone();
        for k in s + 1..n {
            if a[s][k].is_exact_zero() {
                continue;
            }
            let f = a[s][k].div(&pv)?;
            // x_k ← x_k − f·x_s
            for r in 0..n {
                let t = a[r][s].mul(&f)?;
                a[r][k] = a[r][k].sub(&t)?;
                let t = m[r][s].mul(&f)?;
                m[r][k] = m[r][k].sub(&t)?;
            }
            for c in 0..n {
                let t = a[s][c].mul(&f)?;
                a[k][c] = a[k][c].sub(&t)?;
            }
        }
        diag.push(pv);
    }
    Ok(Diagonalization { diag, basis: m })
}

fn swap<T: Clone>(a: &mut [Vec<T>], m: &mut [Vec<T>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

/// Basis change x_i ← x_i + x_j.
fn add_to<T: PivotScalar>(a: &mut [Vec<T>], m: &mut [Vec<T>], i: usize, j: usize) -> Result<()> {
    let n = a.len();
    for r in 0..n {
        a[r][i] = a[r][i].add(&a[r][j])?;
        m[r][i] = m[r][i].add(&m[r][j])?;
    }
    for c in 0..n {
        a[i][c] = a[i][c].add(&a[j][c])?;
    }
    Ok(())
}

/// MᵀQM, for checking a diagonalization.
pub fn congruent<T: PivotScalar>(q: &[Vec<T>], m: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = q.len();
    let zero = q[0][0].zero_like();
    let mut qm = vec![vec![zero.clone(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = zero.clone();
            for k in 0..n {
                s = s.add(&q[i][k].mul(&m[k][j])?)?;
            }
            qm[i][j] = s;
        }
    }
    let mut out = vec![vec![zero.clone(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = zero.clone();
            for k in 0..n {
                s = s.add(&m[k][i].mul(&qm[k][j])?)?;
            }
            out[i][j] = s;
        }
    }
    Ok(out)
}
