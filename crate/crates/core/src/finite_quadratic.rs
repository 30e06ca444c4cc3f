//! Quadratic characters h(x) = exp(2πi·xᵀGx) on finite abelian groups ∏ Z/d_i.
//!
//! The rational Gram matrix G is converted once into an integer form modulo the value
//! order N: h(x) = ζ_N^Q(x) with Q(x) = Σ q_ii x_i² + Σ_{i<j} q_ij x_i x_j, and the
//! bicharacter h(x+y)h(x)⁻¹h(y)⁻¹ = ζ_N^(xᵀBy). Everything else is enumeration with
//! incrementally updated exponents.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, rational_serde};
use crate::cyclotomic::{phi, recognize_scaled_mu8, CycInt, Mu8};
use crate::error::{Error, Result};
use crate::Limits;

/// ∏ Z/d_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.iter().any(|&d| d == 0) {
            return Err(Error::Input("cyclic orders must be positive".into()));
        }
        Ok(FiniteAbelianGroup { orders })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// |A|, or None if it overflows u128.
    pub fn size(&self) -> Option<u128> {
        self.orders
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
    }

    /// Mixed-radix index (first coordinate fastest) of a reduced element.
    pub fn index_of(&self, x: &[u64]) -> usize {
        let mut idx = 0usize;
        for (xi, &d) in x.iter().zip(&self.orders).rev() {
            idx = idx * d as usize + (*xi % d) as usize;
        }
        idx
    }

    pub fn element(&self, mut idx: usize) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&d| {
                let c = idx % d as usize;
                idx /= d as usize;
                c as u64
            })
            .collect()
    }
}

/// Serialized form: `{orders: [d_i], gram: [["num/den", ...], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Repr {
    orders: Vec<u64>,
    #[serde(
        serialize_with = "rational_serde::serialize_matrix",
        deserialize_with = "rational_serde::deserialize_matrix"
    )]
    gram: Vec<Vec<BigRational>>,
}

/// h(x) = exp(2πi·xᵀGx) on a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Repr", into = "Repr")]
pub struct FiniteQuadraticChar {
    group: FiniteAbelianGroup,
    gram: Vec<Vec<BigRational>>,
}

impl TryFrom<Repr> for FiniteQuadraticChar {
    type Error = Error;

    fn try_from(r: Repr) -> Result<Self> {
        FiniteQuadraticChar::new(r.orders, r.gram)
    }
}

impl From<FiniteQuadraticChar> for Repr {
    fn from(h: FiniteQuadraticChar) -> Repr {
        Repr {
            orders: h.group.orders,
            gram: h.gram,
        }
    }
}

/// Integer data of h modulo its value order.
#[derive(Clone, Debug)]
struct IntForm {
    n: u64,
    d: Vec<u64>,
    /// q_ii
    q: Vec<u64>,
    /// bicharacter matrix, b_ii = 2q_ii, b_ij = q_ij
    b: Vec<Vec<u64>>,
}

impl IntForm {
    fn value(&self, x: &[u64]) -> u64 {
        let n = self.n as u128;
        let mut v: u128 = 0;
        for i in 0..x.len() {
            v += self.q[i] as u128 * ((x[i] as u128 * x[i] as u128) % n);
            for j in i + 1..x.len() {
                v += self.b[i][j] as u128 * ((x[i] as u128 * x[j] as u128) % n);
            }
            v %= n;
        }
        v as u64
    }

    /// (Bx) mod N.
    fn bx(&self, x: &[u64]) -> Vec<u64> {
        let n = self.n as u128;
        (0..x.len())
            .map(|i| {
                let s: u128 = (0..x.len())
                    .map(|j| (self.b[i][j] as u128 * x[j] as u128) % n)
                    .sum();
                (s % n) as u64
            })
            .collect()
    }

    /// Walks the group in mixed-radix order, calling `f(index, Q(x))`.
    /// The last coordinate is fixed to `last` when given.
    fn walk(&self, last: Option<u64>, mut f: impl FnMut(u64)) {
        let r = self.d.len();
        let n = self.n;
        let free = if last.is_some() { r.saturating_sub(1) } else { r };
        let mut start = vec![0u64; r];
        if let (Some(t), true) = (last, r > 0) {
            start[r - 1] = t;
        }
        let mut val = self.value(&start);
        let mut bx = self.bx(&start);
        let mut x = vec![0u64; free];
        loop {
            f(val);
            let mut i = 0;
            loop {
                if i == free {
                    return;
                }
                val = (val + bx[i] + self.q[i]) % n;
                for (j, bxj) in bx.iter_mut().enumerate() {
                    *bxj = (*bxj + self.b[j][i]) % n;
                }
                x[i] += 1;
                if x[i] < self.d[i] {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
        }
    }
}

/// Outcome of the exact SL₂(Z) relation check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2Report {
    /// λ with (TS̃)³ = λ·S̃².
    pub scalar: CycInt,
    /// S̃⁴ = |A|²·Id
    pub pass4: bool,
    /// (TS̃)³ = λ·S̃²
    pub pass3: bool,
    /// False when the relations were tested on random vectors instead of full matrices.
    pub exhaustive: bool,
}

/// Budget on n³·N scalar operations for full matrix products.
const MATRIX_WORK_BUDGET: u128 = 1 << 33;
/// Budget on n²·N stored integers per matrix.
const MATRIX_MEMORY_BUDGET: u128 = 1 << 23;
const SPOT_CHECK_VECTORS: usize = 4;
const SPOT_CHECK_SEED: u64 = 0x5eed_0f_5_12;

impl FiniteQuadraticChar {
    /// Validate shape, symmetry and well-definedness on ∏ Z/d_i.
    pub fn new(orders: Vec<u64>, gram: Vec<Vec<BigRational>>) -> Result<Self> {
        let group = FiniteAbelianGroup::new(orders)?;
        let r = group.rank();
        if gram.len() != r || gram.iter().any(|row| row.len() != r) {
            return Err(Error::Input(format!("gram matrix must be {r}x{r}")));
        }
        for i in 0..r {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Input(format!("gram matrix not symmetric at ({i},{j})")));
                }
            }
        }
        let h = FiniteQuadraticChar { group, gram };
        h.check_well_defined()?;
        Ok(h)
    }

    /// Cyclic character x ↦ exp(2πi·g·x²) on Z/d.
    pub fn cyclic(d: u64, g: BigRational) -> Result<Self> {
        FiniteQuadraticChar::new(vec![d], vec![vec![g]])
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn gram(&self) -> &[Vec<BigRational>] {
        &self.gram
    }

    fn check_well_defined(&self) -> Result<()> {
        let d = &self.group.orders;
        for i in 0..d.len() {
            let di = BigRational::from_integer(BigInt::from(d[i]));
            if !(&di * &di * &self.gram[i][i]).is_integer() {
                return Err(Error::IllDefined(format!(
                    "d_{i}^2 * G_{i}{i} = {} is not an integer",
                    &di * &di * &self.gram[i][i]
                )));
            }
            for j in 0..d.len() {
                let v = &di * &self.gram[i][j] * BigInt::from(2);
                if !v.is_integer() {
                    return Err(Error::IllDefined(format!(
                        "2 d_{i} G_{i}{j} = {v} is not an integer"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Least N with every value of h in μ_N.
    pub fn value_order(&self) -> BigInt {
        let mut n = BigInt::one();
        let two = BigInt::from(2);
        for i in 0..self.gram.len() {
            n = n.lcm(self.gram[i][i].denom());
            for j in i + 1..self.gram.len() {
                n = n.lcm((&self.gram[i][j] * &two).denom());
            }
        }
        n
    }

    fn int_form(&self, limits: &Limits) -> Result<IntForm> {
        let nb = self.value_order();
        let n = nb
            .to_u64()
            .filter(|&n| n as u128 <= limits.order_cap as u128)
            .ok_or_else(|| {
                Error::size(
                    "value order",
                    nb.to_u128().unwrap_or(u128::MAX),
                    limits.order_cap as u128,
                )
            })?;
        let r = self.group.rank();
        let nr = BigRational::from_integer(BigInt::from(n));
        let m = BigInt::from(n);
        let reduce = |x: BigRational| -> u64 {
            debug_assert!(x.is_integer());
            arith::modp(&x.to_integer(), &m).to_u64().unwrap()
        };
        let q: Vec<u64> = (0..r).map(|i| reduce(&nr * &self.gram[i][i])).collect();
        let mut b = vec![vec![0u64; r]; r];
        for i in 0..r {
            for j in 0..r {
                b[i][j] = reduce(&nr * &self.gram[i][j] * BigInt::from(2));
            }
        }
        Ok(IntForm {
            n,
            d: self.group.orders.clone(),
            q,
            b,
        })
    }

    fn checked_size(&self, cap: u64, what: &str) -> Result<u64> {
        match self.group.size() {
            Some(s) if s <= cap as u128 => Ok(s as u64),
            Some(s) => Err(Error::size(what, s, cap as u128)),
            None => Err(Error::size(what, u128::MAX, cap as u128)),
        }
    }

    /// ρ: A → A* is an isomorphism, decided by a lattice-index computation.
    ///
    /// ker ρ = {y : By ≡ 0 mod N} / ⊕ d_i Z, so |ker ρ| = |A|·|coker [B | N·I]| / N^r.
    pub fn check_nondegenerate(&self) -> Result<bool> {
        self.check_nondegenerate_with(&Limits::default())
    }

    pub fn check_nondegenerate_with(&self, limits: &Limits) -> Result<bool> {
        let f = self.int_form(limits)?;
        let r = f.d.len();
        if r == 0 {
            return Ok(true);
        }
        let mut gens: Vec<Vec<BigInt>> = Vec::with_capacity(2 * r);
        for j in 0..r {
            gens.push((0..r).map(|i| BigInt::from(f.b[i][j])).collect());
        }
        for j in 0..r {
            let mut v = vec![BigInt::zero(); r];
            v[j] = BigInt::from(f.n);
            gens.push(v);
        }
        let coker = lattice_index(gens, r);
        let size: BigInt = f.d.iter().map(|&d| BigInt::from(d)).product();
        Ok(size * coker == BigInt::from(f.n).pow(r as u32))
    }

    /// Enumeration fallback: count y with xᵀBy ≡ 0 for all x.
    pub fn check_nondegenerate_enumerate(&self, limits: &Limits) -> Result<bool> {
        let f = self.int_form(limits)?;
        let size = self.checked_size(limits.enumeration_cap, "nondegeneracy enumeration")?;
        for idx in 1..size as usize {
            let y = self.group.element(idx);
            if f.bx(&y).iter().all(|&c| c == 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn value_counts(&self, f: &IntForm, size: u64) -> Vec<u64> {
        let n = f.n as usize;
        let r = f.d.len();
        if r == 0 {
            return vec![1];
        }
        let last = f.d[r - 1];
        if size < 1 << 15 || last == 1 {
            let mut counts = vec![0u64; n];
            f.walk(None, |v| counts[v as usize] += 1);
            return counts;
        }
        (0..last)
            .into_par_iter()
            .fold(
                || vec![0u64; n],
                |mut counts, t| {
                    f.walk(Some(t), |v| counts[v as usize] += 1);
                    counts
                },
            )
            .reduce(
                || vec![0u64; n],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    }

    /// Σ_{x∈A} h(x) in Z[ζ_N], N the value order.
    pub fn gauss_sum(&self) -> Result<CycInt> {
        self.gauss_sum_with(&Limits::default())
    }

    pub fn gauss_sum_with(&self, limits: &Limits) -> Result<CycInt> {
        let size = self.checked_size(limits.enumeration_cap, "gauss sum")?;
        let f = self.int_form(limits)?;
        Ok(CycInt::from_counts(&self.value_counts(&f, size)))
    }

    /// γ(h) ∈ μ₈ with Σ h = √|A|·γ(h).
    pub fn weil_index_finite(&self) -> Result<Mu8> {
        self.weil_index_finite_with(&Limits::default())
    }

    pub fn weil_index_finite_with(&self, limits: &Limits) -> Result<Mu8> {
        if !self.check_nondegenerate_with(limits)? {
            return Err(Error::Degenerate(format!(
                "bicharacter of G = {} on {:?} has a kernel",
                fmt_matrix(&self.gram),
                self.group.orders
            )));
        }
        let size = self.checked_size(limits.enumeration_cap, "gauss sum")?;
        let s = self.gauss_sum_with(limits)?;
        recognize_scaled_mu8(&s, size)
    }

    /// h̄ = h⁻¹.
    pub fn conj(&self) -> Self {
        FiniteQuadraticChar {
            group: self.group.clone(),
            gram: self
                .gram
                .iter()
                .map(|row| row.iter().map(|g| -g).collect())
                .collect(),
        }
    }

    /// Orthogonal sum on A₁ × A₂.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (r1, r2) = (self.group.rank(), other.group.rank());
        let mut gram = vec![vec![BigRational::zero(); r1 + r2]; r1 + r2];
        for i in 0..r1 {
            for j in 0..r1 {
                gram[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..r2 {
            for j in 0..r2 {
                gram[r1 + i][r1 + j] = other.gram[i][j].clone();
            }
        }
        let mut orders = self.group.orders.clone();
        orders.extend_from_slice(&other.group.orders);
        FiniteQuadraticChar {
            group: FiniteAbelianGroup { orders },
            gram,
        }
    }

    /// h∘α for an integer matrix α acting on column vectors; α must map A into A.
    pub fn pullback(&self, alpha: &[Vec<i64>]) -> Result<Self> {
        let r = self.group.rank();
        if alpha.len() != r || alpha.iter().any(|row| row.len() != r) {
            return Err(Error::Input(format!("change of basis must be {r}x{r}")));
        }
        let d = &self.group.orders;
        for j in 0..r {
            for i in 0..r {
                if (alpha[i][j] as i128 * d[j] as i128).rem_euclid(d[i] as i128) != 0 {
                    return Err(Error::Input(format!(
                        "change of basis does not respect the cyclic orders at ({i},{j})"
                    )));
                }
            }
        }
        let a = |i: usize, j: usize| BigRational::from_integer(BigInt::from(alpha[i][j]));
        let mut gram = vec![vec![BigRational::zero(); r]; r];
        for i in 0..r {
            for j in 0..r {
                let mut s = BigRational::zero();
                for k in 0..r {
                    for l in 0..r {
                        s += a(k, i) * &self.gram[k][l] * a(l, j);
                    }
                }
                gram[i][j] = s;
            }
        }
        FiniteQuadraticChar::new(d.clone(), gram)
    }

    /// For every z ∈ A*: F h(z)·h(ρ⁻¹z) = Σ h, with F h(z) = Σ_x h(x)·χ_z(x).
    ///
    /// A* is realised as ∏ Z/d_i with χ_z(x) = exp(2πi Σ x_i z_i / d_i).
    pub fn fourier_identity_check(&self) -> Result<bool> {
        self.fourier_identity_check_with(&Limits::default())
    }

    pub fn fourier_identity_check_with(&self, limits: &Limits) -> Result<bool> {
        let size = self.checked_size(limits.enumeration_cap, "fourier check")?;
        let work = size as u128 * size as u128;
        let work_cap = limits.enumeration_cap as u128 * 128;
        if work > work_cap {
            return Err(Error::size("fourier check |A|^2", work, work_cap));
        }
        let f = self.int_form(limits)?;
        let r = f.d.len();
        let m = f.d.iter().fold(f.n, |acc, &d| acc.lcm(&d));
        if m as u128 > limits.order_cap as u128 {
            return Err(Error::size("fourier order", m as u128, limits.order_cap as u128));
        }
        let n_sz = size as usize;
        // Q(x) for each x, in walk order (which is index order)
        let mut qtab = Vec::with_capacity(n_sz);
        f.walk(None, |v| qtab.push(v));
        // ρ⁻¹ as a table on indices of A*
        let mut rho_inv = vec![usize::MAX; n_sz];
        for idx in 0..n_sz {
            let y = self.group.element(idx);
            let by = f.bx(&y);
            let z: Vec<u64> = (0..r)
                .map(|i| {
                    let t = by[i] as u128 * f.d[i] as u128;
                    debug_assert_eq!(t % f.n as u128, 0);
                    ((t / f.n as u128) % f.d[i] as u128) as u64
                })
                .collect();
            let zi = self.group.index_of(&z);
            if rho_inv[zi] != usize::MAX {
                return Err(Error::Degenerate("ρ is not injective".into()));
            }
            rho_inv[zi] = idx;
        }
        let mn = m / f.n;
        let gauss = self.gauss_sum_with(limits)?.lift(m as usize)?.canonical();
        let gauss: Vec<i64> = gauss.iter().map(|c| c.to_i64().unwrap()).collect();
        let steps: Vec<u64> = f.d.iter().map(|&d| m / d).collect();
        let ok = (0..n_sz).into_par_iter().all(|zi| {
            let z = self.group.element(zi);
            let zstep: Vec<u64> = (0..r).map(|i| z[i] * steps[i] % m).collect();
            let shift = qtab[rho_inv[zi]] * mn;
            let mut counts = vec![0i64; m as usize];
            let mut lin = 0u64;
            let mut x = vec![0u64; r];
            for &qv in &qtab {
                counts[((qv * mn + lin + shift) % m) as usize] += 1;
                let mut i = 0;
                while i < r {
                    lin = (lin + zstep[i]) % m;
                    x[i] += 1;
                    if x[i] < f.d[i] {
                        break;
                    }
                    x[i] = 0;
                    i += 1;
                }
            }
            phi::reduce_i64(&counts) == gauss
        });
        Ok(ok)
    }

    /// Exact check of S̃⁴ = |A|²·Id and (TS̃)³ = λ·S̃² with T = diag(h(x)) and
    /// S̃[x][y] = ζ_N^(−xᵀBy).
    pub fn sl2_relation_check(&self) -> Result<Sl2Report> {
        self.sl2_relation_check_with(&Limits::default())
    }

    pub fn sl2_relation_check_with(&self, limits: &Limits) -> Result<Sl2Report> {
        if !self.check_nondegenerate_with(limits)? {
            return Err(Error::Degenerate("sl2 relations need a non-degenerate h".into()));
        }
        let f = self.int_form(limits)?;
        let size = self.group.size().unwrap_or(u128::MAX);
        let nn = f.n as u128;
        let full = size <= limits.matrix_cap as u128
            && size * size * size * nn <= MATRIX_WORK_BUDGET
            && size * size * nn <= MATRIX_MEMORY_BUDGET;
        if full {
            return Ok(Sl2Matrices::new(self, &f).check());
        }
        let vec_cap = (limits.matrix_cap as u128 * 4).max(2048);
        if size > vec_cap || size * size * nn > MATRIX_WORK_BUDGET {
            return Err(Error::size("sl2 relation check", size, vec_cap));
        }
        Ok(Sl2Matrices::new(self, &f).spot_check())
    }
}

/// Index of the full-rank lattice spanned by `gens` in Z^r (echelon form over Z).
fn lattice_index(mut gens: Vec<Vec<BigInt>>, r: usize) -> BigInt {
    let mut index = BigInt::one();
    for col in 0..r {
        // gcd-combine all generators on coordinate `col`
        loop {
            let nonzero: Vec<usize> = (0..gens.len()).filter(|&k| !gens[k][col].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let piv = *nonzero
                .iter()
                .min_by(|&&a, &&b| gens[a][col].abs().cmp(&gens[b][col].abs()))
                .unwrap();
            let pv = gens[piv].clone();
            for &k in &nonzero {
                if k == piv {
                    continue;
                }
                let q = gens[k][col].div_floor(&pv[col]);
                for c in col..r {
                    let t = &q * &pv[c];
                    gens[k][c] -= t;
                }
            }
        }
        match (0..gens.len()).find(|&k| !gens[k][col].is_zero()) {
            Some(k) => {
                let v = gens.swap_remove(k);
                index *= v[col].abs();
            }
            None => return BigInt::zero(),
        }
    }
    index
}

fn fmt_matrix(m: &[Vec<BigRational>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(arith::format_rational).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// Dense n×n matrices over Z[x]/(x^N − 1) with i64 coefficients.
struct Sl2Matrices {
    n: usize,
    modn: u64,
    qtab: Vec<u64>,
    /// −xᵀBy mod N
    stab: Vec<u64>,
}

type Mat = Vec<i64>;

impl Sl2Matrices {
    fn new(h: &FiniteQuadraticChar, f: &IntForm) -> Self {
        let n = h.group.size().unwrap() as usize;
        let modn = f.n;
        let mut qtab = Vec::with_capacity(n);
        f.walk(None, |v| qtab.push(v));
        let mut stab = vec![0u64; n * n];
        for x in 0..n {
            let bx = f.bx(&h.group.element(x));
            for y in 0..n {
                let ey = h.group.element(y);
                let s: u128 = bx
                    .iter()
                    .zip(&ey)
                    .map(|(&a, &b)| a as u128 * b as u128)
                    .sum::<u128>()
                    % modn as u128;
                stab[x * n + y] = (modn - s as u64) % modn;
            }
        }
        Sl2Matrices {
            n,
            modn,
            qtab,
            stab,
        }
    }

    fn s(&self, x: usize, y: usize) -> u64 {
        self.stab[x * self.n + y]
    }

    /// exponent of (T S̃)[x][y]
    fn m(&self, x: usize, y: usize) -> u64 {
        (self.qtab[x] + self.s(x, y)) % self.modn
    }

    /// Product of two monomial matrices given by exponent functions.
    fn mono_mono(&self, a: impl Fn(usize, usize) -> u64 + Sync, b: impl Fn(usize, usize) -> u64 + Sync) -> Mat {
        let (n, w) = (self.n, self.modn as usize);
        let mut out = vec![0i64; n * n * w];
        out.par_chunks_mut(n * w).enumerate().for_each(|(x, row)| {
            for z in 0..n {
                let cell = &mut row[z * w..(z + 1) * w];
                for y in 0..n {
                    cell[((a(x, y) + b(y, z)) % self.modn) as usize] += 1;
                }
            }
        });
        out
    }

    /// General matrix times monomial matrix.
    fn gen_mono(&self, a: &Mat, b: impl Fn(usize, usize) -> u64 + Sync) -> Mat {
        let (n, w) = (self.n, self.modn as usize);
        let mut out = vec![0i64; n * n * w];
        out.par_chunks_mut(n * w).enumerate().for_each(|(x, row)| {
            for z in 0..n {
                let cell = &mut row[z * w..(z + 1) * w];
                for y in 0..n {
                    let src = &a[(x * n + y) * w..(x * n + y + 1) * w];
                    let e = b(y, z) as usize;
                    // cell[(k + e) % w] += src[k]
                    let (head, tail) = src.split_at(w - e);
                    for (c, s) in cell[e..].iter_mut().zip(head) {
                        *c += s;
                    }
                    for (c, s) in cell[..e].iter_mut().zip(tail) {
                        *c += s;
                    }
                }
            }
        });
        out
    }

    fn entry<'m>(&self, a: &'m Mat, x: usize, y: usize) -> &'m [i64] {
        let w = self.modn as usize;
        &a[(x * self.n + y) * w..(x * self.n + y + 1) * w]
    }

    fn check(&self) -> Sl2Report {
        let n = self.n;
        let w = self.modn as usize;
        let size = n as i64;
        let s2 = self.mono_mono(|x, y| self.s(x, y), |x, y| self.s(x, y));
        let s3 = self.gen_mono(&s2, |x, y| self.s(x, y));
        let s4 = self.gen_mono(&s3, |x, y| self.s(x, y));
        drop(s3);
        let pass4 = (0..n).into_par_iter().all(|x| {
            (0..n).all(|y| {
                let red = phi::reduce_i64(self.entry(&s4, x, y));
                let expect = if x == y { size * size } else { 0 };
                red.iter().enumerate().all(|(k, &c)| c == if k == 0 { expect } else { 0 })
            })
        });
        drop(s4);
        let m2 = self.mono_mono(|x, y| self.m(x, y), |x, y| self.m(x, y));
        let m3 = self.gen_mono(&m2, |x, y| self.m(x, y));
        drop(m2);
        let lam = phi::reduce_i64(self.entry(&m3, 0, 0));
        let lam_ok = lam.iter().all(|c| c % size == 0);
        let lam: Vec<i64> = lam.iter().map(|c| c / size).collect();
        let pass3 = lam_ok
            && (0..n).into_par_iter().all(|x| {
                (0..n).all(|y| {
                    let lhs = phi::reduce_i64(self.entry(&m3, x, y));
                    let rhs = phi::reduce_i64(&mul_dense(&lam_padded(&lam, w), self.entry(&s2, x, y)));
                    lhs == rhs
                })
            });
        Sl2Report {
            scalar: scalar_of(&lam, w),
            pass4,
            pass3,
            exhaustive: true,
        }
    }

    /// Apply a monomial operator with exponents e(x, y) to a vector over Z[x]/(x^N−1).
    fn apply(&self, e: impl Fn(usize, usize) -> u64 + Sync, v: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let w = self.modn as usize;
        (0..self.n)
            .into_par_iter()
            .map(|x| {
                let mut cell = vec![0i64; w];
                for (y, src) in v.iter().enumerate() {
                    let e = e(x, y) as usize;
                    for (k, &s) in src.iter().enumerate() {
                        if s != 0 {
                            cell[(k + e) % w] += s;
                        }
                    }
                }
                cell
            })
            .collect()
    }

    fn spot_check(&self) -> Sl2Report {
        let n = self.n;
        let w = self.modn as usize;
        let size = n as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(SPOT_CHECK_SEED);
        let mut vectors: Vec<Vec<Vec<i64>>> = Vec::new();
        let mut e0 = vec![vec![0i64; w]; n];
        e0[0][0] = 1;
        vectors.push(e0);
        for _ in 0..SPOT_CHECK_VECTORS {
            vectors.push(
                (0..n)
                    .map(|_| {
                        let mut c = vec![0i64; w];
                        c[0] = rng.gen_range(-3..=3);
                        c
                    })
                    .collect(),
            );
        }
        let s = |x: usize, y: usize| self.s(x, y);
        let m = |x: usize, y: usize| self.m(x, y);
        let mut lam: Option<Vec<i64>> = None;
        let mut pass3 = true;
        let mut pass4 = true;
        for v in &vectors {
            let s2 = self.apply(s, &self.apply(s, v));
            let s4 = self.apply(s, &self.apply(s, &s2));
            for (a, b) in s4.iter().zip(v) {
                let lhs = phi::reduce_i64(a);
                let rhs = phi::reduce_i64(&b.iter().map(|c| c * size * size).collect::<Vec<_>>());
                pass4 &= lhs == rhs;
            }
            let m3 = self.apply(m, &self.apply(m, &self.apply(m, v)));
            let l = match &lam {
                Some(l) => l.clone(),
                None => {
                    // v = e_0: (TS̃)³e_0 at 0 equals λ·S̃²[0][0] = λ·|A|
                    let red = phi::reduce_i64(&m3[0]);
                    if red.iter().any(|c| c % size != 0) {
                        pass3 = false;
                    }
                    let l: Vec<i64> = red.iter().map(|c| c / size).collect();
                    lam = Some(l.clone());
                    l
                }
            };
            let lp = lam_padded(&l, w);
            for (a, b) in m3.iter().zip(&s2) {
                pass3 &= phi::reduce_i64(a) == phi::reduce_i64(&mul_dense(&lp, b));
            }
        }
        Sl2Report {
            scalar: scalar_of(&lam.unwrap_or_default(), w),
            pass4,
            pass3,
            exhaustive: false,
        }
    }
}

fn lam_padded(lam: &[i64], w: usize) -> Vec<i64> {
    let mut v = lam.to_vec();
    v.resize(w, 0);
    v
}

fn mul_dense(a: &[i64], b: &[i64]) -> Vec<i64> {
    let w = a.len();
    let mut out = vec![0i64; w];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[(i + j) % w] += x * y;
            }
        }
    }
    out
}

fn scalar_of(lam: &[i64], w: usize) -> CycInt {
    let mut coeffs: Vec<BigInt> = lam.iter().map(|&c| BigInt::from(c)).collect();
    coeffs.resize(w, BigInt::zero());
    CycInt::from_coeffs(w, coeffs).expect("length matches order")
}

/// Seeded non-degenerate characters on ∏ Z/p^k_i with |A| ≤ `max_size`.
pub fn random_nondegenerate(rng: &mut impl Rng, primes: &[u64], max_size: u64) -> FiniteQuadraticChar {
    loop {
        let p = primes[rng.gen_range(0..primes.len())];
        let mut orders = Vec::new();
        let mut size = 1u64;
        let rank = rng.gen_range(1..=3);
        for _ in 0..rank {
            let mut options = Vec::new();
            let mut d = p;
            while size * d <= max_size {
                options.push(d);
                d *= p;
            }
            if options.is_empty() {
                break;
            }
            let d = options[rng.gen_range(0..options.len())];
            orders.push(d);
            size *= d;
        }
        let r = orders.len();
        let mut gram = vec![vec![BigRational::zero(); r]; r];
        for i in 0..r {
            let den_ii = if p == 2 { 2 * orders[i] } else { orders[i] };
            gram[i][i] = arith::rat(rng.gen_range(0..den_ii as i64), den_ii as i64);
            for j in i + 1..r {
                let den = 2 * orders[i].min(orders[j]) as i64;
                let g = arith::rat(rng.gen_range(0..den), den);
                gram[i][j] = g.clone();
                gram[j][i] = g;
            }
        }
        let h = FiniteQuadraticChar::new(orders, gram).expect("generator respects well-definedness");
        if h.check_nondegenerate().unwrap_or(false) {
            return h;
        }
    }
}

/// Seeded RNG used by generators throughout the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn cyc(order: usize, c: &[i64]) -> CycInt {
        let mut v: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        v.resize(order, BigInt::zero());
        CycInt::from_coeffs(order, v).unwrap()
    }

    fn h1(d: u64, n: i64, den: i64) -> FiniteQuadraticChar {
        FiniteQuadraticChar::cyclic(d, rat(n, den)).unwrap()
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(h1(3, 1, 3).check_nondegenerate().unwrap());
        assert!(!h1(3, 0, 1).check_nondegenerate().unwrap());
        // exp(2πi·xᵀGx) with off-diagonal 1/2 is identically 1 on (Z/2)²
        let g = vec![vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]];
        let hyp = FiniteQuadraticChar::new(vec![2, 2], g).unwrap();
        assert!(!hyp.check_nondegenerate().unwrap());
        let g = vec![vec![rat(0, 1), rat(1, 4)], vec![rat(1, 4), rat(0, 1)]];
        let hyp = FiniteQuadraticChar::new(vec![2, 2], g).unwrap();
        assert!(hyp.check_nondegenerate().unwrap());
    }

    #[test]
    fn ill_defined_is_rejected() {
        // x ↦ exp(2πi x²/5) is not a function on Z/3
        assert!(matches!(
            FiniteQuadraticChar::cyclic(3, rat(1, 5)),
            Err(Error::IllDefined(_))
        ));
        // on Z/2, G = 1/8: 2·2·(1/8) is not an integer
        assert!(matches!(
            FiniteQuadraticChar::cyclic(2, rat(1, 8)),
            Err(Error::IllDefined(_))
        ));
    }

    #[test]
    fn gauss_sum_examples() {
        assert_eq!(h1(3, 1, 3).gauss_sum().unwrap(), cyc(3, &[1, 2]));
        assert_eq!(h1(5, 1, 5).gauss_sum().unwrap(), cyc(5, &[1, 2, 0, 0, 2]));
        let triv = FiniteQuadraticChar::new(vec![], vec![]).unwrap();
        assert_eq!(triv.gauss_sum().unwrap(), CycInt::one(1));
        assert_eq!(triv.weil_index_finite().unwrap(), Mu8::ONE);
    }

    #[test]
    fn weil_index_examples() {
        assert_eq!(h1(3, 1, 3).weil_index_finite().unwrap(), Mu8::new(2));
        assert_eq!(h1(5, 1, 5).weil_index_finite().unwrap(), Mu8::new(0));
        let g = vec![vec![rat(1, 3), rat(0, 1)], vec![rat(0, 1), rat(-1, 3)]];
        let h = FiniteQuadraticChar::new(vec![3, 3], g).unwrap();
        assert_eq!(h.weil_index_finite().unwrap(), Mu8::ONE);
        assert!(matches!(h1(3, 0, 1).weil_index_finite(), Err(Error::Degenerate(_))));
        // i^{x²} on Z/2: 1 + i = √2·ζ8
        assert_eq!(h1(2, 1, 4).weil_index_finite().unwrap(), Mu8::new(1));
    }

    #[test]
    fn fourier_examples() {
        assert!(h1(3, 1, 3).fourier_identity_check().unwrap());
        assert!(h1(5, 2, 5).fourier_identity_check().unwrap());
        let g = vec![vec![rat(0, 1), rat(1, 4)], vec![rat(1, 4), rat(0, 1)]];
        let hyp = FiniteQuadraticChar::new(vec![2, 2], g).unwrap();
        assert!(hyp.fourier_identity_check().unwrap());
        let g = vec![vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]];
        let deg = FiniteQuadraticChar::new(vec![2, 2], g).unwrap();
        assert!(matches!(deg.fourier_identity_check(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sl2_examples() {
        let r = h1(3, 1, 3).sl2_relation_check().unwrap();
        assert_eq!((r.scalar, r.pass4, r.pass3), (cyc(3, &[1, 2]), true, true));
        let r = h1(2, 1, 4).sl2_relation_check().unwrap();
        assert_eq!((r.scalar, r.pass4, r.pass3), (cyc(4, &[1, 1]), true, true));
        let triv = FiniteQuadraticChar::new(vec![], vec![]).unwrap();
        let r = triv.sl2_relation_check().unwrap();
        assert_eq!((r.scalar, r.pass4, r.pass3), (CycInt::one(1), true, true));
    }

    #[test]
    fn sl2_scalar_is_gauss_sum_on_small_groups() {
        let mut rng = seeded_rng(11);
        for _ in 0..40 {
            let h = random_nondegenerate(&mut rng, &[2, 3], 9);
            let r = h.sl2_relation_check().unwrap();
            assert!(r.pass3 && r.pass4, "{h:?}");
            assert_eq!(r.scalar, h.gauss_sum().unwrap(), "{h:?}");
        }
    }

    #[test]
    fn sl2_spot_check_agrees_with_full() {
        let mut rng = seeded_rng(5);
        for _ in 0..5 {
            let h = random_nondegenerate(&mut rng, &[3, 5], 30);
            let f = h.int_form(&Limits::default()).unwrap();
            let full = Sl2Matrices::new(&h, &f).check();
            let spot = Sl2Matrices::new(&h, &f).spot_check();
            assert_eq!(full.scalar, spot.scalar);
            assert!(spot.pass3 && spot.pass4 && !spot.exhaustive);
        }
    }

    #[test]
    fn structural_and_enumerated_nondegeneracy_agree() {
        let mut rng = seeded_rng(3);
        for _ in 0..300 {
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let orders: Vec<u64> = (0..rng.gen_range(1..=3)).map(|_| p.pow(rng.gen_range(0..=2))).collect();
            let r = orders.len();
            let mut gram = vec![vec![BigRational::zero(); r]; r];
            for i in 0..r {
                let den = 2 * orders[i] as i64;
                gram[i][i] = rat(rng.gen_range(0..den), den);
                for j in i + 1..r {
                    let den = 2 * orders[i].min(orders[j]) as i64;
                    let g = rat(rng.gen_range(0..den), den);
                    gram[i][j] = g.clone();
                    gram[j][i] = g;
                }
            }
            let Ok(h) = FiniteQuadraticChar::new(orders, gram) else { continue };
            let lim = Limits::default();
            assert_eq!(
                h.check_nondegenerate_with(&lim).unwrap(),
                h.check_nondegenerate_enumerate(&lim).unwrap(),
                "{h:?}"
            );
        }
    }

    #[test]
    fn caps_are_enforced() {
        let lim = Limits {
            enumeration_cap: 10,
            ..Limits::default()
        };
        assert!(matches!(h1(11, 1, 11).gauss_sum_with(&lim), Err(Error::Size { .. })));
        let lim = Limits {
            order_cap: 4,
            ..Limits::default()
        };
        assert!(matches!(h1(5, 1, 5).gauss_sum_with(&lim), Err(Error::Size { .. })));
    }

    #[test]
    fn json_round_trip() {
        let g = vec![vec![rat(1, 3), rat(0, 1)], vec![rat(0, 1), rat(-1, 3)]];
        let h = FiniteQuadraticChar::new(vec![3, 3], g).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"orders":[3,3],"gram":[["1/3","0"],["0","-1/3"]]}"#);
        let back: FiniteQuadraticChar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
        assert!(serde_json::from_str::<FiniteQuadraticChar>(r#"{"orders":[3],"gram":[["1/5"]]}"#).is_err());
        assert!(serde_json::from_str::<FiniteQuadraticChar>(r#"{"orders":[3],"gram":[["1/3"]],"x":1}"#).is_err());
    }
}
