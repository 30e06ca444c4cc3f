//! Local fields at desk scale: ℚ_p, unramified and Eisenstein extensions of ℚ_p,
//! F_q((u)), and ℝ/ℂ.
//!
//! A characteristic-zero extension is described by a monic integer polynomial P of
//! degree n. Its ring of integers is Z_p[β] with β the root of P (β = π in the
//! Eisenstein case), and elements are stored by their power-basis coordinates.

mod character;
mod element;
pub mod fq;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

pub use character::{AdditiveCharacter, CharacterSpec};
pub use element::{ElementSpec, LocalFieldElement};
pub use fq::{Fq, FqElem};

/// JSON descriptor of a field; polynomial coefficients are listed low to high.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldDescriptor {
    Padic { p: u64 },
    Unramified { p: u64, poly: Vec<i64> },
    Eisenstein { p: u64, poly: Vec<i64> },
    /// F_q((u)) with F_q = F_p[x]/(modulus); F_p when the modulus is omitted.
    Eqchar {
        p: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<i64>>,
    },
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    PAdic,
    Unramified,
    Eisenstein,
    EqChar,
    Real,
    Complex,
}

#[derive(Debug)]
pub(crate) struct FieldInfo {
    desc: FieldDescriptor,
    kind: FieldKind,
    p: u64,
    e: i64,
    f: i64,
    /// monic defining polynomial, low to high; x for ℚ_p
    poly: Vec<BigInt>,
    residue: Option<Fq>,
    /// Tr(β^j) for j < n
    traces: Vec<BigInt>,
}

/// A local field; cheap to clone.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FieldDescriptor", into = "FieldDescriptor")]
pub struct LocalField(Arc<FieldInfo>);

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}

impl Eq for LocalField {}

impl TryFrom<FieldDescriptor> for LocalField {
    type Error = Error;

    fn try_from(d: FieldDescriptor) -> Result<Self> {
        LocalField::new(d)
    }
}

impl From<LocalField> for FieldDescriptor {
    fn from(f: LocalField) -> Self {
        f.0.desc.clone()
    }
}

fn check_prime(p: u64) -> Result<()> {
    if arith::is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::Input(format!("{p} is not prime")))
    }
}

fn monic(poly: &[i64]) -> Result<Vec<BigInt>> {
    if poly.len() < 2 || *poly.last().unwrap() != 1 {
        return Err(Error::Input(format!(
            "polynomial {poly:?} must be monic of positive degree (coefficients low to high)"
        )));
    }
    Ok(poly.iter().map(|&c| BigInt::from(c)).collect())
}

/// Power sums Tr(β^j), j < n, of the roots of a monic polynomial (Newton's identities).
fn power_sums(poly: &[BigInt]) -> Vec<BigInt> {
    let n = poly.len() - 1;
    let a = |i: usize| &poly[i];
    let mut s: Vec<BigInt> = vec![BigInt::from(n as u64)];
    for k in 1..n {
        // s_k + a_{n-1}s_{k-1} + ... + a_{n-k+1}s_1 + k·a_{n-k} = 0
        let mut acc = BigInt::from(k as u64) * a(n - k);
        for i in 1..k {
            acc += a(n - i) * &s[k - i];
        }
        s.push(-acc);
    }
    s
}

impl LocalField {
    pub fn new(desc: FieldDescriptor) -> Result<Self> {
        let info = match &desc {
            FieldDescriptor::Padic { p } => {
                check_prime(*p)?;
                FieldInfo {
                    kind: FieldKind::PAdic,
                    p: *p,
                    e: 1,
                    f: 1,
                    poly: vec![BigInt::zero(), BigInt::one()],
                    residue: Some(Fq::prime(*p)),
                    traces: vec![BigInt::one()],
                    desc: desc.clone(),
                }
            }
            FieldDescriptor::Unramified { p, poly } => {
                check_prime(*p)?;
                let pm = monic(poly)?;
                let fq = Fq::new(*p, poly)?;
                FieldInfo {
                    kind: FieldKind::Unramified,
                    p: *p,
                    e: 1,
                    f: (pm.len() - 1) as i64,
                    traces: power_sums(&pm),
                    poly: pm,
                    residue: Some(fq),
                    desc: desc.clone(),
                }
            }
            FieldDescriptor::Eisenstein { p, poly } => {
                check_prime(*p)?;
                let pm = monic(poly)?;
                let pb = BigInt::from(*p);
                let n = pm.len() - 1;
                let ok = pm[..n].iter().all(|c| (c % &pb).is_zero())
                    && arith::vp_int(&pm[0], *p) == Some(1);
                if !ok {
                    return Err(Error::Unsupported(format!(
                        "{poly:?} is not an Eisenstein polynomial at {p}"
                    )));
                }
                FieldInfo {
                    kind: FieldKind::Eisenstein,
                    p: *p,
                    e: n as i64,
                    f: 1,
                    traces: power_sums(&pm),
                    poly: pm,
                    residue: Some(Fq::prime(*p)),
                    desc: desc.clone(),
                }
            }
            FieldDescriptor::Eqchar { p, modulus } => {
                check_prime(*p)?;
                let fq = match modulus {
                    Some(m) => Fq::new(*p, m)?,
                    None => Fq::prime(*p),
                };
                FieldInfo {
                    kind: FieldKind::EqChar,
                    p: *p,
                    e: 1,
                    f: fq.degree() as i64,
                    poly: Vec::new(),
                    residue: Some(fq),
                    traces: Vec::new(),
                    desc: desc.clone(),
                }
            }
            FieldDescriptor::Real | FieldDescriptor::Complex => FieldInfo {
                kind: if desc == FieldDescriptor::Real {
                    FieldKind::Real
                } else {
                    FieldKind::Complex
                },
                p: 0,
                e: 1,
                f: 1,
                poly: Vec::new(),
                residue: None,
                traces: Vec::new(),
                desc: desc.clone(),
            },
        };
        Ok(LocalField(Arc::new(info)))
    }

    pub fn padic(p: u64) -> Result<Self> {
        LocalField::new(FieldDescriptor::Padic { p })
    }

    pub fn unramified(p: u64, poly: &[i64]) -> Result<Self> {
        LocalField::new(FieldDescriptor::Unramified {
            p,
            poly: poly.to_vec(),
        })
    }

    pub fn eisenstein(p: u64, poly: &[i64]) -> Result<Self> {
        LocalField::new(FieldDescriptor::Eisenstein {
            p,
            poly: poly.to_vec(),
        })
    }

    pub fn eqchar(p: u64, modulus: Option<&[i64]>) -> Result<Self> {
        LocalField::new(FieldDescriptor::Eqchar {
            p,
            modulus: modulus.map(|m| m.to_vec()),
        })
    }

    pub fn real() -> Self {
        LocalField::new(FieldDescriptor::Real).expect("ℝ")
    }

    pub fn complex() -> Self {
        LocalField::new(FieldDescriptor::Complex).expect("ℂ")
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0.desc
    }

    pub fn kind(&self) -> FieldKind {
        self.0.kind
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self.0.kind, FieldKind::Real | FieldKind::Complex)
    }

    pub fn is_char_zero_adic(&self) -> bool {
        matches!(
            self.0.kind,
            FieldKind::PAdic | FieldKind::Unramified | FieldKind::Eisenstein
        )
    }

    /// Residue characteristic (0 for archimedean fields).
    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Ramification index over ℚ_p (or over F_q((u)) for equal characteristic).
    pub fn e(&self) -> i64 {
        self.0.e
    }

    /// Residue degree.
    pub fn f(&self) -> i64 {
        self.0.f
    }

    /// [F : ℚ_p] for characteristic-zero fields.
    pub fn degree(&self) -> usize {
        self.0.poly.len().saturating_sub(1)
    }

    pub fn residue_field(&self) -> Result<&Fq> {
        self.0
            .residue
            .as_ref()
            .ok_or_else(|| Error::Domain("archimedean fields have no residue field".into()))
    }

    /// Residue field cardinality q.
    pub fn q(&self) -> Option<u64> {
        self.0.residue.as_ref().and_then(|f| f.order())
    }

    pub fn poly(&self) -> &[BigInt] {
        &self.0.poly
    }

    pub(crate) fn traces(&self) -> &[BigInt] {
        &self.0.traces
    }

    /// ℚ_p under this field.
    pub fn base(&self) -> Result<LocalField> {
        if self.is_char_zero_adic() {
            LocalField::padic(self.0.p)
        } else {
            Err(Error::Domain(format!("{self} is not an extension of ℚ_p")))
        }
    }

    /// v_π of the different: v_π(P′(π)) for Eisenstein P, 0 when unramified.
    pub fn different_valuation(&self) -> Result<i64> {
        match self.0.kind {
            FieldKind::PAdic | FieldKind::Unramified => Ok(0),
            FieldKind::Eisenstein => {
                let n = self.degree();
                let deriv: Vec<BigInt> = (1..=n)
                    .map(|i| &self.0.poly[i] * BigInt::from(i as u64))
                    .collect();
                Ok(element::ord_coords(self, &deriv, i64::MAX))
            }
            _ => Err(Error::Unsupported(format!(
                "different of {self} is not defined here"
            ))),
        }
    }
}

impl fmt::Display for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = |c: &[BigInt]| {
            let terms: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            format!("[{}]", terms.join(","))
        };
        match &self.0.desc {
            FieldDescriptor::Padic { p } => write!(f, "Q_{p}"),
            FieldDescriptor::Unramified { p, .. } => {
                write!(f, "Q_{p}(unramified {})", poly(&self.0.poly))
            }
            FieldDescriptor::Eisenstein { p, .. } => {
                write!(f, "Q_{p}(eisenstein {})", poly(&self.0.poly))
            }
            FieldDescriptor::Eqchar { p, modulus } => match modulus {
                Some(m) => write!(f, "F_{p}[x]/{m:?}((u))"),
                None => write!(f, "F_{p}((u))"),
            },
            FieldDescriptor::Real => write!(f, "R"),
            FieldDescriptor::Complex => write!(f, "C"),
        }
    }
}
