//! Scenario files: one JSON object tagged by `kind`, validated in full before
//! anything is computed.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use weil_core::arith::rational_serde;
use weil_core::finite_quadratic::FiniteQuadraticChar;
use weil_core::laurent::{FactoredDifferential, SurfaceDifferential};
use weil_core::local_fields::{AdditiveCharacter, CharacterSpec, ElementSpec, LocalField};
use weil_core::verifiers::{verify_curve, verify_global_with, verify_loop, verify_surface};
use weil_core::weil::{
    loop_diagonal, weil_index, weil_index_loop, LaurentPoly, QuadraticCharDescriptor, RatFunc,
};
use weil_core::{Error, Limits, Mu8, Result};

use crate::report::{FiniteCheckReport, GaussSumReport, LocalReport, LoopReport, Report};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Scenario {
    WeilLocal {
        field: LocalField,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        character: Option<CharacterSpec>,
        a: ElementSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision: Option<i64>,
    },
    WeilLoop {
        field: LocalField,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        character: Option<CharacterSpec>,
        q: Vec<Vec<LaurentPoly>>,
        #[serde(default = "unit_differential")]
        w: LaurentPoly,
    },
    GaussSum {
        character: FiniteQuadraticChar,
    },
    CheckFinite {
        character: FiniteQuadraticChar,
    },
    VerifyGlobal {
        #[serde(
            serialize_with = "rational_serde::serialize_matrix",
            deserialize_with = "rational_serde::deserialize_matrix"
        )]
        q: Vec<Vec<BigRational>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        places: Vec<u64>,
        #[serde(default = "plus_one", skip_serializing_if = "is_plus_one")]
        sign: i8,
    },
    VerifyLoop {
        q: Vec<Vec<LaurentPoly>>,
        #[serde(default = "unit_differential")]
        w: LaurentPoly,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        places: Vec<u64>,
    },
    VerifyCurve {
        p: u64,
        omega: FactoredDifferential,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        character: Option<CharacterSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision: Option<i64>,
    },
    VerifySurface {
        p: u64,
        omega: SurfaceDifferential,
        #[serde(default)]
        c_psi: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision: Option<i64>,
    },
}

fn unit_differential() -> LaurentPoly {
    LaurentPoly::monomial(BigRational::from_integer(1.into()), 0)
}

fn plus_one() -> i8 {
    1
}

fn is_plus_one(s: &i8) -> bool {
    *s == 1
}

/// Options from the command line that apply on top of a scenario.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub precision: Option<i64>,
    pub cap: Option<u64>,
    pub places: Vec<u64>,
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::WeilLocal { .. } => "weil-local",
            Scenario::WeilLoop { .. } => "weil-loop",
            Scenario::GaussSum { .. } => "gauss-sum",
            Scenario::CheckFinite { .. } => "check-finite",
            Scenario::VerifyGlobal { .. } => "verify-global",
            Scenario::VerifyLoop { .. } => "verify-loop",
            Scenario::VerifyCurve { .. } => "verify-curve",
            Scenario::VerifySurface { .. } => "verify-surface",
        }
    }

    pub fn parse(text: &str) -> Result<Scenario> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("scenario: {e}")))
    }

    fn limits(&self, opts: &RunOptions) -> Limits {
        let own = match self {
            Scenario::WeilLocal { precision, .. }
            | Scenario::VerifyCurve { precision, .. }
            | Scenario::VerifySurface { precision, .. } => *precision,
            _ => None,
        };
        let mut l = Limits::default();
        if let Some(p) = opts.precision.or(own) {
            l.precision = p;
        }
        if let Some(c) = opts.cap {
            l.enumeration_cap = c;
        }
        l
    }

    pub fn run(&self, opts: &RunOptions) -> Result<Report> {
        let limits = self.limits(opts);
        if limits.precision < 1 {
            return Err(Error::Input(format!("precision must be positive, got {}", limits.precision)));
        }
        self.execute(opts, &limits).map_err(|e| e.context(self.kind()))
    }

    fn execute(&self, opts: &RunOptions, limits: &Limits) -> Result<Report> {
        let merged = |own: &[u64]| -> Vec<u64> {
            let mut v = own.to_vec();
            v.extend(&opts.places);
            v.sort_unstable();
            v.dedup();
            v
        };
        match self {
            Scenario::WeilLocal { field, character, a, .. } => {
                let psi = character_for(field, character)?;
                let a = a.to_element(field, limits.precision)?;
                let h = QuadraticCharDescriptor::new(a, psi)?;
                local_report(&h, limits)
            }
            Scenario::WeilLoop { field, character, q, w } => {
                let psi = character_for(field, character)?;
                let wr = RatFunc::from_laurent(w);
                let diag = loop_diagonal(q)?;
                let entries = diag
                    .iter()
                    .map(|d| Ok((d.to_string(), weil_index_loop(&psi, d, &wr, limits)?)))
                    .collect::<Result<Vec<(String, Mu8)>>>()?;
                let index = entries.iter().map(|e| e.1).product();
                Ok(Report::WeilLoop(LoopReport {
                    scenario: format!("x ↦ {psi}(Res ½·xᵀQx·({w})·dt) over {field}"),
                    diagonal: entries.iter().map(|e| e.0.clone()).collect(),
                    indices: entries.iter().map(|e| e.1).collect(),
                    index,
                }))
            }
            Scenario::GaussSum { character } => {
                let size = character.group().size().unwrap_or(u128::MAX);
                let gauss_sum = character.gauss_sum_with(limits)?;
                let weil_index = character.weil_index_finite_with(limits)?;
                Ok(Report::GaussSum(GaussSumReport {
                    orders: character.group().orders().to_vec(),
                    size: size as u64,
                    gauss_sum,
                    weil_index,
                }))
            }
            Scenario::CheckFinite { character } => finite_check(character, limits),
            Scenario::VerifyGlobal { q, places, sign } => {
                if *sign != 1 && *sign != -1 {
                    return Err(Error::Input(format!("sign must be ±1, got {sign}")));
                }
                Ok(Report::Verify(verify_global_with(q, &merged(places), *sign, limits)?))
            }
            Scenario::VerifyLoop { q, w, places } => Ok(Report::Verify(verify_loop(q, w, &merged(places), limits)?)),
            Scenario::VerifyCurve { p, omega, character, .. } => {
                let spec = character.unwrap_or(CharacterSpec { shift: 0, sign: 1 });
                Ok(Report::Verify(verify_curve(*p, omega, spec, limits)?))
            }
            Scenario::VerifySurface { p, omega, c_psi, .. } => {
                Ok(Report::Verify(verify_surface(*p, omega, *c_psi, limits)?))
            }
        }
    }
}

fn character_for(field: &LocalField, spec: &Option<CharacterSpec>) -> Result<AdditiveCharacter> {
    match spec {
        None => Ok(AdditiveCharacter::standard(field)),
        Some(s) => AdditiveCharacter::new(field, s.shift, s.sign),
    }
}

fn local_report(h: &QuadraticCharDescriptor, limits: &Limits) -> Result<Report> {
    let scenario = format!("{h} over {}", h.field());
    if h.field().is_archimedean() {
        return Ok(Report::WeilLocal(LocalReport {
            scenario,
            index: weil_index(h, limits)?,
            method: "archimedean".into(),
            lattice_exponent: None,
            quotient_orders: Vec::new(),
        }));
    }
    let r = h.reduce(limits)?;
    Ok(Report::WeilLocal(LocalReport {
        scenario,
        index: r.value,
        method: if r.self_dual { "self-dual" } else { "finite-quotient" }.into(),
        lattice_exponent: Some(r.d),
        quotient_orders: r.quotient_orders,
    }))
}

fn finite_check(h: &FiniteQuadraticChar, limits: &Limits) -> Result<Report> {
    let nondegenerate = h.check_nondegenerate_with(limits)?;
    if !nondegenerate {
        return Ok(Report::CheckFinite(FiniteCheckReport {
            orders: h.group().orders().to_vec(),
            nondegenerate,
            weil_index: None,
            fourier_identity: None,
            sl2: None,
            scalar_is_gauss_sum: None,
            pass: false,
        }));
    }
    let weil_index = h.weil_index_finite_with(limits)?;
    let fourier = h.fourier_identity_check_with(limits)?;
    let sl2 = h.sl2_relation_check_with(limits)?;
    let scalar_ok = sl2.scalar == h.gauss_sum_with(limits)?;
    let pass = fourier && sl2.pass3 && sl2.pass4 && scalar_ok;
    Ok(Report::CheckFinite(FiniteCheckReport {
        orders: h.group().orders().to_vec(),
        nondegenerate,
        weil_index: Some(weil_index),
        fourier_identity: Some(fourier),
        sl2: Some(sl2),
        scalar_is_gauss_sum: Some(scalar_ok),
        pass,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let s = Scenario::parse(r#"{"kind":"verify-global","q":[["1"]]}"#).unwrap();
        assert_eq!(s.kind(), "verify-global");
        assert!(Scenario::parse(r#"{"kind":"verify-global","q":[["1"]],"bogus":1}"#).is_err());
        assert!(Scenario::parse(r#"{"kind":"nope"}"#).is_err());
        assert!(Scenario::parse("{").is_err());
    }

    #[test]
    fn local_examples() {
        let s = Scenario::parse(r#"{"kind":"weil-local","field":{"kind":"padic","p":3},"a":{"rational":"1/3"}}"#)
            .unwrap();
        let Report::WeilLocal(r) = s.run(&RunOptions::default()).unwrap() else {
            panic!("wrong report")
        };
        assert_eq!(r.quotient_orders, vec![3]);
        let s = Scenario::parse(r#"{"kind":"weil-local","field":{"kind":"real"},"a":{"rational":"1"}}"#).unwrap();
        let Report::WeilLocal(r) = s.run(&RunOptions::default()).unwrap() else {
            panic!("wrong report")
        };
        assert_eq!(r.index, Mu8::new(7));
    }
}
