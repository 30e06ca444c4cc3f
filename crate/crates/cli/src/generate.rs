//! Seeded scenario files.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rand::Rng;

use weil_core::finite_quadratic::{random_nondegenerate, seeded_rng};
use weil_core::local_fields::{CharacterSpec, LocalField};
use weil_core::verifiers::generate::{
    random_curve, random_global_form, random_local_parts, random_loop, random_surface,
};
use weil_core::{Error, Result};

use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    WeilLocal,
    WeilLoop,
    GaussSum,
    CheckFinite,
    VerifyGlobal,
    VerifyLoop,
    VerifyCurve,
    VerifySurface,
}

fn one(kind: Kind, rng: &mut impl Rng) -> Scenario {
    match kind {
        Kind::WeilLocal => {
            let (field, character, a) = random_local_parts(rng);
            Scenario::WeilLocal {
                field,
                character: Some(character),
                a,
                precision: None,
            }
        }
        Kind::WeilLoop => {
            let fields = [LocalField::real(), LocalField::padic(2).unwrap(), LocalField::padic(3).unwrap(), LocalField::padic(5).unwrap()];
            let field = fields[rng.gen_range(0..fields.len())].clone();
            let (q, w) = random_loop(rng);
            Scenario::WeilLoop {
                field,
                character: None,
                q,
                w,
            }
        }
        Kind::GaussSum => Scenario::GaussSum {
            character: random_nondegenerate(rng, &[2, 3, 5, 7], 343),
        },
        Kind::CheckFinite => Scenario::CheckFinite {
            character: random_nondegenerate(rng, &[2, 3, 5, 7], 64),
        },
        Kind::VerifyGlobal => Scenario::VerifyGlobal {
            q: random_global_form(rng),
            places: Vec::new(),
            sign: 1,
        },
        Kind::VerifyLoop => {
            let (q, w) = random_loop(rng);
            Scenario::VerifyLoop {
                q,
                w,
                places: Vec::new(),
            }
        }
        Kind::VerifyCurve => {
            let p = [3, 5, 7][rng.gen_range(0..3)];
            let omega = random_curve(rng, p);
            let character = CharacterSpec {
                shift: rng.gen_range(-1..=1),
                sign: if rng.gen_bool(0.5) { 1 } else { -1 },
            };
            Scenario::VerifyCurve {
                p,
                omega,
                character: Some(character),
                precision: None,
            }
        }
        Kind::VerifySurface => {
            let p = [3, 5, 7][rng.gen_range(0..3)];
            let (omega, c_psi) = random_surface(rng, p);
            Scenario::VerifySurface {
                p,
                omega,
                c_psi,
                precision: None,
            }
        }
    }
}

/// `count` scenarios of one kind from `seed`; the same arguments always give the same list.
pub fn scenarios(kind: Kind, seed: u64, count: usize) -> Vec<Scenario> {
    let mut rng = seeded_rng(seed);
    (0..count).map(|_| one(kind, &mut rng)).collect()
}

/// Write scenarios as `<kind>-<seed>-<i>.json` under `dir`.
pub fn write(kind: Kind, seed: u64, count: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("output directory {}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for (i, s) in scenarios(kind, seed, count).iter().enumerate() {
        let path = dir.join(format!("{}-{seed}-{i:03}.json", s.kind()));
        let text = serde_json::to_string_pretty(s).expect("scenarios serialize");
        std::fs::write(&path, text + "\n").map_err(|e| Error::Input(format!("writing {}: {e}", path.display())))?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_determinism() {
        for kind in Kind::value_variants() {
            let a = scenarios(*kind, 11, 4);
            assert_eq!(a, scenarios(*kind, 11, 4));
            for s in &a {
                let back = Scenario::parse(&serde_json::to_string(s).unwrap()).unwrap();
                assert_eq!(&back, s);
            }
        }
    }
}
