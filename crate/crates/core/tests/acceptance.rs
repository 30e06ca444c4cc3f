//! Acceptance run: one line per criterion, then a nonzero exit if any failed.
//!
//! Every numeric oracle here is independent of the engine: floating-point
//! sums and quadratures, compared to the engine's exact μ₈ answers.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::Rng;

use weil_core::arith::{rat, rat_int};
use weil_core::finite_quadratic::{random_nondegenerate, seeded_rng};
use weil_core::laurent::residue_sum;
use weil_core::local_fields::{AdditiveCharacter, CharacterSpec, LocalField};
use weil_core::verifiers::generate::{
    random_curve, random_global_form, random_local_config, random_loop, random_surface,
};
use weil_core::verifiers::{verify_curve, verify_global, verify_loop, verify_surface};
use weil_core::weil::{weil_index_arch, weil_index_local, LaurentPoly, QuadraticCharDescriptor};
use weil_core::{Limits, Mu8};

const FOURIER_CASES: usize = 200;
const FOURIER_MAX_SIZE: u64 = 343;
const FOURIER_BUDGET: Duration = Duration::from_secs(10);

const SL2_CASES: usize = 50;
const SL2_MAX_SIZE: u64 = 64;
const SL2_BUDGET: Duration = Duration::from_secs(30);

const GAUSS_MAX_P: u64 = 50;
/// Per-term error of cos/sin at exact rational angles, times a safety factor.
const GAUSS_TERM_ERR: f64 = 1e-14;

const LATTICE_CASES: usize = 100;
const LATTICE_SIZE_CAP: u64 = 4096;
const LATTICE_BUDGET: Duration = Duration::from_secs(60);

const SELF_DUAL_CASES: usize = 100;

const GLOBAL_CASES: usize = 20;
const GLOBAL_PROBES: usize = 10;
const GLOBAL_BUDGET: Duration = Duration::from_secs(10);

const LOOP_CASES: usize = 10;

const CURVE_CASES: usize = 10;
const CURVE_BUDGET: Duration = Duration::from_secs(60);

const SURFACE_CASES: usize = 5;
const SURFACE_BUDGET: Duration = Duration::from_secs(60);

const RESIDUE_CASES: usize = 50;

const FRESNEL_TOL: f64 = 1e-6;

const SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(t: Duration, budget: Duration) -> bool {
    t <= budget
}

fn fourier() -> Outcome {
    let limits = Limits::default();
    let mut rng = seeded_rng(SEED);
    let start = Instant::now();
    let mut bad = 0;
    for _ in 0..FOURIER_CASES {
        let h = random_nondegenerate(&mut rng, &[2, 3, 5, 7], FOURIER_MAX_SIZE);
        if !h.fourier_identity_check_with(&limits).unwrap_or(false) {
            bad += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        bad == 0 && within(t, FOURIER_BUDGET),
        format!("{FOURIER_CASES} characters, {bad} failures, {t:.2?} (budget {FOURIER_BUDGET:?})"),
    )
}

fn sl2() -> Outcome {
    let limits = Limits::default();
    let mut rng = seeded_rng(SEED + 1);
    let start = Instant::now();
    let mut bad = 0;
    let mut partial = 0;
    for _ in 0..SL2_CASES {
        let h = random_nondegenerate(&mut rng, &[2, 3, 5, 7], SL2_MAX_SIZE);
        let ok = match (h.sl2_relation_check_with(&limits), h.gauss_sum_with(&limits)) {
            (Ok(r), Ok(g)) => {
                if !r.exhaustive {
                    partial += 1;
                }
                r.pass4 && r.pass3 && r.scalar == g
            }
            _ => false,
        };
        if !ok {
            bad += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        bad == 0 && partial == 0 && within(t, SL2_BUDGET),
        format!("{SL2_CASES} characters, {bad} failures, {partial} non-exhaustive, {t:.2?}"),
    )
}

/// Σ_s exp(2πi·k·s²/p) in f64, rounded to μ₈ when the rounding is certain.
fn gauss_oracle(p: u64, k: u64) -> Option<Mu8> {
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for s in 0..p {
        let r = (k * s % p) * s % p;
        let t = 2.0 * PI * r as f64 / p as f64;
        re += t.cos();
        im += t.sin();
    }
    let err = p as f64 * GAUSS_TERM_ERR;
    let scale = (p as f64).sqrt();
    let mut best = None;
    for j in 0..8 {
        let a = PI / 4.0 * j as f64;
        let dist = ((re - scale * a.cos()).powi(2) + (im - scale * a.sin()).powi(2)).sqrt();
        if dist <= err {
            if best.is_some() {
                return None;
            }
            best = Some(Mu8::new(j));
        }
    }
    best
}

fn odd_primes(max: u64) -> Vec<u64> {
    (3..=max).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    (1..p).find(|x| a * x % p == 1).expect("unit")
}

fn gauss_law() -> Outcome {
    let limits = Limits::default();
    let mut checked = 0;
    let mut bad = Vec::new();
    for p in odd_primes(GAUSS_MAX_P) {
        let field = LocalField::padic(p).unwrap();
        for sign in [1i8, -1] {
            let psi = AdditiveCharacter::new(&field, 0, sign).unwrap();
            for u in 1..p {
                // ψ(½·(u/p)·s²) = exp(2πi·sign·u·2⁻¹·s²/p)
                let k = u * mod_inverse(2, p) % p;
                let k = if sign > 0 { k } else { p - k };
                let expected = gauss_oracle(p, k);
                let h = QuadraticCharDescriptor::from_rational(&psi, &rat(u as i64, p as i64), limits.precision)
                    .unwrap();
                let reduced = h.reduce(&limits).ok();
                let quotient_ok = reduced.as_ref().is_some_and(|r| r.quotient_orders == vec![p]);
                let got = weil_index_local(&h, &limits).ok();
                checked += 1;
                if expected.is_none() || got != expected || !quotient_ok {
                    bad.push(format!("p={p} u={u} sign={sign}"));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} (p, unit, sign) cases, failures: {bad:?}"),
    )
}

fn lattice_invariance() -> Outcome {
    let limits = Limits::default();
    let mut rng = seeded_rng(SEED + 3);
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut widths = 0;
    let mut multi = 0;
    for i in 0..LATTICE_CASES {
        let h = random_local_config(&mut rng);
        let res: weil_core::Result<Vec<Mu8>> = h
            .window(LATTICE_SIZE_CAP)
            .and_then(|w| w.iter().map(|d| h.weil_index_at(d, &limits)).collect());
        match res {
            Ok(v) => {
                widths += v.len();
                if v.len() > 1 {
                    multi += 1;
                }
                if v.windows(2).any(|w| w[0] != w[1]) {
                    bad.push(format!("case {i}: {v:?}"));
                }
            }
            Err(e) => bad.push(format!("case {i}: {e}")),
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && within(t, LATTICE_BUDGET),
        format!(
            "{LATTICE_CASES} configurations, {widths} lattices ({multi} with several), {t:.2?}, failures: {bad:?}"
        ),
    )
}

fn self_dual() -> Outcome {
    let limits = Limits::default();
    let mut rng = seeded_rng(SEED + 4);
    let mut found = 0;
    let mut tried = 0;
    let mut bad = Vec::new();
    while found < SELF_DUAL_CASES && tried < 50 * SELF_DUAL_CASES {
        tried += 1;
        let h = random_local_config(&mut rng);
        let Ok(d) = h.d_high() else { continue };
        if h.dual_exponent(d).ok() != Some(d) {
            continue;
        }
        found += 1;
        // the generic quotient at d (trivial) and at the next larger lattice
        for dd in [d, d - 1] {
            match h.weil_index_at(dd, &limits) {
                Ok(g) if g.is_one() => {}
                other => bad.push(format!("{h} at d={dd}: {other:?}")),
            }
        }
    }
    outcome(
        found == SELF_DUAL_CASES && bad.is_empty(),
        format!("{found} self-dual configurations out of {tried} drawn, failures: {bad:?}"),
    )
}

fn probe_primes(rng: &mut impl Rng) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    while out.len() < GLOBAL_PROBES {
        let n = rng.gen_range(3..400u64);
        if (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0) && !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

fn global() -> Outcome {
    let limits = Limits::default();
    let mut rng = seeded_rng(SEED + 5);
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut off_diagonal = 0;
    for i in 0..GLOBAL_CASES {
        let q = random_global_form(&mut rng);
        if (0..q.len()).any(|a| (0..q.len()).any(|b| a != b && q[a][b] != rat_int(0))) {
            off_diagonal += 1;
        }
        let probes = probe_primes(&mut rng);
        match verify_global(&q, &probes, &limits) {
            Ok(r) if r.pass && r.entries.len() >= GLOBAL_PROBES + 1 => {}
            other => bad.push(format!("case {i}: {other:?}")),
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && off_diagonal > 0 && within(t, GLOBAL_BUDGET),
        format!("{GLOBAL_CASES} forms ({off_diagonal} non-diagonal), {t:.2?}, failures: {bad:?}"),
    )
}

fn loops() -> Outcome {
    let limits = Limits::default();
    let mut rng = seeded_rng(SEED + 6);
    let mut bad = Vec::new();
    for i in 0..LOOP_CASES {
        let (q, w) = random_loop(&mut rng);
        match verify_loop(&q, &w, &[], &limits) {
            Ok(r) if r.pass => {}
            other => bad.push(format!("case {i}: {other:?}")),
        }
    }
    // Q = [1] with ω = t·dt: each place sees ψ_v(½·x²) on ℚ_v
    let one = vec![vec![LaurentPoly::monomial(rat_int(1), 0)]];
    let lr = verify_loop(&one, &LaurentPoly::monomial(rat_int(1), 1), &[3, 5], &limits);
    let gr = verify_global(&[vec![rat_int(1)]], &[3, 5], &limits);
    let mut compared = 0;
    match (lr, gr) {
        (Ok(l), Ok(g)) => {
            for e in &l.entries {
                if let Some(f) = g.entries.iter().find(|f| f.place == e.place) {
                    compared += 1;
                    if f.index != e.index {
                        bad.push(format!("cross-check at {}: {} vs {}", e.place, e.index, f.index));
                    }
                }
            }
        }
        (l, g) => bad.push(format!("cross-check: {:?} / {:?}", l.err(), g.err())),
    }
    outcome(
        bad.is_empty() && compared >= 3,
        format!("{LOOP_CASES} scenarios, cross-check on {compared} places, failures: {bad:?}"),
    )
}

fn curves() -> Outcome {
    let limits = Limits::default();
    let mut rng = seeded_rng(SEED + 7);
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut total = 0;
    for p in [3u64, 5, 7] {
        for i in 0..CURVE_CASES {
            let omega = random_curve(&mut rng, p);
            let psi = CharacterSpec {
                shift: rng.gen_range(-1..=1),
                sign: if rng.gen_bool(0.5) { 1 } else { -1 },
            };
            total += 1;
            match verify_curve(p, &omega, psi, &limits) {
                Ok(r) if r.pass => {}
                Ok(r) => bad.push(format!("p={p} case {i}: product {}", r.product)),
                Err(e) => bad.push(format!("p={p} case {i}: {e}")),
            }
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && within(t, CURVE_BUDGET),
        format!("{total} differentials over p = 3, 5, 7, {t:.2?}, failures: {bad:?}"),
    )
}

fn surfaces() -> Outcome {
    let limits = Limits::default();
    let mut rng = seeded_rng(SEED + 8);
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut total = 0;
    for p in [3u64, 5, 7] {
        for i in 0..SURFACE_CASES {
            let (omega, _) = random_surface(&mut rng, p);
            let c = i as i64 % 3 - 1;
            total += 1;
            match verify_surface(p, &omega, c, &limits) {
                Ok(r) if r.pass => {}
                Ok(r) => bad.push(format!("p={p} case {i} c={c}: product {}", r.product)),
                Err(e) => bad.push(format!("p={p} case {i} c={c}: {e}")),
            }
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && within(t, SURFACE_BUDGET),
        format!("{total} scenarios over p = 3, 5, 7, {t:.2?}, failures: {bad:?}"),
    )
}

fn residues() -> Outcome {
    let limits = Limits::default();
    let mut rng = seeded_rng(SEED + 9);
    let mut bad = Vec::new();
    for i in 0..RESIDUE_CASES {
        let p = [3u64, 5, 7][i % 3];
        let omega = random_curve(&mut rng, p);
        match residue_sum(&omega, p, limits.precision) {
            Ok(s) if s.is_zero() => {}
            other => bad.push(format!("case {i} p={p}: {other:?}")),
        }
    }
    outcome(bad.is_empty(), format!("{RESIDUE_CASES} differentials, failures: {bad:?}"))
}

/// ∫_ℝ exp(−(ε + πi·a)·x²) dx by composite Simpson on [0, L], doubled.
/// Returns the value and an error bound: a tail bound plus the Richardson
/// estimate of the Simpson error from a halved step.
fn regularized(eps: f64, a: f64) -> ((f64, f64), f64) {
    let tail_target: f64 = 1e-12;
    // ∫_L^∞ e^{−εx²} ≤ e^{−εL²}/(2εL)
    let mut l: f64 = 1.0;
    while (-eps * l * l).exp() / (2.0 * eps * l) > tail_target {
        l *= 1.25;
    }
    let simpson = |n: usize| -> (f64, f64) {
        let h = l / n as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for i in 0..=n {
            let x = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let m = (-eps * x * x).exp();
            let ph = -PI * a * x * x;
            re += w * m * ph.cos();
            im += w * m * ph.sin();
        }
        (2.0 * re * h / 3.0, 2.0 * im * h / 3.0)
    };
    // resolve the fastest oscillation with ~40 points per period at x = L
    let n = ((40.0 * a.abs() * l * l) as usize).max(1000) & !1;
    let coarse = simpson(n);
    let fine = simpson(2 * n);
    let quad_err = ((fine.0 - coarse.0).powi(2) + (fine.1 - coarse.1).powi(2)).sqrt() / 15.0;
    (fine, quad_err + 2.0 * tail_target)
}

/// The ε → 0 limit by Richardson extrapolation in ε (halving each level),
/// with the last-column difference as the extrapolation error.
fn fresnel_oracle(a: f64) -> ((f64, f64), f64) {
    let levels = 6;
    let mut rows: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut quad = 0.0f64;
    for k in 0..levels {
        let eps = 0.25 / (1u64 << k) as f64;
        let (v, e) = regularized(eps, a);
        quad = quad.max(e);
        let mut row = vec![v];
        for j in 1..=k {
            let f = (1u64 << j) as f64;
            let (hi, lo) = (row[j - 1], rows[k - 1][j - 1]);
            row.push(((f * hi.0 - lo.0) / (f - 1.0), (f * hi.1 - lo.1) / (f - 1.0)));
        }
        rows.push(row);
    }
    let last = rows[levels - 1][levels - 1];
    let prev = rows[levels - 2][levels - 2];
    let extrap = ((last.0 - prev.0).powi(2) + (last.1 - prev.1).powi(2)).sqrt();
    // quadrature errors are amplified by the Richardson weights (bounded by 2^levels)
    (last, extrap + quad * (1u64 << levels) as f64)
}

fn fresnel() -> Outcome {
    let real = LocalField::real();
    let mut lines = Vec::new();
    let mut pass = true;
    for a in [1i64, -1] {
        let ((re, im), err) = fresnel_oracle(a as f64);
        let r = (re * re + im * im).sqrt();
        // the integral is |a|^{-1/2}·γ, so its modulus should be 1
        let angle_err = (err / r).asin();
        let g = weil_index_arch(&real, &rat_int(a)).unwrap();
        let target = PI / 4.0 * g.exponent() as f64;
        let mut diff = im.atan2(re) - target;
        diff = (diff + PI).rem_euclid(2.0 * PI) - PI;
        let ok = err < FRESNEL_TOL && diff.abs() <= angle_err && ((r - 1.0).abs() <= err);
        pass &= ok;
        lines.push(format!("a={a}: γ={g}, angle offset {diff:.1e} within ±{angle_err:.1e}"));
    }
    outcome(pass, lines.join("; "))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("finite Fourier identity", fourier),
        ("SL2 relations with scalar = Gauss sum", sl2),
        ("Gauss-sum law over F_p quotients", gauss_law),
        ("lattice invariance", lattice_invariance),
        ("self-dual lattices give 1", self_dual),
        ("global product formula", global),
        ("loop product formula", loops),
        ("curve product formula", curves),
        ("surface product formula", surfaces),
        ("residue theorem", residues),
        ("archimedean index vs Fresnel quadrature", fresnel),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} [{tag}] {name}: {}", i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
