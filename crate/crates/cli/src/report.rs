//! Machine reports (JSON) and their text tables.

use std::fmt::Write;

use serde::Serialize;

use weil_core::finite_quadratic::Sl2Report;
use weil_core::verifiers::WeilIndexReport;
use weil_core::{CycInt, Mu8};

#[derive(Clone, Debug, Serialize)]
pub struct LocalReport {
    pub scenario: String,
    pub index: Mu8,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_exponent: Option<i64>,
    pub quotient_orders: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopReport {
    pub scenario: String,
    pub diagonal: Vec<String>,
    pub indices: Vec<Mu8>,
    pub index: Mu8,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussSumReport {
    pub orders: Vec<u64>,
    pub size: u64,
    pub gauss_sum: CycInt,
    pub weil_index: Mu8,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteCheckReport {
    pub orders: Vec<u64>,
    pub nondegenerate: bool,
    pub weil_index: Option<Mu8>,
    pub fourier_identity: Option<bool>,
    pub sl2: Option<Sl2Report>,
    pub scalar_is_gauss_sum: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Report {
    WeilLocal(LocalReport),
    WeilLoop(LoopReport),
    GaussSum(GaussSumReport),
    CheckFinite(FiniteCheckReport),
    Verify(WeilIndexReport),
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn opt<T: std::fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map_or("-".into(), |v| v.to_string())
}

impl Report {
    /// Computations always pass; checks and verifiers pass when their identity holds.
    pub fn pass(&self) -> bool {
        match self {
            Report::CheckFinite(r) => r.pass,
            Report::Verify(r) => r.pass,
            _ => true,
        }
    }

    /// The report with timing fields zeroed.
    pub fn without_timing(&self) -> Report {
        match self {
            Report::Verify(r) => Report::Verify(r.without_timing()),
            other => other.clone(),
        }
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        match self {
            Report::WeilLocal(r) => {
                let _ = writeln!(s, "scenario: {}", r.scenario);
                let _ = writeln!(s, "method:   {}", r.method);
                if let Some(d) = r.lattice_exponent {
                    let _ = writeln!(s, "lattice:  π^{d}·O, quotient orders {:?}", r.quotient_orders);
                }
                let _ = writeln!(s, "index:    {}", r.index);
            }
            Report::WeilLoop(r) => {
                let _ = writeln!(s, "scenario: {}", r.scenario);
                let _ = writeln!(s, "{:<32} index", "diagonal entry");
                for (d, g) in r.diagonal.iter().zip(&r.indices) {
                    let _ = writeln!(s, "{d:<32} {g}");
                }
                let _ = writeln!(s, "index:    {}", r.index);
            }
            Report::GaussSum(r) => {
                let _ = writeln!(s, "group:      {:?} (|A| = {})", r.orders, r.size);
                let _ = writeln!(s, "gauss sum:  {}", r.gauss_sum);
                let _ = writeln!(s, "weil index: {}", r.weil_index);
            }
            Report::CheckFinite(r) => {
                let _ = writeln!(s, "group:            {:?}", r.orders);
                let _ = writeln!(s, "non-degenerate:   {}", r.nondegenerate);
                let _ = writeln!(s, "weil index:       {}", opt(&r.weil_index));
                let _ = writeln!(s, "fourier identity: {}", opt(&r.fourier_identity));
                if let Some(sl2) = &r.sl2 {
                    let mode = if sl2.exhaustive { "full matrices" } else { "random vectors" };
                    let _ = writeln!(s, "S^4 = |A|^2:      {} ({mode})", sl2.pass4);
                    let _ = writeln!(s, "(TS)^3 = λ·S^2:   {}", sl2.pass3);
                }
                let _ = writeln!(s, "λ = gauss sum:    {}", opt(&r.scalar_is_gauss_sum));
                let _ = writeln!(s, "result:           {}", verdict(r.pass));
            }
            Report::Verify(r) => {
                let _ = writeln!(s, "scenario: {}", r.scenario);
                if r.experimental {
                    let _ = writeln!(s, "note: outside the proven range; reported for information");
                }
                let _ = writeln!(s, "{:<40} {:<8} {:<16} {:>10}", "place", "index", "method", "time (µs)");
                for e in &r.entries {
                    let method = serde_json::to_value(e.method)
                        .ok()
                        .and_then(|v| v.as_str().map(String::from))
                        .unwrap_or_default();
                    let _ = writeln!(s, "{:<40} {:<8} {:<16} {:>10}", e.place, e.index.to_string(), method, e.elapsed_us);
                }
                for k in &r.skipped {
                    let why = serde_json::to_value(k.justification)
                        .ok()
                        .and_then(|v| v.as_str().map(String::from))
                        .unwrap_or_default();
                    let _ = writeln!(s, "skipped: {} ({why})", k.places);
                }
                if !r.spot_checks.is_empty() {
                    let checks: Vec<String> = r.spot_checks.iter().map(|e| format!("{}: {}", e.place, e.index)).collect();
                    let _ = writeln!(s, "spot checks: {}", checks.join(", "));
                }
                let _ = writeln!(s, "product: {}   {}", r.product, verdict(r.pass));
            }
        }
        s
    }
}
