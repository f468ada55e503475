//! Check records and the per-scenario check suite.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::induction::{direct_sum_compatibility, induce_module_rep, transport_equivalence, InducedSetup};
use crate::morita::roundtrip_report;
use crate::numkit::{Tolerance, Vector};

use super::generate::{self, random_complex};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    pub timings: Vec<(String, f64)>,
}

impl Report {
    pub fn push(&mut self, name: impl Into<String>, anchor: &str, residual: f64, threshold: f64) {
        self.checks.push(Check { name: name.into(), anchor: anchor.into(), residual, threshold, pass: residual <= threshold });
    }

    /// A check with no numerical residual.
    pub fn push_flag(&mut self, name: impl Into<String>, anchor: &str, pass: bool) {
        self.checks.push(Check { name: name.into(), anchor: anchor.into(), residual: if pass { 0.0 } else { 1.0 }, threshold: 0.0, pass });
    }

    pub fn overall(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.timings.extend(other.timings);
    }

    /// The structured form: a JSON array of check records. Timings are left
    /// out so that equal inputs give byte-identical output.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.checks).expect("checks serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<48} residual {:>10.3e}  threshold {:>10.3e}  [{}]\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.threshold,
                c.anchor
            ));
        }
        for (name, secs) in &self.timings {
            out.push_str(&format!("time {name}: {secs:.3}s\n"));
        }
        out.push_str(if self.overall() { "overall: PASS\n" } else { "overall: FAIL\n" });
        out
    }
}

pub const ANCHOR_INNER: &str = "induced representation: inner-product relation";
pub const ANCHOR_NORM: &str = "induced representation: norm bound";
pub const ANCHOR_NONDEG: &str = "induced representation: non-degeneracy";
pub const ANCHOR_ROUNDTRIP: &str = "imprimitivity round trip";
pub const ANCHOR_TRANSPORT: &str = "induction transports unitary equivalence";
pub const ANCHOR_SUM: &str = "induction commutes with direct sums";

/// Every theorem-level check on the seeded scenario `seed`.
pub fn scenario_checks(seed: u64, tol: Tolerance) -> Result<Report> {
    let start = Instant::now();
    let generated = generate::scenario(seed, tol)?;
    let s = &generated.scenario;
    let mut rng = generate::rng(seed ^ 0x5eed);
    let mut report = Report::default();
    let tag = |name: &str| format!("seed {seed}: {name}");

    let setup = InducedSetup::new(&s.v, s.bimodule.left_action(), &s.phi, tol)?;
    let induced = induce_module_rep(&setup, tol)?;
    report.push(tag("inner-product relation"), ANCHOR_INNER, induced.inner_product_residual, 1e-8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let v = Vector::from_fn(s.v.dim(), |_, _| random_complex(&mut rng));
        let (op, norm) = induced.norm_pair(&v);
        worst = worst.max(op / norm - 1.0);
    }
    report.push(tag("norm bound over 100 vectors"), ANCHOR_NORM, worst.max(0.0), 1e-9);
    if let Some(nd) = induced.nondegenerate {
        report.push_flag(tag("non-degenerate"), ANCHOR_NONDEG, nd);
    }

    let r = roundtrip_report(&s.bimodule, &s.v, &s.w, &s.phi, tol)?;
    report.push(tag("round trip through X"), ANCHOR_ROUNDTRIP, r.max_residual(), 1e-9);
    if let Some(psi) = &s.psi {
        let dual = crate::morita::dual_module(&s.bimodule, tol)?;
        let r = roundtrip_report(&dual.bimodule, &s.w, &s.v, psi, tol)?;
        report.push(tag("round trip through the dual"), ANCHOR_ROUNDTRIP, r.max_residual(), 1e-9);
    }

    let (phi2, u1, _) = generate::unitary_conjugate(&s.phi, &mut rng);
    let setup2 = InducedSetup::new(&s.v, s.bimodule.left_action(), &phi2, tol)?;
    let t = transport_equivalence(&u1, &setup, &setup2, tol)?;
    let e = t.equivalence;
    report.push(tag("transported equivalence"), ANCHOR_TRANSPORT, e.u1_unitarity.max(e.u2_unitarity).max(e.intertwining), 1e-9);

    let d = direct_sum_compatibility(&[setup, setup2], tol)?;
    let e = d.equivalence;
    report.push(tag("direct sum"), ANCHOR_SUM, e.u1_unitarity.max(e.u2_unitarity).max(e.intertwining), 1e-8);

    report.timings.push((format!("seed {seed}"), start.elapsed().as_secs_f64()));
    Ok(report)
}
