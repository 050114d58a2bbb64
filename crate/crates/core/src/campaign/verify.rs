//! Self-test of the five structural constants the analysis rests on.

use std::fmt;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::oracle::{enumerate_ks_colorings, max_classical_value, max_h_sum, Quarters};
use crate::qutrit::{
    compatibility, h_projector_sum_for, s_operator_for, yu_oh_rays, Ray, CLASSICAL_BOUND_3,
    QUANTUM_VALUE_2, QUANTUM_VALUE_3,
};

pub const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {:<28} expected {:<12} observed {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.expected,
                c.observed
            )?;
        }
        Ok(())
    }
}

fn identity_deviation(m: &Matrix3<Complex64>, scale: f64) -> f64 {
    (m - Matrix3::<Complex64>::identity().scale(scale))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn operator_check(
    name: &'static str,
    label: &str,
    m: Option<Matrix3<Complex64>>,
    scale: f64,
) -> IdentityCheck {
    let (observed, passed) = match m {
        Some(m) => {
            let dev = identity_deviation(&m, scale);
            (format!("max dev {dev:.1e}"), dev < IDENTITY_TOLERANCE)
        }
        None => ("unavailable".into(), false),
    };
    IdentityCheck {
        name,
        expected: label.into(),
        observed,
        passed,
    }
}

/// Checks the identities for the standard 13 rays.
pub fn verify_identities() -> IdentityReport {
    verify_identities_with(&yu_oh_rays())
}

/// Checks S = 25/3·I, Σ_α B_{h_α} = 4/3·I, 24 compatible pairs, classical
/// maximum 8 and KS maximum of Σ b_h equal to 1 for an arbitrary ray set.
/// Labels `h0`–`h3` must be present for the projector-sum check.
pub fn verify_identities_with(rays: &[Ray]) -> IdentityReport {
    let g = compatibility(rays);
    let mut checks = vec![
        operator_check(
            "S = 25/3 I",
            "25/3 I",
            s_operator_for(&g).ok(),
            QUANTUM_VALUE_2,
        ),
        operator_check(
            "sum B_h = 4/3 I",
            "4/3 I",
            h_projector_sum_for(&g).ok(),
            QUANTUM_VALUE_3,
        ),
    ];
    let edges = g.edges().len();
    checks.push(IdentityCheck {
        name: "compatible pairs",
        expected: "24".into(),
        observed: edges.to_string(),
        passed: edges == 24,
    });
    let max = max_classical_value(&g).ok().map(|m| m.value);
    checks.push(IdentityCheck {
        name: "classical maximum",
        expected: "8".into(),
        observed: max.map_or("unavailable".into(), |q| q.to_string()),
        passed: max == Some(Quarters::from_integer(8)),
    });
    let h = enumerate_ks_colorings(&g).ok().and_then(|c| max_h_sum(&c));
    checks.push(IdentityCheck {
        name: "KS max of sum b_h",
        expected: "1".into(),
        observed: h.map_or("no KS coloring".into(), |v| v.to_string()),
        passed: h.map(f64::from) == Some(CLASSICAL_BOUND_3),
    });
    IdentityReport { checks }
}
