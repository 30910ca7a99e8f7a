//! Verification report schema.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub identity_id: String,
    /// The statement being checked, in words.
    pub reference: String,
    pub samples: usize,
    /// Largest residual over the samples; `None` when a sample failed to evaluate.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// The failure was a numerical breakdown (branch cut, non-convergence, ...).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub numeric_breakdown: bool,
}

/// A reported-only sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub probe_id: String,
    pub reference: String,
    pub radii: Vec<f64>,
    pub sup: Vec<f64>,
    /// Log-log slope of `sup` over the outer half of the sweep.
    pub growth_exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub records: Vec<IdentityRecord>,
    pub probes: Vec<ProbeRecord>,
    pub pass: bool,
    /// Wall-clock seconds per suite.
    pub timings: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn numeric_breakdown(&self) -> bool {
        self.records.iter().any(|r| r.numeric_breakdown)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// The report with timings removed, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        Self { timings: BTreeMap::new(), ..self.clone() }
    }

    pub fn exit_code(&self) -> i32 {
        if self.numeric_breakdown() {
            3
        } else if self.pass {
            0
        } else {
            1
        }
    }
}
