//! Run configuration: JSON file plus command-line overrides.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use flatmod_core::lie::{CentralElement, InvariantPolynomial};
use flatmod_core::moduli::ModuliConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// The fixed catalog of identity suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ClosedFormAnchors,
    Cocycle,
    EquivariantCocycle,
    FoxSymbolic,
    Goldman,
    Rank,
    Extended,
    Moment,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::ClosedFormAnchors,
        Suite::Cocycle,
        Suite::EquivariantCocycle,
        Suite::FoxSymbolic,
        Suite::Goldman,
        Suite::Rank,
        Suite::Extended,
        Suite::Moment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ClosedFormAnchors => "closed-form-anchors",
            Suite::Cocycle => "cocycle",
            Suite::EquivariantCocycle => "equivariant-cocycle",
            Suite::FoxSymbolic => "fox-symbolic",
            Suite::Goldman => "goldman",
            Suite::Rank => "rank",
            Suite::Extended => "extended",
            Suite::Moment => "moment",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite '{s}' (expected one of: {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Paths that only involve quadrature and exact linear algebra.
    pub quadrature: f64,
    /// Paths through a finite-difference exterior derivative.
    pub fd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { quadrature: 1e-9, fd: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub genus: usize,
    /// `beta = exp(2 pi i k / N) I`; `None` picks `-I` for even `N` and `k = 1` otherwise.
    pub beta_index: Option<i64>,
    pub r_list: Vec<usize>,
    pub seed: u64,
    pub sample_count: usize,
    pub fd_step: f64,
    pub tolerances: Tolerances,
    /// Grundmann-Moller index for the simplex integrals; `None` picks the smallest exact rule.
    pub quadrature_order: Option<usize>,
    pub suites: Vec<Suite>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            genus: 2,
            beta_index: None,
            r_list: vec![2],
            seed: 1,
            sample_count: 20,
            fd_step: 1e-5,
            tolerances: Tolerances::default(),
            quadrature_order: None,
            suites: Suite::ALL.to_vec(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn beta(&self) -> i64 {
        self.beta_index.unwrap_or(if self.n.is_multiple_of(2) { self.n as i64 / 2 } else { 1 })
    }

    pub fn central(&self) -> CentralElement {
        CentralElement::new(self.n, self.beta())
    }

    pub fn moduli(&self) -> Result<ModuliConfig, CliError> {
        ModuliConfig::new(self.n, self.genus, self.beta()).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn chern(&self, r: usize) -> InvariantPolynomial {
        InvariantPolynomial::chern(self.n, r).expect("validated degree")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.n < 2 {
            return bad(format!("N must be at least 2, got {}", self.n));
        }
        if self.genus < 2 {
            return bad(format!("genus must be at least 2, got {}", self.genus));
        }
        if self.r_list.is_empty() {
            return bad("r list is empty".into());
        }
        for &r in &self.r_list {
            if r < 2 || r > self.n {
                return bad(format!("r = {r} outside 2..={}", self.n));
            }
        }
        if self.sample_count == 0 {
            return bad("sample count must be positive".into());
        }
        for (name, v) in [
            ("fd step", self.fd_step),
            ("quadrature tolerance", self.tolerances.quadrature),
            ("fd tolerance", self.tolerances.fd),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(s) = self.quadrature_order {
            let need = 2 * self.r_list.iter().max().copied().unwrap_or(2);
            if 2 * s + 1 < need {
                return bad(format!("quadrature order {s} is exact to degree {}, need {need}", 2 * s + 1));
            }
        }
        if self.suites.is_empty() {
            return bad("no suites selected".into());
        }
        Ok(())
    }
}
