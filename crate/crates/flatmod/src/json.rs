//! JSON forms of points: matrices are row-major arrays of `[re, im]` pairs.

use flatmod_core::lie::{AlgebraElement, CMat, GroupElement, C64};
use flatmod_core::moduli::{XPoint, YPoint};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMat, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage("matrix must be square and nonempty".into()));
    }
    Ok(CMat::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonYPoint {
    pub h: Vec<JsonMatrix>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonXPoint {
    pub h: Vec<JsonMatrix>,
    pub lambda: JsonMatrix,
    pub residual: f64,
}

/// A point file holds either kind; `lambda` decides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonPoint {
    X(JsonXPoint),
    Y(JsonYPoint),
}

impl From<&YPoint> for JsonYPoint {
    fn from(y: &YPoint) -> Self {
        Self { h: y.h.iter().map(|g| matrix_to_json(g.matrix())).collect(), residual: y.residual }
    }
}

impl From<&XPoint> for JsonXPoint {
    fn from(x: &XPoint) -> Self {
        Self {
            h: x.h.iter().map(|g| matrix_to_json(g.matrix())).collect(),
            lambda: matrix_to_json(x.lambda.matrix()),
            residual: x.residual,
        }
    }
}

fn groups(h: &[JsonMatrix]) -> Result<Vec<GroupElement>, CliError> {
    h.iter()
        .map(|m| GroupElement::new(matrix_from_json(m)?).map_err(|e| CliError::Usage(format!("invalid point: {e}"))))
        .collect()
}

impl JsonPoint {
    pub fn groups(&self) -> Result<Vec<GroupElement>, CliError> {
        match self {
            JsonPoint::X(x) => groups(&x.h),
            JsonPoint::Y(y) => groups(&y.h),
        }
    }

    pub fn lambda(&self) -> Result<Option<AlgebraElement>, CliError> {
        match self {
            JsonPoint::X(x) => AlgebraElement::new(matrix_from_json(&x.lambda)?)
                .map(Some)
                .map_err(|e| CliError::Usage(format!("invalid point: {e}"))),
            JsonPoint::Y(_) => Ok(None),
        }
    }
}

pub fn read_points(text: &str) -> Result<Vec<JsonPoint>, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid point file: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use flatmod_core::moduli::{sample_y, ModuliConfig, SamplerConfig};

    #[test]
    fn points_roundtrip() {
        let cfg = ModuliConfig::goldman();
        let y = &sample_y(&cfg, 3, 1, &SamplerConfig::default()).unwrap()[0];
        let text = serde_json::to_string(&vec![JsonPoint::Y(y.into())]).unwrap();
        let back = read_points(&text).unwrap();
        let h = back[0].groups().unwrap();
        for (a, b) in h.iter().zip(&y.h) {
            assert_eq!(a.matrix(), b.matrix());
        }
        assert!(back[0].lambda().unwrap().is_none());
    }

    #[test]
    fn bad_matrices_are_rejected() {
        assert!(matrix_from_json(&vec![vec![[1.0, 0.0]], vec![]]).is_err());
        let not_unitary = JsonPoint::Y(JsonYPoint { h: vec![vec![vec![[2.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.5, 0.0]]]], residual: 0.0 });
        assert!(not_unitary.groups().is_err());
    }
}
