//! JSON model files.
//!
//! ```json
//! {"dim": 2, "hbar": 1.0,
//!  "H": [[1, 0], [0, 0], [0, 0], [-1, 0]],
//!  "jump_ops": [[[0, 0], [0.5, 0], [0, 0], [0, 0]]]}
//! ```
//!
//! Matrices are flat row-major lists of `[re, im]` pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{c, ComplexMatrix};

use super::LindbladModel;

fn default_hbar() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub dim: usize,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(rename = "H")]
    pub hamiltonian: Vec<[f64; 2]>,
    #[serde(default)]
    pub jump_ops: Vec<Vec<[f64; 2]>>,
}

fn to_matrix(field: &str, dim: usize, entries: &[[f64; 2]]) -> Result<ComplexMatrix> {
    if entries.len() != dim * dim {
        return Err(Error::ModelFile(format!(
            "field `{field}`: expected {} entries for dim {dim}, got {}",
            dim * dim,
            entries.len()
        )));
    }
    if let Some(i) = entries
        .iter()
        .position(|[re, im]| !(re.is_finite() && im.is_finite()))
    {
        return Err(Error::ModelFile(format!("field `{field}`: entry {i} is not finite")));
    }
    Ok(ComplexMatrix::from_row_iterator(
        dim,
        dim,
        entries.iter().map(|&[re, im]| c(re, im)),
    ))
}

fn from_matrix(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    // nalgebra iterates column-major; the file is row-major
    m.transpose().iter().map(|z| [z.re, z.im]).collect()
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                Error::ModelFile(e.into_inner().to_string())
            } else {
                Error::ModelFile(format!("field `{path}`: {}", e.into_inner()))
            }
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ModelFile(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model file is always serializable")
    }

    pub fn from_model(model: &LindbladModel) -> Self {
        Self {
            dim: model.dim(),
            hbar: model.hbar(),
            hamiltonian: from_matrix(model.hamiltonian()),
            jump_ops: model.jump_ops().iter().map(from_matrix).collect(),
        }
    }

    pub fn into_model(&self) -> Result<LindbladModel> {
        if self.dim == 0 {
            return Err(Error::ModelFile("field `dim`: must be at least 1".into()));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::ModelFile(format!("field `hbar`: must be positive, got {}", self.hbar)));
        }
        let h = to_matrix("H", self.dim, &self.hamiltonian)?;
        let jumps = self
            .jump_ops
            .iter()
            .enumerate()
            .map(|(n, v)| to_matrix(&format!("jump_ops[{n}]"), self.dim, v))
            .collect::<Result<Vec<_>>>()?;
        LindbladModel::new(h, jumps, self.hbar).map_err(|e| match e {
            Error::NonHermitianHamiltonian { defect } => {
                Error::ModelFile(format!("field `H`: not hermitian (relative defect {defect:.3e})"))
            }
            other => other,
        })
    }
}

/// Parses a flat row-major `[[re, im], ...]` list as a square matrix; used
/// for state files that share the model encoding.
pub fn matrix_from_pairs(field: &str, entries: &[[f64; 2]]) -> Result<ComplexMatrix> {
    let dim = (entries.len() as f64).sqrt().round() as usize;
    to_matrix(field, dim, entries)
}
