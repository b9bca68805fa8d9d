//! The JSON matrix-file format and its conversions.

use num_complex::Complex64;
use rigidity_core::linalg::Matrix;
use rigidity_core::models::NearEPModel;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// On-disk matrix document: `{"dim": m, "entries": [[[re, im], ...], ...]}`
/// row-major, with an optional near-EP model block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub model: Option<ModelMeta>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ModelMeta {
    pub omega_ep: [f64; 2],
    pub order: usize,
    pub h_prime: Vec<Vec<[f64; 2]>>,
    pub truncated: bool,
}

fn grid_from_matrix(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|k| (0..m.dim()).map(|l| [m[(k, l)].re, m[(k, l)].im]).collect())
        .collect()
}

fn matrix_from_grid(dim: usize, grid: &[Vec<[f64; 2]>]) -> Result<Matrix, String> {
    if grid.len() != dim {
        return Err(format!("entries grid has {} rows, expected {dim}", grid.len()));
    }
    let mut m = Matrix::zeros(dim);
    for (k, row) in grid.iter().enumerate() {
        if row.len() != dim {
            return Err(format!("row {k} has {} entries, expected {dim}", row.len()));
        }
        for (l, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(format!("non-finite entry at ({k},{l})"));
            }
            m[(k, l)] = C64::new(re, im);
        }
    }
    Ok(m)
}

impl MatrixFile {
    pub fn from_model(model: &NearEPModel) -> MatrixFile {
        MatrixFile {
            dim: model.dim(),
            entries: grid_from_matrix(&model.h_at_ep),
            model: Some(ModelMeta {
                omega_ep: [model.omega_ep.re, model.omega_ep.im],
                order: model.order,
                h_prime: grid_from_matrix(&model.h_prime),
                truncated: model.truncated,
            }),
        }
    }

    pub fn matrix(&self) -> Result<Matrix, String> {
        matrix_from_grid(self.dim, &self.entries)
    }

    pub fn model(&self) -> Result<Option<NearEPModel>, String> {
        let Some(meta) = &self.model else { return Ok(None) };
        if meta.order < 2 || meta.order > self.dim {
            return Err(format!("model order {} out of range for dim {}", meta.order, self.dim));
        }
        Ok(Some(NearEPModel {
            h_at_ep: self.matrix()?,
            h_prime: matrix_from_grid(self.dim, &meta.h_prime)?,
            omega_ep: C64::new(meta.omega_ep[0], meta.omega_ep[1]),
            order: meta.order,
            truncated: meta.truncated,
        }))
    }

    pub fn parse(text: &str) -> Result<MatrixFile, String> {
        let file: MatrixFile = serde_json::from_str(text)
            .map_err(|e| format!("invalid matrix file: {e}"))?;
        file.matrix()?; // validate the grid eagerly
        if let Some(meta) = &file.model {
            matrix_from_grid(file.dim, &meta.h_prime)?;
        }
        Ok(file)
    }

    /// Deterministic serialization; `generate | parse | serialize` is
    /// byte-identical.
    pub fn serialize(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("serializable");
        out.push('\n');
        out
    }
}
