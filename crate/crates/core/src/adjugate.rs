//! Adjugates, minors, and the bilinear adjugate element `A_vw(X)` — the
//! denominator of the exact rigidity formula.

use crate::charpoly::faddeev_leverrier;
use crate::error::{Error, Result};
use crate::linalg::{det, inner, vec_norm, Matrix, Vector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjugateMethod {
    /// Cofactor-of-LU per entry. Robust, O(m^5).
    Cofactor,
    /// Evaluate the Faddeev-LeVerrier adjugate polynomial of `-X` at 0.
    Faddeev,
    /// Run both and record their relative disagreement.
    Both,
}

#[derive(Debug, Clone)]
pub struct AdjugateResult {
    pub adj: Matrix,
    pub method: AdjugateMethod,
    /// Relative disagreement between the two routes; 0 unless `Both`.
    pub cross_check_residual: f64,
}

/// Minor `p_kl(x)`: determinant of `x` with row `k` and column `l` removed.
/// Indices are zero-based.
pub fn minor(x: &Matrix, k: usize, l: usize) -> Result<C64> {
    if x.dim() < 2 {
        return Err(Error::DimensionMismatch("minor needs dim >= 2".into()));
    }
    if k >= x.dim() || l >= x.dim() {
        return Err(Error::DimensionMismatch(format!(
            "minor index ({k},{l}) out of range for dim {}",
            x.dim()
        )));
    }
    Ok(det(&x.strike(k, l)))
}

fn adjugate_cofactor(x: &Matrix) -> Result<Matrix> {
    let n = x.dim();
    let mut adj = Matrix::zeros(n);
    for k in 0..n {
        for l in 0..n {
            let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
            adj[(k, l)] = minor(x, l, k)? * sign;
        }
    }
    Ok(adj)
}

fn adjugate_faddeev(x: &Matrix) -> Matrix {
    // adj(0*I - (-X)) = adj(X): take the constant adjugate-polynomial matrix of -X
    let cp = faddeev_leverrier(&x.scale(C64::new(-1.0, 0.0)));
    cp.adj_mats()[0].clone()
}

/// Adjugate of `x`: `adj_kl = (-1)^{k+l} p_lk(x)`, so `x adj = adj x = det(x) I`.
pub fn adjugate(x: &Matrix, method: AdjugateMethod) -> Result<AdjugateResult> {
    if x.dim() < 2 {
        return Err(Error::DimensionMismatch("adjugate needs dim >= 2".into()));
    }
    match method {
        AdjugateMethod::Cofactor => Ok(AdjugateResult {
            adj: adjugate_cofactor(x)?,
            method,
            cross_check_residual: 0.0,
        }),
        AdjugateMethod::Faddeev => Ok(AdjugateResult {
            adj: adjugate_faddeev(x),
            method,
            cross_check_residual: 0.0,
        }),
        AdjugateMethod::Both => {
            let a = adjugate_cofactor(x)?;
            let b = adjugate_faddeev(x);
            let scale = a.frobenius_norm().max(b.frobenius_norm()).max(f64::MIN_POSITIVE);
            let residual = a.sub(&b)?.frobenius_norm() / scale;
            Ok(AdjugateResult { adj: a, method, cross_check_residual: residual })
        }
    }
}

/// Bilinear adjugate element `A_vw(x) = vhat^H adj(x) what`, assembled from
/// cofactors with the inputs normalized to unit vectors.
pub fn adjugate_element(v: &[C64], w: &[C64], x: &Matrix) -> Result<C64> {
    let n = x.dim();
    if v.len() != n || w.len() != n {
        return Err(Error::DimensionMismatch("adjugate_element vector dims".into()));
    }
    let (nv, nw) = (vec_norm(v), vec_norm(w));
    if nv == 0.0 || nw == 0.0 {
        return Err(Error::ZeroVector("adjugate_element"));
    }
    let adj = adjugate_cofactor(x)?;
    let av: Vector = (0..n)
        .map(|k| (0..n).map(|l| adj[(k, l)] * w[l]).sum::<C64>())
        .collect();
    Ok(inner(v, &av) / (nv * nw))
}
