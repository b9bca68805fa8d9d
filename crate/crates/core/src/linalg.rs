//! Dense complex linear algebra substrate: matrices, vectors, products,
//! the spectral norm, pivoted LU solves and Hessenberg reduction.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative pivot threshold below which LU declares the matrix singular.
pub const PIVOT_THRESHOLD: f64 = 1e-14;
/// Power-iteration convergence tolerance for the two-norm.
pub const TWO_NORM_TOL: f64 = 1e-13;
const TWO_NORM_MAX_ITER: usize = 10_000;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

pub type Vector = Vec<C64>;

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Matrix { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("from_rows requires a square grid".into()));
        }
        Ok(Matrix { dim, data: rows.iter().flatten().copied().collect() })
    }

    /// Real entries convenience, mostly for tests and model builders.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let crows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Matrix::from_rows(&crows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, k: usize) -> &[C64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.dim);
        for k in 0..self.dim {
            for l in 0..self.dim {
                out[(l, k)] = self[(k, l)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("add: {} vs {}", self.dim, other.dim)));
        }
        Ok(Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `omega * I - self`, the pencil appearing in every minor and adjugate.
    pub fn shifted_from(&self, omega: C64) -> Matrix {
        let mut m = self.scale(C64::new(-1.0, 0.0));
        for k in 0..self.dim {
            m[(k, k)] += omega;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vector> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("matvec: {} vs {}", self.dim, x.len())));
        }
        Ok((0..self.dim)
            .map(|k| self.row(k).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_row_norm(&self) -> f64 {
        (0..self.dim)
            .map(|k| self.row(k).iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Submatrix with row `k` and column `l` struck out.
    pub fn strike(&self, k: usize, l: usize) -> Matrix {
        assert!(self.dim >= 2 && k < self.dim && l < self.dim);
        let d = self.dim - 1;
        let mut out = Matrix::zeros(d);
        let mut r = 0;
        for i in 0..self.dim {
            if i == k {
                continue;
            }
            let mut c = 0;
            for j in 0..self.dim {
                if j == l {
                    continue;
                }
                out[(r, c)] = self[(i, j)];
                c += 1;
            }
            r += 1;
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (k, l): (usize, usize)) -> &C64 {
        &self.data[k * self.dim + l]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (k, l): (usize, usize)) -> &mut C64 {
        &mut self.data[k * self.dim + l]
    }
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!("matmul: {} vs {}", a.dim, b.dim)));
    }
    let n = a.dim;
    let mut out = Matrix::zeros(n);
    for k in 0..n {
        for j in 0..n {
            let ak = a[(k, j)];
            if ak == C64::new(0.0, 0.0) {
                continue;
            }
            for l in 0..n {
                out[(k, l)] += ak * b[(j, l)];
            }
        }
    }
    Ok(out)
}

/// `a^H * b`, the biorthogonal pairing with the first argument conjugated.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(&x, &y)| x.conj() * y).sum()
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Unit-normalizes and fixes the phase so the largest-magnitude component
/// is real positive. Keeps eigenvector routes comparable.
pub fn normalize_phase_fixed(x: &[C64]) -> Result<Vector> {
    let norm = vec_norm(x);
    if norm == 0.0 {
        return Err(Error::ZeroVector("normalize"));
    }
    let lead = x
        .iter()
        .max_by(|a, b| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap())
        .copied()
        .unwrap();
    let phase = lead / lead.norm();
    Ok(x.iter().map(|&v| v / (norm * phase)).collect())
}

/// Spectral norm (largest singular value) by power iteration on `X^H X`.
pub fn two_norm(x: &Matrix) -> Result<f64> {
    let n = x.dim;
    let fro = x.frobenius_norm();
    if fro == 0.0 {
        return Ok(0.0);
    }
    let xh = x.adjoint();
    // deterministic start with incommensurate components
    let mut v: Vector = (0..n)
        .map(|k| C64::new(1.0 + (k as f64 * 0.7341).sin(), (k as f64 * 1.3191).cos() * 0.5))
        .collect();
    let nv = vec_norm(&v);
    v.iter_mut().for_each(|c| *c /= nv);
    let mut sigma2 = 0.0;
    for it in 0..TWO_NORM_MAX_ITER {
        let w = xh.matvec(&x.matvec(&v)?)?;
        let new_sigma2 = inner(&v, &w).re.max(0.0);
        let wn = vec_norm(&w);
        if wn == 0.0 {
            // start vector fell in the null space; nudge and retry
            v[it % n] += C64::new(1.0, 0.0);
            let nv = vec_norm(&v);
            v.iter_mut().for_each(|c| *c /= nv);
            continue;
        }
        v = w.iter().map(|&c| c / wn).collect();
        if (new_sigma2 - sigma2).abs() <= TWO_NORM_TOL * fro * fro {
            return Ok(new_sigma2.sqrt());
        }
        sigma2 = new_sigma2;
    }
    Err(Error::NoConvergence { what: "two_norm power iteration", iterations: TWO_NORM_MAX_ITER })
}

/// Partially pivoted LU factorization. Stores L (unit diagonal, below) and U
/// (on and above) in place, plus the row permutation and its sign.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
    threshold: f64,
    smallest_pivot: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Lu> {
        Lu::factor_with_threshold(a, PIVOT_THRESHOLD)
    }

    /// `rel_threshold` scales the matrix max-row-norm to set the singularity cutoff.
    pub fn factor_with_threshold(a: &Matrix, rel_threshold: f64) -> Result<Lu> {
        let n = a.dim;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let threshold = rel_threshold * a.max_row_norm().max(f64::MIN_POSITIVE);
        let mut smallest = f64::INFINITY;
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, lu[(r, col)].norm()))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            if pivot_mag < threshold {
                return Err(Error::SingularMatrix { pivot: pivot_mag, threshold });
            }
            smallest = smallest.min(pivot_mag);
            if pivot_row != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(col, pivot_row);
                sign = -sign;
            }
            let pivot = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / pivot;
                lu[(r, col)] = factor;
                for j in col + 1..n {
                    let sub = factor * lu[(col, j)];
                    lu[(r, j)] -= sub;
                }
            }
        }
        Ok(Lu { lu, perm, sign, threshold, smallest_pivot: smallest })
    }

    pub fn det(&self) -> C64 {
        let mut d = C64::new(self.sign, 0.0);
        for k in 0..self.lu.dim {
            d *= self.lu[(k, k)];
        }
        d
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vector> {
        let n = self.lu.dim;
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("solve: {} vs {}", n, b.len())));
        }
        let mut y: Vector = self.perm.iter().map(|&p| b[p]).collect();
        for k in 1..n {
            for j in 0..k {
                let sub = self.lu[(k, j)] * y[j];
                y[k] -= sub;
            }
        }
        for k in (0..n).rev() {
            for j in k + 1..n {
                let sub = self.lu[(k, j)] * y[j];
                y[k] -= sub;
            }
            y[k] /= self.lu[(k, k)];
        }
        Ok(y)
    }

    pub fn smallest_pivot(&self) -> f64 {
        self.smallest_pivot
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

/// Solves `a x = b` by pivoted LU and reports the residual norm alongside.
pub fn solve(a: &Matrix, b: &[C64]) -> Result<(Vector, f64)> {
    let lu = Lu::factor(a)?;
    let x = lu.solve(b)?;
    let ax = a.matvec(&x)?;
    let residual = vec_norm(
        &ax.iter().zip(b).map(|(&p, &q)| p - q).collect::<Vec<_>>(),
    );
    Ok((x, residual))
}

/// Determinant by pivoted LU; 0 when a pivot collapses.
pub fn det(a: &Matrix) -> C64 {
    match Lu::factor(a) {
        Ok(lu) => lu.det(),
        Err(_) => C64::new(0.0, 0.0),
    }
}

/// Householder reduction to upper-Hessenberg form: `Q^H a Q = H`.
pub fn hessenberg(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.dim;
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    if n < 3 {
        return (q, h);
    }
    for col in 0..n - 2 {
        // build the reflector for column `col`, rows col+1..n
        let mut v: Vector = (col + 1..n).map(|r| h[(r, col)]).collect();
        let alpha = vec_norm(&v);
        // nothing below the subdiagonal: the column is already reduced
        if alpha < 1e-300 || vec_norm(&v[1..]) == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        v[0] += phase * alpha;
        let vn = vec_norm(&v);
        if vn < 1e-300 {
            continue;
        }
        v.iter_mut().for_each(|c| *c /= vn);
        // h <- P h P with P = I - 2 v v^H acting on rows/cols col+1..n
        apply_reflector_left(&mut h, &v, col + 1, 0);
        apply_reflector_right(&mut h, &v, col + 1, 0);
        apply_reflector_right(&mut q, &v, col + 1, 0);
        for r in col + 2..n {
            h[(r, col)] = C64::new(0.0, 0.0);
        }
    }
    (q, h)
}

fn apply_reflector_left(m: &mut Matrix, v: &[C64], row0: usize, col0: usize) {
    let n = m.dim;
    for j in col0..n {
        let s: C64 = v.iter().enumerate().map(|(i, &vi)| vi.conj() * m[(row0 + i, j)]).sum();
        let s2 = s * 2.0;
        for (i, &vi) in v.iter().enumerate() {
            let sub = s2 * vi;
            m[(row0 + i, j)] -= sub;
        }
    }
}

fn apply_reflector_right(m: &mut Matrix, v: &[C64], col0: usize, row0: usize) {
    let n = m.dim;
    for i in row0..n {
        let s: C64 = v.iter().enumerate().map(|(j, &vj)| m[(i, col0 + j)] * vj).sum();
        let s2 = s * 2.0;
        for (j, &vj) in v.iter().enumerate() {
            let sub = s2 * vj.conj();
            m[(i, col0 + j)] -= sub;
        }
    }
}

pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize) -> Matrix {
    let mut m = Matrix::zeros(dim);
    for k in 0..dim {
        for l in 0..dim {
            m[(k, l)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    m
}

/// Random unitary via Householder-QR of a Gaussian-ish matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> Matrix {
    let a = random_matrix(rng, dim);
    // Gram-Schmidt is adequate at desk scale
    let mut cols: Vec<Vector> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vector = (0..dim).map(|i| a[(i, j)]).collect();
        for u in &cols {
            let proj = inner(u, &v);
            for (vi, &ui) in v.iter_mut().zip(u.iter()) {
                *vi -= proj * ui;
            }
        }
        let nv = vec_norm(&v);
        if nv < 1e-8 {
            // vanishingly unlikely with continuous entries; restart the column
            v = (0..dim).map(|i| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
        } else {
            v.iter_mut().for_each(|c| *c /= nv);
        }
        cols.push(v);
    }
    let mut q = Matrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            q[(i, j)] = col[i];
        }
    }
    q
}
