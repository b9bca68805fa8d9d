//! Independent brute-force references in double-double precision: cofactor
//! determinants and adjugates, companion-matrix eigenvalues with Newton
//! polishing on the resolvent trace, and inverse-iteration eigenvectors.
//! None of this shares code with the main computation paths.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64};

pub const DET_DIM_CAP: usize = 10;
pub const EIGEN_DIM_CAP: usize = 16;

// ---------------------------------------------------------------------------
// double-double real arithmetic (error-free transformations)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from(q1)));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul(Dd::from(q2)));
        let q3 = r2.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        // one Newton step on x = sqrt(a) from the double estimate
        let x = Dd::from(self.hi.sqrt());
        let t = self.div(x).add(x);
        t.mul(Dd::from(0.5))
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }
}

// ---------------------------------------------------------------------------
// double-double complex
// ---------------------------------------------------------------------------

/// Extended-precision complex scalar (~31 significant digits).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WideScalar {
    pub re: Dd,
    pub im: Dd,
}

impl WideScalar {
    pub const ZERO: WideScalar = WideScalar { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: WideScalar = WideScalar { re: Dd::ONE, im: Dd::ZERO };

    pub fn from_c64(z: C64) -> WideScalar {
        WideScalar { re: Dd::from(z.re), im: Dd::from(z.im) }
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(self, o: WideScalar) -> WideScalar {
        WideScalar { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    pub fn sub(self, o: WideScalar) -> WideScalar {
        WideScalar { re: self.re.sub(o.re), im: self.im.sub(o.im) }
    }

    pub fn neg(self) -> WideScalar {
        WideScalar { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(self, o: WideScalar) -> WideScalar {
        WideScalar {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn conj(self) -> WideScalar {
        WideScalar { re: self.re, im: self.im.neg() }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }

    pub fn norm(self) -> Dd {
        self.norm_sqr().sqrt()
    }

    pub fn div(self, o: WideScalar) -> WideScalar {
        let d = o.norm_sqr();
        let n = self.mul(o.conj());
        WideScalar { re: n.re.div(d), im: n.im.div(d) }
    }

    pub fn scale(self, s: Dd) -> WideScalar {
        WideScalar { re: self.re.mul(s), im: self.im.mul(s) }
    }
}

/// Square matrix of extended-precision scalars.
#[derive(Debug, Clone)]
pub struct WideMatrix {
    dim: usize,
    data: Vec<WideScalar>,
}

impl WideMatrix {
    pub fn zeros(dim: usize) -> WideMatrix {
        WideMatrix { dim, data: vec![WideScalar::ZERO; dim * dim] }
    }

    pub fn from_matrix(m: &Matrix) -> WideMatrix {
        let dim = m.dim();
        let mut w = WideMatrix::zeros(dim);
        for k in 0..dim {
            for l in 0..dim {
                w[(k, l)] = WideScalar::from_c64(m[(k, l)]);
            }
        }
        w
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim);
        for k in 0..self.dim {
            for l in 0..self.dim {
                m[(k, l)] = self[(k, l)].to_c64();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn strike(&self, row: usize, col: usize) -> WideMatrix {
        let d = self.dim - 1;
        let mut out = WideMatrix::zeros(d);
        let mut r = 0;
        for i in 0..self.dim {
            if i == row {
                continue;
            }
            let mut c = 0;
            for j in 0..self.dim {
                if j == col {
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

impl std::ops::Index<(usize, usize)> for WideMatrix {
    type Output = WideScalar;
    fn index(&self, (k, l): (usize, usize)) -> &WideScalar {
        &self.data[k * self.dim + l]
    }
}

impl std::ops::IndexMut<(usize, usize)> for WideMatrix {
    fn index_mut(&mut self, (k, l): (usize, usize)) -> &mut WideScalar {
        &mut self.data[k * self.dim + l]
    }
}

pub fn oracle_matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.dim();
    let (wa, wb) = (WideMatrix::from_matrix(a), WideMatrix::from_matrix(b));
    let mut out = WideMatrix::zeros(n);
    for k in 0..n {
        for l in 0..n {
            let mut s = WideScalar::ZERO;
            for j in 0..n {
                s = s.add(wa[(k, j)].mul(wb[(j, l)]));
            }
            out[(k, l)] = s;
        }
    }
    out.to_matrix()
}

fn det_recursive(m: &WideMatrix) -> WideScalar {
    let n = m.dim;
    if n == 1 {
        return m[(0, 0)];
    }
    if n == 2 {
        return m[(0, 0)].mul(m[(1, 1)]).sub(m[(0, 1)].mul(m[(1, 0)]));
    }
    let mut acc = WideScalar::ZERO;
    for j in 0..n {
        if m[(0, j)].norm_sqr().hi == 0.0 {
            continue;
        }
        let cof = det_recursive(&m.strike(0, j));
        let term = m[(0, j)].mul(cof);
        acc = if j % 2 == 0 { acc.add(term) } else { acc.sub(term) };
    }
    acc
}

/// Determinant by recursive cofactor expansion in extended precision.
pub fn oracle_det(x: &Matrix) -> Result<WideScalar> {
    if x.dim() > DET_DIM_CAP {
        return Err(Error::OracleDimCap { dim: x.dim(), cap: DET_DIM_CAP });
    }
    Ok(det_recursive(&WideMatrix::from_matrix(x)))
}

/// Entrywise cofactor adjugate in extended precision.
pub fn oracle_adjugate(x: &Matrix) -> Result<WideMatrix> {
    let n = x.dim();
    if n > DET_DIM_CAP {
        return Err(Error::OracleDimCap { dim: n, cap: DET_DIM_CAP });
    }
    let w = WideMatrix::from_matrix(x);
    let mut adj = WideMatrix::zeros(n);
    for k in 0..n {
        for l in 0..n {
            let cof = det_recursive(&w.strike(l, k));
            adj[(k, l)] = if (k + l) % 2 == 0 { cof } else { cof.neg() };
        }
    }
    Ok(adj)
}

// ---------------------------------------------------------------------------
// extended-precision LU (partial pivoting)
// ---------------------------------------------------------------------------

struct WideLu {
    lu: WideMatrix,
    perm: Vec<usize>,
}

fn wide_lu(a: &WideMatrix) -> Option<WideLu> {
    let n = a.dim;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let (pr, mag) = (col..n)
            .map(|r| (r, lu[(r, col)].norm_sqr().hi))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        if mag == 0.0 {
            return None;
        }
        if pr != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pr, j)];
                lu[(pr, j)] = tmp;
            }
            perm.swap(col, pr);
        }
        let pivot = lu[(col, col)];
        for r in col + 1..n {
            let f = lu[(r, col)].div(pivot);
            lu[(r, col)] = f;
            for j in col + 1..n {
                let s = f.mul(lu[(col, j)]);
                lu[(r, j)] = lu[(r, j)].sub(s);
            }
        }
    }
    Some(WideLu { lu, perm })
}

fn wide_solve(f: &WideLu, b: &[WideScalar]) -> Vec<WideScalar> {
    let n = f.lu.dim;
    let mut y: Vec<WideScalar> = f.perm.iter().map(|&p| b[p]).collect();
    for k in 1..n {
        for j in 0..k {
            let s = f.lu[(k, j)].mul(y[j]);
            y[k] = y[k].sub(s);
        }
    }
    for k in (0..n).rev() {
        for j in k + 1..n {
            let s = f.lu[(k, j)].mul(y[j]);
            y[k] = y[k].sub(s);
        }
        y[k] = y[k].div(f.lu[(k, k)]);
    }
    y
}

fn shifted(w: &WideMatrix, z: WideScalar) -> WideMatrix {
    let n = w.dim;
    let mut m = WideMatrix::zeros(n);
    for k in 0..n {
        for l in 0..n {
            m[(k, l)] = w[(k, l)].neg();
        }
        m[(k, k)] = m[(k, k)].add(z);
    }
    m
}

// ---------------------------------------------------------------------------
// companion-matrix QR start values (double precision, oracle-private)
// ---------------------------------------------------------------------------

/// Characteristic coefficients (monic, descending) by determinant
/// interpolation at scaled roots of unity.
fn charpoly_by_interpolation(w: &WideMatrix) -> Vec<C64> {
    let n = w.dim;
    let count = n + 1;
    let radius = 1.0
        + (0..n)
            .map(|k| (0..n).map(|l| w[(k, l)].to_c64().norm()).sum::<f64>())
            .fold(0.0, f64::max);
    let mut values = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    for j in 0..count {
        let theta = std::f64::consts::TAU * j as f64 / count as f64;
        let z = radius * C64::new(theta.cos(), theta.sin());
        points.push(z);
        let m = shifted(w, WideScalar::from_c64(z));
        let d = match wide_lu(&m) {
            Some(f) => {
                let mut det = WideScalar::ONE;
                let mut swaps = 0;
                for (i, &p) in f.perm.iter().enumerate() {
                    if p != i {
                        swaps += 1;
                    }
                }
                // permutation sign from cycle parity
                let sign = perm_sign(&f.perm);
                let _ = swaps;
                for k in 0..n {
                    det = det.mul(f.lu[(k, k)]);
                }
                if sign < 0 {
                    det.neg()
                } else {
                    det
                }
            }
            None => WideScalar::ZERO,
        };
        values.push(d.to_c64());
    }
    // inverse DFT on the circle: c_k r^k = (1/N) sum_j p(z_j) conj(omega)^{jk}
    let mut coeffs = vec![C64::new(0.0, 0.0); count];
    for k in 0..count {
        let mut s = C64::new(0.0, 0.0);
        for (j, &v) in values.iter().enumerate() {
            let theta = -std::f64::consts::TAU * (j * k) as f64 / count as f64;
            s += v * C64::new(theta.cos(), theta.sin());
        }
        coeffs[k] = s / (count as f64 * radius.powi(k as i32));
    }
    let _ = points;
    // descending powers, forced monic
    let mut desc: Vec<C64> = coeffs.into_iter().rev().collect();
    desc[0] = C64::new(1.0, 0.0);
    desc
}

fn perm_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Eigenvalues of an upper-Hessenberg matrix by shifted QR with deflation.
/// Double precision; only used to seed the extended-precision polish.
fn hessenberg_qr_values(mut h: Vec<Vec<C64>>) -> Result<Vec<C64>> {
    let mut n = h.len();
    let mut out = Vec::with_capacity(n);
    let mut iterations = 0usize;
    let cap = 120 * n.max(1);
    while n > 0 {
        if n == 1 {
            out.push(h[0][0]);
            n = 0;
            continue;
        }
        // deflate tiny subdiagonals
        let mut deflated = false;
        for k in (1..n).rev() {
            if h[k][k - 1].norm() <= 1e-30 + f64::EPSILON * (h[k - 1][k - 1].norm() + h[k][k].norm()) {
                if k == n - 1 {
                    out.push(h[n - 1][n - 1]);
                    n -= 1;
                } else {
                    // split: solve the trailing block separately
                    let tail: Vec<Vec<C64>> =
                        (k..n).map(|r| (k..n).map(|c| h[r][c]).collect()).collect();
                    out.extend(hessenberg_qr_values(tail)?);
                    n = k;
                }
                deflated = true;
                break;
            }
        }
        if deflated {
            continue;
        }
        if n == 2 {
            let (a, b, c, d) = (h[0][0], h[0][1], h[1][0], h[1][1]);
            let tr = a + d;
            let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
            out.push((tr + disc) * 0.5);
            out.push((tr - disc) * 0.5);
            n = 0;
            continue;
        }
        iterations += 1;
        if iterations > cap {
            return Err(Error::NoConvergence { what: "oracle companion QR", iterations: cap });
        }
        // Wilkinson shift from the trailing 2x2
        let (a, b, c, d) = (h[n - 2][n - 2], h[n - 2][n - 1], h[n - 1][n - 2], h[n - 1][n - 1]);
        let tr = a + d;
        let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
        let e1 = (tr + disc) * 0.5;
        let e2 = (tr - disc) * 0.5;
        let mu = if (e1 - d).norm() < (e2 - d).norm() { e1 } else { e2 };
        // implicit single-shift QR sweep via Givens rotations
        let mut rotations = Vec::with_capacity(n - 1);
        for k in 0..n {
            h[k][k] -= mu;
        }
        for k in 0..n - 1 {
            let (x, y) = (h[k][k], h[k + 1][k]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            } else {
                (x / r, y / r)
            };
            for j in k..n {
                let (p, q) = (h[k][j], h[k + 1][j]);
                h[k][j] = cs.conj() * p + sn.conj() * q;
                h[k + 1][j] = -sn * p + cs * q;
            }
            rotations.push((cs, sn));
        }
        for (k, (cs, sn)) in rotations.into_iter().enumerate() {
            for item in h.iter_mut().take((k + 2 + 1).min(n)) {
                let (p, q) = (item[k], item[k + 1]);
                item[k] = p * cs + q * sn;
                item[k + 1] = -p * sn.conj() + q * cs.conj();
            }
        }
        for k in 0..n {
            h[k][k] += mu;
        }
    }
    Ok(out)
}

fn companion_eigen_estimates(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len() - 1;
    let mut comp = vec![vec![C64::new(0.0, 0.0); n]; n];
    for k in 0..n {
        comp[k][n - 1] = -coeffs[n - k];
        if k + 1 < n {
            comp[k + 1][k] = C64::new(1.0, 0.0);
        }
    }
    hessenberg_qr_values(comp)
}

fn wide_polish(w: &WideMatrix, z0: C64) -> WideScalar {
    let n = w.dim;
    let mut z = WideScalar::from_c64(z0);
    for _ in 0..60 {
        let m = shifted(w, z);
        let f = match wide_lu(&m) {
            Some(f) => f,
            None => return z,
        };
        let mut tr = WideScalar::ZERO;
        for k in 0..n {
            let mut e = vec![WideScalar::ZERO; n];
            e[k] = WideScalar::ONE;
            let x = wide_solve(&f, &e);
            tr = tr.add(x[k]);
        }
        if tr.norm_sqr().hi < 1e-300 {
            return z;
        }
        let step = WideScalar::ONE.div(tr);
        z = z.sub(step);
        if step.norm().hi < 1e-30 * (1.0 + z.norm().hi) {
            break;
        }
    }
    z
}

fn wide_null_vector(w: &WideMatrix, z: WideScalar, adjoint: bool) -> Result<Vec<WideScalar>> {
    let n = w.dim;
    let mut work = WideMatrix::zeros(n);
    for k in 0..n {
        for l in 0..n {
            work[(k, l)] = if adjoint { w[(l, k)].conj() } else { w[(k, l)] };
        }
    }
    let zz = if adjoint { z.conj() } else { z };
    // inverse iteration on (z I - W); nudge the shift if the LU collapses
    let mut nudge = 0.0f64;
    let mut x: Vec<WideScalar> = (0..n)
        .map(|k| WideScalar::from_c64(C64::new(1.0 + (0.577 * k as f64).sin(), (0.733 * k as f64).cos())))
        .collect();
    for _ in 0..40 {
        let zshift = zz.add(WideScalar::from_c64(C64::new(nudge, nudge)));
        let m = shifted(&work, zshift);
        let f = match wide_lu(&m) {
            Some(f) => f,
            None => {
                nudge = if nudge == 0.0 { 1e-30 } else { nudge * 1e3 };
                continue;
            }
        };
        let y = wide_solve(&f, &x);
        let mut norm2 = Dd::ZERO;
        for v in &y {
            norm2 = norm2.add(v.norm_sqr());
        }
        let norm = norm2.sqrt();
        if norm.hi == 0.0 || !norm.hi.is_finite() {
            nudge = if nudge == 0.0 { 1e-30 } else { nudge * 1e3 };
            continue;
        }
        let inv = Dd::ONE.div(norm);
        let xn: Vec<WideScalar> = y.iter().map(|v| v.scale(inv)).collect();
        // converged when the update direction stabilizes
        let mut diff = Dd::ZERO;
        for (a, b) in xn.iter().zip(&x) {
            diff = diff.add(a.sub(*b).norm_sqr());
        }
        x = xn;
        if diff.sqrt().hi < 1e-28 {
            break;
        }
    }
    Ok(x)
}

/// Eigenvalues (extended precision) with right and left eigenvectors.
pub fn oracle_eigen(
    x: &Matrix,
) -> Result<(Vec<WideScalar>, Vec<Vec<WideScalar>>, Vec<Vec<WideScalar>>)> {
    let n = x.dim();
    if n > EIGEN_DIM_CAP {
        return Err(Error::OracleDimCap { dim: n, cap: EIGEN_DIM_CAP });
    }
    let w = WideMatrix::from_matrix(x);
    let values: Vec<WideScalar> = if n == 1 {
        vec![WideScalar::from_c64(x[(0, 0)])]
    } else {
        let coeffs = charpoly_by_interpolation(&w);
        let starts = companion_eigen_estimates(&coeffs)?;
        starts.into_iter().map(|z| wide_polish(&w, z)).collect()
    };
    let mut rights = Vec::with_capacity(n);
    let mut lefts = Vec::with_capacity(n);
    for &z in &values {
        rights.push(wide_null_vector(&w, z, false)?);
        lefts.push(wide_null_vector(&w, z, true)?);
    }
    Ok((values, rights, lefts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_matrix;
    use crate::models;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dd_arithmetic_keeps_extra_digits() {
        let a = Dd::from(1.0).add(Dd::from(1e-25));
        assert_eq!(a.hi, 1.0);
        assert_eq!(a.lo, 1e-25);
        let b = a.sub(Dd::from(1.0));
        assert!((b.to_f64() - 1e-25).abs() < 1e-40);
        let t = Dd::from(3.0);
        let third = Dd::ONE.div(t);
        let back = third.mul(t).sub(Dd::ONE);
        assert!(back.to_f64().abs() < 1e-31);
        let s = Dd::from(2.0).sqrt();
        let r = s.mul(s).sub(Dd::from(2.0));
        assert!(r.to_f64().abs() < 1e-31);
    }

    #[test]
    fn det_of_identity_and_singular_example() {
        let d = oracle_det(&Matrix::identity(4)).unwrap();
        assert!((d.to_c64() - c(1.0, 0.0)).norm() < 1e-30);
        let m = models::example_3x3(c(1.0, 0.0), c(0.5, 0.0), c(2.0, 0.0), c(1.0, 0.0)).unwrap();
        let d = oracle_det(&m.h_at_ep).unwrap();
        assert!(d.to_c64().norm() < 1e-30);
    }

    #[test]
    fn det_dimension_cap() {
        assert!(oracle_det(&Matrix::identity(11)).is_err());
    }

    /// Bareiss fraction-free elimination: exact integer determinant.
    fn integer_det(mut m: Vec<Vec<i128>>) -> i128 {
        let n = m.len();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[k][k] == 0 {
                let swap = (k + 1..n).find(|&r| m[r][k] != 0);
                match swap {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
                m[i][k] = 0;
            }
            prev = m[k][k];
        }
        sign * m[n - 1][n - 1]
    }

    #[test]
    fn integer_determinant_cross_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let ints: Vec<Vec<i128>> =
            (0..5).map(|_| (0..5).map(|_| rng.gen_range(-9i128..10)).collect()).collect();
        let m = Matrix::from_real_rows(
            &ints.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect::<Vec<_>>(),
        )
        .unwrap();
        let wide = oracle_det(&m).unwrap();
        let exact = integer_det(ints);
        assert_eq!(wide.to_c64().re.round() as i128, exact);
        assert!(wide.to_c64().im.abs() < 1e-25);
    }

    #[test]
    fn adjugate_identity_and_fundamental_identity_integer() {
        let adj = oracle_adjugate(&Matrix::identity(3)).unwrap();
        assert!(adj.to_matrix().sub(&Matrix::identity(3)).unwrap().frobenius_norm() < 1e-30);
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        let ints: Vec<Vec<f64>> =
            (0..4).map(|_| (0..4).map(|_| rng.gen_range(-5i32..6) as f64).collect()).collect();
        let m = Matrix::from_real_rows(&ints).unwrap();
        let adj = oracle_adjugate(&m).unwrap().to_matrix();
        let d = oracle_det(&m).unwrap().to_c64();
        let prod = crate::linalg::matmul(&m, &adj).unwrap();
        let expect = Matrix::identity(4).scale(d);
        // integer inputs: the dd products are exact, rounding only at readout
        assert!(prod.sub(&expect).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn eigen_diagonal() {
        let d = Matrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap();
        let (vals, _, _) = oracle_eigen(&d).unwrap();
        let mut got: Vec<f64> = vals.iter().map(|v| v.to_c64().re).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, e) in got.iter().zip([1.0, 2.0, 3.0]) {
            assert!((g - e).abs() < 1e-25);
        }
    }

    #[test]
    fn eigen_jordan_perturbed_closed_form() {
        let eps = 1e-8;
        let h = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![eps, 0.0]]).unwrap();
        let (vals, _, _) = oracle_eigen(&h).unwrap();
        let sqrt_eps = Dd::from(eps).sqrt();
        let mut mags: Vec<Dd> = vals.iter().map(|v| v.norm()).collect();
        mags.sort_by(|a, b| a.hi.partial_cmp(&b.hi).unwrap());
        for m in mags {
            // matches +-sqrt(eps) to ~20 digits
            assert!(m.sub(sqrt_eps).abs().to_f64() < 1e-24);
        }
    }

    #[test]
    fn eigen_residuals_on_random_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(93);
        let h = random_matrix(&mut rng, 8);
        let w = WideMatrix::from_matrix(&h);
        let (vals, rights, lefts) = oracle_eigen(&h).unwrap();
        let scale: f64 = h.frobenius_norm();
        for ((z, r), l) in vals.iter().zip(&rights).zip(&lefts) {
            let mut res = Dd::ZERO;
            let mut resl = Dd::ZERO;
            for k in 0..8 {
                let mut hr = WideScalar::ZERO;
                let mut hl = WideScalar::ZERO;
                for j in 0..8 {
                    hr = hr.add(w[(k, j)].mul(r[j]));
                    hl = hl.add(w[(j, k)].conj().mul(l[j]));
                }
                res = res.add(hr.sub(z.mul(r[k])).norm_sqr());
                resl = resl.add(hl.sub(z.conj().mul(l[k])).norm_sqr());
            }
            assert!(res.sqrt().to_f64() < 1e-20 * scale);
            assert!(resl.sqrt().to_f64() < 1e-20 * scale);
        }
    }
}
