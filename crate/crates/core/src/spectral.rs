//! Eigenvalues, right/left eigenvectors by two independent routes, and the
//! phase rigidity computed both from its definition and from the exact
//! adjugate reformulation `r_i = p'(omega_i) / A_i`.

use num_complex::Complex64;

use crate::adjugate::{adjugate, adjugate_element, AdjugateMethod};
use crate::charpoly::{eval_p_prime, faddeev_leverrier, CharPoly};
use crate::error::{Error, Result};
use crate::linalg::{inner, normalize_phase_fixed, vec_norm, Lu, Matrix, Vector, C64};

const ABERTH_MAX_ITER: usize = 2000;
const INVERSE_ITER_MAX: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// One eigenvalue with its biorthogonal vector pair and sensitivity data.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: C64,
    /// `|R_i>`, unit norm, phase fixed.
    pub right: Vector,
    /// The vector whose conjugate transpose left-multiplies `H`; unit norm.
    pub left: Vector,
    /// `r_i` by the overlap definition.
    pub rigidity: C64,
    /// `r_i` by the adjugate reformulation; `None` when the 0/0 EP path fired.
    pub rigidity_exact: Option<C64>,
    /// `K_i = |r_i|^{-2}`.
    pub petermann: f64,
    pub residual_right: f64,
    pub residual_left: f64,
    /// `|r_direct - r_exact|` when both routes ran.
    pub route_disagreement: f64,
}

#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub matrix: Matrix,
    pub pairs: Vec<Eigenpair>,
}

impl Eigensystem {
    pub fn values(&self) -> Vec<C64> {
        self.pairs.iter().map(|p| p.value).collect()
    }
}

fn horner_pair(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Backward-error scale `sum_k |a_k| |z|^{n-k}` for the stopping criterion.
fn poly_scale(coeffs: &[C64], z: C64) -> f64 {
    let az = z.norm();
    coeffs.iter().fold(0.0, |acc, c| acc * az + c.norm())
}

/// All roots of the monic polynomial by Aberth-Ehrlich simultaneous iteration.
fn aberth(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![-coeffs[1]]);
    }
    // Cauchy bound for the start circle
    let bound = 1.0 + coeffs[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let radius = 0.5 * bound.min(2.0 * bound.powf(1.0 / n as f64)) + 1e-3;
    let mut z: Vec<C64> = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.43;
            radius * C64::new(theta.cos(), theta.sin())
        })
        .collect();
    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step = 0.0f64;
        for j in 0..n {
            let (p, dp) = horner_pair(coeffs, z[j]);
            if p.norm() <= 4.0 * f64::EPSILON * poly_scale(coeffs, z[j]) {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { C64::new(1e-3, 1e-3) };
            let repulsion: C64 = (0..n)
                .filter(|&k| k != j)
                .map(|k| {
                    let d = z[j] - z[k];
                    if d.norm() > 1e-300 { d.inv() } else { C64::new(1e150, 0.0) }
                })
                .sum();
            let denom = C64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
            z[j] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[j].norm()));
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    // accept anyway if final residuals are acceptable in the backward sense
    for &zj in &z {
        let (p, _) = horner_pair(coeffs, zj);
        if p.norm() > 1e-8 * poly_scale(coeffs, zj).max(f64::MIN_POSITIVE) {
            return Err(Error::UnconvergedRoot { estimate: zj });
        }
    }
    Ok(z)
}

/// Newton polishing on the matrix itself: `z -= 1 / tr((zI - H)^{-1})`,
/// which is `p/p'` without going through polynomial coefficients.
fn polish_on_matrix(h: &Matrix, mut z: C64) -> C64 {
    let n = h.dim();
    for _ in 0..4 {
        let m = h.shifted_from(z);
        let lu = match Lu::factor_with_threshold(&m, 1e-307) {
            Ok(lu) => lu,
            Err(_) => return z, // exactly singular: z is an eigenvalue already
        };
        let mut tr_inv = C64::new(0.0, 0.0);
        for k in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[k] = C64::new(1.0, 0.0);
            match lu.solve(&e) {
                Ok(x) => tr_inv += x[k],
                Err(_) => return z,
            }
        }
        if tr_inv.norm() < 1e-300 {
            return z;
        }
        let step = tr_inv.inv();
        z -= step;
        if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// All eigenvalues of `h`, with multiplicity, sorted lexicographically on
/// (re, im). Roots of the characteristic polynomial by Aberth-Ehrlich,
/// polished by Newton steps on the resolvent trace.
pub fn eigenvalues(h: &Matrix) -> Result<Vec<C64>> {
    let cp = faddeev_leverrier(h);
    eigenvalues_from_charpoly(h, &cp)
}

pub fn eigenvalues_from_charpoly(h: &Matrix, cp: &CharPoly) -> Result<Vec<C64>> {
    if h.dim() == 1 {
        return Ok(vec![h[(0, 0)]]);
    }
    let mut roots = aberth(cp.coeffs())?;
    for z in roots.iter_mut() {
        *z = polish_on_matrix(h, *z);
    }
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(roots)
}

/// Eigenvector components from adjugate minors: a column (right) or row
/// (left) of `adj(omega I - H)`. `pivot = None` scans all pivots and keeps
/// the one with the largest norm.
pub fn eigvec_from_adjugate(
    h: &Matrix,
    omega: C64,
    side: Side,
    pivot: Option<usize>,
) -> Result<Vector> {
    let n = h.dim();
    let m = h.shifted_from(omega);
    let adj = adjugate(&m, AdjugateMethod::Cofactor)?.adj;
    let adj_scale = adj.frobenius_norm();
    let null_threshold = 1e-13 * m.max_row_norm().max(1.0).powi(n as i32 - 1);
    if adj_scale <= null_threshold {
        return Err(Error::AllPivotsNull);
    }
    let extract = |p: usize| -> Vector {
        match side {
            // column s of adj is a right null vector of M
            Side::Right => (0..n).map(|k| adj[(k, p)]).collect(),
            // row t of adj holds L*_k; store L itself
            Side::Left => (0..n).map(|k| adj[(p, k)].conj()).collect(),
        }
    };
    let v = match pivot {
        Some(p) => {
            if p >= n {
                return Err(Error::DimensionMismatch(format!("pivot {p} out of range")));
            }
            extract(p)
        }
        None => (0..n)
            .map(extract)
            .max_by(|a, b| vec_norm(a).partial_cmp(&vec_norm(b)).unwrap())
            .unwrap(),
    };
    if vec_norm(&v) <= 1e-12 * adj_scale {
        return Err(Error::AllPivotsNull);
    }
    normalize_phase_fixed(&v)
}

/// Shifted inverse iteration from a deterministic start; independent
/// cross-check route for the adjugate eigenvectors.
pub fn eigvec_inverse_iteration(h: &Matrix, omega: C64, side: Side) -> Result<Vector> {
    let n = h.dim();
    let work = match side {
        Side::Right => h.clone(),
        Side::Left => h.adjoint(),
    };
    let shift = match side {
        Side::Right => omega,
        Side::Left => omega.conj(),
    };
    let scale = work.max_row_norm().max(1.0);
    let mut eta = 0.0f64;
    let mut x: Vector = (0..n)
        .map(|k| C64::new(1.0 + (0.911 * k as f64).sin(), (1.523 * k as f64).cos()))
        .collect();
    let nx = vec_norm(&x);
    x.iter_mut().for_each(|c| *c /= nx);
    for it in 0..INVERSE_ITER_MAX {
        let m = work.shifted_from(shift + C64::new(eta, eta));
        let lu = match Lu::factor_with_threshold(&m, 1e-307) {
            Ok(lu) => lu,
            Err(_) => {
                eta = if eta == 0.0 { 1e-14 * scale } else { eta * 2.0 };
                continue;
            }
        };
        let y = lu.solve(&x)?;
        let ny = vec_norm(&y);
        if !ny.is_finite() || ny == 0.0 {
            eta = if eta == 0.0 { 1e-14 * scale } else { eta * 2.0 };
            continue;
        }
        x = y.iter().map(|&c| c / ny).collect();
        let hx = work.matvec(&x)?;
        let residual = vec_norm(
            &hx.iter().zip(&x).map(|(&a, &b)| a - shift * b).collect::<Vec<_>>(),
        );
        if residual <= 1e-13 * scale && it >= 1 {
            return normalize_phase_fixed(&x);
        }
    }
    // accept the best effort if the residual is merely loose, otherwise fail
    let hx = work.matvec(&x)?;
    let residual = vec_norm(
        &hx.iter().zip(&x).map(|(&a, &b)| a - shift * b).collect::<Vec<_>>(),
    );
    if residual <= 1e-8 * scale {
        return normalize_phase_fixed(&x);
    }
    Err(Error::NoConvergence { what: "inverse iteration", iterations: INVERSE_ITER_MAX })
}

/// Phase rigidity from its definition: the left-right overlap of the
/// unit-normalized pair.
pub fn rigidity_direct(left: &[C64], right: &[C64]) -> C64 {
    let nl = vec_norm(left);
    let nr = vec_norm(right);
    inner(left, right) / (nl * nr)
}

/// Phase rigidity from the exact reformulation `p'(omega_i) / A_{R L}`.
pub fn rigidity_exact(h: &Matrix, omega: C64, right: &[C64], left: &[C64]) -> Result<C64> {
    let cp = faddeev_leverrier(h);
    rigidity_exact_from_charpoly(h, &cp, omega, right, left)
}

pub fn rigidity_exact_from_charpoly(
    h: &Matrix,
    cp: &CharPoly,
    omega: C64,
    right: &[C64],
    left: &[C64],
) -> Result<C64> {
    let pp = eval_p_prime(cp, omega);
    let a = adjugate_element(right, left, &h.shifted_from(omega))?;
    let scale = h.max_row_norm().max(1.0).powi(h.dim() as i32 - 1);
    if a.norm() <= 1e-14 * scale && pp.norm() <= 1e-14 * scale {
        return Err(Error::DegenerateDenominator { value: omega });
    }
    Ok(pp / a)
}

/// Residual `||H r - w r||` of a unit right vector (or the left analogue).
fn pair_residual(h: &Matrix, omega: C64, v: &[C64], side: Side) -> f64 {
    let work = match side {
        Side::Right => h.clone(),
        Side::Left => h.adjoint(),
    };
    let shift = match side {
        Side::Right => omega,
        Side::Left => omega.conj(),
    };
    let hv = work.matvec(v).unwrap();
    vec_norm(&hv.iter().zip(v).map(|(&a, &b)| a - shift * b).collect::<Vec<_>>())
}

fn best_vector(h: &Matrix, omega: C64, side: Side, tol: f64) -> Result<(Vector, f64)> {
    let adj_route = eigvec_from_adjugate(h, omega, side, None);
    if let Ok(v) = adj_route {
        let res = pair_residual(h, omega, &v, side);
        if res <= tol {
            return Ok((v, res));
        }
        // adjugate route degraded; see if inverse iteration does better
        if let Ok(w) = eigvec_inverse_iteration(h, omega, side) {
            let res_w = pair_residual(h, omega, &w, side);
            if res_w < res {
                return Ok((w, res_w));
            }
        }
        return Ok((v, res));
    }
    let w = eigvec_inverse_iteration(h, omega, side)?;
    let res = pair_residual(h, omega, &w, side);
    Ok((w, res))
}

/// Full sweep: eigenvalues, vector pairs (adjugate route with inverse
/// iteration fallback), rigidity by both routes, Petermann factors.
pub fn eigensystem(h: &Matrix) -> Result<Eigensystem> {
    let cp = faddeev_leverrier(h);
    let values = eigenvalues_from_charpoly(h, &cp)?;
    let tol = 1e-10 * h.max_row_norm().max(1.0);
    let mut pairs = Vec::with_capacity(values.len());
    for (idx, &value) in values.iter().enumerate() {
        let wrap = |e: Error| Error::AtEigenvalue { index: idx, source: Box::new(e) };
        let (right, residual_right) = best_vector(h, value, Side::Right, tol).map_err(&wrap)?;
        let (left, residual_left) = best_vector(h, value, Side::Left, tol).map_err(&wrap)?;
        let rig = rigidity_direct(&left, &right);
        let (rig_exact, disagreement) =
            match rigidity_exact_from_charpoly(h, &cp, value, &right, &left) {
                Ok(re) => ((Some(re)), (re - rig).norm()),
                Err(Error::DegenerateDenominator { .. }) => (None, 0.0),
                Err(e) => return Err(wrap(e)),
            };
        let k = rig.norm();
        pairs.push(Eigenpair {
            value,
            right,
            left,
            rigidity: rig,
            rigidity_exact: rig_exact,
            petermann: if k > 0.0 { k.powi(-2) } else { f64::INFINITY },
            residual_right,
            residual_left,
            route_disagreement: disagreement,
        });
    }
    Ok(Eigensystem { matrix: h.clone(), pairs })
}

/// Convenience: `<L_i|R_j>` biorthogonality residual matrix entries.
pub fn biorthogonality_residual(es: &Eigensystem, i: usize, j: usize) -> f64 {
    inner(&es.pairs[i].left, &es.pairs[j].right).norm()
}

pub type Complex = Complex64;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matmul, random_matrix, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted_match(mut a: Vec<C64>, mut b: Vec<C64>, tol: f64) {
        a.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
        b.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let d = Matrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap();
        let vals = eigenvalues(&d).unwrap();
        sorted_match(vals, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1e-12);
    }

    #[test]
    fn eigenvalues_of_weak_coupling() {
        let eps = 1e-6;
        let h = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![eps, 0.0]]).unwrap();
        let vals = eigenvalues(&h).unwrap();
        sorted_match(vals, vec![c(-1e-3, 0.0), c(1e-3, 0.0)], 1e-15);
    }

    #[test]
    fn eigenvalues_match_oracle_on_random_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let h = random_matrix(&mut rng, 8);
        let vals = eigenvalues(&h).unwrap();
        let (oracle_vals, _, _) = crate::oracle::oracle_eigen(&h).unwrap();
        sorted_match(vals, oracle_vals.iter().map(|w| w.to_c64()).collect(), 1e-8);
    }

    #[test]
    fn adjugate_route_jordan_kernel() {
        let h = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        // the right kernel direction lives in the adjugate column whose
        // left-vector weight is nonzero, here column 1
        let r = eigvec_from_adjugate(&h, c(0.0, 0.0), Side::Right, Some(1)).unwrap();
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(r[1].norm() < 1e-14);
        // automatic pivot selection finds the same direction
        let r = eigvec_from_adjugate(&h, c(0.0, 0.0), Side::Right, None).unwrap();
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(r[1].norm() < 1e-14);
    }

    #[test]
    fn adjugate_and_inverse_iteration_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let h = random_matrix(&mut rng, 6);
        let vals = eigenvalues(&h).unwrap();
        for &w in &vals {
            for side in [Side::Right, Side::Left] {
                let a = eigvec_from_adjugate(&h, w, side, None).unwrap();
                let b = eigvec_inverse_iteration(&h, w, side).unwrap();
                // sine of the angle between the two unit vectors: norm of
                // the component of `a` orthogonal to `b` (acos of the
                // overlap cannot resolve angles near the noise floor)
                let proj = inner(&b, &a);
                let resid: Vec<C64> =
                    a.iter().zip(&b).map(|(&ak, &bk)| ak - proj * bk).collect();
                let angle = vec_norm(&resid);
                assert!(angle < 1e-8, "angle {angle} at {w}");
            }
        }
    }

    #[test]
    fn inverse_iteration_diagonal_case() {
        let d = Matrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let v = eigvec_inverse_iteration(&d, c(2.0, 0.0), Side::Right).unwrap();
        assert!(v[0].norm() < 1e-12);
        assert!((v[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn left_vector_of_triangular_last_eigenvalue() {
        // upper triangular: the left vector of the trailing diagonal
        // eigenvalue is the last canonical vector
        let t = Matrix::from_real_rows(&[
            vec![3.0, 1.0, 2.0],
            vec![0.0, 1.0, 0.5],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let l = eigvec_inverse_iteration(&t, c(2.0, 0.0), Side::Left).unwrap();
        assert!(l[0].norm() < 1e-10);
        assert!(l[1].norm() < 1e-10);
        assert!((l[2].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rigidity_closed_form_weak_coupling() {
        let eps = 1e-6;
        let h = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![eps, 0.0]]).unwrap();
        let es = eigensystem(&h).unwrap();
        let expected = 2.0 * eps.sqrt() / (1.0 + eps);
        for p in &es.pairs {
            assert!((p.rigidity.norm() - expected).abs() < 1e-10 * expected);
        }
    }

    #[test]
    fn rigidity_hermitian_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let a = random_matrix(&mut rng, 4);
        let herm = a.add(&a.adjoint()).unwrap().scale(c(0.5, 0.0));
        let es = eigensystem(&herm).unwrap();
        for p in &es.pairs {
            assert!((p.rigidity.norm() - 1.0).abs() < 1e-9);
            assert!((p.petermann - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rigidity_exact_matches_direct_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let h = random_matrix(&mut rng, 5);
        let es = eigensystem(&h).unwrap();
        for p in &es.pairs {
            let re = p.rigidity_exact.expect("diagonalizable");
            assert!((re - p.rigidity).norm() < 1e-9 * p.rigidity.norm());
        }
    }

    #[test]
    fn rigidity_zero_at_exact_ep() {
        let h = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let r = eigvec_from_adjugate(&h, c(0.0, 0.0), Side::Right, None).unwrap();
        let l = eigvec_from_adjugate(&h, c(0.0, 0.0), Side::Left, None).unwrap();
        assert!(rigidity_direct(&l, &r).norm() < 1e-14);
    }

    #[test]
    fn eigensystem_diagonal_all_rigid() {
        let d = Matrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap();
        let es = eigensystem(&d).unwrap();
        assert_eq!(es.pairs.len(), 3);
        for p in &es.pairs {
            assert!((p.rigidity.norm() - 1.0).abs() < 1e-12);
            assert!((p.petermann - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn biorthogonality_on_random_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let h = random_matrix(&mut rng, 8);
        let es = eigensystem(&h).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert!(biorthogonality_residual(&es, i, j) < 1e-8);
                }
            }
        }
    }

    #[test]
    fn rigidity_magnitude_bounded_and_unitary_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        let h = random_matrix(&mut rng, 5);
        let u = random_unitary(&mut rng, 5);
        let hu = matmul(&matmul(&u, &h).unwrap(), &u.adjoint()).unwrap();
        let es = eigensystem(&h).unwrap();
        let es_u = eigensystem(&hu).unwrap();
        for (p, q) in es.pairs.iter().zip(&es_u.pairs) {
            assert!(p.rigidity.norm() <= 1.0 + 1e-12);
            assert!(p.petermann >= 1.0 - 1e-10);
            assert!((p.rigidity.norm() - q.rigidity.norm()).abs() < 1e-9);
        }
    }
}
