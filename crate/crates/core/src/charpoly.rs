//! Characteristic-polynomial machinery: Faddeev-LeVerrier coefficients with
//! the adjugate polynomial matrices, Newton's identities, Horner evaluation
//! of p and p', and the near-degeneracy asymptotic form of p'.

use crate::error::{Error, Result};
use crate::linalg::{matmul, Matrix, C64};

/// Monic characteristic polynomial of a matrix `h`, stored as coefficients
/// `a_0..a_n` with `a_0 = 1` and `p(w) = sum_k w^k a_{n-k}`, together with
/// the matrices `B_0..B_{n-1}` of `adj(w I - h) = sum_k w^k B_k`.
///
/// Loses digits for dims much past ~20; the oracle cross-checks in tests.
#[derive(Debug, Clone)]
pub struct CharPoly {
    dim: usize,
    coeffs: Vec<C64>,
    adj_mats: Vec<Matrix>,
}

impl CharPoly {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `a_0..a_n`, monic first.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `B_k` with `adj(w I - h) = sum_k w^k B_k`, ascending in `k`.
    pub fn adj_mats(&self) -> &[Matrix] {
        &self.adj_mats
    }

    /// `adj(w I - h)` assembled by Horner on the matrix polynomial.
    pub fn eval_adj(&self, omega: C64) -> Matrix {
        let n = self.dim;
        let mut acc = self.adj_mats[n - 1].clone();
        for k in (0..n - 1).rev() {
            acc = acc.scale(omega).add(&self.adj_mats[k]).unwrap();
        }
        acc
    }
}

/// Faddeev-LeVerrier recursion: coefficients and adjugate-polynomial
/// matrices in one division-free pass (divisions only by 1..n).
pub fn faddeev_leverrier(h: &Matrix) -> CharPoly {
    let n = h.dim();
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(C64::new(1.0, 0.0));
    let mut mats: Vec<Matrix> = Vec::with_capacity(n);
    let mut m = Matrix::identity(n);
    for k in 1..=n {
        let hm = matmul(h, &m).unwrap();
        let c = -hm.trace() / k as f64;
        coeffs.push(c);
        mats.push(m.clone());
        if k < n {
            let mut next = hm;
            for d in 0..n {
                next[(d, d)] += c;
            }
            m = next;
        }
    }
    // mats[j] multiplies w^{n-1-j}; reorder to ascending powers
    mats.reverse();
    CharPoly { dim: n, coeffs, adj_mats: mats }
}

/// Newton's identities: coefficients `a_1..a_n` from power-sum traces
/// `t_k = tr h^k`: `k a_k = -(t_k + sum_{j=1}^{k-1} a_j t_{k-j})`.
pub fn newton_coeffs_from_traces(traces: &[C64]) -> Vec<C64> {
    let n = traces.len();
    let mut a = vec![C64::new(0.0, 0.0); n + 1];
    a[0] = C64::new(1.0, 0.0);
    for k in 1..=n {
        let mut s = traces[k - 1];
        for j in 1..k {
            s += a[j] * traces[k - j - 1];
        }
        a[k] = -s / k as f64;
    }
    a[1..].to_vec()
}

/// Horner evaluation of `p(omega)`.
pub fn eval_p(cp: &CharPoly, omega: C64) -> C64 {
    cp.coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * omega + c)
}

/// Horner evaluation of `p'(omega)`.
pub fn eval_p_prime(cp: &CharPoly, omega: C64) -> C64 {
    let n = cp.dim;
    let mut acc = C64::new(0.0, 0.0);
    for (k, &c) in cp.coeffs.iter().take(n).enumerate() {
        acc = acc * omega + c * (n - k) as f64;
    }
    acc
}

/// Leading-order `p'` near an order-`n` degeneracy:
/// `n (w_i - w_c)^{n-1} * prod_k (w_k - w_c)` over spectator eigenvalues.
pub fn asymptotic_p_prime(
    omega_i: C64,
    omega_ep: C64,
    n: usize,
    spectators: &[C64],
) -> Result<C64> {
    if n < 2 {
        return Err(Error::BadModelParams("asymptotic p' needs order n >= 2".into()));
    }
    let delta = omega_i - omega_ep;
    let mut out = C64::new(n as f64, 0.0) * delta.powu((n - 1) as u32);
    for &w in spectators {
        out *= w - omega_ep;
    }
    Ok(out)
}
