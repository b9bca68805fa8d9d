//! Deterministic generators for the matrix families used throughout:
//! Jordan blocks, the triangular 3x3 with one spectator, the 4x4 with two
//! order-2 degeneracies, and seeded random near-degenerate ensembles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{two_norm, Matrix, Vector, C64};

/// A matrix exactly at an EP plus a unit-norm perturbation direction:
/// `H(eps) = h_at_ep + eps * h_prime`.
#[derive(Debug, Clone)]
pub struct NearEPModel {
    pub h_at_ep: Matrix,
    pub h_prime: Matrix,
    pub omega_ep: C64,
    pub order: usize,
    /// True when every state participates in the EP (no spectators).
    pub truncated: bool,
}

impl NearEPModel {
    pub fn dim(&self) -> usize {
        self.h_at_ep.dim()
    }

    pub fn at(&self, eps: f64) -> Matrix {
        self.h_at_ep.add(&self.h_prime.scale(C64::new(eps, 0.0))).unwrap()
    }

    /// Spectator eigenvalues, valid for the triangular constructions here.
    pub fn spectators(&self) -> Vec<C64> {
        (self.order..self.dim()).map(|k| self.h_at_ep[(k, k)]).collect()
    }
}

fn unit_entry(dim: usize, row: usize, col: usize) -> Matrix {
    let mut m = Matrix::zeros(dim);
    m[(row, col)] = C64::new(1.0, 0.0);
    m
}

/// Canonical order-`n` Jordan block at `omega_ep`, perturbed through the
/// lower-left corner so the degeneracy lifts fully into the root circle.
pub fn jordan_block(n: usize, omega_ep: C64) -> Result<NearEPModel> {
    if n < 2 {
        return Err(Error::BadModelParams("jordan block needs n >= 2".into()));
    }
    let mut h = Matrix::zeros(n);
    for k in 0..n {
        h[(k, k)] = omega_ep;
        if k + 1 < n {
            h[(k, k + 1)] = C64::new(1.0, 0.0);
        }
    }
    Ok(NearEPModel {
        h_at_ep: h,
        h_prime: unit_entry(n, n - 1, 0),
        omega_ep,
        order: n,
        truncated: true,
    })
}

/// Triangular 3x3 with an order-2 degeneracy at 0 and one spectator at `d`:
/// rows ((0, a, b), (0, 0, c), (0, 0, d)).
pub fn example_3x3(a: C64, b: C64, c: C64, d: C64) -> Result<NearEPModel> {
    if a.norm() == 0.0 {
        return Err(Error::BadModelParams("a = 0 drops the order-2 structure".into()));
    }
    if d.norm() == 0.0 {
        return Err(Error::BadModelParams("d = 0 merges the spectator into the degeneracy".into()));
    }
    let zero = C64::new(0.0, 0.0);
    let h = Matrix::from_rows(&[
        vec![zero, a, b],
        vec![zero, zero, c],
        vec![zero, zero, d],
    ])?;
    Ok(NearEPModel {
        h_at_ep: h,
        h_prime: unit_entry(3, 1, 0),
        omega_ep: zero,
        order: 2,
        truncated: false,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Params4x4 {
    pub a1: C64,
    pub a2: C64,
    pub a3: C64,
    pub b1: C64,
    pub b2: C64,
    pub c1: C64,
    pub omega: C64,
}

impl Params4x4 {
    pub fn real(vals: [f64; 7]) -> Params4x4 {
        let c = |x: f64| C64::new(x, 0.0);
        Params4x4 {
            a1: c(vals[0]),
            a2: c(vals[1]),
            a3: c(vals[2]),
            b1: c(vals[3]),
            b2: c(vals[4]),
            c1: c(vals[5]),
            omega: c(vals[6]),
        }
    }
}

/// Four states participating pairwise in two order-2 degeneracies, one at 0
/// and one at `omega`:
/// rows ((0, a1, a2, a3), (0, 0, b1, b2), (0, 0, omega, c1), (0, 0, 0, omega)).
pub fn example_4x4(p: &Params4x4) -> Result<NearEPModel> {
    if p.a1.norm() == 0.0 || p.c1.norm() == 0.0 || p.omega.norm() == 0.0 {
        return Err(Error::BadModelParams("a1, c1, omega must all be nonzero".into()));
    }
    let zero = C64::new(0.0, 0.0);
    let h = Matrix::from_rows(&[
        vec![zero, p.a1, p.a2, p.a3],
        vec![zero, zero, p.b1, p.b2],
        vec![zero, zero, p.omega, p.c1],
        vec![zero, zero, zero, p.omega],
    ])?;
    Ok(NearEPModel {
        h_at_ep: h,
        h_prime: unit_entry(4, 3, 0),
        omega_ep: zero,
        order: 2,
        truncated: false,
    })
}

/// The standard parameter point (1,2,3,4,5,6,7) used by the golden tests.
pub fn example_4x4_default() -> (Matrix, Params4x4) {
    let p = Params4x4::real([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
    (example_4x4(&p).unwrap().h_at_ep, p)
}

/// Closed-form reference data for the 4x4 model: the two eigenvector pairs,
/// the two one-sided adjugates, and the two finite adjugate elements.
#[derive(Debug, Clone)]
pub struct Golden4x4 {
    pub r12: Vector,
    pub l12: Vector,
    pub r34: Vector,
    pub l34: Vector,
    pub adj_neg_h: Matrix,
    pub adj_omega_minus_h: Matrix,
    pub a12_abs: f64,
    pub a34_abs: f64,
}

pub fn example_4x4_golden(p: &Params4x4) -> Golden4x4 {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let om = p.omega;
    let r12 = vec![one, zero, zero, zero];
    // stored as the vector whose conjugate transpose left-multiplies H
    let l12_row = [zero, om, -p.b1, (p.b1 * p.c1 - p.b2 * om) / om];
    let l12: Vector = l12_row.iter().map(|x| x.conj()).collect();
    let r34 = vec![(p.a1 * p.b1 + p.a2 * om) / om, p.b1, om, zero];
    let l34 = vec![zero, zero, zero, one];
    let mut adj_neg_h = Matrix::zeros(4);
    adj_neg_h[(0, 1)] = p.a1 * om * om;
    adj_neg_h[(0, 2)] = -p.a1 * p.b1 * om;
    adj_neg_h[(0, 3)] = p.a1 * (p.b1 * p.c1 - p.b2 * om);
    let mut adj_om = Matrix::zeros(4);
    adj_om[(0, 3)] = (p.a1 * p.b1 + p.a2 * om) * p.c1;
    adj_om[(1, 3)] = om * p.b1 * p.c1;
    adj_om[(2, 3)] = om * om * p.c1;
    let a12_abs = (p.a1 * om).norm()
        * ((om * om).norm()
            + p.b1.norm_sqr()
            + (p.b1 * p.c1 - p.b2 * om).norm_sqr() / om.norm_sqr())
        .sqrt();
    let a34_abs = (p.c1 * om).norm()
        * ((om * om).norm()
            + p.b1.norm_sqr()
            + (p.a1 * p.b1 + p.a2 * om).norm_sqr() / om.norm_sqr())
        .sqrt();
    Golden4x4 { r12, l12, r34, l34, adj_neg_h, adj_omega_minus_h: adj_om, a12_abs, a34_abs }
}

fn random_phase<R: Rng>(rng: &mut R) -> C64 {
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::new(theta.cos(), theta.sin())
}

/// Seeded random upper-triangular model with an order-`n` degenerate leading
/// block and `m - n` spectator states separated from the degeneracy by at
/// least `spectator_spread`.
pub fn random_near_ep(m: usize, n: usize, seed: u64, spectator_spread: f64) -> Result<NearEPModel> {
    if n < 2 || n > m {
        return Err(Error::BadModelParams(format!("need 2 <= n <= m, got n={n}, m={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega_ep = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    let mut h = Matrix::zeros(m);
    for k in 0..n {
        h[(k, k)] = omega_ep;
    }
    // nonzero superdiagonal keeps the nilpotency index exactly n; amplitudes
    // stay near 1 and the higher off-diagonals stay weak so that the
    // leading-order asymptotics dominate at accessible detunings
    for k in 0..n - 1 {
        h[(k, k + 1)] = rng.gen_range(0.8..1.2) * random_phase(&mut rng);
    }
    for k in 0..n {
        for l in k + 2..n {
            h[(k, l)] = 0.15 * rng.gen_range(-1.0..1.0) * random_phase(&mut rng);
        }
    }
    // spectator eigenvalues on a fanned-out arc around the degeneracy
    let spectators = m - n;
    for (j, k) in (n..m).enumerate() {
        let radius = spectator_spread * (1.0 + 0.4 * j as f64 + rng.gen_range(0.0..0.2));
        let theta = std::f64::consts::TAU * (j as f64 + rng.gen_range(0.1..0.9)) / spectators as f64;
        h[(k, k)] = omega_ep + radius * C64::new(theta.cos(), theta.sin());
    }
    // couplings into and among the spectators
    for k in 0..m {
        for l in k.max(n - 1) + 1..m {
            if l >= n {
                h[(k, l)] = 0.3 * rng.gen_range(-1.0..1.0) * random_phase(&mut rng);
            }
        }
    }
    // dense random perturbation, dominated by the chain-closing corner of
    // the degenerate block: this keeps the lifted eigenvalues on the root
    // circle while the subleading couplings stay well inside the asymptotic
    // regime at accessible detunings
    let mut hp = crate::linalg::random_matrix(&mut rng, m).scale(C64::new(0.15, 0.0));
    hp[(n - 1, 0)] += random_phase(&mut rng);
    let norm = two_norm(&hp)?;
    hp = hp.scale(C64::new(1.0 / norm, 0.0));
    Ok(NearEPModel { h_at_ep: h, h_prime: hp, omega_ep, order: n, truncated: n == m })
}
