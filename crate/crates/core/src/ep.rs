//! Exceptional-point analysis: quasi-degenerate clustering, complex Schur
//! normal form with eigenvalue reordering, the characteristic number xi,
//! asymptotic rigidity predictions (truncated and general), the overlap and
//! equipartition relations, and first-order secular shifts.

use crate::adjugate::{adjugate, minor, AdjugateMethod};
use crate::charpoly::{eval_p_prime, faddeev_leverrier};
use crate::error::{Error, Result};
use crate::linalg::{
    det, hessenberg, inner, matmul, normalize_phase_fixed, two_norm, vec_norm, Matrix, Vector, C64,
};
use crate::spectral::{eigensystem, eigvec_from_adjugate, Eigensystem, Side};

const QR_ITER_PER_EIGENVALUE: usize = 60;

/// Unitary triangularization `q^H h q = t`.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: Matrix,
    pub t: Matrix,
}

impl SchurForm {
    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.t.dim()).map(|k| self.t[(k, k)]).collect()
    }
}

fn givens(x: C64, y: C64) -> (C64, C64) {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    } else {
        (x / r, y / r)
    }
}

fn apply_givens_left(t: &mut Matrix, k: usize, cs: C64, sn: C64, col0: usize) {
    let n = t.dim();
    for j in col0..n {
        let (p, q) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = cs.conj() * p + sn.conj() * q;
        t[(k + 1, j)] = -sn * p + cs * q;
    }
}

fn apply_givens_right(t: &mut Matrix, k: usize, cs: C64, sn: C64) {
    let n = t.dim();
    for i in 0..n {
        let (p, q) = (t[(i, k)], t[(i, k + 1)]);
        t[(i, k)] = p * cs + q * sn;
        t[(i, k + 1)] = -p * sn.conj() + q * cs.conj();
    }
}

/// Complex Schur decomposition: Hessenberg reduction, then shifted QR with
/// deflation, accumulating the unitary similarity.
pub fn schur(h: &Matrix) -> Result<SchurForm> {
    let n = h.dim();
    let (mut q, mut t) = hessenberg(h);
    if n == 1 {
        return Ok(SchurForm { q, t });
    }
    let scale = t.max_row_norm().max(f64::MIN_POSITIVE);
    let negligible = |t: &Matrix, k: usize| -> bool {
        t[(k, k - 1)].norm()
            <= f64::EPSILON * (t[(k - 1, k - 1)].norm() + t[(k, k)].norm()).max(1e-3 * f64::EPSILON * scale)
    };
    let mut hi = n - 1;
    let mut stuck = 0usize;
    let mut total = 0usize;
    let cap = QR_ITER_PER_EIGENVALUE * n;
    loop {
        // deflate converged trailing eigenvalues
        while hi > 0 && negligible(&t, hi) {
            t[(hi, hi - 1)] = C64::new(0.0, 0.0);
            hi -= 1;
            stuck = 0;
        }
        if hi == 0 {
            break;
        }
        // active block [lo, hi]
        let mut lo = hi;
        while lo > 0 && !negligible(&t, lo) {
            lo -= 1;
        }
        if lo > 0 {
            t[(lo, lo - 1)] = C64::new(0.0, 0.0);
        }
        total += 1;
        stuck += 1;
        if total > cap {
            return Err(Error::NoConvergence { what: "schur QR", iterations: cap });
        }
        // Wilkinson shift from the trailing 2x2, with an occasional
        // exceptional shift to break symmetry stalls
        let (a, b, c, d) =
            (t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)]);
        let mu = if stuck % 12 == 11 {
            d + C64::new(0.75 * c.norm() + 1e-3 * scale, 0.1 * c.norm())
        } else {
            let tr = a + d;
            let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
            let e1 = (tr + disc) * 0.5;
            let e2 = (tr - disc) * 0.5;
            if (e1 - d).norm() < (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        for k in lo..=hi {
            t[(k, k)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (cs, sn) = givens(t[(k, k)], t[(k + 1, k)]);
            apply_givens_left(&mut t, k, cs, sn, k);
            t[(k + 1, k)] = C64::new(0.0, 0.0);
            rotations.push((k, cs, sn));
        }
        for &(k, cs, sn) in &rotations {
            apply_givens_right(&mut t, k, cs, sn);
            apply_givens_right(&mut q, k, cs, sn);
        }
        for k in lo..=hi {
            t[(k, k)] += mu;
        }
    }
    // scrub roundoff below the diagonal
    for r in 0..n {
        for col in 0..r {
            t[(r, col)] = C64::new(0.0, 0.0);
        }
    }
    Ok(SchurForm { q, t })
}

/// Unitary swap of the adjacent diagonal entries `k` and `k+1` of `t`.
fn swap_adjacent(sf: &mut SchurForm, k: usize) {
    let a = sf.t[(k, k)];
    let b = sf.t[(k, k + 1)];
    let d = sf.t[(k + 1, k + 1)];
    // eigenvector of the 2x2 block for eigenvalue d
    let v = [b, d - a];
    let nv = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    if nv == 0.0 {
        return; // coincident entries, nothing to move
    }
    let v0 = v[0] / nv;
    let v1 = v[1] / nv;
    // unitary with first column (v0, v1)
    let g = [[v0, -v1.conj()], [v1, v0.conj()]];
    let n = sf.t.dim();
    // t <- G^H t G on rows/cols k, k+1
    for j in 0..n {
        let (p, q) = (sf.t[(k, j)], sf.t[(k + 1, j)]);
        sf.t[(k, j)] = g[0][0].conj() * p + g[1][0].conj() * q;
        sf.t[(k + 1, j)] = g[0][1].conj() * p + g[1][1].conj() * q;
    }
    for i in 0..n {
        let (p, q) = (sf.t[(i, k)], sf.t[(i, k + 1)]);
        sf.t[(i, k)] = p * g[0][0] + q * g[1][0];
        sf.t[(i, k + 1)] = p * g[0][1] + q * g[1][1];
    }
    for i in 0..sf.q.dim() {
        let (p, q) = (sf.q[(i, k)], sf.q[(i, k + 1)]);
        sf.q[(i, k)] = p * g[0][0] + q * g[1][0];
        sf.q[(i, k + 1)] = p * g[0][1] + q * g[1][1];
    }
    sf.t[(k + 1, k)] = C64::new(0.0, 0.0);
}

/// Moves the selected diagonal entries to the leading block, preserving
/// their relative order.
pub fn reorder_to_front(sf: &mut SchurForm, selected: &[bool]) {
    let n = sf.t.dim();
    let mut sel = selected.to_vec();
    let mut target = 0usize;
    for i in 0..n {
        if sel[i] {
            let mut pos = i;
            while pos > target {
                swap_adjacent(sf, pos - 1);
                sel.swap(pos - 1, pos);
                pos -= 1;
            }
            target += 1;
        }
    }
}

/// A quasi-degenerate eigenvalue group.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub indices: Vec<usize>,
    pub values: Vec<C64>,
    /// Arithmetic mean; leading-order estimate of the degeneracy point.
    pub center: C64,
}

/// Single-linkage clustering on complex distance. Groups of size >= 2 are
/// EP candidates.
pub fn cluster_eigenvalues(values: &[C64], tol: f64) -> Vec<Cluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .map(|indices| {
            let vals: Vec<C64> = indices.iter().map(|&i| values[i]).collect();
            let center = vals.iter().sum::<C64>() / vals.len() as f64;
            Cluster { indices, values: vals, center }
        })
        .collect();
    clusters.sort_by(|a, b| {
        (a.center.re, a.center.im).partial_cmp(&(b.center.re, b.center.im)).unwrap()
    });
    clusters
}

/// Default clustering tolerance for a detuning `eps` and guessed order `n`:
/// the eigenvalue spread scales as `eps^(1/n)`.
pub fn cluster_tolerance(eps: f64, n_guess: usize, scale: f64) -> f64 {
    (10.0 * eps.powf(1.0 / n_guess as f64)).max(1e-6) * scale
}

/// Right/left eigenvector pair at a defective eigenvalue, with the EP
/// self-orthogonality verified.
pub fn ep_vectors(h_ep: &Matrix, omega_ep: C64) -> Result<(Vector, Vector)> {
    ep_vectors_with_tol(h_ep, omega_ep, 1e-8)
}

pub fn ep_vectors_with_tol(
    h_ep: &Matrix,
    omega_ep: C64,
    self_orth_tol: f64,
) -> Result<(Vector, Vector)> {
    let r = eigvec_from_adjugate(h_ep, omega_ep, Side::Right, None)?;
    let l = eigvec_from_adjugate(h_ep, omega_ep, Side::Left, None)?;
    let overlap = inner(&l, &r).norm();
    if overlap > self_orth_tol {
        return Err(Error::NotDefective { value: omega_ep, overlap });
    }
    Ok((r, l))
}

/// `xi = ||N^{n-1}||_2` for a truncated triangular normal-form block, with
/// the triple identity `|p_n1(T)| = |prod T_{k,k+1}| = ||N^{n-1}||_2`
/// asserted to `identity_tol` relative.
pub fn xi(t_block: &Matrix, n: usize) -> Result<f64> {
    xi_with_tol(t_block, n, 1e-10)
}

pub fn xi_with_tol(t_block: &Matrix, n: usize, identity_tol: f64) -> Result<f64> {
    if t_block.dim() != n || n < 2 {
        return Err(Error::DimensionMismatch(format!(
            "xi block must be n x n with n >= 2, got {} vs {n}",
            t_block.dim()
        )));
    }
    let omega_ep = (0..n).map(|k| t_block[(k, k)]).sum::<C64>() / n as f64;
    let nil = t_block.shifted_from(omega_ep).scale(C64::new(-1.0, 0.0));
    let mut power = nil.clone();
    for _ in 0..n.saturating_sub(2) {
        power = matmul(&power, &nil)?;
    }
    let xi_norm = two_norm(&power)?;
    let superdiag: C64 = (0..n - 1).fold(C64::new(1.0, 0.0), |acc, k| acc * nil[(k, k + 1)]);
    let corner = minor(&nil, n - 1, 0)?;
    let scale = xi_norm.max(superdiag.norm()).max(corner.norm()).max(f64::MIN_POSITIVE);
    if (xi_norm - superdiag.norm()).abs() > identity_tol * scale
        || (xi_norm - corner.norm()).abs() > identity_tol * scale
    {
        return Err(Error::NormalFormInconsistent(format!(
            "||N^(n-1)|| = {xi_norm:.6e}, |prod superdiag| = {:.6e}, |p_n1| = {:.6e}",
            superdiag.norm(),
            corner.norm()
        )));
    }
    Ok(xi_norm)
}

/// Truncated asymptote: `|n (w_i - w_EP)^{n-1} / xi|`.
pub fn asymptotic_rigidity_truncated(omega_i: C64, omega_ep: C64, n: usize, xi: f64) -> f64 {
    (n as f64) * (omega_i - omega_ep).norm().powi(n as i32 - 1) / xi
}

/// Orthonormal basis whose first column is `first` and last is `last`
/// (assumed orthogonal), completed by Gram-Schmidt over canonical vectors.
fn completed_basis(first: &[C64], last: &[C64]) -> Matrix {
    let m = first.len();
    let mut cols: Vec<Vector> = vec![first.to_vec()];
    // orthogonalize last against first in case the inputs are only
    // numerically self-orthogonal
    let mut l = last.to_vec();
    let proj = inner(first, &l);
    for (lk, fk) in l.iter_mut().zip(first) {
        *lk -= proj * fk;
    }
    let nl = vec_norm(&l);
    l.iter_mut().for_each(|c| *c /= nl);
    let mut middle: Vec<Vector> = Vec::with_capacity(m.saturating_sub(2));
    for j in 0..m {
        if middle.len() == m - 2 {
            break;
        }
        let mut v: Vector = (0..m)
            .map(|i| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            .collect();
        for u in std::iter::once(&cols[0]).chain(std::iter::once(&l)).chain(middle.iter()) {
            let p = inner(u, &v);
            for (vi, &ui) in v.iter_mut().zip(u.iter()) {
                *vi -= p * ui;
            }
        }
        let nv = vec_norm(&v);
        if nv > 1e-4 {
            v.iter_mut().for_each(|c| *c /= nv);
            middle.push(v);
        }
    }
    cols.extend(middle);
    cols.push(l);
    let mut u = Matrix::zeros(m);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..m {
            u[(i, j)] = col[i];
        }
    }
    u
}

/// The minor denominator of the general asymptote: `|p_{L_EP R_EP}|` of
/// `omega_EP I - H_EP`, computed in an orthonormal basis containing the EP
/// vector pair.
pub fn ep_minor_denominator(
    h_ep: &Matrix,
    omega_ep: C64,
    r_ep: &[C64],
    l_ep: &[C64],
) -> Result<f64> {
    let m = h_ep.dim();
    let u = completed_basis(r_ep, l_ep);
    let transformed = matmul(&matmul(&u.adjoint(), &h_ep.shifted_from(omega_ep))?, &u)?;
    if m == 2 {
        // striking the L row and R column of a 2x2 leaves a scalar
        return Ok(transformed[(0, 1)].norm());
    }
    Ok(det(&transformed.strike(m - 1, 0)).norm())
}

/// General asymptote: `|p'(w_i)|` over the EP minor denominator. The
/// characteristic polynomial is that of the full EP matrix, no truncation.
pub fn asymptotic_rigidity_general(
    h_ep: &Matrix,
    omega_ep: C64,
    r_ep: &[C64],
    l_ep: &[C64],
    omega_i: C64,
) -> Result<f64> {
    let cp = faddeev_leverrier(h_ep);
    let pp = eval_p_prime(&cp, omega_i).norm();
    let denom = ep_minor_denominator(h_ep, omega_ep, r_ep, l_ep)?;
    Ok(pp / denom)
}

#[derive(Debug, Clone)]
pub struct EquipartitionReport {
    /// `R_k L*_k` over the cluster directions, in the normal-form basis.
    pub products: Vec<C64>,
    /// `<L_i|R_i> / n`.
    pub target: C64,
    pub max_rel_deviation: f64,
}

/// Checks the per-direction overlap equipartition of an eigenpair belonging
/// to an order-`n` cluster, in the Schur normal-form basis of `h_ep` with
/// the cluster leading.
pub fn equipartition_check(
    h_ep: &Matrix,
    omega_ep: C64,
    order: usize,
    cluster_tol: f64,
    right: &[C64],
    left: &[C64],
) -> Result<EquipartitionReport> {
    let mut sf = schur(h_ep)?;
    let diag = sf.diagonal();
    let selected: Vec<bool> = diag.iter().map(|&d| (d - omega_ep).norm() <= cluster_tol).collect();
    let found = selected.iter().filter(|&&s| s).count();
    if found != order {
        return Err(Error::ClusterMismatch(format!(
            "expected {order} normal-form directions near the cluster center, found {found}"
        )));
    }
    reorder_to_front(&mut sf, &selected);
    let qh = sf.q.adjoint();
    let r = qh.matvec(right)?;
    let l = qh.matvec(left)?;
    let target = inner(left, right) / order as f64;
    let products: Vec<C64> = (0..order).map(|k| r[k] * l[k].conj()).collect();
    let max_rel_deviation = products
        .iter()
        .map(|&p| (p - target).norm() / target.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(EquipartitionReport { products, target, max_rel_deviation })
}

/// Truncated-system overlap relation: `<L_i|R_i> / (n <L_EP|R_i>)`, which
/// tends to 1 as the detuning vanishes. Requires a nonzero detuning.
pub fn overlap_relation_check(
    l_ep: &[C64],
    order: usize,
    right: &[C64],
    left: &[C64],
) -> Result<C64> {
    let denom = inner(l_ep, right) * order as f64;
    if denom.norm() < 1e-300 {
        return Err(Error::DegenerateDenominator { value: C64::new(0.0, 0.0) });
    }
    Ok(inner(left, right) / denom)
}

/// First-order secular shifts: the `n` predicted eigenvalues
/// `omega_EP + delta zeta^j` with
/// `delta^n = eps tr(H' adj(w_EP I - H)) / prod (w_k - w_EP)`.
pub fn secular_shift(
    h_ep: &Matrix,
    h_prime: &Matrix,
    eps: f64,
    omega_ep: C64,
    order: usize,
    spectators: &[C64],
) -> Result<Vec<C64>> {
    let adj = adjugate(&h_ep.shifted_from(omega_ep), AdjugateMethod::Cofactor)?.adj;
    let trace_term = matmul(h_prime, &adj)?.trace();
    let scale = h_prime.max_row_norm().max(1.0) * h_ep.max_row_norm().max(1.0).powi(h_ep.dim() as i32 - 1);
    if trace_term.norm() <= 1e-12 * scale {
        return Err(Error::SecularTraceVanishes);
    }
    let mut spect_prod = C64::new(1.0, 0.0);
    for &w in spectators {
        spect_prod *= w - omega_ep;
    }
    if spect_prod.norm() < 1e-300 {
        return Err(Error::BadModelParams("spectator product vanishes".into()));
    }
    let delta_pow = trace_term * eps / spect_prod;
    let delta = delta_pow.powf(1.0 / order as f64);
    Ok((0..order)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / order as f64;
            omega_ep + delta * C64::new(theta.cos(), theta.sin())
        })
        .collect())
}

/// Per-cluster EP data assembled by `ep_report`.
#[derive(Debug, Clone)]
pub struct EPCluster {
    pub indices: Vec<usize>,
    pub order: usize,
    pub center: C64,
    pub r_ep: Vector,
    pub l_ep: Vector,
    pub xi: Option<f64>,
    pub minor_denominator: f64,
    pub spectators: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct PerStateReport {
    pub index: usize,
    pub value: C64,
    pub rigidity_abs: f64,
    pub rigidity_exact_abs: Option<f64>,
    /// Truncated asymptote, when a normal-form block was available.
    pub predicted_truncated: Option<f64>,
    /// General asymptote from the EP minor denominator.
    pub predicted_general: f64,
    pub ratio_general: f64,
    pub equipartition_deviation: Option<f64>,
    /// Overlap relation ratio; reported for truncated systems only.
    pub overlap_ratio: Option<C64>,
}

#[derive(Debug, Clone)]
pub struct ClusterReport {
    pub cluster: EPCluster,
    pub per_state: Vec<PerStateReport>,
}

#[derive(Debug, Clone)]
pub struct EPReport {
    pub eigensystem: Eigensystem,
    pub clusters: Vec<ClusterReport>,
}

pub struct EpReportOptions {
    pub cluster_tol: f64,
    /// Tolerance for the xi triple identity and self-orthogonality checks.
    pub identity_tol: f64,
    pub truncated: bool,
}

impl EpReportOptions {
    pub fn for_scale(scale: f64) -> EpReportOptions {
        EpReportOptions { cluster_tol: 1e-3 * scale.max(1.0), identity_tol: 1e-8, truncated: false }
    }
}

/// Full EP analysis of `h`. When `h_at_ep` is `None`, `h` itself stands in
/// for the EP-point matrix with the cluster center as `omega_EP` (a
/// leading-order approximation).
pub fn ep_report(h: &Matrix, h_at_ep: Option<&Matrix>, opts: &EpReportOptions) -> Result<EPReport> {
    let es = eigensystem(h)?;
    let values = es.values();
    let clusters = cluster_eigenvalues(&values, opts.cluster_tol);
    let ep_matrix = h_at_ep.unwrap_or(h);
    let mut reports = Vec::new();
    for cl in clusters.into_iter().filter(|c| c.indices.len() >= 2) {
        let order = cl.indices.len();
        let omega_ep = cl.center;
        let self_orth_tol = if h_at_ep.is_some() { opts.identity_tol.max(1e-8) } else { 0.2 };
        let (r_ep, l_ep) = match ep_vectors_with_tol(ep_matrix, omega_ep, self_orth_tol) {
            Ok(pair) => pair,
            // a degenerate but non-defective group (diabolic point) is not
            // an EP; report nothing for it
            Err(Error::NotDefective { .. }) | Err(Error::AllPivotsNull) => continue,
            Err(e) => return Err(e),
        };
        let minor_denominator = ep_minor_denominator(ep_matrix, omega_ep, &r_ep, &l_ep)?;
        // normal-form block for the truncated prediction
        let mut sf = schur(ep_matrix)?;
        let diag = sf.diagonal();
        let near: Vec<bool> =
            diag.iter().map(|&d| (d - omega_ep).norm() <= opts.cluster_tol).collect();
        let xi_val = if near.iter().filter(|&&s| s).count() == order {
            reorder_to_front(&mut sf, &near);
            let mut block = Matrix::zeros(order);
            for k in 0..order {
                for l in 0..order {
                    block[(k, l)] = sf.t[(k, l)];
                }
            }
            xi_with_tol(&block, order, opts.identity_tol.max(1e-6)).ok()
        } else {
            None
        };
        let spectators: Vec<C64> = values
            .iter()
            .enumerate()
            .filter(|(i, _)| !cl.indices.contains(i))
            .map(|(_, &v)| v)
            .collect();
        let mut per_state = Vec::new();
        for &idx in &cl.indices {
            let pair = &es.pairs[idx];
            let predicted_general =
                asymptotic_rigidity_general(ep_matrix, omega_ep, &r_ep, &l_ep, pair.value)?;
            let predicted_truncated = xi_val
                .map(|x| asymptotic_rigidity_truncated(pair.value, omega_ep, order, x));
            let equi = equipartition_check(
                ep_matrix,
                omega_ep,
                order,
                opts.cluster_tol,
                &pair.right,
                &pair.left,
            )
            .ok();
            let overlap_ratio = if opts.truncated {
                overlap_relation_check(&l_ep, order, &pair.right, &pair.left).ok()
            } else {
                None
            };
            let rig = pair.rigidity.norm();
            per_state.push(PerStateReport {
                index: idx,
                value: pair.value,
                rigidity_abs: rig,
                rigidity_exact_abs: pair.rigidity_exact.map(|r| r.norm()),
                predicted_truncated,
                predicted_general,
                ratio_general: if predicted_general > 0.0 { rig / predicted_general } else { f64::NAN },
                equipartition_deviation: equi.map(|e| e.max_rel_deviation),
                overlap_ratio,
            });
        }
        reports.push(ClusterReport {
            cluster: EPCluster {
                indices: cl.indices,
                order,
                center: omega_ep,
                r_ep,
                l_ep,
                xi: xi_val,
                minor_denominator,
                spectators,
            },
            per_state,
        });
    }
    Ok(EPReport { eigensystem: es, clusters: reports })
}

/// Normalized copy helper shared by callers building EP bases by hand.
pub fn unit(v: &[C64]) -> Result<Vector> {
    normalize_phase_fixed(v)
}
