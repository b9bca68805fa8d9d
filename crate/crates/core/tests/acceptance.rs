//! Acceptance suite. Each test covers one numbered criterion and prints a
//! single pass/fail line (visible with `cargo test --test acceptance --
//! --nocapture`); a failing criterion panics with the same line.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidity_core::adjugate::{adjugate, AdjugateMethod};
use rigidity_core::charpoly::{eval_p_prime, faddeev_leverrier};
use rigidity_core::ep::{
    asymptotic_rigidity_general, cluster_eigenvalues, cluster_tolerance, ep_vectors,
    equipartition_check, secular_shift, xi,
};
use rigidity_core::linalg::{det, inner, matmul, random_matrix, vec_norm, Matrix, C64};
use rigidity_core::models;
use rigidity_core::oracle;
use rigidity_core::spectral::{eigensystem, eigenvalues};

fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

/// Prints the criterion verdict line and panics on failure.
fn verdict(number: usize, name: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("criterion {number:2} ({name}): PASS");
    } else {
        println!("criterion {number:2} ({name}): FAIL — {}", failures.join("; "));
        panic!("criterion {number} ({name}) failed: {}", failures.join("; "));
    }
}

/// Seeded random matrix rejected until its spectrum is comfortably simple,
/// so the direct and exact rigidity routes are both well defined.
fn random_diagonalizable(seed: u64, dim: usize) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let h = random_matrix(&mut rng, dim);
        let vals = eigenvalues(&h).unwrap();
        let mut min_sep = f64::INFINITY;
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                min_sep = min_sep.min((vals[i] - vals[j]).norm());
            }
        }
        if min_sep > 1e-2 {
            return h;
        }
    }
}

#[test]
fn criterion_01_exact_reformulation_matches_direct_rigidity() {
    let mut failures = Vec::new();
    for trial in 0..500u64 {
        let dim = 2 + (trial % 9) as usize; // 2..10
        let h = random_diagonalizable(1000 + trial, dim);
        let es = eigensystem(&h).unwrap();
        for pair in &es.pairs {
            let exact = match pair.rigidity_exact {
                Some(r) => r,
                None => {
                    failures.push(format!("trial {trial}: exact route unavailable"));
                    continue;
                }
            };
            let rel = (exact - pair.rigidity).norm() / pair.rigidity.norm();
            if rel > 1e-9 {
                failures.push(format!(
                    "trial {trial} dim {dim} value {}: relative gap {rel:.3e}",
                    pair.value
                ));
            }
        }
        if failures.len() > 3 {
            break;
        }
    }
    verdict(1, "exact rigidity reformulation", failures);
}

#[test]
fn criterion_02_resolvent_identity_entrywise() {
    let mut failures = Vec::new();
    for trial in 0..100u64 {
        let dim = 2 + (trial % 7) as usize; // 2..8
        let h = random_diagonalizable(2000 + trial, dim);
        let cp = faddeev_leverrier(&h);
        let es = eigensystem(&h).unwrap();
        for pair in &es.pairs {
            let adj = adjugate(&h.shifted_from(pair.value), AdjugateMethod::Cofactor)
                .unwrap()
                .adj;
            let overlap = inner(&pair.left, &pair.right);
            let pp = eval_p_prime(&cp, pair.value);
            let mut scale = 0.0f64;
            for k in 0..dim {
                for l in 0..dim {
                    scale = scale.max((adj[(k, l)] * overlap).norm());
                }
            }
            for k in 0..dim {
                for l in 0..dim {
                    let lhs = adj[(k, l)] * overlap;
                    let rhs = pair.right[k] * pair.left[l].conj() * pp;
                    if (lhs - rhs).norm() > 1e-8 * scale {
                        failures.push(format!(
                            "trial {trial} entry ({k},{l}): {:.3e} rel",
                            (lhs - rhs).norm() / scale
                        ));
                    }
                }
            }
        }
        if failures.len() > 3 {
            break;
        }
    }
    verdict(2, "resolvent adjugate-dyad identity", failures);
}

#[test]
fn criterion_03_jordan_closed_form() {
    let mut failures = Vec::new();
    for &eps in &[1e-2, 1e-4, 1e-6, 1e-8] {
        let h = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![eps, 0.0]]).unwrap();
        let es = eigensystem(&h).unwrap();
        let expected = 2.0 * eps.sqrt() / (1.0 + eps);
        for pair in &es.pairs {
            let r = pair.rigidity.norm();
            let rel = (r - expected).abs() / expected;
            if rel > 1e-10 {
                failures.push(format!("eps {eps:.0e}: |r| off by {rel:.3e} rel"));
            }
            let asymptote_ratio = r / (2.0 * eps.sqrt());
            if (asymptote_ratio - 1.0).abs() > eps {
                failures.push(format!(
                    "eps {eps:.0e}: asymptote ratio deviates by {:.3e}",
                    (asymptote_ratio - 1.0).abs()
                ));
            }
        }
    }
    verdict(3, "order-2 Jordan closed form", failures);
}

#[test]
fn criterion_04_three_state_prediction() {
    let mut failures = Vec::new();
    let eps = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let draw = |rng: &mut ChaCha8Rng| {
        let mag = rng.gen_range(0.5..1.5);
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        mag * c(th.cos(), th.sin())
    };
    for trial in 0..20 {
        let (a, b, cc) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let d = draw(&mut rng) + c(1.0, 0.0); // keep the spectator separated
        let m = models::example_3x3(a, b, cc, d).unwrap();
        let es = eigensystem(&m.at(eps)).unwrap();
        for pair in &es.pairs {
            if (pair.value - d).norm() < 0.5 {
                continue; // spectator state
            }
            let predicted =
                (2.0 * pair.value / a).norm() * d.norm() / (cc.norm_sqr() + d.norm_sqr()).sqrt();
            let ratio = pair.rigidity.norm() / predicted;
            if (ratio - 1.0).abs() > 1e-3 {
                failures.push(format!(
                    "trial {trial}: ratio deviates by {:.3e}",
                    (ratio - 1.0).abs()
                ));
            }
        }
    }
    verdict(4, "three-state asymptote", failures);
}

#[test]
fn criterion_05_xi_triple_identity() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for trial in 0..100 {
        let n = rng.gen_range(2..=8usize);
        let mut t = Matrix::zeros(n);
        for k in 0..n {
            for l in k + 1..n {
                t[(k, l)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        for k in 0..n - 1 {
            if t[(k, k + 1)].norm() < 0.1 {
                t[(k, k + 1)] = c(rng.gen_range(0.5..1.5), 0.0);
            }
        }
        // xi() itself enforces the triple identity at 1e-10 relative
        if let Err(e) = xi(&t, n) {
            failures.push(format!("trial {trial} n {n}: {e}"));
        }
    }
    verdict(5, "xi triple identity", failures);
}

#[test]
fn criterion_06_general_asymptote_ensemble() {
    let mut failures = Vec::new();
    for trial in 0..100u64 {
        let n = 2 + (trial % 3) as usize; // 2..4
        let m = n + (trial % 5) as usize * (10 - n) / 4; // up to 10
        let model = models::random_near_ep(m.min(10), n, 6000 + trial, 2.5).unwrap();
        let (r_ep, l_ep) = ep_vectors(&model.h_at_ep, model.omega_ep).unwrap();
        let mut deviations = Vec::new();
        for &eps in &[1e-4, 1e-6, 1e-8] {
            let h = model.at(eps);
            let es = eigensystem(&h).unwrap();
            let tol = cluster_tolerance(eps, n, 1.0);
            let clusters = cluster_eigenvalues(&es.values(), tol);
            let cluster = match clusters.iter().find(|cl| {
                cl.indices.len() == n && (cl.center - model.omega_ep).norm() < 10.0 * tol
            }) {
                Some(cl) => cl,
                None => {
                    failures.push(format!("trial {trial} eps {eps:.0e}: cluster not found"));
                    continue;
                }
            };
            let mut worst = 0.0f64;
            for &idx in &cluster.indices {
                let pair = &es.pairs[idx];
                let predicted = asymptotic_rigidity_general(
                    &model.h_at_ep,
                    model.omega_ep,
                    &r_ep,
                    &l_ep,
                    pair.value,
                )
                .unwrap();
                worst = worst.max((pair.rigidity.norm() / predicted - 1.0).abs());
            }
            deviations.push(worst);
        }
        if deviations.len() == 3 {
            if !(deviations[0] > deviations[1] && deviations[1] > deviations[2]) {
                failures.push(format!(
                    "trial {trial} n {n}: deviations not decreasing {deviations:?}"
                ));
            }
            if deviations[2] > 1e-2 {
                failures.push(format!(
                    "trial {trial} n {n}: final deviation {:.3e}",
                    deviations[2]
                ));
            }
        }
        if failures.len() > 5 {
            break;
        }
    }
    verdict(6, "general asymptote ensemble", failures);
}

#[test]
fn criterion_07_equipartition() {
    let mut failures = Vec::new();
    for trial in 0..40u64 {
        let n = 2 + (trial % 2) as usize; // 2 or 3
        let m = n + (trial % 4) as usize;
        let model = models::random_near_ep(m, n, 7000 + trial, 2.5).unwrap();
        let mut deviations = Vec::new();
        for &eps in &[1e-4, 1e-6, 1e-8] {
            let h = model.at(eps);
            let es = eigensystem(&h).unwrap();
            let tol = cluster_tolerance(eps, n, 1.0);
            let clusters = cluster_eigenvalues(&es.values(), tol);
            let cluster = match clusters.iter().find(|cl| {
                cl.indices.len() == n && (cl.center - model.omega_ep).norm() < 10.0 * tol
            }) {
                Some(cl) => cl,
                None => {
                    failures.push(format!("trial {trial} eps {eps:.0e}: cluster not found"));
                    continue;
                }
            };
            let mut worst = 0.0f64;
            for &idx in &cluster.indices {
                let pair = &es.pairs[idx];
                let report = equipartition_check(
                    &model.h_at_ep,
                    model.omega_ep,
                    n,
                    tol,
                    &pair.right,
                    &pair.left,
                )
                .unwrap();
                worst = worst.max(report.max_rel_deviation);
            }
            deviations.push(worst);
        }
        if deviations.len() == 3 {
            if !(deviations[0] > deviations[1] && deviations[1] > deviations[2]) {
                failures.push(format!(
                    "trial {trial} n {n}: deviations not decreasing {deviations:?}"
                ));
            }
            if deviations[2] > 1e-3 {
                failures.push(format!(
                    "trial {trial} n {n}: final deviation {:.3e}",
                    deviations[2]
                ));
            }
        }
        if failures.len() > 5 {
            break;
        }
    }
    verdict(7, "equipartition in the normal-form basis", failures);
}

#[test]
fn criterion_08_two_ep_golden_data() {
    let mut failures = Vec::new();
    let (h, p) = models::example_4x4_default();
    let golden = models::example_4x4_golden(&p);

    // adjugates at both degeneracy points, oracle-confirmed
    let adj0 = adjugate(&h.shifted_from(c(0.0, 0.0)), AdjugateMethod::Both).unwrap().adj;
    let adj_om = adjugate(&h.shifted_from(p.omega), AdjugateMethod::Both).unwrap().adj;
    let wide0 = oracle::oracle_adjugate(&h.scale(c(-1.0, 0.0))).unwrap().to_matrix();
    let wide_om = oracle::oracle_adjugate(&h.shifted_from(p.omega)).unwrap().to_matrix();
    for k in 0..4 {
        for l in 0..4 {
            for (tag, got, want) in [
                ("adj(-H) golden", adj0[(k, l)], golden.adj_neg_h[(k, l)]),
                ("adj(-H) oracle", adj0[(k, l)], wide0[(k, l)]),
                ("adj(OI-H) golden", adj_om[(k, l)], golden.adj_omega_minus_h[(k, l)]),
                ("adj(OI-H) oracle", adj_om[(k, l)], wide_om[(k, l)]),
            ] {
                if (got - want).norm() > 1e-10 * (1.0 + want.norm()) {
                    failures.push(format!("{tag} entry ({k},{l}) off"));
                }
            }
        }
    }

    // the two adjugate-element denominators in closed form
    let r12 = rigidity_core::linalg::normalize_phase_fixed(&golden.r12).unwrap();
    let l12 = rigidity_core::linalg::normalize_phase_fixed(&golden.l12).unwrap();
    let r34 = rigidity_core::linalg::normalize_phase_fixed(&golden.r34).unwrap();
    let l34 = rigidity_core::linalg::normalize_phase_fixed(&golden.l34).unwrap();
    let a12 = rigidity_core::adjugate::adjugate_element(&r12, &l12, &h.shifted_from(c(0.0, 0.0)))
        .unwrap()
        .norm();
    let a34 = rigidity_core::adjugate::adjugate_element(&r34, &l34, &h.shifted_from(p.omega))
        .unwrap()
        .norm();
    if (a12 - golden.a12_abs).abs() > 1e-10 * golden.a12_abs {
        failures.push(format!("|A_12| {a12} vs {}", golden.a12_abs));
    }
    if (a34 - golden.a34_abs).abs() > 1e-10 * golden.a34_abs {
        failures.push(format!("|A_34| {a34} vs {}", golden.a34_abs));
    }

    // secular shifts against oracle eigenvalues of the perturbed matrix
    let mut h_prime = Matrix::zeros(4);
    h_prime[(3, 0)] = c(1.0, 0.0);
    let mut last_ratio = f64::INFINITY;
    for &eps in &[1e-4, 1e-6, 1e-8] {
        let perturbed = h.add(&h_prime.scale(c(eps, 0.0))).unwrap();
        let (oracle_vals, _, _) = oracle::oracle_eigen(&perturbed).unwrap();
        let actual: Vec<C64> = oracle_vals.iter().map(|w| w.to_c64()).collect();
        let predicted =
            secular_shift(&h, &h_prime, eps, c(0.0, 0.0), 2, &[p.omega, p.omega]).unwrap();
        let delta = predicted[0].norm();
        let mut worst = 0.0f64;
        for pr in &predicted {
            let best = actual.iter().map(|a| (a - pr).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(best / delta);
        }
        // o(|delta|): the relative error must shrink as delta does
        if worst >= last_ratio {
            failures.push(format!("eps {eps:.0e}: error/|delta| {worst:.3e} not shrinking"));
        }
        if worst > 0.1 {
            failures.push(format!("eps {eps:.0e}: error {worst:.3e} of |delta|"));
        }
        last_ratio = worst;
    }
    verdict(8, "two-EP golden data", failures);
}

#[test]
fn criterion_09_product_rule() {
    let mut failures = Vec::new();
    let eps = 1e-8;
    for (i, &n) in [2usize, 3, 4].iter().enumerate() {
        let omega_ep = c(0.3 * i as f64, -0.1 * i as f64);
        let model = models::jordan_block(n, omega_ep).unwrap();
        let vals = eigenvalues(&model.at(eps)).unwrap();
        for (idx, &li) in vals.iter().enumerate() {
            let mut prod = c(1.0, 0.0);
            for (j, &lj) in vals.iter().enumerate() {
                if j != idx {
                    prod *= li - lj;
                }
            }
            let denom = (n as f64) * (li - omega_ep).powu(n as u32 - 1);
            let ratio = prod / denom;
            if (ratio - c(1.0, 0.0)).norm() > 1e-2 {
                failures.push(format!(
                    "n {n} root {idx}: ratio off by {:.3e}",
                    (ratio - c(1.0, 0.0)).norm()
                ));
            }
        }
    }
    verdict(9, "spectator-free derivative product rule", failures);
}

#[test]
fn criterion_10_oracle_equivalence() {
    let mut failures = Vec::new();
    for trial in 0..20u64 {
        let dim = 2 + (trial % 7) as usize; // 2..8
        let h = random_diagonalizable(10_000 + trial, dim);

        // determinant
        let main_det = det(&h);
        let wide_det = oracle::oracle_det(&h).unwrap().to_c64();
        if (main_det - wide_det).norm() > 1e-10 * wide_det.norm().max(1e-300) {
            failures.push(format!("trial {trial}: det mismatch"));
        }

        // adjugate, both main routes
        let wide_adj = oracle::oracle_adjugate(&h).unwrap().to_matrix();
        let scale = wide_adj.max_row_norm().max(f64::MIN_POSITIVE);
        for method in [AdjugateMethod::Cofactor, AdjugateMethod::Faddeev] {
            let adj = adjugate(&h, method).unwrap().adj;
            let gap = adj.sub(&wide_adj).unwrap().max_row_norm();
            if gap > 1e-9 * scale {
                failures.push(format!("trial {trial}: adjugate {method:?} off by {gap:.3e}"));
            }
        }

        // eigenvalues and eigenvectors
        let es = eigensystem(&h).unwrap();
        let (wide_vals, wide_rights, wide_lefts) = oracle::oracle_eigen(&h).unwrap();
        let vals: Vec<C64> = wide_vals.iter().map(|w| w.to_c64()).collect();
        let narrow = |vs: &[Vec<oracle::WideScalar>]| -> Vec<Vec<C64>> {
            vs.iter().map(|v| v.iter().map(|w| w.to_c64()).collect()).collect()
        };
        let (wide_rights, wide_lefts) = (narrow(&wide_rights), narrow(&wide_lefts));
        for pair in &es.pairs {
            let (j, _) = vals
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (*a - pair.value).norm().partial_cmp(&(*b - pair.value).norm()).unwrap()
                })
                .unwrap();
            if (vals[j] - pair.value).norm() > 1e-8 * (1.0 + pair.value.norm()) {
                failures.push(format!("trial {trial}: eigenvalue gap at {}", pair.value));
            }
            for (mine, theirs) in
                [(&pair.right, &wide_rights[j]), (&pair.left, &wide_lefts[j])]
            {
                let proj = inner(theirs, mine);
                let resid: Vec<C64> =
                    mine.iter().zip(theirs).map(|(&a, &b)| a - proj * b).collect();
                let angle = vec_norm(&resid);
                if angle > 1e-8 {
                    failures.push(format!("trial {trial}: eigenvector angle {angle:.3e}"));
                }
            }
        }

        // matrix product round-trip sanity on the same corpus
        let prod = matmul(&h, &h).unwrap();
        let wide_prod = oracle::oracle_matmul(&h, &h);
        if prod.sub(&wide_prod).unwrap().max_row_norm() > 1e-12 * prod.max_row_norm() {
            failures.push(format!("trial {trial}: matmul mismatch"));
        }
        if failures.len() > 5 {
            break;
        }
    }
    verdict(10, "oracle equivalence", failures);
}
