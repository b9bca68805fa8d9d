//! The detuning-sweep engine and its CSV serialization.

use num_complex::Complex64;
use rigidity_core::ep::{cluster_tolerance, ep_report, EpReportOptions};
use rigidity_core::models::NearEPModel;

pub const CSV_SCHEMA: &str = "rigidity-sweep-csv v1";
pub const CSV_HEADER: &str = "eps,index,omega_re,omega_im,r_abs_direct,r_abs_exact,\
route_disagreement,pred_truncated,pred_general,ratio_truncated,ratio_general,\
equipartition_dev,petermann";

/// One row per (detuning, eigenvalue). Prediction columns are empty for
/// spectator eigenvalues outside the tracked cluster.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub eps: f64,
    pub index: usize,
    pub omega: Complex64,
    pub r_abs_direct: f64,
    pub r_abs_exact: Option<f64>,
    pub route_disagreement: f64,
    pub pred_truncated: Option<f64>,
    pub pred_general: Option<f64>,
    pub ratio_truncated: Option<f64>,
    pub ratio_general: Option<f64>,
    pub equipartition_dev: Option<f64>,
    pub petermann: f64,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

impl SweepRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{:e},{},{:e},{:e},{:e},{},{:e},{},{},{},{},{},{:e}",
            self.eps,
            self.index,
            self.omega.re,
            self.omega.im,
            self.r_abs_direct,
            opt(self.r_abs_exact),
            self.route_disagreement,
            opt(self.pred_truncated),
            opt(self.pred_general),
            opt(self.ratio_truncated),
            opt(self.ratio_general),
            opt(self.equipartition_dev),
            self.petermann,
        )
    }
}

pub struct SweepOptions {
    /// Overrides the per-eps automatic clustering tolerance.
    pub tol_cluster: Option<f64>,
    pub tol_identity: f64,
}

/// Runs the model at each detuning and tracks the cluster at the model's
/// degeneracy point. Records are in (eps, eigenvalue-index) order.
pub fn run_sweep(
    model: &NearEPModel,
    eps_list: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<SweepRecord>, String> {
    let mut records = Vec::new();
    for &eps in eps_list {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(format!("detuning must be positive and finite, got {eps}"));
        }
        let h = model.at(eps);
        let scale = 1.0 + model.omega_ep.norm();
        let tol = opts
            .tol_cluster
            .unwrap_or_else(|| cluster_tolerance(eps, model.order, scale));
        let report_opts = EpReportOptions {
            cluster_tol: tol,
            identity_tol: opts.tol_identity,
            truncated: model.truncated,
        };
        let report = ep_report(&h, Some(&model.h_at_ep), &report_opts)
            .map_err(|e| format!("eps {eps:e}: {e}"))?;
        // the cluster at the model's degeneracy point, if resolved
        let tracked = report
            .clusters
            .iter()
            .filter(|cl| (cl.cluster.center - model.omega_ep).norm() <= 10.0 * tol)
            .min_by(|a, b| {
                (a.cluster.center - model.omega_ep)
                    .norm()
                    .partial_cmp(&(b.cluster.center - model.omega_ep).norm())
                    .unwrap()
            });
        for (index, pair) in report.eigensystem.pairs.iter().enumerate() {
            let state = tracked.and_then(|cl| cl.per_state.iter().find(|st| st.index == index));
            records.push(SweepRecord {
                eps,
                index,
                omega: pair.value,
                r_abs_direct: pair.rigidity.norm(),
                r_abs_exact: pair.rigidity_exact.map(|r| r.norm()),
                route_disagreement: pair.route_disagreement,
                pred_truncated: state.and_then(|st| st.predicted_truncated),
                pred_general: state.map(|st| st.predicted_general),
                ratio_truncated: state.and_then(|st| {
                    st.predicted_truncated.map(|p| st.rigidity_abs / p)
                }),
                ratio_general: state.map(|st| st.ratio_general),
                equipartition_dev: state.and_then(|st| st.equipartition_deviation),
                petermann: pair.petermann,
            });
        }
    }
    Ok(records)
}

pub fn to_csv(records: &[SweepRecord]) -> String {
    let mut out = format!("# {CSV_SCHEMA}\n{CSV_HEADER}\n");
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
