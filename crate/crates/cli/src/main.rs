//! `rigidity`: eigenvalue condition numbers and exceptional-point analysis
//! of complex matrices from the command line.

mod format;
mod sweep;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rigidity_core::ep::{ep_report, EpReportOptions};
use rigidity_core::linalg::Matrix;
use rigidity_core::models;
use rigidity_core::oracle;

use format::MatrixFile;
use sweep::{run_sweep, to_csv, SweepOptions};

#[derive(Parser)]
#[command(name = "rigidity", version, about = "Phase rigidity and exceptional-point analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Full eigensystem and EP report for a matrix file.
    Analyze(AnalyzeArgs),
    /// Detuning sweep of a near-EP model file; emits CSV and optional SVG.
    Sweep(SweepArgs),
    /// Write a model matrix file for a named family.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Matrix file (JSON).
    file: String,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
    /// Cross-check eigenvalues against the extended-precision oracle.
    #[arg(long)]
    oracle: bool,
    /// Quasi-degeneracy clustering tolerance.
    #[arg(long)]
    tol_cluster: Option<f64>,
    /// Tolerance for internal exact-identity cross-checks.
    #[arg(long, default_value_t = 1e-8)]
    tol_identity: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Model file (JSON with a `model` block).
    file: String,
    /// Comma-separated detuning list, e.g. `1e-2,1e-4,1e-6`.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Log-spaced detunings: start exponent, stop exponent, count.
    #[arg(long, num_args = 3, allow_negative_numbers = true, conflicts_with = "eps")]
    decades: Option<Vec<f64>>,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    /// Also write a log-log SVG plot here.
    #[arg(long)]
    svg: Option<String>,
    #[arg(long)]
    tol_cluster: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tol_identity: f64,
}

#[derive(Args)]
struct GenerateArgs {
    /// Family: jordan | example3x3 | example4x4 | random.
    family: String,
    /// Matrix dimension (random family).
    #[arg(long, default_value_t = 6)]
    m: usize,
    /// EP order (jordan, random).
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Spectator separation (random family).
    #[arg(long, default_value_t = 2.5)]
    spread: f64,
    /// Degeneracy position as `re,im` (jordan).
    #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [0.0, 0.0])]
    omega: Vec<f64>,
    /// Family parameters: 8 numbers (re,im pairs of a,b,c,d) for
    /// example3x3, 7 real numbers for example4x4.
    #[arg(long, value_delimiter = ',')]
    params: Option<Vec<f64>>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
}

enum CliError {
    /// Bad input: arguments, files, JSON. Exit code 1.
    Input(String),
    /// A numerical identity failed beyond tolerance. Exit code 2.
    Numerical(String),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version print and exit 0; real argument errors exit 1
            if e.use_stderr() {
                eprintln!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Generate(args) => cmd_generate(&args),
    };
    match result {
        Ok(()) => {}
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            std::process::exit(2);
        }
    }
}

fn read_matrix_file(path: &str) -> Result<MatrixFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    MatrixFile::parse(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn write_output(path: Option<&str>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| CliError::Input(format!("{p}: {e}"))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn c_str(z: Complex64) -> String {
    format!("{:+.6e}{:+.6e}i", z.re, z.im)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let file = read_matrix_file(&args.file)?;
    let h: Matrix = file.matrix().map_err(CliError::Input)?;
    let model = file.model().map_err(CliError::Input)?;
    let scale = 1.0 + h.max_row_norm();
    let opts = EpReportOptions {
        cluster_tol: args.tol_cluster.unwrap_or(1e-3 * scale),
        identity_tol: args.tol_identity,
        truncated: model.as_ref().map(|m| m.truncated).unwrap_or(false),
    };
    let report = ep_report(&h, model.as_ref().map(|m| &m.h_at_ep), &opts)
        .map_err(|e| CliError::Numerical(format!("ep analysis: {e}")))?;

    // exact-identity gate: both rigidity routes must agree where both ran;
    // states in any quasi-degenerate cluster are exempt (the exact route's
    // numerator and denominator both vanish there)
    let value_clusters =
        rigidity_core::ep::cluster_eigenvalues(&report.eigensystem.values(), opts.cluster_tol);
    let clustered: std::collections::HashSet<usize> = value_clusters
        .iter()
        .filter(|cl| cl.indices.len() > 1)
        .flat_map(|cl| cl.indices.iter().copied())
        .collect();
    for (i, pair) in report.eigensystem.pairs.iter().enumerate() {
        if clustered.contains(&i) {
            continue;
        }
        let rel = pair.route_disagreement / pair.rigidity.norm().max(f64::MIN_POSITIVE);
        if pair.rigidity_exact.is_some() && rel > args.tol_identity {
            return Err(CliError::Numerical(format!(
                "rigidity route agreement at omega = {}: relative gap {rel:.3e} exceeds {:.1e}",
                c_str(pair.value),
                args.tol_identity
            )));
        }
    }

    let oracle_gap = if args.oracle {
        let (vals, _, _) =
            oracle::oracle_eigen(&h).map_err(|e| CliError::Numerical(format!("oracle: {e}")))?;
        let vals: Vec<Complex64> = vals.iter().map(|w| w.to_c64()).collect();
        // a multiplicity-n eigenvalue is only determined to eps_mach^(1/n),
        // so compare cluster means against a multiplicity-aware tolerance
        let mut worst = 0.0f64;
        for cl in &value_clusters {
            let n = cl.indices.len() as f64;
            let mut oracle_mean = Complex64::new(0.0, 0.0);
            for &v in &cl.values {
                let nearest = vals
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - v).norm().total_cmp(&(b - v).norm()))
                    .unwrap();
                oracle_mean += nearest / n;
            }
            let rel = (oracle_mean - cl.center).norm() / (1.0 + cl.center.norm());
            let tol = if cl.indices.len() == 1 { 1e-8 } else { 100.0 * f64::EPSILON.powf(1.0 / n) };
            if rel > tol {
                return Err(CliError::Numerical(format!(
                    "oracle eigenvalue cross-check near {}: relative gap {rel:.3e} exceeds {tol:.1e}",
                    c_str(cl.center)
                )));
            }
            worst = worst.max(rel);
        }
        Some(worst)
    } else {
        None
    };

    match args.format {
        OutputFormat::Json => {
            let pairs: Vec<serde_json::Value> = report
                .eigensystem
                .pairs
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "omega": [p.value.re, p.value.im],
                        "rigidityAbs": p.rigidity.norm(),
                        "rigidityExactAbs": p.rigidity_exact.map(|r| r.norm()),
                        "routeDisagreement": p.route_disagreement,
                        "petermann": p.petermann,
                        "residualRight": p.residual_right,
                        "residualLeft": p.residual_left,
                    })
                })
                .collect();
            let clusters: Vec<serde_json::Value> = report
                .clusters
                .iter()
                .map(|cl| {
                    serde_json::json!({
                        "center": [cl.cluster.center.re, cl.cluster.center.im],
                        "order": cl.cluster.order,
                        "indices": cl.cluster.indices,
                        "xi": cl.cluster.xi,
                        "minorDenominator": cl.cluster.minor_denominator,
                        "states": cl.per_state.iter().map(|st| serde_json::json!({
                            "index": st.index,
                            "rigidityAbs": st.rigidity_abs,
                            "predictedTruncated": st.predicted_truncated,
                            "predictedGeneral": st.predicted_general,
                            "ratioGeneral": st.ratio_general,
                            "equipartitionDeviation": st.equipartition_deviation,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "dim": h.dim(),
                "eigenpairs": pairs,
                "epClusters": clusters,
                "oracleGap": oracle_gap,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        _ => {
            println!("dim {}", h.dim());
            println!(
                "{:>4} {:>28} {:>13} {:>13} {:>11}",
                "idx", "omega", "|r|", "K", "route gap"
            );
            for (i, p) in report.eigensystem.pairs.iter().enumerate() {
                println!(
                    "{:>4} {:>28} {:>13.6e} {:>13.6e} {:>11.3e}",
                    i,
                    c_str(p.value),
                    p.rigidity.norm(),
                    p.petermann,
                    p.route_disagreement
                );
            }
            if report.clusters.is_empty() {
                println!("no EP clusters detected");
            }
            for cl in &report.clusters {
                println!(
                    "EP cluster at {} (order {}, states {:?}, xi {}, |A| minor {:.6e})",
                    c_str(cl.cluster.center),
                    cl.cluster.order,
                    cl.cluster.indices,
                    cl.cluster
                        .xi
                        .map(|x| format!("{x:.6e}"))
                        .unwrap_or_else(|| "n/a".into()),
                    cl.cluster.minor_denominator
                );
                for st in &cl.per_state {
                    println!(
                        "  state {:>3}: |r| {:.6e}  general pred {:.6e}  ratio {:.4}  equip dev {}",
                        st.index,
                        st.rigidity_abs,
                        st.predicted_general,
                        st.ratio_general,
                        st.equipartition_deviation
                            .map(|d| format!("{d:.3e}"))
                            .unwrap_or_else(|| "n/a".into())
                    );
                }
            }
            if let Some(gap) = oracle_gap {
                println!("oracle eigenvalue cross-check: max relative gap {gap:.3e}");
            }
        }
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let file = read_matrix_file(&args.file)?;
    let model = file
        .model()
        .map_err(CliError::Input)?
        .ok_or_else(|| CliError::Input("sweep requires a file with a `model` block".into()))?;
    let eps_list: Vec<f64> = if let Some(d) = &args.decades {
        let (start, stop, count) = (d[0], d[1], d[2] as usize);
        if count < 2 {
            return Err(CliError::Input("decades count must be at least 2".into()));
        }
        (0..count)
            .map(|i| 10f64.powf(start + (stop - start) * i as f64 / (count - 1) as f64))
            .collect()
    } else if !args.eps.is_empty() {
        args.eps.clone()
    } else {
        return Err(CliError::Input("provide --eps or --decades".into()));
    };
    let opts = SweepOptions { tol_cluster: args.tol_cluster, tol_identity: args.tol_identity };
    let records = run_sweep(&model, &eps_list, &opts).map_err(CliError::Numerical)?;
    // route agreement is part of the record contract
    for r in &records {
        // cluster states (those carrying asymptote predictions) are exempt
        if r.pred_general.is_none() && r.r_abs_exact.is_some() {
            let rel = r.route_disagreement / r.r_abs_direct.max(f64::MIN_POSITIVE);
            if rel > args.tol_identity {
                return Err(CliError::Numerical(format!(
                    "rigidity route agreement at eps {:e}, eigenvalue {}: relative gap {rel:.3e}",
                    r.eps, r.index
                )));
            }
        }
    }
    write_output(args.out.as_deref(), &to_csv(&records))?;
    if let Some(path) = &args.svg {
        write_output(Some(path), &svg::sweep_plot(&records))?;
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let bad = |e: rigidity_core::Error| CliError::Input(e.to_string());
    let file = match args.family.as_str() {
        "jordan" => {
            let omega = Complex64::new(args.omega[0], args.omega[1]);
            MatrixFile::from_model(&models::jordan_block(args.n, omega).map_err(bad)?)
        }
        "example3x3" => {
            let p = args.params.clone().unwrap_or(vec![1.0, 0.0, 0.3, 0.0, 0.7, 0.0, 1.2, 0.0]);
            if p.len() != 8 {
                return Err(CliError::Input(
                    "example3x3 takes 8 params: re,im of a, b, c, d".into(),
                ));
            }
            let z = |i: usize| Complex64::new(p[2 * i], p[2 * i + 1]);
            MatrixFile::from_model(&models::example_3x3(z(0), z(1), z(2), z(3)).map_err(bad)?)
        }
        "example4x4" => {
            let p = args
                .params
                .clone()
                .unwrap_or(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
            if p.len() != 7 {
                return Err(CliError::Input(
                    "example4x4 takes 7 real params: a1,a2,a3,b1,b2,c1,omega".into(),
                ));
            }
            let params = models::Params4x4::real([p[0], p[1], p[2], p[3], p[4], p[5], p[6]]);
            MatrixFile::from_model(&models::example_4x4(&params).map_err(bad)?)
        }
        "random" => MatrixFile::from_model(
            &models::random_near_ep(args.m, args.n, args.seed, args.spread).map_err(bad)?,
        ),
        other => {
            return Err(CliError::Input(format!(
                "unknown family `{other}` (expected jordan, example3x3, example4x4, random)"
            )))
        }
    };
    write_output(args.out.as_deref(), &file.serialize())
}
