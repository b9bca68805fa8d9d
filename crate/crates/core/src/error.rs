use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is numerically singular (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("unconverged eigenvalue estimate near {estimate}")]
    UnconvergedRoot { estimate: num_complex::Complex64 },
    #[error("zero vector input to {0}")]
    ZeroVector(&'static str),
    #[error("every pivot column of the adjugate is numerically null (geometric multiplicity > 1?)")]
    AllPivotsNull,
    #[error("eigenvalue at {value} is not defective: |<L|R>| = {overlap:.3e} exceeds tolerance")]
    NotDefective { value: num_complex::Complex64, overlap: f64 },
    #[error("rigidity denominator and p' both vanish at {value}: exact EP hit, use the asymptotic path")]
    DegenerateDenominator { value: num_complex::Complex64 },
    #[error("first-order secular trace vanishes: perturbation does not lift the EP at first order")]
    SecularTraceVanishes,
    #[error("normal-form identity violated: {0}")]
    NormalFormInconsistent(String),
    #[error("oracle dimension cap exceeded: {dim} > {cap}")]
    OracleDimCap { dim: usize, cap: usize },
    #[error("invalid model parameters: {0}")]
    BadModelParams(String),
    #[error("eigenvalue {index}: {source}")]
    AtEigenvalue { index: usize, #[source] source: Box<Error> },
    #[error("cluster and eigenpair do not match: {0}")]
    ClusterMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
