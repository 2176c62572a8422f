use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("logarithm needs constant term 1, found {0}")]
    Branch(String),

    #[error("tail too short: {what} needs K >= {required}, map has K = {available}")]
    Truncation {
        what: &'static str,
        required: usize,
        available: usize,
    },

    #[error("matrix is not symmetric: max |M - M^T| = {0:e}")]
    Symmetry(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("quadrature grid too coarse: {angular} angular nodes for moments up to p = {order} (need >= {required})")]
    Resolution {
        angular: usize,
        order: usize,
        required: usize,
    },

    #[error("singular point at z = {re} + {im}i: |dw/dz| = {modulus:e}")]
    SingularPoint { re: f64, im: f64, modulus: f64 },

    #[error("f'(z) vanishes at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("vanishing order is ambiguous: log-log slope {0}")]
    Estimation(f64),

    #[error("input vector is not a unit vector: norm = {0}")]
    InputNorm(f64),

    #[error("criterion violated: {0}")]
    CriterionViolation(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{0}")]
    Parse(String),
}
