//! Grunsky coefficients of `f(z) = z + b_0 + sum b_k z^{-k}` on `|z| > 1`,
//! the weighted Grunsky matrix `sqrt(mn) alpha_mn`, and its norm.
//!
//! With `u = 1/z`, `v = 1/zeta` the difference quotient is
//!
//! ```text
//! (f(z) - f(zeta)) / (z - zeta) = 1 - sum_k b_k sum_{j<k} u^{k-j} v^{j+1}
//! ```
//!
//! so `b_0` drops out and `alpha_mn = -[u^m v^n] log(...)` is read off a
//! bivariate logarithm. The box `m, n <= N` only sees `b_k` with `k <= 2N - 1`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::series::{BivariateSeries, UnivariateSeries};
use crate::takagi::{symmetric_bilinear_norm, SymmetricNormResult};
use crate::{Error, Result, C64};

/// Absolute slack above 1 before a truncated norm counts as a univalence violation.
pub const UNIVALENCE_SLACK: f64 = 1e-12;
/// Slack for `max kappa_N <= k` in [`qc_bound_check`].
pub const QC_BOUND_SLACK: f64 = 1e-9;
/// Allowed floating-point decrease between consecutive `kappa_N`.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// `f(z) = z + b0 + sum_{k=1}^{K} b_k z^{-k}`.
///
/// A *truncated* map is the head of an infinite expansion, so computations
/// needing `b_k` past `K` fail. An exact map is a Laurent polynomial and
/// every coefficient past `K` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMap {
    b0: C64,
    tail: Vec<C64>,
    truncated: bool,
}

fn check_finite(values: &[C64], what: &str) -> Result<()> {
    if values.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} has non-finite coefficients")))
    }
}

impl LaurentMap {
    /// A Laurent polynomial: coefficients past the tail are zero.
    pub fn new(b0: C64, tail: Vec<C64>) -> Result<Self> {
        check_finite(&[b0], "b0")?;
        check_finite(&tail, "tail")?;
        Ok(LaurentMap {
            b0,
            tail,
            truncated: false,
        })
    }

    /// The first `K` terms of an infinite expansion.
    pub fn truncated(b0: C64, tail: Vec<C64>) -> Result<Self> {
        let mut map = Self::new(b0, tail)?;
        map.truncated = true;
        Ok(map)
    }

    pub fn identity() -> Self {
        LaurentMap {
            b0: C64::new(0.0, 0.0),
            tail: Vec::new(),
            truncated: false,
        }
    }

    pub fn b0(&self) -> C64 {
        self.b0
    }

    /// `b_1, ..., b_K`.
    pub fn tail(&self) -> &[C64] {
        &self.tail
    }

    pub fn k(&self) -> usize {
        self.tail.len()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// `b_k` for `k >= 1`; zero past the tail.
    pub fn coefficient(&self, k: usize) -> C64 {
        assert!(k >= 1, "tail coefficients start at k = 1");
        self.tail.get(k - 1).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// `f + c`.
    pub fn translated(&self, c: C64) -> Self {
        LaurentMap {
            b0: self.b0 + c,
            ..self.clone()
        }
    }

    fn require_tail(&self, what: &'static str, required: usize) -> Result<()> {
        if self.truncated && self.k() < required {
            return Err(Error::Truncation {
                what,
                required,
                available: self.k(),
            });
        }
        Ok(())
    }

    /// `[f, f', f'', f''']` at `z` from the tail, term by term.
    pub fn derivatives(&self, z: C64) -> [C64; 4] {
        let w = z.inv();
        let mut f = z + self.b0;
        let mut d1 = C64::new(1.0, 0.0);
        let mut d2 = C64::new(0.0, 0.0);
        let mut d3 = C64::new(0.0, 0.0);
        // w^k accumulated incrementally
        let mut wk = C64::new(1.0, 0.0);
        for (idx, b) in self.tail.iter().enumerate() {
            let k = (idx + 1) as f64;
            wk *= w;
            if *b == C64::new(0.0, 0.0) {
                continue;
            }
            let t0 = b * wk;
            f += t0;
            d1 -= t0 * w * k;
            d2 += t0 * w * w * (k * (k + 1.0));
            d3 -= t0 * w * w * w * (k * (k + 1.0) * (k + 2.0));
        }
        [f, d1, d2, d3]
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.derivatives(z)[0]
    }
}

/// `alpha_mn` for `1 <= m, n <= N`, exactly symmetric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrunskyTable {
    n: usize,
    alpha: Vec<C64>,
}

impl GrunskyTable {
    fn from_log(n: usize, log: &BivariateSeries) -> Self {
        let mut alpha = vec![C64::new(0.0, 0.0); n * n];
        for m in 1..=n {
            for k in m..=n {
                let v = if m == k {
                    -log.get(m, k)
                } else {
                    -(log.get(m, k) + log.get(k, m)) * 0.5
                };
                alpha[(m - 1) * n + (k - 1)] = v;
                alpha[(k - 1) * n + (m - 1)] = v;
            }
        }
        GrunskyTable { n, alpha }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `alpha_mn`, one-based.
    pub fn get(&self, m: usize, n: usize) -> C64 {
        assert!(m >= 1 && n >= 1 && m <= self.n && n <= self.n, "index out of table");
        self.alpha[(m - 1) * self.n + (n - 1)]
    }

    /// The leading `n x n` block.
    pub fn leading(&self, n: usize) -> GrunskyTable {
        assert!(n <= self.n, "block larger than table");
        let mut alpha = Vec::with_capacity(n * n);
        for m in 1..=n {
            for k in 1..=n {
                alpha.push(self.get(m, k));
            }
        }
        GrunskyTable { n, alpha }
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.alpha.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

/// Grunsky coefficients of `map` in the box `1 <= m, n <= N`.
pub fn grunsky_coefficients(map: &LaurentMap, n: usize) -> Result<GrunskyTable> {
    if n == 0 {
        return Err(Error::Domain("truncation N must be at least 1".into()));
    }
    let needed = 2 * n - 1;
    map.require_tail("grunsky_coefficients", needed)?;
    let mut quotient = BivariateSeries::one(n);
    for k in 1..=needed.min(map.k()) {
        let b = map.coefficient(k);
        if b == C64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..k {
            quotient.add_term(k - j, j + 1, -b);
        }
    }
    let log = quotient.log()?;
    Ok(GrunskyTable::from_log(n, &log))
}

/// `G_mn = sqrt(mn) alpha_mn`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyMatrix {
    matrix: DMatrix<C64>,
}

impl GrunskyMatrix {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.matrix[(m - 1, n - 1)]
    }
}

pub fn grunsky_matrix(table: &GrunskyTable) -> GrunskyMatrix {
    let n = table.n();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        table.get(i + 1, j + 1) * (((i + 1) * (j + 1)) as f64).sqrt()
    });
    GrunskyMatrix { matrix }
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaRow {
    pub n: usize,
    pub kappa: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Truncated Grunsky norms along a ladder of `N`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<KappaRow>,
    /// Some `kappa_N > 1`: `f` cannot be univalent on `|z| > 1`.
    pub univalence_violated: bool,
    /// Dilatation of a known quasiconformal extension, when there is one.
    pub k_bound: Option<f64>,
}

impl ConvergenceReport {
    pub fn max_kappa(&self) -> f64 {
        self.rows.iter().map(|r| r.kappa).fold(0.0, f64::max)
    }

    pub fn kappa(&self, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.kappa)
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn with_k_bound(mut self, k: f64) -> Self {
        self.k_bound = Some(k);
        self
    }
}

fn normalized_ladder(ladder: &[usize]) -> Result<Vec<usize>> {
    let mut ns: Vec<usize> = ladder.to_vec();
    ns.sort_unstable();
    ns.dedup();
    match ns.first() {
        None => Err(Error::Domain("empty N ladder".into())),
        Some(0) => Err(Error::Domain("truncation N must be at least 1".into())),
        _ => Ok(ns),
    }
}

/// Norm of the leading `n x n` block of a table.
pub fn table_norm(table: &GrunskyTable, n: usize) -> Result<SymmetricNormResult> {
    symmetric_bilinear_norm(grunsky_matrix(&table.leading(n)).matrix())
}

/// `kappa_N` for every `N` in the ladder, from one table at the largest `N`
/// (box truncation makes the smaller tables its leading blocks).
pub fn grunsky_norm(map: &LaurentMap, ladder: &[usize]) -> Result<ConvergenceReport> {
    let ns = normalized_ladder(ladder)?;
    let table = grunsky_coefficients(map, *ns.last().expect("nonempty"))?;
    norm_report(&table, &ns)
}

/// Ladder report from a precomputed table.
pub fn norm_report(table: &GrunskyTable, ladder: &[usize]) -> Result<ConvergenceReport> {
    let ns = normalized_ladder(ladder)?;
    if let Some(&max) = ns.last() {
        if max > table.n() {
            return Err(Error::Dimension(format!(
                "ladder reaches N = {max} but the table has N = {}",
                table.n()
            )));
        }
    }
    let rows = ns
        .par_iter()
        .map(|&n| {
            let r = table_norm(table, n)?;
            Ok(KappaRow {
                n,
                kappa: r.sigma,
                residual: r.residual,
                iterations: r.iterations,
                converged: r.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for pair in rows.windows(2) {
        if pair[1].kappa < pair[0].kappa - MONOTONE_SLACK {
            return Err(Error::Invariant(format!(
                "kappa_{} = {} < kappa_{} = {}",
                pair[1].n, pair[1].kappa, pair[0].n, pair[0].kappa
            )));
        }
    }
    let univalence_violated = rows.iter().any(|r| r.kappa > 1.0 + UNIVALENCE_SLACK);
    Ok(ConvergenceReport {
        rows,
        univalence_violated,
        k_bound: None,
    })
}

/// `max kappa_N <= k`: necessary for a `k`-quasiconformal extension.
pub fn qc_bound_check(report: &ConvergenceReport, k: f64) -> Result<bool> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("k = {k} is outside [0, 1)")));
    }
    Ok(report.max_kappa() <= k + QC_BOUND_SLACK)
}

/// Taylor coefficients `a_1 = 1, a_2, ..., a_K` of `F(z) = 1 / f(1/z)` on `|z| < 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorMap {
    coeffs: Vec<C64>,
}

impl TaylorMap {
    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self> {
        check_finite(&coeffs, "Taylor series")?;
        Ok(TaylorMap { coeffs })
    }

    /// `a_1, ..., a_K`.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `a_k`, one-based; zero past the end.
    pub fn coefficient(&self, k: usize) -> C64 {
        self.coeffs.get(k - 1).copied().unwrap_or(C64::new(0.0, 0.0))
    }
}

/// `F_f(z) = 1/f(1/z) = z / (1 + b0 z + sum b_k z^{k+1})`, to order `z^K`.
pub fn inversion_map(map: &LaurentMap, k: usize) -> Result<TaylorMap> {
    if k == 0 {
        return Err(Error::Domain("Taylor order must be at least 1".into()));
    }
    // The reciprocal is needed to degree K - 1, which uses b_j for j <= K - 2.
    map.require_tail("inversion_map", k.saturating_sub(2))?;
    let mut denom = vec![C64::new(0.0, 0.0); k];
    denom[0] = C64::new(1.0, 0.0);
    if k > 1 {
        denom[1] = map.b0();
    }
    for (j, slot) in denom.iter_mut().enumerate().skip(2) {
        *slot = map.coefficient(j - 1);
    }
    let inv = UnivariateSeries::from_coeffs(denom).reciprocal()?;
    TaylorMap::from_coeffs(inv.into_coeffs())
}

/// Grunsky coefficients of a Taylor map `F` on the disk, read from
///
/// ```text
/// log[ z zeta (F(z) - F(zeta)) / ((z - zeta) F(z) F(zeta)) ] = -sum alpha_mn z^m zeta^n
/// ```
///
/// These coincide with those of `f(z) = 1/F(1/z)`. Needs `a_1 = 1` and
/// coefficients up to `a_{2N+1}`.
pub fn disk_grunsky_coefficients(map: &TaylorMap, n: usize) -> Result<GrunskyTable> {
    if n == 0 {
        return Err(Error::Domain("truncation N must be at least 1".into()));
    }
    let needed = 2 * n + 1;
    if map.coeffs.len() < needed {
        return Err(Error::Truncation {
            what: "disk_grunsky_coefficients",
            required: needed,
            available: map.coeffs.len(),
        });
    }
    if map.coefficient(1) != C64::new(1.0, 0.0) {
        return Err(Error::SingularInput(format!(
            "Taylor map must have a_1 = 1, found {}",
            map.coefficient(1)
        )));
    }
    // (F(u) - F(v)) / (u - v) = sum_k a_k sum_{j<k} u^{k-1-j} v^j
    let mut quotient = BivariateSeries::zero(n);
    for k in 1..=needed {
        let a = map.coefficient(k);
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..k {
            quotient.add_term(k - 1 - j, j, a);
        }
    }
    let ratio = UnivariateSeries::from_coeffs((1..=n + 1).map(|k| map.coefficient(k)).collect());
    let log_ratio = ratio.log()?;
    let mut log = quotient.log()?;
    for (m, c) in log_ratio.coeffs().iter().enumerate() {
        log.add_term(m, 0, -c);
        log.add_term(0, m, -c);
    }
    Ok(GrunskyTable::from_log(n, &log))
}
