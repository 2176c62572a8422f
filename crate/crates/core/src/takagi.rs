//! Norm of the bilinear form `x -> x^T M x` on the unit sphere for complex
//! symmetric `M`.
//!
//! For `M = M^T` the supremum of `|x^T M x|` over unit `x` equals the largest
//! singular value, attained at a Takagi vector (`conj(M x) = sigma x`). The
//! primary path is the antilinear power iteration `x <- conj(M x) / |M x|`;
//! two of its steps are one power step on `M^H M`, so the norm estimate grows
//! monotonically. A dense SVD is the fallback for small matrices whose
//! iteration stalls (clustered top singular values).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Error, Result, C64};

/// Largest singular value of a complex symmetric matrix with an attaining vector.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetricNormResult {
    pub sigma: f64,
    /// Unit vector with `|x^T M x| >= sigma - residual`.
    pub argmax_x: Vec<C64>,
    pub iterations: usize,
    /// `|conj(M x) - sigma x|` at the returned vector.
    pub residual: f64,
    /// `false` when the iteration budget ran out and the fallback could not
    /// bring the residual under the threshold.
    pub converged: bool,
    pub method: NormMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Trivial,
    PowerIteration,
    DenseSvd,
}

#[derive(Debug, Clone)]
pub struct TakagiOptions {
    pub random_starts: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Above this residual the dense SVD is tried (only for `n <= fallback_max_dim`).
    pub fallback_residual: f64,
    pub fallback_max_dim: usize,
    pub seed: u64,
}

impl Default for TakagiOptions {
    fn default() -> Self {
        TakagiOptions {
            random_starts: 3,
            tolerance: 1e-12,
            max_iterations: 10_000,
            fallback_residual: 1e-10,
            fallback_max_dim: 64,
            seed: 0x7a6a91,
        }
    }
}

/// Symmetry tolerance on `max |M - M^T|`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// `x^T M x` (no conjugation).
pub fn bilinear_form(m: &DMatrix<C64>, x: &[C64]) -> C64 {
    let n = x.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..n {
            row += m[(i, j)] * x[j];
        }
        acc += x[i] * row;
    }
    acc
}

pub fn symmetric_bilinear_norm(m: &DMatrix<C64>) -> Result<SymmetricNormResult> {
    symmetric_bilinear_norm_with(m, &TakagiOptions::default())
}

pub fn symmetric_bilinear_norm_with(
    m: &DMatrix<C64>,
    opts: &TakagiOptions,
) -> Result<SymmetricNormResult> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::Dimension(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut asym: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            asym = asym.max((m[(i, j)] - m[(j, i)]).norm());
            scale = scale.max(m[(i, j)].norm());
        }
    }
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::Symmetry(asym));
    }
    if scale == 0.0 {
        let mut e1 = vec![C64::new(0.0, 0.0); n];
        e1[0] = C64::new(1.0, 0.0);
        return Ok(SymmetricNormResult {
            sigma: 0.0,
            argmax_x: e1,
            iterations: 0,
            residual: 0.0,
            converged: true,
            method: NormMethod::Trivial,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<DVector<C64>> = Vec::with_capacity(opts.random_starts + 1);
    // Deterministic start: the heaviest column.
    let heaviest = (0..n)
        .max_by(|&a, &b| m.column(a).norm().total_cmp(&m.column(b).norm()))
        .unwrap_or(0);
    starts.push(m.column(heaviest).map(|c| c.conj()));
    for _ in 0..opts.random_starts.max(3) {
        starts.push(DVector::from_fn(n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }));
    }

    let mut best: Option<Candidate> = None;
    let mut total_iterations = 0;
    for start in starts {
        let cand = power_iterate(m, start, opts);
        total_iterations += cand.iterations;
        let better = match &best {
            None => true,
            Some(b) => better_candidate(&cand, b, opts.tolerance),
        };
        if better {
            best = Some(cand);
        }
    }
    let mut best = best.expect("at least one start");
    let mut method = NormMethod::PowerIteration;

    if best.residual > opts.fallback_residual && n <= opts.fallback_max_dim {
        if let Some(svd) = svd_candidate(m) {
            if svd.residual < best.residual || svd.sigma > best.sigma + best.residual {
                best = svd;
                method = NormMethod::DenseSvd;
            }
        }
    }

    let converged = best.residual <= opts.fallback_residual.max(opts.tolerance);
    Ok(SymmetricNormResult {
        sigma: best.sigma,
        argmax_x: best.x.iter().copied().collect(),
        iterations: total_iterations,
        residual: best.residual,
        converged,
        method,
    })
}

struct Candidate {
    sigma: f64,
    x: DVector<C64>,
    residual: f64,
    iterations: usize,
}

fn better_candidate(a: &Candidate, b: &Candidate, tol: f64) -> bool {
    let slack = tol.max(a.residual.min(b.residual));
    if a.sigma > b.sigma + slack {
        true
    } else if b.sigma > a.sigma + slack {
        false
    } else {
        a.residual < b.residual
    }
}

/// Turns a vector from the top right-singular subspace into a Takagi vector.
///
/// If `v = sum c_i conj(u_i)` over the top cluster, then
/// `v + conj(M v) / sigma = sum 2 Re(c_i) conj(u_i)` has real coordinates and
/// so attains `|x^T M x| = sigma |x|^2`.
fn takagi_from(m: &DMatrix<C64>, v: &DVector<C64>, mv: &DVector<C64>, s: f64) -> DVector<C64> {
    let mut y = v + mv.map(|c| c.conj()) / C64::new(s, 0.0);
    if y.norm() < 1e-6 * v.norm() {
        let iv = v * C64::new(0.0, 1.0);
        let miv = m * &iv;
        y = &iv + miv.map(|c| c.conj()) / C64::new(s, 0.0);
    }
    let norm = y.norm();
    y / C64::new(norm, 0.0)
}

fn measure(m: &DMatrix<C64>, y: &DVector<C64>) -> (f64, f64) {
    let my = m * y;
    let sigma = my.norm();
    let res = (my.map(|c| c.conj()) - y * C64::new(sigma, 0.0)).norm();
    (sigma, res)
}

fn power_iterate(m: &DMatrix<C64>, start: DVector<C64>, opts: &TakagiOptions) -> Candidate {
    let mut x = start;
    let nx = x.norm();
    if nx == 0.0 {
        x = DVector::from_element(m.nrows(), C64::new(1.0, 0.0));
    }
    let nx = x.norm();
    x /= C64::new(nx, 0.0);

    let mut best = Candidate {
        sigma: 0.0,
        x: x.clone(),
        residual: f64::INFINITY,
        iterations: 0,
    };
    for it in 1..=opts.max_iterations {
        let mx = m * &x;
        let s = mx.norm();
        if s == 0.0 {
            best.iterations = it;
            break;
        }
        let y = takagi_from(m, &x, &mx, s);
        let (sigma, res) = measure(m, &y);
        if res < best.residual || sigma > best.sigma + best.residual {
            best = Candidate {
                sigma,
                x: y,
                residual: res,
                iterations: it,
            };
        }
        best.iterations = it;
        if res <= opts.tolerance * sigma.max(1.0) {
            break;
        }
        x = mx.map(|c| c.conj()) / C64::new(s, 0.0);
    }
    best
}

fn svd_candidate(m: &DMatrix<C64>) -> Option<Candidate> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.as_ref()?;
    let (idx, &s) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if s == 0.0 {
        return None;
    }
    let v: DVector<C64> = v_t.row(idx).transpose().map(|c| c.conj());
    let mv = m * &v;
    let y = takagi_from(m, &v, &mv, s);
    let (sigma, residual) = measure(m, &y);
    Some(Candidate {
        sigma,
        x: y,
        residual,
        iterations: 0,
    })
}
