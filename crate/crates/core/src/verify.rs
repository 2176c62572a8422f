//! Verification along Teichmüller disks `t -> f^{t mu*}`, `mu* = mu/|mu|_inf`.
//!
//! For each catalog family the disk parameter is the family parameter `t`
//! itself, so `kappa(r)` is the Grunsky norm of the family member at `t = r`
//! and `alpha = alpha(mu*)` is the abelian supremum of the unit direction.
//! The checks:
//!
//! * sandwich `alpha r <= kappa(r) <= r (r + alpha) / (1 + alpha r)`;
//! * Golusin's bound `|g(t)| <= |t|^m (|t| + |c_m|) / (1 + |c_m| |t|)` for
//!   `g = h_x` along the disk;
//! * the metric `lambda_kappa(r) = sup_x |h_x'(r)| / (1 - |h_x(r)|^2)` and its
//!   integral against `artanh kappa(r)`;
//! * Fredholm eigenvalues `rho = 1 / kappa`.
//!
//! Here `h_x(t) = x^T G(f_t) x` uses the weighted Grunsky matrix.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::abelian::alpha_norm;
use crate::families::{family_beltrami, family_map, Family, FamilySpec};
use crate::grunsky::{grunsky_coefficients, grunsky_matrix, grunsky_norm, norm_report, GrunskyTable, LaurentMap};
use crate::takagi::{bilinear_form, symmetric_bilinear_norm};
use crate::{Error, Result, C64};

/// Slack on both ends of the sandwich.
pub const SANDWICH_SLACK: f64 = 1e-9;
/// Tolerated Golusin violation.
pub const GOLUSIN_SLACK: f64 = 1e-8;
/// `|x| = 1` tolerance for [`h_eval`].
pub const UNIT_TOLERANCE: f64 = 1e-10;
/// Below this `kappa_N` the curve is treated as a circle.
pub const CIRCLE_THRESHOLD: f64 = 1e-12;
/// Projected-gradient refinement steps in [`metric_lambda_kappa`].
pub const REFINE_STEPS: usize = 32;

/// Table of the family member at `t` with the shortest tail that covers `N`.
pub fn family_table(spec: &FamilySpec, n: usize) -> Result<GrunskyTable> {
    let map = family_map(spec, (2 * n).saturating_sub(1).max(1))?;
    grunsky_coefficients(&map, n)
}

pub fn family_matrix(spec: &FamilySpec, n: usize) -> Result<DMatrix<C64>> {
    Ok(grunsky_matrix(&family_table(spec, n)?).into_matrix())
}

fn check_unit(x: &[C64]) -> Result<()> {
    let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::InputNorm(norm));
    }
    Ok(())
}

/// `h_x(t) = x^T G(f_t) x` with `G` truncated at `N = x.len()`.
pub fn h_eval(spec: &FamilySpec, x: &[C64]) -> Result<C64> {
    check_unit(x)?;
    if x.is_empty() {
        return Err(Error::Dimension("empty vector".into()));
    }
    Ok(bilinear_form(&family_matrix(spec, x.len())?, x))
}

/// `alpha(mu*)` at truncation `N` for the unit direction of the family's
/// Beltrami coefficient (phase does not matter).
pub fn unit_alpha(family: Family, n: usize) -> Result<f64> {
    let spec = family.at(C64::new(0.5, 0.0))?;
    let mu = family_beltrami(&spec)?.spec.unit_normalized()?;
    Ok(alpha_norm(&mu, n)?.sigma)
}

/// `j(r) = r (r + alpha) / (1 + alpha r)`.
pub fn upper_envelope(alpha: f64, r: f64) -> f64 {
    r * (r + alpha) / (1.0 + alpha * r)
}

/// `lambda_alpha(r) = j'(r) / (1 - j(r)^2)`, the pull-back of the hyperbolic
/// metric by `j`.
pub fn upper_metric(alpha: f64, r: f64) -> f64 {
    let d = 1.0 + alpha * r;
    let j = upper_envelope(alpha, r);
    let dj = ((2.0 * r + alpha) * d - alpha * r * (r + alpha)) / (d * d);
    dj / (1.0 - j * j)
}

#[derive(Debug, Clone, Serialize)]
pub struct GolusinReport {
    pub holds: bool,
    /// `min_t (bound - |g(t)|)`; negative means a violation.
    pub worst_margin: f64,
    pub order: Option<u32>,
    pub leading_coeff: Option<C64>,
    /// `g` vanished on every sample; the bound holds vacuously.
    pub degenerate: bool,
    pub violations: usize,
}

/// Sample points for the order and leading-coefficient estimates.
pub const GOLUSIN_PROBES: (f64, f64) = (1e-3, 2e-3);

/// Golusin's bound for an arbitrary `g` with `g(0) = 0`, checked at real
/// `t` in `t_grid`.
pub fn golusin_check_fn(g: impl Fn(C64) -> Result<C64>, t_grid: &[f64]) -> Result<GolusinReport> {
    let samples = t_grid
        .iter()
        .map(|&t| Ok((t, g(C64::new(t, 0.0))?)))
        .collect::<Result<Vec<_>>>()?;
    let (t1, t2) = GOLUSIN_PROBES;
    let g1 = g(C64::new(t1, 0.0))?;
    let g2 = g(C64::new(t2, 0.0))?;
    let tiny = 1e-300;
    if g1.norm() <= tiny && g2.norm() <= tiny && samples.iter().all(|(_, v)| v.norm() <= 1e-14) {
        return Ok(GolusinReport {
            holds: true,
            worst_margin: 0.0,
            order: None,
            leading_coeff: None,
            degenerate: true,
            violations: 0,
        });
    }
    let slope = (g2.norm() / g1.norm()).ln() / 2f64.ln();
    let m = slope.round();
    if !slope.is_finite() || m < 1.0 || (slope - m).abs() > 0.05 {
        return Err(Error::Estimation(slope));
    }
    let order = m as i32;
    let c1 = g1 / t1.powi(order);
    let c2 = g2 / t2.powi(order);
    let c = 2.0 * c1 - c2;
    let cm = c.norm();
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for (t, v) in &samples {
        let r = t.abs();
        let bound = r.powi(order) * (r + cm) / (1.0 + cm * r);
        let margin = bound - v.norm();
        if margin < -GOLUSIN_SLACK {
            violations += 1;
        }
        worst = worst.min(margin);
    }
    Ok(GolusinReport {
        holds: violations == 0,
        worst_margin: if worst.is_finite() { worst } else { 0.0 },
        order: Some(order as u32),
        leading_coeff: Some(c),
        degenerate: false,
        violations,
    })
}

/// Golusin's bound for `g(t) = h_x(f_t)`.
pub fn golusin_bound_check(family: Family, x: &[C64], t_grid: &[f64]) -> Result<GolusinReport> {
    check_unit(x)?;
    let n = x.len();
    golusin_check_fn(|t| h_eval(&family.at(t)?, x), t_grid).map_err(|e| match e {
        Error::Domain(msg) => Error::Domain(format!("{msg} (N = {n})")),
        other => other,
    })
}

/// Golusin's bound for `count` seeded random unit vectors at truncation `N`.
#[derive(Debug, Clone, Serialize)]
pub struct GolusinSweep {
    pub family: Family,
    pub n: usize,
    pub vectors: usize,
    pub violations: usize,
    pub degenerate: usize,
    pub worst_margin: f64,
}

/// Runs [`golusin_check_fn`] on `h_x` for `count` random `x`, reusing one
/// Grunsky matrix per sample point.
pub fn golusin_sweep(family: Family, t_grid: &[f64], n: usize, count: usize, seed: u64) -> Result<GolusinSweep> {
    if n == 0 {
        return Err(Error::Domain("truncation N must be at least 1".into()));
    }
    let mut ts: Vec<f64> = t_grid.to_vec();
    ts.extend([GOLUSIN_PROBES.0, GOLUSIN_PROBES.1]);
    let matrices = ts
        .par_iter()
        .map(|&t| Ok((t.to_bits(), family_matrix(&family.at(C64::new(t, 0.0))?, n)?)))
        .collect::<Result<std::collections::HashMap<_, _>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sweep = GolusinSweep {
        family,
        n,
        vectors: count,
        violations: 0,
        degenerate: 0,
        worst_margin: f64::INFINITY,
    };
    for _ in 0..count {
        let x = normalize(
            (0..n)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        );
        let g = |t: C64| {
            matrices
                .get(&t.re.to_bits())
                .map(|m| bilinear_form(m, &x))
                .ok_or_else(|| Error::Domain(format!("t = {} not precomputed", t.re)))
        };
        let rep = golusin_check_fn(g, t_grid)?;
        sweep.violations += rep.violations;
        sweep.degenerate += rep.degenerate as usize;
        sweep.worst_margin = sweep.worst_margin.min(rep.worst_margin);
    }
    if !sweep.worst_margin.is_finite() {
        sweep.worst_margin = 0.0;
    }
    Ok(sweep)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationRow {
    pub r: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    pub residual_theorem1: f64,
    pub residual_upper: f64,
    /// `(kappa - lower) / (upper - lower)`; 0 when the envelope is degenerate.
    pub position: f64,
    pub sandwich_ok: bool,
    pub converged: bool,
}

impl VerificationRow {
    fn new(r: f64, kappa: f64, alpha: f64, converged: bool) -> Self {
        let lower = alpha * r;
        let upper = upper_envelope(alpha, r);
        VerificationRow {
            r,
            kappa,
            alpha,
            lower,
            upper,
            residual_theorem1: kappa - lower,
            residual_upper: upper - kappa,
            position: if upper > lower { (kappa - lower) / (upper - lower) } else { 0.0 },
            sandwich_ok: lower - SANDWICH_SLACK <= kappa && kappa <= upper + SANDWICH_SLACK,
            converged,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub family: Family,
    pub n: usize,
    pub alpha: f64,
    pub rows: Vec<VerificationRow>,
}

impl VerificationReport {
    pub fn all_sandwich_ok(&self) -> bool {
        self.rows.iter().all(|r| r.sandwich_ok)
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::Domain("empty radius grid".into()));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r <= 0.95)) {
        return Err(Error::Domain(format!("disk parameter {r} outside (0, 0.95]")));
    }
    Ok(())
}

pub fn verify_theorem1(family: Family, radii: &[f64], n: usize) -> Result<VerificationReport> {
    Ok(verify_theorem1_ladder(family, radii, &[n])?.remove(0))
}

/// One report per `N`; each radius is expanded once at the largest `N`.
pub fn verify_theorem1_ladder(
    family: Family,
    radii: &[f64],
    ladder: &[usize],
) -> Result<Vec<VerificationReport>> {
    check_radii(radii)?;
    let mut ns = ladder.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let max_n = *ns.last().ok_or_else(|| Error::Domain("empty N ladder".into()))?;
    let alphas = ns
        .iter()
        .map(|&n| unit_alpha(family, n))
        .collect::<Result<Vec<_>>>()?;
    let per_radius = radii
        .par_iter()
        .map(|&r| {
            let table = family_table(&family.at(C64::new(r, 0.0))?, max_n)?;
            norm_report(&table, &ns)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ns
        .iter()
        .zip(&alphas)
        .map(|(&n, &alpha)| VerificationReport {
            family,
            n,
            alpha,
            rows: radii
                .iter()
                .zip(&per_radius)
                .map(|(&r, rep)| {
                    let row = rep.rows.iter().find(|row| row.n == n).expect("ladder row");
                    VerificationRow::new(r, row.kappa, alpha, row.converged)
                })
                .collect(),
        })
        .collect())
}

/// Where the measured `kappa_N(r)` sits between the two candidate curves
/// `alpha r` and `r (r + alpha) / (1 + alpha r)`.
#[derive(Debug, Clone, Serialize)]
pub struct DiscriminationReport {
    pub family: Family,
    pub r: f64,
    pub alpha: f64,
    pub linear_candidate: f64,
    pub envelope_candidate: f64,
    pub kappa_by_n: Vec<(usize, f64)>,
    /// `kappa_N` nondecreasing along the ladder.
    pub monotone_from_below: bool,
    /// `(kappa - linear) / (envelope - linear)` at the largest `N`.
    pub position: f64,
    pub nearest: &'static str,
    /// Last ladder increment of `kappa_N`.
    pub last_increment: f64,
}

pub fn theorem1_discrimination(family: Family, r: f64, ladder: &[usize]) -> Result<DiscriminationReport> {
    check_radii(&[r])?;
    let max_n = *ladder.iter().max().ok_or_else(|| Error::Domain("empty N ladder".into()))?;
    let alpha = unit_alpha(family, max_n)?;
    let map = family_map(&family.at(C64::new(r, 0.0))?, 2 * max_n - 1)?;
    let report = grunsky_norm(&map, ladder)?;
    let kappa_by_n: Vec<(usize, f64)> = report.rows.iter().map(|row| (row.n, row.kappa)).collect();
    let monotone = kappa_by_n.windows(2).all(|w| w[1].1 >= w[0].1 - crate::grunsky::MONOTONE_SLACK);
    let kappa = kappa_by_n.last().map(|p| p.1).unwrap_or(0.0);
    let linear = alpha * r;
    let envelope = upper_envelope(alpha, r);
    let position = if envelope > linear {
        (kappa - linear) / (envelope - linear)
    } else {
        0.0
    };
    let nearest = if (kappa - linear).abs() <= SANDWICH_SLACK {
        "linear"
    } else if (kappa - envelope).abs() <= SANDWICH_SLACK {
        "envelope"
    } else if position < 0.5 {
        "interior, closer to linear"
    } else {
        "interior, closer to envelope"
    };
    let last_increment = match kappa_by_n.as_slice() {
        [.., a, b] => b.1 - a.1,
        _ => 0.0,
    };
    Ok(DiscriminationReport {
        family,
        r,
        alpha,
        linear_candidate: linear,
        envelope_candidate: envelope,
        kappa_by_n,
        monotone_from_below: monotone,
        position,
        nearest,
        last_increment,
    })
}

/// `lim kappa_N(r) / r` by Richardson extrapolation over `r in {1e-3, 5e-4}`.
pub fn origin_slope(family: Family, n: usize) -> Result<f64> {
    let slope = |r: f64| -> Result<f64> {
        let table = family_table(&family.at(C64::new(r, 0.0))?, n)?;
        Ok(crate::grunsky::table_norm(&table, n)?.sigma / r)
    };
    Ok(2.0 * slope(5e-4)? - slope(1e-3)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricSample {
    pub r: f64,
    /// Best `|h_x'(r)| / (1 - |h_x(r)|^2)` found; a lower bound of the supremum.
    pub lambda_est: f64,
    pub achieving_x: Vec<C64>,
    pub optimizer_budget: usize,
}

struct MetricObjective {
    value: DMatrix<C64>,
    derivative: DMatrix<C64>,
}

impl MetricObjective {
    fn eval(&self, x: &[C64]) -> Result<f64> {
        let q = bilinear_form(&self.value, x);
        if q.norm() >= 1.0 {
            return Err(Error::CriterionViolation(format!(
                "|h_x(r)| = {} >= 1",
                q.norm()
            )));
        }
        Ok(bilinear_form(&self.derivative, x).norm() / (1.0 - q.norm_sqr()))
    }

    /// Ascent direction of `log|p| - log(1 - |q|^2)` with
    /// `p = x^T D x`, `q = x^T G x`, projected onto the sphere's tangent space.
    fn ascent(&self, x: &[C64]) -> Vec<C64> {
        let n = x.len();
        let xv = nalgebra::DVector::from_column_slice(x);
        let dx = &self.derivative * &xv;
        let gx = &self.value * &xv;
        let p: C64 = xv.iter().zip(dx.iter()).map(|(a, b)| a * b).sum();
        let q: C64 = xv.iter().zip(gx.iter()).map(|(a, b)| a * b).sum();
        let mut d = vec![C64::new(0.0, 0.0); n];
        if p.norm() > 0.0 {
            let s = p / p.norm_sqr();
            for (di, v) in d.iter_mut().zip(dx.iter()) {
                *di += v.conj() * s;
            }
        }
        let s = q * (2.0 / (1.0 - q.norm_sqr()));
        for (di, v) in d.iter_mut().zip(gx.iter()) {
            *di += v.conj() * s;
        }
        let radial: C64 = x.iter().zip(&d).map(|(a, b)| a.conj() * b).sum();
        for (di, xi) in d.iter_mut().zip(x) {
            *di -= xi * radial.re;
        }
        d
    }
}

fn normalize(mut x: Vec<C64>) -> Vec<C64> {
    let n = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in x.iter_mut() {
        *c /= n;
    }
    x
}

/// Derivative step in the disk parameter at `r`.
pub fn metric_step(r: f64) -> f64 {
    1e-4 * (1.0 - r)
}

/// Lower estimate of `lambda_kappa(r)`: the best of the top Takagi vectors at
/// `r` and `r +- step` (and of the derivative matrix), `budget` seeded random
/// unit vectors, then [`REFINE_STEPS`] projected-gradient steps from the best.
pub fn metric_lambda_kappa(family: Family, r: f64, n: usize, budget: usize, seed: u64) -> Result<MetricSample> {
    if !(0.0..0.95).contains(&r) {
        return Err(Error::Domain(format!("r = {r} outside [0, 0.95)")));
    }
    if n == 0 {
        return Err(Error::Domain("truncation N must be at least 1".into()));
    }
    let s = metric_step(r);
    let at = |t: f64| family_matrix(&family.at(C64::new(t, 0.0))?, n);
    let g0 = at(r)?;
    let gp = at(r + s)?;
    let gm = at(r - s)?;
    let derivative = (&gp - &gm) / C64::new(2.0 * s, 0.0);
    let obj = MetricObjective { value: g0, derivative };

    let mut candidates: Vec<Vec<C64>> = Vec::with_capacity(budget + 4);
    for m in [&obj.value, &gp, &gm, &obj.derivative] {
        candidates.push(symmetric_bilinear_norm(m)?.argmax_x);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let x: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        candidates.push(normalize(x));
    }
    let mut best_x = candidates[0].clone();
    let mut best = f64::NEG_INFINITY;
    for x in candidates {
        let v = obj.eval(&x)?;
        if v > best {
            best = v;
            best_x = x;
        }
    }

    let mut step = 0.5;
    for _ in 0..REFINE_STEPS {
        let d = obj.ascent(&best_x);
        let dn = d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if dn < 1e-14 {
            break;
        }
        let mut improved = false;
        for _ in 0..30 {
            let trial = normalize(
                best_x
                    .iter()
                    .zip(&d)
                    .map(|(x, g)| x + g * (step / dn))
                    .collect(),
            );
            let v = obj.eval(&trial)?;
            if v > best {
                best = v;
                best_x = trial;
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }

    Ok(MetricSample {
        r,
        lambda_est: best,
        achieving_x: best_x,
        optimizer_budget: budget,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma4Report {
    pub family: Family,
    pub r_max: f64,
    pub n: usize,
    pub kappa: f64,
    /// `artanh(kappa_N(r_max))`.
    pub lhs: f64,
    /// Composite Simpson integral of `lambda_est` over `[0, r_max]`.
    pub rhs: f64,
    pub residual: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Compares `artanh kappa_N(r_max)` with `int_0^{r_max} lambda_kappa`.
///
/// `grid_size` is the number of Simpson intervals (rounded up to even).
pub fn lemma4_check(
    family: Family,
    r_max: f64,
    grid_size: usize,
    n: usize,
    budget: usize,
    seed: u64,
) -> Result<Lemma4Report> {
    if !(0.0..=0.8).contains(&r_max) {
        return Err(Error::Domain(format!("r_max = {r_max} outside [0, 0.8]")));
    }
    if grid_size < 16 {
        return Err(Error::Domain(format!("grid size {grid_size} < 16")));
    }
    let intervals = grid_size + grid_size % 2;
    let h = r_max / intervals as f64;
    let samples = (0..=intervals)
        .into_par_iter()
        .map(|i| {
            let t = h * i as f64;
            let sample = metric_lambda_kappa(family, t, n, budget, seed.wrapping_add(i as u64))?;
            Ok((t, sample.lambda_est))
        })
        .collect::<Result<Vec<_>>>()?;
    let rhs = if r_max == 0.0 {
        0.0
    } else {
        let inner: f64 = samples[1..intervals]
            .iter()
            .enumerate()
            .map(|(i, (_, l))| if i % 2 == 0 { 4.0 * l } else { 2.0 * l })
            .sum();
        h / 3.0 * (samples[0].1 + samples[intervals].1 + inner)
    };
    let kappa = if r_max == 0.0 {
        0.0
    } else {
        let table = family_table(&family.at(C64::new(r_max, 0.0))?, n)?;
        crate::grunsky::table_norm(&table, n)?.sigma
    };
    let lhs = kappa.atanh();
    Ok(Lemma4Report {
        family,
        r_max,
        n,
        kappa,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        samples,
    })
}

/// First Fredholm eigenvalue, `+inf` for the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    Finite(f64),
    Infinite,
}

impl Rho {
    fn from_norm(kappa: f64) -> Self {
        if kappa <= CIRCLE_THRESHOLD {
            Rho::Infinite
        } else {
            Rho::Finite(1.0 / kappa)
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Rho::Finite(v) => *v,
            Rho::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for Rho {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rho::Finite(v) => s.serialize_f64(*v),
            Rho::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum FredholmSource<'a> {
    Family(FamilySpec),
    Map(&'a LaurentMap),
}

#[derive(Debug, Clone, Serialize)]
pub struct FredholmReport {
    pub n: usize,
    pub kappa: f64,
    /// `1 / kappa_N`; an upper bound on `rho` since `kappa_N` grows to `kappa`.
    pub rho: Rho,
    pub rho_is_upper_bound: bool,
    /// `|<mu, psi>|` supremum of the family's own Beltrami coefficient.
    pub alpha: Option<f64>,
    /// `1 / alpha`, the abelian-side estimate.
    pub rho_abelian: Option<Rho>,
}

pub fn fredholm_eigenvalue(source: FredholmSource<'_>, n: usize) -> Result<FredholmReport> {
    let (map, family) = match source {
        FredholmSource::Family(spec) => (family_map(&spec, (2 * n).saturating_sub(1).max(1))?, Some(spec)),
        FredholmSource::Map(map) => (map.clone(), None),
    };
    let kappa = grunsky_norm(&map, &[n])?.rows[0].kappa;
    let alpha = match family {
        Some(spec) => Some(alpha_norm(&family_beltrami(&spec)?.spec, n)?.sigma),
        None => None,
    };
    Ok(FredholmReport {
        n,
        kappa,
        rho: Rho::from_norm(kappa),
        rho_is_upper_bound: true,
        alpha,
        rho_abelian: alpha.map(Rho::from_norm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn e(n: usize, i: usize) -> Vec<C64> {
        let mut v = vec![c(0.0); n];
        v[i] = c(1.0);
        v
    }

    #[test]
    fn h_eval_examples() {
        let spec = FamilySpec::joukowski(c(0.5)).unwrap();
        assert!((h_eval(&spec, &e(4, 0)).unwrap() - c(0.5)).norm() < 1e-15);
        let zero = FamilySpec::power(3, c(0.0)).unwrap();
        let x = normalize(vec![C64::new(0.3, 0.1), c(0.2), C64::new(0.0, 0.7)]);
        assert_eq!(h_eval(&zero, &x).unwrap(), c(0.0));
        assert!(matches!(h_eval(&spec, &[c(0.5), c(0.5)]), Err(Error::InputNorm(_))));

        let p3 = FamilySpec::power(3, c(0.6)).unwrap();
        let top = symmetric_bilinear_norm(&family_matrix(&p3, 8).unwrap()).unwrap();
        assert!((h_eval(&p3, &top.argmax_x).unwrap().norm() - top.sigma).abs() < 1e-10);
    }

    #[test]
    fn golusin_extremal_function() {
        let a = 0.5;
        let g = |t: C64| Ok(t * (t + a) / (1.0 + a * t));
        let rep = golusin_check_fn(g, &crate::DEFAULT_RADII).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.order, Some(1));
        assert!(rep.worst_margin.abs() < 1e-6);
    }

    #[test]
    fn golusin_joukowski_first_basis_vector() {
        let rep = golusin_bound_check(Family::Joukowski, &e(4, 0), &crate::DEFAULT_RADII).unwrap();
        assert!(rep.holds);
        assert!((rep.leading_coeff.unwrap() - c(1.0)).norm() < 1e-12);
        assert!(rep.worst_margin.abs() < 1e-14);
    }

    #[test]
    fn golusin_degenerate_and_ambiguous() {
        let rep = golusin_check_fn(|_| Ok(c(0.0)), &[0.1, 0.5]).unwrap();
        assert!(rep.degenerate && rep.holds);
        // t^{3/2} has no integer order
        let bad = golusin_check_fn(|t: C64| Ok(t.powf(1.5)), &[0.1]);
        assert!(matches!(bad, Err(Error::Estimation(_))));
    }

    #[test]
    fn golusin_sweep_joukowski() {
        let sweep = golusin_sweep(Family::Joukowski, &crate::DEFAULT_RADII, 6, 10, 3).unwrap();
        assert_eq!(sweep.violations, 0);
        assert_eq!(sweep.vectors, 10);
    }

    #[test]
    fn joukowski_theorem1_row() {
        let rep = verify_theorem1(Family::Joukowski, &[0.5], 8).unwrap();
        let row = &rep.rows[0];
        assert!((row.kappa - 0.5).abs() < 1e-12);
        assert!((row.alpha - 1.0).abs() < 1e-15);
        assert!((row.lower - 0.5).abs() < 1e-15 && (row.upper - 0.5).abs() < 1e-15);
        assert!(row.residual_theorem1.abs() < 1e-12);
        assert!(row.sandwich_ok);
        assert!(verify_theorem1(Family::Joukowski, &[0.0], 8).is_err());
        assert!(verify_theorem1(Family::Joukowski, &[0.96], 8).is_err());
    }

    #[test]
    fn power3_theorem1_row_at_n2() {
        let rep = verify_theorem1(Family::Power(3), &[0.6], 2).unwrap();
        let want = 2.0 * 2f64.sqrt() * 0.6 / 3.0;
        assert!((rep.alpha - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);
        assert!((rep.rows[0].kappa - want).abs() < 1e-14);
        assert!((rep.rows[0].lower - want).abs() < 1e-14);
    }

    #[test]
    fn joukowski_metric_is_hyperbolic() {
        for r in [0.0, 0.3, 0.6] {
            let m = metric_lambda_kappa(Family::Joukowski, r, 6, 16, 1).unwrap();
            assert!((m.lambda_est - 1.0 / (1.0 - r * r)).abs() < 1e-6, "r = {r}");
        }
        assert!(metric_lambda_kappa(Family::Joukowski, 0.95, 4, 4, 0).is_err());
    }

    #[test]
    fn upper_metric_matches_finite_difference() {
        let (a, r, h) = (0.7, 0.4, 1e-6);
        let j = |x: f64| upper_envelope(a, x);
        let fd = (j(r + h) - j(r - h)) / (2.0 * h) / (1.0 - j(r).powi(2));
        assert!((upper_metric(a, r) - fd).abs() < 1e-8);
        assert!((upper_metric(a, 0.0) - a).abs() < 1e-15);
    }

    #[test]
    fn fredholm_examples() {
        let ellipse = fredholm_eigenvalue(
            FredholmSource::Family(FamilySpec::joukowski(c(0.5)).unwrap()),
            8,
        )
        .unwrap();
        assert!((ellipse.rho.value() - 2.0).abs() < 1e-12);
        assert!((ellipse.rho.value() * ellipse.kappa - 1.0).abs() < 1e-12);

        let circle = fredholm_eigenvalue(FredholmSource::Map(&LaurentMap::identity()), 4).unwrap();
        assert_eq!(circle.rho, Rho::Infinite);

        let p3 = fredholm_eigenvalue(FredholmSource::Family(FamilySpec::power(3, c(0.6)).unwrap()), 8).unwrap();
        let est = p3.rho_abelian.unwrap().value();
        assert!((est - 3.0 / (2.0 * 2f64.sqrt() * 0.6)).abs() < 1e-12);
        assert!(p3.rho.value() <= est + 1e-12);
    }

    #[test]
    fn lemma4_at_zero_radius() {
        let rep = lemma4_check(Family::Joukowski, 0.0, 16, 4, 4, 0).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.rhs, 0.0);
        assert!(lemma4_check(Family::Joukowski, 0.9, 16, 4, 4, 0).is_err());
        assert!(lemma4_check(Family::Joukowski, 0.5, 8, 4, 4, 0).is_err());
    }
}
