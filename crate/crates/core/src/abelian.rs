//! The abelian-differential supremum of a Beltrami coefficient.
//!
//! For holomorphic `omega(z) = sum_n x_n sqrt(n/pi) z^{n-1}` on the disk one
//! has `|omega|_{L^2} = |x|_{l^2}` and
//!
//! ```text
//! omega^2 = (1/pi) sum_{m,n} sqrt(mn) x_m x_n z^{m+n-2},
//! <mu, omega^2> = x^T B x,   B_mn = sqrt(mn)/pi * M_{m+n-2},
//! ```
//!
//! with `M_p = iint_D mu z^p dx dy`. The supremum of `|<mu, omega^2>|` over
//! unit `omega` of degree `< N` is therefore the top Takagi value of `B`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::quadrature::PolarGrid;
use crate::series::UnivariateSeries;
use crate::takagi::{symmetric_bilinear_norm, SymmetricNormResult};
use crate::{Error, Result, C64};

/// Slack on the closed unit ball for sup norms.
const BALL_SLACK: f64 = 1e-12;

/// `c r^a e^{i k theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarTerm {
    pub coeff: C64,
    pub radial_power: f64,
    pub angular_freq: i32,
}

impl PolarTerm {
    pub fn new(coeff: C64, radial_power: f64, angular_freq: i32) -> Self {
        PolarTerm {
            coeff,
            radial_power,
            angular_freq,
        }
    }

    fn eval_polar(&self, r: f64, theta: f64) -> C64 {
        self.coeff * r.powf(self.radial_power) * C64::from_polar(1.0, self.angular_freq as f64 * theta)
    }
}

/// Samples of `mu` on a polar quadrature grid (radius-major).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledBeltrami {
    grid: PolarGrid,
    values: Vec<C64>,
}

impl SampledBeltrami {
    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BeltramiKind {
    PolarSeparable(Vec<PolarTerm>),
    Sampled(SampledBeltrami),
}

/// A Beltrami coefficient supported on the closed unit disk.
///
/// `sup_norm` is at most 1: the open ball holds the coefficients of
/// quasiconformal extensions, and its boundary holds the unit directions
/// `mu / |mu|_inf` that span Teichmüller disks.
#[derive(Debug, Clone, PartialEq)]
pub struct BeltramiSpec {
    kind: BeltramiKind,
    sup_norm: f64,
}

/// Polar grid on which a polar-separable sup norm is validated.
pub const VALIDATION_GRID: (usize, usize) = (64, 256);

fn polar_sup(terms: &[PolarTerm]) -> f64 {
    let live: Vec<&PolarTerm> = terms.iter().filter(|t| t.coeff != C64::new(0.0, 0.0)).collect();
    match live.as_slice() {
        [] => 0.0,
        // |c| r^a with a >= 0 peaks at r = 1
        [single] => single.coeff.norm(),
        _ => {
            let grid = PolarGrid::uniform(VALIDATION_GRID.0, VALIDATION_GRID.1);
            let mut sup: f64 = 0.0;
            for &r in grid.radii() {
                for j in 0..grid.n_theta() {
                    let th = grid.theta(j);
                    let v: C64 = live.iter().map(|t| t.eval_polar(r, th)).sum();
                    sup = sup.max(v.norm());
                }
            }
            sup
        }
    }
}

fn check_ball(sup: f64) -> Result<()> {
    if sup > 1.0 + BALL_SLACK || !sup.is_finite() {
        return Err(Error::Domain(format!(
            "Beltrami coefficient has sup norm {sup}, outside the closed unit ball"
        )));
    }
    Ok(())
}

impl BeltramiSpec {
    pub fn polar_separable(terms: Vec<PolarTerm>) -> Result<Self> {
        for t in &terms {
            if !(t.radial_power >= 0.0 && t.radial_power.is_finite()) {
                return Err(Error::Domain(format!(
                    "radial power {} must be finite and >= 0",
                    t.radial_power
                )));
            }
            if !(t.coeff.re.is_finite() && t.coeff.im.is_finite()) {
                return Err(Error::Domain("non-finite Beltrami coefficient".into()));
            }
        }
        let sup_norm = polar_sup(&terms);
        check_ball(sup_norm)?;
        Ok(BeltramiSpec {
            kind: BeltramiKind::PolarSeparable(terms),
            sup_norm,
        })
    }

    /// `mu = c r^a e^{i k theta}`.
    pub fn single_term(coeff: C64, radial_power: f64, angular_freq: i32) -> Result<Self> {
        Self::polar_separable(vec![PolarTerm::new(coeff, radial_power, angular_freq)])
    }

    pub fn zero() -> Self {
        BeltramiSpec {
            kind: BeltramiKind::PolarSeparable(Vec::new()),
            sup_norm: 0.0,
        }
    }

    /// Samples in radius-major order on `grid`.
    pub fn sampled(grid: PolarGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::Dimension(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain("non-finite Beltrami sample".into()));
        }
        let sup_norm = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        check_ball(sup_norm)?;
        Ok(BeltramiSpec {
            kind: BeltramiKind::Sampled(SampledBeltrami { grid, values }),
            sup_norm,
        })
    }

    pub fn sampled_from_fn(grid: PolarGrid, f: impl Fn(C64) -> C64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::sampled(grid, values)
    }

    pub fn kind(&self) -> &BeltramiKind {
        &self.kind
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn is_zero(&self) -> bool {
        self.sup_norm == 0.0
    }

    /// `c mu`.
    pub fn scaled(&self, c: C64) -> Result<Self> {
        match &self.kind {
            BeltramiKind::PolarSeparable(terms) => Self::polar_separable(
                terms
                    .iter()
                    .map(|t| PolarTerm::new(t.coeff * c, t.radial_power, t.angular_freq))
                    .collect(),
            ),
            BeltramiKind::Sampled(s) => {
                Self::sampled(s.grid.clone(), s.values.iter().map(|v| v * c).collect())
            }
        }
    }

    /// `mu / |mu|_inf`.
    pub fn unit_normalized(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::SingularInput(
                "cannot normalize a zero Beltrami coefficient".into(),
            ));
        }
        let mut out = self.scaled(C64::new(1.0 / self.sup_norm, 0.0))?;
        out.sup_norm = out.sup_norm.min(1.0);
        Ok(out)
    }

    /// `z -> mu(e^{i phi} z)`; only for polar-separable coefficients.
    pub fn rotated(&self, phi: f64) -> Result<Self> {
        match &self.kind {
            BeltramiKind::PolarSeparable(terms) => Self::polar_separable(
                terms
                    .iter()
                    .map(|t| {
                        PolarTerm::new(
                            t.coeff * C64::from_polar(1.0, t.angular_freq as f64 * phi),
                            t.radial_power,
                            t.angular_freq,
                        )
                    })
                    .collect(),
            ),
            BeltramiKind::Sampled(_) => Err(Error::Domain(
                "rotation of sampled Beltrami coefficients is not supported".into(),
            )),
        }
    }

    /// Pointwise value of a polar-separable coefficient; zero outside the disk.
    pub fn eval(&self, z: C64) -> Option<C64> {
        match &self.kind {
            BeltramiKind::PolarSeparable(terms) => {
                let r = z.norm();
                if r > 1.0 {
                    return Some(C64::new(0.0, 0.0));
                }
                let th = z.arg();
                Some(terms.iter().map(|t| t.eval_polar(r, th)).sum())
            }
            BeltramiKind::Sampled(_) => None,
        }
    }

    /// Samples a polar-separable coefficient on `grid`.
    pub fn to_sampled(&self, grid: PolarGrid) -> Result<Self> {
        match &self.kind {
            BeltramiKind::PolarSeparable(terms) => {
                let mut values = Vec::with_capacity(grid.n_points());
                for &r in grid.radii() {
                    for j in 0..grid.n_theta() {
                        let th = grid.theta(j);
                        values.push(terms.iter().map(|t| t.eval_polar(r, th)).sum());
                    }
                }
                Self::sampled(grid, values)
            }
            BeltramiKind::Sampled(_) => Ok(self.clone()),
        }
    }
}

/// `M_p = iint_D mu(z) z^p dx dy`, `p = 0..=P`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentVector {
    pub moments: Vec<C64>,
}

impl MomentVector {
    pub fn max_order(&self) -> usize {
        self.moments.len() - 1
    }
}

/// Closed form for polar-separable coefficients (angular orthogonality keeps
/// only `k + p = 0`, contributing `2 pi c / (a + p + 2)`); quadrature for
/// sampled ones.
pub fn beltrami_moments(spec: &BeltramiSpec, max_order: usize) -> Result<MomentVector> {
    let moments = match &spec.kind {
        BeltramiKind::PolarSeparable(terms) => (0..=max_order)
            .map(|p| {
                terms
                    .iter()
                    .filter(|t| t.angular_freq + p as i32 == 0)
                    .map(|t| t.coeff * (2.0 * PI / (t.radial_power + p as f64 + 2.0)))
                    .sum()
            })
            .collect(),
        BeltramiKind::Sampled(s) => sampled_moments(s, max_order)?,
    };
    let bound = PI * spec.sup_norm * (1.0 + 1e-12) + 1e-15;
    if let Some((p, m)) = moments
        .iter()
        .enumerate()
        .find(|(_, m): &(usize, &C64)| m.norm() > bound)
    {
        return Err(Error::Invariant(format!(
            "|M_{p}| = {} exceeds pi |mu|_inf = {bound}",
            m.norm()
        )));
    }
    Ok(MomentVector { moments })
}

fn sampled_moments(s: &SampledBeltrami, max_order: usize) -> Result<Vec<C64>> {
    let grid = &s.grid;
    let required = 4 * max_order;
    if grid.n_theta() < required {
        return Err(Error::Resolution {
            angular: grid.n_theta(),
            order: max_order,
            required,
        });
    }
    let n_theta = grid.n_theta();
    let dtheta = 2.0 * PI / n_theta as f64;
    let twiddle: Vec<C64> = (0..n_theta).map(|j| C64::from_polar(1.0, grid.theta(j))).collect();
    let mut moments = vec![C64::new(0.0, 0.0); max_order + 1];
    for (i, (&r, &w)) in grid.radii().iter().zip(grid.radial_weights()).enumerate() {
        let ring = &s.values[i * n_theta..(i + 1) * n_theta];
        // angular sums of mu e^{i p theta}, built by repeated multiplication
        let mut phase: Vec<C64> = vec![C64::new(1.0, 0.0); n_theta];
        let mut rp = r * w * dtheta;
        for m in moments.iter_mut() {
            let angular: C64 = ring.iter().zip(&phase).map(|(v, e)| v * e).sum();
            *m += angular * rp;
            rp *= r;
            for (e, tw) in phase.iter_mut().zip(&twiddle) {
                *e *= tw;
            }
        }
    }
    Ok(moments)
}

/// `B_mn = sqrt(mn)/pi * M_{m+n-2}`, `1 <= m, n <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianMatrix {
    matrix: DMatrix<C64>,
}

impl AbelianMatrix {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.matrix[(m - 1, n - 1)]
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn abelian_matrix(moments: &MomentVector, n: usize) -> Result<AbelianMatrix> {
    if n == 0 {
        return Err(Error::Domain("truncation N must be at least 1".into()));
    }
    let needed = 2 * n - 1;
    if moments.moments.len() < needed {
        return Err(Error::Truncation {
            what: "abelian_matrix",
            required: needed,
            available: moments.moments.len(),
        });
    }
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let weight = (((i + 1) * (j + 1)) as f64).sqrt() / PI;
        moments.moments[i + j] * weight
    });
    Ok(AbelianMatrix { matrix })
}

/// Supremum of `|<mu, omega^2>|` over unit `omega` of degree `< N`.
pub fn alpha_norm(spec: &BeltramiSpec, n: usize) -> Result<SymmetricNormResult> {
    if n == 0 {
        return Err(Error::Domain("truncation N must be at least 1".into()));
    }
    let moments = beltrami_moments(spec, 2 * n - 2)?;
    symmetric_bilinear_norm(abelian_matrix(&moments, n)?.matrix())
}

/// The extremal `omega` and `psi = omega^2` recovered from an attaining vector.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremalDifferential {
    /// Coefficients of `z^0 .. z^{N-1}`; empty when degenerate.
    pub omega: Vec<C64>,
    /// Coefficients of `z^0 .. z^{2N-2}`, scaled to unit `A_1` norm.
    pub psi: Vec<C64>,
    /// Quadrature `A_1` norm of `omega^2` before scaling (1 for unit `x`).
    pub a1_norm: f64,
    /// The form vanished, so there is no maximizer.
    pub degenerate: bool,
}

/// `iint_D |psi| dx dy` on the standard grid.
pub fn a1_norm(psi: &[C64]) -> f64 {
    let poly = UnivariateSeries::from_coeffs(if psi.is_empty() {
        vec![C64::new(0.0, 0.0)]
    } else {
        psi.to_vec()
    });
    PolarGrid::standard()
        .integrate(|z| C64::new(poly.eval(z).norm(), 0.0))
        .re
}

pub fn extremal_omega(result: &SymmetricNormResult, n: usize) -> Result<ExtremalDifferential> {
    if result.argmax_x.len() < n || n == 0 {
        return Err(Error::Dimension(format!(
            "attaining vector has {} entries, N = {n}",
            result.argmax_x.len()
        )));
    }
    if result.sigma <= 0.0 {
        return Ok(ExtremalDifferential {
            omega: Vec::new(),
            psi: Vec::new(),
            a1_norm: 0.0,
            degenerate: true,
        });
    }
    let omega: Vec<C64> = (0..n)
        .map(|k| result.argmax_x[k] * ((k + 1) as f64 / PI).sqrt())
        .collect();
    let mut padded = omega.clone();
    padded.resize(2 * n - 1, C64::new(0.0, 0.0));
    let w = UnivariateSeries::from_coeffs(padded);
    let psi = w.mul(&w)?.into_coeffs();
    let norm = a1_norm(&psi);
    let psi = psi.iter().map(|c| c / norm).collect();
    let omega = omega.iter().map(|c| c / norm.sqrt()).collect();
    Ok(ExtremalDifferential {
        omega,
        psi,
        a1_norm: norm,
        degenerate: false,
    })
}

/// `<mu, psi> = iint_D mu psi dx dy` by quadrature, for polynomial `psi`.
pub fn pairing(spec: &BeltramiSpec, psi: &[C64]) -> Result<C64> {
    if psi.is_empty() || spec.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    let poly = UnivariateSeries::from_coeffs(psi.to_vec());
    match &spec.kind {
        BeltramiKind::PolarSeparable(_) => Ok(PolarGrid::standard().integrate(|z| {
            spec.eval(z).expect("polar-separable") * poly.eval(z)
        })),
        BeltramiKind::Sampled(s) => {
            let values: Vec<C64> = s
                .grid
                .points()
                .zip(&s.values)
                .map(|(z, mu)| mu * poly.eval(z))
                .collect();
            Ok(s.grid.integrate_values(&values))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn moments_of_catalog_coefficients() {
        let t = 0.6;
        let m = beltrami_moments(&BeltramiSpec::single_term(c(t), 0.0, -1).unwrap(), 1).unwrap();
        assert_eq!(m.moments[0], c(0.0));
        assert!((m.moments[1] - c(2.0 * PI * t / 3.0)).norm() < 1e-15);

        let k = beltrami_moments(&BeltramiSpec::single_term(c(t), 0.0, 0).unwrap(), 2).unwrap();
        assert!((k.moments[0] - c(PI * t)).norm() < 1e-15);
        assert_eq!(k.moments[1], c(0.0));
        assert_eq!(k.moments[2], c(0.0));

        let z = beltrami_moments(&BeltramiSpec::zero(), 4).unwrap();
        assert!(z.moments.iter().all(|m| *m == c(0.0)));
    }

    #[test]
    fn abelian_matrix_examples() {
        let spec = BeltramiSpec::single_term(c(1.0), 0.0, -1).unwrap();
        let b = abelian_matrix(&beltrami_moments(&spec, 2).unwrap(), 2).unwrap();
        let want = 2.0 * 2f64.sqrt() / 3.0;
        assert!((b.get(1, 2).re - want).abs() < 1e-15);
        assert_eq!(b.get(1, 2), b.get(2, 1));
        assert_eq!(b.get(1, 1), c(0.0));
        assert_eq!(b.get(2, 2), c(0.0));

        let t = 0.3;
        let constant = BeltramiSpec::single_term(c(t), 0.0, 0).unwrap();
        let b = abelian_matrix(&beltrami_moments(&constant, 2).unwrap(), 2).unwrap();
        assert!((b.get(1, 1).re - t).abs() < 1e-15);
        assert_eq!(b.get(2, 2), c(0.0));

        let short = MomentVector {
            moments: vec![c(0.0); 2],
        };
        assert!(matches!(abelian_matrix(&short, 2), Err(Error::Truncation { .. })));
    }

    #[test]
    fn alpha_norm_examples() {
        let spec = BeltramiSpec::single_term(c(1.0), 0.0, -1).unwrap();
        let r = alpha_norm(&spec, 2).unwrap();
        assert!((r.sigma - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);

        let t = C64::from_polar(0.7, 1.1);
        let r = alpha_norm(&BeltramiSpec::single_term(t, 0.0, 0).unwrap(), 4).unwrap();
        assert!((r.sigma - 0.7).abs() < 1e-15);

        assert_eq!(alpha_norm(&BeltramiSpec::zero(), 3).unwrap().sigma, 0.0);
    }

    #[test]
    fn sup_norm_outside_ball_is_rejected() {
        assert!(BeltramiSpec::single_term(c(1.5), 0.0, 0).is_err());
        assert!(BeltramiSpec::single_term(c(0.5), -1.0, 0).is_err());
        let unit = BeltramiSpec::single_term(c(0.4), 0.0, 2).unwrap().unit_normalized().unwrap();
        assert_eq!(unit.sup_norm(), 1.0);
        assert!(BeltramiSpec::zero().unit_normalized().is_err());
    }

    #[test]
    fn multi_term_sup_norm_from_grid() {
        // 0.3 + 0.4 r e^{i theta} peaks at 0.7 on theta = 0, r = 1
        let spec = BeltramiSpec::polar_separable(vec![
            PolarTerm::new(c(0.3), 0.0, 0),
            PolarTerm::new(c(0.4), 1.0, 1),
        ])
        .unwrap();
        assert!((spec.sup_norm() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn coarse_sampled_grid_is_rejected() {
        let spec = BeltramiSpec::single_term(c(0.5), 0.0, 0)
            .unwrap()
            .to_sampled(PolarGrid::gauss_legendre(8, 16))
            .unwrap();
        assert!(beltrami_moments(&spec, 4).is_ok());
        assert!(matches!(beltrami_moments(&spec, 5), Err(Error::Resolution { .. })));
    }

    #[test]
    fn extremal_for_constant_coefficient() {
        let t = 0.5;
        let spec = BeltramiSpec::single_term(c(t), 0.0, 0).unwrap();
        let r = alpha_norm(&spec, 3).unwrap();
        let ext = extremal_omega(&r, 3).unwrap();
        assert!(!ext.degenerate);
        assert!((ext.a1_norm - 1.0).abs() < 1e-8);
        // omega = 1/sqrt(pi) up to phase, psi = 1/pi
        assert!((ext.omega[0].norm() - 1.0 / PI.sqrt()).abs() < 1e-10);
        assert!(ext.omega[1..].iter().all(|w| w.norm() < 1e-10));
        assert!((ext.psi[0].norm() - 1.0 / PI).abs() < 1e-10);
        assert!((pairing(&spec, &[c(1.0 / PI)]).unwrap() - c(t)).norm() < 1e-12);
    }

    #[test]
    fn zero_coefficient_has_degenerate_extremal() {
        let r = alpha_norm(&BeltramiSpec::zero(), 2).unwrap();
        let ext = extremal_omega(&r, 2).unwrap();
        assert!(ext.degenerate);
        assert!(ext.psi.is_empty());
        assert_eq!(pairing(&BeltramiSpec::zero(), &[c(1.0)]).unwrap(), c(0.0));
        let spec = BeltramiSpec::single_term(c(0.5), 0.0, -1).unwrap();
        assert_eq!(pairing(&spec, &[]).unwrap(), c(0.0));
    }
}
