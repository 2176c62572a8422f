//! Closed-form maps with known extremal quasiconformal extensions.
//!
//! * `joukowski`: `f_t(z) = z + t/z` outside, `z + t conj(z)` inside.
//! * `power:m` (odd `m >= 3`): `f(z) = z (1 + t z^{-m})^{2/m}`, extended inside
//!   by `z [1 + t (|z|/z)^m]^{2/m}`.
//!
//! Only the Beltrami coefficients of `joukowski` and `power:3` are taken in
//! closed form; for larger `m` they are produced by differentiating the
//! extension numerically ([`beltrami_oracle`]) and fitting one polar term.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::abelian::{BeltramiKind, BeltramiSpec, PolarTerm};
use crate::grunsky::LaurentMap;
use crate::quadrature::PolarGrid;
use crate::series::series_binomial;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Joukowski,
    /// Odd `m >= 3`.
    Power(u32),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Joukowski => write!(f, "joukowski"),
            Family::Power(m) => write!(f, "power:{m}"),
        }
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "joukowski" {
            return Ok(Family::Joukowski);
        }
        if let Some(m) = s.strip_prefix("power:") {
            let m: u32 = m
                .parse()
                .map_err(|_| Error::Parse(format!("family: bad exponent in {s:?}")))?;
            let fam = Family::Power(m);
            fam.validate()?;
            return Ok(fam);
        }
        Err(Error::Parse(format!(
            "family: expected \"joukowski\" or \"power:<odd m>\", got {s:?}"
        )))
    }
}

impl Family {
    fn validate(&self) -> Result<()> {
        match *self {
            Family::Joukowski => Ok(()),
            Family::Power(m) if m >= 3 && m % 2 == 1 => Ok(()),
            Family::Power(m) => Err(Error::Domain(format!(
                "power family needs odd m >= 3, got {m}"
            ))),
        }
    }

    pub fn at(self, t: C64) -> Result<FamilySpec> {
        FamilySpec::new(self, t)
    }
}

/// A family member at parameter `t`, `|t| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilySpec {
    pub family: Family,
    pub t: C64,
}

impl FamilySpec {
    pub fn new(family: Family, t: C64) -> Result<Self> {
        family.validate()?;
        if t.norm().is_nan() || t.norm() >= 1.0 {
            return Err(Error::Domain(format!("|t| = {} must be < 1", t.norm())));
        }
        Ok(FamilySpec { family, t })
    }

    pub fn joukowski(t: C64) -> Result<Self> {
        Self::new(Family::Joukowski, t)
    }

    pub fn power(m: u32, t: C64) -> Result<Self> {
        Self::new(Family::Power(m), t)
    }

    pub fn with_t(&self, t: C64) -> Result<Self> {
        Self::new(self.family, t)
    }

    /// The extremal extension `w(z)` on `|z| < 1`.
    pub fn extension(&self, z: C64) -> C64 {
        match self.family {
            Family::Joukowski => z + self.t * z.conj(),
            Family::Power(m) => {
                let r = z.norm();
                if r == 0.0 {
                    return z;
                }
                let unit = (z.conj() / r).powi(m as i32);
                z * (C64::new(1.0, 0.0) + self.t * unit).powf(2.0 / m as f64)
            }
        }
    }

    /// The map on `|z| > 1` in closed form (principal branch).
    pub fn exterior(&self, z: C64) -> C64 {
        match self.family {
            Family::Joukowski => z + self.t / z,
            Family::Power(m) => {
                z * (C64::new(1.0, 0.0) + self.t * z.powi(-(m as i32))).powf(2.0 / m as f64)
            }
        }
    }
}

/// Laurent tail of the family member with `K` coefficients.
///
/// `power:m` gives `b_{jm-1} = C(2/m, j) t^j` and a truncated map;
/// `joukowski` gives the exact map `b_1 = t`.
pub fn family_map(spec: &FamilySpec, k: usize) -> Result<LaurentMap> {
    if k == 0 {
        return Err(Error::Domain("tail length K must be at least 1".into()));
    }
    let zero = C64::new(0.0, 0.0);
    match spec.family {
        Family::Joukowski => {
            let mut tail = vec![zero; k];
            tail[0] = spec.t;
            LaurentMap::new(zero, tail)
        }
        Family::Power(m) => {
            let m = m as usize;
            let terms = (k + 1) / m;
            let binom = series_binomial(2.0 / m as f64, terms + 1);
            let mut tail = vec![zero; k];
            let mut tj = C64::new(1.0, 0.0);
            for j in 1..=terms {
                tj *= spec.t;
                tail[j * m - 2] = binom.coeffs()[j] * tj;
            }
            LaurentMap::truncated(zero, tail)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BeltramiSource {
    ClosedForm,
    /// One polar term fitted to [`beltrami_oracle`] samples.
    Fitted,
    /// The fit failed; the oracle samples on the standard grid are used as is.
    Sampled,
}

#[derive(Debug, Clone)]
pub struct FamilyBeltrami {
    pub spec: BeltramiSpec,
    pub source: BeltramiSource,
    pub fit_residual: Option<f64>,
}

/// Largest pointwise misfit accepted for a one-term fit.
pub const FIT_TOLERANCE: f64 = 1e-8;

pub fn family_beltrami(spec: &FamilySpec) -> Result<FamilyBeltrami> {
    let closed = |k: i32| -> Result<FamilyBeltrami> {
        Ok(FamilyBeltrami {
            spec: BeltramiSpec::single_term(spec.t, 0.0, k)?,
            source: BeltramiSource::ClosedForm,
            fit_residual: None,
        })
    };
    if spec.t == C64::new(0.0, 0.0) {
        return Ok(FamilyBeltrami {
            spec: BeltramiSpec::zero(),
            source: BeltramiSource::ClosedForm,
            fit_residual: None,
        });
    }
    match spec.family {
        Family::Joukowski => closed(0),
        Family::Power(3) => closed(-1),
        Family::Power(m) => {
            let n_theta = (4 * m as usize).max(64).next_power_of_two();
            let grid = PolarGrid::gauss_legendre(16, n_theta);
            let sampled = beltrami_oracle(spec, &grid)?;
            let fit = fit_single_term(&sampled)?;
            if fit.1 <= FIT_TOLERANCE {
                Ok(FamilyBeltrami {
                    spec: BeltramiSpec::polar_separable(vec![fit.0])?,
                    source: BeltramiSource::Fitted,
                    fit_residual: Some(fit.1),
                })
            } else {
                Ok(FamilyBeltrami {
                    spec: beltrami_oracle(spec, &PolarGrid::standard())?,
                    source: BeltramiSource::Sampled,
                    fit_residual: Some(fit.1),
                })
            }
        }
    }
}

/// Fits `c r^a e^{i k theta}` to samples: `k` is the dominant angular mode,
/// `a` the log-log slope of its radial profile (snapped to an integer when
/// within 1e-6), `c` the least-squares amplitude. Returns the term and the
/// largest pointwise misfit.
fn fit_single_term(spec: &BeltramiSpec) -> Result<(PolarTerm, f64)> {
    let BeltramiKind::Sampled(s) = spec.kind() else {
        return Err(Error::Domain("fit needs sampled data".into()));
    };
    let grid = s.grid();
    let n_theta = grid.n_theta();
    let values = s.values();
    let half = (n_theta / 2) as i32;
    let mode = |i: usize, k: i32| -> C64 {
        let ring = &values[i * n_theta..(i + 1) * n_theta];
        ring.iter()
            .enumerate()
            .map(|(j, v)| v * C64::from_polar(1.0, -(k as f64) * grid.theta(j)))
            .sum::<C64>()
            / n_theta as f64
    };
    let mut best_k = 0;
    let mut best_energy = -1.0;
    for k in -half + 1..half {
        let e: f64 = (0..grid.radii().len()).map(|i| mode(i, k).norm_sqr()).sum();
        if e > best_energy {
            best_energy = e;
            best_k = k;
        }
    }
    let profile: Vec<C64> = (0..grid.radii().len()).map(|i| mode(i, best_k)).collect();
    let logs: Vec<(f64, f64)> = grid
        .radii()
        .iter()
        .zip(&profile)
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(r, c)| (r.ln(), c.norm().ln()))
        .collect();
    let mut a = if logs.len() >= 2 {
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        0.0
    };
    if (a - a.round()).abs() < 1e-6 {
        a = a.round();
    }
    a = a.max(0.0);
    let (num, den) = grid.radii().iter().zip(&profile).fold(
        (C64::new(0.0, 0.0), 0.0),
        |(num, den), (r, c)| (num + c * r.powf(a), den + r.powf(2.0 * a)),
    );
    let term = PolarTerm::new(num / den, a, best_k);
    let mut misfit: f64 = 0.0;
    for (i, &r) in grid.radii().iter().enumerate() {
        for j in 0..n_theta {
            let model = term.coeff * r.powf(a) * C64::from_polar(1.0, best_k as f64 * grid.theta(j));
            misfit = misfit.max((values[i * n_theta + j] - model).norm());
        }
    }
    Ok((term, misfit))
}

/// Relative step of the central differences in [`beltrami_oracle`].
pub const ORACLE_STEP: f64 = 1e-5;

/// `mu = d_zbar w / d_z w` of the closed-form extension by central
/// differences at every node of `grid`.
pub fn beltrami_oracle(spec: &FamilySpec, grid: &PolarGrid) -> Result<BeltramiSpec> {
    if grid.radii().iter().any(|&r| r <= 0.0) {
        return Err(Error::Domain("oracle grid must avoid r = 0".into()));
    }
    let values = grid
        .points()
        .map(|z| oracle_point(spec, z))
        .collect::<Result<Vec<_>>>()?;
    BeltramiSpec::sampled(grid.clone(), values)
}

fn oracle_point(spec: &FamilySpec, z: C64) -> Result<C64> {
    let h = ORACLE_STEP * z.norm();
    let hx = C64::new(h, 0.0);
    let hy = C64::new(0.0, h);
    let dx = (spec.extension(z + hx) - spec.extension(z - hx)) / (2.0 * h);
    let dy = (spec.extension(z + hy) - spec.extension(z - hy)) / (2.0 * h);
    let i = C64::new(0.0, 1.0);
    let dz = (dx - i * dy) * 0.5;
    let dzbar = (dx + i * dy) * 0.5;
    if dz.norm() < 1e-8 {
        return Err(Error::SingularPoint {
            re: z.re,
            im: z.im,
            modulus: dz.norm(),
        });
    }
    Ok(dzbar / dz)
}

/// `S_f = f'''/f' - 3/2 (f''/f')^2` from the Laurent tail.
pub fn schwarzian(map: &LaurentMap, z: C64) -> Result<C64> {
    if z.norm() <= 1.0 {
        return Err(Error::Domain(format!("|z| = {} must exceed 1", z.norm())));
    }
    let [_, d1, d2, d3] = map.derivatives(z);
    if d1.norm() < 1e-14 {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    let q = d2 / d1;
    Ok(d3 / d1 - 1.5 * q * q)
}

/// Grid lower bound for `sup_{|z|>1} (|z|^2 - 1)^2 |S_f(z)|`.
#[derive(Debug, Clone, Serialize)]
pub struct BNormEstimate {
    pub value: f64,
    pub at: C64,
    pub radial_samples: usize,
    pub angular_samples: usize,
    pub r_min: f64,
    pub r_max: f64,
}

const BNORM_R_MIN: f64 = 1.0 + 1e-3;
const BNORM_R_MAX: f64 = 10.0;

fn bnorm_weight(map: &LaurentMap, r: f64, theta: f64) -> Result<f64> {
    let z = C64::from_polar(r, theta);
    let s = schwarzian(map, z)?;
    Ok((r * r - 1.0).powi(2) * s.norm())
}

/// Samples `(|z|^2 - 1)^2 |S_f|` on `r - 1` log-spaced in `[1e-3, 9]` times a
/// uniform angular grid, then refines the best radial line by golden-section
/// search. The result is a lower bound.
pub fn bnorm(map: &LaurentMap, radial_samples: usize, angular_samples: usize) -> Result<BNormEstimate> {
    if radial_samples < 16 || angular_samples < 16 {
        return Err(Error::Domain("bnorm needs at least 16 samples per direction".into()));
    }
    let (lo, hi) = ((BNORM_R_MIN - 1.0).ln(), (BNORM_R_MAX - 1.0).ln());
    let radius = |i: f64| 1.0 + (lo + (hi - lo) * i / (radial_samples - 1) as f64).exp();
    let mut best = (0.0, 0usize, 0usize);
    for i in 0..radial_samples {
        let r = radius(i as f64);
        for j in 0..angular_samples {
            let th = 2.0 * std::f64::consts::PI * j as f64 / angular_samples as f64;
            let w = bnorm_weight(map, r, th)?;
            if w > best.0 {
                best = (w, i, j);
            }
        }
    }
    let theta = 2.0 * std::f64::consts::PI * best.2 as f64 / angular_samples as f64;
    let mut value = best.0;
    let mut at = C64::from_polar(radius(best.1 as f64), theta);
    if value > 0.0 {
        // golden section on the radial index within the neighbouring bracket
        let (mut a, mut b) = (
            (best.1 as f64 - 1.0).max(0.0),
            (best.1 as f64 + 1.0).min((radial_samples - 1) as f64),
        );
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let f = |s: f64| bnorm_weight(map, radius(s), theta);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (f(c)?, f(d)?);
        for _ in 0..60 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d)?;
            }
        }
        let s = 0.5 * (a + b);
        let fs = f(s)?;
        if fs > value {
            value = fs;
            at = C64::from_polar(radius(s), theta);
        }
    }
    Ok(BNormEstimate {
        value,
        at,
        radial_samples,
        angular_samples,
        r_min: BNORM_R_MIN,
        r_max: BNORM_R_MAX,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn parse_families() {
        assert_eq!("joukowski".parse::<Family>().unwrap(), Family::Joukowski);
        assert_eq!("power:3".parse::<Family>().unwrap(), Family::Power(3));
        assert!("power:4".parse::<Family>().is_err());
        assert!("power:1".parse::<Family>().is_err());
        assert!("ellipse".parse::<Family>().is_err());
        assert_eq!(Family::Power(5).to_string(), "power:5");
    }

    #[test]
    fn t_must_be_inside_disk() {
        assert!(FamilySpec::joukowski(c(1.0)).is_err());
        assert!(FamilySpec::power(3, C64::new(0.0, 0.99)).is_ok());
    }

    #[test]
    fn power3_tail() {
        let t = 0.6;
        let map = family_map(&FamilySpec::power(3, c(t)).unwrap(), 8).unwrap();
        assert!(map.is_truncated());
        assert!((map.coefficient(2) - c(0.4)).norm() < 1e-15);
        assert!((map.coefficient(5) - c(-0.04)).norm() < 1e-15);
        // C(2/3, 3) = (2/3)(-1/3)(-4/3)/6 = 4/81
        assert!((map.coefficient(8) - c(4.0 / 81.0 * 0.216)).norm() < 1e-15);
        for k in [1, 3, 4, 6, 7] {
            assert_eq!(map.coefficient(k), c(0.0));
        }
    }

    #[test]
    fn joukowski_tail_and_identity() {
        let map = family_map(&FamilySpec::joukowski(c(0.5)).unwrap(), 4).unwrap();
        assert_eq!(map.tail(), &[c(0.5), c(0.0), c(0.0), c(0.0)]);
        assert!(!map.is_truncated());
        let id = family_map(&FamilySpec::power(3, c(0.0)).unwrap(), 6).unwrap();
        assert!(id.tail().iter().all(|b| *b == c(0.0)));
    }

    #[test]
    fn catalog_beltrami_closed_forms() {
        let b = family_beltrami(&FamilySpec::power(3, c(0.6)).unwrap()).unwrap();
        assert_eq!(b.source, BeltramiSource::ClosedForm);
        assert_eq!(
            b.spec.kind(),
            &BeltramiKind::PolarSeparable(vec![PolarTerm::new(c(0.6), 0.0, -1)])
        );
        assert_eq!(b.spec.sup_norm(), 0.6);
        let j = family_beltrami(&FamilySpec::joukowski(c(0.5)).unwrap()).unwrap();
        assert_eq!(j.spec.eval(C64::new(0.2, 0.3)), Some(c(0.5)));
        let zero = family_beltrami(&FamilySpec::joukowski(c(0.0)).unwrap()).unwrap();
        assert!(zero.spec.is_zero());
    }

    #[test]
    fn power5_beltrami_is_fitted() {
        let t = C64::new(0.3, 0.2);
        let b = family_beltrami(&FamilySpec::power(5, t).unwrap()).unwrap();
        assert_eq!(b.source, BeltramiSource::Fitted);
        assert!(b.fit_residual.unwrap() <= FIT_TOLERANCE);
        let BeltramiKind::PolarSeparable(terms) = b.spec.kind() else {
            panic!("expected a polar term");
        };
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].angular_freq, -3);
        assert_eq!(terms[0].radial_power, 0.0);
        assert!((terms[0].coeff - t).norm() < 1e-8);
    }

    #[test]
    fn oracle_point_values() {
        let grid = PolarGrid::gauss_legendre(4, 8);
        let j = beltrami_oracle(&FamilySpec::joukowski(c(0.5)).unwrap(), &grid).unwrap();
        let BeltramiKind::Sampled(s) = j.kind() else { panic!() };
        assert!(s.values().iter().all(|v| (v - c(0.5)).norm() < 1e-6));

        let spec = FamilySpec::power(3, c(0.6)).unwrap();
        let z = C64::from_polar(0.5, std::f64::consts::PI / 3.0);
        let mu = oracle_point(&spec, z).unwrap();
        let want = C64::from_polar(0.6, -std::f64::consts::PI / 3.0);
        assert!((mu - want).norm() < 1e-6);

        let zero = beltrami_oracle(&FamilySpec::power(3, c(0.0)).unwrap(), &grid).unwrap();
        assert!(zero.sup_norm() < 1e-9, "{}", zero.sup_norm());
    }

    #[test]
    fn oracle_rejects_origin() {
        let grid = PolarGrid::uniform(4, 8);
        assert!(beltrami_oracle(&FamilySpec::joukowski(c(0.5)).unwrap(), &grid).is_ok());
        let bad = PolarGrid::new(vec![0.0, 0.5], vec![0.5, 0.5], 8).unwrap();
        assert!(matches!(
            beltrami_oracle(&FamilySpec::joukowski(c(0.5)).unwrap(), &bad),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn schwarzian_domain_errors() {
        let id = LaurentMap::identity();
        assert_eq!(schwarzian(&id, C64::new(2.0, -1.0)).unwrap(), c(0.0));
        assert!(matches!(schwarzian(&id, c(0.5)), Err(Error::Domain(_))));
        // f = z + 4/z has f'(2) = 0
        let bad = LaurentMap::new(c(0.0), vec![c(4.0)]).unwrap();
        assert!(matches!(schwarzian(&bad, c(2.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn bnorm_identity_and_ordering() {
        assert_eq!(bnorm(&LaurentMap::identity(), 16, 16).unwrap().value, 0.0);
        assert!(bnorm(&LaurentMap::identity(), 8, 16).is_err());
        let values: Vec<f64> = [0.5, 0.25, 0.125]
            .iter()
            .map(|&t| {
                let map = family_map(&FamilySpec::joukowski(c(t)).unwrap(), 1).unwrap();
                bnorm(&map, 64, 64).unwrap().value
            })
            .collect();
        assert!(values[0] > values[1] && values[1] > values[2] && values[2] > 0.0);
    }
}
