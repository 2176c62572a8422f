use std::fmt::Write as _;

use grunsky::abelian::{alpha_norm, extremal_omega, BeltramiSpec};
use grunsky::families::{family_beltrami, family_map, Family, FamilySpec};
use grunsky::grunsky::{grunsky_coefficients, grunsky_norm, LaurentMap};
use grunsky::verify::{
    fredholm_eigenvalue, golusin_sweep, lemma4_check, metric_lambda_kappa, upper_metric,
    verify_theorem1_ladder, FredholmSource,
};
use grunsky::{Error, Result, C64};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NotConverged,
    InvariantViolated,
}

pub struct Outcome {
    pub result: Value,
    pub status: Status,
    pub csv: String,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn status_of(converged: bool, invariant_ok: bool) -> Status {
    if !invariant_ok {
        Status::InvariantViolated
    } else if !converged {
        Status::NotConverged
    } else {
        Status::Ok
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Coefficients => coefficients(cfg),
        Command::Norm => norm(cfg),
        Command::Alpha => alpha(cfg),
        Command::Verify => verify(cfg),
        Command::Metric => metric(cfg),
        Command::Lemma4 => lemma4(cfg),
        Command::Fredholm => fredholm(cfg),
    }
}

fn family(cfg: &RunConfig) -> Family {
    cfg.family.expect("validated: family present")
}

fn spec(cfg: &RunConfig) -> Result<FamilySpec> {
    family(cfg).at(cfg.t.expect("validated: t present"))
}

/// The map to analyse, expanded far enough for the largest `N`.
fn source_map(cfg: &RunConfig) -> Result<(LaurentMap, Option<FamilySpec>)> {
    if let Some(path) = &cfg.coeffs {
        return Ok((grunsky::io::read_laurent_map(path.as_ref())?, None));
    }
    let spec = spec(cfg)?;
    Ok((family_map(&spec, 2 * cfg.max_n() - 1)?, Some(spec)))
}

fn coefficients(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.max_n();
    let (map, _) = source_map(cfg)?;
    let table = grunsky_coefficients(&map, n)?;
    let mut csv = String::from("m,n,re,im\n");
    for (i, row) in table.rows().iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{:e},{:e}", i + 1, j + 1, a.re, a.im);
        }
    }
    Ok(Outcome {
        result: json!({
            "n": n,
            "b0": map.b0(),
            "tail": map.tail(),
            "truncated": map.is_truncated(),
            "alpha": table.rows(),
        }),
        status: Status::Ok,
        csv,
    })
}

fn norm(cfg: &RunConfig) -> Result<Outcome> {
    let (map, spec) = source_map(cfg)?;
    let mut report = grunsky_norm(&map, &cfg.ladder)?;
    let mut qc_ok = true;
    if let Some(spec) = spec {
        report = report.with_k_bound(spec.t.norm());
        qc_ok = grunsky::grunsky::qc_bound_check(&report, spec.t.norm())?;
    }
    let mut csv = String::from("N,kappa,residual\n");
    for row in &report.rows {
        let _ = writeln!(csv, "{},{:e},{:e}", row.n, row.kappa, row.residual);
    }
    let monotone = report
        .rows
        .windows(2)
        .all(|w| w[1].kappa >= w[0].kappa - grunsky::grunsky::MONOTONE_SLACK);
    let mut result = to_value(&report);
    result["monotone"] = json!(monotone);
    result["qc_bound_ok"] = json!(qc_ok);
    Ok(Outcome {
        status: status_of(report.all_converged(), qc_ok && !report.univalence_violated),
        result,
        csv,
    })
}

/// The Beltrami coefficient of the family at `t`; with normalization, the
/// unit direction of `arg t` scaled to sup norm `|t|`.
fn beltrami(cfg: &RunConfig) -> Result<BeltramiSpec> {
    let t = cfg.t.expect("validated: t present");
    if !cfg.normalized {
        return Ok(family_beltrami(&family(cfg).at(t)?)?.spec);
    }
    if t.norm() == 0.0 || t.norm() > 1.0 {
        return Err(Error::Domain(format!("normalized |t| = {} outside (0, 1]", t.norm())));
    }
    let direction = family(cfg).at(t / t.norm() * 0.5)?;
    family_beltrami(&direction)?
        .spec
        .unit_normalized()?
        .scaled(C64::new(t.norm(), 0.0))
}

fn alpha(cfg: &RunConfig) -> Result<Outcome> {
    let mu = beltrami(cfg)?;
    let mut rows = Vec::new();
    let mut csv = String::from("N,sigma,residual\n");
    let mut converged = true;
    for &n in &cfg.ladder {
        let res = alpha_norm(&mu, n)?;
        converged &= res.converged;
        let _ = writeln!(csv, "{},{:e},{:e}", n, res.sigma, res.residual);
        rows.push(json!({
            "n": n,
            "sigma": res.sigma,
            "residual": res.residual,
            "iterations": res.iterations,
            "converged": res.converged,
            "method": res.method,
        }));
    }
    let n = cfg.max_n();
    let top = alpha_norm(&mu, n)?;
    let omega = extremal_omega(&top, n)?;
    Ok(Outcome {
        result: json!({
            "sup_norm": mu.sup_norm(),
            "rows": rows,
            "extremal": omega,
        }),
        status: status_of(converged, true),
        csv,
    })
}

fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let fam = family(cfg);
    let reports = verify_theorem1_ladder(fam, &cfg.t_grid, &cfg.ladder)?;
    let golusin = golusin_sweep(fam, &cfg.t_grid, cfg.max_n(), cfg.budget, cfg.seed)?;
    let mut csv = String::from("N,r,kappa,lower,upper,position\n");
    for rep in &reports {
        for row in &rep.rows {
            let _ = writeln!(
                csv,
                "{},{},{:e},{:e},{:e},{:e}",
                rep.n, row.r, row.kappa, row.lower, row.upper, row.position
            );
        }
    }
    let sandwich_ok = reports.iter().all(|r| r.all_sandwich_ok());
    let converged = reports.iter().all(|r| r.all_converged());
    Ok(Outcome {
        result: json!({
            "sandwich_ok": sandwich_ok,
            "reports": reports,
            "golusin": golusin,
        }),
        status: status_of(converged, sandwich_ok && golusin.violations == 0),
        csv,
    })
}

fn metric(cfg: &RunConfig) -> Result<Outcome> {
    let fam = family(cfg);
    let n = cfg.max_n();
    let alpha = grunsky::verify::unit_alpha(fam, n)?;
    let mut rows = Vec::new();
    let mut csv = String::from("r,lambda_est,lambda_alpha\n");
    for (i, &r) in cfg.t_grid.iter().enumerate() {
        let sample = metric_lambda_kappa(fam, r, n, cfg.budget, cfg.seed.wrapping_add(i as u64))?;
        let la = upper_metric(alpha, r);
        let _ = writeln!(csv, "{},{:e},{:e}", r, sample.lambda_est, la);
        let mut row = to_value(&sample);
        row["lambda_alpha"] = json!(la);
        rows.push(row);
    }
    Ok(Outcome {
        result: json!({ "n": n, "alpha": alpha, "rows": rows }),
        status: Status::Ok,
        csv,
    })
}

fn lemma4(cfg: &RunConfig) -> Result<Outcome> {
    let rep = lemma4_check(family(cfg), cfg.r_max, cfg.grid, cfg.max_n(), cfg.budget, cfg.seed)?;
    let mut csv = String::from("r,lambda_est\n");
    for (r, l) in &rep.samples {
        let _ = writeln!(csv, "{},{:e}", r, l);
    }
    Ok(Outcome {
        result: to_value(&rep),
        status: Status::Ok,
        csv,
    })
}

fn fredholm(cfg: &RunConfig) -> Result<Outcome> {
    let (map, spec) = source_map(cfg)?;
    let mut rows = Vec::new();
    let mut csv = String::from("N,kappa,rho\n");
    for &n in &cfg.ladder {
        let source = match spec {
            Some(s) => FredholmSource::Family(s),
            None => FredholmSource::Map(&map),
        };
        let rep = fredholm_eigenvalue(source, n)?;
        let _ = writeln!(csv, "{},{:e},{:e}", n, rep.kappa, rep.rho.value());
        rows.push(rep);
    }
    Ok(Outcome {
        result: json!({ "rows": rows }),
        status: Status::Ok,
        csv,
    })
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Invariant(_) | Error::CriterionViolation(_) => 4,
        Error::Estimation(_) | Error::SingularPoint { .. } | Error::Pole { .. } => 3,
        _ => 2,
    }
}

pub fn status_code(status: Status) -> i32 {
    match status {
        Status::Ok => 0,
        Status::NotConverged => 3,
        Status::InvariantViolated => 4,
    }
}
