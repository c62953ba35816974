//! The three subcommands: exact series tables, oracle tongue tables, and the
//! verification suite.

use crate::config::{Analysis, RunConfig};
use crate::emit::{dec, field, Table};
use hilltongue::error::SeriesError;
use hilltongue::floquet::NumericProblem;
use hilltongue::hillseries::{
    compose_g, diagonal_g, eigen_series, leading_coefficient_fast, EigenBranch,
    HillCoefficientSeries, Parity,
};
use hilltongue::lindstedt::expand;
use hilltongue::tongues::{asymptotic_order, classify_shape, coexistence_check};
use hilltongue::verify;
use hilltongue::TongueRecord;
use num::ToPrimitive;
use rayon::prelude::*;
use std::path::Path;

/// Failure lanes mapped to exit codes 1 / 2 / 3.
#[derive(Debug)]
pub enum RunError {
    Validation(String),
    Numerical(String),
    Verification(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Validation(_) => 1,
            RunError::Numerical(_) => 2,
            RunError::Verification(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Validation(m) | RunError::Numerical(m) | RunError::Verification(m) => m,
        }
    }
}

fn series_err(e: SeriesError) -> RunError {
    match &e {
        SeriesError::InvalidSpec(_) | SeriesError::OrderMismatch { .. } => {
            RunError::Validation(e.to_string())
        }
        _ => RunError::Numerical(e.to_string()),
    }
}

fn io_err(e: std::io::Error) -> RunError {
    RunError::Numerical(format!("output failure: {e}"))
}

fn rat_str(r: &hilltongue::Rat) -> String {
    r.to_string()
}

fn rat_dec(r: &hilltongue::Rat) -> String {
    dec(r.to_f64().unwrap_or(f64::NAN))
}

fn build_series(cfg: &RunConfig) -> Result<(hilltongue::LindstedtExpansion, HillCoefficientSeries), RunError> {
    let l = expand(&cfg.osc).map_err(series_err)?;
    let series = compose_g(&cfg.coupling, &l).map_err(series_err)?;
    Ok((l, series))
}

fn branch_pairs(
    series: &HillCoefficientSeries,
    n_max: usize,
) -> Result<Vec<(EigenBranch, EigenBranch)>, RunError> {
    (1..=n_max)
        .map(|n| {
            let plus = eigen_series(series, n, Parity::Even).map_err(series_err)?;
            let minus = eigen_series(series, n, Parity::Odd).map_err(series_err)?;
            Ok((plus, minus))
        })
        .collect()
}

/// Exact series tables plus the shape and coexistence analyses when requested.
pub fn cmd_series(cfg: &RunConfig, out: &Path, provenance: &str) -> Result<Vec<String>, RunError> {
    let (l, series) = build_series(cfg)?;
    let mut written = Vec::new();

    let mut freq = Table::new("series_frequency.csv", "n,omega2,omega2_decimal,kappa,kappa_decimal");
    for n in 0..=cfg.order {
        freq.push(format!(
            "{n},{},{},{},{}",
            field(&rat_str(l.omega2(n))),
            rat_dec(l.omega2(n)),
            field(&rat_str(l.kappa(n))),
            rat_dec(l.kappa(n)),
        ));
    }
    written.push(freq.write(out, provenance).map_err(io_err)?.display().to_string());

    let mut orbit = Table::new("series_orbit.csv", "n,k,coeff,coeff_decimal");
    let mut coefficient = Table::new("series_coefficient.csv", "n,k,coeff,coeff_decimal");
    for n in 1..=cfg.order {
        for k in 0..=l.u(n).degree() {
            let c = l.u(n).coeff(k);
            orbit.push(format!("{n},{k},{},{}", field(&c.to_string()), rat_dec(&c)));
        }
        for k in 0..=series.g(n).degree() {
            let c = series.g(n).coeff(k);
            coefficient.push(format!("{n},{k},{},{}", field(&c.to_string()), rat_dec(&c)));
        }
    }
    written.push(orbit.write(out, provenance).map_err(io_err)?.display().to_string());
    written.push(coefficient.write(out, provenance).map_err(io_err)?.display().to_string());

    let mut eigen = Table::new(
        "series_eigen.csv",
        "n_tongue,parity,n,lambda,lambda_decimal,b,b_decimal",
    );
    for n_tongue in 0..=cfg.n_max {
        for parity in [Parity::Even, Parity::Odd] {
            if n_tongue == 0 && parity == Parity::Odd {
                continue;
            }
            let branch = eigen_series(&series, n_tongue, parity).map_err(series_err)?;
            for n in 0..=cfg.order {
                eigen.push(format!(
                    "{n_tongue},{},{n},{},{},{},{}",
                    parity.label(),
                    field(&branch.lambda(n).to_string()),
                    rat_dec(branch.lambda(n)),
                    field(&branch.b(n).to_string()),
                    rat_dec(branch.b(n)),
                ));
            }
        }
    }
    written.push(eigen.write(out, provenance).map_err(io_err)?.display().to_string());

    let diag = diagonal_g(&cfg.osc, &cfg.coupling).map_err(series_err)?;
    let pairs = branch_pairs(&series, cfg.n_max)?;
    let mut leading = Table::new(
        "series_leading.csv",
        "n_tongue,c_fast,c_fast_decimal,c_split,two_route_equal",
    );
    for (n, (plus, minus)) in (1..=cfg.n_max).zip(&pairs) {
        let fast = leading_coefficient_fast(&diag, n);
        let split = plus.lambda(n) - minus.lambda(n);
        leading.push(format!(
            "{n},{},{},{},{}",
            field(&fast.to_string()),
            rat_dec(&fast),
            field(&split.to_string()),
            fast == split,
        ));
    }
    written.push(leading.write(out, provenance).map_err(io_err)?.display().to_string());

    if cfg.analyses.contains(&Analysis::Shape) {
        let mut shape = Table::new(
            "shape.csv",
            "n_tongue,classification,lead_order_plus,lead_order_minus,sign_plus,sign_minus",
        );
        for (n, (plus, minus)) in (1..=cfg.n_max).zip(&pairs) {
            let v = classify_shape(plus, minus).map_err(series_err)?;
            let (lp, lm) = v
                .leading_orders
                .map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
            let (sp, sm) = v
                .leading_signs
                .map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
            shape.push(format!("{n},{},{lp},{lm},{sp},{sm}", v.classification.label()));
        }
        written.push(shape.write(out, provenance).map_err(io_err)?.display().to_string());
    }

    if cfg.analyses.contains(&Analysis::Coexist) {
        let mut coexist = Table::new("coexistence.csv", "key,value");
        match coexistence_check(&cfg.osc, &cfg.coupling, &l) {
            Ok(report) => {
                coexist.push(format!("detected,{}", report.detected));
                coexist.push(format!(
                    "n_ince,{}",
                    report.n_ince.map_or(String::new(), |n| n.to_string())
                ));
                coexist.push(format!("a,{}", field(&report.a.to_string())));
                coexist.push(format!("scale,{}", field(&report.scale.to_string())));
                coexist.push(format!("multiplier,{}", field(&report.multiplier.to_string())));
                coexist.push(format!("residual,{}", field(&report.residual.to_string())));
                for (n, b) in report.b_series.iter().enumerate() {
                    coexist.push(format!("b_{n},{}", field(&b.to_string())));
                }
            }
            Err(SeriesError::DegenerateFit(msg)) => {
                coexist.push("detected,false".into());
                coexist.push(format!("degenerate,{}", field(&msg)));
            }
            Err(e) => return Err(series_err(e)),
        }
        written.push(coexist.write(out, provenance).map_err(io_err)?.display().to_string());
    }

    Ok(written)
}

/// Oracle tongue table (and the order fits when requested).
pub fn cmd_tongues(cfg: &RunConfig, out: &Path, provenance: &str) -> Result<Vec<String>, RunError> {
    let (_, series) = build_series(cfg)?;
    let pairs = branch_pairs(&series, cfg.n_max)?;

    // One problem per grid amplitude, fanned out across the pool; rows are
    // reassembled in deterministic order afterwards.
    let per_q: Vec<Result<Vec<TongueRecord>, RunError>> = cfg
        .q_grid
        .par_iter()
        .map(|q| {
            let problem = NumericProblem::new(&cfg.osc, &cfg.coupling, *q, cfg.settings.clone())
                .map_err(|e| RunError::Numerical(format!("q = {q}: {e}")))?;
            (1..=cfg.n_max as u32)
                .map(|n| {
                    problem
                        .tongue_boundaries(n)
                        .map_err(|e| RunError::Numerical(format!("N = {n}, q = {q}: {e}")))
                })
                .collect()
        })
        .collect();
    let mut by_q = Vec::with_capacity(per_q.len());
    for r in per_q {
        by_q.push(r?);
    }

    let mut table = Table::new(
        "tongues.csv",
        "n_tongue,q,beta_minus,beta_plus,length,series_beta_minus,series_beta_plus,abs_gap",
    );
    let mut per_n: Vec<Vec<TongueRecord>> = vec![Vec::new(); cfg.n_max + 1];
    for n in 1..=cfg.n_max {
        let (plus, minus) = &pairs[n - 1];
        for (qi, q) in cfg.q_grid.iter().enumerate() {
            let rec = &by_q[qi][n - 1];
            let s_even = plus.beta_eval_f64(*q);
            let s_odd = minus.beta_eval_f64(*q);
            let gap = (rec.beta_even - s_even).abs().max((rec.beta_odd - s_odd).abs());
            table.push(format!(
                "{n},{},{},{},{},{},{},{}",
                dec(*q),
                dec(rec.beta_minus),
                dec(rec.beta_plus),
                dec(rec.length),
                dec(s_even.min(s_odd)),
                dec(s_even.max(s_odd)),
                dec(gap),
            ));
            per_n[n].push(rec.clone());
        }
    }
    let mut written = vec![table.write(out, provenance).map_err(io_err)?.display().to_string()];

    if cfg.analyses.contains(&Analysis::Order) {
        let mut order = Table::new(
            "order.csv",
            "n_tongue,slope,intercept,c_abs,points_used,collapsed",
        );
        for n in 1..=cfg.n_max {
            match asymptotic_order(&per_n[n], cfg.zero_floor) {
                Ok(est) if est.collapsed => {
                    order.push(format!("{n},,,,0,true"));
                }
                Ok(est) => {
                    order.push(format!(
                        "{n},{},{},{},{},false",
                        dec(est.slope),
                        dec(est.intercept),
                        dec(est.c_abs),
                        est.points_used,
                    ));
                }
                Err(e) => {
                    order.push(format!("{n},,,,{},false", field(&e.to_string())));
                }
            }
        }
        written.push(order.write(out, provenance).map_err(io_err)?.display().to_string());
    }

    Ok(written)
}

/// Run the verification suite, print one line per check, and write the report.
pub fn cmd_verify(out: &Path, provenance: &str) -> Result<Vec<String>, RunError> {
    let reports = verify::run_all();
    // Timings go to stdout only; the written report stays byte-identical
    // across reruns.
    let mut table = Table::new("verify.csv", "name,passed,detail");
    let mut failures = 0;
    for r in &reports {
        println!("{}", r.line());
        if !r.passed {
            failures += 1;
        }
        table.push(format!("{},{},{}", field(r.name), r.passed, field(&r.detail)));
    }
    let written = vec![table.write(out, provenance).map_err(io_err)?.display().to_string()];
    if failures > 0 {
        return Err(RunError::Verification(format!("{failures} verification checks failed")));
    }
    Ok(written)
}
