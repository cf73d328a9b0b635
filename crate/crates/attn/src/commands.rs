//! Command implementations. Each returns the rendered body and an exit status.

use std::fmt::Write as _;
use std::path::Path;

use attn_core::ic::order_ic;
use attn_core::optimal3::{solve, solve_with_thresholds, thresholds};
use attn_core::oracle::{ic_via_oracle, OracleCheck, Verdict};
use attn_core::search::{verify_against, SearchOptions};
use attn_core::{Belief, QuadraticModel, StateSpace};

use crate::config::{Command, Format, NumberList, RunConfig};
use crate::error::CliError;
use crate::io::{
    to_json, write_sweep_csv, IcRecord, OracleCheckRecord, OutcomeRecord, PolicyFile, SignalRecord,
    SweepRow, VerifyRecord,
};

/// Exit status of a command that ran to completion. Input errors exit with 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Negative,
    Inconclusive,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Negative => 1,
            Status::Inconclusive => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub status: Status,
    pub body: String,
}

pub const INPUT_ERROR: u8 = 2;

pub fn prior_belief(list: &NumberList) -> Result<Belief, CliError> {
    Ok(Belief::new(list.0.clone())?)
}

pub fn execute(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    match &cfg.command {
        Command::Solve { prior, kappa } => cmd_solve(&prior_belief(prior)?, *kappa, cfg.format),
        Command::CheckIc {
            policy,
            kappa,
            with_oracle,
            grid,
            tol,
        } => {
            let file = PolicyFile::load(policy)?;
            let oracle = with_oracle.then_some((*grid, *tol));
            cmd_check_ic(&file, *kappa, oracle, cfg.format)
        }
        Command::Sweep {
            prior,
            kappa_min,
            kappa_max,
            steps,
        } => {
            let rows = sweep_rows(&prior_belief(prior)?, *kappa_min, *kappa_max, *steps)?;
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf)?;
            Ok(Output {
                status: Status::Success,
                body: String::from_utf8(buf).expect("csv output is UTF-8"),
            })
        }
        Command::Verify {
            prior,
            kappa,
            grid,
            oracle_grid,
            tol,
            perturb_k2,
        } => {
            let opts = SearchOptions {
                grid: *grid,
                slope_grid: *grid,
                tol: *tol,
                inject_closed_form: true,
            };
            cmd_verify(
                &prior_belief(prior)?,
                *kappa,
                &opts,
                *oracle_grid,
                perturb_k2.unwrap_or(0.0),
                cfg.format,
            )
        }
        Command::Oracle {
            policy,
            kappa,
            grid,
            tol,
        } => cmd_oracle(&PolicyFile::load(policy)?, *kappa, *grid, *tol, cfg.format),
    }
}

/// Writes `body` to `out`, or to standard output.
pub fn emit(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn vec_str(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn opt_str(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
}

pub fn solve_record(prior: &Belief, kappa: f64) -> Result<OutcomeRecord, CliError> {
    let out = solve(prior, kappa)?;
    OutcomeRecord::new(prior, kappa, &out, thresholds(prior)?)
}

fn render_outcome(r: &OutcomeRecord, s: &mut String) {
    let t = &r.thresholds;
    let _ = writeln!(s, "regime      {}", r.regime);
    let _ = writeln!(s, "prior       {}", vec_str(&r.prior));
    let _ = writeln!(s, "kappa       {}", r.kappa);
    let _ = writeln!(
        s,
        "thresholds  k1={:.6} k2={:.6} k3={:.6} k4={:.6}",
        t.k1, t.k2, t.k3, t.k4
    );
    let _ = writeln!(s, "s*          {}", opt_str(r.s_star));
    let _ = writeln!(s, "slope used  {}", opt_str(r.slope_used));
    let _ = writeln!(s, "payoff      {:.6}", r.payoff);
    if r.degenerate {
        let _ = writeln!(s, "degenerate  true (downplaying and exaggeration tie)");
    }
    match r.signal {
        SignalRecord::Downplaying {
            pi_minus1,
            pi_plus1,
        } => {
            let _ = writeln!(s, "signal      pi(-1)={pi_minus1:.6} pi(1)={pi_plus1:.6}");
        }
        SignalRecord::Exaggeration { pi } => {
            let _ = writeln!(s, "signal      pi={pi:.6}");
        }
    }
    let _ = writeln!(s, "support");
    for (b, w) in r.support.iter().zip(&r.weights) {
        let _ = writeln!(
            s,
            "  w={w:.6}  nu={}  a={:.6} z={:.6}",
            vec_str(&b.probs),
            b.a,
            b.z
        );
    }
}

pub fn cmd_solve(prior: &Belief, kappa: f64, format: Format) -> Result<Output, CliError> {
    let rec = solve_record(prior, kappa)?;
    let body = match format {
        Format::Json => to_json(&rec)? + "\n",
        Format::Text => {
            let mut s = String::new();
            render_outcome(&rec, &mut s);
            s
        }
    };
    Ok(Output {
        status: Status::Success,
        body,
    })
}

fn render_oracle(c: &OracleCheckRecord, s: &mut String) {
    let _ = writeln!(s, "oracle      {} (tol {:.3e})", c.verdict, c.tol);
    for r in [&c.coarse, &c.fine] {
        let _ = writeln!(
            s,
            "  grid {:>4}  columns {:>6}  full {:.9}  best {:.9}  gap {:.3e}",
            r.grid, r.columns, r.full_attention_value, r.best_value, r.gap
        );
    }
    let _ = writeln!(s, "  best garbling (grid {})", c.fine.grid);
    for (b, w) in c.fine.garbling_support.iter().zip(&c.fine.garbling_weights) {
        let _ = writeln!(s, "    w={w:.6}  nu={}", vec_str(b));
    }
}

fn oracle_status(v: Verdict) -> Status {
    match v {
        Verdict::Ic => Status::Success,
        Verdict::NotIc => Status::Negative,
        Verdict::Inconclusive => Status::Inconclusive,
    }
}

pub fn cmd_check_ic(
    file: &PolicyFile,
    kappa: f64,
    oracle: Option<(usize, Option<f64>)>,
    format: Format,
) -> Result<Output, CliError> {
    let (model, policy) = file.model(kappa)?;
    let report = order_ic(&policy, &model)?;
    let mut rec = IcRecord::new(kappa, &report);
    let mut status = if report.ic {
        Status::Success
    } else {
        Status::Negative
    };
    let mut note = None;
    if let Some((grid, tol)) = oracle {
        let check = ic_via_oracle(&policy, &model, grid, tol)?;
        let agrees = match check.verdict {
            Verdict::Ic => report.ic,
            Verdict::NotIc => !report.ic,
            Verdict::Inconclusive => false,
        };
        if !agrees {
            status = Status::Inconclusive;
            if check.verdict != Verdict::Inconclusive {
                note = Some("order check and oracle disagree");
            }
        }
        rec.oracle = Some((&check).into());
    }
    let body = match format {
        Format::Json => to_json(&rec)? + "\n",
        Format::Text => {
            let mut s = String::new();
            let verdict = if rec.ic { "IC" } else { "not IC" };
            let _ = writeln!(s, "order check {verdict} at kappa {kappa}");
            if let Some(m) = rec.min_margin {
                let _ = writeln!(s, "min margin  {m:.6e}");
            }
            for p in &rec.pairs {
                let _ = writeln!(
                    s,
                    "  pair ({}, {})  choice {:.9}  psych {:.9}  margin {:+.3e}  {}",
                    p.i,
                    p.j,
                    p.choice,
                    p.psych,
                    p.margin,
                    if p.holds { "ok" } else { "VIOLATED" }
                );
            }
            if let Some(slopes) = &rec.slopes {
                for c in slopes {
                    let _ = writeln!(
                        s,
                        "  slope {}  cutoff {}  {}",
                        opt_str(c.slope),
                        opt_str(c.cutoff),
                        if c.holds { "ok" } else { "VIOLATED" }
                    );
                }
            }
            if let Some(o) = &rec.oracle {
                render_oracle(o, &mut s);
            }
            if let Some(n) = note {
                let _ = writeln!(s, "note        {n}");
            }
            s
        }
    };
    Ok(Output { status, body })
}

pub fn cmd_oracle(
    file: &PolicyFile,
    kappa: f64,
    grid: usize,
    tol: Option<f64>,
    format: Format,
) -> Result<Output, CliError> {
    let (model, policy) = file.model(kappa)?;
    let check = ic_via_oracle(&policy, &model, grid, tol)?;
    let rec = OracleCheckRecord::from(&check);
    let body = match format {
        Format::Json => to_json(&rec)? + "\n",
        Format::Text => {
            let mut s = String::new();
            render_oracle(&rec, &mut s);
            s
        }
    };
    Ok(Output {
        status: oracle_status(check.verdict),
        body,
    })
}

/// `steps` evenly spaced values from `lo` to `hi`, both included.
pub fn kappa_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

pub fn sweep_rows(
    prior: &Belief,
    kappa_min: f64,
    kappa_max: f64,
    steps: usize,
) -> Result<Vec<SweepRow>, CliError> {
    kappa_grid(kappa_min, kappa_max, steps)
        .into_iter()
        .map(|kappa| {
            let out = solve(prior, kappa)?;
            Ok(SweepRow {
                kappa,
                regime: out.regime,
                payoff: out.payoff,
                s_star: out.s_star,
                slope_used: out.slope_used,
                signal: out.signal,
                degenerate: out.degenerate,
            })
        })
        .collect()
}

/// Runs the grid search and the oracle against the closed form, with the
/// second threshold shifted by `perturb_k2`.
pub fn verify_record(
    prior: &Belief,
    kappa: f64,
    opts: &SearchOptions,
    oracle_grid: usize,
    perturb_k2: f64,
) -> Result<(VerifyRecord, OracleCheck), CliError> {
    let mut t = thresholds(prior)?;
    t.k2 += perturb_k2;
    let closed = solve_with_thresholds(prior, kappa, &t)?;
    let report = verify_against(prior, kappa, &closed, opts)?;
    let model = QuadraticModel::new(StateSpace::three(), prior.clone(), kappa)?;
    let oracle = ic_via_oracle(&closed.policy, &model, oracle_grid, Some(opts.tol))?;
    let closed_rec = OutcomeRecord::new(prior, kappa, &closed, t)?;
    Ok((
        VerifyRecord::new(&report, closed_rec, opts.tol, &oracle),
        oracle,
    ))
}

pub fn cmd_verify(
    prior: &Belief,
    kappa: f64,
    opts: &SearchOptions,
    oracle_grid: usize,
    perturb_k2: f64,
    format: Format,
) -> Result<Output, CliError> {
    let (rec, oracle) = verify_record(prior, kappa, opts, oracle_grid, perturb_k2)?;
    let status = if rec.passed {
        Status::Success
    } else if rec.search_passed && oracle.verdict == Verdict::Inconclusive {
        Status::Inconclusive
    } else {
        Status::Negative
    };
    let body = match format {
        Format::Json => to_json(&rec)? + "\n",
        Format::Text => {
            let mut s = String::new();
            let flag = |b: bool| if b { "ok" } else { "FAILED" };
            let _ = writeln!(
                s,
                "closed form {} payoff {:.9}",
                rec.closed_form.regime, rec.closed_form.payoff
            );
            let _ = writeln!(
                s,
                "search best {:.9} ({:?}{})",
                rec.best_payoff,
                rec.best,
                if rec.best_injected { ", injected" } else { "" }
            );
            if let Some(g) = rec.best_grid_payoff {
                let _ = writeln!(s, "grid only   {g:.9}");
            }
            let _ = writeln!(s, "gap         {:+.3e} (tol {:.1e})", rec.gap, rec.tol);
            let _ = writeln!(
                s,
                "candidates  {} scored, {} infeasible",
                rec.scored, rec.infeasible
            );
            let _ = writeln!(s, "payoff      {}", flag(rec.payoff_ok));
            let _ = writeln!(s, "argmax      {}", flag(rec.argmax_ok));
            let _ = writeln!(
                s,
                "slope sign  {} (neg {} pos {})",
                flag(rec.slope_sign_ok),
                opt_str(rec.neg_slope_max),
                opt_str(rec.pos_slope_max)
            );
            let _ = writeln!(
                s,
                "affine      {} (max residual {:.3e})",
                flag(rec.affine_ok),
                rec.max_affine_residual
            );
            let _ = writeln!(
                s,
                "family IC   {} ({} failures)",
                flag(rec.ic_failures == 0),
                rec.ic_failures
            );
            render_oracle(&rec.oracle, &mut s);
            let _ = writeln!(s, "{}", if rec.passed { "PASSED" } else { "FAILED" });
            s
        }
    };
    Ok(Output { status, body })
}
