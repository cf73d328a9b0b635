//! File formats: the policy file, JSON reports and sweep CSV.

use std::path::Path;

use attn_core::ic::IcReport;
use attn_core::optimal3::{Regime, Signal, Thresholds};
use attn_core::oracle::{OracleCheck, OracleReport, Verdict};
use attn_core::search::{CandidateKind, SearchReport};
use attn_core::simplex::az_from_belief;
use attn_core::{Belief, InformationPolicy, QuadraticModel, StateSpace};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `{"states", "prior", "support", "weights"}` with scalar states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub states: Vec<f64>,
    pub prior: Vec<f64>,
    pub support: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

fn check_probs(what: &str, v: &[f64]) -> Result<(), CliError> {
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(CliError::input(format!("{what}[{i}] is not finite")));
        }
        if x < 0.0 {
            return Err(CliError::input(format!("{what}[{i}] is negative ({x})")));
        }
    }
    Ok(())
}

impl PolicyFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let f: PolicyFile = serde_json::from_str(text)?;
        if f.states.iter().any(|s| !s.is_finite()) {
            return Err(CliError::input("states must be finite"));
        }
        check_probs("prior", &f.prior)?;
        check_probs("weights", &f.weights)?;
        for (n, b) in f.support.iter().enumerate() {
            check_probs(&format!("support[{n}]"), b)?;
        }
        Ok(f)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn from_policy(states: &[f64], prior: &Belief, p: &InformationPolicy) -> Self {
        Self {
            states: states.to_vec(),
            prior: prior.to_vec(),
            support: p.support().iter().map(|b| b.to_vec()).collect(),
            weights: p.weights().to_vec(),
        }
    }

    /// The main model at `kappa` and the validated policy.
    pub fn model(&self, kappa: f64) -> Result<(QuadraticModel, InformationPolicy), CliError> {
        let space = StateSpace::scalar(&self.states)?;
        let prior = Belief::new(self.prior.clone())?;
        let model = QuadraticModel::new(space, prior, kappa)?;
        let support = self
            .support
            .iter()
            .map(|b| Belief::new(b.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let policy = attn_core::policy::validate_policy(support, self.weights.clone(), &model)?;
        Ok((model, policy))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AzBelief {
    pub probs: Vec<f64>,
    pub a: f64,
    pub z: f64,
}

impl AzBelief {
    pub fn new(b: &Belief) -> Result<Self, CliError> {
        let p = az_from_belief(&StateSpace::three(), b)?;
        Ok(Self {
            probs: b.to_vec(),
            a: p.a,
            z: p.z,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalRecord {
    Downplaying { pi_minus1: f64, pi_plus1: f64 },
    Exaggeration { pi: f64 },
}

impl From<Signal> for SignalRecord {
    fn from(s: Signal) -> Self {
        match s {
            Signal::Downplaying {
                pi_minus1,
                pi_plus1,
            } => SignalRecord::Downplaying {
                pi_minus1,
                pi_plus1,
            },
            Signal::Exaggeration { pi } => SignalRecord::Exaggeration { pi },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl From<Thresholds> for ThresholdRecord {
    fn from(t: Thresholds) -> Self {
        Self {
            k1: t.k1,
            k2: t.k2,
            k3: t.k3,
            k4: t.k4,
        }
    }
}

/// Machine form of an optimal outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub prior: Vec<f64>,
    pub kappa: f64,
    pub regime: String,
    pub support: Vec<AzBelief>,
    pub weights: Vec<f64>,
    pub signal: SignalRecord,
    pub payoff: f64,
    pub degenerate: bool,
    pub reflected: bool,
    pub s_star: Option<f64>,
    pub slope_used: Option<f64>,
    pub thresholds: ThresholdRecord,
}

impl OutcomeRecord {
    pub fn new(
        prior: &Belief,
        kappa: f64,
        out: &attn_core::optimal3::OptimalOutcome,
        t: Thresholds,
    ) -> Result<Self, CliError> {
        Ok(Self {
            prior: prior.to_vec(),
            kappa,
            regime: out.regime.name().to_string(),
            support: out
                .policy
                .support()
                .iter()
                .map(AzBelief::new)
                .collect::<Result<_, _>>()?,
            weights: out.policy.weights().to_vec(),
            signal: out.signal.into(),
            payoff: out.payoff,
            degenerate: out.degenerate,
            reflected: out.reflected,
            s_star: out.s_star,
            slope_used: out.slope_used,
            thresholds: t.into(),
        })
    }

    pub fn regime(&self) -> Option<Regime> {
        Regime::parse(&self.regime)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub choice: f64,
    pub psych: f64,
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRecord {
    /// `None` when the two actions coincide.
    pub slope: Option<f64>,
    pub cutoff: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcRecord {
    pub kappa: f64,
    pub ic: bool,
    pub min_margin: Option<f64>,
    pub pairs: Vec<PairRecord>,
    pub slopes: Option<Vec<SlopeRecord>>,
    pub oracle: Option<OracleCheckRecord>,
}

impl IcRecord {
    pub fn new(kappa: f64, r: &IcReport) -> Self {
        Self {
            kappa,
            ic: r.ic,
            min_margin: r.min_margin(),
            pairs: r
                .pairs
                .iter()
                .map(|c| PairRecord {
                    i: c.i,
                    j: c.j,
                    choice: c.choice,
                    psych: c.psych,
                    margin: c.margin(),
                    holds: c.holds(),
                })
                .collect(),
            slopes: r.slope_form.as_ref().map(|s| {
                s.iter()
                    .map(|c| SlopeRecord {
                        slope: c.slope.is_finite().then_some(c.slope),
                        cutoff: c.cutoff,
                        holds: c.holds(),
                    })
                    .collect()
            }),
            oracle: None,
        }
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Ic => "IC",
        Verdict::NotIc => "NotIC",
        Verdict::Inconclusive => "Inconclusive",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub grid: usize,
    pub columns: usize,
    pub best_value: f64,
    pub full_attention_value: f64,
    pub gap: f64,
    pub garbling_support: Vec<Vec<f64>>,
    pub garbling_weights: Vec<f64>,
}

impl From<&OracleReport> for OracleRecord {
    fn from(r: &OracleReport) -> Self {
        Self {
            grid: r.grid_resolution,
            columns: r.columns,
            best_value: r.best_value,
            full_attention_value: r.full_attention_value,
            gap: r.gap,
            garbling_support: r
                .best_garbling
                .support()
                .iter()
                .map(|b| b.to_vec())
                .collect(),
            garbling_weights: r.best_garbling.weights().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheckRecord {
    pub verdict: String,
    pub tol: f64,
    pub coarse: OracleRecord,
    pub fine: OracleRecord,
}

impl From<&OracleCheck> for OracleCheckRecord {
    fn from(c: &OracleCheck) -> Self {
        Self {
            verdict: verdict_name(c.verdict).to_string(),
            tol: c.tol,
            coarse: (&c.coarse).into(),
            fine: (&c.fine).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CandidateRecord {
    Ternary { a1: f64, a2: f64 },
    Binary { s_tilde: f64 },
    FullDisclosure,
    NoDisclosure,
}

impl From<CandidateKind> for CandidateRecord {
    fn from(k: CandidateKind) -> Self {
        match k {
            CandidateKind::Ternary { a1, a2 } => CandidateRecord::Ternary { a1, a2 },
            CandidateKind::Binary { s_tilde } => CandidateRecord::Binary { s_tilde },
            CandidateKind::FullDisclosure => CandidateRecord::FullDisclosure,
            CandidateKind::NoDisclosure => CandidateRecord::NoDisclosure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub prior: Vec<f64>,
    pub kappa: f64,
    pub tol: f64,
    pub closed_form: OutcomeRecord,
    pub best_payoff: f64,
    pub best: CandidateRecord,
    pub best_injected: bool,
    pub best_grid_payoff: Option<f64>,
    pub gap: f64,
    pub scored: usize,
    pub infeasible: usize,
    pub ic_failures: usize,
    pub max_affine_residual: f64,
    pub max_formula_gap: f64,
    pub neg_slope_max: Option<f64>,
    pub pos_slope_max: Option<f64>,
    pub payoff_ok: bool,
    pub argmax_ok: bool,
    pub slope_sign_ok: bool,
    pub affine_ok: bool,
    pub search_passed: bool,
    pub oracle: OracleCheckRecord,
    pub passed: bool,
}

impl VerifyRecord {
    pub fn new(
        r: &SearchReport,
        closed_form: OutcomeRecord,
        tol: f64,
        oracle: &OracleCheck,
    ) -> Self {
        let search_passed = r.passed();
        Self {
            prior: closed_form.prior.clone(),
            kappa: r.kappa,
            tol,
            closed_form,
            best_payoff: r.best.payoff,
            best: r.best.kind.into(),
            best_injected: r.best.injected,
            best_grid_payoff: r.best_grid.map(|s| s.payoff),
            gap: r.gap(),
            scored: r.scored,
            infeasible: r.infeasible,
            ic_failures: r.ic_failures,
            max_affine_residual: r.max_affine_residual,
            max_formula_gap: r.max_formula_gap,
            neg_slope_max: r.neg_slope_max,
            pos_slope_max: r.pos_slope_max,
            payoff_ok: r.payoff_ok,
            argmax_ok: r.argmax_ok,
            slope_sign_ok: r.slope_sign_ok,
            affine_ok: r.affine_ok,
            search_passed,
            oracle: oracle.into(),
            passed: search_passed && oracle.verdict == Verdict::Ic,
        }
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}", trim_zeros(mant), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const SWEEP_HEADER: [&str; 9] = [
    "kappa",
    "regime",
    "payoff",
    "s_star",
    "slope_used",
    "pi_minus1",
    "pi_plus1",
    "pi",
    "degenerate",
];

/// One sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub kappa: f64,
    pub regime: Regime,
    pub payoff: f64,
    pub s_star: Option<f64>,
    pub slope_used: Option<f64>,
    pub signal: Signal,
    pub degenerate: bool,
}

impl SweepRow {
    fn fields(&self) -> [String; 9] {
        let opt = |v: Option<f64>| v.map(sig12).unwrap_or_default();
        let (m1, p1, pi) = match self.signal {
            Signal::Downplaying {
                pi_minus1,
                pi_plus1,
            } => (Some(pi_minus1), Some(pi_plus1), None),
            Signal::Exaggeration { pi } => (None, None, Some(pi)),
        };
        [
            sig12(self.kappa),
            self.regime.name().to_string(),
            sig12(self.payoff),
            opt(self.s_star),
            opt(self.slope_used),
            opt(m1),
            opt(p1),
            opt(pi),
            self.degenerate.to_string(),
        ]
    }
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], w: W) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SWEEP_HEADER)?;
    for r in rows {
        wtr.write_record(r.fields())?;
    }
    wtr.flush()?;
    Ok(())
}
