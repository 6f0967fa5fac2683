//! End-to-end certification of one problem and its report.

use std::fmt::Write as _;

use num_rational::BigRational;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bounds::{bound_epsilon, rational_string};
use crate::kohn::{self, KohnError, LedgerEntry, LedgerRules, MultiplierState};
use crate::local::{Colength, LocalIdeal};
use crate::problem::{Caps, Flags, ProblemSpec};
use crate::projections::{generic_pair, multiplicity_via_projection, ProjectionOutcome, Shear};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_CERTIFIED: i32 = 0;
/// The run completed but the two multiplicities differ or the bound is unmet.
pub const EXIT_NOT_CERTIFIED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_INFINITE_COLENGTH: i32 = 3;
pub const EXIT_ENGINE_FAILURE: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    NotCertified,
    InvalidInput,
    InfiniteColength,
    EngineFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified => EXIT_CERTIFIED,
            Status::NotCertified => EXIT_NOT_CERTIFIED,
            Status::InvalidInput => EXIT_INPUT_ERROR,
            Status::InfiniteColength => EXIT_INFINITE_COLENGTH,
            Status::EngineFailure => EXIT_ENGINE_FAILURE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShearReport {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
    pub attempts: u32,
}

impl ShearReport {
    fn new(s: &Shear, attempts: u32) -> Self {
        Self {
            a: s.a.to_string(),
            b: s.b.to_string(),
            c: s.c.to_string(),
            d: s.d.to_string(),
            attempts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericPairReport {
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
    pub f: String,
    pub g: String,
    /// Colength of the pair from jets.
    pub colength: usize,
    pub draws: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityReport {
    pub version: &'static str,
    pub germs: Vec<String>,
    pub s_jets: Option<usize>,
    /// `finite`, `infinite` or `undetermined`.
    pub s_jets_status: String,
    pub s_projection: Option<usize>,
    /// `input_pair` or `generic_pair`.
    pub projection_target: &'static str,
    /// Jet colength of the projection target. Equal to `s_jets` for two
    /// germs; for more it is only bounded below by `s_jets`.
    pub target_colength: Option<usize>,
    pub projection_shear: Option<ShearReport>,
    pub projection_error: Option<String>,
    pub generic_pair: Option<GenericPairReport>,
    pub methods_agree: bool,
    pub seed: u64,
}

impl MultiplicityReport {
    pub fn exit_code(&self) -> i32 {
        match self.s_jets_status.as_str() {
            "infinite" => EXIT_INFINITE_COLENGTH,
            "undetermined" => EXIT_ENGINE_FAILURE,
            _ if self.s_jets == Some(0) => EXIT_INPUT_ERROR,
            _ if self.methods_agree => EXIT_CERTIFIED,
            _ => EXIT_NOT_CERTIFIED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub generator: String,
    pub gain: String,
    pub provenance: String,
}

impl From<&LedgerEntry> for EntryReport {
    fn from(e: &LedgerEntry) -> Self {
        Self {
            generator: e.generator.to_string(),
            gain: rational_string(&e.gain),
            provenance: e.provenance.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub step: u32,
    pub terminated: bool,
    pub multipliers: Vec<EntryReport>,
    pub pre_radical: Vec<EntryReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KohnReport {
    pub terminated: bool,
    pub steps: u32,
    pub achieved_epsilon: Option<String>,
    pub trace_digest: String,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<StepReport>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RulesReport {
    pub initial_gain: String,
    pub determinant_scale: String,
    pub radical_scale: String,
    pub placeholder: bool,
    /// `report-only` when the gain rules are the built-in placeholders, so the
    /// bound comparison does not certify the true subelliptic gain.
    pub bound_mode: &'static str,
}

impl From<&LedgerRules> for RulesReport {
    fn from(r: &LedgerRules) -> Self {
        let placeholder = r.is_placeholder();
        Self {
            initial_gain: rational_string(&r.initial_gain),
            determinant_scale: rational_string(&r.determinant_scale),
            radical_scale: rational_string(&r.radical_scale),
            placeholder,
            bound_mode: if placeholder { "report-only" } else { "enforced" },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayInfo {
    pub seed: u64,
    pub caps: Caps,
    pub flags: Flags,
    pub version: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificationReport {
    pub status: Status,
    pub message: Option<String>,
    pub germs: Vec<String>,
    pub s_jets: Option<usize>,
    pub s_projection: Option<usize>,
    pub methods_agree: bool,
    pub multiplicity: MultiplicityReport,
    pub kohn: Option<KohnReport>,
    pub epsilon_bound: Option<String>,
    pub bound_satisfied: bool,
    /// Present when the achieved gain falls below the bound.
    pub bound_discrepancy: Option<String>,
    pub rules: RulesReport,
    pub replay: ReplayInfo,
}

impl CertificationReport {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let opt = |v: &Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        let _ = writeln!(out, "status: {}", status_name(self.status));
        if let Some(m) = &self.message {
            let _ = writeln!(out, "message: {m}");
        }
        let _ = writeln!(out, "germs: {}", self.germs.join(", "));
        let _ = writeln!(out, "s (jets): {}", opt(&self.s_jets));
        let _ = writeln!(
            out,
            "s (projection, {}): {}",
            self.multiplicity.projection_target,
            opt(&self.s_projection)
        );
        if self.multiplicity.generic_pair.is_some() {
            let _ = writeln!(
                out,
                "generic pair colength (jets): {}",
                opt(&self.multiplicity.target_colength)
            );
        }
        let _ = writeln!(out, "methods agree: {}", self.methods_agree);
        if let Some(k) = &self.kohn {
            let _ = writeln!(out, "kohn terminated: {} after {} steps", k.terminated, k.steps);
            if let Some(e) = &k.achieved_epsilon {
                let _ = writeln!(out, "achieved epsilon: {e}");
            }
            if let Some(e) = &k.error {
                let _ = writeln!(out, "kohn error: {e}");
            }
            let _ = writeln!(out, "trace digest: {}", k.trace_digest);
            if let Some(trace) = &k.trace {
                for st in trace {
                    let _ = writeln!(out, "  I{}{}", st.step, if st.terminated { " (unit)" } else { "" });
                    for e in &st.multipliers {
                        let _ = writeln!(out, "    {}  gain {}  [{}]", e.generator, e.gain, e.provenance);
                    }
                }
            }
        }
        if let Some(b) = &self.epsilon_bound {
            let _ = writeln!(out, "epsilon bound: {b}");
        }
        let _ = writeln!(out, "bound satisfied: {}", self.bound_satisfied);
        if let Some(d) = &self.bound_discrepancy {
            let _ = writeln!(out, "bound discrepancy: {d}");
        }
        let _ = writeln!(
            out,
            "rules: initial {} det {} radical {} ({})",
            self.rules.initial_gain, self.rules.determinant_scale, self.rules.radical_scale, self.rules.bound_mode
        );
        let _ = writeln!(out, "seed: {}", self.replay.seed);
        out
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Certified => "certified",
        Status::NotCertified => "not certified",
        Status::InvalidInput => "invalid input",
        Status::InfiniteColength => "infinite colength",
        Status::EngineFailure => "engine failure",
    }
}

/// SHA-256 over the generator lists of each step, one line per step.
pub fn trace_digest(trace: &[MultiplierState]) -> String {
    let mut h = Sha256::new();
    for st in trace {
        let gens: Vec<String> = st.multipliers.iter().map(|e| e.generator.to_string()).collect();
        h.update(format!("I{}: {}\n", st.step, gens.join("; ")).as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn step_reports(trace: &[MultiplierState]) -> Vec<StepReport> {
    trace
        .iter()
        .map(|st| StepReport {
            step: st.step,
            terminated: st.terminated,
            multipliers: st.multipliers.iter().map(EntryReport::from).collect(),
            pre_radical: st.pre_radical.iter().map(EntryReport::from).collect(),
        })
        .collect()
}

/// Both multiplicity routes. With two germs the projection runs on the input
/// pair; with more it runs on a seeded generic pair of linear combinations.
pub fn multiplicities(spec: &ProblemSpec) -> MultiplicityReport {
    let germs = &spec.germs;
    let ideal = LocalIdeal::new(germs.clone()).expect("problem germs are nonzero");
    let colength = ideal.colength(spec.caps.jet_cap);
    let s_jets = colength.finite();
    let s_jets_status = match colength {
        Colength::Finite(_) => "finite",
        Colength::Infinite => "infinite",
        Colength::Undetermined => "undetermined",
    }
    .to_string();

    let mut report = MultiplicityReport {
        version: VERSION,
        germs: germs.iter().map(|g| g.to_string()).collect(),
        s_jets,
        s_jets_status,
        s_projection: None,
        projection_target: if germs.len() == 2 { "input_pair" } else { "generic_pair" },
        target_colength: if germs.len() == 2 { s_jets } else { None },
        projection_shear: None,
        projection_error: None,
        generic_pair: None,
        methods_agree: false,
        seed: spec.seed,
    };

    let record = |r: &mut MultiplicityReport, p: Result<ProjectionOutcome, String>| match p {
        Ok(p) => {
            r.s_projection = Some(p.multiplicity);
            r.projection_shear = Some(ShearReport::new(&p.shear, p.attempts));
        }
        Err(e) => r.projection_error = Some(e),
    };

    if germs.len() == 2 {
        let p = multiplicity_via_projection(&germs[0], &germs[1], spec.seed, spec.caps.retry_cap)
            .map_err(|e| e.to_string());
        record(&mut report, p);
    } else if s_jets.is_some_and(|s| s > 0) {
        match generic_pair(germs, spec.seed, spec.caps.retry_cap, spec.caps.jet_cap) {
            Ok(pair) => {
                report.generic_pair = Some(GenericPairReport {
                    alpha: pair.alpha.iter().map(|c| c.to_string()).collect(),
                    beta: pair.beta.iter().map(|c| c.to_string()).collect(),
                    f: pair.f.to_string(),
                    g: pair.g.to_string(),
                    colength: pair.colength,
                    draws: pair.draws,
                });
                report.target_colength = Some(pair.colength);
                let p = pair
                    .projection
                    .clone()
                    .ok_or_else(|| "no proper projection for the generic pair".to_string());
                record(&mut report, p);
            }
            Err(e) => record(&mut report, Err(e.to_string())),
        }
    } else if colength == Colength::Infinite {
        report.projection_error = Some("skipped: colength is infinite".into());
    }
    report.methods_agree =
        report.target_colength.is_some() && report.target_colength == report.s_projection;
    report
}

/// Runs both multiplicity routes, the multiplier-ideal engine and the bound
/// comparison. `verbose` includes the full trace in the report.
pub fn run_pipeline(spec: &ProblemSpec, verbose: bool) -> CertificationReport {
    let multiplicity = multiplicities(spec);
    let mut report = CertificationReport {
        status: Status::EngineFailure,
        message: None,
        germs: multiplicity.germs.clone(),
        s_jets: multiplicity.s_jets,
        s_projection: multiplicity.s_projection,
        methods_agree: multiplicity.methods_agree,
        multiplicity,
        kohn: None,
        epsilon_bound: None,
        bound_satisfied: false,
        bound_discrepancy: None,
        rules: RulesReport::from(&spec.rules),
        replay: ReplayInfo {
            seed: spec.seed,
            caps: spec.caps,
            flags: spec.flags,
            version: VERSION,
        },
    };

    let s = match report.multiplicity.s_jets_status.as_str() {
        "infinite" => {
            report.status = Status::InfiniteColength;
            report.message = Some("the germs share a curve through the origin".into());
            return report;
        }
        "undetermined" => {
            report.status = Status::EngineFailure;
            report.message = Some(format!(
                "colength did not stabilize within jet cap {}",
                spec.caps.jet_cap
            ));
            return report;
        }
        _ => report.s_jets.expect("finite"),
    };
    if s == 0 {
        report.status = Status::InvalidInput;
        report.message = Some("the germs do not all vanish at the origin".into());
        return report;
    }

    let bound = bound_epsilon(s as u64).expect("s is small and positive");
    report.epsilon_bound = Some(bound.epsilon_string());

    match kohn::run(&spec.germs, &spec.rules, &spec.kohn_config()) {
        Ok(run) => {
            let achieved: &BigRational = &run.achieved_epsilon;
            report.bound_satisfied = bound.is_met_by(achieved);
            if !report.bound_satisfied {
                report.bound_discrepancy = Some(format!(
                    "achieved {} < bound {}",
                    rational_string(achieved),
                    bound.epsilon_string()
                ));
            }
            report.kohn = Some(KohnReport {
                terminated: true,
                steps: run.steps,
                achieved_epsilon: Some(rational_string(achieved)),
                trace_digest: trace_digest(&run.trace),
                error: None,
                trace: verbose.then(|| step_reports(&run.trace)),
            });
            let ok = report.methods_agree && report.bound_satisfied;
            report.status = if ok { Status::Certified } else { Status::NotCertified };
            if !report.methods_agree {
                report.message = Some("the two multiplicity methods disagree".into());
            } else if !report.bound_satisfied {
                report.message = Some("achieved gain is below the bound".into());
            }
        }
        Err(err) => {
            let trace = err.trace().unwrap_or(&[]);
            report.kohn = Some(KohnReport {
                terminated: false,
                steps: trace.last().map_or(0, |s| s.step),
                achieved_epsilon: None,
                trace_digest: trace_digest(trace),
                error: Some(err.to_string()),
                trace: verbose.then(|| step_reports(trace)),
            });
            report.status = match err {
                KohnError::InfiniteColength => Status::InfiniteColength,
                KohnError::UnitIdeal | KohnError::TooFewGerms(_) => Status::InvalidInput,
                _ => Status::EngineFailure,
            };
            report.message = Some(err.to_string());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(g: &[&str]) -> ProblemSpec {
        ProblemSpec::from_germ_texts(g).unwrap()
    }

    #[test]
    fn monomial_pair_certifies() {
        let r = run_pipeline(&spec(&["z1^2", "z2^3"]), false);
        assert_eq!(r.status, Status::Certified, "{}", r.to_text());
        assert_eq!(r.s_jets, Some(6));
        assert_eq!(r.s_projection, Some(6));
        let k = r.kohn.as_ref().unwrap();
        assert_eq!(k.steps, 3);
        assert_eq!(k.achieved_epsilon.as_deref(), Some("1/384"));
        assert!(k.trace.is_none());
        assert!(r.rules.placeholder);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn verbose_adds_trace_only() {
        let quiet = run_pipeline(&spec(&["z1^2", "z2^3"]), false);
        let loud = run_pipeline(&spec(&["z1^2", "z2^3"]), true);
        let t = loud.kohn.as_ref().unwrap().trace.as_ref().unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].multipliers[0].generator, "z1*z2");
        assert_eq!(
            quiet.kohn.as_ref().unwrap().trace_digest,
            loud.kohn.as_ref().unwrap().trace_digest
        );
    }

    #[test]
    fn shared_component_is_exit_three() {
        let r = run_pipeline(&spec(&["z1*z2", "z1^2"]), false);
        assert_eq!(r.status, Status::InfiniteColength);
        assert_eq!(r.exit_code(), EXIT_INFINITE_COLENGTH);
        assert!(r.kohn.is_none());
    }

    #[test]
    fn unit_ideal_is_input_error() {
        let r = run_pipeline(&spec(&["1 + z1", "z2"]), false);
        assert_eq!(r.exit_code(), EXIT_INPUT_ERROR);
    }

    #[test]
    fn step_cap_is_exit_four() {
        let mut sp = spec(&["z1^2", "z2^3"]);
        sp.caps.max_steps = 1;
        let r = run_pipeline(&sp, false);
        assert_eq!(r.status, Status::EngineFailure);
        let k = r.kohn.unwrap();
        assert!(!k.terminated);
        assert_eq!(k.steps, 1);
    }

    #[test]
    fn three_germs_use_generic_pair() {
        let r = run_pipeline(&spec(&["z1^2", "z1*z2", "z2^2"]), false);
        assert_eq!(r.multiplicity.projection_target, "generic_pair");
        assert_eq!(r.s_jets, Some(3));
        let pair = r.multiplicity.generic_pair.as_ref().unwrap();
        assert!(pair.colength >= 3);
        // no pair of combinations of three independent quadrics has colength 3
        assert_eq!(pair.colength, 4);
        assert_eq!(r.s_projection, Some(4));
        assert!(r.methods_agree);
        assert_eq!(r.status, Status::Certified);
    }

    #[test]
    fn report_is_deterministic() {
        let sp = spec(&["z1^3 + z2^2", "z1*z2"]);
        let a = run_pipeline(&sp, true).to_json();
        let b = run_pipeline(&sp, true).to_json();
        assert_eq!(a, b);
    }
}
