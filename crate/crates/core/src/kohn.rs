//! Kohn's multiplier-ideal iteration for special domains, with an exact
//! ledger of subelliptic gains.
//!
//! Starting from the Jacobian determinants of the defining germs, each step
//! adjoins the Jacobians of every multiplier against every allowable row and
//! takes the radical. The run terminates once the unit germ is a multiplier.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::rational_string;
use crate::germ::{jacobian_det, Germ};
use crate::local::{Colength, IdealError, LocalIdeal, DEFAULT_JET_CAP};

pub const DEFAULT_MAX_STEPS: u32 = 64;
pub const DEFAULT_EXPONENT_CAP: u32 = 32;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Gain-update rules, as data.
///
/// A determinant of two rows with gains `a, b` gets
/// `determinant_scale · min(a, b)`; a radical generator whose `m`-th power
/// lies in an ideal of gains `≥ γ` gets `radical_scale · γ / m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerRules {
    pub initial_gain: BigRational,
    pub determinant_scale: BigRational,
    pub radical_scale: BigRational,
}

impl Default for LedgerRules {
    /// Placeholder constants: determinant halves the least source gain,
    /// radical with exponent `m` divides by `2m`.
    fn default() -> Self {
        Self {
            initial_gain: ratio(1, 2),
            determinant_scale: ratio(1, 2),
            radical_scale: ratio(1, 2),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("ledger rule `{field}` must lie in (0, 1], got {value}")]
pub struct RuleError {
    pub field: &'static str,
    pub value: String,
}

impl LedgerRules {
    pub fn new(
        initial_gain: BigRational,
        determinant_scale: BigRational,
        radical_scale: BigRational,
    ) -> Result<Self, RuleError> {
        let rules = Self {
            initial_gain,
            determinant_scale,
            radical_scale,
        };
        for (field, v) in [
            ("initial_gain", &rules.initial_gain),
            ("determinant_scale", &rules.determinant_scale),
            ("radical_scale", &rules.radical_scale),
        ] {
            if !v.is_positive() || *v > BigRational::one() {
                return Err(RuleError {
                    field,
                    value: rational_string(v),
                });
            }
        }
        Ok(rules)
    }

    /// The shipped constants have not been replaced by calibrated ones.
    pub fn is_placeholder(&self) -> bool {
        *self == Self::default()
    }

    pub fn determinant_gain(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a.min(b) * &self.determinant_scale
    }

    pub fn radical_gain(&self, gain: &BigRational, exponent: u32) -> BigRational {
        gain * &self.radical_scale / BigRational::from_integer(BigInt::from(exponent))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KohnConfig {
    pub max_steps: u32,
    pub jet_cap: u32,
    pub exponent_cap: u32,
    /// Whether the defining germs themselves join the first multiplier ideal.
    pub include_inputs_as_multipliers: bool,
}

impl Default for KohnConfig {
    fn default() -> Self {
        Self {
            max_steps: DEFAULT_MAX_STEPS,
            jet_cap: DEFAULT_JET_CAP,
            exponent_cap: DEFAULT_EXPONENT_CAP,
            include_inputs_as_multipliers: false,
        }
    }
}

/// Where a gradient row comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum RowSource {
    /// The defining germ `F_i`.
    Input(usize),
    /// Generator `j` of the current multiplier ideal.
    Multiplier(usize),
}

impl fmt::Display for RowSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowSource::Input(i) => write!(f, "F{}", i + 1),
            RowSource::Multiplier(j) => write!(f, "M{}", j + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// A defining germ admitted as a multiplier.
    Initial(usize),
    /// A multiplier of the previous step, unchanged.
    Carried(usize),
    Determinant(RowSource, RowSource),
    /// `generator^exponent` lies in the pre-radical ideal restricted to gains `≥ threshold`.
    Radical { exponent: u32, threshold: BigRational },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Initial(i) => write!(f, "initial F{}", i + 1),
            Provenance::Carried(j) => write!(f, "carried M{}", j + 1),
            Provenance::Determinant(a, b) => write!(f, "det({a}, {b})"),
            Provenance::Radical { exponent, threshold } => {
                write!(f, "radical m={exponent} from gain {}", rational_string(threshold))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub generator: Germ,
    pub gain: BigRational,
    pub provenance: Provenance,
}

/// One ideal `I_k` of the multiplier chain.
#[derive(Clone, Debug)]
pub struct MultiplierState {
    pub step: u32,
    /// Generators of `I_k` with their gains.
    pub multipliers: Vec<LedgerEntry>,
    /// The ideal whose radical is `I_k`, with the gain of each generator.
    pub pre_radical: Vec<LedgerEntry>,
    pub terminated: bool,
}

impl MultiplierState {
    pub fn ideal(&self) -> LocalIdeal {
        LocalIdeal::new(self.multipliers.iter().map(|e| e.generator.clone()).collect())
            .expect("multiplier ideals are nonzero")
    }

    pub fn generators(&self) -> Vec<Germ> {
        self.multipliers.iter().map(|e| e.generator.clone()).collect()
    }

    /// Gain of the unit multiplier, once terminated.
    pub fn unit_gain(&self) -> Option<&BigRational> {
        self.multipliers
            .iter()
            .filter(|e| e.generator.is_unit())
            .map(|e| &e.gain)
            .max()
    }
}

#[derive(Debug, Error, Clone)]
pub enum KohnError {
    #[error("need at least two defining germs, got {0}")]
    TooFewGerms(usize),
    #[error("the defining germs have infinite intersection multiplicity at the origin")]
    InfiniteColength,
    #[error("intersection multiplicity undetermined within jet cap {0}")]
    Undetermined(u32),
    #[error("the defining germs do not all vanish at the origin")]
    UnitIdeal,
    #[error("all Jacobian determinants of the defining germs vanish identically")]
    Degenerate,
    #[error("step on a terminated state")]
    AlreadyTerminated,
    #[error("no progress at step {step}: the multiplier ideal did not grow")]
    NonProgress { step: u32, trace: Vec<MultiplierState> },
    #[error("not terminated after {max_steps} steps")]
    MaxSteps { max_steps: u32, trace: Vec<MultiplierState> },
    #[error("membership undetermined at step {step} within caps")]
    CapExhausted { step: u32, trace: Vec<MultiplierState> },
    #[error("radical generator {generator} has no effective exponent within cap at step {step}")]
    RadicalUnsound { step: u32, generator: String },
    #[error("chain monotonicity violated at step {step}")]
    NotMonotone { step: u32 },
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

impl KohnError {
    pub fn trace(&self) -> Option<&[MultiplierState]> {
        match self {
            KohnError::NonProgress { trace, .. }
            | KohnError::MaxSteps { trace, .. }
            | KohnError::CapExhausted { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

/// Internal failure of a single radical computation, before a trace is attached.
enum StepFailure {
    Undetermined,
    Unsound(Germ),
}

/// Radical of the pre-radical ideal, each generator with the best gain over
/// all gain thresholds at which it lies in the radical.
fn radical_with_gains(
    pre: &[LedgerEntry],
    rules: &LedgerRules,
    config: &KohnConfig,
) -> Result<(Vec<LedgerEntry>, bool), StepFailure> {
    let whole = LocalIdeal::new(pre.iter().map(|e| e.generator.clone()).collect())
        .expect("pre-radical ideal is nonzero");
    let radical = whole.radical();
    let mut thresholds: Vec<&BigRational> = pre.iter().map(|e| &e.gain).collect();
    thresholds.sort_by(|a, b| b.cmp(a));
    thresholds.dedup();
    let restricted: Vec<(BigRational, LocalIdeal)> = thresholds
        .into_iter()
        .map(|t| {
            let gens = pre
                .iter()
                .filter(|e| e.gain >= *t)
                .map(|e| e.generator.clone())
                .collect();
            (t.clone(), LocalIdeal::new(gens).expect("nonzero"))
        })
        .collect();

    let mut out = Vec::new();
    for r in radical.generators() {
        let mut best: Option<(BigRational, u32, BigRational)> = None;
        for (t, ideal) in &restricted {
            match ideal.radical().contains(r, config.jet_cap) {
                Some(true) => {}
                Some(false) => continue,
                None => return Err(StepFailure::Undetermined),
            }
            let m = ideal
                .effective_exponent(r, config.exponent_cap)
                .ok_or_else(|| StepFailure::Unsound(r.clone()))?;
            let gain = rules.radical_gain(t, m);
            if best.as_ref().is_none_or(|b| gain > b.0) {
                best = Some((gain, m, t.clone()));
            }
        }
        let (gain, exponent, threshold) = best.ok_or_else(|| StepFailure::Unsound(r.clone()))?;
        out.push(LedgerEntry {
            generator: r.clone(),
            gain,
            provenance: Provenance::Radical { exponent, threshold },
        });
    }
    let terminated = radical.is_unit_ideal();
    Ok((out, terminated))
}

fn push_entry(list: &mut Vec<LedgerEntry>, entry: LedgerEntry) {
    if entry.generator.is_zero() {
        return;
    }
    match list.iter_mut().find(|e| e.generator == entry.generator) {
        Some(existing) if existing.gain < entry.gain => *existing = entry,
        Some(_) => {}
        None => list.push(entry),
    }
}

fn check_input(germs: &[Germ], config: &KohnConfig) -> Result<(), KohnError> {
    if germs.len() < 2 {
        return Err(KohnError::TooFewGerms(germs.len()));
    }
    let ideal = LocalIdeal::new(germs.to_vec())?;
    match ideal.colength(config.jet_cap) {
        Colength::Finite(0) => Err(KohnError::UnitIdeal),
        Colength::Finite(_) => Ok(()),
        Colength::Infinite => Err(KohnError::InfiniteColength),
        Colength::Undetermined => Err(KohnError::Undetermined(config.jet_cap)),
    }
}

/// `I_1`: the radical of the ideal of Jacobian determinants of the defining
/// germs (together with the germs themselves when configured).
pub fn initial_multipliers(
    germs: &[Germ],
    rules: &LedgerRules,
    config: &KohnConfig,
) -> Result<MultiplierState, KohnError> {
    check_input(germs, config)?;
    let mut pre = Vec::new();
    for i in 0..germs.len() {
        for j in i + 1..germs.len() {
            push_entry(
                &mut pre,
                LedgerEntry {
                    generator: jacobian_det(&germs[i], &germs[j]),
                    gain: rules.initial_gain.clone(),
                    provenance: Provenance::Determinant(RowSource::Input(i), RowSource::Input(j)),
                },
            );
        }
    }
    if pre.is_empty() {
        return Err(KohnError::Degenerate);
    }
    if config.include_inputs_as_multipliers {
        for (i, f) in germs.iter().enumerate() {
            push_entry(
                &mut pre,
                LedgerEntry {
                    generator: f.clone(),
                    gain: rules.initial_gain.clone(),
                    provenance: Provenance::Initial(i),
                },
            );
        }
    }
    let (multipliers, terminated) = radical_with_gains(&pre, rules, config).map_err(|e| match e {
        StepFailure::Undetermined => KohnError::CapExhausted { step: 1, trace: Vec::new() },
        StepFailure::Unsound(g) => KohnError::RadicalUnsound {
            step: 1,
            generator: g.to_string(),
        },
    })?;
    Ok(MultiplierState {
        step: 1,
        multipliers,
        pre_radical: pre,
        terminated,
    })
}

/// `I_{k+1} = rad(I_k + ⟨det(g, h) : g ∈ I_k, h ∈ F ∪ I_k⟩)`.
pub fn step(
    state: &MultiplierState,
    germs: &[Germ],
    rules: &LedgerRules,
    config: &KohnConfig,
) -> Result<MultiplierState, KohnError> {
    if state.terminated {
        return Err(KohnError::AlreadyTerminated);
    }
    let next_step = state.step + 1;
    let mut pre: Vec<LedgerEntry> = state
        .multipliers
        .iter()
        .enumerate()
        .map(|(j, e)| LedgerEntry {
            generator: e.generator.clone(),
            gain: e.gain.clone(),
            provenance: Provenance::Carried(j),
        })
        .collect();
    let rows: Vec<(RowSource, &Germ, &BigRational)> = germs
        .iter()
        .enumerate()
        .map(|(i, f)| (RowSource::Input(i), f, &rules.initial_gain))
        .chain(
            state
                .multipliers
                .iter()
                .enumerate()
                .map(|(j, e)| (RowSource::Multiplier(j), &e.generator, &e.gain)),
        )
        .collect();
    for (j, m) in state.multipliers.iter().enumerate() {
        for (src, h, gain) in &rows {
            // multiplier pairs once each, in index order
            if let RowSource::Multiplier(k) = src {
                if *k <= j {
                    continue;
                }
            }
            push_entry(
                &mut pre,
                LedgerEntry {
                    generator: jacobian_det(&m.generator, h),
                    gain: rules.determinant_gain(&m.gain, gain),
                    provenance: Provenance::Determinant(RowSource::Multiplier(j), *src),
                },
            );
        }
    }
    let (multipliers, terminated) = radical_with_gains(&pre, rules, config).map_err(|e| match e {
        StepFailure::Undetermined => KohnError::CapExhausted {
            step: next_step,
            trace: Vec::new(),
        },
        StepFailure::Unsound(g) => KohnError::RadicalUnsound {
            step: next_step,
            generator: g.to_string(),
        },
    })?;
    let next = MultiplierState {
        step: next_step,
        multipliers,
        pre_radical: pre,
        terminated,
    };
    let (old, new) = (state.ideal(), next.ideal());
    match new.contains_ideal(&old, config.jet_cap) {
        Some(true) => {}
        Some(false) => return Err(KohnError::NotMonotone { step: next_step }),
        None => {
            return Err(KohnError::CapExhausted {
                step: next_step,
                trace: Vec::new(),
            })
        }
    }
    if !terminated && old.contains_ideal(&new, config.jet_cap) == Some(true) {
        return Err(KohnError::NonProgress {
            step: next_step,
            trace: vec![state.clone(), next],
        });
    }
    Ok(next)
}

/// Outcome of a terminated run.
#[derive(Clone, Debug)]
pub struct KohnRun {
    pub trace: Vec<MultiplierState>,
    /// `dim O/⟨F⟩`
    pub colength: usize,
    pub steps: u32,
    /// Gain of the unit multiplier.
    pub achieved_epsilon: BigRational,
}

fn with_trace(err: KohnError, trace: &[MultiplierState]) -> KohnError {
    let mut full = trace.to_vec();
    match err {
        KohnError::NonProgress { step, trace: tail } => {
            full.extend(tail.into_iter().skip(1));
            KohnError::NonProgress { step, trace: full }
        }
        KohnError::CapExhausted { step, .. } => KohnError::CapExhausted { step, trace: full },
        other => other,
    }
}

/// Iterates [`step`] from [`initial_multipliers`] until the unit ideal is
/// reached or `max_steps` ideals have been produced.
pub fn run(germs: &[Germ], rules: &LedgerRules, config: &KohnConfig) -> Result<KohnRun, KohnError> {
    let colength = LocalIdeal::new(germs.to_vec())?
        .colength(config.jet_cap)
        .finite();
    let mut trace = vec![initial_multipliers(germs, rules, config)?];
    let colength = colength.expect("checked by initial_multipliers");
    loop {
        let last = trace.last().expect("nonempty");
        if last.terminated {
            break;
        }
        if last.step >= config.max_steps {
            return Err(KohnError::MaxSteps {
                max_steps: config.max_steps,
                trace,
            });
        }
        let next = step(last, germs, rules, config).map_err(|e| with_trace(e, &trace))?;
        trace.push(next);
    }
    let last = trace.last().expect("nonempty");
    let achieved_epsilon = last.unit_gain().cloned().unwrap_or_else(BigRational::zero);
    Ok(KohnRun {
        steps: last.step,
        trace,
        colength,
        achieved_epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_germ;

    fn g(s: &str) -> Germ {
        parse_germ(s).unwrap()
    }

    fn gs(s: &[&str]) -> Vec<Germ> {
        s.iter().map(|x| g(x)).collect()
    }

    #[test]
    fn transverse_lines_terminate_at_once() {
        let out = run(&gs(&["z1", "z2"]), &LedgerRules::default(), &KohnConfig::default()).unwrap();
        assert_eq!(out.steps, 1);
        assert!(out.trace[0].terminated);
        assert_eq!(out.colength, 1);
    }

    #[test]
    fn initial_multipliers_of_monomial_pair() {
        let st = initial_multipliers(&gs(&["z1^2", "z2^3"]), &LedgerRules::default(), &KohnConfig::default())
            .unwrap();
        assert_eq!(st.generators(), vec![g("z1*z2")]);
        assert_eq!(st.pre_radical[0].generator, g("6*z1*z2^2"));
        assert_eq!(
            st.multipliers[0].provenance,
            Provenance::Radical {
                exponent: 2,
                threshold: ratio(1, 2)
            }
        );
        assert_eq!(st.multipliers[0].gain, ratio(1, 8));
    }

    #[test]
    fn monomial_pair_trace() {
        let out = run(&gs(&["z1^2", "z2^3"]), &LedgerRules::default(), &KohnConfig::default()).unwrap();
        assert_eq!(out.steps, 3);
        assert_eq!(out.trace[0].generators(), vec![g("z1*z2")]);
        assert_eq!(out.trace[1].generators(), vec![g("z1"), g("z2")]);
        assert_eq!(out.trace[2].generators(), vec![Germ::one()]);
        // z1 from z1^2 at gain 1/16: 1/64; z2 from z2^3: 1/96; det(z1, z2) at 1/192, halved
        assert_eq!(out.trace[1].multipliers[0].gain, ratio(1, 64));
        assert_eq!(out.trace[1].multipliers[1].gain, ratio(1, 96));
        assert_eq!(out.achieved_epsilon, ratio(1, 384));
    }

    #[test]
    fn step_examples() {
        let rules = LedgerRules::default();
        let cfg = KohnConfig::default();
        let f = gs(&["z1^2", "z2^3"]);
        let s1 = initial_multipliers(&f, &rules, &cfg).unwrap();
        let s2 = step(&s1, &f, &rules, &cfg).unwrap();
        let dets: Vec<Germ> = s2
            .pre_radical
            .iter()
            .filter(|e| matches!(e.provenance, Provenance::Determinant(..)))
            .map(|e| e.generator.clone())
            .collect();
        assert!(dets.contains(&g("-2*z1^2")));
        assert!(dets.contains(&g("3*z2^3")));
        let s3 = step(&s2, &f, &rules, &cfg).unwrap();
        assert!(s3.terminated);
        assert!(matches!(step(&s3, &f, &rules, &cfg), Err(KohnError::AlreadyTerminated)));
    }

    #[test]
    fn rejects_bad_inputs() {
        let rules = LedgerRules::default();
        let cfg = KohnConfig::default();
        assert!(matches!(
            initial_multipliers(&gs(&["z1^2", "z1*z2"]), &rules, &cfg),
            Err(KohnError::InfiniteColength)
        ));
        assert!(matches!(run(&gs(&["z1"]), &rules, &cfg), Err(KohnError::TooFewGerms(1))));
        assert!(matches!(run(&gs(&["1 + z1", "z2"]), &rules, &cfg), Err(KohnError::UnitIdeal)));
    }

    #[test]
    fn max_steps_is_enforced() {
        let cfg = KohnConfig {
            max_steps: 2,
            ..KohnConfig::default()
        };
        match run(&gs(&["z1^2", "z2^3"]), &LedgerRules::default(), &cfg) {
            Err(KohnError::MaxSteps { trace, .. }) => assert_eq!(trace.len(), 2),
            other => panic!("expected MaxSteps, got {other:?}"),
        }
    }

    #[test]
    fn inputs_as_multipliers_flag() {
        let cfg = KohnConfig {
            include_inputs_as_multipliers: true,
            ..KohnConfig::default()
        };
        let out = run(&gs(&["z1^2", "z2^3"]), &LedgerRules::default(), &cfg).unwrap();
        // z1 and z2 are radical members of <z1^2, z2^3, z1 z2^2> at once
        assert_eq!(out.trace[0].generators(), vec![g("z1"), g("z2")]);
        assert_eq!(out.steps, 2);
    }

    #[test]
    fn rule_validation() {
        assert!(LedgerRules::new(ratio(1, 2), ratio(1, 2), ratio(1, 2)).unwrap().is_placeholder());
        assert!(LedgerRules::new(ratio(3, 2), ratio(1, 2), ratio(1, 2)).is_err());
        assert!(LedgerRules::new(ratio(1, 2), ratio(0, 1), ratio(1, 2)).is_err());
        assert!(!LedgerRules::new(ratio(1, 4), ratio(1, 2), ratio(1, 2)).unwrap().is_placeholder());
    }
}
