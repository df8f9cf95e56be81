//! Cohort definitions, indicator parameters and result rows.
//!
//! Both the indexed evaluator and the naive reference evaluator produce these
//! exact types, so results can be compared with `==`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::ids::{ApplnId, RegId};
use crate::tables::{Bulletin, UnknownCode};

/// Event code of the first examination report.
pub const FIRST_EXAMINATION_CODE: &str = "0009185";

/// Register event codes for oppositions, revocation and limitation requests.
pub const VALIDITY_CHALLENGE_CODES: [&str; 8] = [
    "0008299OPPO",
    "0009260",
    "EPIDOSCLIM1",
    "EPIDOSCRVR1",
    "EPIDOSCRVR6",
    "EPIDOSNLIM1",
    "EPIDOSNRVR1",
    "EPIDOSNRVR6",
];

/// Default suffix identifying change-of-applicant events.
pub const APPR_SUFFIX: &str = "APPR";

/// Publication kind after an opposition ends in amended form.
pub const KIND_B2: &str = "B2";
/// Publication kind after a granted limitation request.
pub const KIND_B3: &str = "B3";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidCohortSpec(pub String);

impl fmt::Display for InvalidCohortSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid cohort spec: {}", self.0)
    }
}

impl std::error::Error for InvalidCohortSpec {}

/// Filter defining a set of core applications.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortSpec {
    authority: String,
    kinds: BTreeSet<String>,
    year_from: i32,
    year_to: i32,
    ipc_prefix: String,
}

impl CohortSpec {
    pub fn new(
        authority: impl Into<String>,
        kinds: impl IntoIterator<Item = impl Into<String>>,
        year_from: i32,
        year_to: i32,
        ipc_prefix: impl Into<String>,
    ) -> Result<Self, InvalidCohortSpec> {
        let spec = Self {
            authority: authority.into(),
            kinds: kinds.into_iter().map(Into::into).collect(),
            year_from,
            year_to,
            ipc_prefix: ipc_prefix.into(),
        };
        if spec.year_from > spec.year_to {
            return Err(InvalidCohortSpec(format!(
                "year_from {} > year_to {}",
                spec.year_from, spec.year_to
            )));
        }
        if spec.ipc_prefix.is_empty() {
            return Err(InvalidCohortSpec("ipc_prefix must be non-empty".into()));
        }
        Ok(spec)
    }

    /// EP filings of kind A or W, 2000..=2010, IPC subclass F03D (wind motors).
    pub fn wind_motors() -> Self {
        Self::new("EP", ["A", "W"], 2000, 2010, "F03D").expect("valid constant spec")
    }

    pub fn authority(&self) -> &str {
        &self.authority
    }

    pub fn kinds(&self) -> &BTreeSet<String> {
        &self.kinds
    }

    pub fn year_from(&self) -> i32 {
        self.year_from
    }

    pub fn year_to(&self) -> i32 {
        self.year_to
    }

    pub fn ipc_prefix(&self) -> &str {
        &self.ipc_prefix
    }
}

impl Default for CohortSpec {
    fn default() -> Self {
        Self::wind_motors()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CohortMember {
    pub appln_id: ApplnId,
    /// Register id, when a register row links to this core application.
    pub id: Option<RegId>,
}

/// Distinct core applications, ascending by `appln_id`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cohort {
    pub members: Vec<CohortMember>,
}

impl Cohort {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members with a register row, as `(id, appln_id)`.
    pub fn linked(&self) -> impl Iterator<Item = (RegId, ApplnId)> + '_ {
        self.members
            .iter()
            .filter_map(|m| m.id.map(|id| (id, m.appln_id)))
    }

    /// Members excluded from register-side indicators.
    pub fn skipped(&self) -> impl Iterator<Item = ApplnId> + '_ {
        self.members
            .iter()
            .filter(|m| m.id.is_none())
            .map(|m| m.appln_id)
    }
}

/// Zero-row policy shared by every indicator in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputMode {
    /// Indicators are total over the linked cohort; empty aggregates are 0.
    #[default]
    Default,
    /// Drops rows an inner join would drop.
    PaperCompat,
}

impl FromStr for OutputMode {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "default" => Ok(OutputMode::Default),
            "paper-compat" | "paper_compat" => Ok(OutputMode::PaperCompat),
            _ => Err(UnknownCode {
                field: "mode",
                value: s.to_string(),
            }),
        }
    }
}

/// How the earliest bulletin of an application is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BulletinOrdering {
    /// `(year, week)` as an integer tuple.
    #[default]
    Numeric,
    /// Minimum of the decimal concatenation `"{year}{week}"` compared as
    /// strings, so week 5 sorts after week 30.
    PaperCompat,
}

/// How the average number of procedural steps per applicant is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StepCounting {
    /// Counts (step, latest-applicant row) pairs, as the SQL join does.
    PaperFaithful,
    /// Counts each step row once per application.
    #[default]
    Normalized,
}

/// Which register event codes signal a change of applicant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApprRule {
    Suffix(String),
    Codes(BTreeSet<String>),
}

impl Default for ApprRule {
    fn default() -> Self {
        ApprRule::Suffix(APPR_SUFFIX.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorParams {
    pub mode: OutputMode,
    pub bulletin_ordering: BulletinOrdering,
    pub step_counting: StepCounting,
    pub appr_rule: ApprRule,
    pub challenge_codes: BTreeSet<String>,
}

impl IndicatorParams {
    /// Parameters matching a run mode: paper-compat also selects string
    /// bulletin ordering and pair counting.
    pub fn for_mode(mode: OutputMode) -> Self {
        let (bulletin_ordering, step_counting) = match mode {
            OutputMode::Default => (BulletinOrdering::Numeric, StepCounting::Normalized),
            OutputMode::PaperCompat => (BulletinOrdering::PaperCompat, StepCounting::PaperFaithful),
        };
        Self {
            mode,
            bulletin_ordering,
            step_counting,
            appr_rule: ApprRule::default(),
            challenge_codes: default_challenge_codes(),
        }
    }
}

impl Default for IndicatorParams {
    fn default() -> Self {
        Self::for_mode(OutputMode::Default)
    }
}

pub fn default_challenge_codes() -> BTreeSet<String> {
    VALIDITY_CHALLENGE_CODES
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// One `(id, appln_id, value)` result row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorRow<V> {
    pub id: RegId,
    pub appln_id: ApplnId,
    pub value: V,
}

impl<V> IndicatorRow<V> {
    pub fn new(id: RegId, appln_id: ApplnId, value: V) -> Self {
        Self { id, appln_id, value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseCoverage {
    pub nb_lic_ctry: u64,
    /// Some licensee covers every state; those states are not in the count.
    pub has_all_designation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferSignals {
    pub n_applicant_sets: u32,
    pub n_distinct_customer_ids: u64,
    pub n_appr_events: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamLag {
    pub appln_filing_date: NaiveDate,
    pub exam_date: NaiveDate,
    pub days_to_exam: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstRepresentative {
    pub bulletin: Bulletin,
    /// Representatives announced in that bulletin, by `(set_seq_nr, seq_nr)`.
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AmendmentKinds {
    pub b2: bool,
    pub b3: bool,
}

impl AmendmentKinds {
    pub fn is_empty(self) -> bool {
        !self.b2 && !self.b3
    }
}

impl fmt::Display for AmendmentKinds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.b2, self.b3) {
            (false, false) => Ok(()),
            (true, false) => f.write_str(KIND_B2),
            (false, true) => f.write_str(KIND_B3),
            (true, true) => write!(f, "{KIND_B2};{KIND_B3}"),
        }
    }
}

/// Non-negative fixed-point decimal with two fractional digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hundredths(pub u64);

impl fmt::Display for Hundredths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicantAverage {
    pub name: String,
    pub avg_proc_steps: Hundredths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    Cohort,
    BackwardCitations,
    LicenseCountries,
    ApplicantSets,
    TransferSignals,
    DaysToExam,
    FirstRepresentative,
    ValidityChallenges,
    AmendmentKinds,
    ValidatedStates,
    AvgProcSteps,
}

impl IndicatorKind {
    pub const ALL: [IndicatorKind; 11] = [
        IndicatorKind::Cohort,
        IndicatorKind::BackwardCitations,
        IndicatorKind::LicenseCountries,
        IndicatorKind::ApplicantSets,
        IndicatorKind::TransferSignals,
        IndicatorKind::DaysToExam,
        IndicatorKind::FirstRepresentative,
        IndicatorKind::ValidityChallenges,
        IndicatorKind::AmendmentKinds,
        IndicatorKind::ValidatedStates,
        IndicatorKind::AvgProcSteps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IndicatorKind::Cohort => "cohort",
            IndicatorKind::BackwardCitations => "backward_citations",
            IndicatorKind::LicenseCountries => "license_countries",
            IndicatorKind::ApplicantSets => "applicant_sets",
            IndicatorKind::TransferSignals => "transfer_signals",
            IndicatorKind::DaysToExam => "days_to_exam",
            IndicatorKind::FirstRepresentative => "first_representative",
            IndicatorKind::ValidityChallenges => "validity_challenges",
            IndicatorKind::AmendmentKinds => "amendment_kinds",
            IndicatorKind::ValidatedStates => "validated_states",
            IndicatorKind::AvgProcSteps => "avg_proc_steps",
        }
    }
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndicatorKind {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.replace('-', "_");
        IndicatorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(&wanted))
            .ok_or_else(|| UnknownCode {
                field: "indicator",
                value: s.to_string(),
            })
    }
}

/// Result of one indicator evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "indicator", content = "rows", rename_all = "snake_case")]
pub enum IndicatorOutput {
    Cohort(Cohort),
    BackwardCitations(Vec<IndicatorRow<u64>>),
    LicenseCountries(Vec<IndicatorRow<LicenseCoverage>>),
    ApplicantSets(Vec<IndicatorRow<u32>>),
    TransferSignals(Vec<IndicatorRow<TransferSignals>>),
    DaysToExam(Vec<IndicatorRow<ExamLag>>),
    FirstRepresentative(Vec<IndicatorRow<FirstRepresentative>>),
    ValidityChallenges(Vec<IndicatorRow<u64>>),
    AmendmentKinds(Vec<IndicatorRow<AmendmentKinds>>),
    ValidatedStates(Vec<IndicatorRow<u64>>),
    AvgProcSteps(Vec<ApplicantAverage>),
}

impl IndicatorOutput {
    pub fn kind(&self) -> IndicatorKind {
        match self {
            IndicatorOutput::Cohort(_) => IndicatorKind::Cohort,
            IndicatorOutput::BackwardCitations(_) => IndicatorKind::BackwardCitations,
            IndicatorOutput::LicenseCountries(_) => IndicatorKind::LicenseCountries,
            IndicatorOutput::ApplicantSets(_) => IndicatorKind::ApplicantSets,
            IndicatorOutput::TransferSignals(_) => IndicatorKind::TransferSignals,
            IndicatorOutput::DaysToExam(_) => IndicatorKind::DaysToExam,
            IndicatorOutput::FirstRepresentative(_) => IndicatorKind::FirstRepresentative,
            IndicatorOutput::ValidityChallenges(_) => IndicatorKind::ValidityChallenges,
            IndicatorOutput::AmendmentKinds(_) => IndicatorKind::AmendmentKinds,
            IndicatorOutput::ValidatedStates(_) => IndicatorKind::ValidatedStates,
            IndicatorOutput::AvgProcSteps(_) => IndicatorKind::AvgProcSteps,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            IndicatorOutput::Cohort(c) => c.len(),
            IndicatorOutput::BackwardCitations(r) => r.len(),
            IndicatorOutput::LicenseCountries(r) => r.len(),
            IndicatorOutput::ApplicantSets(r) => r.len(),
            IndicatorOutput::TransferSignals(r) => r.len(),
            IndicatorOutput::DaysToExam(r) => r.len(),
            IndicatorOutput::FirstRepresentative(r) => r.len(),
            IndicatorOutput::ValidityChallenges(r) => r.len(),
            IndicatorOutput::AmendmentKinds(r) => r.len(),
            IndicatorOutput::ValidatedStates(r) => r.len(),
            IndicatorOutput::AvgProcSteps(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
