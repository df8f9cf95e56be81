//! Row invariants, key uniqueness and the report shared by ingest and the
//! generator.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Table};
use crate::ids::{ApplnId, PublnId, RegId};
use crate::tables::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ValidationMode {
    /// First violation aborts the load.
    #[default]
    Strict,
    /// Offending rows are dropped and reported.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Field could not be parsed (date, integer, code).
    Malformed,
    /// A required field is empty.
    Missing,
    /// Parsed value breaks a type invariant.
    Invariant,
    DuplicateKey,
    /// Child row whose parent does not exist.
    Orphan,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Malformed => "malformed",
            ViolationKind::Missing => "missing",
            ViolationKind::Invariant => "invariant",
            ViolationKind::DuplicateKey => "duplicate_key",
            ViolationKind::Orphan => "orphan",
        })
    }
}

/// A problem with a single row, before it is attached to a table and row
/// number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub kind: ViolationKind,
    pub message: String,
}

impl Issue {
    pub fn new(kind: ViolationKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Self::new(ViolationKind::Invariant, message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub table: Table,
    /// 1-based data row number (header excluded).
    pub row: usize,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} row {}: {}: {}",
            self.table, self.row, self.kind, self.message
        )
    }
}

/// Data-quality observation that never causes rejection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub table: Table,
    pub row: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RowCounts {
    pub rows_in: usize,
    pub rows_loaded: usize,
    pub rows_dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
    pub row_counts: BTreeMap<Table, RowCounts>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, table: Table, row: usize, issue: Issue) {
        self.violations.push(Violation {
            table,
            row,
            kind: issue.kind,
            message: issue.message,
        });
    }

    pub fn counts_by_kind(&self) -> BTreeMap<ViolationKind, usize> {
        let mut out = BTreeMap::new();
        for v in &self.violations {
            *out.entry(v.kind).or_insert(0) += 1;
        }
        out
    }

    pub fn counts_by_table(&self) -> BTreeMap<Table, usize> {
        let mut out = BTreeMap::new();
        for v in &self.violations {
            *out.entry(v.table).or_insert(0) += 1;
        }
        out
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
        self.warnings.extend(other.warnings);
        for (t, c) in other.row_counts {
            let e = self.row_counts.entry(t).or_default();
            e.rows_in += c.rows_in;
            e.rows_loaded += c.rows_loaded;
            e.rows_dropped += c.rows_dropped;
        }
    }
}

/// Field-level invariants of one row.
pub trait RowCheck {
    const TABLE: Table;

    fn check(&self) -> Result<(), Issue>;

    /// Keys that must be unique within the table.
    fn unique_keys(&self, _mode: ValidationMode) -> Vec<RowKey> {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RowKey {
    RegId(RegId),
    ApplnId(ApplnId),
    PublnId(PublnId),
    Party(RegId, PartyType, u32, u32),
    Licensee(RegId, u32),
    LicenseeState(RegId, u32, String),
}

impl fmt::Display for RowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKey::RegId(id) => write!(f, "id={id}"),
            RowKey::ApplnId(a) => write!(f, "appln_id={a}"),
            RowKey::PublnId(p) => write!(f, "pat_publn_id={p}"),
            RowKey::Party(id, t, set, seq) => {
                write!(f, "id={id} type={t} set_seq_nr={set} seq_nr={seq}")
            }
            RowKey::Licensee(id, seq) => write!(f, "id={id} licensee_seq_nr={seq}"),
            RowKey::LicenseeState(id, seq, c) => {
                write!(f, "id={id} licensee_seq_nr={seq} licensee_country={c}")
            }
        }
    }
}

/// Tracks unique keys per table across rows.
#[derive(Debug, Default)]
pub struct KeyRegistry {
    seen: HashSet<(Table, RowKey)>,
}

impl KeyRegistry {
    /// Registers every key of the row, or none if any is already taken.
    pub fn admit<R: RowCheck>(&mut self, row: &R, mode: ValidationMode) -> Result<(), Issue> {
        let keys = row.unique_keys(mode);
        for k in &keys {
            if self.seen.contains(&(R::TABLE, k.clone())) {
                return Err(Issue::new(
                    ViolationKind::DuplicateKey,
                    format!("duplicate key {k}"),
                ));
            }
        }
        for k in keys {
            self.seen.insert((R::TABLE, k));
        }
        Ok(())
    }
}

fn non_empty(field: &str, value: &str) -> Result<(), Issue> {
    if value.is_empty() {
        Err(Issue::new(
            ViolationKind::Missing,
            format!("{field} must be non-empty"),
        ))
    } else {
        Ok(())
    }
}

fn country(field: &str, value: &str) -> Result<(), Issue> {
    if is_country_code(value) {
        Ok(())
    } else {
        Err(Issue::invariant(format!(
            "{field} {value:?} is not a two-letter uppercase code"
        )))
    }
}

fn bulletin(b: Bulletin) -> Result<(), Issue> {
    if b.is_valid() {
        Ok(())
    } else {
        Err(Issue::invariant(format!(
            "bulletin {}/{} outside year {}..={} or week 1..=53",
            b.year,
            b.week,
            Bulletin::MIN_YEAR,
            Bulletin::MAX_YEAR
        )))
    }
}

fn positive(field: &str, v: u64) -> Result<(), Issue> {
    if v == 0 {
        Err(Issue::invariant(format!("{field} must be positive")))
    } else {
        Ok(())
    }
}

impl RowCheck for RegisterApplication {
    const TABLE: Table = Table::Reg101Appln;

    fn check(&self) -> Result<(), Issue> {
        positive("id", self.id.0)
    }

    fn unique_keys(&self, _: ValidationMode) -> Vec<RowKey> {
        let mut keys = vec![RowKey::RegId(self.id)];
        if self.appln_id.is_linked() {
            keys.push(RowKey::ApplnId(self.appln_id));
        }
        keys
    }
}

impl RowCheck for CoreApplication {
    const TABLE: Table = Table::Tls201Appln;

    fn check(&self) -> Result<(), Issue> {
        positive("appln_id", self.appln_id.0)?;
        non_empty("appln_auth", &self.appln_auth)?;
        non_empty("appln_kind", &self.appln_kind)
    }

    fn unique_keys(&self, _: ValidationMode) -> Vec<RowKey> {
        vec![RowKey::ApplnId(self.appln_id)]
    }
}

impl RowCheck for IpcAssignment {
    const TABLE: Table = Table::Tls209ApplnIpc;

    fn check(&self) -> Result<(), Issue> {
        non_empty("ipc_class_symbol", &self.ipc_class_symbol)
    }
}

impl RowCheck for CorePublication {
    const TABLE: Table = Table::Tls211PatPubln;

    fn check(&self) -> Result<(), Issue> {
        positive("pat_publn_id", self.pat_publn_id.0)
    }

    fn unique_keys(&self, _: ValidationMode) -> Vec<RowKey> {
        vec![RowKey::PublnId(self.pat_publn_id)]
    }
}

impl RowCheck for Citation {
    const TABLE: Table = Table::Tls212Citation;

    fn check(&self) -> Result<(), Issue> {
        Ok(())
    }
}

impl RowCheck for RegisterPublication {
    const TABLE: Table = Table::Reg102PatPubln;

    fn check(&self) -> Result<(), Issue> {
        non_empty("publn_kind", &self.publn_kind)?;
        bulletin(self.bulletin)
    }
}

impl RowCheck for Party {
    const TABLE: Table = Table::Reg107Parties;

    fn check(&self) -> Result<(), Issue> {
        if self.seq_nr == 0 || self.set_seq_nr == 0 {
            return Err(Issue::invariant("seq_nr and set_seq_nr must be >= 1"));
        }
        match self.bulletin {
            Some(b) => bulletin(b),
            None => Ok(()),
        }
    }

    fn unique_keys(&self, _: ValidationMode) -> Vec<RowKey> {
        vec![RowKey::Party(
            self.id,
            self.party_type,
            self.set_seq_nr,
            self.seq_nr,
        )]
    }
}

impl RowCheck for RegisterEvent {
    const TABLE: Table = Table::Reg301EventData;

    fn check(&self) -> Result<(), Issue> {
        non_empty("event_code", &self.event_code)
    }
}

impl RowCheck for ProcedureStep {
    const TABLE: Table = Table::Reg201ProcStep;

    fn check(&self) -> Result<(), Issue> {
        non_empty("step_code", &self.step_code)
    }
}

impl RowCheck for Licensee {
    const TABLE: Table = Table::Reg111Licensee;

    fn check(&self) -> Result<(), Issue> {
        positive("licensee_seq_nr", self.licensee_seq_nr as u64)
    }

    fn unique_keys(&self, _: ValidationMode) -> Vec<RowKey> {
        vec![RowKey::Licensee(self.id, self.licensee_seq_nr)]
    }
}

impl RowCheck for LicenseeState {
    const TABLE: Table = Table::Reg112LicenseeStates;

    fn check(&self) -> Result<(), Issue> {
        positive("licensee_seq_nr", self.licensee_seq_nr as u64)?;
        country("licensee_country", &self.licensee_country)?;
        bulletin(self.bulletin)
    }

    fn unique_keys(&self, mode: ValidationMode) -> Vec<RowKey> {
        match mode {
            ValidationMode::Strict => vec![RowKey::LicenseeState(
                self.id,
                self.licensee_seq_nr,
                self.licensee_country.clone(),
            )],
            ValidationMode::Lenient => Vec::new(),
        }
    }
}

impl RowCheck for DesignatedState {
    const TABLE: Table = Table::Reg109DesignStates;

    fn check(&self) -> Result<(), Issue> {
        country("country", &self.country)
    }
}

impl RowCheck for LegalStatusEvent {
    const TABLE: Table = Table::Tls221InpadocPrs;

    fn check(&self) -> Result<(), Issue> {
        non_empty("prs_code", &self.prs_code)?;
        match &self.country {
            Some(c) => country("l501ep", c),
            None if self.prs_code == PGFP => Err(Issue::new(
                ViolationKind::Missing,
                "PGFP rows must carry a country (l501ep)",
            )),
            None => Ok(()),
        }
    }
}

/// Rows whose `is_latest` flag disagrees with the maximal `set_seq_nr` of
/// their `(id, type)` group. Returned as 1-based row numbers.
pub fn inconsistent_latest_flags(parties: &[Party]) -> Vec<usize> {
    let mut max_set: HashMap<(RegId, PartyType), u32> = HashMap::new();
    for p in parties {
        let e = max_set.entry((p.id, p.party_type)).or_insert(0);
        *e = (*e).max(p.set_seq_nr);
    }
    parties
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_latest != (max_set[&(p.id, p.party_type)] == p.set_seq_nr))
        .map(|(i, _)| i + 1)
        .collect()
}

pub fn latest_flag_warnings(parties: &[Party]) -> Vec<Warning> {
    inconsistent_latest_flags(parties)
        .into_iter()
        .map(|row| Warning {
            table: Table::Reg107Parties,
            row,
            message: "is_latest disagrees with the maximal set_seq_nr of its (id, type)".into(),
        })
        .collect()
}

fn check_relation<R: RowCheck>(
    rows: &[R],
    keys: &mut KeyRegistry,
    mode: ValidationMode,
    report: &mut ValidationReport,
) {
    for (i, row) in rows.iter().enumerate() {
        if let Err(issue) = row.check().and_then(|_| keys.admit(row, mode)) {
            report.push(R::TABLE, i + 1, issue);
        }
    }
    report.row_counts.insert(
        R::TABLE,
        RowCounts {
            rows_in: rows.len(),
            rows_loaded: rows.len(),
            rows_dropped: 0,
        },
    );
}

impl Dataset {
    /// Runs every row invariant and key check over an in-memory dataset.
    pub fn check_invariants(&self, mode: ValidationMode) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut keys = KeyRegistry::default();
        check_relation(&self.applications, &mut keys, mode, &mut report);
        check_relation(&self.publications, &mut keys, mode, &mut report);
        check_relation(&self.parties, &mut keys, mode, &mut report);
        check_relation(&self.designated_states, &mut keys, mode, &mut report);
        check_relation(&self.licensees, &mut keys, mode, &mut report);
        check_relation(&self.licensee_states, &mut keys, mode, &mut report);
        check_relation(&self.procedure_steps, &mut keys, mode, &mut report);
        check_relation(&self.events, &mut keys, mode, &mut report);
        check_relation(&self.core_applications, &mut keys, mode, &mut report);
        check_relation(&self.ipc, &mut keys, mode, &mut report);
        check_relation(&self.core_publications, &mut keys, mode, &mut report);
        check_relation(&self.citations, &mut keys, mode, &mut report);
        check_relation(&self.legal_status, &mut keys, mode, &mut report);
        report.warnings = latest_flag_warnings(&self.parties);
        report
    }
}

#[cfg(test)]
mod tests {
    use chrono::NaiveDate;

    use super::*;

    fn app(id: u64, appln: u64) -> RegisterApplication {
        RegisterApplication {
            id: RegId(id),
            appln_id: ApplnId(appln),
            appln_filing_date: NaiveDate::from_ymd_opt(2005, 1, 1).unwrap(),
            status: String::new(),
        }
    }

    fn party(id: u64, set: u32, seq: u32, latest: bool) -> Party {
        Party {
            id: RegId(id),
            party_type: PartyType::Applicant,
            seq_nr: seq,
            set_seq_nr: set,
            is_latest: latest,
            name: "X".into(),
            customer_id: String::new(),
            bulletin: None,
        }
    }

    #[test]
    fn unlinked_applications_may_share_appln_id_zero() {
        let ds = Dataset {
            applications: vec![app(1, 0), app(2, 0), app(3, 7)],
            ..Default::default()
        };
        assert!(ds.check_invariants(ValidationMode::Strict).is_clean());
    }

    #[test]
    fn duplicate_register_and_core_keys_are_reported() {
        let ds = Dataset {
            applications: vec![app(1, 7), app(1, 8), app(2, 7)],
            ..Default::default()
        };
        let report = ds.check_invariants(ValidationMode::Strict);
        assert_eq!(report.violations.len(), 2);
        assert!(report
            .violations
            .iter()
            .all(|v| v.kind == ViolationKind::DuplicateKey));
        assert_eq!(report.violations[0].row, 2);
        assert_eq!(report.violations[1].row, 3);
    }

    #[test]
    fn party_invariants() {
        let mut p = party(1, 1, 0, true);
        assert_eq!(p.check().unwrap_err().kind, ViolationKind::Invariant);
        p.seq_nr = 1;
        p.bulletin = Some(Bulletin::new(2000, 0));
        assert!(p.check().is_err());
        p.bulletin = Some(Bulletin::new(2000, 1));
        assert!(p.check().is_ok());
    }

    #[test]
    fn pgfp_requires_country() {
        let mut e = LegalStatusEvent {
            appln_id: ApplnId(1),
            prs_code: PGFP.into(),
            country: None,
            fee_payment_year: None,
        };
        assert_eq!(e.check().unwrap_err().kind, ViolationKind::Missing);
        e.prs_code = "PG25".into();
        assert!(e.check().is_ok());
        e.country = Some("de".into());
        assert!(e.check().is_err());
    }

    #[test]
    fn licensee_state_key_only_enforced_in_strict_mode() {
        let row = LicenseeState {
            id: RegId(1),
            licensee_seq_nr: 1,
            licensee_country: "DE".into(),
            bulletin: Bulletin::new(2010, 3),
        };
        let ds = Dataset {
            licensee_states: vec![row.clone(), row],
            ..Default::default()
        };
        assert_eq!(ds.check_invariants(ValidationMode::Strict).violations.len(), 1);
        assert!(ds.check_invariants(ValidationMode::Lenient).is_clean());
    }

    #[test]
    fn latest_flag_consistency_is_a_warning() {
        let parties = vec![
            party(1, 1, 1, false),
            party(1, 2, 1, true),
            party(1, 2, 2, false),
            party(2, 1, 1, true),
        ];
        assert_eq!(inconsistent_latest_flags(&parties), vec![3]);
        let ds = Dataset {
            parties,
            ..Default::default()
        };
        let report = ds.check_invariants(ValidationMode::Strict);
        assert!(report.is_clean());
        assert_eq!(report.warnings.len(), 1);
    }
}
