//! Loading and writing table dumps.
//!
//! Each table is a comma-separated UTF-8 file named after the table
//! (`reg101_appln.csv`, ...). The first row holds column names, matched
//! case-insensitively and in any order; unknown columns are ignored. Empty
//! fields are NULL and dates are `YYYY-MM-DD`. A missing file is an empty
//! relation.

mod schema;

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use csv::{ByteRecord, ReaderBuilder, Terminator, WriterBuilder};
use patreg_model::validate::latest_flag_warnings;
use patreg_model::*;
use thiserror::Error;

use schema::{Fields, TableRow};

pub use schema::{format_date, parse_date, DATE_FORMAT};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("dataset directory {0} does not exist")]
    MissingDirectory(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{table}: malformed header: {message}")]
    MalformedHeader { table: Table, message: String },
    #[error("{table}: unreadable record {row}: {message}")]
    Unreadable {
        table: Table,
        row: usize,
        message: String,
    },
    /// First violation found in strict mode.
    #[error("{0}")]
    Rejected(Violation),
}

/// Where to find the tables and how strictly to read them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub dir: PathBuf,
    pub overrides: BTreeMap<Table, PathBuf>,
    pub mode: ValidationMode,
    /// Date value treated as NULL (e.g. `9999-12-31`). Off by default.
    pub null_date_sentinel: Option<NaiveDate>,
    /// Keep reading after a violation in strict mode and report them all.
    pub collect_all: bool,
}

impl DatasetManifest {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            overrides: BTreeMap::new(),
            mode: ValidationMode::Strict,
            null_date_sentinel: None,
            collect_all: false,
        }
    }

    /// Strict checks, but every violation is reported instead of only the
    /// first. Offending rows are dropped as in lenient mode.
    pub fn auditing(mut self) -> Self {
        self.mode = ValidationMode::Strict;
        self.collect_all = true;
        self
    }

    pub fn with_mode(mut self, mode: ValidationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_override(mut self, table: Table, path: impl Into<PathBuf>) -> Self {
        self.overrides.insert(table, path.into());
        self
    }

    pub fn with_null_date_sentinel(mut self, sentinel: Option<NaiveDate>) -> Self {
        self.null_date_sentinel = sentinel;
        self
    }

    pub fn path_for(&self, table: Table) -> PathBuf {
        match self.overrides.get(&table) {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => self.dir.join(p),
            None => self.dir.join(table.file_name()),
        }
    }
}

fn load_table<T: TableRow>(
    manifest: &DatasetManifest,
    table: Table,
) -> Result<(Vec<T>, ValidationReport), IngestError> {
    let path = manifest.path_for(table);
    let mut report = ValidationReport::default();
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound && !manifest.overrides.contains_key(&table) => {
            report.row_counts.insert(table, RowCounts::default());
            return Ok((Vec::new(), report));
        }
        Err(source) => return Err(IngestError::Io { path, source }),
    };

    let mut reader = ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(io::BufReader::with_capacity(1 << 16, file));

    let header = reader.byte_headers().map_err(|e| csv_error(table, 0, &path, e))?;
    let positions = resolve_header::<T>(table, header)?;

    let mut rows = Vec::new();
    let mut keys = KeyRegistry::default();
    let mut counts = RowCounts::default();
    let mut record = ByteRecord::new();
    let mut row = 0usize;
    loop {
        match reader.read_byte_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(csv_error(table, row + 1, &path, e)),
        }
        row += 1;
        counts.rows_in += 1;
        let parsed = if record.len() != positions.1 {
            Err(Issue::new(
                ViolationKind::Malformed,
                format!("expected {} fields, found {}", positions.1, record.len()),
            ))
        } else {
            let fields = Fields {
                columns: T::COLUMNS,
                positions: &positions.0,
                record: &record,
                null_date_sentinel: manifest.null_date_sentinel,
            };
            T::parse(&fields)
                .and_then(|r| r.check().map(|_| r))
                .and_then(|r| keys.admit(&r, manifest.mode).map(|_| r))
        };
        match parsed {
            Ok(r) => {
                rows.push(r);
                counts.rows_loaded += 1;
            }
            Err(issue) => {
                let violation = Violation {
                    table,
                    row,
                    kind: issue.kind,
                    message: issue.message,
                };
                if manifest.mode == ValidationMode::Strict && !manifest.collect_all {
                    return Err(IngestError::Rejected(violation));
                }
                report.violations.push(violation);
                counts.rows_dropped += 1;
            }
        }
    }
    report.row_counts.insert(table, counts);
    Ok((rows, report))
}

fn csv_error(table: Table, row: usize, path: &Path, e: csv::Error) -> IngestError {
    if let csv::ErrorKind::Io(_) = e.kind() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => IngestError::Io {
                path: path.to_path_buf(),
                source,
            },
            _ => unreachable!(),
        }
    } else {
        IngestError::Unreadable {
            table,
            row,
            message: e.to_string(),
        }
    }
}

/// Maps schema columns to record positions; also returns the header width.
fn resolve_header<T: TableRow>(
    table: Table,
    header: &ByteRecord,
) -> Result<(Vec<Option<usize>>, usize), IngestError> {
    let bad = |message: String| IngestError::MalformedHeader { table, message };
    let mut names = Vec::with_capacity(header.len());
    let mut seen = HashSet::new();
    for raw in header.iter() {
        let name = std::str::from_utf8(raw)
            .map_err(|_| bad("column name is not UTF-8".into()))?
            .trim()
            .to_ascii_lowercase();
        if !name.is_empty() && !seen.insert(name.clone()) {
            return Err(bad(format!("duplicate column {name:?}")));
        }
        names.push(name);
    }
    let positions: Vec<Option<usize>> = T::COLUMNS
        .iter()
        .map(|c| names.iter().position(|n| n == c))
        .collect();
    let missing: Vec<&str> = T::REQUIRED
        .iter()
        .filter(|c| !names.iter().any(|n| n == *c))
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(bad(format!("missing column(s) {}", missing.join(", "))));
    }
    Ok((positions, header.len()))
}

fn collect<T>(
    joined: std::thread::Result<Result<(Vec<T>, ValidationReport), IngestError>>,
    report: &mut ValidationReport,
) -> Result<Vec<T>, IngestError> {
    let (rows, part) = joined.expect("table loader panicked")?;
    report.merge(part);
    Ok(rows)
}

/// Reads all thirteen relations, one worker thread per file.
///
/// In strict mode the first violation (in table order) is returned as
/// [`IngestError::Rejected`]. In lenient mode offending rows are dropped
/// and listed in the report.
pub fn load_dataset(manifest: &DatasetManifest) -> Result<(Dataset, ValidationReport), IngestError> {
    if !manifest.dir.is_dir() {
        return Err(IngestError::MissingDirectory(manifest.dir.clone()));
    }
    let mut report = ValidationReport::default();
    let mut ds = Dataset::default();
    std::thread::scope(|s| -> Result<(), IngestError> {
        let m = manifest;
        let h101 = s.spawn(|| load_table(m, Table::Reg101Appln));
        let h102 = s.spawn(|| load_table(m, Table::Reg102PatPubln));
        let h107 = s.spawn(|| load_table(m, Table::Reg107Parties));
        let h109 = s.spawn(|| load_table(m, Table::Reg109DesignStates));
        let h111 = s.spawn(|| load_table(m, Table::Reg111Licensee));
        let h112 = s.spawn(|| load_table(m, Table::Reg112LicenseeStates));
        let h201 = s.spawn(|| load_table(m, Table::Reg201ProcStep));
        let h301 = s.spawn(|| load_table(m, Table::Reg301EventData));
        let t201 = s.spawn(|| load_table(m, Table::Tls201Appln));
        let t209 = s.spawn(|| load_table(m, Table::Tls209ApplnIpc));
        let t211 = s.spawn(|| load_table(m, Table::Tls211PatPubln));
        let t212 = s.spawn(|| load_table(m, Table::Tls212Citation));
        let t221 = s.spawn(|| load_table(m, Table::Tls221InpadocPrs));
        ds.applications = collect(h101.join(), &mut report)?;
        ds.publications = collect(h102.join(), &mut report)?;
        ds.parties = collect(h107.join(), &mut report)?;
        ds.designated_states = collect(h109.join(), &mut report)?;
        ds.licensees = collect(h111.join(), &mut report)?;
        ds.licensee_states = collect(h112.join(), &mut report)?;
        ds.procedure_steps = collect(h201.join(), &mut report)?;
        ds.events = collect(h301.join(), &mut report)?;
        ds.core_applications = collect(t201.join(), &mut report)?;
        ds.ipc = collect(t209.join(), &mut report)?;
        ds.core_publications = collect(t211.join(), &mut report)?;
        ds.citations = collect(t212.join(), &mut report)?;
        ds.legal_status = collect(t221.join(), &mut report)?;
        Ok(())
    })?;
    report.warnings.extend(latest_flag_warnings(&ds.parties));
    Ok((ds, report))
}

fn write_table<T: TableRow, W: Write>(rows: &[T], out: W) -> io::Result<()> {
    let mut w = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(T::COLUMNS)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Canonical bytes of one relation: every column in schema order, `\n`
/// line endings, quoting only where needed.
pub fn table_bytes(dataset: &Dataset, table: Table) -> Vec<u8> {
    let mut buf = Vec::new();
    let res = match table {
        Table::Reg101Appln => write_table(&dataset.applications, &mut buf),
        Table::Reg102PatPubln => write_table(&dataset.publications, &mut buf),
        Table::Reg107Parties => write_table(&dataset.parties, &mut buf),
        Table::Reg109DesignStates => write_table(&dataset.designated_states, &mut buf),
        Table::Reg111Licensee => write_table(&dataset.licensees, &mut buf),
        Table::Reg112LicenseeStates => write_table(&dataset.licensee_states, &mut buf),
        Table::Reg201ProcStep => write_table(&dataset.procedure_steps, &mut buf),
        Table::Reg301EventData => write_table(&dataset.events, &mut buf),
        Table::Tls201Appln => write_table(&dataset.core_applications, &mut buf),
        Table::Tls209ApplnIpc => write_table(&dataset.ipc, &mut buf),
        Table::Tls211PatPubln => write_table(&dataset.core_publications, &mut buf),
        Table::Tls212Citation => write_table(&dataset.citations, &mut buf),
        Table::Tls221InpadocPrs => write_table(&dataset.legal_status, &mut buf),
    };
    res.expect("writing to memory cannot fail");
    buf
}

/// Writes all thirteen table files into `dir` (created if needed). Each
/// file is written to a temporary name first and renamed into place.
pub fn write_dataset(dataset: &Dataset, dir: &Path) -> Result<(), IngestError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| IngestError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for table in Table::ALL {
        let path = dir.join(table.file_name());
        let tmp = dir.join(format!(".{}.tmp", table.file_name()));
        let bytes = table_bytes(dataset, table);
        let mut f = BufWriter::new(File::create(&tmp).map_err(io_err(&tmp))?);
        f.write_all(&bytes).map_err(io_err(&tmp))?;
        f.into_inner()
            .map_err(|e| e.into_error())
            .and_then(|f| f.sync_all())
            .map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))?;
    }
    Ok(())
}

/// Referential integrity: register children without a register
/// application, linked register applications without a core record, and
/// citations from unknown publications.
pub fn validate_links(dataset: &Dataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    let reg_ids: HashSet<RegId> = dataset.applications.iter().map(|a| a.id).collect();
    let core_ids: HashSet<ApplnId> = dataset
        .core_applications
        .iter()
        .map(|a| a.appln_id)
        .collect();
    let publn_ids: HashSet<PublnId> = dataset
        .core_publications
        .iter()
        .map(|p| p.pat_publn_id)
        .collect();

    let orphan = |msg: String| Issue::new(ViolationKind::Orphan, msg);

    for (i, a) in dataset.applications.iter().enumerate() {
        if a.appln_id.is_linked() && !core_ids.contains(&a.appln_id) {
            report.push(
                Table::Reg101Appln,
                i + 1,
                orphan(format!("appln_id {} has no core application", a.appln_id)),
            );
        }
    }

    fn children<'a>(
        report: &mut ValidationReport,
        reg_ids: &HashSet<RegId>,
        table: Table,
        ids: impl Iterator<Item = RegId> + 'a,
    ) {
        for (i, id) in ids.enumerate() {
            if !reg_ids.contains(&id) {
                report.push(
                    table,
                    i + 1,
                    Issue::new(
                        ViolationKind::Orphan,
                        format!("id {id} has no register application"),
                    ),
                );
            }
        }
    }
    children(&mut report, &reg_ids, Table::Reg102PatPubln, dataset.publications.iter().map(|r| r.id));
    children(&mut report, &reg_ids, Table::Reg107Parties, dataset.parties.iter().map(|r| r.id));
    children(&mut report, &reg_ids, Table::Reg109DesignStates, dataset.designated_states.iter().map(|r| r.id));
    children(&mut report, &reg_ids, Table::Reg111Licensee, dataset.licensees.iter().map(|r| r.id));
    children(&mut report, &reg_ids, Table::Reg112LicenseeStates, dataset.licensee_states.iter().map(|r| r.id));
    children(&mut report, &reg_ids, Table::Reg201ProcStep, dataset.procedure_steps.iter().map(|r| r.id));
    children(&mut report, &reg_ids, Table::Reg301EventData, dataset.events.iter().map(|r| r.id));

    for (i, c) in dataset.citations.iter().enumerate() {
        if !publn_ids.contains(&c.pat_publn_id) {
            report.push(
                Table::Tls212Citation,
                i + 1,
                orphan(format!("pat_publn_id {} has no core publication", c.pat_publn_id)),
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, table: Table, body: &str) {
        fs::write(dir.join(table.file_name()), body).unwrap();
    }

    #[test]
    fn header_only_application_table_gives_empty_dataset() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), Table::Reg101Appln, "id,appln_id,appln_filing_date,status\n");
        let (ds, report) = load_dataset(&DatasetManifest::new(dir.path())).unwrap();
        assert!(ds.is_empty());
        assert!(report.violations.is_empty());
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn invalid_month_is_fatal_in_strict_and_dropped_in_lenient() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            Table::Reg101Appln,
            "id,appln_id,appln_filing_date\n1,10,2008-01-01\n2,11,2008-13-01\n",
        );
        let err = load_dataset(&DatasetManifest::new(dir.path())).unwrap_err();
        match err {
            IngestError::Rejected(v) => {
                assert_eq!(v.table, Table::Reg101Appln);
                assert_eq!(v.row, 2);
                assert_eq!(v.kind, ViolationKind::Malformed);
            }
            other => panic!("unexpected {other:?}"),
        }

        let manifest = DatasetManifest::new(dir.path()).with_mode(ValidationMode::Lenient);
        let (ds, report) = load_dataset(&manifest).unwrap();
        assert_eq!(ds.applications.len(), 1);
        assert_eq!(report.violations.len(), 1);
        let counts = report.row_counts[&Table::Reg101Appln];
        assert_eq!(
            (counts.rows_in, counts.rows_loaded, counts.rows_dropped),
            (2, 1, 1)
        );
    }

    #[test]
    fn columns_are_case_insensitive_reorderable_and_extras_ignored() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            Table::Reg301EventData,
            "EVENT_DATE,Extra,ID,event_code\n2008-11-14,zzz,8005567,0009185\n",
        );
        let (ds, _) = load_dataset(&DatasetManifest::new(dir.path())).unwrap();
        assert_eq!(
            ds.events,
            vec![RegisterEvent {
                id: RegId(8005567),
                event_code: "0009185".into(),
                event_date: NaiveDate::from_ymd_opt(2008, 11, 14).unwrap(),
            }]
        );
    }

    #[test]
    fn missing_required_column_is_a_header_error_in_both_modes() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), Table::Reg201ProcStep, "id\n1\n");
        for mode in [ValidationMode::Strict, ValidationMode::Lenient] {
            let err = load_dataset(&DatasetManifest::new(dir.path()).with_mode(mode)).unwrap_err();
            assert!(matches!(err, IngestError::MalformedHeader { .. }), "{err}");
        }
    }

    #[test]
    fn missing_directory() {
        let err = load_dataset(&DatasetManifest::new("/nonexistent/patreg")).unwrap_err();
        assert!(matches!(err, IngestError::MissingDirectory(_)));
    }

    #[test]
    fn null_date_sentinel_is_opt_in() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            Table::Reg301EventData,
            "id,event_code,event_date\n1,X,9999-12-31\n",
        );
        let (ds, _) = load_dataset(&DatasetManifest::new(dir.path())).unwrap();
        assert_eq!(ds.events.len(), 1);
        let manifest = DatasetManifest::new(dir.path())
            .with_mode(ValidationMode::Lenient)
            .with_null_date_sentinel(NaiveDate::from_ymd_opt(9999, 12, 31));
        let (ds, report) = load_dataset(&manifest).unwrap();
        assert!(ds.events.is_empty());
        assert_eq!(report.violations[0].kind, ViolationKind::Missing);
    }

    #[test]
    fn lenient_accounts_for_every_row() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            Table::Reg107Parties,
            "id,type,seq_nr,set_seq_nr,is_latest,name\n\
             1,A,1,1,Y,ok\n\
             1,A,1,1,Y,dup\n\
             1,Q,1,2,Y,bad type\n\
             1,A,0,2,Y,zero seq\n\
             1,A,1\n\
             \"1\",\"R\",\"1\",\"1\",\"N\",\"Name, with comma\"\n",
        );
        let manifest = DatasetManifest::new(dir.path()).with_mode(ValidationMode::Lenient);
        let (ds, report) = load_dataset(&manifest).unwrap();
        let c = report.row_counts[&Table::Reg107Parties];
        assert_eq!(c.rows_in, 6);
        assert_eq!(c.rows_loaded, 2);
        assert_eq!(c.rows_in, c.rows_loaded + c.rows_dropped);
        assert_eq!(ds.parties[1].name, "Name, with comma");
        let kinds = report.counts_by_kind();
        assert_eq!(kinds[&ViolationKind::DuplicateKey], 1);
        assert_eq!(kinds[&ViolationKind::Malformed], 2);
        assert_eq!(kinds[&ViolationKind::Invariant], 1);
    }

    #[test]
    fn auditing_reports_every_strict_violation() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            Table::Reg112LicenseeStates,
            "id,licensee_seq_nr,licensee_country,bulletin_year,bulletin_nr\n\
             1,1,DE,2010,3\n\
             1,1,DE,2010,3\n\
             1,1,Germany,2010,3\n",
        );
        let (_, lenient) =
            load_dataset(&DatasetManifest::new(dir.path()).with_mode(ValidationMode::Lenient)).unwrap();
        assert_eq!(lenient.violations.len(), 1);
        let (ds, audit) = load_dataset(&DatasetManifest::new(dir.path()).auditing()).unwrap();
        assert_eq!(audit.violations.len(), 2);
        assert_eq!(ds.licensee_states.len(), 1);
        assert!(load_dataset(&DatasetManifest::new(dir.path())).is_err());
    }

    #[test]
    fn table_override_paths() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("steps.txt"), "id,step_code\n5,PFEE\n").unwrap();
        let manifest =
            DatasetManifest::new(dir.path()).with_override(Table::Reg201ProcStep, "steps.txt");
        let (ds, _) = load_dataset(&manifest).unwrap();
        assert_eq!(ds.procedure_steps.len(), 1);

        let manifest =
            DatasetManifest::new(dir.path()).with_override(Table::Reg201ProcStep, "absent.txt");
        assert!(matches!(
            load_dataset(&manifest).unwrap_err(),
            IngestError::Io { .. }
        ));
    }

    fn app(id: u64, appln_id: u64) -> RegisterApplication {
        RegisterApplication {
            id: RegId(id),
            appln_id: ApplnId(appln_id),
            appln_filing_date: NaiveDate::from_ymd_opt(2005, 5, 5).unwrap(),
            status: String::new(),
        }
    }

    #[test]
    fn links_clean_dataset_is_empty_report() {
        let ds = Dataset {
            applications: vec![app(1, 0)],
            procedure_steps: vec![ProcedureStep {
                id: RegId(1),
                step_code: "PFEE".into(),
            }],
            ..Default::default()
        };
        assert!(validate_links(&ds).is_clean());
    }

    #[test]
    fn single_orphan_party() {
        let ds = Dataset {
            applications: vec![app(1, 0)],
            parties: vec![Party {
                id: RegId(999),
                party_type: PartyType::Applicant,
                seq_nr: 1,
                set_seq_nr: 1,
                is_latest: true,
                name: "X".into(),
                customer_id: String::new(),
                bulletin: None,
            }],
            ..Default::default()
        };
        let report = validate_links(&ds);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].table, Table::Reg107Parties);
        assert_eq!(report.violations[0].kind, ViolationKind::Orphan);
    }

    #[test]
    fn unlinked_register_row_and_unknown_citing_publication() {
        let ds = Dataset {
            applications: vec![app(1, 77)],
            citations: vec![Citation {
                pat_publn_id: PublnId(5),
                cited_pat_publn_id: PublnId(6),
                pat_citn_seq_nr: 1,
            }],
            ..Default::default()
        };
        let by_table = validate_links(&ds).counts_by_table();
        assert_eq!(by_table[&Table::Reg101Appln], 1);
        assert_eq!(by_table[&Table::Tls212Citation], 1);
    }
}
