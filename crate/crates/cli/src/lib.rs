//! `patreg` command line: validate dataset directories, run indicators,
//! generate fixtures and compare the indexed pipeline with the oracle.
//!
//! Exit codes: 0 success, 1 internal error, 2 validation failure, 3 oracle
//! mismatch, 64 usage error (including a missing input directory).

pub mod render;

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use patreg_core::indicators::{evaluate_many, negative_lags};
use patreg_core::synth::{embed_scenarios, generate_fixture, reference_scenarios, GeneratorConfig};
use patreg_core::{load_dataset, validate_links, write_dataset, DatasetManifest, IndexedStore, IngestError};
use patreg_model::*;

use render::{indicator_table, skipped_members_table, Format, OutputTable};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

pub const DATA_DIR_ENV: &str = "PATREG_DATA_DIR";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(EXIT_INTERNAL, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        let code = match &e {
            IngestError::MissingDirectory(_) => EXIT_USAGE,
            IngestError::Io { .. } => EXIT_INTERNAL,
            _ => EXIT_VALIDATION,
        };
        Self::new(code, e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::internal(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "patreg", version, about = "Patent register indicator engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a dataset directory: every row, key and cross-table link.
    Validate(ValidateArgs),
    /// Select a cohort and compute indicators.
    Indicators(IndicatorsArgs),
    /// Write a seeded synthetic dataset.
    Generate(GenerateArgs),
    /// Compare indexed results against the naive oracle.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Dataset directory with one `<table>.csv` per relation.
    #[arg(env = DATA_DIR_ENV)]
    pub dir: PathBuf,
    /// Read a table from another file, e.g. `reg107_parties=parties.csv`.
    #[arg(long = "table", value_name = "NAME=PATH")]
    pub tables: Vec<String>,
    /// Date value to read as NULL, e.g. 9999-12-31.
    #[arg(long, value_name = "YYYY-MM-DD")]
    pub null_date: Option<String>,
}

impl InputArgs {
    fn manifest(&self) -> Result<DatasetManifest, CliError> {
        let mut m = DatasetManifest::new(&self.dir);
        for spec in &self.tables {
            let (name, path) = spec
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--table expects NAME=PATH, got {spec:?}")))?;
            let table: Table = name.parse().map_err(|e| CliError::usage(format!("{e}")))?;
            m = m.with_override(table, path);
        }
        if let Some(s) = &self.null_date {
            let d = patreg_core::ingest::parse_date(s).ok_or_else(|| CliError::usage(format!("bad --null-date {s:?}")))?;
            m = m.with_null_date_sentinel(Some(d));
        }
        Ok(m)
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Args)]
pub struct CohortArgs {
    #[arg(long, default_value = "EP")]
    pub auth: String,
    #[arg(long, value_delimiter = ',', default_value = "A,W")]
    pub kinds: Vec<String>,
    #[arg(long, default_value_t = 2000)]
    pub year_from: i32,
    #[arg(long, default_value_t = 2010)]
    pub year_to: i32,
    #[arg(long, default_value = "F03D")]
    pub ipc_prefix: String,
}

impl CohortArgs {
    fn spec(&self) -> Result<CohortSpec, CliError> {
        CohortSpec::new(
            self.auth.as_str(),
            self.kinds.iter().map(String::as_str),
            self.year_from,
            self.year_to,
            self.ipc_prefix.as_str(),
        )
        .map_err(|e| CliError::usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// `default` or `paper-compat`.
    #[arg(long, default_value = "default")]
    pub mode: String,
    /// Change-of-applicant event codes; overrides the `APPR` suffix rule.
    #[arg(long, value_delimiter = ',')]
    pub appr_codes: Vec<String>,
    /// Validity-challenge event codes; overrides the built-in list.
    #[arg(long, value_delimiter = ',')]
    pub challenge_codes: Vec<String>,
}

impl ParamArgs {
    fn params(&self) -> Result<IndicatorParams, CliError> {
        let mode: OutputMode = self.mode.parse().map_err(|e| CliError::usage(format!("{e}")))?;
        let mut params = IndicatorParams::for_mode(mode);
        if !self.appr_codes.is_empty() {
            params.appr_rule = ApprRule::Codes(self.appr_codes.iter().cloned().collect());
        }
        if !self.challenge_codes.is_empty() {
            params.challenge_codes = self.challenge_codes.iter().cloned().collect();
        }
        Ok(params)
    }
}

#[derive(Debug, Args)]
pub struct IndicatorsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub cohort: CohortArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Indicator to compute; repeatable.
    #[arg(long = "indicator", value_name = "NAME", conflicts_with = "all")]
    pub indicators: Vec<String>,
    /// Compute the cohort table and every indicator.
    #[arg(long)]
    pub all: bool,
    /// Output directory; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Drop invalid rows instead of failing.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Also embed the reference scenarios.
    #[arg(long)]
    pub scenarios: bool,
    #[arg(long)]
    pub year_from: Option<i32>,
    #[arg(long)]
    pub year_to: Option<i32>,
    #[arg(long)]
    pub p_unlinked: Option<f64>,
    #[arg(long)]
    pub p_citations: Option<f64>,
    #[arg(long)]
    pub p_license: Option<f64>,
    #[arg(long)]
    pub p_opposition: Option<f64>,
    #[arg(long)]
    pub p_transfer: Option<f64>,
    #[arg(long)]
    pub p_pgfp: Option<f64>,
    /// Comma-separated state codes replacing the 38 EPC states.
    #[arg(long, value_delimiter = ',')]
    pub states: Vec<String>,
}

impl GenerateArgs {
    pub fn config(&self) -> GeneratorConfig {
        let mut c = GeneratorConfig::new(self.seed, self.n);
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut c.p_unlinked, self.p_unlinked);
        set(&mut c.p_citations, self.p_citations);
        set(&mut c.p_license, self.p_license);
        set(&mut c.p_opposition, self.p_opposition);
        set(&mut c.p_transfer, self.p_transfer);
        set(&mut c.p_pgfp, self.p_pgfp);
        c.year_from = self.year_from.unwrap_or(c.year_from);
        c.year_to = self.year_to.unwrap_or(c.year_to);
        if !self.states.is_empty() {
            c.states = self.states.clone();
        }
        c
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Dataset directory checked in addition to the generated seeds.
    #[arg(env = DATA_DIR_ENV)]
    pub dir: Option<PathBuf>,
    /// Number of generated seeds.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    /// Applications per generated fixture.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[command(flatten)]
    pub cohort: CohortArgs,
    /// Perturbs the indexed results before comparing; exercises the
    /// mismatch path.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Validate(a) => cmd_validate(&a, out),
        Command::Indicators(a) => cmd_indicators(&a, out, err),
        Command::Generate(a) => cmd_generate(&a, err),
        Command::Check(a) => cmd_check(&a, out),
    }
}

const REPORT_LIMIT: usize = 200;

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let manifest = args.input.manifest()?.auditing();
    let (ds, mut report) = load_dataset(&manifest)?;
    report.merge(validate_links(&ds));

    for v in report.violations.iter().take(REPORT_LIMIT) {
        writeln!(out, "error: {v}")?;
    }
    if report.violations.len() > REPORT_LIMIT {
        writeln!(out, "error: ... {} more", report.violations.len() - REPORT_LIMIT)?;
    }
    for w in report.warnings.iter().take(REPORT_LIMIT) {
        writeln!(out, "warning: {}:{}: {}", w.table, w.row, w.message)?;
    }
    for (table, c) in &report.row_counts {
        writeln!(
            out,
            "{table}: {} rows, {} loaded, {} dropped",
            c.rows_in, c.rows_loaded, c.rows_dropped
        )?;
    }
    writeln!(
        out,
        "{} violations, {} warnings",
        report.violations.len(),
        report.warnings.len()
    )?;
    Ok(if report.violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    })
}

fn selected_kinds(args: &IndicatorsArgs) -> Result<Vec<IndicatorKind>, CliError> {
    if args.all {
        return Ok(IndicatorKind::ALL.to_vec());
    }
    if args.indicators.is_empty() {
        return Err(CliError::usage("choose --indicator NAME or --all"));
    }
    let mut kinds = Vec::new();
    for name in &args.indicators {
        let k: IndicatorKind = name.parse().map_err(|e| CliError::usage(format!("{e}")))?;
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    Ok(kinds)
}

/// Writes `bytes` to `dir/name` through a temporary file in the same
/// directory.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}

pub fn cmd_indicators(args: &IndicatorsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let kinds = selected_kinds(args)?;
    let spec = args.cohort.spec()?;
    let params = args.params.params()?;
    let mut manifest = args.input.manifest()?;
    if args.lenient {
        manifest = manifest.with_mode(ValidationMode::Lenient);
    }

    let started = Instant::now();
    let (ds, report) = load_dataset(&manifest)?;
    if !report.violations.is_empty() {
        writeln!(err, "dropped {} invalid rows", report.violations.len())?;
    }
    let store = IndexedStore::build(ds).map_err(|e| CliError::new(EXIT_VALIDATION, e.to_string()))?;
    let (cohort, outputs) = evaluate_many(&store, &spec, &kinds, &params);

    let mut tables: Vec<OutputTable> = outputs.iter().map(|o| indicator_table(o, params.mode)).collect();
    let lags: Vec<IndicatorRow<ExamLag>> = outputs
        .iter()
        .find_map(|o| match o {
            IndicatorOutput::DaysToExam(rows) => Some(negative_lags(rows).cloned().collect()),
            _ => None,
        })
        .unwrap_or_default();
    let skipped = skipped_members_table(&cohort, &lags);

    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            tables.push(skipped);
            for t in &tables {
                let name = format!("{}.{}", t.name, args.format.extension());
                write_atomic(dir, &name, &t.to_bytes(args.format))?;
            }
        }
        None => {
            let multi = tables.len() > 1;
            for t in &tables {
                if multi {
                    writeln!(out, "# {}", t.name)?;
                }
                out.write_all(&t.to_bytes(args.format))?;
            }
            if !skipped.rows.is_empty() {
                writeln!(err, "{} cohort members skipped or flagged", skipped.rows.len())?;
            }
        }
    }
    writeln!(
        err,
        "cohort: {} members, {} without register row; {} tables in {:.2?}",
        cohort.len(),
        cohort.skipped().count(),
        kinds.len(),
        started.elapsed()
    )?;
    Ok(EXIT_OK)
}

pub fn cmd_generate(args: &GenerateArgs, err: &mut dyn Write) -> Result<u8, CliError> {
    let config = args.config();
    let mut ds = generate_fixture(&config).map_err(|e| CliError::usage(e.to_string()))?;
    if args.scenarios {
        ds = embed_scenarios(ds, &reference_scenarios()).map_err(|e| CliError::internal(e.to_string()))?;
    }
    write_dataset(&ds, &args.out).map_err(|e| CliError::internal(e.to_string()))?;
    writeln!(
        err,
        "wrote {} rows ({} applications) to {}",
        ds.total_rows(),
        ds.applications.len(),
        args.out.display()
    )?;
    Ok(EXIT_OK)
}

/// Rendered bytes of every output for both modes, indexed vs oracle.
/// Returns the first difference.
pub fn compare(ds: &Dataset, spec: &CohortSpec, inject_fault: bool) -> Option<String> {
    let store = IndexedStore::build(ds.clone()).ok()?;
    for mode in [OutputMode::Default, OutputMode::PaperCompat] {
        let params = IndicatorParams::for_mode(mode);
        let (cohort, mut indexed) = evaluate_many(&store, spec, &IndicatorKind::ALL, &params);
        if inject_fault {
            if let Some(o) = indexed.iter_mut().find(|o| !o.is_empty()) {
                drop_last_row(o);
            }
        }
        let naive_cohort = patreg_oracle::select_cohort(ds, spec);
        if naive_cohort != cohort {
            return Some(format!("{mode:?}: cohort differs"));
        }
        for (kind, got) in IndicatorKind::ALL.iter().zip(&indexed) {
            let want = patreg_oracle::evaluate_on(ds, &naive_cohort, *kind, &params);
            let a = indicator_table(got, mode).to_bytes(Format::Csv);
            let b = indicator_table(&want, mode).to_bytes(Format::Csv);
            if a != b {
                return Some(first_diff(kind.name(), mode, &a, &b));
            }
        }
    }
    None
}

fn first_diff(name: &str, mode: OutputMode, indexed: &[u8], oracle: &[u8]) -> String {
    let a: Vec<&str> = std::str::from_utf8(indexed).unwrap_or("").lines().collect();
    let b: Vec<&str> = std::str::from_utf8(oracle).unwrap_or("").lines().collect();
    let i = (0..a.len().max(b.len()))
        .find(|&i| a.get(i) != b.get(i))
        .unwrap_or(0);
    format!(
        "{name} ({mode:?}) line {}: indexed {:?}, oracle {:?}",
        i + 1,
        a.get(i).copied().unwrap_or("<end>"),
        b.get(i).copied().unwrap_or("<end>")
    )
}

fn drop_last_row(o: &mut IndicatorOutput) {
    match o {
        IndicatorOutput::Cohort(c) => {
            c.members.pop();
        }
        IndicatorOutput::BackwardCitations(r)
        | IndicatorOutput::ValidityChallenges(r)
        | IndicatorOutput::ValidatedStates(r) => {
            r.pop();
        }
        IndicatorOutput::LicenseCountries(r) => {
            r.pop();
        }
        IndicatorOutput::ApplicantSets(r) => {
            r.pop();
        }
        IndicatorOutput::TransferSignals(r) => {
            r.pop();
        }
        IndicatorOutput::DaysToExam(r) => {
            r.pop();
        }
        IndicatorOutput::FirstRepresentative(r) => {
            r.pop();
        }
        IndicatorOutput::AmendmentKinds(r) => {
            r.pop();
        }
        IndicatorOutput::AvgProcSteps(r) => {
            r.pop();
        }
    }
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let spec = args.cohort.spec()?;
    let started = Instant::now();
    let scenarios = reference_scenarios();
    for seed in args.first_seed..args.first_seed + args.seeds {
        let ds = generate_fixture(&GeneratorConfig::new(seed, args.n))
            .and_then(|ds| embed_scenarios(ds, &scenarios))
            .map_err(|e| CliError::internal(e.to_string()))?;
        if let Some(diff) = compare(&ds, &spec, args.inject_fault) {
            writeln!(out, "seed {seed}: MISMATCH {diff}")?;
            return Ok(EXIT_MISMATCH);
        }
    }
    writeln!(out, "{} generated seeds: ok", args.seeds)?;
    if let Some(dir) = &args.dir {
        let (ds, _) = load_dataset(&DatasetManifest::new(dir))?;
        if let Some(diff) = compare(&ds, &spec, args.inject_fault) {
            writeln!(out, "{}: MISMATCH {diff}", dir.display())?;
            return Ok(EXIT_MISMATCH);
        }
        writeln!(out, "{}: ok", dir.display())?;
    }
    writeln!(out, "done in {:.2?}", started.elapsed())?;
    Ok(EXIT_OK)
}
