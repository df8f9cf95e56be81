//! Tabular rendering of indicator results.
//!
//! CSV output: header row, `\n` line endings, RFC 4180 quoting only where
//! needed, UTF-8. JSON-lines output: one object per row with keys in
//! column order; numbers unquoted, NULL as `null`.

use std::io;

use patreg_model::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Num(String),
    Text(String),
    Bool(bool),
    Null,
}

impl Cell {
    fn num(v: impl ToString) -> Self {
        Cell::Num(v.to_string())
    }

    fn text(v: impl Into<String>) -> Self {
        Cell::Text(v.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputTable {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputTable {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn to_bytes(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.csv().expect("writing to memory"),
            Format::Jsonl => self.jsonl(),
        }
    }

    fn csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(s) | Cell::Text(s) => s.as_str(),
                Cell::Bool(true) => "true",
                Cell::Bool(false) => "false",
                Cell::Null => "",
            }))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    fn jsonl(&self) -> Vec<u8> {
        let mut out = String::new();
        for row in &self.rows {
            out.push('{');
            for (i, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(col).expect("string"));
                out.push(':');
                match cell {
                    Cell::Num(s) => out.push_str(s),
                    Cell::Text(s) => out.push_str(&serde_json::to_string(s).expect("string")),
                    Cell::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
                    Cell::Null => out.push_str("null"),
                }
            }
            out.push_str("}\n");
        }
        out.into_bytes()
    }
}

fn ids<V>(r: &IndicatorRow<V>) -> [Cell; 2] {
    [Cell::num(r.id), Cell::num(r.appln_id)]
}

fn counting<V>(
    name: &str,
    value_column: &'static str,
    rows: &[IndicatorRow<V>],
    value: impl Fn(&V) -> Cell,
) -> OutputTable {
    let mut t = OutputTable::new(name, &["id", "appln_id", value_column]);
    for r in rows {
        let [id, appln_id] = ids(r);
        t.rows.push(vec![id, appln_id, value(&r.value)]);
    }
    t
}

/// One output table per indicator. Paper-compat mode emits the reduced
/// column set; default mode may add columns.
pub fn indicator_table(output: &IndicatorOutput, mode: OutputMode) -> OutputTable {
    let name = output.kind().name();
    let extended = mode == OutputMode::Default;
    match output {
        IndicatorOutput::Cohort(cohort) => {
            let columns: &[&str] = if extended { &["appln_id", "id"] } else { &["appln_id"] };
            let mut t = OutputTable::new(name, columns);
            for m in &cohort.members {
                let mut row = vec![Cell::num(m.appln_id)];
                if extended {
                    row.push(m.id.map_or(Cell::Null, Cell::num));
                }
                t.rows.push(row);
            }
            t
        }
        IndicatorOutput::BackwardCitations(rows) => counting(name, "n_cit", rows, |v| Cell::num(v)),
        IndicatorOutput::LicenseCountries(rows) => {
            let columns: &[&str] = if extended {
                &["id", "appln_id", "nb_lic_ctry", "has_all_designation"]
            } else {
                &["id", "appln_id", "nb_lic_ctry"]
            };
            let mut t = OutputTable::new(name, columns);
            for r in rows {
                let mut row = ids(r).to_vec();
                row.push(Cell::num(r.value.nb_lic_ctry));
                if extended {
                    row.push(Cell::Bool(r.value.has_all_designation));
                }
                t.rows.push(row);
            }
            t
        }
        IndicatorOutput::ApplicantSets(rows) => counting(name, "nb_changes", rows, |v| Cell::num(v)),
        IndicatorOutput::TransferSignals(rows) => {
            let mut t = OutputTable::new(
                name,
                &[
                    "id",
                    "appln_id",
                    "n_applicant_sets",
                    "n_distinct_customer_ids",
                    "n_appr_events",
                ],
            );
            for r in rows {
                let mut row = ids(r).to_vec();
                row.push(Cell::num(r.value.n_applicant_sets));
                row.push(Cell::num(r.value.n_distinct_customer_ids));
                row.push(Cell::num(r.value.n_appr_events));
                t.rows.push(row);
            }
            t
        }
        IndicatorOutput::DaysToExam(rows) => {
            let mut t = OutputTable::new(
                name,
                &["id", "appln_id", "appln_filing_date", "exam_date", "days_to_exam"],
            );
            for r in rows {
                let mut row = ids(r).to_vec();
                row.push(Cell::text(r.value.appln_filing_date.to_string()));
                row.push(Cell::text(r.value.exam_date.to_string()));
                row.push(Cell::num(r.value.days_to_exam));
                t.rows.push(row);
            }
            t
        }
        IndicatorOutput::FirstRepresentative(rows) => {
            let mut t = OutputTable::new(
                name,
                &["id", "appln_id", "bulletin_year", "bulletin_nr", "name"],
            );
            for r in rows {
                for rep in &r.value.names {
                    let mut row = ids(r).to_vec();
                    row.push(Cell::num(r.value.bulletin.year));
                    row.push(Cell::num(r.value.bulletin.week));
                    row.push(Cell::text(rep.as_str()));
                    t.rows.push(row);
                }
            }
            t
        }
        IndicatorOutput::ValidityChallenges(rows) => counting(name, "nb_events", rows, |v| Cell::num(v)),
        IndicatorOutput::AmendmentKinds(rows) => {
            counting(name, "kinds", rows, |v| Cell::text(v.to_string()))
        }
        IndicatorOutput::ValidatedStates(rows) => {
            counting(name, "nb_validated_states", rows, |v| Cell::num(v))
        }
        IndicatorOutput::AvgProcSteps(rows) => {
            let mut t = OutputTable::new(name, &["name", "avg_proc_steps"]);
            for r in rows {
                t.rows
                    .push(vec![Cell::text(r.name.as_str()), Cell::num(r.avg_proc_steps)]);
            }
            t
        }
    }
}

pub const SKIPPED_MEMBERS: &str = "skipped_members";

/// Cohort members left out of register-side indicators, and rows kept
/// despite a negative examination lag.
pub fn skipped_members_table(cohort: &Cohort, negative_lags: &[IndicatorRow<ExamLag>]) -> OutputTable {
    let mut t = OutputTable::new(SKIPPED_MEMBERS, &["appln_id", "id", "reason"]);
    for appln_id in cohort.skipped() {
        t.rows.push(vec![Cell::num(appln_id), Cell::Null, Cell::text("no_register_row")]);
    }
    for r in negative_lags {
        t.rows.push(vec![
            Cell::num(r.appln_id),
            Cell::num(r.id),
            Cell::text("negative_exam_lag"),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> OutputTable {
        let mut t = OutputTable::new("t", &["name", "n", "flag", "opt"]);
        t.rows.push(vec![
            Cell::text("Gamesa, \"S.L.\""),
            Cell::num(3),
            Cell::Bool(true),
            Cell::Null,
        ]);
        t
    }

    #[test]
    fn csv_quotes_only_when_needed() {
        let bytes = sample().to_bytes(Format::Csv);
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "name,n,flag,opt\n\"Gamesa, \"\"S.L.\"\"\",3,true,\n"
        );
    }

    #[test]
    fn jsonl_keeps_column_order() {
        let bytes = sample().to_bytes(Format::Jsonl);
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "{\"name\":\"Gamesa, \\\"S.L.\\\"\",\"n\":3,\"flag\":true,\"opt\":null}\n"
        );
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = OutputTable::new("days_to_exam", &["id", "appln_id"]);
        assert_eq!(t.to_bytes(Format::Csv), b"id,appln_id\n");
        assert!(t.to_bytes(Format::Jsonl).is_empty());
    }

    #[test]
    fn paper_compat_columns() {
        let out = IndicatorOutput::LicenseCountries(vec![IndicatorRow::new(
            RegId(10788117),
            ApplnId(329924500),
            LicenseCoverage {
                nb_lic_ctry: 37,
                has_all_designation: false,
            },
        )]);
        let compat = indicator_table(&out, OutputMode::PaperCompat).to_bytes(Format::Csv);
        assert_eq!(compat, b"id,appln_id,nb_lic_ctry\n10788117,329924500,37\n");
        let full = indicator_table(&out, OutputMode::Default).to_bytes(Format::Csv);
        assert_eq!(
            full,
            b"id,appln_id,nb_lic_ctry,has_all_designation\n10788117,329924500,37,false\n"
        );
    }

    #[test]
    fn averages_render_two_decimals() {
        let out = IndicatorOutput::AvgProcSteps(vec![ApplicantAverage {
            name: "Neuhäuser GmbH".into(),
            avg_proc_steps: Hundredths(5700),
        }]);
        let bytes = indicator_table(&out, OutputMode::PaperCompat).to_bytes(Format::Csv);
        assert_eq!(String::from_utf8(bytes).unwrap(), "name,avg_proc_steps\nNeuhäuser GmbH,57.00\n");
    }
}
