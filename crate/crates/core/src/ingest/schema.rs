//! Column layout of every table file and the row <-> record mapping.

use chrono::NaiveDate;
use csv::ByteRecord;
use patreg_model::*;

pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// Field access for one data record, resolved against the header.
pub(crate) struct Fields<'a> {
    pub columns: &'static [&'static str],
    /// Record position of each entry in `columns`, if present in the header.
    pub positions: &'a [Option<usize>],
    pub record: &'a ByteRecord,
    pub null_date_sentinel: Option<NaiveDate>,
}

fn malformed(msg: String) -> Issue {
    Issue::new(ViolationKind::Malformed, msg)
}

impl Fields<'_> {
    fn raw(&self, name: &str) -> Result<Option<&str>, Issue> {
        let idx = self
            .columns
            .iter()
            .position(|c| *c == name)
            .expect("column declared in schema");
        let Some(pos) = self.positions[idx] else {
            return Ok(None);
        };
        let bytes = self.record.get(pos).unwrap_or_default();
        let s = std::str::from_utf8(bytes)
            .map_err(|_| malformed(format!("{name}: invalid UTF-8")))?;
        Ok(if s.is_empty() { None } else { Some(s) })
    }

    fn required(&self, name: &str) -> Result<&str, Issue> {
        self.raw(name)?
            .ok_or_else(|| Issue::new(ViolationKind::Missing, format!("{name} is empty")))
    }

    pub fn string(&self, name: &str) -> Result<String, Issue> {
        self.required(name).map(str::to_string)
    }

    pub fn opt_string(&self, name: &str) -> Result<Option<String>, Issue> {
        Ok(self.raw(name)?.map(str::to_string))
    }

    pub fn int<T: std::str::FromStr>(&self, name: &str) -> Result<T, Issue> {
        let s = self.required(name)?;
        parse_int(name, s)
    }

    pub fn opt_int<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, Issue> {
        self.raw(name)?.map(|s| parse_int(name, s)).transpose()
    }

    pub fn code<T: std::str::FromStr>(&self, name: &str) -> Result<T, Issue>
    where
        T::Err: std::fmt::Display,
    {
        let s = self.required(name)?;
        s.parse::<T>()
            .map_err(|e| malformed(format!("{name}: {e}")))
    }

    pub fn flag(&self, name: &str) -> Result<bool, Issue> {
        match self.required(name)? {
            "Y" | "y" | "1" | "true" | "TRUE" => Ok(true),
            "N" | "n" | "0" | "false" | "FALSE" => Ok(false),
            other => Err(malformed(format!("{name}: expected Y or N, got {other:?}"))),
        }
    }

    pub fn date(&self, name: &str) -> Result<NaiveDate, Issue> {
        let s = self.required(name)?;
        let d = parse_date(s).ok_or_else(|| {
            malformed(format!("{name}: {s:?} is not a valid YYYY-MM-DD date"))
        })?;
        if Some(d) == self.null_date_sentinel {
            return Err(Issue::new(
                ViolationKind::Missing,
                format!("{name} holds the null-date sentinel"),
            ));
        }
        Ok(d)
    }

    pub fn bulletin(&self, year: &str, week: &str) -> Result<Bulletin, Issue> {
        Ok(Bulletin::new(self.int(year)?, self.int(week)?))
    }

    pub fn opt_bulletin(&self, year: &str, week: &str) -> Result<Option<Bulletin>, Issue> {
        match (self.opt_int::<u16>(year)?, self.opt_int::<u8>(week)?) {
            (Some(y), Some(w)) => Ok(Some(Bulletin::new(y, w))),
            (None, None) => Ok(None),
            _ => Err(Issue::new(
                ViolationKind::Missing,
                format!("{year} and {week} must be both present or both empty"),
            )),
        }
    }
}

fn parse_int<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, Issue> {
    if !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(format!("{name}: {s:?} is not a non-negative integer")));
    }
    s.parse::<T>()
        .map_err(|_| malformed(format!("{name}: {s:?} is out of range")))
}

/// Strict `YYYY-MM-DD`: exactly ten characters, zero-padded.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    let digits = |r: std::ops::Range<usize>| -> Option<u32> {
        b[r.clone()]
            .iter()
            .all(u8::is_ascii_digit)
            .then(|| s[r].parse().ok())
            .flatten()
    };
    NaiveDate::from_ymd_opt(digits(0..4)? as i32, digits(5..7)?, digits(8..10)?)
}

pub fn format_date(d: NaiveDate) -> String {
    d.format(DATE_FORMAT).to_string()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// A row type that lives in one table file.
pub(crate) trait TableRow: RowCheck + Sized + Send {
    /// Canonical column order.
    const COLUMNS: &'static [&'static str];
    /// Columns that must appear in the header.
    const REQUIRED: &'static [&'static str];

    fn parse(f: &Fields<'_>) -> Result<Self, Issue>;

    fn record(&self) -> Vec<String>;
}

impl TableRow for RegisterApplication {
    const COLUMNS: &'static [&'static str] = &["id", "appln_id", "appln_filing_date", "status"];
    const REQUIRED: &'static [&'static str] = &["id", "appln_id", "appln_filing_date"];

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            id: RegId(f.int("id")?),
            appln_id: ApplnId(f.int("appln_id")?),
            appln_filing_date: f.date("appln_filing_date")?,
            status: f.opt_string("status")?.unwrap_or_default(),
        })
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.id.to_string(),
            self.appln_id.to_string(),
            format_date(self.appln_filing_date),
            self.status.clone(),
        ]
    }
}

impl TableRow for RegisterPublication {
    const COLUMNS: &'static [&'static str] = &["id", "publn_kind", "bulletin_year", "bulletin_nr"];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            id: RegId(f.int("id")?),
            publn_kind: f.string("publn_kind")?,
            bulletin: f.bulletin("bulletin_year", "bulletin_nr")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.id.to_string(),
            self.publn_kind.clone(),
            self.bulletin.year.to_string(),
            self.bulletin.week.to_string(),
        ]
    }
}

impl TableRow for Party {
    const COLUMNS: &'static [&'static str] = &[
        "id",
        "type",
        "seq_nr",
        "set_seq_nr",
        "is_latest",
        "name",
        "customer_id",
        "bulletin_year",
        "bulletin_nr",
    ];
    const REQUIRED: &'static [&'static str] = &["id", "type", "seq_nr", "set_seq_nr", "is_latest"];

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            id: RegId(f.int("id")?),
            party_type: f.code("type")?,
            seq_nr: f.int("seq_nr")?,
            set_seq_nr: f.int("set_seq_nr")?,
            is_latest: f.flag("is_latest")?,
            name: f.opt_string("name")?.unwrap_or_default(),
            customer_id: f.opt_string("customer_id")?.unwrap_or_default(),
            bulletin: f.opt_bulletin("bulletin_year", "bulletin_nr")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.id.to_string(),
            self.party_type.to_string(),
            self.seq_nr.to_string(),
            self.set_seq_nr.to_string(),
            if self.is_latest { "Y" } else { "N" }.to_string(),
            self.name.clone(),
            self.customer_id.clone(),
            opt(self.bulletin.map(|b| b.year)),
            opt(self.bulletin.map(|b| b.week)),
        ]
    }
}

impl TableRow for DesignatedState {
    const COLUMNS: &'static [&'static str] = &["id", "country"];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            id: RegId(f.int("id")?),
            country: f.string("country")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![self.id.to_string(), self.country.clone()]
    }
}

impl TableRow for Licensee {
    const COLUMNS: &'static [&'static str] = &["id", "licensee_seq_nr", "type_license", "designation"];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            id: RegId(f.int("id")?),
            licensee_seq_nr: f.int("licensee_seq_nr")?,
            type_license: f.code("type_license")?,
            designation: f.code("designation")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.id.to_string(),
            self.licensee_seq_nr.to_string(),
            self.type_license.to_string(),
            self.designation.to_string(),
        ]
    }
}

impl TableRow for LicenseeState {
    const COLUMNS: &'static [&'static str] = &[
        "id",
        "licensee_seq_nr",
        "licensee_country",
        "bulletin_year",
        "bulletin_nr",
    ];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            id: RegId(f.int("id")?),
            licensee_seq_nr: f.int("licensee_seq_nr")?,
            licensee_country: f.string("licensee_country")?,
            bulletin: f.bulletin("bulletin_year", "bulletin_nr")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.id.to_string(),
            self.licensee_seq_nr.to_string(),
            self.licensee_country.clone(),
            self.bulletin.year.to_string(),
            self.bulletin.week.to_string(),
        ]
    }
}

impl TableRow for ProcedureStep {
    const COLUMNS: &'static [&'static str] = &["id", "step_code"];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            id: RegId(f.int("id")?),
            step_code: f.string("step_code")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![self.id.to_string(), self.step_code.clone()]
    }
}

impl TableRow for RegisterEvent {
    const COLUMNS: &'static [&'static str] = &["id", "event_code", "event_date"];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            id: RegId(f.int("id")?),
            event_code: f.string("event_code")?,
            event_date: f.date("event_date")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.id.to_string(),
            self.event_code.clone(),
            format_date(self.event_date),
        ]
    }
}

impl TableRow for CoreApplication {
    const COLUMNS: &'static [&'static str] =
        &["appln_id", "appln_auth", "appln_kind", "appln_filing_date"];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            appln_id: ApplnId(f.int("appln_id")?),
            appln_auth: f.string("appln_auth")?,
            appln_kind: f.string("appln_kind")?,
            appln_filing_date: f.date("appln_filing_date")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.appln_id.to_string(),
            self.appln_auth.clone(),
            self.appln_kind.clone(),
            format_date(self.appln_filing_date),
        ]
    }
}

impl TableRow for IpcAssignment {
    const COLUMNS: &'static [&'static str] = &["appln_id", "ipc_class_symbol"];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            appln_id: ApplnId(f.int("appln_id")?),
            ipc_class_symbol: f.string("ipc_class_symbol")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![self.appln_id.to_string(), self.ipc_class_symbol.clone()]
    }
}

impl TableRow for CorePublication {
    const COLUMNS: &'static [&'static str] = &["pat_publn_id", "appln_id"];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            pat_publn_id: PublnId(f.int("pat_publn_id")?),
            appln_id: ApplnId(f.int("appln_id")?),
        })
    }

    fn record(&self) -> Vec<String> {
        vec![self.pat_publn_id.to_string(), self.appln_id.to_string()]
    }
}

impl TableRow for Citation {
    const COLUMNS: &'static [&'static str] = &["pat_publn_id", "cited_pat_publn_id", "pat_citn_seq_nr"];
    const REQUIRED: &'static [&'static str] = Self::COLUMNS;

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            pat_publn_id: PublnId(f.int("pat_publn_id")?),
            cited_pat_publn_id: PublnId(f.int("cited_pat_publn_id")?),
            pat_citn_seq_nr: f.int("pat_citn_seq_nr")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.pat_publn_id.to_string(),
            self.cited_pat_publn_id.to_string(),
            self.pat_citn_seq_nr.to_string(),
        ]
    }
}

impl TableRow for LegalStatusEvent {
    const COLUMNS: &'static [&'static str] = &["appln_id", "prs_code", "l501ep", "l520ep"];
    const REQUIRED: &'static [&'static str] = &["appln_id", "prs_code"];

    fn parse(f: &Fields<'_>) -> Result<Self, Issue> {
        Ok(Self {
            appln_id: ApplnId(f.int("appln_id")?),
            prs_code: f.string("prs_code")?,
            country: f.opt_string("l501ep")?,
            fee_payment_year: f.opt_int("l520ep")?,
        })
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.appln_id.to_string(),
            self.prs_code.clone(),
            self.country.clone().unwrap_or_default(),
            opt(self.fee_payment_year),
        ]
    }
}
