//! Hand-specified single-application fixtures with known indicator values.

use chrono::NaiveDate;
use patreg_model::*;

use super::{mark_latest, EPC_STATES};

/// An expected indicator value for the scenario's application.
#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    BackwardCitations(u64),
    LicenseCountries(u64),
    ApplicantSets(u32),
    DaysToExam(i64),
    FirstRepresentative { bulletin: Bulletin, name: String },
    ValidityChallenges(u64),
    ValidatedStates(u64),
    AvgProcSteps { name: String, avg: Hundredths },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub id: RegId,
    pub appln_id: ApplnId,
    pub rows: Dataset,
    pub expected: Vec<Expectation>,
}

/// Builds the rows of one cohort application (EP, kind A, F03D).
#[derive(Debug, Clone)]
pub struct ScenarioBuilder {
    id: RegId,
    appln_id: ApplnId,
    rows: Dataset,
    next_publn: u64,
}

fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").expect("fixture date")
}

impl ScenarioBuilder {
    /// `publn_base` seeds the core publication ids of this scenario.
    pub fn new(id: u64, appln_id: u64, filed: &str, publn_base: u64) -> Self {
        let (id, appln_id, filed) = (RegId(id), ApplnId(appln_id), date(filed));
        let mut rows = Dataset::default();
        rows.applications.push(RegisterApplication {
            id,
            appln_id,
            appln_filing_date: filed,
            status: "The patent has been granted".into(),
        });
        rows.core_applications.push(CoreApplication {
            appln_id,
            appln_auth: "EP".into(),
            appln_kind: "A".into(),
            appln_filing_date: filed,
        });
        rows.ipc.push(IpcAssignment {
            appln_id,
            ipc_class_symbol: "F03D   1/06".into(),
        });
        Self {
            id,
            appln_id,
            rows,
            next_publn: publn_base,
        }
    }

    pub fn publication(mut self, kind: &str, year: u16, week: u8) -> Self {
        self.rows.publications.push(RegisterPublication {
            id: self.id,
            publn_kind: kind.into(),
            bulletin: Bulletin::new(year, week),
        });
        self
    }

    /// One core publication citing `cited` with sequence numbers from 1,
    /// plus `npl` non-patent rows (`seq_nr = 0`).
    pub fn citing_publication(mut self, cited: impl IntoIterator<Item = u64>, npl: u64) -> Self {
        let pat_publn_id = PublnId(self.next_publn);
        self.next_publn += 1;
        self.rows.core_publications.push(CorePublication {
            pat_publn_id,
            appln_id: self.appln_id,
        });
        for (i, c) in cited.into_iter().enumerate() {
            self.rows.citations.push(Citation {
                pat_publn_id,
                cited_pat_publn_id: PublnId(c),
                pat_citn_seq_nr: i as u32 + 1,
            });
        }
        for k in 0..npl {
            self.rows.citations.push(Citation {
                pat_publn_id,
                cited_pat_publn_id: PublnId(1 + k),
                pat_citn_seq_nr: 0,
            });
        }
        self
    }

    pub fn licensee(mut self, seq: u32, countries: &[&str], bulletin: Bulletin) -> Self {
        self.rows.licensees.push(Licensee {
            id: self.id,
            licensee_seq_nr: seq,
            type_license: LicenseType::NonExclusive,
            designation: Designation::AsIndicated,
        });
        for c in countries {
            self.rows.licensee_states.push(LicenseeState {
                id: self.id,
                licensee_seq_nr: seq,
                licensee_country: c.to_string(),
                bulletin,
            });
        }
        self
    }

    pub fn party(
        mut self,
        party_type: PartyType,
        set_seq_nr: u32,
        seq_nr: u32,
        name: &str,
        customer_id: &str,
        bulletin: Option<Bulletin>,
    ) -> Self {
        self.rows.parties.push(Party {
            id: self.id,
            party_type,
            seq_nr,
            set_seq_nr,
            is_latest: false,
            name: name.into(),
            customer_id: customer_id.into(),
            bulletin,
        });
        self
    }

    pub fn event(mut self, code: &str, on: &str) -> Self {
        self.rows.events.push(RegisterEvent {
            id: self.id,
            event_code: code.into(),
            event_date: date(on),
        });
        self
    }

    pub fn steps(mut self, codes: &[&str], n: usize) -> Self {
        for i in 0..n {
            self.rows.procedure_steps.push(ProcedureStep {
                id: self.id,
                step_code: codes[i % codes.len()].into(),
            });
        }
        self
    }

    pub fn pgfp(mut self, countries: &[&str], year: u16) -> Self {
        for c in countries {
            self.rows.legal_status.push(LegalStatusEvent {
                appln_id: self.appln_id,
                prs_code: PGFP.into(),
                country: Some(c.to_string()),
                fee_payment_year: Some(year),
            });
        }
        self
    }

    pub fn build(mut self, name: &str, expected: Vec<Expectation>) -> ScenarioSpec {
        mark_latest(&mut self.rows.parties);
        ScenarioSpec {
            name: name.into(),
            id: self.id,
            appln_id: self.appln_id,
            rows: self.rows,
            expected,
        }
    }
}

fn states(range: std::ops::Range<usize>) -> Vec<&'static str> {
    EPC_STATES[range].to_vec()
}

/// Wind-motor applications whose indicator values are known in advance.
/// Ids stay below the generator ranges, so they embed into any fixture.
pub fn reference_scenarios() -> Vec<ScenarioSpec> {
    let b = Bulletin::new;
    let mut out = Vec::new();

    // 86 distinct cited publications, spread over overlapping citing
    // publications and padded with non-patent rows.
    out.push(
        ScenarioBuilder::new(8156970, 56608002, "2004-06-15", 810_000_000)
            .publication("A1", 2005, 51)
            .citing_publication(810_100_001..=810_100_040, 3)
            .citing_publication(810_100_030..=810_100_070, 0)
            .citing_publication((810_100_060..=810_100_086).chain([810_100_001]), 2)
            .build("citation_leader", vec![Expectation::BackwardCitations(86)]),
    );

    out.push(
        ScenarioBuilder::new(10788117, 329924500, "2009-02-10", 820_000_000)
            .publication("A1", 2010, 33)
            .licensee(1, &states(0..37), b(2014, 7))
            .build("license_leader", vec![Expectation::LicenseCountries(37)]),
    );

    // 62 raw licensee-state rows, 36 distinct countries.
    out.push(
        ScenarioBuilder::new(10742603, 320770528, "2008-11-03", 830_000_000)
            .publication("A1", 2010, 19)
            .licensee(1, &states(0..36), b(2013, 40))
            .licensee(2, &states(10..36), b(2014, 2))
            .build("license_overlap", vec![Expectation::LicenseCountries(36)]),
    );

    let mut sets = ScenarioBuilder::new(3732247, 16049513, "2001-03-20", 840_000_000)
        .publication("A1", 2002, 40)
        .party(PartyType::Applicant, 1, 1, "NEG Micon A/S", "C-NEG", Some(b(2002, 40)));
    for (set, week) in (2..=6).zip([10u8, 31, 5, 44, 20]) {
        let year = 2002 + set as u16;
        sets = sets
            .party(
                PartyType::Applicant,
                set,
                1,
                "Vestas Wind Systems A/S",
                "C-VESTAS",
                Some(b(year, week)),
            )
            .event("0009299APPR", &format!("{year}-03-01"));
    }
    out.push(sets.build("applicant_changes", vec![Expectation::ApplicantSets(6)]));

    out.push(
        ScenarioBuilder::new(8005567, 189424, "2008-03-26", 850_000_000)
            .publication("A1", 2009, 39)
            .event("0009012", "2008-06-02")
            .event(FIRST_EXAMINATION_CODE, "2008-11-14")
            .event(FIRST_EXAMINATION_CODE, "2009-04-01")
            .build("examination_lag", vec![Expectation::DaysToExam(233)]),
    );

    let agent = "Strehl Schübel-Hopf & Partner";
    out.push(
        ScenarioBuilder::new(100008, 15706408, "2000-01-14", 860_000_000)
            .publication("A2", 2000, 30)
            .publication("A3", 2000, 45)
            .publication("B1", 2004, 12)
            .party(PartyType::Representative, 1, 1, agent, "R-STREHL", Some(b(2000, 30)))
            .party(PartyType::Representative, 2, 1, "Hoffmann Eitle", "R-HE", Some(b(2003, 8)))
            .party(PartyType::Applicant, 1, 1, "Enercon GmbH", "C-ENERCON", Some(b(2000, 30)))
            .build(
                "first_agent",
                vec![Expectation::FirstRepresentative {
                    bulletin: b(2000, 30),
                    name: agent.into(),
                }],
            ),
    );

    out.push(
        ScenarioBuilder::new(3711857, 16039187, "2002-05-08", 870_000_000)
            .publication("A1", 2003, 46)
            .publication("B1", 2013, 3)
            .event("0008299OPPO", "2013-08-12")
            .event("0008299OPPO", "2013-09-30")
            .event("0008299OPPO", "2013-10-15")
            .event("0009012", "2013-11-01")
            .build("opposition_events", vec![Expectation::ValidityChallenges(3)]),
    );

    // 33 distinct countries, three of them paid twice.
    let validated: Vec<&str> = EPC_STATES[..33].to_vec();
    out.push(
        ScenarioBuilder::new(8001625, 16417372, "2005-09-21", 880_000_000)
            .publication("A1", 2007, 13)
            .publication("B1", 2011, 50)
            .pgfp(&validated, 2014)
            .pgfp(&validated[..3], 2015)
            .build("validated_states", vec![Expectation::ValidatedStates(33)]),
    );

    let name = "Neuhäuser GmbH";
    out.push(
        ScenarioBuilder::new(4400001, 44000001, "2006-07-04", 890_000_000)
            .publication("A1", 2008, 2)
            .party(PartyType::Applicant, 1, 1, name, "C-NEUH", Some(b(2008, 2)))
            .steps(&["PFEE", "LOPR", "RFEE", "EXAM"], 57)
            .build(
                "procedural_steps",
                vec![Expectation::AvgProcSteps {
                    name: name.into(),
                    avg: Hundredths(5700),
                }],
            ),
    );

    out
}

/// Two bulletins in one year, week 5 and week 30, each with its own
/// representative. Numeric ordering picks week 5; string concatenation
/// ("20015" vs "200130") picks week 30.
pub fn bulletin_ordering_scenario() -> ScenarioSpec {
    let b = Bulletin::new;
    ScenarioBuilder::new(4400002, 44000002, "2000-02-01", 895_000_000)
        .publication("A1", 2001, 5)
        .publication("A3", 2001, 30)
        .party(PartyType::Representative, 1, 1, "Early Agent", "R-E", Some(b(2001, 5)))
        .party(PartyType::Representative, 2, 1, "Late Agent", "R-L", Some(b(2001, 30)))
        .build(
            "bulletin_ordering",
            vec![Expectation::FirstRepresentative {
                bulletin: b(2001, 5),
                name: "Early Agent".into(),
            }],
        )
}
