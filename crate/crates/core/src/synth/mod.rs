//! Deterministic fixture generation.
//!
//! The random source is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(config.seed)`; all draws go through `rand` 0.9 uniform
//! sampling, so a given config produces the same dataset on every platform.
//!
//! Id ranges used by the generator (scenario fixtures stay below them):
//!
//! | what                          | range            |
//! |-------------------------------|------------------|
//! | register `id`                 | `20_000_000 + i` |
//! | linked core `appln_id`        | `500_000_000 + i`|
//! | core-only `appln_id`          | `600_000_000 + j`|
//! | core `pat_publn_id`           | `700_000_000 + k`|
//! | cited publications            | `1..=30_000`     |

pub mod mutations;
mod scenarios;

use std::collections::{BTreeMap, HashSet};

use chrono::{Datelike, Duration, NaiveDate};
use patreg_model::*;
use rand::seq::{index, IndexedRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use scenarios::*;

/// Contracting states of the European Patent Convention (38).
pub const EPC_STATES: [&str; 38] = [
    "AL", "AT", "BE", "BG", "CH", "CY", "CZ", "DE", "DK", "EE", "ES", "FI", "FR", "GB", "GR", "HR",
    "HU", "IE", "IS", "IT", "LI", "LT", "LU", "LV", "MC", "MK", "MT", "NL", "NO", "PL", "PT", "RO",
    "RS", "SE", "SI", "SK", "SM", "TR",
];

pub const REGISTER_ID_BASE: u64 = 20_000_000;
pub const LINKED_APPLN_ID_BASE: u64 = 500_000_000;
pub const CORE_ONLY_APPLN_ID_BASE: u64 = 600_000_000;
pub const PUBLN_ID_BASE: u64 = 700_000_000;
pub const ORPHAN_ID_BASE: u64 = 990_000_000;

const APPLICANTS: [&str; 15] = [
    "Vestas Wind Systems A/S",
    "Siemens Aktiengesellschaft",
    "General Electric Company",
    "Enercon GmbH",
    "Nordex Energy GmbH",
    "Gamesa Innovation & Technology, S.L.",
    "Wobben, Aloys",
    "Mitsubishi Heavy Industries, Ltd.",
    "LM Glasfiber A/S",
    "Senvion SE",
    "Suzlon Energy GmbH",
    "Hitachi, Ltd.",
    "Envision Energy (Denmark) ApS",
    "ABB Research Ltd",
    "Sørensen \"Windpower\" ApS",
];

const INVENTORS: [&str; 8] = [
    "Hansen, Jens",
    "Müller, Klaus",
    "Smith, John",
    "García, Ana",
    "Tanaka, Hiroshi",
    "Rossi, Marco",
    "Nielsen, Peter",
    "Dubois, Claire",
];

const REPRESENTATIVES: [&str; 7] = [
    "Zacco Denmark A/S",
    "Plougmann & Vingtoft A/S",
    "Hoffmann Eitle",
    "Grünecker Patent- und Rechtsanwälte",
    "Bardehle Pagenberg",
    "Maiwald Patentanwalts GmbH",
    "Cabinet Beau de Loménie",
];

const WIND_IPC: [&str; 4] = ["F03D   1/06", "F03D   7/02", "F03D  11/00", "F03D   9/00"];
const OTHER_IPC: [&str; 5] = ["F03B  13/26", "H02K   7/18", "F16H   1/28", "H02J   3/38", "B64C  27/46"];

const NOISE_EVENTS: [&str; 6] = [
    "0009012",
    "0009015",
    "0009199SEPU",
    "EPIDOSNIGR1",
    "EPIDOSNISR",
    "EPIDOSNRFE2",
];
/// Synthetic change-of-applicant codes; all end with `APPR`.
pub const SYNTHETIC_APPR_CODES: [&str; 4] = ["0009299APPR", "EPIDOSCAPPR", "EPIDOSNAPPR", "0008399APPR"];
const OPPOSITION_CODES: [&str; 2] = ["0008299OPPO", "0009260"];
const REVOCATION_CODES: [&str; 4] = ["EPIDOSCRVR1", "EPIDOSCRVR6", "EPIDOSNRVR1", "EPIDOSNRVR6"];
const LIMITATION_CODES: [&str; 2] = ["EPIDOSCLIM1", "EPIDOSNLIM1"];
const STEP_CODES: [&str; 10] = [
    "PFEE", "LOPR", "RFEE", "EXAM", "ABEX", "IGRA", "ISAT", "PMAP", "DOBS", "RAEX",
];
const OTHER_PRS: [&str; 4] = ["PG25", "REG", "26N", "PLFP"];
const OTHER_AUTHORITIES: [&str; 4] = ["US", "DE", "JP", "WO"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("scenario {scenario:?} collides on {key}")]
    Collision { scenario: String, key: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_applications: usize,
    /// Filing years, inclusive.
    pub year_from: i32,
    pub year_to: i32,
    /// Register applications that never entered the regional phase
    /// (`appln_id = 0`).
    pub p_unlinked: f64,
    /// Extra core applications without a register row, as a share of
    /// `n_applications`.
    pub core_only_share: f64,
    pub p_wind_ipc: f64,
    pub p_citations: f64,
    pub p_license: f64,
    pub p_examination: f64,
    /// Grant probability once examined.
    pub p_grant: f64,
    /// Opposition probability once granted.
    pub p_opposition: f64,
    pub p_transfer: f64,
    /// PGFP rows probability once granted and linked.
    pub p_pgfp: f64,
    pub states: Vec<String>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_applications: 100,
            year_from: 1998,
            year_to: 2012,
            p_unlinked: 0.30,
            core_only_share: 0.10,
            p_wind_ipc: 0.5,
            p_citations: 0.7,
            p_license: 0.08,
            p_examination: 0.8,
            p_grant: 0.6,
            p_opposition: 0.1,
            p_transfer: 0.3,
            p_pgfp: 0.8,
            states: EPC_STATES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl GeneratorConfig {
    pub fn new(seed: u64, n_applications: usize) -> Self {
        Self {
            seed,
            n_applications,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        let probs = [
            ("p_unlinked", self.p_unlinked),
            ("core_only_share", self.core_only_share),
            ("p_wind_ipc", self.p_wind_ipc),
            ("p_citations", self.p_citations),
            ("p_license", self.p_license),
            ("p_examination", self.p_examination),
            ("p_grant", self.p_grant),
            ("p_opposition", self.p_opposition),
            ("p_transfer", self.p_transfer),
            ("p_pgfp", self.p_pgfp),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not in [0, 1]"));
            }
        }
        if self.states.is_empty() || self.states.len() > EPC_STATES.len() {
            return bad(format!(
                "state list must hold 1..={} codes, got {}",
                EPC_STATES.len(),
                self.states.len()
            ));
        }
        if let Some(s) = self.states.iter().find(|s| !is_country_code(s)) {
            return bad(format!("state {s:?} is not a country code"));
        }
        if self.states.iter().collect::<HashSet<_>>().len() != self.states.len() {
            return bad("state list has duplicates".into());
        }
        if self.year_from > self.year_to || self.year_from < 1978 || self.year_to > 2080 {
            return bad(format!(
                "filing years {}..={} must be ordered and within 1978..=2080",
                self.year_from, self.year_to
            ));
        }
        Ok(())
    }
}

fn bulletin_of(d: NaiveDate) -> Bulletin {
    let w = d.iso_week();
    Bulletin::new(w.year() as u16, w.week() as u8)
}

struct Generator<'a> {
    cfg: &'a GeneratorConfig,
    rng: ChaCha8Rng,
    ds: Dataset,
    next_publn: u64,
}

impl Generator<'_> {
    fn days(&mut self, lo: i64, hi: i64) -> Duration {
        Duration::days(self.rng.random_range(lo..=hi))
    }

    fn pick<'s>(&mut self, from: &'s [&'s str]) -> &'s str {
        from.choose(&mut self.rng).expect("non-empty vocabulary")
    }

    fn sample_states(&mut self, k: usize) -> Vec<String> {
        let n = self.cfg.states.len();
        index::sample(&mut self.rng, n, k.min(n))
            .into_iter()
            .map(|i| self.cfg.states[i].clone())
            .collect()
    }

    fn filing_date(&mut self) -> NaiveDate {
        let start = NaiveDate::from_ymd_opt(self.cfg.year_from, 1, 1).unwrap();
        let end = NaiveDate::from_ymd_opt(self.cfg.year_to, 12, 31).unwrap();
        let span = (end - start).num_days();
        start + self.days(0, span)
    }

    fn ipc(&mut self, appln_id: ApplnId) {
        let n = self.rng.random_range(1..=3);
        for i in 0..n {
            let symbol = if i == 0 && self.rng.random_bool(self.cfg.p_wind_ipc) {
                self.pick(&WIND_IPC)
            } else if self.rng.random_bool(0.2) {
                self.pick(&WIND_IPC)
            } else {
                self.pick(&OTHER_IPC)
            };
            self.ds.ipc.push(IpcAssignment {
                appln_id,
                ipc_class_symbol: symbol.to_string(),
            });
        }
    }

    fn core_publications(&mut self, appln_id: ApplnId) {
        let n = self.rng.random_range(1..=3);
        let with_citations = self.rng.random_bool(self.cfg.p_citations);
        let mut cited_so_far: Vec<u64> = Vec::new();
        for _ in 0..n {
            let pat_publn_id = PublnId(PUBLN_ID_BASE + self.next_publn);
            self.next_publn += 1;
            self.ds.core_publications.push(CorePublication {
                pat_publn_id,
                appln_id,
            });
            if !with_citations {
                continue;
            }
            let k = self.rng.random_range(0..=12u32);
            for seq in 1..=k {
                let cited = match cited_so_far.choose(&mut self.rng) {
                    Some(&prev) if self.rng.random_bool(0.25) => prev,
                    _ => self.rng.random_range(1..=30_000u64),
                };
                cited_so_far.push(cited);
                self.ds.citations.push(Citation {
                    pat_publn_id,
                    cited_pat_publn_id: PublnId(cited),
                    pat_citn_seq_nr: seq,
                });
            }
            if self.rng.random_bool(0.15) {
                self.ds.citations.push(Citation {
                    pat_publn_id,
                    cited_pat_publn_id: PublnId(self.rng.random_range(1..=30_000u64)),
                    pat_citn_seq_nr: 0,
                });
            }
        }
    }

    fn event(&mut self, id: RegId, code: &str, date: NaiveDate) {
        self.ds.events.push(RegisterEvent {
            id,
            event_code: code.to_string(),
            event_date: date,
        });
    }

    fn publication(&mut self, id: RegId, kind: &str, bulletin: Bulletin) {
        self.ds.publications.push(RegisterPublication {
            id,
            publn_kind: kind.to_string(),
            bulletin,
        });
    }

    #[allow(clippy::too_many_arguments)]
    fn party(
        &mut self,
        id: RegId,
        party_type: PartyType,
        set_seq_nr: u32,
        seq_nr: u32,
        name: &str,
        customer_id: String,
        bulletin: Option<Bulletin>,
    ) {
        self.ds.parties.push(Party {
            id,
            party_type,
            seq_nr,
            set_seq_nr,
            is_latest: false,
            name: name.to_string(),
            customer_id,
            bulletin,
        });
    }

    fn application(&mut self, i: usize) {
        let id = RegId(REGISTER_ID_BASE + i as u64);
        let filed = self.filing_date();
        let linked = !self.rng.random_bool(self.cfg.p_unlinked);
        let appln_id = if linked {
            ApplnId(LINKED_APPLN_ID_BASE + i as u64)
        } else {
            ApplnId::UNLINKED
        };

        if linked {
            let kind = match self.rng.random_range(0..20) {
                0 => "T",
                1..=4 => "W",
                _ => "A",
            };
            self.ds.core_applications.push(CoreApplication {
                appln_id,
                appln_auth: "EP".into(),
                appln_kind: kind.into(),
                appln_filing_date: filed,
            });
            self.ipc(appln_id);
            self.core_publications(appln_id);
        }

        // Lifecycle: publication -> examination -> grant -> post-grant.
        let published = filed + self.days(400, 600);
        let first_bulletin = bulletin_of(published);
        let first_kind = if self.rng.random_bool(0.6) { "A1" } else { "A2" };
        self.publication(id, first_kind, first_bulletin);
        if first_kind == "A2" && self.rng.random_bool(0.5) {
            let search = published + self.days(14, 200);
            self.publication(id, "A3", bulletin_of(search));
        }

        let mut status = "The application has been published";
        let mut granted_on = None;
        if self.rng.random_bool(self.cfg.p_examination) {
            let exam = filed + self.days(120, 900);
            self.event(id, FIRST_EXAMINATION_CODE, exam);
            if self.rng.random_bool(0.03) {
                let again = exam + self.days(30, 400);
                self.event(id, FIRST_EXAMINATION_CODE, again);
            }
            status = "Examination is in progress";
            if self.rng.random_bool(self.cfg.p_grant) {
                let grant = exam.max(published) + self.days(200, 1500);
                self.publication(id, "B1", bulletin_of(grant));
                granted_on = Some(grant);
                status = "The patent has been granted";
            } else if self.rng.random_bool(0.5) {
                status = "The application is deemed to be withdrawn";
            }
        }

        for _ in 0..self.rng.random_range(0..=4) {
            let code = self.pick(&NOISE_EVENTS);
            let date = filed + self.days(0, 1500);
            self.event(id, code, date);
        }

        if let Some(grant) = granted_on {
            if self.rng.random_bool(self.cfg.p_opposition) {
                for _ in 0..self.rng.random_range(1..=3) {
                    let code = self.pick(&OPPOSITION_CODES);
                    let date = grant + self.days(30, 270);
                    self.event(id, code, date);
                }
                status = "Opposition filed";
                if self.rng.random_bool(0.4) {
                    let amended = grant + self.days(600, 1500);
                    self.publication(id, "B2", bulletin_of(amended));
                    status = "Patent maintained as amended";
                } else if self.rng.random_bool(0.3) {
                    status = "Patent revoked";
                }
            }
            if self.rng.random_bool(0.03) {
                let code = self.pick(&LIMITATION_CODES);
                let date = grant + self.days(300, 1200);
                self.event(id, code, date);
                if self.rng.random_bool(0.5) {
                    let published = date + self.days(90, 400);
                    self.publication(id, "B3", bulletin_of(published));
                }
            }
            if self.rng.random_bool(0.01) {
                let code = self.pick(&REVOCATION_CODES);
                let date = grant + self.days(300, 1200);
                self.event(id, code, date);
            }
        }

        self.ds.applications.push(RegisterApplication {
            id,
            appln_id,
            appln_filing_date: filed,
            status: status.to_string(),
        });

        self.parties(id, filed, first_bulletin);

        for _ in 0..self.rng.random_range(0..=20) {
            let code = self.pick(&STEP_CODES);
            self.ds.procedure_steps.push(ProcedureStep {
                id,
                step_code: code.to_string(),
            });
        }

        let k = self.rng.random_range(1..=12);
        let designated = self.sample_states(k);
        for country in &designated {
            self.ds.designated_states.push(DesignatedState {
                id,
                country: country.clone(),
            });
        }

        if self.rng.random_bool(self.cfg.p_license) {
            self.licences(id, published);
        }

        if linked {
            if let Some(grant) = granted_on {
                if self.rng.random_bool(self.cfg.p_pgfp) {
                    self.pgfp(appln_id, &designated, grant);
                }
            }
            for _ in 0..self.rng.random_range(0..=2) {
                let code = self.pick(&OTHER_PRS);
                let country = if self.rng.random_bool(0.5) {
                    Some(self.sample_states(1).remove(0))
                } else {
                    None
                };
                self.ds.legal_status.push(LegalStatusEvent {
                    appln_id,
                    prs_code: code.to_string(),
                    country,
                    fee_payment_year: None,
                });
            }
        }
    }

    fn parties(&mut self, id: RegId, filed: NaiveDate, first_bulletin: Bulletin) {
        let start = self.ds.parties.len();

        let n_sets = if self.rng.random_bool(self.cfg.p_transfer) {
            self.rng.random_range(2..=6)
        } else {
            1
        };
        let mut when = filed + Duration::days(450);
        let mut names: Vec<usize> = Vec::new();
        for set in 1..=n_sets {
            let bulletin = if set == 1 {
                first_bulletin
            } else {
                when = when + self.days(60, 700);
                if self.rng.random_bool(0.6) {
                    let code = self.pick(&SYNTHETIC_APPR_CODES);
                    self.event(id, code, when);
                }
                bulletin_of(when)
            };
            // A new set either swaps one applicant or replaces them all.
            if names.is_empty() || self.rng.random_bool(0.5) {
                let k = self.rng.random_range(1..=3);
                names = index::sample(&mut self.rng, APPLICANTS.len(), k).into_vec();
            } else {
                let slot = self.rng.random_range(0..names.len());
                names[slot] = self.rng.random_range(0..APPLICANTS.len());
                names.sort_unstable();
                names.dedup();
            }
            for (seq, &n) in names.clone().iter().enumerate() {
                let customer_id = if self.rng.random_bool(0.15) {
                    format!("C{:04}-{}", n, set)
                } else {
                    format!("C{:04}", n)
                };
                self.party(
                    id,
                    PartyType::Applicant,
                    set,
                    seq as u32 + 1,
                    APPLICANTS[n],
                    customer_id,
                    Some(bulletin),
                );
            }
        }

        for seq in 1..=self.rng.random_range(1..=3u32) {
            let name = self.pick(&INVENTORS);
            self.party(id, PartyType::Inventor, 1, seq, name, String::new(), Some(first_bulletin));
        }

        if self.rng.random_bool(0.92) {
            let k = if self.rng.random_bool(0.1) { 2 } else { 1 };
            for seq in 1..=k {
                let name = self.pick(&REPRESENTATIVES);
                let cust = format!("R{}", name.len());
                self.party(id, PartyType::Representative, 1, seq, name, cust, Some(first_bulletin));
            }
            if self.rng.random_bool(0.1) {
                let name = self.pick(&REPRESENTATIVES);
                let bulletin = if self.rng.random_bool(0.3) {
                    None
                } else {
                    Some(bulletin_of(filed + self.days(700, 2000)))
                };
                self.party(id, PartyType::Representative, 2, 1, name, String::new(), bulletin);
            }
        }

        mark_latest(&mut self.ds.parties[start..]);
    }

    fn licences(&mut self, id: RegId, after: NaiveDate) {
        for seq in 1..=self.rng.random_range(1..=3u32) {
            let all = self.rng.random_bool(0.25);
            let type_license = match self.rng.random_range(0..3) {
                0 => LicenseType::Exclusive,
                1 => LicenseType::NonExclusive,
                _ => LicenseType::RightInRem,
            };
            self.ds.licensees.push(Licensee {
                id,
                licensee_seq_nr: seq,
                type_license,
                designation: if all { Designation::All } else { Designation::AsIndicated },
            });
            if all {
                continue;
            }
            let k = self.rng.random_range(1..=self.cfg.states.len());
            let bulletin = bulletin_of(after + self.days(30, 2000));
            for country in self.sample_states(k) {
                self.ds.licensee_states.push(LicenseeState {
                    id,
                    licensee_seq_nr: seq,
                    licensee_country: country,
                    bulletin,
                });
            }
        }
    }

    fn pgfp(&mut self, appln_id: ApplnId, designated: &[String], grant: NaiveDate) {
        let k = self.rng.random_range(1..=designated.len());
        let chosen: Vec<String> = index::sample(&mut self.rng, designated.len(), k)
            .into_iter()
            .map(|i| designated[i].clone())
            .collect();
        for country in chosen {
            let year = grant.year() as u16 + self.rng.random_range(2..=8);
            let copies = if self.rng.random_bool(0.1) { 2 } else { 1 };
            for c in 0..copies {
                self.ds.legal_status.push(LegalStatusEvent {
                    appln_id,
                    prs_code: PGFP.into(),
                    country: Some(country.clone()),
                    fee_payment_year: Some(year - c),
                });
            }
        }
    }

    fn core_only(&mut self, j: usize) {
        let appln_id = ApplnId(CORE_ONLY_APPLN_ID_BASE + j as u64);
        let auth = if self.rng.random_bool(0.5) {
            "EP"
        } else {
            self.pick(&OTHER_AUTHORITIES)
        };
        let kind = if self.rng.random_bool(0.8) { "A" } else { "U" };
        let filed = self.filing_date();
        self.ds.core_applications.push(CoreApplication {
            appln_id,
            appln_auth: auth.into(),
            appln_kind: kind.into(),
            appln_filing_date: filed,
        });
        self.ipc(appln_id);
        self.core_publications(appln_id);
    }
}

/// Sets `is_latest` on exactly the rows carrying the maximal `set_seq_nr`
/// of their `(id, type)` group.
pub fn mark_latest(parties: &mut [Party]) {
    let mut max: BTreeMap<(RegId, PartyType), u32> = BTreeMap::new();
    for p in parties.iter() {
        let e = max.entry((p.id, p.party_type)).or_insert(0);
        *e = (*e).max(p.set_seq_nr);
    }
    for p in parties.iter_mut() {
        p.is_latest = max[&(p.id, p.party_type)] == p.set_seq_nr;
    }
}

/// Generates a schema-consistent dataset. Pure function of `config`.
pub fn generate_fixture(config: &GeneratorConfig) -> Result<Dataset, SynthError> {
    config.validate()?;
    let mut g = Generator {
        cfg: config,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        ds: Dataset::default(),
        next_publn: 0,
    };
    for i in 0..config.n_applications {
        g.application(i);
    }
    let core_only = (config.n_applications as f64 * config.core_only_share).round() as usize;
    for j in 0..core_only {
        g.core_only(j);
    }
    Ok(g.ds)
}

/// Appends scenario rows to `dataset`, refusing any key collision.
pub fn embed_scenarios(mut dataset: Dataset, specs: &[ScenarioSpec]) -> Result<Dataset, SynthError> {
    let mut reg: HashSet<RegId> = dataset.applications.iter().map(|a| a.id).collect();
    let mut appln: HashSet<ApplnId> = dataset
        .applications
        .iter()
        .map(|a| a.appln_id)
        .chain(dataset.core_applications.iter().map(|a| a.appln_id))
        .filter(|a| a.is_linked())
        .collect();
    let mut publn: HashSet<PublnId> = dataset
        .core_publications
        .iter()
        .map(|p| p.pat_publn_id)
        .collect();
    for spec in specs {
        let collision = |key: String| SynthError::Collision {
            scenario: spec.name.clone(),
            key,
        };
        let rows = &spec.rows;
        let spec_reg: HashSet<RegId> = rows.applications.iter().map(|a| a.id).collect();
        let spec_appln: HashSet<ApplnId> = rows
            .applications
            .iter()
            .map(|a| a.appln_id)
            .chain(rows.core_applications.iter().map(|a| a.appln_id))
            .filter(|a| a.is_linked())
            .collect();
        if let Some(id) = spec_reg.iter().find(|id| reg.contains(id)) {
            return Err(collision(format!("register id {id}")));
        }
        if let Some(a) = spec_appln.iter().find(|a| appln.contains(a)) {
            return Err(collision(format!("appln_id {a}")));
        }
        if let Some(p) = rows
            .core_publications
            .iter()
            .find(|p| publn.contains(&p.pat_publn_id))
        {
            return Err(collision(format!("pat_publn_id {}", p.pat_publn_id)));
        }
        reg.extend(spec_reg);
        appln.extend(spec_appln);
        publn.extend(rows.core_publications.iter().map(|p| p.pat_publn_id));
        dataset.extend(rows.clone());
    }
    Ok(dataset)
}

/// Adds orphan rows (children whose parent does not exist). Returns the
/// number planted per table.
pub fn plant_orphans(
    dataset: &mut Dataset,
    plan: &[(Table, usize)],
    seed: u64,
) -> BTreeMap<Table, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ledger = BTreeMap::new();
    let date = NaiveDate::from_ymd_opt(2005, 6, 1).unwrap();
    let mut next = ORPHAN_ID_BASE;
    for &(table, count) in plan {
        for _ in 0..count {
            next += 1;
            let id = RegId(next);
            match table {
                Table::Reg101Appln => dataset.applications.push(RegisterApplication {
                    id,
                    appln_id: ApplnId(next),
                    appln_filing_date: date,
                    status: String::new(),
                }),
                Table::Reg102PatPubln => dataset.publications.push(RegisterPublication {
                    id,
                    publn_kind: "A1".into(),
                    bulletin: Bulletin::new(2006, rng.random_range(1..=52)),
                }),
                Table::Reg107Parties => dataset.parties.push(Party {
                    id,
                    party_type: PartyType::Inventor,
                    seq_nr: 1,
                    set_seq_nr: 1,
                    is_latest: true,
                    name: INVENTORS.choose(&mut rng).unwrap().to_string(),
                    customer_id: String::new(),
                    bulletin: None,
                }),
                Table::Reg109DesignStates => dataset.designated_states.push(DesignatedState {
                    id,
                    country: EPC_STATES.choose(&mut rng).unwrap().to_string(),
                }),
                Table::Reg111Licensee => dataset.licensees.push(Licensee {
                    id,
                    licensee_seq_nr: 1,
                    type_license: LicenseType::Exclusive,
                    designation: Designation::All,
                }),
                Table::Reg112LicenseeStates => dataset.licensee_states.push(LicenseeState {
                    id,
                    licensee_seq_nr: 1,
                    licensee_country: EPC_STATES.choose(&mut rng).unwrap().to_string(),
                    bulletin: Bulletin::new(2008, 8),
                }),
                Table::Reg201ProcStep => dataset.procedure_steps.push(ProcedureStep {
                    id,
                    step_code: STEP_CODES.choose(&mut rng).unwrap().to_string(),
                }),
                Table::Reg301EventData => dataset.events.push(RegisterEvent {
                    id,
                    event_code: NOISE_EVENTS.choose(&mut rng).unwrap().to_string(),
                    event_date: date,
                }),
                Table::Tls212Citation => dataset.citations.push(Citation {
                    pat_publn_id: PublnId(next),
                    cited_pat_publn_id: PublnId(rng.random_range(1..=30_000)),
                    pat_citn_seq_nr: 1,
                }),
                other => panic!("orphans cannot be planted in {other}"),
            }
        }
        *ledger.entry(table).or_insert(0) += count;
    }
    ledger
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_fixture() {
        let ds = generate_fixture(&GeneratorConfig::new(1, 0)).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn same_seed_same_dataset() {
        let a = generate_fixture(&GeneratorConfig::new(9, 50)).unwrap();
        let b = generate_fixture(&GeneratorConfig::new(9, 50)).unwrap();
        let c = generate_fixture(&GeneratorConfig::new(10, 50)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn config_validation() {
        let mut cfg = GeneratorConfig::default();
        cfg.p_license = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = GeneratorConfig::default();
        cfg.states.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = GeneratorConfig::default();
        cfg.states.push("XX".into());
        assert!(cfg.validate().is_err());
        let mut cfg = GeneratorConfig::default();
        cfg.states = vec!["DE".into(), "DE".into()];
        assert!(cfg.validate().is_err());
        assert!(GeneratorConfig::default().validate().is_ok());
    }

    #[test]
    fn latest_flags_follow_max_set() {
        let ds = generate_fixture(&GeneratorConfig::new(3, 200)).unwrap();
        assert!(validate::inconsistent_latest_flags(&ds.parties).is_empty());
    }

    #[test]
    fn lifecycle_is_coherent() {
        let ds = generate_fixture(&GeneratorConfig::new(11, 400)).unwrap();
        let filed: BTreeMap<RegId, NaiveDate> = ds
            .applications
            .iter()
            .map(|a| (a.id, a.appln_filing_date))
            .collect();
        for e in &ds.events {
            assert!(e.event_date >= filed[&e.id], "{e:?}");
        }
        for p in &ds.publications {
            assert!(p.bulletin >= bulletin_of(filed[&p.id]), "{p:?}");
        }
        let challenges = default_challenge_codes();
        for a in &ds.applications {
            let b_bulletin = ds
                .publications
                .iter()
                .filter(|p| p.id == a.id && p.publn_kind == "B1")
                .map(|p| p.bulletin)
                .min();
            let later_b = ds
                .publications
                .iter()
                .any(|p| p.id == a.id && matches!(p.publn_kind.as_str(), "B2" | "B3"));
            if later_b {
                assert!(b_bulletin.is_some());
            }
            for e in ds.events.iter().filter(|e| e.id == a.id) {
                if challenges.contains(&e.event_code) {
                    let granted = b_bulletin.expect("challenge without grant");
                    assert!(bulletin_of(e.event_date) >= granted);
                }
            }
        }
    }

    #[test]
    fn orphans_are_counted() {
        let mut ds = Dataset::default();
        let ledger = plant_orphans(
            &mut ds,
            &[(Table::Reg107Parties, 2), (Table::Tls212Citation, 1)],
            5,
        );
        assert_eq!(ds.parties.len(), 2);
        assert_eq!(ds.citations.len(), 1);
        assert_eq!(ledger[&Table::Reg107Parties], 2);
    }
}
