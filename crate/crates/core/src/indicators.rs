//! Cohort selection and the indicator pipeline over an [`IndexedStore`].
//!
//! Every indicator works on the linked part of a cohort (members with a
//! register row); unlinked members show up in [`Cohort::skipped`]. Result
//! orders are total: counts sort by value descending then `id` ascending,
//! lags by days ascending then `id`, set-valued indicators by `id`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::Datelike;
use log::warn;
use patreg_model::*;

use crate::store::IndexedStore;

/// Core applications matching `spec`, ascending by `appln_id`, each resolved
/// to its register row when one exists.
pub fn select_cohort(store: &IndexedStore, spec: &CohortSpec) -> Cohort {
    let candidates: BTreeSet<ApplnId> = store
        .ipc_with_prefix(spec.ipc_prefix())
        .into_iter()
        .map(|r| r.appln_id)
        .collect();
    let members = candidates
        .into_iter()
        .filter(|&appln_id| {
            store.core_application(appln_id).is_some_and(|a| {
                let year = a.appln_filing_date.year();
                a.appln_auth == spec.authority()
                    && spec.kinds().contains(&a.appln_kind)
                    && (spec.year_from()..=spec.year_to()).contains(&year)
            })
        })
        .map(|appln_id| CohortMember {
            appln_id,
            id: store
                .register_for_core(appln_id)
                .ok()
                .flatten()
                .map(|a| a.id),
        })
        .collect();
    Cohort { members }
}

fn by_value_desc<V: Ord>(rows: &mut [IndicatorRow<V>]) {
    rows.sort_by(|a, b| b.value.cmp(&a.value).then(a.id.cmp(&b.id)));
}

fn by_id<V>(rows: &mut [IndicatorRow<V>]) {
    rows.sort_by_key(|r| r.id);
}

/// Builds one row per linked member, dropping zero rows in paper-compat
/// mode.
fn per_member<V>(
    cohort: &Cohort,
    mode: OutputMode,
    is_zero: impl Fn(&V) -> bool,
    value: impl Fn(RegId, ApplnId) -> V,
) -> Vec<IndicatorRow<V>> {
    cohort
        .linked()
        .map(|(id, appln_id)| IndicatorRow::new(id, appln_id, value(id, appln_id)))
        .filter(|r| mode == OutputMode::Default || !is_zero(&r.value))
        .collect()
}

/// Distinct cited publications over all patent citations (`seq_nr > 0`)
/// made by the application's core publications.
pub fn backward_citation_count(
    store: &IndexedStore,
    cohort: &Cohort,
    mode: OutputMode,
) -> Vec<IndicatorRow<u64>> {
    let mut rows = per_member(cohort, mode, |v| *v == 0, |_, appln_id| {
        let cited: HashSet<PublnId> = store
            .core_publications(appln_id)
            .flat_map(|p| store.citations(p.pat_publn_id))
            .filter(|c| c.pat_citn_seq_nr > 0)
            .map(|c| c.cited_pat_publn_id)
            .collect();
        cited.len() as u64
    });
    by_value_desc(&mut rows);
    rows
}

/// Distinct licensee countries. Licences designating all states are
/// flagged but not expanded into the count.
pub fn license_country_coverage(
    store: &IndexedStore,
    cohort: &Cohort,
    mode: OutputMode,
) -> Vec<IndicatorRow<LicenseCoverage>> {
    let mut rows = per_member(
        cohort,
        mode,
        |v: &LicenseCoverage| v.nb_lic_ctry == 0,
        |id, _| {
            let countries: HashSet<&str> = store
                .licensee_states(id)
                .map(|s| s.licensee_country.as_str())
                .collect();
            LicenseCoverage {
                nb_lic_ctry: countries.len() as u64,
                has_all_designation: store
                    .licensees(id)
                    .any(|l| l.designation == Designation::All),
            }
        },
    );
    rows.sort_by(|a, b| {
        b.value
            .nb_lic_ctry
            .cmp(&a.value.nb_lic_ctry)
            .then(a.id.cmp(&b.id))
    });
    rows
}

fn max_applicant_set(store: &IndexedStore, id: RegId) -> u32 {
    store
        .parties(id)
        .filter(|p| p.party_type == PartyType::Applicant)
        .map(|p| p.set_seq_nr)
        .max()
        .unwrap_or(0)
}

/// Highest applicant `set_seq_nr`; 0 when no applicant rows exist.
pub fn applicant_set_count(
    store: &IndexedStore,
    cohort: &Cohort,
    mode: OutputMode,
) -> Vec<IndicatorRow<u32>> {
    let mut rows = per_member(cohort, mode, |v| *v == 0, |id, _| max_applicant_set(store, id));
    by_value_desc(&mut rows);
    rows
}

fn appr_matches(rule: &ApprRule, code: &str) -> bool {
    match rule {
        ApprRule::Suffix(suffix) => code.ends_with(suffix.as_str()),
        ApprRule::Codes(codes) => codes.contains(code),
    }
}

/// Signals of ownership transfer: applicant sets, distinct applicant
/// customer ids and change-of-applicant events.
pub fn transfer_signals(
    store: &IndexedStore,
    cohort: &Cohort,
    appr_rule: &ApprRule,
    mode: OutputMode,
) -> Vec<IndicatorRow<TransferSignals>> {
    let mut rows = per_member(
        cohort,
        mode,
        |v: &TransferSignals| {
            v.n_applicant_sets == 0 && v.n_distinct_customer_ids == 0 && v.n_appr_events == 0
        },
        |id, _| {
            let customers: HashSet<&str> = store
                .parties(id)
                .filter(|p| p.party_type == PartyType::Applicant && !p.customer_id.is_empty())
                .map(|p| p.customer_id.as_str())
                .collect();
            TransferSignals {
                n_applicant_sets: max_applicant_set(store, id),
                n_distinct_customer_ids: customers.len() as u64,
                n_appr_events: store
                    .events(id)
                    .filter(|e| appr_matches(appr_rule, &e.event_code))
                    .count() as u64,
            }
        },
    );
    by_id(&mut rows);
    rows
}

/// Days from filing to the earliest first-examination event. Applications
/// without that event are absent in every mode. Negative lags are kept and
/// logged.
pub fn days_to_first_examination(
    store: &IndexedStore,
    cohort: &Cohort,
) -> Vec<IndicatorRow<ExamLag>> {
    let mut rows: Vec<IndicatorRow<ExamLag>> = cohort
        .linked()
        .filter_map(|(id, appln_id)| {
            let app = store.application(id)?;
            let exam_date = store
                .events(id)
                .filter(|e| e.event_code == FIRST_EXAMINATION_CODE)
                .map(|e| e.event_date)
                .min()?;
            let days_to_exam = (exam_date - app.appln_filing_date).num_days();
            if days_to_exam < 0 {
                warn!("register id {id}: examination {exam_date} precedes filing {}", app.appln_filing_date);
            }
            Some(IndicatorRow::new(
                id,
                appln_id,
                ExamLag {
                    appln_filing_date: app.appln_filing_date,
                    exam_date,
                    days_to_exam,
                },
            ))
        })
        .collect();
    rows.sort_by(|a, b| {
        a.value
            .days_to_exam
            .cmp(&b.value.days_to_exam)
            .then(a.id.cmp(&b.id))
    });
    rows
}

/// Rows with a negative examination lag.
pub fn negative_lags(rows: &[IndicatorRow<ExamLag>]) -> impl Iterator<Item = &IndicatorRow<ExamLag>> {
    rows.iter().filter(|r| r.value.days_to_exam < 0)
}

fn concat_key(b: Bulletin) -> String {
    format!("{}{}", b.year, b.week)
}

/// Representatives listed in the application's first bulletin.
pub fn first_representative(
    store: &IndexedStore,
    cohort: &Cohort,
    ordering: BulletinOrdering,
) -> Vec<IndicatorRow<FirstRepresentative>> {
    let mut rows: Vec<IndicatorRow<FirstRepresentative>> = cohort
        .linked()
        .filter_map(|(id, appln_id)| {
            let bulletins = store.publications(id).map(|p| p.bulletin);
            let first = match ordering {
                BulletinOrdering::Numeric => bulletins.min()?,
                BulletinOrdering::PaperCompat => bulletins.min_by_key(|b| concat_key(*b))?,
            };
            let mut reps: Vec<&Party> = store
                .parties(id)
                .filter(|p| p.party_type == PartyType::Representative && p.bulletin == Some(first))
                .collect();
            if reps.is_empty() {
                return None;
            }
            reps.sort_by_key(|p| (p.set_seq_nr, p.seq_nr));
            Some(IndicatorRow::new(
                id,
                appln_id,
                FirstRepresentative {
                    bulletin: first,
                    names: reps.into_iter().map(|p| p.name.clone()).collect(),
                },
            ))
        })
        .collect();
    by_id(&mut rows);
    rows
}

/// Number of register events (rows, not distinct codes) whose code is in
/// `codes`.
pub fn validity_challenge_count(
    store: &IndexedStore,
    cohort: &Cohort,
    codes: &BTreeSet<String>,
    mode: OutputMode,
) -> Vec<IndicatorRow<u64>> {
    let mut rows = per_member(cohort, mode, |v| *v == 0, |id, _| {
        store
            .events(id)
            .filter(|e| codes.contains(&e.event_code))
            .count() as u64
    });
    by_value_desc(&mut rows);
    rows
}

/// Which of the B2 / B3 publication kinds the application has.
pub fn post_grant_amendment_kinds(
    store: &IndexedStore,
    cohort: &Cohort,
    mode: OutputMode,
) -> Vec<IndicatorRow<AmendmentKinds>> {
    let mut rows = per_member(cohort, mode, |v: &AmendmentKinds| v.is_empty(), |id, _| {
        let mut kinds = AmendmentKinds::default();
        for p in store.publications(id) {
            kinds.b2 |= p.publn_kind == KIND_B2;
            kinds.b3 |= p.publn_kind == KIND_B3;
        }
        kinds
    });
    by_id(&mut rows);
    rows
}

/// Distinct countries with a post-grant fee payment (PGFP) row.
pub fn validated_state_count(
    store: &IndexedStore,
    cohort: &Cohort,
    mode: OutputMode,
) -> Vec<IndicatorRow<u64>> {
    let mut rows = per_member(cohort, mode, |v| *v == 0, |_, appln_id| {
        let countries: HashSet<&str> = store
            .legal_status(appln_id)
            .filter(|e| e.prs_code == PGFP)
            .filter_map(|e| e.country.as_deref())
            .collect();
        countries.len() as u64
    });
    by_value_desc(&mut rows);
    rows
}

/// `numerator / denominator` rounded half away from zero to two decimals.
pub fn ratio_hundredths(numerator: u64, denominator: u64) -> Hundredths {
    assert!(denominator > 0, "empty group");
    let n = numerator as u128 * 200 + denominator as u128;
    Hundredths((n / (2 * denominator as u128)) as u64)
}

/// Average number of procedural steps per application, grouped by the
/// name of each latest applicant. Applications without steps do not
/// contribute.
pub fn avg_procedure_steps_by_applicant(
    store: &IndexedStore,
    cohort: &Cohort,
    counting: StepCounting,
) -> Vec<ApplicantAverage> {
    #[derive(Default)]
    struct Group {
        steps: u64,
        applications: BTreeSet<RegId>,
    }
    let mut groups: BTreeMap<&str, Group> = BTreeMap::new();
    for (id, _) in cohort.linked() {
        let steps = store.procedure_steps(id).count() as u64;
        if steps == 0 {
            continue;
        }
        for p in store
            .parties(id)
            .filter(|p| p.party_type == PartyType::Applicant && p.is_latest)
        {
            let g = groups.entry(p.name.as_str()).or_default();
            let first_for_application = g.applications.insert(id);
            match counting {
                StepCounting::PaperFaithful => g.steps += steps,
                StepCounting::Normalized if first_for_application => g.steps += steps,
                StepCounting::Normalized => {}
            }
        }
    }
    let mut rows: Vec<ApplicantAverage> = groups
        .into_iter()
        .map(|(name, g)| ApplicantAverage {
            name: name.to_string(),
            avg_proc_steps: ratio_hundredths(g.steps, g.applications.len() as u64),
        })
        .collect();
    rows.sort_by(|a, b| {
        b.avg_proc_steps
            .cmp(&a.avg_proc_steps)
            .then_with(|| a.name.cmp(&b.name))
    });
    rows
}

/// Evaluates one indicator for an already selected cohort.
pub fn evaluate(
    store: &IndexedStore,
    cohort: &Cohort,
    kind: IndicatorKind,
    params: &IndicatorParams,
) -> IndicatorOutput {
    let mode = params.mode;
    match kind {
        IndicatorKind::Cohort => IndicatorOutput::Cohort(cohort.clone()),
        IndicatorKind::BackwardCitations => {
            IndicatorOutput::BackwardCitations(backward_citation_count(store, cohort, mode))
        }
        IndicatorKind::LicenseCountries => {
            IndicatorOutput::LicenseCountries(license_country_coverage(store, cohort, mode))
        }
        IndicatorKind::ApplicantSets => {
            IndicatorOutput::ApplicantSets(applicant_set_count(store, cohort, mode))
        }
        IndicatorKind::TransferSignals => IndicatorOutput::TransferSignals(transfer_signals(
            store,
            cohort,
            &params.appr_rule,
            mode,
        )),
        IndicatorKind::DaysToExam => {
            IndicatorOutput::DaysToExam(days_to_first_examination(store, cohort))
        }
        IndicatorKind::FirstRepresentative => IndicatorOutput::FirstRepresentative(
            first_representative(store, cohort, params.bulletin_ordering),
        ),
        IndicatorKind::ValidityChallenges => IndicatorOutput::ValidityChallenges(
            validity_challenge_count(store, cohort, &params.challenge_codes, mode),
        ),
        IndicatorKind::AmendmentKinds => {
            IndicatorOutput::AmendmentKinds(post_grant_amendment_kinds(store, cohort, mode))
        }
        IndicatorKind::ValidatedStates => {
            IndicatorOutput::ValidatedStates(validated_state_count(store, cohort, mode))
        }
        IndicatorKind::AvgProcSteps => IndicatorOutput::AvgProcSteps(
            avg_procedure_steps_by_applicant(store, cohort, params.step_counting),
        ),
    }
}

/// Selects the cohort and evaluates `kinds` in parallel. Outputs come back
/// in the order of `kinds`.
pub fn evaluate_many(
    store: &IndexedStore,
    spec: &CohortSpec,
    kinds: &[IndicatorKind],
    params: &IndicatorParams,
) -> (Cohort, Vec<IndicatorOutput>) {
    let cohort = select_cohort(store, spec);
    let outputs = std::thread::scope(|s| {
        let handles: Vec<_> = kinds
            .iter()
            .map(|&k| {
                let cohort = &cohort;
                s.spawn(move || evaluate(store, cohort, k, params))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("indicator worker panicked"))
            .collect()
    });
    (cohort, outputs)
}
