//! Naive reference evaluator.
//!
//! Every indicator is recomputed by nested scans over the raw relations of a
//! [`Dataset`], with no indexes and no code shared with the indexed
//! pipeline beyond the model types. Quadratic on purpose; use it to check
//! results, not to produce them.
//!
//! Dates are handled through their ISO rendering and a civil-calendar day
//! number computed here.

use std::cmp::Ordering;

use patreg_model::*;

/// Days since 1970-01-01 for a proleptic Gregorian date.
pub fn civil_day_number(year: i64, month: i64, day: i64) -> i64 {
    let y = if month <= 2 { year - 1 } else { year };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = (month + 9) % 12;
    let doy = (153 * mp + 2) / 5 + day - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// Parses `YYYY-MM-DD` into (year, month, day).
pub fn split_iso(s: &str) -> (i64, i64, i64) {
    let mut it = s.split('-').map(|p| p.parse::<i64>().expect("numeric date part"));
    let y = it.next().expect("year");
    let m = it.next().expect("month");
    let d = it.next().expect("day");
    (y, m, d)
}

fn day_number(date: &impl ToString) -> i64 {
    let (y, m, d) = split_iso(&date.to_string());
    civil_day_number(y, m, d)
}

fn filing_year(date: &impl ToString) -> i64 {
    split_iso(&date.to_string()).0
}

/// Number of distinct values in `items`, by pairwise comparison.
fn count_distinct<T: PartialEq>(items: &[T]) -> u64 {
    let mut seen: Vec<&T> = Vec::new();
    for x in items {
        if !seen.iter().any(|s| *s == x) {
            seen.push(x);
        }
    }
    seen.len() as u64
}

pub fn select_cohort(ds: &Dataset, spec: &CohortSpec) -> Cohort {
    let mut members: Vec<CohortMember> = Vec::new();
    for app in &ds.core_applications {
        if app.appln_auth != spec.authority() {
            continue;
        }
        if !spec.kinds().iter().any(|k| *k == app.appln_kind) {
            continue;
        }
        let year = filing_year(&app.appln_filing_date);
        if year < spec.year_from() as i64 || year > spec.year_to() as i64 {
            continue;
        }
        let mut tagged = false;
        for ipc in &ds.ipc {
            if ipc.appln_id == app.appln_id && ipc.ipc_class_symbol.starts_with(spec.ipc_prefix()) {
                tagged = true;
            }
        }
        if !tagged || members.iter().any(|m| m.appln_id == app.appln_id) {
            continue;
        }
        let mut id = None;
        for r in &ds.applications {
            if r.appln_id.get() > 0 && r.appln_id == app.appln_id {
                id = Some(r.id);
            }
        }
        members.push(CohortMember {
            appln_id: app.appln_id,
            id,
        });
    }
    members.sort_by(|a, b| a.appln_id.get().cmp(&b.appln_id.get()));
    Cohort { members }
}

fn linked(cohort: &Cohort) -> Vec<(RegId, ApplnId)> {
    let mut out = Vec::new();
    for m in &cohort.members {
        if let Some(id) = m.id {
            out.push((id, m.appln_id));
        }
    }
    out
}

fn value_desc_then_id<V>(a: &IndicatorRow<V>, b: &IndicatorRow<V>, key: impl Fn(&V) -> u64) -> Ordering {
    let (ka, kb) = (key(&a.value), key(&b.value));
    if ka != kb {
        return kb.cmp(&ka);
    }
    a.id.get().cmp(&b.id.get())
}

fn keep(mode: OutputMode, zero: bool) -> bool {
    match mode {
        OutputMode::Default => true,
        OutputMode::PaperCompat => !zero,
    }
}

pub fn backward_citation_count(ds: &Dataset, cohort: &Cohort, mode: OutputMode) -> Vec<IndicatorRow<u64>> {
    let mut rows = Vec::new();
    for (id, appln_id) in linked(cohort) {
        let mut publications: Vec<PublnId> = Vec::new();
        for p in &ds.core_publications {
            if p.appln_id == appln_id {
                publications.push(p.pat_publn_id);
            }
        }
        let mut cited: Vec<PublnId> = Vec::new();
        for c in &ds.citations {
            if c.pat_citn_seq_nr > 0 && publications.contains(&c.pat_publn_id) {
                cited.push(c.cited_pat_publn_id);
            }
        }
        let n = count_distinct(&cited);
        if keep(mode, n == 0) {
            rows.push(IndicatorRow::new(id, appln_id, n));
        }
    }
    rows.sort_by(|a, b| value_desc_then_id(a, b, |v| *v));
    rows
}

pub fn license_country_coverage(
    ds: &Dataset,
    cohort: &Cohort,
    mode: OutputMode,
) -> Vec<IndicatorRow<LicenseCoverage>> {
    let mut rows = Vec::new();
    for (id, appln_id) in linked(cohort) {
        let mut countries: Vec<&str> = Vec::new();
        for s in &ds.licensee_states {
            if s.id == id {
                countries.push(&s.licensee_country);
            }
        }
        let mut has_all = false;
        for l in &ds.licensees {
            if l.id == id && l.designation.code() == "all" {
                has_all = true;
            }
        }
        let n = count_distinct(&countries);
        if keep(mode, n == 0) {
            rows.push(IndicatorRow::new(
                id,
                appln_id,
                LicenseCoverage {
                    nb_lic_ctry: n,
                    has_all_designation: has_all,
                },
            ));
        }
    }
    rows.sort_by(|a, b| value_desc_then_id(a, b, |v| v.nb_lic_ctry));
    rows
}

fn max_set(ds: &Dataset, id: RegId) -> u32 {
    let mut max = 0;
    for p in &ds.parties {
        if p.id == id && p.party_type.code() == "A" && p.set_seq_nr > max {
            max = p.set_seq_nr;
        }
    }
    max
}

pub fn applicant_set_count(ds: &Dataset, cohort: &Cohort, mode: OutputMode) -> Vec<IndicatorRow<u32>> {
    let mut rows = Vec::new();
    for (id, appln_id) in linked(cohort) {
        let n = max_set(ds, id);
        if keep(mode, n == 0) {
            rows.push(IndicatorRow::new(id, appln_id, n));
        }
    }
    rows.sort_by(|a, b| value_desc_then_id(a, b, |v| *v as u64));
    rows
}

pub fn transfer_signals(
    ds: &Dataset,
    cohort: &Cohort,
    rule: &ApprRule,
    mode: OutputMode,
) -> Vec<IndicatorRow<TransferSignals>> {
    let mut rows = Vec::new();
    for (id, appln_id) in linked(cohort) {
        let mut customers: Vec<&str> = Vec::new();
        for p in &ds.parties {
            if p.id == id && p.party_type.code() == "A" && !p.customer_id.is_empty() {
                customers.push(&p.customer_id);
            }
        }
        let mut appr = 0u64;
        for e in &ds.events {
            if e.id != id {
                continue;
            }
            let hit = match rule {
                ApprRule::Suffix(sfx) => {
                    e.event_code.len() >= sfx.len()
                        && e.event_code[e.event_code.len() - sfx.len()..] == **sfx
                }
                ApprRule::Codes(codes) => codes.iter().any(|c| *c == e.event_code),
            };
            if hit {
                appr += 1;
            }
        }
        let value = TransferSignals {
            n_applicant_sets: max_set(ds, id),
            n_distinct_customer_ids: count_distinct(&customers),
            n_appr_events: appr,
        };
        let zero = value.n_applicant_sets == 0
            && value.n_distinct_customer_ids == 0
            && value.n_appr_events == 0;
        if keep(mode, zero) {
            rows.push(IndicatorRow::new(id, appln_id, value));
        }
    }
    rows.sort_by(|a, b| a.id.get().cmp(&b.id.get()));
    rows
}

pub fn days_to_first_examination(ds: &Dataset, cohort: &Cohort) -> Vec<IndicatorRow<ExamLag>> {
    let mut rows = Vec::new();
    for (id, appln_id) in linked(cohort) {
        let mut filing = None;
        for a in &ds.applications {
            if a.id == id {
                filing = Some(a.appln_filing_date);
            }
        }
        let Some(filing) = filing else { continue };
        let mut earliest = None;
        for e in &ds.events {
            if e.id == id && e.event_code == "0009185" {
                earliest = match earliest {
                    Some(d) if day_number(&d) <= day_number(&e.event_date) => Some(d),
                    _ => Some(e.event_date),
                };
            }
        }
        if let Some(exam) = earliest {
            rows.push(IndicatorRow::new(
                id,
                appln_id,
                ExamLag {
                    appln_filing_date: filing,
                    exam_date: exam,
                    days_to_exam: day_number(&exam) - day_number(&filing),
                },
            ));
        }
    }
    rows.sort_by(|a, b| {
        a.value
            .days_to_exam
            .cmp(&b.value.days_to_exam)
            .then(a.id.get().cmp(&b.id.get()))
    });
    rows
}

pub fn first_representative(
    ds: &Dataset,
    cohort: &Cohort,
    ordering: BulletinOrdering,
) -> Vec<IndicatorRow<FirstRepresentative>> {
    let mut rows = Vec::new();
    for (id, appln_id) in linked(cohort) {
        let mut first: Option<Bulletin> = None;
        for p in &ds.publications {
            if p.id != id {
                continue;
            }
            let earlier = match first {
                None => true,
                Some(f) => match ordering {
                    BulletinOrdering::Numeric => {
                        (p.bulletin.year, p.bulletin.week) < (f.year, f.week)
                    }
                    BulletinOrdering::PaperCompat => {
                        let concat = |b: Bulletin| b.year.to_string() + &b.week.to_string();
                        concat(p.bulletin) < concat(f)
                    }
                },
            };
            if earlier {
                first = Some(p.bulletin);
            }
        }
        let Some(first) = first else { continue };
        let mut reps: Vec<&Party> = Vec::new();
        for p in &ds.parties {
            if p.id == id && p.party_type.code() == "R" && p.bulletin == Some(first) {
                reps.push(p);
            }
        }
        if reps.is_empty() {
            continue;
        }
        reps.sort_by(|a, b| (a.set_seq_nr, a.seq_nr).cmp(&(b.set_seq_nr, b.seq_nr)));
        let names = reps.iter().map(|p| p.name.clone()).collect();
        rows.push(IndicatorRow::new(
            id,
            appln_id,
            FirstRepresentative {
                bulletin: first,
                names,
            },
        ));
    }
    rows.sort_by(|a, b| a.id.get().cmp(&b.id.get()));
    rows
}

pub fn validity_challenge_count(
    ds: &Dataset,
    cohort: &Cohort,
    codes: &std::collections::BTreeSet<String>,
    mode: OutputMode,
) -> Vec<IndicatorRow<u64>> {
    let mut rows = Vec::new();
    for (id, appln_id) in linked(cohort) {
        let mut n = 0u64;
        for e in &ds.events {
            if e.id == id && codes.iter().any(|c| *c == e.event_code) {
                n += 1;
            }
        }
        if keep(mode, n == 0) {
            rows.push(IndicatorRow::new(id, appln_id, n));
        }
    }
    rows.sort_by(|a, b| value_desc_then_id(a, b, |v| *v));
    rows
}

pub fn post_grant_amendment_kinds(
    ds: &Dataset,
    cohort: &Cohort,
    mode: OutputMode,
) -> Vec<IndicatorRow<AmendmentKinds>> {
    let mut rows = Vec::new();
    for (id, appln_id) in linked(cohort) {
        let mut kinds = AmendmentKinds { b2: false, b3: false };
        for p in &ds.publications {
            if p.id == id && p.publn_kind == "B2" {
                kinds.b2 = true;
            }
            if p.id == id && p.publn_kind == "B3" {
                kinds.b3 = true;
            }
        }
        if keep(mode, !kinds.b2 && !kinds.b3) {
            rows.push(IndicatorRow::new(id, appln_id, kinds));
        }
    }
    rows.sort_by(|a, b| a.id.get().cmp(&b.id.get()));
    rows
}

pub fn validated_state_count(ds: &Dataset, cohort: &Cohort, mode: OutputMode) -> Vec<IndicatorRow<u64>> {
    let mut rows = Vec::new();
    for (id, appln_id) in linked(cohort) {
        let mut countries: Vec<&str> = Vec::new();
        for e in &ds.legal_status {
            if e.appln_id == appln_id && e.prs_code == "PGFP" {
                if let Some(c) = &e.country {
                    countries.push(c);
                }
            }
        }
        let n = count_distinct(&countries);
        if keep(mode, n == 0) {
            rows.push(IndicatorRow::new(id, appln_id, n));
        }
    }
    rows.sort_by(|a, b| value_desc_then_id(a, b, |v| *v));
    rows
}

/// `num / den` to two decimals, half away from zero, as hundredths.
pub fn round_hundredths(num: u64, den: u64) -> u64 {
    let scaled = num * 100;
    let (q, r) = (scaled / den, scaled % den);
    if 2 * r >= den {
        q + 1
    } else {
        q
    }
}

/// Join of cohort applications, their latest applicant rows and their
/// procedural steps, grouped by applicant name.
pub fn avg_procedure_steps_by_applicant(
    ds: &Dataset,
    cohort: &Cohort,
    counting: StepCounting,
) -> Vec<ApplicantAverage> {
    // (name, id) per joined row.
    let mut joined: Vec<(&str, RegId)> = Vec::new();
    for (id, _) in linked(cohort) {
        for p in &ds.parties {
            if p.id != id || p.party_type.code() != "A" || !p.is_latest {
                continue;
            }
            if counting == StepCounting::Normalized && joined.iter().any(|(n, i)| *n == p.name && *i == id) {
                continue;
            }
            for s in &ds.procedure_steps {
                if s.id == id {
                    joined.push((&p.name, id));
                }
            }
        }
    }
    let mut names: Vec<&str> = Vec::new();
    for (n, _) in &joined {
        if !names.contains(n) {
            names.push(n);
        }
    }
    let mut out = Vec::new();
    for name in names {
        let mut steps = 0u64;
        let mut ids: Vec<RegId> = Vec::new();
        for (n, id) in &joined {
            if *n == name {
                steps += 1;
                ids.push(*id);
            }
        }
        out.push(ApplicantAverage {
            name: name.to_string(),
            avg_proc_steps: Hundredths(round_hundredths(steps, count_distinct(&ids))),
        });
    }
    out.sort_by(|a, b| {
        b.avg_proc_steps
            .0
            .cmp(&a.avg_proc_steps.0)
            .then_with(|| a.name.as_bytes().cmp(b.name.as_bytes()))
    });
    out
}

/// Selects the cohort for `spec` and evaluates `kind` on it.
pub fn evaluate_naive(
    ds: &Dataset,
    spec: &CohortSpec,
    kind: IndicatorKind,
    params: &IndicatorParams,
) -> IndicatorOutput {
    let cohort = select_cohort(ds, spec);
    evaluate_on(ds, &cohort, kind, params)
}

/// Evaluates `kind` on an already selected cohort.
pub fn evaluate_on(
    ds: &Dataset,
    cohort: &Cohort,
    kind: IndicatorKind,
    params: &IndicatorParams,
) -> IndicatorOutput {
    let mode = params.mode;
    match kind {
        IndicatorKind::Cohort => IndicatorOutput::Cohort(cohort.clone()),
        IndicatorKind::BackwardCitations => {
            IndicatorOutput::BackwardCitations(backward_citation_count(ds, cohort, mode))
        }
        IndicatorKind::LicenseCountries => {
            IndicatorOutput::LicenseCountries(license_country_coverage(ds, cohort, mode))
        }
        IndicatorKind::ApplicantSets => {
            IndicatorOutput::ApplicantSets(applicant_set_count(ds, cohort, mode))
        }
        IndicatorKind::TransferSignals => {
            IndicatorOutput::TransferSignals(transfer_signals(ds, cohort, &params.appr_rule, mode))
        }
        IndicatorKind::DaysToExam => IndicatorOutput::DaysToExam(days_to_first_examination(ds, cohort)),
        IndicatorKind::FirstRepresentative => IndicatorOutput::FirstRepresentative(
            first_representative(ds, cohort, params.bulletin_ordering),
        ),
        IndicatorKind::ValidityChallenges => IndicatorOutput::ValidityChallenges(
            validity_challenge_count(ds, cohort, &params.challenge_codes, mode),
        ),
        IndicatorKind::AmendmentKinds => {
            IndicatorOutput::AmendmentKinds(post_grant_amendment_kinds(ds, cohort, mode))
        }
        IndicatorKind::ValidatedStates => {
            IndicatorOutput::ValidatedStates(validated_state_count(ds, cohort, mode))
        }
        IndicatorKind::AvgProcSteps => IndicatorOutput::AvgProcSteps(
            avg_procedure_steps_by_applicant(ds, cohort, params.step_counting),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn day_numbers() {
        assert_eq!(civil_day_number(1970, 1, 1), 0);
        assert_eq!(civil_day_number(2000, 3, 1) - civil_day_number(2000, 1, 1), 60);
        assert_eq!(civil_day_number(2008, 11, 14) - civil_day_number(2008, 3, 26), 233);
        assert_eq!(civil_day_number(1900, 3, 1) - civil_day_number(1900, 2, 28), 1);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_hundredths(7, 2), 350);
        assert_eq!(round_hundredths(1, 8), 13);
        assert_eq!(round_hundredths(2, 3), 67);
        assert_eq!(round_hundredths(57, 1), 5700);
    }

    #[test]
    fn empty_dataset_gives_empty_results() {
        let ds = Dataset::default();
        let spec = CohortSpec::default();
        let params = IndicatorParams::default();
        for kind in IndicatorKind::ALL {
            assert!(evaluate_naive(&ds, &spec, kind, &params).is_empty(), "{kind:?}");
        }
    }
}
