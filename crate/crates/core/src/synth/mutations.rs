//! Row-level mutations with a known effect on one indicator.
//!
//! Duplicating a row of a relation that an indicator counts with DISTINCT
//! must not change that indicator; adding a citation of a never-cited
//! publication must raise the citing application's count by exactly one.

use std::collections::BTreeMap;

use patreg_model::*;
use rand::Rng;

use crate::indicators::{backward_citation_count, license_country_coverage, validated_state_count};
use crate::{select_cohort, IndexedStore};

#[derive(Debug, Clone, PartialEq)]
pub enum Mutation {
    DuplicateLicenseeState(usize),
    /// Index of a citation row with `pat_citn_seq_nr > 0`.
    DuplicateCitation(usize),
    /// Index of a PGFP legal-status row.
    DuplicatePgfp(usize),
    NewCitation { citing: PublnId, cited: PublnId },
}

impl Mutation {
    pub fn indicator(&self) -> IndicatorKind {
        match self {
            Mutation::DuplicateLicenseeState(_) => IndicatorKind::LicenseCountries,
            Mutation::DuplicateCitation(_) | Mutation::NewCitation { .. } => {
                IndicatorKind::BackwardCitations
            }
            Mutation::DuplicatePgfp(_) => IndicatorKind::ValidatedStates,
        }
    }
}

/// Draws a mutation applicable to `ds`, or `None` if the dataset has no
/// candidate rows at all.
pub fn random_mutation(ds: &Dataset, rng: &mut impl Rng) -> Option<Mutation> {
    let pick = |rng: &mut dyn rand::RngCore, idx: Vec<usize>| {
        (!idx.is_empty()).then(|| idx[rng.random_range(0..idx.len())])
    };
    for _ in 0..8 {
        let m = match rng.random_range(0..4) {
            0 => pick(rng, (0..ds.licensee_states.len()).collect()).map(Mutation::DuplicateLicenseeState),
            1 => {
                let idx = (0..ds.citations.len())
                    .filter(|&i| ds.citations[i].pat_citn_seq_nr > 0)
                    .collect();
                pick(rng, idx).map(Mutation::DuplicateCitation)
            }
            2 => {
                let idx = (0..ds.legal_status.len())
                    .filter(|&i| ds.legal_status[i].prs_code == PGFP)
                    .collect();
                pick(rng, idx).map(Mutation::DuplicatePgfp)
            }
            _ => pick(rng, (0..ds.core_publications.len()).collect()).map(|i| {
                let fresh = ds
                    .citations
                    .iter()
                    .map(|c| c.cited_pat_publn_id.get())
                    .max()
                    .unwrap_or(0)
                    + 1;
                Mutation::NewCitation {
                    citing: ds.core_publications[i].pat_publn_id,
                    cited: PublnId(fresh),
                }
            }),
        };
        if m.is_some() {
            return m;
        }
    }
    None
}

pub fn apply(ds: &mut Dataset, m: &Mutation) {
    match *m {
        Mutation::DuplicateLicenseeState(i) => ds.licensee_states.push(ds.licensee_states[i].clone()),
        Mutation::DuplicateCitation(i) => ds.citations.push(ds.citations[i].clone()),
        Mutation::DuplicatePgfp(i) => ds.legal_status.push(ds.legal_status[i].clone()),
        Mutation::NewCitation { citing, cited } => {
            let seq = ds
                .citations
                .iter()
                .filter(|c| c.pat_publn_id == citing)
                .map(|c| c.pat_citn_seq_nr)
                .max()
                .unwrap_or(0)
                + 1;
            ds.citations.push(Citation {
                pat_publn_id: citing,
                cited_pat_publn_id: cited,
                pat_citn_seq_nr: seq,
            });
        }
    }
}

fn counts(ds: &Dataset, spec: &CohortSpec, kind: IndicatorKind) -> BTreeMap<ApplnId, u64> {
    let store = IndexedStore::build(ds.clone()).expect("store");
    let cohort = select_cohort(&store, spec);
    let mode = OutputMode::Default;
    match kind {
        IndicatorKind::LicenseCountries => license_country_coverage(&store, &cohort, mode)
            .into_iter()
            .map(|r| (r.appln_id, r.value.nb_lic_ctry))
            .collect(),
        IndicatorKind::BackwardCitations => backward_citation_count(&store, &cohort, mode)
            .into_iter()
            .map(|r| (r.appln_id, r.value))
            .collect(),
        IndicatorKind::ValidatedStates => validated_state_count(&store, &cohort, mode)
            .into_iter()
            .map(|r| (r.appln_id, r.value))
            .collect(),
        other => unreachable!("no mutation targets {other:?}"),
    }
}

/// Applies `m` to a copy of `ds` and checks the expected effect.
pub fn check_mutation(ds: &Dataset, m: &Mutation, spec: &CohortSpec) -> Result<(), String> {
    let kind = m.indicator();
    let before = counts(ds, spec, kind);
    let mut mutated = ds.clone();
    apply(&mut mutated, m);
    let after = counts(&mutated, spec, kind);

    let mut expected = before.clone();
    if let Mutation::NewCitation { citing, .. } = m {
        let owner = ds
            .core_publications
            .iter()
            .find(|p| p.pat_publn_id == *citing)
            .map(|p| p.appln_id);
        if let Some(v) = owner.and_then(|a| expected.get_mut(&a)) {
            *v += 1;
        }
    }
    if after == expected {
        Ok(())
    } else {
        let diff: Vec<_> = expected
            .iter()
            .filter(|(k, v)| after.get(k) != Some(v))
            .map(|(k, v)| format!("appln {k}: expected {v}, got {:?}", after.get(k)))
            .collect();
        Err(format!("{m:?}: {}", diff.join("; ")))
    }
}
