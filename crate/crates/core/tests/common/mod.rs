#![allow(dead_code)]

use patreg_core::synth::ScenarioSpec;
use patreg_core::{evaluate, select_cohort, IndexedStore};
use patreg_model::*;

pub fn dataset_of(specs: &[ScenarioSpec]) -> Dataset {
    let mut ds = Dataset::default();
    for s in specs {
        ds.extend(s.rows.clone());
    }
    ds
}

/// Evaluates `kind` through the store and the oracle, asserts they agree
/// and returns the result.
pub fn eval(ds: &Dataset, kind: IndicatorKind, params: &IndicatorParams) -> IndicatorOutput {
    let spec = CohortSpec::default();
    let store = IndexedStore::build(ds.clone()).expect("store");
    let cohort = select_cohort(&store, &spec);
    let indexed = evaluate(&store, &cohort, kind, params);
    let naive = patreg_oracle::evaluate_naive(ds, &spec, kind, params);
    assert_eq!(indexed, naive, "indexed and oracle disagree on {kind:?}");
    indexed
}

pub fn eval_default(ds: &Dataset, kind: IndicatorKind) -> IndicatorOutput {
    eval(ds, kind, &IndicatorParams::default())
}

pub fn eval_compat(ds: &Dataset, kind: IndicatorKind) -> IndicatorOutput {
    eval(ds, kind, &IndicatorParams::for_mode(OutputMode::PaperCompat))
}

/// Values of a counting indicator, as (id, value).
pub fn counts(out: &IndicatorOutput) -> Vec<(u64, u64)> {
    match out {
        IndicatorOutput::BackwardCitations(r)
        | IndicatorOutput::ValidityChallenges(r)
        | IndicatorOutput::ValidatedStates(r) => r.iter().map(|r| (r.id.get(), r.value)).collect(),
        IndicatorOutput::ApplicantSets(r) => r.iter().map(|r| (r.id.get(), r.value as u64)).collect(),
        IndicatorOutput::LicenseCountries(r) => {
            r.iter().map(|r| (r.id.get(), r.value.nb_lic_ctry)).collect()
        }
        other => panic!("not a counting indicator: {:?}", other.kind()),
    }
}
