use chrono::Datelike;
use patreg_core::synth::mutations::{check_mutation, random_mutation};
use patreg_core::synth::{generate_fixture, GeneratorConfig};
use patreg_core::{evaluate, select_cohort, IndexedStore};
use patreg_model::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fixture(seed: u64, n: usize) -> Dataset {
    let mut cfg = GeneratorConfig::new(seed, n);
    cfg.p_license = 0.3;
    generate_fixture(&cfg).unwrap()
}

/// Non-zero part of a default-mode output, as the paper-compat mode
/// should produce it.
fn without_zero_rows(out: IndicatorOutput) -> IndicatorOutput {
    use IndicatorOutput as O;
    match out {
        O::BackwardCitations(r) => O::BackwardCitations(r.into_iter().filter(|r| r.value > 0).collect()),
        O::ValidityChallenges(r) => O::ValidityChallenges(r.into_iter().filter(|r| r.value > 0).collect()),
        O::ValidatedStates(r) => O::ValidatedStates(r.into_iter().filter(|r| r.value > 0).collect()),
        O::ApplicantSets(r) => O::ApplicantSets(r.into_iter().filter(|r| r.value > 0).collect()),
        O::LicenseCountries(r) => {
            O::LicenseCountries(r.into_iter().filter(|r| r.value.nb_lic_ctry > 0).collect())
        }
        O::AmendmentKinds(r) => O::AmendmentKinds(r.into_iter().filter(|r| !r.value.is_empty()).collect()),
        O::TransferSignals(r) => O::TransferSignals(
            r.into_iter()
                .filter(|r| {
                    let v = r.value;
                    v.n_applicant_sets + v.n_distinct_customer_ids as u32 + v.n_appr_events as u32 > 0
                })
                .collect(),
        ),
        other => other,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mutations_keep_their_invariants(seed in 0u64..10_000, mutation_seed in any::<u64>()) {
        let ds = fixture(seed, 60);
        let mut rng = ChaCha8Rng::seed_from_u64(mutation_seed);
        if let Some(m) = random_mutation(&ds, &mut rng) {
            prop_assert_eq!(check_mutation(&ds, &m, &CohortSpec::default()), Ok(()));
        }
    }

    #[test]
    fn paper_compat_drops_exactly_the_zero_rows(seed in 0u64..10_000) {
        let ds = fixture(seed, 80);
        let store = IndexedStore::build(ds).unwrap();
        let cohort = select_cohort(&store, &CohortSpec::default());
        let compat = IndicatorParams {
            mode: OutputMode::PaperCompat,
            ..IndicatorParams::default()
        };
        for kind in [
            IndicatorKind::BackwardCitations,
            IndicatorKind::LicenseCountries,
            IndicatorKind::ApplicantSets,
            IndicatorKind::TransferSignals,
            IndicatorKind::ValidityChallenges,
            IndicatorKind::AmendmentKinds,
            IndicatorKind::ValidatedStates,
            IndicatorKind::DaysToExam,
        ] {
            let full = evaluate(&store, &cohort, kind, &IndicatorParams::default());
            prop_assert_eq!(without_zero_rows(full), evaluate(&store, &cohort, kind, &compat));
        }
    }

    #[test]
    fn bulletin_orderings_agree_from_week_ten(seed in 0u64..10_000) {
        let mut ds = fixture(seed, 80);
        for p in ds.publications.iter_mut() {
            p.bulletin.week = p.bulletin.week.max(10);
        }
        for p in ds.parties.iter_mut() {
            if let Some(b) = p.bulletin.as_mut() {
                b.week = b.week.max(10);
            }
        }
        let store = IndexedStore::build(ds).unwrap();
        let cohort = select_cohort(&store, &CohortSpec::default());
        let numeric = patreg_core::indicators::first_representative(&store, &cohort, BulletinOrdering::Numeric);
        let compat = patreg_core::indicators::first_representative(&store, &cohort, BulletinOrdering::PaperCompat);
        prop_assert_eq!(numeric, compat);
    }

    #[test]
    fn cohort_is_sound_and_complete(seed in 0u64..10_000, from in 1998i32..2012, span in 0i32..6) {
        let ds = fixture(seed, 80);
        let spec = CohortSpec::new("EP", ["A", "W"], from, from + span, "F03D").unwrap();
        let store = IndexedStore::build(ds.clone()).unwrap();
        let cohort = select_cohort(&store, &spec);
        let matches = |a: &CoreApplication| {
            a.appln_auth == "EP"
                && spec.kinds().contains(&a.appln_kind)
                && (from..=from + span).contains(&a.appln_filing_date.year())
                && ds.ipc.iter().any(|i| i.appln_id == a.appln_id && i.ipc_class_symbol.starts_with("F03D"))
        };
        let expected: Vec<ApplnId> = {
            let mut v: Vec<_> = ds.core_applications.iter().filter(|a| matches(a)).map(|a| a.appln_id).collect();
            v.sort();
            v
        };
        let got: Vec<ApplnId> = cohort.members.iter().map(|m| m.appln_id).collect();
        prop_assert_eq!(got, expected);
    }
}
