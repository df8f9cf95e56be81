use patreg_core::synth::{generate_fixture, GeneratorConfig};
use patreg_core::{evaluate, select_cohort, IndexedStore};
use patreg_model::*;
use proptest::prelude::*;

fn assert_equivalent(ds: &Dataset, spec: &CohortSpec) {
    let store = IndexedStore::build(ds.clone()).expect("store");
    let cohort = select_cohort(&store, spec);
    assert_eq!(cohort, patreg_oracle::select_cohort(ds, spec));
    for mode in [OutputMode::Default, OutputMode::PaperCompat] {
        let params = IndicatorParams::for_mode(mode);
        for kind in IndicatorKind::ALL {
            let indexed = evaluate(&store, &cohort, kind, &params);
            let naive = patreg_oracle::evaluate_on(ds, &cohort, kind, &params);
            assert_eq!(indexed, naive, "{kind:?} in {mode:?}");
        }
    }
}

#[test]
fn seed_13_all_kinds() {
    let ds = generate_fixture(&GeneratorConfig::new(13, 300)).unwrap();
    assert_equivalent(&ds, &CohortSpec::default());
}

#[test]
fn non_default_cohorts() {
    let ds = generate_fixture(&GeneratorConfig::new(21, 300)).unwrap();
    for spec in [
        CohortSpec::new("EP", ["A", "U"], 1998, 2012, "F0").unwrap(),
        CohortSpec::new("US", ["A"], 1990, 2020, "H02K").unwrap(),
        CohortSpec::new("EP", ["W"], 2005, 2005, "F03D   7").unwrap(),
    ] {
        assert_equivalent(&ds, &spec);
    }
}

#[test]
fn ordering_modes_differ_between_oracle_and_store_only_together() {
    let ds = generate_fixture(&GeneratorConfig::new(5, 300)).unwrap();
    let store = IndexedStore::build(ds.clone()).unwrap();
    let cohort = select_cohort(&store, &CohortSpec::default());
    for ordering in [BulletinOrdering::Numeric, BulletinOrdering::PaperCompat] {
        let a = patreg_core::indicators::first_representative(&store, &cohort, ordering);
        let b = patreg_oracle::first_representative(&ds, &cohort, ordering);
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_fixtures_agree(seed in any::<u64>(), n in 0usize..200) {
        let ds = generate_fixture(&GeneratorConfig::new(seed, n)).unwrap();
        assert_equivalent(&ds, &CohortSpec::default());
    }
}
