//! Acceptance criteria, one line each:
//!
//! ```text
//! cargo test -p patreg-cli --test acceptance -- --nocapture
//! ```

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use patreg_cli::compare;
use patreg_core::indicators::{backward_citation_count, first_representative};
use patreg_core::ingest::table_bytes;
use patreg_core::synth::mutations::{check_mutation, random_mutation};
use patreg_core::synth::{
    bulletin_ordering_scenario, embed_scenarios, generate_fixture, reference_scenarios, Expectation,
    GeneratorConfig, ScenarioBuilder,
};
use patreg_core::{evaluate, evaluate_many, load_dataset, select_cohort, write_dataset, DatasetManifest, IndexedStore};
use patreg_model::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

const EQUIVALENCE_SEEDS: u64 = 200;
const EQUIVALENCE_MAX_N: usize = 500;
const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(300);
const MUTATIONS: u64 = 1000;
const ROUND_TRIP_SEEDS: u64 = 20;
const PERF_N: usize = 100_000;
const PERF_BUDGET: Duration = Duration::from_secs(10);
const SPEEDUP_N: usize = 50_000;
const MIN_SPEEDUP: f64 = 10.0;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let scenarios = reference_scenarios();
    let spec = CohortSpec::default();
    for seed in 0..EQUIVALENCE_SEEDS {
        let n = 100 * (seed as usize % 5 + 1);
        assert!(n <= EQUIVALENCE_MAX_N);
        let ds = embed_scenarios(generate_fixture(&GeneratorConfig::new(seed, n)).unwrap(), &scenarios)
            .map_err(|e| e.to_string())?;
        if let Some(diff) = compare(&ds, &spec, false) {
            return Err(format!("seed {seed}: {diff}"));
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < EQUIVALENCE_BUDGET, || format!("took {elapsed:.1?}"))?;
    Ok(format!("{EQUIVALENCE_SEEDS} seeds, both modes, 11 tables, {elapsed:.1?}"))
}

fn count_for(out: &IndicatorOutput, id: RegId) -> Option<u64> {
    match out {
        IndicatorOutput::BackwardCitations(r)
        | IndicatorOutput::ValidityChallenges(r)
        | IndicatorOutput::ValidatedStates(r) => r.iter().find(|r| r.id == id).map(|r| r.value),
        IndicatorOutput::ApplicantSets(r) => r.iter().find(|r| r.id == id).map(|r| r.value as u64),
        IndicatorOutput::LicenseCountries(r) => r.iter().find(|r| r.id == id).map(|r| r.value.nb_lic_ctry),
        _ => None,
    }
}

fn check_expectation(outputs: &[IndicatorOutput], id: RegId, e: &Expectation) -> Result<(), String> {
    let find = |k: IndicatorKind| outputs.iter().find(|o| o.kind() == k).expect("output");
    let got = match e {
        Expectation::BackwardCitations(n) => (count_for(find(IndicatorKind::BackwardCitations), id), Some(*n)),
        Expectation::LicenseCountries(n) => (count_for(find(IndicatorKind::LicenseCountries), id), Some(*n)),
        Expectation::ApplicantSets(n) => (count_for(find(IndicatorKind::ApplicantSets), id), Some(*n as u64)),
        Expectation::ValidityChallenges(n) => (count_for(find(IndicatorKind::ValidityChallenges), id), Some(*n)),
        Expectation::ValidatedStates(n) => (count_for(find(IndicatorKind::ValidatedStates), id), Some(*n)),
        Expectation::DaysToExam(d) => {
            let IndicatorOutput::DaysToExam(rows) = find(IndicatorKind::DaysToExam) else { unreachable!() };
            let v = rows.iter().find(|r| r.id == id).map(|r| r.value.days_to_exam);
            return ensure(v == Some(*d), || format!("{id}: days {v:?}, want {d}"));
        }
        Expectation::FirstRepresentative { bulletin, name } => {
            let IndicatorOutput::FirstRepresentative(rows) = find(IndicatorKind::FirstRepresentative) else {
                unreachable!()
            };
            let v = rows.iter().find(|r| r.id == id).map(|r| (r.value.bulletin, r.value.names.clone()));
            let want = Some((*bulletin, vec![name.clone()]));
            return ensure(v == want, || format!("{id}: representative {v:?}, want {want:?}"));
        }
        Expectation::AvgProcSteps { name, avg } => {
            let IndicatorOutput::AvgProcSteps(rows) = find(IndicatorKind::AvgProcSteps) else { unreachable!() };
            let v = rows.iter().find(|r| &r.name == name).map(|r| r.avg_proc_steps);
            return ensure(v == Some(*avg), || format!("{name}: average {v:?}, want {avg}"));
        }
    };
    ensure(got.0 == got.1, || format!("{id}: {e:?} got {:?}", got.0))
}

fn reference_values() -> Outcome {
    let scenarios = reference_scenarios();
    let ds = embed_scenarios(generate_fixture(&GeneratorConfig::new(42, 1000)).unwrap(), &scenarios)
        .map_err(|e| e.to_string())?;
    ensure(ds.check_invariants(ValidationMode::Strict).is_clean(), || "fixture not strictly valid".into())?;
    let store = IndexedStore::build(ds.clone()).map_err(|e| e.to_string())?;
    let spec = CohortSpec::default();
    let mut checked = 0;
    for mode in [OutputMode::Default, OutputMode::PaperCompat] {
        let params = IndicatorParams::for_mode(mode);
        let (_, outputs) = evaluate_many(&store, &spec, &IndicatorKind::ALL, &params);
        let naive: Vec<IndicatorOutput> = IndicatorKind::ALL
            .iter()
            .map(|&k| patreg_oracle::evaluate_naive(&ds, &spec, k, &params))
            .collect();
        for s in &scenarios {
            for e in &s.expected {
                check_expectation(&outputs, s.id, e)?;
                check_expectation(&naive, s.id, e)?;
                checked += 1;
            }
        }
    }
    let overlap = scenarios.iter().find(|s| s.name == "license_overlap").unwrap();
    let raw = ds.licensee_states.iter().filter(|r| r.id == overlap.id).count();
    ensure(raw == 62, || format!("license overlap has {raw} raw rows"))?;
    Ok(format!("{} scenarios, {checked} values exact in both modes, 62 raw vs 36 distinct", scenarios.len()))
}

fn ordering_divergence() -> Outcome {
    let s = bulletin_ordering_scenario();
    let store = IndexedStore::build(s.rows.clone()).map_err(|e| e.to_string())?;
    let cohort = select_cohort(&store, &CohortSpec::default());
    let pick = |o| {
        first_representative(&store, &cohort, o)
            .into_iter()
            .map(|r| (r.value.bulletin, r.value.names))
            .collect::<Vec<_>>()
    };
    let numeric = pick(BulletinOrdering::Numeric);
    let compat = pick(BulletinOrdering::PaperCompat);
    ensure(numeric == vec![(Bulletin::new(2001, 5), vec!["Early Agent".to_string()])], || {
        format!("numeric {numeric:?}")
    })?;
    ensure(compat == vec![(Bulletin::new(2001, 30), vec!["Late Agent".to_string()])], || {
        format!("paper-compat {compat:?}")
    })?;

    let mut agreeing = 0;
    for seed in 0..50 {
        let mut ds = generate_fixture(&GeneratorConfig::new(seed, 200)).unwrap();
        for p in ds.publications.iter_mut() {
            p.bulletin.week = p.bulletin.week.max(10);
        }
        for p in ds.parties.iter_mut() {
            if let Some(b) = p.bulletin.as_mut() {
                b.week = b.week.max(10);
            }
        }
        let store = IndexedStore::build(ds).map_err(|e| e.to_string())?;
        let cohort = select_cohort(&store, &CohortSpec::default());
        let a = first_representative(&store, &cohort, BulletinOrdering::Numeric);
        let b = first_representative(&store, &cohort, BulletinOrdering::PaperCompat);
        ensure(a == b, || format!("seed {seed}: modes differ with weeks >= 10"))?;
        agreeing += a.len();
    }
    Ok(format!("(2001,5) vs (2001,30) diverge; {agreeing} rows agree over 50 seeds with weeks >= 10"))
}

fn mutation_suite() -> Outcome {
    let fixtures: Vec<Dataset> = (0..20)
        .map(|seed| {
            let mut cfg = GeneratorConfig::new(1000 + seed, 120);
            cfg.p_license = 0.3;
            generate_fixture(&cfg).unwrap()
        })
        .collect();
    let spec = CohortSpec::default();
    let mut by_kind = std::collections::BTreeMap::new();
    for i in 0..MUTATIONS {
        let ds = &fixtures[(i % fixtures.len() as u64) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let m = random_mutation(ds, &mut rng).ok_or_else(|| format!("no mutation for {i}"))?;
        check_mutation(ds, &m, &spec)?;
        *by_kind.entry(format!("{:?}", std::mem::discriminant(&m))).or_insert(0) += 1;
    }
    ensure(by_kind.len() == 4, || format!("only {} mutation kinds drawn", by_kind.len()))?;
    Ok(format!("{MUTATIONS} mutations, 0 failures"))
}

fn patreg(args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_patreg"))
        .env_remove("PATREG_DATA_DIR")
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || {
        format!("patreg {args:?}: {}", String::from_utf8_lossy(&o.stderr))
    })
}

fn tree_hash(dir: &Path) -> String {
    let mut files: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    let mut h = Sha256::new();
    for f in files {
        if f.is_dir() {
            h.update(tree_hash(&f));
        } else {
            h.update(f.file_name().unwrap().to_string_lossy().as_bytes());
            h.update([0]);
            h.update(fs::read(&f).unwrap());
        }
        h.update([0]);
    }
    hex::encode(h.finalize())
}

fn cli_determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut hashes = Vec::new();
    for run in ["a", "b"] {
        let base = root.path().join(run);
        let data = base.join("data");
        let out = base.join("out");
        patreg(&["generate", "--seed", "42", "--n", "1000", "--scenarios", "--out", data.to_str().unwrap()])?;
        patreg(&["indicators", data.to_str().unwrap(), "--all", "--out", out.to_str().unwrap()])?;
        hashes.push(tree_hash(&base));
    }
    ensure(hashes[0] == hashes[1], || format!("{} != {}", hashes[0], hashes[1]))?;
    Ok(format!("sha256 {}", &hashes[0][..16]))
}

fn round_trip() -> Outcome {
    for seed in 0..ROUND_TRIP_SEEDS {
        let ds = generate_fixture(&GeneratorConfig::new(seed, 200)).unwrap();
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        write_dataset(&ds, a.path()).map_err(|e| e.to_string())?;
        let (loaded, _) = load_dataset(&DatasetManifest::new(a.path())).map_err(|e| e.to_string())?;
        ensure(loaded == ds, || format!("seed {seed}: loaded dataset differs"))?;
        write_dataset(&loaded, b.path()).map_err(|e| e.to_string())?;
        for table in Table::ALL {
            let x = fs::read(a.path().join(table.file_name())).map_err(|e| e.to_string())?;
            let y = fs::read(b.path().join(table.file_name())).map_err(|e| e.to_string())?;
            ensure(x == y && x == table_bytes(&ds, table), || format!("seed {seed}: {table} differs"))?;
        }
    }
    Ok(format!("{ROUND_TRIP_SEEDS} seeds byte-identical"))
}

fn performance() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let big = generate_fixture(&GeneratorConfig::new(100, PERF_N)).unwrap();
    write_dataset(&big, dir.path()).map_err(|e| e.to_string())?;
    drop(big);

    let started = Instant::now();
    let (ds, _) = load_dataset(&DatasetManifest::new(dir.path())).map_err(|e| e.to_string())?;
    let rows = ds.total_rows();
    let store = IndexedStore::build(ds).map_err(|e| e.to_string())?;
    let (_, outputs) = evaluate_many(
        &store,
        &CohortSpec::default(),
        &IndicatorKind::ALL,
        &IndicatorParams::default(),
    );
    let full = started.elapsed();
    ensure(outputs.len() == IndicatorKind::ALL.len(), || "missing outputs".into())?;

    let ds = generate_fixture(&GeneratorConfig::new(50, SPEEDUP_N)).unwrap();
    let t = Instant::now();
    let store = IndexedStore::build(ds.clone()).map_err(|e| e.to_string())?;
    let cohort = select_cohort(&store, &CohortSpec::default());
    let indexed = backward_citation_count(&store, &cohort, OutputMode::Default);
    let indexed_time = t.elapsed();
    let t = Instant::now();
    let naive = patreg_oracle::backward_citation_count(&ds, &cohort, OutputMode::Default);
    let naive_time = t.elapsed();
    ensure(indexed == naive, || "indexed and oracle citation counts differ".into())?;
    let speedup = naive_time.as_secs_f64() / indexed_time.as_secs_f64();

    let detail = format!(
        "{PERF_N} apps ({rows} rows): {full:.2?}; citations at {SPEEDUP_N}: indexed {indexed_time:.2?} \
         (incl. build) vs oracle {naive_time:.2?} = {speedup:.0}x"
    );
    ensure(full < PERF_BUDGET && speedup >= MIN_SPEEDUP, || detail.clone())?;
    Ok(detail)
}

fn date_cases() -> Outcome {
    let leap = ScenarioBuilder::new(1, 11, "2000-01-01", 1000)
        .event(FIRST_EXAMINATION_CODE, "2000-03-01")
        .build("leap", vec![Expectation::DaysToExam(60)]);
    let mut ds = Dataset::default();
    ds.extend(leap.rows);
    let lag = reference_scenarios()
        .into_iter()
        .find(|s| s.name == "examination_lag")
        .unwrap();
    ds.extend(lag.rows);
    let store = IndexedStore::build(ds.clone()).map_err(|e| e.to_string())?;
    let cohort = select_cohort(&store, &CohortSpec::default());
    let params = IndicatorParams::default();
    let indexed = evaluate(&store, &cohort, IndicatorKind::DaysToExam, &params);
    let naive = patreg_oracle::evaluate_on(&ds, &cohort, IndicatorKind::DaysToExam, &params);
    ensure(indexed == naive, || "oracle disagrees".into())?;
    let IndicatorOutput::DaysToExam(rows) = indexed else { unreachable!() };
    let got: Vec<(u64, i64)> = rows.iter().map(|r| (r.id.get(), r.value.days_to_exam)).collect();
    ensure(got == vec![(1, 60), (8005567, 233)], || format!("{got:?}"))?;
    Ok("2000-01-01 -> 2000-03-01 = 60, 2008-03-26 -> 2008-11-14 = 233".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 reference scenario values", reference_values),
        ("3 bulletin ordering divergence", ordering_divergence),
        ("4 dedup/monotonicity mutations", mutation_suite),
        ("5 CLI determinism", cli_determinism),
        ("6 ingest round trip", round_trip),
        ("7 performance", performance),
        ("8 date arithmetic", date_cases),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let started = Instant::now();
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.1?}]", started.elapsed()),
            Err(detail) => {
                println!("FAIL  {name}: {detail} [{:.1?}]", started.elapsed());
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
