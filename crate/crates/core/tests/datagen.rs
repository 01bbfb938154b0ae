//! Corpus generation end to end: determinism, self-certification and
//! closeness of random samples to the target catalog.

use std::time::Duration;

use metadesign_core::datagen::{
    generate, verify_record, write_corpus, CorpusPlan, GenConfig, Manifest,
};
use metadesign_core::dsl::{Line, MetaCode};
use metadesign_core::eval::{corpus_overlap_scan, read_corpus};
use metadesign_core::targets::{self, TargetClass};
use metadesign_core::Task;

fn mixed() -> Vec<GenConfig> {
    let mut all = GenConfig::optics_grid();
    all.extend([GenConfig::Circuit, GenConfig::Graph]);
    all
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
}

#[test]
fn corpus_is_identical_across_thread_counts() {
    let plan = CorpusPlan::uniform(&mixed(), 1_700, 11);
    let one = pool(1)
        .install(|| generate(&plan))
        .unwrap()
        .to_jsonl()
        .unwrap();
    let four = pool(4)
        .install(|| generate(&plan))
        .unwrap()
        .to_jsonl()
        .unwrap();
    assert_eq!(one, four);
    let mut small_batches = plan.clone();
    small_batches.batch = 7;
    assert_eq!(generate(&small_batches).unwrap().to_jsonl().unwrap(), one);
}

#[test]
fn written_corpus_verifies_and_matches_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus.jsonl");
    let manifest = write_corpus(
        &generate(&CorpusPlan::uniform(&mixed(), 1_020, 5)).unwrap(),
        &out,
    )
    .unwrap();
    let on_disk: Manifest =
        serde_json::from_str(&std::fs::read_to_string(Manifest::path_for(&out)).unwrap()).unwrap();
    assert_eq!(on_disk, manifest);
    assert_eq!(manifest.total, 1_020);
    assert!(manifest.configs.iter().all(|c| c.accepted == c.quota));
    let records = read_corpus(&out).unwrap();
    assert_eq!(records.len(), 1_020);
    for r in &records {
        verify_record(r).unwrap_or_else(|e| panic!("{}: {e}", r.b_text));
        let config: GenConfig = r.config.parse().unwrap();
        let code = MetaCode::parse(&r.b_text, config.task()).unwrap();
        if let GenConfig::Optics(o) = config {
            for line in code.pre.iter().chain(code.body_lines()).chain(&code.post) {
                let Line::Edge(e) = line else {
                    panic!("gate in optics code")
                };
                assert!(e.mu < o.dim && e.mv < o.dim);
                assert!(o.weighted || e.w == 1);
            }
        }
        if config == GenConfig::Graph {
            assert!(r
                .b_text
                .lines()
                .all(|l| !l.contains("q") || l.contains("qCZ(")));
        }
    }
}

#[test]
fn tampered_records_fail_verification() {
    let corpus = generate(&CorpusPlan::uniform(&mixed(), 68, 2)).unwrap();
    for r in corpus.records.iter().take(20) {
        let mut bad = r.clone();
        bad.seed ^= 1;
        assert!(verify_record(&bad).is_err());
        let mut bad = r.clone();
        bad.a_text.push_str(" +1[x]");
        assert!(verify_record(&bad).is_err());
        let mut bad = r.clone();
        bad.b_ids = bad.b_ids.replacen(' ', "  ", 1) + " 3";
        assert!(verify_record(&bad).is_err());
    }
}

#[test]
fn random_optics_corpus_hits_some_targets_exactly() {
    let corpus = generate(&CorpusPlan::uniform(&GenConfig::optics_grid(), 10_000, 0)).unwrap();
    let classes: Vec<TargetClass> = targets::catalog(Task::Optics)
        .iter()
        .map(|i| i.class)
        .collect();
    let overlaps = corpus_overlap_scan(
        &corpus.records,
        Task::Optics,
        &classes,
        Duration::from_secs(10),
    )
    .unwrap();
    let hits: Vec<(&str, usize)> = overlaps
        .iter()
        .filter(|o| o.exact[0] > 0)
        .map(|o| (o.target.as_str(), o.exact[0]))
        .collect();
    assert!(!hits.is_empty());
    for o in &overlaps {
        assert!(
            o.histogram[0].iter().sum::<u64>() > 0,
            "{} never compared",
            o.target
        );
    }
}
