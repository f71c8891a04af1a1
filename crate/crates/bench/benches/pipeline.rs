use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use voicemark::acoustic::{detect_pitch, extract_acoustic};
use voicemark::linguistic::{graph_metrics, WordGraph};
use voicemark::model::{cross_validate, train_gbt, tree_shap, CvConfig, GbtConfig};
use voicemark::stats::compare_groups;
use voicemark_bench::{subject_matrix, voiced_clip, word_sentences};

fn acoustic(c: &mut Criterion) {
    let clip = voiced_clip(180.0, 5.0);
    c.bench_function("detect_pitch 5 s", |b| b.iter(|| detect_pitch(black_box(&clip), 75.0, 600.0)));
    c.bench_function("extract_acoustic 5 s", |b| b.iter(|| extract_acoustic(black_box(&clip))));
}

fn graph(c: &mut Criterion) {
    let sentences = word_sentences(2_000, 300);
    c.bench_function("graph_metrics 2000 words", |b| {
        b.iter(|| {
            let g = WordGraph::from_sequences(black_box(&sentences));
            graph_metrics(&g, 2_000)
        })
    });
}

fn model(c: &mut Criterion) {
    let x = subject_matrix(1);
    let cfg = GbtConfig::default();
    c.bench_function("train_gbt 60x82 200 trees", |b| b.iter(|| train_gbt(black_box(&x), &cfg).unwrap()));
    let model = train_gbt(&x, &cfg).unwrap();
    c.bench_function("tree_shap one row", |b| b.iter(|| tree_shap(&model, black_box(&x.rows[0])).unwrap()));
    c.bench_function("compare_groups 60x82", |b| b.iter(|| compare_groups(black_box(&x), 0.05, false).unwrap()));
    let cv = CvConfig { gbt: GbtConfig { n_trees: 50, ..cfg }, ..CvConfig::default() };
    let mut group = c.benchmark_group("cv");
    group.sample_size(10);
    group.bench_function("4-fold 50 trees", |b| b.iter_batched(|| x.clone(), |x| cross_validate(&x, &cv).unwrap(), BatchSize::LargeInput));
    group.finish();
}

criterion_group!(benches, acoustic, graph, model);
criterion_main!(benches);
