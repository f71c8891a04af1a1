use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use voicemark::dataset::FeatureManifest;
use voicemark::report::{run_pipeline, schema, Bundle, PipelineConfig, ReportKind};
use voicemark::synth::{synthetic_matrix, write_synthetic_corpus, SyntheticCorpusConfig, SyntheticMatrixConfig};

fn quick(cfg: &mut PipelineConfig, out: &Path) {
    cfg.run.output = out.to_path_buf();
    cfg.run.timestamp = Some(1_000);
    cfg.gbt.n_trees = 20;
    cfg.explain.lime_samples = 100;
}

fn matrix_bundle(root: &Path) -> Bundle {
    let path = root.join("m.csv");
    let x = synthetic_matrix(&SyntheticMatrixConfig { subjects_per_class: 8, seed: 3, ..Default::default() }, &FeatureManifest::builtin());
    x.write_csv(fs::File::create(&path).unwrap()).unwrap();
    let mut cfg = PipelineConfig::default();
    cfg.inputs.matrix = Some(path);
    quick(&mut cfg, &root.join("from-matrix"));
    run_pipeline(&cfg, &["test".into()]).unwrap()
}

fn corpus_bundle(root: &Path) -> Bundle {
    let dir = root.join("corpus");
    write_synthetic_corpus(&dir, &SyntheticCorpusConfig { subjects: 6, seed: 4, ..Default::default() }).unwrap();
    let mut cfg = PipelineConfig::default();
    cfg.inputs.corpus = Some(dir);
    cfg.cv.k = 3;
    quick(&mut cfg, &root.join("from-corpus"));
    run_pipeline(&cfg, &["test".into()]).unwrap()
}

fn validate_bundle(b: &Bundle) -> usize {
    let s = schema();
    let validator = jsonschema::validator_for(&s).unwrap();
    let mut run_schema = json!({ "$ref": "#/$defs/run" });
    run_schema["$defs"] = s["$defs"].clone();
    let run_validator = jsonschema::validator_for(&run_schema).unwrap();
    let hash = FeatureManifest::builtin().hash;
    let mut checked = 0;
    for name in &b.files {
        let text = fs::read_to_string(b.dir.join(name)).unwrap();
        if name == "run_manifest.json" {
            let v: Value = serde_json::from_str(&text).unwrap();
            let errors: Vec<String> = run_validator.iter_errors(&v).map(|e| e.to_string()).collect();
            assert!(errors.is_empty(), "{name}: {errors:?}");
            continue;
        }
        if name == "model.json" {
            let v: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["manifest_hash"], json!(hash));
            continue;
        }
        if !name.ends_with(".json") {
            continue;
        }
        let v: Value = serde_json::from_str(&text).unwrap();
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
        assert_eq!(v["run"]["manifest_hash"], json!(hash), "{name}");
        assert_eq!(format!("{}.json", v["kind"].as_str().unwrap()), *name);
        checked += 1;
    }
    checked
}

#[test]
fn matrix_bundle_matches_schema() {
    let root = tempfile::tempdir().unwrap();
    let b = matrix_bundle(root.path());
    for kind in ReportKind::PRIMARY {
        assert!(b.files.contains(&kind.file_name()), "missing {kind:?}");
    }
    assert_eq!(validate_bundle(&b), 8);
}

#[test]
fn corpus_bundle_matches_schema() {
    let root = tempfile::tempdir().unwrap();
    let b = corpus_bundle(root.path());
    assert!(b.files.contains(&"completeness.json".to_string()));
    assert_eq!(validate_bundle(&b), 9);
    assert!(b.run.inputs.len() >= 2);
}

#[test]
fn schema_rejects_malformed_reports() {
    let root = tempfile::tempdir().unwrap();
    let b = matrix_bundle(root.path());
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let text = fs::read_to_string(b.dir.join("comparisons.json")).unwrap();
    let good: Value = serde_json::from_str(&text).unwrap();
    assert!(validator.is_valid(&good));

    let mut bad = good.clone();
    bad["data"][0]["p_adj"] = json!(1.5);
    assert!(!validator.is_valid(&bad));
    let mut bad = good.clone();
    bad["kind"] = json!("shap");
    assert!(!validator.is_valid(&bad));
    let mut bad = good.clone();
    bad["run"]["manifest_hash"] = json!("xyz");
    assert!(!validator.is_valid(&bad));
    let mut bad = good;
    bad["extra"] = json!(1);
    assert!(!validator.is_valid(&bad));
}

#[test]
fn identical_inputs_give_identical_bundles() {
    let root = tempfile::tempdir().unwrap();
    let first = matrix_bundle(root.path());
    let snapshot: Vec<Vec<u8>> = first.files.iter().map(|f| fs::read(first.dir.join(f)).unwrap()).collect();
    let second = matrix_bundle(root.path());
    assert_eq!(first.files, second.files);
    for (f, bytes) in first.files.iter().zip(&snapshot) {
        assert_eq!(&fs::read(second.dir.join(f)).unwrap(), bytes, "{f}");
    }
}
