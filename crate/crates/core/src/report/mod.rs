//! Runs the configured stages end to end and writes a report bundle: one
//! JSON file per report kind, each embedding the run manifest, plus the
//! model, matrix and histogram data.

pub mod config;
pub mod histogram;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::{
    assemble, extract_corpus, parse_labels, CorpusConfig, Completeness, FeatureManifest, Source, SourceTable,
};
use crate::linguistic::{LinguisticConfig, SentimentConfig};
use crate::matrix::FeatureMatrix;
use crate::model::{
    ablation, aggregate_lime, aggregate_subjects, cross_validate, gain_importance, lime_explain, pdp, train_gbt,
    tree_shap, CvConfig, GbtModel, LimeConfig, ModelError, PdpCurve,
};
use crate::stats::{compare_groups, correlation_matrix};

pub use config::PipelineConfig;
pub use histogram::{emit_histograms, write_histograms_csv, Histogram};

pub const SCHEMA_JSON: &str = include_str!("../../data/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Extract,
    Assemble,
    Stats,
    Cv,
    Train,
    Explain,
    Ablate,
    Histograms,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("stage serializes");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage} stage failed: {message}")]
    Stage { stage: Stage, message: String },
}

fn at<E: fmt::Display>(stage: Stage) -> impl Fn(E) -> ReportError {
    move |e| ReportError::Stage { stage, message: e.to_string() }
}

/// The seven report kinds, plus the supporting outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Comparisons,
    Correlations,
    Importance,
    Shap,
    Lime,
    Pdp,
    Ablation,
    Cv,
    Completeness,
}

impl ReportKind {
    pub const PRIMARY: [ReportKind; 7] = [
        ReportKind::Comparisons,
        ReportKind::Correlations,
        ReportKind::Importance,
        ReportKind::Shap,
        ReportKind::Lime,
        ReportKind::Pdp,
        ReportKind::Ablation,
    ];

    pub fn file_name(self) -> String {
        let s = serde_json::to_value(self).expect("kind serializes");
        format!("{}.json", s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: Vec<String>,
    pub config: PipelineConfig,
    pub manifest_version: String,
    pub manifest_hash: String,
    /// Input path → sha256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub created_unix: u64,
}

impl RunManifest {
    pub fn new(command: &[String], config: &PipelineConfig, manifest: &FeatureManifest, inputs: BTreeMap<String, String>) -> Self {
        Self {
            tool: "voicemark".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.to_vec(),
            config: config.clone(),
            manifest_version: manifest.version.clone(),
            manifest_hash: manifest.hash.clone(),
            inputs,
            created_unix: resolve_timestamp(config.run.timestamp),
        }
    }
}

/// Pretty JSON of a report envelope, newline-terminated.
pub fn render_report<T: Serialize>(kind: ReportKind, run: &RunManifest, data: T) -> String {
    let mut text = serde_json::to_string_pretty(&Envelope { kind, run, data }).expect("report serializes");
    text.push('\n');
    text
}

#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    kind: ReportKind,
    run: &'a RunManifest,
    data: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub feature: String,
    pub value: f64,
}

pub fn ranked(v: Vec<(String, f64)>) -> Vec<Ranked> {
    v.into_iter().map(|(feature, value)| Ranked { feature, value }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapReport {
    pub features: Vec<String>,
    pub row_ids: Vec<String>,
    pub base_value: f64,
    /// One row of φ per explained row.
    pub values: Vec<Vec<f64>>,
    /// Mean |φ| per feature, descending.
    pub mean_abs: Vec<Ranked>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimeReport {
    pub row_ids: Vec<String>,
    pub n_samples: usize,
    /// Mean |weight| per feature, descending.
    pub mean_abs: Vec<Ranked>,
}

/// TreeSHAP values for every row of `x`.
pub fn shap_report(model: &GbtModel, x: &FeatureMatrix) -> Result<ShapReport, ModelError> {
    let mut values = Vec::with_capacity(x.n_rows());
    let mut base_value = model.base_score;
    for r in &x.rows {
        let e = tree_shap(model, r)?;
        base_value = e.base_value;
        values.push(e.phi);
    }
    let n = values.len().max(1) as f64;
    let mut mean_abs: Vec<(String, f64)> = x
        .columns
        .iter()
        .enumerate()
        .map(|(j, f)| (f.clone(), values.iter().map(|v| v[j].abs()).sum::<f64>() / n))
        .collect();
    mean_abs.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ShapReport { features: x.columns.clone(), row_ids: x.row_ids.clone(), base_value, values, mean_abs: ranked(mean_abs) })
}

/// LIME explanations of the first `instances` rows (0 = all), row `i`
/// seeded with `seed + i`.
pub fn lime_report(
    model: &GbtModel,
    x: &FeatureMatrix,
    n_samples: usize,
    instances: usize,
    seed: u64,
) -> Result<LimeReport, ModelError> {
    let count = if instances == 0 { x.n_rows() } else { instances.min(x.n_rows()) };
    let mut exps = Vec::with_capacity(count);
    for (i, r) in x.rows.iter().take(count).enumerate() {
        let cfg = LimeConfig { n_samples, seed: seed.wrapping_add(i as u64), ..LimeConfig::default() };
        exps.push(lime_explain(model, r, x, &cfg)?);
    }
    Ok(LimeReport { row_ids: x.row_ids[..count].to_vec(), n_samples, mean_abs: ranked(aggregate_lime(&x.columns, &exps)) })
}

pub fn pdp_report(model: &GbtModel, x: &FeatureMatrix, features: &[String], grid: usize) -> Result<Vec<PdpCurve>, ModelError> {
    features
        .iter()
        .map(|n| {
            let j = x.column_index(n).ok_or_else(|| ModelError::Config(format!("unknown feature {n}")))?;
            pdp(model, x, j, grid)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub dir: PathBuf,
    /// File names in the bundle, sorted.
    pub files: Vec<String>,
    pub run: RunManifest,
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

fn resolve_timestamp(configured: Option<u64>) -> u64 {
    configured
        .or_else(|| std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.trim().parse().ok()))
        .unwrap_or_else(|| {
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
        })
}

struct Writer<'a> {
    dir: &'a Path,
    run: Option<RunManifest>,
    files: Vec<String>,
}

impl Writer<'_> {
    fn raw(&mut self, name: &str, bytes: &[u8]) -> Result<(), ReportError> {
        fs::write(self.dir.join(name), bytes).map_err(at(Stage::Write))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn report<T: Serialize>(&mut self, kind: ReportKind, data: T) -> Result<(), ReportError> {
        let run = self.run.as_ref().expect("run manifest set before reports");
        let text = render_report(kind, run, data);
        self.raw(&kind.file_name(), text.as_bytes())
    }
}

/// Loads the feature matrix named by the config's inputs, digesting every
/// file read.
fn load_matrix(
    cfg: &PipelineConfig,
    manifest: &FeatureManifest,
    digests: &mut BTreeMap<String, String>,
) -> Result<(FeatureMatrix, Option<Vec<Completeness>>), ReportError> {
    let mut digest = |p: &Path, stage: Stage| -> Result<(), ReportError> {
        digests.insert(p.display().to_string(), sha256_file(p).map_err(at(stage))?);
        Ok(())
    };
    let i = &cfg.inputs;
    if let Some(path) = &i.matrix {
        digest(path, Stage::Assemble)?;
        let f = fs::File::open(path).map_err(at(Stage::Assemble))?;
        let mut x = FeatureMatrix::read_csv(f).map_err(at(Stage::Assemble))?;
        for c in &mut x.columns {
            match manifest.resolve(c) {
                Some(name) => *c = name.to_string(),
                None => return Err(at(Stage::Assemble)(format!("column {c} is not in the feature manifest"))),
            }
        }
        return Ok((x, None));
    }

    let (sources, labels) = if let Some(dir) = &i.corpus {
        let sentiment = match &cfg.extract.lexicon {
            Some(p) => {
                digest(p, Stage::Extract)?;
                SentimentConfig::from_file(p).map_err(at(Stage::Extract))?
            }
            None => SentimentConfig::sample(),
        };
        let linguistic = LinguisticConfig { mattr_window: cfg.extract.mattr_window, ..LinguisticConfig::with_sentiment(sentiment) };
        let corpus_cfg = CorpusConfig { acoustic: cfg.extract.acoustic.clone(), linguistic, instrument: i.instrument };
        let ex = extract_corpus(dir, &corpus_cfg).map_err(at(Stage::Extract))?;
        for p in &ex.inputs {
            digest(p, Stage::Extract)?;
        }
        (ex.sources, ex.labels)
    } else {
        let mut sources = Vec::new();
        for (source, path) in [(Source::Acoustic, &i.acoustic), (Source::Linguistic, &i.linguistic)] {
            if let Some(p) = path {
                digest(p, Stage::Assemble)?;
                let f = fs::File::open(p).map_err(at(Stage::Assemble))?;
                sources.push(SourceTable::read_csv(source, f, manifest).map_err(at(Stage::Assemble))?);
            }
        }
        if let Some(p) = &i.external {
            digest(p, Stage::Assemble)?;
            let records = crate::dataset::ingest_external(p).map_err(at(Stage::Assemble))?;
            sources.push(SourceTable::from_external(&records).map_err(at(Stage::Assemble))?);
        }
        let p = i.labels.as_ref().ok_or_else(|| ReportError::Config("inputs.labels is required".into()))?;
        digest(p, Stage::Assemble)?;
        let f = fs::File::open(p).map_err(at(Stage::Assemble))?;
        (sources, parse_labels(f, i.instrument).map_err(at(Stage::Assemble))?)
    };
    let a = assemble(&sources, &labels, manifest).map_err(at(Stage::Assemble))?;
    Ok((a.matrix, Some(a.completeness)))
}

fn run_into(cfg: &PipelineConfig, command: &[String], dir: &Path) -> Result<Vec<String>, ReportError> {
    let manifest = match &cfg.inputs.manifest {
        Some(p) => FeatureManifest::load(p).map_err(at(Stage::Config))?,
        None => FeatureManifest::builtin(),
    };
    manifest.check_registries().map_err(at(Stage::Config))?;
    let mut digests = BTreeMap::new();
    if let Some(p) = &cfg.inputs.manifest {
        digests.insert(p.display().to_string(), sha256_file(p).map_err(at(Stage::Config))?);
    }
    let (x, completeness) = load_matrix(cfg, &manifest, &mut digests)?;

    let mut w = Writer { dir, run: None, files: Vec::new() };
    w.run = Some(RunManifest::new(command, cfg, &manifest, digests));

    let mut buf = Vec::new();
    x.write_csv(&mut buf).map_err(at(Stage::Write))?;
    w.raw("matrix.csv", &buf)?;
    if let Some(c) = completeness {
        w.report(ReportKind::Completeness, c)?;
    }

    let data = if cfg.run.aggregate_subjects { aggregate_subjects(&x).map_err(at(Stage::Assemble))? } else { x.clone() };
    let seed = cfg.run.seed;

    if cfg.stats.enabled {
        let cmp = compare_groups(&data, cfg.stats.alpha, cfg.stats.standardize).map_err(at(Stage::Stats))?;
        w.report(ReportKind::Comparisons, cmp)?;
        if cfg.stats.correlations {
            w.report(ReportKind::Correlations, correlation_matrix(&data))?;
        }
    }

    let gbt = crate::model::GbtConfig { seed, ..cfg.gbt.clone() };
    let cv_cfg = CvConfig { k: cfg.cv.k, repeats: cfg.cv.repeats, seed, gbt: gbt.clone() };
    if cfg.cv.enabled {
        let cv = cross_validate(&data, &cv_cfg).map_err(at(Stage::Cv))?;
        w.report(ReportKind::Cv, cv)?;
    }

    let explain = &cfg.explain;
    if cfg.train.enabled {
        let mut model = train_gbt(&data, &gbt).map_err(at(Stage::Train))?;
        model.manifest_hash = Some(manifest.hash.clone());
        let mut text = model.to_json();
        text.push('\n');
        w.raw("model.json", text.as_bytes())?;
        let importance = gain_importance(&model);
        w.report(ReportKind::Importance, ranked(importance.clone()))?;

        if explain.shap {
            w.report(ReportKind::Shap, shap_report(&model, &data).map_err(at(Stage::Explain))?)?;
        }
        if explain.lime {
            let r = lime_report(&model, &data, explain.lime_samples, explain.lime_instances, seed).map_err(at(Stage::Explain))?;
            w.report(ReportKind::Lime, r)?;
        }
        if explain.pdp {
            let names: Vec<String> = importance.iter().take(explain.pdp_top).map(|(n, _)| n.clone()).collect();
            w.report(ReportKind::Pdp, pdp_report(&model, &data, &names, explain.pdp_grid).map_err(at(Stage::Explain))?)?;
        }
    }

    if cfg.ablate.enabled {
        let groups = manifest.groups();
        let table = ablation(&[&data], &groups, &cv_cfg).map_err(at(Stage::Ablate))?;
        w.report(ReportKind::Ablation, table)?;
    }

    if cfg.histograms.enabled {
        let hists = emit_histograms(&x, cfg.histograms.bins);
        let mut buf = Vec::new();
        write_histograms_csv(&hists, &mut buf).map_err(at(Stage::Histograms))?;
        w.raw("histograms.csv", &buf)?;
    }

    let run = w.run.take().expect("set above");
    let mut text = serde_json::to_string_pretty(&run).map_err(at(Stage::Write))?;
    text.push('\n');
    w.raw("run_manifest.json", text.as_bytes())?;
    w.files.sort();
    Ok(w.files)
}

/// Runs every enabled stage and writes the bundle to `cfg.run.output`.
/// Outputs are staged in a sibling directory and moved into place only when
/// all stages succeed; a previous bundle at the output path is replaced.
pub fn run_pipeline(cfg: &PipelineConfig, command: &[String]) -> Result<Bundle, ReportError> {
    cfg.validate()?;
    let out = &cfg.run.output;
    if out.exists() && !out.join("run_manifest.json").is_file() {
        return Err(ReportError::Config(format!("{} exists and is not a report bundle", out.display())));
    }
    let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "bundle".into());
    let staging = out.with_file_name(format!(".{name}.partial"));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(at(Stage::Write))?;
    }
    fs::create_dir_all(&staging).map_err(at(Stage::Write))?;
    let files = match run_into(cfg, command, &staging) {
        Ok(f) => f,
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
    };
    let run: RunManifest = serde_json::from_slice(&fs::read(staging.join("run_manifest.json")).map_err(at(Stage::Write))?)
        .map_err(at(Stage::Write))?;
    if out.exists() {
        fs::remove_dir_all(out).map_err(at(Stage::Write))?;
    }
    fs::rename(&staging, out).map_err(at(Stage::Write))?;
    Ok(Bundle { dir: out.clone(), files, run })
}

/// The bundled JSON Schema that every report file validates against.
pub fn schema() -> serde_json::Value {
    serde_json::from_str(SCHEMA_JSON).expect("bundled schema is valid JSON")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::compare_groups;
    use crate::synth::{synthetic_matrix, SyntheticMatrixConfig};

    fn fixture(dir: &Path) -> PipelineConfig {
        let m = FeatureManifest::builtin();
        let x = synthetic_matrix(&SyntheticMatrixConfig { subjects_per_class: 6, ..Default::default() }, &m);
        let path = dir.join("matrix.csv");
        x.write_csv(fs::File::create(&path).unwrap()).unwrap();
        let mut cfg = PipelineConfig::default();
        cfg.inputs.matrix = Some(path);
        cfg.run.output = dir.join("out");
        cfg.run.timestamp = Some(0);
        cfg.gbt.n_trees = 20;
        cfg.explain.lime_samples = 100;
        cfg
    }

    #[test]
    fn stats_only_is_pass_through() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = fixture(dir.path());
        cfg.cv.enabled = false;
        cfg.train.enabled = false;
        cfg.ablate.enabled = false;
        cfg.histograms.enabled = false;
        cfg.stats.correlations = false;
        let b = run_pipeline(&cfg, &[]).unwrap();
        assert_eq!(b.files, vec!["comparisons.json", "matrix.csv", "run_manifest.json"]);
        let report: serde_json::Value = serde_json::from_slice(&fs::read(b.dir.join("comparisons.json")).unwrap()).unwrap();
        let x = FeatureMatrix::read_csv(fs::File::open(cfg.inputs.matrix.as_ref().unwrap()).unwrap()).unwrap();
        let direct = compare_groups(&aggregate_subjects(&x).unwrap(), 0.05, false).unwrap();
        assert_eq!(report["data"], serde_json::to_value(direct).unwrap());
        assert_eq!(report["run"]["manifest_hash"], FeatureManifest::builtin().hash);
    }

    #[test]
    fn failed_stage_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = fixture(dir.path());
        cfg.cv.k = 50;
        let err = run_pipeline(&cfg, &[]).unwrap_err();
        assert!(matches!(err, ReportError::Stage { stage: Stage::Cv, .. }), "{err}");
        assert!(!cfg.run.output.exists());
        assert!(!dir.path().join(".out.partial").exists());
    }

    #[test]
    fn refuses_to_replace_foreign_directory() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = fixture(dir.path());
        fs::create_dir_all(&cfg.run.output).unwrap();
        fs::write(cfg.run.output.join("notes.txt"), "keep").unwrap();
        assert!(matches!(run_pipeline(&cfg, &[]), Err(ReportError::Config(_))));
        assert!(cfg.run.output.join("notes.txt").exists());
    }

    #[test]
    fn full_bundle_has_every_kind() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = fixture(dir.path());
        let b = run_pipeline(&cfg, &["voicemark".into(), "report".into()]).unwrap();
        for kind in ReportKind::PRIMARY {
            assert!(b.files.contains(&kind.file_name()), "{kind:?}");
        }
        for f in ["cv.json", "model.json", "histograms.csv", "run_manifest.json", "matrix.csv"] {
            assert!(b.files.contains(&f.to_string()), "{f}");
        }
        assert_eq!(b.run.command, vec!["voicemark", "report"]);
        assert_eq!(b.run.inputs.len(), 1);
    }
}
