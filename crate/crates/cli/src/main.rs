use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use voicemark::acoustic::{extract_acoustic_with, AcousticConfig};
use voicemark::audio::{decode_wav_with_info, encode_wav, load_for_analysis, SampleFormat};
use voicemark::dataset::{
    assemble, ingest_external, parse_labels, FeatureManifest, Source, SourceTable,
};
use voicemark::linguistic::{extract_linguistic, LinguisticConfig, SentimentConfig};
use voicemark::matrix::FeatureMatrix;
use voicemark::model::{ablation, aggregate_subjects, cross_validate, gain_importance, train_gbt, CvConfig, GbtModel, Instrument};
use voicemark::report::{
    emit_histograms, lime_report, pdp_report, ranked, render_report, run_pipeline, sha256_file, shap_report,
    write_histograms_csv, PipelineConfig, ReportKind, RunManifest,
};
use voicemark::stats::{compare_groups, correlation_matrix};
use voicemark::transcript::ingest;

#[derive(Parser)]
#[command(name = "voicemark", version, about = "Interpretable speech and language markers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Write here instead of stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Analysis {
    /// Feature matrix CSV.
    matrix: PathBuf,
    /// Pipeline config supplying defaults for this stage.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "VOICEMARK_SEED")]
    seed: Option<u64>,
    /// Analyse recordings instead of per-subject medians.
    #[arg(long)]
    no_aggregate: bool,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decode a WAV file and print its format.
    Decode {
        wav: PathBuf,
        /// Also write the 16 kHz mono, peak-normalized analysis signal.
        #[arg(long)]
        analysis_wav: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Acoustic features for WAV files, one row per file stem.
    ExtractAcoustic {
        #[arg(required = true)]
        wavs: Vec<PathBuf>,
        #[arg(long)]
        pitch_floor: Option<f64>,
        #[arg(long)]
        pitch_ceiling: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Linguistic features for CoNLL-U files; `<stem>.trees` and
    /// `<stem>.emb.jsonl` next to each file are picked up when present.
    ExtractLinguistic {
        #[arg(required = true)]
        conllu: Vec<PathBuf>,
        /// Valence lexicon TSV; the bundled sample lexicon is a stand-in only.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        mattr_window: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Validate an emotion/sarcasm probability CSV.
    Ingest {
        csv: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Join source tables and labels into the feature matrix.
    Assemble {
        #[arg(long)]
        acoustic: Option<PathBuf>,
        #[arg(long)]
        linguistic: Option<PathBuf>,
        #[arg(long)]
        external: Option<PathBuf>,
        #[arg(long)]
        labels: PathBuf,
        /// Binarize a `score` column with this instrument's threshold.
        #[arg(long, value_enum)]
        instrument: Option<InstrumentArg>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Write the per-recording completeness report here.
        #[arg(long)]
        completeness: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Welch t-tests with BH adjustment between label groups.
    Stats {
        #[command(flatten)]
        analysis: Analysis,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        standardize: bool,
        /// Emit the correlation matrix instead.
        #[arg(long)]
        correlations: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Train a boosted-tree model on the whole matrix.
    Train {
        #[command(flatten)]
        analysis: Analysis,
        #[command(flatten)]
        gbt: GbtArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Subject-disjoint stratified cross-validation.
    Cv {
        #[command(flatten)]
        analysis: Analysis,
        #[command(flatten)]
        gbt: GbtArgs,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        repeats: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Explain a trained model on a matrix.
    Explain {
        #[arg(value_enum)]
        method: Method,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        analysis: Analysis,
        /// PDP: features to sweep; defaults to the top features by gain.
        #[arg(long)]
        feature: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Cross-validated AUC of each feature group on its own.
    Ablate {
        #[command(flatten)]
        analysis: Analysis,
        #[command(flatten)]
        gbt: GbtArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Run every configured stage and write a report bundle.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Override `run.output`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Normalized per-group histograms for every feature, as CSV.
    Histograms {
        matrix: PathBuf,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Clone)]
struct GbtArgs {
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Shap,
    Lime,
    Pdp,
    Importance,
}

#[derive(Clone, Copy, ValueEnum)]
enum InstrumentArg {
    Phq9,
    Gad7,
    Asrs,
}

impl From<InstrumentArg> for Instrument {
    fn from(a: InstrumentArg) -> Self {
        match a {
            InstrumentArg::Phq9 => Instrument::Phq9,
            InstrumentArg::Gad7 => Instrument::Gad7,
            InstrumentArg::Asrs => Instrument::Asrs,
        }
    }
}

fn emit(output: &Output, text: &[u8]) -> Result<()> {
    match &output.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text)?;
            Ok(())
        }
    }
}

fn emit_json(output: &Output, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(output, text.as_bytes())
}

fn stem(path: &Path) -> Result<String> {
    let name = path.file_name().and_then(|n| n.to_str()).context("file name is not UTF-8")?;
    Ok(name.split('.').next().unwrap_or(name).to_string())
}

fn load_manifest(path: Option<&Path>) -> Result<FeatureManifest> {
    Ok(match path {
        Some(p) => FeatureManifest::load(p)?,
        None => FeatureManifest::builtin(),
    })
}

fn digest(paths: &[&Path]) -> Result<BTreeMap<String, String>> {
    paths
        .iter()
        .map(|p| Ok((p.display().to_string(), sha256_file(p).with_context(|| format!("reading {}", p.display()))?)))
        .collect()
}

/// Everything an analysis subcommand needs: config snapshot, manifest,
/// the matrix as analysed and its run manifest.
struct Prepared {
    cfg: PipelineConfig,
    data: FeatureMatrix,
    run: RunManifest,
    manifest: FeatureManifest,
}

fn prepare(a: &Analysis, extra: &[&Path], tweak: impl FnOnce(&mut PipelineConfig)) -> Result<Prepared> {
    let mut cfg = match &a.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.run.seed = s;
    }
    if a.no_aggregate {
        cfg.run.aggregate_subjects = false;
    }
    cfg.inputs = Default::default();
    cfg.inputs.matrix = Some(a.matrix.clone());
    cfg.inputs.manifest = a.manifest.clone();
    tweak(&mut cfg);
    cfg.validate()?;
    cfg.gbt.seed = cfg.run.seed;
    let manifest = load_manifest(a.manifest.as_deref())?;
    let f = fs::File::open(&a.matrix).with_context(|| format!("opening {}", a.matrix.display()))?;
    let x = FeatureMatrix::read_csv(f)?;
    let data = if cfg.run.aggregate_subjects { aggregate_subjects(&x)? } else { x };
    let mut paths = vec![a.matrix.as_path()];
    paths.extend(a.manifest.as_deref());
    paths.extend_from_slice(extra);
    let run = RunManifest::new(&std::env::args().collect::<Vec<_>>(), &cfg, &manifest, digest(&paths)?);
    Ok(Prepared { cfg, data, run, manifest })
}

impl GbtArgs {
    fn apply(&self, cfg: &mut PipelineConfig) {
        if let Some(v) = self.trees {
            cfg.gbt.n_trees = v;
        }
        if let Some(v) = self.depth {
            cfg.gbt.max_depth = v;
        }
        if let Some(v) = self.learning_rate {
            cfg.gbt.learning_rate = v;
        }
    }
}

fn cv_config(cfg: &PipelineConfig) -> CvConfig {
    CvConfig { k: cfg.cv.k, repeats: cfg.cv.repeats, seed: cfg.run.seed, gbt: cfg.gbt.clone() }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Decode { wav, analysis_wav, output } => {
            let bytes = fs::read(&wav).with_context(|| format!("reading {}", wav.display()))?;
            let (buf, info) = decode_wav_with_info(&bytes)?;
            let norm = load_for_analysis(&bytes)?;
            if let Some(p) = analysis_wav {
                let b = &norm.buffer;
                fs::write(&p, encode_wav(&b.samples, 1, b.sample_rate, SampleFormat::Float32))?;
            }
            emit_json(
                &output,
                &serde_json::json!({
                    "channels": info.channels,
                    "sample_rate": info.sample_rate,
                    "format": format!("{:?}", info.format).to_lowercase(),
                    "frames": buf.len(),
                    "duration": buf.duration(),
                    "peak": buf.peak(),
                    "silent": norm.silent,
                }),
            )
        }
        Command::ExtractAcoustic { wavs, pitch_floor, pitch_ceiling, output } => {
            let d = AcousticConfig::default();
            let cfg = AcousticConfig::with_pitch_range(pitch_floor.unwrap_or(d.pitch.floor), pitch_ceiling.unwrap_or(d.pitch.ceiling));
            let mut rows = Vec::new();
            for p in &wavs {
                let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
                let buf = voicemark::audio::decode_wav(&bytes).with_context(|| p.display().to_string())?;
                rows.push((stem(p)?, extract_acoustic_with(&buf, &cfg)));
            }
            let table = SourceTable::from_acoustic(rows.iter().map(|(id, f)| (id.as_str(), f)))?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            emit(&output, &buf)
        }
        Command::ExtractLinguistic { conllu, lexicon, mattr_window, output } => {
            let sentiment = match &lexicon {
                Some(p) => SentimentConfig::from_file(p)?,
                None => {
                    eprintln!("warning: no --lexicon given, using the bundled sample lexicon");
                    SentimentConfig::sample()
                }
            };
            let cfg = LinguisticConfig { mattr_window, ..LinguisticConfig::with_sentiment(sentiment) };
            let mut rows = Vec::new();
            for p in &conllu {
                let id = stem(p)?;
                let side = |ext: &str| Some(p.with_file_name(format!("{id}.{ext}"))).filter(|q| q.is_file());
                let (trees, emb) = (side("trees"), side("emb.jsonl"));
                let t = ingest(p, trees.as_deref(), emb.as_deref()).with_context(|| p.display().to_string())?;
                rows.push((id, extract_linguistic(&t, &cfg)?));
            }
            let table = SourceTable::from_linguistic(rows.iter().map(|(id, f)| (id.as_str(), f)))?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            emit(&output, &buf)
        }
        Command::Ingest { csv, output } => {
            let table = SourceTable::from_external(&ingest_external(&csv)?)?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            emit(&output, &buf)
        }
        Command::Assemble { acoustic, linguistic, external, labels, instrument, manifest, completeness, output } => {
            let manifest = load_manifest(manifest.as_deref())?;
            let mut sources = Vec::new();
            for (source, path) in [(Source::Acoustic, &acoustic), (Source::Linguistic, &linguistic)] {
                if let Some(p) = path {
                    let f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
                    sources.push(SourceTable::read_csv(source, f, &manifest)?);
                }
            }
            if let Some(p) = &external {
                sources.push(SourceTable::from_external(&ingest_external(p)?)?);
            }
            if sources.is_empty() {
                bail!("give at least one of --acoustic, --linguistic, --external");
            }
            let f = fs::File::open(&labels).with_context(|| format!("opening {}", labels.display()))?;
            let labels = parse_labels(f, instrument.map(Instrument::from))?;
            let a = assemble(&sources, &labels, &manifest)?;
            if let Some(p) = completeness {
                let mut text = serde_json::to_string_pretty(&a.completeness)?;
                text.push('\n');
                fs::write(p, text)?;
            }
            let mut buf = Vec::new();
            a.matrix.write_csv(&mut buf)?;
            emit(&output, &buf)
        }
        Command::Stats { analysis, alpha, standardize, correlations, output } => {
            let c = prepare(&analysis, &[], |cfg| {
                if let Some(a) = alpha {
                    cfg.stats.alpha = a;
                }
                cfg.stats.standardize = standardize;
            })?;
            let text = if correlations {
                render_report(ReportKind::Correlations, &c.run, correlation_matrix(&c.data))
            } else {
                render_report(ReportKind::Comparisons, &c.run, compare_groups(&c.data, c.cfg.stats.alpha, c.cfg.stats.standardize)?)
            };
            emit(&output, text.as_bytes())
        }
        Command::Train { analysis, gbt, output } => {
            let c = prepare(&analysis, &[], |cfg| gbt.apply(cfg))?;
            let mut model = train_gbt(&c.data, &c.cfg.gbt)?;
            model.manifest_hash = Some(c.manifest.hash.clone());
            let mut text = model.to_json();
            text.push('\n');
            emit(&output, text.as_bytes())
        }
        Command::Cv { analysis, gbt, k, repeats, output } => {
            let c = prepare(&analysis, &[], |cfg| {
                gbt.apply(cfg);
                cfg.cv.k = k.unwrap_or(cfg.cv.k);
                cfg.cv.repeats = repeats.unwrap_or(cfg.cv.repeats);
            })?;
            let result = cross_validate(&c.data, &cv_config(&c.cfg))?;
            emit(&output, render_report(ReportKind::Cv, &c.run, result).as_bytes())
        }
        Command::Explain { method, model, analysis, feature, output } => {
            let c = prepare(&analysis, &[model.as_path()], |_| {})?;
            let m = GbtModel::from_json(&fs::read_to_string(&model).with_context(|| format!("reading {}", model.display()))?)?;
            if m.feature_names != c.data.columns {
                bail!("model features do not match the matrix columns");
            }
            if m.manifest_hash.as_ref().is_some_and(|h| *h != c.manifest.hash) {
                eprintln!("warning: model was trained under a different feature manifest");
            }
            let x = &c.data;
            let text = match method {
                Method::Importance => render_report(ReportKind::Importance, &c.run, ranked(gain_importance(&m))),
                Method::Shap => render_report(ReportKind::Shap, &c.run, shap_report(&m, x)?),
                Method::Lime => {
                    let e = &c.cfg.explain;
                    render_report(ReportKind::Lime, &c.run, lime_report(&m, x, e.lime_samples, e.lime_instances, c.cfg.run.seed)?)
                }
                Method::Pdp => {
                    let names: Vec<String> = if feature.is_empty() {
                        gain_importance(&m).into_iter().take(c.cfg.explain.pdp_top).map(|(n, _)| n).collect()
                    } else {
                        feature
                    };
                    render_report(ReportKind::Pdp, &c.run, pdp_report(&m, x, &names, c.cfg.explain.pdp_grid)?)
                }
            };
            emit(&output, text.as_bytes())
        }
        Command::Ablate { analysis, gbt, output } => {
            let c = prepare(&analysis, &[], |cfg| gbt.apply(cfg))?;
            let table = ablation(&[&c.data], &c.manifest.groups(), &cv_config(&c.cfg))?;
            emit(&output, render_report(ReportKind::Ablation, &c.run, table).as_bytes())
        }
        Command::Report { config, output_dir } => {
            let mut cfg = PipelineConfig::load(&config)?.with_env_seed()?;
            if let Some(d) = output_dir {
                cfg.run.output = d;
            }
            let bundle = run_pipeline(&cfg, &std::env::args().collect::<Vec<_>>())?;
            for f in &bundle.files {
                println!("{}", bundle.dir.join(f).display());
            }
            Ok(())
        }
        Command::Histograms { matrix, bins, output } => {
            if bins == 0 {
                bail!("--bins must be positive");
            }
            let f = fs::File::open(&matrix).with_context(|| format!("opening {}", matrix.display()))?;
            let x = FeatureMatrix::read_csv(f)?;
            let mut buf = Vec::new();
            write_histograms_csv(&emit_histograms(&x, bins), &mut buf)?;
            emit(&output, &buf)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
