//! Seeded synthetic data: a labelled feature matrix with known group
//! differences, and a small on-disk corpus covering every input format.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::audio::{encode_wav, SampleFormat};
use crate::dataset::FeatureManifest;
use crate::matrix::FeatureMatrix;
use crate::transcript::{write_conllu, AnnotatedTranscript, Sentence, Token};

pub const DEFAULT_SHIFTED: [&str; 5] = ["F0_mean", "HNR", "pause_mean", "MATTR", "first_order_coherence"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticMatrixConfig {
    pub subjects_per_class: usize,
    pub recordings_per_subject: usize,
    /// Mean shift of the label-1 group, in units of the feature's SD.
    pub shift_sd: f64,
    pub shifted: Vec<String>,
    pub seed: u64,
}

impl Default for SyntheticMatrixConfig {
    fn default() -> Self {
        Self {
            subjects_per_class: 30,
            recordings_per_subject: 3,
            shift_sd: 1.0,
            shifted: DEFAULT_SHIFTED.map(String::from).to_vec(),
            seed: 0,
        }
    }
}

/// Recording-level matrix over the manifest columns. Every value is drawn
/// independently from N(μ_j, σ_j²) with per-column μ_j and σ_j; label-1
/// subjects get `shift_sd · σ_j` added on the shifted columns. Subjects
/// alternate labels: `s000` is 0, `s001` is 1 and so on.
pub fn synthetic_matrix(cfg: &SyntheticMatrixConfig, manifest: &FeatureManifest) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names = manifest.names();
    let params: Vec<(f64, f64, bool)> = names
        .iter()
        .map(|n| {
            let mu = rng.random_range(-50.0..50.0);
            let sigma = rng.random_range(0.1..10.0);
            (mu, sigma, cfg.shifted.contains(n))
        })
        .collect();
    let n_subjects = 2 * cfg.subjects_per_class;
    let mut rows = Vec::new();
    let (mut row_ids, mut subject_ids, mut labels) = (Vec::new(), Vec::new(), Vec::new());
    for s in 0..n_subjects {
        let label = (s % 2) as u8;
        for r in 0..cfg.recordings_per_subject {
            let row = params
                .iter()
                .map(|&(mu, sigma, shifted)| {
                    let z: f64 = rng.sample(StandardNormal);
                    let shift = if shifted && label == 1 { cfg.shift_sd } else { 0.0 };
                    mu + sigma * (z + shift)
                })
                .collect();
            rows.push(row);
            row_ids.push(format!("s{s:03}_r{r}"));
            subject_ids.push(format!("s{s:03}"));
            labels.push(label);
        }
    }
    FeatureMatrix::new(names, rows, row_ids, subject_ids, labels).expect("consistent shapes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticCorpusConfig {
    pub subjects: usize,
    pub recordings_per_subject: usize,
    pub sample_rate: u32,
    pub seed: u64,
}

impl Default for SyntheticCorpusConfig {
    fn default() -> Self {
        Self { subjects: 4, recordings_per_subject: 2, sample_rate: 16_000, seed: 0 }
    }
}

/// Voiced harmonic segments separated by silences, with slight pitch
/// drift and a low noise floor.
fn synthetic_speech(rng: &mut ChaCha8Rng, rate: u32) -> Vec<f64> {
    let rate_f = rate as f64;
    let mut out = Vec::new();
    let silence = |out: &mut Vec<f64>, secs: f64, rng: &mut ChaCha8Rng| {
        for _ in 0..(secs * rate_f) as usize {
            out.push(rng.random_range(-1e-4..1e-4));
        }
    };
    silence(&mut out, 0.1, rng);
    let segments = rng.random_range(3..=5);
    for seg in 0..segments {
        let f0 = rng.random_range(110.0..230.0);
        let drift = rng.random_range(-15.0..15.0);
        let amp = rng.random_range(0.3..0.7);
        let secs = rng.random_range(0.4..0.9);
        let n = (secs * rate_f) as usize;
        let mut phase = 0.0;
        for i in 0..n {
            let t = i as f64 / n as f64;
            let f = f0 + drift * t;
            phase += 2.0 * PI * f / rate_f;
            let env = (PI * t).sin().powf(0.3);
            let v = phase.sin() + 0.5 * (2.0 * phase).sin() + 0.25 * (3.0 * phase).sin();
            out.push(amp * env * v / 1.75 + rng.random_range(-2e-3..2e-3));
        }
        if seg + 1 < segments {
            let pause = rng.random_range(0.25..1.4);
            silence(&mut out, pause, rng);
        }
    }
    silence(&mut out, 0.1, rng);
    out
}

struct Word {
    form: &'static str,
    upos: &'static str,
    feats: &'static str,
    head: usize,
    deprel: &'static str,
}

const fn w(form: &'static str, upos: &'static str, feats: &'static str, head: usize, deprel: &'static str) -> Word {
    Word { form, upos, feats, head, deprel }
}

const NOUNS: [(&str, &str); 6] = [("dog", "dogs"), ("friend", "friends"), ("day", "days"), ("job", "jobs"), ("plan", "plans"), ("house", "houses")];
const PAST: [&str; 5] = ["liked", "missed", "helped", "visited", "finished"];
const PRES: [&str; 5] = ["like", "miss", "help", "visit", "finish"];
const ADJS: [&str; 6] = ["good", "bad", "happy", "sad", "great", "tired"];

fn sentence(rng: &mut ChaCha8Rng) -> (Vec<Word>, String) {
    let noun = |rng: &mut ChaCha8Rng| {
        let (s, p) = *NOUNS.choose(rng).expect("nonempty");
        if rng.random_bool(0.5) { (s, "Number=Sing", "NN") } else { (p, "Number=Plur", "NNS") }
    };
    match rng.random_range(0..4) {
        0 => {
            let (n1, f1, t1) = noun(rng);
            let (n2, f2, t2) = noun(rng);
            let v = *PAST.choose(rng).expect("nonempty");
            let words = vec![
                w("the", "DET", "", 2, "det"),
                w(n1, "NOUN", f1, 3, "nsubj"),
                w(v, "VERB", "Tense=Past|VerbForm=Fin", 0, "root"),
                w("the", "DET", "", 5, "det"),
                w(n2, "NOUN", f2, 3, "obj"),
                w(".", "PUNCT", "", 3, "punct"),
            ];
            let tree = format!("(ROOT (S (NP (DT the) ({t1} {n1})) (VP (VBD {v}) (NP (DT the) ({t2} {n2}))) (. .)))");
            (words, tree)
        }
        1 => {
            let (n1, f1, t1) = noun(rng);
            let (n2, f2, t2) = noun(rng);
            let v = *PAST.choose(rng).expect("nonempty");
            let aux = if f1 == "Number=Plur" { "were" } else { "was" };
            let words = vec![
                w("the", "DET", "", 2, "det"),
                w(n1, "NOUN", f1, 4, "nsubj:pass"),
                w(aux, "AUX", "Tense=Past|VerbForm=Fin", 4, "aux:pass"),
                w(v, "VERB", "Tense=Past|VerbForm=Part|Voice=Pass", 0, "root"),
                w("by", "ADP", "", 7, "case"),
                w("the", "DET", "", 7, "det"),
                w(n2, "NOUN", f2, 4, "obl"),
                w(".", "PUNCT", "", 4, "punct"),
            ];
            let tree = format!(
                "(ROOT (S (NP (DT the) ({t1} {n1})) (VP (VBD {aux}) (VP (VBN {v}) (PP (IN by) (NP (DT the) ({t2} {n2}))))) (. .)))"
            );
            (words, tree)
        }
        2 => {
            let n = NOUNS.choose(rng).expect("nonempty").0;
            let a = *ADJS.choose(rng).expect("nonempty");
            let words = vec![
                w("i", "PRON", "Person=1|PronType=Prs", 2, "nsubj"),
                w("think", "VERB", "Tense=Pres|VerbForm=Fin", 0, "root"),
                w("that", "SCONJ", "", 7, "mark"),
                w("the", "DET", "", 5, "det"),
                w(n, "NOUN", "Number=Sing", 7, "nsubj"),
                w("is", "AUX", "Tense=Pres|VerbForm=Fin", 7, "cop"),
                w(a, "ADJ", "", 2, "ccomp"),
                w(".", "PUNCT", "", 2, "punct"),
            ];
            let tree = format!(
                "(ROOT (S (NP (PRP i)) (VP (VBP think) (SBAR (IN that) (S (NP (DT the) (NN {n})) (VP (VBZ is) (ADJP (JJ {a})))))) (. .)))"
            );
            (words, tree)
        }
        _ => {
            let p = NOUNS.choose(rng).expect("nonempty").1;
            let v = *PRES.choose(rng).expect("nonempty");
            let words = vec![
                w("um", "INTJ", "", 3, "discourse"),
                w("we", "PRON", "Number=Plur|Person=1|PronType=Prs", 3, "nsubj"),
                w(v, "VERB", "Tense=Pres|VerbForm=Fin", 0, "root"),
                w(p, "NOUN", "Number=Plur", 3, "obj"),
                w(".", "PUNCT", "", 3, "punct"),
            ];
            let tree = format!("(ROOT (S (INTJ (UH um)) (NP (PRP we)) (VP (VBP {v}) (NP (NNS {p}))) (. .)))");
            (words, tree)
        }
    }
}

fn to_tokens(words: &[Word]) -> Vec<Token> {
    words
        .iter()
        .enumerate()
        .map(|(i, x)| Token {
            id: i + 1,
            form: x.form.to_string(),
            lemma: x.form.to_string(),
            upos: x.upos.to_string(),
            feats: x
                .feats
                .split('|')
                .filter(|kv| !kv.is_empty())
                .filter_map(|kv| kv.split_once('='))
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect::<BTreeMap<_, _>>(),
            head: x.head,
            deprel: x.deprel.to_string(),
        })
        .collect()
}

/// Writes a corpus in the layout read by
/// [`extract_corpus`](crate::dataset::extract_corpus): audio, CoNLL-U
/// transcripts with tree and embedding sidecars, external probabilities
/// and binary labels. Subjects alternate labels.
pub fn write_synthetic_corpus(dir: &Path, cfg: &SyntheticCorpusConfig) -> io::Result<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    fs::create_dir_all(dir.join("audio"))?;
    fs::create_dir_all(dir.join("transcripts"))?;
    let mut labels = String::from("recording_id,subject_id,label\n");
    let mut external = String::from("recording_id,emotion_neu,emotion_hap,emotion_ang,emotion_sad,sarcasm_prob\n");
    let mut ids = Vec::new();
    for s in 0..cfg.subjects {
        for r in 0..cfg.recordings_per_subject {
            let id = format!("s{s:03}_r{r}");
            let audio = synthetic_speech(&mut rng, cfg.sample_rate);
            fs::write(dir.join("audio").join(format!("{id}.wav")), encode_wav(&audio, 1, cfg.sample_rate, SampleFormat::Pcm16))?;

            let n_sent = rng.random_range(4..=7);
            let mut sentences = Vec::with_capacity(n_sent);
            let mut trees = String::new();
            let mut emb = String::new();
            let topic: Vec<f64> = (0..8).map(|_| rng.sample(StandardNormal)).collect();
            for i in 0..n_sent {
                let (words, tree) = sentence(&mut rng);
                sentences.push(Sentence { tokens: to_tokens(&words) });
                trees.push_str(&tree);
                trees.push('\n');
                let v: Vec<f64> = topic.iter().map(|t| t + 0.5 * rng.sample::<f64, _>(StandardNormal)).collect();
                emb.push_str(&serde_json::json!({ "index": i, "vector": v }).to_string());
                emb.push('\n');
            }
            let t = AnnotatedTranscript { sentences, trees: None, embeddings: None, raw_text: None };
            let tdir = dir.join("transcripts");
            fs::write(tdir.join(format!("{id}.conllu")), write_conllu(&t))?;
            fs::write(tdir.join(format!("{id}.trees")), trees)?;
            fs::write(tdir.join(format!("{id}.emb.jsonl")), emb)?;

            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let p: Vec<String> = raw.iter().map(|x| format!("{:.6}", x / sum)).collect();
            external.push_str(&format!("{id},{},{:.6}\n", p.join(","), rng.random_range(0.0..1.0)));
            labels.push_str(&format!("{id},s{s:03},{}\n", s % 2));
            ids.push(id);
        }
    }
    fs::write(dir.join("labels.csv"), labels)?;
    fs::write(dir.join("external.csv"), external)?;
    Ok(ids)
}
