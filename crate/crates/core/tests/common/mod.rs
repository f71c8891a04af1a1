//! Brute-force oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voicemark::model::{GbtConfig, GbtModel, Node, Tree};

/// Random tree of depth at most `depth` with consistent covers.
pub fn random_tree(rng: &mut ChaCha8Rng, n_features: usize, depth: usize) -> Tree {
    fn grow(rng: &mut ChaCha8Rng, nodes: &mut Vec<Node>, d: usize, cover: f64, n_features: usize, depth: usize) -> usize {
        let id = nodes.len();
        if d == depth || (d > 0 && rng.random_bool(0.25)) {
            nodes.push(Node::Leaf { value: rng.random_range(-2.0..2.0), cover });
            return id;
        }
        nodes.push(Node::Leaf { value: 0.0, cover });
        let feature = rng.random_range(0..n_features);
        let threshold = rng.random_range(-1.0..1.0);
        let frac = rng.random_range(0.05..0.95);
        let left = grow(rng, nodes, d + 1, cover * frac, n_features, depth);
        let right = grow(rng, nodes, d + 1, cover * (1.0 - frac), n_features, depth);
        nodes[id] = Node::Split { feature, threshold, left, right, gain: 1.0, cover };
        id
    }
    let mut nodes = Vec::new();
    let cover = rng.random_range(10.0..200.0);
    grow(rng, &mut nodes, 0, cover, n_features, depth);
    Tree { nodes }
}

/// Seeded ensemble with up to `max_features` features, `max_trees` trees
/// and depth `max_depth`.
pub fn random_ensemble(seed: u64, max_features: usize, max_trees: usize, max_depth: usize) -> GbtModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(1..=max_features);
    let n_trees = rng.random_range(1..=max_trees);
    let names = (0..d).map(|j| format!("f{j}")).collect();
    let mut m = GbtModel::constant(names, rng.random_range(-1.0..1.0));
    m.learning_rate = rng.random_range(0.05..1.0);
    m.config = GbtConfig { learning_rate: m.learning_rate, ..m.config };
    m.trees = (0..n_trees).map(|_| random_tree(&mut rng, d, max_depth)).collect();
    m
}

/// Expected leaf value when only features in `known` (bitmask) follow `x`;
/// unknown splits average their children by cover.
pub fn conditional_value(t: &Tree, i: usize, x: &[f64], known: u32) -> f64 {
    match &t.nodes[i] {
        Node::Leaf { value, .. } => *value,
        Node::Split { feature, threshold, left, right, cover, .. } => {
            if known & (1 << feature) != 0 {
                let next = if x[*feature] < *threshold { *left } else { *right };
                conditional_value(t, next, x, known)
            } else {
                let (l, r) = (&t.nodes[*left], &t.nodes[*right]);
                (l.cover() * conditional_value(t, *left, x, known) + r.cover() * conditional_value(t, *right, x, known)) / cover
            }
        }
    }
}

/// Exact Shapley values of the ensemble margin by enumerating every subset.
pub fn brute_shapley(m: &GbtModel, x: &[f64]) -> (Vec<f64>, f64) {
    let d = m.n_features();
    let full = 1u32 << d;
    let v: Vec<f64> = (0..full)
        .map(|s| m.base_score + m.learning_rate * m.trees.iter().map(|t| conditional_value(t, 0, x, s)).sum::<f64>())
        .collect();
    let mut fact = vec![1.0f64; d + 1];
    for k in 1..=d {
        fact[k] = fact[k - 1] * k as f64;
    }
    let mut phi = vec![0.0; d];
    for (i, p) in phi.iter_mut().enumerate() {
        let bit = 1u32 << i;
        for s in (0..full).filter(|s| s & bit == 0) {
            let k = s.count_ones() as usize;
            *p += fact[k] * fact[d - k - 1] / fact[d] * (v[(s | bit) as usize] - v[s as usize]);
        }
    }
    (phi, v[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphOracle {
    pub nodes: usize,
    pub edges: usize,
    pub repeated: usize,
    pub l1: usize,
    pub l2: usize,
    pub l3: usize,
    pub largest_scc: usize,
    pub density: f64,
    pub diameter: f64,
    pub avg_shortest_path: f64,
}

/// Graph statistics from an adjacency count matrix: Warshall closure for
/// strong components, triple enumeration for 3-cycles and Floyd-Warshall on
/// the undirected simple projection.
pub fn graph_oracle(sentences: &[Vec<&str>]) -> GraphOracle {
    let mut names: Vec<&str> = Vec::new();
    for s in sentences {
        for w in s {
            if !names.contains(w) {
                names.push(w);
            }
        }
    }
    let n = names.len();
    let idx = |w: &str| names.iter().position(|x| *x == w).unwrap();
    let mut c = vec![vec![0usize; n]; n];
    for s in sentences {
        for pair in s.windows(2) {
            c[idx(pair[0])][idx(pair[1])] += 1;
        }
    }
    let edges = c.iter().flatten().sum();
    let repeated = c.iter().flatten().filter(|&&m| m >= 2).count();
    let l1 = (0..n).filter(|&i| c[i][i] > 0).count();
    let mut l2 = 0;
    let mut l3 = 0;
    let mut distinct = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j && c[i][j] > 0 {
                distinct += 1;
                if i < j && c[j][i] > 0 {
                    l2 += 1;
                }
                for k in 0..n {
                    if k != i && k != j && c[j][k] > 0 && c[k][i] > 0 {
                        l3 += 1;
                    }
                }
            }
        }
    }
    let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j || c[i][j] > 0).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let largest_scc = (0..n).map(|i| (0..n).filter(|&j| reach[i][j] && reach[j][i]).count()).max().unwrap_or(0);
    let density = if n <= 1 { 0.0 } else { distinct as f64 / (n * (n - 1)) as f64 };

    let inf = usize::MAX / 4;
    let mut dist: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else if c[i][j] + c[j][i] > 0 { 1 } else { inf }).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }
    let (mut diameter, mut aspl) = (0.0, 0.0);
    if n > 1 {
        let mut best: Vec<usize> = Vec::new();
        for i in 0..n {
            let comp: Vec<usize> = (0..n).filter(|&j| dist[i][j] < inf).collect();
            if comp.len() > best.len() {
                best = comp;
            }
        }
        let (mut max_d, mut sum, mut pairs) = (0, 0, 0);
        for &u in &best {
            for &v in &best {
                if u != v {
                    max_d = max_d.max(dist[u][v]);
                    sum += dist[u][v];
                    pairs += 1;
                }
            }
        }
        diameter = max_d as f64;
        aspl = if pairs == 0 { 0.0 } else { sum as f64 / pairs as f64 };
    }
    GraphOracle { nodes: n, edges, repeated, l1, l2, l3: l3 / 3, largest_scc, density, diameter, avg_shortest_path: aspl }
}

/// The library's graph statistics in oracle form.
pub fn graph_actual(sentences: &[Vec<&str>]) -> GraphOracle {
    use voicemark::linguistic::{graph_metrics, WordGraph};
    let g = WordGraph::from_sequences(sentences);
    let words = sentences.iter().map(Vec::len).sum();
    let f = graph_metrics(&g, words);
    GraphOracle {
        nodes: f.graph_nodes as usize,
        edges: f.graph_edges as usize,
        repeated: f.graph_repeated_edges as usize,
        l1: f.graph_loops_l1 as usize,
        l2: f.graph_loops_l2 as usize,
        l3: f.graph_loops_l3 as usize,
        largest_scc: f.graph_largest_scc as usize,
        density: f.graph_density,
        diameter: f.graph_diameter,
        avg_shortest_path: f.graph_avg_shortest_path,
    }
}

/// Letters of the four-symbol alphabet for string index `code` in base 4.
pub fn word_string(mut code: usize, len: usize) -> Vec<&'static str> {
    const ALPHABET: [&str; 4] = ["a", "b", "c", "d"];
    (0..len)
        .map(|_| {
            let w = ALPHABET[code % 4];
            code /= 4;
            w
        })
        .collect()
}

pub mod transcripts {
    use std::collections::BTreeMap;

    use proptest::prelude::*;
    use voicemark::transcript::{AnnotatedTranscript, Sentence, Token};

    const UPOS: [&str; 10] = ["NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "CCONJ", "AUX", "PUNCT"];
    const DEPRELS: [&str; 6] = ["nsubj", "obj", "advcl", "amod", "ccomp", "det"];

    fn token() -> impl Strategy<Value = (String, usize, Vec<(String, String)>, usize)> {
        (
            "[a-e]{1,4}",
            0..UPOS.len(),
            prop::collection::vec((prop::sample::select(vec!["Tense", "Number", "Voice"]), prop::sample::select(vec!["Past", "Pres", "Plur", "Pass"])), 0..2)
                .prop_map(|v| v.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()),
            0..DEPRELS.len(),
        )
    }

    /// Single-rooted sentences where every head precedes its dependent.
    pub fn sentence() -> impl Strategy<Value = Sentence> {
        (prop::collection::vec(token(), 1..9), prop::collection::vec(any::<prop::sample::Index>(), 9)).prop_map(|(toks, heads)| {
            let tokens = toks
                .into_iter()
                .enumerate()
                .map(|(i, (form, u, feats, d))| Token {
                    id: i + 1,
                    lemma: match form.trim_end_matches('e') {
                        "" => form.clone(),
                        stem => stem.to_string(),
                    },
                    form,
                    upos: UPOS[u].to_string(),
                    feats: feats.into_iter().collect::<BTreeMap<_, _>>(),
                    head: if i == 0 { 0 } else { heads[i].index(i) + 1 },
                    deprel: if i == 0 { "root".to_string() } else { DEPRELS[d].to_string() },
                })
                .collect();
            Sentence { tokens }
        })
    }

    pub fn transcript() -> impl Strategy<Value = AnnotatedTranscript> {
        prop::collection::vec(sentence(), 1..7)
            .prop_map(|sentences| AnnotatedTranscript { sentences, trees: None, embeddings: None, raw_text: None })
    }
}
