//! Speech graphs: words as nodes, consecutive words as directed edges.
//!
//! Edges never join the last word of one sentence to the first word of the
//! next. Multiplicities are kept; the undirected simple projection is used
//! for path statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::transcript::AnnotatedTranscript;

/// What identifies a graph node.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKey {
    #[default]
    Form,
    Lemma,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordGraph {
    /// Node keys in order of first appearance.
    pub nodes: Vec<String>,
    index: HashMap<String, usize>,
    /// Directed edge multiplicities keyed by node indices.
    pub edges: BTreeMap<(usize, usize), usize>,
}

impl WordGraph {
    /// Builds the graph from word sequences, one per sentence.
    pub fn from_sequences<S: AsRef<str>>(sequences: &[Vec<S>]) -> Self {
        let mut g = Self::default();
        for seq in sequences {
            let mut prev: Option<usize> = None;
            for w in seq {
                let id = g.node(w.as_ref());
                if let Some(p) = prev {
                    *g.edges.entry((p, id)).or_default() += 1;
                }
                prev = Some(id);
            }
        }
        g
    }

    fn node(&mut self, key: &str) -> usize {
        if let Some(&i) = self.index.get(key) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(key.to_string());
        self.index.insert(key.to_string(), i);
        i
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Total edges counting multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.values().sum()
    }

    pub fn multiplicity(&self, from: &str, to: &str) -> usize {
        match (self.index.get(from), self.index.get(to)) {
            (Some(&a), Some(&b)) => self.edges.get(&(a, b)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in self.edges.keys() {
            adj[a].push(b);
        }
        adj
    }

    fn undirected(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.nodes.len()];
        for &(a, b) in self.edges.keys() {
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj
    }
}

pub fn build_word_graph(t: &AnnotatedTranscript, key: NodeKey) -> WordGraph {
    let seqs: Vec<Vec<String>> = t
        .sentences
        .iter()
        .map(|s| {
            s.words()
                .map(|w| match key {
                    NodeKey::Form => w.form.to_lowercase(),
                    NodeKey::Lemma => w.lemma.to_lowercase(),
                })
                .collect()
        })
        .collect();
    WordGraph::from_sequences(&seqs)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphFields {
    pub graph_nodes: f64,
    pub graph_edges: f64,
    pub graph_repeated_edges: f64,
    pub graph_largest_scc: f64,
    pub graph_density: f64,
    pub graph_loops_l1: f64,
    pub graph_loops_l2: f64,
    pub graph_loops_l3: f64,
    pub graph_avg_total_degree: f64,
    pub graph_diameter: f64,
    pub graph_avg_shortest_path: f64,
    pub nodes_per_word: f64,
    pub edges_per_word: f64,
    pub atd_per_word: f64,
    pub parallel_edges_per_word: f64,
    pub loops_l1_per_word: f64,
    pub loops_l2_per_word: f64,
    pub loops_l3_per_word: f64,
}

/// Sizes of strongly connected components (iterative Tarjan).
pub fn scc_sizes(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut sizes = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, next child position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut size = 0;
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        size += 1;
                        if w == v {
                            break;
                        }
                    }
                    sizes.push(size);
                }
            }
        }
    }
    sizes
}

fn bfs(adj: &[BTreeSet<usize>], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        let d = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

/// Largest connected component of the undirected projection; ties go to
/// the component holding the earliest-appearing node.
pub fn largest_component(adj: &[BTreeSet<usize>]) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut best: Vec<usize> = Vec::new();
    for start in 0..adj.len() {
        if seen[start] {
            continue;
        }
        let members: Vec<usize> = bfs(adj, start)
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|_| i))
            .collect();
        for &m in &members {
            seen[m] = true;
        }
        if members.len() > best.len() {
            best = members;
        }
    }
    best
}

fn per_word(value: f64, words: usize) -> f64 {
    if words == 0 {
        0.0
    } else {
        value / words as f64
    }
}

pub fn graph_metrics(g: &WordGraph, word_count: usize) -> GraphFields {
    let n = g.node_count();
    let edges = g.edge_count();
    let repeated = g.edges.values().filter(|&&m| m >= 2).count();
    let loops_l1 = g.edges.keys().filter(|(a, b)| a == b).count();
    let distinct_non_loop = g.edges.keys().filter(|(a, b)| a != b).count();
    let loops_l2 = g
        .edges
        .keys()
        .filter(|&&(a, b)| a < b && g.edges.contains_key(&(b, a)))
        .count();

    let succ = g.successors();
    let succ_sets: Vec<BTreeSet<usize>> = succ.iter().map(|v| v.iter().copied().collect()).collect();
    let mut triangles = 0usize;
    for &(a, b) in g.edges.keys() {
        if a == b {
            continue;
        }
        for &c in &succ_sets[b] {
            if c != a && c != b && succ_sets[c].contains(&a) {
                triangles += 1;
            }
        }
    }
    let loops_l3 = triangles / 3;

    let largest_scc = scc_sizes(n, &succ).into_iter().max().unwrap_or(0);
    let density = if n <= 1 {
        0.0
    } else {
        distinct_non_loop as f64 / (n * (n - 1)) as f64
    };
    let avg_total_degree = if n == 0 { 0.0 } else { 2.0 * edges as f64 / n as f64 };

    let (diameter, aspl) = if n <= 1 {
        (0.0, 0.0)
    } else {
        let undirected = g.undirected();
        let comp = largest_component(&undirected);
        let mut max_d = 0usize;
        let mut sum = 0usize;
        let mut pairs = 0usize;
        for &u in &comp {
            let dist = bfs(&undirected, u);
            for &v in &comp {
                if v != u {
                    let d = dist[v].expect("same component");
                    max_d = max_d.max(d);
                    sum += d;
                    pairs += 1;
                }
            }
        }
        let aspl = if pairs == 0 { 0.0 } else { sum as f64 / pairs as f64 };
        (max_d as f64, aspl)
    };

    GraphFields {
        graph_nodes: n as f64,
        graph_edges: edges as f64,
        graph_repeated_edges: repeated as f64,
        graph_largest_scc: largest_scc as f64,
        graph_density: density,
        graph_loops_l1: loops_l1 as f64,
        graph_loops_l2: loops_l2 as f64,
        graph_loops_l3: loops_l3 as f64,
        graph_avg_total_degree: avg_total_degree,
        graph_diameter: diameter,
        graph_avg_shortest_path: aspl,
        nodes_per_word: per_word(n as f64, word_count),
        edges_per_word: per_word(edges as f64, word_count),
        atd_per_word: per_word(avg_total_degree, word_count),
        parallel_edges_per_word: per_word(repeated as f64, word_count),
        loops_l1_per_word: per_word(loops_l1 as f64, word_count),
        loops_l2_per_word: per_word(loops_l2 as f64, word_count),
        loops_l3_per_word: per_word(loops_l3 as f64, word_count),
    }
}
