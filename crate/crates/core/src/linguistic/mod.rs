//! Linguistic features from an [`AnnotatedTranscript`]: lexical richness,
//! syntax, speech graphs, semantic coherence and sentiment.
//!
//! Word tokens are the non-punctuation tokens throughout.

pub mod graph;
pub mod lexical;
pub mod semantic;
pub mod sentiment;
pub mod syntactic;

use serde::{Deserialize, Serialize};

use crate::transcript::AnnotatedTranscript;

pub use graph::{build_word_graph, graph_metrics, GraphFields, NodeKey, WordGraph};
pub use lexical::{brunet, honore, lexical_indices, mattr, type_token_ratio, LexicalFields};
pub use semantic::{semantic_measures, SemanticFields};
pub use sentiment::{sentiment_scores, SentimentConfig, SentimentError, SentimentScores};
pub use syntactic::{syntactic_measures, SyntacticFields};

/// Canonical names of the columns produced by this module, in manifest order.
pub const FEATURE_NAMES: [&str; 56] = [
    "filler_count",
    "word_count",
    "sentence_count",
    "type_token_ratio",
    "MATTR",
    "brunet_index",
    "honore_stat",
    "lexical_density",
    "idea_density",
    "content_function_ratio",
    "pronoun_ratio",
    "Tense_Past",
    "Tense_Pres",
    "Voice_Pass",
    "Number_Plur",
    "lemma_ttr",
    "upos_diversity",
    "morphological_richness",
    "propositional_density",
    "mean_sentence_length",
    "mean_clause_length",
    "syntactic_depth_mean",
    "syntactic_depth_max",
    "clause_ratio",
    "verb_tense_switches",
    "verb_tense_switch_ratio",
    "syntactic_embedding_depth",
    "passive_voice_ratio",
    "graph_nodes",
    "graph_edges",
    "graph_repeated_edges",
    "graph_largest_scc",
    "graph_density",
    "graph_loops_L1",
    "graph_loops_L2",
    "graph_loops_L3",
    "graph_avg_total_degree",
    "graph_diameter",
    "graph_avg_shortest_path",
    "nodes_per_word",
    "edges_per_word",
    "atd_per_word",
    "parallel_edges_per_word",
    "loops_L1_per_word",
    "loops_L2_per_word",
    "loops_L3_per_word",
    "mean_constituency_depth",
    "max_constituency_depth",
    "first_order_coherence",
    "second_order_coherence",
    "discourse_cohesion",
    "sentence_repetition_ratio",
    "vader_negative",
    "vader_neutral",
    "vader_positive",
    "vader_compound",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticConfig {
    pub mattr_window: usize,
    pub honore_min_denominator: f64,
    pub clause_deprels: Vec<String>,
    pub fillers: Vec<String>,
    pub graph_nodes: NodeKey,
    pub sentiment: SentimentConfig,
}

impl Default for LinguisticConfig {
    /// Uses the bundled sample lexicon; real runs should load a full one.
    fn default() -> Self {
        Self::with_sentiment(SentimentConfig::sample())
    }
}

impl LinguisticConfig {
    pub fn with_sentiment(sentiment: SentimentConfig) -> Self {
        Self {
            mattr_window: 50,
            honore_min_denominator: 0.01,
            clause_deprels: ["root", "csubj", "ccomp", "xcomp", "advcl", "acl", "acl:relcl", "parataxis"]
                .map(String::from)
                .to_vec(),
            fillers: lexical::FILLERS.map(String::from).to_vec(),
            graph_nodes: NodeKey::Form,
            sentiment,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinguisticFeatures {
    pub lexical: LexicalFields,
    pub syntactic: SyntacticFields,
    pub graph: GraphFields,
    pub semantic: SemanticFields,
    pub sentiment: SentimentScores,
    /// Whether constituency trees were supplied; without them the two
    /// constituency depths are 0 and downstream assembly marks them missing.
    #[serde(default)]
    pub has_trees: bool,
}

impl LinguisticFeatures {
    /// Values paired with their canonical names, in [`FEATURE_NAMES`] order.
    /// `avg_word_length` is computed but is not a manifest column.
    pub fn named(&self) -> [(&'static str, f64); 56] {
        let (l, s, g, m, v) = (&self.lexical, &self.syntactic, &self.graph, &self.semantic, &self.sentiment);
        let values = [
            l.filler_count,
            l.word_count,
            l.sentence_count,
            l.type_token_ratio,
            l.mattr,
            l.brunet_index,
            l.honore_stat,
            l.lexical_density,
            l.idea_density,
            l.content_function_ratio,
            l.pronoun_ratio,
            l.tense_past,
            l.tense_pres,
            l.voice_pass,
            l.number_plur,
            l.lemma_ttr,
            l.upos_diversity,
            l.morphological_richness,
            l.propositional_density,
            s.mean_sentence_length,
            s.mean_clause_length,
            s.syntactic_depth_mean,
            s.syntactic_depth_max,
            s.clause_ratio,
            s.verb_tense_switches,
            s.verb_tense_switch_ratio,
            s.syntactic_embedding_depth,
            s.passive_voice_ratio,
            g.graph_nodes,
            g.graph_edges,
            g.graph_repeated_edges,
            g.graph_largest_scc,
            g.graph_density,
            g.graph_loops_l1,
            g.graph_loops_l2,
            g.graph_loops_l3,
            g.graph_avg_total_degree,
            g.graph_diameter,
            g.graph_avg_shortest_path,
            g.nodes_per_word,
            g.edges_per_word,
            g.atd_per_word,
            g.parallel_edges_per_word,
            g.loops_l1_per_word,
            g.loops_l2_per_word,
            g.loops_l3_per_word,
            s.mean_constituency_depth,
            s.max_constituency_depth,
            m.first_order_coherence,
            m.second_order_coherence,
            m.discourse_cohesion,
            m.sentence_repetition_ratio,
            v.neg,
            v.neu,
            v.pos,
            v.compound,
        ];
        std::array::from_fn(|i| (FEATURE_NAMES[i], values[i]))
    }
}

pub fn extract_linguistic(
    t: &AnnotatedTranscript,
    cfg: &LinguisticConfig,
) -> Result<LinguisticFeatures, SentimentError> {
    cfg.sentiment.validate()?;
    let g = build_word_graph(t, cfg.graph_nodes);
    Ok(LinguisticFeatures {
        lexical: lexical_indices(t, cfg),
        syntactic: syntactic_measures(t, cfg),
        graph: graph_metrics(&g, t.word_count()),
        semantic: semantic_measures(t),
        sentiment: sentiment_scores(&t.text(), &cfg.sentiment),
        has_trees: t.trees.is_some(),
    })
}
