mod common;

use common::transcripts::transcript;
use proptest::prelude::*;
use voicemark::linguistic::{extract_linguistic, LinguisticConfig};
use voicemark::transcript::{parse_conllu, write_conllu};

proptest! {
    #[test]
    fn conllu_round_trip(t in transcript()) {
        prop_assert_eq!(parse_conllu(&write_conllu(&t)).unwrap(), t);
    }

    #[test]
    fn counts_agree_with_linguistic_features(t in transcript()) {
        let f = extract_linguistic(&t, &LinguisticConfig::default()).unwrap();
        prop_assert_eq!(f.lexical.word_count, t.word_count() as f64);
        prop_assert_eq!(f.lexical.sentence_count, t.sentence_count() as f64);
    }
}
