//! Penn-style bracketed constituency trees.

use serde::{Deserialize, Serialize};

use super::TranscriptError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstituencyTree {
    /// Node label; empty for the unlabeled wrapper some treebanks emit.
    pub label: String,
    pub children: Vec<ConstituencyTree>,
    /// Word form when this node directly dominates a terminal.
    pub leaf: Option<String>,
}

impl ConstituencyTree {
    /// Maximum number of labeled nodes on any root-to-leaf path.
    pub fn depth(&self) -> usize {
        let own = usize::from(!self.label.is_empty());
        own + self.children.iter().map(Self::depth).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        if let Some(l) = &self.leaf {
            out.push(l);
        }
        for c in &self.children {
            c.collect_leaves(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open(usize),
    Close(usize),
    Atom(&'a str, usize),
}

fn lex(text: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                toks.push(Tok::Atom(&text[s..i], s));
            }
            match c {
                '(' => toks.push(Tok::Open(i)),
                ')' => toks.push(Tok::Close(i)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        toks.push(Tok::Atom(&text[s..], s));
    }
    toks
}

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    // Called just after consuming an Open token at byte `at`.
    fn node(&mut self, at: usize) -> Result<ConstituencyTree, TranscriptError> {
        let mut label = String::new();
        if let Some(Tok::Atom(a, _)) = self.toks.get(self.pos) {
            label = a.to_string();
            self.pos += 1;
        }
        let mut children = Vec::new();
        let mut leaf = None;
        loop {
            match self.toks.get(self.pos).cloned() {
                None => return Err(TranscriptError::Unbalanced { offset: at }),
                Some(Tok::Close(_)) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Open(o)) => {
                    self.pos += 1;
                    children.push(self.node(o)?);
                }
                Some(Tok::Atom(a, off)) => {
                    if leaf.is_some() || !children.is_empty() {
                        return Err(TranscriptError::Syntax {
                            line: 0,
                            message: format!("unexpected terminal {a:?} at byte {off}"),
                        });
                    }
                    leaf = Some(a.to_string());
                    self.pos += 1;
                }
            }
        }
        if label.is_empty() && children.is_empty() && leaf.is_none() {
            return Err(TranscriptError::EmptyNode { offset: at });
        }
        if !children.is_empty() && leaf.is_some() {
            return Err(TranscriptError::Syntax {
                line: 0,
                message: format!("node at byte {at} mixes a terminal with subtrees"),
            });
        }
        Ok(ConstituencyTree {
            label,
            children,
            leaf,
        })
    }
}

/// Parses one or more bracketed trees from `text`.
pub fn parse_bracketed(text: &str) -> Result<Vec<ConstituencyTree>, TranscriptError> {
    let mut p = Parser {
        toks: lex(text),
        pos: 0,
    };
    let mut trees = Vec::new();
    while let Some(tok) = p.toks.get(p.pos).cloned() {
        match tok {
            Tok::Open(at) => {
                p.pos += 1;
                trees.push(p.node(at)?);
            }
            Tok::Close(at) => return Err(TranscriptError::Unbalanced { offset: at }),
            Tok::Atom(a, off) => {
                return Err(TranscriptError::Syntax {
                    line: 0,
                    message: format!("stray token {a:?} at byte {off}"),
                })
            }
        }
    }
    Ok(trees)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_examples() {
        let t = parse_bracketed("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].depth(), 3);
        assert_eq!(t[0].leaves(), vec!["the", "dog", "barks"]);
        assert_eq!(parse_bracketed("(X a)").unwrap()[0].depth(), 1);
    }

    #[test]
    fn wrapper_does_not_count() {
        let t = parse_bracketed("( (S (NN a)) )").unwrap();
        assert_eq!(t[0].depth(), 2);
    }

    #[test]
    fn several_trees() {
        let t = parse_bracketed("(S (NN a))\n(S (NP (NN b)))\n").unwrap();
        assert_eq!(t.iter().map(|t| t.depth()).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_bracketed("((S a)"),
            Err(TranscriptError::Unbalanced { .. })
        ));
        assert!(matches!(
            parse_bracketed("(S a))"),
            Err(TranscriptError::Unbalanced { .. })
        ));
        assert!(matches!(
            parse_bracketed("(S ())"),
            Err(TranscriptError::EmptyNode { .. })
        ));
    }
}
