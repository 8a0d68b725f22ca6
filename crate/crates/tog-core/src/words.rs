//! Cyclic words in a free group, Whitehead graphs with their canonical
//! V-involutions, and extended Whitehead graphs.
//!
//! Letters are written `a, b, c, …` for generators and `A, B, C, …` for their
//! inverses. The Whitehead vertex of generator `i` is `2i`, its inverse `2i+1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{is_two_connected, EdgeEnd, EdgeId, Multigraph, Side, VertexId};
use crate::vsystem::ConnectingVSystem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word reduces to the empty word")]
    EmptyAfterReduction,
    #[error("word {0} is a proper power")]
    PeriodicWord(String),
    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },
    #[error("words {0} and {1} are conjugate up to inversion")]
    ConjugateWords(String, String),
    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("letter {letter} exceeds rank {rank}")]
    LetterOutOfRange { letter: String, rank: usize },
    #[error("multiplicity of {label} must be at least 2, got {n}")]
    BadMultiplicity { label: String, n: u32 },
    #[error("vertex {0} of the Whitehead graph is isolated")]
    IsolatedVertex(String),
}

/// Generator index and sign. Ordered `a < A < b < B < …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: u8,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    pub fn vertex(self) -> VertexId {
        2 * self.generator as VertexId + self.inverse as VertexId
    }

    pub fn from_vertex(v: VertexId) -> Letter {
        Letter { generator: (v / 2) as u8, inverse: v % 2 == 1 }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        if c.is_ascii_lowercase() {
            Some(Letter { generator: c as u8 - b'a', inverse: false })
        } else if c.is_ascii_uppercase() {
            Some(Letter { generator: c as u8 - b'A', inverse: true })
        } else {
            None
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.inverse { b'A' } else { b'a' };
        (base + self.generator) as char
    }
}

pub fn parse_letters(s: &str) -> Result<Vec<Letter>, WordError> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            Letter::from_char(c).ok_or_else(|| WordError::InvalidWord {
                word: s.to_string(),
                reason: format!("unexpected character {c:?}"),
            })
        })
        .collect()
}

pub fn letters_to_string(w: &[Letter]) -> String {
    w.iter().map(|l| l.to_char()).collect()
}

/// Cyclically reduced, non-periodic word stored in its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn parse(s: &str) -> Result<Self, WordError> {
        cyclically_reduce(&parse_letters(s)?)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        let inv: Vec<Letter> = self.letters.iter().rev().map(|l| l.inv()).collect();
        CyclicWord { letters: least_rotation(&inv) }
    }

    /// Same cyclic word, or same as the inverse.
    pub fn conjugate_up_to_inversion(&self, other: &CyclicWord) -> bool {
        self == other || *self == other.inverse()
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&letters_to_string(&self.letters))
    }
}

fn least_rotation(w: &[Letter]) -> Vec<Letter> {
    (0..w.len()).map(|r| w[r..].iter().chain(&w[..r]).copied().collect::<Vec<_>>()).min().unwrap_or_default()
}

/// Free then cyclic reduction; rejects empty results and proper powers.
pub fn cyclically_reduce(letters: &[Letter]) -> Result<CyclicWord, WordError> {
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if stack.last() == Some(&l.inv()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    let (mut i, mut j) = (0, stack.len());
    while j - i >= 2 && stack[i] == stack[j - 1].inv() {
        i += 1;
        j -= 1;
    }
    let core = &stack[i..j];
    if core.is_empty() {
        return Err(WordError::EmptyAfterReduction);
    }
    let n = core.len();
    let periodic = (1..n).filter(|&p| n.is_multiple_of(p)).any(|p| (0..n).all(|k| core[k] == core[k % p]));
    if periodic {
        return Err(WordError::PeriodicWord(letters_to_string(core)));
    }
    Ok(CyclicWord { letters: least_rotation(core) })
}

/// A peripheral word with its label ξ and multiplicity n_ξ ≥ 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeripheralSpec {
    pub word: CyclicWord,
    pub label: String,
    pub multiplicity: u32,
}

impl PeripheralSpec {
    pub fn new(word: CyclicWord, label: impl Into<String>, multiplicity: u32) -> Self {
        PeripheralSpec { word, label: label.into(), multiplicity }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub label: String,
    pub word: usize,
    /// Copy index `j` in `1..n_ξ`; always 1 in a plain Whitehead graph.
    pub copy: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub word: usize,
    /// 0-based position of the pair's first letter in the stored rotation.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhiteheadGraph {
    pub rank: usize,
    pub graph: Multigraph,
    pub labels: BTreeMap<EdgeId, EdgeLabel>,
    pub occurrences: BTreeMap<EdgeId, Occurrence>,
    pub specs: Vec<PeripheralSpec>,
}

impl WhiteheadGraph {
    pub fn vertex_name(v: VertexId) -> char {
        Letter::from_vertex(v).to_char()
    }

    /// Edges produced by one word (all copies).
    pub fn edges_of_word(&self, word: usize) -> Vec<EdgeId> {
        self.labels.iter().filter(|(_, l)| l.word == word).map(|(&e, _)| e).collect()
    }
}

fn check_words(rank: usize, specs: &[PeripheralSpec]) -> Result<(), WordError> {
    if rank < 2 {
        return Err(WordError::RankTooSmall(rank));
    }
    for s in specs {
        if s.multiplicity < 2 {
            return Err(WordError::BadMultiplicity { label: s.label.clone(), n: s.multiplicity });
        }
        for l in s.word.letters() {
            if l.generator as usize >= rank {
                return Err(WordError::LetterOutOfRange { letter: l.to_char().to_string(), rank });
            }
        }
    }
    for (i, a) in specs.iter().enumerate() {
        for b in &specs[i + 1..] {
            if a.word.conjugate_up_to_inversion(&b.word) {
                return Err(WordError::ConjugateWords(a.word.to_string(), b.word.to_string()));
            }
        }
    }
    Ok(())
}

/// Plain Whitehead graph: one edge `x⁻¹ -- y` per cyclic occurrence of `xy`.
/// The edge is oriented from `x⁻¹` to `y`.
pub fn whitehead_graph(rank: usize, words: &[(CyclicWord, String)]) -> Result<WhiteheadGraph, WordError> {
    let specs: Vec<PeripheralSpec> = words.iter().map(|(w, l)| PeripheralSpec::new(w.clone(), l.clone(), 2)).collect();
    Ok(build(rank, &specs)?.0)
}

/// Extended Whitehead graph: every edge of word ξ becomes `n_ξ − 1` parallel
/// copies labelled `(ξ, j)`, together with the lifted V-involution.
pub fn extended_whitehead_graph(
    rank: usize,
    specs: &[PeripheralSpec],
) -> Result<(WhiteheadGraph, ConnectingVSystem), WordError> {
    let (wg, alpha) = build(rank, specs)?;
    let g = &wg.graph;
    if let Some(v) = g.vertices().find(|&v| g.degree(v) == 0) {
        return Err(WordError::IsolatedVertex(Letter::from_vertex(v).to_char().to_string()));
    }
    let a: BTreeMap<VertexId, VertexId> = g.vertices().map(|v| (v, v ^ 1)).collect();
    let vs = ConnectingVSystem::new(g.clone(), a, alpha);
    Ok((wg, vs))
}

fn build(rank: usize, specs: &[PeripheralSpec]) -> Result<(WhiteheadGraph, BTreeMap<EdgeEnd, EdgeEnd>), WordError> {
    check_words(rank, specs)?;
    let mut g = Multigraph::new();
    for v in 0..2 * rank as VertexId {
        g.add_vertex(v);
    }
    let mut labels = BTreeMap::new();
    let mut occurrences = BTreeMap::new();
    let mut alpha: BTreeMap<EdgeEnd, EdgeEnd> = BTreeMap::new();
    let mut next: EdgeId = 0;
    for (wi, spec) in specs.iter().enumerate() {
        let w = spec.word.letters();
        let n = w.len();
        // id of the edge for pair (i, i+1), copy j, is base + i*(copies) + j-1
        let copies = spec.multiplicity - 1;
        let base = next;
        let id = |i: usize, j: u32| base + (i as u32) * copies + (j - 1);
        for i in 0..n {
            let (x, y) = (w[i], w[(i + 1) % n]);
            for j in 1..=copies {
                g.add_edge(id(i, j), x.inv().vertex(), y.vertex()).expect("letter vertices exist");
                labels.insert(id(i, j), EdgeLabel { label: spec.label.clone(), word: wi, copy: j });
                occurrences.insert(id(i, j), Occurrence { word: wi, position: i });
            }
        }
        // the letter at position i ends pair i-1 (at i) and starts pair i (at i⁻¹)
        for i in 0..n {
            let prev = (i + n - 1) % n;
            for j in 1..=copies {
                let p = EdgeEnd::new(id(prev, j), Side::Head);
                let q = EdgeEnd::new(id(i, j), Side::Tail);
                alpha.insert(p, q);
                alpha.insert(q, p);
            }
        }
        next += n as u32 * copies;
    }
    Ok((WhiteheadGraph { rank, graph: g, labels, occurrences, specs: specs.to_vec() }, alpha))
}

/// Canonical V-involution of a Whitehead graph.
pub fn whitehead_v_involution(w: &WhiteheadGraph) -> Result<ConnectingVSystem, WordError> {
    Ok(extended_whitehead_graph(w.rank, &w.specs)?.1)
}

/// 2-connectivity of the graph, as a check on the chosen basis. It says
/// nothing about whether another basis gives a smaller graph.
pub fn check_rigidity_proxy(w: &WhiteheadGraph) -> bool {
    is_two_connected(&w.graph)
}

/// Letters occurring in any of the words, as Whitehead vertices.
pub fn used_vertices(words: &[CyclicWord]) -> BTreeSet<VertexId> {
    words.iter().flat_map(|w| w.letters().iter().flat_map(|l| [l.vertex(), l.inv().vertex()])).collect()
}
