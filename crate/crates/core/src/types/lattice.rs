//! Morphological lattices: DAGs whose arcs are candidate morphemes.

use std::collections::BTreeMap;
use std::fmt;

use super::{MorphFeatures, Tagset};
use crate::error::{Error, Result};

/// Default cap on exhaustive path enumeration.
pub const DEFAULT_PATH_CAP: u128 = 1_000_000;

/// One candidate morpheme spanning lattice nodes `from..to`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeArc {
    pub from: usize,
    pub to: usize,
    pub form: String,
    pub lemma: String,
    pub pos: String,
    pub features: MorphFeatures,
    /// 1-based index of the raw token this morpheme came from.
    pub token: usize,
}

impl LatticeArc {
    pub fn new(
        from: usize,
        to: usize,
        form: impl Into<String>,
        lemma: impl Into<String>,
        pos: impl Into<String>,
        features: MorphFeatures,
        token: usize,
    ) -> Self {
        LatticeArc {
            from,
            to,
            form: form.into(),
            lemma: lemma.into(),
            pos: pos.into(),
            features,
            token,
        }
    }

    /// Equality on everything but the node indices.
    pub fn same_morpheme(&self, other: &LatticeArc) -> bool {
        self.form == other.form
            && self.lemma == other.lemma
            && self.pos == other.pos
            && self.features == other.features
            && self.token == other.token
    }
}

/// The lattice of all analyses of one sentence. Node 0 is the start node;
/// the end node is the largest node index mentioned by any arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentenceLattice {
    tokens: Vec<String>,
    arcs: Vec<LatticeArc>,
    end_node: usize,
    token_boundaries: BTreeMap<usize, (usize, usize)>,
}

impl SentenceLattice {
    /// Builds a lattice. Arcs are stably sorted by `(from, to)`, which fixes
    /// arc indices for the rest of the pipeline.
    pub fn new(tokens: Vec<String>, mut arcs: Vec<LatticeArc>) -> Self {
        arcs.sort_by_key(|a| (a.from, a.to));
        let end_node = arcs.iter().map(|a| a.to).max().unwrap_or(0);
        let mut token_boundaries: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for a in &arcs {
            token_boundaries
                .entry(a.token)
                .and_modify(|(entry, exit)| {
                    *entry = (*entry).min(a.from);
                    *exit = (*exit).max(a.to);
                })
                .or_insert((a.from, a.to));
        }
        let mut lattice = SentenceLattice {
            tokens,
            arcs,
            end_node,
            token_boundaries,
        };
        if lattice.tokens.is_empty() {
            lattice.tokens = lattice
                .token_boundaries
                .keys()
                .map(|&t| lattice.token_surface(t))
                .collect();
        }
        lattice
    }

    /// Builds a lattice whose raw tokens are recovered from the arcs (see
    /// [`SentenceLattice::token_surface`]).
    pub fn from_arcs(arcs: Vec<LatticeArc>) -> Self {
        SentenceLattice::new(Vec::new(), arcs)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn arcs(&self) -> &[LatticeArc] {
        &self.arcs
    }

    pub fn arc(&self, index: usize) -> &LatticeArc {
        &self.arcs[index]
    }

    pub fn start_node(&self) -> usize {
        0
    }

    pub fn end_node(&self) -> usize {
        self.end_node
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.token_boundaries.len()
    }

    /// `(entry, exit)` nodes of a 1-based token.
    pub fn token_span(&self, token: usize) -> Option<(usize, usize)> {
        self.token_boundaries.get(&token).copied()
    }

    pub fn token_boundaries(&self) -> &BTreeMap<usize, (usize, usize)> {
        &self.token_boundaries
    }

    /// Indices of arcs leaving `node`, in arc order.
    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.arcs.partition_point(|a| a.from < node);
        self.arcs[start..]
            .iter()
            .take_while(move |a| a.from == node)
            .enumerate()
            .map(move |(i, _)| start + i)
    }

    /// A surface string for a token derived from its arcs alone: the form of
    /// the first arc spanning the whole token, or else the concatenated forms
    /// along the first path through the token. Lattice files do not carry raw
    /// tokens, so anything that must behave identically on a lattice read
    /// back from disk uses this rather than [`SentenceLattice::tokens`].
    pub fn token_surface(&self, token: usize) -> String {
        let Some((entry, exit)) = self.token_span(token) else {
            return String::new();
        };
        let in_token = |i: &usize| self.arcs[*i].token == token;
        if let Some(i) = self
            .outgoing(entry)
            .filter(in_token)
            .find(|&i| self.arcs[i].to == exit)
        {
            return self.arcs[i].form.clone();
        }
        let mut out = String::new();
        let mut node = entry;
        while node != exit {
            match self.outgoing(node).find(in_token) {
                Some(i) => {
                    out.push_str(&self.arcs[i].form);
                    node = self.arcs[i].to;
                }
                None => break,
            }
        }
        out
    }

    /// The token whose arcs leave `node`, if any.
    pub fn token_at(&self, node: usize) -> Option<usize> {
        self.outgoing(node).next().map(|i| self.arcs[i].token)
    }
}

/// A single lattice violation, naming the offending arc or node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BackwardArc {
        arc: usize,
        from: usize,
        to: usize,
    },
    ZeroTokenIndex {
        arc: usize,
    },
    UnknownPos {
        arc: usize,
        pos: String,
    },
    EmptyForm {
        arc: usize,
    },
    Unreachable {
        node: usize,
    },
    NotCoReachable {
        node: usize,
    },
    NoPath,
    MissingToken {
        token: usize,
    },
    TokenGap {
        token: usize,
        exit: usize,
        next_entry: usize,
    },
    TokenStart {
        entry: usize,
    },
    TokenEnd {
        exit: usize,
        end: usize,
    },
    TokenCount {
        declared: usize,
        found: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BackwardArc { arc, from, to } => {
                write!(f, "arc {arc} ({from}->{to}) does not go forward")
            }
            Violation::ZeroTokenIndex { arc } => write!(f, "arc {arc} has token index 0"),
            Violation::UnknownPos { arc, pos } => write!(f, "arc {arc} has unknown POS '{pos}'"),
            Violation::EmptyForm { arc } => write!(f, "arc {arc} has an empty form"),
            Violation::Unreachable { node } => write!(f, "node {node} not reachable"),
            Violation::NotCoReachable { node } => write!(f, "node {node} not co-reachable"),
            Violation::NoPath => write!(f, "no path from start to end"),
            Violation::MissingToken { token } => write!(f, "token {token} has no arcs"),
            Violation::TokenGap {
                token,
                exit,
                next_entry,
            } => write!(
                f,
                "token {token} exits at node {exit} but token {} enters at node {next_entry}",
                token + 1
            ),
            Violation::TokenStart { entry } => {
                write!(f, "first token enters at node {entry}, not 0")
            }
            Violation::TokenEnd { exit, end } => {
                write!(f, "last token exits at node {exit}, not the end node {end}")
            }
            Violation::TokenCount { declared, found } => {
                write!(f, "{declared} raw tokens but arcs reference {found}")
            }
        }
    }
}

/// Result of [`validate_lattice`]. Violations are data, not failures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidLattice(msgs.join("; ")))
        }
    }
}

/// Checks the structural lattice invariants: forward arcs, reachability
/// from the start node, co-reachability to the end node, and contiguous,
/// ordered token spans.
pub fn validate_lattice(lattice: &SentenceLattice) -> ValidationReport {
    let mut violations = Vec::new();
    let arcs = lattice.arcs();
    let end = lattice.end_node();

    for (i, a) in arcs.iter().enumerate() {
        if a.from >= a.to {
            violations.push(Violation::BackwardArc {
                arc: i,
                from: a.from,
                to: a.to,
            });
        }
        if a.token == 0 {
            violations.push(Violation::ZeroTokenIndex { arc: i });
        }
        if a.form.is_empty() {
            violations.push(Violation::EmptyForm { arc: i });
        }
    }
    if arcs.is_empty() {
        return ValidationReport { violations };
    }

    let mut used = vec![false; end + 1];
    for a in arcs {
        used[a.from] = true;
        used[a.to] = true;
    }
    let mut reachable = vec![false; end + 1];
    reachable[0] = true;
    let mut coreachable = vec![false; end + 1];
    coreachable[end] = true;
    // Forward arcs make node order topological, but a backward arc can break
    // that, so iterate to a fixed point.
    loop {
        let mut changed = false;
        for a in arcs {
            if reachable[a.from] && !reachable[a.to] {
                reachable[a.to] = true;
                changed = true;
            }
            if coreachable[a.to] && !coreachable[a.from] {
                coreachable[a.from] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !reachable[end] {
        violations.push(Violation::NoPath);
    }
    for node in 0..=end {
        if !used[node] {
            continue;
        }
        if !reachable[node] {
            violations.push(Violation::Unreachable { node });
        }
        if !coreachable[node] {
            violations.push(Violation::NotCoReachable { node });
        }
    }

    let bounds = lattice.token_boundaries();
    let max_token = bounds.keys().next_back().copied().unwrap_or(0);
    for t in 1..=max_token {
        if !bounds.contains_key(&t) {
            violations.push(Violation::MissingToken { token: t });
        }
    }
    if let Some((_, &(entry, _))) = bounds.iter().find(|(t, _)| **t > 0) {
        if entry != 0 {
            violations.push(Violation::TokenStart { entry });
        }
    }
    if let Some((_, &(_, exit))) = bounds.iter().next_back() {
        if exit != end {
            violations.push(Violation::TokenEnd { exit, end });
        }
    }
    for (&t, &(_, exit)) in bounds {
        if let Some(&(next_entry, _)) = bounds.get(&(t + 1)) {
            if next_entry != exit {
                violations.push(Violation::TokenGap {
                    token: t,
                    exit,
                    next_entry,
                });
            }
        }
    }
    if !lattice.tokens().is_empty() && lattice.tokens().len() != max_token {
        violations.push(Violation::TokenCount {
            declared: lattice.tokens().len(),
            found: max_token,
        });
    }
    ValidationReport { violations }
}

/// Structural validation plus tag membership against `tagset`.
pub fn validate_lattice_tags(lattice: &SentenceLattice, tagset: &Tagset) -> ValidationReport {
    let mut report = validate_lattice(lattice);
    for (i, a) in lattice.arcs().iter().enumerate() {
        if !tagset.contains_pos(&a.pos) {
            report.violations.push(Violation::UnknownPos {
                arc: i,
                pos: a.pos.clone(),
            });
        }
    }
    report
}

/// Number of start-to-end paths, by dynamic programming in node order.
/// Saturates at `u128::MAX`.
pub fn count_paths(lattice: &SentenceLattice) -> u128 {
    if lattice.is_empty() {
        return 1;
    }
    let mut counts = vec![0u128; lattice.end_node() + 1];
    counts[0] = 1;
    // Arcs are sorted by `from`, so every count is final before it is read.
    for a in lattice.arcs() {
        if a.from < a.to {
            counts[a.to] = counts[a.to].saturating_add(counts[a.from]);
        }
    }
    counts[lattice.end_node()]
}

/// All start-to-end paths as arc-index sequences, in lexicographic order of
/// arc indices.
pub fn enumerate_path_indices(lattice: &SentenceLattice, cap: u128) -> Result<Vec<Vec<usize>>> {
    let count = count_paths(lattice);
    if count > cap {
        return Err(Error::PathCapExceeded { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    if lattice.is_empty() {
        out.push(Vec::new());
        return Ok(out);
    }
    let end = lattice.end_node();
    let mut current = Vec::new();
    fn walk(
        lattice: &SentenceLattice,
        node: usize,
        end: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if node == end {
            out.push(current.clone());
            return;
        }
        for i in lattice.outgoing(node) {
            if lattice.arc(i).to <= node {
                continue;
            }
            current.push(i);
            walk(lattice, lattice.arc(i).to, end, current, out);
            current.pop();
        }
    }
    walk(lattice, 0, end, &mut current, &mut out);
    Ok(out)
}

pub fn enumerate_paths(lattice: &SentenceLattice, cap: u128) -> Result<Vec<MorphPath>> {
    Ok(enumerate_path_indices(lattice, cap)?
        .into_iter()
        .map(|idx| MorphPath::new(idx.into_iter().map(|i| lattice.arc(i).clone()).collect()))
        .collect())
}

/// A contiguous sequence of lattice arcs: one morphological segmentation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MorphPath {
    pub arcs: Vec<LatticeArc>,
}

impl MorphPath {
    pub fn new(arcs: Vec<LatticeArc>) -> Self {
        MorphPath { arcs }
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.arcs.iter().map(|a| a.form.as_str())
    }

    /// Checks contiguity, endpoints, and non-decreasing token indices.
    pub fn check(&self, start: usize, end: usize) -> Result<()> {
        let err = |m: String| Err(Error::InvalidLattice(m));
        let (Some(first), Some(last)) = (self.arcs.first(), self.arcs.last()) else {
            return if start == end {
                Ok(())
            } else {
                err("empty path over a non-empty lattice".into())
            };
        };
        if first.from != start {
            return err(format!("path starts at node {}, not {start}", first.from));
        }
        if last.to != end {
            return err(format!("path ends at node {}, not {end}", last.to));
        }
        for (i, w) in self.arcs.windows(2).enumerate() {
            if w[0].to != w[1].from {
                return err(format!(
                    "arcs {i} and {} are not contiguous ({} vs {})",
                    i + 1,
                    w[0].to,
                    w[1].from
                ));
            }
            if w[0].token > w[1].token {
                return err(format!("token index decreases at arc {}", i + 1));
            }
        }
        Ok(())
    }
}
