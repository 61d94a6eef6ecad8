//! The joint transition system: lattice arc selection interleaved with
//! arc-eager labeled dependency actions.

mod oracle;

use std::fmt;

pub use oracle::{align_gold, infuse_gold, oracle_sequence, projectivize, replay, GoldAnnotation};

use crate::error::{Error, Result};
use crate::types::{DepEdge, DepTree, MorphPath, SentenceLattice, ROOT_LABEL};

/// One transition. Labels are indices into the system's label set, so the
/// derived order is: SELECT by arc index, SHIFT, LEFT_ARC and RIGHT_ARC by
/// label order, REDUCE.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transition {
    Select(usize),
    Shift,
    LeftArc(usize),
    RightArc(usize),
    Reduce,
}

impl Transition {
    pub fn kind(&self) -> &'static str {
        match self {
            Transition::Select(_) => "SELECT",
            Transition::Shift => "SHIFT",
            Transition::LeftArc(_) => "LEFT_ARC",
            Transition::RightArc(_) => "RIGHT_ARC",
            Transition::Reduce => "REDUCE",
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::Select(a) => write!(f, "SELECT({a})"),
            Transition::LeftArc(l) => write!(f, "LEFT_ARC({l})"),
            Transition::RightArc(l) => write!(f, "RIGHT_ARC({l})"),
            other => f.write_str(other.kind()),
        }
    }
}

/// Which decisions a derivation makes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Path selection and parsing, interleaved.
    #[default]
    Joint,
    /// Path selection only; morphemes are never queued.
    MorphOnly,
    /// Parsing over a lattice with a single path; selections are forced.
    DepOnly,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Joint => "joint",
            Mode::MorphOnly => "md",
            Mode::DepOnly => "dep",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "joint" => Some(Mode::Joint),
            "md" => Some(Mode::MorphOnly),
            "dep" => Some(Mode::DepOnly),
            _ => None,
        }
    }
}

/// A partial derivation. Tree nodes are positions on the chosen path
/// (1-based); node 0 is the artificial root.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    cursor: usize,
    path: Vec<usize>,
    queue: Option<usize>,
    stack: Vec<usize>,
    /// `heads[n]` is the `(head, label)` of node `n`; index 0 is unused.
    heads: Vec<Option<(usize, usize)>>,
    history: Vec<Transition>,
    score: f64,
}

impl JointState {
    pub fn initial(lattice: &SentenceLattice) -> Self {
        JointState {
            cursor: lattice.start_node(),
            path: Vec::new(),
            queue: None,
            stack: vec![0],
            heads: vec![None],
            history: Vec::new(),
            score: 0.0,
        }
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Arc indices of the chosen path so far.
    pub fn path(&self) -> &[usize] {
        &self.path
    }

    pub fn queue_front(&self) -> Option<usize> {
        self.queue
    }

    pub fn stack(&self) -> &[usize] {
        &self.stack
    }

    /// The `i`-th stack item from the top.
    pub fn stack_item(&self, i: usize) -> Option<usize> {
        self.stack.len().checked_sub(i + 1).map(|k| self.stack[k])
    }

    pub fn head(&self, node: usize) -> Option<(usize, usize)> {
        self.heads.get(node).copied().flatten()
    }

    pub fn history(&self) -> &[Transition] {
        &self.history
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn add_score(&mut self, delta: f64) {
        self.score += delta;
    }

    pub(crate) fn set_score(&mut self, score: f64) {
        self.score = score;
    }

    /// Lattice arc index of a path node.
    pub fn arc_of(&self, node: usize) -> Option<usize> {
        node.checked_sub(1).and_then(|i| self.path.get(i).copied())
    }

    /// Dependency edges built so far, sorted by dependent.
    pub fn arcs_built(&self) -> Vec<(usize, usize, usize)> {
        self.heads
            .iter()
            .enumerate()
            .filter_map(|(d, h)| h.map(|(head, label)| (head, d, label)))
            .collect()
    }
}

/// Legality, application, and termination for one mode and label set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    labels: Vec<String>,
    root_label: usize,
    mode: Mode,
}

impl TransitionSystem {
    /// `labels` must contain the root label.
    pub fn new(labels: Vec<String>, mode: Mode) -> Result<Self> {
        let root_label = labels
            .iter()
            .position(|l| l == ROOT_LABEL)
            .ok_or_else(|| Error::Config(format!("label set lacks '{ROOT_LABEL}'")))?;
        Ok(TransitionSystem {
            labels,
            root_label,
            mode,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        TransitionSystem {
            mode,
            ..self.clone()
        }
    }

    /// A transition rendered with its label name, e.g. `LEFT_ARC(subj)`.
    pub fn describe(&self, t: Transition) -> String {
        match t {
            Transition::LeftArc(l) | Transition::RightArc(l) => {
                format!("{}({})", t.kind(), self.labels[l])
            }
            other => other.to_string(),
        }
    }

    fn at_last_morpheme(&self, state: &JointState, lattice: &SentenceLattice) -> bool {
        state.cursor == lattice.end_node()
    }

    /// Why `t` is illegal in `state`, or `None` when it is legal.
    ///
    /// Besides the usual arc-eager preconditions, two rules keep every
    /// reachable state completable: SHIFT is illegal once the queue holds the
    /// sentence's last morpheme, and RIGHT_ARC onto the last morpheme
    /// requires every non-root stack item to have a head already.
    pub fn violation(
        &self,
        state: &JointState,
        lattice: &SentenceLattice,
        t: Transition,
    ) -> Option<&'static str> {
        let top = *state.stack.last().expect("stack holds the root");
        match t {
            Transition::Select(a) => {
                if a >= lattice.arcs().len() || lattice.arc(a).from != state.cursor {
                    Some("arc does not leave the lattice cursor")
                } else if state.queue.is_some() {
                    Some("queue is not empty")
                } else if state.cursor == lattice.end_node() {
                    Some("lattice cursor is at the end node")
                } else {
                    None
                }
            }
            _ if self.mode == Mode::MorphOnly => Some("only SELECT is available in MD-only mode"),
            _ if state.queue.is_none() => Some("queue is empty"),
            Transition::Shift => {
                if self.at_last_morpheme(state, lattice) {
                    Some("queue holds the last morpheme")
                } else {
                    None
                }
            }
            Transition::LeftArc(l) => {
                if l >= self.labels.len() {
                    Some("unknown label")
                } else if top == 0 {
                    Some("stack top is the root")
                } else if state.heads[top].is_some() {
                    Some("stack top already has a head")
                } else {
                    None
                }
            }
            Transition::RightArc(l) => {
                if l >= self.labels.len() {
                    Some("unknown label")
                } else if self.at_last_morpheme(state, lattice)
                    && state.stack[1..].iter().any(|&n| state.heads[n].is_none())
                {
                    Some("a stack item below the last morpheme has no head")
                } else {
                    None
                }
            }
            Transition::Reduce => {
                if top == 0 || state.heads[top].is_none() {
                    Some("stack top has no head")
                } else {
                    None
                }
            }
        }
    }

    /// All legal transitions in canonical order; empty iff terminal.
    pub fn legal_transitions(
        &self,
        state: &JointState,
        lattice: &SentenceLattice,
    ) -> Vec<Transition> {
        let mut out = Vec::new();
        if self.is_terminal(state, lattice) {
            return out;
        }
        if state.queue.is_none() && state.cursor != lattice.end_node() {
            out.extend(lattice.outgoing(state.cursor).map(Transition::Select));
        }
        if self.mode == Mode::MorphOnly || state.queue.is_none() {
            return out;
        }
        let mut push = |t: Transition| {
            if self.violation(state, lattice, t).is_none() {
                out.push(t);
            }
        };
        push(Transition::Shift);
        for l in 0..self.labels.len() {
            push(Transition::LeftArc(l));
        }
        for l in 0..self.labels.len() {
            push(Transition::RightArc(l));
        }
        push(Transition::Reduce);
        out
    }

    /// Applies `t` to a copy of `state`.
    pub fn apply(
        &self,
        state: &JointState,
        lattice: &SentenceLattice,
        t: Transition,
    ) -> Result<JointState> {
        if let Some(reason) = self.violation(state, lattice, t) {
            return Err(Error::IllegalTransition {
                transition: self.describe(t),
                reason: reason.into(),
            });
        }
        let mut s = state.clone();
        s.apply_unchecked(lattice, t, self.mode);
        Ok(s)
    }

    /// True once the path reaches the end node, the queue is empty, and
    /// every chosen morpheme has a head. In MD-only mode only the path
    /// matters.
    pub fn is_terminal(&self, state: &JointState, lattice: &SentenceLattice) -> bool {
        if state.cursor != lattice.end_node() || state.queue.is_some() {
            return false;
        }
        self.mode == Mode::MorphOnly || state.heads[1..].iter().all(Option::is_some)
    }

    /// The chosen path and tree of a finished derivation. Headless morphemes
    /// are attached to the root with the root label.
    pub fn finish(
        &self,
        state: &JointState,
        lattice: &SentenceLattice,
    ) -> Result<(MorphPath, DepTree)> {
        if state.cursor != lattice.end_node() {
            return Err(Error::InvalidLattice(
                "derivation stopped before the end node".into(),
            ));
        }
        let path = MorphPath::new(state.path.iter().map(|&i| lattice.arc(i).clone()).collect());
        let mut edges = Vec::with_capacity(state.path.len());
        let mut cleaned = 0;
        for d in 1..=state.path.len() {
            let (head, label) = state.heads[d].unwrap_or_else(|| {
                cleaned += 1;
                (0, self.root_label)
            });
            edges.push(DepEdge::new(head, d, self.labels[label].clone()));
        }
        if cleaned > 0 && self.mode != Mode::MorphOnly {
            log::debug!("attached {cleaned} headless morpheme(s) to the root");
        }
        let tree = DepTree::new(state.path.len(), edges)?;
        Ok((path, tree))
    }
}

impl JointState {
    pub(crate) fn apply_unchecked(&mut self, lattice: &SentenceLattice, t: Transition, mode: Mode) {
        match t {
            Transition::Select(a) => {
                self.path.push(a);
                self.heads.push(None);
                self.cursor = lattice.arc(a).to;
                if mode != Mode::MorphOnly {
                    self.queue = Some(self.path.len());
                }
            }
            Transition::Shift => {
                let f = self.queue.take().expect("legal SHIFT has a queue front");
                self.stack.push(f);
            }
            Transition::LeftArc(l) => {
                let f = self.queue.expect("legal LEFT_ARC has a queue front");
                let s = self.stack.pop().expect("legal LEFT_ARC has a stack top");
                self.heads[s] = Some((f, l));
            }
            Transition::RightArc(l) => {
                let f = self
                    .queue
                    .take()
                    .expect("legal RIGHT_ARC has a queue front");
                let s = *self.stack.last().expect("stack holds the root");
                self.heads[f] = Some((s, l));
                self.stack.push(f);
            }
            Transition::Reduce => {
                self.stack.pop();
            }
        }
        self.history.push(t);
    }
}
