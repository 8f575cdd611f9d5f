//! The transducer data model: a finite, deterministic, letter-in/word-out
//! machine over `X_n`.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::words::{Letter, Word};

pub type StateId = usize;

/// A complete transducer `(X_n, Q, π, λ)`.
///
/// Transitions and outputs are stored row-major: entry `q * n + a` holds the
/// edge read on letter `a` from state `q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Transducer {
    n: usize,
    next: Vec<StateId>,
    out: Vec<Word>,
    names: Vec<String>,
}

/// A transducer with a designated start state.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct InitialTransducer {
    pub base: Transducer,
    pub initial: StateId,
}

/// Outcome of [`Transducer::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A circuit whose concatenated output is empty, as the list of states.
    EmptyOutputCircuit(Vec<StateId>),
    MissingEdge {
        state: StateId,
        letter: Letter,
    },
    LetterOutOfRange {
        state: StateId,
        letter: Letter,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyOutputCircuit(states) => {
                write!(f, "circuit with empty output through states {states:?}")
            }
            Violation::MissingEdge { state, letter } => {
                write!(f, "state {state} has no edge on letter {letter}")
            }
            Violation::LetterOutOfRange { state, letter } => {
                write!(
                    f,
                    "state {state} outputs a letter outside the alphabet on input {letter}"
                )
            }
        }
    }
}

impl Transducer {
    /// Builds a transducer from a function giving `(π(a, q), λ(a, q))`.
    pub fn from_fn(
        n: usize,
        states: usize,
        mut edge: impl FnMut(StateId, Letter) -> (StateId, Word),
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadAlphabet(n));
        }
        if states == 0 {
            return Err(Error::Empty("transducer without states"));
        }
        let mut next = Vec::with_capacity(states * n);
        let mut out = Vec::with_capacity(states * n);
        for q in 0..states {
            for a in 0..n {
                let (t, w) = edge(q, a as Letter);
                if t >= states {
                    return Err(Error::Invalid(format!(
                        "edge ({q}, {a}) targets missing state {t}"
                    )));
                }
                w.check_alphabet(n)?;
                next.push(t);
                out.push(w);
            }
        }
        Ok(Transducer {
            n,
            next,
            out,
            names: (0..states).map(|q| format!("q{q}")).collect(),
        })
    }

    /// Builds a transducer from explicit rows: `rows[q][a] = (target, output)`.
    pub fn from_rows(n: usize, rows: Vec<Vec<(StateId, Word)>>) -> Result<Self> {
        for (q, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid(format!(
                    "state {q} has {} edges, expected {n}",
                    row.len()
                )));
            }
        }
        let states = rows.len();
        Transducer::from_fn(n, states, |q, a| rows[q][a as usize].clone())
    }

    /// The single-state identity transducer over `X_n`.
    pub fn identity(n: usize) -> Self {
        Transducer::from_fn(n, 1, |_, a| (0, Word::letter(a))).expect("n >= 2")
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.num_states() {
            return Err(Error::Invalid("wrong number of state names".into()));
        }
        self.names = names;
        Ok(self)
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn num_states(&self) -> usize {
        self.next.len() / self.n
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    pub fn letters(&self) -> impl DoubleEndedIterator<Item = Letter> + Clone {
        (0..self.n).map(|a| a as Letter)
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|s| s == name)
    }

    #[inline]
    pub fn next(&self, q: StateId, a: Letter) -> StateId {
        self.next[q * self.n + a as usize]
    }

    #[inline]
    pub fn output(&self, q: StateId, a: Letter) -> &Word {
        &self.out[q * self.n + a as usize]
    }

    pub fn max_output_len(&self) -> usize {
        self.out.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Final state and concatenated output after reading `w` from `q`.
    pub fn run(&self, q: StateId, w: &[Letter]) -> (StateId, Word) {
        let mut state = q;
        let mut output = Word::empty();
        for &a in w {
            output.extend_from(self.output(state, a));
            state = self.next(state, a);
        }
        (state, output)
    }

    pub fn state_after(&self, q: StateId, w: &[Letter]) -> StateId {
        w.iter().fold(q, |s, &a| self.next(s, a))
    }

    /// Checks totality, output letters, and that no circuit has empty output.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        for q in self.states() {
            for a in self.letters() {
                if self.output(q, a).iter().any(|&b| b as usize >= self.n) {
                    return Err(Violation::LetterOutOfRange { state: q, letter: a });
                }
            }
        }
        if let Some(cycle) = self.empty_output_cycle() {
            return Err(Violation::EmptyOutputCircuit(cycle));
        }
        Ok(())
    }

    /// A cycle in the subgraph of ε-output edges, if one exists.
    fn empty_output_cycle(&self) -> Option<Vec<StateId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let mut mark = vec![Mark::New; self.num_states()];
        for root in self.states() {
            if mark[root] != Mark::New {
                continue;
            }
            // (state, next letter to try)
            let mut stack: Vec<(StateId, usize)> = vec![(root, 0)];
            mark[root] = Mark::Active;
            while let Some(&mut (q, ref mut idx)) = stack.last_mut() {
                if *idx == self.n {
                    mark[q] = Mark::Done;
                    stack.pop();
                    continue;
                }
                let a = *idx as Letter;
                *idx += 1;
                if !self.output(q, a).is_empty() {
                    continue;
                }
                let t = self.next(q, a);
                match mark[t] {
                    Mark::Active => {
                        let start = stack.iter().position(|&(s, _)| s == t).unwrap();
                        return Some(stack[start..].iter().map(|&(s, _)| s).collect());
                    }
                    Mark::New => {
                        mark[t] = Mark::Active;
                        stack.push((t, 0));
                    }
                    Mark::Done => {}
                }
            }
        }
        None
    }

    /// States reachable from `q`, in BFS order with letters tried in order.
    pub fn reachable_from(&self, q: StateId) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![q];
        seen[q] = true;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            i += 1;
            for a in self.letters() {
                let t = self.next(s, a);
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
        }
        order
    }

    /// The sub-transducer on `keep` (which must be closed under transitions),
    /// renumbered in the given order. Returns the old-to-new map.
    pub fn restrict_to(&self, keep: &[StateId]) -> Result<(Transducer, Vec<Option<StateId>>)> {
        let mut map = vec![None; self.num_states()];
        for (i, &q) in keep.iter().enumerate() {
            map[q] = Some(i);
        }
        let t = Transducer::from_fn(self.n, keep.len(), |i, a| {
            let q = keep[i];
            let target = map[self.next(q, a)].expect("kept set closed under transitions");
            (target, self.output(q, a).clone())
        })?
        .with_names(keep.iter().map(|&q| self.names[q].clone()).collect())?;
        Ok((t, map))
    }

    /// Whether the underlying graph is strongly connected.
    pub fn is_strongly_connected(&self) -> bool {
        if self.reachable_from(0).len() != self.num_states() {
            return false;
        }
        let reverse = self.reverse_adjacency();
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(q) = stack.pop() {
            for &p in &reverse[q] {
                if !seen[p] {
                    seen[p] = true;
                    count += 1;
                    stack.push(p);
                }
            }
        }
        count == self.num_states()
    }

    pub(crate) fn reverse_adjacency(&self) -> Vec<Vec<StateId>> {
        let mut rev = vec![Vec::new(); self.num_states()];
        for q in self.states() {
            for a in self.letters() {
                rev[self.next(q, a)].push(q);
            }
        }
        rev
    }

    /// Strongly connected components (Tarjan), each as a list of states.
    pub fn sccs(&self) -> Vec<Vec<StateId>> {
        let size = self.num_states();
        let mut index = vec![usize::MAX; size];
        let mut low = vec![0; size];
        let mut on_stack = vec![false; size];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut counter = 0;
        for root in 0..size {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(StateId, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut i)) = call.last_mut() {
                if *i < self.n {
                    let w = self.next(v, *i as Letter);
                    *i += 1;
                    if index[w] == usize::MAX {
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
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        comps
    }

    /// The raw product `T * U`: the output of `self` is fed into `other`.
    /// State `(p, q)` has index `p * |Q_U| + q`.
    pub fn product(&self, other: &Transducer) -> Result<Transducer> {
        if self.n != other.n {
            return Err(Error::AlphabetMismatch(self.n, other.n));
        }
        let qu = other.num_states();
        let states = self.num_states() * qu;
        let t = Transducer::from_fn(self.n, states, |s, a| {
            let (p, q) = (s / qu, s % qu);
            let mid = self.output(p, a);
            let (q2, w) = other.run(q, mid);
            (self.next(p, a) * qu + q2, w)
        })?;
        let names = (0..states)
            .map(|s| format!("{}_{}", self.names[s / qu], other.names[s % qu]))
            .collect();
        t.with_names(names)
    }

    /// The part of `self * other` reachable from the pair `(p, q)`.
    pub fn product_from(&self, p: StateId, other: &Transducer, q: StateId) -> Result<InitialTransducer> {
        if self.n != other.n {
            return Err(Error::AlphabetMismatch(self.n, other.n));
        }
        let mut index = std::collections::HashMap::new();
        let mut pairs = vec![(p, q)];
        index.insert((p, q), 0usize);
        let mut rows: Vec<Vec<(StateId, Word)>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let (s, t) = pairs[i];
            let mut row = Vec::with_capacity(self.n);
            for a in self.letters() {
                let (t2, w) = other.run(t, self.output(s, a));
                let key = (self.next(s, a), t2);
                let j = *index.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    queue.push_back(pairs.len() - 1);
                    pairs.len() - 1
                });
                row.push((j, w));
            }
            if rows.len() <= i {
                rows.resize(i + 1, Vec::new());
            }
            rows[i] = row;
        }
        let base = Transducer::from_rows(self.n, rows)?.with_names(
            pairs
                .iter()
                .map(|&(s, t)| format!("{}_{}", self.names[s], other.names[t]))
                .collect(),
        )?;
        Ok(InitialTransducer { base, initial: 0 })
    }

    /// Conjugation by a letter involution σ: `λ'(a, q) = σ(λ(σ(a), q))` and
    /// `π'(a, q) = π(σ(a), q)`.
    pub fn conjugate_letters(&self, sigma: &[Letter]) -> Result<Transducer> {
        if sigma.len() != self.n {
            return Err(Error::Invalid("letter map has wrong length".into()));
        }
        Transducer::from_fn(self.n, self.num_states(), |q, a| {
            let b = sigma[a as usize];
            let w = Word::from_letters(self.output(q, b).iter().map(|&c| sigma[c as usize]));
            (self.next(q, b), w)
        })?
        .with_names(self.names.clone())
    }

    /// Canonical key of the machine explored by BFS from `start`, letters in
    /// order. Only states reachable from `start` appear.
    pub(crate) fn bfs_key(&self, start: StateId) -> (Vec<StateId>, Vec<(StateId, Word)>) {
        let order = self.reachable_from(start);
        let mut pos = vec![usize::MAX; self.num_states()];
        for (i, &q) in order.iter().enumerate() {
            pos[q] = i;
        }
        let mut key = Vec::with_capacity(order.len() * self.n);
        for &q in &order {
            for a in self.letters() {
                key.push((pos[self.next(q, a)], self.output(q, a).clone()));
            }
        }
        (order, key)
    }

    /// Renumbers states in BFS order from `start`, dropping unreachable ones.
    pub fn renumber_from(&self, start: StateId) -> Transducer {
        self.renumber_from_with_map(start).0
    }

    pub fn renumber_from_with_map(&self, start: StateId) -> (Transducer, Vec<Option<StateId>>) {
        let (order, key) = self.bfs_key(start);
        let mut map = vec![None; self.num_states()];
        for (i, &q) in order.iter().enumerate() {
            map[q] = Some(i);
        }
        let rows: Vec<Vec<(StateId, Word)>> = key.chunks(self.n).map(|c| c.to_vec()).collect();
        let size = rows.len();
        let t = Transducer::from_rows(self.n, rows)
            .expect("renumbering keeps the machine well formed")
            .with_names((0..size).map(|i| format!("q{i}")).collect())
            .expect("one name per state");
        (t, map)
    }

    /// Canonical renumbering: the BFS numbering whose edge table is least
    /// over all start states that reach every state. Machines without such a
    /// start keep their numbering.
    pub fn canonical(&self) -> Transducer {
        self.canonical_with_map().0
    }

    pub fn canonical_with_map(&self) -> (Transducer, Vec<StateId>) {
        let best = self
            .states()
            .map(|s| (self.bfs_key(s).1, s))
            .filter(|(k, _)| k.len() == self.num_states() * self.n)
            .min();
        match best {
            Some((_, s)) => {
                let (t, map) = self.renumber_from_with_map(s);
                (
                    t,
                    map.into_iter()
                        .map(|m| m.expect("start reaches every state"))
                        .collect(),
                )
            }
            None => {
                let names = (0..self.num_states()).map(|i| format!("q{i}")).collect();
                let t = self.clone().with_names(names).expect("one name per state");
                (t, self.states().collect())
            }
        }
    }

    /// Disjoint union; the states of `other` are shifted by `self.num_states()`.
    pub fn disjoint_union(&self, other: &Transducer) -> Result<Transducer> {
        if self.n != other.n {
            return Err(Error::AlphabetMismatch(self.n, other.n));
        }
        let k = self.num_states();
        Transducer::from_fn(self.n, k + other.num_states(), |q, a| {
            if q < k {
                (self.next(q, a), self.output(q, a).clone())
            } else {
                (other.next(q - k, a) + k, other.output(q - k, a).clone())
            }
        })
    }

    pub fn is_identity(&self) -> bool {
        self.num_states() == 1
            && self
                .letters()
                .all(|a| self.output(0, a).as_slice() == [a] && self.next(0, a) == 0)
    }
}

impl fmt::Debug for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Transducer(n={}, states={})", self.n, self.num_states())?;
        for q in self.states() {
            write!(f, "  {}:", self.names[q])?;
            for a in self.letters() {
                let w = self.output(q, a);
                let shown = if w.is_empty() {
                    "-".to_string()
                } else {
                    w.to_text(self.n)
                };
                write!(f, " {a}|{shown}->{}", self.names[self.next(q, a)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl InitialTransducer {
    pub fn new(base: Transducer, initial: StateId) -> Result<Self> {
        if initial >= base.num_states() {
            return Err(Error::Invalid(format!("initial state {initial} out of range")));
        }
        Ok(InitialTransducer { base, initial })
    }

    /// Drops states unreachable from the initial state; the initial state
    /// becomes state 0.
    pub fn trimmed(&self) -> InitialTransducer {
        let keep = self.base.reachable_from(self.initial);
        let (base, _) = self.base.restrict_to(&keep).expect("reachable set is closed");
        InitialTransducer { base, initial: 0 }
    }

    pub fn run(&self, w: &[Letter]) -> (StateId, Word) {
        self.base.run(self.initial, w)
    }

    /// Canonical form: BFS numbering from the initial state.
    pub fn canonical(&self) -> InitialTransducer {
        InitialTransducer {
            base: self.base.renumber_from(self.initial),
            initial: 0,
        }
    }
}
