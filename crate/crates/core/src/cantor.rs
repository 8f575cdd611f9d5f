//! Per-state analysis of the maps `h_q` induced on Cantor space.
//!
//! Images are handled through *configuration sets*. A configuration
//! `(q, v)` stands for the set `v · im(q)`; a set of configurations stands
//! for the union. Taking the derivative by an output letter `b` (all `y` with
//! `b y` in the set) keeps the pending words short, so only finitely many
//! configuration sets ever occur and questions about images become questions
//! about a finite graph.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::transducer::{StateId, Transducer};
use crate::words::{circle_equal, lcp, Alphabet, EpWord, Letter, Word};

/// Upper bound on explored configuration sets before giving up.
pub const SET_CAP: usize = 1 << 16;

type Config = (StateId, Word);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct ConfigSet(Vec<Config>);

impl ConfigSet {
    fn state(q: StateId) -> Self {
        ConfigSet(vec![(q, Word::empty())])
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn expand_into(t: &Transducer, q: StateId, b: Letter, out: &mut Vec<Config>) {
    for a in t.letters() {
        let w = t.output(q, a);
        let s = t.next(q, a);
        if w.is_empty() {
            expand_into(t, s, b, out);
        } else if w[0] == b {
            out.push((s, w.slice(1)));
        }
    }
}

fn derivative(t: &Transducer, set: &ConfigSet, b: Letter) -> ConfigSet {
    let mut out = Vec::new();
    for (q, pending) in &set.0 {
        if pending.is_empty() {
            expand_into(t, *q, b, &mut out);
        } else if pending[0] == b {
            out.push((*q, pending.slice(1)));
        }
    }
    out.sort();
    out.dedup();
    ConfigSet(out)
}

fn derivative_word(t: &Transducer, set: &ConfigSet, w: &[Letter]) -> ConfigSet {
    let mut cur = set.clone();
    for &b in w {
        if cur.is_empty() {
            break;
        }
        cur = derivative(t, &cur, b);
    }
    cur
}

/// Whether `im(q)` meets the cone `U_v`.
pub fn image_meets(t: &Transducer, q: StateId, v: &[Letter]) -> bool {
    !derivative_word(t, &ConfigSet::state(q), v).is_empty()
}

/// The finite graph of configuration sets reachable from one root by
/// derivatives. `children[i][b]` is `None` when the derivative is empty.
struct SetGraph {
    nodes: Vec<ConfigSet>,
    children: Vec<Vec<Option<usize>>>,
    full: Vec<bool>,
}

impl SetGraph {
    fn build(t: &Transducer, root: ConfigSet) -> Result<SetGraph> {
        let n = t.alphabet_size();
        let mut index: HashMap<ConfigSet, usize> = HashMap::new();
        let mut nodes = vec![root.clone()];
        index.insert(root, 0);
        let mut children: Vec<Vec<Option<usize>>> = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let mut row = Vec::with_capacity(n);
            for b in t.letters() {
                let d = derivative(t, &nodes[i], b);
                if d.is_empty() {
                    row.push(None);
                    continue;
                }
                let j = match index.get(&d) {
                    Some(&j) => j,
                    None => {
                        if nodes.len() >= SET_CAP {
                            return Err(Error::BoundExceeded(format!(
                                "more than {SET_CAP} configuration sets"
                            )));
                        }
                        nodes.push(d.clone());
                        index.insert(d, nodes.len() - 1);
                        nodes.len() - 1
                    }
                };
                row.push(Some(j));
            }
            children.push(row);
            i += 1;
        }
        // A node is full unless some node reachable from it has an empty child.
        let mut preds = vec![Vec::new(); nodes.len()];
        for (i, row) in children.iter().enumerate() {
            for j in row.iter().flatten() {
                preds[*j].push(i);
            }
        }
        let mut full = vec![true; nodes.len()];
        let mut stack: Vec<usize> = (0..nodes.len())
            .filter(|&i| children[i].iter().any(Option::is_none))
            .collect();
        for &i in &stack {
            full[i] = false;
        }
        while let Some(i) = stack.pop() {
            for &p in &preds[i] {
                if full[p] {
                    full[p] = false;
                    stack.push(p);
                }
            }
        }
        Ok(SetGraph {
            nodes,
            children,
            full,
        })
    }
}

fn state_graph(t: &Transducer, q: StateId) -> Result<SetGraph> {
    SetGraph::build(t, ConfigSet::state(q))
}

/// A finite antichain of cones, standing for the union of the cones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeAntichain {
    n: usize,
    words: Vec<Word>,
}

impl ConeAntichain {
    pub fn new(n: usize, mut words: Vec<Word>) -> Result<Self> {
        words.sort();
        words.dedup();
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                if a.is_prefix_of(b) {
                    return Err(Error::Invalid(format!("{a} is a prefix of {b}")));
                }
            }
        }
        Ok(ConeAntichain { n, words })
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    /// True iff the union is the whole space.
    pub fn is_complete(&self) -> bool {
        self.words.len() == 1 && self.words[0].is_empty()
    }

    /// Whether `U_w` lies inside the union (for a maximal cover this means
    /// some member is a prefix of `w`).
    pub fn covers(&self, w: &[Letter]) -> bool {
        self.words.iter().any(|c| c.is_prefix_of(w))
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Number of cones of length `level` in the union; `None` on overflow or
    /// when `level` is shorter than some member.
    pub fn count_at_level(&self, level: usize) -> Option<u128> {
        let mut total: u128 = 0;
        for w in &self.words {
            let extra = level.checked_sub(w.len())?;
            let k = (self.n as u128).checked_pow(extra as u32)?;
            total = total.checked_add(k)?;
        }
        Some(total)
    }

    /// The same set written with cones of length exactly `level`.
    pub fn refine_to_level(&self, level: usize) -> Result<Vec<Word>> {
        let alph = Alphabet::new(self.n)?;
        let mut out = Vec::new();
        for w in &self.words {
            let extra = level
                .checked_sub(w.len())
                .ok_or_else(|| Error::Precondition(format!("level {level} shorter than cone {w}")))?;
            for e in alph.words_of_len(extra) {
                out.push(w.concat(&e));
            }
        }
        out.sort();
        Ok(out)
    }
}

/// The minimal cone cover of `im(q)`. Fails with [`Error::NotClopen`] when the
/// image is not a finite union of cones.
pub fn image_antichain(t: &Transducer, q: StateId) -> Result<ConeAntichain> {
    let g = state_graph(t, q)?;
    let mut words = Vec::new();
    let mut on_path = vec![false; g.nodes.len()];
    let mut prefix = Word::empty();
    collect_cones(&g, 0, &mut prefix, &mut on_path, &mut words, q)?;
    ConeAntichain::new(t.alphabet_size(), words)
}

fn collect_cones(
    g: &SetGraph,
    node: usize,
    prefix: &mut Word,
    on_path: &mut [bool],
    out: &mut Vec<Word>,
    q: StateId,
) -> Result<()> {
    if g.full[node] {
        out.push(prefix.clone());
        return Ok(());
    }
    if on_path[node] {
        return Err(Error::NotClopen(q));
    }
    if out.len() > SET_CAP {
        return Err(Error::BoundExceeded("image cover too large".into()));
    }
    on_path[node] = true;
    for (b, child) in g.children[node].iter().enumerate() {
        if let Some(c) = child {
            prefix.push(b as Letter);
            collect_cones(g, *c, prefix, on_path, out, q)?;
            prefix.pop();
        }
    }
    on_path[node] = false;
    Ok(())
}

/// `Λ(q)`: the longest word that prefixes every point of `im(q)`.
pub fn lambda(t: &Transducer, q: StateId) -> Result<Word> {
    let mut cur = ConfigSet::state(q);
    let mut seen = std::collections::HashSet::new();
    let mut out = Word::empty();
    loop {
        if !seen.insert(cur.clone()) {
            return Err(Error::ConstantState(q));
        }
        if seen.len() > SET_CAP {
            return Err(Error::BoundExceeded("common prefix search".into()));
        }
        let mut live = t
            .letters()
            .map(|b| (b, derivative(t, &cur, b)))
            .filter(|(_, d)| !d.is_empty());
        let first = live.next().expect("images are nonempty");
        if live.next().is_some() {
            return Ok(out);
        }
        out.push(first.0);
        cur = first.1;
    }
}

/// `Λ(w, q) = λ(w, q) · Λ(π(w, q))`, the greatest common prefix of the
/// outputs of all infinite extensions of `w`.
pub fn lambda_gcp(t: &Transducer, q: StateId, w: &[Letter]) -> Result<Word> {
    let (s, mut out) = t.run(q, w);
    out.extend_from(&lambda(t, s)?);
    Ok(out)
}

/// Finite-depth estimate of `Λ(w, q)`: the lcp of `λ(w e, q)` over all `e` of
/// length `depth`, escalating the depth until two consecutive values agree.
pub fn lambda_gcp_depth(t: &Transducer, q: StateId, w: &[Letter], depth: usize) -> Result<Word> {
    let cap = (4 * t.num_states()).max(depth + 1);
    let at = |d: usize| -> Result<Word> {
        let (s, prefix) = t.run(q, w);
        let alph = Alphabet::new(t.alphabet_size())?;
        let outs: Vec<Word> = alph
            .words_of_len(d)
            .into_iter()
            .map(|e| prefix.concat(&t.run(s, &e).1))
            .collect();
        lcp(outs.iter().map(|w| w.as_slice()))
    };
    let mut prev = at(depth.saturating_sub(1))?;
    for d in depth.max(1)..=cap {
        let cur = at(d)?;
        if cur == prev {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::BoundExceeded(format!(
        "common prefix not stabilized within depth {cap}"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

/// The lexicographically least or greatest point of `im(q)`.
pub fn extreme_point(t: &Transducer, q: StateId, which: Extreme) -> Result<EpWord> {
    let mut cur = ConfigSet::state(q);
    let mut seen: HashMap<ConfigSet, usize> = HashMap::new();
    let mut out = Word::empty();
    loop {
        if let Some(&start) = seen.get(&cur) {
            return EpWord::new(Word::from(&out[..start]), out.slice(start));
        }
        if seen.len() > SET_CAP {
            return Err(Error::BoundExceeded("extreme point search".into()));
        }
        seen.insert(cur.clone(), out.len());
        let letters: Vec<Letter> = match which {
            Extreme::Min => t.letters().collect(),
            Extreme::Max => t.letters().rev().collect(),
        };
        let (b, d) = letters
            .into_iter()
            .map(|b| (b, derivative(t, &cur, b)))
            .find(|(_, d)| !d.is_empty())
            .expect("images are nonempty");
        out.push(b);
        cur = d;
    }
}

/// `h_q(x)` for an eventually periodic input `x`.
pub fn image_point(t: &Transducer, q: StateId, x: &EpWord) -> EpWord {
    let (mut s, mut out) = t.run(q, x.pre());
    let mut seen: HashMap<StateId, usize> = HashMap::new();
    loop {
        if let Some(&start) = seen.get(&s) {
            return EpWord::new(Word::from(&out[..start]), out.slice(start))
                .expect("circuits have nonempty output");
        }
        seen.insert(s, out.len());
        let (s2, o) = t.run(s, x.period());
        out.extend_from(&o);
        s = s2;
    }
}

/// `λ(input, q)`: the output determined by a finite input, without lookahead.
pub fn evaluate_prefix(t: &Transducer, q: StateId, input: &[Letter]) -> Word {
    t.run(q, input).1
}

/// `L_q(w)`: the longest common prefix of the inputs mapped into `U_w`.
/// Requires `U_w ⊆ im(q)`.
pub fn l_map(t: &Transducer, q: StateId, w: &[Letter]) -> Result<Word> {
    let cover = image_antichain(t, q)?;
    if !cover.covers(w) {
        return Err(Error::Precondition(format!(
            "cone {} is not inside the image of state {q}",
            Word::from(w)
        )));
    }
    l_map_unchecked(t, q, w)
}

pub(crate) fn l_map_unchecked(t: &Transducer, q: StateId, w: &[Letter]) -> Result<Word> {
    let hits = |state: StateId, out: &Word| -> bool {
        if w.len() <= out.len() {
            out.starts_with(w)
        } else if w.starts_with(out) {
            image_meets(t, state, &w[out.len()..])
        } else {
            false
        }
    };
    let mut u = Word::empty();
    let mut state = q;
    let mut out = Word::empty();
    let cap = SET_CAP + w.len();
    loop {
        let mut hit = None;
        let mut count = 0;
        for a in t.letters() {
            let o = out.concat(t.output(state, a));
            if hits(t.next(state, a), &o) {
                count += 1;
                hit = Some((a, o));
            }
        }
        match count {
            0 => {
                return Err(Error::Precondition(format!(
                    "no input of state {q} reaches cone {}",
                    Word::from(w)
                )))
            }
            1 => {
                let (a, o) = hit.unwrap();
                state = t.next(state, a);
                out = o;
                u.push(a);
                if u.len() > cap {
                    return Err(Error::BoundExceeded("preimage prefix search".into()));
                }
            }
            _ => return Ok(u),
        }
    }
}

/// Result of an injectivity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Injectivity {
    Yes,
    /// Two distinct inputs with the same image.
    No {
        x: EpWord,
        y: EpWord,
    },
    Unknown,
}

impl Injectivity {
    pub fn is_yes(&self) -> bool {
        matches!(self, Injectivity::Yes)
    }
}

/// Default budget of pair configurations for the injectivity search.
pub fn default_residual_cap(t: &Transducer) -> usize {
    let q = t.num_states();
    (q * q * t.max_output_len().max(1) * 4).max(1 << 20)
}

/// A pair configuration: the two runs sit in `p1`, `p2`; `lead` is what the
/// run named by `ahead` has written beyond the other.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct PairConfig {
    p1: StateId,
    p2: StateId,
    lead: Word,
    first_ahead: bool,
}

fn pair_config(p1: StateId, p2: StateId, o1: &Word, o2: &Word) -> Option<PairConfig> {
    if let Some(rest) = o1.minus_prefix(o2) {
        Some(PairConfig {
            p1,
            p2,
            first_ahead: !rest.is_empty(),
            lead: rest,
        })
    } else {
        o2.minus_prefix(o1).map(|rest| PairConfig {
            p1,
            p2,
            lead: rest,
            first_ahead: false,
        })
    }
}

/// Successors of a pair configuration, each with the (side, letter) read.
fn pair_steps(t: &Transducer, c: &PairConfig) -> Vec<(PairConfig, bool, Letter)> {
    let mut out = Vec::new();
    // Advance the run that is behind (the first run on ties).
    let advance_first = !c.first_ahead;
    for a in t.letters() {
        let next = if advance_first {
            pair_config(t.next(c.p1, a), c.p2, t.output(c.p1, a), &c.lead)
        } else {
            let o = t.output(c.p2, a);
            pair_config(c.p1, t.next(c.p2, a), &c.lead, o)
        };
        if let Some(n) = next {
            out.push((n, advance_first, a));
        }
    }
    out
}

/// Decides whether `h_q` is injective by searching for two runs that split
/// at some reachable state and write the same infinite output.
pub fn is_injective_state(t: &Transducer, q: StateId, cap: usize) -> Injectivity {
    injectivity_from(t, &t.reachable_from(q), Some(q), cap)
}

/// Injectivity of every state at once.
pub fn machine_injective(t: &Transducer, cap: usize) -> Injectivity {
    let all: Vec<StateId> = t.states().collect();
    injectivity_from(t, &all, None, cap)
}

fn path_to(t: &Transducer, from: StateId, to: StateId) -> Word {
    let mut prev: HashMap<StateId, (StateId, Letter)> = HashMap::new();
    let mut queue = std::collections::VecDeque::from([from]);
    let mut seen = vec![false; t.num_states()];
    seen[from] = true;
    while let Some(s) = queue.pop_front() {
        if s == to {
            break;
        }
        for a in t.letters() {
            let r = t.next(s, a);
            if !seen[r] {
                seen[r] = true;
                prev.insert(r, (s, a));
                queue.push_back(r);
            }
        }
    }
    let mut letters = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, a) = prev[&cur];
        letters.push(a);
        cur = p;
    }
    letters.reverse();
    Word::from_letters(letters)
}

/// DFS frame: config, successors, next index, step that led here.
type Frame = (
    PairConfig,
    Vec<(PairConfig, bool, Letter)>,
    usize,
    Option<(bool, Letter)>,
);

fn injectivity_from(
    t: &Transducer,
    split_states: &[StateId],
    origin: Option<StateId>,
    cap: usize,
) -> Injectivity {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut mark: HashMap<PairConfig, Mark> = HashMap::new();
    for &r in split_states {
        for a in t.letters() {
            for b in t.letters().filter(|&b| b > a) {
                let Some(seed) = pair_config(t.next(r, a), t.next(r, b), t.output(r, a), t.output(r, b))
                else {
                    continue;
                };
                if mark.contains_key(&seed) {
                    continue;
                }
                let mut stack: Vec<Frame> = vec![(seed.clone(), pair_steps(t, &seed), 0, None)];
                mark.insert(seed, Mark::Active);
                while let Some(frame) = stack.last_mut() {
                    if frame.2 == frame.1.len() {
                        mark.insert(frame.0.clone(), Mark::Done);
                        stack.pop();
                        continue;
                    }
                    let (child, side, letter) = frame.1[frame.2].clone();
                    frame.2 += 1;
                    match mark.get(&child) {
                        Some(Mark::Done) => {}
                        Some(Mark::Active) => {
                            let start = stack.iter().position(|f| f.0 == child).unwrap();
                            let mut steps: Vec<(bool, Letter)> =
                                stack[1..].iter().filter_map(|f| f.3).collect();
                            steps.push((side, letter));
                            let stem_len = start;
                            let (stem, cycle) = steps.split_at(stem_len);
                            let pick = |part: &[(bool, Letter)], first: bool| {
                                Word::from_letters(part.iter().filter(|s| s.0 == first).map(|s| s.1))
                            };
                            let prefix = match origin {
                                Some(o) => path_to(t, o, r),
                                None => Word::empty(),
                            };
                            let x = EpWord::new(prefix.with(a).concat(&pick(stem, true)), pick(cycle, true));
                            let y =
                                EpWord::new(prefix.with(b).concat(&pick(stem, false)), pick(cycle, false));
                            return match (x, y) {
                                (Ok(x), Ok(y)) => Injectivity::No { x, y },
                                _ => Injectivity::Unknown,
                            };
                        }
                        None => {
                            if mark.len() >= cap {
                                return Injectivity::Unknown;
                            }
                            mark.insert(child.clone(), Mark::Active);
                            let steps = pair_steps(t, &child);
                            stack.push((child, steps, 0, Some((side, letter))));
                        }
                    }
                }
            }
        }
    }
    Injectivity::Yes
}

/// Per-state order class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderClass {
    LexPreserving,
    CyclicPreserving,
    CyclicReversing,
    None,
}

impl OrderClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderClass::LexPreserving => "lex_preserving",
            OrderClass::CyclicPreserving => "cyclic_preserving",
            OrderClass::CyclicReversing => "cyclic_reversing",
            OrderClass::None => "none",
        }
    }
}

/// Extreme points of every state, computed once.
pub struct Extremes {
    pub min: Vec<EpWord>,
    pub max: Vec<EpWord>,
}

impl Extremes {
    pub fn compute(t: &Transducer) -> Result<Extremes> {
        let mut min = Vec::with_capacity(t.num_states());
        let mut max = Vec::with_capacity(t.num_states());
        for q in t.states() {
            min.push(extreme_point(t, q, Extreme::Min)?);
            max.push(extreme_point(t, q, Extreme::Max)?);
        }
        Ok(Extremes { min, max })
    }
}

/// Edgewise order data of one state: whether consecutive letter branches are
/// strictly increasing (resp. decreasing) and whether they touch on the
/// circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeOrder {
    pub increasing: bool,
    pub decreasing: bool,
    pub glued_increasing: bool,
    pub glued_decreasing: bool,
}

pub fn edge_order(t: &Transducer, q: StateId, ext: &Extremes) -> EdgeOrder {
    let n = t.alphabet_size();
    let branch = |a: Letter, which: Extreme| {
        let s = t.next(q, a);
        let p = match which {
            Extreme::Min => &ext.min[s],
            Extreme::Max => &ext.max[s],
        };
        p.prepend(t.output(q, a))
    };
    let mut e = EdgeOrder {
        increasing: true,
        decreasing: true,
        glued_increasing: true,
        glued_decreasing: true,
    };
    for a in 0..(n - 1) as Letter {
        let hi_a = branch(a, Extreme::Max);
        let lo_b = branch(a + 1, Extreme::Min);
        let lo_a = branch(a, Extreme::Min);
        let hi_b = branch(a + 1, Extreme::Max);
        e.increasing &= hi_a.lex_cmp(&lo_b) == Ordering::Less;
        e.glued_increasing &= circle_equal(&hi_a, &lo_b, n);
        e.decreasing &= hi_b.lex_cmp(&lo_a) == Ordering::Less;
        e.glued_decreasing &= circle_equal(&hi_b, &lo_a, n);
    }
    e
}

/// Whether `h_q` preserves the lexicographic order, checked edgewise at every
/// state reachable from `q`.
pub fn is_lex_preserving_state(t: &Transducer, q: StateId, ext: &Extremes) -> bool {
    t.reachable_from(q)
        .into_iter()
        .all(|r| edge_order(t, r, ext).increasing)
}

pub fn is_lex_reversing_state(t: &Transducer, q: StateId, ext: &Extremes) -> bool {
    t.reachable_from(q)
        .into_iter()
        .all(|r| edge_order(t, r, ext).decreasing)
}

/// Sample inputs `w c^ω` with `|w| ≤ 2` and `c ∈ {0, n-1}` in input order.
fn order_samples(n: usize) -> Vec<EpWord> {
    let alph = Alphabet::new(n).expect("valid alphabet");
    let mut out = Vec::new();
    for len in 0..=2 {
        for w in alph.words_of_len(len) {
            for c in [0, (n - 1) as Letter] {
                out.push(EpWord::new(w.clone(), Word::letter(c)).unwrap());
            }
        }
    }
    out.sort_by(|a, b| a.lex_cmp(b));
    out.dedup();
    out
}

/// Order class of each state. A state is lex-preserving by the exact
/// edgewise test; reversing states are reported as cyclic-reversing; other
/// states are classified by counting cyclic descents on sampled points.
pub fn order_behavior(t: &Transducer) -> Result<Vec<OrderClass>> {
    let ext = Extremes::compute(t)?;
    let samples = order_samples(t.alphabet_size());
    let mut classes = Vec::with_capacity(t.num_states());
    for q in t.states() {
        if is_lex_preserving_state(t, q, &ext) {
            classes.push(OrderClass::LexPreserving);
            continue;
        }
        if is_lex_reversing_state(t, q, &ext) {
            classes.push(OrderClass::CyclicReversing);
            continue;
        }
        let images: Vec<EpWord> = samples.iter().map(|x| image_point(t, q, x)).collect();
        let k = images.len();
        let mut descents = 0;
        let mut ascents = 0;
        for i in 0..k {
            match images[i].lex_cmp(&images[(i + 1) % k]) {
                Ordering::Greater => descents += 1,
                Ordering::Less => ascents += 1,
                Ordering::Equal => {}
            }
        }
        classes.push(if descents <= 1 {
            OrderClass::CyclicPreserving
        } else if ascents <= 1 {
            OrderClass::CyclicReversing
        } else {
            OrderClass::None
        });
    }
    Ok(classes)
}

/// Orientation of a circle-compatible machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Preserving,
    Reversing,
}

/// Uniform orientation test: every state maps consecutive letter branches to
/// consecutive, touching arcs, all in the same direction.
pub fn circle_orientation(t: &Transducer) -> Result<Option<Orientation>> {
    let ext = Extremes::compute(t)?;
    let orders: Vec<EdgeOrder> = t.states().map(|q| edge_order(t, q, &ext)).collect();
    if orders.iter().all(|e| e.increasing && e.glued_increasing) {
        Ok(Some(Orientation::Preserving))
    } else if orders.iter().all(|e| e.decreasing && e.glued_decreasing) {
        Ok(Some(Orientation::Reversing))
    } else {
        Ok(None)
    }
}

/// The literal order condition: every state preserves the lexicographic
/// order.
pub fn all_states_lex_preserving(t: &Transducer) -> Result<bool> {
    let ext = Extremes::compute(t)?;
    Ok(t.states().all(|q| edge_order(t, q, &ext).increasing))
}

/// Everything known about one state.
#[derive(Clone, Debug)]
pub struct StateAnalysis {
    pub state: StateId,
    pub image: ConeAntichain,
    pub injective: Injectivity,
    pub homeomorphism_state: bool,
    pub leftmost: EpWord,
    pub rightmost: EpWord,
    pub order: OrderClass,
}

pub fn analyze(t: &Transducer) -> Result<Vec<StateAnalysis>> {
    let orders = order_behavior(t)?;
    let cap = default_residual_cap(t);
    t.states()
        .map(|q| {
            let image = image_antichain(t, q)?;
            let injective = is_injective_state(t, q, cap);
            let homeomorphism_state = image.is_complete() && injective.is_yes();
            Ok(StateAnalysis {
                state: q,
                homeomorphism_state,
                leftmost: extreme_point(t, q, Extreme::Min)?,
                rightmost: extreme_point(t, q, Extreme::Max)?,
                order: orders[q],
                injective,
                image,
            })
        })
        .collect()
}

pub fn is_homeomorphism_state(t: &Transducer, q: StateId) -> Result<bool> {
    Ok(image_antichain(t, q)?.is_complete() && is_injective_state(t, q, default_residual_cap(t)).is_yes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_b, gen_c, gen_identity, gen_r, tde};
    use crate::random::random_valid_transducer;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 10).unwrap()
    }

    fn ep(s: &str) -> EpWord {
        EpWord::parse(s, 10).unwrap()
    }

    fn families() -> Vec<Transducer> {
        vec![
            gen_identity(2),
            gen_r(2),
            gen_r(3),
            tde(4, 2, 2).unwrap(),
            tde(6, 2, 3).unwrap(),
            tde(6, 3, 2).unwrap(),
            tde(9, 3, 3).unwrap(),
            gen_b(3, 1).unwrap(),
            gen_c(3, 1).unwrap(),
            gen_b(4, 2).unwrap(),
        ]
    }

    #[test]
    fn images() {
        let t = tde(4, 2, 2).unwrap();
        assert_eq!(image_antichain(&t, 0).unwrap().words(), &[w("0"), w("1")]);
        assert_eq!(image_antichain(&t, 1).unwrap().words(), &[w("2"), w("3")]);
        assert!(image_antichain(&gen_identity(3), 0).unwrap().is_complete());
        let b = gen_b(3, 1).unwrap();
        assert!(image_antichain(&b, b.state_by_name("p").unwrap())
            .unwrap()
            .is_complete());
        let t_img = image_antichain(&b, b.state_by_name("t").unwrap()).unwrap();
        assert_eq!(t_img.words(), &[w("0"), w("1"), w("20")]);
    }

    #[test]
    fn homeomorphism_states() {
        assert!(is_homeomorphism_state(&gen_identity(2), 0).unwrap());
        assert!(!is_homeomorphism_state(&tde(4, 2, 2).unwrap(), 0).unwrap());
        let b = gen_b(3, 1).unwrap();
        assert!(is_homeomorphism_state(&b, b.state_by_name("p").unwrap()).unwrap());
    }

    #[test]
    fn l_map_examples() {
        let id = gen_identity(3);
        assert_eq!(l_map(&id, 0, &w("0121")).unwrap(), w("0121"));
        let t = tde(4, 2, 2).unwrap();
        assert_eq!(l_map(&t, 0, &w("0")).unwrap(), w(""));
        assert_eq!(l_map(&t, 0, &w("02")).unwrap(), w("1"));
        assert!(l_map(&t, 0, &w("2")).is_err());
        let b = gen_b(3, 1).unwrap();
        assert_eq!(l_map(&b, b.state_by_name("p").unwrap(), &w("1")).unwrap(), w("1"));
    }

    #[test]
    fn injectivity() {
        let cap = |t: &Transducer| default_residual_cap(t);
        let id = gen_identity(2);
        assert_eq!(is_injective_state(&id, 0, cap(&id)), Injectivity::Yes);
        let collapse = Transducer::from_fn(2, 1, |_, _| (0, w("0"))).unwrap();
        match is_injective_state(&collapse, 0, cap(&collapse)) {
            Injectivity::No { x, y } => {
                assert_ne!(x, y);
                assert_eq!(image_point(&collapse, 0, &x), image_point(&collapse, 0, &y));
            }
            other => panic!("expected a collision, got {other:?}"),
        }
        for t in families() {
            assert_eq!(machine_injective(&t, cap(&t)), Injectivity::Yes, "{t:?}");
        }
    }

    #[test]
    fn extremes() {
        let id = gen_identity(2);
        assert_eq!(extreme_point(&id, 0, Extreme::Min).unwrap(), ep("(0)"));
        assert_eq!(extreme_point(&id, 0, Extreme::Max).unwrap(), ep("(1)"));
        let t = tde(4, 2, 2).unwrap();
        assert_eq!(extreme_point(&t, 1, Extreme::Min).unwrap(), ep("2(0)"));
        let b = gen_b(3, 1).unwrap();
        let s = b.state_by_name("s").unwrap();
        assert_eq!(extreme_point(&b, s, Extreme::Min).unwrap(), ep("(0)"));
        assert_eq!(
            extreme_point(&b, b.state_by_name("t").unwrap(), Extreme::Max).unwrap(),
            ep("20(2)")
        );
    }

    #[test]
    fn order_classes() {
        assert!(order_behavior(&gen_identity(3))
            .unwrap()
            .iter()
            .all(|&c| c == OrderClass::LexPreserving));
        assert_eq!(
            order_behavior(&gen_r(2)).unwrap(),
            vec![OrderClass::CyclicReversing]
        );
        let swap = Transducer::from_fn(3, 1, |_, a| (0, Word::letter([1, 0, 2][a as usize]))).unwrap();
        assert_eq!(order_behavior(&swap).unwrap(), vec![OrderClass::None]);
        assert_eq!(circle_orientation(&swap).unwrap(), None);
        for t in [tde(4, 2, 2).unwrap(), gen_b(3, 1).unwrap(), gen_c(3, 1).unwrap()] {
            assert_eq!(circle_orientation(&t).unwrap(), Some(Orientation::Preserving));
        }
        assert_eq!(
            circle_orientation(&gen_r(3)).unwrap(),
            Some(Orientation::Reversing)
        );
    }

    #[test]
    fn evaluation() {
        let id = gen_identity(3);
        assert_eq!(evaluate_prefix(&id, 0, &w("2102")), w("2102"));
        let b = gen_b(3, 1).unwrap();
        assert_eq!(
            evaluate_prefix(&b, b.state_by_name("p").unwrap(), &w("00")),
            w("0")
        );
        // 5 = 2·2 + 1 writes 0·3 + 2 and moves to q1; 2 = 1·2 + 0 then writes 1·3 + 1.
        assert_eq!(evaluate_prefix(&tde(6, 2, 3).unwrap(), 0, &w("52")), w("24"));
    }

    #[test]
    fn lambda_exact_matches_depth_estimate() {
        for t in families() {
            let alph = Alphabet::new(t.alphabet_size()).unwrap();
            for q in t.states() {
                for u in (0..=2).flat_map(|l| alph.words_of_len(l)) {
                    assert_eq!(
                        lambda_gcp(&t, q, &u).unwrap(),
                        lambda_gcp_depth(&t, q, &u, 3).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn cone_counts_refine_consistently() {
        for t in families() {
            let n = t.alphabet_size() as u128;
            let mut residues = Vec::new();
            for q in t.states() {
                let c = image_antichain(&t, q).unwrap();
                let l = c.max_len();
                let a = c.count_at_level(l).unwrap();
                let b = c.count_at_level(l + 1).unwrap();
                assert_eq!(b, a * n);
                assert_eq!(c.refine_to_level(l + 1).unwrap().len() as u128, b);
                // Merging n siblings drops the count by n - 1.
                assert_eq!((a - c.len() as u128) % (n - 1), 0);
                residues.push(c.len() as u128 % (n - 1));
            }
            assert!(residues.windows(2).all(|r| r[0] == r[1]), "{t:?}");
        }
    }

    fn lex_violation(t: &Transducer, q: StateId, depth: usize) -> bool {
        let alph = Alphabet::new(t.alphabet_size()).unwrap();
        let words = alph.words_of_len(depth);
        let outs: Vec<Word> = words.iter().map(|u| evaluate_prefix(t, q, u)).collect();
        // words are in lex order; a later word must not produce an
        // incomparable smaller output
        for i in 0..outs.len() {
            for j in i + 1..outs.len() {
                let (x, y) = (&outs[i], &outs[j]);
                let k = crate::words::common_prefix_len(x, y);
                if k < x.len() && k < y.len() && x[k] > y[k] {
                    return true;
                }
            }
        }
        false
    }

    // The edgewise criterion must hold at every state reachable from q.
    fn lex_preserving_below(t: &Transducer, q: StateId, ext: &Extremes) -> bool {
        t.reachable_from(q)
            .into_iter()
            .all(|s| is_lex_preserving_state(t, s, ext))
    }

    #[test]
    fn lex_criterion_against_brute_force_on_families() {
        for t in families() {
            let ext = Extremes::compute(&t).unwrap();
            let depth = if t.alphabet_size() <= 3 { 5 } else { 3 };
            for q in t.states() {
                if lex_preserving_below(&t, q, &ext) {
                    assert!(!lex_violation(&t, q, depth), "{t:?} state {q}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn lex_criterion_against_brute_force(seed in any::<u64>(), states in 1usize..4) {
            let t = random_valid_transducer(seed, 2, states, 2);
            if let Ok(ext) = Extremes::compute(&t) {
                for q in t.states() {
                    if lex_preserving_below(&t, q, &ext) {
                        prop_assert!(!lex_violation(&t, q, 6));
                    }
                }
            }
        }

        #[test]
        fn l_map_is_monotone(seed in any::<u64>(), states in 1usize..4) {
            let t = random_valid_transducer(seed, 2, states, 2);
            for q in t.states() {
                let Ok(cover) = image_antichain(&t, q) else { continue };
                let alph = Alphabet::new(2).unwrap();
                for len in cover.max_len()..cover.max_len() + 3 {
                    for u in alph.words_of_len(len) {
                        if !cover.covers(&u) {
                            continue;
                        }
                        let lu = l_map(&t, q, &u).unwrap();
                        for a in 0..2 {
                            let la = l_map(&t, q, &u.with(a)).unwrap();
                            prop_assert!(lu.is_prefix_of(&la));
                        }
                    }
                }
            }
        }

        #[test]
        fn extremes_bound_sampled_points(seed in any::<u64>(), states in 1usize..4, n in 2usize..4) {
            let t = random_valid_transducer(seed, n, states, 2);
            let Ok(ext) = Extremes::compute(&t) else { return Ok(()) };
            let alph = Alphabet::new(n).unwrap();
            for q in t.states() {
                for u in alph.words_of_len(if n == 2 { 8 } else { 5 }) {
                    for c in 0..n as Letter {
                        let x = EpWord::new(u.clone(), Word::letter(c)).unwrap();
                        let y = image_point(&t, q, &x);
                        prop_assert!(ext.min[q].lex_cmp(&y) != Ordering::Greater);
                        prop_assert!(ext.max[q].lex_cmp(&y) != Ordering::Less);
                    }
                }
            }
        }
    }
}
