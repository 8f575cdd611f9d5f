//! Marker codes and the embedding of the `x`-subgroup over `X_n` into the
//! group over `X_m`.
//!
//! Given a code `b_0, …, b_{n-1}` of equal-length words over `X_m` with only
//! trivial overlaps, every sequence over `X_m` splits uniquely into maximal
//! runs of code words and the letters between them. The map `f_T` decodes
//! each run, feeds it to `T` from the state `q_x`, re-encodes the output and
//! leaves the other letters alone. A run that does not end in `b_x` is closed
//! as if `x` had been read, minus the final `x`.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cantor::lambda;
use crate::error::{Error, Result};
use crate::group::{normalize, onx_conditions, GroupElement};
use crate::minimize::pending_prefixes;
use crate::sync::sync_level;
use crate::transducer::{InitialTransducer, StateId, Transducer};
use crate::words::{Alphabet, Letter, Word};

/// Equal-length words over `X_m` with only trivial overlaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkerCode {
    m: usize,
    words: Vec<Word>,
}

impl MarkerCode {
    pub fn new(m: usize, words: Vec<Word>) -> Result<Self> {
        Alphabet::new(m)?;
        if words.is_empty() {
            return Err(Error::Empty("marker code"));
        }
        let len = words[0].len();
        if len == 0 || words.iter().any(|w| w.len() != len) {
            return Err(Error::Precondition(
                "code words must share a positive length".into(),
            ));
        }
        for w in &words {
            w.check_alphabet(m)?;
        }
        if !has_trivial_overlaps(&words) {
            return Err(Error::Precondition("code has a nontrivial overlap".into()));
        }
        Ok(MarkerCode { m, words })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word_len(&self) -> usize {
        self.words[0].len()
    }

    /// `b_y`.
    pub fn encode(&self, y: Letter) -> &Word {
        &self.words[y as usize]
    }

    pub fn encode_word(&self, w: &[Letter]) -> Word {
        let mut out = Word::empty();
        for &y in w {
            out.extend_from(self.encode(y));
        }
        out
    }

    pub fn decode(&self, w: &[Letter]) -> Option<Letter> {
        self.words
            .iter()
            .position(|b| b.as_slice() == w)
            .map(|i| i as Letter)
    }
}

/// No proper suffix of a member equals a proper prefix of a member.
pub fn has_trivial_overlaps(words: &[Word]) -> bool {
    for u in words {
        for v in words {
            for k in 1..u.len().min(v.len()) {
                if u[u.len() - k..] == v[..k] {
                    return false;
                }
            }
        }
    }
    true
}

fn has_run(u: &[Letter], a: Letter, k: usize) -> bool {
    u.windows(k).any(|w| w.iter().all(|&b| b == a))
}

/// Words `0^k 1 u` over `{0, 1}` where `u` has no factor `0^k` and ends in
/// `1`, at the least total length (then least `k`) giving at least
/// `max(n, min_count)` words; the first `n` in lexicographic order.
pub fn gen_marker_code(n: usize, m: usize, min_count: usize) -> Result<MarkerCode> {
    Alphabet::new(m)?;
    if n == 0 {
        return Err(Error::Precondition("code must have at least one word".into()));
    }
    let want = n.max(min_count);
    let binary = Alphabet::new(2)?;
    for len in 2usize.. {
        for k in 1..len {
            let tail = len - k - 1;
            let mut words: Vec<Word> = binary
                .words_of_len(tail)
                .into_iter()
                .filter(|u| !has_run(u, 0, k) && u.last().is_none_or(|&b| b == 1))
                .map(|u| Word::repeat_letter(0, k).with(1).concat(&u))
                .collect();
            words.sort();
            if words.len() >= want && has_trivial_overlaps(&words) {
                words.truncate(n);
                return MarkerCode::new(m, words);
            }
        }
    }
    unreachable!("the search over lengths is unbounded")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Mode {
    Gap,
    Block { state: StateId, last_was_x: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct ParserState {
    mode: Mode,
    buffer: Vec<Letter>,
}

/// The exact finite transducer computing `f_T` from the start of a sequence.
pub struct MarkerMachine {
    machine: InitialTransducer,
    pending: Vec<Word>,
}

impl MarkerMachine {
    pub fn build(t: &Transducer, code: &MarkerCode, x: Letter) -> Result<Self> {
        let n = t.alphabet_size();
        if code.words().len() != n {
            return Err(Error::Precondition(format!(
                "code has {} words for an alphabet of {n}",
                code.words().len()
            )));
        }
        let report = onx_conditions(t, x);
        let q_x = match (report.holds(), report.q_x) {
            (true, Some(q)) => q,
            _ => {
                return Err(Error::Precondition(format!(
                    "not in the {x}-subgroup: {report:?}"
                )))
            }
        };
        let len = code.word_len();
        let m = code.m();

        let finalize = |state: StateId, last_was_x: bool, out: &mut Word| {
            if !last_was_x {
                let w = t.output(state, x);
                out.extend_from(&code.encode_word(&w[..w.len() - 1]));
            }
        };
        let step = |s: &ParserState, c: Letter| -> (ParserState, Word) {
            let mut buffer = s.buffer.clone();
            buffer.push(c);
            let mut out = Word::empty();
            let mut mode = s.mode;
            let decoded = (buffer.len() >= len)
                .then(|| code.decode(&buffer[buffer.len() - len..]))
                .flatten();
            if let Some(y) = decoded {
                let gap = &buffer[..buffer.len() - len];
                let from = match (&mode, gap.is_empty()) {
                    (Mode::Block { state, .. }, true) => *state,
                    _ => {
                        if let Mode::Block { state, last_was_x } = mode {
                            finalize(state, last_was_x, &mut out);
                        }
                        out.extend_from(gap);
                        q_x
                    }
                };
                out.extend_from(&code.encode_word(t.output(from, y)));
                mode = Mode::Block {
                    state: t.next(from, y),
                    last_was_x: y == x,
                };
                buffer.clear();
            } else if buffer.len() == len {
                if let Mode::Block { state, last_was_x } = mode {
                    finalize(state, last_was_x, &mut out);
                }
                mode = Mode::Gap;
                out.push(buffer.remove(0));
            }
            (ParserState { mode, buffer }, out)
        };

        let start = ParserState {
            mode: Mode::Gap,
            buffer: Vec::new(),
        };
        let mut index: HashMap<ParserState, usize> = HashMap::new();
        let mut states = vec![start.clone()];
        index.insert(start, 0);
        let mut rows: Vec<Vec<(StateId, Word)>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let s = states[i].clone();
            let mut row = Vec::with_capacity(m);
            for c in 0..m as Letter {
                let (next, out) = step(&s, c);
                let j = *index.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                });
                row.push((j, out));
            }
            if rows.len() <= i {
                rows.resize(i + 1, Vec::new());
            }
            rows[i] = row;
        }
        let names = states
            .iter()
            .map(|s| {
                let buf: String = Word::from(s.buffer.clone()).to_text(m).replace(',', "_");
                match &s.mode {
                    Mode::Gap => format!("g_{buf}"),
                    Mode::Block { state, last_was_x } => {
                        format!("b{}{}_{buf}", t.name(*state), if *last_was_x { "x" } else { "" })
                    }
                }
            })
            .collect();
        let base = Transducer::from_rows(m, rows)?.with_names(names)?;
        if let Err(v) = base.validate() {
            return Err(Error::Internal(format!("marker machine invalid: {v}")));
        }
        let pending = pending_prefixes(&base)?;
        Ok(MarkerMachine {
            machine: InitialTransducer::new(base, 0)?,
            pending,
        })
    }

    pub fn machine(&self) -> &InitialTransducer {
        &self.machine
    }

    /// The output of `f_T` determined by a finite input.
    pub fn oracle(&self, input: &[Letter]) -> Word {
        let (s, out) = self.machine.run(input);
        out.concat(&self.pending[s])
    }
}

/// `f_T` on a finite input: everything determined so far.
pub fn f_oracle(t: &Transducer, code: &MarkerCode, x: Letter, input: &[Letter]) -> Result<Word> {
    Ok(MarkerMachine::build(t, code, x)?.oracle(input))
}

/// A map on sequences known through the output it determines on finite
/// inputs.
pub trait LocalActionOracle {
    fn alphabet_size(&self) -> usize;
    fn eval(&self, input: &[Letter]) -> Result<Word>;
}

/// The oracle of a state of a known transducer: `λ(u, q) Λ(π(u, q))`.
pub struct MachineOracle {
    t: Transducer,
    start: StateId,
    pending: Vec<Word>,
}

impl MachineOracle {
    pub fn new(t: Transducer, start: StateId) -> Result<Self> {
        let pending = t.states().map(|q| lambda(&t, q)).collect::<Result<_>>()?;
        Ok(MachineOracle { t, start, pending })
    }
}

impl LocalActionOracle for MachineOracle {
    fn alphabet_size(&self) -> usize {
        self.t.alphabet_size()
    }

    fn eval(&self, input: &[Letter]) -> Result<Word> {
        let (s, out) = self.t.run(self.start, input);
        Ok(out.concat(&self.pending[s]))
    }
}

impl LocalActionOracle for MarkerMachine {
    fn alphabet_size(&self) -> usize {
        self.machine.base.alphabet_size()
    }

    fn eval(&self, input: &[Letter]) -> Result<Word> {
        Ok(self.oracle(input))
    }
}

/// The identity map as an oracle.
pub struct IdentityOracle(pub usize);

impl LocalActionOracle for IdentityOracle {
    fn alphabet_size(&self) -> usize {
        self.0
    }

    fn eval(&self, input: &[Letter]) -> Result<Word> {
        Ok(Word::from(input))
    }
}

fn increment<O: LocalActionOracle + ?Sized>(oracle: &O, w: &[Letter], e: &[Letter]) -> Result<Word> {
    let base = oracle.eval(w)?;
    let full = oracle.eval(&Word::from(w).concat(e))?;
    full.minus_prefix(&base)
        .ok_or_else(|| Error::Internal("oracle output is not monotone".into()))
}

/// Builds the transducer whose states are the local actions after windows of
/// length `k`, told apart by their outputs on all extensions of length at
/// most `depth`. The result is checked against the oracle before it is
/// returned in minimal core form.
pub fn synchronizing_completion<O: LocalActionOracle + ?Sized>(
    oracle: &O,
    k: usize,
    depth: usize,
) -> Result<Transducer> {
    let m = oracle.alphabet_size();
    let alph = Alphabet::new(m)?;
    let extensions: Vec<Word> = (0..=depth).flat_map(|d| alph.words_of_len(d)).collect();
    let signature =
        |w: &Word| -> Result<Vec<Word>> { extensions.iter().map(|e| increment(oracle, w, e)).collect() };
    let seed = Word::repeat_letter(0, k);
    let mut reps = vec![seed.clone()];
    let mut class_of: HashMap<Vec<Word>, usize> = HashMap::new();
    class_of.insert(signature(&seed)?, 0);
    let mut window_class: HashMap<Word, usize> = HashMap::new();
    window_class.insert(seed, 0);
    let mut rows: Vec<Vec<(StateId, Word)>> = Vec::new();
    let mut i = 0;
    while i < reps.len() {
        let w = reps[i].clone();
        let mut row = Vec::with_capacity(m);
        for a in alph.letters() {
            let wa = w.with(a);
            let next_window = wa.slice(wa.len() - k);
            let j = match window_class.get(&next_window) {
                Some(&j) => j,
                None => {
                    let sig = signature(&next_window)?;
                    let j = *class_of.entry(sig).or_insert_with(|| {
                        reps.push(next_window.clone());
                        reps.len() - 1
                    });
                    window_class.insert(next_window, j);
                    j
                }
            };
            row.push((j, increment(oracle, &w, &[a])?));
        }
        rows.push(row);
        i += 1;
        if reps.len() > 1 << 16 {
            return Err(Error::BoundExceeded("too many local actions".into()));
        }
    }
    let built = Transducer::from_rows(m, rows)?;
    if let Err(v) = built.validate() {
        return Err(Error::BoundExceeded(format!("insufficient depth: {v}")));
    }
    match sync_level(&built, usize::MAX) {
        Some(c) if c.level <= k.max(1) => {}
        _ => {
            return Err(Error::BoundExceeded(
                "K too small: result does not synchronize".into(),
            ))
        }
    }
    // A posteriori check on the discovered windows and a fixed random sample.
    let mut windows: Vec<Word> = window_class.keys().cloned().collect();
    windows.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..64 {
        windows.push(Word::from_letters((0..k).map(|_| rng.gen_range(0..m) as Letter)));
    }
    let checks: Vec<Word> = alph.words_of_len(depth);
    for w in &windows {
        let s = built.state_after(0, w);
        for e in &checks {
            if built.run(s, e).1 != increment(oracle, w, e)? {
                return Err(Error::BoundExceeded(format!(
                    "K too small or depth insufficient: mismatch after window {w}"
                )));
            }
        }
    }
    normalize(&built)
}

/// Retries [`synchronizing_completion`] with doubled `k` up to `max_k`.
pub fn synchronizing_completion_auto<O: LocalActionOracle + ?Sized>(
    oracle: &O,
    mut k: usize,
    depth: usize,
    max_k: usize,
) -> Result<Transducer> {
    loop {
        match synchronizing_completion(oracle, k, depth) {
            Err(Error::BoundExceeded(msg)) if k < max_k => {
                let _ = msg;
                k = (2 * k).max(1);
            }
            other => return other,
        }
    }
}

/// `f_T` as an element over `X_m`.
pub fn marker_embed(t: &GroupElement, x: Letter, m: usize) -> Result<GroupElement> {
    let code = gen_marker_code(t.alphabet_size(), m, t.alphabet_size())?;
    marker_embed_with_code(t, x, &code)
}

pub fn marker_embed_with_code(t: &GroupElement, x: Letter, code: &MarkerCode) -> Result<GroupElement> {
    let mm = MarkerMachine::build(t.rep(), code, x)?;
    GroupElement::new(mm.machine.base.clone())
}
