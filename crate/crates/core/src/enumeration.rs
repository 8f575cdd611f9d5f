//! Exhaustive enumeration of small transducers over `X_2` and the check that
//! the only circle-compatible elements found are the identity and `R`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::cantor::{self, image_antichain, machine_injective, Injectivity};
use crate::error::{Error, Result};
use crate::group::{inverse, GroupElement};
use crate::minimize::is_minimal;
use crate::sync::sync_level;
use crate::transducer::{StateId, Transducer};
use crate::words::{Alphabet, Word};

/// Limits of an enumeration run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumBounds {
    pub n: usize,
    pub max_states: usize,
    pub max_edge_output_len: usize,
    pub max_sync_level: usize,
}

impl EnumBounds {
    pub fn new(
        n: usize,
        max_states: usize,
        max_edge_output_len: usize,
        max_sync_level: usize,
    ) -> Result<Self> {
        Alphabet::new(n)?;
        if max_states == 0 || max_edge_output_len == 0 {
            return Err(Error::Precondition("bounds must be positive".into()));
        }
        Ok(EnumBounds {
            n,
            max_states,
            max_edge_output_len,
            max_sync_level,
        })
    }

    /// Number of labelled machines before any filtering.
    pub fn estimated_count(&self) -> f64 {
        let words: f64 = (0..=self.max_edge_output_len)
            .map(|l| (self.n as f64).powi(l as i32))
            .sum();
        (1..=self.max_states)
            .map(|s| {
                let edges = (s * self.n) as i32;
                (s as f64).powi(edges) * words.powi(edges)
            })
            .sum()
    }
}

/// Transition tables on `s` states, strongly connected and synchronizing
/// within the bound, one per relabelling class.
pub fn enumerate_automata(n: usize, s: usize, max_sync: usize) -> Vec<Vec<StateId>> {
    let edges = s * n;
    let total = s.pow(edges as u32);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for code in 0..total {
        let mut table = Vec::with_capacity(edges);
        let mut c = code;
        for _ in 0..edges {
            table.push(c % s);
            c /= s;
        }
        let t = Transducer::from_fn(n, s, |q, a| (table[q * n + a as usize], Word::letter(a)))
            .expect("well formed");
        if !t.is_strongly_connected() || sync_level(&t, max_sync).is_none() {
            continue;
        }
        let canon = t.canonical();
        let key: Vec<StateId> = canon
            .states()
            .flat_map(|q| canon.letters().map(move |a| (q, a)))
            .map(|(q, a)| canon.next(q, a))
            .collect();
        if seen.insert(key.clone()) {
            out.push(key);
        }
    }
    out
}

/// The filter stage a machine fails at, or `Survivor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Invalid,
    NotMinimal,
    NotInjectiveOrClopen,
    InjectivityUnknown,
    WrongOrder,
    NotInvertible,
    Survivor,
}

fn classify(t: &Transducer) -> Outcome {
    if t.validate().is_err() {
        return Outcome::Invalid;
    }
    // A state whose edges all write the same first letter has pending output.
    for q in t.states() {
        let first = t.output(q, 0).first();
        if first.is_some() && t.letters().all(|a| t.output(q, a).first() == first) {
            return Outcome::NotMinimal;
        }
    }
    match is_minimal(t) {
        Ok(true) => {}
        _ => return Outcome::NotMinimal,
    }
    for q in t.states() {
        if image_antichain(t, q).is_err() {
            return Outcome::NotInjectiveOrClopen;
        }
    }
    match machine_injective(t, cantor::default_residual_cap(t)) {
        Injectivity::Yes => {}
        Injectivity::No { .. } => return Outcome::NotInjectiveOrClopen,
        Injectivity::Unknown => return Outcome::InjectivityUnknown,
    }
    match cantor::circle_orientation(t) {
        Ok(Some(_)) => {}
        _ => return Outcome::WrongOrder,
    }
    match inverse(&GroupElement::from_normal(t.canonical())) {
        Ok(_) => Outcome::Survivor,
        Err(_) => Outcome::NotInvertible,
    }
}

/// Per-stage counts of an enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumReport {
    pub generated: u64,
    pub valid: u64,
    pub minimal: u64,
    pub injective_clopen: u64,
    pub injectivity_unknown: u64,
    pub order_compatible: u64,
    pub invertible: u64,
    /// Distinct survivors in canonical form, sorted.
    pub survivors: Vec<Transducer>,
}

impl EnumReport {
    /// Stage names with the number of machines passing each.
    pub fn stages(&self) -> Vec<(&'static str, u64)> {
        vec![
            ("generated (strongly connected, synchronizing)", self.generated),
            ("valid", self.valid),
            ("minimal", self.minimal),
            ("injective with clopen images", self.injective_clopen),
            ("circle order", self.order_compatible),
            ("invertible", self.invertible),
        ]
    }

    /// True iff the survivors are exactly the identity and `R`.
    pub fn only_identity_and_r(&self, n: usize) -> bool {
        let mut expected = vec![
            Transducer::identity(n).canonical(),
            crate::families::gen_r(n).canonical(),
        ];
        expected.sort_by_key(|t| crate::format::print_tdr(t, None));
        self.survivors == expected
    }
}

impl fmt::Display for EnumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stage\tcount")?;
        for (name, count) in self.stages() {
            writeln!(f, "{name}\t{count}")?;
        }
        writeln!(f, "injectivity unknown (excluded)\t{}", self.injectivity_unknown)?;
        write!(f, "distinct survivors\t{}", self.survivors.len())
    }
}

fn output_words(n: usize, max_len: usize) -> Vec<Word> {
    let alph = Alphabet::new(n).expect("valid alphabet");
    (0..=max_len).flat_map(|l| alph.words_of_len(l)).collect()
}

#[derive(Default)]
struct Tally {
    counts: [u64; 7],
    survivors: Vec<Transducer>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.survivors.extend(other.survivors);
        self
    }
}

fn machine_from(n: usize, table: &[StateId], words: &[Word], code: u64) -> Transducer {
    let s = table.len() / n;
    let w = words.len() as u64;
    let mut c = code;
    let mut outs = Vec::with_capacity(table.len());
    for _ in 0..table.len() {
        outs.push(words[(c % w) as usize].clone());
        c /= w;
    }
    Transducer::from_fn(n, s, |q, a| {
        let i = q * n + a as usize;
        (table[i], outs[i].clone())
    })
    .expect("well formed")
}

fn run(b: &EnumBounds) -> EnumReport {
    let words = output_words(b.n, b.max_edge_output_len);
    let mut jobs: Vec<(Vec<StateId>, u64)> = Vec::new();
    for s in 1..=b.max_states {
        let per = (words.len() as u64).pow((s * b.n) as u32);
        for table in enumerate_automata(b.n, s, b.max_sync_level) {
            // Split each automaton into chunks so the pool stays busy.
            let chunks = per.div_ceil(4096).max(1);
            for c in 0..chunks {
                jobs.push((table.clone(), c));
            }
        }
    }
    let tally = jobs
        .par_iter()
        .map(|(table, chunk)| {
            let per = (words.len() as u64).pow(table.len() as u32);
            let lo = chunk * 4096;
            let hi = (lo + 4096).min(per);
            let mut t = Tally::default();
            for code in lo..hi {
                let m = machine_from(b.n, table, &words, code);
                let outcome = classify(&m);
                let depth = match outcome {
                    Outcome::Invalid => 0,
                    Outcome::NotMinimal => 1,
                    Outcome::NotInjectiveOrClopen => 2,
                    Outcome::InjectivityUnknown => {
                        t.counts[6] += 1;
                        2
                    }
                    Outcome::WrongOrder => 3,
                    Outcome::NotInvertible => 4,
                    Outcome::Survivor => 5,
                };
                for c in t.counts.iter_mut().take(depth + 1) {
                    *c += 1;
                }
                if outcome == Outcome::Survivor {
                    t.survivors.push(m.canonical());
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    let mut survivors: Vec<(String, Transducer)> = tally
        .survivors
        .into_iter()
        .map(|t| (crate::format::print_tdr(&t, None), t))
        .collect();
    survivors.sort_by(|a, b| a.0.cmp(&b.0));
    survivors.dedup_by(|a, b| a.0 == b.0);
    let c = tally.counts;
    EnumReport {
        generated: c[0],
        valid: c[1],
        minimal: c[2],
        injective_clopen: c[3],
        order_compatible: c[4],
        invertible: c[5],
        injectivity_unknown: c[6],
        survivors: survivors.into_iter().map(|s| s.1).collect(),
    }
}

/// Valid, strongly synchronizing, core, minimal machines within the bounds,
/// deduplicated by canonical form.
pub fn enumerate_candidates(b: &EnumBounds) -> Vec<Transducer> {
    let words = output_words(b.n, b.max_edge_output_len);
    let mut out: Vec<(String, Transducer)> = Vec::new();
    for s in 1..=b.max_states {
        let per = (words.len() as u64).pow((s * b.n) as u32);
        for table in enumerate_automata(b.n, s, b.max_sync_level) {
            for code in 0..per {
                let m = machine_from(b.n, &table, &words, code);
                if m.validate().is_ok() && matches!(is_minimal(&m), Ok(true)) {
                    let c = m.canonical();
                    out.push((crate::format::print_tdr(&c, None), c));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    out.into_iter().map(|p| p.1).collect()
}

/// Runs the full filter chain, on `jobs` threads when given.
pub fn verify_to2(b: &EnumBounds, jobs: Option<usize>) -> Result<EnumReport> {
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?;
            Ok(pool.install(|| run(b)))
        }
        None => Ok(run(b)),
    }
}
