//! Synchronizing levels, forced states and cores.

use crate::error::{Error, Result};
use crate::transducer::{StateId, Transducer};
use crate::words::{Alphabet, Letter, Word};

/// Proof that every word of length `level` is a reset word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyncCertificate {
    pub level: usize,
}

impl SyncCertificate {
    /// The state forced by `w`; only the last `level` letters matter.
    pub fn forced(&self, t: &Transducer, w: &[Letter]) -> StateId {
        let tail = &w[w.len().saturating_sub(self.level)..];
        t.state_after(0, tail)
    }

    /// The full forced-state table, words in lexicographic order.
    pub fn forced_table(&self, t: &Transducer) -> Result<Vec<(Word, StateId)>> {
        let alph = Alphabet::new(t.alphabet_size())?;
        Ok(alph
            .words_of_len(self.level)
            .into_iter()
            .map(|w| {
                let q = self.forced(t, &w);
                (w, q)
            })
            .collect())
    }
}

pub fn default_max_level(t: &Transducer) -> usize {
    2 * t.num_states() * t.num_states()
}

/// Length of the longest path in the graph of unordered pairs of distinct
/// states, or `None` if that graph has a cycle.
fn longest_pair_path(t: &Transducer) -> Option<usize> {
    let k = t.num_states();
    let idx = |p: StateId, q: StateId| -> usize {
        let (a, b) = if p < q { (p, q) } else { (q, p) };
        a * k + b
    };
    const NEW: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let mut mark = vec![NEW; k * k];
    let mut depth = vec![0usize; k * k];
    let mut best = 0;
    for p in 0..k {
        for q in p + 1..k {
            let root = idx(p, q);
            if mark[root] != NEW {
                continue;
            }
            let mut stack: Vec<(StateId, StateId, usize)> = vec![(p, q, 0)];
            mark[root] = ACTIVE;
            while let Some(&mut (a, b, ref mut i)) = stack.last_mut() {
                let here = idx(a, b);
                if *i == t.alphabet_size() {
                    mark[here] = DONE;
                    best = best.max(depth[here]);
                    stack.pop();
                    if let Some(&(pa, pb, _)) = stack.last() {
                        let parent = idx(pa, pb);
                        depth[parent] = depth[parent].max(depth[here] + 1);
                    }
                    continue;
                }
                let letter = *i as Letter;
                *i += 1;
                let (c, d) = (t.next(a, letter), t.next(b, letter));
                if c == d {
                    continue;
                }
                let child = idx(c, d);
                match mark[child] {
                    ACTIVE => return None,
                    DONE => depth[here] = depth[here].max(depth[child] + 1),
                    _ => {
                        mark[child] = ACTIVE;
                        stack.push((c.min(d), c.max(d), 0));
                    }
                }
            }
        }
    }
    Some(best)
}

/// Least `k ≤ max_k` such that the state reached after any word of length
/// `k` does not depend on the start state.
pub fn sync_level(t: &Transducer, max_k: usize) -> Option<SyncCertificate> {
    let level = if t.num_states() == 1 {
        0
    } else {
        longest_pair_path(t)? + 1
    };
    (level <= max_k).then_some(SyncCertificate { level })
}

pub fn is_synchronizing(t: &Transducer) -> bool {
    longest_pair_path(t).is_some()
}

/// The states forced by long words, in increasing order. For a synchronizing
/// machine these form the unique closed strongly connected component.
pub fn core_states(t: &Transducer) -> Result<Vec<StateId>> {
    if !is_synchronizing(t) {
        return Err(Error::NotSynchronizing(default_max_level(t)));
    }
    let comps = t.sccs();
    let mut comp_of = vec![0usize; t.num_states()];
    for (i, c) in comps.iter().enumerate() {
        for &q in c {
            comp_of[q] = i;
        }
    }
    let sinks: Vec<&Vec<StateId>> = comps
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            c.iter()
                .all(|&q| t.letters().all(|a| comp_of[t.next(q, a)] == *i))
        })
        .map(|(_, c)| c)
        .collect();
    match sinks.as_slice() {
        [only] => Ok((*only).clone()),
        _ => Err(Error::Internal(
            "synchronizing machine with several sink components".into(),
        )),
    }
}

/// Restriction to the core.
pub fn core(t: &Transducer) -> Result<Transducer> {
    let keep = core_states(t)?;
    Ok(t.restrict_to(&keep)?.0)
}

pub fn is_core(t: &Transducer) -> bool {
    is_synchronizing(t) && t.is_strongly_connected()
}

/// For a core machine at its minimal level `k`: whenever two distinct
/// letters lead to a common state, they force the same states after any
/// continuation of length `k - 1`.
pub fn same_image_lemma_holds(t: &Transducer) -> Result<bool> {
    let cert = sync_level(t, default_max_level(t)).ok_or(Error::NotSynchronizing(0))?;
    if cert.level == 0 {
        return Ok(true);
    }
    let alph = Alphabet::new(t.alphabet_size())?;
    let tails = alph.words_of_len(cert.level - 1);
    for x in t.letters() {
        for y in t.letters().filter(|&y| y > x) {
            let meets = t
                .states()
                .any(|p1| t.states().any(|p2| t.next(p1, x) == t.next(p2, y)));
            if !meets {
                continue;
            }
            for g in &tails {
                let a = cert.forced(t, &Word::letter(x).concat(g));
                let b = cert.forced(t, &Word::letter(y).concat(g));
                if a != b {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn levels_of_families() {
        for (n, d, e) in [(4, 2, 2), (6, 3, 2), (6, 2, 3), (9, 3, 3)] {
            let t = families::tde(n, d, e).unwrap();
            assert_eq!(sync_level(&t, 10).unwrap().level, 1);
        }
        assert_eq!(sync_level(&families::gen_identity(3), 10).unwrap().level, 0);
        let b = families::gen_b(3, 1).unwrap();
        let cert = sync_level(&b, 10).unwrap();
        assert_eq!(cert.level, 3);
        let p = b.state_by_name("p").unwrap();
        let s = b.state_by_name("s").unwrap();
        for (w, q) in cert.forced_table(&b).unwrap() {
            match w.last() {
                Some(1) => assert_eq!(q, p),
                Some(2) => assert_eq!(q, s),
                _ => {}
            }
        }
        assert!(sync_level(&b, 2).is_none());
    }

    #[test]
    fn forced_states_agree_with_runs() {
        let b = families::gen_c(4, 1).unwrap();
        let cert = sync_level(&b, 20).unwrap();
        let alph = Alphabet::new(4).unwrap();
        for w in alph.words_of_len(cert.level) {
            let f = cert.forced(&b, &w);
            for q in b.states() {
                assert_eq!(b.state_after(q, &w), f);
            }
        }
    }

    #[test]
    fn cores() {
        let b = families::gen_b(3, 1).unwrap();
        assert_eq!(core(&b).unwrap(), b);
        // identity plus a state that only leads into it
        let t = Transducer::from_fn(2, 2, |_, a| (0, Word::letter(a))).unwrap();
        let c = core(&t).unwrap();
        assert!(c.is_identity());
        assert_eq!(core(&c).unwrap(), c);
        let swap = Transducer::from_fn(2, 2, |q, a| (1 - q, Word::letter(a))).unwrap();
        assert!(sync_level(&swap, 100).is_none());
        assert!(core(&swap).is_err());
    }

    #[test]
    fn lemma_on_families() {
        for t in [
            families::gen_b(3, 1).unwrap(),
            families::gen_c(3, 1).unwrap(),
            families::tde(6, 2, 3).unwrap(),
        ] {
            assert!(same_image_lemma_holds(&t).unwrap());
        }
    }
}
