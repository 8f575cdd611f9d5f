//! Incomplete-response removal, ω-equivalence and minimization.

use std::collections::HashMap;

use crate::cantor::lambda;
use crate::error::{Error, Result};
use crate::transducer::{InitialTransducer, StateId, Transducer};
use crate::words::Word;

/// `Λ(q)` for every state.
pub fn pending_prefixes(t: &Transducer) -> Result<Vec<Word>> {
    t.states().map(|q| lambda(t, q)).collect()
}

fn stripped_edge(t: &Transducer, lam: &[Word], q: StateId, a: u8) -> Word {
    let s = t.next(q, a);
    t.output(q, a)
        .concat(&lam[s])
        .minus_prefix(&lam[q])
        .expect("Λ(q) prefixes every edge extension")
}

/// Pushes pending output forward so that `Λ(q) = ε` at every state. The
/// map of each state changes by the removal of its prefix `Λ(q)`.
pub fn remove_incomplete_response(t: &Transducer) -> Result<Transducer> {
    let lam = pending_prefixes(t)?;
    if lam.iter().all(|w| w.is_empty()) {
        return Ok(t.clone());
    }
    Transducer::from_fn(t.alphabet_size(), t.num_states(), |q, a| {
        (t.next(q, a), stripped_edge(t, &lam, q, a))
    })?
    .with_names(t.names().to_vec())
}

/// Initial variant: the initial state keeps its map exactly, so a fresh copy
/// of it writes its prefix on the first step.
pub fn remove_incomplete_response_initial(it: &InitialTransducer) -> Result<InitialTransducer> {
    let t = &it.base;
    let lam = pending_prefixes(t)?;
    if lam.iter().all(|w| w.is_empty()) {
        return Ok(it.trimmed());
    }
    let k = t.num_states();
    let q0 = it.initial;
    let base = Transducer::from_fn(t.alphabet_size(), k + 1, |q, a| {
        if q < k {
            (t.next(q, a), stripped_edge(t, &lam, q, a))
        } else {
            let s = t.next(q0, a);
            (s, t.output(q0, a).concat(&lam[s]))
        }
    })?;
    Ok(InitialTransducer { base, initial: k }.trimmed())
}

/// Coarsest partition of states with equal outputs per letter and
/// equivalent successors. Class ids follow first appearance.
pub fn moore_partition(t: &Transducer) -> Vec<usize> {
    let mut out_ids: HashMap<&Word, usize> = HashMap::new();
    let mut class = vec![0usize; t.num_states()];
    let mut out_sig: Vec<Vec<usize>> = Vec::with_capacity(t.num_states());
    for q in t.states() {
        let sig = t
            .letters()
            .map(|a| {
                let len = out_ids.len();
                *out_ids.entry(t.output(q, a)).or_insert(len)
            })
            .collect();
        out_sig.push(sig);
    }
    let mut count = usize::MAX;
    loop {
        let mut ids: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0usize; t.num_states()];
        for q in t.states() {
            let succ: Vec<usize> = t.letters().map(|a| class[t.next(q, a)]).collect();
            let key = (out_sig[q].clone(), succ);
            let len = ids.len();
            next[q] = *ids.entry(key).or_insert(len);
        }
        let new_count = ids.len();
        class = next;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

fn quotient(t: &Transducer, class: &[usize]) -> Result<Transducer> {
    let k = class.iter().max().map_or(0, |m| m + 1);
    let mut rep = vec![usize::MAX; k];
    for q in t.states() {
        if rep[class[q]] == usize::MAX {
            rep[class[q]] = q;
        }
    }
    Transducer::from_fn(t.alphabet_size(), k, |c, a| {
        let q = rep[c];
        (class[t.next(q, a)], t.output(q, a).clone())
    })
}

/// Minimal representative of a non-initial machine, canonically numbered.
pub fn minimize(t: &Transducer) -> Result<Transducer> {
    Ok(minimize_with_map(t)?.0)
}

/// As [`minimize`], also returning the state each original state maps to.
pub fn minimize_with_map(t: &Transducer) -> Result<(Transducer, Vec<StateId>)> {
    let stripped = remove_incomplete_response(t)?;
    let class = moore_partition(&stripped);
    let q = quotient(&stripped, &class)?;
    let (canon, map) = q.canonical_with_map();
    Ok((canon, class.iter().map(|&c| map[c]).collect()))
}

/// Minimal initial transducer: no incomplete response away from the initial
/// state, no equivalent states, everything reachable, BFS numbering.
pub fn minimize_initial(it: &InitialTransducer) -> Result<InitialTransducer> {
    let stripped = remove_incomplete_response_initial(it)?;
    let class = moore_partition(&stripped.base);
    let q = quotient(&stripped.base, &class)?;
    Ok(InitialTransducer {
        base: q.renumber_from(class[stripped.initial]),
        initial: 0,
    })
}

/// Whether state `p` of `t` and state `q` of `u` induce the same map.
pub fn omega_equivalent(t: &Transducer, p: StateId, u: &Transducer, q: StateId) -> Result<bool> {
    let joint = t.disjoint_union(u)?;
    let lam = pending_prefixes(&joint)?;
    let qq = q + t.num_states();
    if lam[p] != lam[qq] {
        return Ok(false);
    }
    let class = moore_partition(&remove_incomplete_response(&joint)?);
    Ok(class[p] == class[qq])
}

/// No incomplete response and no two equivalent states.
pub fn is_minimal(t: &Transducer) -> Result<bool> {
    if pending_prefixes(t)?.iter().any(|w| !w.is_empty()) {
        return Ok(false);
    }
    let class = moore_partition(t);
    let k = class.iter().max().map_or(0, |m| m + 1);
    Ok(k == t.num_states())
}

/// ω-equality of minimal machines: a state bijection matching behaviour.
pub fn equal_transducers(t: &Transducer, u: &Transducer) -> Result<bool> {
    for (name, m) in [("first", t), ("second", u)] {
        if !is_minimal(m)? {
            return Err(Error::NotMinimal(format!("{name} argument")));
        }
    }
    if t.alphabet_size() != u.alphabet_size() || t.num_states() != u.num_states() {
        return Ok(false);
    }
    if t.is_strongly_connected() && u.is_strongly_connected() {
        return Ok(t.canonical() == u.canonical());
    }
    // General case: every state of t must match a state of u and conversely;
    // minimality makes the matching a bijection.
    let joint = t.disjoint_union(u)?;
    let class = moore_partition(&joint);
    let k = t.num_states();
    let mut left: Vec<usize> = class[..k].to_vec();
    let mut right: Vec<usize> = class[k..].to_vec();
    left.sort_unstable();
    right.sort_unstable();
    Ok(left == right)
}

/// Minimal form of the product of two initial transducers.
pub fn compose_initial(a: &InitialTransducer, b: &InitialTransducer) -> Result<InitialTransducer> {
    let p = a.base.product_from(a.initial, &b.base, b.initial)?;
    minimize_initial(&p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::words::Letter;

    fn w(s: &str) -> Word {
        Word::parse(s, 10).unwrap()
    }

    #[test]
    fn duplicated_identity_collapses() {
        let t = Transducer::from_fn(2, 3, |q, a| ((q + 1) % 3, Word::letter(a))).unwrap();
        let m = minimize(&t).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn tde_is_minimal() {
        let t = families::tde(4, 2, 2).unwrap();
        assert!(is_minimal(&t).unwrap());
        assert_eq!(minimize(&t).unwrap(), t.canonical());
    }

    #[test]
    fn r_squared_is_identity() {
        let r = families::gen_r(2);
        let m = minimize(&r.product(&r).unwrap()).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn pending_output_is_pulled_back() {
        // q writes nothing on 0 and moves to s, whose outputs all start with 0.
        let t = Transducer::from_rows(
            2,
            vec![vec![(1, w("")), (0, w("1"))], vec![(0, w("00")), (0, w("01"))]],
        )
        .unwrap();
        assert_eq!(lambda(&t, 1).unwrap(), w("0"));
        let s = remove_incomplete_response(&t).unwrap();
        assert_eq!(s.output(0, 0), &w("0"));
        assert_eq!(s.output(1, 0), &w("0"));
        assert_eq!(s.output(1, 1), &w("1"));
        assert!(pending_prefixes(&s).unwrap().iter().all(|p| p.is_empty()));
        let alph = crate::words::Alphabet::new(2).unwrap();
        for u in alph.words_of_len(5) {
            for q in t.states() {
                let (r1, o1) = t.run(q, &u);
                let (r2, o2) = s.run(q, &u);
                let lhs = o1.concat(&lambda(&t, r1).unwrap());
                let rhs = lambda(&t, q)
                    .unwrap()
                    .concat(&o2)
                    .concat(&lambda(&s, r2).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn figure_machine_has_no_pending_output() {
        let b = families::gen_b(3, 1).unwrap();
        assert_eq!(remove_incomplete_response(&b).unwrap(), b);
        assert!(is_minimal(&b).unwrap());
    }

    #[test]
    fn omega_equivalence_examples() {
        let t = families::tde(4, 2, 2).unwrap();
        assert!(omega_equivalent(&t, 0, &t, 0).unwrap());
        assert!(!omega_equivalent(&t, 0, &t, 1).unwrap());
        let id = families::gen_identity(2);
        let r = families::gen_r(2);
        assert!(!omega_equivalent(&id, 0, &r, 0).unwrap());
        // Verbatim copy of a state.
        let copy = Transducer::from_fn(4, 3, |q, a| {
            let src = if q == 2 { 1 } else { q };
            (t.next(src, a), t.output(src, a).clone())
        })
        .unwrap();
        assert!(omega_equivalent(&copy, 1, &copy, 2).unwrap());
        assert!(omega_equivalent(&copy, 2, &t, 1).unwrap());
    }

    #[test]
    fn equal_transducers_examples() {
        let t = families::tde(4, 2, 2).unwrap();
        assert!(equal_transducers(&t, &t).unwrap());
        let renamed = Transducer::from_fn(4, 2, |q, a| {
            let src = 1 - q;
            (1 - t.next(src, a), t.output(src, a).clone())
        })
        .unwrap();
        assert!(equal_transducers(&t, &renamed).unwrap());
        assert!(!equal_transducers(&families::gen_identity(2), &families::gen_r(2)).unwrap());
        let dup = Transducer::from_fn(2, 2, |q, a| (q, Word::letter(a))).unwrap();
        assert!(matches!(equal_transducers(&dup, &dup), Err(Error::NotMinimal(_))));
    }

    #[test]
    fn compose_initial_with_identity() {
        let b = families::gen_b(3, 1).unwrap();
        let it = InitialTransducer::new(b, 1).unwrap();
        let id = InitialTransducer::new(families::gen_identity(3), 0).unwrap();
        assert_eq!(compose_initial(&it, &id).unwrap(), minimize_initial(&it).unwrap());
    }

    #[test]
    fn minimize_initial_keeps_the_prefix() {
        // Every output of state 0 starts with 1.
        let t = Transducer::from_rows(
            2,
            vec![vec![(1, w("10")), (1, w("11"))], vec![(1, w("0")), (1, w("1"))]],
        )
        .unwrap();
        let it = InitialTransducer::new(t.clone(), 0).unwrap();
        let m = minimize_initial(&it).unwrap();
        let alph = crate::words::Alphabet::new(2).unwrap();
        for u in alph.words_of_len(6) {
            let a = t.run(0, &u).1;
            let b = m.run(&u).1;
            let (long, short) = if a.len() >= b.len() { (&a, &b) } else { (&b, &a) };
            assert!(short.is_prefix_of(long));
        }
        let letters: Vec<Letter> = vec![0, 0, 0];
        assert_eq!(m.run(&letters).1.as_slice()[0], 1);
    }
}
