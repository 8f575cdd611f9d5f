use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thn::cantor::lambda;
use thn::enumeration::{enumerate_automata, enumerate_candidates, verify_to2, EnumBounds};
use thn::families::{gen_b, gen_c, gen_identity, gen_r, tde};
use thn::group::{self, group_product, inverse, GroupElement};
use thn::invariants::{cone_signature, pi_action, s_invariant, GnElement};
use thn::marker::{f_oracle, gen_marker_code, marker_embed, marker_embed_with_code, MarkerMachine};
use thn::minimize::{
    compose_initial, equal_transducers, minimize, minimize_initial, minimize_with_map, omega_equivalent,
    remove_incomplete_response,
};
use thn::random::random_valid_transducer;
use thn::sync::{core, sync_level};
use thn::words::{prefix_comparable, Alphabet};
use thn::{InitialTransducer, Transducer, Word};

fn el(t: Transducer) -> GroupElement {
    GroupElement::new(t).unwrap()
}

fn words(n: usize, len: usize) -> Vec<Word> {
    Alphabet::new(n).unwrap().words_of_len(len)
}

/// States reachable in a fixed order, used to permute machines.
fn permuted(t: &Transducer, perm: &[usize]) -> Transducer {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    Transducer::from_fn(t.alphabet_size(), t.num_states(), |q, a| {
        let old = perm[q];
        (inv[t.next(old, a)], t.output(old, a).clone())
    })
    .unwrap()
}

fn clopen(t: &Transducer) -> bool {
    t.states().all(|q| lambda(t, q).is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn minimize_is_idempotent_and_preserves_evaluation(seed in any::<u64>(), states in 1usize..5) {
        let t = random_valid_transducer(seed, 2, states, 2);
        prop_assume!(clopen(&t));
        let (m, map) = minimize_with_map(&t).unwrap();
        prop_assert_eq!(minimize(&m).unwrap(), m.clone());
        for q in t.states() {
            let shift = lambda(&t, q).unwrap();
            for w in words(2, 8) {
                let direct = t.run(q, &w).1;
                let viamin = shift.concat(&m.run(map[q], &w).1);
                prop_assert!(prefix_comparable(&direct, &viamin));
                prop_assert!(direct.len() <= viamin.len());
            }
        }
    }

    #[test]
    fn stripping_leaves_no_pending_output(seed in any::<u64>(), states in 1usize..5, n in 2usize..4) {
        let t = random_valid_transducer(seed, n, states, 2);
        prop_assume!(clopen(&t));
        let s = remove_incomplete_response(&t).unwrap();
        for q in s.states() {
            prop_assert!(lambda(&s, q).unwrap().is_empty());
        }
    }

    #[test]
    fn omega_equivalence_is_an_equivalence(seed in any::<u64>(), states in 1usize..4) {
        let t = random_valid_transducer(seed, 2, states, 2);
        prop_assume!(clopen(&t));
        // t next to a permuted copy of itself
        let perm: Vec<usize> = (0..states).rev().collect();
        let u = t.disjoint_union(&permuted(&t, &perm)).unwrap();
        let k = u.num_states();
        let eq: Vec<Vec<bool>> = (0..k)
            .map(|p| (0..k).map(|q| omega_equivalent(&u, p, &u, q).unwrap()).collect())
            .collect();
        for p in 0..k {
            prop_assert!(eq[p][p]);
            for q in 0..k {
                prop_assert_eq!(eq[p][q], eq[q][p]);
                for r in 0..k {
                    if eq[p][q] && eq[q][r] {
                        prop_assert!(eq[p][r]);
                    }
                }
            }
        }
        for (i, &p) in perm.iter().enumerate() {
            prop_assert!(eq[p][states + i]);
        }
    }

    #[test]
    fn equality_matches_brute_force(seed in any::<u64>(), states in 1usize..4, other in any::<u64>()) {
        let t = random_valid_transducer(seed, 2, states, 2);
        let u = random_valid_transducer(other, 2, states, 2);
        prop_assume!(clopen(&t) && clopen(&u));
        let perm: Vec<usize> = (0..states).rev().collect();
        let (mt, mu) = (minimize(&t).unwrap(), minimize(&u).unwrap());
        let mp = minimize(&permuted(&t, &perm)).unwrap();
        prop_assert!(equal_transducers(&mt, &mp).unwrap());
        let brute = mt.num_states() == mu.num_states() && {
            let k = mt.num_states();
            permutations(k).into_iter().any(|p| {
                (0..k).all(|q| {
                    (0..=5).flat_map(|l| words(2, l)).all(|w| mt.run(q, &w).1 == mu.run(p[q], &w).1)
                })
            })
        };
        prop_assert_eq!(equal_transducers(&mt, &mu).unwrap(), brute);
    }

    #[test]
    fn compose_initial_is_associative(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let pool = initial_pool();
        let it = [&pool[i % pool.len()], &pool[j % pool.len()], &pool[k % pool.len()]];
        let left = compose_initial(&compose_initial(it[0], it[1]).unwrap(), it[2]).unwrap();
        let right = compose_initial(it[0], &compose_initial(it[1], it[2]).unwrap()).unwrap();
        prop_assert_eq!(left.canonical(), right.canonical());
        for w in words(3, 6) {
            let direct = it[2].run(&it[1].run(&it[0].run(&w).1).1).1;
            prop_assert!(prefix_comparable(&direct, &left.run(&w).1));
        }
    }
}

/// Injective machines over three letters, started from each of their states.
fn initial_pool() -> Vec<InitialTransducer> {
    let b = gen_b(3, 1).unwrap();
    let c = gen_c(3, 1).unwrap();
    let mut machines = vec![gen_r(3), b.clone(), c.clone()];
    machines.push(inverse(&el(b)).unwrap().rep().clone());
    machines.push(inverse(&el(c)).unwrap().rep().clone());
    machines
        .into_iter()
        .flat_map(|t| {
            t.states()
                .map(move |q| InitialTransducer::new(t.clone(), q).unwrap())
                .collect::<Vec<_>>()
        })
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn compose_with_identity_is_minimization() {
    for t in [tde(4, 2, 2).unwrap(), gen_b(3, 1).unwrap()] {
        let n = t.alphabet_size();
        let it = InitialTransducer::new(t, 0).unwrap();
        let id = InitialTransducer::new(gen_identity(n), 0).unwrap();
        assert_eq!(
            compose_initial(&it, &id).unwrap().canonical(),
            minimize_initial(&it).unwrap().canonical()
        );
    }
}

fn family_members() -> Vec<Transducer> {
    vec![
        gen_identity(3),
        gen_r(3),
        gen_b(3, 1).unwrap(),
        gen_c(3, 1).unwrap(),
        tde(4, 2, 2).unwrap(),
        gen_r(4),
        gen_b(4, 1).unwrap(),
        gen_c(4, 2).unwrap(),
    ]
}

#[test]
fn products_of_synchronizing_machines_synchronize() {
    let fam = family_members();
    for t in &fam {
        let k = sync_level(t, 64).unwrap().level;
        let c = core(t).unwrap();
        assert_eq!(sync_level(&c, 64).unwrap().level, k);
        assert_eq!(core(&c).unwrap(), c);
        for u in &fam {
            if t.alphabet_size() == u.alphabet_size() {
                assert!(sync_level(&t.product(u).unwrap(), 256).is_some());
            }
        }
    }
}

#[test]
fn group_laws() {
    let sets = [
        vec![GroupElement::identity(4), el(gen_r(4)), el(tde(4, 2, 2).unwrap())],
        vec![
            GroupElement::identity(6),
            el(gen_r(6)),
            el(tde(6, 2, 3).unwrap()),
            el(tde(6, 3, 2).unwrap()),
        ],
    ];
    for set in &sets {
        for a in set {
            let id = GroupElement::identity(a.alphabet_size());
            assert_eq!(group_product(a, &id).unwrap(), *a);
            assert_eq!(group_product(&id, a).unwrap(), *a);
            let inv = inverse(a).unwrap();
            assert_eq!(inverse(&inv).unwrap(), *a);
            for b in set {
                for c in set {
                    let l = group_product(&group_product(a, b).unwrap(), c).unwrap();
                    let r = group_product(a, &group_product(b, c).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
            }
        }
    }
    let t23 = el(tde(6, 2, 3).unwrap());
    assert_eq!(inverse(&t23).unwrap(), el(tde(6, 3, 2).unwrap()));
    for (n, x) in [(3, 1), (4, 1), (4, 2)] {
        for t in [gen_b(n, x).unwrap(), gen_c(n, x).unwrap()] {
            let g = el(t);
            assert_eq!(inverse(&inverse(&g).unwrap()).unwrap(), g);
        }
    }
}

#[test]
fn loop_states_fix_the_end_letters() {
    for (n, x) in [(3, 1), (4, 1), (4, 2), (5, 3)] {
        for t in [gen_b(n, x).unwrap(), gen_c(n, x).unwrap()] {
            let top = (n - 1) as u8;
            for q in t.states() {
                if t.next(q, 0) == q {
                    assert_eq!(t.output(q, 0), &Word::letter(0));
                }
                if t.next(q, top) == q {
                    assert_eq!(t.output(q, top), &Word::letter(top));
                }
            }
        }
    }
}

/// Products of up to four generators drawn from a seeded stream.
fn closure_sample(gens: &[GroupElement], count: usize, seed: u64) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=4);
            let mut p = gens[rng.gen_range(0..gens.len())].clone();
            for _ in 1..len {
                p = group_product(&p, &gens[rng.gen_range(0..gens.len())]).unwrap();
            }
            p
        })
        .collect()
}

#[test]
fn invariants_are_homomorphisms_on_the_family_closure() {
    for n in [4, 6] {
        let mut gens = vec![el(gen_r(n))];
        for d in 2..n {
            if n % d == 0 {
                gens.push(el(tde(n, d, n / d).unwrap()));
            }
        }
        let sample = closure_sample(&gens, 12, n as u64);
        for a in &sample {
            let (_, ma) = cone_signature(a.rep()).unwrap();
            assert_eq!(gcd(ma, n - 1), 1, "m must be a unit");
            for b in &sample {
                let ab = group_product(a, b).unwrap();
                let (_, mb) = cone_signature(b.rep()).unwrap();
                let (_, mab) = cone_signature(ab.rep()).unwrap();
                assert_eq!(mab, ma * mb % (n - 1));
                let s: GnElement = s_invariant(a)
                    .unwrap()
                    .multiply(&s_invariant(b).unwrap())
                    .unwrap();
                assert_eq!(s_invariant(&ab).unwrap(), s);
            }
        }
    }
}

#[test]
fn cone_signature_is_state_independent_on_random_products() {
    let gens3: Vec<GroupElement> = [gen_r(3), gen_b(3, 1).unwrap(), gen_c(3, 1).unwrap()]
        .into_iter()
        .map(el)
        .collect();
    let gens4: Vec<GroupElement> = [gen_r(4), tde(4, 2, 2).unwrap(), gen_b(4, 1).unwrap()]
        .into_iter()
        .map(el)
        .collect();
    let mut count = 0;
    for (gens, seed) in [(gens3, 3u64), (gens4, 4u64)] {
        for g in closure_sample(&gens, 100, seed) {
            cone_signature(g.rep()).unwrap();
            count += 1;
        }
    }
    assert_eq!(count, 200);
}

#[test]
fn tde_family_membership() {
    for n in [4, 6, 8, 9] {
        for d in 1..=n {
            if n % d != 0 {
                continue;
            }
            let e = n / d;
            let t = tde(n, d, e).unwrap();
            if d == 1 {
                assert!(t.is_identity());
                continue;
            }
            if e == 1 {
                // Pure delay: its normal form is the identity.
                assert!(el(t).is_identity());
                continue;
            }
            assert!(group::in_tln(&t).is_true(), "T({d},{e})");
            assert_eq!(
                s_invariant(&el(t)).unwrap(),
                GnElement::class_of(n, e as u128).unwrap()
            );
        }
    }
}

#[test]
fn b_and_c_lie_in_the_x_subgroup() {
    for n in 3..=5 {
        for x in 1..=n - 2 {
            assert!(
                group::in_onx(&gen_b(n, x).unwrap(), x as u8).is_true(),
                "B n={n} x={x}"
            );
            assert!(
                group::in_onx(&gen_c(n, x).unwrap(), x as u8).is_true(),
                "C n={n} x={x}"
            );
        }
    }
}

#[test]
fn restriction_commutes_with_products() {
    let b = gen_b(3, 1).unwrap();
    let c = gen_c(3, 1).unwrap();
    let p = b.state_by_name("p").unwrap();
    let pc = c.state_by_name("p").unwrap();
    let prod = b.product(&c).unwrap();
    let whole = group::restrict(&prod, p * c.num_states() + pc, &[0, 2]).unwrap();
    let parts = compose_initial(
        &group::restrict(&b, p, &[0, 2]).unwrap(),
        &group::restrict(&c, pc, &[0, 2]).unwrap(),
    )
    .unwrap();
    assert_eq!(minimize_initial(&whole).unwrap().canonical(), parts.canonical());
    for w in words(2, 8) {
        assert!(prefix_comparable(&whole.run(&w).1, &parts.run(&w).1));
    }
}

#[test]
fn embedded_machine_matches_the_block_oracle() {
    let code = gen_marker_code(3, 2, 3).unwrap();
    let l = code.word_len();
    let mut rng = ChaCha8Rng::seed_from_u64(0xb10c);
    for t in [gen_b(3, 1).unwrap(), gen_c(3, 1).unwrap()] {
        let ft = marker_embed_with_code(&el(t.clone()), 1, &code).unwrap();
        let parser = MarkerMachine::build(&t, &code, 1).unwrap();
        assert_eq!(
            f_oracle(&t, &code, 1, &[0, 1, 1, 0]).unwrap(),
            parser.oracle(&[0, 1, 1, 0])
        );
        let f = ft.rep();
        let cert = sync_level(f, 256).unwrap();
        let k = cert.level;
        let len = k + 2 * l;
        let inputs: Vec<Word> = if len <= 14 {
            words(2, len)
        } else {
            (0..10_000)
                .map(|_| Word::from_letters((0..len).map(|_| rng.gen_range(0..2u8))))
                .collect()
        };
        for w in inputs {
            let (head, tail) = w.as_slice().split_at(k);
            let whole = parser.oracle(w.as_slice());
            let base = parser.oracle(head);
            let rest = whole.minus_prefix(&base).expect("oracle is monotone");
            let q = cert.forced(f, head);
            assert!(prefix_comparable(&rest, &f.run(q, tail).1), "input {w:?}");
        }
    }
}

#[test]
fn marker_embedding_is_an_injective_homomorphism() {
    let b = el(gen_b(3, 1).unwrap());
    let c = el(gen_c(3, 1).unwrap());
    let gens = [b.clone(), c.clone(), inverse(&b).unwrap(), inverse(&c).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a4b);
    let mut word = |len: usize| {
        let mut p = gens[rng.gen_range(0..4)].clone();
        for _ in 1..len {
            p = group_product(&p, &gens[rng.gen_range(0..4)]).unwrap();
        }
        p
    };
    let mut seen: Vec<(GroupElement, GroupElement)> = Vec::new();
    for i in 0..5 {
        let t = word(1 + i % 3);
        let u = word(1 + (i + 1) % 3);
        let ft = marker_embed(&t, 1, 2).unwrap();
        let fu = marker_embed(&u, 1, 2).unwrap();
        let ftu = marker_embed(&group_product(&t, &u).unwrap(), 1, 2).unwrap();
        assert_eq!(group_product(&ft, &fu).unwrap(), ftu);
        seen.push((t, ft));
        seen.push((u, fu));
    }
    for (t, ft) in &seen {
        for (u, fu) in &seen {
            if t != u {
                assert_ne!(ft, fu);
            }
        }
        assert_eq!(group::in_ln(t.rep()).is_true(), group::in_ln(ft.rep()).is_true());
    }
    let fid = marker_embed(&GroupElement::identity(3), 1, 2).unwrap();
    assert!(group::in_ln(fid.rep()).is_true());
}

#[test]
fn automaton_classes_on_two_letters() {
    let counts: Vec<usize> = (1..=3).map(|s| enumerate_automata(2, s, 4).len()).collect();
    assert_eq!(counts, vec![1, 1, 2]);
}

#[test]
fn one_state_census() {
    // both outputs nonempty with different first letters: 2 * 3 * 3
    let b = EnumBounds::new(2, 1, 2, 1).unwrap();
    let c = enumerate_candidates(&b);
    assert_eq!(c.len(), 18);
    for t in &c {
        let (u, v) = (t.output(0, 0), t.output(0, 1));
        assert!(!u.is_empty() && !v.is_empty() && u.first() != v.first());
    }
}

#[test]
fn enumeration_is_deterministic_across_thread_counts() {
    let b = EnumBounds::new(2, 2, 2, 3).unwrap();
    let one = verify_to2(&b, Some(1)).unwrap();
    let four = verify_to2(&b, Some(4)).unwrap();
    assert_eq!(one, four);
}

#[test]
fn survivors_act_injectively_on_rotation_classes() {
    let b = EnumBounds::new(2, 2, 2, 3).unwrap();
    for t in verify_to2(&b, None).unwrap().survivors {
        let g = el(t);
        let action = pi_action(&g, 3).unwrap();
        let images: BTreeSet<_> = action.values().collect();
        assert_eq!(images.len(), action.len());
    }
}
