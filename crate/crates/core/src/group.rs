//! The group of minimal, core, strongly synchronizing transducers: products,
//! inverses, membership predicates, conjugation by `R`, and restriction to a
//! sub-alphabet.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::cantor::{self, image_antichain, l_map_unchecked, machine_injective, Injectivity};
use crate::error::{Error, Result};
use crate::invariants;
use crate::minimize::{compose_initial, is_minimal, minimize, minimize_initial};
use crate::sync::{core, default_max_level, is_core, sync_level};
use crate::transducer::{InitialTransducer, StateId, Transducer};
use crate::words::{Letter, Word};

/// An element of the group: a minimal, core, strongly synchronizing
/// transducer in canonical numbering, whose states are injective with
/// clopen image.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    rep: Transducer,
    level: usize,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement(level {}) {:?}", self.level, self.rep)
    }
}

/// Brings a machine to minimal core canonical form.
pub fn normalize(t: &Transducer) -> Result<Transducer> {
    if let Err(v) = t.validate() {
        return Err(Error::Invalid(v.to_string()));
    }
    let c = core(t)?;
    let m = minimize(&c)?;
    core(&m).map(|c| c.canonical())
}

impl GroupElement {
    /// Normalizes `t` and checks injectivity and clopen images.
    pub fn new(t: Transducer) -> Result<Self> {
        let rep = normalize(&t)?;
        for q in rep.states() {
            image_antichain(&rep, q)?;
        }
        match machine_injective(&rep, cantor::default_residual_cap(&rep)) {
            Injectivity::Yes => {}
            Injectivity::No { x, y } => {
                return Err(Error::Invalid(format!(
                    "not injective: {} and {} have the same image",
                    x.to_text(rep.alphabet_size()),
                    y.to_text(rep.alphabet_size())
                )))
            }
            Injectivity::Unknown => return Err(Error::BoundExceeded("injectivity undecided".into())),
        }
        Ok(Self::from_normal(rep))
    }

    /// Wraps a machine already in normal form.
    pub(crate) fn from_normal(rep: Transducer) -> Self {
        let level = sync_level(&rep, usize::MAX)
            .expect("normal form is synchronizing")
            .level;
        invariants::audit(&rep);
        GroupElement { rep, level }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_normal(Transducer::identity(n))
    }

    pub fn rep(&self) -> &Transducer {
        &self.rep
    }

    pub fn into_rep(self) -> Transducer {
        self.rep
    }

    pub fn sync_level(&self) -> usize {
        self.level
    }

    pub fn alphabet_size(&self) -> usize {
        self.rep.alphabet_size()
    }

    pub fn num_states(&self) -> usize {
        self.rep.num_states()
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_identity()
    }
}

/// `T U`: apply `T` first, then `U`.
pub fn group_product(t: &GroupElement, u: &GroupElement) -> Result<GroupElement> {
    let p = t.rep.product_from(0, &u.rep, 0)?.base;
    let rep = normalize(&p)?;
    Ok(GroupElement::from_normal(rep))
}

/// The product computed the long way: the minimal initial transducer at
/// one state of the core of `T * U`, then its core.
pub fn group_product_via_state(t: &GroupElement, u: &GroupElement, state: StateId) -> Result<Transducer> {
    let p = core(&t.rep.product(&u.rep)?)?;
    let it = InitialTransducer::new(p, state)?;
    let m = minimize_initial(&it)?;
    Ok(core(&m.base)?.canonical())
}

pub fn is_identity(t: &GroupElement) -> bool {
    t.is_identity()
}

/// Default bound on the word component of inverse states.
pub fn default_word_cap(t: &Transducer) -> usize {
    let level = sync_level(t, usize::MAX).map_or(0, |c| c.level);
    if let Some(v) = crate::max_depth_override() {
        return v;
    }
    2 * (level + t.num_states() * t.max_output_len().max(1)) + 2
}

/// `(L_q(w), (w - λ(L_q(w), q), π(L_q(w), q)))`.
fn inverse_step(t: &Transducer, w: &Word, q: StateId) -> Result<(Word, (Word, StateId))> {
    let v = l_map_unchecked(t, q, w)?;
    let (s, out) = t.run(q, &v);
    let rest = w
        .minus_prefix(&out)
        .ok_or_else(|| Error::Internal(format!("output {out} of the preimage prefix overshoots {w}")))?;
    Ok((v, (rest, s)))
}

fn explore_inverse(t: &Transducer, start: (Word, StateId), word_cap: usize) -> Result<Transducer> {
    let mut index: HashMap<(Word, StateId), usize> = HashMap::new();
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut rows: Vec<Vec<(StateId, Word)>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (w, q) = states[i].clone();
        let mut row = Vec::with_capacity(t.alphabet_size());
        for a in t.letters() {
            let (v, key) = inverse_step(t, &w.with(a), q)?;
            if key.0.len() > word_cap {
                return Err(Error::NoInverse(format!(
                    "inverse state word longer than {word_cap}"
                )));
            }
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    states.push(key.clone());
                    index.insert(key, states.len() - 1);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                }
            };
            row.push((j, v));
        }
        if rows.len() <= i {
            rows.resize(i + 1, Vec::new());
        }
        rows[i] = row;
    }
    let names = states
        .iter()
        .map(|(w, q)| {
            let w = if w.is_empty() {
                "e".to_string()
            } else {
                w.to_text(t.alphabet_size()).replace(',', "_")
            };
            format!("{w}_{}", t.name(*q))
        })
        .collect();
    Transducer::from_rows(t.alphabet_size(), rows)?.with_names(names)
}

/// The inverse element, verified by multiplying back.
pub fn inverse(t: &GroupElement) -> Result<GroupElement> {
    inverse_with_cap(t, default_word_cap(&t.rep))
}

pub fn inverse_with_cap(t: &GroupElement, word_cap: usize) -> Result<GroupElement> {
    if t.is_identity() || t.rep.num_states() == 1 && is_letter_permutation(&t.rep) {
        return Ok(GroupElement::from_normal(invert_permutation(&t.rep)));
    }
    let rep = &t.rep;
    let cover = image_antichain(rep, 0)?;
    let w0 = cover.words()[0].clone();
    let (_, start) = inverse_step(rep, &w0, 0)?;
    let raw = explore_inverse(rep, start, word_cap)?;
    if let Err(v) = raw.validate() {
        return Err(Error::NoInverse(v.to_string()));
    }
    if sync_level(&raw, usize::MAX).is_none() {
        return Err(Error::NoInverse("inverse is not synchronizing".into()));
    }
    let inv = GroupElement::from_normal(normalize(&raw)?);
    let left = group_product(t, &inv)?;
    let right = group_product(&inv, t)?;
    if !left.is_identity() || !right.is_identity() {
        return Err(Error::Internal("inverse failed the round trip".into()));
    }
    Ok(inv)
}

fn is_letter_permutation(t: &Transducer) -> bool {
    let mut seen = vec![false; t.alphabet_size()];
    t.letters().all(|a| {
        let o = t.output(0, a);
        o.len() == 1 && !std::mem::replace(&mut seen[o[0] as usize], true)
    })
}

fn invert_permutation(t: &Transducer) -> Transducer {
    let mut inv = vec![0 as Letter; t.alphabet_size()];
    for a in t.letters() {
        inv[t.output(0, a)[0] as usize] = a;
    }
    Transducer::from_fn(t.alphabet_size(), 1, |_, a| (0, Word::letter(inv[a as usize])))
        .expect("same alphabet")
}

/// Inverse of an initial transducer whose initial state is a homeomorphism
/// state.
pub fn initial_inverse(it: &InitialTransducer) -> Result<InitialTransducer> {
    let t = &it.base;
    let cover = image_antichain(t, it.initial)?;
    if !cover.is_complete() {
        return Err(Error::Precondition("initial state is not onto".into()));
    }
    let cap = default_word_cap(t);
    let raw = explore_inverse(t, (Word::empty(), it.initial), cap)?;
    let inv = minimize_initial(&InitialTransducer::new(raw, 0)?)?;
    let check = compose_initial(it, &inv)?;
    if !(check.base.num_states() == 1 && check.base.is_identity()) {
        return Err(Error::Internal("initial inverse failed the round trip".into()));
    }
    Ok(inv)
}

/// A three-valued membership answer with the reasons for a negative one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub value: Truth,
    pub reasons: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Membership {
    fn yes() -> Self {
        Membership {
            value: Truth::True,
            reasons: Vec::new(),
        }
    }

    fn no(reason: impl Into<String>) -> Self {
        Membership {
            value: Truth::False,
            reasons: vec![reason.into()],
        }
    }

    fn unknown(reason: impl Into<String>) -> Self {
        Membership {
            value: Truth::Unknown,
            reasons: vec![reason.into()],
        }
    }

    pub fn is_true(&self) -> bool {
        self.value == Truth::True
    }

    fn and(self, other: impl FnOnce() -> Membership) -> Membership {
        if self.value == Truth::True {
            other()
        } else {
            self
        }
    }
}

/// Minimal, core, strongly synchronizing, injective states with clopen
/// images.
pub fn in_son(t: &Transducer) -> Membership {
    if let Err(v) = t.validate() {
        return Membership::no(format!("invalid: {v}"));
    }
    if !is_core(t) {
        return Membership::no("not a strongly synchronizing core");
    }
    match is_minimal(t) {
        Ok(true) => {}
        Ok(false) => return Membership::no("not minimal"),
        Err(e) => return Membership::no(format!("not minimal: {e}")),
    }
    for q in t.states() {
        match image_antichain(t, q) {
            Ok(_) => {}
            Err(Error::NotClopen(_)) => {
                return Membership::no(format!("state {} has non-clopen image", t.name(q)))
            }
            Err(e) => return Membership::unknown(e.to_string()),
        }
    }
    match machine_injective(t, cantor::default_residual_cap(t)) {
        Injectivity::Yes => Membership::yes(),
        Injectivity::No { x, y } => Membership::no(format!(
            "not injective: {} and {} collide",
            x.to_text(t.alphabet_size()),
            y.to_text(t.alphabet_size())
        )),
        Injectivity::Unknown => Membership::unknown("injectivity undecided"),
    }
}

/// `in_SOn` and the inverse exists.
pub fn in_on(t: &Transducer) -> Membership {
    in_son(t).and(|| {
        let elem = GroupElement::from_normal(t.canonical());
        match inverse(&elem) {
            Ok(_) => Membership::yes(),
            Err(Error::BoundExceeded(e)) => Membership::unknown(e),
            Err(e) => Membership::no(format!("no inverse: {e}")),
        }
    })
}

/// Every circuit writes as many letters as it reads.
pub fn circuits_length_preserving(t: &Transducer) -> bool {
    // Each strongly connected component must admit a potential φ with
    // φ(π(a,q)) = φ(q) + |λ(a,q)| - 1 along its internal edges.
    let comps = t.sccs();
    let mut comp_of = vec![0usize; t.num_states()];
    for (i, c) in comps.iter().enumerate() {
        for &q in c {
            comp_of[q] = i;
        }
    }
    let mut phi: Vec<Option<i64>> = vec![None; t.num_states()];
    for c in &comps {
        let root = c[0];
        phi[root] = Some(0);
        let mut stack = vec![root];
        while let Some(q) = stack.pop() {
            let pq = phi[q].unwrap();
            for a in t.letters() {
                let s = t.next(q, a);
                if comp_of[s] != comp_of[q] {
                    continue;
                }
                let want = pq + t.output(q, a).len() as i64 - 1;
                match phi[s] {
                    None => {
                        phi[s] = Some(want);
                        stack.push(s);
                    }
                    Some(v) if v != want => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}

pub fn in_sln(t: &Transducer) -> Membership {
    in_son(t).and(|| {
        if circuits_length_preserving(t) {
            Membership::yes()
        } else {
            Membership::no("a circuit changes length")
        }
    })
}

pub fn in_ln(t: &Transducer) -> Membership {
    in_sln(t).and(|| in_on(t))
}

pub use crate::cantor::Orientation;

/// Orientation of a circle-compatible machine, if it has one.
pub fn orientation(t: &Transducer) -> Result<Option<Orientation>> {
    cantor::circle_orientation(t)
}

pub fn in_ton(t: &Transducer) -> Membership {
    in_on(t).and(|| match orientation(t) {
        Ok(Some(_)) => Membership::yes(),
        Ok(None) => Membership::no("states do not respect the circular order"),
        Err(e) => Membership::unknown(e.to_string()),
    })
}

pub fn in_tln(t: &Transducer) -> Membership {
    in_ton(t).and(|| in_sln(t))
}

/// The three conditions of the `x`-subgroup, reported separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnxReport {
    /// `π(x, q)` is one state `q_x` for all `q`.
    pub x1: bool,
    /// Every `λ(x, q)` is `w x` with `w` free of `x`.
    pub x2: bool,
    /// Every edge not reading `x` writes no `x`.
    pub x3: bool,
    pub q_x: Option<StateId>,
}

impl OnxReport {
    pub fn holds(&self) -> bool {
        self.x1 && self.x2 && self.x3
    }
}

pub fn onx_conditions(t: &Transducer, x: Letter) -> OnxReport {
    let target = t.next(0, x);
    let x1 = t.states().all(|q| t.next(q, x) == target);
    let x2 = t.states().all(|q| {
        let o = t.output(q, x);
        o.last() == Some(&x) && !o[..o.len() - 1].contains(&x)
    });
    let x3 = t.states().all(|q| {
        t.letters()
            .filter(|&a| a != x)
            .all(|a| !t.output(q, a).contains(&x))
    });
    OnxReport {
        x1,
        x2,
        x3,
        q_x: x1.then_some(target),
    }
}

pub fn in_onx(t: &Transducer, x: Letter) -> Membership {
    if (x as usize) >= t.alphabet_size() {
        return Membership::no("letter outside the alphabet");
    }
    let r = onx_conditions(t, x);
    let local = if r.holds() {
        Membership::yes()
    } else {
        let mut reasons = Vec::new();
        for (ok, name) in [(r.x1, "X1"), (r.x2, "X2"), (r.x3, "X3")] {
            if !ok {
                reasons.push(format!("{name} fails"));
            }
        }
        Membership {
            value: Truth::False,
            reasons,
        }
    };
    local.and(|| in_on(t))
}

/// `R T R`, computed by relabelling letters.
pub fn conjugate_by_r(t: &GroupElement) -> GroupElement {
    let n = t.alphabet_size();
    let sigma: Vec<Letter> = (0..n).map(|a| (n - 1 - a) as Letter).collect();
    let c = t.rep.conjugate_letters(&sigma).expect("same alphabet");
    GroupElement::from_normal(c.canonical())
}

/// The initial machine computing `h_q` restricted to sequences over
/// `letters`, relabelled onto `X_k` in the given order.
pub fn restrict(t: &Transducer, q: StateId, letters: &[Letter]) -> Result<InitialTransducer> {
    let k = letters.len();
    if k < 2 {
        return Err(Error::BadAlphabet(k));
    }
    let mut pos = vec![None; t.alphabet_size()];
    for (i, &a) in letters.iter().enumerate() {
        if a as usize >= t.alphabet_size() || pos[a as usize].is_some() {
            return Err(Error::Precondition(format!("bad letter list {letters:?}")));
        }
        pos[a as usize] = Some(i as Letter);
    }
    let reach = {
        let mut seen = vec![false; t.num_states()];
        let mut order = vec![q];
        seen[q] = true;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            i += 1;
            for &a in letters {
                let r = t.next(s, a);
                if !seen[r] {
                    seen[r] = true;
                    order.push(r);
                }
            }
        }
        order
    };
    let mut index = vec![usize::MAX; t.num_states()];
    for (i, &s) in reach.iter().enumerate() {
        index[s] = i;
    }
    let mut rows = Vec::with_capacity(reach.len());
    for &s in &reach {
        let mut row = Vec::with_capacity(k);
        for &a in letters {
            let out = t.output(s, a);
            let mut mapped = Vec::with_capacity(out.len());
            for &b in out.iter() {
                match pos[b as usize] {
                    Some(i) => mapped.push(i),
                    None => {
                        return Err(Error::NotClosed(format!(
                            "state {} on letter {a} writes {}",
                            t.name(s),
                            out.to_text(t.alphabet_size())
                        )))
                    }
                }
            }
            row.push((index[t.next(s, a)], Word::from(mapped)));
        }
        rows.push(row);
    }
    let base =
        Transducer::from_rows(k, rows)?.with_names(reach.iter().map(|&s| t.name(s).to_string()).collect())?;
    InitialTransducer::new(base, 0)
}

/// Synchronizing levels of `T` and of its inverse.
pub fn is_bisynchronizing(t: &GroupElement, max_k: usize) -> Result<(usize, usize)> {
    let inv = inverse(t)?;
    let k = t.sync_level();
    let l = inv.sync_level();
    if k > max_k || l > max_k {
        return Err(Error::NotSynchronizing(max_k));
    }
    Ok((k, l))
}

pub fn default_bisync_bound(t: &GroupElement) -> usize {
    default_max_level(&t.rep).max(64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_b, gen_c, gen_identity, gen_r, tde};

    fn el(t: Transducer) -> GroupElement {
        GroupElement::new(t).unwrap()
    }

    #[test]
    fn products() {
        let id = el(gen_identity(4));
        let t = el(tde(4, 2, 2).unwrap());
        assert_eq!(group_product(&id, &t).unwrap(), t);
        assert_eq!(group_product(&t, &id).unwrap(), t);
        let r = el(gen_r(2));
        assert!(group_product(&r, &r).unwrap().is_identity());
        let a = el(tde(6, 3, 2).unwrap());
        let b = el(tde(6, 2, 3).unwrap());
        assert!(group_product(&a, &b).unwrap().is_identity());
        assert!(group_product(&t, &t).unwrap().is_identity());
        assert!(!r.is_identity());
    }

    #[test]
    fn product_independent_of_state() {
        let b = el(gen_b(3, 1).unwrap());
        let c = el(gen_c(3, 1).unwrap());
        let direct = group_product(&b, &c).unwrap();
        let p = core(&b.rep().product(c.rep()).unwrap()).unwrap();
        for s in p.states() {
            assert_eq!(&group_product_via_state(&b, &c, s).unwrap(), direct.rep());
        }
    }

    #[test]
    fn inverses() {
        let r = el(gen_r(2));
        assert_eq!(inverse(&r).unwrap(), r);
        let id = el(gen_identity(3));
        assert!(inverse(&id).unwrap().is_identity());
        let a = el(tde(6, 2, 3).unwrap());
        assert_eq!(inverse(&a).unwrap(), el(tde(6, 3, 2).unwrap()));
        let b = el(gen_b(3, 1).unwrap());
        let bi = inverse(&b).unwrap();
        assert_eq!(inverse(&bi).unwrap(), b);
    }

    #[test]
    fn membership() {
        assert!(in_son(&tde(4, 2, 2).unwrap()).is_true());
        assert!(in_son(&gen_identity(2)).is_true());
        let collapse = Transducer::from_fn(2, 1, |_, _| (0, Word::letter(0))).unwrap();
        assert_eq!(in_son(&collapse).value, Truth::False);
        assert!(in_ln(&gen_r(2)).is_true());
        assert!(in_ln(&tde(4, 2, 2).unwrap()).is_true());
        let b = gen_b(3, 1).unwrap();
        assert!(in_on(&b).is_true());
        assert_eq!(in_sln(&b).value, Truth::False);
        assert!(in_ton(&tde(6, 2, 3).unwrap()).is_true());
        assert_eq!(
            orientation(&tde(6, 2, 3).unwrap()).unwrap(),
            Some(Orientation::Preserving)
        );
        assert_eq!(orientation(&gen_r(2)).unwrap(), Some(Orientation::Reversing));
        let swap = Transducer::from_fn(3, 1, |_, a| (0, Word::letter([1, 0, 2][a as usize]))).unwrap();
        assert_eq!(in_ton(&swap).value, Truth::False);
    }

    #[test]
    fn x_subgroup() {
        assert!(in_onx(&gen_b(3, 1).unwrap(), 1).is_true());
        assert!(in_onx(&gen_c(3, 1).unwrap(), 1).is_true());
        let t = tde(4, 2, 2).unwrap();
        for x in 0..4 {
            let r = onx_conditions(&t, x);
            assert!(r.x1 && !r.x2 && !r.holds(), "x = {x}: {r:?}");
        }
    }

    #[test]
    fn conjugation() {
        let id = el(gen_identity(2));
        assert_eq!(conjugate_by_r(&id), id);
        let r = el(gen_r(2));
        assert_eq!(conjugate_by_r(&r), r);
        let t = el(tde(4, 2, 2).unwrap());
        let r4 = el(gen_r(4));
        assert_eq!(conjugate_by_r(&t), t);
        let via_products = group_product(&r4, &group_product(&t, &r4).unwrap()).unwrap();
        assert_eq!(conjugate_by_r(&t), via_products);
        let b = el(gen_b(4, 1).unwrap());
        let via_products = group_product(&r4, &group_product(&b, &r4).unwrap()).unwrap();
        assert_eq!(conjugate_by_r(&b), via_products);
    }

    #[test]
    fn restrictions() {
        let r = restrict(&gen_identity(3), 0, &[0, 2]).unwrap();
        assert!(r.base.is_identity());
        let b = gen_b(3, 1).unwrap();
        let rb = restrict(&b, b.state_by_name("p").unwrap(), &[0, 2]).unwrap();
        assert_eq!(rb.base.num_states(), 4);
        assert_eq!(rb.base.alphabet_size(), 2);
        let t = tde(4, 2, 2).unwrap();
        assert!(matches!(restrict(&t, 0, &[0, 3]), Err(Error::NotClosed(_))));
    }

    #[test]
    fn bisynchronizing_levels() {
        assert_eq!(is_bisynchronizing(&el(gen_r(2)), 10).unwrap(), (0, 0));
        let (k, l) = is_bisynchronizing(&el(tde(4, 2, 2).unwrap()), 10).unwrap();
        assert_eq!(k, 1);
        assert!(l >= 1);
        let (k, _) = is_bisynchronizing(&el(gen_b(3, 1).unwrap()), 20).unwrap();
        assert_eq!(k, 3);
    }
}
