//! Cone counts of state images, the `s` invariant with values in `G_n`, and
//! the action on rotation classes of prime words.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::cantor::image_antichain;
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::sync::sync_level;
use crate::transducer::{StateId, Transducer};
use crate::words::{enumerate_rotation_classes, gcd, rotation_class_of_root, RotationClass};

/// Distinct primes of `n` with their exponents.
pub fn factor(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut p = 2u128;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// An element of `G_n`: positive `n`-smooth rationals modulo powers of `n`,
/// stored as an exponent vector over the primes of `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GnElement {
    n: usize,
    primes: Vec<u128>,
    relation: Vec<i64>,
    exponents: Vec<i64>,
}

impl GnElement {
    pub fn identity(n: usize) -> Self {
        let f = factor(n as u128);
        GnElement {
            n,
            primes: f.iter().map(|p| p.0).collect(),
            relation: f.iter().map(|p| p.1 as i64).collect(),
            exponents: vec![0; f.len()],
        }
    }

    pub fn from_exponents(n: usize, exponents: Vec<i64>) -> Result<Self> {
        let mut g = GnElement::identity(n);
        if exponents.len() != g.primes.len() {
            return Err(Error::Precondition("exponent vector has the wrong length".into()));
        }
        g.exponents = exponents;
        g.reduce();
        Ok(g)
    }

    /// The class of a positive integer whose primes all divide `n`.
    pub fn class_of(n: usize, value: u128) -> Result<Self> {
        if value == 0 {
            return Err(Error::Precondition("zero has no class".into()));
        }
        let mut g = GnElement::identity(n);
        let mut v = value;
        for (i, &p) in g.primes.iter().enumerate() {
            while v.is_multiple_of(p) {
                v /= p;
                g.exponents[i] += 1;
            }
        }
        if v != 1 {
            return Err(Error::Precondition(format!(
                "{value} has a prime factor not dividing {n}"
            )));
        }
        g.reduce();
        Ok(g)
    }

    /// Subtracts the multiple of the relation vector that brings the first
    /// coordinate into `[0, l_1)`.
    fn reduce(&mut self) {
        if self.primes.is_empty() {
            return;
        }
        let l1 = self.relation[0];
        let k = self.exponents[0].div_euclid(l1);
        for (e, l) in self.exponents.iter_mut().zip(&self.relation) {
            *e -= k * l;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn primes(&self) -> &[u128] {
        &self.primes
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn multiply(&self, other: &GnElement) -> Result<GnElement> {
        if self.n != other.n {
            return Err(Error::AlphabetMismatch(self.n, other.n));
        }
        let mut g = self.clone();
        for (a, b) in g.exponents.iter_mut().zip(&other.exponents) {
            *a += b;
        }
        g.reduce();
        Ok(g)
    }

    pub fn inverse(&self) -> GnElement {
        let mut g = self.clone();
        for e in g.exponents.iter_mut() {
            *e = -*e;
        }
        g.reduce();
        g
    }
}

impl fmt::Display for GnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .primes
            .iter()
            .zip(&self.exponents)
            .map(|(p, e)| format!("{p}^{e}"))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

impl fmt::Debug for GnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GnElement(n={}, {self})", self.n)
    }
}

pub fn gn_multiply(a: &GnElement, b: &GnElement) -> Result<GnElement> {
    a.multiply(b)
}

/// `G_n ≅ Z^rank × Z/torsion`: the Smith form of the `1 × r` relation
/// matrix `[l_1 … l_r]` is `[gcd(l_i)]`.
pub fn gn_structure(n: usize) -> (usize, usize) {
    let f = factor(n as u128);
    let torsion = f.iter().fold(0usize, |g, p| gcd(g, p.1 as usize));
    (f.len().saturating_sub(1), torsion)
}

/// Image cone counts per state and their common residue mod `n - 1`.
pub fn cone_signature(t: &Transducer) -> Result<(Vec<usize>, usize)> {
    let n = t.alphabet_size();
    let counts: Vec<usize> = t
        .states()
        .map(|q| image_antichain(t, q).map(|c| c.len()))
        .collect::<Result<_>>()?;
    let residue = |m: usize| m % (n - 1);
    let m = residue(counts[0]);
    if let Some(q) = counts.iter().position(|&c| residue(c) != m) {
        return Err(Error::Internal(format!(
            "cone counts {} and {} of states {} and {q} differ mod {}",
            counts[0],
            counts[q],
            t.name(0),
            n - 1
        )));
    }
    Ok((counts, m))
}

/// `s(T)`: the number of equal-length cones covering a state image, with
/// factors of `n` removed, as an element of `G_n`.
pub fn s_invariant(t: &GroupElement) -> Result<GnElement> {
    let rep = t.rep();
    let n = rep.alphabet_size();
    let mut value: Option<GnElement> = None;
    for q in rep.states() {
        let cover = image_antichain(rep, q)?;
        let level = cover.max_len() + 1;
        let count = cover
            .count_at_level(level)
            .ok_or_else(|| Error::BoundExceeded("cone count overflow".into()))?;
        let g = GnElement::class_of(n, count)
            .map_err(|_| Error::Precondition(format!("cone count {count} is not {n}-smooth")))?;
        match &value {
            None => value = Some(g),
            Some(v) if *v != g => {
                return Err(Error::Internal(format!(
                    "s differs between states: {v} vs {g} at {}",
                    rep.name(q)
                )))
            }
            _ => {}
        }
    }
    Ok(value.expect("at least one state"))
}

/// The loop state of the class of `γ`: the unique `q` with `π(γ, q) = q`.
pub fn loop_state(t: &Transducer, gamma: &[u8]) -> Result<StateId> {
    let cert = sync_level(t, usize::MAX).ok_or(Error::NotSynchronizing(0))?;
    let reps = cert.level.div_ceil(gamma.len()).max(1);
    let mut q = 0;
    for _ in 0..reps {
        q = t.state_after(q, gamma);
    }
    if t.state_after(q, gamma) != q {
        return Err(Error::Internal("forced state is not a loop state".into()));
    }
    Ok(q)
}

/// `[γ] ↦ [root of λ(γ, q)]` for the loop state `q` of `γ`.
pub fn pi_image(t: &Transducer, class: &RotationClass) -> Result<RotationClass> {
    let q = loop_state(t, class.canonical())?;
    let out = t.run(q, class.canonical()).1;
    if out.is_empty() {
        return Err(Error::Invalid("loop with empty output".into()));
    }
    rotation_class_of_root(&out)
}

/// The Π table on all classes of length at most `max_len`.
pub fn pi_action(t: &GroupElement, max_len: usize) -> Result<BTreeMap<RotationClass, RotationClass>> {
    let rep = t.rep();
    enumerate_rotation_classes(rep.alphabet_size(), max_len)
        .into_iter()
        .map(|c| pi_image(rep, &c).map(|img| (c, img)))
        .collect()
}

/// Injectivity of Π on a bounded domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiReport {
    pub injective: bool,
    /// Two classes with the same image, when not injective.
    pub witness: Option<(RotationClass, RotationClass)>,
    /// Every image is again in the domain.
    pub closed: bool,
    /// Number of images of each length.
    pub image_lengths: BTreeMap<usize, usize>,
}

pub fn pi_report(t: &GroupElement, max_len: usize) -> Result<PiReport> {
    let table = pi_action(t, max_len)?;
    let mut seen: HashMap<&RotationClass, &RotationClass> = HashMap::new();
    let mut witness = None;
    let mut image_lengths = BTreeMap::new();
    for (c, img) in &table {
        *image_lengths.entry(img.len()).or_insert(0) += 1;
        if let Some(prev) = seen.insert(img, c) {
            witness.get_or_insert(((*prev).clone(), c.clone()));
        }
    }
    Ok(PiReport {
        injective: witness.is_none(),
        closed: table.values().all(|img| img.len() <= max_len),
        witness,
        image_lengths,
    })
}

pub fn pi_bijective_up_to(t: &GroupElement, max_len: usize) -> Result<bool> {
    Ok(pi_report(t, max_len)?.injective)
}

/// All invariants of one element.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub m_per_state: Vec<usize>,
    pub m: usize,
    pub s: Option<GnElement>,
    pub pi_table: BTreeMap<RotationClass, RotationClass>,
}

pub fn invariant_report(t: &GroupElement, pi_depth: usize) -> Result<InvariantReport> {
    let (m_per_state, m) = cone_signature(t.rep())?;
    Ok(InvariantReport {
        m_per_state,
        m,
        s: s_invariant(t).ok(),
        pi_table: pi_action(t, pi_depth)?,
    })
}

static AUDIT_ENABLED: AtomicBool = AtomicBool::new(false);
static AUDITED: AtomicUsize = AtomicUsize::new(0);
static AUDIT_FAILURES: Mutex<Vec<String>> = Mutex::new(Vec::new());

/// Turns on process-wide checking of the cone signature of every group
/// element created afterwards.
pub fn enable_audit() {
    AUDIT_ENABLED.store(true, Ordering::SeqCst);
}

/// Number of audited elements and the failures seen so far.
pub fn audit_summary() -> (usize, Vec<String>) {
    (
        AUDITED.load(Ordering::SeqCst),
        AUDIT_FAILURES.lock().unwrap().clone(),
    )
}

pub(crate) fn audit(t: &Transducer) {
    if !AUDIT_ENABLED.load(Ordering::Relaxed) {
        return;
    }
    AUDITED.fetch_add(1, Ordering::SeqCst);
    if let Err(e) = cone_signature(t) {
        AUDIT_FAILURES.lock().unwrap().push(format!("{e} in {t:?}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_identity, gen_r, tde};
    use crate::group::group_product;
    use crate::words::{rotation_canonical, Word};

    fn el(t: Transducer) -> GroupElement {
        GroupElement::new(t).unwrap()
    }

    fn class(s: &str) -> RotationClass {
        rotation_canonical(&Word::parse(s, 10).unwrap()).unwrap()
    }

    #[test]
    fn structure() {
        assert_eq!(gn_structure(6), (1, 1));
        assert_eq!(gn_structure(4), (0, 2));
        assert_eq!(gn_structure(9), (0, 2));
        assert_eq!(gn_structure(8), (0, 3));
        assert_eq!(gn_structure(12), (1, 1));
        let two = GnElement::class_of(6, 2).unwrap();
        let three = GnElement::class_of(6, 3).unwrap();
        assert!(two.multiply(&three).unwrap().is_identity());
        assert!(GnElement::class_of(6, 6).unwrap().is_identity());
        assert!(GnElement::class_of(4, 16).unwrap().is_identity());
        assert!(!GnElement::class_of(4, 2).unwrap().is_identity());
        assert!(GnElement::class_of(6, 5).is_err());
    }

    #[test]
    fn signatures() {
        assert_eq!(cone_signature(&gen_identity(4)).unwrap(), (vec![1], 1));
        assert_eq!(cone_signature(&tde(4, 2, 2).unwrap()).unwrap(), (vec![2, 2], 2));
        assert_eq!(cone_signature(&tde(6, 2, 3).unwrap()).unwrap(), (vec![3, 3], 3));
    }

    #[test]
    fn s_values() {
        assert!(s_invariant(&el(gen_identity(6))).unwrap().is_identity());
        for (n, d, e) in [(4, 2, 2), (6, 3, 2), (6, 2, 3), (8, 2, 4), (8, 4, 2), (9, 3, 3)] {
            let s = s_invariant(&el(tde(n, d, e).unwrap())).unwrap();
            assert_eq!(s, GnElement::class_of(n, e as u128).unwrap(), "T({d},{e})");
        }
        let p = group_product(&el(tde(6, 3, 2).unwrap()), &el(tde(6, 2, 3).unwrap())).unwrap();
        assert!(s_invariant(&p).unwrap().is_identity());
    }

    #[test]
    fn pi_examples() {
        let r = pi_action(&el(gen_r(2)), 2).unwrap();
        assert_eq!(r[&class("0")], class("1"));
        assert_eq!(r[&class("1")], class("0"));
        assert_eq!(r[&class("01")], class("01"));
        let t = pi_action(&el(tde(4, 2, 2).unwrap()), 1).unwrap();
        assert_eq!(t[&class("1")], class("2"));
        assert_eq!(t[&class("2")], class("1"));
        assert_eq!(t[&class("0")], class("0"));
        assert_eq!(t[&class("3")], class("3"));
        let id = pi_action(&el(gen_identity(3)), 3).unwrap();
        assert!(id.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn pi_injectivity() {
        let report = pi_report(&el(tde(4, 2, 2).unwrap()), 3).unwrap();
        assert!(report.injective);
        assert_eq!(report.image_lengths.values().sum::<usize>(), 30);
        assert!(pi_bijective_up_to(&el(gen_r(2)), 6).unwrap());
        // Both fixed letters of a collapsing two-state machine land on [0].
        let t = Transducer::from_rows(
            2,
            vec![
                vec![
                    (0, Word::parse("0", 2).unwrap()),
                    (1, Word::parse("1", 2).unwrap()),
                ],
                vec![
                    (0, Word::parse("0", 2).unwrap()),
                    (1, Word::parse("0", 2).unwrap()),
                ],
            ],
        )
        .unwrap();
        let report = pi_report(&GroupElement::from_normal(t), 1).unwrap();
        assert!(!report.injective);
    }
}
