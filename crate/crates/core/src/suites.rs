//! Self-contained verification suites behind `thn verify`.

use std::fmt;
use std::time::{Duration, Instant};

use crate::cantor::lambda;
use crate::enumeration::{verify_to2, EnumBounds, EnumReport};
use crate::error::{Error, Result};
use crate::families::{bc_relator_check, gen_b, gen_c, gen_identity, gen_r, order_of, tde, Order};
use crate::group::{group_product, in_on, inverse, GroupElement, Truth};
use crate::invariants::{cone_signature, factor, gn_structure, pi_image, s_invariant, GnElement};
use crate::marker::marker_embed;
use crate::minimize::minimize_with_map;
use crate::random::random_valid_transducer;
use crate::sync::core_states;
use crate::transducer::Transducer;
use crate::words::{
    enumerate_rotation_classes, prefix_comparable, rotation_class_of_root, Alphabet, Letter, Word,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub description: String,
    pub status: Status,
    pub details: String,
}

/// Outcome of one suite; it passes iff every check passes.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: String,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.to_string(),
            checks: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    /// 0 when all checks pass, 2 when some check is undecided and none
    /// fails, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else if self.checks.iter().any(|c| c.status == Status::Fail) {
            1
        } else {
            2
        }
    }

    /// Records a check; errors count as failures except exceeded bounds,
    /// which are undecided.
    pub fn check(&mut self, description: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) {
        let (status, details) = match f() {
            Ok((true, d)) => (Status::Pass, d),
            Ok((false, d)) => (Status::Fail, d),
            Err(e @ Error::BoundExceeded(_)) => (Status::Unknown, e.to_string()),
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        self.checks.push(Check {
            description: description.into(),
            status,
            details,
        });
    }

    fn merge(&mut self, other: SuiteResult) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.name)?;
        for c in &self.checks {
            write!(f, "  [{}] {}", c.status.as_str(), c.description)?;
            if !c.details.is_empty() {
                write!(f, ": {}", c.details)?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "{}: {} checks, {:.2}s",
            if self.passed() { "PASSED" } else { "FAILED" },
            self.checks.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

fn timed(name: &str, body: impl FnOnce(&mut SuiteResult)) -> SuiteResult {
    let start = Instant::now();
    let mut r = SuiteResult::new(name);
    body(&mut r);
    r.elapsed = start.elapsed();
    r
}

fn el(t: Result<Transducer>) -> Result<GroupElement> {
    GroupElement::new(t?)
}

fn product_is_identity(a: &GroupElement, b: &GroupElement) -> Result<(bool, String)> {
    let p = group_product(a, b)?;
    Ok((p.is_identity(), format!("{} states", p.num_states())))
}

fn gn_order(g: &GnElement, bound: usize) -> Result<Option<usize>> {
    let mut p = g.clone();
    for k in 1..=bound {
        if p.is_identity() {
            return Ok(Some(k));
        }
        p = p.multiply(g)?;
    }
    Ok(None)
}

/// The generators `R` and `T(n/p, p)` for the primes `p | n`.
pub fn tl_generators(n: usize) -> Result<Vec<(String, GroupElement)>> {
    let mut gens = vec![("R".to_string(), GroupElement::new(gen_r(n))?)];
    for (p, _) in factor(n as u128) {
        let p = p as usize;
        gens.push((format!("T({},{})", n / p, p), el(tde(n, n / p, p))?));
    }
    Ok(gens)
}

/// Structure of the group generated by `R` and the `T(n/p, p)`.
pub fn verify_tl_group(n: usize) -> SuiteResult {
    const ORDER_BOUND: usize = 12;
    timed(&format!("tl-group n={n}"), |r| {
        let gens = match tl_generators(n) {
            Ok(g) => g,
            Err(e) => {
                r.check("build generators", || Err(e));
                return;
            }
        };
        let rg = gens[0].1.clone();
        r.check("R^2 = id", || product_is_identity(&rg, &rg));
        r.check("s(R) = 1", || {
            let s = s_invariant(&rg)?;
            Ok((s.is_identity(), s.to_string()))
        });
        let (rank, torsion) = gn_structure(n);
        let primes = factor(n as u128);
        r.check("gn_structure", || {
            let l = primes
                .iter()
                .fold(0usize, |g, p| crate::words::gcd(g, p.1 as usize));
            Ok((
                rank + 1 == primes.len() && torsion == l,
                format!("rank {rank}, torsion {torsion}"),
            ))
        });
        for ((name, t), (p, _)) in gens[1..].iter().zip(&primes) {
            r.check(format!("s({name}) = class({p})"), || {
                let s = s_invariant(t)?;
                Ok((s == GnElement::class_of(n, *p)?, s.to_string()))
            });
            r.check(format!("order of {name} matches the order of s"), || {
                let s = s_invariant(t)?;
                let expected = gn_order(&s, ORDER_BOUND)?;
                let got = order_of(t, ORDER_BOUND)?;
                let ok = match (expected, got) {
                    (Some(k), Order::Finite(j)) => k == j,
                    (None, Order::AtLeast(_)) => true,
                    _ => false,
                };
                // With a free part, s has infinite order; otherwise it is the torsion.
                let structural = match expected {
                    Some(k) => rank == 0 && k == torsion,
                    None => rank > 0,
                };
                Ok((ok && structural, format!("{got:?}, s has order {expected:?}")))
            });
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                let (a, b) = (&gens[i], &gens[j]);
                r.check(format!("{} and {} commute", a.0, b.0), || {
                    let ab = group_product(&a.1, &b.1)?;
                    let ba = group_product(&b.1, &a.1)?;
                    Ok((ab == ba, String::new()))
                });
            }
        }
        for a in &gens {
            for b in &gens {
                r.check(format!("s({}{}) = s({}) s({})", a.0, b.0, a.0, b.0), || {
                    let lhs = s_invariant(&group_product(&a.1, &b.1)?)?;
                    let rhs = s_invariant(&a.1)?.multiply(&s_invariant(&b.1)?)?;
                    Ok((lhs == rhs, lhs.to_string()))
                });
            }
        }
        if n == 6 {
            r.check("T(3,2) T(2,3) = id", || {
                product_is_identity(&el(tde(6, 3, 2))?, &el(tde(6, 2, 3))?)
            });
        }
    })
}

/// Thompson relators for `B` and `C` over `X_n`.
pub fn verify_f_relations(n: usize, x: usize) -> SuiteResult {
    timed(&format!("f-relations n={n} x={x}"), |r| {
        match bc_relator_check(n, x) {
            Ok(rep) => {
                r.check("[BC^-1, B^-1 C B] = id", || {
                    Ok((rep.first_relator_trivial, String::new()))
                });
                r.check("[BC^-1, B^-2 C B^2] = id", || {
                    Ok((rep.second_relator_trivial, String::new()))
                });
                r.check("[B, C] != id", || Ok((!rep.degenerate, String::new())));
                let (a, b, d) = rep.restricted.unwrap_or((false, false, true));
                r.check("restricted to {0, n-1}: first relator", || Ok((a, String::new())));
                r.check("restricted to {0, n-1}: second relator", || {
                    Ok((b, String::new()))
                });
                r.check("restricted to {0, n-1}: [B, C] != id", || Ok((!d, String::new())));
            }
            Err(e) => r.check("relator computation", || Err(e)),
        }
    })
}

/// The bounded enumeration over `X_2`, with its report.
pub fn verify_to2_enum(bounds: &EnumBounds, jobs: Option<usize>) -> (SuiteResult, Option<EnumReport>) {
    let mut report = None;
    let suite = timed("to2-enum", |r| match verify_to2(bounds, jobs) {
        Ok(rep) => {
            r.check("survivors are exactly id and R", || {
                Ok((
                    rep.only_identity_and_r(bounds.n),
                    format!("{} survivors", rep.survivors.len()),
                ))
            });
            r.check("no injectivity-unknown exclusions", || {
                Ok((rep.injectivity_unknown == 0, rep.injectivity_unknown.to_string()))
            });
            r.check("stage counts decrease", || {
                let c: Vec<u64> = rep.stages().iter().map(|s| s.1).collect();
                Ok((c.windows(2).all(|w| w[0] >= w[1]), format!("{c:?}")))
            });
            report = Some(rep);
        }
        Err(e) => r.check("enumeration", || Err(e)),
    });
    (suite, report)
}

/// The elements `B`, `C`, `BC`, `B^-1` over `X_n` used by the marker suite.
pub fn marker_sample(n: usize, x: usize) -> Result<Vec<(String, GroupElement)>> {
    let b = el(gen_b(n, x))?;
    let c = el(gen_c(n, x))?;
    let bc = group_product(&b, &c)?;
    let bi = inverse(&b)?;
    Ok(vec![
        ("B".into(), b),
        ("C".into(), c),
        ("BC".into(), bc),
        ("B^-1".into(), bi),
    ])
}

/// Marker embedding of `B`, `C`, `BC`, `B^-1` into `O_m`.
pub fn verify_marker(n: usize, m: usize, x: usize) -> SuiteResult {
    timed(&format!("marker n={n} m={m} x={x}"), |r| {
        let xl = x as Letter;
        let sample = match marker_sample(n, x) {
            Ok(s) => s,
            Err(e) => {
                r.check("build sample", || Err(e));
                return;
            }
        };
        let mut embedded = Vec::new();
        for (name, t) in &sample {
            match marker_embed(t, xl, m) {
                Ok(f) => {
                    r.check(format!("f({name}) in O_{m}"), || {
                        let mem = in_on(f.rep());
                        Ok((
                            mem.value == Truth::True,
                            format!("{} states {:?}", f.num_states(), mem.reasons),
                        ))
                    });
                    embedded.push(Some(f));
                }
                Err(e) => {
                    r.check(format!("embed {name}"), || Err(e));
                    embedded.push(None);
                }
            }
        }
        for ((name, t), f) in sample.iter().zip(&embedded) {
            let Some(f) = f else { continue };
            r.check(format!("f({name}) f({name}^-1) = id"), || {
                let fi = marker_embed(&inverse(t)?, xl, m)?;
                let a = group_product(f, &fi)?;
                let b = group_product(&fi, f)?;
                Ok((a.is_identity() && b.is_identity(), String::new()))
            });
        }
        if let (Some(fb), Some(fc), Some(fbc)) = (&embedded[0], &embedded[1], &embedded[2]) {
            r.check("f(BC) = f(B) f(C)", || {
                Ok((group_product(fb, fc)? == *fbc, String::new()))
            });
        }
        r.check("f(id) = id", || {
            let f = marker_embed(&GroupElement::identity(n), xl, m)?;
            Ok((f.is_identity(), String::new()))
        });
    })
}

/// Every generated element the round-trip suite inverts.
pub fn roundtrip_sample() -> Result<Vec<(String, GroupElement)>> {
    let mut out = Vec::new();
    for n in [2, 3, 4, 6, 8, 9] {
        out.push((format!("R over X_{n}"), GroupElement::new(gen_r(n))?));
    }
    for n in [4, 6, 8, 9] {
        for d in 2..n {
            if n % d == 0 {
                out.push((format!("T({d},{})", n / d), el(tde(n, d, n / d))?));
            }
        }
    }
    for (n, x) in [(3, 1), (4, 1), (4, 2)] {
        out.push((format!("B over X_{n}, x={x}"), el(gen_b(n, x))?));
        out.push((format!("C over X_{n}, x={x}"), el(gen_c(n, x))?));
    }
    Ok(out)
}

/// `T T^-1 = id = T^-1 T` for every generated element.
pub fn verify_inverse_roundtrip() -> SuiteResult {
    timed("inverse-roundtrip", |r| match roundtrip_sample() {
        Ok(sample) => {
            for (name, t) in sample {
                r.check(format!("{name}: T T^-1 = id = T^-1 T"), || {
                    let inv = inverse(&t)?;
                    let a = group_product(&t, &inv)?;
                    let b = group_product(&inv, &t)?;
                    Ok((
                        a.is_identity() && b.is_identity(),
                        format!("inverse has {} states", inv.num_states()),
                    ))
                });
            }
        }
        Err(e) => r.check("build sample", || Err(e)),
    })
}

/// Pairs of generated elements used for the Π homomorphism check.
pub fn pi_pairs() -> Result<Vec<(String, GroupElement, GroupElement)>> {
    Ok(vec![
        (
            "R, T(2,2)".into(),
            GroupElement::new(gen_r(4))?,
            el(tde(4, 2, 2))?,
        ),
        ("T(3,2), T(2,3)".into(), el(tde(6, 3, 2))?, el(tde(6, 2, 3))?),
        (
            "R, T(2,3)".into(),
            GroupElement::new(gen_r(6))?,
            el(tde(6, 2, 3))?,
        ),
        ("B, C over X_3".into(), el(gen_b(3, 1))?, el(gen_c(3, 1))?),
        ("C, B over X_4".into(), el(gen_c(4, 1))?, el(gen_b(4, 2))?),
    ])
}

/// `Π(TU) = Π(U) ∘ Π(T)` on short classes, and the explicit tables of `R`
/// and `T(2,2)`.
pub fn verify_pi_hom(max_len: usize) -> SuiteResult {
    timed(&format!("pi-hom up to length {max_len}"), |r| {
        match pi_pairs() {
            Ok(pairs) => {
                for (name, t, u) in pairs {
                    r.check(format!("Π homomorphism for {name}"), || {
                        let tu = group_product(&t, &u)?;
                        let classes = enumerate_rotation_classes(t.alphabet_size(), max_len);
                        for c in &classes {
                            let lhs = pi_image(tu.rep(), c)?;
                            let rhs = pi_image(u.rep(), &pi_image(t.rep(), c)?)?;
                            if lhs != rhs {
                                return Ok((false, format!("class {c}: {lhs} vs {rhs}")));
                            }
                        }
                        Ok((true, format!("{} classes", classes.len())))
                    });
                }
            }
            Err(e) => r.check("build pairs", || Err(e)),
        }
        r.check("Π(R) is the complement on X_2", || {
            let rt = gen_r(2);
            for c in enumerate_rotation_classes(2, max_len) {
                let comp: Word = c.canonical().iter().map(|&a| 1 - a).collect::<Vec<_>>().into();
                if pi_image(&rt, &c)? != rotation_class_of_root(&comp)? {
                    return Ok((false, format!("class {c}")));
                }
            }
            Ok((true, String::new()))
        });
        r.check("Π(T(2,2)) swaps [1] and [2] and fixes [0], [3]", || {
            let t = tde(4, 2, 2)?;
            let cls = |a: Letter| rotation_class_of_root(&[a]);
            let ok = pi_image(&t, &cls(1)?)? == cls(2)?
                && pi_image(&t, &cls(2)?)? == cls(1)?
                && pi_image(&t, &cls(0)?)? == cls(0)?
                && pi_image(&t, &cls(3)?)? == cls(3)?;
            Ok((ok, String::new()))
        });
    })
}

/// The six elements `id, R, T(3,2), T(2,3), R T(3,2), R T(2,3)` over `X_6`.
pub fn invariant_sample() -> Result<Vec<(String, GroupElement)>> {
    let r = GroupElement::new(gen_r(6))?;
    let a = el(tde(6, 3, 2))?;
    let b = el(tde(6, 2, 3))?;
    Ok(vec![
        ("id".into(), GroupElement::identity(6)),
        ("R".into(), r.clone()),
        ("T(3,2)".into(), a.clone()),
        ("T(2,3)".into(), b.clone()),
        ("R T(3,2)".into(), group_product(&r, &a)?),
        ("R T(2,3)".into(), group_product(&r, &b)?),
    ])
}

/// `m` and `s` are multiplicative on the sample over `X_6`.
pub fn verify_invariant_hom() -> SuiteResult {
    timed("invariant-hom n=6", |r| match invariant_sample() {
        Ok(sample) => {
            for (an, a) in &sample {
                for (bn, b) in &sample {
                    r.check(format!("m and s multiplicative on ({an}, {bn})"), || {
                        let ab = group_product(a, b)?;
                        let n1 = a.alphabet_size() - 1;
                        let m = |t: &GroupElement| cone_signature(t.rep()).map(|s| s.1);
                        let m_ok = m(&ab)? == (m(a)? * m(b)?) % n1;
                        let s_ok = s_invariant(&ab)? == s_invariant(a)?.multiply(&s_invariant(b)?)?;
                        Ok((
                            m_ok && s_ok,
                            format!("m = {}, s = {}", m(&ab)?, s_invariant(&ab)?),
                        ))
                    });
                }
            }
        }
        Err(e) => r.check("build sample", || Err(e)),
    })
}

const ORACLE_DEPTH: usize = 8;

/// Outputs of two machines on every input of length `ORACLE_DEPTH` are
/// prefix comparable, after prepending `shift` to the second.
fn agree(a: &Transducer, p: usize, b: &Transducer, q: usize, shift: &[Letter]) -> Option<Word> {
    let alph = Alphabet::new(a.alphabet_size()).expect("valid alphabet");
    for w in alph.words_of_len(ORACLE_DEPTH) {
        let x = a.run(p, &w).1;
        let y = Word::from(shift).concat(&b.run(q, &w).1);
        if !prefix_comparable(&x, &y) {
            return Some(w);
        }
    }
    None
}

/// A state of `t` that no state of `u` reproduces once the pending output of
/// `t` is accounted for.
fn unmatched_state(t: &Transducer, u: &Transducer) -> Result<Option<usize>> {
    for p in t.states() {
        let shift = lambda(t, p)?;
        if u.states().all(|q| agree(t, p, u, q, &shift).is_some()) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn coherence_sample(random: usize) -> Result<(Vec<Transducer>, Vec<GroupElement>)> {
    let mut machines = Vec::new();
    let mut elements = Vec::new();
    for n in [2, 3] {
        for t in [gen_identity(n), gen_r(n)] {
            elements.push(GroupElement::new(t.clone())?);
            machines.push(t);
        }
    }
    for t in [gen_b(3, 1)?, gen_c(3, 1)?] {
        elements.push(GroupElement::new(t.clone())?);
        machines.push(t);
    }
    for i in 0..random as u64 {
        let n = 2 + (i % 2) as usize;
        let states = 1 + (i / 2 % 5) as usize;
        machines.push(random_valid_transducer(0xc0ffee ^ i, n, states, 2));
    }
    Ok((machines, elements))
}

/// minimize, product and inverse against direct evaluation on every input
/// of length 8.
pub fn verify_oracle_coherence(random: usize) -> SuiteResult {
    timed("oracle-coherence", |r| {
        let (machines, elements) = match coherence_sample(random) {
            Ok(s) => s,
            Err(e) => {
                r.check("build sample", || Err(e));
                return;
            }
        };
        r.check(format!("minimize agrees on {} machines", machines.len()), || {
            let mut skipped = 0;
            for t in &machines {
                let Ok((m, map)) = minimize_with_map(t) else {
                    skipped += 1;
                    continue;
                };
                for q in t.states() {
                    let shift = lambda(t, q)?;
                    if let Some(w) = agree(t, q, &m, map[q], &shift) {
                        return Ok((false, format!("{t:?} state {q} on {w}")));
                    }
                }
            }
            Ok((
                skipped < machines.len(),
                format!("{skipped} without clopen images skipped"),
            ))
        });
        r.check("raw products agree with composition", || {
            for pair in machines.windows(2) {
                let (t, u) = (&pair[0], &pair[1]);
                if t.alphabet_size() != u.alphabet_size() {
                    continue;
                }
                let p = t.product(u)?;
                let alph = Alphabet::new(t.alphabet_size())?;
                for w in alph.words_of_len(ORACLE_DEPTH) {
                    for s in t.states() {
                        let (_, o) = t.run(s, &w);
                        let expected = u.run(0, &o).1;
                        if p.run(s * u.num_states(), &w).1 != expected {
                            return Ok((false, format!("{t:?} then {u:?} on {w}")));
                        }
                    }
                }
            }
            Ok((true, String::new()))
        });
        r.check("group products agree with the core of the raw product", || {
            for t in &elements {
                for u in &elements {
                    if t.alphabet_size() != u.alphabet_size() {
                        continue;
                    }
                    let raw = t.rep().product(u.rep())?;
                    let keep = core_states(&raw)?;
                    let (c, _) = raw.restrict_to(&keep)?;
                    let g = group_product(t, u)?;
                    if let Some(q) = unmatched_state(&c, g.rep())? {
                        return Ok((false, format!("core state {q} has no counterpart")));
                    }
                }
            }
            Ok((true, format!("{} pairs", elements.len() * elements.len())))
        });
        r.check("inverses undo their elements", || {
            for t in &elements {
                let inv = inverse(t)?;
                let raw = t.rep().product(inv.rep())?;
                let id = Transducer::identity(t.alphabet_size());
                for s in core_states(&raw)? {
                    if let Some(w) = agree(&raw, s, &id, 0, &lambda(&raw, s)?) {
                        return Ok((false, format!("core state {s} moves {w}")));
                    }
                }
            }
            Ok((true, String::new()))
        });
    })
}

/// All suites at the default desk-scale parameters, except the enumeration.
pub fn run_all() -> SuiteResult {
    timed("all", |r| {
        for n in [4, 6, 8, 9] {
            r.merge(verify_tl_group(n));
        }
        for (n, x) in [(3, 1), (4, 1), (4, 2)] {
            r.merge(verify_f_relations(n, x));
        }
        r.merge(verify_inverse_roundtrip());
        r.merge(verify_pi_hom(4));
        r.merge(verify_invariant_hom());
    })
}
