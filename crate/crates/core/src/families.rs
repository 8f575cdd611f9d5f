//! Explicit generators: the identity, the reversal `R`, the elements
//! `T(d, e)`, and the two machines `B` and `C` whose restrictions generate a
//! copy of Thompson's group F.

use crate::error::{Error, Result};
use crate::group::{group_product, inverse, GroupElement};
use crate::minimize::compose_initial;
use crate::transducer::{InitialTransducer, Transducer};
use crate::words::{Letter, Word};

pub fn gen_identity(n: usize) -> Transducer {
    Transducer::identity(n)
}

/// `a ↦ n-1-a`.
pub fn gen_r(n: usize) -> Transducer {
    let top = (n - 1) as Letter;
    Transducer::from_fn(n, 1, |_, a| (0, Word::letter(top - a)))
        .expect("n >= 2")
        .with_names(vec!["R".into()])
        .unwrap()
}

/// `T(d, e)` over `X_{de}`: letter `a d + b` read in `q_j` moves to `q_b`
/// and writes `j e + a`.
pub fn tde(n: usize, d: usize, e: usize) -> Result<Transducer> {
    if d == 0 || e == 0 || d * e != n {
        return Err(Error::Precondition(format!("d·e = {d}·{e} is not {n}")));
    }
    Transducer::from_fn(n, d, |j, i| {
        let (a, b) = (i as usize / d, i as usize % d);
        (b, Word::letter((j * e + a) as Letter))
    })?
    .with_names((0..d).map(|j| format!("q{j}")).collect())
}

fn check_bc(n: usize, x: usize) -> Result<()> {
    if n < 3 || x == 0 || x > n - 2 {
        return Err(Error::Precondition(format!(
            "need n >= 3 and 1 <= x <= n-2, got n={n}, x={x}"
        )));
    }
    Ok(())
}

fn word(letters: &[usize]) -> Word {
    Word::from_letters(letters.iter().map(|&a| a as Letter))
}

/// Edge list: for each state, the edge taken by 0, by a middle
/// letter `y`, and by `n-1`.
type Schema = fn(usize, usize) -> (usize, Word);

fn build(n: usize, names: &[&str], rows: &[[Schema; 3]]) -> Result<Transducer> {
    let top = n - 1;
    Transducer::from_fn(n, names.len(), |q, a| {
        let a = a as usize;
        let which = if a == 0 {
            0
        } else if a == top {
            2
        } else {
            1
        };
        rows[q][which](a, top)
    })?
    .with_names(names.iter().map(|s| s.to_string()).collect())
}

/// The machine `B` on states `p, q, s, t`. Every middle letter follows the
/// drawn `x`-edges with that letter substituted.
pub fn gen_b(n: usize, x: usize) -> Result<Transducer> {
    check_bc(n, x)?;
    // states: p=0, q=1, s=2, t=3
    let rows: [[Schema; 3]; 4] = [
        [
            |_, _| (1, word(&[0])),
            |y, _| (0, word(&[y])),
            |_, m| (2, word(&[m])),
        ],
        [
            |_, _| (3, word(&[])),
            |y, m| (0, word(&[m, y])),
            |_, m| (2, word(&[m, m])),
        ],
        [
            |_, _| (2, word(&[0])),
            |y, _| (0, word(&[y])),
            |_, m| (2, word(&[m])),
        ],
        [
            |_, _| (2, word(&[0])),
            |y, _| (0, word(&[y])),
            |_, m| (2, word(&[m, 0])),
        ],
    ];
    build(n, &["p", "q", "s", "t"], &rows)
}

/// The machine `C` on states `p, q, t, s, t1`.
pub fn gen_c(n: usize, x: usize) -> Result<Transducer> {
    check_bc(n, x)?;
    // states: p=0, q=1, t=2, s=3, t1=4
    let rows: [[Schema; 3]; 5] = [
        [
            |_, _| (1, word(&[0])),
            |y, _| (0, word(&[y])),
            |_, m| (3, word(&[m])),
        ],
        [
            |_, _| (2, word(&[0])),
            |y, _| (0, word(&[y])),
            |_, m| (3, word(&[m])),
        ],
        [
            |_, _| (4, word(&[])),
            |y, m| (0, word(&[m, y])),
            |_, m| (3, word(&[m, m])),
        ],
        [
            |_, _| (3, word(&[0])),
            |y, _| (0, word(&[y])),
            |_, m| (3, word(&[m])),
        ],
        [
            |_, _| (3, word(&[0])),
            |y, _| (0, word(&[y])),
            |_, m| (3, word(&[m, 0])),
        ],
    ];
    build(n, &["p", "q", "t", "s", "t1"], &rows)
}

/// Which generator to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Identity { n: usize },
    R { n: usize },
    Tde { n: usize, d: usize, e: usize },
    B { n: usize, x: usize },
    C { n: usize, x: usize },
}

impl FamilySpec {
    pub fn build(self) -> Result<Transducer> {
        match self {
            FamilySpec::Identity { n } => {
                crate::words::Alphabet::new(n)?;
                Ok(gen_identity(n))
            }
            FamilySpec::R { n } => {
                crate::words::Alphabet::new(n)?;
                Ok(gen_r(n))
            }
            FamilySpec::Tde { n, d, e } => tde(n, d, e),
            FamilySpec::B { n, x } => gen_b(n, x),
            FamilySpec::C { n, x } => gen_c(n, x),
        }
    }

    pub fn element(self) -> Result<GroupElement> {
        GroupElement::new(self.build()?)
    }
}

/// Result of [`order_of`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(usize),
    AtLeast(usize),
}

/// Least `k ≤ max_order` with `T^k = id`.
pub fn order_of(t: &GroupElement, max_order: usize) -> Result<Order> {
    let mut power = t.clone();
    for k in 1..=max_order {
        if power.is_identity() {
            return Ok(Order::Finite(k));
        }
        if k < max_order {
            power = group_product(&power, t)?;
        }
    }
    Ok(Order::AtLeast(max_order))
}

/// Outcome of the Thompson relator checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelatorReport {
    pub first_relator_trivial: bool,
    pub second_relator_trivial: bool,
    /// `[A, B] = id`.
    pub degenerate: bool,
    /// The same three checks for the restrictions to `{0, n-1}`, when run.
    pub restricted: Option<(bool, bool, bool)>,
}

impl RelatorReport {
    pub fn relators_hold(&self) -> bool {
        self.first_relator_trivial
            && self.second_relator_trivial
            && self.restricted.is_none_or(|(a, b, _)| a && b)
    }

    pub fn non_degenerate(&self) -> bool {
        !self.degenerate && self.restricted.is_none_or(|(_, _, d)| !d)
    }
}

// Relator words are read as composites of maps: `x y` applies `y` first.
fn mul(x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
    group_product(y, x)
}

fn mul_initial(x: &InitialTransducer, y: &InitialTransducer) -> Result<InitialTransducer> {
    compose_initial(y, x)
}

/// Evaluates the two relators and `[a, b]` given a product and an inverse.
fn relators<T: Clone>(
    a: &T,
    b: &T,
    mul: impl Fn(&T, &T) -> Result<T>,
    inv: impl Fn(&T) -> Result<T>,
    trivial: impl Fn(&T) -> bool,
) -> Result<(bool, bool, bool)> {
    let ai = inv(a)?;
    let bi = inv(b)?;
    // [x, y] = x^-1 y^-1 x y
    let comm = |x: &T, y: &T| -> Result<T> {
        let l = mul(&inv(x)?, &inv(y)?)?;
        mul(&mul(&l, x)?, y)
    };
    let ab = mul(a, &bi)?;
    let conj1 = mul(&mul(&ai, b)?, a)?;
    let ai2 = mul(&ai, &ai)?;
    let a2 = mul(a, a)?;
    let conj2 = mul(&mul(&ai2, b)?, &a2)?;
    Ok((
        trivial(&comm(&ab, &conj1)?),
        trivial(&comm(&ab, &conj2)?),
        trivial(&comm(a, b)?),
    ))
}

/// The two defining relators of F in the generators `A`, `B`:
/// `[A B^{-1}, A^{-1} B A]` and `[A B^{-1}, A^{-2} B A^2]`, plus `[A, B]`.
pub fn f_relator_check(a: &GroupElement, b: &GroupElement) -> Result<RelatorReport> {
    let (first, second, degenerate) = relators(a, b, mul, inverse, GroupElement::is_identity)?;
    Ok(RelatorReport {
        first_relator_trivial: first,
        second_relator_trivial: second,
        degenerate,
        restricted: None,
    })
}

fn initial_is_identity(t: &InitialTransducer) -> bool {
    t.base.num_states() == 1 && t.base.is_identity()
}

/// The relator checks on initial machines, composed with [`compose_initial`].
pub fn f_relator_check_initial(a: &InitialTransducer, b: &InitialTransducer) -> Result<(bool, bool, bool)> {
    relators(
        a,
        b,
        mul_initial,
        crate::group::initial_inverse,
        initial_is_identity,
    )
}

/// Relators for `B` and `C` over `X_n`, and for their restrictions at `p` to
/// the letters `{0, n-1}`.
pub fn bc_relator_check(n: usize, x: usize) -> Result<RelatorReport> {
    let b = gen_b(n, x)?;
    let c = gen_c(n, x)?;
    let mut report = f_relator_check(&GroupElement::new(b.clone())?, &GroupElement::new(c.clone())?)?;
    let letters = [0, (n - 1) as Letter];
    let rb = crate::group::restrict(&b, b.state_by_name("p").unwrap(), &letters)?;
    let rc = crate::group::restrict(&c, c.state_by_name("p").unwrap(), &letters)?;
    report.restricted = Some(f_relator_check_initial(&rb, &rc)?);
    Ok(report)
}
