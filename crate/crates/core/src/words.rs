//! Finite and eventually periodic words over `X_n = {0, .., n-1}`.
//!
//! Finite words order lexicographically through `Ord` (a proper prefix sorts
//! first); [`shortlex_cmp`] gives the short-lex order. Points of Cantor space
//! that arise in this crate are all eventually periodic and are represented by
//! [`EpWord`] in a canonical form, so equality of points is structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

pub type Letter = u8;

/// Size of the alphabet `X_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=256).contains(&n) {
            return Err(Error::BadAlphabet(n));
        }
        Ok(Alphabet(n))
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..self.0).map(|a| a as Letter)
    }

    /// All words of length exactly `len`, in lexicographic order.
    pub fn words_of_len(self, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * self.0);
            for w in &out {
                for a in self.letters() {
                    next.push(w.with(a));
                }
            }
            out = next;
        }
        out
    }
}

/// A finite word.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word(letters.into_iter().collect())
    }

    pub fn letter(a: Letter) -> Self {
        Word(vec![a])
    }

    pub fn repeat_letter(a: Letter, k: usize) -> Self {
        Word(vec![a; k])
    }

    pub fn as_slice(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Letter> {
        self.0
    }

    pub fn pop(&mut self) -> Option<Letter> {
        self.0.pop()
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn extend_from(&mut self, other: &[Letter]) {
        self.0.extend_from_slice(other);
    }

    /// `self` followed by the single letter `a`.
    pub fn with(&self, a: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(a);
        Word(v)
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn pow(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn is_prefix_of(&self, other: &[Letter]) -> bool {
        other.starts_with(&self.0)
    }

    /// `y - x`: the remainder of `self` after the prefix `x`, if `x` is a prefix.
    pub fn minus_prefix(&self, x: &[Letter]) -> Option<Word> {
        self.0.strip_prefix(x).map(|r| Word(r.to_vec()))
    }

    pub fn slice(&self, from: usize) -> Word {
        Word(self.0[from..].to_vec())
    }

    pub fn max_letter(&self) -> Option<Letter> {
        self.0.iter().copied().max()
    }

    /// Textual form for an alphabet of size `n`: a digit string when `n <= 10`,
    /// comma-separated integers otherwise.
    pub fn to_text(&self, n: usize) -> String {
        if n <= 10 {
            self.0.iter().map(|&a| char::from(b'0' + a)).collect()
        } else {
            self.0.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    /// Parses the textual form produced by [`Word::to_text`].
    pub fn parse(s: &str, n: usize) -> Result<Word> {
        let s = s.trim();
        let mut letters = Vec::new();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        if n <= 10 && !s.contains(',') {
            for ch in s.chars() {
                let d = ch.to_digit(10).ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("bad letter {ch:?} in word {s:?}"),
                })? as usize;
                letters.push(check_letter(d, n)?);
            }
        } else {
            for part in s.split(',') {
                let d: usize = part.trim().parse().map_err(|_| Error::Parse {
                    line: 0,
                    msg: format!("bad letter {part:?} in word {s:?}"),
                })?;
                letters.push(check_letter(d, n)?);
            }
        }
        Ok(Word(letters))
    }

    pub fn check_alphabet(&self, n: usize) -> Result<()> {
        for &a in &self.0 {
            check_letter(a as usize, n)?;
        }
        Ok(())
    }
}

fn check_letter(d: usize, n: usize) -> Result<Letter> {
    if d >= n {
        Err(Error::LetterOutOfRange { letter: d, n })
    } else {
        Ok(d as Letter)
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let wide = self.0.iter().any(|&a| a >= 10);
        f.write_str(&self.to_text(if wide { 11 } else { 10 }))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Longest common prefix of a nonempty collection of words.
pub fn lcp<'a, I>(words: I) -> Result<Word>
where
    I: IntoIterator<Item = &'a [Letter]>,
{
    let mut iter = words.into_iter();
    let first = iter.next().ok_or(Error::Empty("lcp of an empty set"))?;
    let mut len = first.len();
    for w in iter {
        len = common_prefix_len(&first[..len], w);
    }
    Ok(Word(first[..len].to_vec()))
}

pub fn common_prefix_len(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// True when one of the two words is a prefix of the other.
pub fn prefix_comparable(a: &[Letter], b: &[Letter]) -> bool {
    common_prefix_len(a, b) == a.len().min(b.len())
}

/// Short-lex order: shorter words first, equal lengths lexicographically.
pub fn shortlex_cmp(x: &[Letter], y: &[Letter]) -> Ordering {
    x.len().cmp(&y.len()).then_with(|| x.cmp(y))
}

/// `w` decomposed as `p^k` with `p` prime and `k` maximal.
pub fn primitive_root(w: &[Letter]) -> Result<(Word, usize)> {
    if w.is_empty() {
        return Err(Error::Empty("primitive root of the empty word"));
    }
    let len = w.len();
    for d in 1..=len {
        if len.is_multiple_of(d) && (d..len).all(|i| w[i] == w[i - d]) {
            return Ok((Word(w[..d].to_vec()), len / d));
        }
    }
    unreachable!("the full length always divides itself")
}

/// A word is prime when it is not a proper power of a shorter word.
pub fn is_prime_word(w: &[Letter]) -> Result<bool> {
    Ok(primitive_root(w)?.1 == 1)
}

/// The equivalence class of a prime word under rotation, represented by its
/// lexicographically least rotation (a Lyndon word).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RotationClass {
    canonical: Word,
}

impl RotationClass {
    pub fn canonical(&self) -> &Word {
        &self.canonical
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }
}

impl Ord for RotationClass {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex_cmp(&self.canonical, &other.canonical)
    }
}

impl PartialOrd for RotationClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RotationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.canonical)
    }
}

fn least_rotation(w: &[Letter]) -> Word {
    let len = w.len();
    let mut best: Vec<Letter> = w.to_vec();
    for j in 1..len {
        let rot: Vec<Letter> = w[j..].iter().chain(&w[..j]).copied().collect();
        if rot < best {
            best = rot;
        }
    }
    Word(best)
}

pub fn rotation_canonical(w: &[Letter]) -> Result<RotationClass> {
    if !is_prime_word(w)? {
        return Err(Error::Precondition(format!(
            "{} is not a prime word",
            Word::from(w)
        )));
    }
    Ok(RotationClass {
        canonical: least_rotation(w),
    })
}

/// Rotation class of the primitive root of a nonempty word.
pub fn rotation_class_of_root(w: &[Letter]) -> Result<RotationClass> {
    let (root, _) = primitive_root(w)?;
    rotation_canonical(&root)
}

/// Every rotation class of prime words of length at most `max_len`, sorted
/// short-lex by representative. Generated as Lyndon words (Duval's algorithm).
pub fn enumerate_rotation_classes(n: usize, max_len: usize) -> Vec<RotationClass> {
    let mut out = Vec::new();
    if max_len == 0 || n == 0 {
        return out;
    }
    let top = (n - 1) as Letter;
    let mut w: Vec<Letter> = vec![0];
    loop {
        out.push(RotationClass {
            canonical: Word(w.clone()),
        });
        let m = w.len();
        while w.len() < max_len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out.sort();
    out
}

/// An eventually periodic point `pre · period^ω` of Cantor space, kept in
/// canonical form: the period is primitive and the preperiod is as short as
/// possible.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EpWord {
    pre: Word,
    period: Word,
}

impl EpWord {
    pub fn new(pre: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Empty("period of an eventually periodic word"));
        }
        let (mut period, _) = primitive_root(&period)?;
        let mut pre = pre.into_vec();
        while let (Some(&p), Some(&q)) = (pre.last(), period.last()) {
            if p != q {
                break;
            }
            pre.pop();
            let mut rot = Vec::with_capacity(period.len());
            rot.push(q);
            rot.extend_from_slice(&period[..period.len() - 1]);
            period = Word(rot);
        }
        Ok(EpWord {
            pre: Word(pre),
            period,
        })
    }

    /// The constant sequence `a^ω`.
    pub fn constant(a: Letter) -> Self {
        EpWord {
            pre: Word::empty(),
            period: Word::letter(a),
        }
    }

    pub fn pre(&self) -> &Word {
        &self.pre
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word((0..len).map(|i| self.letter_at(i)).collect())
    }

    /// `w · self`.
    pub fn prepend(&self, w: &[Letter]) -> EpWord {
        EpWord::new(Word::from(w).concat(&self.pre), self.period.clone()).expect("period stays nonempty")
    }

    /// Lexicographic comparison of the two points.
    pub fn lex_cmp(&self, other: &EpWord) -> Ordering {
        let horizon = self.pre.len().max(other.pre.len()) + lcm(self.period.len(), other.period.len());
        for i in 0..horizon {
            match self.letter_at(i).cmp(&other.letter_at(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    pub fn parse(s: &str, n: usize) -> Result<EpWord> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing '(' in {s:?}"),
        })?;
        let close = s
            .rfind(')')
            .filter(|&c| c == s.len() - 1)
            .ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("missing trailing ')' in {s:?}"),
            })?;
        let pre = Word::parse(&s[..open], n)?;
        let period = Word::parse(&s[open + 1..close], n)?;
        EpWord::new(pre, period)
    }

    pub fn to_text(&self, n: usize) -> String {
        format!("{}({})", self.pre.to_text(n), self.period.to_text(n))
    }
}

impl fmt::Display for EpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre = if self.pre.is_empty() {
            String::new()
        } else {
            self.pre.to_string()
        };
        write!(f, "{}({})", pre, self.period)
    }
}

impl fmt::Debug for EpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpWord({self})")
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Identification of points of `X_n^ω` that name the same point of the unit
/// interval: `w i (n-1)^ω ≃ w (i+1) 0^ω`.
pub fn circle_equal(x: &EpWord, y: &EpWord, n: usize) -> bool {
    x == y || carry_pair(x, y, n) || carry_pair(y, x, n)
}

fn carry_pair(x: &EpWord, y: &EpWord, n: usize) -> bool {
    let top = (n - 1) as Letter;
    if x.period.as_slice() != [top] || y.period.as_slice() != [0] {
        return false;
    }
    let (xp, yp) = (x.pre.as_slice(), y.pre.as_slice());
    match (xp.split_last(), yp.split_last()) {
        (Some((&i, w)), Some((&j, v))) => w == v && i < top && j == i + 1,
        _ => false,
    }
}
