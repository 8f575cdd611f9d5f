//! The `.tdr` text format and GraphViz export.
//!
//! ```text
//! alphabet 3
//! initial p
//! state p
//! 0 -> q | 0
//! 1 -> p | 1
//! 2 -> s | 2
//! ...
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::transducer::{InitialTransducer, StateId, Transducer};
use crate::words::{Letter, Word};

/// A parsed `.tdr` document: a machine and its optional initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdrDocument {
    pub transducer: Transducer,
    pub initial: Option<StateId>,
}

impl TdrDocument {
    pub fn into_initial(self) -> Result<InitialTransducer> {
        let q = self.initial.unwrap_or(0);
        InitialTransducer::new(self.transducer, q)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct RawEdge {
    line: usize,
    target: String,
    output: Word,
}

pub fn parse_tdr(text: &str) -> Result<TdrDocument> {
    let mut n: Option<usize> = None;
    let mut initial: Option<(usize, String)> = None;
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, StateId> = HashMap::new();
    let mut edges: Vec<Vec<Option<RawEdge>>> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let Some(n) = n else {
            let mut parts = content.split_whitespace();
            if parts.next() != Some("alphabet") {
                return Err(parse_err(line, "expected 'alphabet <n>'"));
            }
            let value = parts
                .next()
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| parse_err(line, "bad alphabet size"))?;
            if !(2..=256).contains(&value) || parts.next().is_some() {
                return Err(parse_err(line, "bad alphabet size"));
            }
            n = Some(value);
            continue;
        };
        if let Some(rest) = content.strip_prefix("initial ") {
            let name = rest.trim();
            if !valid_name(name) {
                return Err(parse_err(line, format!("bad state name '{name}'")));
            }
            if initial.is_some() {
                return Err(parse_err(line, "duplicate 'initial' line"));
            }
            initial = Some((line, name.to_string()));
            continue;
        }
        if let Some(rest) = content.strip_prefix("state ") {
            let name = rest.trim();
            if !valid_name(name) {
                return Err(parse_err(line, format!("bad state name '{name}'")));
            }
            if index.contains_key(name) {
                return Err(parse_err(line, format!("duplicate state '{name}'")));
            }
            index.insert(name.to_string(), names.len());
            names.push(name.to_string());
            edges.push((0..n).map(|_| None).collect());
            continue;
        }
        let Some(current) = edges.last_mut() else {
            return Err(parse_err(line, "edge before any 'state' line"));
        };
        let (lhs, rhs) = content
            .split_once("->")
            .ok_or_else(|| parse_err(line, "expected '<letter> -> <state> | <output>'"))?;
        let (target, output) = rhs
            .split_once('|')
            .ok_or_else(|| parse_err(line, "missing '|' before output"))?;
        let letter: usize = lhs
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("bad letter '{}'", lhs.trim())))?;
        if letter >= n {
            return Err(parse_err(line, format!("letter {letter} outside alphabet {n}")));
        }
        let target = target.trim();
        if !valid_name(target) {
            return Err(parse_err(line, format!("bad state name '{target}'")));
        }
        let output = output.trim();
        let output = if output == "-" {
            Word::empty()
        } else if output.is_empty() {
            return Err(parse_err(line, "empty output must be written '-'"));
        } else {
            Word::parse(output, n).map_err(|e| parse_err(line, e.to_string()))?
        };
        if current[letter].is_some() {
            return Err(parse_err(line, format!("duplicate edge for letter {letter}")));
        }
        current[letter] = Some(RawEdge {
            line,
            target: target.to_string(),
            output,
        });
    }

    let n = n.ok_or_else(|| parse_err(1, "missing 'alphabet' line"))?;
    if names.is_empty() {
        return Err(parse_err(text.lines().count().max(1), "no states"));
    }
    let mut rows = Vec::with_capacity(names.len());
    for (q, row) in edges.into_iter().enumerate() {
        let mut out_row = Vec::with_capacity(n);
        for (a, edge) in row.into_iter().enumerate() {
            let edge = edge
                .ok_or_else(|| parse_err(0, format!("state '{}' missing edge for letter {a}", names[q])))?;
            let t = *index
                .get(&edge.target)
                .ok_or_else(|| parse_err(edge.line, format!("unknown state '{}'", edge.target)))?;
            out_row.push((t, edge.output));
        }
        rows.push(out_row);
    }
    let initial = match initial {
        None => None,
        Some((line, name)) => Some(
            *index
                .get(&name)
                .ok_or_else(|| parse_err(line, format!("unknown initial state '{name}'")))?,
        ),
    };
    let transducer = Transducer::from_rows(n, rows)?.with_names(names)?;
    Ok(TdrDocument { transducer, initial })
}

fn output_text(w: &Word, n: usize) -> String {
    if w.is_empty() {
        "-".to_string()
    } else {
        w.to_text(n)
    }
}

pub fn print_tdr(t: &Transducer, initial: Option<StateId>) -> String {
    let n = t.alphabet_size();
    let mut s = String::new();
    writeln!(s, "alphabet {n}").unwrap();
    if let Some(q) = initial {
        writeln!(s, "initial {}", t.name(q)).unwrap();
    }
    for q in t.states() {
        writeln!(s, "state {}", t.name(q)).unwrap();
        for a in t.letters() {
            writeln!(
                s,
                "{a} -> {} | {}",
                t.name(t.next(q, a)),
                output_text(t.output(q, a), n)
            )
            .unwrap();
        }
    }
    s
}

/// GraphViz rendering, one edge per (letter, state), edges sorted by
/// source, letter.
pub fn to_dot(t: &Transducer, initial: Option<StateId>) -> String {
    let n = t.alphabet_size();
    let mut s = String::from("digraph transducer {\n  rankdir=LR;\n");
    for q in t.states() {
        let shape = if Some(q) == initial {
            "doublecircle"
        } else {
            "circle"
        };
        writeln!(s, "  \"{}\" [shape={shape}];", t.name(q)).unwrap();
    }
    for q in t.states() {
        for a in t.letters() {
            writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}|{}\"];",
                t.name(q),
                t.name(t.next(q, a)),
                letter_text(a, n),
                output_text(t.output(q, a), n)
            )
            .unwrap();
        }
    }
    s.push_str("}\n");
    s
}

fn letter_text(a: Letter, n: usize) -> String {
    Word::letter(a).to_text(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn round_trip_families() {
        for t in [
            families::gen_identity(3),
            families::gen_r(2),
            families::tde(6, 3, 2).unwrap(),
            families::gen_b(3, 1).unwrap(),
            families::gen_c(4, 2).unwrap(),
            families::tde(12, 3, 4).unwrap(),
        ] {
            let text = print_tdr(&t, Some(0));
            let doc = parse_tdr(&text).unwrap();
            assert_eq!(doc.transducer, t);
            assert_eq!(doc.initial, Some(0));
        }
    }

    #[test]
    fn parses_comments_and_epsilon() {
        let doc = parse_tdr(
            "# a machine\nalphabet 2\n\nstate a  # first\n0 -> b | -\n1 -> a | 1\nstate b\n0 -> a | 00\n1 -> b | 10\n",
        )
        .unwrap();
        let t = doc.transducer;
        assert_eq!(t.num_states(), 2);
        assert!(t.output(0, 0).is_empty());
        assert_eq!(t.output(1, 0).as_slice(), &[0, 0]);
        assert_eq!(doc.initial, None);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_tdr("alphabet 2\nstate a\n0 -> a | 0\n1 -> z | 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = parse_tdr("alphabet 2\nstate a\n0 -> a | 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_tdr("alphabet x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_tdr("alphabet 2\n0 -> a | 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_tdr("alphabet 2\nstate a\n0 -> a | 0\n").is_err());
    }

    #[test]
    fn dot_lists_every_edge() {
        let b = families::gen_b(3, 1).unwrap();
        let dot = to_dot(&b, None);
        assert_eq!(dot.matches("->").count(), 12);
        assert!(dot.contains("\"q\" -> \"t\" [label=\"0|-\"]"));
    }
}
