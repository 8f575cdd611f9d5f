use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use thn::cantor::analyze;
use thn::enumeration::EnumBounds;
use thn::families::FamilySpec;
use thn::format::{parse_tdr, print_tdr, to_dot, TdrDocument};
use thn::group::{self, group_product, inverse, GroupElement, Membership, Truth};
use thn::invariants::invariant_report;
use thn::marker::{gen_marker_code, marker_embed};
use thn::minimize::{minimize, minimize_initial};
use thn::suites::{self, SuiteResult};
use thn::sync::{core, default_max_level, sync_level};
use thn::{Error, Letter, Result, Transducer};

#[derive(Parser)]
#[command(
    name = "thn",
    version,
    about = "Transducers as rational homeomorphisms of Cantor space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a .tdr file and report its size.
    Parse { file: String },
    /// Reprint a .tdr file in normal layout.
    Print {
        file: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// GraphViz DOT rendering.
    Render {
        file: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Minimal form (initial when the file names an initial state).
    Minimize {
        file: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Core of a synchronizing machine.
    Core {
        file: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Strong synchronization level.
    SyncLevel {
        file: String,
        #[arg(long)]
        max_k: Option<usize>,
        /// Also print the forced state of every word of that length.
        #[arg(long)]
        table: bool,
    },
    /// Per-state image, injectivity, extremes and order class.
    Analyze { file: String },
    /// Membership predicate.
    Check {
        file: String,
        #[arg(long, value_enum)]
        predicate: Predicate,
        #[arg(long)]
        x: Option<Letter>,
    },
    /// Group product, applying A first.
    Product {
        a: String,
        b: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Inverse element.
    Inverse {
        file: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// m, s, per-state cone counts and the Π table.
    Invariants {
        file: String,
        #[arg(long, default_value_t = 5)]
        pi_depth: usize,
    },
    /// Build a generator.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        e: Option<usize>,
        #[arg(long)]
        x: Option<usize>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Marker image of an element over X_m.
    MarkerEmbed {
        file: String,
        #[arg(long)]
        x: Letter,
        #[arg(long)]
        m: usize,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Marker code for n letters over X_m.
    MarkerCode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Restriction of a state to a sub-alphabet.
    Restrict {
        file: String,
        #[arg(long)]
        state: String,
        /// Comma-separated letters, e.g. 0,2.
        #[arg(long, value_delimiter = ',')]
        letters: Vec<Letter>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Exit 0 iff the element is the identity.
    IsIdentity { file: String },
    /// Verification suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Predicate {
    Son,
    On,
    Sln,
    Ln,
    Ton,
    Tln,
    Onx,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Id,
    R,
    Tde,
    B,
    C,
}

#[derive(Subcommand)]
enum Suite {
    TlGroup {
        #[arg(long)]
        n: usize,
    },
    FRelations {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: usize,
    },
    To2Enum {
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        outlen: usize,
        #[arg(long, default_value_t = 4)]
        sync: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    Marker {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        x: usize,
    },
    InverseRoundtrip,
    PiHom {
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    InvariantHom,
    OracleCoherence {
        #[arg(long, default_value_t = 200)]
        random: usize,
    },
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn load(path: &str) -> Result<TdrDocument> {
    parse_tdr(&read_input(path)?)
}

fn load_element(path: &str) -> Result<GroupElement> {
    GroupElement::new(load(path)?.transducer)
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_machine(t: &Transducer, initial: Option<usize>, out: &Option<PathBuf>) -> Result<()> {
    emit(&print_tdr(t, initial), out)
}

fn membership_code(m: &Membership) -> u8 {
    match m.value {
        Truth::True => {
            println!("true");
            0
        }
        Truth::False => {
            println!("false");
            for r in &m.reasons {
                println!("  {r}");
            }
            1
        }
        Truth::Unknown => {
            println!("unknown");
            for r in &m.reasons {
                println!("  {r}");
            }
            2
        }
    }
}

fn suite_code(r: &SuiteResult) -> u8 {
    println!("{r}");
    r.exit_code() as u8
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Parse { file } => {
            let doc = load(&file)?;
            let t = &doc.transducer;
            println!("alphabet {} states {}", t.alphabet_size(), t.num_states());
            if let Err(v) = t.validate() {
                println!("invalid: {v}");
                return Ok(1);
            }
            Ok(0)
        }
        Command::Print { file, o } => {
            let doc = load(&file)?;
            emit_machine(&doc.transducer, doc.initial, &o)?;
            Ok(0)
        }
        Command::Render { file, o } => {
            let doc = load(&file)?;
            emit(&to_dot(&doc.transducer, doc.initial), &o)?;
            Ok(0)
        }
        Command::Minimize { file, o } => {
            let doc = load(&file)?;
            match doc.initial {
                Some(_) => {
                    let m = minimize_initial(&doc.into_initial()?)?;
                    emit_machine(&m.base, Some(m.initial), &o)?;
                }
                None => emit_machine(&minimize(&doc.transducer)?, None, &o)?,
            }
            Ok(0)
        }
        Command::Core { file, o } => {
            emit_machine(&core(&load(&file)?.transducer)?, None, &o)?;
            Ok(0)
        }
        Command::SyncLevel { file, max_k, table } => {
            let t = load(&file)?.transducer;
            let k = max_k.unwrap_or_else(|| default_max_level(&t));
            match sync_level(&t, k) {
                Some(cert) => {
                    println!("level {}", cert.level);
                    if table {
                        for (w, q) in cert.forced_table(&t)? {
                            println!("{}\t{}", w.to_text(t.alphabet_size()), t.name(q));
                        }
                    }
                    Ok(0)
                }
                None => {
                    println!("not synchronizing within level {k}");
                    Ok(1)
                }
            }
        }
        Command::Analyze { file } => {
            let t = load(&file)?.transducer;
            let n = t.alphabet_size();
            println!("state\tcones\tantichain\tinjective\thomeo\tmin\tmax\torder");
            for s in analyze(&t)? {
                let words: Vec<String> = s
                    .image
                    .words()
                    .iter()
                    .map(|w| {
                        if w.is_empty() {
                            "-".to_string()
                        } else {
                            w.to_text(n)
                        }
                    })
                    .collect();
                let injective = match s.injective {
                    thn::cantor::Injectivity::Yes => "yes".to_string(),
                    thn::cantor::Injectivity::No { .. } => "no".to_string(),
                    thn::cantor::Injectivity::Unknown => "unknown".to_string(),
                };
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    t.name(s.state),
                    s.image.len(),
                    words.join(","),
                    injective,
                    s.homeomorphism_state,
                    s.leftmost.to_text(n),
                    s.rightmost.to_text(n),
                    s.order.as_str()
                );
            }
            Ok(0)
        }
        Command::Check { file, predicate, x } => {
            let t = load(&file)?.transducer;
            let m = match predicate {
                Predicate::Son => group::in_son(&t),
                Predicate::On => group::in_on(&t),
                Predicate::Sln => group::in_sln(&t),
                Predicate::Ln => group::in_ln(&t),
                Predicate::Ton => group::in_ton(&t),
                Predicate::Tln => group::in_tln(&t),
                Predicate::Onx => {
                    let x = x.ok_or_else(|| Error::Precondition("--x is required for onx".into()))?;
                    group::in_onx(&t, x)
                }
            };
            Ok(membership_code(&m))
        }
        Command::Product { a, b, o } => {
            let p = group_product(&load_element(&a)?, &load_element(&b)?)?;
            emit_machine(p.rep(), None, &o)?;
            Ok(0)
        }
        Command::Inverse { file, o } => {
            let inv = inverse(&load_element(&file)?)?;
            emit_machine(inv.rep(), None, &o)?;
            Ok(0)
        }
        Command::Invariants { file, pi_depth } => {
            let t = load_element(&file)?;
            let rep = invariant_report(&t, pi_depth)?;
            println!("m\t{}", rep.m);
            match &rep.s {
                Some(s) => println!("s\t{:?}\t{s}", s.exponents()),
                None => println!("s\tundefined"),
            }
            for (q, m) in rep.m_per_state.iter().enumerate() {
                println!("M\t{}\t{m}", t.rep().name(q));
            }
            let mut profile = std::collections::BTreeMap::new();
            for (c, img) in &rep.pi_table {
                *profile.entry(img.len()).or_insert(0usize) += 1;
                println!("pi\t{c}\t{img}");
            }
            for (len, count) in profile {
                println!("image-length\t{len}\t{count}");
            }
            Ok(0)
        }
        Command::Gen { kind, n, d, e, x, o } => {
            let need = |v: Option<usize>, flag: &str| {
                v.ok_or_else(|| Error::Precondition(format!("--{flag} is required")))
            };
            let spec = match kind {
                Kind::Id => FamilySpec::Identity { n },
                Kind::R => FamilySpec::R { n },
                Kind::Tde => FamilySpec::Tde {
                    n,
                    d: need(d, "d")?,
                    e: need(e, "e")?,
                },
                Kind::B => FamilySpec::B { n, x: need(x, "x")? },
                Kind::C => FamilySpec::C { n, x: need(x, "x")? },
            };
            emit_machine(&spec.build()?, None, &o)?;
            Ok(0)
        }
        Command::MarkerEmbed { file, x, m, o } => {
            let f = marker_embed(&load_element(&file)?, x, m)?;
            emit_machine(f.rep(), None, &o)?;
            Ok(0)
        }
        Command::MarkerCode { n, m } => {
            let code = gen_marker_code(n, m, n)?;
            for w in code.words() {
                println!("{}", w.to_text(m));
            }
            Ok(0)
        }
        Command::Restrict {
            file,
            state,
            letters,
            o,
        } => {
            let t = load(&file)?.transducer;
            let q = t
                .state_by_name(&state)
                .ok_or_else(|| Error::Precondition(format!("no state named {state}")))?;
            let r = group::restrict(&t, q, &letters)?;
            emit_machine(&r.base, Some(r.initial), &o)?;
            Ok(0)
        }
        Command::IsIdentity { file } => {
            let t = load_element(&file)?;
            let yes = t.is_identity();
            println!("{yes}");
            Ok(if yes { 0 } else { 1 })
        }
        Command::Verify { suite } => Ok(match suite {
            Suite::TlGroup { n } => suite_code(&suites::verify_tl_group(n)),
            Suite::FRelations { n, x } => suite_code(&suites::verify_f_relations(n, x)),
            Suite::To2Enum {
                states,
                outlen,
                sync,
                jobs,
            } => {
                let bounds = EnumBounds::new(2, states, outlen, sync)?;
                eprintln!(
                    "estimated machines before filtering: {:.0}",
                    bounds.estimated_count()
                );
                let (r, report) = suites::verify_to2_enum(&bounds, jobs);
                if let Some(rep) = report {
                    println!("{rep}\n");
                    for t in &rep.survivors {
                        println!("{}", print_tdr(t, None));
                    }
                }
                suite_code(&r)
            }
            Suite::Marker { n, m, x } => suite_code(&suites::verify_marker(n, m, x)),
            Suite::InverseRoundtrip => suite_code(&suites::verify_inverse_roundtrip()),
            Suite::PiHom { max_len } => suite_code(&suites::verify_pi_hom(max_len)),
            Suite::InvariantHom => suite_code(&suites::verify_invariant_hom()),
            Suite::OracleCoherence { random } => suite_code(&suites::verify_oracle_coherence(random)),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
