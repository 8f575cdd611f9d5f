//! Per-state analysis of the maps a transducer induces on Cantor space.

use thn::cantor::{analyze, evaluate_prefix, l_map, lambda};
use thn::families::{gen_b, tde};
use thn::words::Word;

fn main() -> thn::Result<()> {
    let t = tde(6, 2, 3)?;
    let input = Word::parse("52", 6)?;
    println!(
        "T(2,3) from q0 on 52: {}",
        evaluate_prefix(&t, 0, input.as_slice()).to_text(6)
    );

    let b = gen_b(3, 1)?;
    for s in analyze(&b)? {
        println!(
            "state {}: image {:?}, injective {:?}, homeomorphism {}, min {}, max {}, order {:?}, Λ = {}",
            b.name(s.state),
            s.image,
            s.injective,
            s.homeomorphism_state,
            s.leftmost.to_text(3),
            s.rightmost.to_text(3),
            s.order,
            lambda(&b, s.state)?.to_text(3),
        );
    }
    let w = Word::parse("21", 3)?;
    println!(
        "L-map of 21 from state 0: {}",
        l_map(&b, 0, w.as_slice())?.to_text(3)
    );
    Ok(())
}
