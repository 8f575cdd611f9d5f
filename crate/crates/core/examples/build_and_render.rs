//! Builds family members, prints them in the text format and as DOT.

use thn::families::{gen_b, gen_c, gen_r, tde};
use thn::format::{parse_tdr, print_tdr, to_dot};

fn main() -> thn::Result<()> {
    let b = gen_b(3, 1)?;
    let text = print_tdr(&b, None);
    print!("{text}");
    let back = parse_tdr(&text)?;
    println!("round trip exact: {}", back.transducer == b);

    for (name, t) in [("R", gen_r(3)), ("C", gen_c(3, 1)?), ("T(2,2)", tde(4, 2, 2)?)] {
        println!("{name}: {} states over X_{}", t.num_states(), t.alphabet_size());
    }
    println!();
    print!("{}", to_dot(&tde(4, 2, 2)?, Some(0)));
    Ok(())
}
