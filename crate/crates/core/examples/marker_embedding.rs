//! Embeds elements over X_3 into the group over X_2 with a marker code.

use thn::families::{gen_b, gen_c};
use thn::group::{group_product, in_on, GroupElement};
use thn::marker::{gen_marker_code, marker_embed};

fn main() -> thn::Result<()> {
    let code = gen_marker_code(3, 2, 3)?;
    let shown: Vec<String> = code.words().iter().map(|w| w.to_text(2)).collect();
    println!("code words: {}", shown.join(" "));

    let b = GroupElement::new(gen_b(3, 1)?)?;
    let c = GroupElement::new(gen_c(3, 1)?)?;
    let fb = marker_embed(&b, 1, 2)?;
    let fc = marker_embed(&c, 1, 2)?;
    println!(
        "f(B): {} states, in O_2: {:?}",
        fb.num_states(),
        in_on(fb.rep()).value
    );
    println!(
        "f(C): {} states, in O_2: {:?}",
        fc.num_states(),
        in_on(fc.rep()).value
    );
    let fbc = marker_embed(&group_product(&b, &c)?, 1, 2)?;
    println!("f(BC) = f(B) f(C): {}", fbc == group_product(&fb, &fc)?);
    Ok(())
}
