//! Products, inverses and orders of normalized elements.

use thn::families::{gen_b, gen_r, order_of, tde};
use thn::format::print_tdr;
use thn::group::{group_product, in_tln, inverse, GroupElement};

fn main() -> thn::Result<()> {
    let a = GroupElement::new(tde(6, 3, 2)?)?;
    let b = GroupElement::new(tde(6, 2, 3)?)?;
    println!("T(3,2) T(2,3) = id: {}", group_product(&a, &b)?.is_identity());
    println!("inverse of T(3,2) is T(2,3): {}", inverse(&a)? == b);
    println!("T(3,2) in TL_6: {:?}", in_tln(a.rep()).value);

    for (name, t) in [
        ("R", gen_r(4)),
        ("T(2,2)", tde(4, 2, 2)?),
        ("T(3,3)", tde(9, 3, 3)?),
    ] {
        println!("order of {name}: {:?}", order_of(&GroupElement::new(t)?, 16)?);
    }

    let b3 = GroupElement::new(gen_b(3, 1)?)?;
    let bi = inverse(&b3)?;
    println!("B over X_3 has inverse with {} states:", bi.num_states());
    print!("{}", print_tdr(bi.rep(), None));
    Ok(())
}
