//! Cone signature, the s invariant in G_n and the action on rotation classes.

use thn::families::{gen_r, tde};
use thn::group::{group_product, GroupElement};
use thn::invariants::{gn_structure, invariant_report, pi_report};

fn main() -> thn::Result<()> {
    for n in [4, 6, 8, 9, 12] {
        let (rank, torsion) = gn_structure(n);
        println!("G_{n}: free rank {rank}, torsion order {torsion}");
    }
    let r = GroupElement::new(gen_r(6))?;
    let a = GroupElement::new(tde(6, 3, 2)?)?;
    let ra = group_product(&r, &a)?;
    for (name, t) in [("R", &r), ("T(3,2)", &a), ("R T(3,2)", &ra)] {
        let rep = invariant_report(t, 2)?;
        println!(
            "{name}: m = {} (per state {:?}), s = {:?}",
            rep.m, rep.m_per_state, rep.s
        );
    }

    let t22 = GroupElement::new(tde(4, 2, 2)?)?;
    let rep = invariant_report(&t22, 2)?;
    println!("Π(T(2,2)) on classes of length <= 2:");
    for (c, image) in &rep.pi_table {
        println!("  {c} -> {image}");
    }
    let pr = pi_report(&t22, 3)?;
    println!(
        "injective up to length 3: {}, closed: {}",
        pr.injective, pr.closed
    );
    Ok(())
}
