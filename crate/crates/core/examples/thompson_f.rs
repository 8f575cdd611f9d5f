//! The generators B and C satisfy the defining relators of Thompson's group F.

use thn::families::bc_relator_check;

fn main() -> thn::Result<()> {
    for (n, x) in [(3, 1), (4, 1), (4, 2), (5, 2)] {
        let r = bc_relator_check(n, x)?;
        println!(
            "n={n} x={x}: relators {} {}, [B,C] = id: {}, restricted: {:?}",
            r.first_relator_trivial, r.second_relator_trivial, r.degenerate, r.restricted
        );
    }
    Ok(())
}
