//! Synchronizing levels, forced states and cores.

use thn::families::{gen_b, gen_c, gen_r, tde};
use thn::sync::{core, sync_level};

fn main() -> thn::Result<()> {
    let b = gen_b(3, 1)?;
    let c = gen_c(3, 1)?;
    let machines = [
        ("R", gen_r(3)),
        ("B", b.clone()),
        ("C", c.clone()),
        ("T(3,2)", tde(6, 3, 2)?),
        ("B*C (raw product)", b.product(&c)?),
    ];
    for (name, t) in machines {
        let Some(cert) = sync_level(&t, 64) else {
            println!("{name}: not synchronizing within 64");
            continue;
        };
        let k = cert.level;
        let c = core(&t)?;
        println!(
            "{name}: {} states, level {k}, core {} states",
            t.num_states(),
            c.num_states()
        );
        if (1..=2).contains(&k) {
            for (w, q) in cert.forced_table(&t)? {
                println!("  {} forces {}", w.to_text(t.alphabet_size()), t.name(q));
            }
        }
    }
    Ok(())
}
