//! Bounded search over X_2 for circle-compatible elements.
//!
//! Usage: enumerate_to2 [states] [output length] [sync level]

use thn::enumeration::{verify_to2, EnumBounds};
use thn::format::print_tdr;

fn main() -> thn::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let arg = |i: usize, d: usize| args.get(i).copied().unwrap_or(d);
    let bounds = EnumBounds::new(2, arg(0, 3), arg(1, 2), arg(2, 4))?;
    println!(
        "about {:.0} labelled machines before filtering",
        bounds.estimated_count()
    );
    let report = verify_to2(&bounds, None)?;
    println!("{report}");
    for t in &report.survivors {
        print!("{}", print_tdr(t, None));
    }
    println!("only id and R: {}", report.only_identity_and_r(2));
    Ok(())
}
