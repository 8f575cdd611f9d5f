//! Runs every verification suite at desk scale and prints the results.

use thn::enumeration::EnumBounds;
use thn::suites;

fn main() {
    let which: Vec<String> = std::env::args().skip(1).collect();
    let want = |s: &str| which.is_empty() || which.iter().any(|w| w == s);
    let mut results = Vec::new();
    if want("tl") {
        for n in [4, 6, 8, 9] {
            results.push(suites::verify_tl_group(n));
        }
    }
    if want("f") {
        for (n, x) in [(3, 1), (4, 1), (4, 2)] {
            results.push(suites::verify_f_relations(n, x));
        }
    }
    if want("inverse") {
        results.push(suites::verify_inverse_roundtrip());
    }
    if want("pi") {
        results.push(suites::verify_pi_hom(4));
    }
    if want("inv") {
        results.push(suites::verify_invariant_hom());
    }
    if want("oracle") {
        results.push(suites::verify_oracle_coherence(200));
    }
    if want("marker") {
        results.push(suites::verify_marker(3, 2, 1));
    }
    if want("enum") {
        let b = EnumBounds::new(2, 3, 2, 4).unwrap();
        results.push(suites::verify_to2_enum(&b, None).0);
    }
    for r in &results {
        println!("{r}\n");
    }
}
