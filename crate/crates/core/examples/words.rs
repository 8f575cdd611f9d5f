//! Prime words, rotation classes and eventually periodic sequences.

use thn::words::{circle_equal, enumerate_rotation_classes, is_prime_word, primitive_root, EpWord, Word};

fn main() -> thn::Result<()> {
    let w = Word::parse("010010", 2)?;
    let (root, k) = primitive_root(w.as_slice())?;
    println!(
        "{} = ({})^{k}, prime: {}",
        w.to_text(2),
        root.to_text(2),
        is_prime_word(w.as_slice())?
    );

    for n in [2, 3] {
        let classes = enumerate_rotation_classes(n, 4);
        let shown: Vec<String> = classes.iter().map(|c| c.to_string()).collect();
        println!(
            "X_{n}, length <= 4: {} classes: {}",
            classes.len(),
            shown.join(" ")
        );
    }

    // 0(1)^ω and 1(0)^ω are the two ends of the same gap on the circle.
    let a = EpWord::parse("0(1)", 2)?;
    let b = EpWord::parse("1(0)", 2)?;
    println!("{} ~ {}: {}", a.to_text(2), b.to_text(2), circle_equal(&a, &b, 2));
    println!("{} vs {}: {:?}", a.to_text(2), b.to_text(2), a.lex_cmp(&b));
    Ok(())
}
