//! Seeded random valid transducers, used by property tests and the oracle
//! coherence suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::transducer::Transducer;
use crate::words::{Letter, Word};

/// A random machine on `states` states over `X_n` with edge outputs of
/// length at most `maxout` that passes [`Transducer::validate`].
pub fn random_valid_transducer(seed: u64, n: usize, states: usize, maxout: usize) -> Transducer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let t = random_transducer(&mut rng, n, states, maxout);
        if t.validate().is_ok() {
            return t;
        }
    }
}

/// A random machine without any validity requirement.
pub fn random_transducer<R: Rng>(rng: &mut R, n: usize, states: usize, maxout: usize) -> Transducer {
    Transducer::from_fn(n, states, |_, _| {
        let len = rng.gen_range(0..=maxout);
        let w = Word::from_letters((0..len).map(|_| rng.gen_range(0..n) as Letter));
        (rng.gen_range(0..states), w)
    })
    .expect("well formed")
}
