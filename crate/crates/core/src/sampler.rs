//! Letter streams drawn from a comb source.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded from a 64-bit
//! integer with `seed_from_u64`, so a seed names the same stream on every
//! platform and build. Independent runs use the seed `seed ^ run_index`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comb::Comb;

pub type StreamRng = ChaCha8Rng;

/// Seed for run `run` of an experiment seeded with `seed`.
pub fn run_seed(seed: u64, run: u64) -> u64 {
    seed ^ run
}

pub fn rng_from_seed(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws the number of zeros since the last 1 under the stationary law,
/// `P(k) = c_k / S(1)`, by inverse transform on the tails `r_{k+1} / S(1)`.
pub fn initial_context<R: Rng + ?Sized>(comb: &Comb, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let s1 = comb.s1_f64();
    let mut k = 0;
    // P(K > k) = r_{k+1} / S(1), decreasing to 0.
    while u < comb.r_f64(k + 1) / s1 {
        k += 1;
    }
    k
}

/// A lazily extended, reproducible stream `U_1 U_2 ...` of a comb source,
/// started from the stationary context law.
#[derive(Clone, Debug)]
pub struct LetterStream {
    comb: Comb,
    rng: StreamRng,
    state: usize,
    emitted: u64,
}

impl LetterStream {
    pub fn new(comb: &Comb, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let state = initial_context(comb, &mut rng);
        LetterStream { comb: comb.clone(), rng, state, emitted: 0 }
    }

    /// A stream whose past ends with `state` zeros after a 1.
    pub fn with_state(comb: &Comb, seed: u64, state: usize) -> Self {
        LetterStream { comb: comb.clone(), rng: rng_from_seed(seed), state, emitted: 0 }
    }

    /// Zeros emitted since the last 1 (including the initial context).
    pub fn state(&self) -> usize {
        self.state
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn comb(&self) -> &Comb {
        &self.comb
    }

    pub fn next_letter(&mut self) -> u8 {
        let q = self.comb.q0_f64(self.state);
        self.emitted += 1;
        if self.rng.gen::<f64>() < q {
            self.state += 1;
            0
        } else {
            self.state = 0;
            1
        }
    }

    pub fn take_letters(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| self.next_letter()).collect()
    }
}

impl Iterator for LetterStream {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_letter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_seeds_give_equal_streams() {
        let comb = Comb::logarithmic();
        let a = LetterStream::new(&comb, 7).take_letters(5000);
        let b = LetterStream::new(&comb, 7).take_letters(5000);
        let c = LetterStream::new(&comb, 8).take_letters(5000);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn run_seeds_differ() {
        assert_eq!(run_seed(42, 0), 42);
        assert_ne!(run_seed(42, 1), run_seed(42, 2));
    }

    #[test]
    fn factorial_zero_probability_by_state() {
        // P(0 | a zeros) = 1/(a+2), estimated per state
        let comb = Comb::factorial();
        let mut s = LetterStream::with_state(&comb, 3, 0);
        let mut seen = [0u64; 3];
        let mut zeros = [0u64; 3];
        for _ in 0..300_000 {
            let a = s.state();
            let x = s.next_letter();
            if a < 3 {
                seen[a] += 1;
                zeros[a] += (x == 0) as u64;
            }
        }
        for a in 0..3 {
            let p = 1.0 / (a as f64 + 2.0);
            let n = seen[a] as f64;
            let sd = (p * (1.0 - p) / n).sqrt();
            assert!((zeros[a] as f64 / n - p).abs() < 4.0 * sd, "a={a}");
        }
    }

    #[test]
    fn initial_context_mass_at_zero() {
        let comb = Comb::logarithmic();
        let mut rng = rng_from_seed(11);
        let n = 200_000;
        let zeros = (0..n).filter(|_| initial_context(&comb, &mut rng) == 0).count();
        let p = 18.0 / 19.0;
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((zeros as f64 / n as f64 - p).abs() < 4.0 * sd);
    }
}
