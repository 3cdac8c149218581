use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Halton sequence with a seed-controlled digital shift.
///
/// Each base-`b` digit of the radical inverse is shifted by a random digit
/// mod `b`; the shift digits are drawn from ChaCha8 seeded with
/// `(seed, replica)`, so a given `(seed, replica)` always produces the same
/// point set.
#[derive(Debug, Clone)]
pub struct ShiftedHalton {
    bases: Vec<u32>,
    shifts: Vec<Vec<u32>>,
}

impl ShiftedHalton {
    pub fn new(dims: usize, seed: u64, replica: u64) -> Self {
        assert!(
            (1..=PRIMES.len()).contains(&dims),
            "ShiftedHalton supports 1..={} dimensions",
            PRIMES.len()
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ replica.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let bases = PRIMES[..dims].to_vec();
        let shifts = bases
            .iter()
            .map(|&b| {
                let digits = (53.0 * std::f64::consts::LN_2 / (b as f64).ln()).ceil() as usize + 1;
                (0..digits).map(|_| rng.random_range(0..b)).collect()
            })
            .collect();
        Self { bases, shifts }
    }

    pub fn dims(&self) -> usize {
        self.bases.len()
    }

    /// Writes point `index` into `out` (length = dims), coordinates in [0, 1).
    pub fn point(&self, index: u64, out: &mut [f64]) {
        for (d, (&b, shift)) in self.bases.iter().zip(&self.shifts).enumerate() {
            let mut i = index;
            let inv_b = 1.0 / b as f64;
            let mut scale = inv_b;
            let mut x = 0.0;
            for &s in shift {
                let digit = (i % b as u64) as u32;
                i /= b as u64;
                x += ((digit + s) % b) as f64 * scale;
                scale *= inv_b;
            }
            out[d] = x.min(1.0 - f64::EPSILON / 2.0);
        }
    }
}
