//! Deterministic test-instance generation.

use eahkit::arith::Rat;
use eahkit::games::NormalFormGame;

/// SplitMix64: stable across platforms and releases, which keeps
/// seeded instances byte-identical everywhere.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Uniform payoff entry: numerator in [-8, 8], denominator in {1, 2, 4}.
pub fn random_payoff(rng: &mut SplitMix64) -> Rat {
    let num = rng.below(17) as i64 - 8;
    let den = [1i64, 2, 4][rng.below(3) as usize];
    Rat::new(num, den)
}

/// Random normal-form game with the given action counts.
pub fn random_nfg(dims: &[usize], seed: u64) -> NormalFormGame {
    let mut rng = SplitMix64::new(seed);
    let count: usize = dims.iter().product();
    let tensors = (0..dims.len())
        .map(|_| (0..count).map(|_| random_payoff(&mut rng)).collect())
        .collect();
    NormalFormGame::new(dims.to_vec(), tensors).expect("generated dimensions are consistent")
}
