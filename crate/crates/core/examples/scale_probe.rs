// corpus replication probe with per-game timing
use eahkit::arith::Rat;
use eahkit::deviation::make_swap_deviations;
use eahkit::games::NormalFormGame;
use eahkit::phi::{solve_phi_equilibrium, PhiOptions};

struct SplitMix64 {
    state: u64,
}
impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}
fn random_payoff(rng: &mut SplitMix64) -> Rat {
    let num = rng.below(17) as i64 - 8;
    let den = [1i64, 2, 4][rng.below(3) as usize];
    Rat::new(num, den)
}
fn random_nfg(dims: &[usize], seed: u64) -> NormalFormGame {
    let mut rng = SplitMix64::new(seed);
    let count: usize = dims.iter().product();
    let tensors = (0..dims.len())
        .map(|_| (0..count).map(|_| random_payoff(&mut rng)).collect())
        .collect();
    NormalFormGame::new(dims.to_vec(), tensors).unwrap()
}

fn main() {
    let from: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let to: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(50);
    let t_all = std::time::Instant::now();
    for seed in from..to {
        let mut rng = SplitMix64::new(0xC0FFEE ^ (seed * 7919));
        let players = 2 + (seed as usize % 2);
        let dims: Vec<usize> = (0..players).map(|_| 2 + rng.below(3) as usize).collect();
        let game = random_nfg(&dims, seed);
        let devs: Vec<_> = dims
            .iter()
            .enumerate()
            .map(|(p, &d)| make_swap_deviations(p, d))
            .collect();
        let t0 = std::time::Instant::now();
        let eq = solve_phi_equilibrium(&game, &devs, &PhiOptions::default()).unwrap();
        println!(
            "game {seed} dims {dims:?}: support={} esc={} iters={} ger={} in {:?}",
            eq.support.len(),
            eq.stats.escalations,
            eq.stats.ellipsoid_iterations,
            eq.stats.ger_calls,
            t0.elapsed()
        );
    }
    println!("total {:?}", t_all.elapsed());
}
