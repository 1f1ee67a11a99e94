//! Concrete polyhedral games: normal-form payoff tensors over simplices
//! and extensive-form games in sequence form, behind one gradient-oracle
//! trait, plus the independent brute-force equilibrium oracle and the
//! exact verifier.

mod brute;
mod efg;
mod nfg;

pub use brute::{
    brute_force_equilibrium, verify_equilibrium, BruteForceReport, VerifyOutcome,
    DEFAULT_BRUTE_CAP,
};
pub use efg::{
    efg_build_sequence_form, emit_game_tree, kuhn_poker_tree, parse_game_tree,
    ExtensiveFormGame, GameTree, TreeNode,
};
pub use nfg::{emit_nfg, matching_pennies, parse_nfg, prisoners_dilemma, NormalFormGame};

use crate::arith::{EncodingLength, Rat, RatVec};
use crate::polytope::HPolytope;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("marginal for player {player} lies outside the strategy set")]
    MarginalOutsideStrategySet { player: usize },
    #[error("gradient oracle failure: {0}")]
    GradientOracleFailure(String),
    #[error("instance too large: {size} pure profiles exceed the cap {cap}")]
    InstanceTooLarge { size: usize, cap: usize },
    #[error("imperfect recall: {0}")]
    ImperfectRecall(String),
    #[error("malformed game tree: {0}")]
    MalformedTree(String),
    #[error("game parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An n-player game with polytope strategy sets and multi-linear
/// utilities accessed through a utility-gradient oracle.
pub trait PolyhedralGame {
    fn num_players(&self) -> usize;

    fn strategy_dim(&self, player: usize) -> usize;

    fn strategy_set(&self, player: usize) -> &HPolytope;

    /// Expected utility gradient `g_p(x_{-p})`: entry `b` is the
    /// expected utility to `player` of unit coordinate `b` when every
    /// opponent `q` plays its marginal `marginals[q]`. The entry at
    /// `marginals[player]` is ignored.
    fn gradient(&self, player: usize, marginals: &[RatVec]) -> Result<RatVec, GameError>;

    /// Pure strategies: the vertices of the strategy polytope.
    fn pure_strategies(&self, player: usize) -> Result<Vec<RatVec>, GameError>;

    /// Coordinate fixed to 1 on the strategy set, when one exists.
    fn anchor_coordinate(&self, player: usize) -> Option<usize>;

    /// Maximum encoding length of one raw utility term (a payoff tensor
    /// entry, or a chance-weighted terminal payoff).
    fn utility_entry_encoding(&self) -> EncodingLength;

    /// How many utility terms one gradient entry can sum over.
    fn utility_term_count(&self) -> u64;

    /// Bound on the encoding length of rows built from pure profiles:
    /// every entry is a sum of at most `utility_term_count` terms, and a
    /// row has one entry per deviation coordinate plus the anchor.
    fn row_encoding_bound(&self) -> EncodingLength {
        let n: u64 = (0..self.num_players())
            .map(|p| {
                let d = self.strategy_dim(p) as u64;
                d * d
            })
            .sum();
        let players = self.num_players() as u64;
        let per_entry = self.utility_entry_encoding().bits + 4;
        let terms = self.utility_term_count().max(1);
        EncodingLength::from_bits((n + players + 2) * per_entry * terms)
    }

    /// `u_p(x) = g_p(x_{-p}) . x_p` by multi-linearity.
    fn utility(&self, player: usize, marginals: &[RatVec]) -> Result<Rat, GameError> {
        let g = self.gradient(player, marginals)?;
        Ok(g.dot(&marginals[player]))
    }
}

/// A game with every player's strategy set embedded one dimension up so
/// a trailing coordinate is fixed to 1. Constant deviations need an
/// anchor; normal-form simplices do not carry one natively.
pub struct AnchoredGame<G: PolyhedralGame> {
    inner: G,
    sets: Vec<HPolytope>,
}

impl<G: PolyhedralGame> AnchoredGame<G> {
    pub fn new(inner: G) -> Self {
        let sets = (0..inner.num_players())
            .map(|p| inner.strategy_set(p).embed_with_anchor())
            .collect();
        AnchoredGame { inner, sets }
    }

    pub fn inner(&self) -> &G {
        &self.inner
    }

    /// Strips the trailing anchor from a strategy of `player`.
    pub fn strip(&self, player: usize, x: &RatVec) -> RatVec {
        RatVec::from_entries(x.as_slice()[..self.inner.strategy_dim(player)].to_vec())
    }
}

impl<G: PolyhedralGame> PolyhedralGame for AnchoredGame<G> {
    fn num_players(&self) -> usize {
        self.inner.num_players()
    }

    fn strategy_dim(&self, player: usize) -> usize {
        self.inner.strategy_dim(player) + 1
    }

    fn strategy_set(&self, player: usize) -> &HPolytope {
        &self.sets[player]
    }

    fn gradient(&self, player: usize, marginals: &[RatVec]) -> Result<RatVec, GameError> {
        let stripped: Vec<RatVec> = (0..self.num_players())
            .map(|q| self.strip(q, &marginals[q]))
            .collect();
        let g = self.inner.gradient(player, &stripped)?;
        Ok(g.zero_padded(self.strategy_dim(player)))
    }

    fn pure_strategies(&self, player: usize) -> Result<Vec<RatVec>, GameError> {
        Ok(self
            .inner
            .pure_strategies(player)?
            .into_iter()
            .map(|v| {
                let mut e = v.as_slice().to_vec();
                e.push(Rat::one());
                RatVec::from_entries(e)
            })
            .collect())
    }

    fn anchor_coordinate(&self, player: usize) -> Option<usize> {
        Some(self.inner.strategy_dim(player))
    }

    fn utility_entry_encoding(&self) -> EncodingLength {
        self.inner.utility_entry_encoding()
    }

    fn utility_term_count(&self) -> u64 {
        self.inner.utility_term_count()
    }
}
