//! Normal-form games: one payoff tensor per player over the product of
//! action simplices, stored row-major over joint pure actions.

use super::{GameError, PolyhedralGame};
use crate::arith::{EncodingLength, Rat, RatVec};
use crate::polytope::HPolytope;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormGame {
    dims: Vec<usize>,
    tensors: Vec<Vec<Rat>>,
    sets: Vec<HPolytope>,
}

impl NormalFormGame {
    pub fn new(dims: Vec<usize>, tensors: Vec<Vec<Rat>>) -> Result<Self, GameError> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(GameError::DimensionMismatch(
                "every player needs at least one action".to_string(),
            ));
        }
        let profile_count: usize = dims.iter().product();
        if tensors.len() != dims.len() {
            return Err(GameError::DimensionMismatch(format!(
                "{} payoff tensors for {} players",
                tensors.len(),
                dims.len()
            )));
        }
        for (p, t) in tensors.iter().enumerate() {
            if t.len() != profile_count {
                return Err(GameError::DimensionMismatch(format!(
                    "tensor for player {} has {} entries, expected {}",
                    p + 1,
                    t.len(),
                    profile_count
                )));
            }
        }
        let sets = dims.iter().map(|&d| HPolytope::simplex(d)).collect();
        Ok(NormalFormGame {
            dims,
            tensors,
            sets,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn flat_index(&self, profile: &[usize]) -> usize {
        let mut idx = 0;
        for (p, &a) in profile.iter().enumerate() {
            debug_assert!(a < self.dims[p]);
            idx = idx * self.dims[p] + a;
        }
        idx
    }

    pub fn payoff(&self, player: usize, profile: &[usize]) -> &Rat {
        &self.tensors[player][self.flat_index(profile)]
    }

    /// Iterates over all joint pure-action profiles in row-major order.
    pub fn profiles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &d in &self.dims {
            let mut next = Vec::with_capacity(out.len() * d);
            for prefix in &out {
                for a in 0..d {
                    let mut q = prefix.clone();
                    q.push(a);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }
}

impl PolyhedralGame for NormalFormGame {
    fn num_players(&self) -> usize {
        self.dims.len()
    }

    fn strategy_dim(&self, player: usize) -> usize {
        self.dims[player]
    }

    fn strategy_set(&self, player: usize) -> &HPolytope {
        &self.sets[player]
    }

    fn gradient(&self, player: usize, marginals: &[RatVec]) -> Result<RatVec, GameError> {
        if marginals.len() != self.dims.len() {
            return Err(GameError::DimensionMismatch(format!(
                "{} marginals for {} players",
                marginals.len(),
                self.dims.len()
            )));
        }
        for (q, m) in marginals.iter().enumerate() {
            if q != player && m.dim() != self.dims[q] {
                return Err(GameError::DimensionMismatch(format!(
                    "marginal for player {} has dimension {}",
                    q + 1,
                    m.dim()
                )));
            }
        }
        let mut g = vec![Rat::zero(); self.dims[player]];
        for profile in self.profiles() {
            let mut weight = Rat::one();
            for (q, &a) in profile.iter().enumerate() {
                if q == player {
                    continue;
                }
                if marginals[q][a].is_zero() {
                    weight = Rat::zero();
                    break;
                }
                weight = &weight * &marginals[q][a];
            }
            if weight.is_zero() {
                continue;
            }
            let u = self.payoff(player, &profile);
            if !u.is_zero() {
                g[profile[player]] += &(&weight * u);
            }
        }
        Ok(RatVec::from_entries(g))
    }

    fn pure_strategies(&self, player: usize) -> Result<Vec<RatVec>, GameError> {
        Ok((0..self.dims[player])
            .map(|a| RatVec::unit(self.dims[player], a))
            .collect())
    }

    fn anchor_coordinate(&self, _player: usize) -> Option<usize> {
        None
    }

    fn utility_entry_encoding(&self) -> EncodingLength {
        self.tensors
            .iter()
            .flatten()
            .map(Rat::encoding_length)
            .max()
            .unwrap_or_default()
    }

    fn utility_term_count(&self) -> u64 {
        // Pure opponents select a single tensor entry per gradient entry.
        1
    }
}

/// Text form:
///
/// ```text
/// nfg
/// players <n>
/// actions <d_1> ... <d_n>
/// payoffs <p> <v_1> ... <v_k>    (k = prod d_q, row-major, 1-based p)
/// end
/// ```
pub fn emit_nfg(game: &NormalFormGame) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "nfg");
    let _ = writeln!(s, "players {}", game.dims.len());
    let dims: Vec<String> = game.dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "actions {}", dims.join(" "));
    for (p, tensor) in game.tensors.iter().enumerate() {
        let vals: Vec<String> = tensor.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "payoffs {} {}", p + 1, vals.join(" "));
    }
    let _ = writeln!(s, "end");
    s
}

pub fn parse_nfg(input: &str) -> Result<NormalFormGame, GameError> {
    let err = |line: usize, message: &str| GameError::Parse {
        line: line + 1,
        message: message.to_string(),
    };
    let mut players: Option<usize> = None;
    let mut dims: Option<Vec<usize>> = None;
    let mut tensors: Vec<Option<Vec<Rat>>> = Vec::new();
    let mut saw_header = false;
    for (ln, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "nfg" {
                return Err(err(ln, "expected `nfg` header"));
            }
            saw_header = true;
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap() {
            "players" => {
                let n: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| err(ln, "bad player count"))?;
                players = Some(n);
                tensors = vec![None; n];
            }
            "actions" => {
                let n = players.ok_or_else(|| err(ln, "`actions` before `players`"))?;
                let ds: Vec<usize> = tokens
                    .map(|t| t.parse().unwrap_or(0))
                    .collect();
                if ds.len() != n || ds.iter().any(|&d| d == 0) {
                    return Err(err(ln, "bad action counts"));
                }
                dims = Some(ds);
            }
            "payoffs" => {
                let ds = dims.clone().ok_or_else(|| err(ln, "`payoffs` before `actions`"))?;
                let p: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .filter(|&p| p >= 1 && p <= ds.len())
                    .ok_or_else(|| err(ln, "bad player index"))?;
                let mut vals = Vec::new();
                for t in tokens {
                    vals.push(
                        t.parse::<Rat>()
                            .map_err(|e| err(ln, &e.to_string()))?,
                    );
                }
                let expect: usize = ds.iter().product();
                if vals.len() != expect {
                    return Err(err(ln, &format!("expected {expect} payoff entries")));
                }
                tensors[p - 1] = Some(vals);
            }
            "end" => {
                let ds = dims.ok_or_else(|| err(ln, "missing `actions`"))?;
                let mut ts = Vec::new();
                for (p, t) in tensors.into_iter().enumerate() {
                    ts.push(t.ok_or_else(|| {
                        err(ln, &format!("missing payoffs for player {}", p + 1))
                    })?);
                }
                return NormalFormGame::new(ds, ts);
            }
            other => return Err(err(ln, &format!("unknown keyword `{other}`"))),
        }
    }
    Err(GameError::Parse {
        line: 0,
        message: "missing `end`".to_string(),
    })
}

/// 2x2 prisoner's dilemma (action 0 = cooperate, 1 = defect); the
/// standard test fixture.
pub fn prisoners_dilemma() -> NormalFormGame {
    let u1 = vec![
        Rat::from_int(3),
        Rat::from_int(0),
        Rat::from_int(5),
        Rat::from_int(1),
    ];
    let u2 = vec![
        Rat::from_int(3),
        Rat::from_int(5),
        Rat::from_int(0),
        Rat::from_int(1),
    ];
    NormalFormGame::new(vec![2, 2], vec![u1, u2]).unwrap()
}

/// Matching pennies as a two-player NFG.
pub fn matching_pennies() -> NormalFormGame {
    let u1 = vec![
        Rat::one(),
        -Rat::one(),
        -Rat::one(),
        Rat::one(),
    ];
    let u2: Vec<Rat> = u1.iter().map(|v| -v).collect();
    NormalFormGame::new(vec![2, 2], vec![u1, u2]).unwrap()
}
