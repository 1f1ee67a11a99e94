//! Extensive-form games in sequence form.
//!
//! A [`GameTree`] is a plain node list; [`efg_build_sequence_form`]
//! validates perfect recall, derives every player's sequence set and
//! treeplex H-representation, and folds chance probabilities into a
//! sparse terminal payoff list keyed by the players' terminal
//! sequences. Utilities stay multi-linear in sequence-form strategies.

use super::{GameError, PolyhedralGame};
use crate::arith::{EncodingLength, Rat, RatVec};
use crate::polytope::HPolytope;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

/// Cap on enumerated pure plans per player.
const PURE_PLAN_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Decision {
        /// 0-based player.
        player: usize,
        infoset: String,
        actions: Vec<(String, usize)>,
    },
    Chance {
        branches: Vec<(Rat, usize)>,
    },
    Terminal {
        payoffs: Vec<Rat>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTree {
    pub players: usize,
    pub root: usize,
    pub nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone)]
struct Infoset {
    label: String,
    parent_seq: usize,
    first_seq: usize,
    actions: Vec<String>,
}

/// One terminal: the tuple of players' last sequences, the chance
/// weight on the path, and the raw payoff vector.
#[derive(Debug, Clone)]
pub struct TerminalEntry {
    pub seqs: Vec<usize>,
    pub chance: Rat,
    pub payoffs: Vec<Rat>,
}

#[derive(Debug, Clone)]
pub struct ExtensiveFormGame {
    players: usize,
    seq_counts: Vec<usize>,
    infosets: Vec<Vec<Infoset>>,
    sets: Vec<HPolytope>,
    terminals: Vec<TerminalEntry>,
    tree: GameTree,
}

/// Validates the tree and builds the sequence-form representation.
pub fn efg_build_sequence_form(tree: GameTree) -> Result<ExtensiveFormGame, GameError> {
    let players = tree.players;
    if players == 0 {
        return Err(GameError::MalformedTree("zero players".to_string()));
    }
    if tree.root >= tree.nodes.len() {
        return Err(GameError::MalformedTree("root index out of range".to_string()));
    }

    let mut infosets: Vec<Vec<Infoset>> = vec![Vec::new(); players];
    let mut infoset_ids: Vec<HashMap<String, usize>> = vec![HashMap::new(); players];
    let mut seq_counts: Vec<usize> = vec![1; players]; // empty sequence = 0
    let mut terminals: Vec<TerminalEntry> = Vec::new();
    let mut visited = vec![false; tree.nodes.len()];

    // Iterative DFS carrying (node, chance weight, per-player sequence).
    let mut stack = vec![(tree.root, Rat::one(), vec![0usize; players])];
    while let Some((idx, weight, seqs)) = stack.pop() {
        if visited[idx] {
            return Err(GameError::MalformedTree(format!(
                "node {idx} reachable along two paths"
            )));
        }
        visited[idx] = true;
        match &tree.nodes[idx] {
            TreeNode::Terminal { payoffs } => {
                if payoffs.len() != players {
                    return Err(GameError::MalformedTree(format!(
                        "terminal {idx} has {} payoffs for {} players",
                        payoffs.len(),
                        players
                    )));
                }
                terminals.push(TerminalEntry {
                    seqs,
                    chance: weight,
                    payoffs: payoffs.clone(),
                });
            }
            TreeNode::Chance { branches } => {
                if branches.is_empty() {
                    return Err(GameError::MalformedTree(format!(
                        "chance node {idx} has no branches"
                    )));
                }
                let mut total = Rat::zero();
                for (p, child) in branches {
                    if p.is_negative() {
                        return Err(GameError::MalformedTree(format!(
                            "negative chance probability at node {idx}"
                        )));
                    }
                    if *child >= tree.nodes.len() {
                        return Err(GameError::MalformedTree(format!(
                            "node {idx} links to missing child {child}"
                        )));
                    }
                    total += p;
                    stack.push((*child, &weight * p, seqs.clone()));
                }
                if total != Rat::one() {
                    return Err(GameError::MalformedTree(format!(
                        "chance probabilities at node {idx} sum to {total}"
                    )));
                }
            }
            TreeNode::Decision {
                player,
                infoset,
                actions,
            } => {
                let p = *player;
                if p >= players {
                    return Err(GameError::MalformedTree(format!(
                        "node {idx} owned by out-of-range player {}",
                        p + 1
                    )));
                }
                if actions.is_empty() {
                    return Err(GameError::MalformedTree(format!(
                        "decision node {idx} has no actions"
                    )));
                }
                let first_seq = match infoset_ids[p].get(infoset) {
                    Some(&iset) => {
                        let info = &infosets[p][iset];
                        if info.parent_seq != seqs[p] {
                            return Err(GameError::ImperfectRecall(format!(
                                "information set `{infoset}` of player {} is reached with \
                                 different own sequences",
                                p + 1
                            )));
                        }
                        let names: Vec<&String> = actions.iter().map(|(n, _)| n).collect();
                        if names.len() != info.actions.len()
                            || names.iter().zip(&info.actions).any(|(a, b)| *a != b)
                        {
                            return Err(GameError::MalformedTree(format!(
                                "information set `{infoset}` has inconsistent action lists"
                            )));
                        }
                        info.first_seq
                    }
                    None => {
                        let first_seq = seq_counts[p];
                        seq_counts[p] += actions.len();
                        infoset_ids[p].insert(infoset.clone(), infosets[p].len());
                        infosets[p].push(Infoset {
                            label: infoset.clone(),
                            parent_seq: seqs[p],
                            first_seq,
                            actions: actions.iter().map(|(n, _)| n.clone()).collect(),
                        });
                        first_seq
                    }
                };
                for (a, (_, child)) in actions.iter().enumerate() {
                    if *child >= tree.nodes.len() {
                        return Err(GameError::MalformedTree(format!(
                            "node {idx} links to missing child {child}"
                        )));
                    }
                    let mut next = seqs.clone();
                    next[p] = first_seq + a;
                    stack.push((*child, weight.clone(), next));
                }
            }
        }
    }
    if let Some(unreached) = visited.iter().position(|v| !v) {
        return Err(GameError::MalformedTree(format!(
            "node {unreached} is unreachable from the root"
        )));
    }

    let mut sets = Vec::with_capacity(players);
    for p in 0..players {
        let d = seq_counts[p];
        let mut poly = HPolytope::new(d);
        for i in 0..d {
            poly.add_ineq(RatVec::unit(d, i).neg(), Rat::zero());
        }
        poly.add_eq(RatVec::unit(d, 0), Rat::one());
        for info in &infosets[p] {
            let mut row = RatVec::zeros(d);
            row.set(info.parent_seq, -Rat::one());
            for a in 0..info.actions.len() {
                row.set(info.first_seq + a, Rat::one());
            }
            poly.add_eq(row, Rat::zero());
        }
        sets.push(poly);
    }

    Ok(ExtensiveFormGame {
        players,
        seq_counts,
        infosets,
        sets,
        terminals,
        tree,
    })
}

impl ExtensiveFormGame {
    pub fn tree(&self) -> &GameTree {
        &self.tree
    }

    pub fn sequence_count(&self, player: usize) -> usize {
        self.seq_counts[player]
    }

    pub fn infoset_count(&self, player: usize) -> usize {
        self.infosets[player].len()
    }

    pub fn terminals(&self) -> &[TerminalEntry] {
        &self.terminals
    }

    /// Human-readable sequence name, for output files.
    pub fn sequence_label(&self, player: usize, seq: usize) -> String {
        if seq == 0 {
            return "/".to_string();
        }
        for info in &self.infosets[player] {
            if seq >= info.first_seq && seq < info.first_seq + info.actions.len() {
                return format!("{}.{}", info.label, info.actions[seq - info.first_seq]);
            }
        }
        format!("seq{seq}")
    }
}

impl PolyhedralGame for ExtensiveFormGame {
    fn num_players(&self) -> usize {
        self.players
    }

    fn strategy_dim(&self, player: usize) -> usize {
        self.seq_counts[player]
    }

    fn strategy_set(&self, player: usize) -> &HPolytope {
        &self.sets[player]
    }

    fn gradient(&self, player: usize, marginals: &[RatVec]) -> Result<RatVec, GameError> {
        if marginals.len() != self.players {
            return Err(GameError::DimensionMismatch(format!(
                "{} marginals for {} players",
                marginals.len(),
                self.players
            )));
        }
        for q in 0..self.players {
            if q != player && marginals[q].dim() != self.seq_counts[q] {
                return Err(GameError::DimensionMismatch(format!(
                    "marginal for player {} has dimension {}",
                    q + 1,
                    marginals[q].dim()
                )));
            }
        }
        let mut g = vec![Rat::zero(); self.seq_counts[player]];
        for t in &self.terminals {
            if t.chance.is_zero() || t.payoffs[player].is_zero() {
                continue;
            }
            let mut w = &t.chance * &t.payoffs[player];
            for q in 0..self.players {
                if q == player {
                    continue;
                }
                let m = &marginals[q][t.seqs[q]];
                if m.is_zero() {
                    w = Rat::zero();
                    break;
                }
                w = &w * m;
            }
            if !w.is_zero() {
                g[t.seqs[player]] += &w;
            }
        }
        Ok(RatVec::from_entries(g))
    }

    /// Reduced pure plans: one action per reachable information set.
    /// These are exactly the treeplex vertices.
    fn pure_strategies(&self, player: usize) -> Result<Vec<RatVec>, GameError> {
        let mut by_parent: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, info) in self.infosets[player].iter().enumerate() {
            by_parent.entry(info.parent_seq).or_default().push(i);
        }
        let chosen = self.expand_plans(player, 0, &by_parent)?;
        let d = self.seq_counts[player];
        let mut out = Vec::with_capacity(chosen.len());
        for plan in chosen {
            let mut v = RatVec::zeros(d);
            v.set(0, Rat::one());
            for seq in plan {
                v.set(seq, Rat::one());
            }
            out.push(v);
        }
        Ok(out)
    }

    fn anchor_coordinate(&self, _player: usize) -> Option<usize> {
        // The empty sequence is pinned to 1 by the treeplex.
        Some(0)
    }

    fn utility_entry_encoding(&self) -> EncodingLength {
        self.terminals
            .iter()
            .flat_map(|t| t.payoffs.iter().map(|u| (&t.chance * u).encoding_length()))
            .max()
            .unwrap_or_default()
    }

    fn utility_term_count(&self) -> u64 {
        self.terminals.len() as u64
    }
}

impl ExtensiveFormGame {
    fn expand_plans(
        &self,
        player: usize,
        seq: usize,
        by_parent: &BTreeMap<usize, Vec<usize>>,
    ) -> Result<Vec<Vec<usize>>, GameError> {
        let Some(isets) = by_parent.get(&seq) else {
            return Ok(vec![vec![]]);
        };
        let mut combined: Vec<Vec<usize>> = vec![vec![]];
        for &iset in isets {
            let info = &self.infosets[player][iset];
            let mut options: Vec<Vec<usize>> = Vec::new();
            for a in 0..info.actions.len() {
                let s = info.first_seq + a;
                for tail in self.expand_plans(player, s, by_parent)? {
                    let mut opt = vec![s];
                    opt.extend(tail);
                    options.push(opt);
                }
            }
            let mut next = Vec::with_capacity(combined.len() * options.len());
            for base in &combined {
                for opt in &options {
                    let mut merged = base.clone();
                    merged.extend(opt.iter().copied());
                    next.push(merged);
                    if next.len() > PURE_PLAN_CAP {
                        return Err(GameError::InstanceTooLarge {
                            size: next.len(),
                            cap: PURE_PLAN_CAP,
                        });
                    }
                }
            }
            combined = next;
        }
        Ok(combined)
    }
}

/// Text form:
///
/// ```text
/// efg
/// players <n>
/// node <id> chance <prob> <child> [<prob> <child> ...]
/// node <id> player <p> infoset <label> <action> <child> [...]
/// node <id> terminal <u_1> ... <u_n>
/// root <id>
/// end
/// ```
pub fn emit_game_tree(tree: &GameTree) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "efg");
    let _ = writeln!(s, "players {}", tree.players);
    for (i, node) in tree.nodes.iter().enumerate() {
        match node {
            TreeNode::Chance { branches } => {
                let parts: Vec<String> = branches
                    .iter()
                    .map(|(p, c)| format!("{p} {c}"))
                    .collect();
                let _ = writeln!(s, "node {i} chance {}", parts.join(" "));
            }
            TreeNode::Decision {
                player,
                infoset,
                actions,
            } => {
                let parts: Vec<String> = actions
                    .iter()
                    .map(|(a, c)| format!("{a} {c}"))
                    .collect();
                let _ = writeln!(
                    s,
                    "node {i} player {} infoset {} {}",
                    player + 1,
                    infoset,
                    parts.join(" ")
                );
            }
            TreeNode::Terminal { payoffs } => {
                let parts: Vec<String> = payoffs.iter().map(|u| u.to_string()).collect();
                let _ = writeln!(s, "node {i} terminal {}", parts.join(" "));
            }
        }
    }
    let _ = writeln!(s, "root {}", tree.root);
    let _ = writeln!(s, "end");
    s
}

pub fn parse_game_tree(input: &str) -> Result<GameTree, GameError> {
    let err = |line: usize, message: &str| GameError::Parse {
        line: line + 1,
        message: message.to_string(),
    };
    let mut players: Option<usize> = None;
    let mut nodes: BTreeMap<usize, TreeNode> = BTreeMap::new();
    let mut root: Option<usize> = None;
    let mut saw_header = false;
    let mut saw_end = false;
    for (ln, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "efg" {
                return Err(err(ln, "expected `efg` header"));
            }
            saw_header = true;
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "players" => {
                players = Some(
                    tokens
                        .get(1)
                        .and_then(|t| t.parse().ok())
                        .filter(|&n| n >= 1)
                        .ok_or_else(|| err(ln, "bad player count"))?,
                );
            }
            "node" => {
                let n_players = players.ok_or_else(|| err(ln, "`node` before `players`"))?;
                let id: usize = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(ln, "bad node id"))?;
                let kind = *tokens.get(2).ok_or_else(|| err(ln, "missing node kind"))?;
                let node = match kind {
                    "chance" => {
                        let rest = &tokens[3..];
                        if rest.is_empty() || rest.len() % 2 != 0 {
                            return Err(err(ln, "chance branches must be prob/child pairs"));
                        }
                        let mut branches = Vec::new();
                        for pair in rest.chunks(2) {
                            let p: Rat =
                                pair[0].parse().map_err(|_| err(ln, "bad probability"))?;
                            let c: usize =
                                pair[1].parse().map_err(|_| err(ln, "bad child id"))?;
                            branches.push((p, c));
                        }
                        TreeNode::Chance { branches }
                    }
                    "player" => {
                        let p: usize = tokens
                            .get(3)
                            .and_then(|t| t.parse().ok())
                            .filter(|&p| p >= 1 && p <= n_players)
                            .ok_or_else(|| err(ln, "bad player index"))?;
                        if tokens.get(4) != Some(&"infoset") {
                            return Err(err(ln, "expected `infoset <label>`"));
                        }
                        let label = tokens
                            .get(5)
                            .ok_or_else(|| err(ln, "missing infoset label"))?
                            .to_string();
                        let rest = &tokens[6..];
                        if rest.is_empty() || rest.len() % 2 != 0 {
                            return Err(err(ln, "actions must be name/child pairs"));
                        }
                        let mut actions = Vec::new();
                        for pair in rest.chunks(2) {
                            let c: usize =
                                pair[1].parse().map_err(|_| err(ln, "bad child id"))?;
                            actions.push((pair[0].to_string(), c));
                        }
                        TreeNode::Decision {
                            player: p - 1,
                            infoset: label,
                            actions,
                        }
                    }
                    "terminal" => {
                        let mut payoffs = Vec::new();
                        for t in &tokens[3..] {
                            payoffs.push(t.parse::<Rat>().map_err(|e| err(ln, &e.to_string()))?);
                        }
                        if payoffs.len() != n_players {
                            return Err(err(ln, "terminal payoff count mismatch"));
                        }
                        TreeNode::Terminal { payoffs }
                    }
                    other => return Err(err(ln, &format!("unknown node kind `{other}`"))),
                };
                if nodes.insert(id, node).is_some() {
                    return Err(err(ln, &format!("duplicate node id {id}")));
                }
            }
            "root" => {
                root = Some(
                    tokens
                        .get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err(ln, "bad root id"))?,
                );
            }
            "end" => {
                saw_end = true;
                break;
            }
            other => return Err(err(ln, &format!("unknown keyword `{other}`"))),
        }
    }
    if !saw_end {
        return Err(GameError::Parse {
            line: 0,
            message: "missing `end`".to_string(),
        });
    }
    let players = players.ok_or(GameError::Parse {
        line: 0,
        message: "missing `players`".to_string(),
    })?;
    let root = root.ok_or(GameError::Parse {
        line: 0,
        message: "missing `root`".to_string(),
    })?;
    let count = nodes.keys().next_back().map_or(0, |&k| k + 1);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        out.push(nodes.remove(&i).ok_or(GameError::Parse {
            line: 0,
            message: format!("missing node {i}"),
        })?);
    }
    if root >= out.len() {
        return Err(GameError::Parse {
            line: 0,
            message: format!("root {root} is not a declared node"),
        });
    }
    Ok(GameTree {
        players,
        root,
        nodes: out,
    })
}

/// Standard three-card Kuhn poker as a two-player zero-sum tree:
/// cards J < Q < K, a one-chip ante, one bet allowed.
pub fn kuhn_poker_tree() -> GameTree {
    let card_name = |c: usize| ["J", "Q", "K"][c];
    let mut nodes: Vec<TreeNode> = Vec::new();
    let add = |node: TreeNode, nodes: &mut Vec<TreeNode>| -> usize {
        nodes.push(node);
        nodes.len() - 1
    };

    let mut deals = Vec::new();
    for c1 in 0..3usize {
        for c2 in 0..3usize {
            if c1 == c2 {
                continue;
            }
            let win = if c1 > c2 { 1i64 } else { -1 };
            let showdown_2 = add(
                TreeNode::Terminal {
                    payoffs: vec![Rat::from_int(2 * win), Rat::from_int(-2 * win)],
                },
                &mut nodes,
            );
            let bet_fold = add(
                TreeNode::Terminal {
                    payoffs: vec![Rat::one(), -Rat::one()],
                },
                &mut nodes,
            );
            let p2_after_bet = add(
                TreeNode::Decision {
                    player: 1,
                    infoset: format!("2:{}b", card_name(c2)),
                    actions: vec![
                        ("call".to_string(), showdown_2),
                        ("fold".to_string(), bet_fold),
                    ],
                },
                &mut nodes,
            );
            let showdown_1 = add(
                TreeNode::Terminal {
                    payoffs: vec![Rat::from_int(win), Rat::from_int(-win)],
                },
                &mut nodes,
            );
            let showdown_2b = add(
                TreeNode::Terminal {
                    payoffs: vec![Rat::from_int(2 * win), Rat::from_int(-2 * win)],
                },
                &mut nodes,
            );
            let p1_fold = add(
                TreeNode::Terminal {
                    payoffs: vec![-Rat::one(), Rat::one()],
                },
                &mut nodes,
            );
            let p1_after_check_bet = add(
                TreeNode::Decision {
                    player: 0,
                    infoset: format!("1:{}xb", card_name(c1)),
                    actions: vec![
                        ("call".to_string(), showdown_2b),
                        ("fold".to_string(), p1_fold),
                    ],
                },
                &mut nodes,
            );
            let p2_after_check = add(
                TreeNode::Decision {
                    player: 1,
                    infoset: format!("2:{}x", card_name(c2)),
                    actions: vec![
                        ("check".to_string(), showdown_1),
                        ("bet".to_string(), p1_after_check_bet),
                    ],
                },
                &mut nodes,
            );
            let p1_root = add(
                TreeNode::Decision {
                    player: 0,
                    infoset: format!("1:{}", card_name(c1)),
                    actions: vec![
                        ("check".to_string(), p2_after_check),
                        ("bet".to_string(), p2_after_bet),
                    ],
                },
                &mut nodes,
            );
            deals.push((Rat::new(1, 6), p1_root));
        }
    }
    let root = {
        nodes.push(TreeNode::Chance { branches: deals });
        nodes.len() - 1
    };
    GameTree {
        players: 2,
        root,
        nodes,
    }
}
