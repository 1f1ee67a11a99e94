//! Exact linear Φ-equilibria of polyhedral games.
//!
//! The computation runs as a bilinear zero-sum meta-game between a
//! correlator, mixing over pure strategy profiles, and a deviator
//! choosing one linear transformation per player. A pure profile's meta
//! row scores every deviation tuple; the anchored coordinate carries
//! the profile's total utility, so the meta-game value is zero and the
//! correlator's feasible mixtures are exactly the equilibria. The
//! good-enough-response oracle builds per-player fixed points of the
//! queried deviations and purifies them one player at a time through
//! Carathéodory decompositions of the marginals.

use crate::arith::{EncodingLength, Rat, RatVec};
use crate::deviation::{fixed_point, with_identity, DeviationError, DeviationSet};
use crate::games::{GameError, PolyhedralGame};
use crate::polytope::{caratheodory, HPolytope, PolytopeError};
use crate::saddle::{
    solve_saddle, GerOracle, GerResponse, SaddleError, SaddleOptions, SaddleStats, YDomain,
};
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum PhiError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Deviation(#[from] DeviationError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Lp(#[from] crate::lp::LpError),
    #[error(transparent)]
    Saddle(#[from] SaddleError),
    #[error("purification failed: no candidate vertex kept the payoff nonnegative")]
    PurificationFailure,
    #[error("certificate failed exact verification: player {player}, benefit {benefit}")]
    CertificateFailure { player: usize, benefit: Rat },
    #[error("deviation set count or dimension does not match the game: {0}")]
    Mismatch(String),
    #[error("equilibrium parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One pure strategy profile: a vertex of every player's strategy set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PureProfile {
    pub strategies: Vec<RatVec>,
}

/// Coordinate layout of the deviator's space: one block of flattened
/// matrix coordinates (plus any lifted auxiliary) per player, then the
/// anchor fixed to 1.
#[derive(Debug, Clone)]
pub struct MetaLayout {
    offsets: Vec<usize>,
    widths: Vec<usize>,
    total: usize,
}

impl MetaLayout {
    pub fn new(devs: &[DeviationSet]) -> MetaLayout {
        let mut offsets = Vec::with_capacity(devs.len());
        let mut widths = Vec::with_capacity(devs.len());
        let mut at = 0;
        for dev in devs {
            offsets.push(at);
            widths.push(dev.coord_dim());
            at += dev.coord_dim();
        }
        MetaLayout {
            offsets,
            widths,
            total: at + 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.total
    }

    pub fn anchor(&self) -> usize {
        self.total - 1
    }

    pub fn players(&self) -> usize {
        self.offsets.len()
    }

    pub fn offset(&self, player: usize) -> usize {
        self.offsets[player]
    }

    pub fn block(&self, y: &RatVec, player: usize) -> RatVec {
        let o = self.offsets[player];
        RatVec::from_entries(y.as_slice()[o..o + self.widths[player]].to_vec())
    }
}

/// Membership-checked utility gradient: every opponent marginal must
/// lie exactly in its strategy set.
pub fn utility_gradient<G: PolyhedralGame>(
    game: &G,
    player: usize,
    marginals: &[RatVec],
) -> Result<RatVec, PhiError> {
    for q in 0..game.num_players() {
        if q == player {
            continue;
        }
        if !game.strategy_set(q).contains(&marginals[q])? {
            return Err(PhiError::Game(GameError::MarginalOutsideStrategySet {
                player: q,
            }));
        }
    }
    Ok(game.gradient(player, marginals)?)
}

/// The meta row of a pure profile: entry `(p, a, b)` is
/// `-s_p[a] g_p(s_{-p})[b]`, auxiliary coordinates are zero, and the
/// anchor carries the profile's total utility.
pub fn meta_row<G: PolyhedralGame>(
    game: &G,
    devs: &[DeviationSet],
    layout: &MetaLayout,
    profile: &PureProfile,
) -> Result<RatVec, PhiError> {
    let n = game.num_players();
    let mut row = RatVec::zeros(layout.dim());
    let mut total_utility = Rat::zero();
    for p in 0..n {
        let g = game.gradient(p, &profile.strategies)?;
        let d = devs[p].matrix_dim;
        let s = &profile.strategies[p];
        if s.dim() != d || g.dim() != d {
            return Err(PhiError::Mismatch(format!(
                "player {} strategy dimension {} against deviation dimension {}",
                p + 1,
                s.dim(),
                d
            )));
        }
        total_utility += &g.dot(s);
        let offset = layout.offsets[p];
        for b in 0..d {
            if g[b].is_zero() {
                continue;
            }
            for a in 0..d {
                if s[a].is_zero() {
                    continue;
                }
                row.set(offset + b * d + a, -&(&s[a] * &g[b]));
            }
        }
    }
    row.set(layout.anchor(), total_utility);
    Ok(row)
}

/// `x^T U y` for a product distribution given by per-player marginals:
/// the sum over players of `g_p(x_{-p}) . (x_p - B_p x_p)`.
pub fn product_payoff<G: PolyhedralGame>(
    game: &G,
    devs: &[DeviationSet],
    layout: &MetaLayout,
    marginals: &[RatVec],
    y: &RatVec,
) -> Result<Rat, PhiError> {
    let mut total = Rat::zero();
    for p in 0..game.num_players() {
        let g = game.gradient(p, marginals)?;
        let b = devs[p].matrix_of(&layout.block(y, p))?;
        let moved = marginals[p].sub(&b.mul_vec(&marginals[p]));
        total += &g.dot(&moved);
    }
    Ok(total)
}

/// Algorithm-3 purification: fixed points per player make the product
/// payoff exactly zero, then each marginal is replaced by the first
/// Carathéodory vertex that keeps the payoff nonnegative.
pub fn purified_ger<G: PolyhedralGame>(
    game: &G,
    devs: &[DeviationSet],
    layout: &MetaLayout,
    y: &RatVec,
) -> Result<(PureProfile, RatVec), PhiError> {
    let n = game.num_players();
    let mut marginals = Vec::with_capacity(n);
    for p in 0..n {
        let block = layout.block(y, p);
        marginals.push(fixed_point(&devs[p], &block, game.strategy_set(p))?);
    }
    let zero_check = product_payoff(game, devs, layout, &marginals, y)?;
    if zero_check.is_negative() {
        return Err(PhiError::PurificationFailure);
    }

    for p in 0..n {
        let decomposition = caratheodory(game.strategy_set(p), &marginals[p])?;
        let mut fixed = None;
        for (vertex, _) in &decomposition {
            let mut candidate = marginals.clone();
            candidate[p] = vertex.clone();
            let value = product_payoff(game, devs, layout, &candidate, y)?;
            if !value.is_negative() {
                fixed = Some(vertex.clone());
                break;
            }
        }
        // A nonnegative choice exists because the payoff is the convex
        // combination of the candidates' payoffs.
        marginals[p] = fixed.ok_or(PhiError::PurificationFailure)?;
    }

    let profile = PureProfile {
        strategies: marginals,
    };
    let row = meta_row(game, devs, layout, &profile)?;
    if row.dot(y).is_negative() {
        return Err(PhiError::PurificationFailure);
    }
    Ok((profile, row))
}

/// The deviator's product domain `Phi_1 x ... x Phi_n x {anchor = 1}`.
pub struct ProductY<'a> {
    devs: &'a [DeviationSet],
    layout: MetaLayout,
    poly: HPolytope,
}

impl<'a> ProductY<'a> {
    pub fn new(devs: &'a [DeviationSet]) -> ProductY<'a> {
        let layout = MetaLayout::new(devs);
        let dim = layout.dim();
        let mut poly = HPolytope::new(dim);
        for (p, dev) in devs.iter().enumerate() {
            let offset = layout.offsets[p];
            let (ineq_rows, ineq_rhs) = dev.polytope.ineqs();
            for (row, rhs) in ineq_rows.iter().zip(ineq_rhs) {
                poly.add_ineq(embed_row(row, offset, dim), rhs.clone());
            }
            let (eq_rows, eq_rhs) = dev.polytope.eqs();
            for (row, rhs) in eq_rows.iter().zip(eq_rhs) {
                poly.add_eq(embed_row(row, offset, dim), rhs.clone());
            }
        }
        poly.add_eq(RatVec::unit(dim, dim - 1), Rat::one());
        ProductY { devs, layout, poly }
    }

    pub fn layout(&self) -> &MetaLayout {
        &self.layout
    }
}

fn embed_row(row: &RatVec, offset: usize, dim: usize) -> RatVec {
    let mut out = RatVec::zeros(dim);
    for (i, v) in row.iter().enumerate() {
        if !v.is_zero() {
            out.set(offset + i, v.clone());
        }
    }
    out
}

impl YDomain for ProductY<'_> {
    fn polytope(&self) -> &HPolytope {
        &self.poly
    }

    fn anchor(&self) -> usize {
        self.layout.anchor()
    }

    fn minimize(&self, r: &RatVec) -> Result<(Rat, RatVec), SaddleError> {
        // The product structure separates the minimization per player.
        let mut total = r[self.layout.anchor()].clone();
        let mut witness = RatVec::zeros(self.layout.dim());
        witness.set(self.layout.anchor(), Rat::one());
        for (p, dev) in self.devs.iter().enumerate() {
            let (val, w) = dev
                .minimize(&self.layout.block(r, p))
                .map_err(|e| SaddleError::Oracle(Box::new(e)))?;
            total += &val;
            let offset = self.layout.offsets[p];
            for (i, v) in w.iter().enumerate() {
                if !v.is_zero() {
                    witness.set(offset + i, v.clone());
                }
            }
        }
        Ok((total, witness))
    }
}

struct PurifiedOracle<'a, G: PolyhedralGame> {
    game: &'a G,
    devs: &'a [DeviationSet],
    layout: &'a MetaLayout,
    bound: EncodingLength,
    /// Stashes the first domain error; the saddle loop sees an opaque
    /// oracle failure and the driver surfaces the typed one.
    failure: Option<PhiError>,
}

impl<G: PolyhedralGame> GerOracle for PurifiedOracle<'_, G> {
    type Handle = PureProfile;

    fn respond(
        &mut self,
        y: &RatVec,
    ) -> Result<GerResponse<PureProfile>, Box<dyn std::error::Error + Send + Sync>> {
        match purified_ger(self.game, self.devs, self.layout, y) {
            Ok((profile, row)) => Ok(GerResponse {
                handle: profile,
                row,
            }),
            Err(e) => {
                let msg = e.to_string();
                if self.failure.is_none() {
                    self.failure = Some(e);
                }
                Err(msg.into())
            }
        }
    }

    fn encoding_bound(&self) -> EncodingLength {
        self.bound
    }
}

/// Per-player exact certificate: benefits of every deviation vertex and
/// the LP-maximal benefit over the whole deviation polytope. Both are
/// nonpositive for an equilibrium and agree exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub vertex_benefits: Vec<Vec<Rat>>,
    pub lp_max_benefits: Vec<Rat>,
}

impl Certificate {
    pub fn max_benefit(&self) -> Rat {
        let mut max = self
            .lp_max_benefits
            .first()
            .cloned()
            .unwrap_or_else(Rat::zero);
        for b in self
            .lp_max_benefits
            .iter()
            .chain(self.vertex_benefits.iter().flatten())
        {
            if *b > max {
                max = b.clone();
            }
        }
        max
    }
}

/// A sparse convex combination of pure profiles with its exact
/// certificate.
#[derive(Debug, Clone)]
pub struct MixtureEquilibrium {
    pub support: Vec<(PureProfile, Rat)>,
    pub certificate: Certificate,
    /// The verified meta-game value of the mixture (min over Y).
    pub value_check: Rat,
    pub stats: SaddleStats,
    pub transcripts: Vec<crate::ellipsoid::EllipsoidTranscript>,
}

#[derive(Debug, Clone)]
pub struct PhiOptions {
    pub saddle: SaddleOptions,
}

impl Default for PhiOptions {
    fn default() -> Self {
        PhiOptions {
            saddle: SaddleOptions::default(),
        }
    }
}

/// Theorem-2 driver: wires the purified oracle into the saddle solver
/// over the product deviation domain and attaches an exact certificate.
///
/// Deviation sets that do not contain the identity are replaced by
/// their hull with it; the mixture then certifies against the original
/// sets as well, because each player's best deviation benefit in the
/// hull is pinned to zero by the identity.
pub fn solve_phi_equilibrium<G: PolyhedralGame>(
    game: &G,
    devs: &[DeviationSet],
    opts: &PhiOptions,
) -> Result<MixtureEquilibrium, PhiError> {
    let n = game.num_players();
    if devs.len() != n {
        return Err(PhiError::Mismatch(format!(
            "{} deviation sets for {} players",
            devs.len(),
            n
        )));
    }
    for (p, dev) in devs.iter().enumerate() {
        if dev.matrix_dim != game.strategy_dim(p) {
            return Err(PhiError::Mismatch(format!(
                "deviation matrices for player {} are {}x{} but the strategy dimension is {}",
                p + 1,
                dev.matrix_dim,
                dev.matrix_dim,
                game.strategy_dim(p)
            )));
        }
    }
    let effective: Vec<DeviationSet> = devs
        .iter()
        .map(|d| {
            if d.includes_identity {
                d.clone()
            } else {
                with_identity(d.clone())
            }
        })
        .collect();

    let domain = ProductY::new(&effective);
    let layout = domain.layout().clone();
    let support_target: usize = (0..n).map(|p| game.strategy_dim(p) * game.strategy_dim(p)).sum();
    let mut saddle_opts = opts.saddle.clone();
    saddle_opts.support_target = Some(saddle_opts.support_target.unwrap_or(support_target));

    let mut oracle = PurifiedOracle {
        game,
        devs: &effective,
        layout: &layout,
        bound: game.row_encoding_bound(),
        failure: None,
    };
    let phi_bound = domain.polytope().facet_complexity();
    let solution = match solve_saddle(&mut oracle, &domain, phi_bound, &saddle_opts) {
        Ok(s) => s,
        Err(e) => {
            return Err(match oracle.failure.take() {
                Some(inner) => inner,
                None => PhiError::Saddle(e),
            })
        }
    };

    let support: Vec<(PureProfile, Rat)> = solution
        .mixture
        .iter()
        .map(|(resp, w)| (resp.handle.clone(), w.clone()))
        .collect();

    let certificate = build_certificate(game, devs, &support)?;
    let worst = certificate.max_benefit();
    if worst.is_positive() {
        // Unreachable when every effective set contains the identity;
        // kept as a hard exact gate rather than an assumption.
        return Err(PhiError::CertificateFailure {
            player: 0,
            benefit: worst,
        });
    }
    Ok(MixtureEquilibrium {
        support,
        certificate,
        value_check: solution.value_check,
        stats: solution.stats,
        transcripts: solution.transcripts,
    })
}

/// Exact certificate of the Φ-equilibrium conditions for a mixture:
/// per player, the benefit of every deviation vertex and the LP maximum
/// over the deviation polytope, computed independently and compared.
pub fn build_certificate<G: PolyhedralGame>(
    game: &G,
    devs: &[DeviationSet],
    support: &[(PureProfile, Rat)],
) -> Result<Certificate, PhiError> {
    let n = game.num_players();
    let mut vertex_benefits = Vec::with_capacity(n);
    let mut lp_max_benefits = Vec::with_capacity(n);
    for p in 0..n {
        let d = devs[p].matrix_dim;
        // benefit(B) = <C, B> - baseline with C = sum_s w_s g_p(s) s_p^T.
        let mut c = vec![Rat::zero(); d * d];
        let mut baseline = Rat::zero();
        for (profile, w) in support {
            let g = game.gradient(p, &profile.strategies)?;
            let s = &profile.strategies[p];
            baseline += &(&g.dot(s) * w);
            for b in 0..d {
                if g[b].is_zero() {
                    continue;
                }
                let gw = &g[b] * w;
                for a in 0..d {
                    if !s[a].is_zero() {
                        c[b * d + a] += &(&gw * &s[a]);
                    }
                }
            }
        }
        let c = RatVec::from_entries(c);

        let vertices = devs[p].certificate_vertices()?;
        let mut benefits = Vec::with_capacity(vertices.len());
        let mut vertex_max: Option<Rat> = None;
        for v in &vertices {
            let mat_part = RatVec::from_entries(v.as_slice()[..d * d].to_vec());
            let benefit = mat_part.dot(&c) - &baseline;
            if vertex_max.as_ref().map_or(true, |m| benefit > *m) {
                vertex_max = Some(benefit.clone());
            }
            benefits.push(benefit);
        }

        // Independent route: maximize the same linear functional over
        // the whole polytope by minimizing its negation.
        let objective = c.zero_padded(devs[p].coord_dim());
        let (neg_max, _) = devs[p].minimize(&objective.neg())?;
        let lp_max = -neg_max - &baseline;
        if let Some(vm) = vertex_max {
            if vm != lp_max {
                return Err(PhiError::Mismatch(format!(
                    "certificate routes disagree for player {}: vertex max {vm}, LP max {lp_max}",
                    p + 1
                )));
            }
        }
        vertex_benefits.push(benefits);
        lp_max_benefits.push(lp_max);
    }
    Ok(Certificate {
        vertex_benefits,
        lp_max_benefits,
    })
}

/// Equilibrium file format:
///
/// ```text
/// equilibrium
/// players <n>
/// dims <d_1> ... <d_n>
/// support <k>
/// profile <w> | <v_1 entries> | ... | <v_n entries>
/// value-check <r>
/// max-benefit <p> <r>
/// end
/// ```
pub fn emit_equilibrium(dims: &[usize], eq: &MixtureEquilibrium) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "equilibrium");
    let _ = writeln!(s, "players {}", dims.len());
    let ds: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "dims {}", ds.join(" "));
    let _ = writeln!(s, "support {}", eq.support.len());
    for (profile, w) in &eq.support {
        let mut line = format!("profile {w}");
        for v in &profile.strategies {
            line.push_str(" | ");
            line.push_str(&v.to_string());
        }
        let _ = writeln!(s, "{line}");
    }
    let _ = writeln!(s, "value-check {}", eq.value_check);
    for (p, m) in eq.certificate.lp_max_benefits.iter().enumerate() {
        let _ = writeln!(s, "max-benefit {} {}", p + 1, m);
    }
    let _ = writeln!(s, "end");
    s
}

/// Parses the support of an equilibrium file; certificates are always
/// recomputed rather than trusted.
pub fn parse_equilibrium(input: &str) -> Result<(Vec<usize>, Vec<(PureProfile, Rat)>), PhiError> {
    let err = |line: usize, message: &str| PhiError::Parse {
        line: line + 1,
        message: message.to_string(),
    };
    let mut dims: Option<Vec<usize>> = None;
    let mut support = Vec::new();
    let mut saw_header = false;
    for (ln, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "equilibrium" {
                return Err(err(ln, "expected `equilibrium` header"));
            }
            saw_header = true;
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap() {
            "players" | "support" | "value-check" | "max-benefit" => {}
            "dims" => {
                let ds: Vec<usize> = tokens.map(|t| t.parse().unwrap_or(0)).collect();
                if ds.is_empty() || ds.iter().any(|&d| d == 0) {
                    return Err(err(ln, "bad dims"));
                }
                dims = Some(ds);
            }
            "profile" => {
                let ds = dims.clone().ok_or_else(|| err(ln, "`profile` before `dims`"))?;
                let rest: Vec<&str> = line["profile".len()..].split('|').collect();
                if rest.len() != ds.len() + 1 {
                    return Err(err(ln, "wrong number of strategy blocks"));
                }
                let w: Rat = rest[0]
                    .trim()
                    .parse()
                    .map_err(|e: crate::arith::ParseRatError| err(ln, &e.to_string()))?;
                let mut strategies = Vec::with_capacity(ds.len());
                for (p, block) in rest[1..].iter().enumerate() {
                    let mut entries = Vec::new();
                    for t in block.split_whitespace() {
                        entries.push(
                            t.parse::<Rat>()
                                .map_err(|e| err(ln, &e.to_string()))?,
                        );
                    }
                    if entries.len() != ds[p] {
                        return Err(err(ln, &format!("strategy block {} has wrong length", p + 1)));
                    }
                    strategies.push(RatVec::from_entries(entries));
                }
                support.push((PureProfile { strategies }, w));
            }
            "end" => {
                let ds = dims.ok_or_else(|| err(ln, "missing dims"))?;
                return Ok((ds, support));
            }
            other => return Err(err(ln, &format!("unknown keyword `{other}`"))),
        }
    }
    Err(PhiError::Parse {
        line: 0,
        message: "missing `end`".to_string(),
    })
}
