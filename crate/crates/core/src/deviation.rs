//! Polytopes of linear strategy transformations.
//!
//! A deviation is a `d x d` matrix `B` acting on column strategies,
//! `phi(x) = B x`; entry `B[b, a]` weights source coordinate `a` into
//! target `b`, and matrices are flattened row-major, so coordinate
//! `b * d + a` of the polytope is `B[b][a]`. A [`DeviationSet`] may
//! carry one auxiliary trailing coordinate when it is a lifted convex
//! hull with the identity; the auxiliary coordinate never enters any
//! utility and is stripped whenever matrices are extracted.

use crate::arith::{Rat, RatMat, RatVec};
use crate::lp::LpOutcome;
use crate::polytope::{HPolytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeviationError {
    #[error("matrix point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("deviation matrix lies outside the set")]
    MatrixOutsideSet,
    #[error("no fixed point: the matrix does not map the strategy set to itself")]
    NoFixedPoint,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Lp(#[from] crate::lp::LpError),
    #[error("invariant violation: {0}")]
    Internal(String),
}

#[derive(Debug, Clone)]
enum DevKind {
    /// All column-stochastic matrices.
    Swap,
    /// `B = z e_anchor^T` with `z` ranging over the strategy set.
    Constant { strategy_set: HPolytope },
    /// Lifted hull `conv(inner ∪ {I})` with one trailing lambda.
    Hull { inner: Box<DeviationSet> },
    /// User-supplied H-representation.
    Custom,
}

/// A polytope of linear transformations for one player.
#[derive(Debug, Clone)]
pub struct DeviationSet {
    pub player: usize,
    pub matrix_dim: usize,
    /// Trailing auxiliary coordinates of the polytope (0 or 1).
    pub aux_dims: usize,
    pub polytope: HPolytope,
    pub includes_identity: bool,
    kind: DevKind,
    /// Explicit vertex list when a cheap construction is known.
    vertices: Option<Vec<RatVec>>,
}

/// Flattened row-major identity of size `d`, optionally padded.
pub fn identity_flat(d: usize, total: usize) -> RatVec {
    let mut v = RatVec::zeros(total);
    for i in 0..d {
        v.set(i * d + i, Rat::one());
    }
    v
}

impl DeviationSet {
    /// Coordinate count of the polytope: `d^2 + aux`.
    pub fn coord_dim(&self) -> usize {
        self.matrix_dim * self.matrix_dim + self.aux_dims
    }

    /// Reshapes a point of the polytope into the transformation matrix,
    /// dropping auxiliary coordinates.
    pub fn matrix_of(&self, point: &RatVec) -> Result<RatMat, DeviationError> {
        if point.dim() != self.coord_dim() {
            return Err(DeviationError::DimensionMismatch {
                expected: self.coord_dim(),
                got: point.dim(),
            });
        }
        let d = self.matrix_dim;
        let mut m = RatMat::zeros(d, d);
        for b in 0..d {
            for a in 0..d {
                *m.get_mut(b, a) = point[b * d + a].clone();
            }
        }
        Ok(m)
    }

    /// Exact `min ⟨r, B⟩` over the set with a vertex witness, where `r`
    /// spans the full coordinate space including auxiliaries.
    pub fn minimize(&self, r: &RatVec) -> Result<(Rat, RatVec), DeviationError> {
        if r.dim() != self.coord_dim() {
            return Err(DeviationError::DimensionMismatch {
                expected: self.coord_dim(),
                got: r.dim(),
            });
        }
        match &self.kind {
            DevKind::Swap => {
                // Columns are independent simplices: pick the best target
                // per source coordinate.
                let d = self.matrix_dim;
                let mut witness = RatVec::zeros(d * d);
                let mut total = Rat::zero();
                for a in 0..d {
                    let mut best = (0usize, r[a].clone());
                    for b in 1..d {
                        let v = &r[b * d + a];
                        if *v < best.1 {
                            best = (b, v.clone());
                        }
                    }
                    witness.set(best.0 * d + a, Rat::one());
                    total += &best.1;
                }
                Ok((total, witness))
            }
            DevKind::Hull { inner } => {
                // Linear minimum over a hull: the better of the identity
                // and the inner minimum.
                let d = self.matrix_dim;
                let inner_r = RatVec::from_entries(r.as_slice()[..inner.coord_dim()].to_vec());
                let (inner_val, inner_w) = inner.minimize(&inner_r)?;
                let id = identity_flat(d, d * d);
                let id_val = id.dot(&inner_r) + &r[self.coord_dim() - 1];
                if id_val <= inner_val {
                    let mut w = id.as_slice().to_vec();
                    w.push(Rat::one());
                    Ok((id_val, RatVec::from_entries(w)))
                } else {
                    let mut w = inner_w.as_slice()[..d * d].to_vec();
                    w.push(Rat::zero());
                    Ok((inner_val, RatVec::from_entries(w)))
                }
            }
            DevKind::Constant { strategy_set } => {
                // Only the anchor column is free; optimize z over A_p.
                let d = self.matrix_dim;
                let anchor = constant_anchor(strategy_set, d)?;
                let col: Vec<Rat> = (0..d).map(|b| r[b * d + anchor].clone()).collect();
                match strategy_set
                    .to_lp_problem()
                    .minimize(&RatVec::from_entries(col))?
                {
                    LpOutcome::Optimal { point, value, .. } => {
                        let mut w = RatVec::zeros(d * d);
                        for b in 0..d {
                            w.set(b * d + anchor, point[b].clone());
                        }
                        Ok((value, w))
                    }
                    other => Err(DeviationError::Internal(format!(
                        "constant-deviation minimization not optimal: {other:?}"
                    ))),
                }
            }
            DevKind::Custom => match self.polytope.to_lp_problem().minimize(r)? {
                LpOutcome::Optimal { point, value, .. } => Ok((value, point)),
                other => Err(DeviationError::Internal(format!(
                    "deviation minimization not optimal: {other:?}"
                ))),
            },
        }
    }

    /// Vertex set used for exact certificates: explicit when known,
    /// otherwise enumerated (subject to the dimension cap).
    pub fn certificate_vertices(&self) -> Result<Vec<RatVec>, DeviationError> {
        if let Some(v) = &self.vertices {
            return Ok(v.clone());
        }
        Ok(self.polytope.enumerate_vertices()?)
    }

    /// Checks membership of a flattened matrix (auxiliaries included).
    pub fn contains(&self, point: &RatVec) -> Result<bool, DeviationError> {
        Ok(self.polytope.contains(point)?)
    }

    /// Generating subset sufficient for the brute-force LP rows. For
    /// swap sets the single swaps `a -> b` generate all vertex
    /// constraints (a stochastic vertex's benefit decomposes over
    /// source columns, and diagonal fixes contribute zero); other sets
    /// use their full certificate vertex list.
    pub fn lp_generator_vertices(&self) -> Result<Vec<RatVec>, DeviationError> {
        match &self.kind {
            DevKind::Swap => Ok(swap_generator_vertices(self.matrix_dim)),
            _ => self.certificate_vertices(),
        }
    }
}

/// The anchor column index of a constant-deviation set: the coordinate
/// of the strategy polytope fixed to 1.
fn constant_anchor(strategy_set: &HPolytope, d: usize) -> Result<usize, DeviationError> {
    let (eq_rows, eq_rhs) = strategy_set.eqs();
    for (row, rhs) in eq_rows.iter().zip(eq_rhs) {
        if *rhs == Rat::one() {
            let mut nonzero = row.iter().enumerate().filter(|(_, v)| !v.is_zero());
            if let Some((i, v)) = nonzero.next() {
                if *v == Rat::one() && nonzero.next().is_none() && i < d {
                    return Ok(i);
                }
            }
        }
    }
    Err(DeviationError::Internal(
        "strategy set does not pin any coordinate to 1".to_string(),
    ))
}

/// All column-stochastic `d x d` matrices: `B >= 0`, each column sums
/// to 1. The swap deviations of a `d`-action simplex; contains the
/// identity.
pub fn make_swap_deviations(player: usize, d: usize) -> DeviationSet {
    assert!(d >= 1);
    let dim = d * d;
    let mut poly = HPolytope::new(dim);
    for i in 0..dim {
        poly.add_ineq(RatVec::unit(dim, i).neg(), Rat::zero());
    }
    for a in 0..d {
        let mut row = RatVec::zeros(dim);
        for b in 0..d {
            row.set(b * d + a, Rat::one());
        }
        poly.add_eq(row, Rat::one());
    }
    // Vertices: one target per source column, d^d of them. The single
    // swaps a -> b already generate the certificate checks, but the
    // full set stays cheap at desk scale.
    let mut vertices = vec![RatVec::zeros(dim)];
    for a in 0..d {
        let mut next = Vec::with_capacity(vertices.len() * d);
        for base in &vertices {
            for b in 0..d {
                let mut v = base.clone();
                v.set(b * d + a, Rat::one());
                next.push(v);
            }
        }
        vertices = next;
    }
    DeviationSet {
        player,
        matrix_dim: d,
        aux_dims: 0,
        polytope: poly,
        includes_identity: true,
        kind: DevKind::Swap,
        vertices: Some(vertices),
    }
}

/// Single-swap generators `T_{a -> b}` (map `a` to `b`, fix the rest):
/// enough rows for the brute-force LP, since a general stochastic
/// vertex's benefit decomposes over source columns.
pub fn swap_generator_vertices(d: usize) -> Vec<RatVec> {
    let dim = d * d;
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            let mut v = identity_flat(d, dim);
            v.set(a * d + a, Rat::zero());
            v.set(b * d + a, Rat::one());
            out.push(v);
        }
    }
    out
}

/// Constant deviations `phi(x) = z` for `z` in the strategy set, as the
/// matrices `z e_anchor^T`: every column zero except the anchor column,
/// which ranges over the strategy set. The strategy set must pin its
/// anchor coordinate to 1, so the image always keeps the anchor intact.
pub fn make_constant_deviations(
    player: usize,
    strategy_set: &HPolytope,
    vertices_of_set: Option<&[RatVec]>,
) -> Result<DeviationSet, DeviationError> {
    let d = strategy_set.dim();
    let anchor = constant_anchor(strategy_set, d)?;
    let dim = d * d;
    let mut poly = HPolytope::new(dim);
    // Non-anchor columns vanish.
    for a in 0..d {
        if a == anchor {
            continue;
        }
        for b in 0..d {
            poly.add_eq(RatVec::unit(dim, b * d + a), Rat::zero());
        }
    }
    // The anchor column obeys the strategy system.
    let (ineq_rows, ineq_rhs) = strategy_set.ineqs();
    for (row, rhs) in ineq_rows.iter().zip(ineq_rhs) {
        let mut lifted = RatVec::zeros(dim);
        for b in 0..d {
            if !row[b].is_zero() {
                lifted.set(b * d + anchor, row[b].clone());
            }
        }
        poly.add_ineq(lifted, rhs.clone());
    }
    let (eq_rows, eq_rhs) = strategy_set.eqs();
    for (row, rhs) in eq_rows.iter().zip(eq_rhs) {
        let mut lifted = RatVec::zeros(dim);
        for b in 0..d {
            if !row[b].is_zero() {
                lifted.set(b * d + anchor, row[b].clone());
            }
        }
        poly.add_eq(lifted, rhs.clone());
    }
    let vertices = vertices_of_set.map(|vs| {
        vs.iter()
            .map(|z| {
                let mut v = RatVec::zeros(dim);
                for b in 0..d {
                    if !z[b].is_zero() {
                        v.set(b * d + anchor, z[b].clone());
                    }
                }
                v
            })
            .collect()
    });
    Ok(DeviationSet {
        player,
        matrix_dim: d,
        aux_dims: 0,
        polytope: poly,
        includes_identity: d == 1,
        kind: DevKind::Constant {
            strategy_set: strategy_set.clone(),
        },
        vertices,
    })
}

/// `conv(dev ∪ {I})` as a lifted system with one mixing coordinate:
/// `{(w, λ) : w = λ I + v, v in (1-λ) dev, 0 <= λ <= 1}`. The lifted
/// coordinate stays visible to separation; projecting it away is never
/// needed because rows built from utilities put a zero there.
pub fn with_identity(dev: DeviationSet) -> DeviationSet {
    assert_eq!(dev.aux_dims, 0, "identity hull of a lifted set");
    if dev.includes_identity {
        return dev;
    }
    let d = dev.matrix_dim;
    let dim = d * d + 1;
    let lambda = dim - 1;
    let id = identity_flat(d, d * d);
    let mut poly = HPolytope::new(dim);
    let (ineq_rows, ineq_rhs) = dev.polytope.ineqs();
    for (row, rhs) in ineq_rows.iter().zip(ineq_rhs) {
        // A(w - λI) <= (1-λ) b  ⟺  A w + λ (b - A I) <= b
        let mut lifted = row.zero_padded(dim);
        lifted.set(lambda, rhs - &row.dot(&id));
        poly.add_ineq(lifted, rhs.clone());
    }
    let (eq_rows, eq_rhs) = dev.polytope.eqs();
    for (row, rhs) in eq_rows.iter().zip(eq_rhs) {
        let mut lifted = row.zero_padded(dim);
        lifted.set(lambda, rhs - &row.dot(&id));
        poly.add_eq(lifted, rhs.clone());
    }
    poly.add_ineq(RatVec::unit(dim, lambda), Rat::one());
    poly.add_ineq(RatVec::unit(dim, lambda).neg(), Rat::zero());

    let vertices = dev.vertices.as_ref().map(|vs| {
        let mut out: Vec<RatVec> = vs
            .iter()
            .map(|v| {
                let mut e = v.as_slice().to_vec();
                e.push(Rat::zero());
                RatVec::from_entries(e)
            })
            .collect();
        let mut id_v = id.as_slice().to_vec();
        id_v.push(Rat::one());
        out.push(RatVec::from_entries(id_v));
        out
    });
    DeviationSet {
        player: dev.player,
        matrix_dim: d,
        aux_dims: 1,
        polytope: poly,
        includes_identity: true,
        kind: DevKind::Hull {
            inner: Box::new(dev),
        },
        vertices,
    }
}

/// Wraps a user-supplied H-representation over flattened matrices
/// (optionally with trailing auxiliary coordinates).
pub fn custom_deviations(
    player: usize,
    matrix_dim: usize,
    aux_dims: usize,
    polytope: HPolytope,
) -> Result<DeviationSet, DeviationError> {
    let expected = matrix_dim * matrix_dim + aux_dims;
    if polytope.dim() != expected {
        return Err(DeviationError::DimensionMismatch {
            expected,
            got: polytope.dim(),
        });
    }
    let mut id = identity_flat(matrix_dim, expected);
    if aux_dims == 1 {
        // Lifted custom sets follow the hull convention: identity has
        // mixing coordinate 1.
        id.set(expected - 1, Rat::one());
    }
    let includes_identity = polytope.contains(&id)?;
    Ok(DeviationSet {
        player,
        matrix_dim,
        aux_dims,
        polytope,
        includes_identity,
        kind: DevKind::Custom,
        vertices: None,
    })
}

/// Exact fixed point of `B` inside the strategy set: an `x` with
/// `B x = x` found from the equality rows `(B - I) x = 0`.
pub fn fixed_point(
    dev: &DeviationSet,
    b_flat: &RatVec,
    strategy_set: &HPolytope,
) -> Result<RatVec, DeviationError> {
    if !dev.contains(b_flat)? {
        return Err(DeviationError::MatrixOutsideSet);
    }
    fixed_point_scaled(dev, b_flat, &Rat::one(), strategy_set)
}

/// Fixed point against a positively scaled matrix block: solves
/// `blk x = alpha x` with `x` in the strategy set, which for
/// `blk = alpha B` is exactly `B x = x` without ever dividing the
/// (possibly long) scale out of the coefficients. Membership of
/// `blk / alpha` in the deviation set is the caller's obligation.
pub fn fixed_point_scaled(
    dev: &DeviationSet,
    blk: &RatVec,
    alpha: &Rat,
    strategy_set: &HPolytope,
) -> Result<RatVec, DeviationError> {
    assert!(alpha.is_positive(), "scale must be positive");
    let b = dev.matrix_of(blk)?;
    let d = dev.matrix_dim;
    if strategy_set.dim() != d {
        return Err(DeviationError::DimensionMismatch {
            expected: d,
            got: strategy_set.dim(),
        });
    }
    let mut rows: Vec<RatVec> = Vec::with_capacity(d + strategy_set.eqs().0.len());
    let mut rhs: Vec<Rat> = Vec::with_capacity(rows.capacity());
    for r in 0..d {
        let mut row = Vec::with_capacity(d);
        for c in 0..d {
            let mut v = b.get(r, c).clone();
            if r == c {
                v -= alpha;
            }
            row.push(v);
        }
        rows.push(RatVec::from_entries(row));
        rhs.push(Rat::zero());
    }
    let (eq_rows, eq_rhs) = strategy_set.eqs();
    rows.extend(eq_rows.iter().cloned());
    rhs.extend(eq_rhs.iter().cloned());

    // Fast path: a unique solution of the equality system that happens
    // to satisfy the inequalities is the fixed point without any LP.
    if let crate::polytope::LinearSolve::Unique(x) =
        crate::polytope::solve_linear(&rows, &rhs, d)
    {
        if strategy_set.contains(&x)? {
            return Ok(x);
        }
        return Err(DeviationError::NoFixedPoint);
    }

    let mut lp = strategy_set.to_lp_problem();
    for (row, r) in rows.iter().zip(&rhs).take(d) {
        lp.add_eq(row.clone(), r.clone());
    }
    match lp.minimize(&RatVec::zeros(d))? {
        LpOutcome::Optimal { point, .. } => Ok(point),
        LpOutcome::Infeasible { .. } => Err(DeviationError::NoFixedPoint),
        LpOutcome::Unbounded { .. } => Err(DeviationError::Internal(
            "fixed-point program unbounded on a bounded set".to_string(),
        )),
    }
}

/// Deviation-set file format, mirroring the polytope format with a
/// header naming the player and matrix dimension:
///
/// ```text
/// deviation-set
/// player <p>            (1-based)
/// matrix-dim <d>
/// aux <k>               (optional, defaults to 0)
/// # orientation: coordinate b*d + a is B[b][a]; phi maps x to B x
/// polytope
/// dim <d*d + k>
/// ...
/// end
/// ```
pub fn emit_deviation_set(dev: &DeviationSet) -> String {
    let mut s = String::new();
    s.push_str("deviation-set\n");
    s.push_str(&format!("player {}\n", dev.player + 1));
    s.push_str(&format!("matrix-dim {}\n", dev.matrix_dim));
    if dev.aux_dims > 0 {
        s.push_str(&format!("aux {}\n", dev.aux_dims));
    }
    s.push_str("# orientation: coordinate b*d + a is B[b][a]; phi maps x to B x\n");
    s.push_str(&crate::polytope::emit_polytope(&dev.polytope));
    s
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("deviation-set parse error at line {line}: {message}")]
pub struct DeviationParseError {
    pub line: usize,
    pub message: String,
}

/// Parses a deviation-set file into a custom set for the named player.
pub fn parse_deviation_set(input: &str) -> Result<(usize, DeviationSet), DeviationParseError> {
    let err = |line: usize, message: &str| DeviationParseError {
        line: line + 1,
        message: message.to_string(),
    };
    let mut lines = input.lines().enumerate();
    let mut player: Option<usize> = None;
    let mut matrix_dim: Option<usize> = None;
    let mut aux = 0usize;
    let mut saw_header = false;
    loop {
        let Some((ln, raw)) = lines.next() else {
            return Err(err(0, "missing polytope block"));
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "deviation-set" {
                return Err(err(ln, "expected `deviation-set` header"));
            }
            saw_header = true;
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap() {
            "player" => {
                player = Some(
                    tokens
                        .next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .filter(|&p| p >= 1)
                        .ok_or_else(|| err(ln, "bad player index"))?,
                );
            }
            "matrix-dim" => {
                matrix_dim = Some(
                    tokens
                        .next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .filter(|&d| d >= 1)
                        .ok_or_else(|| err(ln, "bad matrix dimension"))?,
                );
            }
            "aux" => {
                aux = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(ln, "bad aux count"))?;
            }
            "polytope" => {
                let player = player.ok_or_else(|| err(ln, "missing `player`"))? - 1;
                let d = matrix_dim.ok_or_else(|| err(ln, "missing `matrix-dim`"))?;
                // Re-feed the header line for the polytope parser.
                let mut chained =
                    std::iter::once((ln, "polytope")).chain(lines.by_ref());
                let poly = crate::polytope::parse_polytope_lines(&mut chained).map_err(|e| {
                    DeviationParseError {
                        line: e.line,
                        message: e.message,
                    }
                })?;
                let dev = custom_deviations(player, d, aux, poly).map_err(|e| DeviationParseError {
                    line: ln + 1,
                    message: e.to_string(),
                })?;
                return Ok((player, dev));
            }
            other => return Err(err(ln, &format!("unknown keyword `{other}`"))),
        }
    }
}

/// Test support: checks that every certificate vertex maps every
/// strategy vertex back into the strategy set.
pub fn validate_self_map(
    dev: &DeviationSet,
    strategy_set: &HPolytope,
    strategy_vertices: &[RatVec],
) -> Result<(), DeviationError> {
    for bv in dev.certificate_vertices()? {
        let b = dev.matrix_of(&bv)?;
        for s in strategy_vertices {
            let image = b.mul_vec(s);
            if !strategy_set.contains(&image)? {
                return Err(DeviationError::Internal(format!(
                    "vertex image {image:?} escapes the strategy set"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_set_examples() {
        let dev = make_swap_deviations(0, 2);
        let id = identity_flat(2, 4);
        assert!(dev.contains(&id).unwrap());
        assert!(dev.includes_identity);
        // All-ones/d matrix is stochastic.
        let half = RatVec::from_entries(vec![Rat::new(1, 2); 4]);
        assert!(dev.contains(&half).unwrap());
        // A negative entry violates separation.
        let bad = RatVec::from_entries(vec![
            -Rat::one(),
            Rat::zero(),
            Rat::from_int(2),
            Rat::one(),
        ]);
        assert!(!dev.contains(&bad).unwrap());
        // Vertex count d^d, all inside.
        let vs = dev.certificate_vertices().unwrap();
        assert_eq!(vs.len(), 4);
        for v in &vs {
            assert!(dev.contains(v).unwrap());
        }
        // Cross-check against generic enumeration.
        let mut generic = dev.polytope.enumerate_vertices().unwrap();
        let mut explicit = vs.clone();
        generic.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
        explicit.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
        assert_eq!(generic, explicit);
    }

    #[test]
    fn swap_minimize_matches_vertices() {
        let dev = make_swap_deviations(0, 3);
        let r = RatVec::from_ints(&[3, -1, 2, 0, 5, -4, 1, 1, 1]);
        let (val, w) = dev.minimize(&r).unwrap();
        assert!(dev.contains(&w).unwrap());
        assert_eq!(r.dot(&w), val);
        for v in dev.certificate_vertices().unwrap() {
            assert!(r.dot(&v) >= val);
        }
    }

    #[test]
    fn constant_set_examples() {
        let simplex_anchored = HPolytope::simplex(2).embed_with_anchor();
        let verts = simplex_anchored.enumerate_vertices().unwrap();
        let dev = make_constant_deviations(0, &simplex_anchored, Some(&verts)).unwrap();
        assert_eq!(dev.matrix_dim, 3);
        assert!(!dev.includes_identity);
        let id = identity_flat(3, 9);
        assert!(!dev.contains(&id).unwrap());

        // Constant-to-vertex map is in the set and fixes that vertex.
        let z = &verts[0];
        let mut bv = RatVec::zeros(9);
        for b in 0..3 {
            bv.set(b * 3 + 2, z[b].clone());
        }
        assert!(dev.contains(&bv).unwrap());
        let fp = fixed_point(&dev, &bv, &simplex_anchored).unwrap();
        assert_eq!(&fp, z);
    }

    #[test]
    fn fixed_point_examples() {
        let simplex = HPolytope::simplex(2);
        let dev = make_swap_deviations(0, 2);
        // Identity: any point of the simplex qualifies; verify B x = x.
        let id = identity_flat(2, 4);
        let fp = fixed_point(&dev, &id, &simplex).unwrap();
        assert!(simplex.contains(&fp).unwrap());

        // The swap matrix forces the symmetric point.
        let swap = RatVec::from_ints(&[0, 1, 1, 0]);
        let fp = fixed_point(&dev, &swap, &simplex).unwrap();
        assert_eq!(
            fp,
            RatVec::from_entries(vec![Rat::new(1, 2), Rat::new(1, 2)])
        );

        // Symmetric column-stochastic matrix with mixing 1/3, 2/3.
        let b = RatVec::from_entries(vec![
            Rat::new(1, 3),
            Rat::new(2, 3),
            Rat::new(2, 3),
            Rat::new(1, 3),
        ]);
        let fp = fixed_point(&dev, &b, &simplex).unwrap();
        assert_eq!(
            fp,
            RatVec::from_entries(vec![Rat::new(1, 2), Rat::new(1, 2)])
        );
    }

    #[test]
    fn with_identity_examples() {
        let anchored = HPolytope::simplex(2).embed_with_anchor();
        let verts = anchored.enumerate_vertices().unwrap();
        let constant = make_constant_deviations(0, &anchored, Some(&verts)).unwrap();
        let hull = with_identity(constant.clone());
        assert!(hull.includes_identity);
        assert_eq!(hull.aux_dims, 1);

        // I is now a member (lambda = 1).
        let mut id = identity_flat(3, 10);
        id.set(9, Rat::one());
        assert!(hull.contains(&id).unwrap());

        // Original points survive on the lambda = 0 slice.
        for v in constant.certificate_vertices().unwrap() {
            let mut lifted = v.as_slice().to_vec();
            lifted.push(Rat::zero());
            assert!(hull.contains(&RatVec::from_entries(lifted)).unwrap());
        }

        // Midpoint (I + constant)/2 at lambda = 1/2.
        let c0 = &constant.certificate_vertices().unwrap()[0];
        let mid_mat = identity_flat(3, 9).add(c0).scale(&Rat::new(1, 2));
        let mut mid = mid_mat.as_slice().to_vec();
        mid.push(Rat::new(1, 2));
        assert!(hull.contains(&RatVec::from_entries(mid)).unwrap());

        // Wrapping an identity-bearing set is the identity operation.
        let swap = make_swap_deviations(0, 2);
        let same = with_identity(swap);
        assert_eq!(same.aux_dims, 0);
    }

    #[test]
    fn hull_minimize_agrees_with_vertices() {
        let anchored = HPolytope::simplex(2).embed_with_anchor();
        let verts = anchored.enumerate_vertices().unwrap();
        let hull = with_identity(make_constant_deviations(0, &anchored, Some(&verts)).unwrap());
        let r = RatVec::from_ints(&[1, -2, 0, 3, 1, -1, 0, 0, 2, 0]);
        let (val, w) = hull.minimize(&r).unwrap();
        assert!(hull.contains(&w).unwrap());
        assert_eq!(r.dot(&w), val);
        for v in hull.certificate_vertices().unwrap() {
            assert!(r.dot(&v) >= val);
        }
    }

    #[test]
    fn self_map_validation() {
        let simplex = HPolytope::simplex(3);
        let dev = make_swap_deviations(0, 3);
        let verts = simplex.enumerate_vertices().unwrap();
        validate_self_map(&dev, &simplex, &verts).unwrap();
    }
}

#[cfg(test)]
mod format_tests {
    use super::*;

    #[test]
    fn deviation_file_round_trip() {
        let dev = make_swap_deviations(1, 2);
        let text = emit_deviation_set(&dev);
        let (player, parsed) = parse_deviation_set(&text).unwrap();
        assert_eq!(player, 1);
        assert_eq!(parsed.matrix_dim, 2);
        assert_eq!(parsed.aux_dims, 0);
        assert!(parsed.includes_identity);
        // Same membership behavior as the original set.
        let id = identity_flat(2, 4);
        assert!(parsed.contains(&id).unwrap());
        let bad = RatVec::from_ints(&[2, 0, -1, 1]);
        assert_eq!(parsed.contains(&bad).unwrap(), dev.contains(&bad).unwrap());

        assert!(parse_deviation_set("deviation-set\nplayer 1\nend").is_err());
        assert!(parse_deviation_set("polytope\ndim 1\nend").is_err());
    }
}
