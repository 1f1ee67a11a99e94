//! Rational polyhedra in H-representation.
//!
//! An [`HPolytope`] stores `A x <= b` and `E x = f` with tracked facet
//! complexity. Separation, conic-hull homogenization, the algorithmic
//! Carathéodory decomposition, small-dimension vertex enumeration, and
//! the generalized-Farkas case decision all live here. Everything is
//! exact; `Violated` answers always return one of the stored rows (an
//! equality row may come back sign-flipped).

use crate::arith::{inequality_encoding_length, EncodingLength, Rat, RatMat, RatVec};
use crate::lp::{LpOutcome, LpProblem};
use std::collections::HashSet;
use std::fmt::Write as _;

/// Dimension cap for brute-force vertex enumeration.
pub const DEFAULT_ENUM_DIM_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input polyhedron is unbounded")]
    UnboundedInput,
    #[error("point lies outside the set")]
    PointOutsideSet,
    #[error("input set is empty")]
    EmptyInputSet,
    #[error("dimension {dim} exceeds the vertex enumeration limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("invariant violation: {0}")]
    Internal(String),
}

/// Answer of a separation query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparationResult {
    Inside,
    /// `normal . y > offset` for the queried point while
    /// `normal . x <= offset` holds on the whole set.
    Violated { normal: RatVec, offset: Rat },
}

impl SeparationResult {
    pub fn is_inside(&self) -> bool {
        matches!(self, SeparationResult::Inside)
    }
}

/// Rational polyhedron `{x : A x <= b, E x = f}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolytope {
    dim: usize,
    ineq_rows: Vec<RatVec>,
    ineq_rhs: Vec<Rat>,
    eq_rows: Vec<RatVec>,
    eq_rhs: Vec<Rat>,
}

impl HPolytope {
    pub fn new(dim: usize) -> Self {
        HPolytope {
            dim,
            ineq_rows: Vec::new(),
            ineq_rhs: Vec::new(),
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
        }
    }

    /// The probability simplex `{x >= 0, sum x = 1}` in `R^dim`.
    pub fn simplex(dim: usize) -> Self {
        let mut p = HPolytope::new(dim);
        for i in 0..dim {
            p.add_ineq(RatVec::unit(dim, i).neg(), Rat::zero());
        }
        p.add_eq(RatVec::from_entries(vec![Rat::one(); dim]), Rat::one());
        p
    }

    /// The box `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: Rat, hi: Rat) -> Self {
        let mut p = HPolytope::new(dim);
        for i in 0..dim {
            p.add_ineq(RatVec::unit(dim, i), hi.clone());
            p.add_ineq(RatVec::unit(dim, i).neg(), -lo.clone());
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `row . x <= rhs`
    pub fn add_ineq(&mut self, row: RatVec, rhs: Rat) {
        assert_eq!(row.dim(), self.dim, "inequality row dimension");
        self.ineq_rows.push(row);
        self.ineq_rhs.push(rhs);
    }

    /// `row . x = rhs`
    pub fn add_eq(&mut self, row: RatVec, rhs: Rat) {
        assert_eq!(row.dim(), self.dim, "equality row dimension");
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn ineqs(&self) -> (&[RatVec], &[Rat]) {
        (&self.ineq_rows, &self.ineq_rhs)
    }

    pub fn eqs(&self) -> (&[RatVec], &[Rat]) {
        (&self.eq_rows, &self.eq_rhs)
    }

    pub fn num_rows(&self) -> usize {
        self.ineq_rows.len() + self.eq_rows.len()
    }

    /// Maximum encoding length over all stored rows.
    pub fn facet_complexity(&self) -> EncodingLength {
        let mut max = EncodingLength::default();
        for (row, rhs) in self
            .ineq_rows
            .iter()
            .zip(&self.ineq_rhs)
            .chain(self.eq_rows.iter().zip(&self.eq_rhs))
        {
            let len = inequality_encoding_length(row, rhs);
            if len > max {
                max = len;
            }
        }
        max
    }

    pub fn to_lp_problem(&self) -> LpProblem {
        let mut p = LpProblem::new(self.dim);
        for (row, rhs) in self.ineq_rows.iter().zip(&self.ineq_rhs) {
            p.add_le(row.clone(), rhs.clone());
        }
        for (row, rhs) in self.eq_rows.iter().zip(&self.eq_rhs) {
            p.add_eq(row.clone(), rhs.clone());
        }
        p
    }

    /// First violated row in storage order: inequalities, then
    /// equalities (sign-flipped so the returned inequality separates).
    pub fn separate(&self, y: &RatVec) -> Result<SeparationResult, PolytopeError> {
        if y.dim() != self.dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.dim,
                got: y.dim(),
            });
        }
        for (row, rhs) in self.ineq_rows.iter().zip(&self.ineq_rhs) {
            if &row.dot(y) > rhs {
                return Ok(SeparationResult::Violated {
                    normal: row.clone(),
                    offset: rhs.clone(),
                });
            }
        }
        for (row, rhs) in self.eq_rows.iter().zip(&self.eq_rhs) {
            let v = row.dot(y);
            if &v > rhs {
                return Ok(SeparationResult::Violated {
                    normal: row.clone(),
                    offset: rhs.clone(),
                });
            }
            if &v < rhs {
                return Ok(SeparationResult::Violated {
                    normal: row.neg(),
                    offset: -rhs,
                });
            }
        }
        Ok(SeparationResult::Inside)
    }

    pub fn contains(&self, y: &RatVec) -> Result<bool, PolytopeError> {
        Ok(self.separate(y)?.is_inside())
    }

    /// Any exact feasible point, or `None` when the set is empty.
    pub fn feasible_point(&self) -> Option<RatVec> {
        match self
            .to_lp_problem()
            .minimize(&RatVec::zeros(self.dim))
            .ok()?
        {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    /// Embeds into `dim + 1` coordinates with a trailing anchor fixed
    /// to 1 by an equality row.
    pub fn embed_with_anchor(&self) -> HPolytope {
        let d = self.dim + 1;
        let mut out = HPolytope::new(d);
        for (row, rhs) in self.ineq_rows.iter().zip(&self.ineq_rhs) {
            out.add_ineq(row.zero_padded(d), rhs.clone());
        }
        for (row, rhs) in self.eq_rows.iter().zip(&self.eq_rhs) {
            out.add_eq(row.zero_padded(d), rhs.clone());
        }
        out.add_eq(RatVec::unit(d, d - 1), Rat::one());
        out
    }

    /// The lexicographically smallest point, which for a bounded
    /// nonempty set is a vertex. Extra equality rows restrict to a face.
    fn lex_min_point(&self, extra_eqs: &[(RatVec, Rat)]) -> Result<RatVec, PolytopeError> {
        let mut problem = self.to_lp_problem();
        for (row, rhs) in extra_eqs {
            problem.add_eq(row.clone(), rhs.clone());
        }
        let mut point = None;
        for coord in 0..self.dim {
            let obj = RatVec::unit(self.dim, coord);
            match problem.minimize(&obj) {
                Ok(LpOutcome::Optimal { point: p, value, .. }) => {
                    problem.add_eq(obj, value);
                    point = Some(p);
                }
                Ok(LpOutcome::Unbounded { .. }) => return Err(PolytopeError::UnboundedInput),
                Ok(LpOutcome::Infeasible { .. }) => return Err(PolytopeError::EmptyInputSet),
                Err(e) => return Err(PolytopeError::Internal(e.to_string())),
            }
        }
        Ok(point.expect("dim >= 1"))
    }

    /// All vertices in lexicographic order. Only intended for small
    /// dimensions; the brute-force oracle and tests use it.
    pub fn enumerate_vertices(&self) -> Result<Vec<RatVec>, PolytopeError> {
        self.enumerate_vertices_with_limit(DEFAULT_ENUM_DIM_LIMIT)
    }

    pub fn enumerate_vertices_with_limit(
        &self,
        limit: usize,
    ) -> Result<Vec<RatVec>, PolytopeError> {
        if self.dim > limit {
            return Err(PolytopeError::DimensionTooLarge {
                dim: self.dim,
                limit,
            });
        }
        let eq_rank = rank(&self.eq_rows, self.dim);
        let need = self.dim.saturating_sub(eq_rank);
        let m1 = self.ineq_rows.len();
        if need > m1 {
            return Ok(Vec::new());
        }
        let mut seen = HashSet::new();
        let mut vertices = Vec::new();
        let mut combo: Vec<usize> = (0..need).collect();
        loop {
            let mut rows: Vec<RatVec> = self.eq_rows.clone();
            let mut rhs: Vec<Rat> = self.eq_rhs.clone();
            for &i in &combo {
                rows.push(self.ineq_rows[i].clone());
                rhs.push(self.ineq_rhs[i].clone());
            }
            if let LinearSolve::Unique(x) = solve_linear(&rows, &rhs, self.dim) {
                if self.separate(&x)?.is_inside() && seen.insert(x.clone()) {
                    vertices.push(x);
                }
            }
            if need == 0 || !next_combination(&mut combo, m1) {
                break;
            }
        }
        vertices.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
        Ok(vertices)
    }
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Conic hull `R+ P` as an H-representation.
///
/// `anchor` names the coordinate that scales: pass an existing
/// coordinate that is fixed to 1 on `P`, or `P.dim()` to append a fresh
/// one (the polytope is first embedded with the anchor fixed to 1).
/// Each row `a . x <= b` becomes `a . x - b t <= 0`, plus `t >= 0`;
/// rows that collapse to `0 = 0` are dropped. For bounded input the
/// apex `t = 0` admits only the origin.
///
/// Boundedness is verified through recession-cone probes when the
/// dimension is at most [`DEFAULT_ENUM_DIM_LIMIT`]; above that the
/// caller attests it (every constructor in this crate builds bounded
/// sets by construction).
pub fn homogenize(p: &HPolytope, anchor: usize) -> Result<HPolytope, PolytopeError> {
    assert!(anchor <= p.dim(), "anchor out of range");
    if p.dim() <= DEFAULT_ENUM_DIM_LIMIT && !recession_cone_trivial(p) {
        return Err(PolytopeError::UnboundedInput);
    }
    let base = if anchor == p.dim() {
        p.embed_with_anchor()
    } else {
        p.clone()
    };
    let d = base.dim;
    let mut cone = HPolytope::new(d);
    for (row, rhs) in base.ineq_rows.iter().zip(&base.ineq_rhs) {
        let mut r = row.clone();
        if !rhs.is_zero() {
            r.set(anchor, &r[anchor] - rhs);
        }
        if !r.is_zero() {
            cone.add_ineq(r, Rat::zero());
        }
    }
    cone.add_ineq(RatVec::unit(d, anchor).neg(), Rat::zero());
    for (row, rhs) in base.eq_rows.iter().zip(&base.eq_rhs) {
        let mut r = row.clone();
        if !rhs.is_zero() {
            r.set(anchor, &r[anchor] - rhs);
        }
        if !r.is_zero() {
            cone.add_eq(r, Rat::zero());
        }
    }
    Ok(cone)
}

/// True when `{A x <= 0, E x = 0} = {0}`, i.e. the polyhedron is bounded.
fn recession_cone_trivial(p: &HPolytope) -> bool {
    let mut rec = LpProblem::new(p.dim);
    for row in &p.ineq_rows {
        rec.add_le(row.clone(), Rat::zero());
    }
    for row in &p.eq_rows {
        rec.add_eq(row.clone(), Rat::zero());
    }
    for coord in 0..p.dim {
        for sign in [Rat::one(), -Rat::one()] {
            let mut probe = rec.clone();
            let dir = RatVec::unit(p.dim, coord).scale(&sign);
            probe.add_le(dir.clone(), Rat::one());
            match probe.maximize(&dir) {
                Ok(LpOutcome::Optimal { value, .. }) if value.is_positive() => return false,
                Ok(LpOutcome::Optimal { .. }) => {}
                _ => return false,
            }
        }
    }
    true
}

/// Exact convex decomposition of `x` into at most `dim + 1` vertices of
/// `P` by iterative face descent: find a vertex of the minimal face
/// containing `x`, shoot the ray from it through `x` to the boundary,
/// and recurse on the hit point, which lies on a strictly smaller face.
pub fn caratheodory(p: &HPolytope, x: &RatVec) -> Result<Vec<(RatVec, Rat)>, PolytopeError> {
    if !p.separate(x)?.is_inside() {
        return Err(PolytopeError::PointOutsideSet);
    }
    let mut out: Vec<(RatVec, Rat)> = Vec::new();
    let mut current = x.clone();
    let mut scale = Rat::one();
    for _ in 0..=p.dim() + 1 {
        let tight: Vec<(RatVec, Rat)> = p
            .ineq_rows
            .iter()
            .zip(&p.ineq_rhs)
            .filter(|(row, rhs)| &row.dot(&current) == *rhs)
            .map(|(row, rhs)| (row.clone(), rhs.clone()))
            .collect();
        let vertex = p.lex_min_point(&tight)?;
        if vertex == current {
            push_weighted(&mut out, vertex, scale);
            let total: Rat = out.iter().fold(Rat::zero(), |acc, (_, w)| acc + w);
            debug_assert_eq!(total, Rat::one());
            return Ok(out);
        }
        let dir = current.sub(&vertex);
        let mut t_star: Option<Rat> = None;
        for (row, rhs) in p.ineq_rows.iter().zip(&p.ineq_rhs) {
            let slope = row.dot(&dir);
            if slope.is_positive() {
                let room = rhs - &row.dot(&vertex);
                let ratio = room / slope;
                if t_star.as_ref().map_or(true, |t| ratio < *t) {
                    t_star = Some(ratio);
                }
            }
        }
        let t = t_star.ok_or(PolytopeError::UnboundedInput)?;
        debug_assert!(t > Rat::one());
        let theta = t.recip();
        let one_minus = Rat::one() - &theta;
        push_weighted(&mut out, vertex.clone(), &scale * &one_minus);
        scale = &scale * &theta;
        current = vertex.add(&dir.scale(&t));
    }
    Err(PolytopeError::Internal(
        "face descent failed to terminate within dim + 1 steps".to_string(),
    ))
}

fn push_weighted(out: &mut Vec<(RatVec, Rat)>, vertex: RatVec, weight: Rat) {
    if weight.is_zero() {
        return;
    }
    for (v, w) in out.iter_mut() {
        if *v == vertex {
            *w += &weight;
            return;
        }
    }
    out.push((vertex, weight));
}

/// Outcome of the generalized-Farkas decision for compact convex `X`, `Y`
/// and a bilinear form given by `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FarkasCase {
    /// `x` in `X` with `min_{y in Y} x^T A y >= 0`.
    Case1 { x: RatVec },
    /// `y` in the conic hull of `Y` with `max_{x in X} x^T A y <= -1`.
    Case2 { y: RatVec },
}

/// Decides which side of the generalized Farkas alternative holds and
/// returns an exactly verified witness.
pub fn farkas_case(
    a: &RatMat,
    x_set: &HPolytope,
    y_set: &HPolytope,
) -> Result<FarkasCase, PolytopeError> {
    if a.rows() != x_set.dim() {
        return Err(PolytopeError::DimensionMismatch {
            expected: x_set.dim(),
            got: a.rows(),
        });
    }
    if a.cols() != y_set.dim() {
        return Err(PolytopeError::DimensionMismatch {
            expected: y_set.dim(),
            got: a.cols(),
        });
    }
    if x_set.is_empty() || y_set.is_empty() {
        return Err(PolytopeError::EmptyInputSet);
    }

    let y_vertices = y_set.enumerate_vertices()?;
    let mut case1 = x_set.to_lp_problem();
    for yv in &y_vertices {
        case1.add_ge(a.mul_vec(yv), Rat::zero());
    }
    match case1.minimize(&RatVec::zeros(x_set.dim())) {
        Ok(LpOutcome::Optimal { point, .. }) => {
            // Exact verification: min over Y of x^T A y via one LP.
            let coeffs = a.tr_mul_vec(&point);
            match y_set.to_lp_problem().minimize(&coeffs) {
                Ok(LpOutcome::Optimal { value, .. }) if !value.is_negative() => {
                    return Ok(FarkasCase::Case1 { x: point });
                }
                other => {
                    return Err(PolytopeError::Internal(format!(
                        "case-1 witness failed exact verification: {other:?}"
                    )))
                }
            }
        }
        Ok(LpOutcome::Infeasible { .. }) => {}
        other => {
            return Err(PolytopeError::Internal(format!(
                "unexpected case-1 outcome: {other:?}"
            )))
        }
    }

    let x_vertices = x_set.enumerate_vertices()?;
    let cone = homogenize(y_set, y_set.dim())?;
    let mut case2 = cone.to_lp_problem();
    for xv in &x_vertices {
        let row = a.tr_mul_vec(xv).zero_padded(cone.dim());
        case2.add_le(row, -Rat::one());
    }
    match case2.minimize(&RatVec::zeros(cone.dim())) {
        Ok(LpOutcome::Optimal { point, .. }) => {
            let y = RatVec::from_entries(point.as_slice()[..y_set.dim()].to_vec());
            for xv in &x_vertices {
                if a.bilinear(xv, &y) > -Rat::one() {
                    return Err(PolytopeError::Internal(
                        "case-2 witness failed exact verification".to_string(),
                    ));
                }
            }
            Ok(FarkasCase::Case2 { y })
        }
        other => Err(PolytopeError::Internal(format!(
            "generalized Farkas: both cases infeasible ({other:?})"
        ))),
    }
}

/// Result of solving a linear system exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolve {
    Unique(RatVec),
    Underdetermined,
    Inconsistent,
}

/// Gaussian elimination over the rationals.
pub fn solve_linear(rows: &[RatVec], rhs: &[Rat], dim: usize) -> LinearSolve {
    assert_eq!(rows.len(), rhs.len());
    let m = rows.len();
    let mut a: Vec<Vec<Rat>> = rows.iter().map(|r| r.as_slice().to_vec()).collect();
    let mut b: Vec<Rat> = rhs.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        b[row] = &b[row] * &inv;
        for r in 0..m {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            let (target, source) = if r < row {
                let (h, t) = a.split_at_mut(row);
                (&mut h[r], &t[0])
            } else {
                let (h, t) = a.split_at_mut(r);
                (&mut t[0], &h[row])
            };
            for (v, pv) in target.iter_mut().zip(source.iter()) {
                if !pv.is_zero() {
                    *v -= &(&factor * pv);
                }
            }
            let delta = &factor * &b[row];
            b[r] -= &delta;
        }
        pivot_cols.push(col);
        row += 1;
        if row == m {
            break;
        }
    }
    for r in row..m {
        if !b[r].is_zero() {
            return LinearSolve::Inconsistent;
        }
    }
    if pivot_cols.len() < dim {
        return LinearSolve::Underdetermined;
    }
    let mut x = vec![Rat::zero(); dim];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = b[r].clone();
    }
    LinearSolve::Unique(RatVec::from_entries(x))
}

/// Any particular solution of `rows . x = rhs` (free coordinates set to
/// zero), or `None` when the system is inconsistent.
pub fn affine_solution(rows: &[RatVec], rhs: &[Rat], dim: usize) -> Option<RatVec> {
    assert_eq!(rows.len(), rhs.len());
    let m = rows.len();
    let mut a: Vec<Vec<Rat>> = rows.iter().map(|r| r.as_slice().to_vec()).collect();
    let mut b: Vec<Rat> = rhs.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        b[row] = &b[row] * &inv;
        for r in 0..m {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            let (target, source) = if r < row {
                let (h, t) = a.split_at_mut(row);
                (&mut h[r], &t[0])
            } else {
                let (h, t) = a.split_at_mut(r);
                (&mut t[0], &h[row])
            };
            for (v, pv) in target.iter_mut().zip(source.iter()) {
                if !pv.is_zero() {
                    *v -= &(&factor * pv);
                }
            }
            let delta = &factor * &b[row];
            b[r] -= &delta;
        }
        pivot_cols.push(col);
        row += 1;
        if row == m {
            break;
        }
    }
    for r in row..m {
        if !b[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); dim];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = b[r].clone();
    }
    Some(RatVec::from_entries(x))
}

/// Rank of a row set.
pub fn rank(rows: &[RatVec], dim: usize) -> usize {
    let mut a: Vec<Vec<Rat>> = rows.iter().map(|r| r.as_slice().to_vec()).collect();
    let m = a.len();
    let mut row = 0;
    for col in 0..dim {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        for r in row + 1..m {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[row][col];
            for c in col..dim {
                let delta = &factor * &a[row][c];
                a[r][c] -= &delta;
            }
        }
        row += 1;
        if row == m {
            break;
        }
    }
    row
}

/// Basis of the null space `{x : rows . x = 0}`, one column vector per
/// free coordinate, in ascending free-coordinate order.
pub fn kernel_basis(rows: &[RatVec], dim: usize) -> Vec<RatVec> {
    let m = rows.len();
    let mut a: Vec<Vec<Rat>> = rows.iter().map(|r| r.as_slice().to_vec()).collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        for r in 0..m {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            let (target, source) = if r < row {
                let (h, t) = a.split_at_mut(row);
                (&mut h[r], &t[0])
            } else {
                let (h, t) = a.split_at_mut(r);
                (&mut t[0], &h[row])
            };
            for (v, pv) in target.iter_mut().zip(source.iter()) {
                if !pv.is_zero() {
                    *v -= &(&factor * pv);
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == m {
            break;
        }
    }
    let pivot_set: HashSet<usize> = pivot_cols.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..dim {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); dim];
        v[free] = Rat::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -&a[r][free];
        }
        basis.push(RatVec::from_entries(v));
    }
    basis
}

/// Text form shared by the CLI and file formats:
///
/// ```text
/// polytope
/// dim <d>
/// ineq <c_1> ... <c_d> <= <b>     (also accepts >=)
/// eq   <c_1> ... <c_d> =  <b>
/// end
/// ```
pub fn emit_polytope(p: &HPolytope) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "polytope");
    let _ = writeln!(s, "dim {}", p.dim());
    for (row, rhs) in p.ineq_rows.iter().zip(&p.ineq_rhs) {
        let _ = writeln!(s, "ineq {row} <= {rhs}");
    }
    for (row, rhs) in p.eq_rows.iter().zip(&p.eq_rhs) {
        let _ = writeln!(s, "eq {row} = {rhs}");
    }
    let _ = writeln!(s, "end");
    s
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("polytope parse error at line {line}: {message}")]
pub struct PolytopeParseError {
    pub line: usize,
    pub message: String,
}

/// Parses the text form produced by [`emit_polytope`]. Lines starting
/// with `#` are comments.
pub fn parse_polytope(input: &str) -> Result<HPolytope, PolytopeParseError> {
    parse_polytope_lines(&mut input.lines().enumerate())
}

pub(crate) fn parse_polytope_lines<'a, I>(lines: &mut I) -> Result<HPolytope, PolytopeParseError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let err = |line: usize, message: &str| PolytopeParseError {
        line: line + 1,
        message: message.to_string(),
    };
    let mut poly: Option<HPolytope> = None;
    let mut saw_header = false;
    for (ln, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "polytope" {
                return Err(err(ln, "expected `polytope` header"));
            }
            saw_header = true;
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap();
        match keyword {
            "dim" => {
                let d: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(ln, "bad dimension"))?;
                poly = Some(HPolytope::new(d));
            }
            "ineq" | "eq" => {
                let p = poly
                    .as_mut()
                    .ok_or_else(|| err(ln, "row before `dim` line"))?;
                let rest: Vec<&str> = tokens.collect();
                let sep = rest
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "="))
                    .ok_or_else(|| err(ln, "missing relation token"))?;
                if rest.len() != sep + 2 || sep != p.dim() {
                    return Err(err(ln, "wrong coefficient count"));
                }
                let mut coeffs = Vec::with_capacity(sep);
                for t in &rest[..sep] {
                    coeffs.push(t.parse::<Rat>().map_err(|e| err(ln, &e.to_string()))?);
                }
                let bound: Rat = rest[sep + 1]
                    .parse()
                    .map_err(|e: crate::arith::ParseRatError| err(ln, &e.to_string()))?;
                let row = RatVec::from_entries(coeffs);
                match (keyword, rest[sep]) {
                    ("ineq", "<=") => p.add_ineq(row, bound),
                    ("ineq", ">=") => p.add_ineq(row.neg(), -bound),
                    ("eq", "=") => p.add_eq(row, bound),
                    _ => return Err(err(ln, "relation does not match row kind")),
                }
            }
            "end" => {
                return poly.ok_or_else(|| err(ln, "end before dim"));
            }
            other => return Err(err(ln, &format!("unknown keyword `{other}`"))),
        }
    }
    Err(PolytopeParseError {
        line: 0,
        message: "missing `end`".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::RatMat;
    use proptest::prelude::*;

    fn unit_square() -> HPolytope {
        HPolytope::cube(2, Rat::zero(), Rat::one())
    }

    fn rv(vals: &[i64]) -> RatVec {
        RatVec::from_ints(vals)
    }

    #[test]
    fn separate_examples() {
        let sq = unit_square();
        let inside = RatVec::from_entries(vec![Rat::new(1, 2), Rat::new(1, 2)]);
        assert!(sq.separate(&inside).unwrap().is_inside());

        let out = sq.separate(&rv(&[2, 0])).unwrap();
        match out {
            SeparationResult::Violated { normal, offset } => {
                assert_eq!(normal, rv(&[1, 0]));
                assert_eq!(offset, Rat::one());
            }
            _ => panic!("expected violation"),
        }

        let simplex = HPolytope::simplex(2);
        let y = RatVec::from_entries(vec![Rat::new(1, 3), Rat::new(1, 3)]);
        match simplex.separate(&y).unwrap() {
            SeparationResult::Violated { normal, offset } => {
                // Equality row returned in the >= direction.
                assert_eq!(normal, rv(&[-1, -1]));
                assert_eq!(offset, -Rat::one());
            }
            _ => panic!("expected violation"),
        }

        assert!(matches!(
            sq.separate(&rv(&[0])),
            Err(PolytopeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn homogenize_examples() {
        // Segment [0, 1] with a fresh anchor -> {x >= 0, x <= t, t >= 0}.
        let mut seg = HPolytope::new(1);
        seg.add_ineq(rv(&[1]), Rat::one());
        seg.add_ineq(rv(&[-1]), Rat::zero());
        let cone = homogenize(&seg, 1).unwrap();
        assert_eq!(cone.dim(), 2);
        assert!(cone.contains(&rv(&[1, 2])).unwrap());
        assert!(cone.contains(&rv(&[2, 2])).unwrap());
        assert!(!cone.contains(&rv(&[3, 2])).unwrap());
        assert!(cone.contains(&rv(&[0, 0])).unwrap());
        assert!(!cone.contains(&rv(&[1, -1])).unwrap());

        // Probability simplex -> {y >= 0, y1 + y2 = t, t >= 0}.
        let cone = homogenize(&HPolytope::simplex(2), 2).unwrap();
        assert!(cone.contains(&rv(&[2, 1, 3])).unwrap());
        assert!(!cone.contains(&rv(&[2, 2, 3])).unwrap());

        // A point homogenizes to a ray.
        let mut pt = HPolytope::new(1);
        pt.add_eq(rv(&[1]), Rat::one());
        let cone = homogenize(&pt, 1).unwrap();
        for alpha in [0i64, 1, 5] {
            assert!(cone.contains(&rv(&[alpha, alpha])).unwrap());
        }
        assert!(!cone.contains(&rv(&[2, 1])).unwrap());

        // Unbounded input is rejected.
        let mut half = HPolytope::new(1);
        half.add_ineq(rv(&[-1]), Rat::zero());
        assert_eq!(homogenize(&half, 1), Err(PolytopeError::UnboundedInput));
    }

    #[test]
    fn homogenize_membership_properties() {
        let simplex = HPolytope::simplex(3);
        let cone = homogenize(&simplex, 3).unwrap();
        let x = RatVec::from_entries(vec![Rat::new(1, 6), Rat::new(1, 3), Rat::new(1, 2)]);
        for t in [Rat::new(1, 7), Rat::one(), Rat::from_int(9)] {
            let mut scaled = x.scale(&t).as_slice().to_vec();
            scaled.push(t.clone());
            assert!(cone.contains(&RatVec::from_entries(scaled)).unwrap());
        }
        let outside = RatVec::from_entries(vec![
            Rat::new(2, 3),
            Rat::new(2, 3),
            -Rat::new(1, 3),
            Rat::one(),
        ]);
        assert!(!cone.contains(&outside).unwrap());
        // Facet complexity bookkeeping stays within one bound-length of the input.
        let in_bits = simplex.facet_complexity().bits;
        let bound_bits: u64 = 6;
        assert!(cone.facet_complexity().bits <= in_bits + bound_bits + 4);
    }

    #[test]
    fn caratheodory_examples() {
        let sq = unit_square();
        // A vertex decomposes as itself.
        let d = caratheodory(&sq, &rv(&[0, 0])).unwrap();
        assert_eq!(d, vec![(rv(&[0, 0]), Rat::one())]);

        // Center of the square: any exact decomposition with <= 3 vertices.
        let c = RatVec::from_entries(vec![Rat::new(1, 2), Rat::new(1, 2)]);
        let d = caratheodory(&sq, &c).unwrap();
        assert!(d.len() <= 3);
        check_decomposition(&sq, &c, &d);

        // Unique 1-D decomposition of 1/3 on [0, 1].
        let mut seg = HPolytope::new(1);
        seg.add_ineq(rv(&[1]), Rat::one());
        seg.add_ineq(rv(&[-1]), Rat::zero());
        let x = RatVec::from_entries(vec![Rat::new(1, 3)]);
        let d = caratheodory(&seg, &x).unwrap();
        let mut weights: Vec<(RatVec, Rat)> = d.clone();
        weights.sort_by(|a, b| a.0.as_slice().cmp(b.0.as_slice()));
        assert_eq!(
            weights,
            vec![(rv(&[0]), Rat::new(2, 3)), (rv(&[1]), Rat::new(1, 3))]
        );

        assert_eq!(
            caratheodory(&sq, &rv(&[5, 5])),
            Err(PolytopeError::PointOutsideSet)
        );
    }

    fn check_decomposition(p: &HPolytope, x: &RatVec, d: &[(RatVec, Rat)]) {
        let mut total = Rat::zero();
        let mut recon = RatVec::zeros(p.dim());
        let vertices = p.enumerate_vertices().unwrap();
        for (v, w) in d {
            assert!(w.is_positive());
            assert!(vertices.contains(v), "{v:?} is not a vertex");
            total += w;
            recon = recon.add(&v.scale(w));
        }
        assert_eq!(total, Rat::one());
        assert_eq!(&recon, x);
        assert!(d.len() <= p.dim() + 1);
    }

    #[test]
    fn enumerate_vertices_examples() {
        let sq = unit_square();
        let vs = sq.enumerate_vertices().unwrap();
        assert_eq!(vs, vec![rv(&[0, 0]), rv(&[0, 1]), rv(&[1, 0]), rv(&[1, 1])]);

        let vs = HPolytope::simplex(3).enumerate_vertices().unwrap();
        assert_eq!(vs.len(), 3);
        // Lexicographic order: smallest leading coordinates first.
        for (i, v) in vs.iter().enumerate() {
            assert_eq!(*v, RatVec::unit(3, 2 - i));
        }

        // {x >= 0, x1 + 2 x2 <= 2, x1 <= 1}
        let mut p = HPolytope::new(2);
        p.add_ineq(rv(&[-1, 0]), Rat::zero());
        p.add_ineq(rv(&[0, -1]), Rat::zero());
        p.add_ineq(rv(&[1, 2]), Rat::from_int(2));
        p.add_ineq(rv(&[1, 0]), Rat::one());
        let vs = p.enumerate_vertices().unwrap();
        let expect = vec![
            rv(&[0, 0]),
            rv(&[0, 1]),
            rv(&[1, 0]),
            RatVec::from_entries(vec![Rat::one(), Rat::new(1, 2)]),
        ];
        assert_eq!(vs.len(), 4);
        for v in expect {
            assert!(vs.contains(&v));
        }

        let big = HPolytope::cube(13, Rat::zero(), Rat::one());
        assert!(matches!(
            big.enumerate_vertices(),
            Err(PolytopeError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn farkas_examples() {
        // A = [[1]], X = Y = [0, 1]: case 1.
        let mut seg = HPolytope::new(1);
        seg.add_ineq(rv(&[1]), Rat::one());
        seg.add_ineq(rv(&[-1]), Rat::zero());
        let a = RatMat::from_ints(&[&[1]]);
        match farkas_case(&a, &seg, &seg).unwrap() {
            FarkasCase::Case1 { x } => {
                for yv in seg.enumerate_vertices().unwrap() {
                    assert!(!a.bilinear(&x, &yv).is_negative());
                }
            }
            other => panic!("expected case 1, got {other:?}"),
        }

        // A = [[-1]], X = {1}, Y = [1, 2]: case 2 forced.
        let mut x_pt = HPolytope::new(1);
        x_pt.add_eq(rv(&[1]), Rat::one());
        let mut y_seg = HPolytope::new(1);
        y_seg.add_ineq(rv(&[1]), Rat::from_int(2));
        y_seg.add_ineq(rv(&[-1]), -Rat::one());
        let a = RatMat::from_ints(&[&[-1]]);
        match farkas_case(&a, &x_pt, &y_seg).unwrap() {
            FarkasCase::Case2 { y } => {
                assert!(a.bilinear(&rv(&[1]), &y) <= -Rat::one());
            }
            other => panic!("expected case 2, got {other:?}"),
        }

        let empty = {
            let mut p = HPolytope::new(1);
            p.add_ineq(rv(&[1]), -Rat::one());
            p.add_ineq(rv(&[-1]), Rat::zero());
            p
        };
        assert_eq!(
            farkas_case(&a, &empty, &y_seg),
            Err(PolytopeError::EmptyInputSet)
        );
    }

    #[test]
    fn kernel_and_solve() {
        // x + y + z = 0 has a 2-dimensional kernel.
        let rows = vec![rv(&[1, 1, 1])];
        let basis = kernel_basis(&rows, 3);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(rows[0].dot(v).is_zero());
        }

        let rows = vec![rv(&[1, 1]), rv(&[1, -1])];
        let rhs = vec![Rat::from_int(2), Rat::zero()];
        assert_eq!(solve_linear(&rows, &rhs, 2), LinearSolve::Unique(rv(&[1, 1])));
        let rows_bad = vec![rv(&[1, 1]), rv(&[1, -1]), rv(&[2, 0])];
        let rhs_bad = vec![Rat::from_int(2), Rat::zero(), Rat::one()];
        assert_eq!(solve_linear(&rows_bad, &rhs_bad, 2), LinearSolve::Inconsistent);
        assert_eq!(
            solve_linear(&[rv(&[1, 1])], &[Rat::one()], 2),
            LinearSolve::Underdetermined
        );
    }

    #[test]
    fn text_format_round_trip() {
        let mut p = HPolytope::simplex(3);
        p.add_ineq(
            RatVec::from_entries(vec![Rat::new(3, 4), Rat::new(-1, 2), Rat::zero()]),
            Rat::from_int(5),
        );
        let text = emit_polytope(&p);
        let back = parse_polytope(&text).unwrap();
        assert_eq!(back, p);

        let ge = "polytope\ndim 1\nineq 1 >= 2\nend\n";
        let parsed = parse_polytope(ge).unwrap();
        assert!(parsed.contains(&rv(&[3])).unwrap());
        assert!(!parsed.contains(&rv(&[1])).unwrap());

        assert!(parse_polytope("polytope\ndim 1\nineq 1 1 <= 0\nend").is_err());
        assert!(parse_polytope("dim 1\nend").is_err());
    }

    proptest! {
        /// Fuzzed Farkas exclusivity on small instances: the returned
        /// case's condition verifies and the opposite case's fails.
        #[test]
        fn prop_farkas_exclusive(
            entries in proptest::collection::vec(-3i64..4, 4),
            dims in (1usize..3, 1usize..3),
        ) {
            let (dx, dy) = dims;
            let a = RatMat::from_rows(
                (0..dx)
                    .map(|r| RatVec::from_ints(&entries[r * dy..r * dy + dy]))
                    .collect(),
            );
            let x_set = HPolytope::simplex(dx);
            let y_set = HPolytope::simplex(dy);
            let case = farkas_case(&a, &x_set, &y_set).unwrap();
            let x_verts = x_set.enumerate_vertices().unwrap();
            let y_verts = y_set.enumerate_vertices().unwrap();
            let case1_holds = {
                let mut p = x_set.to_lp_problem();
                for yv in &y_verts {
                    p.add_ge(a.mul_vec(yv), Rat::zero());
                }
                matches!(p.minimize(&RatVec::zeros(dx)), Ok(LpOutcome::Optimal { .. }))
            };
            match case {
                FarkasCase::Case1 { x } => {
                    prop_assert!(case1_holds);
                    for yv in &y_verts {
                        prop_assert!(!a.bilinear(&x, yv).is_negative());
                    }
                }
                FarkasCase::Case2 { y } => {
                    prop_assert!(!case1_holds);
                    for xv in &x_verts {
                        prop_assert!(a.bilinear(xv, &y) <= -Rat::one());
                    }
                }
            }
        }

        /// Random dyadic points of the cube decompose exactly.
        #[test]
        fn prop_caratheodory_reconstruction(
            nums in proptest::collection::vec(0i64..9, 3),
        ) {
            let cube = HPolytope::cube(3, Rat::zero(), Rat::one());
            let x = RatVec::from_entries(nums.iter().map(|&n| Rat::new(n, 8)).collect());
            let d = caratheodory(&cube, &x).unwrap();
            let mut total = Rat::zero();
            let mut recon = RatVec::zeros(3);
            for (v, w) in &d {
                prop_assert!(w.is_positive());
                total += w;
                recon = recon.add(&v.scale(w));
            }
            prop_assert_eq!(total, Rat::one());
            prop_assert_eq!(recon, x);
            prop_assert!(d.len() <= 4);
        }
    }
}
