//! Exact-arithmetic linear programming.
//!
//! A dense two-phase primal simplex over [`Rat`] with Bland's pivoting
//! rule, so the solver is deterministic and terminates on degenerate
//! programs. Variables are free; callers add their own sign constraints.
//! Infeasible programs always come back with a Farkas multiplier vector
//! that combines the constraints into a contradiction `0 <= c`, `c < 0`,
//! checked exactly before it is returned.

use crate::arith::{Rat, RatMat, RatVec};

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpSense {
    Max,
    Min,
}

/// Result of an exact solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// Exact optimum at a basic feasible solution.
    Optimal {
        point: RatVec,
        value: Rat,
        /// Basic column indices of the internal standard form; the set
        /// identifies the returned basic feasible solution.
        basis: Vec<usize>,
    },
    /// Farkas multipliers over `[inequality rows ++ equality rows]`:
    /// entries for inequality rows are nonnegative, the multiplier
    /// combination of the constraint rows is the zero vector, and the
    /// combined right-hand side is negative.
    Infeasible { certificate: RatVec },
    /// Feasible but unbounded in the optimization direction; `ray` is a
    /// recession direction that improves the objective, scaled so its
    /// first nonzero entry has absolute value 1.
    Unbounded { ray: RatVec },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("program has no variables")]
    EmptyProgram,
}

/// Incremental constraint-system builder over a fixed variable count.
#[derive(Debug, Clone)]
pub struct LpProblem {
    dim: usize,
    ineq_rows: Vec<RatVec>,
    ineq_rhs: Vec<Rat>,
    eq_rows: Vec<RatVec>,
    eq_rhs: Vec<Rat>,
}

impl LpProblem {
    pub fn new(dim: usize) -> Self {
        LpProblem {
            dim,
            ineq_rows: Vec::new(),
            ineq_rhs: Vec::new(),
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `row . x <= rhs`
    pub fn add_le(&mut self, row: RatVec, rhs: Rat) {
        assert_eq!(row.dim(), self.dim);
        self.ineq_rows.push(row);
        self.ineq_rhs.push(rhs);
    }

    /// `row . x >= rhs`
    pub fn add_ge(&mut self, row: RatVec, rhs: Rat) {
        self.add_le(row.neg(), -rhs);
    }

    /// `row . x = rhs`
    pub fn add_eq(&mut self, row: RatVec, rhs: Rat) {
        assert_eq!(row.dim(), self.dim);
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    /// `x_i >= 0` for every coordinate.
    pub fn add_nonneg_all(&mut self) {
        for i in 0..self.dim {
            self.add_ge(RatVec::unit(self.dim, i), Rat::zero());
        }
    }

    pub fn maximize(&self, objective: &RatVec) -> Result<LpOutcome, LpError> {
        self.solve(objective, LpSense::Max)
    }

    pub fn minimize(&self, objective: &RatVec) -> Result<LpOutcome, LpError> {
        self.solve(objective, LpSense::Min)
    }

    pub fn solve(&self, objective: &RatVec, sense: LpSense) -> Result<LpOutcome, LpError> {
        lp_solve(
            objective,
            (&RatMat::from_rows(self.ineq_rows.clone()), &RatVec::from_entries(self.ineq_rhs.clone())),
            (&RatMat::from_rows(self.eq_rows.clone()), &RatVec::from_entries(self.eq_rhs.clone())),
            sense,
        )
    }
}

/// Solves `opt objective . x` subject to `A x <= b` and `E x = f` with
/// free variables, entirely in rational arithmetic.
pub fn lp_solve(
    objective: &RatVec,
    ineq: (&RatMat, &RatVec),
    eq: (&RatMat, &RatVec),
    sense: LpSense,
) -> Result<LpOutcome, LpError> {
    let n = objective.dim();
    if n == 0 {
        return Err(LpError::EmptyProgram);
    }
    let (a, b) = ineq;
    let (e, f) = eq;
    if a.rows() > 0 && a.cols() != n {
        return Err(LpError::DimensionMismatch(format!(
            "inequality matrix has {} columns, objective has {}",
            a.cols(),
            n
        )));
    }
    if e.rows() > 0 && e.cols() != n {
        return Err(LpError::DimensionMismatch(format!(
            "equality matrix has {} columns, objective has {}",
            e.cols(),
            n
        )));
    }
    if a.rows() != b.dim() || e.rows() != f.dim() {
        return Err(LpError::DimensionMismatch(
            "constraint row/rhs count mismatch".to_string(),
        ));
    }

    let minimize_obj = match sense {
        LpSense::Min => objective.clone(),
        LpSense::Max => objective.neg(),
    };
    let mut tab = Tableau::build(n, a, b, e, f);
    if let Some(cert) = tab.phase_one() {
        return Ok(LpOutcome::Infeasible { certificate: cert });
    }
    match tab.phase_two(&minimize_obj) {
        PhaseTwo::Optimal => {
            let point = tab.extract_point();
            debug_assert!(exact_feasible(&point, a, b, e, f));
            let value = objective.dot(&point);
            let mut basis = tab.basis.clone();
            basis.sort_unstable();
            Ok(LpOutcome::Optimal { point, value, basis })
        }
        PhaseTwo::Unbounded { entering } => {
            let ray = tab.extract_ray(entering);
            Ok(LpOutcome::Unbounded { ray })
        }
    }
}

/// Exact satisfaction check used by tests and debug assertions.
pub fn exact_feasible(x: &RatVec, a: &RatMat, b: &RatVec, e: &RatMat, f: &RatVec) -> bool {
    for r in 0..a.rows() {
        if a.row_vec(r).dot(x) > b[r] {
            return false;
        }
    }
    for r in 0..e.rows() {
        if e.row_vec(r).dot(x) != f[r] {
            return false;
        }
    }
    true
}

/// Exact verification of a Farkas certificate against the original rows.
pub fn verify_farkas_certificate(
    cert: &RatVec,
    a: &RatMat,
    b: &RatVec,
    e: &RatMat,
    f: &RatVec,
) -> bool {
    let m1 = a.rows();
    if cert.dim() != m1 + e.rows() {
        return false;
    }
    for i in 0..m1 {
        if cert[i].is_negative() {
            return false;
        }
    }
    let n = if m1 > 0 { a.cols() } else { e.cols() };
    let mut combo = RatVec::zeros(n);
    let mut rhs = Rat::zero();
    for i in 0..m1 {
        if cert[i].is_zero() {
            continue;
        }
        combo = combo.add(&a.row_vec(i).scale(&cert[i]));
        rhs += &(&cert[i] * &b[i]);
    }
    for i in 0..e.rows() {
        let c = &cert[m1 + i];
        if c.is_zero() {
            continue;
        }
        combo = combo.add(&e.row_vec(i).scale(c));
        rhs += &(c * &f[i]);
    }
    combo.is_zero() && rhs.is_negative()
}

enum PhaseTwo {
    Optimal,
    Unbounded { entering: usize },
}

/// Dense simplex tableau in standard form: free variables split into
/// positive/negative parts, slacks on inequality rows, artificials where
/// the slack cannot start basic.
struct Tableau {
    n: usize,

    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    cost: Vec<Rat>,
    active: Vec<bool>,
    /// Per original row: sign flip applied to make the rhs nonnegative.
    flip: Vec<bool>,
    /// Per original row: the unit column for that row (artificial column,
    /// or the slack column when it starts basic), used to read off the
    /// simplex multipliers for the Farkas certificate.
    unit_col: Vec<usize>,
    art_start: usize,
}

impl Tableau {
    fn build(n: usize, a: &RatMat, b: &RatVec, e: &RatMat, f: &RatVec) -> Tableau {
        let m1 = a.rows();
        let m2 = e.rows();
        let m = m1 + m2;
        let base_cols = 2 * n + m1;

        let mut flip = vec![false; m];
        let mut art_rows = Vec::new();
        for i in 0..m {
            let rhs_i = if i < m1 { &b[i] } else { &f[i - m1] };
            flip[i] = rhs_i.is_negative();
            // Equality rows and flipped inequality rows need artificials.
            if i >= m1 || flip[i] {
                art_rows.push(i);
            }
        }
        let total_cols = base_cols + art_rows.len();

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = vec![usize::MAX; m];
        let mut unit_col = vec![usize::MAX; m];
        for i in 0..m {
            let mut row = vec![Rat::zero(); total_cols];
            let coeffs = if i < m1 { a.row(i) } else { e.row(i - m1) };
            for (j, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let c = if flip[i] { -c } else { c.clone() };
                row[n + j] = -&c;
                row[j] = c;
            }
            if i < m1 {
                row[2 * n + i] = if flip[i] { -Rat::one() } else { Rat::one() };
                if !flip[i] {
                    basis[i] = 2 * n + i;
                    unit_col[i] = 2 * n + i;
                }
            }
            let r = if i < m1 { b[i].clone() } else { f[i - m1].clone() };
            rhs.push(if flip[i] { -r } else { r });
            rows.push(row);
        }
        for (t, &i) in art_rows.iter().enumerate() {
            let col = base_cols + t;
            rows[i][col] = Rat::one();
            basis[i] = col;
            unit_col[i] = col;
        }

        Tableau {
            n,

            rows,
            rhs,
            basis,
            cost: Vec::new(),
            active: vec![true; total_cols],
            flip,
            unit_col,
            art_start: base_cols,
        }
    }

    fn total_cols(&self) -> usize {
        self.active.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        debug_assert!(!p.is_zero());
        if p != Rat::one() {
            let inv = p.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for r2 in 0..self.rows.len() {
            if r2 == r {
                continue;
            }
            let factor = self.rows[r2][c].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[r2].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &(&factor * pv);
                }
            }
            self.rhs[r2] -= &(&factor * &pivot_rhs);
        }
        let factor = self.cost[c].clone();
        if !factor.is_zero() {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &(&factor * pv);
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule: smallest eligible entering column; leaving row by
    /// minimum ratio with ties broken by smallest basic column index.
    fn run_simplex(&mut self) -> Option<usize> {
        loop {
            let mut entering = None;
            for j in 0..self.total_cols() {
                if self.active[j] && self.cost[j].is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(e) = entering else {
                return None;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let coeff = &self.rows[r][e];
                if !coeff.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / coeff;
                match &leave {
                    None => leave = Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < *lratio
                            || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, e),
                None => return Some(e),
            }
        }
    }

    fn reduce_cost_row(&mut self, raw: Vec<Rat>) {
        self.cost = raw;
        for r in 0..self.rows.len() {
            let cb = self.cost[self.basis[r]].clone();
            if cb.is_zero() {
                continue;
            }
            let row = self.rows[r].clone();
            for (v, pv) in self.cost.iter_mut().zip(&row) {
                if !pv.is_zero() {
                    *v -= &(&cb * pv);
                }
            }
        }
    }

    /// Runs phase one. Returns a verified Farkas certificate when the
    /// constraint system is infeasible, `None` when a basic feasible
    /// solution was found.
    fn phase_one(&mut self) -> Option<RatVec> {
        if self.rows.is_empty() {
            return None;
        }
        let mut raw = vec![Rat::zero(); self.total_cols()];
        for c in self.art_start..self.total_cols() {
            raw[c] = Rat::one();
        }
        self.reduce_cost_row(raw);
        let unbounded = self.run_simplex();
        debug_assert!(unbounded.is_none(), "phase one is bounded below by zero");

        let mut w = Rat::zero();
        for r in 0..self.rows.len() {
            if self.basis[r] >= self.art_start {
                w += &self.rhs[r];
            }
        }
        if w.is_positive() {
            return Some(self.farkas_certificate());
        }

        // Drive remaining zero-valued artificials out of the basis;
        // delete rows that turn out redundant.
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.art_start {
                let col = (0..self.art_start)
                    .find(|&j| self.active[j] && !self.rows[r][j].is_zero());
                match col {
                    Some(c) => self.pivot(r, c),
                    None => {
                        debug_assert!(self.rhs[r].is_zero());
                        self.rows.swap_remove(r);
                        self.rhs.swap_remove(r);
                        self.basis.swap_remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for c in self.art_start..self.total_cols() {
            self.active[c] = false;
        }
        None
    }

    /// Reads the simplex multipliers off the final phase-one cost row and
    /// converts them to nonnegative combination multipliers over the
    /// original rows.
    fn farkas_certificate(&self) -> RatVec {
        let m = self.unit_col.len();
        let mut cert = Vec::with_capacity(m);
        for i in 0..m {
            let col = self.unit_col[i];
            let y_i = if col >= self.art_start {
                Rat::one() - &self.cost[col]
            } else {
                -&self.cost[col]
            };
            let nu = if self.flip[i] { y_i } else { -y_i };
            cert.push(nu);
        }
        RatVec::from_entries(cert)
    }

    fn phase_two(&mut self, minimize_obj: &RatVec) -> PhaseTwo {
        let mut raw = vec![Rat::zero(); self.total_cols()];
        for j in 0..self.n {
            raw[j] = minimize_obj[j].clone();
            raw[self.n + j] = -&minimize_obj[j];
        }
        self.reduce_cost_row(raw);
        match self.run_simplex() {
            None => PhaseTwo::Optimal,
            Some(entering) => PhaseTwo::Unbounded { entering },
        }
    }

    fn extract_point(&self) -> RatVec {
        let mut vals = vec![Rat::zero(); self.total_cols()];
        for r in 0..self.rows.len() {
            vals[self.basis[r]] = self.rhs[r].clone();
        }
        let mut x = Vec::with_capacity(self.n);
        for j in 0..self.n {
            x.push(&vals[j] - &vals[self.n + j]);
        }
        RatVec::from_entries(x)
    }

    fn extract_ray(&self, entering: usize) -> RatVec {
        let mut d = vec![Rat::zero(); self.total_cols()];
        d[entering] = Rat::one();
        for r in 0..self.rows.len() {
            if !self.rows[r][entering].is_zero() {
                d[self.basis[r]] = -&self.rows[r][entering];
            }
        }
        let mut ray = Vec::with_capacity(self.n);
        for j in 0..self.n {
            ray.push(&d[j] - &d[self.n + j]);
        }
        let mut ray = RatVec::from_entries(ray);
        if let Some(first) = ray.iter().position(|v| !v.is_zero()) {
            let scale = ray[first].abs().recip();
            ray = ray.scale(&scale);
        }
        ray
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn empty_mat() -> (RatMat, RatVec) {
        (RatMat::from_rows(vec![]), RatVec::from_entries(vec![]))
    }

    #[test]
    fn box_optimum_at_corner() {
        // max x1 + x2 s.t. x1 <= 1, x2 <= 1, x >= 0
        let mut p = LpProblem::new(2);
        p.add_le(RatVec::from_ints(&[1, 0]), Rat::one());
        p.add_le(RatVec::from_ints(&[0, 1]), Rat::one());
        p.add_nonneg_all();
        let out = p.maximize(&RatVec::from_ints(&[1, 1])).unwrap();
        match out {
            LpOutcome::Optimal { point, value, .. } => {
                assert_eq!(point, RatVec::from_ints(&[1, 1]));
                assert_eq!(value, Rat::from_int(2));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn contradictory_bounds_certificate() {
        // x1 <= -1 and x1 >= 0: multipliers (1,1) combine to 0 <= -1.
        let mut p = LpProblem::new(1);
        p.add_le(RatVec::from_ints(&[1]), Rat::from_int(-1));
        p.add_ge(RatVec::from_ints(&[1]), Rat::zero());
        let out = p.minimize(&RatVec::from_ints(&[0])).unwrap();
        let LpOutcome::Infeasible { certificate } = out else {
            panic!("expected infeasible, got {out:?}");
        };
        let a = RatMat::from_rows(vec![RatVec::from_ints(&[1]), RatVec::from_ints(&[-1])]);
        let b = RatVec::from_entries(vec![Rat::from_int(-1), Rat::zero()]);
        let (e, f) = empty_mat();
        assert!(verify_farkas_certificate(&certificate, &a, &b, &e, &f));
        // The Farkas direction is unique up to scale here: both entries equal.
        assert!(certificate[0].is_positive());
        assert_eq!(certificate[0], certificate[1]);
    }

    #[test]
    fn unbounded_direction() {
        // max x1 s.t. x1 >= 0
        let mut p = LpProblem::new(1);
        p.add_ge(RatVec::from_ints(&[1]), Rat::zero());
        let out = p.maximize(&RatVec::from_ints(&[1])).unwrap();
        match out {
            LpOutcome::Unbounded { ray } => assert_eq!(ray, RatVec::from_ints(&[1])),
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn equality_constrained_optimum() {
        // max x1 + 2 x2 s.t. x1 + x2 = 1, x >= 0
        let mut p = LpProblem::new(2);
        p.add_eq(RatVec::from_ints(&[1, 1]), Rat::one());
        p.add_nonneg_all();
        let out = p.maximize(&RatVec::from_ints(&[1, 2])).unwrap();
        match out {
            LpOutcome::Optimal { point, value, .. } => {
                assert_eq!(point, RatVec::from_ints(&[0, 1]));
                assert_eq!(value, Rat::from_int(2));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn zero_constraints_cases() {
        let (a, b) = empty_mat();
        let (e, f) = empty_mat();
        let out = lp_solve(&RatVec::from_ints(&[1]), (&a, &b), (&e, &f), LpSense::Max).unwrap();
        assert!(matches!(out, LpOutcome::Unbounded { .. }));
        let out = lp_solve(&RatVec::from_ints(&[0, 0]), (&a, &b), (&e, &f), LpSense::Max).unwrap();
        match out {
            LpOutcome::Optimal { point, .. } => assert!(point.is_zero()),
            other => panic!("expected optimal, got {other:?}"),
        }
        let err = lp_solve(&RatVec::from_entries(vec![]), (&a, &b), (&e, &f), LpSense::Max);
        assert_eq!(err.unwrap_err(), LpError::EmptyProgram);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic cycling example for Dantzig's rule; Bland's rule must
        // terminate on it. min -3/4 x1 + 150 x2 - 1/50 x3 + 6 x4
        let mut p = LpProblem::new(4);
        p.add_le(
            RatVec::from_entries(vec![Rat::new(1, 4), Rat::from_int(-60), Rat::new(-1, 25), Rat::from_int(9)]),
            Rat::zero(),
        );
        p.add_le(
            RatVec::from_entries(vec![Rat::new(1, 2), Rat::from_int(-90), Rat::new(-1, 50), Rat::from_int(3)]),
            Rat::zero(),
        );
        p.add_le(RatVec::from_ints(&[0, 0, 1, 0]), Rat::one());
        p.add_nonneg_all();
        let obj = RatVec::from_entries(vec![
            Rat::new(-3, 4),
            Rat::from_int(150),
            Rat::new(-1, 50),
            Rat::from_int(6),
        ]);
        let out = p.minimize(&obj).unwrap();
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, Rat::new(-1, 20)),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn mixed_sign_rhs_feasibility() {
        // x1 >= 2, x1 <= 3 exercises row flipping and artificials.
        let mut p = LpProblem::new(1);
        p.add_ge(RatVec::from_ints(&[1]), Rat::from_int(2));
        p.add_le(RatVec::from_ints(&[1]), Rat::from_int(3));
        let out = p.minimize(&RatVec::from_ints(&[1])).unwrap();
        match out {
            LpOutcome::Optimal { point, .. } => assert_eq!(point, RatVec::from_ints(&[2])),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    fn small_rat(v: i8) -> Rat {
        Rat::new(v as i64, 1)
    }

    proptest! {
        /// Random small programs: the solver halts, is deterministic, and
        /// every outcome verifies exactly against the original data.
        #[test]
        fn prop_outcomes_verify(
            n in 1usize..3,
            coeffs in proptest::collection::vec(-4i8..5, 0..18),
            rhs in proptest::collection::vec(-4i8..5, 0..6),
            obj in proptest::collection::vec(-4i8..5, 1..3),
        ) {
            let n = n.min(obj.len());
            let m = rhs.len().min(coeffs.len() / n.max(1));
            let mut p = LpProblem::new(n);
            for i in 0..m {
                let row = RatVec::from_entries(
                    (0..n).map(|j| small_rat(coeffs[i * n + j])).collect(),
                );
                p.add_le(row, small_rat(rhs[i]));
            }
            // Bound the box so Optimal outcomes dominate the corpus.
            for j in 0..n {
                p.add_le(RatVec::unit(n, j), Rat::from_int(5));
                p.add_ge(RatVec::unit(n, j), Rat::from_int(-5));
            }
            let objective = RatVec::from_entries(obj[..n].iter().map(|&v| small_rat(v)).collect());
            let out1 = p.maximize(&objective).unwrap();
            let out2 = p.maximize(&objective).unwrap();
            prop_assert_eq!(&out1, &out2);

            let a = RatMat::from_rows((0..m).map(|i| {
                RatVec::from_entries((0..n).map(|j| small_rat(coeffs[i * n + j])).collect())
            }).chain((0..n).flat_map(|j| {
                vec![RatVec::unit(n, j), RatVec::unit(n, j).neg()]
            })).collect());
            let b = RatVec::from_entries(
                (0..m).map(|i| small_rat(rhs[i]))
                    .chain((0..n).flat_map(|_| vec![Rat::from_int(5), Rat::from_int(5)]))
                    .collect(),
            );
            let (e, f) = (RatMat::from_rows(vec![]), RatVec::from_entries(vec![]));
            match out1 {
                LpOutcome::Optimal { point, value, .. } => {
                    prop_assert!(exact_feasible(&point, &a, &b, &e, &f));
                    prop_assert_eq!(objective.dot(&point), value);
                }
                LpOutcome::Infeasible { certificate } => {
                    prop_assert!(verify_farkas_certificate(&certificate, &a, &b, &e, &f));
                }
                LpOutcome::Unbounded { .. } => {
                    // Impossible: the box bounds every direction.
                    prop_assert!(false, "bounded program reported unbounded");
                }
            }
        }
    }
}
