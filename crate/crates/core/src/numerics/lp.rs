//! Two-phase dense simplex over [`Rat`] with Bland's pivot rule.
//!
//! Problems are always stated as maximization. Variables carry a finite lower
//! bound (default 0) and no upper bound; upper bounds are written as rows.

use super::{NumericsError, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// `maximize objective·x` subject to the rows and `x ≥ lower_bounds`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<Rat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    /// Meaningful only for `Optimal`; zero otherwise.
    pub objective: Rat,
    /// Meaningful only for `Optimal`; empty otherwise.
    pub solution: Vec<Rat>,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<Rat>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![Rat::zero(); n],
        }
    }

    /// A pure feasibility problem over `n` variables.
    pub fn feasibility(n: usize) -> Self {
        Self::new(vec![Rat::zero(); n])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<Rat>, relation: Relation, rhs: Rat) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Adds a row given as sparse `(column, coefficient)` pairs.
    pub fn add_sparse(&mut self, entries: &[(usize, Rat)], relation: Relation, rhs: Rat) {
        let mut coeffs = vec![Rat::zero(); self.num_vars()];
        for (j, c) in entries {
            coeffs[*j] += c;
        }
        self.add(coeffs, relation, rhs);
    }

    fn validate(&self) -> Result<(), NumericsError> {
        let n = self.num_vars();
        if self.lower_bounds.len() != n {
            return Err(NumericsError::MalformedLp(format!(
                "{} lower bounds for {n} variables",
                self.lower_bounds.len()
            )));
        }
        for (r, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(NumericsError::MalformedLp(format!(
                    "row {r} has width {} but objective has {n}",
                    row.coeffs.len()
                )));
            }
        }
        Ok(())
    }

    /// Checks `x` against every row and bound exactly.
    pub fn is_satisfied_by(&self, x: &[Rat]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        if x.iter().zip(&self.lower_bounds).any(|(v, l)| v < l) {
            return false;
        }
        self.constraints.iter().all(|row| {
            let lhs: Rat = row
                .coeffs
                .iter()
                .zip(x)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, v)| c * v)
                .sum();
            match row.relation {
                Relation::Eq => lhs == row.rhs,
                Relation::Le => lhs <= row.rhs,
                Relation::Ge => lhs >= row.rhs,
            }
        })
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B B^-1 A_j` for the active phase.
    reduced: Vec<Rat>,
    /// Current objective value of the active phase.
    value: Rat,
    blocked: Vec<bool>,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.blocked.len()
    }

    fn load_costs(&mut self, costs: &[Rat]) {
        self.reduced = costs.to_vec();
        self.value = Rat::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[r].iter().enumerate() {
                if !a.is_zero() {
                    self.reduced[j] -= cb * a;
                }
            }
            self.value += cb * &self.rhs[r];
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let p = self.rows[pr][pc].clone();
        if p != Rat::one() {
            for a in self.rows[pr].iter_mut() {
                if !a.is_zero() {
                    *a = &*a / &p;
                }
            }
            self.rhs[pr] = &self.rhs[pr] / &p;
        }
        let nz: Vec<usize> = (0..self.width())
            .filter(|&j| !self.rows[pr][j].is_zero())
            .collect();
        let prow = self.rows[pr].clone();
        let prhs = self.rhs[pr].clone();
        for r in 0..self.rows.len() {
            if r == pr {
                continue;
            }
            let f = self.rows[r][pc].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[r][j] -= d;
            }
            self.rhs[r] -= &f * &prhs;
        }
        let f = self.reduced[pc].clone();
        if !f.is_zero() {
            for &j in &nz {
                let d = &f * &prow[j];
                self.reduced[j] -= d;
            }
            self.value += &f * &prhs;
        }
        self.basis[pr] = pc;
    }

    /// Bland's rule: lowest-index improving column enters, ties in the ratio
    /// test go to the lowest-index basic variable.
    fn run(&mut self) -> Outcome {
        loop {
            let entering =
                (0..self.width()).find(|&j| !self.blocked[j] && self.reduced[j].is_positive());
            let Some(pc) = entering else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][pc];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        if ratio < bv || (ratio == bv && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
            match best {
                None => return Outcome::Unbounded,
                Some((pr, _)) => self.pivot(pr, pc),
            }
        }
    }
}

/// Solves `lp` exactly. Deterministic: the same input always produces the
/// same basis sequence and solution.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpResult, NumericsError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Shift x = l + x' so every structural variable is >= 0, then make every
    // right-hand side non-negative.
    let mut rows: Vec<(Vec<Rat>, Relation, Rat)> = Vec::with_capacity(lp.constraints.len());
    for c in &lp.constraints {
        let shift: Rat = c
            .coeffs
            .iter()
            .zip(&lp.lower_bounds)
            .filter(|(a, l)| !a.is_zero() && !l.is_zero())
            .map(|(a, l)| a * l)
            .sum();
        let rhs = &c.rhs - &shift;
        if rhs.is_negative() {
            let rel = match c.relation {
                Relation::Eq => Relation::Eq,
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
            };
            rows.push((c.coeffs.iter().map(|a| -a).collect(), rel, -rhs));
        } else {
            rows.push((c.coeffs.clone(), c.relation, rhs));
        }
    }

    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let width = n + n_slack + n_art;
    let art_start = n + n_slack;

    let mut t = Tableau {
        rows: Vec::with_capacity(rows.len()),
        rhs: Vec::with_capacity(rows.len()),
        basis: Vec::with_capacity(rows.len()),
        reduced: Vec::new(),
        value: Rat::zero(),
        blocked: vec![false; width],
    };
    let (mut s, mut a) = (n, art_start);
    for (coeffs, rel, rhs) in rows {
        let mut row = coeffs;
        row.resize(width, Rat::zero());
        match rel {
            Relation::Le => {
                row[s] = Rat::one();
                t.basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -Rat::one();
                s += 1;
                row[a] = Rat::one();
                t.basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = Rat::one();
                t.basis.push(a);
                a += 1;
            }
        }
        t.rows.push(row);
        t.rhs.push(rhs);
    }

    if n_art > 0 {
        let mut phase1 = vec![Rat::zero(); width];
        for c in phase1.iter_mut().skip(art_start) {
            *c = -Rat::one();
        }
        t.load_costs(&phase1);
        // Phase 1 is bounded above by 0.
        let _ = t.run();
        if t.value.is_negative() {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                objective: Rat::zero(),
                solution: Vec::new(),
            });
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= art_start {
                match (0..art_start).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(j) => {
                        t.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        t.rows.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
        for b in t.blocked.iter_mut().skip(art_start) {
            *b = true;
        }
    }

    let mut costs = vec![Rat::zero(); width];
    costs[..n].clone_from_slice(&lp.objective);
    t.load_costs(&costs);
    if let Outcome::Unbounded = t.run() {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            objective: Rat::zero(),
            solution: Vec::new(),
        });
    }

    let mut x = lp.lower_bounds.clone();
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = &lp.lower_bounds[b] + &t.rhs[r];
        }
    }
    if !lp.is_satisfied_by(&x) {
        return Err(NumericsError::Verification(
            "optimal basis failed re-substitution".into(),
        ));
    }
    let objective = lp
        .objective
        .iter()
        .zip(&x)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, v)| c * v)
        .sum();
    Ok(LpResult {
        status: LpStatus::Optimal,
        objective,
        solution: x,
    })
}
