//! Two-phase tableau simplex over the rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::exactnum::{dot, Rat};

/// A linear constraint `coeffs · x (= | >=) rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint { coeffs, rhs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Maximizes `objective · x` over free variables `x` subject to equalities and
/// `>=` inequalities.
pub fn maximize(objective: &[Rat], eqs: &[Constraint], ineqs: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let m_ineq = ineqs.len();
    let ncols = 2 * n + m_ineq;
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(eqs.len() + m_ineq);
    let mut rhs: Vec<Rat> = Vec::with_capacity(eqs.len() + m_ineq);
    for c in eqs {
        let mut r = vec![Rat::zero(); ncols];
        for j in 0..n {
            r[j] = c.coeffs[j].clone();
            r[n + j] = -c.coeffs[j].clone();
        }
        rows.push(r);
        rhs.push(c.rhs.clone());
    }
    for (k, c) in ineqs.iter().enumerate() {
        let mut r = vec![Rat::zero(); ncols];
        for j in 0..n {
            r[j] = c.coeffs[j].clone();
            r[n + j] = -c.coeffs[j].clone();
        }
        r[2 * n + k] = -Rat::one();
        rows.push(r);
        rhs.push(c.rhs.clone());
    }
    let mut cost = vec![Rat::zero(); ncols];
    for j in 0..n {
        cost[j] = objective[j].clone();
        cost[n + j] = -objective[j].clone();
    }
    match standard_form_max(rows, rhs, cost) {
        StdOutcome::Infeasible => LpOutcome::Infeasible,
        StdOutcome::Unbounded => LpOutcome::Unbounded,
        StdOutcome::Optimal(y) => {
            let point: Vec<Rat> = (0..n).map(|j| &y[j] - &y[n + j]).collect();
            LpOutcome::Optimal { value: dot(objective, &point), point }
        }
    }
}

/// Feasibility of the system.
pub fn feasible_point(nvars: usize, eqs: &[Constraint], ineqs: &[Constraint]) -> Option<Vec<Rat>> {
    match maximize(&vec![Rat::zero(); nvars], eqs, ineqs) {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

enum StdOutcome {
    Optimal(Vec<Rat>),
    Infeasible,
    Unbounded,
}

struct Tableau {
    t: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = self.t[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (x, p) in self.t[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule on the given cost vector over the allowed columns.
    fn optimize(&mut self, cost: &[Rat], allowed: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                        d -= &cost[b] * &self.t[i][j];
                    }
                }
                if d.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.t.len() {
                if !self.t[i][j].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.t[i][j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((i, _)) = leave else { return false };
            self.pivot(i, j);
        }
    }
}

fn standard_form_max(mut rows: Vec<Vec<Rat>>, mut rhs: Vec<Rat>, cost: Vec<Rat>) -> StdOutcome {
    let m = rows.len();
    let n = cost.len();
    for i in 0..m {
        if rhs[i].is_negative() {
            for x in rows[i].iter_mut() {
                *x = -x.clone();
            }
            rhs[i] = -rhs[i].clone();
        }
        rows[i].extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
    }
    let mut tab = Tableau { t: rows, rhs, basis: (n..n + m).collect() };
    let mut phase1 = vec![Rat::zero(); n + m];
    for c in phase1.iter_mut().skip(n) {
        *c = -Rat::one();
    }
    tab.optimize(&phase1, n + m);
    if tab.basis.iter().zip(&tab.rhs).any(|(&b, v)| b >= n && !v.is_zero()) {
        return StdOutcome::Infeasible;
    }
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
                i += 1;
            } else {
                tab.t.remove(i);
                tab.rhs.remove(i);
                tab.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    for row in tab.t.iter_mut() {
        row.truncate(n);
    }
    if !tab.optimize(&cost, n) {
        return StdOutcome::Unbounded;
    }
    let mut y = vec![Rat::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.rhs[i].clone();
    }
    StdOutcome::Optimal(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{frac, rat};

    fn c(v: &[i64], r: i64) -> Constraint {
        Constraint::new(v.iter().map(|&x| rat(x)).collect(), rat(r))
    }

    #[test]
    fn small_maximum() {
        // x + y <= 4, x <= 3, y <= 2 with x, y >= 0
        let ineqs = vec![c(&[-1, -1], -4), c(&[-1, 0], -3), c(&[0, -1], -2), c(&[1, 0], 0), c(&[0, 1], 0)];
        let out = maximize(&[rat(2), rat(1)], &[], &ineqs);
        assert_eq!(out.value(), Some(&rat(7)));
    }

    #[test]
    fn fractional_optimum_with_equality() {
        let eqs = vec![c(&[1, 2], 1)];
        let ineqs = vec![c(&[1, 0], 0), c(&[0, 1], 0)];
        let out = maximize(&[rat(0), rat(1)], &eqs, &ineqs);
        assert_eq!(out.value(), Some(&frac(1, 2)));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let ineqs = vec![c(&[1], 1), c(&[-1], 0)];
        assert_eq!(maximize(&[rat(1)], &[], &ineqs), LpOutcome::Infeasible);
        let ineqs = vec![c(&[1], 1)];
        assert_eq!(maximize(&[rat(1)], &[], &ineqs), LpOutcome::Unbounded);
        assert_eq!(maximize(&[rat(-1)], &[], &ineqs).value(), Some(&rat(-1)));
    }

    #[test]
    fn degenerate_cycle_prone_instance_terminates() {
        // Beale's example, rewritten with >= constraints.
        let ineqs = vec![
            Constraint::new(vec![frac(-1, 4), rat(8), rat(1), frac(-9, 1)], rat(0)),
            Constraint::new(vec![frac(-1, 2), rat(12), frac(1, 2), rat(-3)], rat(0)),
            c(&[0, 0, -1, 0], -1),
            c(&[1, 0, 0, 0], 0),
            c(&[0, 1, 0, 0], 0),
            c(&[0, 0, 1, 0], 0),
            c(&[0, 0, 0, 1], 0),
        ];
        let obj = vec![frac(3, 4), rat(-20), frac(1, 2), rat(-6)];
        assert_eq!(maximize(&obj, &[], &ineqs).value(), Some(&frac(5, 4)));
    }

    #[test]
    fn redundant_equalities() {
        let eqs = vec![c(&[1, 1], 2), c(&[2, 2], 4)];
        let out = maximize(&[rat(1), rat(0)], &eqs, &[c(&[0, 1], 0)]);
        assert_eq!(out.value(), Some(&rat(2)));
    }
}
