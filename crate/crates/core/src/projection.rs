//! Fourier–Motzkin elimination with equality substitution.

use num_traits::{Signed, Zero};

use crate::exactnum::Rat;
use crate::polytope::{maximize, Constraint, LpOutcome};

/// `coeffs · x = rhs` and `coeffs · x >= rhs` over `nvars` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub nvars: usize,
    pub eqs: Vec<Constraint>,
    pub ineqs: Vec<Constraint>,
}

const PRUNE_ABOVE: usize = 12;

impl LinearSystem {
    /// Eliminates the first `k` variables. `None` when the system is
    /// detected to be infeasible.
    pub fn eliminate_leading(mut self, k: usize) -> Option<LinearSystem> {
        for _ in 0..k {
            self = self.eliminate_first()?;
        }
        Some(self)
    }

    fn eliminate_first(self) -> Option<LinearSystem> {
        let LinearSystem { nvars, mut eqs, ineqs } = self;
        let mut new_ineqs: Vec<Constraint> = Vec::new();
        if let Some(pos) = eqs.iter().position(|c| !c.coeffs[0].is_zero()) {
            let pivot = eqs.remove(pos);
            let reduce = |c: &Constraint| -> Constraint {
                if c.coeffs[0].is_zero() {
                    return c.clone();
                }
                let f = &c.coeffs[0] / &pivot.coeffs[0];
                Constraint::new(
                    c.coeffs.iter().zip(&pivot.coeffs).map(|(x, p)| x - &f * p).collect(),
                    &c.rhs - &f * &pivot.rhs,
                )
            };
            eqs = eqs.iter().map(reduce).collect();
            new_ineqs = ineqs.iter().map(reduce).collect();
        } else {
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for c in ineqs {
                if c.coeffs[0].is_positive() {
                    pos.push(c);
                } else if c.coeffs[0].is_negative() {
                    neg.push(c);
                } else {
                    new_ineqs.push(c);
                }
            }
            for p in &pos {
                for n in &neg {
                    let fp = -n.coeffs[0].clone();
                    let fnn = p.coeffs[0].clone();
                    new_ineqs.push(Constraint::new(
                        p.coeffs.iter().zip(&n.coeffs).map(|(a, b)| &fp * a + &fnn * b).collect(),
                        &fp * &p.rhs + &fnn * &n.rhs,
                    ));
                }
            }
        }
        let drop_first = |c: Constraint| Constraint::new(c.coeffs[1..].to_vec(), c.rhs);
        let eqs: Vec<Constraint> = eqs.into_iter().map(drop_first).collect();
        let ineqs: Vec<Constraint> = new_ineqs.into_iter().map(drop_first).collect();
        LinearSystem { nvars: nvars - 1, eqs, ineqs }.cleaned()
    }

    fn cleaned(self) -> Option<LinearSystem> {
        let mut eqs: Vec<Constraint> = Vec::new();
        for c in self.eqs {
            if c.coeffs.iter().all(Zero::is_zero) {
                if !c.rhs.is_zero() {
                    return None;
                }
                continue;
            }
            let c = normalize(c);
            if !eqs.contains(&c) {
                eqs.push(c);
            }
        }
        let mut ineqs: Vec<Constraint> = Vec::new();
        for c in self.ineqs {
            if c.coeffs.iter().all(Zero::is_zero) {
                if c.rhs.is_positive() {
                    return None;
                }
                continue;
            }
            let c = normalize(c);
            if let Some(old) = ineqs.iter_mut().find(|o| o.coeffs == c.coeffs) {
                if c.rhs > old.rhs {
                    old.rhs = c.rhs;
                }
            } else {
                ineqs.push(c);
            }
        }
        let mut sys = LinearSystem { nvars: self.nvars, eqs, ineqs };
        if sys.ineqs.len() > PRUNE_ABOVE {
            sys.prune()?;
        }
        Some(sys)
    }

    /// Removes inequalities implied by the others.
    pub fn prune(&mut self) -> Option<()> {
        let mut i = 0;
        while i < self.ineqs.len() {
            let others: Vec<Constraint> =
                self.ineqs.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, c)| c.clone()).collect();
            let neg: Vec<Rat> = self.ineqs[i].coeffs.iter().map(|x| -x.clone()).collect();
            match maximize(&neg, &self.eqs, &others) {
                LpOutcome::Optimal { value, .. } if -value.clone() >= self.ineqs[i].rhs => {
                    self.ineqs.remove(i);
                }
                LpOutcome::Infeasible => return None,
                _ => i += 1,
            }
        }
        Some(())
    }
}

/// Scales so that the first nonzero coefficient has absolute value one.
fn normalize(c: Constraint) -> Constraint {
    let Some(lead) = c.coeffs.iter().find(|x| !x.is_zero()) else { return c };
    let s = lead.abs().recip();
    Constraint::new(c.coeffs.iter().map(|x| x * &s).collect(), &c.rhs * &s)
}
