//! Polytopes `{x : A x >= b}` with exact vertex enumeration, face tests and
//! redundancy detection.

pub mod simplex;

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{dot, Rat, RatMatrix};
pub use simplex::{feasible_point, maximize, Constraint, LpOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    a: RatMatrix,
    b: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Vertex {
    pub point: Vec<Rat>,
    pub tight: BTreeSet<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RowRedundancy {
    pub essential: BTreeSet<usize>,
    pub redundant: BTreeSet<usize>,
    pub trivially_satisfied: BTreeSet<usize>,
    pub trivially_violated: BTreeSet<usize>,
}

impl HPolytope {
    pub fn new(a: RatMatrix, b: Vec<Rat>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch(format!("{} rows but {} right-hand sides", a.nrows(), b.len())));
        }
        Ok(HPolytope { a, b })
    }

    pub fn a(&self) -> &RatMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rat] {
        &self.b
    }

    pub fn ambient_dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn nrows(&self) -> usize {
        self.a.nrows()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        (0..self.nrows()).all(|i| dot(self.a.row(i), x) >= self.b[i])
    }

    pub fn tight_rows(&self, x: &[Rat]) -> BTreeSet<usize> {
        (0..self.nrows()).filter(|&i| dot(self.a.row(i), x) == self.b[i]).collect()
    }

    fn row_constraint(&self, i: usize) -> Constraint {
        Constraint::new(self.a.row(i).to_vec(), self.b[i].clone())
    }

    pub fn is_empty(&self) -> bool {
        let ineqs: Vec<Constraint> = (0..self.nrows()).map(|i| self.row_constraint(i)).collect();
        feasible_point(self.ambient_dim(), &[], &ineqs).is_none()
    }

    /// Minimum of `form · x` over the polytope.
    pub fn minimize(&self, form: &[Rat]) -> LpOutcome {
        let ineqs: Vec<Constraint> = (0..self.nrows()).map(|i| self.row_constraint(i)).collect();
        let neg: Vec<Rat> = form.iter().map(|x| -x.clone()).collect();
        match maximize(&neg, &[], &ineqs) {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: -value, point },
            other => other,
        }
    }

    /// Rows tight on the whole polytope. Errors when empty.
    pub fn implicit_equalities(&self) -> Result<BTreeSet<usize>> {
        let verts = vertices(self)?;
        let mut it = verts.into_iter();
        let first = it.next().ok_or(Error::EmptyPolytope)?;
        Ok(it.fold(first.tight, |acc, v| acc.intersection(&v.tight).cloned().collect()))
    }

    /// Dimension of the affine hull, `-1` when empty.
    pub fn dimension(&self) -> Result<i64> {
        match self.implicit_equalities() {
            Ok(eq) => {
                let idx: Vec<usize> = eq.into_iter().collect();
                Ok((self.ambient_dim() - self.a.select_rows(&idx).rank()) as i64)
            }
            Err(Error::EmptyPolytope) => Ok(-1),
            Err(e) => Err(e),
        }
    }
}

/// Whether `{x : A x >= 0} = {0}`: full column rank and a strictly
/// positive combination of the rows vanishing.
pub fn is_bounded(a: &RatMatrix) -> bool {
    let (p, n) = (a.nrows(), a.ncols());
    if a.rank() < n {
        return false;
    }
    let eqs: Vec<Constraint> =
        (0..n).map(|j| Constraint::new((0..p).map(|i| a.get(i, j).clone()).collect(), Rat::zero())).collect();
    let ineqs: Vec<Constraint> = (0..p)
        .map(|i| {
            let mut e = vec![Rat::zero(); p];
            e[i] = Rat::one();
            Constraint::new(e, Rat::one())
        })
        .collect();
    feasible_point(p, &eqs, &ineqs).is_some()
}

/// Whether `{x : A_I x = b_I, A_J x >= b_J}` is nonempty, with `>` on the
/// complement `J` of `I` when `strict`.
pub fn face_nonempty(p: &HPolytope, tight: &BTreeSet<usize>, strict: bool) -> bool {
    let n = p.ambient_dim();
    if !strict {
        let eqs: Vec<Constraint> = tight.iter().map(|&i| p.row_constraint(i)).collect();
        let ineqs: Vec<Constraint> =
            (0..p.nrows()).filter(|i| !tight.contains(i)).map(|i| p.row_constraint(i)).collect();
        return feasible_point(n, &eqs, &ineqs).is_some();
    }
    strict_slack(p, tight).is_some_and(|t| t.is_positive())
}

/// `max t` subject to `A_I x = b_I`, `A_J x >= b_J + t`, `t <= 1`.
/// `None` when the equalities are infeasible.
pub fn strict_slack(p: &HPolytope, tight: &BTreeSet<usize>) -> Option<Rat> {
    let n = p.ambient_dim();
    let extend = |i: usize, t: Rat| {
        let mut c = p.a.row(i).to_vec();
        c.push(t);
        Constraint::new(c, p.b[i].clone())
    };
    let eqs: Vec<Constraint> = tight.iter().map(|&i| extend(i, Rat::zero())).collect();
    let mut ineqs: Vec<Constraint> =
        (0..p.nrows()).filter(|i| !tight.contains(i)).map(|i| extend(i, -Rat::one())).collect();
    let mut cap = vec![Rat::zero(); n + 1];
    cap[n] = -Rat::one();
    ineqs.push(Constraint::new(cap, -Rat::one()));
    let mut obj = vec![Rat::zero(); n + 1];
    obj[n] = Rat::one();
    match maximize(&obj, &eqs, &ineqs) {
        LpOutcome::Optimal { value, .. } => Some(value),
        LpOutcome::Unbounded => Some(Rat::one()),
        LpOutcome::Infeasible => None,
    }
}

/// The unique solution of `A_s x = b_s` for `n` rows `s`, if the rows are independent.
fn solve_square(p: &HPolytope, s: &[usize]) -> Option<Vec<Rat>> {
    let n = s.len();
    let mut m: Vec<Vec<Rat>> = s
        .iter()
        .map(|&i| {
            let mut row = p.a.row(i).to_vec();
            row.push(p.b[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().expect("augmented")).collect())
}

/// Vertices with their tight sets, sorted lexicographically by coordinates.
pub fn vertices(p: &HPolytope) -> Result<Vec<Vertex>> {
    if !is_bounded(p.a()) {
        if p.is_empty() {
            return Ok(Vec::new());
        }
        return Err(Error::Unbounded);
    }
    Ok(bounded_vertices(p))
}

/// `vertices` for a polytope whose matrix is already known to satisfy `is_bounded`.
pub fn bounded_vertices(p: &HPolytope) -> Vec<Vertex> {
    let n = p.ambient_dim();
    let mut found: BTreeSet<Vec<Rat>> = BTreeSet::new();
    if n == 0 {
        if p.b.iter().all(|x| !x.is_positive()) {
            found.insert(Vec::new());
        }
    } else {
        let candidates: Vec<usize> = (0..p.nrows()).filter(|&i| !p.a.is_zero_row(i)).collect();
        for s in candidates.into_iter().combinations(n) {
            let Some(x) = solve_square(p, &s) else { continue };
            if p.contains(&x) {
                found.insert(x);
            }
        }
    }
    found
        .into_iter()
        .map(|point| {
            let tight = p.tight_rows(&point);
            Vertex { point, tight }
        })
        .collect()
}

/// Classifies each row as essential (removal enlarges the set), redundant,
/// or a zero row that is trivially satisfied or violated.
pub fn nonredundant_rows(p: &HPolytope) -> Result<RowRedundancy> {
    let mut out = RowRedundancy::default();
    for i in 0..p.nrows() {
        if p.a.is_zero_row(i) {
            if p.b[i].is_positive() {
                out.trivially_violated.insert(i);
            } else {
                out.trivially_satisfied.insert(i);
            }
        }
    }
    if !out.trivially_violated.is_empty() || p.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    for i in 0..p.nrows() {
        if p.a.is_zero_row(i) {
            continue;
        }
        let others: Vec<Constraint> = (0..p.nrows()).filter(|&k| k != i).map(|k| p.row_constraint(k)).collect();
        let neg: Vec<Rat> = p.a.row(i).iter().map(|x| -x.clone()).collect();
        let essential = match maximize(&neg, &[], &others) {
            LpOutcome::Optimal { value, .. } => -value < p.b[i],
            LpOutcome::Unbounded => true,
            LpOutcome::Infeasible => unreachable!("nonempty polytope"),
        };
        if essential {
            out.essential.insert(i);
        } else {
            out.redundant.insert(i);
        }
    }
    Ok(out)
}
