//! Exact geometry in the `(delta, epsilon)` parameter plane.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::exactnum::{rat, Rat, RatMatrix};
use crate::polytope::{maximize, Constraint, LpOutcome};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point2 {
    pub delta: Rat,
    pub eps: Rat,
}

impl fmt::Debug for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.delta, self.eps)
    }
}

impl Point2 {
    pub fn new(delta: Rat, eps: Rat) -> Self {
        Point2 { delta, eps }
    }

    pub fn sub(&self, o: &Point2) -> Point2 {
        Point2::new(&self.delta - &o.delta, &self.eps - &o.eps)
    }

    pub fn add(&self, o: &Point2) -> Point2 {
        Point2::new(&self.delta + &o.delta, &self.eps + &o.eps)
    }

    pub fn scale(&self, s: &Rat) -> Point2 {
        Point2::new(&self.delta * s, &self.eps * s)
    }

    pub fn midpoint(&self, o: &Point2) -> Point2 {
        self.add(o).scale(&Rat::new(1.into(), 2.into()))
    }

    pub fn l1(&self) -> Rat {
        self.delta.abs() + self.eps.abs()
    }

    /// Same direction scaled to unit L1 norm.
    pub fn normalized(&self) -> Point2 {
        self.scale(&self.l1().recip())
    }

    pub fn cross(&self, o: &Point2) -> Rat {
        &self.delta * &o.eps - &self.eps * &o.delta
    }
}

/// `eps * epsilon + delta * delta + constant`, read as `= 0` or `>= 0`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affine2 {
    pub eps: Rat,
    pub delta: Rat,
    pub constant: Rat,
}

impl fmt::Debug for Affine2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*eps + {}*delta + {}", self.eps, self.delta, self.constant)
    }
}

impl Affine2 {
    pub fn new(eps: Rat, delta: Rat, constant: Rat) -> Self {
        Affine2 { eps, delta, constant }
    }

    pub fn eval(&self, p: &Point2) -> Rat {
        &self.eps * &p.eps + &self.delta * &p.delta + &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.eps.is_zero() && self.delta.is_zero()
    }

    pub fn neg(&self) -> Affine2 {
        Affine2::new(-self.eps.clone(), -self.delta.clone(), -self.constant.clone())
    }

    /// Scaled so that the first nonzero linear coefficient is `+-1`, keeping
    /// the orientation.
    pub fn normalized(&self) -> Affine2 {
        let lead = if !self.eps.is_zero() {
            self.eps.abs()
        } else if !self.delta.is_zero() {
            self.delta.abs()
        } else if !self.constant.is_zero() {
            self.constant.abs()
        } else {
            return self.clone();
        };
        let s = lead.recip();
        Affine2::new(&self.eps * &s, &self.delta * &s, &self.constant * &s)
    }

    /// Same line up to sign and scale.
    pub fn same_line(&self, o: &Affine2) -> bool {
        let a = self.normalized();
        let b = o.normalized();
        a == b || a == b.neg()
    }

    /// Direction vector of the line.
    pub fn direction(&self) -> Point2 {
        Point2::new(self.eps.clone(), -self.delta.clone())
    }

    pub fn intersect(&self, o: &Affine2) -> Option<Point2> {
        let det = &self.eps * &o.delta - &self.delta * &o.eps;
        if det.is_zero() {
            return None;
        }
        // eps*E + delta*D = -c
        let delta = (&self.eps * (-&o.constant) - (-&self.constant) * &o.eps) / &det;
        let eps = ((-&self.constant) * &o.delta - &self.delta * (-&o.constant)) / &det;
        Some(Point2::new(delta, eps))
    }

    pub fn as_ge(&self) -> Constraint {
        Constraint::new(vec![self.delta.clone(), self.eps.clone()], -self.constant.clone())
    }
}

/// A closed convex subset of the plane given by equalities and `>= 0`
/// inequalities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Region2 {
    pub eqs: Vec<Affine2>,
    pub ineqs: Vec<Affine2>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionShape {
    pub dim: i64,
    pub relint: Option<Point2>,
}

impl Region2 {
    pub fn contains(&self, p: &Point2) -> bool {
        self.eqs.iter().all(|e| e.eval(p).is_zero()) && self.ineqs.iter().all(|g| !g.eval(p).is_negative())
    }

    pub fn with(&self, extra: &[Affine2]) -> Region2 {
        let mut r = self.clone();
        r.ineqs.extend(extra.iter().cloned());
        r
    }

    fn lp(&self, objective: &Affine2) -> LpOutcome {
        let eqs: Vec<Constraint> = self.eqs.iter().map(Affine2::as_ge).collect();
        let ineqs: Vec<Constraint> = self.ineqs.iter().map(Affine2::as_ge).collect();
        maximize(&[objective.delta.clone(), objective.eps.clone()], &eqs, &ineqs)
    }

    /// Maximum of an affine function, `None` if empty, `Some(None)` if unbounded.
    pub fn max_of(&self, f: &Affine2) -> Option<Option<Rat>> {
        match self.lp(f) {
            LpOutcome::Optimal { value, .. } => Some(Some(value + &f.constant)),
            LpOutcome::Unbounded => Some(None),
            LpOutcome::Infeasible => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max_of(&Affine2::new(Rat::zero(), Rat::zero(), Rat::zero())).is_none()
    }

    /// Dimension and a relative interior point.
    pub fn shape(&self) -> RegionShape {
        let mut eqs = self.eqs.clone();
        let mut ineqs = self.ineqs.clone();
        loop {
            let eqc: Vec<Constraint> = eqs.iter().map(Affine2::as_ge).collect();
            let mut ic: Vec<Constraint> = ineqs
                .iter()
                .map(|g| Constraint::new(vec![g.delta.clone(), g.eps.clone(), -Rat::one()], -g.constant.clone()))
                .collect();
            ic.push(Constraint::new(vec![Rat::zero(), Rat::zero(), -Rat::one()], -Rat::one()));
            let eqc: Vec<Constraint> = eqc
                .into_iter()
                .map(|mut c| {
                    c.coeffs.push(Rat::zero());
                    c
                })
                .collect();
            let out = maximize(&[Rat::zero(), Rat::zero(), Rat::one()], &eqc, &ic);
            let LpOutcome::Optimal { value, point } = out else {
                return RegionShape { dim: -1, relint: None };
            };
            if value.is_negative() {
                return RegionShape { dim: -1, relint: None };
            }
            if value.is_positive() || ineqs.is_empty() {
                let rank = if eqs.is_empty() {
                    0
                } else {
                    RatMatrix::from_rows(2, eqs.iter().map(|e| vec![e.delta.clone(), e.eps.clone()]).collect())
                        .expect("two columns")
                        .rank()
                };
                return RegionShape {
                    dim: 2 - rank as i64,
                    relint: Some(Point2::new(point[0].clone(), point[1].clone())),
                };
            }
            let current = Region2 { eqs: eqs.clone(), ineqs: ineqs.clone() };
            let (implicit, rest): (Vec<Affine2>, Vec<Affine2>) =
                ineqs.iter().cloned().partition(|g| matches!(current.max_of(g), Some(Some(v)) if v.is_zero()));
            if implicit.is_empty() {
                unreachable!("zero slack without an implicit equality");
            }
            eqs.extend(implicit);
            ineqs = rest;
        }
    }

    /// Drops duplicate and LP-redundant inequalities.
    pub fn pruned(&self) -> Region2 {
        let mut ineqs: Vec<Affine2> = Vec::new();
        for g in &self.ineqs {
            if g.is_constant() {
                if g.constant.is_negative() {
                    return Region2 { eqs: self.eqs.clone(), ineqs: vec![g.clone()] };
                }
                continue;
            }
            let n = g.normalized();
            if !ineqs.contains(&n) {
                ineqs.push(n);
            }
        }
        let mut eqs: Vec<Affine2> = Vec::new();
        for e in &self.eqs {
            let n = e.normalized();
            if !eqs.iter().any(|x| x.same_line(&n)) || n.is_constant() {
                eqs.push(n);
            }
        }
        let mut i = 0;
        while i < ineqs.len() {
            let others = Region2 {
                eqs: eqs.clone(),
                ineqs: ineqs.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, g)| g.clone()).collect(),
            };
            let neg = ineqs[i].neg();
            let redundant = match others.max_of(&neg) {
                Some(Some(v)) => !v.is_positive(),
                Some(None) => false,
                None => true,
            };
            if redundant && others.max_of(&Affine2::new(Rat::zero(), Rat::zero(), Rat::zero())).is_some() {
                ineqs.remove(i);
            } else {
                i += 1;
            }
        }
        ineqs.sort();
        Region2 { eqs, ineqs }
    }

    /// Vertices of a bounded region, counterclockwise for 2-dimensional
    /// regions and sorted for segments.
    pub fn polygon(&self) -> Vec<Point2> {
        let mut lines: Vec<Affine2> = self.eqs.clone();
        lines.extend(self.ineqs.iter().cloned());
        let mut pts: Vec<Point2> = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if let Some(p) = lines[i].intersect(&lines[j]) {
                    if self.contains(&p) && !pts.contains(&p) {
                        pts.push(p);
                    }
                }
            }
        }
        if self.eqs.is_empty() {
            sort_ccw(&mut pts);
        } else {
            pts.sort();
            if pts.len() > 2 {
                let first = pts[0].clone();
                let last = pts[pts.len() - 1].clone();
                pts = vec![first, last];
            }
        }
        pts
    }
}

pub fn centroid(pts: &[Point2]) -> Point2 {
    let n = rat(pts.len() as i64);
    let sum = pts.iter().fold(Point2::new(Rat::zero(), Rat::zero()), |acc, p| acc.add(p));
    sum.scale(&n.recip())
}

/// Sorts points counterclockwise around their centroid, starting from the
/// lowest angle measured from the positive delta axis.
pub fn sort_ccw(pts: &mut [Point2]) {
    if pts.len() < 3 {
        pts.sort();
        return;
    }
    let c = centroid(pts);
    let half = |v: &Point2| -> u8 {
        if v.eps.is_negative() || (v.eps.is_zero() && v.delta.is_negative()) {
            1
        } else {
            0
        }
    };
    pts.sort_by(|p, q| {
        let u = p.sub(&c);
        let v = q.sub(&c);
        half(&u).cmp(&half(&v)).then_with(|| {
            let x = u.cross(&v);
            if x.is_positive() {
                Ordering::Less
            } else if x.is_negative() {
                Ordering::Greater
            } else {
                u.l1().cmp(&v.l1())
            }
        })
    });
}

/// Twice the signed area.
pub fn area2(poly: &[Point2]) -> Rat {
    let n = poly.len();
    (0..n).fold(Rat::zero(), |acc, i| acc + poly[i].cross(&poly[(i + 1) % n]))
}

/// Part of a convex polygon where `h >= 0`.
pub fn clip(poly: &[Point2], h: &Affine2) -> Vec<Point2> {
    let n = poly.len();
    let mut out: Vec<Point2> = Vec::new();
    let push = |p: Point2, out: &mut Vec<Point2>| {
        if out.last() != Some(&p) && out.first() != Some(&p) {
            out.push(p);
        }
    };
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        let vp = h.eval(p);
        let vq = h.eval(q);
        if !vp.is_negative() {
            push(p.clone(), &mut out);
        }
        if (vp.is_positive() && vq.is_negative()) || (vp.is_negative() && vq.is_positive()) {
            let t = &vp / (&vp - &vq);
            push(p.add(&q.sub(p).scale(&t)), &mut out);
        }
    }
    out
}

/// Whether the segment `p q` meets the line strictly between distinct sides.
pub fn separates(line: &Affine2, p: &Point2, q: &Point2) -> bool {
    let a = line.eval(p);
    let b = line.eval(q);
    (a.is_positive() && b.is_negative()) || (a.is_negative() && b.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::frac;

    fn pt(d: Rat, e: Rat) -> Point2 {
        Point2::new(d, e)
    }

    #[test]
    fn intersect_two_carriers() {
        // eps = 3 delta - 1/2 and eps = 3/2 - 3 delta
        let l1 = Affine2::new(rat(1), rat(-3), frac(1, 2));
        let l2 = Affine2::new(rat(1), rat(3), frac(-3, 2));
        assert_eq!(l1.intersect(&l2), Some(pt(frac(1, 3), frac(1, 2))));
        assert!(l1.same_line(&Affine2::new(rat(-2), rat(6), rat(-1))));
    }

    #[test]
    fn square_region_shape_and_polygon() {
        let r = Region2 {
            eqs: vec![],
            ineqs: vec![
                Affine2::new(rat(0), rat(1), rat(0)),
                Affine2::new(rat(0), rat(-1), rat(1)),
                Affine2::new(rat(1), rat(0), rat(0)),
                Affine2::new(rat(-1), rat(0), rat(1)),
                Affine2::new(rat(-1), rat(0), rat(2)),
            ],
        };
        assert_eq!(r.shape().dim, 2);
        let p = r.pruned();
        assert_eq!(p.ineqs.len(), 4);
        let poly = r.polygon();
        assert_eq!(poly.len(), 4);
        assert_eq!(area2(&poly), rat(2));
        let half = clip(&poly, &Affine2::new(rat(1), rat(1), rat(-1)));
        assert_eq!(area2(&half), rat(1));
    }

    #[test]
    fn implicit_equalities_reduce_dimension() {
        let r = Region2 {
            eqs: vec![],
            ineqs: vec![
                Affine2::new(rat(1), rat(0), rat(0)),
                Affine2::new(rat(-1), rat(0), rat(0)),
                Affine2::new(rat(0), rat(1), rat(0)),
                Affine2::new(rat(0), rat(-1), rat(1)),
            ],
        };
        let s = r.shape();
        assert_eq!(s.dim, 1);
        assert!(r.contains(s.relint.as_ref().unwrap()));
        let empty = Region2 { eqs: vec![], ineqs: vec![Affine2::new(rat(0), rat(0), rat(-1))] };
        assert_eq!(empty.shape().dim, -1);
    }
}
