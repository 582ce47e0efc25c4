//! Two-parameter families `A x >= (1 - delta) B + delta B' + epsilon C`,
//! their strata in the parameter plane and the cell decomposition of a strip.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{circuit_relation, circuits, dot, rat, Rat, RatMatrix};
use crate::horo::{variety_from_rhs, EmbeddingData, VarietyDescriptor};
use crate::plane::{area2, centroid, clip, Affine2, Point2, Region2};
use crate::polytope::{bounded_vertices, strict_slack, Constraint, HPolytope};
use crate::projection::LinearSystem;

pub type IndexSet = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slope {
    Finite(Rat),
    Infinite,
}

impl Slope {
    pub fn ratio(num: Rat, den: Rat) -> Slope {
        if den.is_zero() {
            Slope::Infinite
        } else {
            Slope::Finite(num / den)
        }
    }
}

/// A linear relation `sum lambda_i A_i = 0` and its carrier line
/// `a eps + b delta + c = 0` with `a = sum lambda C`, `b = sum lambda (B' - B)`,
/// `c = sum lambda B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub coeffs: Vec<Rat>,
    pub line: Affine2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WallKind {
    Fibration,
    Divisorial { row: usize },
    Flip,
}

impl Relation {
    pub fn support(&self) -> IndexSet {
        (0..self.coeffs.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    pub fn positive(&self) -> IndexSet {
        (0..self.coeffs.len()).filter(|&i| self.coeffs[i].is_positive()).collect()
    }

    pub fn negative(&self) -> IndexSet {
        (0..self.coeffs.len()).filter(|&i| self.coeffs[i].is_negative()).collect()
    }

    /// `b / a`; the carrier has `d eps / d delta = -slope`.
    pub fn slope(&self) -> Slope {
        Slope::ratio(self.line.delta.clone(), self.line.eps.clone())
    }

    /// Contraction type read off the signs of the relation.
    pub fn kind(&self, e: &EmbeddingData) -> WallKind {
        let support = self.support();
        let pos = self.positive();
        let neg = self.negative();
        if pos == support || neg == support {
            return WallKind::Fibration;
        }
        if support.len() >= 2 {
            for side in [&neg, &pos] {
                if side.len() == 1 {
                    let i = *side.iter().next().unwrap();
                    if !e.is_color(i) {
                        return WallKind::Divisorial { row: i };
                    }
                }
            }
        }
        WallKind::Flip
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    Plane,
    Line(Affine2),
    Point(Point2),
    Empty,
}

impl Carrier {
    pub fn dim(&self) -> i64 {
        match self {
            Carrier::Plane => 2,
            Carrier::Line(_) => 1,
            Carrier::Point(_) => 0,
            Carrier::Empty => -1,
        }
    }
}

/// The closed set `Omega_I` with the dimension of its open part `omega_I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub index_set: IndexSet,
    pub closure: Region2,
    pub closure_dim: i64,
    pub relint: Option<Point2>,
    pub omega_dim: i64,
    pub carrier: Carrier,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointClass {
    Outside,
    U2,
    U1 { minimal: IndexSet },
    U0 { minimal: IndexSet },
    U0Prime { walls: Vec<IndexSet> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenericityReport {
    pub violations: Vec<String>,
}

impl GenericityReport {
    pub fn is_generic(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strip {
    pub delta_lo: Rat,
    pub delta_hi: Rat,
    pub eps_lo: Rat,
    pub eps_hi: Option<Rat>,
}

impl Strip {
    pub fn constraints(&self) -> Vec<Affine2> {
        let mut out = vec![
            Affine2::new(Rat::zero(), Rat::one(), -self.delta_lo.clone()),
            Affine2::new(Rat::zero(), -Rat::one(), self.delta_hi.clone()),
            Affine2::new(Rat::one(), Rat::zero(), -self.eps_lo.clone()),
        ];
        if let Some(hi) = &self.eps_hi {
            out.push(Affine2::new(-Rat::one(), Rat::zero(), hi.clone()));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub index_set: IndexSet,
    pub relation: Relation,
    pub from: Point2,
    pub to: Point2,
    pub kind: WallKind,
    /// Lies on the boundary of `Omega_empty`.
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub pieces: Vec<Vec<Point2>>,
    pub sample: Point2,
    pub descriptor: VarietyDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedPoint {
    pub point: Point2,
    pub class: PointClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub strip: Strip,
    pub domain: Vec<Point2>,
    pub cells: Vec<Cell>,
    pub walls: Vec<Wall>,
    pub points: Vec<MarkedPoint>,
}

#[derive(Debug)]
pub struct TwoParamFamily {
    embedding: EmbeddingData,
    start: Vec<Rat>,
    end: Vec<Rat>,
    diff: Vec<Rat>,
    anti: Vec<Rat>,
    circuits: Vec<IndexSet>,
    circuit_regions: OnceLock<Vec<Region>>,
    empty_region: OnceLock<Region>,
    genericity: OnceLock<GenericityReport>,
}

fn intersect_all(sets: &[&IndexSet]) -> IndexSet {
    let mut it = sets.iter();
    let first = (*it.next().expect("nonempty")).clone();
    it.fold(first, |acc, s| acc.intersection(s).copied().collect())
}

fn minimal_sets(sets: &[&IndexSet]) -> Vec<IndexSet> {
    let mut out: Vec<IndexSet> = Vec::new();
    for s in sets {
        if !sets.iter().any(|t| t.len() < s.len() && t.is_subset(s)) && !out.contains(s) {
            out.push((*s).clone());
        }
    }
    out
}

impl TwoParamFamily {
    pub fn new(embedding: EmbeddingData, start: Vec<Rat>, end: Vec<Rat>) -> Result<Self> {
        let p = embedding.len();
        if start.len() != p || end.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{p} rows but right-hand sides of length {} and {}",
                start.len(),
                end.len()
            )));
        }
        let diff = start.iter().zip(&end).map(|(b, e)| e - b).collect();
        let anti = embedding.anticanonical();
        let circuits = circuits(embedding.matrix()).into_iter().map(|c| c.into_iter().collect()).collect();
        Ok(TwoParamFamily {
            embedding,
            start,
            end,
            diff,
            anti,
            circuits,
            circuit_regions: OnceLock::new(),
            empty_region: OnceLock::new(),
            genericity: OnceLock::new(),
        })
    }

    pub fn embedding(&self) -> &EmbeddingData {
        &self.embedding
    }

    pub fn start_rhs(&self) -> &[Rat] {
        &self.start
    }

    pub fn end_rhs(&self) -> &[Rat] {
        &self.end
    }

    pub fn anticanonical(&self) -> &[Rat] {
        &self.anti
    }

    pub fn circuits(&self) -> &[IndexSet] {
        &self.circuits
    }

    fn matrix(&self) -> &RatMatrix {
        self.embedding.matrix()
    }

    pub fn rhs_at(&self, p: &Point2) -> Vec<Rat> {
        (0..self.start.len()).map(|i| &self.start[i] + &p.delta * &self.diff[i] + &p.eps * &self.anti[i]).collect()
    }

    pub fn polytope_at(&self, p: &Point2) -> HPolytope {
        HPolytope::new(self.matrix().clone(), self.rhs_at(p)).expect("row count")
    }

    pub fn descriptor_at(&self, p: &Point2) -> Result<VarietyDescriptor> {
        variety_from_rhs(&self.embedding, &self.rhs_at(p))
    }

    /// `p` lies in `omega_I`.
    pub fn in_omega(&self, p: &Point2, index_set: &IndexSet) -> bool {
        strict_slack(&self.polytope_at(p), index_set).is_some_and(|t| t.is_positive())
    }

    /// Normalized relation: `sum lambda C = 1` when possible, otherwise
    /// `sum lambda (B' - B) > 0`.
    pub fn relation(&self, lambda: Vec<Rat>) -> Relation {
        let a = dot(&lambda, &self.anti);
        let b = dot(&lambda, &self.diff);
        let c = dot(&lambda, &self.start);
        let scale = if !a.is_zero() {
            a.recip()
        } else if !b.is_zero() {
            b.recip()
        } else if !c.is_zero() {
            c.abs().recip()
        } else {
            Rat::one()
        };
        Relation {
            coeffs: lambda.iter().map(|x| x * &scale).collect(),
            line: Affine2::new(a * &scale, b * &scale, c * &scale),
        }
    }

    fn lift(&self, rows: &IndexSet, local: &[Rat]) -> Vec<Rat> {
        let mut full = vec![Rat::zero(); self.start.len()];
        for (k, &i) in rows.iter().enumerate() {
            full[i] = local[k].clone();
        }
        full
    }

    /// Basis of the relations supported on `rows`.
    pub fn relations(&self, rows: &IndexSet) -> Vec<Vec<Rat>> {
        let idx: Vec<usize> = rows.iter().copied().collect();
        self.matrix().select_rows(&idx).left_kernel().into_iter().map(|l| self.lift(rows, &l)).collect()
    }

    pub fn codim(&self, rows: &IndexSet) -> usize {
        let idx: Vec<usize> = rows.iter().copied().collect();
        idx.len() - self.matrix().select_rows(&idx).rank()
    }

    /// Points of the plane where `D_I` lies in the image of `A_I`.
    pub fn carrier(&self, rows: &IndexSet) -> Carrier {
        let lines: Vec<Affine2> = self.relations(rows).into_iter().map(|l| self.relation(l).line).collect();
        let nontrivial: Vec<&Affine2> = lines.iter().filter(|l| !l.is_constant()).collect();
        if lines.iter().any(|l| l.is_constant() && !l.constant.is_zero()) {
            return Carrier::Empty;
        }
        let Some(first) = nontrivial.first() else { return Carrier::Plane };
        match nontrivial.iter().find_map(|l| first.intersect(l)) {
            None => {
                if nontrivial.iter().all(|l| l.same_line(first)) {
                    Carrier::Line(first.normalized())
                } else {
                    Carrier::Empty
                }
            }
            Some(p) => {
                if nontrivial.iter().all(|l| l.eval(&p).is_zero()) {
                    Carrier::Point(p)
                } else {
                    Carrier::Empty
                }
            }
        }
    }

    /// The normalized relation of a codimension-one index set.
    pub fn carrier_line(&self, rows: &IndexSet) -> Result<Relation> {
        let rel = self.relations(rows);
        if rel.len() != 1 {
            return Err(Error::InvalidInput(format!("index set has codimension {}, expected 1", rel.len())));
        }
        Ok(self.relation(rel.into_iter().next().unwrap()))
    }

    /// Relation of a circuit.
    pub fn circuit_relation(&self, rows: &IndexSet) -> Option<Relation> {
        let idx: Vec<usize> = rows.iter().copied().collect();
        circuit_relation(self.matrix(), &idx).map(|l| self.relation(self.lift(rows, &l)))
    }

    /// `Omega_I` by projecting out `x` from `A_I x = D_I, A x >= D`.
    pub fn region(&self, rows: &IndexSet) -> Region {
        let n = self.embedding.rank();
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        for i in 0..self.start.len() {
            let mut coeffs = self.matrix().row(i).to_vec();
            coeffs.push(-self.diff[i].clone());
            coeffs.push(-self.anti[i].clone());
            let c = Constraint::new(coeffs, self.start[i].clone());
            if rows.contains(&i) {
                eqs.push(c);
            } else {
                ineqs.push(c);
            }
        }
        let sys = LinearSystem { nvars: n + 2, eqs, ineqs };
        let to_affine = |c: &Constraint| Affine2::new(c.coeffs[1].clone(), c.coeffs[0].clone(), -c.rhs.clone());
        let closure = match sys.eliminate_leading(n) {
            None => Region2 { eqs: vec![], ineqs: vec![Affine2::new(Rat::zero(), Rat::zero(), -Rat::one())] },
            Some(s) => {
                Region2 { eqs: s.eqs.iter().map(to_affine).collect(), ineqs: s.ineqs.iter().map(to_affine).collect() }
                    .pruned()
            }
        };
        let shape = closure.shape();
        let carrier = self.carrier(rows);
        let omega_dim = match &shape.relint {
            Some(p) if shape.dim == carrier.dim() && self.in_omega(p, rows) => shape.dim,
            _ => -1,
        };
        Region { index_set: rows.clone(), closure, closure_dim: shape.dim, relint: shape.relint, omega_dim, carrier }
    }

    pub fn empty_set_region(&self) -> &Region {
        self.empty_region.get_or_init(|| self.region(&IndexSet::new()))
    }

    /// Regions of all circuits, in circuit order.
    pub fn circuit_regions(&self) -> &[Region] {
        self.circuit_regions.get_or_init(|| self.circuits.par_iter().map(|c| self.region(c)).collect())
    }

    /// Circuits whose `omega` is a nonempty segment, with their relations.
    pub fn active_circuits(&self) -> Vec<(&Region, Relation)> {
        self.circuit_regions()
            .iter()
            .filter(|r| r.omega_dim == 1)
            .filter_map(|r| self.circuit_relation(&r.index_set).map(|rel| (r, rel)))
            .collect()
    }

    /// Index sets `I` with `p` in `omega_I`; `None` outside `Omega_empty`.
    pub fn faces_at(&self, p: &Point2) -> Option<Vec<IndexSet>> {
        let verts = bounded_vertices(&self.polytope_at(p));
        if verts.is_empty() {
            return None;
        }
        let mut all: BTreeSet<IndexSet> = verts.into_iter().map(|v| v.tight).collect();
        loop {
            let list: Vec<IndexSet> = all.iter().cloned().collect();
            let mut grew = false;
            for (a, b) in list.iter().tuple_combinations() {
                let c: IndexSet = a.intersection(b).copied().collect();
                if all.insert(c) {
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        Some(all.into_iter().collect())
    }

    pub fn classify_point(&self, p: &Point2) -> PointClass {
        let Some(faces) = self.faces_at(p) else { return PointClass::Outside };
        let carriers: Vec<(IndexSet, Carrier)> = faces
            .into_iter()
            .map(|f| {
                let c = self.carrier(&f);
                (f, c)
            })
            .collect();
        let zeros: Vec<&IndexSet> = carriers.iter().filter(|(_, c)| c.dim() == 0).map(|(f, _)| f).collect();
        if !zeros.is_empty() {
            return PointClass::U0 { minimal: intersect_all(&zeros) };
        }
        let mut groups: Vec<(Affine2, Vec<&IndexSet>)> = Vec::new();
        for (f, c) in &carriers {
            if let Carrier::Line(l) = c {
                match groups.iter_mut().find(|(g, _)| g.same_line(l)) {
                    Some((_, v)) => v.push(f),
                    None => groups.push((l.clone(), vec![f])),
                }
            }
        }
        match groups.len() {
            0 => PointClass::U2,
            1 => PointClass::U1 { minimal: intersect_all(&groups[0].1) },
            _ => {
                let mut walls: Vec<IndexSet> = groups.iter().map(|(_, v)| intersect_all(v)).collect();
                walls.sort();
                PointClass::U0Prime { walls }
            }
        }
    }

    /// Minimal index sets of codimension two built from pairs of circuits.
    pub fn minimal_codim2_sets(&self) -> Vec<IndexSet> {
        let mut out: BTreeSet<IndexSet> = BTreeSet::new();
        for (a, b) in self.circuits.iter().tuple_combinations() {
            let l: IndexSet = a.union(b).copied().collect();
            if out.contains(&l) || self.codim(&l) != 2 {
                continue;
            }
            let minimal = l.iter().all(|&x| {
                let mut s = l.clone();
                s.remove(&x);
                self.codim(&s) == 1
            });
            if minimal {
                out.insert(l);
            }
        }
        out.into_iter().collect()
    }

    /// Points where two circuit carriers cross and which lie in `Omega_empty`.
    fn crossing_points(&self) -> Vec<Point2> {
        let lines: Vec<Affine2> = self
            .circuits
            .iter()
            .filter_map(|c| match self.carrier(c) {
                Carrier::Line(l) => Some(l),
                _ => None,
            })
            .collect();
        let mut pts: BTreeSet<Point2> = BTreeSet::new();
        for (a, b) in lines.iter().tuple_combinations() {
            if let Some(p) = a.intersect(b) {
                pts.insert(p);
            }
        }
        let omega = &self.empty_set_region().closure;
        pts.into_iter().filter(|p| omega.contains(p)).collect()
    }

    pub fn check_genericity(&self) -> GenericityReport {
        self.genericity.get_or_init(|| self.genericity_report()).clone()
    }

    fn genericity_report(&self) -> GenericityReport {
        let mut v: BTreeSet<String> = BTreeSet::new();
        let plane =
            RatMatrix::from_rows(self.start.len(), vec![self.diff.clone(), self.anti.clone()]).expect("lengths");
        if plane.rank() < 2 {
            v.insert("B' - B is proportional to C: the parameter plane is degenerate".into());
            return GenericityReport { violations: v.into_iter().collect() };
        }
        let name = |s: &IndexSet| format!("{:?}", self.embedding.ids(s));
        for r in self.circuit_regions() {
            if r.carrier == Carrier::Plane
                && r.closure_dim >= 0
                && r.relint.as_ref().is_some_and(|p| self.in_omega(p, &r.index_set))
            {
                v.insert(format!("circuit {} has a two-dimensional stratum", name(&r.index_set)));
            }
        }
        let active = self.active_circuits();
        for ((ra, la), (rb, lb)) in active.iter().tuple_combinations() {
            if la.line.same_line(&lb.line) {
                v.insert(format!("circuits {} and {} have collinear strata", name(&ra.index_set), name(&rb.index_set)));
            }
        }
        let results: Vec<Vec<String>> =
            self.crossing_points().par_iter().map(|p| self.point_violations(p, &active)).collect();
        v.extend(results.into_iter().flatten());
        GenericityReport { violations: v.into_iter().collect() }
    }

    fn point_violations(&self, p: &Point2, active: &[(&Region, Relation)]) -> Vec<String> {
        let mut out = Vec::new();
        let Some(faces) = self.faces_at(p) else { return out };
        let name = |s: &IndexSet| format!("{:?}", self.embedding.ids(s));
        let mut zeros: Vec<&IndexSet> = Vec::new();
        for f in &faces {
            let codim = self.codim(f);
            let carrier = self.carrier(f);
            if codim >= 3 {
                out.push(format!("index set {} of codimension {codim} has a stratum at {p:?}", name(f)));
            } else if codim == 2 && carrier.dim() > 0 {
                out.push(format!("index set {} of codimension 2 has a stratum of positive dimension", name(f)));
            } else if codim == 1 && carrier == Carrier::Plane {
                out.push(format!("index set {} of codimension 1 has a two-dimensional stratum", name(f)));
            }
            if carrier.dim() == 0 {
                zeros.push(f);
            }
        }
        let minimal_points = minimal_sets(&zeros);
        if minimal_points.len() > 1 {
            out.push(format!("two minimal index sets share the point stratum {p:?}"));
        }
        let through: Vec<&(&Region, Relation)> = active.iter().filter(|(_, rel)| rel.line.eval(p).is_zero()).collect();
        if let Some(l) = minimal_points.first() {
            for (r, _) in &through {
                if !r.index_set.is_subset(l) {
                    out.push(format!("the point {p:?} of {} lies on the carrier of {}", name(l), name(&r.index_set)));
                }
            }
        }
        for (a, b, c) in through.iter().tuple_combinations() {
            let ab: IndexSet = a.0.index_set.union(&b.0.index_set).copied().collect();
            let ac: IndexSet = a.0.index_set.union(&c.0.index_set).copied().collect();
            let bc: IndexSet = b.0.index_set.union(&c.0.index_set).copied().collect();
            if ab != ac || ab != bc {
                out.push(format!(
                    "carriers of {}, {} and {} meet at {p:?}",
                    name(&a.0.index_set),
                    name(&b.0.index_set),
                    name(&c.0.index_set)
                ));
            }
        }
        out
    }

    /// A strip over `0 <= delta <= 1` reaching below every crossing of walls.
    pub fn default_strip(&self) -> Strip {
        let lines: Vec<Affine2> = self.active_circuits().into_iter().map(|(_, r)| r.line).collect();
        let verticals =
            [Affine2::new(Rat::zero(), Rat::one(), Rat::zero()), Affine2::new(Rat::zero(), Rat::one(), -Rat::one())];
        let mut lowest = rat(-1);
        for (i, a) in lines.iter().enumerate() {
            let others = lines[i + 1..].iter().chain(verticals.iter());
            for b in others {
                if let Some(p) = a.intersect(b) {
                    if p.delta >= Rat::zero() && p.delta <= Rat::one() && p.eps < lowest {
                        lowest = p.eps.clone();
                    }
                }
            }
        }
        Strip { delta_lo: Rat::zero(), delta_hi: Rat::one(), eps_lo: lowest.floor() - Rat::one(), eps_hi: None }
    }

    /// Active circuits clipped to the strip, with their contraction type.
    pub fn walls(&self, strip: &Strip) -> Vec<Wall> {
        let mut walls = Vec::new();
        for (r, rel) in self.active_circuits() {
            let seg = r.closure.with(&strip.constraints()).pruned();
            let ends = seg.polygon();
            if ends.len() < 2 {
                continue;
            }
            let mid = ends[0].midpoint(&ends[1]);
            let boundary = !self.in_omega(&mid, &IndexSet::new());
            walls.push(Wall {
                index_set: r.index_set.clone(),
                kind: rel.kind(&self.embedding),
                relation: rel,
                from: ends[0].clone(),
                to: ends[1].clone(),
                boundary,
            });
        }
        walls
    }

    pub fn decompose(&self, strip: &Strip) -> Result<Decomposition> {
        let report = self.check_genericity();
        if !report.is_generic() {
            return Err(Error::Genericity(report.violations.join("; ")));
        }
        let omega = self.empty_set_region();
        if omega.omega_dim != 2 {
            return Err(Error::Hypothesis("the ample cone stratum has no interior".into()));
        }
        let domain_region = omega.closure.with(&strip.constraints()).pruned();
        if matches!(domain_region.max_of(&Affine2::new(Rat::one(), Rat::zero(), Rat::zero())), Some(None)) {
            return Err(Error::Hypothesis("the family is not bounded above in epsilon".into()));
        }
        if domain_region.shape().dim != 2 {
            return Err(Error::Hypothesis("the strip misses the interior of the ample stratum".into()));
        }
        let domain = domain_region.polygon();
        let walls = self.walls(strip);
        let mut pieces: Vec<Vec<Point2>> = vec![domain.clone()];
        let mut cut_lines: Vec<Affine2> = Vec::new();
        for w in walls.iter().filter(|w| !w.boundary) {
            if cut_lines.iter().any(|l| l.same_line(&w.relation.line)) {
                continue;
            }
            cut_lines.push(w.relation.line.clone());
            let mut next = Vec::new();
            for piece in pieces {
                let pos = clip(&piece, &w.relation.line);
                let neg = clip(&piece, &w.relation.line.neg());
                if area2(&pos).is_zero() || area2(&neg).is_zero() {
                    next.push(piece);
                } else {
                    next.push(pos);
                    next.push(neg);
                }
            }
            pieces = next;
        }
        let samples: Vec<Point2> = pieces.iter().map(|p| centroid(p)).collect();
        let descriptors: Vec<VarietyDescriptor> =
            samples.par_iter().map(|s| self.descriptor_at(s)).collect::<Result<_>>()?;
        let mut parent: Vec<usize> = (0..pieces.len()).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            parent[i] = r;
            r
        }
        let shares_edge = |a: &[Point2], b: &[Point2]| {
            (0..a.len()).any(|i| {
                let u = &a[i];
                let w = &a[(i + 1) % a.len()];
                (0..b.len()).any(|j| {
                    let x = &b[j];
                    let y = &b[(j + 1) % b.len()];
                    (u == x && w == y) || (u == y && w == x)
                })
            })
        };
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                if descriptors[i] == descriptors[j] && shares_edge(&pieces[i], &pieces[j]) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[rj.max(ri)] = rj.min(ri);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..pieces.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let cells: Vec<Cell> = groups
            .values()
            .map(|members| Cell {
                pieces: members.iter().map(|&i| pieces[i].clone()).collect(),
                sample: samples[members[0]].clone(),
                descriptor: descriptors[members[0]].clone(),
            })
            .collect();
        let mut points: BTreeMap<Point2, PointClass> = BTreeMap::new();
        for l in self.minimal_codim2_sets() {
            if let Carrier::Point(p) = self.carrier(&l) {
                if domain_region.contains(&p) && self.in_omega(&p, &l) {
                    points.insert(p.clone(), self.classify_point(&p));
                }
            }
        }
        for (a, b) in walls.iter().tuple_combinations() {
            let Some(p) = a.relation.line.intersect(&b.relation.line) else { continue };
            if points.contains_key(&p) || !domain_region.contains(&p) {
                continue;
            }
            let within = |w: &Wall| {
                let lo = w.from.clone().min(w.to.clone());
                let hi = w.from.clone().max(w.to.clone());
                p >= lo && p <= hi
            };
            if within(a) && within(b) {
                let class = self.classify_point(&p);
                if matches!(class, PointClass::U0Prime { .. }) {
                    points.insert(p, class);
                }
            }
        }
        let points = points.into_iter().map(|(point, class)| MarkedPoint { point, class }).collect();
        Ok(Decomposition { strip: strip.clone(), domain, cells, walls, points })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exactnum::frac;
    use crate::horo::{EmbeddingRow, RowKind};

    pub(crate) fn six_ray_family(start: &[Rat]) -> TwoParamFamily {
        let vs = [[1, 0], [0, 1], [-1, 0], [0, -1], [1, -1], [2, -1]];
        let rows = vs
            .iter()
            .enumerate()
            .map(|(k, v)| EmbeddingRow {
                id: k as u32 + 1,
                kind: RowKind::Ray,
                vector: vec![rat(v[0]), rat(v[1])],
                anticanonical: rat(1),
            })
            .collect();
        let e = EmbeddingData::new(2, rows).unwrap();
        let end = vec![rat(0), rat(0), rat(-1), rat(-6), frac(-7, 2), rat(-2)];
        TwoParamFamily::new(e, start.to_vec(), end).unwrap()
    }

    pub(crate) fn blowup_family() -> TwoParamFamily {
        six_ray_family(&[rat(0), rat(0), rat(-1), rat(-2), frac(-5, 2), rat(-4)])
    }

    fn set(v: &[usize]) -> IndexSet {
        v.iter().map(|i| i - 1).collect()
    }

    fn pt(d: Rat, e: Rat) -> Point2 {
        Point2::new(d, e)
    }

    #[test]
    fn carriers_of_fixture_circuits() {
        let f = blowup_family();
        let r = f.carrier_line(&set(&[1, 4, 5])).unwrap();
        assert_eq!(r.line, Affine2::new(rat(1), rat(-3), frac(1, 2)));
        assert_eq!(r.coeffs[0], rat(1));
        assert_eq!(r.coeffs[4], rat(-1));
        assert_eq!(r.slope(), Slope::Finite(rat(-3)));
        let r = f.carrier_line(&set(&[1, 3])).unwrap();
        assert_eq!(r.line.normalized(), Affine2::new(rat(1), rat(0), frac(-1, 2)));
        let r = f.carrier_line(&set(&[2, 4])).unwrap();
        assert_eq!(r.line.normalized(), Affine2::new(rat(1), rat(-2), rat(-1)));
        assert!(f.carrier_line(&set(&[1, 2])).is_err());
        assert_eq!(f.carrier(&set(&[1, 3, 4, 5])), Carrier::Point(pt(frac(1, 3), frac(1, 2))));
    }

    #[test]
    fn regions_and_point_strata() {
        let f = blowup_family();
        let r = f.region(&set(&[1, 3, 4, 5]));
        assert_eq!(r.omega_dim, 0);
        assert_eq!(r.relint, Some(pt(frac(1, 3), frac(1, 2))));
        let r = f.region(&set(&[1, 4, 6]));
        assert_eq!(r.omega_dim, -1);
        let r = f.region(&set(&[1, 4, 5]));
        assert_eq!(r.omega_dim, 1);
        assert_eq!(
            f.classify_point(&pt(frac(1, 2), rat(0))),
            PointClass::U0Prime { walls: vec![set(&[1, 5, 6]), set(&[3, 4, 5])] }
        );
        assert_eq!(f.classify_point(&pt(rat(0), rat(0))), PointClass::U2);
        assert_eq!(f.classify_point(&pt(rat(1), rat(0))), PointClass::U2);
        assert_eq!(f.classify_point(&pt(frac(1, 3), frac(1, 2))), PointClass::U0 { minimal: set(&[1, 3, 4, 5]) });
        assert_eq!(f.classify_point(&pt(rat(0), frac(1, 2))), PointClass::U1 { minimal: set(&[1, 3]) });
        assert_eq!(f.classify_point(&pt(rat(0), rat(1))), PointClass::Outside);
    }

    #[test]
    fn degenerate_planes_are_rejected() {
        let f = blowup_family();
        assert!(f.check_genericity().is_generic(), "{:?}", f.check_genericity());
        let start = f.start_rhs().to_vec();
        let e = f.embedding().clone();
        let same = TwoParamFamily::new(e.clone(), start.clone(), start.clone()).unwrap();
        assert!(!same.check_genericity().is_generic());
        let shifted: Vec<Rat> = start.iter().map(|x| x + rat(1)).collect();
        let g = TwoParamFamily::new(e, start, shifted).unwrap();
        assert!(!g.check_genericity().is_generic());
    }

    #[test]
    fn six_cells_below_the_chain() {
        let f = blowup_family();
        let strip = f.default_strip();
        let d = f.decompose(&strip).unwrap();
        assert_eq!(d.cells.len(), 6);
        let interior: Vec<&Wall> = d.walls.iter().filter(|w| !w.boundary).collect();
        assert_eq!(interior.len(), 4);
        assert!(interior.iter().all(|w| matches!(w.kind, WallKind::Divisorial { .. })));
        let boundary: Vec<&Wall> = d.walls.iter().filter(|w| w.boundary).collect();
        assert_eq!(boundary.len(), 1);
        assert_eq!(boundary[0].kind, WallKind::Fibration);
    }
}
