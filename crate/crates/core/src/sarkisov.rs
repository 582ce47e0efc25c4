//! The Mori polygonal chain of a family, its anchors, ray partitions and
//! the Sarkisov links they define.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{dot, rat, Rat, RatMatrix};
use crate::family::{Carrier, IndexSet, PointClass, Relation, Slope, Strip, TwoParamFamily, WallKind};
use crate::horo::VarietyDescriptor;
use crate::mmp::{run_hmmp, verify_scaling};
use crate::plane::{Affine2, Point2};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPiece {
    pub index_set: IndexSet,
    pub relation: Relation,
    pub from: Point2,
    pub to: Point2,
    /// Base of the fibration along the piece.
    pub target: VarietyDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub point: Point2,
    pub minimal: IndexSet,
    pub vertex: bool,
    /// Pieces ending and starting at the anchor.
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoriChain {
    pub pieces: Vec<ChainPiece>,
    pub anchors: Vec<Anchor>,
}

fn check_hypotheses(family: &TwoParamFamily) -> Result<()> {
    let report = family.check_genericity();
    if !report.is_generic() {
        return Err(Error::Genericity(report.violations.join("; ")));
    }
    for corner in [Point2::new(rat(0), rat(0)), Point2::new(rat(1), rat(0))] {
        if !family.in_omega(&corner, &IndexSet::new()) {
            return Err(Error::Hypothesis(format!("the divisor at the corner {corner:?} is not ample")));
        }
    }
    let e = family.embedding();
    let below = Affine2::new(-Rat::one(), Rat::zero(), Rat::zero());
    for i in (0..e.len()).filter(|&i| !e.is_color(i)) {
        let region = family.region(&IndexSet::from([i]));
        for delta in [rat(0), rat(1)] {
            let line = region.closure.with(&[
                Affine2::new(Rat::zero(), Rat::one(), -delta.clone()),
                Affine2::new(Rat::zero(), -Rat::one(), delta.clone()),
            ]);
            let reaches = match line.max_of(&below) {
                Some(None) => true,
                Some(Some(v)) => v.is_positive(),
                None => false,
            };
            if !reaches {
                return Err(Error::Hypothesis(format!(
                    "row {} is not a facet for any negative epsilon at delta = {delta}",
                    e.id(i)
                )));
            }
        }
    }
    Ok(())
}

/// The upper boundary of the ample stratum over `0 <= delta <= 1`.
pub fn mori_chain(family: &TwoParamFamily) -> Result<MoriChain> {
    check_hypotheses(family)?;
    let strip = Strip { delta_lo: rat(0), delta_hi: rat(1), eps_lo: family.default_strip().eps_lo, eps_hi: None };
    let mut walls: Vec<_> =
        family.walls(&strip).into_iter().filter(|w| w.boundary && w.from.delta != w.to.delta).collect();
    walls.sort_by(|a, b| a.from.cmp(&b.from));
    let (Some(first), Some(last)) = (walls.first(), walls.last()) else {
        return Err(Error::Hypothesis("the ample stratum has no upper boundary over [0, 1]".into()));
    };
    if !first.from.delta.is_zero() || !last.to.delta.is_one() {
        return Err(Error::Internal("the chain does not span 0 <= delta <= 1".into()));
    }
    for pair in walls.windows(2) {
        if pair[0].to != pair[1].from {
            return Err(Error::Internal(format!("the chain has a gap at {:?}", pair[0].to)));
        }
    }
    for w in &walls {
        if w.kind != WallKind::Fibration {
            return Err(Error::Internal(format!("boundary wall {:?} is not a fibration", w.index_set)));
        }
    }
    let lines: Vec<Affine2> = family.active_circuits().into_iter().map(|(_, r)| r.line).collect();
    let mut anchor_sets: BTreeMap<Point2, IndexSet> = BTreeMap::new();
    for w in &walls {
        for l in &lines {
            let Some(p) = w.relation.line.intersect(l) else { continue };
            if p < w.from || p > w.to || p.delta.is_zero() || p.delta.is_one() || anchor_sets.contains_key(&p) {
                continue;
            }
            if let PointClass::U0 { minimal } = family.classify_point(&p) {
                anchor_sets.insert(p, minimal);
            }
        }
    }
    let mut pieces = Vec::new();
    for w in &walls {
        let mut cuts: Vec<Point2> = vec![w.from.clone()];
        cuts.extend(anchor_sets.keys().filter(|p| **p > w.from && **p < w.to).cloned());
        cuts.push(w.to.clone());
        for pair in cuts.windows(2) {
            let mid = pair[0].midpoint(&pair[1]);
            match family.classify_point(&mid) {
                PointClass::U1 { minimal } if minimal == w.index_set => {}
                other => return Err(Error::Internal(format!("chain piece midpoint {mid:?} classifies as {other:?}"))),
            }
            pieces.push(ChainPiece {
                index_set: w.index_set.clone(),
                relation: w.relation.clone(),
                from: pair[0].clone(),
                to: pair[1].clone(),
                target: family.descriptor_at(&mid)?,
            });
        }
    }
    let mut anchors = Vec::new();
    for (point, minimal) in anchor_sets {
        let left = pieces.iter().position(|p| p.to == point);
        let right = pieces.iter().position(|p| p.from == point);
        let (Some(left), Some(right)) = (left, right) else {
            return Err(Error::Internal(format!("anchor {point:?} is not between two pieces")));
        };
        let vertex = !pieces[left].relation.line.same_line(&pieces[right].relation.line);
        anchors.push(Anchor { point, minimal, vertex, left, right });
    }
    Ok(MoriChain { pieces, anchors })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Nu {
    NegInfinity,
    Finite(Rat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayPartition {
    pub anchor: Point2,
    pub minimal: IndexSet,
    pub vertex: bool,
    /// Relation of the left chain piece, normalized so that its `C`-sum is one.
    pub first: Relation,
    /// Second relation: the right piece at a vertex, otherwise the one on `L`.
    pub second: Vec<Rat>,
    pub d: Rat,
    /// Whether the second relation satisfies the orientation `sl * d < b`.
    pub oriented: bool,
    pub nu: Vec<Nu>,
    /// `K^s`, by decreasing `nu`.
    pub classes: Vec<IndexSet>,
    /// `K_s = L \ K^s`.
    pub complements: Vec<IndexSet>,
    pub slopes: Vec<Slope>,
    pub carrier_slopes: Vec<Slope>,
    pub relative_slopes: Vec<Slope>,
    /// Indices `s` of the rays entering the stratum, counterclockwise from the left piece.
    pub ray_order: Vec<usize>,
    /// Unit (L1) directions of the rays, indexed like `complements`.
    pub directions: Vec<Option<Point2>>,
}

impl RayPartition {
    pub fn formula_matches_carriers(&self) -> bool {
        self.slopes == self.carrier_slopes
    }

    /// `+inf` first, then strictly decreasing finite values.
    pub fn relative_slopes_decrease(&self) -> bool {
        let Some((Slope::Infinite, rest)) = self.relative_slopes.split_first() else { return false };
        let mut values = Vec::new();
        for s in rest {
            match s {
                Slope::Finite(v) => values.push(v),
                Slope::Infinite => return false,
            }
        }
        values.windows(2).all(|w| w[0] > w[1])
    }

    /// Interior rays in geometric order.
    pub fn rays_in_partition_order(&self) -> bool {
        self.ray_order.windows(2).all(|w| w[0] < w[1])
    }
}

fn relative_slope(base: &Rat, slope: &Slope) -> Slope {
    match slope {
        Slope::Infinite => Slope::Finite(-base.clone()),
        Slope::Finite(x) => Slope::ratio(base * x + Rat::one(), base - x),
    }
}

/// Direction from `anchor` along the carrier of `rows` into its stratum.
fn ray_direction(family: &TwoParamFamily, rows: &IndexSet, anchor: &Point2) -> Result<Point2> {
    let rel = family.carrier_line(rows)?;
    let dir = rel.line.direction();
    let closure = family.region(rows).closure;
    let along =
        Affine2::new(dir.eps.clone(), dir.delta.clone(), -dir.delta.clone() * &anchor.delta - &dir.eps * &anchor.eps);
    let forward = match closure.max_of(&along) {
        Some(None) => true,
        Some(Some(v)) => v.is_positive(),
        None => return Err(Error::Internal(format!("stratum of {rows:?} is empty"))),
    };
    Ok(if forward { dir.normalized() } else { dir.scale(&-Rat::one()).normalized() })
}

/// Orders vectors by counterclockwise angle from `start`.
fn ccw_from(start: &Point2, a: &Point2, b: &Point2) -> Ordering {
    let half = |v: &Point2| {
        let c = start.cross(v);
        let d = &start.delta * &v.delta + &start.eps * &v.eps;
        if c.is_positive() || (c.is_zero() && d.is_positive()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        let c = a.cross(b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

fn second_relation(family: &TwoParamFamily, minimal: &IndexSet, first: &Relation) -> Result<(Vec<Rat>, bool)> {
    let basis = family.relations(minimal);
    let p = first.coeffs.len();
    let mu = basis
        .into_iter()
        .find(|v| RatMatrix::from_rows(p, vec![first.coeffs.clone(), v.clone()]).expect("lengths").rank() == 2)
        .ok_or_else(|| Error::Internal(format!("{minimal:?} has a single relation")))?;
    let on_first = first.support();
    let sl_first = dot(&first.coeffs, &family_diff(family));
    let anti = family.anticanonical();
    let diff = family_diff(family);
    let mut admissible = Vec::new();
    for sign in [Rat::one(), -Rat::one()] {
        let v: Vec<Rat> = mu.iter().map(|x| x * &sign).collect();
        let t = on_first.iter().map(|&j| -&v[j] / &first.coeffs[j]).max().expect("nonempty support");
        let rho: Vec<Rat> = v.iter().zip(&first.coeffs).map(|(x, l)| x + &t * l).collect();
        let c = dot(&rho, anti);
        let b = dot(&rho, &diff);
        if c.is_negative() || (c.is_zero() && !b.is_positive()) {
            continue;
        }
        let rho: Vec<Rat> = if c.is_positive() { rho.iter().map(|x| x / &c).collect() } else { rho };
        let d = if c.is_positive() { Rat::one() } else { Rat::zero() };
        let b = dot(&rho, &diff);
        let oriented = &sl_first * &d < b;
        admissible.push((rho, oriented));
    }
    admissible.sort_by_key(|(_, oriented)| !*oriented);
    let (rho, oriented) = admissible
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal(format!("no admissible second relation on {minimal:?}")))?;
    for &j in minimal.difference(&on_first) {
        if rho[j].is_zero() {
            return Err(Error::Internal(format!("{minimal:?} is not minimal: the second relation vanishes at {j}")));
        }
    }
    Ok((rho, oriented))
}

fn family_diff(family: &TwoParamFamily) -> Vec<Rat> {
    family.start_rhs().iter().zip(family.end_rhs()).map(|(b, e)| e - b).collect()
}

pub fn ray_partition(family: &TwoParamFamily, chain: &MoriChain, index: usize) -> Result<RayPartition> {
    let anchor = chain.anchors.get(index).ok_or_else(|| Error::InvalidInput(format!("no anchor number {index}")))?;
    let point = &anchor.point;
    if family.in_omega(point, &IndexSet::new()) {
        return Err(Error::Stratum(format!("{point:?} is interior to the ample stratum")));
    }
    match family.classify_point(point) {
        PointClass::U0 { minimal } if minimal == anchor.minimal => {}
        other => return Err(Error::Stratum(format!("{point:?} classifies as {other:?}"))),
    }
    let minimal = &anchor.minimal;
    let left = &chain.pieces[anchor.left];
    let right = &chain.pieces[anchor.right];
    let first = left.relation.clone();
    if !(first.line.eps.is_one() && first.positive() == first.support()) {
        return Err(Error::Internal("chain relation is not a positive relation of C-sum one".into()));
    }
    let diff = family_diff(family);
    let (second, oriented, d) = if anchor.vertex {
        let sl = dot(&first.coeffs, &diff);
        let b = dot(&right.relation.coeffs, &diff);
        (right.relation.coeffs.clone(), sl < b, Rat::one())
    } else {
        let (rho, oriented) = second_relation(family, minimal, &first)?;
        let d = dot(&rho, family.anticanonical());
        (rho, oriented, d)
    };
    let mut groups: BTreeMap<Nu, IndexSet> = BTreeMap::new();
    for &h in minimal {
        let nu = if second[h].is_zero() { Nu::NegInfinity } else { Nu::Finite(-&first.coeffs[h] / &second[h]) };
        groups.entry(nu).or_default().insert(h);
    }
    let (nu, classes): (Vec<Nu>, Vec<IndexSet>) = groups.into_iter().rev().unzip();
    let complements: Vec<IndexSet> = classes.iter().map(|k| minimal.difference(k).copied().collect()).collect();
    let a = dot(&first.coeffs, &diff);
    let b = dot(&second, &diff);
    let slopes: Vec<Slope> = nu
        .iter()
        .map(|n| match n {
            Nu::Finite(v) => Slope::ratio(&a + v * &b, Rat::one() + &d * v),
            Nu::NegInfinity => Slope::ratio(b.clone(), d.clone()),
        })
        .collect();
    let carrier_slopes: Vec<Slope> =
        complements.iter().map(|k| family.carrier_line(k).map(|r| r.slope())).collect::<Result<_>>()?;
    let relative_slopes = slopes.iter().map(|s| relative_slope(&a, s)).collect();
    let count = complements.len();
    let interior: Vec<usize> = if anchor.vertex { (1..count - 1).collect() } else { (1..count).collect() };
    let mut directions: Vec<Option<Point2>> = vec![None; count];
    for &s in &interior {
        directions[s] = Some(ray_direction(family, &complements[s], point)?);
    }
    let start = left.from.sub(point);
    let mut ray_order = interior.clone();
    ray_order.sort_by(|&x, &y| {
        ccw_from(&start, directions[x].as_ref().expect("interior"), directions[y].as_ref().expect("interior"))
    });
    Ok(RayPartition {
        anchor: point.clone(),
        minimal: minimal.clone(),
        vertex: anchor.vertex,
        first,
        second,
        d,
        oriented,
        nu,
        classes,
        complements,
        slopes,
        carrier_slopes,
        relative_slopes,
        ray_order,
        directions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkType {
    I,
    II,
    III,
    IVm,
    IVs,
}

impl LinkType {
    pub fn name(&self) -> &'static str {
        match self {
            LinkType::I => "I",
            LinkType::II => "II",
            LinkType::III => "III",
            LinkType::IVm => "IV_m",
            LinkType::IVs => "IV_s",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrowKind {
    Flip,
    /// `varieties[from]` contracts a divisor onto `varieties[to]`.
    Divisorial {
        from: usize,
        to: usize,
    },
    Isomorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SarkisovLink {
    pub anchor: Point2,
    pub minimal: IndexSet,
    pub vertex: bool,
    pub link_type: LinkType,
    /// Varieties of the sectors between consecutive rays, left to right.
    pub varieties: Vec<VarietyDescriptor>,
    /// `arrows[i]` relates `varieties[i]` and `varieties[i + 1]`.
    pub arrows: Vec<ArrowKind>,
    pub left_base: VarietyDescriptor,
    pub right_base: VarietyDescriptor,
    pub center: VarietyDescriptor,
    pub partition: RayPartition,
}

/// `from -> to` lowers the rank or loses open-orbit colors.
pub fn drops_dimension(from: &VarietyDescriptor, to: &VarietyDescriptor) -> bool {
    let a: BTreeSet<_> = from.open_orbit_colors.keys().collect();
    let b: BTreeSet<_> = to.open_orbit_colors.keys().collect();
    to.rank() < from.rank() || (b.is_subset(&a) && b.len() < a.len())
}

fn carrier_lines(family: &TwoParamFamily) -> Vec<Affine2> {
    family
        .circuits()
        .iter()
        .filter_map(|c| match family.carrier(c) {
            Carrier::Line(l) => Some(l),
            _ => None,
        })
        .collect()
}

/// `sample` sees `anchor` without crossing a line, and lies on a line
/// through the anchor only if `on_ray`.
fn isolated(lines: &[Affine2], anchor: &Point2, sample: &Point2, on_ray: bool) -> bool {
    lines.iter().all(|l| {
        let at_anchor = l.eval(anchor);
        let at_sample = l.eval(sample);
        if at_anchor.is_zero() {
            on_ray || !at_sample.is_zero()
        } else {
            at_anchor.signum() == at_sample.signum()
        }
    })
}

pub fn classify_link(family: &TwoParamFamily, chain: &MoriChain, partition: &RayPartition) -> Result<SarkisovLink> {
    let anchor = chain
        .anchors
        .iter()
        .find(|a| a.point == partition.anchor)
        .ok_or_else(|| Error::InvalidInput("partition does not belong to the chain".into()))?;
    let point = &anchor.point;
    let left = &chain.pieces[anchor.left];
    let right = &chain.pieces[anchor.right];
    let mut bounds: Vec<Point2> = vec![left.from.sub(point).normalized()];
    bounds.extend(partition.ray_order.iter().map(|&s| partition.directions[s].clone().expect("interior")));
    bounds.push(right.to.sub(point).normalized());
    let lines = carrier_lines(family);
    let weights = [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1)];
    let mut sector_dirs = Vec::new();
    for pair in bounds.windows(2) {
        let dir = weights
            .iter()
            .map(|&(u, v)| pair[0].scale(&rat(u)).add(&pair[1].scale(&rat(v))).normalized())
            .find(|d| lines.iter().all(|l| !l.eval(point).is_zero() || !l.eval(&point.add(d)).is_zero()))
            .ok_or_else(|| Error::Internal(format!("no free direction in a sector at {point:?}")))?;
        sector_dirs.push(dir);
    }
    let mut h = rat(1) / rat(4);
    let mut found = None;
    for _ in 0..64 {
        let sectors: Vec<Point2> = sector_dirs.iter().map(|d| point.add(&d.scale(&h))).collect();
        let rays: Vec<Point2> = bounds[1..bounds.len() - 1].iter().map(|d| point.add(&d.scale(&h))).collect();
        if sectors.iter().all(|s| isolated(&lines, point, s, false))
            && rays.iter().all(|s| isolated(&lines, point, s, true))
        {
            found = Some((sectors, rays));
            break;
        }
        h /= rat(2);
    }
    let (sectors, rays) = found.ok_or_else(|| Error::Internal(format!("no isolating neighborhood at {point:?}")))?;
    let varieties: Vec<VarietyDescriptor> =
        sectors.par_iter().map(|s| family.descriptor_at(s)).collect::<Result<_>>()?;
    let mut arrows = Vec::new();
    for (i, (s, sample)) in partition.ray_order.iter().zip(&rays).enumerate() {
        let rel = family.carrier_line(&partition.complements[*s])?;
        let wall = family.descriptor_at(sample)?;
        let (lo, hi) = (&varieties[i], &varieties[i + 1]);
        let arrow = match rel.kind(family.embedding()) {
            WallKind::Flip => ArrowKind::Flip,
            WallKind::Divisorial { .. } => match (lo == &wall, hi == &wall) {
                (true, true) => ArrowKind::Isomorphism,
                (true, false) => ArrowKind::Divisorial { from: i + 1, to: i },
                (false, true) => ArrowKind::Divisorial { from: i, to: i + 1 },
                (false, false) => {
                    return Err(Error::Internal(format!("divisorial ray at {sample:?} changes both sides")))
                }
            },
            WallKind::Fibration => {
                return Err(Error::Internal(format!("fibration ray entering the stratum at {point:?}")))
            }
        };
        arrows.push(arrow);
    }
    let center = family.descriptor_at(point)?;
    let left_base = left.target.clone();
    let right_base = right.target.clone();
    let link_type = match (center == left_base, center == right_base) {
        (true, true) => LinkType::II,
        (true, false) => LinkType::I,
        (false, true) => LinkType::III,
        (false, false) => match (drops_dimension(&left_base, &center), drops_dimension(&right_base, &center)) {
            (true, true) => LinkType::IVm,
            (false, false) => LinkType::IVs,
            _ => return Err(Error::Internal(format!("mixed type IV link at {point:?}"))),
        },
    };
    Ok(SarkisovLink {
        anchor: point.clone(),
        minimal: anchor.minimal.clone(),
        vertex: anchor.vertex,
        link_type,
        varieties,
        arrows,
        left_base,
        right_base,
        center,
        partition: partition.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreSpace {
    pub variety: VarietyDescriptor,
    pub base: VarietyDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SarkisovProgram {
    pub chain: MoriChain,
    pub links: Vec<SarkisovLink>,
    pub start: FibreSpace,
    pub end: FibreSpace,
}

fn end_space(family: &TwoParamFamily, delta: &Rat, expected: Option<&FibreSpace>) -> Result<FibreSpace> {
    if let Some(fs) = expected {
        let verdict = verify_scaling(family, &fs.variety, &fs.base, delta)?;
        if !verdict.holds {
            return Err(Error::Hypothesis(format!(
                "scaling check at delta = {delta} failed: {}",
                verdict.diagnostics.join("; ")
            )));
        }
    }
    let run = run_hmmp(family, delta, &Rat::zero())?;
    let last = run.terminal();
    Ok(FibreSpace { variety: last.source.clone(), base: last.center.clone() })
}

pub fn run_sarkisov(
    family: &TwoParamFamily,
    start: Option<&FibreSpace>,
    end: Option<&FibreSpace>,
) -> Result<SarkisovProgram> {
    let chain = mori_chain(family)?;
    let start = end_space(family, &rat(0), start)?;
    let end = end_space(family, &rat(1), end)?;
    let links: Vec<SarkisovLink> = (0..chain.anchors.len())
        .into_par_iter()
        .map(|k| ray_partition(family, &chain, k).and_then(|p| classify_link(family, &chain, &p)))
        .collect::<Result<_>>()?;
    let mut current = start.clone();
    for link in &links {
        let first = FibreSpace { variety: link.varieties[0].clone(), base: link.left_base.clone() };
        if first != current {
            return Err(Error::Internal(format!("link at {:?} does not start where the last ended", link.anchor)));
        }
        current =
            FibreSpace { variety: link.varieties.last().expect("a sector").clone(), base: link.right_base.clone() };
    }
    if current != end {
        return Err(Error::Internal("the program does not end at the final fibre space".into()));
    }
    Ok(SarkisovProgram { chain, links, start, end })
}
