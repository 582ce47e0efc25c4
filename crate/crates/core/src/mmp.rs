//! Minimal model program with scaling along a vertical line of the family.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{primitive, rat, Rat};
use crate::family::{Carrier, IndexSet, PointClass, TwoParamFamily, WallKind};
use crate::horo::{RowId, VarietyDescriptor};
use crate::plane::{Affine2, Point2};
use crate::polytope::face_nonempty;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WallClassification {
    Fibration {
        target: VarietyDescriptor,
    },
    Divisorial {
        row: RowId,
        target: VarietyDescriptor,
    },
    Flip {
        minimal: IndexSet,
    },
    /// Divisorial signs, but the contracted row is not a facet on the near side.
    Isomorphism {
        row: RowId,
    },
}

impl WallClassification {
    pub fn name(&self) -> &'static str {
        match self {
            WallClassification::Fibration { .. } => "fibration",
            WallClassification::Divisorial { .. } => "divisorial",
            WallClassification::Flip { .. } => "flip",
            WallClassification::Isomorphism { .. } => "isomorphism",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HmmpEvent {
    pub eps: Rat,
    pub minimal: IndexSet,
    pub classification: WallClassification,
    pub source: VarietyDescriptor,
    /// Variety of the polytope on the wall.
    pub center: VarietyDescriptor,
    /// Variety just past the wall; the base for the final fibration.
    pub target: VarietyDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HmmpRun {
    pub delta: Rat,
    pub eps_start: Rat,
    pub eps_max: Rat,
    pub events: Vec<HmmpEvent>,
}

impl HmmpRun {
    pub fn terminal(&self) -> &HmmpEvent {
        self.events.last().expect("a run ends with a fibration")
    }
}

/// Classifies the wall through `point` with minimal index set `minimal`,
/// approached from `near`, a point of the adjacent open cell.
pub fn classify_wall(
    family: &TwoParamFamily,
    point: &Point2,
    minimal: &IndexSet,
    near: &Point2,
) -> Result<WallClassification> {
    match family.classify_point(point) {
        PointClass::U1 { minimal: m } if &m == minimal => {}
        PointClass::U1 { minimal: m } => {
            return Err(Error::Stratum(format!(
                "{:?} is not minimal at {point:?}, expected {:?}",
                family.embedding().ids(minimal),
                family.embedding().ids(&m)
            )))
        }
        other => return Err(Error::Stratum(format!("{point:?} is not on a single wall: {other:?}"))),
    }
    let relation = family.carrier_line(minimal)?;
    let center = family.descriptor_at(point)?;
    Ok(match relation.kind(family.embedding()) {
        WallKind::Fibration => WallClassification::Fibration { target: center },
        WallKind::Divisorial { row } => {
            let id = family.embedding().id(row);
            if family.descriptor_at(near)? == center {
                WallClassification::Isomorphism { row: id }
            } else {
                WallClassification::Divisorial { row: id, target: center }
            }
        }
        WallKind::Flip => WallClassification::Flip { minimal: minimal.clone() },
    })
}

fn vertical(delta: &Rat) -> Affine2 {
    Affine2::new(Rat::zero(), Rat::one(), -delta.clone())
}

/// Largest `eps` with `(delta, eps)` in the closure of the ample stratum.
pub fn eps_max(family: &TwoParamFamily, delta: &Rat) -> Result<Rat> {
    let line = family.empty_set_region().closure.with(&[vertical(delta), vertical(delta).neg()]);
    match line.max_of(&Affine2::new(Rat::one(), Rat::zero(), Rat::zero())) {
        Some(Some(v)) => Ok(v),
        Some(None) => Err(Error::Hypothesis(format!("epsilon is unbounded at delta = {delta}"))),
        None => Err(Error::Hypothesis(format!("no polytope in the family at delta = {delta}"))),
    }
}

pub fn run_hmmp(family: &TwoParamFamily, delta: &Rat, eps_start: &Rat) -> Result<HmmpRun> {
    let start = Point2::new(delta.clone(), eps_start.clone());
    if !family.in_omega(&start, &IndexSet::new()) {
        return Err(Error::Hypothesis(format!("the divisor at {start:?} is not ample")));
    }
    let top = eps_max(family, delta)?;
    let mut crossings: BTreeSet<Rat> = BTreeSet::new();
    for region in family.circuit_regions().iter().filter(|r| r.omega_dim == 1) {
        if let Carrier::Line(l) = &region.carrier {
            if let Some(p) = l.intersect(&vertical(delta)) {
                if &p.eps > eps_start && p.eps <= top {
                    crossings.insert(p.eps);
                }
            }
        }
    }
    crossings.insert(top.clone());
    let at = |eps: &Rat| Point2::new(delta.clone(), eps.clone());
    let mut events: Vec<(Rat, IndexSet)> = Vec::new();
    for eps in &crossings {
        let p = at(eps);
        match family.classify_point(&p) {
            PointClass::U2 => {}
            PointClass::U1 { minimal } => events.push((eps.clone(), minimal)),
            PointClass::Outside => return Err(Error::Internal(format!("{p:?} left the family"))),
            other => {
                return Err(Error::Stratum(format!(
                    "the line delta = {delta} meets the point stratum {other:?} at {p:?}; perturb delta"
                )))
            }
        }
    }
    let half = rat(1) / rat(2);
    let mut out = Vec::new();
    let mut previous = eps_start.clone();
    for (k, (eps, minimal)) in events.iter().enumerate() {
        let before = at(&((&previous + eps) * &half));
        let point = at(eps);
        let classification = classify_wall(family, &point, minimal, &before)?;
        let source = family.descriptor_at(&before)?;
        let center = family.descriptor_at(&point)?;
        let target = match events.get(k + 1) {
            Some((next, _)) => family.descriptor_at(&at(&((eps + next) * &half)))?,
            None => center.clone(),
        };
        out.push(HmmpEvent { eps: eps.clone(), minimal: minimal.clone(), classification, source, center, target });
        previous = eps.clone();
    }
    match out.last() {
        Some(HmmpEvent { classification: WallClassification::Fibration { .. }, eps, .. }) if eps == &top => {}
        _ => return Err(Error::Internal(format!("the run at delta = {delta} does not end in a fibration"))),
    }
    Ok(HmmpRun { delta: delta.clone(), eps_start: eps_start.clone(), eps_max: top, events: out })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingVerdict {
    pub holds: bool,
    pub diagnostics: Vec<String>,
}

/// Whether the run from `(delta, 0)` ends with `expected_x` fibred over
/// `expected_base`, with the rows that are not divisors of `expected_x`
/// strictly redundant at the start.
pub fn verify_scaling(
    family: &TwoParamFamily,
    expected_x: &VarietyDescriptor,
    expected_base: &VarietyDescriptor,
    delta: &Rat,
) -> Result<ScalingVerdict> {
    let run = run_hmmp(family, delta, &Rat::zero())?;
    let mut diagnostics = Vec::new();
    let last = run.terminal();
    if &last.source != expected_x {
        diagnostics.push("the variety before the fibration differs from the expected one".to_string());
    }
    if &last.center != expected_base {
        diagnostics.push("the base of the fibration differs from the expected one".to_string());
    }
    let e = family.embedding();
    let polytope = family.polytope_at(&Point2::new(delta.clone(), Rat::zero()));
    let rays = expected_x.rays();
    for i in 0..e.len() {
        if e.is_color(i) {
            continue;
        }
        let restricted = primitive(&expected_x.sublattice.restrict_form(e.matrix().row(i)));
        if rays.contains(&restricted) {
            continue;
        }
        if face_nonempty(&polytope, &IndexSet::from([i]), false) {
            diagnostics.push(format!("row {} is not strictly redundant at delta = {delta}", e.id(i)));
        }
    }
    Ok(ScalingVerdict { holds: diagnostics.is_empty(), diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::frac;
    use crate::family::tests::{blowup_family, six_ray_family};

    fn p1xp1() -> VarietyDescriptor {
        VarietyDescriptor::toric(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
    }

    fn hirzebruch2() -> VarietyDescriptor {
        VarietyDescriptor::toric(&[&[1, 0], &[0, 1], &[-1, 0], &[2, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
    }

    fn line_descriptor(f: &TwoParamFamily, p: Point2) -> VarietyDescriptor {
        f.descriptor_at(&p).unwrap()
    }

    #[test]
    fn run_at_left_edge_is_one_fibration() {
        let f = blowup_family();
        let run = run_hmmp(&f, &rat(0), &rat(0)).unwrap();
        assert_eq!(run.events.len(), 1);
        let ev = &run.events[0];
        assert_eq!(ev.eps, frac(1, 2));
        assert!(matches!(ev.classification, WallClassification::Fibration { .. }));
        assert_eq!(ev.source, p1xp1());
        assert_eq!(ev.center.rank(), 1);
    }

    #[test]
    fn run_through_the_blowup_contracts_first() {
        let f = blowup_family();
        let run = run_hmmp(&f, &frac(2, 5), &rat(0)).unwrap();
        let kinds: Vec<&str> = run.events.iter().map(|e| e.classification.name()).collect();
        assert_eq!(kinds, vec!["divisorial", "fibration"]);
        assert_eq!(run.events[0].eps, frac(3, 10));
        assert_eq!(run.events[0].minimal, IndexSet::from([2, 3, 4]));
        let WallClassification::Divisorial { row, .. } = &run.events[0].classification else { unreachable!() };
        assert_eq!(*row, 4);
        let before = run.events[0].source.picard_number().unwrap();
        let after = run.events[0].target.picard_number().unwrap();
        assert_eq!(before, after + 1);
    }

    #[test]
    fn point_strata_stop_the_run() {
        let f = blowup_family();
        assert!(matches!(run_hmmp(&f, &frac(1, 3), &rat(-1)), Err(Error::Stratum(_))));
        assert!(matches!(run_hmmp(&f, &rat(0), &rat(1)), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn scaling_at_both_ends() {
        let f = blowup_family();
        let base = line_descriptor(&f, Point2::new(rat(0), frac(1, 2)));
        let v = verify_scaling(&f, &p1xp1(), &base, &rat(0)).unwrap();
        assert!(v.holds, "{:?}", v.diagnostics);
        let base = line_descriptor(&f, Point2::new(rat(1), frac(1, 2)));
        let v = verify_scaling(&f, &hirzebruch2(), &base, &rat(1)).unwrap();
        assert!(v.holds, "{:?}", v.diagnostics);
        let tight = six_ray_family(&[rat(0), rat(0), rat(-1), rat(-2), rat(-2), rat(-4)]);
        let base = line_descriptor(&tight, Point2::new(rat(0), frac(1, 2)));
        let v = verify_scaling(&tight, &p1xp1(), &base, &rat(0)).unwrap();
        assert!(!v.holds);
    }
}
