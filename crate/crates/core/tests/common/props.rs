#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use crate::common::*;
use horosark_core::exactnum::{frac, primitive, rat, to_rats, Rat};
use horosark_core::family::{IndexSet, Strip, TwoParamFamily};
use horosark_core::horo::{EmbeddingData, EmbeddingRow, RowKind};
use horosark_core::mmp::{run_hmmp, WallClassification};
use horosark_core::plane::{Affine2, Point2};
use horosark_core::polytope::face_nonempty;
use horosark_core::sarkisov::{classify_link, mori_chain, ray_partition};

pub const CASES: u32 = 1000;

type Check = Result<(), TestCaseError>;

/// Runs `check` on `CASES` values of `strategy`; `PROPERTY_CASES` overrides the count.
fn run<S: Strategy>(strategy: S, check: impl Fn(S::Value) -> Check) -> Result<u32, String> {
    let cases = std::env::var("PROPERTY_CASES").ok().and_then(|s| s.parse().ok()).unwrap_or(CASES);
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new(config).run(&strategy, check).map(|_| cases).map_err(|e| e.to_string())
}

#[derive(Clone, Debug)]
struct RowSpec {
    color: bool,
    vector: Vec<i64>,
}

fn row_strategy(n: usize, colors: bool) -> impl Strategy<Value = RowSpec> {
    (prop::bool::weighted(if colors { 0.3 } else { 0.0 }), prop::collection::vec(-2i64..=2, n))
        .prop_map(|(color, vector)| RowSpec { color, vector })
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (1i64..=24, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

/// A random family with `n <= 3` and `p <= 8`: a bounding simplex plus random rows,
/// both end polytopes containing the origin in their interior.
fn family_strategy(colors: bool) -> impl Strategy<Value = TwoParamFamily> {
    (1usize..=3)
        .prop_flat_map(move |n| {
            (
                Just(n),
                prop::collection::vec(row_strategy(n, colors), 0..=(7 - n)),
                prop::collection::vec(small_rat(), 8),
                prop::collection::vec(small_rat(), 8),
            )
        })
        .prop_map(|(n, extra, start, end)| build(n, &extra, &start, &end))
}

fn build(n: usize, extra: &[RowSpec], start: &[Rat], end: &[Rat]) -> TwoParamFamily {
    let mut rows: Vec<EmbeddingRow> = Vec::new();
    let mut push = |kind: RowKind, vector: Vec<i64>, anti: i64| {
        let id = rows.len() as u32 + 1;
        rows.push(EmbeddingRow { id, kind, vector: vector.into_iter().map(rat).collect(), anticanonical: rat(anti) });
    };
    for k in 0..n {
        let mut v = vec![0; n];
        v[k] = 1;
        push(RowKind::Ray, v, 1);
    }
    push(RowKind::Ray, vec![-1; n], 1);
    for (k, r) in extra.iter().enumerate() {
        if r.color {
            push(RowKind::Color, r.vector.clone(), 2 + (k as i64 % 2));
        } else if r.vector.iter().all(|&x| x == 0) {
            push(RowKind::Ray, (0..n).map(|j| if j == 0 { -1 } else { 1 }).collect(), 1);
        } else {
            let p = primitive(&r.vector.iter().map(|&x| rat(x)).collect::<Vec<_>>());
            let v = to_rats(&p).iter().map(|x| x.to_integer().try_into().unwrap()).collect();
            push(RowKind::Ray, v, 1);
        }
    }
    let p = rows.len();
    let e = EmbeddingData::new(n, rows).unwrap();
    TwoParamFamily::new(e, neg(&start[..p]), neg(&end[..p])).unwrap()
}

fn point_strategy() -> impl Strategy<Value = Point2> {
    (-8i64..=16, -8i64..=16, 1i64..=8).prop_map(|(d, e, den)| Point2::new(frac(d, den), frac(e, den)))
}

fn subset_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..8, 0..=4)
}

fn as_set(f: &TwoParamFamily, v: &[usize]) -> IndexSet {
    v.iter().filter(|&&i| i < f.embedding().len()).copied().collect()
}

fn box_constraints() -> Vec<Affine2> {
    Strip { delta_lo: rat(-2), delta_hi: rat(3), eps_lo: rat(-2), eps_hi: Some(rat(3)) }.constraints()
}

fn in_closure_by_lp(f: &TwoParamFamily, p: &Point2, rows: &IndexSet) -> bool {
    face_nonempty(&f.polytope_at(p), rows, false)
}

/// Index sets whose stratum contains `p`, with `p` as a witness.
fn strata_at(f: &TwoParamFamily, p: &Point2) -> Vec<IndexSet> {
    f.faces_at(p).unwrap_or_default()
}

pub fn projected_region_equals_direct_lp() -> Result<u32, String> {
    run((family_strategy(true), subset_strategy(), prop::collection::vec(point_strategy(), 4)), |(f, rows, pts)| {
        let rows = as_set(&f, &rows);
        let region = f.region(&rows);
        let clipped = region.closure.with(&box_constraints()).pruned();
        let mut probes = pts.clone();
        probes.extend(clipped.polygon());
        probes.extend(region.relint.clone());
        for p in &probes {
            prop_assert_eq!(region.closure.contains(p), in_closure_by_lp(&f, p, &rows), "{:?} at {:?}", rows, p);
        }
        Ok(())
    })
}

pub fn strata_are_convex_and_dense_in_their_closure() -> Result<u32, String> {
    run((family_strategy(true), point_strategy(), point_strategy()), |(f, p, q)| {
        for rows in strata_at(&f, &p) {
            prop_assert!(f.in_omega(&p, &rows));
            let region = f.region(&rows);
            prop_assert!(region.closure.contains(&p));
            let clipped = region.closure.with(&box_constraints()).pruned();
            for v in clipped.polygon() {
                prop_assert!(in_closure_by_lp(&f, &v.midpoint(&p), &rows));
                prop_assert!(f.in_omega(&v.midpoint(&p), &rows), "{:?} between {:?} and {:?}", rows, v, p);
            }
            if f.in_omega(&q, &rows) {
                prop_assert!(f.in_omega(&q.midpoint(&p), &rows));
            }
        }
        Ok(())
    })
}

pub fn regions_shrink_as_index_sets_grow() -> Result<u32, String> {
    run((family_strategy(true), subset_strategy(), prop::collection::vec(point_strategy(), 4)), |(f, rows, pts)| {
        let big = as_set(&f, &rows);
        let big_region = f.region(&big);
        let mut probes = pts.clone();
        probes.extend(big_region.closure.with(&box_constraints()).pruned().polygon());
        for drop in &big {
            let mut small = big.clone();
            small.remove(drop);
            let small_region = f.region(&small);
            for p in &probes {
                if big_region.closure.contains(p) {
                    prop_assert!(small_region.closure.contains(p));
                }
            }
        }
        Ok(())
    })
}

pub fn strict_hull_of_two_strata() -> Result<u32, String> {
    run(
        (family_strategy(true), point_strategy(), point_strategy(), prop::collection::vec((0usize..64, 0usize..64), 4)),
        |(f, p, q, picks)| {
            let at_p = strata_at(&f, &p);
            let at_q = strata_at(&f, &q);
            if at_p.is_empty() || at_q.is_empty() {
                return Ok(());
            }
            for (a, b) in picks {
                let (i, j) = (&at_p[a % at_p.len()], &at_q[b % at_q.len()]);
                let meet: IndexSet = i.intersection(j).copied().collect();
                for t in [frac(1, 2), frac(1, 5)] {
                    let x = p.add(&q.sub(&p).scale(&t));
                    prop_assert!(f.in_omega(&x, &meet), "{:?} and {:?} at {:?}", i, j, x);
                }
            }
            Ok(())
        },
    )
}

pub fn generic_families_obey_dimension_bounds() -> Result<u32, String> {
    run((family_strategy(true), subset_strategy(), point_strategy()), |(f, rows, p)| {
        if !f.check_genericity().is_generic() {
            return Ok(());
        }
        let mut sets: BTreeSet<IndexSet> = strata_at(&f, &p).into_iter().collect();
        sets.insert(as_set(&f, &rows));
        let regions = sets.iter().map(|s| f.region(s)).chain(f.circuit_regions().iter().cloned());
        for region in regions {
            let rows = &region.index_set;
            let nonempty = region.relint.as_ref().is_some_and(|w| f.in_omega(w, rows));
            if nonempty {
                let codim = f.codim(rows) as i64;
                prop_assert!(codim <= 2, "{:?} has codimension {}", rows, codim);
                prop_assert!(region.closure_dim <= 2 - codim, "{:?}: dim {} codim {}", rows, region.closure_dim, codim);
            }
        }
        Ok(())
    })
}

pub fn picard_bookkeeping_along_runs() -> Result<u32, String> {
    run((family_strategy(false), 1i64..16), |(f, delta)| {
        let delta = frac(delta, 16);
        if !f.check_genericity().is_generic() {
            return Ok(());
        }
        let Some(eps) = all_rays_are_facets(&f, &delta) else {
            return Ok(());
        };
        let Ok(run) = run_hmmp(&f, &delta, &eps) else {
            return Ok(());
        };
        check_run(&run.events)?;
        Ok(())
    })
}

pub fn perturbed_fixtures_keep_the_link_invariants() -> Result<u32, String> {
    run(
        (0usize..3, prop::collection::vec(-4i64..=4, 7), prop::collection::vec(-4i64..=4, 7), 1i64..16),
        |(which, start, end, delta)| {
            let Some(f) = perturbed(which, &start, &end) else {
                return Ok(());
            };
            let delta = frac(delta, 16);
            if let Some(eps) = all_rays_are_facets(&f, &delta) {
                if let Ok(run) = run_hmmp(&f, &delta, &eps) {
                    check_run(&run.events)?;
                }
            }
            let Ok(chain) = mori_chain(&f) else { return Ok(()) };
            for k in 0..chain.anchors.len() {
                let part = ray_partition(&f, &chain, k).unwrap();
                prop_assert!(part.formula_matches_carriers());
                prop_assert!(part.relative_slopes_decrease());
                prop_assert!(part.rays_in_partition_order());
                let link = classify_link(&f, &chain, &part).unwrap();
                let z = link.center.cartier_class_rank();
                for x in &link.varieties {
                    let rho = x.picard_number().unwrap();
                    prop_assert!(rho <= z + 2, "relative Picard number {} at {:?}", rho - z, link.anchor);
                }
            }
            Ok(())
        },
    )
}

/// A starting epsilon at which every ray row is a facet of an ample polytope.
fn all_rays_are_facets(f: &TwoParamFamily, delta: &Rat) -> Option<Rat> {
    let e = f.embedding();
    [frac(-1, 4), frac(-1, 2), rat(-1), rat(-2), rat(-4)].into_iter().find(|eps| {
        let p = Point2::new(delta.clone(), eps.clone());
        f.in_omega(&p, &IndexSet::new())
            && (0..e.len()).filter(|&i| !e.is_color(i)).all(|i| f.in_omega(&p, &IndexSet::from([i])))
    })
}

fn check_run(events: &[horosark_core::mmp::HmmpEvent]) -> Result<(), TestCaseError> {
    for ev in events {
        let before = ev.source.picard_number().unwrap();
        match &ev.classification {
            WallClassification::Flip { .. } => prop_assert_eq!(before, ev.target.picard_number().unwrap()),
            WallClassification::Divisorial { .. } => prop_assert_eq!(before, ev.target.picard_number().unwrap() + 1),
            WallClassification::Isomorphism { .. } => prop_assert_eq!(&ev.source, &ev.target),
            WallClassification::Fibration { .. } => {
                prop_assert!(ev.center.rank() < ev.source.rank() || ev.center != ev.source)
            }
        }
    }
    Ok(())
}

/// One of the three worked families with both polarizations moved by at most 1/8 per row.
fn perturbed(which: usize, start: &[i64], end: &[i64]) -> Option<TwoParamFamily> {
    let base = match which {
        0 => blowup(),
        1 => two_projections(),
        _ => rank_one(),
    };
    let shift = |v: &[Rat], by: &[i64]| -> Vec<Rat> { v.iter().zip(by).map(|(x, &k)| x + frac(k, 32)).collect() };
    let e = base.embedding().clone();
    let p = e.len();
    let f = TwoParamFamily::new(e, shift(base.start_rhs(), &start[..p]), shift(base.end_rhs(), &end[..p])).ok()?;
    f.check_genericity().is_generic().then_some(f)
}
