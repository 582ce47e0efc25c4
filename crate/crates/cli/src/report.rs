//! JSON and text renderings of the computed objects.

use serde_json::{json, Map, Value};

use horosark_core::exactnum::Rat;
use horosark_core::family::{Decomposition, GenericityReport, IndexSet, PointClass, WallKind};
use horosark_core::horo::VarietyDescriptor;
use horosark_core::mmp::{HmmpRun, WallClassification};
use horosark_core::plane::Point2;
use horosark_core::sarkisov::{ArrowKind, Nu, SarkisovProgram};

use crate::fixture::Loaded;

pub fn rat(x: &Rat) -> Value {
    Value::String(x.to_string())
}

pub fn point(p: &Point2) -> Value {
    json!([rat(&p.delta), rat(&p.eps)])
}

fn point_text(p: &Point2) -> String {
    format!("({}, {})", p.delta, p.eps)
}

pub fn ids(loaded: &Loaded, set: &IndexSet) -> Vec<u32> {
    loaded.family.embedding().ids(set).into_iter().collect()
}

fn ids_text(loaded: &Loaded, set: &IndexSet) -> String {
    let v: Vec<String> = ids(loaded, set).iter().map(u32::to_string).collect();
    format!("{{{}}}", v.join(","))
}

pub fn class_name(c: &PointClass) -> &'static str {
    match c {
        PointClass::Outside => "outside",
        PointClass::U2 => "U2",
        PointClass::U1 { .. } => "U1",
        PointClass::U0 { .. } => "U0",
        PointClass::U0Prime { .. } => "U0prime",
    }
}

pub fn kind_name(k: &WallKind) -> &'static str {
    match k {
        WallKind::Fibration => "fibration",
        WallKind::Divisorial { .. } => "divisorial",
        WallKind::Flip => "flip",
    }
}

fn name(loaded: &Loaded, d: &VarietyDescriptor) -> String {
    loaded.name_of(d).map_or_else(|| format!("rank {} variety", d.rank()), str::to_string)
}

pub fn descriptor(loaded: &Loaded, d: &VarietyDescriptor) -> Value {
    let ints = |v: &[num_bigint::BigInt]| v.iter().map(|x| Value::String(x.to_string())).collect::<Vec<_>>();
    let mut colors = Map::new();
    for (id, v) in &d.open_orbit_colors {
        colors.insert(id.to_string(), Value::Array(ints(v)));
    }
    let cones: Vec<Value> = d
        .fan
        .iter()
        .map(|c| {
            json!({
                "generators": c.generators.iter().map(|g| Value::Array(ints(g))).collect::<Vec<_>>(),
                "colors": c.colors.iter().collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "label": loaded.name_of(d),
        "rank": d.rank(),
        "sublattice": d.sublattice.basis().iter().map(|g| Value::Array(ints(g))).collect::<Vec<_>>(),
        "wall_contacts": d.wall_contacts.iter().collect::<Vec<_>>(),
        "open_orbit_colors": colors,
        "cones": cones,
        "q_factorial": d.is_q_factorial(),
        "picard_number": d.picard_number().ok(),
    })
}

fn class_detail(loaded: &Loaded, c: &PointClass) -> Value {
    match c {
        PointClass::U1 { minimal } | PointClass::U0 { minimal } => json!({ "rows": ids(loaded, minimal) }),
        PointClass::U0Prime { walls } => json!({ "walls": walls.iter().map(|w| ids(loaded, w)).collect::<Vec<_>>() }),
        _ => json!({}),
    }
}

pub fn check_json(loaded: &Loaded, report: &GenericityReport) -> Value {
    json!({
        "rows": loaded.family.embedding().len(),
        "circuits": loaded.family.circuits().len(),
        "generic": report.is_generic(),
        "violations": report.violations,
    })
}

pub fn check_text(loaded: &Loaded, report: &GenericityReport) -> String {
    let mut out = format!("{} rows, {} circuits\n", loaded.family.embedding().len(), loaded.family.circuits().len());
    if report.is_generic() {
        out.push_str("generic\n");
    } else {
        out.push_str("not generic\n");
        for v in &report.violations {
            out.push_str(&format!("  {v}\n"));
        }
    }
    out
}

pub fn classify_json(loaded: &Loaded, p: &Point2, c: &PointClass) -> Value {
    let mut v = json!({ "point": point(p), "class": class_name(c) });
    if let Value::Object(extra) = class_detail(loaded, c) {
        v.as_object_mut().expect("object").extend(extra);
    }
    v
}

pub fn classify_text(loaded: &Loaded, c: &PointClass) -> String {
    match c {
        PointClass::U1 { minimal } | PointClass::U0 { minimal } => {
            format!("{}\nminimal rows {}\n", class_name(c), ids_text(loaded, minimal))
        }
        PointClass::U0Prime { walls } => {
            let w: Vec<String> = walls.iter().map(|w| ids_text(loaded, w)).collect();
            format!("{}\nwalls {}\n", class_name(c), w.join(" "))
        }
        _ => format!("{}\n", class_name(c)),
    }
}

pub fn decomposition_json(loaded: &Loaded, d: &Decomposition) -> Value {
    let strip = json!({
        "delta_lo": rat(&d.strip.delta_lo),
        "delta_hi": rat(&d.strip.delta_hi),
        "eps_lo": rat(&d.strip.eps_lo),
        "eps_hi": d.strip.eps_hi.as_ref().map(rat),
    });
    let cells: Vec<Value> = d
        .cells
        .iter()
        .map(|c| {
            json!({
                "sample": point(&c.sample),
                "pieces": c.pieces.iter().map(|p| p.iter().map(point).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "variety": descriptor(loaded, &c.descriptor),
            })
        })
        .collect();
    let walls: Vec<Value> = d
        .walls
        .iter()
        .map(|w| {
            let mut v = json!({
                "rows": ids(loaded, &w.index_set),
                "kind": kind_name(&w.kind),
                "boundary": w.boundary,
                "from": point(&w.from),
                "to": point(&w.to),
                "line": [rat(&w.relation.line.eps), rat(&w.relation.line.delta), rat(&w.relation.line.constant)],
            });
            if let WallKind::Divisorial { row } = w.kind {
                v["contracted_row"] = json!(loaded.family.embedding().id(row));
            }
            v
        })
        .collect();
    let points: Vec<Value> = d.points.iter().map(|m| classify_json(loaded, &m.point, &m.class)).collect();
    json!({
        "strip": strip,
        "domain": d.domain.iter().map(point).collect::<Vec<_>>(),
        "cells": cells,
        "walls": walls,
        "points": points,
    })
}

pub fn decomposition_text(loaded: &Loaded, d: &Decomposition) -> String {
    let mut out = format!("{} cells, {} walls, {} points\n", d.cells.len(), d.walls.len(), d.points.len());
    for c in &d.cells {
        out.push_str(&format!("cell at {}: {}\n", point_text(&c.sample), name(loaded, &c.descriptor)));
    }
    for w in &d.walls {
        out.push_str(&format!(
            "wall {} {} from {} to {}{}\n",
            ids_text(loaded, &w.index_set),
            kind_name(&w.kind),
            point_text(&w.from),
            point_text(&w.to),
            if w.boundary { " (boundary)" } else { "" }
        ));
    }
    for m in &d.points {
        out.push_str(&format!("point {} {}", point_text(&m.point), classify_text(loaded, &m.class).replace('\n', " ")));
        out.push('\n');
    }
    out
}

fn classification_json(loaded: &Loaded, c: &WallClassification) -> Value {
    match c {
        WallClassification::Fibration { .. } => json!({ "kind": "fibration" }),
        WallClassification::Divisorial { row, .. } => json!({ "kind": "divisorial", "contracted_row": row }),
        WallClassification::Flip { minimal } => json!({ "kind": "flip", "rows": ids(loaded, minimal) }),
        WallClassification::Isomorphism { row } => json!({ "kind": "isomorphism", "row": row }),
    }
}

pub fn mmp_json(loaded: &Loaded, run: &HmmpRun) -> Value {
    let events: Vec<Value> = run
        .events
        .iter()
        .map(|e| {
            json!({
                "eps": rat(&e.eps),
                "rows": ids(loaded, &e.minimal),
                "classification": classification_json(loaded, &e.classification),
                "source": descriptor(loaded, &e.source),
                "center": descriptor(loaded, &e.center),
                "target": descriptor(loaded, &e.target),
            })
        })
        .collect();
    json!({
        "delta": rat(&run.delta),
        "eps_start": rat(&run.eps_start),
        "eps_max": rat(&run.eps_max),
        "events": events,
    })
}

pub fn mmp_text(loaded: &Loaded, run: &HmmpRun) -> String {
    let mut out = format!("delta = {}, epsilon from {} to {}\n", run.delta, run.eps_start, run.eps_max);
    for e in &run.events {
        let what = match &e.classification {
            WallClassification::Fibration { .. } => {
                format!("fibration {} -> {}", name(loaded, &e.source), name(loaded, &e.center))
            }
            WallClassification::Divisorial { row, .. } => format!(
                "divisorial contraction of row {row}: {} -> {}",
                name(loaded, &e.source),
                name(loaded, &e.center)
            ),
            WallClassification::Flip { .. } => format!(
                "flip {} -> {} <- {}",
                name(loaded, &e.source),
                name(loaded, &e.center),
                name(loaded, &e.target)
            ),
            WallClassification::Isomorphism { row } => format!("isomorphism (row {row} is not a divisor)"),
        };
        out.push_str(&format!("eps = {} on {}: {what}\n", e.eps, ids_text(loaded, &e.minimal)));
    }
    out
}

fn nu_json(n: &Nu) -> Value {
    match n {
        Nu::NegInfinity => Value::String("-inf".into()),
        Nu::Finite(v) => rat(v),
    }
}

fn slope_json(s: &horosark_core::family::Slope) -> Value {
    match s {
        horosark_core::family::Slope::Finite(v) => rat(v),
        horosark_core::family::Slope::Infinite => Value::String("inf".into()),
    }
}

fn arrow_json(a: &ArrowKind) -> Value {
    match a {
        ArrowKind::Flip => json!({ "kind": "flip" }),
        ArrowKind::Divisorial { from, to } => json!({ "kind": "divisorial", "from": from, "to": to }),
        ArrowKind::Isomorphism => json!({ "kind": "isomorphism" }),
    }
}

pub fn sarkisov_json(loaded: &Loaded, p: &SarkisovProgram) -> Value {
    let space = |f: &horosark_core::sarkisov::FibreSpace| json!({ "variety": descriptor(loaded, &f.variety), "base": descriptor(loaded, &f.base) });
    let pieces: Vec<Value> = p
        .chain
        .pieces
        .iter()
        .map(|c| {
            json!({
                "rows": ids(loaded, &c.index_set),
                "from": point(&c.from),
                "to": point(&c.to),
                "target": descriptor(loaded, &c.target),
            })
        })
        .collect();
    let anchors: Vec<Value> = p
        .chain
        .anchors
        .iter()
        .map(|a| json!({ "point": point(&a.point), "rows": ids(loaded, &a.minimal), "vertex": a.vertex }))
        .collect();
    let links: Vec<Value> = p
        .links
        .iter()
        .map(|l| {
            let part = &l.partition;
            json!({
                "type": l.link_type.name(),
                "anchor": point(&l.anchor),
                "rows": ids(loaded, &l.minimal),
                "vertex": l.vertex,
                "partition": {
                    "nu": part.nu.iter().map(nu_json).collect::<Vec<_>>(),
                    "classes": part.classes.iter().map(|k| ids(loaded, k)).collect::<Vec<_>>(),
                    "complements": part.complements.iter().map(|k| ids(loaded, k)).collect::<Vec<_>>(),
                    "d": rat(&part.d),
                    "slopes": part.slopes.iter().map(slope_json).collect::<Vec<_>>(),
                    "relative_slopes": part.relative_slopes.iter().map(slope_json).collect::<Vec<_>>(),
                },
                "varieties": l.varieties.iter().map(|v| descriptor(loaded, v)).collect::<Vec<_>>(),
                "arrows": l.arrows.iter().map(arrow_json).collect::<Vec<_>>(),
                "left_base": descriptor(loaded, &l.left_base),
                "right_base": descriptor(loaded, &l.right_base),
                "center": descriptor(loaded, &l.center),
            })
        })
        .collect();
    json!({
        "start": space(&p.start),
        "end": space(&p.end),
        "chain": { "pieces": pieces, "anchors": anchors },
        "links": links,
    })
}

pub fn sarkisov_text(loaded: &Loaded, p: &SarkisovProgram) -> String {
    let mut out = format!(
        "from {} / {} to {} / {}\n",
        name(loaded, &p.start.variety),
        name(loaded, &p.start.base),
        name(loaded, &p.end.variety),
        name(loaded, &p.end.base)
    );
    out.push_str("chain:\n");
    for c in &p.chain.pieces {
        out.push_str(&format!(
            "  {} from {} to {} over {}\n",
            ids_text(loaded, &c.index_set),
            point_text(&c.from),
            point_text(&c.to),
            name(loaded, &c.target)
        ));
    }
    out.push_str(&format!("{} links:\n", p.links.len()));
    for (k, l) in p.links.iter().enumerate() {
        let vs: Vec<String> = l.varieties.iter().map(|v| name(loaded, v)).collect();
        out.push_str(&format!(
            "  link {}: type {} at {} L = {}{}: {} / {} ~> {} / {} via {}\n",
            k + 1,
            l.link_type.name(),
            point_text(&l.anchor),
            ids_text(loaded, &l.minimal),
            if l.vertex { " (vertex)" } else { "" },
            vs.first().expect("a sector"),
            name(loaded, &l.left_base),
            vs.last().expect("a sector"),
            name(loaded, &l.right_base),
            vs.join(", ")
        ));
    }
    out
}
