#![allow(dead_code)]

use horosark_core::exactnum::{frac, rat, Rat};
use horosark_core::family::TwoParamFamily;
use horosark_core::horo::{EmbeddingData, EmbeddingRow, RowKind};

pub fn neg(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| -x.clone()).collect()
}

pub fn six_rays(start: &[Rat]) -> TwoParamFamily {
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
    let end = neg(&[rat(0), rat(0), rat(1), rat(6), frac(7, 2), rat(2)]);
    TwoParamFamily::new(e, neg(start), end).unwrap()
}

pub fn blowup() -> TwoParamFamily {
    six_rays(&[rat(0), rat(0), rat(1), rat(2), frac(5, 2), rat(4)])
}

pub fn two_projections() -> TwoParamFamily {
    six_rays(&[rat(0), rat(0), rat(6), rat(1), frac(3, 2), rat(3)])
}

pub fn rank_one_embedding() -> EmbeddingData {
    let vec = [1, 1, -1, -1, 0, 1, -1];
    let anti = [2, 3, 2, 3, 2, 1, 1];
    let rows = (0..7)
        .map(|k| EmbeddingRow {
            id: k as u32 + 1,
            kind: if k < 5 { RowKind::Color } else { RowKind::Ray },
            vector: vec![rat(vec[k])],
            anticanonical: rat(anti[k]),
        })
        .collect();
    EmbeddingData::new(1, rows).unwrap()
}

pub fn rank_one() -> TwoParamFamily {
    let ints = |v: [i64; 7]| v.iter().map(|&x| rat(-x)).collect::<Vec<_>>();
    TwoParamFamily::new(rank_one_embedding(), ints([0, 1, 7, 6, 5, 2, 2]), ints([2, 0, 6, 7, 1, 3, 7])).unwrap()
}

pub const SIX_RAYS: [[i64; 2]; 6] = [[1, 0], [0, 1], [-1, 0], [0, -1], [1, -1], [2, -1]];
pub const RANK_ONE_VECTORS: [i64; 7] = [1, 1, -1, -1, 0, 1, -1];
pub const RANK_ONE_ANTI: [i64; 7] = [2, 3, 2, 3, 2, 1, 1];

fn det(u: [i64; 2], v: [i64; 2]) -> i64 {
    u[0] * v[1] - u[1] * v[0]
}

/// Linear dependence among planar vectors, for a circuit of two or three of them.
pub fn planar_relation(vs: &[[i64; 2]], rows: &[usize]) -> Vec<i64> {
    let mut lambda = vec![0; vs.len()];
    match rows {
        [a, b] => {
            let (u, v) = (vs[*a], vs[*b]);
            assert_eq!(det(u, v), 0);
            let k = if u[0] != 0 { 0 } else { 1 };
            lambda[*a] = v[k];
            lambda[*b] = -u[k];
        }
        [a, b, c] => {
            let (u, v, w) = (vs[*a], vs[*b], vs[*c]);
            lambda[*a] = det(v, w);
            lambda[*b] = -det(u, w);
            lambda[*c] = det(u, v);
        }
        _ => panic!("not a planar circuit"),
    }
    lambda
}

/// Linear dependence among integers, for a circuit of one zero or two nonzero entries.
pub fn scalar_relation(vs: &[i64], rows: &[usize]) -> Vec<i64> {
    let mut lambda = vec![0; vs.len()];
    match rows {
        [a] => {
            assert_eq!(vs[*a], 0);
            lambda[*a] = 1;
        }
        [a, b] => {
            lambda[*a] = vs[*b];
            lambda[*b] = -vs[*a];
        }
        _ => panic!("not a circuit of a rank one matrix"),
    }
    lambda
}

/// The line `eps * x + delta * y + z = 0` where the relation kills the right-hand side.
pub fn carrier_coefficients(lambda: &[i64], d: &[Rat], d_end: &[Rat], anti: &[Rat]) -> [Rat; 3] {
    let mut out = [rat(0), rat(0), rat(0)];
    for (k, &l) in lambda.iter().enumerate() {
        let l = rat(l);
        out[0] += &l * &anti[k];
        out[1] += &l * (&d_end[k] - &d[k]);
        out[2] += &l * &d[k];
    }
    out
}

pub fn crossing(p: &[Rat; 3], q: &[Rat; 3]) -> (Rat, Rat) {
    // p[0] e + p[1] d = -p[2], same for q
    let det = &p[0] * &q[1] - &p[1] * &q[0];
    assert!(det != rat(0), "parallel carriers");
    let eps = (-&p[2] * &q[1] + &q[2] * &p[1]) / &det;
    let delta = (-&p[0] * &q[2] + &q[0] * &p[2]) / &det;
    (delta, eps)
}

pub fn on_line(p: &[Rat; 3], delta: &Rat, eps: &Rat) -> bool {
    &p[0] * eps + &p[1] * delta + &p[2] == rat(0)
}

/// Number of vertices of `{x : <v_i, x> >= rhs_i}` in the plane, by brute force.
pub fn polygon_vertex_count(vs: &[[i64; 2]], rhs: &[Rat]) -> usize {
    let mut found: Vec<(Rat, Rat)> = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let d = det(vs[i], vs[j]);
            if d == 0 {
                continue;
            }
            let d = rat(d);
            let x = (&rhs[i] * rat(vs[j][1]) - &rhs[j] * rat(vs[i][1])) / &d;
            let y = (&rhs[j] * rat(vs[i][0]) - &rhs[i] * rat(vs[j][0])) / &d;
            let inside = vs.iter().zip(rhs).all(|(v, r)| rat(v[0]) * &x + rat(v[1]) * &y >= *r);
            if inside && !found.contains(&(x.clone(), y.clone())) {
                found.push((x, y));
            }
        }
    }
    found.len()
}

/// Picard number of the rank one variety of the interval `{x : v_i x >= rhs_i}`:
/// every color with nonzero vector counts, a color with zero vector counts when
/// slack, and each end of the interval adds a stable divisor unless a color is
/// tight there.
pub fn rank_one_picard(vs: &[i64], is_color: &[bool], rhs: &[Rat]) -> usize {
    let tight = |k: usize, x: &Rat| rat(vs[k]) * x == rhs[k];
    let lo = (0..vs.len()).filter(|&k| vs[k] > 0).map(|k| &rhs[k] / rat(vs[k])).max().unwrap();
    let hi = (0..vs.len()).filter(|&k| vs[k] < 0).map(|k| &rhs[k] / rat(vs[k])).min().unwrap();
    assert!(lo < hi);
    let mut count = 0;
    for k in 0..vs.len() {
        if is_color[k] && (vs[k] != 0 || rhs[k] < rat(0)) {
            count += 1;
        }
    }
    for end in [&lo, &hi] {
        let colored = (0..vs.len()).any(|k| is_color[k] && vs[k] != 0 && tight(k, end));
        if !colored {
            count += 1;
        }
    }
    count - 1
}
pub mod props;
