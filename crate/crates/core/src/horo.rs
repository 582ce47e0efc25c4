//! Embedding data of horospherical varieties, pseudo-moment polytopes and
//! colored-fan descriptors.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{lattice_intersect_kernel, primitive, rat, to_rats, LatticeBasis, Rat, RatMatrix};
use crate::polytope::{feasible_point, is_bounded, nonredundant_rows, vertices, Constraint, HPolytope};

pub type RowId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowKind {
    Ray,
    Color,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingRow {
    pub id: RowId,
    pub kind: RowKind,
    pub vector: Vec<Rat>,
    pub anticanonical: Rat,
}

/// Rays and colors of a horospherical embedding. Row order is the matrix
/// order used everywhere else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingData {
    rank: usize,
    rows: Vec<EmbeddingRow>,
    matrix: RatMatrix,
}

fn is_integral(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_integer())
}

impl EmbeddingData {
    pub fn new(rank: usize, rows: Vec<EmbeddingRow>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidInput("lattice rank must be positive".into()));
        }
        let mut ids = BTreeSet::new();
        for r in &rows {
            if r.vector.len() != rank {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} coordinates, lattice rank is {rank}",
                    r.id,
                    r.vector.len()
                )));
            }
            if !ids.insert(r.id) {
                return Err(Error::InvalidInput(format!("duplicate row id {}", r.id)));
            }
            if !is_integral(&r.vector) {
                return Err(Error::InvalidInput(format!("row {} is not a lattice vector", r.id)));
            }
            match r.kind {
                RowKind::Ray => {
                    if !r.anticanonical.is_one() {
                        return Err(Error::InvalidInput(format!("ray {} must have anticanonical coefficient 1", r.id)));
                    }
                    if r.vector.iter().all(Zero::is_zero) || to_rats(&primitive(&r.vector)) != r.vector {
                        return Err(Error::InvalidInput(format!("ray {} is not primitive", r.id)));
                    }
                }
                RowKind::Color => {
                    if r.anticanonical < rat(2) {
                        return Err(Error::InvalidInput(format!(
                            "color {} must have anticanonical coefficient at least 2",
                            r.id
                        )));
                    }
                }
            }
        }
        let matrix = RatMatrix::from_rows(rank, rows.iter().map(|r| r.vector.clone()).collect())?;
        if !is_bounded(&matrix) {
            return Err(Error::InvalidInput("the rows do not bound a polytope".into()));
        }
        Ok(EmbeddingData { rank, rows, matrix })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> &[EmbeddingRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn anticanonical(&self) -> Vec<Rat> {
        self.rows.iter().map(|r| r.anticanonical.clone()).collect()
    }

    pub fn id(&self, idx: usize) -> RowId {
        self.rows[idx].id
    }

    pub fn ids(&self, idx: &BTreeSet<usize>) -> BTreeSet<RowId> {
        idx.iter().map(|&i| self.rows[i].id).collect()
    }

    pub fn index_of(&self, id: RowId) -> Option<usize> {
        self.rows.iter().position(|r| r.id == id)
    }

    pub fn is_color(&self, idx: usize) -> bool {
        self.rows[idx].kind == RowKind::Color
    }

    pub fn color_indices(&self) -> BTreeSet<usize> {
        (0..self.len()).filter(|&i| self.is_color(i)).collect()
    }
}

/// Coefficients `d_i` of `D = sum d_i X_i`; the polytope is `A m >= -d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorCoeffs(pub Vec<Rat>);

impl DivisorCoeffs {
    pub fn rhs(&self) -> Vec<Rat> {
        self.0.iter().map(|x| -x.clone()).collect()
    }

    pub fn from_rhs(rhs: &[Rat]) -> Self {
        DivisorCoeffs(rhs.iter().map(|x| -x.clone()).collect())
    }
}

pub fn pseudo_moment_polytope(e: &EmbeddingData, d: &DivisorCoeffs) -> Result<HPolytope> {
    if d.0.len() != e.len() {
        return Err(Error::DimensionMismatch(format!("{} coefficients for {} rows", d.0.len(), e.len())));
    }
    HPolytope::new(e.matrix().clone(), d.rhs())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColoredCone {
    /// Primitive ray generators in sublattice-dual coordinates, sorted.
    pub generators: Vec<Vec<BigInt>>,
    pub colors: BTreeSet<RowId>,
}

/// Canonical data of a projective horospherical variety: the lattice of the
/// homogeneous space, the colors that became walls, the remaining colors
/// with their restricted coroots, and the maximal colored cones.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarietyDescriptor {
    pub sublattice: LatticeBasis,
    pub wall_contacts: BTreeSet<RowId>,
    pub open_orbit_colors: BTreeMap<RowId, Vec<BigInt>>,
    pub fan: BTreeSet<ColoredCone>,
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Whether `target` lies in the cone spanned by `gens`.
pub fn in_cone(gens: &[Vec<Rat>], target: &[Rat]) -> bool {
    let k = gens.len();
    let dim = target.len();
    let eqs: Vec<Constraint> =
        (0..dim).map(|j| Constraint::new(gens.iter().map(|g| g[j].clone()).collect(), target[j].clone())).collect();
    let ineqs: Vec<Constraint> = (0..k)
        .map(|l| {
            let mut c = vec![Rat::zero(); k];
            c[l] = Rat::one();
            Constraint::new(c, Rat::zero())
        })
        .collect();
    feasible_point(k, &eqs, &ineqs).is_some()
}

fn extreme_rays(mut gens: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    gens.sort();
    gens.dedup();
    let rats: Vec<Vec<Rat>> = gens.iter().map(|g| to_rats(g)).collect();
    let keep: Vec<bool> = (0..gens.len())
        .map(|i| {
            let others: Vec<Vec<Rat>> =
                rats.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect();
            !in_cone(&others, &rats[i])
        })
        .collect();
    gens.into_iter().zip(keep).filter_map(|(g, k)| k.then_some(g)).collect()
}

impl VarietyDescriptor {
    /// A toric descriptor of full rank from rays and index lists of maximal cones.
    pub fn toric(rays: &[&[i64]], cones: &[&[usize]]) -> Self {
        let n = rays.first().map_or(0, |r| r.len());
        let fan = cones
            .iter()
            .map(|c| {
                let mut generators: Vec<Vec<BigInt>> = c.iter().map(|&i| ints(rays[i])).collect();
                generators.sort();
                ColoredCone { generators, colors: BTreeSet::new() }
            })
            .collect();
        VarietyDescriptor {
            sublattice: LatticeBasis::standard(n),
            wall_contacts: BTreeSet::new(),
            open_orbit_colors: BTreeMap::new(),
            fan,
        }
    }

    pub fn rank(&self) -> usize {
        self.sublattice.rank()
    }

    pub fn colors_in_fan(&self) -> BTreeSet<RowId> {
        self.fan.iter().flat_map(|c| c.colors.iter().copied()).collect()
    }

    /// All rays of the fan.
    pub fn rays(&self) -> BTreeSet<Vec<BigInt>> {
        self.fan.iter().flat_map(|c| c.generators.iter().cloned()).collect()
    }

    /// Rays not carrying a color, i.e. the G-stable prime divisors.
    pub fn stable_divisor_rays(&self) -> BTreeSet<Vec<BigInt>> {
        let colored: BTreeSet<Vec<BigInt>> = self
            .fan
            .iter()
            .flat_map(|c| c.colors.iter().map(|id| primitive(&to_rats(&self.open_orbit_colors[id]))))
            .collect();
        self.rays().into_iter().filter(|r| !colored.contains(r)).collect()
    }

    pub fn is_q_factorial(&self) -> bool {
        self.fan.iter().all(|c| {
            let m = RatMatrix::from_rows(self.rank(), c.generators.iter().map(|g| to_rats(g)).collect())
                .expect("generator length");
            m.rank() == c.generators.len()
                && c.colors.iter().all(|id| {
                    let v = primitive(&to_rats(&self.open_orbit_colors[id]));
                    c.generators.contains(&v)
                })
        })
    }

    /// Dimension of the rational Picard group, defined for any descriptor.
    pub fn cartier_class_rank(&self) -> usize {
        let k = self.rank();
        let cones: Vec<&ColoredCone> = self.fan.iter().collect();
        let unknowns = cones.len() * k;
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for a in 0..cones.len() {
            for b in a + 1..cones.len() {
                for g in cones[a].generators.iter().filter(|g| cones[b].generators.contains(g)) {
                    let mut row = vec![Rat::zero(); unknowns];
                    for j in 0..k {
                        row[a * k + j] = Rat::from_integer(g[j].clone());
                        row[b * k + j] = -Rat::from_integer(g[j].clone());
                    }
                    rows.push(row);
                }
            }
        }
        let constraint_rank =
            if rows.is_empty() { 0 } else { RatMatrix::from_rows(unknowns, rows).expect("row length").rank() };
        let in_fan = self.colors_in_fan();
        let free = self.open_orbit_colors.keys().filter(|id| !in_fan.contains(id)).count();
        unknowns - constraint_rank + free - k
    }

    pub fn picard_number(&self) -> Result<usize> {
        if !self.is_q_factorial() {
            return Err(Error::NotQFactorial("descriptor has a non-simplicial or miscolored cone".into()));
        }
        Ok(self.cartier_class_rank())
    }
}

/// Rows that are divisors of the variety: rays defining facets, and colors.
fn divisor_rows(e: &EmbeddingData, p: &HPolytope) -> Result<BTreeSet<usize>> {
    let red = nonredundant_rows(p)?;
    Ok((0..e.len()).filter(|&i| e.is_color(i) || red.essential.contains(&i)).collect())
}

/// Descriptor of the variety attached to the polytope `{A_i m >= rhs_i : i in active}`.
pub fn describe_rows(e: &EmbeddingData, active: &BTreeSet<usize>, rhs: &[Rat]) -> Result<VarietyDescriptor> {
    let idx: Vec<usize> = active.iter().copied().collect();
    let sub = e.matrix().select_rows(&idx);
    let sub_rhs: Vec<Rat> = idx.iter().map(|&i| rhs[i].clone()).collect();
    let p = HPolytope::new(sub, sub_rhs)?;
    let verts = vertices(&p)?;
    if verts.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    let back = |s: &BTreeSet<usize>| -> BTreeSet<usize> { s.iter().map(|&k| idx[k]).collect() };
    let tights: Vec<BTreeSet<usize>> = verts.iter().map(|v| back(&v.tight)).collect();
    let implicit: BTreeSet<usize> =
        tights.iter().skip(1).fold(tights[0].clone(), |acc, t| acc.intersection(t).cloned().collect());
    let eq_rows: Vec<usize> = implicit.iter().copied().collect();
    let sublattice = lattice_intersect_kernel(&e.matrix().select_rows(&eq_rows), &LatticeBasis::standard(e.rank()))?;
    let restricted = |i: usize| -> Vec<Rat> { sublattice.restrict_form(e.matrix().row(i)) };
    let colors: BTreeSet<usize> = active.iter().copied().filter(|&i| e.is_color(i)).collect();
    let wall_idx: BTreeSet<usize> = colors.intersection(&implicit).copied().collect();
    let open_orbit_colors: BTreeMap<RowId, Vec<BigInt>> = colors
        .difference(&wall_idx)
        .map(|&i| (e.id(i), restricted(i).iter().map(|x| x.to_integer()).collect()))
        .collect();
    let mut fan = BTreeSet::new();
    for t in &tights {
        let free: Vec<usize> = t.difference(&implicit).copied().collect();
        let gens: Vec<Vec<BigInt>> = free.iter().map(|&i| primitive(&restricted(i))).collect();
        if gens.iter().any(|g| g.iter().all(Zero::is_zero)) {
            return Err(Error::Internal("tight row restricts to zero".into()));
        }
        let mut generators = extreme_rays(gens);
        generators.sort();
        let colors = free.iter().filter(|&&i| e.is_color(i)).map(|&i| e.id(i)).collect();
        fan.insert(ColoredCone { generators, colors });
    }
    Ok(VarietyDescriptor { sublattice, wall_contacts: e.ids(&wall_idx), open_orbit_colors, fan })
}

pub fn variety_from_polytope(e: &EmbeddingData, d: &DivisorCoeffs) -> Result<VarietyDescriptor> {
    pseudo_moment_polytope(e, d)?;
    describe_rows(e, &(0..e.len()).collect(), &d.rhs())
}

/// Descriptor from a right-hand side `A m >= rhs` over all rows.
pub fn variety_from_rhs(e: &EmbeddingData, rhs: &[Rat]) -> Result<VarietyDescriptor> {
    variety_from_polytope(e, &DivisorCoeffs::from_rhs(rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivisorTests {
    pub q_factorial: bool,
    pub q_cartier: bool,
    pub cartier: bool,
    pub nef: bool,
    pub ample: bool,
}

/// Tests on the variety of the ample reference `d_ref` for the divisor `d`.
pub fn divisor_tests(e: &EmbeddingData, d_ref: &DivisorCoeffs, d: &DivisorCoeffs) -> Result<DivisorTests> {
    let p = pseudo_moment_polytope(e, d_ref)?;
    if d.0.len() != e.len() {
        return Err(Error::DimensionMismatch("divisor length".into()));
    }
    if p.dimension()? != e.rank() as i64 {
        return Err(Error::InvalidInput("reference divisor is not ample".into()));
    }
    let xrows = divisor_rows(e, &p)?;
    let rhs = d.rhs();
    let mut out = DivisorTests { q_factorial: true, q_cartier: true, cartier: true, nef: true, ample: true };
    for v in vertices(&p)? {
        let tight: Vec<usize> = v.tight.intersection(&xrows).copied().collect();
        let sub = e.matrix().select_rows(&tight);
        if sub.rank() != tight.len() {
            out.q_factorial = false;
        }
        let b: Vec<Rat> = tight.iter().map(|&i| rhs[i].clone()).collect();
        match sub.solve_affine(&b)? {
            None => {
                out.q_cartier = false;
                out.cartier = false;
                out.nef = false;
                out.ample = false;
            }
            Some(sol) => {
                let m = sol.particular;
                if !m.iter().all(|x| x.is_integer()) {
                    out.cartier = false;
                }
                for &i in &xrows {
                    let val = crate::exactnum::dot(e.matrix().row(i), &m);
                    if val < rhs[i] {
                        out.nef = false;
                        out.ample = false;
                    } else if val == rhs[i] && !v.tight.contains(&i) {
                        out.ample = false;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Pulls back `d_x` along the birational morphism from the embedding `e_z`
/// to the variety of `fan_x`. Coefficients on rows that are rays of the fan
/// and on colors are kept; other rays get the value of the piecewise linear
/// function of `d_x`.
pub fn pullback_divisor(e_z: &EmbeddingData, fan_x: &VarietyDescriptor, d_x: &DivisorCoeffs) -> Result<DivisorCoeffs> {
    let n = e_z.rank();
    if fan_x.sublattice != LatticeBasis::standard(n) {
        return Err(Error::InvalidInput("the target fan must have full rank".into()));
    }
    let prim: Vec<Vec<BigInt>> = (0..e_z.len()).map(|i| primitive(e_z.matrix().row(i))).collect();
    let fan_rays = fan_x.rays();
    let mut out = d_x.0.clone();
    let mut forms: Vec<(Vec<Vec<Rat>>, Vec<Rat>)> = Vec::new();
    for cone in &fan_x.fan {
        let mut eqs: Vec<Vec<Rat>> = Vec::new();
        let mut vals: Vec<Rat> = Vec::new();
        for g in &cone.generators {
            let colored =
                (0..e_z.len()).find(|&i| e_z.is_color(i) && cone.colors.contains(&e_z.id(i)) && &prim[i] == g);
            let row = colored.or_else(|| (0..e_z.len()).find(|&i| !e_z.is_color(i) && &prim[i] == g));
            let Some(row) = row else {
                return Err(Error::InvalidInput(format!("fan ray {g:?} is not a row of the embedding")));
            };
            eqs.push(e_z.matrix().row(row).to_vec());
            vals.push(d_x.0[row].clone());
        }
        for &id in &cone.colors {
            if let Some(i) = e_z.index_of(id) {
                eqs.push(e_z.matrix().row(i).to_vec());
                vals.push(d_x.0[i].clone());
            }
        }
        let m = RatMatrix::from_rows(n, eqs.clone())?;
        let Some(sol) = m.solve_affine(&vals)? else {
            return Err(Error::NotQCartier(format!("no linear form on cone {:?}", cone.generators)));
        };
        forms.push((cone.generators.iter().map(|g| to_rats(g)).collect(), sol.particular));
    }
    for i in 0..e_z.len() {
        if e_z.is_color(i) || fan_rays.contains(&prim[i]) {
            continue;
        }
        let x = e_z.matrix().row(i);
        let Some((_, m)) = forms.iter().find(|(gens, _)| in_cone(gens, x)) else {
            return Err(Error::OutsideSupport(format!("row {}", e_z.id(i))));
        };
        out[i] = crate::exactnum::dot(m, x);
    }
    Ok(DivisorCoeffs(out))
}

/// Image of the morphism defined by a nef divisor on the variety of `d_ref`.
pub fn contract_nef(e: &EmbeddingData, d_ref: &DivisorCoeffs, d_nef: &DivisorCoeffs) -> Result<VarietyDescriptor> {
    let tests = divisor_tests(e, d_ref, d_nef)?;
    if !tests.nef {
        return Err(Error::NotNef("divisor is not nef on the reference variety".into()));
    }
    let p = pseudo_moment_polytope(e, d_ref)?;
    let xrows = divisor_rows(e, &p)?;
    describe_rows(e, &xrows, &d_nef.rhs())
}
