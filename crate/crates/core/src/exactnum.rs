//! Exact rational scalars, dense matrices over the rationals, circuits and
//! integer lattices.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a rational vector to the primitive integer vector on the same ray.
/// The zero vector maps to zeros.
pub fn primitive(v: &[Rat]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn to_rats(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_string()).collect()).collect();
        write!(f, "RatMatrix{rows:?}")
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<Rat>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(RatMatrix { rows: nrows, cols, data })
    }

    pub fn from_i64(cols: usize, rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        Self::from_rows(cols, rows).expect("ragged integer matrix")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        RatMatrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `sum_i lambda_i * row_i`
    pub fn combine_rows(&self, lambda: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.cols];
        for (i, l) in lambda.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += l * self.get(i, j);
            }
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : M x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (k, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(k, f).clone();
                }
                v
            })
            .collect()
    }

    /// Basis of the linear relations `{lambda : sum lambda_i row_i = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<Rat>> {
        self.transpose().kernel()
    }

    /// Solves `M x = b`; `None` when inconsistent.
    pub fn solve_affine(&self, b: &[Rat]) -> Result<Option<AffineSolution>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} entries, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = RatMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (k, &p) in pivots.iter().enumerate() {
            x[p] = r.get(k, self.cols).clone();
        }
        Ok(Some(AffineSolution { particular: x, kernel: self.kernel() }))
    }

    /// Whether `b` lies in the column space.
    pub fn in_image(&self, b: &[Rat]) -> bool {
        matches!(self.solve_affine(b), Ok(Some(_)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Rat>,
    pub kernel: Vec<Vec<Rat>>,
}

/// All minimal linearly dependent row sets, ordered by size then
/// lexicographically. A zero row is a circuit by itself.
pub fn circuits(a: &RatMatrix) -> Vec<Vec<usize>> {
    let max = (a.rank() + 1).min(a.nrows());
    let mut out = Vec::new();
    for k in 1..=max {
        for s in (0..a.nrows()).combinations(k) {
            if circuit_relation(a, &s).is_some() {
                out.push(s);
            }
        }
    }
    out
}

/// The unique (up to scale) relation on `rows` when they form a circuit.
pub fn circuit_relation(a: &RatMatrix, rows: &[usize]) -> Option<Vec<Rat>> {
    let ker = a.select_rows(rows).left_kernel();
    if ker.len() != 1 || ker[0].iter().any(Zero::is_zero) {
        return None;
    }
    ker.into_iter().next()
}

/// A sublattice of `Z^ambient`, stored as a row-style Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeBasis {
    ambient: usize,
    basis: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn standard(n: usize) -> Self {
        let basis =
            (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
        LatticeBasis { ambient: n, basis }
    }

    pub fn from_generators(ambient: usize, gens: Vec<Vec<BigInt>>) -> Result<Self> {
        if gens.iter().any(|g| g.len() != ambient) {
            return Err(Error::DimensionMismatch("generator length differs from ambient rank".into()));
        }
        Ok(LatticeBasis { ambient, basis: hnf(gens) })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut g = self.basis.clone();
        g.push(v.to_vec());
        hnf(g) == self.basis
    }

    /// Coordinates of the pairing of `form` with each basis vector.
    pub fn restrict_form(&self, form: &[Rat]) -> Vec<Rat> {
        self.basis.iter().map(|b| dot(form, &to_rats(b))).collect()
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`, zero rows
/// dropped.
pub fn hnf(rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let mut m = rows;
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r >= m.len() {
            break;
        }
        loop {
            let best = (r..m.len()).filter(|&i| !m[i][c].is_zero()).min_by(|&i, &j| m[i][c].abs().cmp(&m[j][c].abs()));
            let Some(best) = best else { break };
            m.swap(r, best);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m.len() && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            let pr = m[r].clone();
            for i in 0..r {
                let q = m[i][c].div_floor(&pr[c]);
                if !q.is_zero() {
                    for (x, y) in m[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    m.retain(|row| row.iter().any(|x| !x.is_zero()));
    m
}

/// A Z-basis of `{x in Z^cols : W x = 0}` for an integer matrix `W`.
pub fn integer_kernel(w: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut w: Vec<Vec<BigInt>> = w.to_vec();
    let mut u: Vec<Vec<BigInt>> =
        (0..cols).map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    // columns are manipulated; u[i][j] is entry (i, j) of the transform
    let col_op = |m: &mut Vec<Vec<BigInt>>, c: usize, j: usize, x: &BigInt, y: &BigInt, s: &BigInt, t: &BigInt| {
        for row in m.iter_mut() {
            let a = row[c].clone();
            let b = row[j].clone();
            row[c] = x * &a + y * &b;
            row[j] = s * &a + t * &b;
        }
    };
    let mut c = 0;
    for i in 0..w.len() {
        if c >= cols {
            break;
        }
        for j in c + 1..cols {
            if w[i][j].is_zero() {
                continue;
            }
            let a = w[i][c].clone();
            let b = w[i][j].clone();
            let e = a.extended_gcd(&b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let s = -(&b / &g);
            let t = &a / &g;
            col_op(&mut w, c, j, &x, &y, &s, &t);
            col_op(&mut u, c, j, &x, &y, &s, &t);
        }
        if !w[i][c].is_zero() {
            c += 1;
        }
    }
    (c..cols).map(|j| (0..cols).map(|i| u[i][j].clone()).collect()).collect()
}

/// `ker(rows) ∩ M` as a lattice in the ambient space.
pub fn lattice_intersect_kernel(rows: &RatMatrix, m: &LatticeBasis) -> Result<LatticeBasis> {
    if rows.ncols() != m.ambient() {
        return Err(Error::DimensionMismatch("row length differs from lattice ambient rank".into()));
    }
    if m.rank() != m.ambient() {
        return Err(Error::InvalidInput("lattice does not span the ambient space".into()));
    }
    let k = m.rank();
    let w: Vec<Vec<BigInt>> = (0..rows.nrows()).map(|i| primitive(&m.restrict_form(rows.row(i)))).collect();
    let coeffs = integer_kernel(&w, k);
    let gens = coeffs
        .into_iter()
        .map(|c| {
            (0..m.ambient())
                .map(|j| c.iter().zip(m.basis()).fold(BigInt::zero(), |acc, (ci, b)| acc + ci * &b[j]))
                .collect()
        })
        .collect();
    LatticeBasis::from_generators(m.ambient(), gens)
}
