//! Dense exact linear algebra over the cyclotomic field: products, inverses,
//! ranks, incremental row spaces, and reusable RREF solvers.

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};

pub type CMatrix = Vec<Vec<Cyclotomic>>;

pub fn identity(n: usize) -> CMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Cyclotomic::one()
                    } else {
                        Cyclotomic::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Cyclotomic::zero();
                    for t in 0..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            acc = acc.add(&a[i][t].mul(&b[t][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn conj_transpose(a: &CMatrix) -> CMatrix {
    let n = a.len();
    let m = a[0].len();
    (0..m)
        .map(|j| (0..n).map(|i| a[i][j].conj()).collect())
        .collect()
}

pub fn mat_eq(a: &CMatrix, b: &CMatrix) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b.iter())
            .all(|(r, s)| r.len() == s.len() && r.iter().zip(s.iter()).all(|(x, y)| x == y))
}

pub fn mat_inverse(a: &CMatrix) -> Result<CMatrix> {
    let n = a.len();
    let mut work: Vec<Vec<Cyclotomic>> = a
        .iter()
        .zip(identity(n))
        .map(|(row, id_row)| {
            let mut r = row.clone();
            r.extend(id_row);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !work[r][col].is_zero());
        let Some(p) = pivot else {
            return Err(Error::SingularMatrix);
        };
        work.swap(col, p);
        let inv = work[col][col].inv()?;
        for j in 0..2 * n {
            work[col][j] = work[col][j].mul(&inv);
        }
        for r in 0..n {
            if r != col && !work[r][col].is_zero() {
                let f = work[r][col].clone();
                for j in 0..2 * n {
                    let delta = f.mul(&work[col][j]);
                    work[r][j] = work[r][j].sub(&delta);
                }
            }
        }
    }
    Ok(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn rank(a: &CMatrix) -> usize {
    let mut rs = RowSpace::new(if a.is_empty() { 0 } else { a[0].len() });
    for row in a {
        rs.insert(row.clone());
    }
    rs.dim()
}

/// Incrementally maintained row space in reduced echelon form.
pub struct RowSpace {
    cols: usize,
    rows: Vec<Vec<Cyclotomic>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        RowSpace {
            cols,
            rows: vec![],
            pivots: vec![],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces v against the space; if independent, absorbs it and returns true.
    pub fn insert(&mut self, mut v: Vec<Cyclotomic>) -> bool {
        assert_eq!(v.len(), self.cols);
        for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for j in p..self.cols {
                    if !row[j].is_zero() {
                        let delta = f.mul(&row[j]);
                        v[j] = v[j].sub(&delta);
                    }
                }
            }
        }
        let Some(p) = (0..self.cols).find(|&j| !v[j].is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero pivot");
        for j in p..self.cols {
            v[j] = v[j].mul(&inv);
        }
        // Keep reduced form above the new pivot as well.
        for (row, _) in self.rows.iter_mut().zip(self.pivots.iter()) {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for j in 0..self.cols {
                    if !v[j].is_zero() {
                        let delta = f.mul(&v[j]);
                        row[j] = row[j].sub(&delta);
                    }
                }
            }
        }
        // Insert keeping pivots sorted for deterministic reduction order.
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.rows.insert(pos, v);
        true
    }

    pub fn contains(&self, v: &[Cyclotomic]) -> bool {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for j in 0..self.cols {
                    if !row[j].is_zero() {
                        let delta = f.mul(&row[j]);
                        v[j] = v[j].sub(&delta);
                    }
                }
            }
        }
        v.iter().all(|c| c.is_zero())
    }
}

/// RREF factorization of an m x n matrix, reusable across right-hand sides of
/// the system A x = b.
pub struct LinearSolver {
    ncols: usize,
    transform: Vec<Vec<Cyclotomic>>, // E with E*A in reduced echelon form
    pivots: Vec<usize>,              // pivot column of each leading row
}

impl LinearSolver {
    pub fn new(a: &CMatrix) -> Self {
        let m = a.len();
        let n = if m == 0 { 0 } else { a[0].len() };
        let mut rref = a.clone();
        let mut e = identity(m);
        let mut pivots = vec![];
        let mut row = 0;
        for col in 0..n {
            let Some(p) = (row..m).find(|&r| !rref[r][col].is_zero()) else {
                continue;
            };
            rref.swap(row, p);
            e.swap(row, p);
            let inv = rref[row][col].inv().expect("pivot");
            for j in 0..n {
                rref[row][j] = rref[row][j].mul(&inv);
            }
            for j in 0..m {
                e[row][j] = e[row][j].mul(&inv);
            }
            for r in 0..m {
                if r != row && !rref[r][col].is_zero() {
                    let f = rref[r][col].clone();
                    for j in 0..n {
                        if !rref[row][j].is_zero() {
                            let d = f.mul(&rref[row][j]);
                            rref[r][j] = rref[r][j].sub(&d);
                        }
                    }
                    for j in 0..m {
                        if !e[row][j].is_zero() {
                            let d = f.mul(&e[row][j]);
                            e[r][j] = e[r][j].sub(&d);
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == m {
                break;
            }
        }
        LinearSolver {
            ncols: n,
            transform: e,
            pivots,
        }
    }

    /// Solves A x = b; returns None when inconsistent. Free variables are 0.
    pub fn solve(&self, b: &[Cyclotomic]) -> Option<Vec<Cyclotomic>> {
        let m = self.transform.len();
        let rank = self.pivots.len();
        let mut c = Vec::with_capacity(m);
        for row in &self.transform {
            let mut acc = Cyclotomic::zero();
            for (j, coef) in row.iter().enumerate() {
                if !coef.is_zero() && !b[j].is_zero() {
                    acc = acc.add(&coef.mul(&b[j]));
                }
            }
            c.push(acc);
        }
        if c[rank..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![Cyclotomic::zero(); self.ncols];
        for (r, &p) in self.pivots.iter().enumerate() {
            x[p] = c[r].clone();
        }
        Some(x)
    }
}
