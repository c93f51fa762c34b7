//! Dense matrices over a finite field: elimination, rank, solving and
//! counting the solutions of linear systems.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::field::{ExtField, Fel};

/// A row-major matrix over the field it carries.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Arc<ExtField>,
    rows: usize,
    cols: usize,
    data: Vec<Fel>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<u32> = self.row(r).iter().map(|x| x.raw()).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// Outcome of [`solve_count`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveCount {
    pub consistent: bool,
    pub count: BigUint,
}

impl Matrix {
    pub fn zeros(field: &Arc<ExtField>, rows: usize, cols: usize) -> Self {
        Self {
            field: Arc::clone(field),
            rows,
            cols,
            data: vec![Fel::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Arc<ExtField>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_vec(field: &Arc<ExtField>, rows: usize, cols: usize, data: Vec<Fel>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| x.raw() as u64 >= field.order()) {
            return Err(Error::Parameter(format!("entry {} outside the field", bad.raw())));
        }
        Ok(Self {
            field: Arc::clone(field),
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from rows of equal length. `cols` is needed when `rows` is empty.
    pub fn from_rows(field: &Arc<ExtField>, cols: usize, rows: &[Vec<Fel>]) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Shape(format!("row of length {} in a {cols}-column matrix", bad.len())));
        }
        Self::from_vec(field, rows.len(), cols, rows.concat())
    }

    /// Lifts a matrix of base-field integers into `field`.
    pub fn from_base_rows(field: &Arc<ExtField>, cols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let lifted: Vec<Vec<Fel>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_base(x)).collect())
            .collect();
        Self::from_rows(field, cols, &lifted)
    }

    pub fn field(&self) -> &Arc<ExtField> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Fel {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Fel) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fel] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Fel> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Fel>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Entries as packed integers; for base-field matrices these are the residues mod q.
    pub fn to_raw_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.raw()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!(
                "cannot stack {} columns on {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            field: Arc::clone(&self.field),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::Shape(format!(
                "cannot join {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let rows: Vec<Vec<Fel>> = (0..self.rows)
            .map(|r| [self.row(r), other.row(r)].concat())
            .collect();
        Self::from_rows(&self.field, self.cols + other.cols, &rows)
    }

    /// Reduced row-echelon form and the strictly increasing pivot columns.
    ///
    /// The pivot for each column is the first remaining row with a nonzero
    /// entry there.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, lead);
            let inv = f.inv(m.get(lead, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(lead, j), inv);
                m.set(lead, j, v);
            }
            for r in 0..m.rows {
                if r == lead {
                    continue;
                }
                let factor = m.get(r, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(lead, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Counts the solutions `X` of `coeff * X = rhs`.
///
/// Each column of `rhs` is an independent system in `coeff.cols()` unknowns,
/// so a consistent system has `(q^l)^((unknowns - rank) * rhs.cols())`
/// solutions.
pub fn solve_count(coeff: &Matrix, rhs: &Matrix) -> Result<SolveCount> {
    if coeff.rows() != rhs.rows() {
        return Err(Error::Shape(format!(
            "coefficient matrix has {} rows but right-hand side has {}",
            coeff.rows(),
            rhs.rows()
        )));
    }
    let (_, pivots) = coeff.hstack(rhs)?.rref();
    let rank = pivots.iter().filter(|&&p| p < coeff.cols()).count();
    if pivots.len() > rank {
        return Ok(SolveCount {
            consistent: false,
            count: BigUint::from(0u32),
        });
    }
    let nullity = (coeff.cols() - rank) * rhs.cols();
    let order = BigUint::from(coeff.field().order());
    let count = if nullity == 0 {
        BigUint::one()
    } else {
        order.pow(nullity as u32)
    };
    Ok(SolveCount {
        consistent: true,
        count,
    })
}

/// One solution of `coeff * X = rhs` (free unknowns set to zero), or `None` if inconsistent.
pub fn solve(coeff: &Matrix, rhs: &Matrix) -> Result<Option<Matrix>> {
    if coeff.rows() != rhs.rows() {
        return Err(Error::Shape(format!(
            "coefficient matrix has {} rows but right-hand side has {}",
            coeff.rows(),
            rhs.rows()
        )));
    }
    let (reduced, pivots) = coeff.hstack(rhs)?.rref();
    if pivots.iter().any(|&p| p >= coeff.cols()) {
        return Ok(None);
    }
    let mut x = Matrix::zeros(coeff.field(), coeff.cols(), rhs.cols());
    for (r, &p) in pivots.iter().enumerate() {
        for c in 0..rhs.cols() {
            x.set(p, c, reduced.get(r, coeff.cols() + c));
        }
    }
    Ok(Some(x))
}

/// The `height x K` matrix whose column `j` is `(1, x_j, x_j^2, ..., x_j^(height-1))`.
pub fn vandermonde(field: &Arc<ExtField>, points: &[Fel], height: usize) -> Result<Matrix> {
    for (i, a) in points.iter().enumerate() {
        if points[..i].contains(a) {
            return Err(Error::Parameter(format!(
                "duplicate evaluation point {}",
                a.raw()
            )));
        }
    }
    let mut m = Matrix::zeros(field, height, points.len());
    for (j, &x) in points.iter().enumerate() {
        let mut p = field.one();
        for r in 0..height {
            m.set(r, j, p);
            p = field.mul(p, x);
        }
    }
    Ok(m)
}
