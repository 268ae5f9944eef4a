use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Poly, Rational};
use crate::{Error, Result};

/// Dense rational matrix, row-major. Acts on column vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Integer row echelon form produced by fraction-free elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Rational) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, &(a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sub(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Shape("difference of differently shaped matrices".into()));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[RatMatrix]) -> Result<RatMatrix> {
        let cols = blocks.first().map(|b| b.cols).unwrap_or(0);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::Shape("vstack with mismatched columns".into()));
        }
        Ok(RatMatrix {
            rows: blocks.iter().map(|b| b.rows).sum(),
            cols,
            data: blocks.iter().flat_map(|b| b.data.iter().cloned()).collect(),
        })
    }

    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
            })
            .collect()
    }

    /// Bareiss elimination: every intermediate entry is a minor of the input, so
    /// each division is exact and no fractions appear.
    fn echelon(&self) -> Echelon {
        let mut a = self.integer_rows();
        let (m, n) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut r = 0;
        let mut pivots = Vec::new();
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            let (top, rest) = a.split_at_mut(r + 1);
            let pivot_row = &top[r];
            let piv = &pivot_row[c];
            for row in rest.iter_mut() {
                let lead = std::mem::take(&mut row[c]);
                for j in c + 1..n {
                    let mut v = piv * &row[j];
                    if !lead.is_zero() && !pivot_row[j].is_zero() {
                        v -= &lead * &pivot_row[j];
                    }
                    row[j] = if prev.is_one() { v } else { v / &prev };
                }
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        Echelon { rows: a, pivots }
    }

    pub fn rank(&self) -> usize {
        if self.rows > self.cols {
            self.transpose().echelon().pivots.len()
        } else {
            self.echelon().pivots.len()
        }
    }

    /// A basis of the null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let ech = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.cols];
                x[f] = Rational::one();
                back_substitute(&ech, &mut x, None);
                x
            })
            .collect()
    }

    /// Some solution of `self · x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = RatMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let ech = aug.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        back_substitute(&ech, &mut x, Some(self.cols));
        Some(x)
    }

    pub fn inverse(&self) -> Result<RatMatrix> {
        if self.rows != self.cols {
            return Err(Error::NotInvertible("non-square matrix".into()));
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let e: Vec<Rational> = (0..n).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect();
            cols.push(self.solve(&e).ok_or_else(|| Error::NotInvertible("singular matrix".into()))?);
        }
        if self.rank() < n {
            return Err(Error::NotInvertible("singular matrix".into()));
        }
        Ok(RatMatrix::from_rows(cols).transpose())
    }

    pub fn is_identity(&self) -> bool {
        *self == RatMatrix::identity(self.rows) && self.rows == self.cols
    }
}

/// Solves the echelon system from the bottom up. With `rhs_col` the last
/// column is the right-hand side; otherwise the system is homogeneous and the
/// free entries already set in `x` are kept.
fn back_substitute(ech: &Echelon, x: &mut [Rational], rhs_col: Option<usize>) {
    for (row, &p) in ech.rows.iter().zip(&ech.pivots).rev() {
        let mut acc = match rhs_col {
            Some(c) => Rational::from_integer(row[c].clone()),
            None => Rational::zero(),
        };
        for j in p + 1..x.len() {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc -= &x[j] * Rational::from_integer(row[j].clone());
            }
        }
        x[p] = acc / Rational::from_integer(row[p].clone());
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Matrix of polynomials in a common variable count.
///
/// Bundle maps use the row convention: row `i` holds the coefficients of the
/// image of the `i`-th source frame element, so `β∘α` has matrix `α·β`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { rows, cols, nvars, data: vec![Poly::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.set(i, i, Poly::one(nvars));
        }
        m
    }

    pub fn from_rows(nvars: usize, rows: Vec<Vec<Poly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        assert!(rows.iter().flatten().all(|p| p.nvars() == nvars), "variable count mismatch");
        PolyMatrix { rows: r, cols: c, nvars, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_constants(m: &RatMatrix, nvars: usize) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols(), nvars);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, Poly::constant(nvars, m.get(i, j).clone()));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        assert_eq!(p.nvars(), self.nvars);
        self.data[i * self.cols + j] = p;
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<Poly> {
        self.row(i).to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = Self::zeros(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols, self.nvars);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &PolyMatrix) -> PolyMatrix {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &PolyMatrix) -> PolyMatrix {
        self.zip(rhs, |a, b| a - b)
    }

    fn zip(&self, rhs: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> PolyMatrix {
        assert_eq!((self.rows, self.cols, self.nvars), (rhs.rows, rhs.cols, rhs.nvars));
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn map(&self, nvars: usize, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        PolyMatrix { rows: self.rows, cols: self.cols, nvars, data: self.data.iter().map(f).collect() }
    }

    /// Entrywise composition with a polynomial map given by coordinate images.
    pub fn substitute(&self, images: &[Poly]) -> PolyMatrix {
        let m = images.first().map(Poly::nvars).unwrap_or(0);
        self.map(m, |p| p.substitute(images))
    }

    pub fn eval(&self, point: &[Rational]) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).eval(point));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == PolyMatrix::identity(self.rows, self.nvars)
    }

    /// First nonzero entry, row-major, with its position.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &Poly)> {
        self.data.iter().position(|p| !p.is_zero()).map(|k| (k / self.cols, k % self.cols, &self.data[k]))
    }

    /// Selects rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = Self::zeros(rows.len(), cols.len(), self.nvars);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Determinant by cofactor expansion along the first row; desk ranks only.
    pub fn det(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        match n {
            0 => Poly::one(self.nvars),
            1 => self.get(0, 0).clone(),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            _ => {
                let mut acc = Poly::zero(self.nvars);
                let rest: Vec<usize> = (1..n).collect();
                for j in 0..n {
                    let a = self.get(0, j);
                    if a.is_zero() {
                        continue;
                    }
                    let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                    let minor = self.submatrix(&rest, &cols).det();
                    let term = a * &minor;
                    acc = if j % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }

    /// Inverse over the polynomial ring. Exists exactly when the determinant
    /// is a nonzero constant.
    pub fn inverse(&self) -> Result<PolyMatrix> {
        if self.rows != self.cols {
            return Err(Error::NotInvertible("non-square bundle map".into()));
        }
        let n = self.rows;
        let det = self.det();
        if det.is_zero() || !det.is_constant() {
            return Err(Error::NotInvertible(format!("determinant {det} is not a unit")));
        }
        let inv_det = det.constant_term().recip();
        let mut out = Self::zeros(n, n, self.nvars);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let mut c = self.submatrix(&rows, &cols).det().scale(&inv_det);
                if (i + j) % 2 == 1 {
                    c = -c;
                }
                out.set(i, j, c);
            }
        }
        Ok(out)
    }

    /// Lower bound on the rank over the fraction field, from evaluation at a
    /// few fixed rational points. A full-rank evaluation proves full generic rank.
    pub fn generic_rank_lower_bound(&self) -> usize {
        let points: Vec<Vec<Rational>> = (0..4)
            .map(|s| {
                (0..self.nvars)
                    .map(|k| Rational::new(BigInt::from(2 + 3 * k as i64 + 5 * s), BigInt::from(7 + s)))
                    .collect()
            })
            .collect();
        points.iter().map(|p| self.eval(p).rank()).max().unwrap_or(0)
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}


/// Kernel of a polynomial matrix found by elimination with constant pivots.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotKernel {
    /// One vector per free column, with a `1` in that column.
    pub basis: Vec<Vec<Poly>>,
    pub free: Vec<usize>,
    /// Rows that reduced to zero.
    pub zero_rows: usize,
}

impl PolyMatrix {
    /// Column kernel `{z : M z = 0}`, pivoting only on nonzero constants.
    pub fn constant_pivot_kernel(&self) -> Result<PivotKernel> {
        let (rows, cols, n) = (self.rows(), self.cols(), self.nvars());
        let mut a = self.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        loop {
            let open: Vec<usize> = (0..rows).filter(|r| !pivots.iter().any(|(pr, _)| pr == r)).collect();
            let live: Vec<usize> = open.into_iter().filter(|&r| a.row(r).iter().any(|p| !p.is_zero())).collect();
            if live.is_empty() {
                break;
            }
            let found = live.iter().find_map(|&r| {
                (0..cols).find(|&c| {
                    let e = a.get(r, c);
                    !e.is_zero() && e.is_constant()
                })
                .map(|c| (r, c))
            });
            let Some((pr, pc)) = found else {
                return Err(Error::Unsupported("elimination needs a non-constant pivot".into()));
            };
            let inv = a.get(pr, pc).constant_term().recip();
            for c in 0..cols {
                let v = a.get(pr, c).scale(&inv);
                a.set(pr, c, v);
            }
            for r in 0..rows {
                if r == pr || a.get(r, pc).is_zero() {
                    continue;
                }
                let factor = a.get(r, pc).clone();
                for c in 0..cols {
                    let v = a.get(r, c) - &(&factor * a.get(pr, c));
                    a.set(r, c, v);
                }
            }
            pivots.push((pr, pc));
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.iter().any(|(_, pc)| pc == c)).collect();
        let basis = free
            .iter()
            .map(|&l| {
                let mut z = vec![Poly::zero(n); cols];
                z[l] = Poly::one(n);
                for &(row, col) in &pivots {
                    z[col] = -a.get(row, l);
                }
                z
            })
            .collect();
        Ok(PivotKernel { basis, free, zero_rows: rows - pivots.len() })
    }
}
