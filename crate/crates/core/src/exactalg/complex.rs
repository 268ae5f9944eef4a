use num_traits::One;

use super::{RatMatrix, Rational};
use crate::{Error, Result};

/// One grade of a graded cochain complex: `differentials[k]` maps degree `k`
/// to degree `k + 1` and has shape `dims[k+1] × dims[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grade {
    pub label: i64,
    pub dims: Vec<usize>,
    pub differentials: Vec<RatMatrix>,
}

impl Grade {
    pub fn new(label: i64, dims: Vec<usize>, differentials: Vec<RatMatrix>) -> Result<Self> {
        if differentials.len() + 1 != dims.len().max(1) {
            return Err(Error::Shape(format!(
                "grade {label}: {} differentials for {} degrees",
                differentials.len(),
                dims.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.rows() != dims[k + 1] || d.cols() != dims[k] {
                return Err(Error::Shape(format!(
                    "grade {label}: d_{k} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        Ok(Grade { label, dims, differentials })
    }

    pub fn betti(&self) -> Result<Vec<usize>> {
        grade_betti(self)
    }
}

/// A finite list of grades, each a bounded cochain complex.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GradedComplex {
    pub grades: Vec<Grade>,
}

impl GradedComplex {
    pub fn new(grades: Vec<Grade>) -> Self {
        GradedComplex { grades }
    }

    /// Betti numbers per grade: `dim ker d_k − rank d_{k−1}`.
    /// Fails when some `d_{k+1} ∘ d_k` is nonzero.
    pub fn cohomology(&self) -> Result<Vec<(i64, Vec<usize>)>> {
        self.grades.iter().map(|g| Ok((g.label, grade_betti(g)?))).collect()
    }

    /// Betti numbers summed over all grades, padded to the longest grade.
    pub fn total_betti(&self) -> Result<Vec<usize>> {
        let mut total: Vec<usize> = Vec::new();
        for (_, b) in self.cohomology()? {
            if total.len() < b.len() {
                total.resize(b.len(), 0);
            }
            for (t, x) in total.iter_mut().zip(&b) {
                *t += x;
            }
        }
        Ok(total)
    }
}

fn grade_betti(g: &Grade) -> Result<Vec<usize>> {
    for k in 1..g.differentials.len() {
        if !g.differentials[k].mul(&g.differentials[k - 1])?.is_zero() {
            return Err(Error::NotACocomplex { grade: g.label, degree: k - 1 });
        }
    }
    let ranks: Vec<usize> = g.differentials.iter().map(RatMatrix::rank).collect();
    Ok((0..g.dims.len())
        .map(|k| {
            let out = ranks.get(k).copied().unwrap_or(0);
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            g.dims[k] - out - inc
        })
        .collect())
}

/// Total Betti numbers of a truncated double complex. Degree `d` is flagged
/// reliable only when the truncation cannot reach it, i.e. `d < min(N, K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalBetti {
    pub betti: Vec<usize>,
    pub reliable: Vec<bool>,
}

impl TotalBetti {
    pub fn reliable_prefix(&self) -> &[usize] {
        let n = self.reliable.iter().take_while(|&&r| r).count();
        &self.betti[..n]
    }
}

/// First-quadrant double complex truncated at rows `0..=N` and columns `0..=K`.
///
/// Piece `(n, k)` has dimension `dims[n][k]`. The horizontal differential
/// raises `k` and the vertical raises `n`; they commute, and the total
/// differential is `D = h + (−1)^k v` on column `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleComplex {
    dims: Vec<Vec<usize>>,
    horizontal: Vec<Vec<RatMatrix>>,
    vertical: Vec<Vec<RatMatrix>>,
}

impl DoubleComplex {
    /// `horizontal[n][k]` maps `(n,k) → (n,k+1)` for `k < K`;
    /// `vertical[n][k]` maps `(n,k) → (n+1,k)` for `n < N`.
    pub fn new(dims: Vec<Vec<usize>>, horizontal: Vec<Vec<RatMatrix>>, vertical: Vec<Vec<RatMatrix>>) -> Result<Self> {
        let rows = dims.len();
        if rows == 0 {
            return Err(Error::Shape("double complex without rows".into()));
        }
        let cols = dims[0].len();
        if cols == 0 || dims.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged double complex".into()));
        }
        if horizontal.len() != rows || horizontal.iter().any(|r| r.len() != cols - 1) {
            return Err(Error::Shape("horizontal differential count".into()));
        }
        if vertical.len() != rows - 1 || vertical.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("vertical differential count".into()));
        }
        for n in 0..rows {
            for k in 0..cols {
                if k + 1 < cols {
                    let h = &horizontal[n][k];
                    if h.rows() != dims[n][k + 1] || h.cols() != dims[n][k] {
                        return Err(Error::Shape(format!("horizontal ({n},{k})")));
                    }
                }
                if n + 1 < rows {
                    let v = &vertical[n][k];
                    if v.rows() != dims[n + 1][k] || v.cols() != dims[n][k] {
                        return Err(Error::Shape(format!("vertical ({n},{k})")));
                    }
                }
            }
        }
        let dc = DoubleComplex { dims, horizontal, vertical };
        dc.check_relations()?;
        Ok(dc)
    }

    fn check_relations(&self) -> Result<()> {
        let (rows, cols) = (self.dims.len(), self.dims[0].len());
        for n in 0..rows {
            for k in 0..cols {
                if k + 2 < cols && !self.horizontal[n][k + 1].mul(&self.horizontal[n][k])?.is_zero() {
                    return Err(Error::NotACocomplex { grade: n as i64, degree: k });
                }
                if n + 2 < rows && !self.vertical[n + 1][k].mul(&self.vertical[n][k])?.is_zero() {
                    return Err(Error::NotACocomplex { grade: k as i64, degree: n });
                }
                if k + 1 < cols && n + 1 < rows {
                    let hv = self.horizontal[n + 1][k].mul(&self.vertical[n][k])?;
                    let vh = self.vertical[n][k + 1].mul(&self.horizontal[n][k])?;
                    if hv != vh {
                        return Err(Error::NotCommuting { row: n, col: k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn max_row(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn max_col(&self) -> usize {
        self.dims[0].len() - 1
    }

    pub fn dim(&self, n: usize, k: usize) -> usize {
        self.dims[n][k]
    }

    pub fn horizontal(&self, n: usize, k: usize) -> &RatMatrix {
        &self.horizontal[n][k]
    }

    pub fn vertical(&self, n: usize, k: usize) -> &RatMatrix {
        &self.vertical[n][k]
    }

    /// Pieces `(n, d−n)` of total degree `d`, ordered by `n`.
    fn pieces(&self, d: usize) -> Vec<(usize, usize)> {
        (0..=d.min(self.max_row())).filter(|&n| d - n <= self.max_col()).map(|n| (n, d - n)).collect()
    }

    fn offsets(&self, pieces: &[(usize, usize)]) -> (Vec<usize>, usize) {
        let mut offs = Vec::with_capacity(pieces.len());
        let mut acc = 0;
        for &(n, k) in pieces {
            offs.push(acc);
            acc += self.dims[n][k];
        }
        (offs, acc)
    }

    pub fn total_dim(&self, d: usize) -> usize {
        self.offsets(&self.pieces(d)).1
    }

    /// The total differential `C^d → C^{d+1}` as one block matrix.
    pub fn total_differential(&self, d: usize) -> RatMatrix {
        let src = self.pieces(d);
        let dst = self.pieces(d + 1);
        let (src_off, src_dim) = self.offsets(&src);
        let (dst_off, dst_dim) = self.offsets(&dst);
        let mut out = RatMatrix::zeros(dst_dim, src_dim);
        let place = |out: &mut RatMatrix, block: &RatMatrix, r0: usize, c0: usize, sign: &Rational| {
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    let v = block.get(i, j);
                    if !num_traits::Zero::is_zero(v) {
                        out.set(r0 + i, c0 + j, v * sign);
                    }
                }
            }
        };
        let one = Rational::one();
        let minus = -Rational::one();
        for (si, &(n, k)) in src.iter().enumerate() {
            if k < self.max_col() {
                let ti = dst.iter().position(|&p| p == (n, k + 1)).expect("target piece");
                place(&mut out, &self.horizontal[n][k], dst_off[ti], src_off[si], &one);
            }
            if n < self.max_row() {
                let ti = dst.iter().position(|&p| p == (n + 1, k)).expect("target piece");
                let sign = if k % 2 == 0 { &one } else { &minus };
                place(&mut out, &self.vertical[n][k], dst_off[ti], src_off[si], sign);
            }
        }
        out
    }

    /// Betti numbers of the total complex in degrees `0..=max_degree`.
    pub fn total_cohomology(&self, max_degree: usize) -> Result<TotalBetti> {
        if self.max_row() < max_degree || self.max_col() < max_degree {
            return Err(Error::Shape(format!(
                "truncation ({}, {}) below requested degree {max_degree}",
                self.max_row(),
                self.max_col()
            )));
        }
        let ranks: Vec<usize> = (0..=max_degree).map(|d| self.total_differential(d).rank()).collect();
        let limit = self.max_row().min(self.max_col());
        let betti = (0..=max_degree)
            .map(|d| self.total_dim(d) - ranks[d] - if d > 0 { ranks[d - 1] } else { 0 })
            .collect();
        let reliable = (0..=max_degree).map(|d| d < limit).collect();
        Ok(TotalBetti { betti, reliable })
    }
}
