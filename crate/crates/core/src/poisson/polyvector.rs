use std::collections::BTreeMap;
use std::fmt;

use crate::algebroid::sort_sign;
use crate::exactalg::{Poly, PolyMatrix};
use crate::{Error, Result};

/// A `p`-vector field on `Affine(n)`: `Σ_I P^I ∂_{i_1}∧…∧∂_{i_p}` over strictly
/// increasing `I`. Degrees above `n` are allowed and always zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    nvars: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, Poly>,
}

impl PolyVectorField {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        PolyVectorField { nvars, degree, components: BTreeMap::new() }
    }

    /// Components may be listed with unsorted indices; they are sorted with
    /// the permutation sign and summed. Repeated indices contribute nothing.
    pub fn new(nvars: usize, degree: usize, components: Vec<(Vec<usize>, Poly)>) -> Result<Self> {
        let mut out = Self::zero(nvars, degree);
        for (idx, p) in components {
            if idx.len() != degree || idx.iter().any(|&i| i >= nvars) {
                return Err(Error::Shape(format!("index {idx:?} for a {degree}-vector on Affine({nvars})")));
            }
            if p.nvars() != nvars {
                return Err(Error::Shape("component in wrong variable count".into()));
            }
            out.add_at(&idx, p);
        }
        Ok(out)
    }

    pub fn function(f: Poly) -> Self {
        let mut out = Self::zero(f.nvars(), 0);
        out.add_at(&[], f);
        out
    }

    pub fn vector(v: &[Poly], nvars: usize) -> Self {
        let mut out = Self::zero(nvars, 1);
        for (i, p) in v.iter().enumerate() {
            out.add_at(&[i], p.clone());
        }
        out
    }

    /// `Σ_{i<j} M_{ij} ∂_i∧∂_j` from a full antisymmetric matrix.
    pub fn bivector_from_matrix(m: &PolyMatrix) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n || m.nvars() != n {
            return Err(Error::Shape(format!("bivector matrix is {}x{} in {} variables", n, m.cols(), m.nvars())));
        }
        let mut out = Self::zero(n, 2);
        for i in 0..n {
            if !m.get(i, i).is_zero() {
                return Err(Error::Antisymmetry(format!("diagonal entry ({}, {}) = {}", i + 1, i + 1, m.get(i, i))));
            }
            for j in i + 1..n {
                if m.get(j, i) != &-m.get(i, j) {
                    return Err(Error::Antisymmetry(format!("entries ({}, {}) and ({}, {}) do not cancel", i + 1, j + 1, j + 1, i + 1)));
                }
                out.add_at(&[i, j], m.get(i, j).clone());
            }
        }
        Ok(out)
    }

    fn add_at(&mut self, idx: &[usize], p: Poly) {
        if p.is_zero() {
            return;
        }
        let Some((sorted, sign)) = sort_sign(idx) else { return };
        let p = if sign < 0 { -p } else { p };
        let sum = match self.components.remove(&sorted) {
            Some(q) => q + p,
            None => p,
        };
        if !sum.is_zero() {
            self.components.insert(sorted, sum);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Component at any index ordering, signed accordingly.
    pub fn get(&self, idx: &[usize]) -> Poly {
        match sort_sign(idx) {
            Some((sorted, sign)) => {
                let p = self.components.get(&sorted).cloned().unwrap_or_else(|| Poly::zero(self.nvars));
                if sign < 0 {
                    -p
                } else {
                    p
                }
            }
            None => Poly::zero(self.nvars),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.components.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn first_nonzero(&self) -> Option<(&Vec<usize>, &Poly)> {
        self.components.iter().next()
    }

    /// Full antisymmetric matrix of a bivector.
    pub fn matrix(&self) -> Result<PolyMatrix> {
        if self.degree != 2 {
            return Err(Error::Shape(format!("a {}-vector has no bivector matrix", self.degree)));
        }
        let n = self.nvars;
        let mut m = PolyMatrix::zeros(n, n, n);
        for (idx, p) in &self.components {
            m.set(idx[0], idx[1], p.clone());
            m.set(idx[1], idx[0], -p);
        }
        Ok(m)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Shape(format!("charts Affine({}) and Affine({})", self.nvars, other.nvars)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        if self.degree != other.degree {
            return Err(Error::Shape(format!("adding a {}-vector to a {}-vector", self.degree, other.degree)));
        }
        let mut out = self.clone();
        for (idx, p) in &other.components {
            out.add_at(idx, p.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, f: &Poly) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        for (idx, p) in &self.components {
            out.add_at(idx, p * f);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(product(self, other))
    }

    /// `{f, g} = P(df, dg)` for a bivector `P`.
    pub fn bracket_functions(&self, f: &Poly, g: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (idx, p) in &self.components {
            let (i, j) = (idx[0], idx[1]);
            let term = &f.derive(i) * &g.derive(j) - &f.derive(j) * &g.derive(i);
            out = out + p * &term;
        }
        out
    }

    /// Pushforward by a polynomial diffeomorphism `y = φ(x)` with inverse
    /// `x = φ⁻¹(y)`: `(φ_*P)(y) = dφ P(φ⁻¹ y)`.
    pub fn push_forward(&self, map: &[Poly], inverse: &[Poly]) -> Result<Self> {
        let n = self.nvars;
        if map.len() != n || inverse.len() != n || map.iter().chain(inverse).any(|p| p.nvars() != n) {
            return Err(Error::Shape("pushforward needs a self-map of the chart".into()));
        }
        let columns: Vec<Self> = (0..n)
            .map(|i| {
                let col: Vec<Poly> = map.iter().map(|m| m.derive(i).substitute(inverse)).collect();
                Self::vector(&col, n)
            })
            .collect();
        let mut out = Self::zero(n, self.degree);
        for (idx, p) in &self.components {
            let mut term = Self::function(p.substitute(inverse));
            for &i in idx {
                term = product(&term, &columns[i]);
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    fn map_components(&self, degree: usize, f: impl Fn(&[usize]) -> Option<(Vec<usize>, i32)>, g: impl Fn(&Poly) -> Poly) -> Self {
        let mut out = Self::zero(self.nvars, degree);
        for (idx, p) in &self.components {
            if let Some((rest, sign)) = f(idx) {
                let q = g(p);
                out.add_at(&rest, if sign < 0 { -q } else { q });
            }
        }
        out
    }

    /// Derivative by `θ_i = ∂_i` acting from the right.
    fn right_dtheta(&self, i: usize) -> Self {
        self.map_components(self.degree.saturating_sub(1), |idx| odd_remove(idx, i, true), Poly::clone)
    }

    /// Derivative by `θ_i` acting from the left.
    fn left_dtheta(&self, i: usize) -> Self {
        self.map_components(self.degree.saturating_sub(1), |idx| odd_remove(idx, i, false), Poly::clone)
    }

    fn dx(&self, i: usize) -> Self {
        self.map_components(self.degree, |idx| Some((idx.to_vec(), 1)), |p| p.derive(i))
    }
}

/// Removes `θ_i` from `θ_I`, with the sign of moving it to the right end
/// (`right`) or to the left end.
fn odd_remove(idx: &[usize], i: usize, right: bool) -> Option<(Vec<usize>, i32)> {
    let a = idx.iter().position(|&j| j == i)?;
    let moves = if right { idx.len() - 1 - a } else { a };
    let mut rest = idx.to_vec();
    rest.remove(a);
    Some((rest, if moves % 2 == 0 { 1 } else { -1 }))
}

fn product(a: &PolyVectorField, b: &PolyVectorField) -> PolyVectorField {
    let mut out = PolyVectorField::zero(a.nvars, a.degree + b.degree);
    for (i, p) in &a.components {
        for (j, q) in &b.components {
            out.add_at(&[i.as_slice(), j.as_slice()].concat(), p * q);
        }
    }
    out
}

/// Schouten–Nijenhuis bracket, degree `p + q − 1`. In odd coordinates
/// `θ_i = ∂_i`: `[P, Q] = Σ_i (P ∂⃖_{θ_i}) ∂_{x_i}Q − ∂_{x_i}P (∂⃗_{θ_i} Q)`.
/// On vector fields this is the Lie bracket, and `[v, f] = v(f)`.
pub fn schouten_bracket(p: &PolyVectorField, q: &PolyVectorField) -> Result<PolyVectorField> {
    p.same_shape(q)?;
    if p.degree + q.degree == 0 {
        return Err(Error::Unsupported("the bracket of two functions has degree -1".into()));
    }
    let mut out = PolyVectorField::zero(p.nvars, p.degree + q.degree - 1);
    for i in 0..p.nvars {
        let first = product(&p.right_dtheta(i), &q.dx(i));
        let second = product(&p.dx(i), &q.left_dtheta(i));
        for (idx, c) in first.components() {
            out.add_at(idx, c.clone());
        }
        for (idx, c) in second.components() {
            out.add_at(idx, -c);
        }
    }
    Ok(out)
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, p)) in self.components.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({p})")?;
            for (k, i) in idx.iter().enumerate() {
                write!(f, "{}∂{}", if k == 0 { " " } else { "∧" }, i + 1)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn constant_bivector_commutes_with_itself() {
        let pi = PolyVectorField::new(2, 2, vec![(vec![0, 1], Poly::one(2))]).unwrap();
        let s = schouten_bracket(&pi, &pi).unwrap();
        assert_eq!(s.degree(), 3);
        assert!(s.is_zero());
    }

    #[test]
    fn derivation_on_functions() {
        let v = PolyVectorField::vector(&[x(1, 0)], 1);
        let f = PolyVectorField::function(x(1, 0).pow(2));
        let vf = schouten_bracket(&v, &f).unwrap();
        assert_eq!(vf.get(&[]), x(1, 0).pow(2).scale(&crate::exactalg::int(2)));
        assert_eq!(schouten_bracket(&f, &v).unwrap().get(&[]), -vf.get(&[]));
    }

    #[test]
    fn lie_bracket_of_vector_fields() {
        let v = [x(2, 1), Poly::zero(2)];
        let w = [Poly::zero(2), x(2, 0)];
        let b = schouten_bracket(&PolyVectorField::vector(&v, 2), &PolyVectorField::vector(&w, 2)).unwrap();
        let want = crate::algebroid::lie_bracket(&v, &w);
        assert_eq!(b, PolyVectorField::vector(&want, 2));
    }

    #[test]
    fn so3_lie_poisson() {
        let n = 3;
        let pi = PolyVectorField::new(n, 2, vec![(vec![1, 2], x(n, 0)), (vec![2, 0], x(n, 1)), (vec![0, 1], x(n, 2))]).unwrap();
        assert_eq!(pi.get(&[0, 2]), -x(n, 1));
        assert!(schouten_bracket(&pi, &pi).unwrap().is_zero());
        let m = pi.matrix().unwrap();
        assert_eq!(PolyVectorField::bivector_from_matrix(&m).unwrap(), pi);
        assert_eq!(pi.bracket_functions(&x(n, 0), &x(n, 1)), x(n, 2));
    }

    #[test]
    fn pushforward_by_a_reflection() {
        let pi = PolyVectorField::new(2, 2, vec![(vec![0, 1], Poly::one(2))]).unwrap();
        let flip = vec![-x(2, 0), x(2, 1)];
        assert_eq!(pi.push_forward(&flip, &flip).unwrap(), pi.scale(&Poly::from_int(2, -1)));
        let both = vec![-x(2, 0), -x(2, 1)];
        assert_eq!(pi.push_forward(&both, &both).unwrap(), pi);
    }
}
