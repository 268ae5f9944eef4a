use std::collections::BTreeMap;

use super::AlgebroidPresentation;
use crate::exactalg::Poly;
use crate::{Error, Result};

/// An `A`-form `Σ ω_I e^I` over strictly increasing index tuples `I`, with the
/// convention `ω(e_{i_1}, …, e_{i_k}) = ω_I` for increasing `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    nvars: usize,
    rank: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Poly>,
}

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
pub(crate) fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut inversions = 0;
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            if idx[a] == idx[b] {
                return None;
            }
            if idx[a] > idx[b] {
                inversions += 1;
            }
        }
    }
    let mut v = idx.to_vec();
    v.sort_unstable();
    Some((v, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// All strictly increasing `k`-tuples from `0..r`.
pub(crate) fn subsets(r: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            go(i + 1, r, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= r {
        go(0, r, k, &mut Vec::new(), &mut out);
    }
    out
}

impl Form {
    pub fn zero(nvars: usize, rank: usize, degree: usize) -> Self {
        Form { nvars, rank, degree, comps: BTreeMap::new() }
    }

    pub fn function(rank: usize, f: Poly) -> Self {
        let mut w = Form::zero(f.nvars(), rank, 0);
        w.set(vec![], f);
        w
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Sets the component on an increasing index tuple.
    pub fn set(&mut self, idx: Vec<usize>, p: Poly) {
        assert_eq!(idx.len(), self.degree, "index length must equal degree");
        assert!(idx.windows(2).all(|w| w[0] < w[1]) && idx.iter().all(|&i| i < self.rank));
        if p.is_zero() {
            self.comps.remove(&idx);
        } else {
            self.comps.insert(idx, p);
        }
    }

    pub fn get(&self, idx: &[usize]) -> Poly {
        self.comps.get(idx).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn first_nonzero(&self) -> Option<(&Vec<usize>, &Poly)> {
        self.comps.iter().next()
    }

    /// `ω(e_{idx[0]}, …)` for an arbitrary index list.
    pub fn eval_frame(&self, idx: &[usize]) -> Poly {
        match sort_sign(idx) {
            None => Poly::zero(self.nvars),
            Some((sorted, s)) => {
                let p = self.get(&sorted);
                if s < 0 {
                    -p
                } else {
                    p
                }
            }
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!((self.degree, self.rank, self.nvars), (other.degree, other.rank, other.nvars));
        let mut out = self.clone();
        for (k, p) in &other.comps {
            let v = &out.get(k) + p;
            out.set(k.clone(), v);
        }
        out
    }

    pub fn scale(&self, f: &Poly) -> Form {
        let mut out = Form::zero(self.nvars, self.rank, self.degree);
        for (k, p) in &self.comps {
            out.set(k.clone(), p * f);
        }
        out
    }

    /// `α ∧ β` with `(α∧β)_{I∪J} = sign · α_I β_J`.
    pub fn wedge(&self, other: &Form) -> Form {
        assert_eq!((self.rank, self.nvars), (other.rank, other.nvars));
        let mut out = Form::zero(self.nvars, self.rank, self.degree + other.degree);
        if out.degree > self.rank {
            return out;
        }
        for (i, p) in &self.comps {
            for (j, q) in &other.comps {
                let idx: Vec<usize> = i.iter().chain(j).copied().collect();
                if let Some((sorted, s)) = sort_sign(&idx) {
                    let t = p * q;
                    let t = if s < 0 { -t } else { t };
                    let v = &out.get(&sorted) + &t;
                    out.set(sorted, v);
                }
            }
        }
        out
    }

    /// Applies a polynomial substitution to every component.
    pub fn substitute(&self, images: &[Poly]) -> Form {
        let m = images.first().map(Poly::nvars).unwrap_or(0);
        let mut out = Form::zero(m, self.rank, self.degree);
        for (k, p) in &self.comps {
            out.set(k.clone(), p.substitute(images));
        }
        out
    }
}

/// The algebroid de Rham differential
/// `dω(ξ_0,…,ξ_k) = Σ (−1)^i ξ_i(ω(…ξ̂_i…)) + Σ_{i<j} (−1)^{i+j} ω([ξ_i,ξ_j], …ξ̂_i…ξ̂_j…)`
/// evaluated on frame elements.
pub fn de_rham_d(a: &AlgebroidPresentation, w: &Form) -> Result<Form> {
    if w.rank != a.rank() || w.nvars != a.dim() {
        return Err(Error::Shape("form does not live on this algebroid".into()));
    }
    let k = w.degree;
    if k >= a.rank() {
        return Err(Error::TopDegree(k));
    }
    let r = a.rank();
    let mut out = Form::zero(w.nvars, r, k + 1);
    for j in subsets(r, k + 1) {
        let mut acc = Poly::zero(w.nvars);
        for (pos, &ji) in j.iter().enumerate() {
            let rest: Vec<usize> = j.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &x)| x).collect();
            let t = a.act(ji, &w.get(&rest));
            acc = if pos % 2 == 0 { acc + t } else { acc - t };
        }
        for p in 0..j.len() {
            for q in p + 1..j.len() {
                let rest: Vec<usize> =
                    j.iter().enumerate().filter(|&(x, _)| x != p && x != q).map(|(_, &v)| v).collect();
                let mut term = Poly::zero(w.nvars);
                for m in 0..r {
                    let c = a.c(j[p], j[q], m);
                    if c.is_zero() {
                        continue;
                    }
                    let mut idx = vec![m];
                    idx.extend_from_slice(&rest);
                    let val = w.eval_frame(&idx);
                    if !val.is_zero() {
                        term = term + c * &val;
                    }
                }
                acc = if (p + q) % 2 == 0 { acc + term } else { acc - term };
            }
        }
        out.set(j, acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    fn sl2() -> AlgebroidPresentation {
        AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (2, 0, 1, int(1))]).unwrap()
    }

    #[test]
    fn maurer_cartan_sign() {
        let a = sl2();
        let mut e1 = Form::zero(0, 3, 1);
        e1.set(vec![0], Poly::one(0));
        let d = de_rham_d(&a, &e1).unwrap();
        assert_eq!(d.get(&[1, 2]), Poly::from_int(0, -1));
        assert_eq!(d.components().count(), 1);
    }

    #[test]
    fn exact_one_form_on_tangent() {
        let a = AlgebroidPresentation::tangent(1);
        let x = Poly::var(1, 0);
        let d = de_rham_d(&a, &Form::function(1, x.pow(2))).unwrap();
        assert_eq!(d.get(&[0]), x.scale(&int(2)));
    }

    #[test]
    fn top_degree_is_explicit() {
        let a = sl2();
        let top = Form::zero(0, 3, 3);
        assert_eq!(de_rham_d(&a, &top), Err(Error::TopDegree(3)));
    }

    #[test]
    fn sort_signs() {
        assert_eq!(sort_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_sign(&[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_sign(&[1, 1]), None);
    }
}
