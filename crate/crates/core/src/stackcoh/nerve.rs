use crate::exactalg::Poly;
use crate::groupoid::{verify_groupoid, DeskGroupoid};
use crate::pullback::compose_maps;
use crate::{Error, Result};

/// Levels `X_0..X_N` of the nerve of `G ⋉ X`. A simplex of level `n` is
/// `(g_1, …, g_n; y)` with `y` the target of `g_1`, so the chain reads
/// `y ← x_1 ← … ← x_n` with `x_i = (g_1⋯g_i)⁻¹ y`. Each level is the chart
/// `X` repeated once per tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct NerveData {
    pub groupoid: DeskGroupoid,
    pub levels: Vec<Vec<Vec<usize>>>,
}

/// A face of a simplex: the tuple it lands on and the chart substitution
/// giving its coordinate in terms of the simplex coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub tuple: Vec<usize>,
    pub chart: Vec<Poly>,
}

fn all_tuples(order: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| (0..order).map(move |g| [t.clone(), vec![g]].concat())).collect();
    }
    out
}

impl NerveData {
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    /// Position of a tuple in its level: the tuple read as a base-`|G|` number.
    pub fn index_of(&self, tuple: &[usize]) -> usize {
        let order = self.groupoid.order();
        tuple.iter().fold(0, |acc, &g| acc * order + g)
    }

    /// `d_i` on level `n`: `d_0` drops `g_1` and moves the coordinate to
    /// `x_1 = g_1⁻¹y`, `d_i` for `0 < i < n` composes `g_i g_{i+1}`, `d_n`
    /// drops `g_n`.
    pub fn face(&self, tuple: &[usize], i: usize) -> Face {
        let grp = self.groupoid.group();
        let n = self.groupoid.dim();
        let id: Vec<Poly> = (0..n).map(|k| Poly::var(n, k)).collect();
        let len = tuple.len();
        assert!(len >= 1 && i <= len, "face index out of range");
        if i == 0 {
            return Face { tuple: tuple[1..].to_vec(), chart: self.groupoid.act(grp.inverse(tuple[0])) };
        }
        if i == len {
            return Face { tuple: tuple[..len - 1].to_vec(), chart: id };
        }
        let mut t = tuple[..i - 1].to_vec();
        t.push(grp.mul(tuple[i - 1], tuple[i]));
        t.extend_from_slice(&tuple[i + 1..]);
        Face { tuple: t, chart: id }
    }

    /// `d_i d_j = d_{j−1} d_i` for `i < j` on every simplex of level `2..=N`.
    pub fn check_simplicial(&self) -> Result<()> {
        let n = self.groupoid.dim();
        for level in 2..=self.top() {
            for t in &self.levels[level] {
                for j in 1..=level {
                    for i in 0..j {
                        let fj = self.face(t, j);
                        let lhs = self.face(&fj.tuple, i);
                        let fi = self.face(t, i);
                        let rhs = self.face(&fi.tuple, j - 1);
                        let lhs_chart = compose_maps(&lhs.chart, &fj.chart, n);
                        let rhs_chart = compose_maps(&rhs.chart, &fi.chart, n);
                        if lhs.tuple != rhs.tuple || lhs_chart != rhs_chart {
                            return Err(Error::Inconsistent(format!(
                                "d_{i} d_{j} ≠ d_{} d_{i} on {:?}",
                                j - 1,
                                t.iter().map(|g| g + 1).collect::<Vec<_>>()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn build_nerve(g: &DeskGroupoid, top: usize) -> Result<NerveData> {
    if !verify_groupoid(g).is_valid() {
        return Err(Error::Invalid("groupoid does not verify".into()));
    }
    let levels = (0..=top).map(|n| all_tuples(g.order(), n)).collect();
    let nerve = NerveData { groupoid: g.clone(), levels };
    nerve.check_simplicial()?;
    Ok(nerve)
}
