//! The `algebroidkit/1` document format and its conversion to domain objects.
//!
//! Indices inside documents are 0-based. Rationals are strings `"p"` or
//! `"p/q"`. A polynomial is a list of terms; the zero polynomial is `[]`, so
//! the variable count always comes from the enclosing object.

use serde::{Deserialize, Serialize};

use algebroidkit::exactalg::RatMatrix;
use algebroidkit::pullback::{AffineMap, CoverDatum, Overlap, TripleOverlap};
use algebroidkit::{
    parse_rational, AlgebroidPresentation, DeskGroupoid, FiniteGroup, MorphismData, Poly, PolyMatrix, PolyVectorField,
    Rational, SplitSubmersion,
};

use crate::CliError;

pub const SCHEMA: &str = "algebroidkit/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: String,
    pub exponents: Vec<u32>,
}

pub type PolyDoc = Vec<TermDoc>;
pub type MatrixDoc = Vec<Vec<PolyDoc>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketDoc {
    pub i: usize,
    pub j: usize,
    /// Coefficients of `[e_i, e_j]` in the frame.
    pub value: Vec<PolyDoc>,
}

/// Row `i` of `anchor` is `a(e_i)` in coordinate vector fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidDoc {
    pub dim: usize,
    pub rank: usize,
    pub anchor: MatrixDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<BracketDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub source: AlgebroidDoc,
    pub target: AlgebroidDoc,
    pub base_map: Vec<PolyDoc>,
    pub matrix: MatrixDoc,
}

/// `x ↦ matrix·x + offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineDoc {
    pub matrix: Vec<Vec<String>>,
    pub offset: Vec<String>,
}

/// `forward` maps source coordinates to `(target, fibre)` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmersionDoc {
    pub target_dim: usize,
    pub forward: Vec<PolyDoc>,
    pub inverse: Vec<PolyDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentDoc {
    pub psi: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapDoc {
    pub i: usize,
    pub j: usize,
    pub into_i: AffineDoc,
    pub into_j: AffineDoc,
    pub theta_ij: MatrixDoc,
    pub theta_ji: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDoc {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub into_ij: AffineDoc,
    pub into_jk: AffineDoc,
    pub into_ik: AffineDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub charts: Vec<AlgebroidDoc>,
    pub overlaps: Vec<OverlapDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triples: Vec<TripleDoc>,
}

/// Over a point (`dim = 0`) the action lists are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDoc {
    pub table: Vec<Vec<usize>>,
    #[serde(default)]
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub action: Vec<AffineDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub action_inverse: Vec<AffineDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub index: Vec<usize>,
    pub value: PolyDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultivectorDoc {
    pub nvars: usize,
    pub degree: usize,
    pub components: Vec<ComponentDoc>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebroid: Option<AlgebroidDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<MorphismDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submersion: Option<SubmersionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descent: Option<DescentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<Vec<PolyDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groupoid: Option<GroupoidDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<MatrixDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bivector: Option<MultivectorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_inv: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<i64>,
}

/// A loaded document: every present part converted and validated.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Loaded {
    pub description: Option<String>,
    pub algebroid: Option<AlgebroidPresentation>,
    pub morphism: Option<MorphismData>,
    pub submersion: Option<SplitSubmersion>,
    pub descent_psi: Option<PolyMatrix>,
    pub section: Option<Vec<Poly>>,
    pub cover: Option<CoverDatum>,
    pub groupoid: Option<DeskGroupoid>,
    pub psi: Option<Vec<PolyMatrix>>,
    pub bivector: Option<PolyVectorField>,
    pub omega: Option<PolyMatrix>,
    pub omega_inv: Option<PolyMatrix>,
    pub cap: Option<i64>,
}

fn field(path: &str, message: impl ToString) -> CliError {
    CliError::Field { field: path.to_string(), message: message.to_string() }
}

fn rational(s: &str, path: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| field(path, e))
}

pub fn poly_from_doc(doc: &[TermDoc], nvars: usize, path: &str) -> Result<Poly, CliError> {
    let mut terms = Vec::with_capacity(doc.len());
    for (t, term) in doc.iter().enumerate() {
        let here = format!("{path}[{t}]");
        if term.exponents.len() != nvars {
            return Err(field(&here, format!("exponents has length {}, expected {nvars}", term.exponents.len())));
        }
        terms.push((term.exponents.clone(), rational(&term.coeff, &format!("{here}.coeff"))?));
    }
    Ok(Poly::from_terms(nvars, terms))
}

fn polys(doc: &[PolyDoc], nvars: usize, path: &str) -> Result<Vec<Poly>, CliError> {
    doc.iter().enumerate().map(|(i, p)| poly_from_doc(p, nvars, &format!("{path}[{i}]"))).collect()
}

fn matrix(doc: &MatrixDoc, rows: usize, cols: usize, nvars: usize, path: &str) -> Result<PolyMatrix, CliError> {
    if doc.len() != rows {
        return Err(field(path, format!("has {} rows, expected {rows}", doc.len())));
    }
    let mut out = Vec::with_capacity(rows);
    for (i, row) in doc.iter().enumerate() {
        if row.len() != cols {
            return Err(field(&format!("{path}[{i}]"), format!("has {} entries, expected {cols}", row.len())));
        }
        out.push(polys(row, nvars, &format!("{path}[{i}]"))?);
    }
    Ok(PolyMatrix::from_rows(nvars, out))
}

fn square(doc: &MatrixDoc, nvars: usize, path: &str) -> Result<PolyMatrix, CliError> {
    matrix(doc, doc.len(), doc.len(), nvars, path)
}

fn algebroid(doc: &AlgebroidDoc, path: &str) -> Result<AlgebroidPresentation, CliError> {
    let (n, r) = (doc.dim, doc.rank);
    let anchor = matrix(&doc.anchor, r, n, n, &format!("{path}.anchor"))?;
    let mut brackets = Vec::with_capacity(doc.brackets.len());
    for (b, br) in doc.brackets.iter().enumerate() {
        let here = format!("{path}.brackets[{b}]");
        if br.i >= r || br.j >= r {
            return Err(field(&here, format!("frame index outside rank {r}")));
        }
        if br.value.len() != r {
            return Err(field(&format!("{here}.value"), format!("has {} entries, expected {r}", br.value.len())));
        }
        brackets.push(((br.i, br.j), polys(&br.value, n, &format!("{here}.value"))?));
    }
    AlgebroidPresentation::new(n, r, anchor, brackets).map_err(|e| field(path, e))
}

fn affine(doc: &AffineDoc, dim: usize, path: &str) -> Result<AffineMap, CliError> {
    if doc.matrix.len() != dim || doc.matrix.iter().any(|r| r.len() != dim) {
        return Err(field(&format!("{path}.matrix"), format!("must be {dim}x{dim}")));
    }
    if doc.offset.len() != dim {
        return Err(field(&format!("{path}.offset"), format!("must have {dim} entries")));
    }
    let mut rows = Vec::with_capacity(dim);
    for (i, row) in doc.matrix.iter().enumerate() {
        rows.push(row.iter().enumerate().map(|(j, s)| rational(s, &format!("{path}.matrix[{i}][{j}]"))).collect::<Result<Vec<_>, _>>()?);
    }
    let offset = doc.offset.iter().enumerate().map(|(i, s)| rational(s, &format!("{path}.offset[{i}]"))).collect::<Result<_, _>>()?;
    AffineMap::new(RatMatrix::from_rows(rows), offset).map_err(|e| field(path, e))
}

fn groupoid(doc: &GroupoidDoc) -> Result<DeskGroupoid, CliError> {
    let group = FiniteGroup::from_table(doc.table.clone()).map_err(|e| field("groupoid.table", e))?;
    if doc.dim == 0 && doc.action.is_empty() && doc.action_inverse.is_empty() {
        return Ok(DeskGroupoid::over_point(group));
    }
    let maps = |list: &[AffineDoc], name: &str| {
        list.iter().enumerate().map(|(g, a)| affine(a, doc.dim, &format!("groupoid.{name}[{g}]"))).collect::<Result<Vec<_>, _>>()
    };
    let action = maps(&doc.action, "action")?;
    let inverse = maps(&doc.action_inverse, "action_inverse")?;
    DeskGroupoid::transformation(group, doc.dim, action, inverse).map_err(|e| field("groupoid", e))
}

fn multivector(doc: &MultivectorDoc, path: &str) -> Result<PolyVectorField, CliError> {
    let mut comps = Vec::with_capacity(doc.components.len());
    for (c, comp) in doc.components.iter().enumerate() {
        let here = format!("{path}.components[{c}]");
        if comp.index.len() != doc.degree || comp.index.iter().any(|&i| i >= doc.nvars) {
            return Err(field(&format!("{here}.index"), format!("needs {} indices below {}", doc.degree, doc.nvars)));
        }
        comps.push((comp.index.clone(), poly_from_doc(&comp.value, doc.nvars, &format!("{here}.value"))?));
    }
    PolyVectorField::new(doc.nvars, doc.degree, comps).map_err(|e| field(path, e))
}

fn cover(doc: &CoverDoc) -> Result<CoverDatum, CliError> {
    let charts = doc.charts.iter().enumerate().map(|(i, a)| algebroid(a, &format!("cover.charts[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    let n = charts.first().map(AlgebroidPresentation::dim).ok_or_else(|| field("cover.charts", "no charts"))?;
    let rank = |i: usize, path: &str| charts.get(i).map(AlgebroidPresentation::rank).ok_or_else(|| field(path, format!("no chart {i}")));
    let mut overlaps = Vec::with_capacity(doc.overlaps.len());
    for (o, ov) in doc.overlaps.iter().enumerate() {
        let here = format!("cover.overlaps[{o}]");
        let (ri, rj) = (rank(ov.i, &format!("{here}.i"))?, rank(ov.j, &format!("{here}.j"))?);
        overlaps.push(Overlap {
            i: ov.i,
            j: ov.j,
            into_i: affine(&ov.into_i, n, &format!("{here}.into_i"))?,
            into_j: affine(&ov.into_j, n, &format!("{here}.into_j"))?,
            theta_ij: matrix(&ov.theta_ij, rj, ri, n, &format!("{here}.theta_ij"))?,
            theta_ji: matrix(&ov.theta_ji, ri, rj, n, &format!("{here}.theta_ji"))?,
        });
    }
    let mut triples = Vec::with_capacity(doc.triples.len());
    for (t, tr) in doc.triples.iter().enumerate() {
        let here = format!("cover.triples[{t}]");
        triples.push(TripleOverlap {
            i: tr.i,
            j: tr.j,
            k: tr.k,
            into_ij: affine(&tr.into_ij, n, &format!("{here}.into_ij"))?,
            into_jk: affine(&tr.into_jk, n, &format!("{here}.into_jk"))?,
            into_ik: affine(&tr.into_ik, n, &format!("{here}.into_ik"))?,
        });
    }
    Ok(CoverDatum { charts, overlaps, triples })
}

/// Parses and validates a document. Errors name the offending field.
pub fn load_str(text: &str) -> Result<Loaded, CliError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    load_document(&doc)
}

pub fn load_document(doc: &Document) -> Result<Loaded, CliError> {
    if doc.schema != SCHEMA {
        return Err(field("schema", format!("expected {SCHEMA:?}, found {:?}", doc.schema)));
    }
    let mut out = Loaded { description: doc.description.clone(), cap: doc.cap, ..Loaded::default() };
    if let Some(a) = &doc.algebroid {
        out.algebroid = Some(algebroid(a, "algebroid")?);
    }
    if let Some(m) = &doc.morphism {
        let source = algebroid(&m.source, "morphism.source")?;
        let target = algebroid(&m.target, "morphism.target")?;
        let n = source.dim();
        if m.base_map.len() != target.dim() {
            return Err(field("morphism.base_map", format!("needs {} components", target.dim())));
        }
        let base = polys(&m.base_map, n, "morphism.base_map")?;
        let mat = matrix(&m.matrix, source.rank(), target.rank(), n, "morphism.matrix")?;
        out.morphism = Some(MorphismData::new(source, target, base, mat).map_err(|e| field("morphism", e))?);
    }
    if let Some(s) = &doc.submersion {
        let total = s.forward.len();
        let forward = polys(&s.forward, total, "submersion.forward")?;
        let inverse = polys(&s.inverse, total, "submersion.inverse")?;
        out.submersion = Some(SplitSubmersion::new(s.target_dim, forward, inverse).map_err(|e| field("submersion", e))?);
    }
    if let Some(d) = &doc.descent {
        let f = out.submersion.as_ref().ok_or_else(|| field("submersion", "a descent datum needs a submersion"))?;
        out.descent_psi = Some(square(&d.psi, f.target_dim() + 2 * f.fiber_dim(), "descent.psi")?);
    }
    if let Some(s) = &doc.section {
        let f = out.submersion.as_ref().ok_or_else(|| field("submersion", "a section needs a submersion"))?;
        out.section = Some(polys(s, f.target_dim(), "section")?);
    }
    if let Some(c) = &doc.cover {
        out.cover = Some(cover(c)?);
    }
    if let Some(g) = &doc.groupoid {
        out.groupoid = Some(groupoid(g)?);
    }
    if let Some(list) = &doc.psi {
        let g = out.groupoid.as_ref().ok_or_else(|| field("groupoid", "arrow matrices need a groupoid"))?;
        out.psi = Some(list.iter().enumerate().map(|(i, m)| square(m, g.dim(), &format!("psi[{i}]"))).collect::<Result<_, _>>()?);
    }
    if let Some(b) = &doc.bivector {
        out.bivector = Some(multivector(b, "bivector")?);
    }
    if let Some(w) = &doc.omega {
        out.omega = Some(square(w, w.len(), "omega")?);
    }
    if let Some(w) = &doc.omega_inv {
        out.omega_inv = Some(square(w, w.len(), "omega_inv")?);
    }
    Ok(out)
}

pub fn poly_doc(p: &Poly) -> PolyDoc {
    p.terms().map(|(e, c)| TermDoc { coeff: c.to_string(), exponents: e.clone() }).collect()
}

fn polys_doc(ps: &[Poly]) -> Vec<PolyDoc> {
    ps.iter().map(poly_doc).collect()
}

pub fn matrix_doc(m: &PolyMatrix) -> MatrixDoc {
    (0..m.rows()).map(|i| polys_doc(m.row(i))).collect()
}

pub fn algebroid_doc(a: &AlgebroidPresentation) -> AlgebroidDoc {
    let r = a.rank();
    let mut brackets = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            let value = a.bracket_of(i, j);
            if value.iter().any(|p| !p.is_zero()) {
                brackets.push(BracketDoc { i, j, value: polys_doc(&value) });
            }
        }
    }
    AlgebroidDoc { dim: a.dim(), rank: r, anchor: matrix_doc(a.anchor()), brackets }
}

fn affine_doc(m: &AffineMap) -> AffineDoc {
    let n = m.dim();
    AffineDoc {
        matrix: (0..n).map(|i| m.matrix.row(i).iter().map(ToString::to_string).collect()).collect(),
        offset: m.offset.iter().map(ToString::to_string).collect(),
    }
}

pub fn groupoid_doc(g: &DeskGroupoid) -> GroupoidDoc {
    let order = g.order();
    let (action, action_inverse) = if g.dim() == 0 {
        (vec![], vec![])
    } else {
        ((0..order).map(|h| affine_doc(g.action(h))).collect(), (0..order).map(|h| affine_doc(g.action_inverse(h))).collect())
    };
    GroupoidDoc { table: g.group().table().to_vec(), dim: g.dim(), action, action_inverse }
}

pub fn multivector_doc(p: &PolyVectorField) -> MultivectorDoc {
    MultivectorDoc {
        nvars: p.nvars(),
        degree: p.degree(),
        components: p.components().map(|(idx, v)| ComponentDoc { index: idx.clone(), value: poly_doc(v) }).collect(),
    }
}

fn cover_doc(c: &CoverDatum) -> CoverDoc {
    CoverDoc {
        charts: c.charts.iter().map(algebroid_doc).collect(),
        overlaps: c
            .overlaps
            .iter()
            .map(|o| OverlapDoc {
                i: o.i,
                j: o.j,
                into_i: affine_doc(&o.into_i),
                into_j: affine_doc(&o.into_j),
                theta_ij: matrix_doc(&o.theta_ij),
                theta_ji: matrix_doc(&o.theta_ji),
            })
            .collect(),
        triples: c
            .triples
            .iter()
            .map(|t| TripleDoc {
                i: t.i,
                j: t.j,
                k: t.k,
                into_ij: affine_doc(&t.into_ij),
                into_jk: affine_doc(&t.into_jk),
                into_ik: affine_doc(&t.into_ik),
            })
            .collect(),
    }
}

/// Writes a loaded document back out; loading the result gives `l` again.
pub fn to_document(l: &Loaded) -> Document {
    Document {
        schema: SCHEMA.to_string(),
        description: l.description.clone(),
        algebroid: l.algebroid.as_ref().map(algebroid_doc),
        morphism: l.morphism.as_ref().map(|m| MorphismDoc {
            source: algebroid_doc(&m.source),
            target: algebroid_doc(&m.target),
            base_map: polys_doc(&m.base_map),
            matrix: matrix_doc(&m.matrix),
        }),
        submersion: l.submersion.as_ref().map(|f| SubmersionDoc {
            target_dim: f.target_dim(),
            forward: polys_doc(f.forward()),
            inverse: polys_doc(f.inverse()),
        }),
        descent: l.descent_psi.as_ref().map(|p| DescentDoc { psi: matrix_doc(p) }),
        section: l.section.as_deref().map(polys_doc),
        cover: l.cover.as_ref().map(cover_doc),
        groupoid: l.groupoid.as_ref().map(groupoid_doc),
        psi: l.psi.as_ref().map(|ps| ps.iter().map(matrix_doc).collect()),
        bivector: l.bivector.as_ref().map(multivector_doc),
        omega: l.omega.as_ref().map(matrix_doc),
        omega_inv: l.omega_inv.as_ref().map(matrix_doc),
        cap: l.cap,
    }
}

pub fn to_json(l: &Loaded) -> String {
    let mut s = serde_json::to_string_pretty(&to_document(l)).expect("documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SL2: &str = r#"{
        "schema": "algebroidkit/1",
        "algebroid": {"dim": 0, "rank": 3, "anchor": [[], [], []],
            "brackets": [
                {"i": 0, "j": 1, "value": [[], [], [{"coeff": "1", "exponents": []}]]},
                {"i": 1, "j": 2, "value": [[{"coeff": "1", "exponents": []}], [], []]},
                {"i": 2, "j": 0, "value": [[], [{"coeff": "1", "exponents": []}], []]}
            ]}
    }"#;

    #[test]
    fn loads_and_round_trips() {
        let l = load_str(SL2).unwrap();
        assert_eq!(l.algebroid.as_ref().unwrap().rank(), 3);
        let again = load_str(&to_json(&l)).unwrap();
        assert_eq!(again, l);
    }

    #[test]
    fn errors_name_the_field() {
        let missing = SL2.replace(r#""anchor": [[], [], []],"#, "");
        let e = load_str(&missing).unwrap_err().to_string();
        assert!(e.contains("anchor"), "{e}");

        let diag = r#"{"schema": "algebroidkit/1", "algebroid": {"dim": 0, "rank": 1, "anchor": [[]],
            "brackets": [{"i": 0, "j": 0, "value": [[{"coeff": "1", "exponents": []}]]}]}}"#;
        let e = load_str(diag).unwrap_err().to_string();
        assert!(e.contains("antisymmetric"), "{e}");

        let wrong = SL2.replace("algebroidkit/1", "algebroidkit/0");
        assert!(load_str(&wrong).unwrap_err().to_string().contains("schema"));

        let bad_coeff = SL2.replacen(r#""coeff": "1""#, r#""coeff": "1/0""#, 1);
        let e = load_str(&bad_coeff).unwrap_err().to_string();
        assert!(e.contains("algebroid.brackets[0].value[2][0].coeff"), "{e}");
    }
}
