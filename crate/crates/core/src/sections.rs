//! Linear-space data at pairs of lines and at higher triple lines, and the
//! cubic surface sections they cut out.

use std::fmt;

use crate::cubic::{CubicForm, LineOnCubic};
use crate::error::{Error, Result};
use crate::field::{dot, Field, FieldElement};
use crate::grassmann::LineChart;
use crate::matrix::ExactMatrix;
use crate::normal_form::{extract_s, second_type_normal_form, NormalFormData, PencilMatrixS};
use crate::poly::{Monomial, MultiPoly};
use crate::projective::projective_points;
use crate::triple::is_higher_triple;

/// The 3-planes through span(L1, L2) inside T_xX.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeIIIFiber {
    pub dimension: usize,
    /// Row basis of span(L1, L2).
    pub plane: ExactMatrix,
    /// Rows completing `plane` to a basis of T_xX; P^3 = plane + one
    /// direction in their span.
    pub directions: ExactMatrix,
}

fn rows_rank(field: Field, rows: &[Vec<FieldElement>]) -> Result<usize> {
    Ok(ExactMatrix::from_rows(field, rows.to_vec())?.rank())
}

pub fn type_iii_fiber(x: &CubicForm, l1: &LineOnCubic, l2: &LineOnCubic, pt: &[FieldElement]) -> Result<TypeIIIFiber> {
    let field = x.field();
    if x.n() < 4 {
        return Err(Error::DimensionTooSmall { n: x.n(), min: 4 });
    }
    if l1.line == l2.line {
        return Err(Error::LinesEqual);
    }
    if !crate::grassmann::lines_meet(&l1.line, &l2.line) {
        return Err(Error::LinesDisjoint);
    }
    if !l1.line.contains_point(pt) || !l2.line.contains_point(pt) {
        return Err(Error::PointNotOnLine);
    }
    let grad = x.gradient(pt);
    if grad.iter().all(FieldElement::is_zero) {
        return Err(Error::SingularPoint);
    }
    let mut plane: Vec<Vec<FieldElement>> = vec![l1.line.row(0).to_vec(), l1.line.row(1).to_vec()];
    for r in [l2.line.row(0), l2.line.row(1)] {
        let mut trial = plane.clone();
        trial.push(r.to_vec());
        if rows_rank(field, &trial)? > plane.len() {
            plane = trial;
        }
    }
    debug_assert!(plane.iter().all(|r| dot(&grad, r).is_zero()));
    let tangent = ExactMatrix::from_rows(field, vec![grad])?.kernel();
    let mut all = plane.clone();
    let mut directions = Vec::new();
    for v in tangent {
        let mut trial = all.clone();
        trial.push(v.clone());
        if rows_rank(field, &trial)? > all.len() {
            all = trial;
            directions.push(v);
        }
    }
    Ok(TypeIIIFiber {
        dimension: directions.len() - 1,
        plane: ExactMatrix::from_rows(field, plane)?,
        directions: ExactMatrix::from_rows(field, directions)?,
    })
}

/// A point p on a higher triple line L with a 3-plane P3 such that
/// span(L, p_v) ⊆ P3 ⊆ T_pX for a common kernel direction v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeIVDatum {
    pub p: Vec<FieldElement>,
    pub line: LineOnCubic,
    /// The point p_v; span(L, p_v) is the plane of the datum.
    pub v_point: Vec<FieldElement>,
    /// 4×(n+1) row basis.
    pub p3: ExactMatrix,
}

impl TypeIVDatum {
    pub fn new(x: &CubicForm, line: LineOnCubic, p: Vec<FieldElement>, v_point: Vec<FieldElement>, p3: ExactMatrix) -> Result<TypeIVDatum> {
        let field = x.field();
        if p3.rows() != 4 || p3.cols() != x.n() + 1 || p3.rank() != 4 {
            return Err(Error::BadSubspace("P3 needs four independent rows".into()));
        }
        if !line.line.contains_point(&p) {
            return Err(Error::PointNotOnLine);
        }
        let plane = vec![line.line.row(0).to_vec(), line.line.row(1).to_vec(), v_point.clone()];
        if rows_rank(field, &plane)? != 3 {
            return Err(Error::BadSubspace("p_v lies on L".into()));
        }
        let mut chain = p3.to_rows();
        chain.extend(plane);
        if rows_rank(field, &chain)? != 4 {
            return Err(Error::BadSubspace("span(L, p_v) is not inside P3".into()));
        }
        let grad = x.gradient(&p);
        if grad.iter().all(FieldElement::is_zero) {
            return Err(Error::SingularPoint);
        }
        if (0..4).any(|i| !dot(&grad, p3.row(i)).is_zero()) {
            return Err(Error::BadSubspace("P3 is not inside T_pX".into()));
        }
        Ok(TypeIVDatum { p, line, v_point, p3 })
    }
}

/// Restriction of X to a 3-plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionCubic {
    Surface(CubicForm),
    ContainedInX,
}

pub fn section_cubic(x: &CubicForm, p3: &ExactMatrix) -> Result<SectionCubic> {
    if p3.rows() != 4 || p3.cols() != x.n() + 1 {
        return Err(Error::BadSubspace(format!("expected a 4×{} row basis", x.n() + 1)));
    }
    if p3.rank() != 4 {
        return Err(Error::BadSubspace("rows are dependent".into()));
    }
    let g = x.form().linear_substitute_unchecked(&p3.transpose());
    if g.is_zero() {
        return Ok(SectionCubic::ContainedInX);
    }
    Ok(SectionCubic::Surface(CubicForm::new(g)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SectionTag {
    ConeOverCuspidalCubic,
    PlanePlusTangentQuadricCone,
    /// l ≡ 0: a cone with vertex L over a binary cubic, i.e. planes
    /// through L over the algebraic closure.
    PlanesThroughLine,
    ContainedInX,
    Other,
}

impl fmt::Display for SectionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SectionTag::ConeOverCuspidalCubic => "cone-over-cuspidal-cubic",
            SectionTag::PlanePlusTangentQuadricCone => "plane-plus-tangent-quadric-cone",
            SectionTag::PlanesThroughLine => "planes-through-line",
            SectionTag::ContainedInX => "contained-in-x",
            SectionTag::Other => "other",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionClass {
    pub tag: SectionTag,
    /// l(x0,x1)·x2^2 + c(x2,x3) in adapted coordinates.
    pub witness: Option<MultiPoly>,
}

/// Classify a cubic surface singular along a line: bring it to
/// l(x0,x1)·x2^2 + c(x2,x3) and test whether x2 divides c.
pub fn classify_section(c: &CubicForm, line: &LineChart) -> Result<SectionClass> {
    if c.n() != 3 || line.n() != 3 {
        return Err(Error::ShapeMismatch("expected a cubic surface and a line in P^3".into()));
    }
    let field = c.field();
    for pt in [line.row(0), line.row(1)] {
        if !c.evaluate(pt).is_zero() {
            return Err(Error::NotSingularAlongLine);
        }
    }
    let frame = line.frame();
    let g = c.transform(&frame)?;
    // singular along y2 = y3 = 0: no monomial of degree ≥ 2 in y0, y1
    if g.form().terms().any(|(m, _)| m.exponents()[0] + m.exponents()[1] >= 2) {
        return Err(Error::NotSingularAlongLine);
    }
    // quadratic part Σ y_i y_j M_ij(y0, y1), i, j ∈ {2, 3}
    let quad = |p: usize, i: usize, j: usize| {
        let mut e = vec![0u16; 4];
        e[p] += 1;
        e[i] += 1;
        e[j] += 1;
        let v = g.coefficient(&e);
        if i == j {
            v
        } else {
            v.div(&field.from_i64(2)).expect("char ≠ 2")
        }
    };
    let m = |p: usize| ExactMatrix::from_fn(field, 2, 2, |i, j| quad(p, i + 2, j + 2));
    let (m0, m1) = (m(0), m(1));
    if m0.is_zero() && m1.is_zero() {
        return Ok(SectionClass {
            tag: SectionTag::PlanesThroughLine,
            witness: Some(g.form().clone()),
        });
    }
    let common = m0.stack(&m1)?.kernel();
    if common.len() != 1 {
        return Ok(SectionClass {
            tag: SectionTag::Other,
            witness: None,
        });
    }
    let kappa = &common[0];
    let e = if kappa[0].is_zero() {
        vec![field.one(), field.zero()]
    } else {
        vec![field.zero(), field.one()]
    };
    // y2, y3 = z·e + w·κ
    let change = ExactMatrix::from_fn(field, 4, 4, |i, j| match (i, j) {
        (0, 0) | (1, 1) => field.one(),
        (i, 2) if i >= 2 => e[i - 2].clone(),
        (i, 3) if i >= 2 => kappa[i - 2].clone(),
        _ => field.zero(),
    });
    let w = g.transform(&change)?;
    let w3 = w.coefficient(&[0, 0, 0, 3]);
    let tag = if w3.is_zero() {
        SectionTag::PlanePlusTangentQuadricCone
    } else {
        SectionTag::ConeOverCuspidalCubic
    };
    Ok(SectionClass {
        tag,
        witness: Some(w.form().clone()),
    })
}

/// Coordinates of each row of `sub` in the row basis `basis`.
fn coordinates_in(basis: &ExactMatrix, sub: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
    let (_, cols) = basis.rref();
    let rows: Vec<usize> = (0..basis.rows()).collect();
    let inv_t = basis.submatrix(&rows, &cols).inverse()?.transpose();
    let mut out = Vec::new();
    for v in sub {
        let vs: Vec<FieldElement> = cols.iter().map(|&c| v[c].clone()).collect();
        let c = inv_t.mul_vec(&vs);
        if basis.transpose().mul_vec(&c) != *v {
            return Err(Error::BadSubspace("vector is not in the span".into()));
        }
        out.push(c);
    }
    Ok(out)
}

pub fn datum_to_section(x: &CubicForm, d: &TypeIVDatum) -> Result<SectionClass> {
    match section_cubic(x, &d.p3)? {
        SectionCubic::ContainedInX => Ok(SectionClass {
            tag: SectionTag::ContainedInX,
            witness: None,
        }),
        SectionCubic::Surface(c) => {
            let coords = coordinates_in(&d.p3, &[d.line.line.row(0).to_vec(), d.line.line.row(1).to_vec()])?;
            let l = LineChart::from_rows(x.field(), &coords[0], &coords[1])?;
            classify_section(&c, &l)
        }
    }
}

fn quadratic_value(s: &PencilMatrixS, r: &[FieldElement]) -> (FieldElement, FieldElement) {
    (dot(r, &s.a0.mul_vec(r)), dot(r, &s.a1.mul_vec(r)))
}

/// A direction r in x4..xn, independent of v, with rᵀ·S·r ≢ 0 when one
/// exists over the field.
fn section_direction(s: &PencilMatrixS, v: &[FieldElement]) -> Result<Option<Vec<FieldElement>>> {
    let field = s.field();
    let k = s.size();
    let candidates: Vec<Vec<FieldElement>> = if field.is_finite() {
        projective_points(field, k - 1)?
    } else {
        let mut c = Vec::new();
        for i in 0..k {
            for j in i..k {
                let mut r = vec![field.zero(); k];
                r[i] = field.one();
                if j != i {
                    r[j] = field.one();
                }
                c.push(r);
            }
        }
        c
    };
    let mut fallback = None;
    for r in candidates {
        if ExactMatrix::from_rows(field, vec![v.to_vec(), r.clone()])?.rank() < 2 {
            continue;
        }
        let (q0, q1) = quadratic_value(s, &r);
        if !q0.is_zero() || !q1.is_zero() {
            return Ok(Some(r));
        }
        fallback.get_or_insert(r);
    }
    Ok(fallback)
}

/// Type (IV) data at p = first basis point of L, one per common kernel
/// basis vector, with P3 = span(L, p_v, r) inside {x2 = x3 = 0} in
/// normal-form coordinates. Empty when L is not higher triple.
pub fn type_iv_data(x: &CubicForm, l: &LineOnCubic) -> Result<(NormalFormData, Vec<TypeIVDatum>)> {
    let nf = second_type_normal_form(x, l)?;
    let s = extract_s(&nf)?;
    let (_, kernel) = is_higher_triple(&s);
    let field = nf.field();
    let n = nf.n();
    let xf = x.embed(field)?;
    let line = LineOnCubic::new(&xf, nf.line())?;
    let lift = |w: &[FieldElement]| {
        let mut y = vec![field.zero(); n + 1];
        y[4..].clone_from_slice(w);
        nf.change.mul_vec(&y)
    };
    let mut out = Vec::new();
    for v in &kernel {
        let Some(r) = section_direction(&s, v)? else {
            continue;
        };
        let p = nf.change.col(0);
        let v_point = lift(v);
        let p3 = ExactMatrix::from_rows(field, vec![nf.change.col(0), nf.change.col(1), v_point.clone(), lift(&r)])?;
        out.push(TypeIVDatum::new(&xf, line.clone(), p, v_point, p3)?);
    }
    Ok((nf, out))
}

/// A cubic surface from (exponents, coefficient) pairs.
pub fn surface_from_terms(field: Field, terms: &[(&[u16], i64)]) -> Result<CubicForm> {
    let mut f = MultiPoly::zero(field, 4);
    for (e, c) in terms {
        f.add_term(Monomial(e.to_vec()), field.from_i64(*c));
    }
    CubicForm::new(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::fano_points;

    fn gf7() -> Field {
        Field::prime(7).unwrap()
    }

    fn axis(f: Field) -> LineChart {
        LineChart::coordinate(f, 3, 0, 1).unwrap()
    }

    #[test]
    fn cusp_and_plane_branches() {
        let f = gf7();
        let cusp = surface_from_terms(f, &[(&[1, 0, 2, 0], 1), (&[0, 0, 0, 3], 1)]).unwrap();
        assert_eq!(classify_section(&cusp, &axis(f)).unwrap().tag, SectionTag::ConeOverCuspidalCubic);
        let plane = surface_from_terms(f, &[(&[1, 0, 2, 0], 1), (&[0, 0, 1, 2], 1)]).unwrap();
        assert_eq!(classify_section(&plane, &axis(f)).unwrap().tag, SectionTag::PlanePlusTangentQuadricCone);
        let smooth = CubicForm::fermat(f, 3);
        let line = fano_points(&smooth, f).unwrap().remove(0).line;
        assert_eq!(classify_section(&smooth, &line), Err(Error::NotSingularAlongLine));
    }

    #[test]
    fn fermat_section() {
        let f = gf7();
        let x = CubicForm::fermat(f, 5);
        let p3 = ExactMatrix::from_fn(f, 4, 6, |i, j| if i == j { f.one() } else { f.zero() });
        match section_cubic(&x, &p3).unwrap() {
            SectionCubic::Surface(c) => assert_eq!(c, CubicForm::fermat(f, 3)),
            SectionCubic::ContainedInX => panic!("not contained"),
        }
    }

    #[test]
    fn type_iii_dimensions() {
        let f = gf7();
        for n in 4..=5 {
            let x = CubicForm::fermat(f, n);
            let lines = fano_points(&x, f).unwrap();
            let a = &lines[0];
            let b = lines.iter().skip(1).find(|b| crate::grassmann::lines_meet(&a.line, &b.line)).unwrap();
            let pt = crate::grassmann::intersection_point(&a.line, &b.line).unwrap();
            assert_eq!(type_iii_fiber(&x, a, b, &pt).unwrap().dimension, n - 4);
        }
    }
}
