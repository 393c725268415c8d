//! Eckardt points, the residual cone cubic and its Hessian.

use crate::cubic::{classify_line_type, CubicForm, LineOnCubic, LineType};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::grassmann::LineChart;
use crate::matrix::ExactMatrix;
use crate::normal_form::{extract_s, second_type_normal_form};
use crate::poly::{symbolic_det, Monomial, MultiPoly};
use crate::projective::projective_points;
use crate::triple::is_higher_triple;

/// An Eckardt point with its cone data. In the coordinates x = change·y the
/// point is e0, the tangent hyperplane is y1 = 0 and X ∩ T_pX is the cone
/// over `residual`, a cubic in y2..yn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EckardtReport {
    pub point: Vec<FieldElement>,
    pub tangent_hyperplane: MultiPoly,
    pub change: ExactMatrix,
    pub residual: CubicForm,
    pub hessian: MultiPoly,
}

fn hessian_matrix_at(x: &CubicForm, p: &[FieldElement]) -> ExactMatrix {
    let n = x.n();
    ExactMatrix::from_fn(x.field(), n + 1, n + 1, |i, j| x.partial(i).derivative(j).evaluate(p))
}

fn smooth_point_gradient(x: &CubicForm, p: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if p.len() != x.n() + 1 {
        return Err(Error::ShapeMismatch(format!("point needs {} coordinates", x.n() + 1)));
    }
    if p.iter().all(FieldElement::is_zero) {
        return Err(Error::ZeroVector);
    }
    if !x.evaluate(p).is_zero() {
        return Err(Error::PointNotOnCubic);
    }
    let g = x.gradient(p);
    if g.iter().all(FieldElement::is_zero) {
        return Err(Error::SingularPoint);
    }
    Ok(g)
}

/// Quadratic part of X on T_pX at p: Wᵀ·H(p)·W for a basis W of T_pX.
fn tangent_quadric(x: &CubicForm, p: &[FieldElement], grad: &[FieldElement]) -> Result<ExactMatrix> {
    let field = x.field();
    let g = ExactMatrix::from_rows(field, vec![grad.to_vec()])?;
    let w = ExactMatrix::from_rows(field, g.kernel())?.transpose();
    w.transpose().mul(&hessian_matrix_at(x, p))?.mul(&w)
}

pub fn is_eckardt(x: &CubicForm, p: &[FieldElement]) -> Result<bool> {
    let grad = smooth_point_gradient(x, p)?;
    Ok(tangent_quadric(x, p, &grad)?.is_zero())
}

/// Coordinates with p = e0 and T_pX = {y1 = 0}.
fn eckardt_frame(p: &[FieldElement], grad: &[FieldElement]) -> Result<ExactMatrix> {
    let field = p[0].field();
    let k = grad.iter().position(|g| !g.is_zero()).ok_or(Error::SingularPoint)?;
    let mut w = vec![field.zero(); p.len()];
    w[k] = field.one();
    let g = ExactMatrix::from_rows(field, vec![grad.to_vec()])?;
    let mut cols = vec![p.to_vec(), w];
    let mut rank = 2;
    for v in g.kernel() {
        let mut trial = cols.clone();
        trial.push(v);
        let r = ExactMatrix::from_rows(field, trial.clone())?.rank();
        if r > rank {
            cols = trial;
            rank = r;
        }
    }
    if rank != p.len() {
        return Err(Error::SingularChange);
    }
    Ok(ExactMatrix::from_rows(field, cols)?.transpose())
}

pub fn eckardt_report(x: &CubicForm, p: &[FieldElement]) -> Result<Option<EckardtReport>> {
    if !is_eckardt(x, p)? {
        return Ok(None);
    }
    let grad = x.gradient(p);
    let field = x.field();
    let n = x.n();
    let change = eckardt_frame(p, &grad)?;
    let moved = x.transform(&change)?;
    let mut residual = MultiPoly::zero(field, n - 1);
    for (m, c) in moved.form().terms() {
        let e = m.exponents();
        if e[0] == 0 && e[1] == 0 {
            residual.add_term(Monomial(e[2..].to_vec()), c.clone());
        }
    }
    let residual = CubicForm::new(residual)?;
    let hessian = hessian_of(&residual);
    Ok(Some(EckardtReport {
        point: p.to_vec(),
        tangent_hyperplane: MultiPoly::linear(field, &grad),
        change,
        residual,
        hessian,
    }))
}

/// All F_q-rational Eckardt points, in the order of [`projective_points`].
pub fn find_eckardt(x: &CubicForm, field: Field) -> Result<Vec<EckardtReport>> {
    field.require_finite()?;
    let xf = x.embed(field)?;
    let mut out = Vec::new();
    for p in projective_points(field, xf.n())? {
        if !xf.evaluate(&p).is_zero() || xf.gradient(&p).iter().all(FieldElement::is_zero) {
            continue;
        }
        if let Some(rep) = eckardt_report(&xf, &p)? {
            out.push(rep);
        }
    }
    Ok(out)
}

/// det of the matrix of second partials.
pub fn hessian_of(y: &CubicForm) -> MultiPoly {
    let k = y.n() + 1;
    let field = y.field();
    let m: Vec<Vec<MultiPoly>> = (0..k)
        .map(|i| (0..k).map(|j| y.partial(i).derivative(j)).collect())
        .collect();
    symbolic_det(field, k, &m)
}

/// One line of the cone through an Eckardt point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyLine {
    /// Point of Y ∩ Hess(Y) in the residual coordinates.
    pub base: Vec<FieldElement>,
    pub line: LineChart,
    pub in_x: bool,
    pub line_type: Option<LineType>,
    pub higher_triple: bool,
}

impl FamilyLine {
    pub fn passes(&self) -> bool {
        self.in_x && self.line_type == Some(LineType::Second) && self.higher_triple
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EckardtFamilyReport {
    pub point: Vec<FieldElement>,
    /// Field the witnesses were searched over; the quadratic extension when
    /// the base field had none.
    pub search_field: Field,
    pub lines: Vec<FamilyLine>,
}

impl EckardtFamilyReport {
    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|l| !l.passes()).count()
    }

    pub fn has_witnesses(&self) -> bool {
        !self.lines.is_empty()
    }
}

fn family_over(x: &CubicForm, rep: &EckardtReport, field: Field) -> Result<Vec<FamilyLine>> {
    let xf = x.embed(field)?;
    let y = rep.residual.embed(field)?;
    let hess = rep.hessian.embed(field)?;
    let change = rep.change.embed(field)?;
    let n = x.n();
    let p: Vec<FieldElement> = rep.point.iter().map(|c| field.embed(c)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for q in projective_points(field, y.n())? {
        if !y.evaluate(&q).is_zero() || !hess.evaluate(&q).is_zero() {
            continue;
        }
        let mut yy = vec![field.zero(); n + 1];
        yy[2..].clone_from_slice(&q);
        let far = change.mul_vec(&yy);
        let line = LineChart::from_rows(field, &p, &far)?;
        let Ok(on) = LineOnCubic::new(&xf, line.clone()) else {
            out.push(FamilyLine {
                base: q,
                line,
                in_x: false,
                line_type: None,
                higher_triple: false,
            });
            continue;
        };
        let line_type = classify_line_type(&xf, &on).ok().map(|r| r.line_type);
        let higher_triple = if line_type == Some(LineType::Second) {
            let nf = second_type_normal_form(&xf, &on)?;
            is_higher_triple(&extract_s(&nf)?).0
        } else {
            false
        };
        out.push(FamilyLine {
            base: q,
            line,
            in_x: true,
            line_type,
            higher_triple,
        });
    }
    Ok(out)
}

/// Lines through the Eckardt point over the F_q-points of Y ∩ Hess(Y).
pub fn eckardt_family(x: &CubicForm, rep: &EckardtReport, field: Field) -> Result<EckardtFamilyReport> {
    field.require_finite()?;
    if x.n() < 4 {
        return Err(Error::DimensionTooSmall { n: x.n(), min: 4 });
    }
    let lines = family_over(x, rep, field)?;
    if lines.is_empty() && field.extension_degree() == 1 {
        let ext = field.quadratic_extension()?;
        return Ok(EckardtFamilyReport {
            point: rep.point.clone(),
            search_field: ext,
            lines: family_over(x, rep, ext)?,
        });
    }
    Ok(EckardtFamilyReport {
        point: rep.point.clone(),
        search_field: field,
        lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf7() -> Field {
        Field::prime(7).unwrap()
    }

    fn pt(f: Field, v: &[i64]) -> Vec<FieldElement> {
        v.iter().map(|&c| f.from_i64(c)).collect()
    }

    #[test]
    fn fermat_surface_points() {
        let f = gf7();
        let x = CubicForm::fermat(f, 3);
        assert!(is_eckardt(&x, &pt(f, &[1, -1, 0, 0])).unwrap());
        // generic point of the line x0 = -x1, x2 = -x3
        assert!(!is_eckardt(&x, &pt(f, &[1, -1, 1, -1])).unwrap());
        assert_eq!(is_eckardt(&x, &pt(f, &[1, 0, 0, 0])), Err(Error::PointNotOnCubic));
        assert_eq!(find_eckardt(&x, f).unwrap().len(), 18);
    }

    #[test]
    fn fermat_threefold_count() {
        let f = gf7();
        assert_eq!(find_eckardt(&CubicForm::fermat(f, 4), f).unwrap().len(), 30);
    }

    #[test]
    fn hessian_of_fermat_curve() {
        let f = Field::prime(11).unwrap();
        let y = CubicForm::fermat(f, 2);
        let h = hessian_of(&y);
        assert_eq!(h, MultiPoly::from_terms(f, 3, [(vec![1, 1, 1], f.from_i64(216))]));
    }

    #[test]
    fn threefold_family_is_nine_flexes() {
        let f = gf7();
        let x = CubicForm::fermat(f, 4);
        let rep = eckardt_report(&x, &pt(f, &[1, -1, 0, 0, 0])).unwrap().unwrap();
        let fam = eckardt_family(&x, &rep, f).unwrap();
        assert_eq!(fam.lines.len(), 9);
        assert_eq!(fam.failures(), 0);
    }
}
