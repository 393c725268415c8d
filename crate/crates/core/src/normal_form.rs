//! Normal form of a cubic along a line of the second type:
//!
//! F = x2·x0^2 + x3·x1^2 + Σ_{2≤i,j≤n} x_i x_j L_ij(x0, x1) + C(x2, …, xn).

use std::collections::BTreeMap;

use crate::cubic::{classify_line_type, q_matrix_of, CubicForm, LineOnCubic, LineType};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::ExactMatrix;
use crate::poly::{Monomial, MultiPoly};

/// Coefficients (a, b, c) of a·x0^2 + b·x0·x1 + c·x1^2.
fn binary_quadric_coeffs(q: &MultiPoly) -> Result<[FieldElement; 3]> {
    if q.num_vars() != 2 || q.terms().any(|(m, _)| m.degree() != 2) {
        return Err(Error::InvalidArgument("expected a binary quadric".into()));
    }
    Ok([q.coefficient(&[2, 0]), q.coefficient(&[1, 1]), q.coefficient(&[0, 2])])
}

/// A binary quadric from its coefficients.
pub fn binary_quadric(field: Field, a: &FieldElement, b: &FieldElement, c: &FieldElement) -> MultiPoly {
    MultiPoly::from_terms(field, 2, [(vec![2, 0], a.clone()), (vec![1, 1], b.clone()), (vec![0, 2], c.clone())])
}

/// Result of diagonalizing a pencil of binary quadrics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilDiagonalization {
    /// x = change · y.
    pub change: ExactMatrix,
    /// q2(change·y) = r[0][0]·y0^2 + r[0][1]·y1^2 and likewise for q3 in r[1].
    pub r: ExactMatrix,
}

/// Find coordinates in which the pencil ⟨q2, q3⟩ is spanned by y0^2, y1^2.
///
/// The square members of s·q2 + t·q3 are the roots of the discriminant
/// form D(s, t); distinct roots give the two squares y0^2, y1^2.
pub fn diagonalize_pencil(q2: &MultiPoly, q3: &MultiPoly) -> Result<PencilDiagonalization> {
    let field = q2.field();
    let [a2, b2, c2] = binary_quadric_coeffs(q2)?;
    let [a3, b3, c3] = binary_quadric_coeffs(q3)?;
    let span = ExactMatrix::from_rows(field, vec![vec![a2.clone(), b2.clone(), c2.clone()], vec![a3.clone(), b3.clone(), c3.clone()]])?;
    if span.rank() < 2 {
        return Err(Error::NormalFormObstruction("pencil is not two-dimensional".into()));
    }
    let two = field.from_i64(2);
    let four = field.from_i64(4);
    // D(s,t) = (s b2 + t b3)^2 − 4 (s a2 + t a3)(s c2 + t c3) = A s^2 + B s t + C t^2
    let da = &(&b2 * &b2) - &(&four * &(&a2 * &c2));
    let db = &(&two * &(&b2 * &b3)) - &(&four * &(&(&a2 * &c3) + &(&a3 * &c2)));
    let dc = &(&b3 * &b3) - &(&four * &(&a3 * &c3));
    let mut roots: Vec<[FieldElement; 2]> = Vec::new();
    if da.is_zero() {
        roots.push([field.one(), field.zero()]);
        if db.is_zero() {
            return Err(Error::BasePointPencil);
        }
        // remaining root of B s + C t = 0
        let t = field.one();
        let s = (-&dc).div(&db)?;
        roots.push([s, t]);
    } else {
        let disc = &(&db * &db) - &(&four * &(&da * &dc));
        if disc.is_zero() {
            return Err(Error::BasePointPencil);
        }
        let Some(sq) = disc.sqrt() else {
            return Err(Error::PencilNotSplit {
                discriminant: disc.to_string(),
                field: field.to_string(),
            });
        };
        let den = &two * &da;
        for r in [&(-&db) + &sq, &(-&db) - &sq] {
            roots.push([r.div(&den)?, field.one()]);
        }
    }
    // normalize to (1:t) or (0:1) and order by P^1 enumeration
    let mut roots: Vec<[FieldElement; 2]> = roots
        .into_iter()
        .map(|[s, t]| {
            if s.is_zero() {
                [field.zero(), field.one()]
            } else {
                let inv = s.inverse().expect("nonzero");
                [field.one(), &t * &inv]
            }
        })
        .collect();
    roots.sort_by_key(|[s, t]| (s.is_zero(), t.clone()));

    // each root member is κ·ℓ^2; collect ℓ
    let mut ell = Vec::new();
    for [s, t] in &roots {
        let a = &(s * &a2) + &(t * &a3);
        let b = &(s * &b2) + &(t * &b3);
        let c = &(s * &c2) + &(t * &c3);
        if !a.is_zero() {
            ell.push(vec![field.one(), b.div(&(&two * &a))?]);
        } else {
            debug_assert!(b.is_zero() && !c.is_zero());
            ell.push(vec![field.zero(), field.one()]);
        }
    }
    let p = ExactMatrix::from_rows(field, ell)?;
    let change = p.inverse().map_err(|_| Error::BasePointPencil)?;
    let mut r = ExactMatrix::zeros(field, 2, 2);
    for (row, q) in [q2, q3].into_iter().enumerate() {
        let img = q.linear_substitute(&change)?;
        if !img.coefficient(&[1, 1]).is_zero() {
            return Err(Error::NormalFormObstruction("pencil failed to diagonalize".into()));
        }
        r.set(row, 0, img.coefficient(&[2, 0]));
        r.set(row, 1, img.coefficient(&[0, 2]));
    }
    Ok(PencilDiagonalization { change, r })
}

/// The symmetric pair (A0, A1) with S = A0·x0 + A1·x1, indexed by x4..xn.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PencilMatrixS {
    pub a0: ExactMatrix,
    pub a1: ExactMatrix,
}

impl PencilMatrixS {
    pub fn new(a0: ExactMatrix, a1: ExactMatrix) -> Result<PencilMatrixS> {
        if !a0.is_square() || (a0.rows(), a0.cols()) != (a1.rows(), a1.cols()) || a0.rows() == 0 {
            return Err(Error::ShapeMismatch("A0 and A1 must be square of equal size".into()));
        }
        if !a0.is_symmetric() || !a1.is_symmetric() {
            return Err(Error::InvalidArgument("A0 and A1 must be symmetric".into()));
        }
        if a0.field() != a1.field() {
            return Err(Error::FieldMismatch {
                expected: a0.field().to_string(),
                found: a1.field().to_string(),
            });
        }
        Ok(PencilMatrixS { a0, a1 })
    }

    /// Ambient dimension n (the matrices are (n−3)×(n−3)).
    pub fn n(&self) -> usize {
        self.a0.rows() + 3
    }

    pub fn size(&self) -> usize {
        self.a0.rows()
    }

    pub fn field(&self) -> Field {
        self.a0.field()
    }

    /// The pencil member A0·s + A1·t.
    pub fn member(&self, s: &FieldElement, t: &FieldElement) -> ExactMatrix {
        self.a0.scale(s).add(&self.a1.scale(t))
    }

    /// The pair with x0 ↔ x1 exchanged.
    pub fn swapped(&self) -> PencilMatrixS {
        PencilMatrixS {
            a0: self.a1.clone(),
            a1: self.a0.clone(),
        }
    }
}

/// A cubic in second-type normal form together with the coordinate change
/// that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormData {
    /// transformed = original ∘ change.
    pub change: ExactMatrix,
    pub transformed: CubicForm,
    /// a0[i−2][j−2] = a⁰_ij and a1 likewise, for 2 ≤ i, j ≤ n.
    pub l0: ExactMatrix,
    pub l1: ExactMatrix,
    /// C(x2, …, xn), written in all n+1 variables.
    pub tail: MultiPoly,
}

impl NormalFormData {
    pub fn n(&self) -> usize {
        self.transformed.n()
    }

    pub fn field(&self) -> Field {
        self.transformed.field()
    }

    /// (a⁰_ij, a¹_ij) for 2 ≤ i, j ≤ n.
    pub fn l_form(&self, i: usize, j: usize) -> (FieldElement, FieldElement) {
        (self.l0.get(i - 2, j - 2).clone(), self.l1.get(i - 2, j - 2).clone())
    }

    pub fn l_forms(&self) -> BTreeMap<(usize, usize), (FieldElement, FieldElement)> {
        let n = self.n();
        let mut out = BTreeMap::new();
        for i in 2..=n {
            for j in i..=n {
                out.insert((i, j), self.l_form(i, j));
            }
        }
        out
    }

    /// The line y2 = … = yn = 0 in original coordinates.
    pub fn line(&self) -> crate::grassmann::LineChart {
        crate::grassmann::LineChart::from_rows(self.field(), &self.change.col(0), &self.change.col(1)).expect("invertible change")
    }
}

/// Assemble x2·x0^2 + x3·x1^2 + Σ x_i x_j (l0_ij x0 + l1_ij x1) + tail.
///
/// `l0`, `l1` are symmetric (n−1)×(n−1) and indexed from x2; `tail` is a
/// cubic in x2..xn written in n+1 variables.
pub fn normal_form_cubic(l0: &ExactMatrix, l1: &ExactMatrix, tail: &MultiPoly) -> Result<CubicForm> {
    let field = l0.field();
    let n = l0.rows() + 1;
    if tail.num_vars() != n + 1 || !tail.is_free_of(0) || !tail.is_free_of(1) {
        return Err(Error::InvalidArgument("tail must be a cubic in x2..xn".into()));
    }
    if !l0.is_symmetric() || !l1.is_symmetric() || l1.rows() != l0.rows() {
        return Err(Error::InvalidArgument("linear forms must be symmetric".into()));
    }
    let mut f = tail.clone();
    let mono = |e: &[(usize, u16)]| {
        let mut v = vec![0u16; n + 1];
        for &(i, k) in e {
            v[i] += k;
        }
        Monomial(v)
    };
    f.add_term(mono(&[(2, 1), (0, 2)]), field.one());
    f.add_term(mono(&[(3, 1), (1, 2)]), field.one());
    for i in 2..=n {
        for j in 2..=n {
            f.add_term(mono(&[(i, 1), (j, 1), (0, 1)]), l0.get(i - 2, j - 2).clone());
            f.add_term(mono(&[(i, 1), (j, 1), (1, 1)]), l1.get(i - 2, j - 2).clone());
        }
    }
    CubicForm::new(f)
}

/// Check the exact coefficient pattern of the normal form.
pub fn has_normal_form_shape(c: &CubicForm) -> bool {
    let n = c.n();
    let field = c.field();
    for (m, coeff) in c.form().terms() {
        let e = m.exponents();
        let line_deg = e[0] + e[1];
        match line_deg {
            3 => return false,
            2 => {
                let i = (2..=n).find(|&i| e[i] == 1).expect("degree three");
                let ok = (i == 2 && e[0] == 2) || (i == 3 && e[1] == 2);
                if !ok || !coeff.is_one() {
                    return false;
                }
            }
            _ => {}
        }
    }
    let mut e = vec![0u16; n + 1];
    e[2] = 1;
    e[0] = 2;
    let lead2 = c.coefficient(&e) == field.one();
    let mut e = vec![0u16; n + 1];
    e[3] = 1;
    e[1] = 2;
    lead2 && c.coefficient(&e) == field.one()
}

/// Read l0, l1 and the tail off a cubic already in normal form.
fn read_normal_form(c: &CubicForm) -> (ExactMatrix, ExactMatrix, MultiPoly) {
    let n = c.n();
    let field = c.field();
    let half = field.from_i64(2).inverse().expect("char ≠ 2");
    let mut l0 = ExactMatrix::zeros(field, n - 1, n - 1);
    let mut l1 = ExactMatrix::zeros(field, n - 1, n - 1);
    let mut tail = MultiPoly::zero(field, n + 1);
    for (m, coeff) in c.form().terms() {
        let e = m.exponents();
        match e[0] + e[1] {
            0 => tail.add_term(m.clone(), coeff.clone()),
            1 => {
                let idx: Vec<usize> = (2..=n).flat_map(|i| std::iter::repeat_n(i, e[i] as usize)).collect();
                let (i, j) = (idx[0], idx[1]);
                let target = if e[0] == 1 { &mut l0 } else { &mut l1 };
                let v = if i == j { coeff.clone() } else { coeff * &half };
                target.set(i - 2, j - 2, v.clone());
                target.set(j - 2, i - 2, v);
            }
            _ => {}
        }
    }
    (l0, l1, tail)
}

fn block_change(field: Field, n: usize, x01: &ExactMatrix, rest: &ExactMatrix, offset: usize) -> ExactMatrix {
    let mut m = ExactMatrix::identity(field, n + 1);
    for i in 0..2 {
        for j in 0..2 {
            m.set(i, j, x01.get(i, j).clone());
        }
    }
    for i in 0..rest.rows() {
        for j in 0..rest.cols() {
            m.set(offset + i, offset + j, rest.get(i, j).clone());
        }
    }
    m
}

fn normal_form_in_field(x: &CubicForm, l: &LineOnCubic) -> Result<NormalFormData> {
    let field = x.field();
    let n = x.n();
    let report = classify_line_type(x, l)?;
    if report.line_type != LineType::Second {
        return Err(Error::WrongType { expected: "second" });
    }
    // 1. line to the axis
    let m1 = report.frame.clone();
    let f1 = x.transform(&m1)?;
    // 2. split x2..xn into two pencil coordinates and the kernel
    let q = q_matrix_of(&f1);
    let qt = q.transpose();
    let (_, pivots) = qt.rref();
    let (i1, i2) = (pivots[0], pivots[1]);
    let mut cols = Vec::new();
    for &i in &[i1, i2] {
        let mut e = vec![field.zero(); n - 1];
        e[i] = field.one();
        cols.push(e);
    }
    cols.extend(qt.kernel());
    let nblk = ExactMatrix::from_rows(field, cols)?.transpose();
    let m2 = block_change(field, n, &ExactMatrix::identity(field, 2), &nblk, 2);
    // 3. diagonalize the pencil spanned by q_{i1}, q_{i2}
    let quad = |row: usize| binary_quadric(field, q.get(row, 0), q.get(row, 1), q.get(row, 2));
    let diag = diagonalize_pencil(&quad(i1), &quad(i2))?;
    // z0 q2 + z1 q3 = (R^T z)_0 y0^2 + (R^T z)_1 y1^2, so z = (R^T)^{-1} w
    let rt_inv = diag.r.transpose().inverse()?;
    let m3 = block_change(field, n, &diag.change, &rt_inv, 2);
    let partial = m1.mul(&m2)?.mul(&m3)?;
    let f3 = x.transform(&partial)?;
    if !has_normal_form_shape(&f3) {
        return Err(Error::NormalFormObstruction("coefficient pattern not reached".into()));
    }
    // 4. torus normalization diag(σ, τ, σ^-2, τ^-2, 1, …)
    let (l0, l1, _) = read_normal_form(&f3);
    let first_nonzero = |m: &ExactMatrix| -> Option<FieldElement> {
        let k = m.rows();
        (2..k).flat_map(|i| (i..k).map(move |j| (i, j))).map(|(i, j)| m.get(i, j).clone()).find(|v| !v.is_zero())
    };
    let sigma = first_nonzero(&l0).map(|v| v.inverse()).transpose()?.unwrap_or_else(|| field.one());
    let tau = first_nonzero(&l1).map(|v| v.inverse()).transpose()?.unwrap_or_else(|| field.one());
    let mut m4 = ExactMatrix::identity(field, n + 1);
    m4.set(0, 0, sigma.clone());
    m4.set(1, 1, tau.clone());
    m4.set(2, 2, (&sigma * &sigma).inverse()?);
    m4.set(3, 3, (&tau * &tau).inverse()?);
    let change = partial.mul(&m4)?;
    let transformed = x.transform(&change)?;
    if !has_normal_form_shape(&transformed) {
        return Err(Error::NormalFormObstruction("torus normalization broke the pattern".into()));
    }
    let (l0, l1, tail) = read_normal_form(&transformed);
    Ok(NormalFormData {
        change,
        transformed,
        l0,
        l1,
        tail,
    })
}

/// Bring (X, L) to the normal form. When the pencil only splits over
/// GF(p^2), the computation is repeated there and the result lives in GF(p^2).
pub fn second_type_normal_form(x: &CubicForm, l: &LineOnCubic) -> Result<NormalFormData> {
    match normal_form_in_field(x, l) {
        Err(Error::PencilNotSplit { .. }) if matches!(x.field(), Field::Prime { .. }) => {
            let big = x.field().quadratic_extension()?;
            let xb = x.embed(big)?;
            let lb = LineOnCubic::new(&xb, l.line.embed(big)?)?;
            normal_form_in_field(&xb, &lb)
        }
        other => other,
    }
}

/// The matrices A0, A1 (entries a^p_ij, 4 ≤ i, j ≤ n).
pub fn extract_s(nf: &NormalFormData) -> Result<PencilMatrixS> {
    let n = nf.n();
    if n < 4 {
        return Err(Error::DimensionTooSmall { n, min: 4 });
    }
    let idx: Vec<usize> = (2..n - 1).collect();
    PencilMatrixS::new(nf.l0.submatrix(&idx, &idx), nf.l1.submatrix(&idx, &idx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf7() -> Field {
        Field::prime(7).unwrap()
    }

    #[test]
    fn pencil_identity() {
        let f = gf7();
        let one = f.one();
        let z = f.zero();
        let d = diagonalize_pencil(&binary_quadric(f, &one, &z, &z), &binary_quadric(f, &z, &z, &one)).unwrap();
        assert_eq!(d.change, ExactMatrix::identity(f, 2));
    }

    #[test]
    fn pencil_examples() {
        let f = gf7();
        let one = f.one();
        let z = f.zero();
        let q2 = binary_quadric(f, &one, &z, &z);
        let q3 = binary_quadric(f, &z, &one, &one);
        let d = diagonalize_pencil(&q2, &q3).unwrap();
        for q in [&q2, &q3] {
            let img = q.linear_substitute(&d.change).unwrap();
            assert!(img.coefficient(&[1, 1]).is_zero());
        }
        let q3 = binary_quadric(f, &z, &one, &z);
        assert_eq!(diagonalize_pencil(&q2, &q3), Err(Error::BasePointPencil));
    }

    #[test]
    fn pencil_needs_extension() {
        // D(s,t) = t^2 − 12 s^2 and 12 ≡ 5 is not a square mod 7
        let f = gf7();
        let one = f.one();
        let z = f.zero();
        let q2 = binary_quadric(f, &one, &z, &f.from_i64(3));
        let q3 = binary_quadric(f, &z, &one, &z);
        match diagonalize_pencil(&q2, &q3) {
            Err(Error::PencilNotSplit { .. }) => {}
            other => panic!("{other:?}"),
        }
        let big = f.quadratic_extension().unwrap();
        let d = diagonalize_pencil(&q2.embed(big).unwrap(), &q3.embed(big).unwrap()).unwrap();
        assert_eq!(d.change.field(), big);
    }

    #[test]
    fn normal_form_of_normal_form_is_identity() {
        let f = gf7();
        let n = 5;
        let mut l0 = ExactMatrix::zeros(f, n - 1, n - 1);
        let mut l1 = ExactMatrix::zeros(f, n - 1, n - 1);
        l0.set(2, 2, f.one());
        l1.set(3, 3, f.one());
        l1.set(0, 2, f.from_i64(3));
        l1.set(2, 0, f.from_i64(3));
        let mut tail = MultiPoly::zero(f, n + 1);
        for i in 2..=n {
            let mut e = vec![0u16; n + 1];
            e[i] = 3;
            tail.add_term(Monomial(e), f.one());
        }
        let x = normal_form_cubic(&l0, &l1, &tail).unwrap();
        let axis = LineOnCubic::new(&x, crate::grassmann::LineChart::coordinate(f, n, 0, 1).unwrap()).unwrap();
        let nf = second_type_normal_form(&x, &axis).unwrap();
        assert_eq!(nf.change, ExactMatrix::identity(f, n + 1));
        assert_eq!(nf.l0, l0);
        assert_eq!(nf.l1, l1);
        let s = extract_s(&nf).unwrap();
        assert_eq!(s.a0, ExactMatrix::from_i64(f, &[&[1, 0], &[0, 0]]));
        assert_eq!(s.a1, ExactMatrix::from_i64(f, &[&[0, 0], &[0, 1]]));
    }
}
