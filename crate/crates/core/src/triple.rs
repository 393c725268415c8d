//! Higher triple lines and triple lines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cubic::{classify_line_type, cubic_is_smooth, fano_points, CubicForm, LineOnCubic, LineType};
use crate::error::{Error, Result};
use crate::field::{dot, random_element, Field, FieldElement};
use crate::grassmann::LineChart;
use crate::matrix::ExactMatrix;
use crate::normal_form::{extract_s, normal_form_cubic, second_type_normal_form, NormalFormData, PencilMatrixS};
use crate::poly::{symbolic_det, MultiPoly};
use crate::projective::projective_points;

/// A uniformly random symmetric pair (A0, A1) of size k.
pub fn random_pencil<R: rand::Rng + ?Sized>(field: Field, k: usize, rng: &mut R) -> PencilMatrixS {
    let mut sym = || {
        let mut m = ExactMatrix::zeros(field, k, k);
        for i in 0..k {
            for j in i..k {
                let v = random_element(field, rng);
                m.set(i, j, v.clone());
                m.set(j, i, v);
            }
        }
        m
    };
    let a0 = sym();
    let a1 = sym();
    PencilMatrixS::new(a0, a1).expect("symmetric")
}

/// A random pair with a common kernel vector: A^p = M^{-T} B^p M^{-1} with
/// B^p vanishing on e0, so M·e0 is in both kernels. Returns the pair and M·e0.
pub fn degenerate_pencil<R: rand::Rng + ?Sized>(field: Field, k: usize, rng: &mut R) -> (PencilMatrixS, Vec<FieldElement>) {
    let m = ExactMatrix::random_invertible(field, k, rng);
    let inv = m.inverse().expect("invertible");
    let inv_t = inv.transpose();
    let base = random_pencil(field, k, rng);
    let kill = |b: &ExactMatrix| {
        let mut b = b.clone();
        for i in 0..k {
            b.set(0, i, field.zero());
            b.set(i, 0, field.zero());
        }
        inv_t.mul(&b).and_then(|x| x.mul(&inv)).expect("square")
    };
    let s = PencilMatrixS::new(kill(&base.a0), kill(&base.a1)).expect("symmetric");
    (s, m.col(0))
}

/// A cubic in second-type normal form along span(e0, e1) with random
/// linear forms L_ij and tail, whose S block is `s` when given.
pub fn random_normal_form<R: rand::Rng + ?Sized>(field: Field, n: usize, s: Option<&PencilMatrixS>, rng: &mut R) -> Result<CubicForm> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { n, min: 3 });
    }
    let big = random_pencil(field, n - 1, rng);
    let (mut l0, mut l1) = (big.a0, big.a1);
    if let Some(s) = s {
        if s.n() != n {
            return Err(Error::ShapeMismatch(format!("S has n = {}", s.n())));
        }
        for i in 0..s.size() {
            for j in 0..s.size() {
                l0.set(i + 2, j + 2, s.a0.get(i, j).clone());
                l1.set(i + 2, j + 2, s.a1.get(i, j).clone());
            }
        }
    }
    let mut tail = MultiPoly::zero(field, n + 1);
    for m in crate::cubic::cubic_monomials(n - 1) {
        let mut e = vec![0u16; 2];
        e.extend(m);
        tail.add_term(crate::poly::Monomial(e), random_element(field, rng));
    }
    normal_form_cubic(&l0, &l1, &tail)
}

/// A normal-form cubic whose S has xn as a common kernel direction, and is
/// not identically zero for n ≥ 5; the coefficient of xn^3 is nonzero iff
/// `cusp`.
pub fn higher_triple_example<R: rand::Rng + ?Sized>(field: Field, n: usize, cusp: bool, rng: &mut R) -> Result<CubicForm> {
    if n < 4 {
        return Err(Error::DimensionTooSmall { n, min: 4 });
    }
    let k = n - 3;
    let s = loop {
        let mut s = random_pencil(field, k, rng);
        for i in 0..k {
            for a in [&mut s.a0, &mut s.a1] {
                a.set(k - 1, i, field.zero());
                a.set(i, k - 1, field.zero());
            }
        }
        if k == 1 || !(s.a0.is_zero() && s.a1.is_zero()) {
            break s;
        }
    };
    let x = random_normal_form(field, n, Some(&s), rng)?;
    let mut e = vec![0u16; n + 1];
    e[n] = 3;
    let mut form = x.form().clone();
    let current = form.coefficient(&e);
    let target = if cusp { crate::field::random_nonzero(field, rng) } else { field.zero() };
    form.add_term(crate::poly::Monomial(e), &target - &current);
    CubicForm::new(form)
}

/// Degeneracy data of the matrix of linear forms S at a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HigherTripleReport {
    pub degenerate: bool,
    pub kernel_vectors: Vec<Vec<FieldElement>>,
    pub det_s: MultiPoly,
    pub triple_null_vectors: Vec<Vec<FieldElement>>,
    pub search_field: Field,
}

/// Common kernel of A0 and A1, via the kernel of the stacked matrix [A0; A1].
pub fn is_higher_triple(s: &PencilMatrixS) -> (bool, Vec<Vec<FieldElement>>) {
    let stacked = s.a0.stack(&s.a1).expect("equal widths");
    let k = stacked.kernel();
    (!k.is_empty(), k)
}

/// det(A0·x0 + A1·x1) as a binary form.
pub fn det_s(s: &PencilMatrixS) -> MultiPoly {
    let field = s.field();
    let k = s.size();
    let m: Vec<Vec<MultiPoly>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    MultiPoly::from_terms(field, 2, [(vec![1, 0], s.a0.get(i, j).clone()), (vec![0, 1], s.a1.get(i, j).clone())])
                })
                .collect()
        })
        .collect();
    symbolic_det(field, 2, &m)
}

fn quad_form(a: &ExactMatrix, v: &[FieldElement]) -> FieldElement {
    dot(v, &a.mul_vec(v))
}

/// All projective v over `field` with vᵀA0v = vᵀA1v = 0.
pub fn triple_null_search(s: &PencilMatrixS, field: Field) -> Result<Vec<Vec<FieldElement>>> {
    field.require_finite()?;
    let a0 = s.a0.embed(field)?;
    let a1 = s.a1.embed(field)?;
    Ok(projective_points(field, s.size() - 1)?
        .into_iter()
        .filter(|v| quad_form(&a0, v).is_zero() && quad_form(&a1, v).is_zero())
        .collect())
}

/// Full degeneracy report; the triple-null search runs over `search_field`
/// when it is finite.
pub fn higher_triple_report(s: &PencilMatrixS, search_field: Field) -> Result<HigherTripleReport> {
    let (degenerate, kernel_vectors) = is_higher_triple(s);
    let triple_null_vectors = if search_field.is_finite() {
        triple_null_search(s, search_field)?
    } else {
        Vec::new()
    };
    Ok(HigherTripleReport {
        degenerate,
        kernel_vectors,
        det_s: det_s(s),
        triple_null_vectors,
        search_field,
    })
}

/// How a plane through L meets X.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlaneContact {
    /// X ∩ P^2 = 3L.
    TripleContact,
    /// P^2 ⊆ X.
    PlaneInX,
    Other,
}

impl std::fmt::Display for PlaneContact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PlaneContact::TripleContact => "triple-contact",
            PlaneContact::PlaneInX => "plane-in-x",
            PlaneContact::Other => "other",
        })
    }
}

/// The plane P^2(v) spanned by L and the point p_v with x4..xn = v in
/// normal-form coordinates, as a 3×(n+1) row basis in original coordinates.
pub fn plane_of(nf: &NormalFormData, v: &[FieldElement]) -> Result<ExactMatrix> {
    let n = nf.n();
    if v.len() != n - 3 {
        return Err(Error::ShapeMismatch(format!("v must have {} entries", n - 3)));
    }
    if v.iter().all(FieldElement::is_zero) {
        return Err(Error::ZeroVector);
    }
    let field = nf.field();
    let mut y = vec![field.zero(); n + 1];
    for (k, c) in v.iter().enumerate() {
        y[4 + k] = field.embed(c)?;
    }
    let pv = nf.change.mul_vec(&y);
    ExactMatrix::from_rows(field, vec![nf.change.col(0), nf.change.col(1), pv])
}

/// Restriction of X to the plane span(rows); returns the ternary cubic in
/// the plane coordinates (s, t, w).
pub fn restrict_to_subspace(x: &CubicForm, rows: &ExactMatrix) -> MultiPoly {
    x.form().linear_substitute_unchecked(&rows.transpose())
}

/// Classify X ∩ P^2(v).
pub fn plane_and_multiplicity(x: &CubicForm, nf: &NormalFormData, v: &[FieldElement]) -> Result<PlaneContact> {
    let plane = plane_of(nf, v)?;
    let xf = x.embed(nf.field())?;
    let g = restrict_to_subspace(&xf, &plane);
    if g.is_zero() {
        return Ok(PlaneContact::PlaneInX);
    }
    // L is w = 0 in plane coordinates
    if g.len() == 1 && g.coefficient(&[0, 0, 3]) != nf.field().zero() {
        return Ok(PlaneContact::TripleContact);
    }
    Ok(PlaneContact::Other)
}

/// Verdict for one line of a scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineVerdict {
    pub line: LineChart,
    pub line_type: LineType,
    pub higher_triple: bool,
    pub kernel: Vec<Vec<FieldElement>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HigherTripleScan {
    pub lines_total: usize,
    pub first_type: usize,
    pub second_type: Vec<LineVerdict>,
}

impl HigherTripleScan {
    pub fn flagged(&self) -> impl Iterator<Item = &LineVerdict> {
        self.second_type.iter().filter(|v| v.higher_triple)
    }
}

/// Classify a single second-type line.
pub fn line_verdict(x: &CubicForm, l: &LineOnCubic) -> Result<LineVerdict> {
    let nf = second_type_normal_form(x, l)?;
    let s = extract_s(&nf)?;
    let (higher_triple, kernel) = is_higher_triple(&s);
    Ok(LineVerdict {
        line: l.line.clone(),
        line_type: LineType::Second,
        higher_triple,
        kernel,
    })
}

/// Verdicts for every F_q-line of X; lines in `range` only when given
/// (indices into the canonical line order).
pub fn scan_higher_triple_range(x: &CubicForm, field: Field, range: Option<std::ops::Range<usize>>) -> Result<HigherTripleScan> {
    if x.n() < 4 {
        return Err(Error::DimensionTooSmall { n: x.n(), min: 4 });
    }
    let xf = x.embed(field)?;
    let lines = fano_points(&xf, field)?;
    let range = range.unwrap_or(0..lines.len());
    let mut first = 0;
    let mut second = Vec::new();
    let mut total = 0;
    for l in lines.iter().skip(range.start).take(range.end.saturating_sub(range.start)) {
        total += 1;
        match classify_line_type(&xf, l)?.line_type {
            LineType::First => first += 1,
            LineType::Second => second.push(line_verdict(&xf, l)?),
        }
    }
    Ok(HigherTripleScan {
        lines_total: total,
        first_type: first,
        second_type: second,
    })
}

pub fn scan_higher_triple(x: &CubicForm, field: Field) -> Result<HigherTripleScan> {
    scan_higher_triple_range(x, field, None)
}

/// The dimension count behind the genericity statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodimensionBound {
    /// Conditions imposed by a transversal A2 singularity along a line.
    pub conditions: usize,
    /// Dimension of the lines-in-P^n family the conditions are spread over.
    pub moduli: usize,
    pub margin: isize,
}

pub fn expected_codimension(n: usize) -> Result<CodimensionBound> {
    if n < 4 {
        return Err(Error::DimensionTooSmall { n, min: 4 });
    }
    let conditions = 2 * n - 1;
    let moduli = 2 * (n - 1);
    Ok(CodimensionBound {
        conditions,
        moduli,
        margin: conditions as isize - moduli as isize,
    })
}

/// One draw of a genericity campaign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignDraw {
    pub index: usize,
    pub cubic: CubicForm,
    pub second_type: usize,
    pub flagged: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignReport {
    pub seed: u64,
    pub field: Field,
    pub n: usize,
    pub draws: Vec<CampaignDraw>,
    /// Candidates discarded because a singular point was found.
    pub rejected_singular: usize,
}

impl CampaignReport {
    pub fn flagged_draws(&self) -> usize {
        self.draws.iter().filter(|d| d.flagged > 0).count()
    }

    pub fn clean_draws(&self) -> usize {
        self.draws.len() - self.flagged_draws()
    }
}

/// Draw `count` random cubics (seeded ChaCha8) and count higher triple
/// lines on each. A candidate is rejected when it has an F_q-rational
/// singular point or a line over F_q through a singular point.
pub fn genericity_campaign(field: Field, n: usize, count: usize, seed: u64) -> Result<CampaignReport> {
    genericity_campaign_range(field, n, count, seed, 0..count)
}

/// As [`genericity_campaign`], keeping only draws whose index is in `range`.
/// Draw i uses ChaCha8 stream i of `seed`, so the draws do not depend on
/// the range.
pub fn genericity_campaign_range(field: Field, n: usize, count: usize, seed: u64, range: std::ops::Range<usize>) -> Result<CampaignReport> {
    field.require_finite()?;
    let mut draws = Vec::new();
    let mut rejected = 0;
    for index in range.start..range.end.min(count) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let (cubic, scan) = loop {
            let c = CubicForm::random(field, n, &mut rng);
            if !cubic_is_smooth(&c, 1)?.is_smooth() {
                rejected += 1;
                continue;
            }
            match scan_higher_triple(&c, field) {
                Ok(scan) => break (c, scan),
                Err(Error::DegenerateAlongLine(_) | Error::BasePointPencil) => rejected += 1,
                Err(e) => return Err(e),
            }
        };
        draws.push(CampaignDraw {
            index,
            second_type: scan.second_type.len(),
            flagged: scan.flagged().count(),
            cubic,
        });
    }
    Ok(CampaignReport {
        seed,
        field,
        n,
        draws,
        rejected_singular: rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf7() -> Field {
        Field::prime(7).unwrap()
    }

    fn s_of(f: Field, a0: &[&[i64]], a1: &[&[i64]]) -> PencilMatrixS {
        PencilMatrixS::new(ExactMatrix::from_i64(f, a0), ExactMatrix::from_i64(f, a1)).unwrap()
    }

    #[test]
    fn one_by_one_cases() {
        let f = gf7();
        let (d, k) = is_higher_triple(&s_of(f, &[&[0]], &[&[0]]));
        assert!(d);
        assert_eq!(k.len(), 1);
        assert!(!is_higher_triple(&s_of(f, &[&[1]], &[&[0]])).0);
        assert!(triple_null_search(&s_of(f, &[&[1]], &[&[0]]), f).unwrap().is_empty());
        assert_eq!(triple_null_search(&s_of(f, &[&[0]], &[&[0]]), f).unwrap().len(), 1);
    }

    #[test]
    fn shared_zero_column() {
        let f = gf7();
        let s = s_of(f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]], &[&[2, 1, 0], &[1, 3, 0], &[0, 0, 0]]);
        let (d, k) = is_higher_triple(&s);
        assert!(d);
        assert_eq!(k, vec![vec![f.zero(), f.zero(), f.one()]]);
        assert!(det_s(&s).is_zero());
    }

    #[test]
    fn off_diagonal_null_vectors() {
        let f = gf7();
        let s = s_of(f, &[&[0, 1], &[1, 0]], &[&[0, 0], &[0, 0]]);
        assert!(!is_higher_triple(&s).0);
        let null = triple_null_search(&s, f).unwrap();
        assert_eq!(null, vec![vec![f.one(), f.zero()], vec![f.zero(), f.one()]]);
    }

    #[test]
    fn det_examples() {
        let f = gf7();
        let s = s_of(f, &[&[1, 0], &[0, 0]], &[&[0, 0], &[0, 1]]);
        assert_eq!(det_s(&s), MultiPoly::from_terms(f, 2, [(vec![1, 1], f.one())]));
        let s = s_of(f, &[&[3]], &[&[5]]);
        assert_eq!(det_s(&s), MultiPoly::from_terms(f, 2, [(vec![1, 0], f.from_i64(3)), (vec![0, 1], f.from_i64(5))]));
    }

    #[test]
    fn codimension_margin() {
        for n in 4..=6 {
            let b = expected_codimension(n).unwrap();
            assert_eq!((b.conditions, b.moduli, b.margin), (2 * n - 1, 2 * n - 2, 1));
        }
        assert!(expected_codimension(3).is_err());
    }
}
