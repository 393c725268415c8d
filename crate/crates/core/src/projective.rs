//! Projective points over finite fields and basis completion.

use crate::error::{Error, Result};
use crate::field::{normalize_projective, Field, FieldElement};
use crate::matrix::ExactMatrix;

/// Number of points of P^dim over GF(q).
pub fn projective_count(q: u64, dim: usize) -> u64 {
    (0..=dim as u32).map(|k| q.pow(k)).sum()
}

/// All points of P^dim(F_q), normalized with first nonzero entry 1.
///
/// Points are ordered by the position of the leading 1, then by the
/// enumeration indices of the trailing entries.
pub fn projective_points(field: Field, dim: usize) -> Result<Vec<Vec<FieldElement>>> {
    let q = field.require_finite()?;
    let mut out = Vec::with_capacity(projective_count(q, dim) as usize);
    for lead in 0..=dim {
        let free = dim - lead;
        let total = q.pow(free as u32);
        for idx in 0..total {
            let mut v = vec![field.zero(); dim + 1];
            v[lead] = field.one();
            let mut rest = idx;
            for k in (lead + 1..=dim).rev() {
                v[k] = field.element(rest % q);
                rest /= q;
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Normalized projective representative.
pub fn normalize(v: &[FieldElement]) -> Result<Vec<FieldElement>> {
    normalize_projective(v)
}

/// Extend independent rows to an invertible square matrix, appending unit
/// vectors e_k for the non-pivot columns of the RREF, in increasing k.
pub fn complete_basis(rows: &ExactMatrix) -> Result<ExactMatrix> {
    let (_, pivots) = rows.rref();
    if pivots.len() != rows.rows() {
        return Err(Error::BadSubspace("rows are dependent".into()));
    }
    let n = rows.cols();
    let field = rows.field();
    let mut all = rows.to_rows();
    for k in 0..n {
        if !pivots.contains(&k) {
            let mut e = vec![field.zero(); n];
            e[k] = field.one();
            all.push(e);
        }
    }
    ExactMatrix::from_rows(field, all)
}

/// Span of a set of vectors as an RREF row basis.
pub fn span_rref(field: Field, vectors: &[Vec<FieldElement>]) -> Result<ExactMatrix> {
    if vectors.is_empty() {
        return Err(Error::ZeroVector);
    }
    let m = ExactMatrix::from_rows(field, vectors.to_vec())?;
    let (r, pivots) = m.rref();
    let keep: Vec<usize> = (0..pivots.len()).collect();
    let cols: Vec<usize> = (0..m.cols()).collect();
    Ok(r.submatrix(&keep, &cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let f = Field::prime(5).unwrap();
        assert_eq!(projective_points(f, 2).unwrap().len(), 31);
        assert_eq!(projective_count(7, 3), 400);
        let f2 = Field::quadratic(5).unwrap();
        assert_eq!(projective_points(f2, 1).unwrap().len(), 26);
    }

    #[test]
    fn completion_is_invertible() {
        let f = Field::prime(7).unwrap();
        let rows = ExactMatrix::from_i64(f, &[&[0, 1, 2, 3], &[0, 0, 1, 5]]);
        let full = complete_basis(&rows).unwrap();
        assert_eq!(full.rank(), 4);
        assert_eq!(full.row(0), rows.row(0));
    }
}
