//! Lines in P^n: canonical charts, Plücker coordinates, incidence,
//! enumeration over finite fields and Segre varieties.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::ExactMatrix;
use crate::projective::{complete_basis, projective_count, projective_points};

/// A line in P^n stored as a 2×(n+1) matrix in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineChart {
    n: usize,
    rows: [Vec<FieldElement>; 2],
}

impl LineChart {
    /// The line spanned by two vectors.
    pub fn from_rows(field: Field, a: &[FieldElement], b: &[FieldElement]) -> Result<LineChart> {
        if a.len() != b.len() || a.len() < 2 {
            return Err(Error::ShapeMismatch("line spanning vectors".into()));
        }
        let m = ExactMatrix::from_rows(field, vec![a.to_vec(), b.to_vec()])?;
        let (r, pivots) = m.rref();
        if pivots.len() != 2 {
            return Err(Error::NotALine);
        }
        Ok(LineChart {
            n: a.len() - 1,
            rows: [r.row(0).to_vec(), r.row(1).to_vec()],
        })
    }

    /// The line span(e_i, e_j).
    pub fn coordinate(field: Field, n: usize, i: usize, j: usize) -> Result<LineChart> {
        let mut a = vec![field.zero(); n + 1];
        let mut b = vec![field.zero(); n + 1];
        a[i] = field.one();
        b[j] = field.one();
        LineChart::from_rows(field, &a, &b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.rows[0][0].field()
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.rows[i]
    }

    pub fn basis(&self) -> ExactMatrix {
        ExactMatrix::from_rows(self.field(), self.rows.to_vec()).expect("two rows")
    }

    /// Pivot columns of the two rows.
    pub fn pivots(&self) -> (usize, usize) {
        let p = |r: &[FieldElement]| r.iter().position(|x| !x.is_zero()).expect("nonzero row");
        (p(&self.rows[0]), p(&self.rows[1]))
    }

    /// The point s·r1 + t·r2.
    pub fn point(&self, s: &FieldElement, t: &FieldElement) -> Vec<FieldElement> {
        self.rows[0]
            .iter()
            .zip(&self.rows[1])
            .map(|(a, b)| &(s * a) + &(t * b))
            .collect()
    }

    /// All F_q-points of the line, ordered by their P^1 parameter.
    pub fn points(&self) -> Result<Vec<Vec<FieldElement>>> {
        let field = self.field();
        Ok(projective_points(field, 1)?
            .into_iter()
            .map(|st| self.point(&st[0], &st[1]))
            .collect())
    }

    pub fn contains_point(&self, p: &[FieldElement]) -> bool {
        let m = ExactMatrix::from_rows(self.field(), vec![self.rows[0].clone(), self.rows[1].clone(), p.to_vec()])
            .expect("same length");
        m.rank() == 2
    }

    /// Invertible change M whose first two columns span the line, followed
    /// by unit vectors; in coordinates x = M y the line is y2 = ... = yn = 0.
    pub fn frame(&self) -> ExactMatrix {
        complete_basis(&self.basis()).expect("line rows are independent").transpose()
    }

    /// Embed into a larger field.
    pub fn embed(&self, field: Field) -> Result<LineChart> {
        let a: Vec<_> = self.rows[0].iter().map(|x| field.embed(x)).collect::<Result<_>>()?;
        let b: Vec<_> = self.rows[1].iter().map(|x| field.embed(x)).collect::<Result<_>>()?;
        LineChart::from_rows(field, &a, &b)
    }
}

impl std::fmt::Display for LineChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let r = |v: &[FieldElement]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{};{}]", r(&self.rows[0]), r(&self.rows[1]))
    }
}

/// Plücker coordinates p_ij (1 ≤ i < j ≤ n+1) of a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerVector {
    n: usize,
    coords: BTreeMap<(usize, usize), FieldElement>,
}

impl PluckerVector {
    /// Coordinate p_ij with 1-based labels, antisymmetric in (i, j).
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coords[&(i, j)].clone(),
            std::cmp::Ordering::Greater => -&self.coords[&(j, i)],
            std::cmp::Ordering::Equal => self.coords.values().next().expect("nonempty").field().zero(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &BTreeMap<(usize, usize), FieldElement> {
        &self.coords
    }

    /// Every three-term Plücker relation p_ij p_st − p_is p_jt + p_it p_js.
    pub fn satisfies_relations(&self) -> bool {
        let m = self.n + 1;
        for i in 1..=m {
            for j in i + 1..=m {
                for s in j + 1..=m {
                    for t in s + 1..=m {
                        let v = &(&(&self.get(i, j) * &self.get(s, t)) - &(&self.get(i, s) * &self.get(j, t)))
                            + &(&self.get(i, t) * &self.get(j, s));
                        if !v.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// 2×2 minors of the canonical basis.
pub fn plucker_of(line: &LineChart) -> PluckerVector {
    let m = line.n + 1;
    let mut coords = BTreeMap::new();
    for i in 0..m {
        for j in i + 1..m {
            let v = &(&line.rows[0][i] * &line.rows[1][j]) - &(&line.rows[0][j] * &line.rows[1][i]);
            coords.insert((i + 1, j + 1), v);
        }
    }
    PluckerVector { n: line.n, coords }
}

/// The incidence forms p ∧ q over all 4-subsets of coordinates; two lines
/// meet iff every value vanishes.
pub fn incidence_values(p: &PluckerVector, q: &PluckerVector) -> Vec<FieldElement> {
    let m = p.n + 1;
    let mut out = Vec::new();
    for a in 1..=m {
        for b in a + 1..=m {
            for c in b + 1..=m {
                for d in c + 1..=m {
                    let t = |x: &PluckerVector, y: &PluckerVector, i, j, k, l| &x.get(i, j) * &y.get(k, l);
                    let v = &(&(&(&(&t(p, q, a, b, c, d) - &t(p, q, a, c, b, d)) + &t(p, q, a, d, b, c))
                        + &t(p, q, b, c, a, d))
                        - &t(p, q, b, d, a, c))
                        + &t(p, q, c, d, a, b);
                    out.push(v);
                }
            }
        }
    }
    out
}

/// True iff the stacked 4×(n+1) matrix has rank at most 3.
pub fn lines_meet(l1: &LineChart, l2: &LineChart) -> bool {
    assert_eq!(l1.n, l2.n, "lines in different ambient spaces");
    let m = ExactMatrix::from_rows(
        l1.field(),
        vec![l1.rows[0].clone(), l1.rows[1].clone(), l2.rows[0].clone(), l2.rows[1].clone()],
    )
    .expect("same length");
    m.rank() <= 3
}

/// The common point of two distinct meeting lines.
pub fn intersection_point(l1: &LineChart, l2: &LineChart) -> Option<Vec<FieldElement>> {
    if l1 == l2 {
        return None;
    }
    let field = l1.field();
    let rows = vec![l1.row(0).to_vec(), l1.row(1).to_vec(), l2.row(0).to_vec(), l2.row(1).to_vec()];
    let k = ExactMatrix::from_rows(field, rows).ok()?.transpose().kernel();
    let c = k.first()?;
    crate::field::normalize_projective(&l1.point(&c[0], &c[1])).ok()
}

/// Gaussian binomial [n+1 choose 2]_q: the number of lines in P^n(F_q).
pub fn line_count(n: usize, q: u64) -> u64 {
    projective_count(q, n) * projective_count(q, n.saturating_sub(1)) / (q + 1)
}

/// All lines of P^n(F_q), each once, ordered by pivot pair and then
/// lexicographically by the free RREF entries.
pub fn enumerate_lines(n: usize, field: Field) -> Result<impl Iterator<Item = LineChart>> {
    let q = field.require_finite()?;
    let m = n + 1;
    let mut cells = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            // free entries: row 1 at columns > a except b; row 2 at columns > b
            let free1: Vec<usize> = (a + 1..m).filter(|&c| c != b).collect();
            let free2: Vec<usize> = (b + 1..m).collect();
            cells.push((a, b, free1, free2));
        }
    }
    Ok(cells.into_iter().flat_map(move |(a, b, free1, free2)| {
        let k = free1.len() + free2.len();
        let total = q.pow(k as u32);
        (0..total).map(move |idx| {
            let mut r1 = vec![field.zero(); m];
            let mut r2 = vec![field.zero(); m];
            r1[a] = field.one();
            r2[b] = field.one();
            let mut rest = idx;
            for &c in free2.iter().rev() {
                r2[c] = field.element(rest % q);
                rest /= q;
            }
            for &c in free1.iter().rev() {
                r1[c] = field.element(rest % q);
                rest /= q;
            }
            LineChart { n, rows: [r1, r2] }
        })
    }))
}

/// A point of the Segre variety V_m ⊂ P^{2m−3}, written as a 2×(m−1) matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegrePoint {
    pub m: usize,
    pub lambda: [Vec<FieldElement>; 2],
}

impl SegrePoint {
    pub fn new(m: usize, row1: Vec<FieldElement>, row2: Vec<FieldElement>) -> Result<SegrePoint> {
        if row1.len() != m - 1 || row2.len() != m - 1 {
            return Err(Error::ShapeMismatch(format!("V_{m} needs rows of length {}", m - 1)));
        }
        Ok(SegrePoint { m, lambda: [row1, row2] })
    }
}

/// True iff every 2×2 minor λ_1s λ_2t − λ_1t λ_2s vanishes.
pub fn segre_membership(pt: &SegrePoint) -> Result<bool> {
    let [r1, r2] = &pt.lambda;
    if r1.iter().chain(r2).all(FieldElement::is_zero) {
        return Err(Error::ZeroVector);
    }
    for s in 0..r1.len() {
        for t in s + 1..r1.len() {
            if &r1[s] * &r2[t] != &r1[t] * &r2[s] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All F_q-points of V_m, as images of P^1 × P^{m−2}, normalized projectively
/// and sorted.
pub fn segre_points(m: usize, field: Field) -> Result<Vec<SegrePoint>> {
    if m < 2 {
        return Ok(Vec::new());
    }
    let p1 = projective_points(field, 1)?;
    let pm = projective_points(field, m - 2)?;
    let mut out = Vec::with_capacity(p1.len() * pm.len());
    for st in &p1 {
        for w in &pm {
            let r1: Vec<_> = w.iter().map(|x| &st[0] * x).collect();
            let r2: Vec<_> = w.iter().map(|x| &st[1] * x).collect();
            let flat: Vec<_> = r1.iter().chain(&r2).cloned().collect();
            let norm = crate::field::normalize_projective(&flat)?;
            let (a, b) = norm.split_at(m - 1);
            out.push(SegrePoint {
                m,
                lambda: [a.to_vec(), b.to_vec()],
            });
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn coordinate_plucker() {
        let f = gf(7);
        let l = LineChart::coordinate(f, 3, 0, 1).unwrap();
        let p = plucker_of(&l);
        assert!(p.get(1, 2).is_one());
        assert!(p.coords().iter().filter(|(k, _)| **k != (1, 2)).all(|(_, v)| v.is_zero()));
        let l = LineChart::coordinate(f, 3, 0, 2).unwrap();
        assert!(plucker_of(&l).get(1, 3).is_one());
    }

    #[test]
    fn meeting_examples() {
        let f = gf(7);
        let l12 = LineChart::coordinate(f, 3, 0, 1).unwrap();
        let l13 = LineChart::coordinate(f, 3, 0, 2).unwrap();
        let l34 = LineChart::coordinate(f, 3, 2, 3).unwrap();
        assert!(lines_meet(&l12, &l13));
        assert!(!lines_meet(&l12, &l34));
        assert!(lines_meet(&l12, &l12));
    }

    #[test]
    fn line_counts() {
        assert_eq!(enumerate_lines(2, gf(5)).unwrap().count(), 31);
        assert_eq!(enumerate_lines(3, gf(5)).unwrap().count(), 806);
        assert_eq!(enumerate_lines(1, gf(7)).unwrap().count(), 1);
        assert_eq!(line_count(3, 5), 806);
    }

    #[test]
    fn segre_examples() {
        let f = gf(5);
        let one = f.one();
        let zero = f.zero();
        let p = SegrePoint::new(3, vec![one.clone(), one.clone()], vec![one.clone(), one.clone()]).unwrap();
        assert!(segre_membership(&p).unwrap());
        let p = SegrePoint::new(3, vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]).unwrap();
        assert!(!segre_membership(&p).unwrap());
        let z = SegrePoint::new(3, vec![zero.clone(), zero.clone()], vec![zero.clone(), zero]).unwrap();
        assert_eq!(segre_membership(&z), Err(Error::ZeroVector));
        assert_eq!(segre_points(4, f).unwrap().len(), 186);
    }
}
