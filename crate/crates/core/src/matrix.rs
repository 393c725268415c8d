//! Dense matrices over an exact field.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

/// A row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl ExactMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> ExactMatrix {
        ExactMatrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<FieldElement>>) -> Result<ExactMatrix> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(ExactMatrix {
            field,
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Build from small integers (reduced into the field).
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> ExactMatrix {
        let v = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        ExactMatrix::from_rows(field, v).expect("rectangular literal")
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, f: impl Fn(usize, usize) -> FieldElement) -> ExactMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { field, rows, cols, data }
    }

    /// Uniformly random invertible matrix (rejection sampling).
    pub fn random_invertible<R: rand::Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> ExactMatrix {
        loop {
            let mut m = ExactMatrix::zeros(field, n, n);
            for v in m.data.iter_mut() {
                *v = crate::field::random_element(field, rng);
            }
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn transpose(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ExactMatrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows).map(|i| crate::field::dot(self.row(i), v)).collect()
    }

    pub fn scale(&self, c: &FieldElement) -> ExactMatrix {
        ExactMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape");
        ExactMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch("column counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(ExactMatrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> ExactMatrix {
        ExactMatrix::from_fn(self.field, rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inverse().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let pj = m.get(r, j);
                    if pj.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&factor * pj);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if let Field::Prime { p } = self.field {
            let mut buf: Vec<u32> = self.data.iter().map(|x| x.residue().expect("prime field")).collect();
            return rank_mod_p(&mut buf, self.rows, self.cols, p);
        }
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column in increasing
    /// order; the free coordinate of each vector is 1.
    pub fn kernel(&self) -> Vec<Vec<FieldElement>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = vec![self.field.zero(); self.cols];
            v[f] = self.field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, f);
            }
            basis.push(v);
        }
        basis
    }

    pub fn det(&self) -> Result<FieldElement> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(self.field.zero());
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inverse()?;
            for i in c + 1..m.rows {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c) * &inv;
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<ExactMatrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = ExactMatrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularChange);
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Ok(r.submatrix(&rows, &cols))
    }

    /// Map every entry into a larger field.
    pub fn embed(&self, field: Field) -> Result<ExactMatrix> {
        Ok(ExactMatrix {
            field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| field.embed(x)).collect::<Result<_>>()?,
        })
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Rank of a row-major residue matrix over GF(p). Destroys `data`.
pub fn rank_mod_p(data: &mut [u32], rows: usize, cols: usize, p: u32) -> usize {
    debug_assert_eq!(data.len(), rows * cols);
    let p64 = p as u64;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in c..cols {
                data.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = inv_mod(data[rank * cols + c], p) as u64;
        for j in c..cols {
            data[rank * cols + j] = (data[rank * cols + j] as u64 * inv % p64) as u32;
        }
        for i in rank + 1..rows {
            let f = data[i * cols + c] as u64;
            if f == 0 {
                continue;
            }
            let neg = p64 - f;
            for j in c..cols {
                let a = data[rank * cols + j] as u64;
                if a != 0 {
                    data[i * cols + j] = ((data[i * cols + j] as u64 + neg * a) % p64) as u32;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "residue not invertible");
    t.rem_euclid(p as i64) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        let f = Field::prime(7).unwrap();
        assert_eq!(ExactMatrix::identity(f, 3).rank(), 3);
        assert_eq!(ExactMatrix::from_i64(f, &[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(ExactMatrix::zeros(f, 3, 4).rank(), 0);
        let q = Field::rational();
        assert_eq!(ExactMatrix::from_i64(q, &[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        let f = Field::prime(5).unwrap();
        assert!(ExactMatrix::identity(f, 3).kernel().is_empty());
        assert_eq!(ExactMatrix::zeros(f, 2, 2).kernel().len(), 2);
        let k = ExactMatrix::from_i64(f, &[&[1, 1], &[1, 1]]).kernel();
        assert_eq!(k, vec![vec![f.from_i64(4), f.from_i64(1)]]);
    }

    #[test]
    fn inverse_and_det() {
        let f = Field::rational();
        let m = ExactMatrix::from_i64(f, &[&[2, 1], &[1, 1]]);
        assert_eq!(m.det().unwrap(), f.one());
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), ExactMatrix::identity(f, 2));
        let s = ExactMatrix::from_i64(f, &[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse(), Err(Error::SingularChange));
    }

    #[test]
    fn inv_mod_small() {
        for p in [5u32, 7, 11, 13] {
            for a in 1..p {
                assert_eq!(a as u64 * inv_mod(a, p) as u64 % p as u64, 1);
            }
        }
    }
}
