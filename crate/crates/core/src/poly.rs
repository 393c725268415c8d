//! Sparse multivariate polynomials over an exact field.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::ExactMatrix;

/// An exponent vector. Ordered graded-lex with the largest monomial first,
/// so iteration over a [`MultiPoly`] starts at the leading term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `num_vars` variables with no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    field: Field,
    num_vars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl MultiPoly {
    pub fn zero(field: Field, num_vars: usize) -> MultiPoly {
        MultiPoly {
            field,
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, num_vars: usize, c: FieldElement) -> MultiPoly {
        let mut p = MultiPoly::zero(field, num_vars);
        p.add_term(Monomial::one(num_vars), c);
        p
    }

    pub fn var(field: Field, num_vars: usize, i: usize) -> MultiPoly {
        assert!(i < num_vars, "variable index out of range");
        let mut p = MultiPoly::zero(field, num_vars);
        p.add_term(Monomial::var(num_vars, i), field.one());
        p
    }

    pub fn monomial(field: Field, exps: &[u16], c: FieldElement) -> MultiPoly {
        let mut p = MultiPoly::zero(field, exps.len());
        p.add_term(Monomial(exps.to_vec()), c);
        p
    }

    pub fn from_terms<I>(field: Field, num_vars: usize, terms: I) -> MultiPoly
    where
        I: IntoIterator<Item = (Vec<u16>, FieldElement)>,
    {
        let mut p = MultiPoly::zero(field, num_vars);
        for (e, c) in terms {
            assert_eq!(e.len(), num_vars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// A linear form with the given coefficients.
    pub fn linear(field: Field, coeffs: &[FieldElement]) -> MultiPoly {
        let n = coeffs.len();
        let mut p = MultiPoly::zero(field, n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    /// Add `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(c.field(), self.field);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u16]) -> FieldElement {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Degree-`d` component.
    pub fn homogeneous_part(&self, d: u32) -> MultiPoly {
        MultiPoly {
            field: self.field,
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Highest power of variable `i` appearing.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i] as u32).max().unwrap_or(0)
    }

    /// True when the variable never occurs.
    pub fn is_free_of(&self, i: usize) -> bool {
        self.terms.keys().all(|m| m.0[i] == 0)
    }

    pub fn scale(&self, c: &FieldElement) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.field, self.num_vars);
        }
        MultiPoly {
            field: self.field,
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.field, self.num_vars, self.field.one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.field, self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * &self.field.from_i64(e as i64));
        }
        out
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> FieldElement {
        assert_eq!(point.len(), self.num_vars, "evaluation point length");
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &x.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Compose with polynomials: `result = self(images[0], ..., images[k-1])`.
    pub fn substitute(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.num_vars, "one image per variable");
        let target = images.first().map(|p| p.num_vars).unwrap_or(0);
        let mut out = MultiPoly::zero(self.field, target);
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::constant(self.field, target, self.field.one()), p.clone()])
            .collect();
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(self.field, target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// `f(M x)`: the coordinate change x ↦ M x.
    pub fn linear_substitute(&self, m: &ExactMatrix) -> Result<MultiPoly> {
        if m.rows() != m.cols() || m.rows() != self.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} change for {} variables",
                m.rows(),
                m.cols(),
                self.num_vars
            )));
        }
        if m.rank() < m.rows() {
            return Err(Error::SingularChange);
        }
        Ok(self.linear_substitute_unchecked(m))
    }

    /// `f(M y)` for any (possibly rectangular) M with `rows = num_vars`;
    /// the result lives in `cols` variables.
    pub fn linear_substitute_unchecked(&self, m: &ExactMatrix) -> MultiPoly {
        assert_eq!(m.rows(), self.num_vars, "row count must match variables");
        let images: Vec<MultiPoly> = (0..m.rows())
            .map(|i| MultiPoly::linear(self.field, m.row(i)))
            .collect();
        self.substitute(&images)
    }

    /// Move to a different variable set: variable `i` becomes `map[i]`.
    pub fn remap(&self, num_vars: usize, map: &[usize]) -> MultiPoly {
        assert_eq!(map.len(), self.num_vars);
        let mut out = MultiPoly::zero(self.field, num_vars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; num_vars];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Exact division by variable `i`.
    pub fn divide_by_var(&self, i: usize) -> Result<MultiPoly> {
        let mut out = MultiPoly::zero(self.field, self.num_vars);
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                return Err(Error::DivisionFailure);
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c.clone());
        }
        Ok(out)
    }

    /// Substitute a constant for one variable (the variable stays, unused).
    pub fn set_var(&self, i: usize, value: &FieldElement) -> MultiPoly {
        let mut out = MultiPoly::zero(self.field, self.num_vars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = m2.0[i];
            m2.0[i] = 0;
            out.add_term(m2, c * &value.pow(e as u64));
        }
        out
    }

    /// Map coefficients into a larger field.
    pub fn embed(&self, field: Field) -> Result<MultiPoly> {
        let mut out = MultiPoly::zero(field, self.num_vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), field.embed(c)?);
        }
        Ok(out)
    }

    /// Render with custom variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            let coeff = c.to_string();
            let coeff = if coeff.contains('+') { format!("({coeff})") } else { coeff };
            let term = if factors.is_empty() {
                coeff
            } else if c.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", coeff, factors.join("*"))
            };
            if k > 0 {
                out.push_str(" + ");
            }
            out.push_str(&term);
        }
        out
    }

    pub fn default_names(num_vars: usize) -> Vec<String> {
        (0..num_vars).map(|i| format!("x{i}")).collect()
    }
}

/// Determinant of a square matrix of polynomials, by Laplace expansion
/// along rows memoized on the set of used columns.
pub fn symbolic_det(field: Field, num_vars: usize, m: &[Vec<MultiPoly>]) -> MultiPoly {
    let k = m.len();
    assert!(m.iter().all(|r| r.len() == k), "square matrix");
    assert!(k < 24, "matrix too large for subset expansion");
    let mut memo: std::collections::HashMap<u32, MultiPoly> = std::collections::HashMap::new();
    fn go(
        m: &[Vec<MultiPoly>],
        used: u32,
        field: Field,
        nv: usize,
        memo: &mut std::collections::HashMap<u32, MultiPoly>,
    ) -> MultiPoly {
        let row = used.count_ones() as usize;
        if row == m.len() {
            return MultiPoly::constant(field, nv, field.one());
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = MultiPoly::zero(field, nv);
        let mut free_before = 0;
        for c in 0..m.len() {
            if used & (1 << c) != 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let minor = go(m, used | (1 << c), field, nv, memo);
                let t = &m[row][c] * &minor;
                acc = if free_before % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            free_before += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
    go(m, 0, field, num_vars, &mut memo)
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&MultiPoly::default_names(self.num_vars)))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            field: self.field,
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.field, self.num_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn gf7() -> Field {
        Field::prime(7).unwrap()
    }

    #[test]
    fn leading_term_first() {
        let f = gf7();
        let x0 = MultiPoly::var(f, 3, 0);
        let x1 = MultiPoly::var(f, 3, 1);
        let p = &(&x1 * &x1) + &x0.pow(3);
        assert_eq!(p.to_string(), "x0^3 + x1^2");
        assert!(!p.is_homogeneous());
        assert_eq!(p.degree(), Some(3));
    }

    #[test]
    fn swap_and_shear_substitutions() {
        let f = gf7();
        let x0c = MultiPoly::var(f, 4, 0).pow(3);
        let mut swap = ExactMatrix::identity(f, 4);
        swap.swap_rows(0, 1);
        assert_eq!(x0c.linear_substitute(&swap).unwrap(), MultiPoly::var(f, 4, 1).pow(3));

        let x0 = MultiPoly::var(f, 4, 0);
        let x2 = MultiPoly::var(f, 4, 2);
        let x3 = MultiPoly::var(f, 4, 3);
        let g = &x2 * &(&x0 * &x0);
        let mut shear = ExactMatrix::identity(f, 4);
        shear.set(2, 3, f.one());
        let expect = &g + &(&x3 * &(&x0 * &x0));
        assert_eq!(g.linear_substitute(&shear).unwrap(), expect);
    }

    #[test]
    fn singular_change_rejected() {
        let f = gf7();
        let p = MultiPoly::var(f, 2, 0);
        let m = ExactMatrix::zeros(f, 2, 2);
        assert_eq!(p.linear_substitute(&m), Err(Error::SingularChange));
    }

    #[test]
    fn symbolic_det_diagonal_and_numeric() {
        let f = gf7();
        let x0 = MultiPoly::var(f, 2, 0);
        let x1 = MultiPoly::var(f, 2, 1);
        let z = MultiPoly::zero(f, 2);
        let d = symbolic_det(f, 2, &[vec![x0.clone(), z.clone()], vec![z, x1.clone()]]);
        assert_eq!(d, &x0 * &x1);
        let m = ExactMatrix::from_i64(f, &[&[1, 2, 3], &[4, 5, 6], &[0, 1, 5]]);
        let pm: Vec<Vec<MultiPoly>> = (0..3)
            .map(|i| (0..3).map(|j| MultiPoly::constant(f, 1, m.get(i, j).clone())).collect())
            .collect();
        assert_eq!(symbolic_det(f, 1, &pm).coefficient(&[0]), m.det().unwrap());
    }

    #[test]
    fn derivative_and_division() {
        let f = gf7();
        let x = MultiPoly::var(f, 2, 0);
        let u = MultiPoly::var(f, 2, 1);
        let p = &(&u * &u) + &(&x * &u).scale(&f.from_i64(2));
        assert_eq!(p.divide_by_var(1).unwrap(), &u + &x.scale(&f.from_i64(2)));
        assert_eq!(p.derivative(1), &u.scale(&f.from_i64(2)) + &x.scale(&f.from_i64(2)));
        assert_eq!(x.divide_by_var(1), Err(Error::DivisionFailure));
    }
}
