//! Cubic forms, their lines, and the first-order type of a line.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{dot, random_element, Field, FieldElement};
use crate::grassmann::LineChart;
use crate::matrix::{inv_mod, ExactMatrix};
use crate::poly::{Monomial, MultiPoly};
use crate::projective::projective_points;

/// A homogeneous cubic in n+1 variables x0..xn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicForm {
    n: usize,
    form: MultiPoly,
    partials: Vec<MultiPoly>,
}

/// Exponent vectors of all cubic monomials in `nvars` variables, leading first.
pub fn cubic_monomials(nvars: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    for i in 0..nvars {
        for j in i..nvars {
            for k in j..nvars {
                let mut e = vec![0u16; nvars];
                e[i] += 1;
                e[j] += 1;
                e[k] += 1;
                out.push(e);
            }
        }
    }
    out.sort_by_key(|a| Monomial(a.clone()));
    out
}

impl CubicForm {
    pub fn new(form: MultiPoly) -> Result<CubicForm> {
        if form.is_zero() {
            return Err(Error::InvalidArgument("the zero form is not a cubic".into()));
        }
        if let Some((m, _)) = form.terms().find(|(m, _)| m.degree() != 3) {
            return Err(Error::NonHomogeneous { degree: m.degree() });
        }
        if form.num_vars() < 2 {
            return Err(Error::InvalidArgument("a cubic needs at least two variables".into()));
        }
        let partials = (0..form.num_vars()).map(|i| form.derivative(i)).collect();
        Ok(CubicForm {
            n: form.num_vars() - 1,
            form,
            partials,
        })
    }

    pub fn from_terms(field: Field, n: usize, terms: Vec<(Vec<u16>, FieldElement)>) -> Result<CubicForm> {
        CubicForm::new(MultiPoly::from_terms(field, n + 1, terms))
    }

    /// x0^3 + ... + xn^3.
    pub fn fermat(field: Field, n: usize) -> CubicForm {
        let terms = (0..=n)
            .map(|i| {
                let mut e = vec![0u16; n + 1];
                e[i] = 3;
                (e, field.one())
            })
            .collect();
        CubicForm::from_terms(field, n, terms).expect("Fermat cubic")
    }

    /// Every cubic monomial with an independent random coefficient.
    pub fn random<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> CubicForm {
        loop {
            let terms = cubic_monomials(n + 1)
                .into_iter()
                .map(|e| (e, random_element(field, rng)))
                .collect();
            if let Ok(c) = CubicForm::from_terms(field, n, terms) {
                return c;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.form.field()
    }

    pub fn form(&self) -> &MultiPoly {
        &self.form
    }

    pub fn partial(&self, i: usize) -> &MultiPoly {
        &self.partials[i]
    }

    pub fn evaluate(&self, x: &[FieldElement]) -> FieldElement {
        self.form.evaluate(x)
    }

    pub fn gradient(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        self.partials.iter().map(|p| p.evaluate(x)).collect()
    }

    /// The cubic F(M y).
    pub fn transform(&self, m: &ExactMatrix) -> Result<CubicForm> {
        CubicForm::new(self.form.linear_substitute(m)?)
    }

    pub fn embed(&self, field: Field) -> Result<CubicForm> {
        if field == self.field() {
            return Ok(self.clone());
        }
        CubicForm::new(self.form.embed(field)?)
    }

    pub fn coefficient(&self, exps: &[u16]) -> FieldElement {
        self.form.coefficient(exps)
    }

    pub(crate) fn prime_evaluator(&self) -> Option<PrimeCubic> {
        PrimeCubic::new(&self.form)
    }
}

impl std::fmt::Display for CubicForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.form.fmt(f)
    }
}

/// Residue-level evaluator for cubics over GF(p).
pub(crate) struct PrimeCubic {
    p: u64,
    nvars: usize,
    terms: Vec<(u64, [usize; 3])>,
}

impl PrimeCubic {
    fn new(form: &MultiPoly) -> Option<PrimeCubic> {
        let Field::Prime { p } = form.field() else {
            return None;
        };
        let terms = form
            .terms()
            .map(|(m, c)| {
                let mut idx = [0usize; 3];
                let mut k = 0;
                for (i, &e) in m.exponents().iter().enumerate() {
                    for _ in 0..e {
                        idx[k] = i;
                        k += 1;
                    }
                }
                (c.residue().expect("prime field") as u64, idx)
            })
            .collect();
        Some(PrimeCubic {
            p: p as u64,
            nvars: form.num_vars(),
            terms,
        })
    }

    pub(crate) fn p(&self) -> u64 {
        self.p
    }

    pub(crate) fn eval(&self, x: &[u32]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for &(c, [i, j, k]) in &self.terms {
            acc = (acc + c * (x[i] as u64 * x[j] as u64 % p) % p * x[k] as u64) % p;
        }
        acc
    }

    pub(crate) fn grad(&self, x: &[u32], out: &mut [u64]) {
        let p = self.p;
        out[..self.nvars].iter_mut().for_each(|g| *g = 0);
        for &(c, [i, j, k]) in &self.terms {
            let (a, b, d) = (x[i] as u64, x[j] as u64, x[k] as u64);
            out[i] = (out[i] + c * (b * d % p)) % p;
            out[j] = (out[j] + c * (a * d % p)) % p;
            out[k] = (out[k] + c * (a * b % p)) % p;
        }
    }
}

/// Outcome of an exhaustive singular-point search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmoothnessVerdict {
    /// No point of P^n over the searched field has vanishing gradient.
    NoSingularPointFound { searched: Field },
    SingularAt(Vec<FieldElement>),
}

impl SmoothnessVerdict {
    pub fn is_smooth(&self) -> bool {
        matches!(self, SmoothnessVerdict::NoSingularPointFound { .. })
    }
}

/// Search P^n(F_{q^k}) for a point where every partial derivative vanishes.
pub fn cubic_is_smooth(x: &CubicForm, search_depth: u32) -> Result<SmoothnessVerdict> {
    let base = x.field();
    base.require_finite()?;
    let search = match (search_depth, base) {
        (1, _) => base,
        (2, Field::Prime { .. }) => base.quadratic_extension()?,
        (2, Field::Quadratic { .. }) => {
            return Err(Error::InvalidArgument("GF(p^4) searches are not supported".into()));
        }
        (k, _) => return Err(Error::InvalidArgument(format!("search depth {k} (expected 1 or 2)"))),
    };
    let cubic = x.embed(search)?;
    if let Some(fast) = cubic.prime_evaluator() {
        let mut g = vec![0u64; cubic.n + 1];
        for pt in projective_points(search, cubic.n)? {
            let r: Vec<u32> = pt.iter().map(|v| v.residue().expect("prime")).collect();
            fast.grad(&r, &mut g);
            if g.iter().all(|&v| v == 0) {
                return Ok(SmoothnessVerdict::SingularAt(pt));
            }
        }
    } else {
        for pt in projective_points(search, cubic.n)? {
            if cubic.partials.iter().all(|d| d.evaluate(&pt).is_zero()) {
                return Ok(SmoothnessVerdict::SingularAt(pt));
            }
        }
    }
    Ok(SmoothnessVerdict::NoSingularPointFound { searched: search })
}

/// Coefficients (s^3, s^2 t, s t^2, t^3) of F(s·P + t·Q).
pub fn restrict_to_pair(x: &CubicForm, p: &[FieldElement], q: &[FieldElement]) -> [FieldElement; 4] {
    [
        x.evaluate(p),
        dot(&x.gradient(p), q),
        dot(&x.gradient(q), p),
        x.evaluate(q),
    ]
}

/// True iff the restriction of X to the line is the zero binary cubic.
pub fn line_in_cubic(x: &CubicForm, line: &LineChart) -> bool {
    assert_eq!(x.n, line.n(), "ambient dimensions differ");
    restrict_to_pair(x, line.row(0), line.row(1)).iter().all(FieldElement::is_zero)
}

/// A line known to lie on a given cubic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineOnCubic {
    pub line: LineChart,
}

impl LineOnCubic {
    pub fn new(x: &CubicForm, line: LineChart) -> Result<LineOnCubic> {
        if x.field() != line.field() {
            return Err(Error::FieldMismatch {
                expected: x.field().to_string(),
                found: line.field().to_string(),
            });
        }
        if !line_in_cubic(x, &line) {
            return Err(Error::LineNotOnCubic);
        }
        Ok(LineOnCubic { line })
    }
}

fn rref2_mod_p(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    let m = a.len();
    let mut r = [a.to_vec(), b.to_vec()];
    let piv1 = (0..m).find(|&j| r[0][j] != 0 || r[1][j] != 0).expect("nonzero");
    if r[0][piv1] == 0 {
        r.swap(0, 1);
    }
    let inv = inv_mod(r[0][piv1], p as u32) as u64;
    for v in r[0].iter_mut() {
        *v = (*v as u64 * inv % p) as u32;
    }
    let f = r[1][piv1] as u64;
    for j in 0..m {
        r[1][j] = ((r[1][j] as u64 + (p - f) * r[0][j] as u64) % p) as u32;
    }
    let piv2 = (0..m).find(|&j| r[1][j] != 0).expect("independent points");
    let inv = inv_mod(r[1][piv2], p as u32) as u64;
    for v in r[1].iter_mut() {
        *v = (*v as u64 * inv % p) as u32;
    }
    let f = r[0][piv2] as u64;
    for j in 0..m {
        r[0][j] = ((r[0][j] as u64 + (p - f) * r[1][j] as u64) % p) as u32;
    }
    let mut out = r[0].clone();
    out.extend_from_slice(&r[1]);
    out
}

/// All F_q-rational lines on X in canonical order.
///
/// Lines are found as pairs of points P, Q of X with ∇F(P)·Q = ∇F(Q)·P = 0
/// and deduplicated through their RREF.
pub fn fano_points(x: &CubicForm, field: Field) -> Result<Vec<LineOnCubic>> {
    field.require_finite()?;
    let cubic = x.embed(field)?;
    let n = cubic.n;
    let all = projective_points(field, n)?;
    if let Some(fast) = cubic.prime_evaluator() {
        let p = fast.p();
        let pts: Vec<Vec<u32>> = all
            .iter()
            .map(|v| v.iter().map(|e| e.residue().expect("prime")).collect::<Vec<u32>>())
            .filter(|r| fast.eval(r) == 0)
            .collect();
        let mut grads = Vec::with_capacity(pts.len());
        for r in &pts {
            let mut g = vec![0u64; n + 1];
            fast.grad(r, &mut g);
            grads.push(g);
        }
        let dotp = |g: &[u64], v: &[u32]| g.iter().zip(v).fold(0u64, |acc, (a, b)| (acc + a * *b as u64) % p);
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if dotp(&grads[i], &pts[j]) == 0 && dotp(&grads[j], &pts[i]) == 0 {
                    seen.insert(rref2_mod_p(&pts[i], &pts[j], p));
                }
            }
        }
        let mut lines: Vec<LineOnCubic> = seen
            .into_iter()
            .map(|v| {
                let a: Vec<_> = v[..n + 1].iter().map(|&r| field.from_i64(r as i64)).collect();
                let b: Vec<_> = v[n + 1..].iter().map(|&r| field.from_i64(r as i64)).collect();
                LineOnCubic {
                    line: LineChart::from_rows(field, &a, &b).expect("independent"),
                }
            })
            .collect();
        lines.sort();
        return Ok(lines);
    }
    let pts: Vec<&Vec<FieldElement>> = all.iter().filter(|v| cubic.evaluate(v).is_zero()).collect();
    let grads: Vec<Vec<FieldElement>> = pts.iter().map(|v| cubic.gradient(v)).collect();
    let mut seen = BTreeSet::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if dot(&grads[i], pts[j]).is_zero() && dot(&grads[j], pts[i]).is_zero() {
                seen.insert(LineChart::from_rows(field, pts[i], pts[j])?);
            }
        }
    }
    Ok(seen.into_iter().map(|line| LineOnCubic { line }).collect())
}

/// Ordered pairs (i, j) of lines in the list that do not meet.
pub fn skew_pair_count(lines: &[LineOnCubic]) -> usize {
    let mut count = 0;
    for (i, a) in lines.iter().enumerate() {
        for (j, b) in lines.iter().enumerate() {
            if i != j && !crate::grassmann::lines_meet(&a.line, &b.line) {
                count += 1;
            }
        }
    }
    count
}

/// Names x13..x1,n+1, x23..x2,n+1 of the chart variables at a line.
pub fn chart_variable_names(n: usize) -> Vec<String> {
    let mut names = Vec::new();
    for row in 1..=2 {
        for j in 3..=n + 1 {
            if n + 1 >= 10 {
                names.push(format!("x{row}_{j}"));
            } else {
                names.push(format!("x{row}{j}"));
            }
        }
    }
    names
}

/// Index of chart variable x_{row,j} (row ∈ {1,2}, 3 ≤ j ≤ n+1).
pub fn chart_var(n: usize, row: usize, j: usize) -> usize {
    debug_assert!((1..=2).contains(&row) && (3..=n + 1).contains(&j));
    (row - 1) * (n - 1) + (j - 3)
}

/// Equations of F near a line, in the 2(n−1) chart variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartEquations {
    /// x = frame·y puts the line at y2 = ... = yn = 0.
    pub frame: ExactMatrix,
    /// Coefficients of λ^3, λ^2 μ, λ μ^2, μ^3 in
    /// F(λ(1,0,x13,..) + μ(0,1,x23,..)); linear parts x13, x23, x14, x24 in
    /// the second-type normal form.
    pub equations: [MultiPoly; 4],
}

/// Split the binary-cubic coefficients of F restricted to the chart line.
pub fn chart_equations_of(cubic: &CubicForm) -> [MultiPoly; 4] {
    let n = cubic.n;
    let field = cubic.field();
    let k = 2 * (n - 1);
    let lam = k;
    let mu = k + 1;
    let total = k + 2;
    let mut images = vec![MultiPoly::var(field, total, lam), MultiPoly::var(field, total, mu)];
    for col in 2..=n {
        let j = col + 1;
        let a = &MultiPoly::var(field, total, lam) * &MultiPoly::var(field, total, chart_var(n, 1, j));
        let b = &MultiPoly::var(field, total, mu) * &MultiPoly::var(field, total, chart_var(n, 2, j));
        images.push(&a + &b);
    }
    let g = cubic.form.substitute(&images);
    let mut out: [MultiPoly; 4] = std::array::from_fn(|_| MultiPoly::zero(field, k));
    for (m, c) in g.terms() {
        let e = m.exponents();
        let slot = e[mu] as usize;
        debug_assert_eq!(e[lam] as usize + slot, 3);
        out[slot].add_term(Monomial(e[..k].to_vec()), c.clone());
    }
    out
}

/// Move the line to span(e0, e1) and return the four chart equations.
pub fn fano_chart_equations(x: &CubicForm, l: &LineOnCubic) -> Result<ChartEquations> {
    let frame = l.line.frame();
    let moved = x.transform(&frame)?;
    Ok(ChartEquations {
        frame,
        equations: chart_equations_of(&moved),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LineType {
    First,
    Second,
}

impl std::fmt::Display for LineType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LineType::First => "first",
            LineType::Second => "second",
        })
    }
}

/// First-order data of X along a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineTypeReport {
    /// Row i−2 holds the coefficients of y_i·y0^2, y_i·y0·y1, y_i·y1^2
    /// (i = 2..n) in frame coordinates.
    pub q_matrix: ExactMatrix,
    pub rank: usize,
    pub line_type: LineType,
    /// Row basis (original coordinates) of the linear space tangent to X
    /// along L: a P^{n−2} for the second type, a P^{n−3} for the first.
    pub tangent_witness: ExactMatrix,
    pub frame: ExactMatrix,
}

/// The (n−1)×3 matrix of binary quadrics q_i of a cubic whose line is the
/// axis {x2 = ... = xn = 0}.
pub fn q_matrix_of(cubic: &CubicForm) -> ExactMatrix {
    let n = cubic.n;
    let field = cubic.field();
    ExactMatrix::from_fn(field, n - 1, 3, |r, c| {
        let mut e = vec![0u16; n + 1];
        e[r + 2] = 1;
        e[0] = (2 - c) as u16;
        e[1] = c as u16;
        cubic.coefficient(&e)
    })
}

/// The q-matrix of X along an arbitrary line, in the coordinates of
/// [`LineChart::frame`]. Row i−2 is ∂_k F(s·P + t·Q) for the i-th frame
/// column e_k, read off from gradients at P, Q and P + Q.
pub fn q_matrix_at(x: &CubicForm, line: &LineChart) -> ExactMatrix {
    let field = x.field();
    let (pa, pb) = line.pivots();
    let p = line.row(0);
    let q = line.row(1);
    let pq: Vec<FieldElement> = p.iter().zip(q).map(|(a, b)| a + b).collect();
    let (gp, gq, gpq) = if let Some(fast) = x.prime_evaluator() {
        let res = |v: &[FieldElement]| v.iter().map(|e| e.residue().expect("prime")).collect::<Vec<u32>>();
        let mut out = Vec::new();
        for v in [p, q, &pq[..]] {
            let mut g = vec![0u64; x.n + 1];
            fast.grad(&res(v), &mut g);
            out.push(g.into_iter().map(|r| field.from_i64(r as i64)).collect::<Vec<_>>());
        }
        let gpq = out.pop().expect("three");
        let gq = out.pop().expect("three");
        (out.pop().expect("three"), gq, gpq)
    } else {
        (x.gradient(p), x.gradient(q), x.gradient(&pq))
    };
    let ks: Vec<usize> = (0..=x.n).filter(|&k| k != pa && k != pb).collect();
    ExactMatrix::from_fn(field, ks.len(), 3, |r, c| {
        let k = ks[r];
        match c {
            0 => gp[k].clone(),
            1 => &(&gpq[k] - &gp[k]) - &gq[k],
            _ => gq[k].clone(),
        }
    })
}

pub fn classify_line_type(x: &CubicForm, l: &LineOnCubic) -> Result<LineTypeReport> {
    let frame = l.line.frame();
    let q = q_matrix_at(x, &l.line);
    let rank = q.rank();
    let line_type = match rank {
        3 => LineType::First,
        2 => LineType::Second,
        r => return Err(Error::DegenerateAlongLine(r)),
    };
    let field = x.field();
    let n = x.n;
    let mut rows = vec![l.line.row(0).to_vec(), l.line.row(1).to_vec()];
    for v in q.transpose().kernel() {
        let mut y = vec![field.zero(); n + 1];
        y[2..].clone_from_slice(&v);
        rows.push(frame.mul_vec(&y));
    }
    Ok(LineTypeReport {
        q_matrix: q,
        rank,
        line_type,
        tangent_witness: ExactMatrix::from_rows(field, rows)?,
        frame,
    })
}
