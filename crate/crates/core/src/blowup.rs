//! Blow-up charts over the diagonal: second-order data, the h̄ forms, fibers
//! over a line and the Jacobian of the strict transform.

use std::fmt;

use crate::cubic::{
    chart_equations_of, chart_var, classify_line_type, q_matrix_of, CubicForm, LineOnCubic, LineType,
};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::grassmann::segre_points;
use crate::matrix::{rank_mod_p, ExactMatrix};
use crate::normal_form::{extract_s, second_type_normal_form, PencilMatrixS};
use crate::poly::{Monomial, MultiPoly};
use crate::projective::projective_points;
use crate::triple::is_higher_triple;

/// The quadratic parts φ13, φ23, φ14, φ24 of the chart equations at a line
/// in normal form, in the 2(n−1) chart variables of [`chart_var`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondOrderData {
    pub n: usize,
    pub phi13: MultiPoly,
    pub phi23: MultiPoly,
    pub phi14: MultiPoly,
    pub phi24: MultiPoly,
}

impl SecondOrderData {
    /// In the row order of the Jacobian: 13, 14, 23, 24.
    pub fn forms(&self) -> [&MultiPoly; 4] {
        [&self.phi13, &self.phi14, &self.phi23, &self.phi24]
    }

    pub fn field(&self) -> Field {
        self.phi13.field()
    }
}

/// Jacobian row labels, matching [`SecondOrderData::forms`].
pub const ROW_LABELS: [(usize, usize); 4] = [(1, 3), (1, 4), (2, 3), (2, 4)];

pub fn phi_second_order(s: &PencilMatrixS) -> Result<SecondOrderData> {
    let n = s.n();
    if n < 4 {
        return Err(Error::DimensionTooSmall { n, min: 4 });
    }
    let field = s.field();
    let nv = 2 * (n - 1);
    let v = |row: usize, i: usize| MultiPoly::var(field, nv, chart_var(n, row, i + 1));
    let mut phi = [(); 4].map(|_| MultiPoly::zero(field, nv));
    for i in 4..=n {
        for j in 4..=n {
            let a0 = s.a0.get(i - 4, j - 4);
            let a1 = s.a1.get(i - 4, j - 4);
            let x1x1 = &v(1, i) * &v(1, j);
            let x2x2 = &v(2, i) * &v(2, j);
            let mixed = &(&v(1, i) * &v(2, j)) + &(&v(1, j) * &v(2, i));
            phi[0] = &phi[0] + &x1x1.scale(a0);
            phi[1] = &(&phi[1] + &x1x1.scale(a1)) + &mixed.scale(a0);
            phi[2] = &(&phi[2] + &x2x2.scale(a0)) + &mixed.scale(a1);
            phi[3] = &phi[3] + &x2x2.scale(a1);
        }
    }
    let [phi13, phi23, phi14, phi24] = phi;
    Ok(SecondOrderData {
        n,
        phi13,
        phi23,
        phi14,
        phi24,
    })
}

/// Variable layout of the h̄ forms: chart coordinates x, then the blow-up
/// coordinates λ (same indexing), then u.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HbarVars {
    pub n: usize,
}

impl HbarVars {
    pub fn count(&self) -> usize {
        4 * self.n - 3
    }

    pub fn x(&self, row: usize, j: usize) -> usize {
        chart_var(self.n, row, j)
    }

    pub fn lambda(&self, row: usize, j: usize) -> usize {
        2 * (self.n - 1) + chart_var(self.n, row, j)
    }

    pub fn u(&self) -> usize {
        4 * (self.n - 1)
    }

    pub fn names(&self) -> Vec<String> {
        let mut names = Vec::new();
        let wide = self.n + 1 >= 10;
        for prefix in ["x", "l"] {
            for row in 1..=2 {
                for j in 3..=self.n + 1 {
                    names.push(if wide { format!("{prefix}{row}_{j}") } else { format!("{prefix}{row}{j}") });
                }
            }
        }
        names.push("u".into());
        names
    }
}

/// h̄ = (φ(x + u·λ) − φ(x)) / u for each of the four forms, in the
/// variables of [`HbarVars`].
pub fn hbar_forms(sod: &SecondOrderData) -> Result<[MultiPoly; 4]> {
    let vars = HbarVars { n: sod.n };
    let field = sod.field();
    let total = vars.count();
    let m = 2 * (sod.n - 1);
    let u = MultiPoly::var(field, total, vars.u());
    let shifted: Vec<MultiPoly> = (0..m)
        .map(|k| &MultiPoly::var(field, total, k) + &(&u * &MultiPoly::var(field, total, m + k)))
        .collect();
    let lift: Vec<usize> = (0..m).collect();
    let mut out = Vec::with_capacity(4);
    for phi in sod.forms() {
        let h = &phi.substitute(&shifted) - &phi.remap(total, &lift);
        out.push(h.divide_by_var(vars.u())?);
    }
    Ok(out.try_into().expect("four forms"))
}

/// A point of the blow-up in the chart λ_chart = 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlowupChartPoint {
    pub n: usize,
    /// (row, column) of the normalized coordinate, row ∈ {1,2}.
    pub chart: (usize, usize),
    /// λ_{row,j} at index j − 3.
    pub lambda: [Vec<FieldElement>; 2],
    pub u: FieldElement,
    pub x: [Vec<FieldElement>; 2],
}

impl BlowupChartPoint {
    /// A point over the center line (u = x = 0), in the chart of its last
    /// nonzero λ coordinate.
    pub fn on_exceptional(n: usize, lambda: [Vec<FieldElement>; 2]) -> Result<BlowupChartPoint> {
        if lambda[0].len() != n - 1 || lambda[1].len() != n - 1 {
            return Err(Error::ShapeMismatch(format!("λ rows must have {} entries", n - 1)));
        }
        let field = lambda[0][0].field();
        let (r, c) = (0..2)
            .flat_map(|r| (0..n - 1).map(move |c| (r, c))).rfind(|&(r, c)| !lambda[r][c].is_zero())
            .ok_or(Error::ZeroVector)?;
        let inv = lambda[r][c].inverse()?;
        let lambda = lambda.map(|row| row.iter().map(|v| v * &inv).collect());
        Ok(BlowupChartPoint {
            n,
            chart: (r + 1, c + 3),
            lambda,
            u: field.zero(),
            x: [vec![field.zero(); n - 1], vec![field.zero(); n - 1]],
        })
    }

    pub fn field(&self) -> Field {
        self.u.field()
    }

    pub fn lambda_at(&self, row: usize, j: usize) -> &FieldElement {
        &self.lambda[row - 1][j - 3]
    }

    fn check_chart(&self) -> Result<()> {
        let (a, b) = self.chart;
        if !(1..=2).contains(&a) || !(3..=self.n + 1).contains(&b) || !self.lambda_at(a, b).is_one() {
            return Err(Error::WrongChart {
                chart: format!("l{a}{b}"),
            });
        }
        Ok(())
    }

    /// λ_{a'i} = λ_{a'b}·λ_{ai} for the chart (a, b).
    pub fn satisfies_incidence(&self) -> bool {
        let (a, b) = self.chart;
        let other = 3 - a;
        let scale = self.lambda_at(other, b);
        (3..=self.n + 1).all(|i| *self.lambda_at(other, i) == scale * self.lambda_at(a, i))
    }

    fn on_second_type_fiber(&self) -> bool {
        self.u.is_zero()
            && self.x.iter().flatten().all(FieldElement::is_zero)
            && ROW_LABELS.iter().all(|&(r, j)| self.lambda_at(r, j).is_zero())
            && self.satisfies_incidence()
    }

    /// The P^{n−4} factor: the nonzero one of the λ rows over columns 5..n+1.
    pub fn kernel_direction(&self) -> Vec<FieldElement> {
        let (a, _) = self.chart;
        self.lambda[a - 1][2..].to_vec()
    }
}

impl fmt::Display for BlowupChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &Vec<FieldElement>| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "[{}; {}]", row(&self.lambda[0]), row(&self.lambda[1]))
    }
}

/// All F_q-points of the fiber over a line of the given type, with u = x = 0.
pub fn fiber_points(line_type: LineType, n: usize, field: Field) -> Result<Vec<BlowupChartPoint>> {
    field.require_finite()?;
    if n < 4 {
        return Err(Error::DimensionTooSmall { n, min: 4 });
    }
    let first_free = match line_type {
        LineType::Second => 5,
        LineType::First => 6,
    };
    if first_free > n + 1 {
        return Err(Error::EmptyFiber);
    }
    let m = n + 3 - first_free;
    let mut out = Vec::new();
    for sp in segre_points(m, field)? {
        let mut lambda = [vec![field.zero(); n - 1], vec![field.zero(); n - 1]];
        for r in 0..2 {
            for (k, v) in sp.lambda[r].iter().enumerate() {
                lambda[r][first_free - 3 + k] = v.clone();
            }
        }
        out.push(BlowupChartPoint::on_exceptional(n, lambda)?);
    }
    Ok(out)
}

/// Closed-form point count (q+1)·|P^{m−2}(F_q)| of V_m.
pub fn segre_count(m: usize, q: u64) -> u64 {
    if m < 2 {
        return 0;
    }
    (q + 1) * crate::projective::projective_count(q, m - 2)
}

/// The assembled Jacobian at one fiber point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobianAssembly {
    pub matrix: ExactMatrix,
    pub rank: usize,
    /// Column labels: x13.., x23.., then λ's other than the chart one, then u.
    pub columns: Vec<String>,
    /// Left kernel basis when the rank is below n+5.
    pub drop_witness: Option<Vec<Vec<FieldElement>>>,
}

/// Symbolic partials of the h̄ forms at u = x = 0, as polynomials in the λ
/// coordinates (indexed like the chart variables). Chart independent, so
/// one template serves every fiber point of a given S.
#[derive(Clone, Debug)]
pub struct JacobianTemplate {
    n: usize,
    field: Field,
    /// [row][x column] linear forms in λ.
    dx: Vec<Vec<MultiPoly>>,
    /// [row] quadratic forms in λ.
    du: Vec<MultiPoly>,
    compiled: Option<Compiled>,
}

#[derive(Clone, Debug)]
struct Compiled {
    p: u32,
    // (coefficient, λ indices) per entry
    dx: Vec<Vec<Vec<(u64, [usize; 2])>>>,
    du: Vec<Vec<(u64, [usize; 2])>>,
}

const NO_VAR: usize = usize::MAX;

fn compile_poly(poly: &MultiPoly) -> Vec<(u64, [usize; 2])> {
    poly.terms()
        .map(|(m, c)| {
            let mut idx = [NO_VAR; 2];
            let mut k = 0;
            for (v, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    idx[k] = v;
                    k += 1;
                }
            }
            (c.residue().expect("prime field") as u64, idx)
        })
        .collect()
}

impl JacobianTemplate {
    pub fn new(s: &PencilMatrixS) -> Result<JacobianTemplate> {
        let sod = phi_second_order(s)?;
        let hbar = hbar_forms(&sod)?;
        let n = sod.n;
        let vars = HbarVars { n };
        let field = s.field();
        let m = 2 * (n - 1);
        let zero = field.zero();
        let at_center = |p: MultiPoly| {
            let mut p = p;
            for k in 0..m {
                p = p.set_var(k, &zero);
            }
            p = p.set_var(vars.u(), &zero);
            let map: Vec<usize> = (0..vars.count()).map(|k| if k >= m && k < 2 * m { k - m } else { 0 }).collect();
            p.remap(m, &map)
        };
        let dx: Vec<Vec<MultiPoly>> = hbar
            .iter()
            .map(|h| (0..m).map(|k| at_center(h.derivative(k))).collect())
            .collect();
        let du: Vec<MultiPoly> = hbar.iter().map(|h| at_center(h.derivative(vars.u()))).collect();
        let compiled = match field {
            Field::Prime { p } => Some(Compiled {
                p,
                dx: dx.iter().map(|row| row.iter().map(compile_poly).collect()).collect(),
                du: du.iter().map(compile_poly).collect(),
            }),
            _ => None,
        };
        Ok(JacobianTemplate {
            n,
            field,
            dx,
            du,
            compiled,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The symbolic entry ∂h̄_row/∂x_k at the center, a linear form in λ.
    pub fn dx(&self, row: usize, k: usize) -> &MultiPoly {
        &self.dx[row][k]
    }

    pub fn du(&self, row: usize) -> &MultiPoly {
        &self.du[row]
    }

    fn validate(&self, pt: &BlowupChartPoint) -> Result<()> {
        if pt.n != self.n {
            return Err(Error::ShapeMismatch(format!("point has n = {}, S has n = {}", pt.n, self.n)));
        }
        if pt.field() != self.field {
            return Err(Error::FieldMismatch {
                expected: self.field.to_string(),
                found: pt.field().to_string(),
            });
        }
        pt.check_chart()?;
        if !pt.on_second_type_fiber() {
            return Err(Error::InvalidArgument("point is not on the fiber over a second-type line".into()));
        }
        Ok(())
    }

    fn lambda_columns(&self, chart: (usize, usize)) -> Vec<(usize, usize)> {
        (1..=2)
            .flat_map(|r| (3..=self.n + 1).map(move |j| (r, j)))
            .filter(|&rj| rj != chart)
            .collect()
    }

    pub fn column_labels(&self, chart: (usize, usize)) -> Vec<String> {
        let vars = HbarVars { n: self.n };
        let names = vars.names();
        let mut out: Vec<String> = names[..2 * (self.n - 1)].to_vec();
        for (r, j) in self.lambda_columns(chart) {
            out.push(names[vars.lambda(r, j)].clone());
        }
        out.push("u".into());
        out
    }

    /// The (n+6)×(4n−4) Jacobian at a fiber point.
    pub fn assemble(&self, pt: &BlowupChartPoint) -> Result<JacobianAssembly> {
        self.validate(pt)?;
        let n = self.n;
        let field = self.field;
        let m = 2 * (n - 1);
        let lam: Vec<FieldElement> = pt.lambda.iter().flatten().cloned().collect();
        let lcols = self.lambda_columns(pt.chart);
        let lcol = |rj: (usize, usize)| lcols.iter().position(|&c| c == rj).map(|k| m + k);
        let cols = 4 * n - 4;
        let ucol = cols - 1;
        let mut mat = ExactMatrix::zeros(field, n + 6, cols);
        for (row, &(r, j)) in ROW_LABELS.iter().enumerate() {
            for k in 0..m {
                mat.set(row, k, self.dx[row][k].evaluate(&lam));
            }
            mat.set(row, lcol((r, j)).expect("chart avoids rows 3 and 4"), field.one());
            mat.set(row, ucol, self.du[row].evaluate(&lam));
            mat.set(4 + row, chart_var(n, r, j), field.one());
        }
        let (a, b) = pt.chart;
        let other = 3 - a;
        let mut row = 8;
        for i in (3..=n + 1).filter(|&i| i != b) {
            // λ_{a'i} − λ_{a'b}·λ_{ai}
            mat.set(row, lcol((other, i)).expect("column"), field.one());
            mat.set(row, lcol((other, b)).expect("column"), -pt.lambda_at(a, i));
            mat.set(row, lcol((a, i)).expect("column"), -pt.lambda_at(other, b));
            row += 1;
        }
        let rank = mat.rank();
        let drop_witness = (rank < n + 5).then(|| mat.transpose().kernel());
        Ok(JacobianAssembly {
            columns: self.column_labels(pt.chart),
            matrix: mat,
            rank,
            drop_witness,
        })
    }

    /// Rank only; word-size arithmetic over prime fields.
    pub fn rank_at(&self, pt: &BlowupChartPoint) -> Result<usize> {
        let Some(c) = &self.compiled else {
            return Ok(self.assemble(pt)?.rank);
        };
        self.validate(pt)?;
        let n = self.n;
        let p = c.p as u64;
        let m = 2 * (n - 1);
        let lam: Vec<u64> = pt
            .lambda
            .iter()
            .flatten()
            .map(|v| v.residue().expect("prime") as u64)
            .collect();
        let eval = |terms: &[(u64, [usize; 2])]| -> u32 {
            let mut acc = 0u64;
            for &(coef, [i, j]) in terms {
                let mut t = coef;
                if i != NO_VAR {
                    t = t * lam[i] % p;
                }
                if j != NO_VAR {
                    t = t * lam[j] % p;
                }
                acc += t;
            }
            (acc % p) as u32
        };
        let (a, b) = pt.chart;
        let lidx = |r: usize, j: usize| (r - 1) * (n - 1) + (j - 3);
        let chart_idx = lidx(a, b);
        let lcol = |r: usize, j: usize| {
            let k = lidx(r, j);
            m + if k > chart_idx { k - 1 } else { k }
        };
        let cols = 4 * n - 4;
        let rows = n + 6;
        let mut data = vec![0u32; rows * cols];
        for (row, &(r, j)) in ROW_LABELS.iter().enumerate() {
            for k in 0..m {
                data[row * cols + k] = eval(&c.dx[row][k]);
            }
            data[row * cols + lcol(r, j)] = 1;
            data[row * cols + cols - 1] = eval(&c.du[row]);
            data[(4 + row) * cols + chart_var(n, r, j)] = 1;
        }
        let other = 3 - a;
        let neg = |v: u64| ((p - v % p) % p) as u32;
        let mut row = 8;
        for i in (3..=n + 1).filter(|&i| i != b) {
            data[row * cols + lcol(other, i)] = 1;
            data[row * cols + lcol(other, b)] = neg(lam[lidx(a, i)]);
            data[row * cols + lcol(a, i)] = neg(lam[lidx(other, b)]);
            row += 1;
        }
        Ok(rank_mod_p(&mut data, rows, cols, c.p))
    }
}

pub fn jacobian_at(s: &PencilMatrixS, pt: &BlowupChartPoint) -> Result<JacobianAssembly> {
    JacobianTemplate::new(s)?.assemble(pt)
}

/// The Jacobian with the extra row du, i.e. restricted to the exceptional
/// divisor u = 0.
pub fn jacobian_on_exceptional(s: &PencilMatrixS, pt: &BlowupChartPoint) -> Result<JacobianAssembly> {
    let base = jacobian_at(s, pt)?;
    let field = s.field();
    let cols = base.matrix.cols();
    let mut du = vec![field.zero(); cols];
    du[cols - 1] = field.one();
    let matrix = base.matrix.stack(&ExactMatrix::from_rows(field, vec![du])?)?;
    let rank = matrix.rank();
    let drop_witness = (rank < s.n() + 6).then(|| matrix.transpose().kernel());
    Ok(JacobianAssembly {
        matrix,
        rank,
        columns: base.columns,
        drop_witness,
    })
}

/// λ13 = λ14 = λ23 = λ24 = 0 and both λ rows over columns 5..n+1 lie in the
/// common kernel of A0 and A1.
pub fn rank_drop_predicate(s: &PencilMatrixS, pt: &BlowupChartPoint) -> bool {
    if ROW_LABELS.iter().any(|&(r, j)| !pt.lambda_at(r, j).is_zero()) {
        return false;
    }
    pt.lambda.iter().all(|row| {
        let w = &row[2..];
        s.a0.mul_vec(w).iter().all(FieldElement::is_zero) && s.a1.mul_vec(w).iter().all(FieldElement::is_zero)
    })
}

/// Coordinates along a first-type line with q-matrix [I3; 0]: the chart
/// equations then have linear parts x13, x14 + x23, x15 + x24, x25.
/// Returns the full change x = M·y.
pub fn first_type_frame(x: &CubicForm, l: &LineOnCubic) -> Result<ExactMatrix> {
    let report = classify_line_type(x, l)?;
    if report.line_type != LineType::First {
        return Err(Error::WrongType { expected: "first" });
    }
    let n = x.n();
    let field = x.field();
    let q = &report.q_matrix;
    let (_, pivots) = q.transpose().rref();
    let sub = q.submatrix(&pivots, &[0, 1, 2]).inverse()?;
    let mut r_rows = Vec::with_capacity(n - 1);
    for i in 0..3 {
        let mut row = vec![field.zero(); n - 1];
        for (k, &pk) in pivots.iter().enumerate() {
            row[pk] = sub.get(i, k).clone();
        }
        r_rows.push(row);
    }
    r_rows.extend(q.transpose().kernel());
    let t = ExactMatrix::from_rows(field, r_rows)?.transpose();
    let block = ExactMatrix::from_fn(field, n + 1, n + 1, |i, j| match (i, j) {
        (i, j) if i < 2 || j < 2 => {
            if i == j {
                field.one()
            } else {
                field.zero()
            }
        }
        (i, j) => t.get(i - 2, j - 2).clone(),
    });
    report.frame.mul(&block)
}

/// Linear parts of the four chart equations restricted to the columns
/// λ13, λ14, λ15, λ23, λ24, λ25, stacked over the incidence rows
/// t·λ1i − s·λ2i (i = 3, 4, 5) of a fiber point with P^1 factor (s:t).
pub fn first_type_matrix(linear: &ExactMatrix, s: &FieldElement, t: &FieldElement) -> Result<ExactMatrix> {
    if linear.rows() != 4 || linear.cols() != 6 {
        return Err(Error::ShapeMismatch("linear parts must be 4×6".into()));
    }
    let field = linear.field();
    let mut rows = linear.to_rows();
    for i in 0..3 {
        let mut row = vec![field.zero(); 6];
        row[i] = t.clone();
        row[3 + i] = -s;
        rows.push(row);
    }
    ExactMatrix::from_rows(field, rows)
}

/// The 4×6 linear-part block of a first-type line in adapted coordinates.
pub fn first_type_linear_parts(x: &CubicForm, l: &LineOnCubic) -> Result<ExactMatrix> {
    let n = x.n();
    if n < 4 {
        return Err(Error::DimensionTooSmall { n, min: 4 });
    }
    let frame = first_type_frame(x, l)?;
    let moved = x.transform(&frame)?;
    debug_assert_eq!(q_matrix_of(&moved).rank(), 3);
    let eqs = chart_equations_of(&moved);
    let field = x.field();
    let m = 2 * (n - 1);
    let cols: Vec<usize> = [(1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]
        .iter()
        .map(|&(r, j)| chart_var(n, r, j))
        .collect();
    let rows = eqs
        .iter()
        .map(|e| {
            cols.iter()
                .map(|&c| {
                    let mut exps = vec![0u16; m];
                    exps[c] = 1;
                    e.coefficient(&exps)
                })
                .collect()
        })
        .collect();
    ExactMatrix::from_rows(field, rows)
}

/// Rank 6 of the 7×6 matrix at every (s:t) ∈ P^1 over the field of X.
pub fn first_type_transversality(x: &CubicForm, l: &LineOnCubic) -> Result<bool> {
    let linear = first_type_linear_parts(x, l)?;
    let field = x.field();
    let pts = if field.is_finite() {
        projective_points(field, 1)?
    } else {
        vec![vec![field.one(), field.zero()], vec![field.zero(), field.one()], vec![field.one(), field.one()]]
    };
    for st in pts {
        if first_type_matrix(&linear, &st[0], &st[1])?.rank() != 6 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certificate data for one second-type line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineCertificate {
    pub line: crate::grassmann::LineChart,
    pub s: PencilMatrixS,
    pub higher_triple: bool,
    pub fiber_points: usize,
    pub drop_points: usize,
    /// Fiber points where the rank disagrees with the predicate.
    pub mismatches: Vec<BlowupChartPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothnessCertificate {
    pub n: usize,
    pub field: Field,
    pub lines_total: usize,
    pub first_type: usize,
    pub lines: Vec<LineCertificate>,
    /// Codimension n − 3 of D_F in F × F; 1 for threefolds.
    pub center_codimension: usize,
}

impl SmoothnessCertificate {
    pub fn rank_drop_found(&self) -> bool {
        self.lines.iter().any(|l| l.drop_points > 0)
    }

    pub fn higher_triple_found(&self) -> bool {
        self.lines.iter().any(|l| l.higher_triple)
    }

    pub fn mismatches(&self) -> usize {
        self.lines.iter().map(|l| l.mismatches.len()).sum()
    }

    /// No rank drop ⟺ no higher triple line, and rank matched the predicate
    /// at every point.
    pub fn consistent(&self) -> bool {
        self.mismatches() == 0 && self.rank_drop_found() == self.higher_triple_found()
    }
}

/// Check one S over all fiber points: returns (points, drops, mismatches).
pub fn check_fiber(s: &PencilMatrixS) -> Result<(usize, usize, Vec<BlowupChartPoint>)> {
    let n = s.n();
    let template = JacobianTemplate::new(s)?;
    let pts = fiber_points(LineType::Second, n, s.field())?;
    let mut drops = 0;
    let mut bad = Vec::new();
    for pt in &pts {
        let rank = template.rank_at(pt)?;
        let pred = rank_drop_predicate(s, pt);
        if pred {
            drops += 1;
        }
        if rank != n + 5 - usize::from(pred) {
            bad.push(pt.clone());
        }
    }
    Ok((pts.len(), drops, bad))
}

pub fn smoothness_certificate(x: &CubicForm, field: Field) -> Result<SmoothnessCertificate> {
    smoothness_certificate_range(x, field, None)
}

/// As [`smoothness_certificate`] over the lines in `range` of the canonical
/// line order; `lines_total` and `first_type` count that range only.
pub fn smoothness_certificate_range(x: &CubicForm, field: Field, range: Option<std::ops::Range<usize>>) -> Result<SmoothnessCertificate> {
    field.require_finite()?;
    let n = x.n();
    if n < 4 {
        return Err(Error::DimensionTooSmall { n, min: 4 });
    }
    let xf = x.embed(field)?;
    let lines = crate::cubic::fano_points(&xf, field)?;
    let range = range.unwrap_or(0..lines.len());
    let picked = &lines[range.start.min(lines.len())..range.end.min(lines.len())];
    let mut first = 0;
    let mut certs = Vec::new();
    for l in picked {
        if classify_line_type(&xf, l)?.line_type == LineType::First {
            first += 1;
            continue;
        }
        let nf = second_type_normal_form(&xf, l)?;
        let s = extract_s(&nf)?;
        let (higher_triple, _) = is_higher_triple(&s);
        let (fiber_points, drop_points, mismatches) = check_fiber(&s)?;
        certs.push(LineCertificate {
            line: l.line.clone(),
            s,
            higher_triple,
            fiber_points,
            drop_points,
            mismatches,
        });
    }
    Ok(SmoothnessCertificate {
        n,
        field,
        lines_total: picked.len(),
        first_type: first,
        lines: certs,
        center_codimension: n - 3,
    })
}

/// Monomial-level check of the term pattern λ_ab·x_cd + λ_cd·x_ab + λ_ab·λ_cd·u
/// of h̄ against the quadratic φ it came from.
pub fn hbar_matches_pattern(phi: &MultiPoly, hbar: &MultiPoly, n: usize) -> bool {
    let vars = HbarVars { n };
    let total = vars.count();
    let m = 2 * (n - 1);
    let mut expected = MultiPoly::zero(phi.field(), total);
    for (mono, c) in phi.terms() {
        let idx: Vec<usize> = mono
            .exponents()
            .iter()
            .enumerate()
            .flat_map(|(v, &e)| std::iter::repeat_n(v, e as usize))
            .collect();
        let (a, b) = (idx[0], idx[1]);
        let mut add = |vs: &[usize]| {
            let mut e = vec![0u16; total];
            for &v in vs {
                e[v] += 1;
            }
            expected.add_term(Monomial(e), c.clone());
        };
        add(&[m + a, b]);
        add(&[m + b, a]);
        add(&[m + a, m + b, vars.u()]);
    }
    expected == *hbar
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::fano_points;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn s1(f: Field, a0: i64, a1: i64) -> PencilMatrixS {
        PencilMatrixS::new(ExactMatrix::from_i64(f, &[&[a0]]), ExactMatrix::from_i64(f, &[&[a1]])).unwrap()
    }

    #[test]
    fn phi_n4_example() {
        let f = gf(7);
        let sod = phi_second_order(&s1(f, 1, 0)).unwrap();
        let names = crate::cubic::chart_variable_names(4);
        assert_eq!(sod.phi13.display_with(&names), "x15^2");
        assert_eq!(sod.phi23.display_with(&names), "2*x15*x25");
        assert_eq!(sod.phi14.display_with(&names), "x25^2");
        assert!(sod.phi24.is_zero());
        let zero = phi_second_order(&s1(f, 0, 0)).unwrap();
        assert!(zero.forms().iter().all(|p| p.is_zero()));
    }

    #[test]
    fn hbar_n4_example() {
        let f = gf(7);
        let sod = phi_second_order(&s1(f, 1, 0)).unwrap();
        let h = hbar_forms(&sod).unwrap();
        let names = HbarVars { n: 4 }.names();
        // row order 13, 14, 23, 24
        assert_eq!(h[1].display_with(&names), "l25^2*u + 2*x25*l25");
        for (phi, hb) in sod.forms().iter().zip(&h) {
            assert!(hbar_matches_pattern(phi, hb, 4));
        }
    }

    #[test]
    fn fiber_counts() {
        let f = gf(5);
        assert_eq!(fiber_points(LineType::Second, 4, f).unwrap().len(), 6);
        assert_eq!(fiber_points(LineType::Second, 5, f).unwrap().len(), 36);
        assert_eq!(fiber_points(LineType::First, 5, f).unwrap().len(), 6);
        assert_eq!(fiber_points(LineType::First, 4, f), Err(Error::EmptyFiber));
        assert_eq!(segre_count(3, 5), 36);
    }

    #[test]
    fn n4_ranks() {
        let f = gf(7);
        for pt in fiber_points(LineType::Second, 4, f).unwrap() {
            assert_eq!(jacobian_at(&s1(f, 1, 1), &pt).unwrap().rank, 9);
            let j = jacobian_at(&s1(f, 0, 0), &pt).unwrap();
            assert_eq!(j.rank, 8);
            assert_eq!(j.matrix.rows(), 10);
            assert_eq!(j.matrix.cols(), 12);
            assert_eq!(j.drop_witness.unwrap().len(), 2);
            assert!(rank_drop_predicate(&s1(f, 0, 0), &pt));
        }
    }

    #[test]
    fn fast_rank_agrees() {
        let f = gf(7);
        let s = PencilMatrixS::new(
            ExactMatrix::from_i64(f, &[&[1, 2], &[2, 0]]),
            ExactMatrix::from_i64(f, &[&[0, 1], &[1, 3]]),
        )
        .unwrap();
        let t = JacobianTemplate::new(&s).unwrap();
        for pt in fiber_points(LineType::Second, 5, f).unwrap() {
            assert_eq!(t.rank_at(&pt).unwrap(), t.assemble(&pt).unwrap().rank);
        }
    }

    #[test]
    fn wrong_chart_rejected() {
        let f = gf(7);
        let mut pt = fiber_points(LineType::Second, 4, f).unwrap().remove(0);
        let (a, b) = pt.chart;
        pt.lambda[a - 1][b - 3] = f.from_i64(2);
        assert!(matches!(jacobian_at(&s1(f, 1, 1), &pt), Err(Error::WrongChart { .. })));
    }

    #[test]
    fn first_type_on_fermat_fourfold() {
        let f = gf(7);
        let x = CubicForm::fermat(f, 5);
        let mut seen = 0;
        for l in fano_points(&x, f).unwrap().iter().step_by(97) {
            if classify_line_type(&x, l).unwrap().line_type == LineType::First {
                assert!(first_type_transversality(&x, l).unwrap());
                seen += 1;
            }
        }
        assert!(seen > 0);
        let zero = ExactMatrix::zeros(f, 4, 6);
        assert_eq!(first_type_matrix(&zero, &f.one(), &f.zero()).unwrap().rank(), 3);
    }
}
