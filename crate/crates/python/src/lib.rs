//! Python bindings. Field elements cross the boundary as strings in the
//! descriptor syntax ("3", "3/2", "2a+1").

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fanolab_core::blowup::{check_fiber as core_check_fiber, fiber_points, first_type_transversality, segre_count as core_segre_count};
use fanolab_core::cubic::{classify_line_type, cubic_is_smooth, fano_points, skew_pair_count, CubicForm, LineOnCubic, LineType};
use fanolab_core::driver::{self, fmt_vector, parse_line, CubicDescriptor, RunOptions, Shard};
use fanolab_core::eckardt::find_eckardt;
use fanolab_core::grassmann::LineChart;
use fanolab_core::normal_form::{extract_s, second_type_normal_form, PencilMatrixS};
use fanolab_core::triple::{det_s as core_det_s, is_higher_triple as core_is_higher_triple};
use fanolab_core::{Error, ExactMatrix, Field, FieldElement};

create_exception!(fanolab, FanolabError, PyValueError);

fn err(e: Error) -> PyErr {
    FanolabError::new_err(format!("[{}] {e}", e.code()))
}

fn strings(v: &[FieldElement]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

fn elements(field: Field, v: &[String]) -> PyResult<Vec<FieldElement>> {
    v.iter().map(|c| field.parse_element(c).map_err(err)).collect()
}

fn type_name(t: LineType) -> &'static str {
    match t {
        LineType::First => "first",
        LineType::Second => "second",
    }
}

/// A cubic form over GF(p), GF(p^2) or QQ.
#[pyclass(module = "fanolab", frozen)]
struct Cubic {
    inner: CubicForm,
}

/// A line, stored as its reduced 2×(n+1) row basis.
#[pyclass(module = "fanolab", frozen)]
struct Line {
    inner: LineChart,
}

#[pymethods]
impl Line {
    #[new]
    fn new(field: &str, rows: Vec<Vec<String>>) -> PyResult<Self> {
        let f = parse_field(field)?;
        if rows.len() != 2 {
            return Err(FanolabError::new_err("a line needs two rows"));
        }
        let a = elements(f, &rows[0])?;
        let b = elements(f, &rows[1])?;
        Ok(Line { inner: LineChart::from_rows(f, &a, &b).map_err(err)? })
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<String>> {
        vec![strings(self.inner.row(0)), strings(self.inner.row(1))]
    }

    fn __repr__(&self) -> String {
        format!("Line({})", driver::fmt_line(&self.inner))
    }

    fn __eq__(&self, other: &Line) -> bool {
        self.inner == other.inner
    }

    fn meets(&self, other: &Line) -> bool {
        fanolab_core::grassmann::lines_meet(&self.inner, &other.inner)
    }
}

/// "GF(7)", "GF(7^2)" or "QQ".
fn parse_field(text: &str) -> PyResult<Field> {
    let t = text.trim();
    if t == "QQ" {
        return Ok(Field::rational());
    }
    let inner = t
        .strip_prefix("GF(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| FanolabError::new_err(format!("unknown field {text:?}")))?;
    let (p, k) = inner.split_once('^').unwrap_or((inner, "1"));
    let p: u64 = p.parse().map_err(|_| FanolabError::new_err(format!("bad field {text:?}")))?;
    let k: u32 = k.parse().map_err(|_| FanolabError::new_err(format!("bad field {text:?}")))?;
    Field::from_parts(p, k).map_err(err)
}

#[pymethods]
impl Cubic {
    /// Parse a descriptor document.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let d = driver::parse_cubic(text).map_err(err)?;
        Ok(Cubic { inner: d.cubic().map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (p, n, ext = 1))]
    fn fermat(p: u64, n: usize, ext: u32) -> PyResult<Self> {
        let f = Field::from_parts(p, ext).map_err(err)?;
        Ok(Cubic { inner: CubicForm::fermat(f, n) })
    }

    #[staticmethod]
    #[pyo3(signature = (p, n, seed, ext = 1))]
    fn random(p: u64, n: usize, seed: u64, ext: u32) -> PyResult<Self> {
        let f = Field::from_parts(p, ext).map_err(err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Cubic { inner: CubicForm::random(f, n, &mut rng) })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn field(&self) -> String {
        self.inner.field().to_string()
    }

    /// Canonical descriptor text.
    fn emit(&self) -> String {
        CubicDescriptor::from_cubic(&self.inner).emit()
    }

    fn __repr__(&self) -> String {
        format!("Cubic({} over {})", self.inner.form(), self.inner.field())
    }

    fn evaluate(&self, point: Vec<String>) -> PyResult<String> {
        if point.len() != self.inner.n() + 1 {
            return Err(FanolabError::new_err(format!("expected {} coordinates", self.inner.n() + 1)));
        }
        let p = elements(self.inner.field(), &point)?;
        Ok(self.inner.evaluate(&p).to_string())
    }

    /// False when a rational singular point exists.
    fn has_no_rational_singular_point(&self) -> PyResult<bool> {
        Ok(cubic_is_smooth(&self.inner, 1).map_err(err)?.is_smooth())
    }

    /// All lines over the field of the cubic, in canonical order.
    fn lines(&self) -> PyResult<Vec<Line>> {
        let lines = fano_points(&self.inner, self.inner.field()).map_err(err)?;
        Ok(lines.into_iter().map(|l| Line { inner: l.line }).collect())
    }

    fn contains_line(&self, line: &Line) -> bool {
        line.inner.n() == self.inner.n()
            && line.inner.field() == self.inner.field()
            && fanolab_core::cubic::line_in_cubic(&self.inner, &line.inner)
    }

    /// "first" or "second".
    fn line_type(&self, line: &Line) -> PyResult<&'static str> {
        let l = self.on(line)?;
        Ok(type_name(classify_line_type(&self.inner, &l).map_err(err)?.line_type))
    }

    /// Entries of A0 and A1 from the normal form along a second-type line.
    fn pencil(&self, line: &Line) -> PyResult<(Vec<Vec<String>>, Vec<Vec<String>>)> {
        let s = self.pencil_of(line)?;
        Ok((matrix_strings(&s.a0), matrix_strings(&s.a1)))
    }

    /// Common kernel of A0 and A1; empty unless the line is higher triple.
    fn higher_triple_kernel(&self, line: &Line) -> PyResult<Vec<Vec<String>>> {
        let s = self.pencil_of(line)?;
        Ok(core_is_higher_triple(&s).1.iter().map(|v| strings(v)).collect())
    }

    fn first_type_transversal(&self, line: &Line) -> PyResult<bool> {
        first_type_transversality(&self.inner, &self.on(line)?).map_err(err)
    }

    /// Rational Eckardt points.
    fn eckardt_points(&self) -> PyResult<Vec<Vec<String>>> {
        let pts = find_eckardt(&self.inner, self.inner.field()).map_err(err)?;
        Ok(pts.iter().map(|r| strings(&r.point)).collect())
    }
}

impl Cubic {
    fn on(&self, line: &Line) -> PyResult<LineOnCubic> {
        LineOnCubic::new(&self.inner, line.inner.clone()).map_err(err)
    }

    fn pencil_of(&self, line: &Line) -> PyResult<PencilMatrixS> {
        let nf = second_type_normal_form(&self.inner, &self.on(line)?).map_err(err)?;
        extract_s(&nf).map_err(err)
    }
}

fn matrix_strings(m: &ExactMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| strings(r)).collect()
}

fn pencil_from(p: u64, a0: Vec<Vec<i64>>, a1: Vec<Vec<i64>>) -> PyResult<PencilMatrixS> {
    let f = Field::prime(p).map_err(err)?;
    let r0: Vec<&[i64]> = a0.iter().map(Vec::as_slice).collect();
    let r1: Vec<&[i64]> = a1.iter().map(Vec::as_slice).collect();
    PencilMatrixS::new(ExactMatrix::from_i64(f, &r0), ExactMatrix::from_i64(f, &r1)).map_err(err)
}

/// Ordered pairs of disjoint lines.
#[pyfunction]
fn skew_pairs(lines: Vec<PyRef<'_, Line>>) -> usize {
    let ls: Vec<LineOnCubic> = lines.iter().map(|l| LineOnCubic { line: l.inner.clone() }).collect();
    skew_pair_count(&ls)
}

/// Closed-form size of the exceptional fiber (q+1)·|P^{m-2}(F_q)|.
#[pyfunction]
fn segre_count(m: usize, q: u64) -> u64 {
    core_segre_count(m, q)
}

/// Number of rational points in the exceptional fiber over GF(p).
#[pyfunction]
fn fiber_size(line_type: &str, n: usize, p: u64) -> PyResult<usize> {
    let t = match line_type {
        "first" => LineType::First,
        "second" => LineType::Second,
        other => return Err(FanolabError::new_err(format!("line type {other:?}"))),
    };
    let f = Field::prime(p).map_err(err)?;
    Ok(fiber_points(t, n, f).map_err(err)?.len())
}

/// (fiber points, rank drops, mismatches) of the blow-up Jacobian for
/// S = A0·x0 + A1·x1 over GF(p).
#[pyfunction]
fn check_fiber(p: u64, a0: Vec<Vec<i64>>, a1: Vec<Vec<i64>>) -> PyResult<(usize, usize, usize)> {
    let s = pencil_from(p, a0, a1)?;
    let (pts, drops, bad) = core_check_fiber(&s).map_err(err)?;
    Ok((pts, drops, bad.len()))
}

#[pyfunction]
fn is_higher_triple(p: u64, a0: Vec<Vec<i64>>, a1: Vec<Vec<i64>>) -> PyResult<bool> {
    Ok(core_is_higher_triple(&pencil_from(p, a0, a1)?).0)
}

/// det S as a polynomial in x0, x1.
#[pyfunction]
fn det_s(p: u64, a0: Vec<Vec<i64>>, a1: Vec<Vec<i64>>) -> PyResult<String> {
    Ok(core_det_s(&pencil_from(p, a0, a1)?).to_string())
}

/// Run a driver command on descriptor text; returns (report, exit code).
#[pyfunction]
#[pyo3(signature = (command, descriptor, characteristic, ext, seed, shard = None, draws = 100))]
fn run_command(
    command: &str,
    descriptor: &str,
    characteristic: u64,
    ext: u32,
    seed: u64,
    shard: Option<&str>,
    draws: usize,
) -> PyResult<(String, i32)> {
    let cmd = command.parse().map_err(err)?;
    let d = driver::parse_cubic(descriptor).map_err(err)?;
    let options = RunOptions {
        shard: shard.map(str::parse::<Shard>).transpose().map_err(err)?.unwrap_or(Shard::WHOLE),
        draws,
        ..RunOptions::new(characteristic, ext, seed)
    };
    let report = driver::run_command(cmd, &d, &options).map_err(err)?;
    Ok((report.render(), report.exit_code()))
}

/// Parse a line written as in reports ("1,0,0,3;0,1,3,0").
#[pyfunction]
fn line_from_report(field: &str, text: &str) -> PyResult<Line> {
    Ok(Line { inner: parse_line(parse_field(field)?, text).map_err(err)? })
}

/// Format a point as in reports.
#[pyfunction]
fn format_point(field: &str, point: Vec<String>) -> PyResult<String> {
    Ok(fmt_vector(&elements(parse_field(field)?, &point)?))
}

#[pymodule(name = "fanolab")]
fn fanolab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FanolabError", m.py().get_type::<FanolabError>())?;
    m.add("__version__", driver::VERSION)?;
    m.add_class::<Cubic>()?;
    m.add_class::<Line>()?;
    m.add_function(wrap_pyfunction!(skew_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(segre_count, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_size, m)?)?;
    m.add_function(wrap_pyfunction!(check_fiber, m)?)?;
    m.add_function(wrap_pyfunction!(is_higher_triple, m)?)?;
    m.add_function(wrap_pyfunction!(det_s, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    m.add_function(wrap_pyfunction!(line_from_report, m)?)?;
    m.add_function(wrap_pyfunction!(format_point, m)?)?;
    Ok(())
}
