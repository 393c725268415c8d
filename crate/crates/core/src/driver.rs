//! Cubic descriptor files, run reports and command dispatch.
//!
//! A descriptor is a line-oriented text document:
//!
//! ```text
//! fanolab-cubic 1
//! char 7
//! ext 1
//! n 3
//! term 3 0 0 0 : 1
//! term 0 3 0 0 : 1
//! term 0 0 3 0 : 1
//! term 0 0 0 3 : 1
//! ```
//!
//! `#` starts a comment. Coefficients are written as integers, fractions
//! `n/d`, or linear expressions `3a+2` in the generator of GF(p^2).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use crate::blowup::{check_fiber, first_type_transversality};
use crate::cubic::{classify_line_type, fano_points, line_in_cubic, skew_pair_count, CubicForm, LineOnCubic, LineType};
use crate::eckardt::{eckardt_family, find_eckardt, is_eckardt};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::grassmann::LineChart;
use crate::matrix::ExactMatrix;
use crate::normal_form::{extract_s, has_normal_form_shape, second_type_normal_form};
use crate::sections::{datum_to_section, type_iv_data, SectionTag};
use crate::triple::{genericity_campaign_range, is_higher_triple, plane_and_multiplicity, PlaneContact};

pub const DESCRIPTOR_HEADER: &str = "fanolab-cubic 1";
pub const REPORT_HEADER: &str = "fanolab-report 1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A cubic as written in a descriptor file. Coefficient strings are kept
/// verbatim; [`CubicDescriptor::canonical`] normalizes them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicDescriptor {
    pub characteristic: u64,
    pub extension_degree: u32,
    pub n: usize,
    pub monomials: Vec<(Vec<u16>, String)>,
}

fn check_characteristic(p: u64) -> Result<()> {
    if p == 0 {
        return Ok(());
    }
    if p < 5 {
        return Err(Error::BadCharacteristic(format!("characteristic {p} (need p >= 5 or 0)")));
    }
    Field::prime(p).map(|_| ()).map_err(|e| Error::BadCharacteristic(e.to_string()))
}

fn descriptor_field(characteristic: u64, degree: u32) -> Result<Field> {
    check_characteristic(characteristic)?;
    if characteristic == 0 && degree != 1 {
        return Err(Error::BadCharacteristic(format!("extension degree {degree} over the rationals")));
    }
    if degree != 1 && degree != 2 {
        return Err(Error::BadCharacteristic(format!("extension degree {degree}")));
    }
    Field::from_parts(characteristic, degree).map_err(|e| Error::BadCharacteristic(e.to_string()))
}

/// Whitespace-separated tokens with their 1-based byte columns in `line`.
fn tokens(line: &str, part: &str) -> Vec<(usize, String)> {
    let base = part.as_ptr() as usize - line.as_ptr() as usize;
    part.split_whitespace()
        .map(|t| (t.as_ptr() as usize - part.as_ptr() as usize + base + 1, t.to_string()))
        .collect()
}

pub fn parse_cubic(text: &str) -> Result<CubicDescriptor> {
    let mut header = false;
    let mut characteristic: Option<u64> = None;
    let mut degree: Option<u32> = None;
    let mut n: Option<usize> = None;
    let mut field: Option<Field> = None;
    let mut monomials: Vec<(Vec<u16>, String)> = Vec::new();
    let mut seen: BTreeMap<Vec<u16>, usize> = BTreeMap::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(raw, content);
        let Some((col, key)) = toks.first().cloned() else {
            continue;
        };
        let err = |column: usize, message: String| Error::Parse { line: lineno, column, message };
        if !header {
            if content.trim() != DESCRIPTOR_HEADER {
                return Err(err(col, format!("expected `{DESCRIPTOR_HEADER}`")));
            }
            header = true;
            continue;
        }
        let value = |name: &str| -> Result<(usize, String)> {
            match toks.as_slice() {
                [_, v] => Ok(v.clone()),
                _ => Err(err(col, format!("`{name}` takes exactly one value"))),
            }
        };
        match key.as_str() {
            "char" | "ext" | "n" if !monomials.is_empty() => {
                return Err(err(col, format!("`{key}` after the first term")));
            }
            "char" => {
                if characteristic.is_some() {
                    return Err(err(col, "duplicate `char`".into()));
                }
                let (vc, v) = value("char")?;
                let p: u64 = v.parse().map_err(|_| err(vc, format!("bad characteristic {v:?}")))?;
                check_characteristic(p)?;
                characteristic = Some(p);
            }
            "ext" => {
                if degree.is_some() {
                    return Err(err(col, "duplicate `ext`".into()));
                }
                let (vc, v) = value("ext")?;
                let d: u32 = v.parse().map_err(|_| err(vc, format!("bad extension degree {v:?}")))?;
                degree = Some(d);
            }
            "n" => {
                if n.is_some() {
                    return Err(err(col, "duplicate `n`".into()));
                }
                let (vc, v) = value("n")?;
                let d: usize = v.parse().map_err(|_| err(vc, format!("bad dimension {v:?}")))?;
                if !(3..=8).contains(&d) {
                    return Err(err(vc, format!("dimension {d} outside 3..=8")));
                }
                n = Some(d);
            }
            "term" => {
                let f = match field {
                    Some(f) => f,
                    None => {
                        let (Some(p), Some(d), Some(_)) = (characteristic, degree, n) else {
                            return Err(err(col, "`term` before `char`, `ext` and `n`".into()));
                        };
                        let f = descriptor_field(p, d)?;
                        field = Some(f);
                        f
                    }
                };
                let nn = n.unwrap_or(0);
                let Some(colon) = content.find(':') else {
                    return Err(err(col, "expected `term e0 .. en : coefficient`".into()));
                };
                let exps_toks = tokens(raw, &content[..colon]);
                let coeff_part = &content[colon + 1..];
                if exps_toks.len() - 1 != nn + 1 {
                    return Err(err(col, format!("expected {} exponents, found {}", nn + 1, exps_toks.len() - 1)));
                }
                let mut exps = Vec::with_capacity(nn + 1);
                for (c, t) in &exps_toks[1..] {
                    exps.push(t.parse::<u16>().map_err(|_| err(*c, format!("bad exponent {t:?}")))?);
                }
                let degree_sum: u32 = exps.iter().map(|&e| e as u32).sum();
                if degree_sum != 3 {
                    return Err(Error::NonHomogeneous { degree: degree_sum });
                }
                let coeff = coeff_part.trim();
                let ccol = colon + 2 + (coeff_part.len() - coeff_part.trim_start().len());
                if coeff.is_empty() {
                    return Err(err(colon + 1, "missing coefficient".into()));
                }
                if let Err(e) = f.parse_element(coeff) {
                    let message = match e {
                        Error::Parse { message, .. } => message,
                        other => other.to_string(),
                    };
                    return Err(err(ccol, message));
                }
                if let Some(prev) = seen.insert(exps.clone(), lineno) {
                    return Err(err(col, format!("monomial repeats line {prev}")));
                }
                monomials.push((exps, coeff.to_string()));
            }
            other => return Err(err(col, format!("unknown key `{other}`"))),
        }
    }
    let missing = |what: &str| Error::Parse {
        line: last_line + 1,
        column: 1,
        message: format!("missing {what}"),
    };
    if !header {
        return Err(missing(&format!("`{DESCRIPTOR_HEADER}` header")));
    }
    let characteristic = characteristic.ok_or_else(|| missing("`char`"))?;
    let extension_degree = degree.ok_or_else(|| missing("`ext`"))?;
    let n = n.ok_or_else(|| missing("`n`"))?;
    descriptor_field(characteristic, extension_degree)?;
    if monomials.is_empty() {
        return Err(missing("terms"));
    }
    Ok(CubicDescriptor {
        characteristic,
        extension_degree,
        n,
        monomials,
    })
}

impl CubicDescriptor {
    pub fn field(&self) -> Result<Field> {
        descriptor_field(self.characteristic, self.extension_degree)
    }

    /// Write the descriptor; `parse_cubic(d.emit()) == d`.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str(DESCRIPTOR_HEADER);
        out.push('\n');
        out.push_str(&format!("char {}\next {}\nn {}\n", self.characteristic, self.extension_degree, self.n));
        for (e, c) in &self.monomials {
            let exps: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("term {} : {}\n", exps.join(" "), c));
        }
        out
    }

    /// Terms summed, zero terms dropped, x0^3 first, coefficients printed
    /// in normal form.
    pub fn canonical(&self) -> Result<CubicDescriptor> {
        Ok(CubicDescriptor::from_cubic(&self.cubic()?))
    }

    pub fn from_cubic(x: &CubicForm) -> CubicDescriptor {
        let field = x.field();
        let mut monomials: Vec<(Vec<u16>, String)> = x
            .form()
            .terms()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.exponents().to_vec(), c.to_string()))
            .collect();
        monomials.sort_by(|a, b| b.0.cmp(&a.0));
        CubicDescriptor {
            characteristic: field.characteristic(),
            extension_degree: field.extension_degree(),
            n: x.n(),
            monomials,
        }
    }

    fn elements(&self, field: Field) -> Result<Vec<(Vec<u16>, FieldElement)>> {
        self.monomials
            .iter()
            .map(|(e, c)| Ok((e.clone(), field.parse_element(c)?)))
            .collect()
    }

    pub fn cubic(&self) -> Result<CubicForm> {
        let field = self.field()?;
        CubicForm::from_terms(field, self.n, self.elements(field)?)
    }

    /// The cubic over `target`: embedded from GF(p) into GF(p^2), or reduced
    /// mod p from the rationals.
    pub fn cubic_over(&self, target: Field) -> Result<CubicForm> {
        let own = self.field()?;
        if target.contains(&own) {
            return self.cubic()?.embed(target);
        }
        if own == Field::Rational && target.is_finite() {
            let mut terms = Vec::with_capacity(self.monomials.len());
            for (e, c) in self.elements(own)? {
                let q = c.as_rational().expect("rational coefficient");
                let r = target.from_rational(q).map_err(|_| {
                    Error::BadCharacteristic(format!("coefficient {c} has a denominator divisible by {}", target.characteristic()))
                })?;
                terms.push((e, r));
            }
            let x = CubicForm::from_terms(target, self.n, terms)?;
            if x.form().is_zero() {
                return Err(Error::BadCharacteristic(format!("the cubic vanishes mod {}", target.characteristic())));
            }
            return Ok(x);
        }
        Err(Error::BadCharacteristic(format!("a cubic over {own} cannot be read over {target}")))
    }

    /// SHA-256 of the canonical emission.
    pub fn digest(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical()?.emit().as_bytes())))
    }
}

impl FromStr for CubicDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<CubicDescriptor> {
        parse_cubic(s)
    }
}

impl fmt::Display for CubicDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit())
    }
}

/// Part `index` (1-based) of `count` contiguous blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shard {
    pub index: usize,
    pub count: usize,
}

impl Shard {
    pub const WHOLE: Shard = Shard { index: 1, count: 1 };

    pub fn new(index: usize, count: usize) -> Result<Shard> {
        if count == 0 || index == 0 || index > count {
            return Err(Error::InvalidArgument(format!("shard {index}/{count}")));
        }
        Ok(Shard { index, count })
    }

    pub fn range(&self, len: usize) -> Range<usize> {
        (self.index - 1) * len / self.count..self.index * len / self.count
    }
}

impl FromStr for Shard {
    type Err = Error;

    fn from_str(s: &str) -> Result<Shard> {
        let bad = || Error::InvalidArgument(format!("shard {s:?} is not of the form I/K"));
        let (i, k) = s.split_once('/').ok_or_else(bad)?;
        Shard::new(i.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?)
    }
}

impl fmt::Display for Shard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.index, self.count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Lines,
    Classify,
    NormalForm,
    HigherTriple,
    Jacobian,
    Certificate,
    Eckardt,
    Section,
    Scan,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Lines,
        Command::Classify,
        Command::NormalForm,
        Command::HigherTriple,
        Command::Jacobian,
        Command::Certificate,
        Command::Eckardt,
        Command::Section,
        Command::Scan,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Lines => "lines",
            Command::Classify => "classify",
            Command::NormalForm => "normal-form",
            Command::HigherTriple => "higher-triple",
            Command::Jacobian => "jacobian",
            Command::Certificate => "certificate",
            Command::Eckardt => "eckardt",
            Command::Section => "section",
            Command::Scan => "scan",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Command> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown command {s:?}")))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub characteristic: u64,
    pub extension_degree: u32,
    pub seed: u64,
    pub shard: Shard,
    /// Number of random cubics drawn by `scan`.
    pub draws: usize,
    /// Append wall-clock time to the report (breaks byte-identity).
    pub timing: bool,
}

impl RunOptions {
    pub fn new(characteristic: u64, extension_degree: u32, seed: u64) -> RunOptions {
        RunOptions {
            characteristic,
            extension_degree,
            seed,
            shard: Shard::WHOLE,
            draws: 100,
            timing: false,
        }
    }
}

/// Key-value report of one run. Keys appear in insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub command: Command,
    pub input_digest: String,
    pub seed: u64,
    pub field_tower: String,
    pub shard: Shard,
    pub findings: Vec<(String, String)>,
    /// Violated invariants; empty on success.
    pub problems: Vec<String>,
    pub timing: Option<Duration>,
}

impl RunReport {
    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.findings.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.findings.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn problem(&mut self, message: impl Into<String>) {
        self.problems.push(message.into());
    }

    pub fn is_counterexample(&self) -> bool {
        !self.problems.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_counterexample() {
            2
        } else {
            0
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: &str| {
            out.push_str(k);
            if !v.is_empty() {
                out.push(' ');
                out.push_str(v);
            }
            out.push('\n');
        };
        line(REPORT_HEADER, "");
        line("version", VERSION);
        line("command", self.command.name());
        line("input-sha256", &self.input_digest);
        line("seed", &self.seed.to_string());
        line("field", &self.field_tower);
        line("shard", &self.shard.to_string());
        for (k, v) in &self.findings {
            line(k, v);
        }
        for (i, p) in self.problems.iter().enumerate() {
            line(&format!("problem.{i}"), p);
        }
        line("verdict", if self.is_counterexample() { "counterexample" } else { "ok" });
        if let Some(t) = self.timing {
            line("timing-ms", &t.as_millis().to_string());
        }
        out
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn fmt_vector(v: &[FieldElement]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

pub fn fmt_line(l: &LineChart) -> String {
    format!("{};{}", fmt_vector(l.row(0)), fmt_vector(l.row(1)))
}

pub fn fmt_matrix(m: &ExactMatrix) -> String {
    m.to_rows().iter().map(|r| fmt_vector(r)).collect::<Vec<_>>().join(";")
}

/// Inverse of [`fmt_vector`].
pub fn parse_vector(field: Field, text: &str) -> Result<Vec<FieldElement>> {
    text.split(',').map(|c| field.parse_element(c)).collect()
}

/// Inverse of [`fmt_line`].
pub fn parse_line(field: Field, text: &str) -> Result<LineChart> {
    let (a, b) = text
        .split_once(';')
        .ok_or_else(|| Error::InvalidArgument(format!("line {text:?} needs two rows")))?;
    LineChart::from_rows(field, &parse_vector(field, a)?, &parse_vector(field, b)?)
}

fn fmt_range(r: &Range<usize>, len: usize) -> String {
    format!("{}..{} of {}", r.start, r.end, len)
}

fn type_name(t: LineType) -> &'static str {
    match t {
        LineType::First => "first",
        LineType::Second => "second",
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn need_dimension(x: &CubicForm, min: usize) -> Result<()> {
    if x.n() < min {
        return Err(Error::DimensionTooSmall { n: x.n(), min });
    }
    Ok(())
}

struct Ctx<'a> {
    x: &'a CubicForm,
    field: Field,
    options: &'a RunOptions,
}

impl Ctx<'_> {
    fn lines(&self) -> Result<(Vec<LineOnCubic>, Range<usize>)> {
        let lines = fano_points(self.x, self.field)?;
        let range = self.options.shard.range(lines.len());
        Ok((lines, range))
    }
}

/// Run `cmd` on the cubic over GF(p^k) given by the options.
pub fn run_command(cmd: Command, descriptor: &CubicDescriptor, options: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let field = Field::from_parts(options.characteristic, options.extension_degree)?;
    let x = descriptor.cubic_over(field)?;
    let own = descriptor.field()?;
    let field_tower = if own == field { field.to_string() } else { format!("{own} -> {field}") };
    let mut report = RunReport {
        command: cmd,
        input_digest: descriptor.digest()?,
        seed: options.seed,
        field_tower,
        shard: options.shard,
        findings: Vec::new(),
        problems: Vec::new(),
        timing: None,
    };
    report.push("n", x.n());
    let ctx = Ctx { x: &x, field, options };
    match cmd {
        Command::Lines => run_lines(&ctx, &mut report)?,
        Command::Classify => run_classify(&ctx, &mut report)?,
        Command::NormalForm => run_normal_form(&ctx, &mut report)?,
        Command::HigherTriple => run_higher_triple(&ctx, &mut report)?,
        Command::Jacobian => run_jacobian(&ctx, &mut report)?,
        Command::Certificate => run_certificate(&ctx, &mut report)?,
        Command::Eckardt => run_eckardt(&ctx, &mut report)?,
        Command::Section => run_section(&ctx, &mut report)?,
        Command::Scan => run_scan(&ctx, &mut report)?,
    }
    if options.timing {
        report.timing = Some(start.elapsed());
    }
    Ok(report)
}

fn run_lines(ctx: &Ctx, report: &mut RunReport) -> Result<()> {
    let (lines, range) = ctx.lines()?;
    report.push("lines.total", lines.len());
    if ctx.x.n() == 3 {
        report.push("lines.skew-ordered-pairs", skew_pair_count(&lines));
    }
    report.push("lines.range", fmt_range(&range, lines.len()));
    for k in range {
        let l = &lines[k].line;
        if !line_in_cubic(ctx.x, l) {
            report.problem(format!("line {k} is not on the cubic"));
        }
        report.push(format!("line.{k}"), fmt_line(l));
    }
    Ok(())
}

fn run_classify(ctx: &Ctx, report: &mut RunReport) -> Result<()> {
    let (lines, range) = ctx.lines()?;
    let mut items = Vec::new();
    let mut counts = [0usize; 2];
    for k in range.clone() {
        let rep = classify_line_type(ctx.x, &lines[k])?;
        counts[usize::from(rep.line_type == LineType::Second)] += 1;
        items.push((format!("line.{k}"), format!("{} rank={} {}", type_name(rep.line_type), rep.rank, fmt_line(&lines[k].line))));
    }
    report.push("lines.total", lines.len());
    report.push("lines.range", fmt_range(&range, lines.len()));
    report.push("classify.first-type", counts[0]);
    report.push("classify.second-type", counts[1]);
    for (k, v) in items {
        report.push(k, v);
    }
    Ok(())
}

fn run_normal_form(ctx: &Ctx, report: &mut RunReport) -> Result<()> {
    need_dimension(ctx.x, 4)?;
    let (lines, range) = ctx.lines()?;
    let mut items = Vec::new();
    let mut second = 0;
    for k in range.clone() {
        if classify_line_type(ctx.x, &lines[k])?.line_type != LineType::Second {
            continue;
        }
        second += 1;
        let nf = second_type_normal_form(ctx.x, &lines[k])?;
        if !has_normal_form_shape(&nf.transformed) {
            report.problem(format!("line {k}: transformed cubic lacks the normal-form shape"));
        }
        if ctx.x.embed(nf.field())?.transform(&nf.change)? != nf.transformed {
            report.problem(format!("line {k}: change of coordinates does not reproduce the normal form"));
        }
        let s = extract_s(&nf)?;
        items.push((format!("nf.{k}.line"), fmt_line(&lines[k].line)));
        items.push((format!("nf.{k}.field"), nf.field().to_string()));
        items.push((format!("nf.{k}.change"), fmt_matrix(&nf.change)));
        items.push((format!("nf.{k}.a0"), fmt_matrix(&s.a0)));
        items.push((format!("nf.{k}.a1"), fmt_matrix(&s.a1)));
    }
    report.push("lines.total", lines.len());
    report.push("lines.range", fmt_range(&range, lines.len()));
    report.push("normal-form.second-type", second);
    for (k, v) in items {
        report.push(k, v);
    }
    Ok(())
}

fn run_higher_triple(ctx: &Ctx, report: &mut RunReport) -> Result<()> {
    need_dimension(ctx.x, 4)?;
    let (lines, range) = ctx.lines()?;
    let mut items = Vec::new();
    let (mut second, mut flagged) = (0, 0);
    for k in range.clone() {
        if classify_line_type(ctx.x, &lines[k])?.line_type != LineType::Second {
            continue;
        }
        second += 1;
        let nf = second_type_normal_form(ctx.x, &lines[k])?;
        let (ht, kernel) = is_higher_triple(&extract_s(&nf)?);
        if !ht {
            continue;
        }
        flagged += 1;
        items.push((format!("ht.{k}.line"), fmt_line(&lines[k].line)));
        for (j, v) in kernel.iter().enumerate() {
            let contact = plane_and_multiplicity(ctx.x, &nf, v)?;
            if contact == PlaneContact::Other {
                report.problem(format!("line {k}: kernel vector {} gives no triple plane", fmt_vector(v)));
            }
            items.push((format!("ht.{k}.kernel.{j}"), format!("{} {contact}", fmt_vector(v))));
        }
    }
    report.push("lines.total", lines.len());
    report.push("lines.range", fmt_range(&range, lines.len()));
    report.push("higher-triple.second-type", second);
    report.push("higher-triple.flagged", flagged);
    for (k, v) in items {
        report.push(k, v);
    }
    Ok(())
}

fn run_jacobian(ctx: &Ctx, report: &mut RunReport) -> Result<()> {
    need_dimension(ctx.x, 4)?;
    let (lines, range) = ctx.lines()?;
    let mut items = Vec::new();
    let (mut second, mut points, mut drops, mut mismatches) = (0, 0, 0, 0);
    for k in range.clone() {
        if classify_line_type(ctx.x, &lines[k])?.line_type != LineType::Second {
            continue;
        }
        second += 1;
        let s = extract_s(&second_type_normal_form(ctx.x, &lines[k])?)?;
        let (ht, _) = is_higher_triple(&s);
        let (pts, d, bad) = check_fiber(&s)?;
        points += pts;
        drops += d;
        mismatches += bad.len();
        if let Some(pt) = bad.first() {
            report.problem(format!("line {k}: Jacobian rank disagrees with the predicate at {pt}"));
        }
        if (d > 0) != ht {
            report.problem(format!("line {k}: rank drops={d} but higher-triple={}", yes(ht)));
        }
        items.push((
            format!("jacobian.{k}"),
            format!("points={pts} drops={d} higher-triple={} {}", yes(ht), fmt_line(&lines[k].line)),
        ));
    }
    report.push("lines.total", lines.len());
    report.push("lines.range", fmt_range(&range, lines.len()));
    report.push("jacobian.second-type", second);
    report.push("jacobian.fiber-points", points);
    report.push("jacobian.drop-points", drops);
    report.push("jacobian.mismatches", mismatches);
    for (k, v) in items {
        report.push(k, v);
    }
    Ok(())
}

fn run_certificate(ctx: &Ctx, report: &mut RunReport) -> Result<()> {
    need_dimension(ctx.x, 4)?;
    let (lines, range) = ctx.lines()?;
    let mut witnesses = Vec::new();
    let (mut first, mut transversal, mut second) = (0, 0, 0);
    let (mut points, mut drops, mut mismatches) = (0, 0, 0);
    let (mut any_drop, mut any_ht) = (false, false);
    for k in range.clone() {
        let l = &lines[k];
        if classify_line_type(ctx.x, l)?.line_type == LineType::First {
            first += 1;
            if first_type_transversality(ctx.x, l)? {
                transversal += 1;
            } else {
                report.problem(format!("line {k}: first-type line with a rank drop"));
            }
            continue;
        }
        second += 1;
        let s = extract_s(&second_type_normal_form(ctx.x, l)?)?;
        let (ht, _) = is_higher_triple(&s);
        let (pts, d, bad) = check_fiber(&s)?;
        points += pts;
        drops += d;
        mismatches += bad.len();
        any_drop |= d > 0;
        any_ht |= ht;
        if ht {
            witnesses.push((format!("certificate.witness.{k}"), fmt_line(&l.line)));
        }
    }
    let consistent = mismatches == 0 && any_drop == any_ht;
    if !consistent {
        report.problem("rank drops and higher triple lines disagree");
    }
    report.push("lines.total", lines.len());
    report.push("lines.range", fmt_range(&range, lines.len()));
    report.push("certificate.first-type", first);
    report.push("certificate.first-type-transversal", transversal);
    report.push("certificate.second-type", second);
    report.push("certificate.fiber-points", points);
    report.push("certificate.drop-points", drops);
    report.push("certificate.mismatches", mismatches);
    report.push("certificate.rank-drop-found", yes(any_drop));
    report.push("certificate.higher-triple-found", yes(any_ht));
    report.push("certificate.center-codimension", ctx.x.n() - 3);
    report.push("certificate.consistent", yes(consistent));
    for (k, v) in witnesses {
        report.push(k, v);
    }
    Ok(())
}

fn run_eckardt(ctx: &Ctx, report: &mut RunReport) -> Result<()> {
    let points = find_eckardt(ctx.x, ctx.field)?;
    let range = ctx.options.shard.range(points.len());
    let mut items = Vec::new();
    let (mut family_lines, mut failures) = (0, 0);
    for k in range.clone() {
        let rep = &points[k];
        if !is_eckardt(ctx.x, &rep.point)? {
            report.problem(format!("point {k} fails the Eckardt test on replay"));
        }
        items.push((format!("eckardt.{k}.point"), fmt_vector(&rep.point)));
        let names: Vec<String> = (2..=ctx.x.n()).map(|i| format!("y{i}")).collect();
        items.push((format!("eckardt.{k}.residual"), rep.residual.form().display_with(&names)));
        if ctx.x.n() >= 4 {
            let fam = eckardt_family(ctx.x, rep, ctx.field)?;
            family_lines += fam.lines.len();
            failures += fam.failures();
            if fam.failures() > 0 {
                report.problem(format!("point {k}: {} cone lines are not higher triple", fam.failures()));
            }
            items.push((
                format!("eckardt.{k}.family"),
                format!("lines={} failures={} field={}", fam.lines.len(), fam.failures(), fam.search_field),
            ));
        }
    }
    report.push("eckardt.points", points.len());
    report.push("eckardt.range", fmt_range(&range, points.len()));
    if ctx.x.n() >= 4 {
        report.push("eckardt.family-lines", family_lines);
        report.push("eckardt.family-failures", failures);
    }
    for (k, v) in items {
        report.push(k, v);
    }
    Ok(())
}

fn run_section(ctx: &Ctx, report: &mut RunReport) -> Result<()> {
    need_dimension(ctx.x, 4)?;
    let (lines, range) = ctx.lines()?;
    let mut items = Vec::new();
    let mut tags: BTreeMap<String, usize> = [
        SectionTag::ConeOverCuspidalCubic,
        SectionTag::PlanePlusTangentQuadricCone,
        SectionTag::PlanesThroughLine,
        SectionTag::ContainedInX,
        SectionTag::Other,
    ]
    .iter()
    .map(|t| (t.to_string(), 0))
    .collect();
    let mut flagged = 0;
    for k in range.clone() {
        if classify_line_type(ctx.x, &lines[k])?.line_type != LineType::Second {
            continue;
        }
        let (nf, data) = type_iv_data(ctx.x, &lines[k])?;
        if data.is_empty() {
            continue;
        }
        flagged += 1;
        let xf = ctx.x.embed(nf.field())?;
        for (j, d) in data.iter().enumerate() {
            let class = datum_to_section(&xf, d)?;
            match class.tag {
                SectionTag::Other => report.problem(format!("line {k}: section {j} is neither cuspidal nor plane plus cone")),
                SectionTag::PlanesThroughLine => {
                    report.problem(format!("line {k}: section {j} is a union of planes through the line (l = 0)"))
                }
                _ => {}
            }
            *tags.entry(class.tag.to_string()).or_default() += 1;
            items.push((format!("section.{k}.{j}"), format!("{} p={} p3={}", class.tag, fmt_vector(&d.p), fmt_matrix(&d.p3))));
        }
    }
    report.push("lines.total", lines.len());
    report.push("lines.range", fmt_range(&range, lines.len()));
    report.push("section.higher-triple-lines", flagged);
    for (t, c) in tags {
        report.push(format!("section.tag.{t}"), c);
    }
    for (k, v) in items {
        report.push(k, v);
    }
    Ok(())
}

fn run_scan(ctx: &Ctx, report: &mut RunReport) -> Result<()> {
    need_dimension(ctx.x, 4)?;
    let draws = ctx.options.draws;
    let range = ctx.options.shard.range(draws);
    if ctx.options.shard.index == 1 {
        let (lines, _) = ctx.lines()?;
        let mut flagged = 0;
        for l in &lines {
            if classify_line_type(ctx.x, l)?.line_type == LineType::Second
                && is_higher_triple(&extract_s(&second_type_normal_form(ctx.x, l)?)?).0
            {
                flagged += 1;
            }
        }
        report.push("scan.control.lines", lines.len());
        report.push("scan.control.flagged-lines", flagged);
    }
    let campaign = genericity_campaign_range(ctx.field, ctx.x.n(), draws, ctx.options.seed, range.clone())?;
    report.push("scan.draws", draws);
    report.push("scan.range", fmt_range(&range, draws));
    report.push("scan.rejected-singular", campaign.rejected_singular);
    report.push("scan.flagged-draws", campaign.flagged_draws());
    report.push("scan.clean-draws", campaign.clean_draws());
    report.push("scan.flagged-fraction", format!("{}/{}", campaign.flagged_draws(), campaign.draws.len()));
    for d in &campaign.draws {
        report.push(format!("scan.draw.{}", d.index), format!("second-type={} flagged={}", d.second_type, d.flagged));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FERMAT_FOURFOLD: &str = "fanolab-cubic 1\nchar 7\next 1\nn 5\n\
        term 3 0 0 0 0 0 : 1\nterm 0 3 0 0 0 0 : 1\nterm 0 0 3 0 0 0 : 1\n\
        term 0 0 0 3 0 0 : 1\nterm 0 0 0 0 3 0 : 1\nterm 0 0 0 0 0 3 : 1\n";

    #[test]
    fn parses_fermat_fourfold() {
        let d = parse_cubic(FERMAT_FOURFOLD).unwrap();
        assert_eq!(d.monomials.len(), 6);
        assert_eq!(d.n, 5);
        assert_eq!(parse_cubic(&d.emit()).unwrap(), d);
        assert_eq!(d.canonical().unwrap(), d);
    }

    #[test]
    fn rejects_degree_two() {
        let text = FERMAT_FOURFOLD.replace("term 0 0 0 0 0 3", "term 0 0 0 0 0 2");
        assert_eq!(parse_cubic(&text), Err(Error::NonHomogeneous { degree: 2 }));
    }

    #[test]
    fn rejects_small_characteristic() {
        let text = FERMAT_FOURFOLD.replace("char 7", "char 3");
        assert!(matches!(parse_cubic(&text), Err(Error::BadCharacteristic(_))));
        let text = FERMAT_FOURFOLD.replace("char 7", "char 9");
        assert!(matches!(parse_cubic(&text), Err(Error::BadCharacteristic(_))));
    }

    #[test]
    fn parse_error_positions() {
        let text = "fanolab-cubic 1\nchar 7\next 1\nn 3\nterm 3 0 0 0 : 1\nterm 0 3 0 0 : 1/0\n";
        match parse_cubic(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (6, 16)),
            other => panic!("{other:?}"),
        }
        match parse_cubic("fanolab-cubic 1\n  colour 7\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn canonical_form_merges_and_sorts() {
        let text = "fanolab-cubic 1 # header\nchar 0\next 1\nn 3\nterm 0 0 0 3 : 2/4\nterm 3 0 0 0 : -1\nterm 1 1 1 0 : 0\n";
        let d = parse_cubic(text).unwrap();
        let c = d.canonical().unwrap();
        assert_eq!(c.monomials, vec![(vec![3, 0, 0, 0], "-1".to_string()), (vec![0, 0, 0, 3], "1/2".to_string())]);
        assert_eq!(c.digest().unwrap(), d.digest().unwrap());
        let x = d.cubic_over(Field::prime(7).unwrap()).unwrap();
        assert_eq!(x.coefficient(&[0, 0, 0, 3]), Field::prime(7).unwrap().from_i64(4));
        assert!(d.cubic_over(Field::prime(5).unwrap()).is_ok());
        let d2 = parse_cubic(&text.replace("2/4", "1/5")).unwrap();
        assert!(matches!(d2.cubic_over(Field::prime(5).unwrap()), Err(Error::BadCharacteristic(_))));
    }

    #[test]
    fn shards_partition() {
        let parts: Vec<_> = (1..=3).map(|i| Shard::new(i, 3).unwrap().range(10)).collect();
        assert_eq!(parts, vec![0..3, 3..6, 6..10]);
        assert_eq!("2/5".parse::<Shard>().unwrap(), Shard { index: 2, count: 5 });
        assert!("0/5".parse::<Shard>().is_err());
        assert!("6/5".parse::<Shard>().is_err());
    }

    #[test]
    fn lines_report_on_fermat_surface() {
        let d = CubicDescriptor::from_cubic(&CubicForm::fermat(Field::prime(7).unwrap(), 3));
        let r = run_command(Command::Lines, &d, &RunOptions::new(7, 1, 0)).unwrap();
        assert_eq!(r.get("lines.total"), Some("27"));
        assert_eq!(r.get("lines.skew-ordered-pairs"), Some("432"));
        assert_eq!(r.exit_code(), 0);
        let again = run_command(Command::Lines, &d, &RunOptions::new(7, 1, 0)).unwrap();
        assert_eq!(r.render(), again.render());
    }
}
