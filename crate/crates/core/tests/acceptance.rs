//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fanolab::blowup::{check_fiber, fiber_points, first_type_transversality, segre_count};
use fanolab::cubic::{classify_line_type, cubic_is_smooth, fano_points, CubicForm, LineOnCubic, LineType};
use fanolab::driver::{run_command, Command, CubicDescriptor, RunOptions};
use fanolab::eckardt::{eckardt_family, find_eckardt};
use fanolab::grassmann::LineChart;
use fanolab::normal_form::{extract_s, has_normal_form_shape, second_type_normal_form};
use fanolab::projective::normalize;
use fanolab::sections::{datum_to_section, type_iv_data, SectionTag};
use fanolab::triple::{
    degenerate_pencil, det_s, genericity_campaign, higher_triple_example, is_higher_triple, plane_and_multiplicity,
    random_normal_form, random_pencil, triple_null_search, PlaneContact,
};
use fanolab::{Error, ExactMatrix, Field};

type Outcome = Result<String, String>;

fn gf(p: u64) -> Field {
    Field::prime(p).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Duration, limit: Duration) -> Result<(), String> {
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

/// Move a normal-form cubic by a random change of coordinates; returns the
/// moved cubic and the image of span(e0, e1) on it.
fn disguise(x0: &CubicForm, rng: &mut ChaCha8Rng) -> (CubicForm, LineOnCubic) {
    let field = x0.field();
    let m = ExactMatrix::random_invertible(field, x0.n() + 1, rng);
    let x = x0.transform(&m).unwrap();
    let inv = m.inverse().unwrap();
    let line = LineChart::from_rows(field, &inv.col(0), &inv.col(1)).unwrap();
    let on = LineOnCubic::new(&x, line).unwrap();
    (x, on)
}

fn lines_and_skew_pairs() -> Outcome {
    let start = Instant::now();
    let d = CubicDescriptor::from_cubic(&CubicForm::fermat(gf(7), 3));
    let r = run_command(Command::Lines, &d, &RunOptions::new(7, 1, 0)).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let lines = r.get("lines.total").unwrap_or("?");
    let pairs = r.get("lines.skew-ordered-pairs").unwrap_or("?");
    ensure(lines == "27" && pairs == "432", || format!("{lines} lines, {pairs} ordered skew pairs"))?;
    within(t, Duration::from_secs(10))?;
    Ok(format!("27 lines, 432 ordered skew pairs on the Fermat surface over GF(7) [exact, {t:.2?} < 10s]"))
}

fn eckardt_counts() -> Outcome {
    let start = Instant::now();
    let mut got = Vec::new();
    for (n, want) in [(3, 18), (4, 30), (5, 45)] {
        let d = CubicDescriptor::from_cubic(&CubicForm::fermat(gf(7), n));
        let r = run_command(Command::Eckardt, &d, &RunOptions::new(7, 1, 0)).map_err(|e| e.to_string())?;
        let count: usize = r.get("eckardt.points").unwrap().parse().unwrap();
        ensure(count == want && count == 3 * n * (n + 1) / 2, || format!("n={n}: {count} points, expected {want}"))?;
        got.push(count.to_string());
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(300))?;
    Ok(format!("Eckardt points {} on Fermat n=3,4,5 over GF(7) [exact, {t:.2?} < 5min]", got.join("/")))
}

fn rank_dichotomy() -> Outcome {
    const DRAWS: usize = 10_000;
    let start = Instant::now();
    let field = gf(7);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut summary = Vec::new();
    for n in 4..=6 {
        let (mut points, mut drops, mut drop_draws) = (0, 0, 0);
        for i in 0..DRAWS {
            // half uniform, half with a forced common kernel
            let s = if i % 2 == 0 { random_pencil(field, n - 3, &mut rng) } else { degenerate_pencil(field, n - 3, &mut rng).0 };
            let (pts, d, bad) = check_fiber(&s).map_err(|e| e.to_string())?;
            ensure(bad.is_empty(), || format!("n={n} draw {i}: rank != n+5-[predicate] at {}", bad[0]))?;
            ensure((d > 0) == is_higher_triple(&s).0, || format!("n={n} draw {i}: drops={d} vs kernel"))?;
            points += pts;
            drops += d;
            drop_draws += usize::from(d > 0);
        }
        ensure(drop_draws >= DRAWS / 2, || format!("n={n}: only {drop_draws} draws with a rank drop"))?;
        summary.push(format!("n={n}: {points} points, {drops} drops"));
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(600))?;
    Ok(format!("rank = n+5-[predicate] at every GF(7) fiber point over {DRAWS} draws per n ({}) [0 mismatches allowed, {t:.2?} < 10min]", summary.join("; ")))
}

fn degeneracy_det() -> Outcome {
    const DRAWS: usize = 1000;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for field in [gf(7), gf(101)] {
        for k in 1..=4 {
            for i in 0..DRAWS {
                let (s, v) = degenerate_pencil(field, k, &mut rng);
                ensure(s.a0.mul_vec(&v).iter().all(|c| c.is_zero()), || format!("k={k} draw {i}: kernel vector lost"))?;
                ensure(det_s(&s).is_zero(), || format!("{field} k={k} draw {i}: det S = {}", det_s(&s)))?;
            }
        }
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(60))?;
    Ok(format!("det S = 0 for {DRAWS} degenerate S per size 1..4 over GF(7) and GF(101) [exact, {t:.2?} < 1min]"))
}

fn fiber_counts() -> Outcome {
    let mut seen = Vec::new();
    for q in [5u64, 7] {
        let field = gf(q);
        for n in 4..=6 {
            let pts = fiber_points(LineType::Second, n, field).map_err(|e| e.to_string())?;
            let want = segre_count(n - 2, q) as usize;
            ensure(pts.len() == want, || format!("second type n={n} q={q}: {} vs V_{} = {want}", pts.len(), n - 2))?;
            ensure(pts.iter().all(|p| p.satisfies_incidence()), || format!("n={n} q={q}: point off the incidence"))?;
            seen.push(format!("V{}({q})={want}", n - 2));
        }
        for n in 5..=6 {
            let pts = fiber_points(LineType::First, n, field).map_err(|e| e.to_string())?;
            let want = segre_count(n - 3, q) as usize;
            ensure(pts.len() == want, || format!("first type n={n} q={q}: {} vs {want}", pts.len()))?;
        }
        ensure(fiber_points(LineType::First, 4, field) == Err(Error::EmptyFiber), || "first type n=4 is not empty".into())?;
    }
    Ok(format!("fiber sizes {} and EmptyFiber for the first type at n=4 [exact]", seen.join(", ")))
}

fn normal_form_shape() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut done = 0;
    for field in [gf(7), gf(11), gf(13)] {
        for n in 4..=6 {
            for _ in 0..120 {
                let x0 = random_normal_form(field, n, None, &mut rng).map_err(|e| e.to_string())?;
                ensure(has_normal_form_shape(&x0), || "generator left the normal form".into())?;
                let (x, line) = disguise(&x0, &mut rng);
                let nf = second_type_normal_form(&x, &line).map_err(|e| format!("{field} n={n}: {e}"))?;
                ensure(has_normal_form_shape(&nf.transformed), || format!("{field} n={n}: shape lost"))?;
                let replay = x.embed(nf.field()).unwrap().transform(&nf.change).unwrap();
                ensure(replay == nf.transformed, || format!("{field} n={n}: X∘change differs from the normal form"))?;
                ensure(nf.line() == line.line.embed(nf.field()).unwrap(), || format!("{field} n={n}: line moved"))?;
                done += 1;
            }
        }
    }
    ensure(done >= 1000, || format!("only {done} configurations"))?;
    Ok(format!("{done} disguised normal forms over GF(7), GF(11), GF(13), n=4..6 recovered with X∘change replay [exact]"))
}

fn higher_triple_is_triple() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut vectors, mut triple, mut plane) = (0, 0, 0);
    for field in [gf(7), gf(11)] {
        for n in 4..=6 {
            for round in 0..20 {
                let x0 = if round % 2 == 0 {
                    higher_triple_example(field, n, round % 4 == 0, &mut rng).map_err(|e| e.to_string())?
                } else {
                    let (s, _) = degenerate_pencil(field, n - 3, &mut rng);
                    random_normal_form(field, n, Some(&s), &mut rng).map_err(|e| e.to_string())?
                };
                let (x, line) = disguise(&x0, &mut rng);
                let nf = second_type_normal_form(&x, &line).map_err(|e| e.to_string())?;
                let s = extract_s(&nf).map_err(|e| e.to_string())?;
                let (ht, kernel) = is_higher_triple(&s);
                ensure(ht, || format!("{field} n={n}: constructed example not higher triple"))?;
                let nulls = triple_null_search(&s, nf.field()).map_err(|e| e.to_string())?;
                for v in &kernel {
                    let nv = normalize(v).map_err(|e| e.to_string())?;
                    ensure(nulls.contains(&nv), || format!("{field} n={n}: kernel vector is not triple-null"))?;
                    match plane_and_multiplicity(&x, &nf, v).map_err(|e| e.to_string())? {
                        PlaneContact::TripleContact => triple += 1,
                        PlaneContact::PlaneInX => plane += 1,
                        PlaneContact::Other => return Err(format!("{field} n={n}: plane through a kernel vector is not triple")),
                    }
                    vectors += 1;
                }
            }
        }
    }
    Ok(format!("{vectors} kernel vectors triple-null; planes: {triple} triple-contact, {plane} contained [exact]"))
}

fn section_dichotomy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut cusp, mut planes) = (0, 0);
    for field in [gf(7), gf(11), gf(13)] {
        for round in 0..40 {
            let want_cusp = round % 2 == 0;
            let x0 = higher_triple_example(field, 5, want_cusp, &mut rng).map_err(|e| e.to_string())?;
            let (x, line) = disguise(&x0, &mut rng);
            let (nf, data) = type_iv_data(&x, &line).map_err(|e| e.to_string())?;
            ensure(!data.is_empty(), || format!("{field}: no type IV datum"))?;
            let xf = x.embed(nf.field()).unwrap();
            for d in &data {
                let tag = datum_to_section(&xf, d).map_err(|e| e.to_string())?.tag;
                match tag {
                    SectionTag::ConeOverCuspidalCubic => cusp += 1,
                    SectionTag::PlanePlusTangentQuadricCone => planes += 1,
                    other => return Err(format!("{field} round {round}: section tagged {other}")),
                }
            }
        }
    }
    ensure(cusp > 0 && planes > 0, || format!("branches not both covered: {cusp} cusp, {planes} plane"))?;
    Ok(format!("no Other tag on 120 constructed fourfolds: {cusp} cuspidal cones, {planes} plane+quadric cones [exact]"))
}

fn eckardt_families() -> Outcome {
    let field = gf(7);
    let x = CubicForm::fermat(field, 5);
    let points = find_eckardt(&x, field).map_err(|e| e.to_string())?;
    let (mut lines, mut failures) = (0, 0);
    for rep in &points {
        let fam = eckardt_family(&x, rep, field).map_err(|e| e.to_string())?;
        ensure(fam.has_witnesses(), || "an Eckardt point without rational witnesses".into())?;
        ensure(fam.search_field == field, || format!("witnesses needed {}", fam.search_field))?;
        lines += fam.lines.len();
        failures += fam.failures();
    }
    ensure(failures == 0, || format!("{failures} of {lines} induced lines fail"))?;
    Ok(format!("{lines} lines through {} Eckardt points of the Fermat fourfold: all in X, second type, higher triple [exact]", points.len()))
}

fn genericity() -> Outcome {
    let field = gf(7);
    let x = CubicForm::fermat(field, 5);
    let control = fano_points(&x, field)
        .map_err(|e| e.to_string())?
        .iter()
        .filter(|l| classify_line_type(&x, l).unwrap().line_type == LineType::Second)
        .filter(|l| is_higher_triple(&extract_s(&second_type_normal_form(&x, l).unwrap()).unwrap()).0)
        .count();
    ensure(control > 0, || "the Fermat control has no higher triple line".into())?;
    let campaign = genericity_campaign(field, 5, 100, 2024).map_err(|e| e.to_string())?;
    ensure(campaign.clean_draws() > 0, || "every random fourfold was flagged".into())?;
    Ok(format!(
        "Fermat control flagged ({control} lines); {}/{} random smooth fourfolds over GF(7) flagged, {} clean [property: control flagged, >= 1 clean]",
        campaign.flagged_draws(),
        campaign.draws.len(),
        campaign.clean_draws()
    ))
}

fn transversality() -> Outcome {
    let field = gf(7);
    let mut cubics = vec![CubicForm::fermat(field, 4), CubicForm::fermat(field, 5)];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4, 4, 5, 5] {
        loop {
            let c = CubicForm::random(field, n, &mut rng);
            if cubic_is_smooth(&c, 1).unwrap().is_smooth() {
                cubics.push(c);
                break;
            }
        }
    }
    let mut checked = 0;
    for x in &cubics {
        for l in fano_points(x, field).map_err(|e| e.to_string())? {
            match classify_line_type(x, &l) {
                Ok(r) if r.line_type == LineType::First => {}
                Ok(_) => continue,
                // singular along a line over the extension: not a smooth cubic
                Err(Error::DegenerateAlongLine(_)) => break,
                Err(e) => return Err(e.to_string()),
            }
            ensure(first_type_transversality(x, &l).map_err(|e| e.to_string())?, || format!("n={}: rank drop on a first-type line", x.n()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} first-type lines on {} cubics (Fermat n=4,5 and random) transversal for every (s:t) [exact]", cubics.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("lines and skew pairs", lines_and_skew_pairs),
        ("Eckardt counts", eckardt_counts),
        ("rank dichotomy", rank_dichotomy),
        ("degeneracy implies det S = 0", degeneracy_det),
        ("fiber counts", fiber_counts),
        ("normal-form shape", normal_form_shape),
        ("higher triple implies triple", higher_triple_is_triple),
        ("section dichotomy", section_dichotomy),
        ("Eckardt families", eckardt_families),
        ("genericity", genericity),
        ("first-type transversality", transversality),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
