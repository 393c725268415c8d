use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fanolab::cubic::{cubic_is_smooth, line_in_cubic, CubicForm};
use fanolab::driver::{parse_cubic, parse_line, parse_vector, run_command, Command, CubicDescriptor, RunOptions, RunReport, Shard};
use fanolab::eckardt::is_eckardt;
use fanolab::triple::higher_triple_example;
use fanolab::{ExactMatrix, Field};

fn gf7() -> Field {
    Field::prime(7).unwrap()
}

fn fermat(n: usize) -> CubicDescriptor {
    CubicDescriptor::from_cubic(&CubicForm::fermat(gf7(), n))
}

fn run(cmd: Command, d: &CubicDescriptor, shard: Shard) -> RunReport {
    let options = RunOptions {
        shard,
        ..RunOptions::new(7, 1, 5)
    };
    run_command(cmd, d, &options).unwrap()
}

fn entries<'a>(r: &'a RunReport, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
    r.findings
        .iter()
        .filter(move |(k, _)| k.starts_with(prefix))
        .map(|(k, v)| (k.as_str(), v.as_str()))
}

fn random_smooth(n: usize, seed: u64) -> CubicForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let c = CubicForm::random(gf7(), n, &mut rng);
        if cubic_is_smooth(&c, 1).unwrap().is_smooth() {
            return c;
        }
    }
}

#[test]
fn line_witnesses_replay() {
    let d = fermat(4);
    let x = d.cubic().unwrap();
    let r = run(Command::Lines, &d, Shard::WHOLE);
    let mut count = 0;
    for (_, v) in entries(&r, "line.") {
        assert!(line_in_cubic(&x, &parse_line(gf7(), v).unwrap()));
        count += 1;
    }
    assert_eq!(r.get("lines.total").unwrap().parse::<usize>().unwrap(), count);
}

#[test]
fn eckardt_witnesses_replay() {
    let d = fermat(4);
    let x = d.cubic().unwrap();
    let r = run(Command::Eckardt, &d, Shard::WHOLE);
    assert_eq!(r.get("eckardt.points"), Some("30"));
    assert_eq!(r.get("eckardt.family-failures"), Some("0"));
    for (k, v) in entries(&r, "eckardt.") {
        if k.ends_with(".point") {
            assert!(is_eckardt(&x, &parse_vector(gf7(), v).unwrap()).unwrap());
        }
    }
}

#[test]
fn shards_concatenate_to_the_whole_run() {
    let d = fermat(4);
    let whole = run(Command::Classify, &d, Shard::WHOLE);
    let per_line = |r: &RunReport| entries(r, "line.").map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>();
    let mut joined = Vec::new();
    let mut second = 0;
    for i in 1..=4 {
        let part = run(Command::Classify, &d, Shard::new(i, 4).unwrap());
        second += part.get("classify.second-type").unwrap().parse::<usize>().unwrap();
        joined.extend(per_line(&part));
    }
    assert_eq!(joined, per_line(&whole));
    assert_eq!(second.to_string(), whole.get("classify.second-type").unwrap());
}

#[test]
fn certificate_is_reproducible_on_a_random_fourfold() {
    let d = CubicDescriptor::from_cubic(&random_smooth(5, 17));
    let text = d.emit();
    let a = run_command(Command::Certificate, &parse_cubic(&text).unwrap(), &RunOptions::new(7, 1, 9)).unwrap();
    let b = run_command(Command::Certificate, &parse_cubic(&text).unwrap(), &RunOptions::new(7, 1, 9)).unwrap();
    assert_eq!(a.render(), b.render());
    assert_eq!(a.get("certificate.consistent"), Some("yes"));
    assert_eq!(a.exit_code(), 0);
}

#[test]
fn higher_triple_witnesses_on_fermat() {
    let r = run(Command::HigherTriple, &fermat(5), Shard::new(1, 8).unwrap());
    assert!(!r.is_counterexample());
    for (k, v) in entries(&r, "ht.") {
        if k.contains(".kernel.") {
            assert!(v.ends_with("triple-contact") || v.ends_with("plane-in-x"), "{k} {v}");
        }
    }
}

#[test]
fn constructed_sections_pass_and_fermat_is_flagged() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for cusp in [true, false] {
        // redraw until no line of X passes through a singular point
        let r = loop {
            let x0 = higher_triple_example(gf7(), 5, cusp, &mut rng).unwrap();
            let m = ExactMatrix::random_invertible(gf7(), 6, &mut rng);
            let x = x0.transform(&m).unwrap();
            if !cubic_is_smooth(&x, 1).unwrap().is_smooth() {
                continue;
            }
            match run_command(Command::Section, &CubicDescriptor::from_cubic(&x), &RunOptions::new(7, 1, 0)) {
                Ok(r) => break r,
                Err(e) => assert!(e.is_input_error(), "{e}"),
            }
        };
        assert_eq!(r.exit_code(), 0, "{}", r.render());
        let tag = if cusp { "cone-over-cuspidal-cubic" } else { "plane-plus-tangent-quadric-cone" };
        assert_ne!(r.get(&format!("section.tag.{tag}")), Some("0"));
    }
    // S vanishes identically along the higher triple lines of the Fermat
    // fourfold, so the section is a union of planes through the line
    let r = run(Command::Section, &fermat(5), Shard::new(1, 20).unwrap());
    assert_eq!(r.exit_code(), 2);
    assert_eq!(r.get("section.tag.other"), Some("0"));
    assert_ne!(r.get("section.tag.planes-through-line"), Some("0"));
}

#[test]
fn rational_descriptors_reduce() {
    let text = "fanolab-cubic 1\nchar 0\next 1\nn 3\nterm 3 0 0 0 : 1/2\nterm 0 3 0 0 : 1/2\nterm 0 0 3 0 : 1/2\nterm 0 0 0 3 : 1/2\n";
    let d = parse_cubic(text).unwrap();
    let r = run_command(Command::Lines, &d, &RunOptions::new(7, 1, 0)).unwrap();
    assert_eq!(r.get("lines.total"), Some("27"));
    assert_eq!(r.field_tower, "QQ -> GF(7)");
    assert!(run_command(Command::Lines, &d, &RunOptions::new(0, 1, 0)).is_err());
}

#[test]
fn extension_field_runs() {
    let d = fermat(3);
    let r = run_command(Command::Lines, &d, &RunOptions::new(7, 2, 0)).unwrap();
    assert_eq!(r.get("lines.total"), Some("27"));
    assert_eq!(r.field_tower, "GF(7) -> GF(7^2)");
}

#[test]
fn scan_shards_match() {
    let d = fermat(4);
    let opts = |shard| RunOptions {
        shard,
        draws: 6,
        ..RunOptions::new(7, 1, 33)
    };
    let whole = run_command(Command::Scan, &d, &opts(Shard::WHOLE)).unwrap();
    let draws = |r: &RunReport| entries(r, "scan.draw.").map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>();
    let mut joined = Vec::new();
    for i in 1..=3 {
        joined.extend(draws(&run_command(Command::Scan, &d, &opts(Shard::new(i, 3).unwrap())).unwrap()));
    }
    assert_eq!(joined, draws(&whole));
    assert_eq!(whole.get("scan.control.flagged-lines").map(|v| v != "0"), Some(true));
}

#[test]
fn timing_is_opt_in() {
    let d = fermat(3);
    let plain = run_command(Command::Lines, &d, &RunOptions::new(7, 1, 0)).unwrap();
    assert!(!plain.render().contains("timing-ms"));
    let timed = run_command(Command::Lines, &d, &RunOptions { timing: true, ..RunOptions::new(7, 1, 0) }).unwrap();
    assert!(timed.render().contains("timing-ms"));
}
