use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fanolab::blowup::check_fiber;
use fanolab::cubic::{line_in_cubic, CubicForm, LineOnCubic};
use fanolab::driver::{parse_cubic, CubicDescriptor, Shard};
use fanolab::field::{random_element, random_nonzero};
use fanolab::grassmann::{intersection_point, lines_meet, LineChart};
use fanolab::normal_form::{has_normal_form_shape, second_type_normal_form};
use fanolab::triple::{degenerate_pencil, det_s, is_higher_triple, random_normal_form, random_pencil};
use fanolab::{ExactMatrix, Field};

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::prime(5).unwrap()),
        Just(Field::prime(7).unwrap()),
        Just(Field::prime(101).unwrap()),
        Just(Field::quadratic(5).unwrap()),
        Just(Field::quadratic(7).unwrap()),
    ]
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(field in fields(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (random_element(field, &mut r), random_element(field, &mut r), random_element(field, &mut r));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        let u = random_nonzero(field, &mut r);
        prop_assert!((&u * &u.inverse().unwrap()).is_one());
        prop_assert_eq!(field.parse_element(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn rank_nullity(field in fields(), seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6) {
        let mut r = rng(seed);
        let entries: Vec<Vec<_>> = (0..rows).map(|_| (0..cols).map(|_| random_element(field, &mut r)).collect()).collect();
        let m = ExactMatrix::from_rows(field, entries).unwrap();
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        for v in &kernel {
            prop_assert!(m.mul_vec(v).iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn transforms_compose(field in fields(), seed in any::<u64>(), n in 3usize..6) {
        let mut r = rng(seed);
        let x = CubicForm::random(field, n, &mut r);
        let m = ExactMatrix::random_invertible(field, n + 1, &mut r);
        let k = ExactMatrix::random_invertible(field, n + 1, &mut r);
        let lhs = x.transform(&m).unwrap().transform(&k).unwrap();
        let rhs = x.transform(&m.mul(&k).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn descriptor_round_trip(field in fields(), seed in any::<u64>(), n in 3usize..7) {
        let mut r = rng(seed);
        let x = CubicForm::random(field, n, &mut r);
        let d = CubicDescriptor::from_cubic(&x);
        let text = d.emit();
        let back = parse_cubic(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(back.cubic().unwrap(), x);
        prop_assert_eq!(d.canonical().unwrap(), d.clone());
        prop_assert_eq!(back.digest().unwrap(), d.digest().unwrap());
    }

    #[test]
    fn shards_cover(len in 0usize..500, count in 1usize..12) {
        let mut next = 0;
        for i in 1..=count {
            let r = Shard::new(i, count).unwrap().range(len);
            prop_assert_eq!(r.start, next);
            next = r.end;
        }
        prop_assert_eq!(next, len);
    }

    #[test]
    fn meeting_lines_share_a_point(field in fields(), seed in any::<u64>(), n in 3usize..6) {
        let mut r = rng(seed);
        let p: Vec<_> = (0..=n).map(|_| random_element(field, &mut r)).collect();
        let a: Vec<_> = (0..=n).map(|_| random_element(field, &mut r)).collect();
        let b: Vec<_> = (0..=n).map(|_| random_element(field, &mut r)).collect();
        let (Ok(l1), Ok(l2)) = (LineChart::from_rows(field, &p, &a), LineChart::from_rows(field, &p, &b)) else {
            return Ok(());
        };
        prop_assert!(lines_meet(&l1, &l2) && lines_meet(&l2, &l1));
        if l1 != l2 {
            let q = intersection_point(&l1, &l2).unwrap();
            prop_assert!(l1.contains_point(&q) && l2.contains_point(&q));
        }
    }

    #[test]
    fn normal_form_recovered(seed in any::<u64>(), n in 4usize..7, p in prop_oneof![Just(7u64), Just(11), Just(13)]) {
        let field = Field::prime(p).unwrap();
        let mut r = rng(seed);
        let x0 = random_normal_form(field, n, None, &mut r).unwrap();
        let m = ExactMatrix::random_invertible(field, n + 1, &mut r);
        let x = x0.transform(&m).unwrap();
        let inv = m.inverse().unwrap();
        let line = LineChart::from_rows(field, &inv.col(0), &inv.col(1)).unwrap();
        prop_assert!(line_in_cubic(&x, &line));
        let nf = second_type_normal_form(&x, &LineOnCubic::new(&x, line).unwrap()).unwrap();
        prop_assert!(has_normal_form_shape(&nf.transformed));
        prop_assert_eq!(x.embed(nf.field()).unwrap().transform(&nf.change).unwrap(), nf.transformed);
    }

    #[test]
    fn rank_matches_predicate(seed in any::<u64>(), n in 4usize..6, degenerate in any::<bool>()) {
        let field = Field::prime(5).unwrap();
        let mut r = rng(seed);
        let s = if degenerate { degenerate_pencil(field, n - 3, &mut r).0 } else { random_pencil(field, n - 3, &mut r) };
        let (_, drops, bad) = check_fiber(&s).unwrap();
        prop_assert!(bad.is_empty());
        prop_assert_eq!(drops > 0, is_higher_triple(&s).0);
        if degenerate {
            prop_assert!(det_s(&s).is_zero());
        }
    }
}
