use std::cmp::Ordering;

use circlemap::family::{
    cross_ratio, derivative_of_iterate, iterate, AffineMap, CircleMap, CriticalFamily,
};
use circlemap::farey::{
    code_to_rational, daughters, is_farey_neighbor, neighbors, rational_to_code, Limits, Symbol,
};
use circlemap::{FareyCode, FareyDomain, HarmonicCode, LiftPoint, Rational};
use num_integer::Integer;
use proptest::prelude::*;

fn coprime_below(q_max: u64) -> impl Strategy<Value = (u64, u64)> {
    (2u64..q_max)
        .prop_flat_map(|q| (1..q, Just(q)))
        .prop_filter("reduced", |(p, q)| p.gcd(q) == 1)
}

fn coprime() -> impl Strategy<Value = (u64, u64)> {
    coprime_below(2000)
}

/// In-order position in the tree: left subtree, node, right subtree.
fn tree_order(a: &FareyCode, b: &FareyCode) -> Ordering {
    let rank = |s: Option<&Symbol>| match s {
        Some(Symbol::L) => 0,
        None => 1,
        Some(Symbol::R) => 2,
    };
    let (sa, sb) = (a.symbols(), b.symbols());
    for i in 0.. {
        let (x, y) = (sa.get(i), sb.get(i));
        if x.is_none() && y.is_none() {
            return Ordering::Equal;
        }
        if x != y {
            return rank(x).cmp(&rank(y));
        }
    }
    unreachable!()
}

fn picks() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-30i64..30, 0..4)
}

proptest! {
    #[test]
    fn code_round_trip((p, q) in coprime()) {
        let r = Rational::from((p, q));
        let limits = Limits { max_code_len: 4096, ..Limits::default() };
        let code = circlemap::farey::rational_to_code_with(&r, &limits).unwrap();
        prop_assert_eq!(code_to_rational(&code), r);
    }

    #[test]
    fn tree_order_matches_value((p, q) in coprime_below(60), (a, b) in coprime_below(60)) {
        let (x, y) = (Rational::from((p, q)), Rational::from((a, b)));
        let (cx, cy) = (rational_to_code(&x).unwrap(), rational_to_code(&y).unwrap());
        prop_assert_eq!(tree_order(&cx, &cy), x.cmp(&y));
    }

    #[test]
    fn neighbors_and_daughters((p, q) in coprime()) {
        let r = Rational::from((p, q));
        let (lo, hi) = neighbors(&r).unwrap();
        prop_assert!(is_farey_neighbor(&lo, &r) && is_farey_neighbor(&r, &hi));
        let (dl, dr) = daughters(&r).unwrap();
        prop_assert!(lo < dl && dl < r && r < dr && dr < hi);
        prop_assert!(is_farey_neighbor(&dl, &r) && is_farey_neighbor(&r, &dr));
    }

    #[test]
    fn harmonic_cells_nest(code in picks(), n in -30i64..30) {
        let base = FareyDomain::unit();
        let parent = HarmonicCode::from_picks(&code).domain(&base, &Limits::default()).unwrap();
        let mut longer = code.clone();
        longer.push(n);
        let child = HarmonicCode::from_picks(&longer).domain(&base, &Limits::default()).unwrap();
        prop_assert!(parent.lo() <= child.lo() && child.hi() <= parent.hi());
        prop_assert!(is_farey_neighbor(child.lo(), child.hi()));
        prop_assert!(child.lo() < child.hi());
    }

    #[test]
    fn mirror_is_flip(code in picks()) {
        let base = FareyDomain::unit();
        let c = HarmonicCode::from_picks(&code);
        let d = c.domain(&base, &Limits::default()).unwrap();
        let m = c.mirror().domain(&base.flip(), &Limits::default()).unwrap();
        prop_assert_eq!(m, d.flip());
        prop_assert_eq!(c.mirror().mirror(), c);
    }

    #[test]
    fn lift_commutes_with_translation(t in 0.0f64..1.0, x in -0.5f64..0.5, k in -50i64..50, n in 1usize..20) {
        let fam = CriticalFamily::new(3).unwrap();
        let map = fam.at(t);
        let p = LiftPoint::from_f64(x);
        let a = iterate(&map, p.add_int(k), n);
        let b = iterate(&map, p, n).add_int(k);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn odd_symmetry(t in -1.0f64..1.0, x in -0.5f64..0.5, l in prop::sample::select(vec![3u32, 5, 7])) {
        let fam = CriticalFamily::new(l).unwrap();
        let a = fam.at(t).lift(LiftPoint::from_f64(-x)).value();
        let b = fam.at(-t).lift(LiftPoint::from_f64(x)).value();
        prop_assert!((a + b).abs() < 1e-14);
    }

    #[test]
    fn chain_rule_matches_difference(t in 0.0f64..1.0, x in -0.5f64..0.5, n in 1usize..=5) {
        let fam = CriticalFamily::new(3).unwrap();
        let map = fam.at(t);
        let p = LiftPoint::from_f64(x);
        let mut y = p;
        for _ in 0..n {
            prop_assume!(y.frac.abs() > 0.05);
            y = map.lift(y);
        }
        let h = 1e-5;
        let fd = iterate(&map, p.add(h), n).diff(&iterate(&map, p.add(-h), n)) / (2.0 * h);
        let d = derivative_of_iterate(&map, p, n);
        prop_assert!(((d - fd) / d).abs() < 1e-6, "{} vs {}", d, fd);
    }

    #[test]
    fn cross_ratio_affine_invariance(
        a in -10.0f64..10.0,
        gaps in prop::array::uniform3(0.01f64..5.0),
        slope in 0.1f64..10.0,
        offset in -5.0f64..5.0,
    ) {
        let (b, c) = (a + gaps[0], a + gaps[0] + gaps[1]);
        let d = c + gaps[2];
        let f = AffineMap { slope, offset };
        let g = |x: f64| f.lift(LiftPoint::from_f64(x)).value();
        let before = cross_ratio(a, b, c, d).unwrap();
        let after = cross_ratio(g(a), g(b), g(c), g(d)).unwrap();
        prop_assert!((before - after).abs() < 1e-9 * before.max(1.0));
    }
}
