mod common;

use common::{cone_oracle, line, point3};
use num_traits::Signed;
use proptest::prelude::*;
use relcrypt::rational::{self, Rational};
use relcrypt::spacetime::{
    common_future, diamond_contains, diamond_subset, precedes, spacelike, strictly_precedes, CausalDiamond,
    SpaceTimePoint,
};

fn half_grid() -> Vec<SpaceTimePoint> {
    let mut g = Vec::new();
    for t in 0..5 {
        for x in -2..=2 {
            g.push(line(rational::rat(t, 2), rational::rat(x, 2)));
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_matches_squared_norms(p in point3(), q in point3()) {
        prop_assert_eq!(precedes(&p, &q), cone_oracle(&p, &q));
        prop_assert_eq!(strictly_precedes(&p, &q), cone_oracle(&p, &q) && q.t > p.t);
        prop_assert_eq!(spacelike(&p, &q), !cone_oracle(&p, &q) && !cone_oracle(&q, &p));
    }

    #[test]
    fn reflexive_and_antisymmetric(p in point3(), q in point3()) {
        prop_assert!(precedes(&p, &p));
        prop_assert!(!strictly_precedes(&p, &p));
        if precedes(&p, &q) && precedes(&q, &p) {
            prop_assert_eq!(&p, &q);
        }
    }

    #[test]
    fn transitive(p in point3(), q in point3(), r in point3()) {
        if precedes(&p, &q) && precedes(&q, &r) {
            prop_assert!(precedes(&p, &r));
        }
        if strictly_precedes(&p, &q) && precedes(&q, &r) {
            prop_assert!(strictly_precedes(&p, &r));
        }
    }

    #[test]
    fn transitive_on_built_chains(p in point3(), d1 in point3(), d2 in point3(), e1 in 0i64..3, e2 in 0i64..3) {
        // time step at least the L1 length of the spatial step
        let step = |d: &SpaceTimePoint, extra: i64| {
            let l1 = (0..3).fold(rational::zero(), |acc: Rational, i| acc + d.x[i].abs());
            l1 + rational::int(extra)
        };
        let q = p.shifted(&step(&d1, e1), &d1.x);
        let r = q.shifted(&step(&d2, e2), &d2.x);
        prop_assert!(precedes(&p, &q) && precedes(&q, &r) && precedes(&p, &r));
        if e1 > 0 {
            prop_assert!(strictly_precedes(&p, &r));
        }
    }

    #[test]
    fn translation_invariant(p in point3(), q in point3(), dt in common::small_rat(), dx in point3()) {
        let v = dx.x.clone();
        let (ps, qs) = (p.shifted(&dt, &v), q.shifted(&dt, &v));
        prop_assert_eq!(precedes(&p, &q), precedes(&ps, &qs));
        prop_assert_eq!(strictly_precedes(&p, &q), strictly_precedes(&ps, &qs));
    }

    #[test]
    fn any_two_points_share_a_future(p in point3(), q in point3()) {
        // max time plus an L1 bound on the separation, at the spatial midpoint
        let l1 = (0..3).fold(rational::zero(), |acc: Rational, i| acc + (&p.x[i] - &q.x[i]).abs());
        let t = if p.t > q.t { p.t.clone() } else { q.t.clone() } + l1;
        let m = |i: usize| (&p.x[i] + &q.x[i]) / rational::int(2);
        let r = SpaceTimePoint::new(t, [m(0), m(1), m(2)]);
        prop_assert!(precedes(&p, &r) && precedes(&q, &r));
        let f = common_future([&p, &q]).unwrap();
        prop_assert!(precedes(&p, &f) && precedes(&q, &f));
    }

    #[test]
    fn diamond_subset_matches_grid(a in 0usize..25, b in 0usize..25, c in 0usize..25, d in 0usize..25) {
        let g = half_grid();
        let (Ok(d1), Ok(d2)) = (
            CausalDiamond::new(g[a].clone(), g[b].clone()),
            CausalDiamond::new(g[c].clone(), g[d].clone()),
        ) else {
            return Ok(());
        };
        let by_grid = g.iter().all(|t| !diamond_contains(&d1, t) || diamond_contains(&d2, t));
        prop_assert_eq!(diamond_subset(&d1, &d2), by_grid);
    }
}

#[test]
fn grid_oracle_sees_both_outcomes() {
    let g = half_grid();
    let mut seen = [0usize; 2];
    for a in &g {
        for b in &g {
            let Ok(d1) = CausalDiamond::new(a.clone(), b.clone()) else { continue };
            for c in &g {
                for d in &g {
                    let Ok(d2) = CausalDiamond::new(c.clone(), d.clone()) else { continue };
                    let by_grid = g.iter().all(|t| !diamond_contains(&d1, t) || diamond_contains(&d2, t));
                    assert_eq!(diamond_subset(&d1, &d2), by_grid, "{d1:?} {d2:?}");
                    seen[usize::from(by_grid)] += 1;
                }
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0);
}
