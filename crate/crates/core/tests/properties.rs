mod common;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use chowred::chow::{chow_ambient, chow_of_points, equations_from_chow, separate_hypersurface_chow, union_chow};
use chowred::decomposition::{decompose, decompose_mod_p, PolySystem};
use chowred::gcd::monic_gcd;
use chowred::modp::{check_prime_against, rational_forms, PrimeStatus, Witness};
use chowred::parse::parse_poly;
use chowred::var::x_order;
use chowred::{Field, Monomial, PrimeField, QPoly, Rationals, Var, VarOrder};

use common::{linear, planted, q, sys};

fn poly_of(n: usize, terms: &[(Vec<u16>, i64)]) -> QPoly {
    QPoly::from_terms(
        &Rationals,
        &x_order(n),
        terms.iter().map(|(e, c)| (Monomial::from_exps(e.clone()), q(*c))),
    )
}

fn arb_poly(n: usize, max_deg: u16) -> impl Strategy<Value = QPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, n), -9i64..=9), 1..5)
        .prop_map(move |t| poly_of(n, &t))
}

fn nonzero(n: usize, max_deg: u16) -> impl Strategy<Value = QPoly> {
    arb_poly(n, max_deg).prop_filter("nonzero", |p| !p.is_zero())
}

fn point_sets(n: usize, max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::btree_set(prop::collection::vec(-5i64..=5, n), 1..=max).prop_map(|s| s.into_iter().collect())
}

fn rat_points(pts: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    pts.iter().map(|p| p.iter().map(|&x| q(x)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_div_inverts_mul(a in arb_poly(2, 3), b in nonzero(2, 2)) {
        prop_assert_eq!(a.mul(&b).exact_div(&b).unwrap(), a);
    }

    #[test]
    fn ring_axioms(a in arb_poly(2, 2), b in arb_poly(2, 2), c in arb_poly(2, 2)) {
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn text_roundtrip(a in arb_poly(3, 3)) {
        let back = parse_poly(&Rationals, &x_order(3), &a.to_string()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn homogenize_then_dehomogenize(a in nonzero(2, 3)) {
        let ho = VarOrder::new(vec![Var::X(0), Var::X(1), Var::X(2)]);
        let h = a.with_order(&ho).unwrap().homogenize(0, &[1, 2], a.total_degree()).unwrap();
        prop_assert!(h.is_homogeneous_in(&[0, 1, 2], a.total_degree()));
        let back = h.eval_vars(&[(0, q(1))]).with_order(&x_order(2)).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn reduction_is_a_ring_map(a in arb_poly(2, 3), b in arb_poly(2, 3), p in prop::sample::select(vec![3u64, 5, 7, 101])) {
        let fp = PrimeField::new(p).unwrap();
        let r = |x: &QPoly| x.reduce_mod_p(&fp).unwrap();
        prop_assert_eq!(r(&a.add(&b)), r(&a).add(&r(&b)));
        prop_assert_eq!(r(&a.mul(&b)), r(&a).mul(&r(&b)));
    }

    #[test]
    fn gcd_divides_and_is_monic(a in nonzero(2, 2), b in nonzero(2, 2), h in nonzero(2, 2)) {
        let (f, g) = (a.mul(&h), b.mul(&h));
        let d = monic_gcd(&f, &g).unwrap();
        prop_assert!(Rationals.is_one(d.lc().unwrap()));
        prop_assert!(f.exact_div(&d).is_ok());
        prop_assert!(g.exact_div(&d).is_ok());
        // gcd(F·H, G·H) = gcd(F, G)·H, both monic
        let want = monic_gcd(&a, &b).unwrap().mul(&h).monic().unwrap();
        prop_assert_eq!(d, want);
    }

    #[test]
    fn divisor_height_bound(a in nonzero(2, 2), b in nonzero(2, 2)) {
        // integer G dividing integer F: h(G) <= h(F) + s·deg F
        let f = a.mul(&b);
        let hg = a.primitive().unwrap().height().unwrap();
        prop_assert!(hg <= f.height().unwrap() + 2.0 * f.total_degree() as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn union_degrees_add(a in point_sets(2, 3), b in point_sets(2, 3)) {
        let ca = chow_of_points(&Rationals, 2, &rat_points(&a)).unwrap();
        let cb = chow_of_points(&Rationals, 2, &rat_points(&b)).unwrap();
        let u = union_chow(&ca, &cb).unwrap();
        let all: BTreeSet<Vec<i64>> = a.iter().chain(&b).cloned().collect();
        prop_assert_eq!(u.degree() as usize, all.len());
        if a.iter().all(|p| !b.contains(p)) {
            prop_assert_eq!(u.degree(), ca.degree() + cb.degree());
        }
        prop_assert_eq!(union_chow(&ca, &ca).unwrap(), ca);
    }

    #[test]
    fn separation_recombines(pts in point_sets(1, 5), cut in 1usize..5) {
        let cut = cut.min(pts.len());
        let c = chow_of_points(&Rationals, 1, &rat_points(&pts)).unwrap().monic();
        // G vanishes exactly on the first `cut` points
        let g = pts[..cut].iter().fold(QPoly::one(&Rationals, &x_order(1)), |acc, p| {
            acc.mul(&linear(1, &q(-p[0]), &[q(1)]))
        });
        let (k, l) = separate_hypersurface_chow(&c, &g).unwrap();
        prop_assert!(union_chow(&k, &l).unwrap().same_up_to_scalar(&c));
        prop_assert!(monic_gcd(k.poly(), l.poly()).unwrap().is_one());
        prop_assert!(k.same_up_to_scalar(&chow_of_points(&Rationals, 1, &rat_points(&pts[..cut])).unwrap()));
    }

    #[test]
    fn ambient_is_block_symmetric(n in 1usize..=3) {
        let c = chow_ambient(&Rationals, n);
        for j in 1..=n {
            prop_assert!(c.swap_blocks(0, j).same_up_to_scalar(&c));
        }
    }
}

fn small_planted(seed: u64) -> common::Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pl = planted(&mut rng, false);
        if pl.sys.n <= 2 {
            return pl;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn seeds_agree_up_to_scalar(seed in 0u64..1000) {
        let pl = small_planted(seed);
        let a = decompose(&pl.sys, 1, 8).unwrap();
        let b = decompose(&pl.sys, 2, 8).unwrap();
        for (x, y) in a.chow_forms.iter().zip(&b.chow_forms) {
            prop_assert!(x.same_up_to_scalar(y));
        }
    }

    #[test]
    fn recovered_equations_vanish_on_points(seed in 0u64..1000) {
        let pl = small_planted(seed);
        let c0 = &decompose(&pl.sys, 0, 8).unwrap().chow_forms[0];
        let eqs = equations_from_chow(c0).unwrap();
        for p in &pl.points {
            prop_assert!(eqs.iter().all(|e| e.evaluate(p).is_zero()));
        }
        // and some equation is nonzero off the variety
        let off: Vec<BigRational> = vec![q(100); pl.sys.n];
        prop_assert!(eqs.iter().any(|e| !e.evaluate(&off).is_zero()));
    }

    #[test]
    fn brute_force_over_fp(seed in 0u64..1000, p in prop::sample::select(vec![3u64, 5, 7, 11, 13])) {
        let pl = small_planted(seed);
        let n = pl.sys.n;
        let fp = PrimeField::new(p).unwrap();
        let polys = pl.sys.reduce_mod_p(&fp).unwrap();
        // enumerate F_p^n
        let mut sols = Vec::new();
        for idx in 0..p.pow(n as u32) {
            let pt: Vec<u64> = (0..n).map(|j| idx / p.pow(j as u32) % p).collect();
            if polys.iter().all(|f| f.evaluate(&pt) == 0) {
                sols.push(pt);
            }
        }
        let oracle = chow_of_points(&fp, n, &sols).unwrap();
        let modular = decompose_mod_p(&fp, &polys, n, 0, 8).unwrap();
        prop_assert!(modular.chow_forms[0].same_up_to_scalar(&oracle));

        let forms = rational_forms(&pl.sys, 0, 8).unwrap();
        let v = check_prime_against(&pl.sys, &forms, p, 0, 8).unwrap();
        let collide = sols.len() < pl.points.len();
        prop_assert_eq!(v.status == PrimeStatus::Good, !collide);
        if let Witness::Matched(red) = &v.witness {
            prop_assert!(red[0].same_up_to_scalar(&oracle));
            prop_assert!(red.iter().all(|c| c.is_multihomogeneous() && c.is_squarefree().unwrap()));
        }
        // a Good prime stays Good under another seed
        let w = check_prime_against(&pl.sys, &forms, p, 7, 8).unwrap();
        if v.status == PrimeStatus::Good {
            prop_assert_eq!(w.status, PrimeStatus::Good);
        }
    }
}

#[test]
fn mixed_system_equations_separate_components() {
    let s: PolySystem = sys(2, &["X1^2 - X1", "X1*X2"]);
    let r = decompose(&s, 3, 8).unwrap();
    let line = equations_from_chow(&r.chow_forms[1]).unwrap();
    let point = equations_from_chow(&r.chow_forms[0]).unwrap();
    let at = |eqs: &[QPoly], x: i64, y: i64| eqs.iter().all(|e| e.evaluate(&[q(x), q(y)]).is_zero());
    for t in [-3, 0, 2, 9] {
        assert!(at(&line, 0, t));
        assert!(!at(&point, 0, t));
    }
    assert!(at(&point, 1, 0));
    assert!(!at(&line, 1, 0));
}
