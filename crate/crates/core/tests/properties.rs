use std::sync::Arc;

use frobsplit::cartier::{base_p_decomposition, cartier, recompose, restricted_monomials};
use frobsplit::field::Prime;
use frobsplit::groebner::{normal_form, reduced_basis};
use frobsplit::ideal::Ideal;
use frobsplit::maps::FiniteRingMap;
use frobsplit::order::MonomialOrder;
use frobsplit::parse::parse_poly;
use frobsplit::poly::{Monomial, Poly};
use frobsplit::ring::Ring;
use frobsplit::splitting::Splitting;
use frobsplit::trace::TraceContext;
use frobsplit::univariate::{factor, squarefree_decomposition, UPoly};
use proptest::prelude::*;

const PRIMES: [u64; 3] = [2, 3, 5];

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

/// Terms as (exponents, coefficient); coefficients reduced on construction.
fn poly_strategy(n: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Vec<(Vec<u32>, u64)>> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, n), 0u64..1000), 0..=max_terms)
}

fn build(p: u64, n: usize, terms: &[(Vec<u32>, u64)]) -> Poly {
    Poly::from_terms(prime(p), n, terms.iter().map(|(e, c)| (Monomial::new(e.clone()), *c)))
}

fn free_ring(p: u64, n: usize) -> Arc<Ring> {
    let names = ["x", "y", "z"];
    Ring::free("R", prime(p), &names[..n]).into_arc()
}

/// A splitting `(x_1...x_n)^(p-1) + noise` where no noise term survives `T'`.
fn splitting_from(p: u64, n: usize, noise: &[(Vec<u32>, u64)]) -> Splitting {
    let r = free_ring(p, n);
    let mut u = Poly::monomial(prime(p), Monomial::new(vec![p as u32 - 1; n]), 1);
    for (e, c) in noise {
        if e.iter().all(|&a| a % p as u32 == p as u32 - 1) {
            continue;
        }
        u.add_term(Monomial::new(e.clone()), *c);
    }
    Splitting::new(r, u).unwrap()
}

fn brute_force_compatible(phi: &Splitting, j: &Ideal) -> bool {
    let r = phi.ring();
    let mons = restricted_monomials(r.nvars(), r.p() as u32);
    j.gens().iter().all(|g| mons.iter().all(|m| j.contains(&phi.apply(&g.mul_monomial(m, 1)).unwrap())))
}

fn irreducible_by_search(g: &UPoly) -> bool {
    let d = g.degree().unwrap();
    let p = g.prime().value();
    for k in 1..=d / 2 {
        let count = p.pow(k as u32);
        for idx in 0..count {
            let mut coeffs = Vec::with_capacity(k + 1);
            let mut x = idx;
            for _ in 0..k {
                coeffs.push(x % p);
                x /= p;
            }
            coeffs.push(1);
            if g.rem(&UPoly::new(g.prime(), coeffs)).is_zero() {
                return false;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cartier_is_p_inverse_linear(pi in 0usize..3, n in 1usize..=3, f in poly_strategy(3, 6, 5), g in poly_strategy(3, 2, 3), a in 0u64..5, b in 0u64..5) {
        let p = PRIMES[pi];
        let f = build(p, n, &f.into_iter().map(|(e, c)| (e[..n].to_vec(), c)).collect::<Vec<_>>());
        let g = build(p, n, &g.into_iter().map(|(e, c)| (e[..n].to_vec(), c)).collect::<Vec<_>>());
        prop_assert_eq!(cartier(&(&g.frobenius() * &f)), &g * &cartier(&f));
        let lin = &f.scale(a) + &g.scale(b);
        prop_assert_eq!(cartier(&lin), &cartier(&f).scale(a) + &cartier(&g).scale(b));
        let top = Poly::monomial(prime(p), Monomial::new(vec![p as u32 - 1; n]), 1);
        prop_assert_eq!(cartier(&(&f.frobenius() * &top)), f.clone());
    }

    #[test]
    fn base_p_decomposition_reconstructs(pi in 0usize..3, f in poly_strategy(3, 9, 6)) {
        let f = build(PRIMES[pi], 3, &f);
        let parts = base_p_decomposition(&f);
        prop_assert_eq!(recompose(&parts, &f), f);
    }

    #[test]
    fn groebner_basis_is_canonical_and_certifies_membership(pi in 0usize..3, gens in prop::collection::vec(poly_strategy(3, 2, 3), 1..=3), mult in poly_strategy(3, 1, 2)) {
        let p = PRIMES[pi];
        let gens: Vec<Poly> = gens.iter().map(|g| build(p, 3, g)).filter(|g| !g.is_zero()).collect();
        prop_assume!(!gens.is_empty());
        let order = MonomialOrder::GrevLex;
        let b1 = reduced_basis(&gens, order);
        let mut shuffled: Vec<Poly> = gens.iter().rev().cloned().collect();
        shuffled.push(&gens[0] + &gens[gens.len() - 1]);
        let b2 = reduced_basis(&shuffled, order);
        prop_assert_eq!(&b1, &b2);
        let combo = &build(p, 3, &mult) * &gens[0];
        prop_assert!(normal_form(&combo, &b1, order).is_zero());
        for g in &b1 {
            prop_assert!(normal_form(g, &gens_basis(&gens), order).is_zero());
        }
    }

    #[test]
    fn splitting_axioms(pi in 0usize..3, n in 1usize..=3, noise in poly_strategy(3, 4, 3), a in poly_strategy(3, 2, 3), b in poly_strategy(3, 3, 4), c in poly_strategy(3, 3, 3)) {
        let p = PRIMES[pi];
        let trim = |v: &[(Vec<u32>, u64)]| v.iter().map(|(e, c)| (e[..n].to_vec(), *c)).collect::<Vec<_>>();
        let phi = splitting_from(p, n, &trim(&noise));
        let a = build(p, n, &trim(&a));
        let b = build(p, n, &trim(&b));
        let c = build(p, n, &trim(&c));
        prop_assert!(phi.apply(&phi.ring().one()).unwrap().is_one());
        prop_assert_eq!(phi.apply(&(&a.frobenius() * &b)).unwrap(), &a * &phi.apply(&b).unwrap());
        prop_assert_eq!(phi.apply(&(&b + &c)).unwrap(), &phi.apply(&b).unwrap() + &phi.apply(&c).unwrap());
    }

    #[test]
    fn compatibility_matches_brute_force(pi in 0usize..3, n in 1usize..=3, noise in poly_strategy(3, 4, 2), j in prop::collection::vec(poly_strategy(3, 2, 2), 1..=2), vars in prop::collection::vec(0usize..3, 0..=2)) {
        let p = PRIMES[pi];
        let trim = |v: &[(Vec<u32>, u64)]| v.iter().map(|(e, c)| (e[..n].to_vec(), *c)).collect::<Vec<_>>();
        let phi = splitting_from(p, n, &trim(&noise));
        let mut gens: Vec<Poly> = j.iter().map(|g| build(p, n, &trim(g))).collect();
        gens.extend(vars.iter().filter(|&&v| v < n).map(|&v| phi.ring().var_at(v)));
        let j = Ideal::new(phi.ring().clone(), gens).unwrap();
        prop_assert_eq!(phi.is_compatible(&j).unwrap().compatible, brute_force_compatible(&phi, &j));
    }

    #[test]
    fn closure_is_extensive_monotone_idempotent(pi in 0usize..3, n in 1usize..=3, noise in poly_strategy(3, 4, 2), j in poly_strategy(3, 2, 2), extra in poly_strategy(3, 2, 2)) {
        let p = PRIMES[pi];
        let trim = |v: &[(Vec<u32>, u64)]| v.iter().map(|(e, c)| (e[..n].to_vec(), *c)).collect::<Vec<_>>();
        let phi = splitting_from(p, n, &trim(&noise));
        let r = phi.ring().clone();
        let j1 = Ideal::new(r.clone(), vec![build(p, n, &trim(&j))]).unwrap();
        let j2 = j1.add_gens(&[build(p, n, &trim(&extra))]).unwrap();
        let c1 = phi.compatible_closure(&j1).unwrap();
        let c2 = phi.compatible_closure(&j2).unwrap();
        prop_assert!(j1.is_subset(&c1));
        prop_assert!(c1.is_subset(&c2));
        prop_assert_eq!(&phi.compatible_closure(&c1).unwrap(), &c1);
        prop_assert!(phi.is_compatible(&c1).unwrap().compatible);
    }

    #[test]
    fn restriction_commutes_with_quotient(pi in 0usize..3, noise in poly_strategy(3, 4, 3), g in poly_strategy(1, 6, 4), kill in 1usize..3) {
        let p = PRIMES[pi];
        let mut phi = splitting_from(p, 3, &noise);
        let r = phi.ring().clone();
        // make the coordinate subspace compatible by multiplying in the killed variables
        let killed: Vec<usize> = (3 - kill..3).collect();
        let ideal = Ideal::of_vars(r.clone(), &killed);
        if !phi.is_compatible(&ideal).unwrap().compatible {
            phi = splitting_from(p, 3, &[]);
        }
        let res = phi.restrict_to_coordinate_subspace(&killed).unwrap();
        let keep: Vec<usize> = (0..3 - kill).collect();
        let g_small = build(p, 1, &g).remap(3 - kill, &[0]);
        let g_big = g_small.remap(3, &keep);
        let upstairs = ideal.normal_form(&phi.apply(&g_big).unwrap());
        let down = res.apply(&g_small).unwrap().remap(3, &keep);
        prop_assert_eq!(upstairs, down);
    }
}

fn gens_basis(gens: &[Poly]) -> Vec<Poly> {
    reduced_basis(gens, MonomialOrder::GrevLex)
}

fn univariate_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..1000, 1..=7)
}

fn check_factorization(p: u64, coeffs: Vec<u64>) -> Result<(), TestCaseError> {
    let f = UPoly::new(prime(p), coeffs);
    if f.is_zero() {
        return Ok(());
    }
    let fac = factor(&f, 7).unwrap();
    prop_assert_eq!(fac.expand(prime(p)), f.clone());
    for (g, _) in &fac.factors {
        prop_assert_eq!(g.lc(), 1);
        prop_assert!(irreducible_by_search(g), "{} reducible", g.display("x"));
    }
    let sqf = squarefree_decomposition(&f).unwrap();
    let mut prod = UPoly::new(prime(p), vec![f.lc()]);
    for (a, i) in &sqf {
        prod = prod.mul(&a.pow(*i as u64));
    }
    prop_assert_eq!(prod, f);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn factorization_p2(c in univariate_strategy()) { check_factorization(2, c)?; }
    #[test]
    fn factorization_p3(c in univariate_strategy()) { check_factorization(3, c)?; }
    #[test]
    fn factorization_p5(c in univariate_strategy()) { check_factorization(5, c)?; }
    #[test]
    fn factorization_p7(c in univariate_strategy()) { check_factorization(7, c)?; }
    #[test]
    fn factorization_p13(c in univariate_strategy()) { check_factorization(13, c)?; }
}

fn wild_map(p: u64) -> (FiniteRingMap, Splitting, Splitting) {
    let pr = prime(p);
    let a = Ring::free("A", pr, &["w"]).into_arc();
    let b = Ring::free("B", pr, &["x"]).invert("x").unwrap().into_arc();
    let names: Vec<String> = vec!["w".into(), "T".into()];
    let wit = parse_poly("T^2 - w*T + 1", &names, pr).unwrap();
    let img = parse_poly("x + x_inv", b.var_names(), pr).unwrap();
    let map = FiniteRingMap::new("alpha", a.clone(), b.clone(), vec![img], vec![(0, wit)]).unwrap();
    let (u, f) = if p == 2 { ("w + w^2".to_string(), "1 + x + x^2") } else { (format!("(w^2 - 4)^{}", (p - 1) / 2), "x") };
    let phi = Splitting::new(a.clone(), parse_poly(&u, a.var_names(), pr).unwrap()).unwrap();
    let psi = Splitting::from_anticanonical(b.clone(), parse_poly(f, b.var_names(), pr).unwrap()).unwrap();
    (map, phi, psi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_is_linear_over_a(pi in 0usize..3, t1 in poly_strategy(2, 3, 3), t2 in poly_strategy(2, 3, 3), a in poly_strategy(1, 3, 2), c in 0u64..5) {
        let p = PRIMES[pi];
        let (map, _, _) = wild_map(p);
        let b = map.target().clone();
        let ctx = TraceContext::new(&map).unwrap();
        let th1 = b.normal_form(&build(p, 2, &t1));
        let th2 = b.normal_form(&build(p, 2, &t2));
        let a = build(p, 1, &a);
        let lhs = ctx.trace_t(&b.normal_form(&(&th1.scale(c) + &th2))).unwrap();
        let rhs = ctx.trace_t(&th1).unwrap().mul(&frobsplit::trace::RatFunc::from_poly(Poly::constant(prime(p), 1, c))).add(&ctx.trace_t(&th2).unwrap());
        prop_assert!(lhs == rhs);
        let pulled = map.pullback(&a).unwrap();
        let lhs = ctx.trace_t(&b.normal_form(&(&pulled * &th1))).unwrap();
        let rhs = ctx.a_to_t(&a).unwrap().mul(&ctx.trace_t(&th1).unwrap());
        prop_assert!(lhs == rhs);
    }

    #[test]
    fn images_of_compatible_ideals_are_compatible(pi in 0usize..3, j in poly_strategy(2, 2, 2)) {
        let p = PRIMES[pi];
        let (map, phi, psi) = wild_map(p);
        let b = map.target().clone();
        let g = b.normal_form(&build(p, 2, &j));
        let w = psi.compatible_closure(&Ideal::new(b.clone(), vec![g]).unwrap()).unwrap();
        prop_assert!(psi.is_compatible(&w).unwrap().compatible);
        let img = map.image_ideal(&w).unwrap();
        prop_assert!(phi.is_compatible(&img).unwrap().compatible, "image {} of {}", img, w);
    }
}
