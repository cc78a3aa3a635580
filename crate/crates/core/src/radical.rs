//! Radicals and minimal primes on a restricted but useful domain.
//!
//! Both routines simplify the lifted ideal step by step: monomial and
//! univariate elements are split, variables occurring linearly with a
//! constant coefficient are eliminated, a variable occurring linearly with
//! a nonconstant coefficient `a` splits the problem along `a = 0` and
//! `a != 0`, and zero-dimensional ideals are handled through eliminants of
//! linear forms. Anything left over is reported as `Unsupported`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::groebner;
use crate::ideal::{exact_div, intersect, poly_gcd, saturate_by, Ideal};
use crate::linalg;
use crate::order::MonomialOrder;
use crate::poly::Poly;
use crate::univariate::{self, UPoly, DEFAULT_SEED};

const GREVLEX: MonomialOrder = MonomialOrder::GrevLex;
const STEP_BUDGET: usize = 400;
const STAIRCASE_LIMIT: usize = 4096;
const FORM_ATTEMPTS: usize = 12;

/// Radical of `I`, or `Unsupported` outside the handled shapes.
pub fn radical(i: &Ideal) -> Result<Ideal> {
    let mut budget = STEP_BUDGET;
    let gens = rad(&i.lifted_gens(), &mut budget)?;
    Ideal::new(i.ring().clone(), gens)
}

/// Minimal primes of `I`, sorted by canonical string.
pub fn minimal_primes(i: &Ideal) -> Result<Vec<Ideal>> {
    let mut budget = STEP_BUDGET;
    let comps = primes(&i.lifted_gens(), &mut budget)?;
    let mut out: Vec<Ideal> = Vec::new();
    for c in minimal_only(comps) {
        out.push(Ideal::new(i.ring().clone(), c)?);
    }
    out.sort_by_key(|q| q.canonical_string());
    Ok(out)
}

/// Squarefree part of a multivariate polynomial, monic.
pub fn squarefree_part(f: &Poly) -> Poly {
    if f.is_zero() || f.is_constant() {
        return f.monic(GREVLEX);
    }
    let mut g = f.clone();
    for v in f.variables() {
        g = poly_gcd(&g, &f.derivative(v));
        if g.is_constant() {
            return f.monic(GREVLEX);
        }
    }
    if g.monic(GREVLEX) == f.monic(GREVLEX) {
        // every partial vanishes: f is a p-th power
        return squarefree_part(&pth_root(f));
    }
    let cofactor = exact_div(f, &g).expect("gcd divides");
    let a = squarefree_part(&cofactor);
    let b = squarefree_part(&g);
    let d = poly_gcd(&a, &b);
    exact_div(&(&a * &b), &d).expect("gcd divides").monic(GREVLEX)
}

fn pth_root(f: &Poly) -> Poly {
    let p = f.prime().value() as u32;
    Poly::from_terms(
        f.prime(),
        f.nvars(),
        f.terms().map(|(m, c)| (crate::poly::Monomial::new(m.exponents().iter().map(|e| e / p).collect()), c)),
    )
}

fn spend(budget: &mut usize) -> Result<()> {
    if *budget == 0 {
        return Err(Error::Unsupported("decomposition did not settle within the step budget".into()));
    }
    *budget -= 1;
    Ok(())
}

/// Split `g` as `a * x_i + b` with `a`, `b` free of `x_i`.
fn linear_split(g: &Poly, i: usize) -> (Poly, Poly) {
    let (p, n) = (g.prime(), g.nvars());
    let mut a = Poly::zero(p, n);
    let mut b = Poly::zero(p, n);
    for (m, c) in g.terms() {
        if m.exponents()[i] == 1 {
            let mut e = m.exponents().to_vec();
            e[i] = 0;
            a.add_term(crate::poly::Monomial::new(e), c);
        } else {
            b.add_term(m.clone(), c);
        }
    }
    (a, b)
}

/// Linear occurrences `(element index, var, a, b)` in a basis.
fn linear_pivots(basis: &[Poly]) -> Vec<(usize, usize, Poly, Poly)> {
    let mut out = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        for i in g.variables() {
            if g.degree_in(i) == 1 {
                let (a, b) = linear_split(g, i);
                out.push((k, i, a, b));
            }
        }
    }
    out
}

fn with(gens: &[Poly], extra: Poly) -> Vec<Poly> {
    let mut v = gens.to_vec();
    v.push(extra);
    v
}

/// The single variable of `g`, if it is univariate and nonconstant.
fn univariate_var(g: &Poly) -> Option<usize> {
    let v = g.variables();
    (v.len() == 1).then(|| v[0])
}

/// Substitute the constant-coefficient pivot into the remaining elements.
fn eliminate_pivot(basis: &[Poly], k: usize, i: usize, a: &Poly, b: &Poly) -> Vec<Poly> {
    let p = a.prime();
    let c = a.constant_term();
    let value = b.scale(p.neg(p.inv(c)));
    basis
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, g)| g.substitute_var(i, &value))
        .collect()
}

/// Eliminate variable `i` keeping the ambient arity.
fn eliminate_var(gens: &[Poly], i: usize) -> Vec<Poly> {
    let Some(n) = gens.first().map(|g| g.nvars()) else {
        return Vec::new();
    };
    let mut map: Vec<usize> = vec![0; n];
    let mut back = Vec::with_capacity(n - 1);
    let mut next = 1;
    for (v, slot) in map.iter_mut().enumerate() {
        if v == i {
            *slot = 0;
        } else {
            *slot = next;
            back.push(v);
            next += 1;
        }
    }
    let moved: Vec<Poly> = gens.iter().map(|g| g.remap(n, &map)).collect();
    crate::ideal::eliminate(&moved, 1).iter().map(|g| g.remap(n, &back)).collect()
}

/// Minimal polynomial of the linear form `l` modulo a zero-dimensional basis.
fn eliminant(basis: &[Poly], l: &Poly, stairs: &[crate::poly::Monomial]) -> UPoly {
    let p = l.prime();
    let d = stairs.len();
    let mut cols: Vec<Vec<u64>> = Vec::new();
    let mut power = Poly::one(p, l.nvars());
    for k in 0..=d {
        let nf = groebner::normal_form(&power, basis, GREVLEX);
        cols.push(stairs.iter().map(|m| nf.coeff_of(m)).collect());
        let rows: Vec<Vec<u64>> = (0..d).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        let kernel = linalg::nullspace(&rows, p, k + 1);
        if let Some(v) = kernel.into_iter().next() {
            return UPoly::new(p, v).monic();
        }
        power = groebner::normal_form(&(&power * l), basis, GREVLEX);
    }
    unreachable!("d + 1 vectors in a d-dimensional space are dependent")
}

fn linear_forms(n: usize, p: crate::field::Prime) -> Vec<Poly> {
    let mut forms: Vec<Poly> = (0..n).map(|i| Poly::var(p, n, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for _ in 0..FORM_ATTEMPTS {
        let mut l = Poly::zero(p, n);
        for i in 0..n {
            l = &l + &Poly::var(p, n, i).scale(rng.gen_range(0..p.value()));
        }
        if !l.is_zero() {
            forms.push(l);
        }
    }
    forms
}

fn rad(gens: &[Poly], budget: &mut usize) -> Result<Vec<Poly>> {
    spend(budget)?;
    let b = groebner::reduced_basis(gens, GREVLEX);
    if b.is_empty() || b[0].is_one() {
        return Ok(b);
    }
    let n = b[0].nvars();
    // monomials: x^k becomes x, products split along one variable
    if let Some(g) = b.iter().find(|g| g.len() == 1 && g.total_degree() > Some(1)) {
        let vars = g.variables();
        let x = Poly::var(g.prime(), n, vars[0]);
        if vars.len() == 1 {
            let rest: Vec<Poly> = b.iter().filter(|h| *h != g).cloned().collect();
            return rad(&with(&rest, x), budget);
        }
        return split_rad(&b, &x, budget);
    }
    // linear elimination with a constant coefficient
    if let Some((k, i, a, c)) = linear_pivots(&b).into_iter().find(|(_, _, a, _)| a.is_constant()) {
        let rest = eliminate_pivot(&b, k, i, &a, &c);
        let r = rad(&rest, budget)?;
        return Ok(groebner::reduced_basis(&with(&r, b[k].clone()), GREVLEX));
    }
    if b.len() == 1 {
        return Ok(vec![squarefree_part(&b[0])]);
    }
    if groebner::is_zero_dimensional(&b, GREVLEX, &(0..n).collect::<Vec<_>>()) {
        let mut extra = b.clone();
        for i in 0..n {
            let stairs = groebner::staircase(&b, GREVLEX, n, STAIRCASE_LIMIT)
                .ok_or_else(|| Error::Unsupported("staircase too large".into()))?;
            let m = eliminant(&b, &Poly::var(b[0].prime(), n, i), &stairs);
            extra.push(univariate::squarefree_part(&m)?.to_poly(n, i));
        }
        return Ok(groebner::reduced_basis(&extra, GREVLEX));
    }
    // replace elements by their squarefree parts
    let mut changed = false;
    let mut reduced = Vec::with_capacity(b.len());
    for g in &b {
        let s = squarefree_part(g);
        if s != g.monic(GREVLEX) {
            changed = true;
        }
        reduced.push(s);
    }
    if changed {
        return rad(&reduced, budget);
    }
    // monomial content
    for g in &b {
        let content = g.terms().map(|(m, _)| m.clone()).reduce(|a, m| a.gcd(&m)).unwrap();
        let first = content.support().next();
        if let Some(v) = first {
            return split_rad(&b, &Poly::var(g.prime(), n, v), budget);
        }
    }
    // univariate elements with several factors
    for g in &b {
        if let Some(v) = univariate_var(g) {
            let fac = univariate::factor(&UPoly::from_poly(g, v).unwrap(), DEFAULT_SEED)?;
            if fac.factors.len() > 1 {
                let mut acc: Option<Vec<Poly>> = None;
                for (q, _) in &fac.factors {
                    let r = rad(&with(&b, q.to_poly(n, v)), budget)?;
                    acc = Some(match acc {
                        None => r,
                        Some(prev) => intersect(&prev, &r),
                    });
                }
                return Ok(groebner::reduced_basis(&acc.unwrap(), GREVLEX));
            }
        }
    }
    // a variable occurring linearly with a nonconstant coefficient
    if let Some((k, i, a, _)) = best_nonconstant_pivot(&b) {
        let on_a = rad(&with(&b, a.clone()), budget)?;
        let sat = saturate_by(&b, &a);
        let elim = eliminate_var(&sat, i);
        let r = rad(&elim, budget)?;
        let off_a = saturate_by(&with(&r, b[k].clone()), &a);
        return Ok(groebner::reduced_basis(&intersect(&on_a, &off_a), GREVLEX));
    }
    Err(Error::Unsupported(format!("radical of an ideal with {} basis elements in {n} variables", b.len())))
}

fn best_nonconstant_pivot(b: &[Poly]) -> Option<(usize, usize, Poly, Poly)> {
    linear_pivots(b).into_iter().filter(|(_, _, a, _)| !a.is_zero()).min_by_key(|(_, _, a, _)| (a.total_degree(), a.len()))
}

fn split_rad(b: &[Poly], x: &Poly, budget: &mut usize) -> Result<Vec<Poly>> {
    let on = rad(&with(b, x.clone()), budget)?;
    let off = rad(&saturate_by(b, x), budget)?;
    Ok(groebner::reduced_basis(&intersect(&on, &off), GREVLEX))
}

fn primes(gens: &[Poly], budget: &mut usize) -> Result<Vec<Vec<Poly>>> {
    spend(budget)?;
    let b = groebner::reduced_basis(gens, GREVLEX);
    if b.first().map(|g| g.is_one()).unwrap_or(false) {
        return Ok(Vec::new());
    }
    if b.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    let n = b[0].nvars();
    let p = b[0].prime();
    if let Some(g) = b.iter().find(|g| g.len() == 1 && g.total_degree() > Some(1)) {
        let vars = g.variables();
        let x = Poly::var(p, n, vars[0]);
        if vars.len() == 1 {
            let rest: Vec<Poly> = b.iter().filter(|h| *h != g).cloned().collect();
            return primes(&with(&rest, x), budget);
        }
        return split_primes(&b, &x, budget);
    }
    if let Some((k, i, a, c)) = linear_pivots(&b).into_iter().find(|(_, _, a, _)| a.is_constant()) {
        let rest = eliminate_pivot(&b, k, i, &a, &c);
        let comps = primes(&rest, budget)?;
        return Ok(comps.into_iter().map(|q| groebner::reduced_basis(&with(&q, b[k].clone()), GREVLEX)).collect());
    }
    for g in &b {
        if let Some(v) = univariate_var(g) {
            let fac = univariate::factor(&UPoly::from_poly(g, v).unwrap(), DEFAULT_SEED)?;
            if fac.factors.len() > 1 || fac.factors[0].1 > 1 {
                let mut out = Vec::new();
                for (q, _) in &fac.factors {
                    out.extend(primes(&with(&b, q.to_poly(n, v)), budget)?);
                }
                return Ok(out);
            }
        }
    }
    let mut changed = false;
    let mut reduced = Vec::with_capacity(b.len());
    for g in &b {
        let s = squarefree_part(g);
        if s != g.monic(GREVLEX) {
            changed = true;
        }
        reduced.push(s);
    }
    if changed {
        return primes(&reduced, budget);
    }
    for g in &b {
        let content = g.terms().map(|(m, _)| m.clone()).reduce(|a, m| a.gcd(&m)).unwrap();
        let first = content.support().next();
        if let Some(v) = first {
            return split_primes(&b, &Poly::var(p, n, v), budget);
        }
    }
    // a linear element whose coefficients share a factor is reducible
    for (k, _, a, c) in linear_pivots(&b) {
        let d = poly_gcd(&a, &c);
        if !d.is_constant() {
            let cof = exact_div(&b[k], &d).expect("gcd divides");
            let mut out = primes(&with(&b, d), budget)?;
            out.extend(primes(&with(&b, cof), budget)?);
            return Ok(out);
        }
    }
    if b.len() == 1 {
        if let Some(v) = univariate_var(&b[0]) {
            let _ = v;
            return Ok(vec![b]);
        }
        if !linear_pivots(&b).is_empty() {
            // primitive of degree one in some variable
            return Ok(vec![b]);
        }
    }
    if groebner::is_zero_dimensional(&b, GREVLEX, &(0..n).collect::<Vec<_>>()) {
        let stairs = groebner::staircase(&b, GREVLEX, n, STAIRCASE_LIMIT)
            .ok_or_else(|| Error::Unsupported("staircase too large".into()))?;
        for l in linear_forms(n, p) {
            let m = eliminant(&b, &l, &stairs);
            let fac = univariate::factor(&m, DEFAULT_SEED)?;
            if fac.factors.len() == 1 && fac.factors[0].1 == 1 && m.degree() == Some(stairs.len()) {
                return Ok(vec![b]);
            }
            if fac.factors.len() > 1 || fac.factors[0].1 > 1 {
                let mut out = Vec::new();
                for (q, _) in &fac.factors {
                    let ql = q.to_poly(1, 0).compose(std::slice::from_ref(&l))?;
                    out.extend(primes(&with(&b, ql), budget)?);
                }
                return Ok(out);
            }
        }
        return Err(Error::Unsupported("zero-dimensional ideal without a separating linear form".into()));
    }
    if let Some((k, i, a, _)) = best_nonconstant_pivot(&b) {
        let mut out = primes(&with(&b, a.clone()), budget)?;
        let sat = saturate_by(&b, &a);
        let elim = eliminate_var(&sat, i);
        for q in primes(&elim, budget)? {
            let lifted = groebner::reduced_basis(&saturate_by(&with(&q, b[k].clone()), &a), GREVLEX);
            if !lifted.first().map(|g| g.is_one()).unwrap_or(false) {
                out.push(lifted);
            }
        }
        return Ok(out);
    }
    Err(Error::Unsupported(format!("minimal primes of an ideal with {} basis elements in {n} variables", b.len())))
}

fn split_primes(b: &[Poly], x: &Poly, budget: &mut usize) -> Result<Vec<Vec<Poly>>> {
    let mut out = primes(&with(b, x.clone()), budget)?;
    out.extend(primes(&saturate_by(b, x), budget)?);
    Ok(out)
}

fn contains_all(big: &[Poly], small: &[Poly]) -> bool {
    small.iter().all(|g| groebner::normal_form(g, big, GREVLEX).is_zero())
}

fn minimal_only(all: Vec<Vec<Poly>>) -> Vec<Vec<Poly>> {
    let mut comps: Vec<Vec<Poly>> = Vec::new();
    for c in all {
        if !comps.contains(&c) {
            comps.push(c);
        }
    }
    let keep: Vec<bool> = comps
        .iter()
        .enumerate()
        .map(|(k, c)| !comps.iter().enumerate().any(|(j, d)| j != k && contains_all(c, d) && !contains_all(d, c)))
        .collect();
    comps.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;
    use crate::parse::parse_poly;
    use crate::ring::Ring;
    use std::sync::Arc;

    fn ideal(r: &Arc<Ring>, gens: &[&str]) -> Ideal {
        Ideal::new(r.clone(), gens.iter().map(|s| parse_poly(s, r.var_names(), r.prime()).unwrap()).collect())
            .unwrap()
    }

    fn free(p: u64, vars: &[&str]) -> Arc<Ring> {
        Ring::free("R", Prime::new(p).unwrap(), vars).into_arc()
    }

    #[test]
    fn principal_square() {
        let r = free(3, &["x"]);
        assert_eq!(radical(&ideal(&r, &["(x+1)^2"])).unwrap(), ideal(&r, &["x+1"]));
    }

    #[test]
    fn wild_preimage_point() {
        let r = Ring::free("B", Prime::new(2).unwrap(), &["x"]).invert("x").unwrap().into_arc();
        let i = ideal(&r, &["x + x_inv"]);
        let rad = radical(&i).unwrap();
        assert_eq!(rad.canonical_string(), "(x + 1, x_inv + 1)");
    }

    #[test]
    fn zero_dimensional_radical() {
        let r = free(5, &["u", "v"]);
        assert_eq!(radical(&ideal(&r, &["u^2", "v - 1"])).unwrap(), ideal(&r, &["u", "v - 1"]));
    }

    #[test]
    fn minimal_primes_examples() {
        let r = free(2, &["x"]);
        let mp = minimal_primes(&ideal(&r, &["x^2 + 1"])).unwrap();
        assert_eq!(mp, vec![ideal(&r, &["x + 1"])]);
        let r = free(5, &["u"]);
        let mp = minimal_primes(&ideal(&r, &["u^2 - 4"])).unwrap();
        assert_eq!(mp.len(), 2);
        assert!(mp.contains(&ideal(&r, &["u - 2"])));
        assert!(mp.contains(&ideal(&r, &["u + 2"])));
        let r = free(7, &["u", "v"]);
        let mp = minimal_primes(&ideal(&r, &["u*v"])).unwrap();
        assert_eq!(mp, vec![ideal(&r, &["u"]), ideal(&r, &["v"])]);
    }

    #[test]
    fn surface_is_prime() {
        for p in [2u64, 3, 5, 7] {
            let r = free(p, &["u", "v", "w"]);
            let f = ideal(&r, &["u*v*w - v^2 - w^2"]);
            assert_eq!(minimal_primes(&f).unwrap(), vec![f.clone()]);
            assert_eq!(radical(&f).unwrap(), f);
        }
    }

    #[test]
    fn zero_dimensional_split_by_form() {
        // x^2 + 1 and y^2 + 1 are irreducible over F_3 but the ideal is not prime
        let r = free(3, &["x", "y"]);
        let mp = minimal_primes(&ideal(&r, &["x^2 + 1", "y^2 + 1"])).unwrap();
        assert_eq!(mp.len(), 2);
        for q in &mp {
            assert!(q.contains(&parse_poly("x^2 + 1", r.var_names(), r.prime()).unwrap()));
        }
    }

    #[test]
    fn char_p_squarefree() {
        let r = free(2, &["x", "y"]);
        let f = parse_poly("x^2*y", r.var_names(), r.prime()).unwrap();
        assert_eq!(squarefree_part(&f), parse_poly("x*y", r.var_names(), r.prime()).unwrap());
        let g = parse_poly("(x + y)^4 * (x*y + 1)", r.var_names(), r.prime()).unwrap();
        assert_eq!(squarefree_part(&g), parse_poly("(x + y)*(x*y + 1)", r.var_names(), r.prime()).unwrap());
    }
}
