//! Ideals of presented rings and the elimination toolkit behind them.
//!
//! An ideal of `A = F_p[x] / I_A` is stored by generators in the ambient
//! polynomial ring; every computation works with the lift `J + I_A`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::cartier;
use crate::error::{Error, Result};
use crate::groebner;
use crate::order::MonomialOrder;
use crate::poly::{Monomial, Poly};
use crate::ring::{same_ring, Ring};
use crate::univariate::UPoly;

const GREVLEX: MonomialOrder = MonomialOrder::GrevLex;

#[derive(Clone)]
pub struct Ideal {
    ring: Arc<Ring>,
    gens: Vec<Poly>,
    basis: OnceLock<Vec<Poly>>,
}

impl Ideal {
    pub fn new(ring: Arc<Ring>, gens: Vec<Poly>) -> Result<Ideal> {
        for g in &gens {
            ring.check_poly(g)?;
        }
        Ok(Ideal::unchecked(ring, gens))
    }

    fn unchecked(ring: Arc<Ring>, gens: Vec<Poly>) -> Ideal {
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
        Ideal { ring, gens, basis: OnceLock::new() }
    }

    pub fn zero(ring: Arc<Ring>) -> Ideal {
        Ideal::unchecked(ring, Vec::new())
    }

    pub fn unit(ring: Arc<Ring>) -> Ideal {
        let one = ring.one();
        Ideal::unchecked(ring, vec![one])
    }

    /// The ideal generated by a subset of the variables.
    pub fn of_vars(ring: Arc<Ring>, vars: &[usize]) -> Ideal {
        let gens = vars.iter().map(|&i| ring.var_at(i)).collect();
        Ideal::unchecked(ring, gens)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    /// Generators together with the ring relations.
    pub fn lifted_gens(&self) -> Vec<Poly> {
        let mut v = self.gens.clone();
        v.extend(self.ring.relations().iter().cloned());
        v
    }

    /// Reduced grevlex basis of the lift `J + I_A`.
    pub fn basis(&self) -> &[Poly] {
        self.basis.get_or_init(|| {
            let b = groebner::reduced_basis(&self.lifted_gens(), GREVLEX);
            debug_assert!(self.lifted_gens().iter().all(|g| groebner::normal_form(g, &b, GREVLEX).is_zero()));
            b
        })
    }

    pub fn is_unit(&self) -> bool {
        self.basis().first().map(|g| g.is_one()).unwrap_or(false)
    }

    pub fn is_zero(&self) -> bool {
        self.gens.iter().all(|g| self.ring.normal_form(g).is_zero())
    }

    pub fn normal_form(&self, f: &Poly) -> Poly {
        groebner::normal_form(f, self.basis(), GREVLEX)
    }

    pub fn contains(&self, f: &Poly) -> bool {
        self.normal_form(f).is_zero()
    }

    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    /// Basis elements that are not already zero in the ring.
    pub fn display_basis(&self) -> Vec<Poly> {
        self.basis().iter().filter(|g| !self.ring.normal_form(g).is_zero()).cloned().collect()
    }

    /// Krull dimension of `A / J` from leading terms; `None` for the unit ideal.
    pub fn dimension(&self) -> Option<usize> {
        groebner::dimension(self.basis(), GREVLEX, self.ring.nvars())
    }

    fn check(&self, other: &Ideal) -> Result<()> {
        same_ring(&self.ring, &other.ring)
    }

    fn with_gens(&self, gens: Vec<Poly>) -> Ideal {
        Ideal::unchecked(self.ring.clone(), gens)
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        self.check(other)?;
        let mut g = self.gens.clone();
        g.extend(other.gens.iter().cloned());
        Ok(self.with_gens(g))
    }

    pub fn add_gens(&self, extra: &[Poly]) -> Result<Ideal> {
        for f in extra {
            self.ring.check_poly(f)?;
        }
        let mut g = self.gens.clone();
        g.extend(extra.iter().cloned());
        Ok(self.with_gens(g))
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        self.check(other)?;
        let mut g = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                g.push(a * b);
            }
        }
        Ok(self.with_gens(g))
    }

    pub fn intersection(&self, other: &Ideal) -> Result<Ideal> {
        self.check(other)?;
        Ok(self.with_gens(intersect(&self.lifted_gens(), &other.lifted_gens())))
    }

    /// `J : (f)`.
    pub fn colon(&self, f: &Poly) -> Result<Ideal> {
        self.ring.check_poly(f)?;
        Ok(self.with_gens(colon_by(&self.lifted_gens(), f)))
    }

    /// `J : K`.
    pub fn colon_ideal(&self, other: &Ideal) -> Result<Ideal> {
        self.check(other)?;
        let mut acc = Ideal::unit(self.ring.clone());
        for g in &other.gens {
            acc = acc.intersection(&self.colon(g)?)?;
        }
        Ok(acc)
    }

    /// `J : f^infinity`.
    pub fn saturate(&self, f: &Poly) -> Result<Ideal> {
        self.ring.check_poly(f)?;
        Ok(self.with_gens(saturate_by(&self.lifted_gens(), f)))
    }

    /// Whether `f` lies in the radical of `J`.
    pub fn radical_contains(&self, f: &Poly) -> Result<bool> {
        self.ring.check_poly(f)?;
        Ok(radical_member(&self.lifted_gens(), f))
    }

    /// `J^[p]`, generated by p-th powers of the lifted generators.
    pub fn frobenius_power(&self) -> Ideal {
        self.with_gens(self.gens.iter().map(|g| g.frobenius()).collect())
    }

    /// The Frobenius root of the lifted ideal.
    pub fn frobenius_root(&self) -> Ideal {
        self.with_gens(cartier::frobenius_root_generators(&self.lifted_gens()))
    }

    /// Eliminate the first `k` variables, giving an ideal of a free ring on the rest.
    pub fn eliminate_prefix(&self, k: usize) -> Result<Ideal> {
        if k > self.ring.nvars() {
            return Err(Error::Invalid(format!("cannot eliminate {k} variables")));
        }
        let names: Vec<String> = self.ring.var_names()[k..].to_vec();
        let ring = Ring::with_names(format!("{}_elim", self.ring.name()), self.ring.prime(), names)?.into_arc();
        Ok(Ideal::unchecked(ring, eliminate(&self.lifted_gens(), k)))
    }

    /// Canonical text `(g1, g2, ...)`; `(0)` and `(1)` for the extremes.
    pub fn canonical_string(&self) -> String {
        if self.is_unit() {
            return "(1)".into();
        }
        let b = self.display_basis();
        if b.is_empty() {
            return "(0)".into();
        }
        let parts: Vec<String> = b.iter().map(|g| self.ring.fmt_poly(g)).collect();
        format!("({})", parts.join(", "))
    }
}

impl Ideal {
    /// Canonical text using the reduced basis for `order`.
    pub fn canonical_string_in(&self, order: MonomialOrder) -> String {
        if order == GREVLEX {
            return self.canonical_string();
        }
        if self.is_unit() {
            return "(1)".into();
        }
        let b: Vec<Poly> = groebner::reduced_basis(&self.lifted_gens(), order)
            .into_iter()
            .filter(|g| !self.ring.normal_form(g).is_zero())
            .collect();
        if b.is_empty() {
            return "(0)".into();
        }
        let parts: Vec<String> = b.iter().map(|g| g.display_in(self.ring.var_names(), order)).collect();
        format!("({})", parts.join(", "))
    }
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.basis() == other.basis()
    }
}

impl Eq for Ideal {}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{} in {}", self.canonical_string(), self.ring.name())
    }
}

/// Generators of the elimination ideal `(gens) ∩ F_p[x_k..]`, as polynomials
/// in the remaining variables.
pub fn eliminate(gens: &[Poly], k: usize) -> Vec<Poly> {
    let b = groebner::reduced_basis(gens, MonomialOrder::Block(k));
    let Some(n) = b.first().map(|g| g.nvars()) else {
        return Vec::new();
    };
    let keep: Vec<usize> = (k..n).collect();
    b.iter().filter_map(|g| g.restrict_to(&keep)).collect()
}

fn with_tag_var(gens: &[Poly]) -> Vec<Poly> {
    gens.iter().map(|g| g.embed(g.nvars() + 1, 1)).collect()
}

/// `(a) ∩ (b)` via `t*a + (1-t)*b` and elimination of `t`.
pub fn intersect(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let a: Vec<Poly> = a.iter().filter(|g| !g.is_zero()).cloned().collect();
    let b: Vec<Poly> = b.iter().filter(|g| !g.is_zero()).cloned().collect();
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a[0].nvars();
    let p = a[0].prime();
    let t = Poly::var(p, n + 1, 0);
    let one_minus_t = &Poly::one(p, n + 1) - &t;
    let mut gens: Vec<Poly> = with_tag_var(&a).iter().map(|g| &t * g).collect();
    gens.extend(with_tag_var(&b).iter().map(|g| &one_minus_t * g));
    eliminate(&gens, 1)
}

/// `(a) : f`.
pub fn colon_by(a: &[Poly], f: &Poly) -> Vec<Poly> {
    if f.is_zero() {
        return vec![Poly::one(f.prime(), f.nvars())];
    }
    intersect(a, std::slice::from_ref(f))
        .iter()
        .map(|g| exact_div(g, f).expect("intersection with (f) is divisible by f"))
        .collect()
}

/// `(a) : f^infinity` via `a + (1 - t f)` and elimination of `t`.
pub fn saturate_by(a: &[Poly], f: &Poly) -> Vec<Poly> {
    let a: Vec<Poly> = a.iter().filter(|g| !g.is_zero()).cloned().collect();
    if a.is_empty() {
        return Vec::new();
    }
    let n = f.nvars();
    let mut gens = with_tag_var(&a);
    gens.push(&Poly::one(f.prime(), n + 1) - &(&Poly::var(f.prime(), n + 1, 0) * &f.embed(n + 1, 1)));
    eliminate(&gens, 1)
}

/// `f ∈ sqrt(a)` iff `1 ∈ a + (1 - t f)`.
pub fn radical_member(a: &[Poly], f: &Poly) -> bool {
    let n = f.nvars();
    let mut gens = with_tag_var(a);
    gens.push(&Poly::one(f.prime(), n + 1) - &(&Poly::var(f.prime(), n + 1, 0) * &f.embed(n + 1, 1)));
    let b = groebner::reduced_basis(&gens, GREVLEX);
    b.first().map(|g| g.is_one()).unwrap_or(false)
}

/// `a / b` when `b` divides `a` exactly.
pub fn exact_div(a: &Poly, b: &Poly) -> Option<Poly> {
    if b.is_zero() {
        return None;
    }
    let (q, r) = groebner::divide(a, std::slice::from_ref(b), GREVLEX);
    if r.is_zero() {
        q.into_iter().next()
    } else {
        None
    }
}

/// Monic (grevlex) greatest common divisor; `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic(GREVLEX);
    }
    if b.is_zero() {
        return a.monic(GREVLEX);
    }
    let (p, n) = (a.prime(), a.nvars());
    if a.is_constant() || b.is_constant() {
        return Poly::one(p, n);
    }
    if a.len() == 1 && b.len() == 1 {
        let m = a.terms().next().unwrap().0.gcd(b.terms().next().unwrap().0);
        return Poly::monomial(p, m, 1);
    }
    let va = a.variables();
    if va.len() == 1 && va == b.variables() {
        let (ua, ub) = (UPoly::from_poly(a, va[0]).unwrap(), UPoly::from_poly(b, va[0]).unwrap());
        return ua.gcd(&ub).to_poly(n, va[0]);
    }
    // pull out the monomial content first, then use gcd = a*b / lcm
    let ca = monomial_content(a);
    let cb = monomial_content(b);
    let m = ca.gcd(&cb);
    let a1 = exact_div(a, &Poly::monomial(p, ca, 1)).unwrap();
    let b1 = exact_div(b, &Poly::monomial(p, cb, 1)).unwrap();
    let l = intersect(std::slice::from_ref(&a1), std::slice::from_ref(&b1));
    let lcm = l.into_iter().next().expect("principal intersection");
    let g = exact_div(&(&a1 * &b1), &lcm).expect("lcm divides the product");
    (&g * &Poly::monomial(p, m, 1)).monic(GREVLEX)
}

fn monomial_content(f: &Poly) -> Monomial {
    let mut it = f.terms().map(|(m, _)| m.clone());
    let first = it.next().unwrap_or_else(|| Monomial::one(f.nvars()));
    it.fold(first, |acc, m| acc.gcd(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;
    use crate::parse::parse_poly;

    fn ring(p: u64, vars: &[&str]) -> Arc<Ring> {
        Ring::free("R", Prime::new(p).unwrap(), vars).into_arc()
    }

    fn poly(r: &Ring, s: &str) -> Poly {
        parse_poly(s, r.var_names(), r.prime()).unwrap()
    }

    fn ideal(r: &Arc<Ring>, gens: &[&str]) -> Ideal {
        Ideal::new(r.clone(), gens.iter().map(|s| poly(r, s)).collect()).unwrap()
    }

    #[test]
    fn membership_from_lex_basis() {
        let r = ring(7, &["u", "v", "w"]);
        let i = ideal(&r, &["u*v*w - v^2 - w^2", "v"]);
        assert!(i.contains(&poly(&r, "w^2")));
        assert!(!i.contains(&poly(&r, "w")));
    }

    #[test]
    fn intersection_with_containing_ideal() {
        let r = ring(5, &["u", "v", "w"]);
        let f = ideal(&r, &["u*v*w - v^2 - w^2"]);
        let l = ideal(&r, &["v", "w"]);
        assert_eq!(f.intersection(&l).unwrap(), f);
    }

    #[test]
    fn principal_colon() {
        let r = ring(3, &["x"]);
        let i = ideal(&r, &["(x+1)^2"]);
        assert_eq!(i.colon(&poly(&r, "x+1")).unwrap(), ideal(&r, &["x+1"]));
    }

    #[test]
    fn eliminate_then_saturate_recovers_surface() {
        // x = v/w on the surface: eliminating x from x^2 - u x + 1, w x - v
        let r = ring(5, &["x", "u", "v", "w"]);
        let i = ideal(&r, &["x^2 - u*x + 1", "w*x - v"]);
        let e = i.eliminate_prefix(1).unwrap();
        let w = e.ring().var("w").unwrap();
        let sat = e.saturate(&w).unwrap();
        let expect = Ideal::new(e.ring().clone(), vec![poly(e.ring(), "u*v*w - v^2 - w^2")]).unwrap();
        assert_eq!(sat, expect);
    }

    #[test]
    fn localization_display() {
        let pr = Prime::new(2).unwrap();
        let r = Ring::free("B", pr, &["x"]).invert("x").unwrap().into_arc();
        let i = ideal(&r, &["x + 1"]);
        assert_eq!(i.canonical_string(), "(x + 1, x_inv + 1)");
        assert_eq!(Ideal::zero(r.clone()).canonical_string(), "(0)");
        assert_eq!(Ideal::unit(r).canonical_string(), "(1)");
    }

    #[test]
    fn gcd_paths() {
        let r = ring(3, &["x", "y"]);
        let a = poly(&r, "(x + y)^2 * (x - 1)");
        let b = poly(&r, "(x + y) * (y + 1)");
        assert_eq!(poly_gcd(&a, &b), poly(&r, "x + y"));
        assert_eq!(poly_gcd(&poly(&r, "x^2*y"), &poly(&r, "x*y^3")), poly(&r, "x*y"));
        assert_eq!(poly_gcd(&poly(&r, "x^2 - 1"), &poly(&r, "x^2 + x")), poly(&r, "x + 1"));
    }

    #[test]
    fn frobenius_root_of_surface_multiples() {
        let r = ring(2, &["u", "v", "w"]);
        let i = ideal(&r, &["(u*v*w + v^2 + w^2)*v", "(u*v*w + v^2 + w^2)*w"]);
        assert_eq!(i.frobenius_root(), ideal(&r, &["v", "w"]));
        assert_eq!(ideal(&r, &["v", "w"]).frobenius_power(), ideal(&r, &["v^2", "w^2"]));
    }
}
