//! Sparse multivariate polynomials over F_p.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::Prime;
use crate::order::MonomialOrder;

/// An exponent vector, one entry per ring variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize, e: u32) -> Self {
        let mut v = vec![0; nvars];
        v[i] = e;
        Monomial(v)
    }

    #[inline]
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.divides(self) {
            Some(Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn scale(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }

    /// Variables with a nonzero exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }
}

/// A polynomial: map from monomial to nonzero residue.
///
/// Terms are kept in a `BTreeMap`, so iteration order (lex on exponent
/// vectors) is canonical and equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    prime: Prime,
    nvars: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl Poly {
    pub fn zero(prime: Prime, nvars: usize) -> Self {
        Poly { prime, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(prime: Prime, nvars: usize, c: u64) -> Self {
        let mut p = Poly::zero(prime, nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(prime: Prime, nvars: usize) -> Self {
        Poly::constant(prime, nvars, 1)
    }

    pub fn var(prime: Prime, nvars: usize, i: usize) -> Self {
        Poly::monomial(prime, Monomial::var(nvars, i, 1), 1)
    }

    pub fn monomial(prime: Prime, m: Monomial, c: u64) -> Self {
        let mut p = Poly::zero(prime, m.arity());
        p.add_term(m, c);
        p
    }

    pub fn from_terms(prime: Prime, nvars: usize, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Self {
        let mut p = Poly::zero(prime, nvars);
        for (m, c) in terms {
            assert_eq!(m.arity(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.prime
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff_of(&Monomial::one(self.nvars)) == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, u64)> {
        self.terms.into_iter()
    }

    /// Add `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: u64) {
        let c = self.prime.reduce(c);
        if c == 0 {
            return;
        }
        let p = self.prime;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = p.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Coefficient `[m] f`, zero if absent.
    pub fn coeff(&self, m: &Monomial) -> Result<u64> {
        if m.arity() != self.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, got: m.arity() });
        }
        Ok(self.coeff_of(m))
    }

    pub(crate) fn coeff_of(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> u64 {
        self.coeff_of(&Monomial::one(self.nvars))
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Leading term under `order`.
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, u64)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, &c)| (m, c))
    }

    pub fn leading_monomial(&self, order: MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    /// Terms sorted descending under `order`.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(Monomial, u64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, &c)| (m.clone(), c)).collect();
        v.sort_by(|a, b| order.cmp(&b.0, &a.0));
        v
    }

    /// Scale so that the leading coefficient under `order` is one.
    pub fn monic(&self, order: MonomialOrder) -> Poly {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => self.scale(self.prime.inv(c)),
        }
    }

    pub fn scale(&self, c: u64) -> Poly {
        let c = self.prime.reduce(c);
        if c == 0 {
            return Poly::zero(self.prime, self.nvars);
        }
        let p = self.prime;
        Poly {
            prime: p,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, &a)| (m.clone(), p.mul(a, c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: u64) -> Poly {
        let c = self.prime.reduce(c);
        if c == 0 {
            return Poly::zero(self.prime, self.nvars);
        }
        let p = self.prime;
        Poly {
            prime: p,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, &a)| (t.mul(m), p.mul(a, c))).collect(),
        }
    }

    fn check_same(&self, other: &Poly) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::RingMismatch(format!(
                "characteristic {} vs {}",
                self.prime, other.prime
            )));
        }
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let mut r = self.clone();
        for (m, &c) in &other.terms {
            r.add_term(m.clone(), c);
        }
        Ok(r)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let mut r = self.clone();
        for (m, &c) in &other.terms {
            r.add_term(m.clone(), self.prime.neg(c));
        }
        Ok(r)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let p = self.prime;
        let mut acc: BTreeMap<Monomial, u64> = BTreeMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let e = acc.entry(a.mul(b)).or_insert(0);
                *e = p.add(*e, p.mul(ca, cb));
            }
        }
        acc.retain(|_, c| *c != 0);
        Ok(Poly { prime: p, nvars: self.nvars, terms: acc })
    }

    /// `f^e` for a signed exponent; negative exponents are rejected.
    pub fn try_pow(&self, e: i64) -> Result<Poly> {
        if e < 0 {
            return Err(Error::NegativeExponent(e));
        }
        Ok(self.pow(e as u64))
    }

    /// `f^e`, using `f^(p^i) = frobenius^i(f)` on the base-p digits of `e`.
    pub fn pow(&self, mut e: u64) -> Poly {
        let p = self.prime.value();
        let mut result = Poly::one(self.prime, self.nvars);
        let mut base = self.clone();
        while e > 0 {
            let digit = e % p;
            if digit > 0 {
                result = &result * &base.pow_small(digit);
            }
            e /= p;
            if e > 0 {
                base = base.frobenius();
            }
        }
        result
    }

    fn pow_small(&self, mut e: u64) -> Poly {
        let mut result = Poly::one(self.prime, self.nvars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `f^p`: exponents scale by p, coefficients are fixed by Frobenius on F_p.
    pub fn frobenius(&self) -> Poly {
        let p = self.prime.value() as u32;
        Poly {
            prime: self.prime,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, &c)| (m.scale(p), c)).collect(),
        }
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut r = Poly::zero(self.prime, self.nvars);
        for (m, &c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut n = m.clone();
            n.0[var] -= 1;
            r.add_term(n, self.prime.mul(c, self.prime.reduce(e as u64)));
        }
        r
    }

    /// Substitute `images[i]` for variable `i`. All images share one arity,
    /// which becomes the arity of the result.
    pub fn compose(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, got: images.len() });
        }
        let target_n = images.first().map(|g| g.nvars).unwrap_or(0);
        for g in images {
            if g.nvars != target_n || g.prime != self.prime {
                return Err(Error::RingMismatch("substitution images disagree".into()));
            }
        }
        let mut cache: Vec<Vec<Poly>> = vec![vec![Poly::one(self.prime, target_n)]; self.nvars];
        let mut result = Poly::zero(self.prime, target_n);
        for (m, &c) in &self.terms {
            let mut t = Poly::constant(self.prime, target_n, c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap() * &images[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][e as usize];
            }
            result = &result + &t;
        }
        Ok(result)
    }

    /// Replace a single variable by a polynomial of the same arity.
    pub fn substitute_var(&self, var: usize, value: &Poly) -> Poly {
        let images: Vec<Poly> = (0..self.nvars)
            .map(|i| if i == var { value.clone() } else { Poly::var(self.prime, self.nvars, i) })
            .collect();
        self.compose(&images).expect("same arity")
    }

    /// Re-embed into `new_nvars` variables, variable `i` going to `map[i]`.
    pub fn remap(&self, new_nvars: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        let mut r = Poly::zero(self.prime, new_nvars);
        for (m, &c) in &self.terms {
            let mut e = vec![0; new_nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            r.add_term(Monomial(e), c);
        }
        r
    }

    /// Embed into `new_nvars` variables starting at `offset`.
    pub fn embed(&self, new_nvars: usize, offset: usize) -> Poly {
        let map: Vec<usize> = (0..self.nvars).map(|i| i + offset).collect();
        self.remap(new_nvars, &map)
    }

    /// Keep variables in `keep` (in that order), provided the others do not occur.
    pub fn restrict_to(&self, keep: &[usize]) -> Option<Poly> {
        let mut r = Poly::zero(self.prime, keep.len());
        for (m, &c) in &self.terms {
            let total: u64 = m.degree();
            let kept: Vec<u32> = keep.iter().map(|&i| m.0[i]).collect();
            if kept.iter().map(|&e| e as u64).sum::<u64>() != total {
                return None;
            }
            r.add_term(Monomial(kept), c);
        }
        Some(r)
    }

    /// Variables that occur in some term.
    pub fn variables(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars];
        for m in self.terms.keys() {
            for i in m.support() {
                used[i] = true;
            }
        }
        (0..self.nvars).filter(|&i| used[i]).collect()
    }

    pub fn evaluate(&self, point: &[u64]) -> u64 {
        let p = self.prime;
        let mut s = 0;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = p.mul(t, p.pow(point[i], e as u64));
                }
            }
            s = p.add(s, t);
        }
        s
    }

    /// Render with the given variable names, terms in descending grevlex.
    pub fn display(&self, names: &[String]) -> String {
        self.display_in(names, MonomialOrder::GrevLex)
    }

    /// Render with terms in descending `order`.
    pub fn display_in(&self, names: &[String], order: MonomialOrder) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.sorted_terms(order).into_iter().enumerate() {
            let s = self.prime.signed(c);
            let neg = s < 0;
            let mag = s.unsigned_abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = format_monomial(&m, names);
            match (mono.is_empty(), mag) {
                (true, _) => write!(out, "{mag}").unwrap(),
                (false, 1) => out.push_str(&mono),
                (false, _) => write!(out, "{mag}*{mono}").unwrap(),
            }
        }
        out
    }
}

pub fn format_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("polynomials from different rings")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("polynomials from different rings")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("polynomials from different rings")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(self.prime.value() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn hsurface(p: u64) -> Poly {
        let p = Prime::new(p).unwrap();
        let u = Poly::var(p, 3, 0);
        let v = Poly::var(p, 3, 1);
        let w = Poly::var(p, 3, 2);
        &(&(&(&u * &v) * &w) - &(&v * &v)) - &(&w * &w)
    }

    #[test]
    fn identity_product() {
        let f = hsurface(3);
        assert_eq!(&f * &Poly::one(f.prime(), 3), f);
    }

    #[test]
    fn freshmans_dream_char_two() {
        let p = Prime::new(2).unwrap();
        let x = Poly::var(p, 1, 0);
        let f = &x + &Poly::one(p, 1);
        let sq = f.pow(2);
        assert_eq!(sq, &(&x * &x) + &Poly::one(p, 1));
    }

    #[test]
    fn hsurface_square_over_f3() {
        // Expected terms computed by expanding (a - b - c)^2 with a=uvw, b=v^2, c=w^2:
        // a^2 - 2ab - 2ac + b^2 + 2bc + c^2, and -2 = 1 mod 3.
        let f = hsurface(3);
        let sq = f.pow(2);
        let expect = [
            ([2, 2, 2], 1),
            ([1, 3, 1], 1),
            ([1, 1, 3], 1),
            ([0, 4, 0], 1),
            ([0, 2, 2], 2),
            ([0, 0, 4], 1),
        ];
        assert_eq!(sq.len(), expect.len());
        for (e, c) in expect {
            assert_eq!(sq.coeff(&Monomial::new(e.to_vec())).unwrap(), c);
        }
        assert_eq!(sq, &f * &f);
    }

    #[test]
    fn coefficient_lookup() {
        let f = hsurface(7);
        assert_eq!(f.coeff(&Monomial::new(vec![1, 1, 1])).unwrap(), 1);
        assert_eq!(f.coeff(&Monomial::one(3)).unwrap(), 0);
        assert!(f.coeff(&Monomial::one(2)).is_err());
    }

    #[test]
    fn negative_power_rejected() {
        let f = hsurface(5);
        assert_eq!(f.try_pow(-1), Err(Error::NegativeExponent(-1)));
    }

    #[test]
    fn mismatch_is_an_error() {
        let p = Prime::new(5).unwrap();
        let a = Poly::var(p, 2, 0);
        let b = Poly::var(p, 3, 0);
        assert!(a.try_add(&b).is_err());
        let q = Poly::var(Prime::new(7).unwrap(), 2, 0);
        assert!(a.try_mul(&q).is_err());
    }

    #[test]
    fn display_symmetric_coefficients() {
        let f = hsurface(5);
        assert_eq!(f.display(&names(&["u", "v", "w"])), "u*v*w - v^2 - w^2");
    }

    #[test]
    fn compose_and_evaluate() {
        let p = Prime::new(5).unwrap();
        // w -> x + y in two variables
        let w = Poly::var(p, 1, 0);
        let f = &w.pow(2) - &Poly::constant(p, 1, 4);
        let x = Poly::var(p, 2, 0);
        let y = Poly::var(p, 2, 1);
        let g = f.compose(&[&x + &y]).unwrap();
        assert_eq!(g.evaluate(&[1, 1]), 0);
        assert_eq!(g.evaluate(&[1, 2]), f.evaluate(&[3]));
    }
}
