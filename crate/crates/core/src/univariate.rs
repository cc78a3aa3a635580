//! Dense univariate polynomials over F_p and their factorization.
//!
//! Factoring runs squarefree decomposition (descending through p-th roots
//! when the derivative vanishes), distinct-degree splitting and then
//! Cantor–Zassenhaus equal-degree splitting. The equal-degree step is
//! randomized; callers pass a seed and get reproducible output.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Prime;
use crate::poly::{Monomial, Poly};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x00f5_1e17;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    prime: Prime,
    coeffs: Vec<u64>,
}

impl UPoly {
    pub fn new(prime: Prime, coeffs: Vec<u64>) -> Self {
        let mut f = UPoly { prime, coeffs: coeffs.into_iter().map(|c| prime.reduce(c)).collect() };
        f.trim();
        f
    }

    pub fn zero(prime: Prime) -> Self {
        UPoly { prime, coeffs: Vec::new() }
    }

    pub fn one(prime: Prime) -> Self {
        UPoly::new(prime, vec![1])
    }

    pub fn x(prime: Prime) -> Self {
        UPoly::new(prime, vec![0, 1])
    }

    /// `x - a`
    pub fn linear(prime: Prime, a: u64) -> Self {
        UPoly::new(prime, vec![prime.neg(prime.reduce(a)), 1])
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.prime.inv(self.lc()))
    }

    pub fn scale(&self, c: u64) -> UPoly {
        let p = self.prime;
        UPoly::new(p, self.coeffs.iter().map(|&a| p.mul(a, c)).collect())
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let p = self.prime;
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| p.add(*self.coeffs.get(i).unwrap_or(&0), *o.coeffs.get(i).unwrap_or(&0)))
            .collect();
        UPoly::new(p, c)
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.scale(self.prime.value() - 1))
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero(self.prime);
        }
        let p = self.prime;
        let mut c = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] = p.add(c[i + j], p.mul(a, b));
            }
        }
        UPoly::new(p, c)
    }

    pub fn pow(&self, e: u64) -> UPoly {
        let mut r = UPoly::one(self.prime);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.prime;
        let dd = d.degree().unwrap();
        let inv = p.inv(d.lc());
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UPoly::zero(p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = p.mul(r[k + dd], inv);
            q[k] = c;
            if c != 0 {
                for (j, &b) in d.coeffs.iter().enumerate() {
                    r[k + j] = p.sub(r[k + j], p.mul(c, b));
                }
            }
        }
        r.truncate(dd);
        (UPoly::new(p, q), UPoly::new(p, r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.divrem(d).1
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        let p = self.prime;
        let c = self.coeffs.iter().enumerate().skip(1).map(|(i, &a)| p.mul(a, p.reduce(i as u64))).collect();
        UPoly::new(p, c)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.prime;
        self.coeffs.iter().rev().fold(0, |acc, &c| p.add(p.mul(acc, x), c))
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &UPoly) -> UPoly {
        let mut base = self.rem(m);
        let mut r = UPoly::one(self.prime).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m);
            }
        }
        r
    }

    /// `g` with `g^p = self`, valid when the derivative vanishes.
    pub fn pth_root(&self) -> UPoly {
        let p = self.prime.value() as usize;
        UPoly::new(self.prime, self.coeffs.iter().step_by(p).copied().collect())
    }

    pub fn to_poly(&self, nvars: usize, var: usize) -> Poly {
        Poly::from_terms(
            self.prime,
            nvars,
            self.coeffs.iter().enumerate().map(|(i, &c)| (Monomial::var(nvars, var, i as u32), c)),
        )
    }

    /// Read `f` as a polynomial in `var`; `None` if another variable occurs.
    pub fn from_poly(f: &Poly, var: usize) -> Option<UPoly> {
        let mut c = vec![0u64; f.degree_in(var) as usize + 1];
        for (m, a) in f.terms() {
            if m.support().any(|i| i != var) {
                return None;
            }
            c[m.exponents()[var] as usize] = a;
        }
        Some(UPoly::new(f.prime(), c))
    }

    pub fn display(&self, var: &str) -> String {
        let f = self.to_poly(1, 0);
        f.display(&[var.to_string()])
    }
}

/// `f = unit * prod(factor^mult)` with monic irreducible factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(UPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self, prime: Prime) -> UPoly {
        let mut r = UPoly::new(prime, vec![self.unit]);
        for (g, m) in &self.factors {
            r = r.mul(&g.pow(*m as u64));
        }
        r
    }
}

/// Squarefree decomposition: pairwise coprime monic squarefree `a_i` with
/// `f = lc * prod a_i^i`.
pub fn squarefree_decomposition(f: &UPoly) -> Result<Vec<(UPoly, u32)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut acc: BTreeMap<u32, UPoly> = BTreeMap::new();
    sqf_into(&f.monic(), 1, &mut acc);
    Ok(acc.into_iter().filter(|(_, g)| !g.is_one()).map(|(m, g)| (g, m)).collect())
}

fn sqf_into(f: &UPoly, scale: u32, acc: &mut BTreeMap<u32, UPoly>) {
    if f.degree().unwrap_or(0) == 0 {
        return;
    }
    let p = f.prime;
    let mut c = f.gcd(&f.derivative());
    let mut w = f.divrem(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.divrem(&y).0;
        if !z.is_one() {
            let e = acc.entry(i * scale).or_insert_with(|| UPoly::one(p));
            *e = e.mul(&z);
        }
        i += 1;
        w = y;
        c = c.divrem(&w).0;
    }
    if !c.is_one() {
        sqf_into(&c.pth_root(), scale * p.value() as u32, acc);
    }
}

/// Squarefree part (product of the distinct irreducible factors), monic.
pub fn squarefree_part(f: &UPoly) -> Result<UPoly> {
    let parts = squarefree_decomposition(f)?;
    Ok(parts.into_iter().fold(UPoly::one(f.prime), |a, (g, _)| a.mul(&g)))
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn distinct_degree(f: &UPoly) -> Vec<(UPoly, usize)> {
    let p = f.prime;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = UPoly::x(p);
    let mut h = x.clone();
    let mut d = 0;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p.value() as u128, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.divrem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        let deg = rest.degree().unwrap();
        out.push((rest, deg));
    }
    out
}

/// Split a monic squarefree product of degree-`d` irreducibles.
pub fn equal_degree(f: &UPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<UPoly> {
    let n = f.degree().unwrap_or(0);
    if n <= d {
        return vec![f.clone()];
    }
    let p = f.prime;
    loop {
        let a = UPoly::new(p, (0..n).map(|_| rng.gen_range(0..p.value())).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g0 = a.gcd(f);
        let candidate = if !g0.is_one() {
            g0
        } else if p.value() == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1)) onto F_2
            let mut t = a.rem(f);
            let mut s = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                s = s.add(&t);
            }
            s.gcd(f)
        } else {
            let q = (p.value() as u128).pow(d as u32);
            a.pow_mod((q - 1) / 2, f).sub(&UPoly::one(p)).gcd(f)
        };
        let k = candidate.degree().unwrap_or(0);
        if k > 0 && k < n {
            let other = f.divrem(&candidate).0;
            let mut out = equal_degree(&candidate, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

/// Complete factorization into monic irreducibles.
pub fn factor(f: &UPoly, seed: u64) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(f)? {
        for (block, d) in distinct_degree(&part) {
            for g in equal_degree(&block, d, &mut rng) {
                factors.push((g.monic(), mult));
            }
        }
    }
    factors.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs.cmp(&b.0.coeffs)));
    Ok(Factorization { unit: f.lc(), factors })
}

/// Roots in F_p with multiplicities, ascending.
pub fn roots(f: &UPoly, seed: u64) -> Result<Vec<(u64, u32)>> {
    let fac = factor(f, seed)?;
    let p = f.prime;
    let mut out: Vec<(u64, u32)> = fac
        .factors
        .iter()
        .filter(|(g, _)| g.degree() == Some(1))
        .map(|(g, m)| (p.neg(g.coeffs()[0]), *m))
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(p: u64, c: &[u64]) -> UPoly {
        UPoly::new(Prime::new(p).unwrap(), c.to_vec())
    }

    #[test]
    fn char_two_square() {
        let f = up(2, &[1, 0, 1]);
        let fac = factor(&f, DEFAULT_SEED).unwrap();
        assert_eq!(fac.factors, vec![(up(2, &[1, 1]), 2)]);
    }

    #[test]
    fn u_squared_minus_four_over_f5() {
        // root scan: u^2 = 4 has u = 2 and u = 3 in F_5
        let f = up(5, &[1, 0, 1]);
        let scan: Vec<u64> = (0..5).filter(|&a| f.eval(a) == 0).collect();
        assert_eq!(scan, vec![2, 3]);
        assert_eq!(roots(&f, DEFAULT_SEED).unwrap(), vec![(2, 1), (3, 1)]);
        let fac = factor(&f, DEFAULT_SEED).unwrap();
        assert_eq!(fac.factors, vec![(up(5, &[2, 1]), 1), (up(5, &[3, 1]), 1)]);
        let sq = f.mul(&f);
        assert_eq!(roots(&sq, DEFAULT_SEED).unwrap(), vec![(2, 2), (3, 2)]);
    }

    #[test]
    fn pth_power_descent() {
        // (x+1)^3 * (x^2+1) over F_3: the cube has vanishing derivative
        let f = up(3, &[1, 1]).pow(3).mul(&up(3, &[1, 0, 1]));
        let sqf = squarefree_decomposition(&f).unwrap();
        assert_eq!(sqf, vec![(up(3, &[1, 0, 1]), 1), (up(3, &[1, 1]), 3)]);
        assert_eq!(squarefree_part(&f).unwrap(), up(3, &[1, 1]).mul(&up(3, &[1, 0, 1])));
    }

    #[test]
    fn zero_is_rejected() {
        assert_eq!(factor(&up(5, &[]), 1), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn irreducible_quartic_over_f2() {
        let f = up(2, &[1, 1, 0, 0, 1]);
        let fac = factor(&f, DEFAULT_SEED).unwrap();
        assert_eq!(fac.factors, vec![(f.clone(), 1)]);
    }
}
