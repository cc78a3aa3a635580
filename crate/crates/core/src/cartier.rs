//! The shifted Cartier operator and base-p decompositions.

use std::collections::BTreeMap;

use crate::poly::{Monomial, Poly};

/// T'(x^a) = x^((a - (p-1)) / p) when every a_i = p-1 mod p, else 0.
/// Coefficients are fixed since Frobenius is the identity on F_p.
pub fn cartier(f: &Poly) -> Poly {
    let p = f.prime().value() as u32;
    let mut out = Poly::zero(f.prime(), f.nvars());
    for (m, c) in f.terms() {
        if m.exponents().iter().all(|&e| e % p == p - 1) {
            let e: Vec<u32> = m.exponents().iter().map(|&e| (e + 1) / p - 1).collect();
            out.add_term(Monomial::new(e), c);
        }
    }
    out
}

/// Unique split `f = sum_a x^a * g_a^p` with `a` in `[0, p)^n`.
pub fn base_p_decomposition(f: &Poly) -> BTreeMap<Monomial, Poly> {
    let p = f.prime().value() as u32;
    let n = f.nvars();
    let mut parts: BTreeMap<Monomial, Poly> = BTreeMap::new();
    for (m, c) in f.terms() {
        let rem: Vec<u32> = m.exponents().iter().map(|&e| e % p).collect();
        let quo: Vec<u32> = m.exponents().iter().map(|&e| e / p).collect();
        parts
            .entry(Monomial::new(rem))
            .or_insert_with(|| Poly::zero(f.prime(), n))
            .add_term(Monomial::new(quo), c);
    }
    parts
}

/// Rebuild `sum_a x^a * g_a^p` from a decomposition.
pub fn recompose(parts: &BTreeMap<Monomial, Poly>, template: &Poly) -> Poly {
    let mut out = Poly::zero(template.prime(), template.nvars());
    for (a, g) in parts {
        out = &out + &g.frobenius().mul_monomial(a, 1);
    }
    out
}

/// Generators of the Frobenius root `(gens)^[1/p]`: every `g_a` of every generator.
pub fn frobenius_root_generators(gens: &[Poly]) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    for f in gens {
        for (_, g) in base_p_decomposition(f) {
            if !g.is_zero() && !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

/// All monomials with exponents in `[0, p)^n`, ordered by degree then lex.
pub fn restricted_monomials(nvars: usize, p: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(nvars)];
    for i in 0..nvars {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for m in &out {
            for e in 0..p {
                let mut v = m.exponents().to_vec();
                v[i] = e;
                next.push(Monomial::new(v));
            }
        }
        out = next;
    }
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| b.cmp(a)));
    out
}
