//! Buchberger's algorithm over F_p.
//!
//! Pairs are pruned with the Gebauer–Möller update (product and chain
//! criteria) and selected by the normal strategy: smallest lcm first.
//! Internally a polynomial is a term vector sorted ascending under the
//! active order, so the leading term is the last entry.

use std::cmp::Ordering;

use crate::field::Prime;
use crate::order::MonomialOrder;
use crate::poly::{Monomial, Poly};

type Terms = Vec<(Monomial, u64)>;

fn to_terms(f: &Poly, order: MonomialOrder) -> Terms {
    let mut v: Terms = f.terms().map(|(m, c)| (m.clone(), c)).collect();
    v.sort_by(|a, b| order.cmp(&a.0, &b.0));
    v
}

fn from_terms(prime: Prime, nvars: usize, t: Terms) -> Poly {
    Poly::from_terms(prime, nvars, t)
}

fn make_monic(t: &mut Terms, p: Prime) {
    if let Some(&(_, c)) = t.last() {
        if c != 1 {
            let inv = p.inv(c);
            for (_, a) in t.iter_mut() {
                *a = p.mul(*a, inv);
            }
        }
    }
}

/// `a - coef * mult * b`, all sorted ascending; `b` monic is not required.
fn sub_scaled(a: &Terms, b: &Terms, mult: &Monomial, coef: u64, p: Prime, order: MonomialOrder) -> Terms {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let neg = p.neg(coef);
    let mut i = 0;
    let mut j = 0;
    let mut bm: Option<(Monomial, u64)> = b.first().map(|(m, c)| (m.mul(mult), p.mul(*c, neg)));
    while i < a.len() || bm.is_some() {
        let take_a = match (&bm, a.get(i)) {
            (None, _) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some((m, _)), Some((am, _))) => order.cmp(am, m),
        };
        match take_a {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(bm.take().unwrap());
                j += 1;
                bm = b.get(j).map(|(m, c)| (m.mul(mult), p.mul(*c, neg)));
            }
            Ordering::Equal => {
                let (m, c) = bm.take().unwrap();
                let s = p.add(a[i].1, c);
                if s != 0 {
                    out.push((m, s));
                }
                i += 1;
                j += 1;
                bm = b.get(j).map(|(m, c)| (m.mul(mult), p.mul(*c, neg)));
            }
        }
    }
    out
}

/// Fully reduce `f` by monic `basis` (leading term last in each entry).
fn reduce(mut cur: Terms, basis: &[&Terms], p: Prime, order: MonomialOrder) -> Terms {
    let mut rem: Terms = Vec::new();
    while let Some((m, c)) = cur.last().cloned() {
        let divisor = basis.iter().find(|g| g.last().map(|(lm, _)| lm.divides(&m)).unwrap_or(false));
        match divisor {
            Some(g) => {
                let lead = &g.last().unwrap().0;
                let q = m.div(lead).unwrap();
                let lc = g.last().unwrap().1;
                let coef = if lc == 1 { c } else { p.mul(c, p.inv(lc)) };
                cur = sub_scaled(&cur, g, &q, coef, p, order);
            }
            None => {
                cur.pop();
                rem.push((m, c));
            }
        }
    }
    rem.reverse();
    rem
}

/// Normal form of `f` modulo a Gröbner basis (any generating set gives a
/// remainder, but only a basis makes it canonical).
pub fn normal_form(f: &Poly, basis: &[Poly], order: MonomialOrder) -> Poly {
    if f.is_zero() || basis.is_empty() {
        return f.clone();
    }
    let b: Vec<Terms> = basis.iter().filter(|g| !g.is_zero()).map(|g| to_terms(g, order)).collect();
    let refs: Vec<&Terms> = b.iter().collect();
    from_terms(f.prime(), f.nvars(), reduce(to_terms(f, order), &refs, f.prime(), order))
}

/// Division with quotients: `f = sum q_i * basis_i + r`, `r` reduced.
pub fn divide(f: &Poly, basis: &[Poly], order: MonomialOrder) -> (Vec<Poly>, Poly) {
    let p = f.prime();
    let n = f.nvars();
    let b: Vec<Terms> = basis.iter().map(|g| to_terms(g, order)).collect();
    let mut quotients = vec![Poly::zero(p, n); basis.len()];
    let mut cur = to_terms(f, order);
    let mut rem: Terms = Vec::new();
    while let Some((m, c)) = cur.last().cloned() {
        let hit = b
            .iter()
            .enumerate()
            .find(|(_, g)| g.last().map(|(lm, _)| lm.divides(&m)).unwrap_or(false));
        match hit {
            Some((k, g)) => {
                let (lead, lc) = g.last().unwrap();
                let q = m.div(lead).unwrap();
                let coef = p.mul(c, p.inv(*lc));
                quotients[k].add_term(q.clone(), coef);
                cur = sub_scaled(&cur, g, &q, coef, p, order);
            }
            None => {
                cur.pop();
                rem.push((m, c));
            }
        }
    }
    (quotients, Poly::from_terms(p, n, rem))
}

#[derive(Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct Engine {
    p: Prime,
    order: MonomialOrder,
    polys: Vec<Terms>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
}

impl Engine {
    fn lead(&self, i: usize) -> &Monomial {
        &self.polys[i].last().unwrap().0
    }

    fn update(&mut self, h: usize) {
        let lh = self.lead(h).clone();
        let mut c: Vec<(usize, Monomial)> =
            self.active.iter().map(|&g| (g, lh.lcm(self.lead(g)))).collect();
        let mut d: Vec<(usize, Monomial)> = Vec::new();
        while !c.is_empty() {
            let (g1, l1) = c.remove(0);
            let coprime = lh.is_coprime(self.lead(g1));
            let dominated = c.iter().chain(d.iter()).any(|(_, l2)| l2.divides(&l1));
            if coprime || !dominated {
                d.push((g1, l1));
            }
        }
        let e: Vec<Pair> = d
            .into_iter()
            .filter(|(g, _)| !lh.is_coprime(self.lead(*g)))
            .map(|(g, l)| Pair { i: g, j: h, lcm: l })
            .collect();
        let old = std::mem::take(&mut self.pairs);
        for pr in old {
            let keep = !lh.divides(&pr.lcm)
                || self.lead(pr.i).lcm(&lh) == pr.lcm
                || lh.lcm(self.lead(pr.j)) == pr.lcm;
            if keep {
                self.pairs.push(pr);
            }
        }
        self.pairs.extend(e);
        let active = std::mem::take(&mut self.active);
        self.active = active.into_iter().filter(|&g| !lh.divides(self.lead(g))).collect();
        self.active.push(h);
    }

    fn add(&mut self, mut t: Terms) {
        make_monic(&mut t, self.p);
        self.polys.push(t);
        let h = self.polys.len() - 1;
        self.update(h);
    }

    fn select(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let order = self.order;
        let mut best = 0;
        for k in 1..self.pairs.len() {
            if order.cmp(&self.pairs[k].lcm, &self.pairs[best].lcm) == Ordering::Less {
                best = k;
            }
        }
        Some(self.pairs.swap_remove(best))
    }

    fn spoly(&self, pr: &Pair) -> Terms {
        let a = &self.polys[pr.i];
        let b = &self.polys[pr.j];
        let ma = pr.lcm.div(self.lead(pr.i)).unwrap();
        let mb = pr.lcm.div(self.lead(pr.j)).unwrap();
        let scaled: Terms = a.iter().map(|(m, c)| (m.mul(&ma), *c)).collect();
        let mut s = sub_scaled(&scaled, b, &mb, 1, self.p, self.order);
        // both leads cancel exactly since each input is monic
        while s.last().map(|(m, _)| *m == pr.lcm).unwrap_or(false) {
            s.pop();
        }
        s
    }
}

/// Reduced Gröbner basis, monic, sorted by leading monomial descending.
pub fn reduced_basis(gens: &[Poly], order: MonomialOrder) -> Vec<Poly> {
    let Some(first) = gens.iter().find(|g| !g.is_zero()) else {
        return Vec::new();
    };
    let p = first.prime();
    let n = first.nvars();
    if gens.iter().any(|g| !g.is_zero() && g.is_constant()) {
        return vec![Poly::one(p, n)];
    }
    let mut inputs: Vec<Terms> = gens.iter().filter(|g| !g.is_zero()).map(|g| to_terms(g, order)).collect();
    inputs.sort_by(|a, b| order.cmp(&a.last().unwrap().0, &b.last().unwrap().0));
    let mut eng = Engine { p, order, polys: Vec::new(), active: Vec::new(), pairs: Vec::new() };
    for t in inputs {
        let refs: Vec<&Terms> = eng.active.iter().map(|&i| &eng.polys[i]).collect();
        let r = reduce(t, &refs, p, order);
        if !r.is_empty() {
            if r.len() == 1 && r[0].0.is_one() {
                return vec![Poly::one(p, n)];
            }
            eng.add(r);
        }
    }
    while let Some(pr) = eng.select() {
        let s = eng.spoly(&pr);
        if s.is_empty() {
            continue;
        }
        let refs: Vec<&Terms> = eng.active.iter().map(|&i| &eng.polys[i]).collect();
        let r = reduce(s, &refs, p, order);
        if r.is_empty() {
            continue;
        }
        if r.len() == 1 && r[0].0.is_one() {
            return vec![Poly::one(p, n)];
        }
        eng.add(r);
    }
    // interreduce the minimal basis
    let mins: Vec<Terms> = eng.active.iter().map(|&i| eng.polys[i].clone()).collect();
    let mut out: Vec<Terms> = Vec::with_capacity(mins.len());
    for (k, g) in mins.iter().enumerate() {
        let others: Vec<&Terms> = mins.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, t)| t).collect();
        let lead = g.last().unwrap().clone();
        let tail: Terms = g[..g.len() - 1].to_vec();
        let mut r = reduce(tail, &others, p, order);
        r.push(lead);
        make_monic(&mut r, p);
        out.push(r);
    }
    out.sort_by(|a, b| order.cmp(&b.last().unwrap().0, &a.last().unwrap().0));
    out.into_iter().map(|t| from_terms(p, n, t)).collect()
}

/// Whether `basis` (a Gröbner basis) has leading terms of a finite staircase.
pub fn is_zero_dimensional(basis: &[Poly], order: MonomialOrder, vars: &[usize]) -> bool {
    vars.iter().all(|&v| {
        basis.iter().any(|g| {
            g.leading_monomial(order)
                .map(|m| m.exponents()[v] > 0 && m.support().all(|i| i == v))
                .unwrap_or(false)
        })
    })
}

/// Monomials outside the leading-term ideal, when there are finitely many.
pub fn staircase(basis: &[Poly], order: MonomialOrder, nvars: usize, limit: usize) -> Option<Vec<Monomial>> {
    let leads: Vec<Monomial> = basis.iter().filter_map(|g| g.leading_monomial(order).cloned()).collect();
    if leads.iter().any(|m| m.is_one()) {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    let mut frontier = vec![Monomial::one(nvars)];
    let mut seen = std::collections::HashSet::new();
    while let Some(m) = frontier.pop() {
        if !seen.insert(m.clone()) || leads.iter().any(|l| l.divides(&m)) {
            continue;
        }
        out.push(m.clone());
        if out.len() > limit {
            return None;
        }
        for i in 0..nvars {
            let mut e = m.exponents().to_vec();
            e[i] += 1;
            frontier.push(Monomial::new(e));
        }
    }
    out.sort_by(|a, b| order.cmp(a, b));
    Some(out)
}

/// Krull dimension of the quotient read off the leading terms: the size of
/// a largest variable set containing no leading monomial.
pub fn dimension(basis: &[Poly], order: MonomialOrder, nvars: usize) -> Option<usize> {
    let leads: Vec<Monomial> = basis.iter().filter_map(|g| g.leading_monomial(order).cloned()).collect();
    if leads.iter().any(|m| m.is_one()) {
        return None;
    }
    let mut best = 0;
    for mask in 0u32..(1u32 << nvars) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let independent = leads.iter().all(|m| m.support().any(|i| mask & (1 << i) == 0));
        if independent {
            best = size;
        }
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring3(p: u64) -> (Prime, Poly, Poly, Poly) {
        let p = Prime::new(p).unwrap();
        (p, Poly::var(p, 3, 0), Poly::var(p, 3, 1), Poly::var(p, 3, 2))
    }

    #[test]
    fn binomial_is_already_reduced() {
        let p = Prime::new(2).unwrap();
        let x = Poly::var(p, 2, 0);
        let xi = Poly::var(p, 2, 1);
        let g = &(&x * &xi) - &Poly::one(p, 2);
        assert_eq!(reduced_basis(&[g.clone()], MonomialOrder::GrevLex), vec![g]);
    }

    #[test]
    fn hsurface_plus_v_under_lex() {
        // f mod v = -w^2, so the basis is {v, w^2}.
        let (_, u, v, w) = ring3(5);
        let f = &(&(&(&u * &v) * &w) - &(&v * &v)) - &(&w * &w);
        let gb = reduced_basis(&[f, v.clone()], MonomialOrder::Lex);
        assert_eq!(gb, vec![v.clone(), &w * &w]);
        let w2 = &w * &w;
        assert!(normal_form(&w2, &gb, MonomialOrder::Lex).is_zero());
        assert!(!normal_form(&w, &gb, MonomialOrder::Lex).is_zero());
    }

    #[test]
    fn generator_order_does_not_matter() {
        let (_, u, v, w) = ring3(3);
        let a = &(&u * &u) - &v;
        let b = &(&u * &v) - &w;
        let c = &(&v * &w) + &u;
        let g1 = reduced_basis(&[a.clone(), b.clone(), c.clone()], MonomialOrder::GrevLex);
        let g2 = reduced_basis(&[c, a, b], MonomialOrder::GrevLex);
        assert_eq!(g1, g2);
    }

    #[test]
    fn division_certificate() {
        let (_, u, v, w) = ring3(7);
        let gens = vec![&(&u * &v) - &w, &(&v * &v) - &u];
        let gb = reduced_basis(&gens, MonomialOrder::GrevLex);
        let f = &(&(&u * &u) * &w) + &(&v * &w);
        let (qs, r) = divide(&f, &gb, MonomialOrder::GrevLex);
        let mut recon = r.clone();
        for (q, g) in qs.iter().zip(&gb) {
            recon = &recon + &(q * g);
        }
        assert_eq!(recon, f);
        assert_eq!(r, normal_form(&f, &gb, MonomialOrder::GrevLex));
    }

    #[test]
    fn dimension_and_staircase() {
        let (_, u, v, w) = ring3(5);
        let gb = reduced_basis(&[v.clone(), w.clone()], MonomialOrder::GrevLex);
        assert_eq!(dimension(&gb, MonomialOrder::GrevLex, 3), Some(1));
        let gb0 = reduced_basis(&[&u * &u, v.clone(), &w - &Poly::one(u.prime(), 3)], MonomialOrder::GrevLex);
        assert!(is_zero_dimensional(&gb0, MonomialOrder::GrevLex, &[0, 1, 2]));
        assert_eq!(staircase(&gb0, MonomialOrder::GrevLex, 3, 100).unwrap().len(), 2);
    }
}
