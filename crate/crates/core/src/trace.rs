//! Traces of finite maps over the function field `K = Frac(A)`.
//!
//! `K` is presented as `k(t)` for a transcendence basis `t` of `A` over
//! which the remaining variables of `A` are rational. `L = B ⊗ K` is then
//! a finite `k(t)`-algebra with a staircase basis read off a block-order
//! Gröbner basis, and traces are diagonal sums of multiplication matrices.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartier::restricted_monomials;
use crate::error::{Error, Result};
use crate::groebner;
use crate::ideal::{exact_div, poly_gcd, Ideal};
use crate::maps::FiniteRingMap;
use crate::order::MonomialOrder;
use crate::poly::{Monomial, Poly};
use crate::splitting::Splitting;

const STAIRCASE_LIMIT: usize = 512;

/// A reduced fraction of polynomials in the transcendence basis.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if num.is_zero() {
            return Ok(RatFunc { den: Poly::one(num.prime(), num.nvars()), num });
        }
        let g = poly_gcd(&num, &den);
        let (mut n, mut d) = (exact_div(&num, &g).unwrap(), exact_div(&den, &g).unwrap());
        let (_, lc) = d.leading_term(MonomialOrder::GrevLex).map(|(m, c)| (m.clone(), c)).unwrap();
        let inv = n.prime().inv(lc);
        n = n.scale(inv);
        d = d.scale(inv);
        Ok(RatFunc { num: n, den: d })
    }

    pub fn from_poly(num: Poly) -> RatFunc {
        let den = Poly::one(num.prime(), num.nvars());
        RatFunc { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).unwrap()
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }

    pub fn pow(&self, e: u64) -> RatFunc {
        RatFunc { num: self.num.pow(e), den: self.den.pow(e) }
    }
}

/// An element of `Frac(A)` written over `A`'s variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fraction {
    pub num: Poly,
    pub den: Poly,
}

pub struct TraceContext {
    map: FiniteRingMap,
    t: Vec<usize>,
    nb: usize,
    n: usize,
    /// Position of each `A` variable in the working ring.
    a_pos: Vec<usize>,
    basis: Vec<Poly>,
    stairs: Vec<Monomial>,
}

impl TraceContext {
    pub fn new(map: &FiniteRingMap) -> Result<TraceContext> {
        let a = map.source();
        let na = a.nvars();
        let t = choose_basis(map)?;
        let nb = map.target().nvars();
        let rest: Vec<usize> = (0..na).filter(|i| !t.contains(i)).collect();
        let k = nb + rest.len();
        let n = k + t.len();
        let mut a_pos = vec![0; na];
        for (j, &i) in rest.iter().enumerate() {
            a_pos[i] = nb + j;
        }
        for (j, &i) in t.iter().enumerate() {
            a_pos[i] = k + j;
        }
        let pr = a.prime();
        let b_map: Vec<usize> = (0..nb).collect();
        let mut gens: Vec<Poly> = map.target().relations().iter().map(|r| r.remap(n, &b_map)).collect();
        for (i, img) in map.images().iter().enumerate() {
            gens.push(&Poly::var(pr, n, a_pos[i]) - &img.remap(n, &b_map));
        }
        gens.extend(a.relations().iter().map(|r| r.remap(n, &a_pos)));
        let basis = groebner::reduced_basis(&gens, MonomialOrder::Block(k));
        let mut ctx = TraceContext { map: map.clone(), t, nb, n, a_pos, basis, stairs: Vec::new() };
        if ctx.basis.iter().any(|g| ctx.lead(g).0.is_one()) {
            return Err(Error::NotGenericallyFinite("the transcendence basis becomes algebraic in B".into()));
        }
        ctx.stairs = ctx.compute_staircase()?;
        Ok(ctx)
    }

    fn k(&self) -> usize {
        self.n - self.t.len()
    }

    pub fn degree(&self) -> usize {
        self.stairs.len()
    }

    pub fn map(&self) -> &FiniteRingMap {
        &self.map
    }

    /// Names of the transcendence basis variables of `A`.
    pub fn transcendence_basis(&self) -> Vec<String> {
        self.t.iter().map(|&i| self.map.source().var_names()[i].clone()).collect()
    }

    fn x_part(&self, m: &Monomial) -> Monomial {
        let mut e = m.exponents().to_vec();
        for x in e[self.k()..].iter_mut() {
            *x = 0;
        }
        Monomial::new(e)
    }

    fn t_part(&self, m: &Monomial) -> Monomial {
        let mut e = m.exponents().to_vec();
        for x in e[..self.k()].iter_mut() {
            *x = 0;
        }
        Monomial::new(e)
    }

    /// Leading x-monomial and its coefficient in `k[t]`.
    fn lead(&self, g: &Poly) -> (Monomial, Poly) {
        let order = MonomialOrder::Block(self.k());
        let top = self.x_part(g.leading_monomial(order).expect("nonzero"));
        let mut c = Poly::zero(g.prime(), self.n);
        for (m, coef) in g.terms() {
            if self.x_part(m) == top {
                c.add_term(self.t_part(m), coef);
            }
        }
        (top, c)
    }

    fn compute_staircase(&self) -> Result<Vec<Monomial>> {
        let leads: Vec<Monomial> = self.basis.iter().map(|g| self.lead(g).0).collect();
        let k = self.k();
        let mut out = Vec::new();
        let mut frontier = vec![Monomial::one(self.n)];
        let mut seen = std::collections::HashSet::new();
        while let Some(m) = frontier.pop() {
            if !seen.insert(m.clone()) || leads.iter().any(|l| l.divides(&m)) {
                continue;
            }
            out.push(m.clone());
            if out.len() > STAIRCASE_LIMIT {
                return Err(Error::NotGenericallyFinite("staircase over the function field is infinite".into()));
            }
            for i in 0..k {
                let mut e = m.exponents().to_vec();
                e[i] += 1;
                frontier.push(Monomial::new(e));
            }
        }
        out.sort_by(|a, b| MonomialOrder::GrevLex.cmp(a, b));
        Ok(out)
    }

    /// Fraction-free normal form over `k(t)`: returns `(h, D)` with
    /// `element = h / D`, `h` supported on the staircase.
    fn reduce(&self, mut h: Poly) -> (Poly, Poly) {
        let pr = h.prime();
        let order = MonomialOrder::Block(self.k());
        let leads: Vec<(Monomial, Poly)> = self.basis.iter().map(|g| self.lead(g)).collect();
        let mut den = Poly::one(pr, self.n);
        loop {
            let mut target: Option<(Monomial, usize)> = None;
            let mut parts: Vec<Monomial> = h.terms().map(|(m, _)| self.x_part(m)).collect();
            parts.sort_by(|a, b| order.cmp(b, a));
            parts.dedup();
            for beta in parts {
                if let Some(j) = leads.iter().position(|(a, _)| a.divides(&beta)) {
                    target = Some((beta, j));
                    break;
                }
            }
            let Some((beta, j)) = target else {
                return (h, den);
            };
            let mut c = Poly::zero(pr, self.n);
            for (m, coef) in h.terms() {
                if self.x_part(m) == beta {
                    c.add_term(self.t_part(m), coef);
                }
            }
            let (alpha, lc) = &leads[j];
            let shift = beta.div(alpha).unwrap();
            h = &(lc * &h) - &(&c * &self.basis[j].mul_monomial(&shift, 1));
            den = &den * lc;
        }
    }

    fn to_t(&self, f: &Poly) -> Poly {
        let keep: Vec<usize> = (self.k()..self.n).collect();
        f.restrict_to(&keep).expect("t-only polynomial")
    }

    fn from_t(&self, f: &Poly) -> Poly {
        let map: Vec<usize> = (0..self.t.len()).map(|j| self.t[j]).collect();
        f.remap(self.map.source().nvars(), &map)
    }

    /// `Tr_{L/K}(b)` as a reduced fraction in `k(t)`.
    pub fn trace_t(&self, b: &Poly) -> Result<RatFunc> {
        self.map.target().check_poly(b)?;
        let b_map: Vec<usize> = (0..self.nb).collect();
        let bb = b.remap(self.n, &b_map);
        let pr = b.prime();
        let mut acc = RatFunc::from_poly(Poly::zero(pr, self.t.len()));
        for s in &self.stairs {
            let (h, den) = self.reduce(bb.mul_monomial(s, 1));
            let mut c = Poly::zero(pr, self.n);
            for (m, coef) in h.terms() {
                if self.x_part(m) == *s {
                    c.add_term(self.t_part(m), coef);
                }
            }
            if !c.is_zero() {
                acc = acc.add(&RatFunc::new(self.to_t(&c), self.to_t(&den))?);
            }
        }
        Ok(acc)
    }

    /// `Tr(b)` over `A`'s variables; checks denominators clear when both
    /// rings are declared normal.
    pub fn trace(&self, b: &Poly) -> Result<Fraction> {
        let r = self.trace_t(b)?;
        let f = self.to_fraction(&r);
        if self.map.source().is_normal() && self.map.target().is_normal() && !self.lands_in_a(&f) {
            return Err(Error::DenominatorNotClearing(format!(
                "Tr({}) = {}",
                self.map.target().fmt_poly(b),
                self.fmt_fraction(&f)
            )));
        }
        Ok(f)
    }

    pub fn to_fraction(&self, r: &RatFunc) -> Fraction {
        Fraction { num: self.from_t(r.num()), den: self.from_t(r.den()) }
    }

    /// Whether `n / d` is an element of `A`.
    pub fn lands_in_a(&self, f: &Fraction) -> bool {
        if f.den.is_constant() {
            return true;
        }
        let d = Ideal::new(self.map.source().clone(), vec![f.den.clone()]).expect("A polynomial");
        d.contains(&f.num)
    }

    /// Whether `n / d` lies in the ideal `p` of `A`.
    pub fn fraction_in(&self, f: &Fraction, p: &Ideal) -> Result<bool> {
        let gens: Vec<Poly> = p.gens().iter().map(|g| &f.den * g).collect();
        Ok(Ideal::new(self.map.source().clone(), gens)?.contains(&f.num))
    }

    /// The image in `k(t)` of an element of `A`.
    pub fn a_to_t(&self, a: &Poly) -> Result<RatFunc> {
        let emb = a.remap(self.n, &self.a_pos);
        let (h, den) = self.reduce(emb);
        if h.terms().any(|(m, _)| !self.x_part(m).is_one()) {
            return Err(Error::Invalid("element of A is not rational over the transcendence basis".into()));
        }
        RatFunc::new(self.to_t(&h), self.to_t(&den))
    }

    /// `phi` extended to `K`: `phi(n / d) = phi(n d^(p-1)) / d`.
    pub fn phi_on_k(&self, phi: &Splitting, r: &RatFunc) -> Result<RatFunc> {
        let p = phi.p();
        let n = self.from_t(r.num());
        let d = self.from_t(r.den());
        let top = phi.apply(&(&n * &d.pow(p - 1)))?;
        let top = self.a_to_t(&top)?;
        Ok(top.mul(&RatFunc::new(Poly::one(d.prime(), self.t.len()), r.den().clone())?))
    }

    pub fn fmt_fraction(&self, f: &Fraction) -> String {
        let a = self.map.source();
        if f.den.is_one() {
            a.fmt_poly(&f.num)
        } else {
            format!("({}) / ({})", a.fmt_poly(&f.num), a.fmt_poly(&f.den))
        }
    }

    pub fn fmt_ratfunc(&self, r: &RatFunc) -> String {
        self.fmt_fraction(&self.to_fraction(r))
    }
}

/// Pick a maximal independent set `t` of `A` over which the other
/// variables of `A` are rational, so that `Frac(A) = k(t)`.
fn choose_basis(map: &FiniteRingMap) -> Result<Vec<usize>> {
    let a = map.source();
    let na = a.nvars();
    let rb = a.relation_basis().to_vec();
    let dim = groebner::dimension(&rb, MonomialOrder::GrevLex, na)
        .ok_or_else(|| Error::NotGenericallyFinite("source ring is zero".into()))?;
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for mask in 0u32..(1 << na) {
        if mask.count_ones() as usize == dim {
            candidates.push((0..na).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    // prefer bases made of late variables, then lexicographic
    candidates.sort_by(|x, y| y.cmp(x));
    for t in candidates {
        let rest: Vec<usize> = (0..na).filter(|i| !t.contains(i)).collect();
        let mut pos = vec![0; na];
        for (j, &i) in rest.iter().chain(t.iter()).enumerate() {
            pos[i] = j;
        }
        let gens: Vec<Poly> = a.relations().iter().map(|r| r.remap(na, &pos)).collect();
        let k = rest.len();
        if gens.is_empty() {
            if k == 0 {
                return Ok(t);
            }
            continue;
        }
        let b = groebner::reduced_basis(&gens, MonomialOrder::Block(k));
        let order = MonomialOrder::Block(k);
        let mut leads: Vec<Monomial> = Vec::new();
        let mut pure_t = false;
        for g in &b {
            let mut e = g.leading_monomial(order).unwrap().exponents().to_vec();
            for x in e[k..].iter_mut() {
                *x = 0;
            }
            let m = Monomial::new(e);
            pure_t |= m.is_one();
            leads.push(m);
        }
        if pure_t {
            continue;
        }
        // every rest variable must be a leading x-monomial of degree one
        let rational = (0..k).all(|i| leads.iter().any(|m| m.degree() == 1 && m.exponents()[i] == 1));
        if rational {
            return Ok(t);
        }
    }
    Err(Error::Unsupported("no transcendence basis presents Frac(A) as a rational function field".into()))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaCheck {
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl LemmaCheck {
    fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < 5 {
                self.failures.push(msg());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone)]
pub struct TraceReport {
    pub degree: usize,
    pub trace_of_one: String,
    /// `Tr(1) = 0`: the extension is inseparable or `p` divides the degree.
    pub inseparable_or_p_divides: bool,
    pub frobenius: LemmaCheck,
    pub key: LemmaCheck,
    pub containment: LemmaCheck,
}

impl TraceReport {
    pub fn ok(&self) -> bool {
        self.frobenius.ok() && self.key.ok() && self.containment.ok()
    }
}

impl fmt::Display for TraceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "degree {} Tr(1)={}{} frobenius {}/{} key {}/{} containment {}/{}",
            self.degree,
            self.trace_of_one,
            if self.inseparable_or_p_divides { " (inseparable or p | degree)" } else { "" },
            self.frobenius.passed,
            self.frobenius.passed + self.frobenius.failed,
            self.key.passed,
            self.key.passed + self.key.failed,
            self.containment.passed,
            self.containment.passed + self.containment.failed,
        )
    }
}

fn random_element(ring: &crate::ring::Ring, rng: &mut ChaCha8Rng, terms: usize, degree: u32) -> Poly {
    let n = ring.nvars();
    let mut f = ring.zero();
    for _ in 0..terms {
        let mut e = vec![0u32; n];
        let d = rng.gen_range(0..=degree);
        for _ in 0..d {
            e[rng.gen_range(0..n)] += 1;
        }
        f.add_term(Monomial::new(e), rng.gen_range(1..ring.p()));
    }
    ring.normal_form(&f)
}

/// Run (i) `Tr(x^p) = Tr(x)^p`, (ii) `Tr ∘ psi = phi ∘ Tr` on the
/// A^p-module generators of B plus samples, and (iii) `Tr(theta) ∈ p`
/// for `theta` in the radical of `pB`.
pub fn trace_lemma_suite(
    ctx: &TraceContext,
    phi: &Splitting,
    psi: &Splitting,
    samples: &[Poly],
    primes: &[Ideal],
    random: usize,
    seed: u64,
) -> Result<TraceReport> {
    let map = ctx.map();
    let c = map.maps_compatible(phi, psi)?;
    if let Some((m, lhs, rhs)) = c.certificate {
        let a = map.source();
        let b = map.target();
        return Err(Error::IncompatiblePair(format!(
            "at {}: psi gives {}, phi gives {}",
            a.fmt_poly(&Poly::monomial(a.prime(), m, 1)),
            b.fmt_poly(&lhs),
            b.fmt_poly(&rhs)
        )));
    }
    let b = map.target();
    let p = b.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut thetas: Vec<Poly> = samples.to_vec();
    for _ in 0..random {
        thetas.push(random_element(b, &mut rng, 3, 2));
    }
    let one = ctx.trace_t(&b.one())?;
    let mut report = TraceReport {
        degree: ctx.degree(),
        trace_of_one: ctx.fmt_ratfunc(&one),
        inseparable_or_p_divides: one.is_zero(),
        frobenius: LemmaCheck::default(),
        key: LemmaCheck::default(),
        containment: LemmaCheck::default(),
    };
    for th in &thetas {
        let lhs = ctx.trace_t(&b.normal_form(&th.pow(p)))?;
        let rhs = ctx.trace_t(th)?.pow(p);
        report.frobenius.record(lhs == rhs, || format!("Tr(({})^p)", b.fmt_poly(th)));
    }
    // complete check on alpha*(m) e_j, plus the samples
    let mut key_inputs: Vec<Poly> = Vec::new();
    for m in restricted_monomials(map.source().nvars(), p as u32) {
        let am = map.pullback(&Poly::monomial(b.prime(), m, 1))?;
        for e in map.module_generators()? {
            key_inputs.push(b.normal_form(&(&am * &e)));
        }
    }
    key_inputs.extend(thetas.iter().cloned());
    for th in &key_inputs {
        let lhs = ctx.trace_t(&psi.apply(th)?)?;
        let rhs = ctx.phi_on_k(phi, &ctx.trace_t(th)?)?;
        report.key.record(lhs == rhs, || {
            format!("Tr(psi({})) = {} but phi(Tr) = {}", b.fmt_poly(th), ctx.fmt_ratfunc(&lhs), ctx.fmt_ratfunc(&rhs))
        });
    }
    for q in primes {
        let rad = map.preimage_reduced(q)?;
        let gens = rad.display_basis();
        let mut inputs: Vec<Poly> = gens.clone();
        for _ in 0..random {
            let mut th = b.zero();
            for g in &gens {
                th = &th + &(&random_element(b, &mut rng, 2, 2) * g);
            }
            inputs.push(b.normal_form(&th));
        }
        for th in &inputs {
            let tr = ctx.to_fraction(&ctx.trace_t(th)?);
            let ok = ctx.fraction_in(&tr, q)?;
            report.containment.record(ok, || {
                format!("Tr({}) = {} not in {}", b.fmt_poly(th), ctx.fmt_fraction(&tr), q.canonical_string())
            });
        }
    }
    Ok(report)
}
