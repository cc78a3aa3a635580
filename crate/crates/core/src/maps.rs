//! Finite ring maps `alpha*: A -> B` with integrality witnesses.

use std::sync::Arc;

use crate::cartier::{cartier, restricted_monomials};
use crate::error::{Error, Result};
use crate::groebner;
use crate::ideal::{eliminate, Ideal};
use crate::linalg;
use crate::order::MonomialOrder;
use crate::poly::{Monomial, Poly};
use crate::radical::radical;
use crate::ring::{same_ring, Ring};
use crate::splitting::Splitting;

const GREVLEX: MonomialOrder = MonomialOrder::GrevLex;

/// A monic polynomial in `T` with coefficients in `A`, satisfied by a
/// variable of `B`. Stored over `A`'s variables with `T` appended last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub var: usize,
    pub poly: Poly,
    /// Filled in automatically rather than declared.
    pub derived: bool,
}

impl Witness {
    pub fn degree(&self) -> u32 {
        self.poly.degree_in(self.poly.nvars() - 1)
    }
}

#[derive(Clone, Debug)]
pub struct FiniteRingMap {
    name: String,
    source: Arc<Ring>,
    target: Arc<Ring>,
    images: Vec<Poly>,
    witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCheck {
    pub finite: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapCompatibility {
    pub compatible: bool,
    /// `(m, psi(alpha*(m)), alpha*(phi(m)))` for the first disagreeing monomial.
    pub certificate: Option<(Monomial, Poly, Poly)>,
}

#[derive(Debug, Clone)]
pub enum Extension {
    Unique(Splitting),
    None,
    /// Several extensions; each listed u-form gives a different map.
    NonUnique(Vec<Poly>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConductorTag {
    Verified,
    Unverified,
}

#[derive(Debug, Clone)]
pub struct Conductor {
    pub ideal: Ideal,
    pub tag: ConductorTag,
}

impl FiniteRingMap {
    /// `witnesses` pairs a `B` variable with a monic polynomial over
    /// `A`'s variables plus a trailing `T`. Variables left without a
    /// witness get one derived when they are images of `A` variables or
    /// inverses of witnessed variables with unit constant term.
    pub fn new(
        name: impl Into<String>,
        source: Arc<Ring>,
        target: Arc<Ring>,
        images: Vec<Poly>,
        witnesses: Vec<(usize, Poly)>,
    ) -> Result<FiniteRingMap> {
        if images.len() != source.nvars() {
            return Err(Error::ArityMismatch { expected: source.nvars(), got: images.len() });
        }
        for g in &images {
            target.check_poly(g)?;
        }
        if source.prime() != target.prime() {
            return Err(Error::RingMismatch("source and target primes differ".into()));
        }
        let na = source.nvars();
        let mut ws = Vec::new();
        for (var, poly) in witnesses {
            if var >= target.nvars() {
                return Err(Error::Invalid(format!("witness for unknown variable index {var}")));
            }
            if poly.nvars() != na + 1 || poly.prime() != source.prime() {
                return Err(Error::ArityMismatch { expected: na + 1, got: poly.nvars() });
            }
            ws.push(Witness { var, poly, derived: false });
        }
        let mut map = FiniteRingMap { name: name.into(), source, target, images, witnesses: ws };
        map.derive_witnesses();
        Ok(map)
    }

    fn derive_witnesses(&mut self) {
        let na = self.source.nvars();
        let pr = self.source.prime();
        let t = Poly::var(pr, na + 1, na);
        for y in 0..self.target.nvars() {
            if self.witness(y).is_some() {
                continue;
            }
            if let Some(i) = self.images.iter().position(|g| *g == self.target.var_at(y)) {
                let poly = &t - &Poly::var(pr, na + 1, i);
                self.witnesses.push(Witness { var: y, poly, derived: true });
                continue;
            }
            let partner = self.target.inverse_pairs().iter().find_map(|&(a, b)| {
                if b == y {
                    Some(a)
                } else if a == y {
                    Some(b)
                } else {
                    None
                }
            });
            let Some(x) = partner else { continue };
            let Some(w) = self.witness(x).cloned() else { continue };
            // reverse T^d + ... + a_0 when a_0 is a nonzero constant
            let d = w.degree();
            let mut a0 = 0;
            let mut rev = Poly::zero(pr, na + 1);
            for (m, c) in w.poly.terms() {
                let k = m.exponents()[na];
                let mut e = m.exponents().to_vec();
                e[na] = d - k;
                if k == 0 {
                    if !m.is_one() {
                        a0 = 0;
                        break;
                    }
                    a0 = c;
                }
                rev.add_term(Monomial::new(e), c);
            }
            if a0 != 0 {
                let poly = rev.scale(pr.inv(a0));
                self.witnesses.push(Witness { var: y, poly, derived: true });
            }
        }
        self.witnesses.sort_by_key(|w| w.var);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<Ring> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Ring> {
        &self.target
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }

    pub fn witness(&self, var: usize) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.var == var)
    }

    pub fn max_witness_degree(&self) -> u32 {
        self.witnesses.iter().map(|w| w.degree()).max().unwrap_or(1)
    }

    /// `alpha*(a)` in normal form.
    pub fn pullback(&self, a: &Poly) -> Result<Poly> {
        self.source.check_poly(a)?;
        Ok(self.target.normal_form(&a.compose(&self.images)?))
    }

    /// Evaluate a witness at its variable inside `B`.
    fn witness_value(&self, w: &Witness) -> Poly {
        let mut images = self.images.clone();
        images.push(self.target.var_at(w.var));
        self.target.normal_form(&w.poly.compose(&images).expect("arity checked"))
    }

    pub fn check_finite(&self) -> FiniteCheck {
        let mut failures = Vec::new();
        for r in self.source.relations() {
            match self.pullback(r) {
                Ok(v) if v.is_zero() => {}
                _ => failures.push(format!("relation {} does not map to 0", self.source.fmt_poly(r))),
            }
        }
        let na = self.source.nvars();
        let mut t_names = self.source.var_names().to_vec();
        t_names.push("T".into());
        for y in 0..self.target.nvars() {
            let name = &self.target.var_names()[y];
            let Some(w) = self.witness(y) else {
                failures.push(format!("no integrality witness for {name}"));
                continue;
            };
            let lead = w.degree();
            let top: Vec<(&Monomial, u64)> = w.poly.terms().filter(|(m, _)| m.exponents()[na] == lead).collect();
            let monic = lead > 0 && top.len() == 1 && top[0].1 == 1 && top[0].0.degree() == lead as u64;
            if !monic {
                failures.push(format!("witness for {name} is not monic in T: {}", w.poly.display(&t_names)));
                continue;
            }
            if !self.witness_value(w).is_zero() {
                failures.push(format!("witness for {name} does not vanish: {}", w.poly.display(&t_names)));
            }
        }
        FiniteCheck { finite: failures.is_empty(), failures }
    }

    fn require_finite(&self) -> Result<()> {
        let c = self.check_finite();
        if c.finite {
            Ok(())
        } else {
            Err(Error::NotFinite(c.failures.join("; ")))
        }
    }

    /// Monomials `prod y^k`, `k` below the witness degree, spanning `B` over `A`.
    pub fn module_generators(&self) -> Result<Vec<Poly>> {
        self.require_finite()?;
        let nb = self.target.nvars();
        let mut gens: Vec<Poly> = vec![self.target.one()];
        for y in 0..nb {
            let d = self.witness(y).expect("finite").degree();
            let mut next = Vec::new();
            for g in &gens {
                for k in 0..d {
                    next.push(g * &self.target.var_at(y).pow(k as u64));
                }
            }
            gens = next;
        }
        let mut out: Vec<Poly> = Vec::new();
        for g in gens {
            let g = self.target.normal_form(&g);
            if !g.is_zero() && !out.contains(&g) {
                out.push(g);
            }
        }
        Ok(out)
    }

    /// `alpha*(V) + I_B`.
    pub fn extend_ideal(&self, v: &Ideal) -> Result<Ideal> {
        same_ring(&self.source, v.ring())?;
        let gens = v.gens().iter().map(|g| self.pullback(g)).collect::<Result<Vec<_>>>()?;
        Ideal::new(self.target.clone(), gens)
    }

    /// The reduced preimage `alpha^-1(V)^red`.
    pub fn preimage_reduced(&self, v: &Ideal) -> Result<Ideal> {
        radical(&self.extend_ideal(v)?)
    }

    /// The contraction `{a : alpha*(a) ∈ W}`, the ideal of the closed image.
    pub fn image_ideal(&self, w: &Ideal) -> Result<Ideal> {
        same_ring(&self.target, w.ring())?;
        let nb = self.target.nvars();
        let na = self.source.nvars();
        let n = nb + na;
        let pr = self.source.prime();
        let mut gens: Vec<Poly> = w.lifted_gens().iter().map(|g| g.embed(n, 0)).collect();
        for (i, img) in self.images.iter().enumerate() {
            gens.push(&Poly::var(pr, n, nb + i) - &img.embed(n, 0));
        }
        gens.extend(self.source.relations().iter().map(|r| r.embed(n, nb)));
        Ideal::new(self.source.clone(), eliminate(&gens, nb))
    }

    /// `psi(alpha*(m)) == alpha*(phi(m))` on the A^p-module generators of A.
    pub fn maps_compatible(&self, phi: &Splitting, psi: &Splitting) -> Result<MapCompatibility> {
        same_ring(&self.source, phi.ring())?;
        same_ring(&self.target, psi.ring())?;
        for m in restricted_monomials(self.source.nvars(), self.source.p() as u32) {
            let mono = Poly::monomial(self.source.prime(), m.clone(), 1);
            let lhs = psi.apply(&self.pullback(&mono)?)?;
            let rhs = self.pullback(&phi.apply(&mono)?)?;
            if lhs != rhs {
                return Ok(MapCompatibility { compatible: false, certificate: Some((m, lhs, rhs)) });
            }
        }
        Ok(MapCompatibility { compatible: true, certificate: None })
    }

    /// Default degree bound for bound-relative solves: `2 * (max witness degree) * p`.
    pub fn default_bound(&self) -> usize {
        2 * self.max_witness_degree() as usize * self.source.p() as usize
    }

    /// Solve for u-forms on `B` extending `phi` along the map, with support
    /// in monomials of degree at most `bound`.
    pub fn extend_splitting(&self, phi: &Splitting, bound: usize) -> Result<Extension> {
        same_ring(&self.source, phi.ring())?;
        self.require_finite()?;
        let b = &self.target;
        let pr = b.prime();
        let nb = b.nvars();
        let unknowns = monomials_up_to(nb, bound);
        let cols = unknowns.len();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut rhs: Vec<u64> = Vec::new();

        // well-definedness: u * r ∈ I_B^[p]
        if !b.is_free() {
            let frob: Vec<Poly> = b.relations().iter().map(|r| r.frobenius()).collect();
            let fb = groebner::reduced_basis(&frob, GREVLEX);
            for r in b.relations() {
                let images: Vec<Poly> =
                    unknowns.iter().map(|m| groebner::normal_form(&r.mul_monomial(m, 1), &fb, GREVLEX)).collect();
                push_equations(&images, None, cols, &mut rows, &mut rhs);
            }
        }
        // unit condition: T'(u) = 1 in B
        let images: Vec<Poly> =
            unknowns.iter().map(|m| b.normal_form(&cartier(&Poly::monomial(pr, m.clone(), 1)))).collect();
        push_equations(&images, Some(&b.one()), cols, &mut rows, &mut rhs);
        // compatibility on the A^p-module generators of A
        for m in restricted_monomials(self.source.nvars(), self.source.p() as u32) {
            let mono = Poly::monomial(pr, m, 1);
            let pulled = self.pullback(&mono)?;
            let target = self.pullback(&phi.apply(&mono)?)?;
            let images: Vec<Poly> =
                unknowns.iter().map(|x| b.normal_form(&cartier(&pulled.mul_monomial(x, 1)))).collect();
            push_equations(&images, Some(&target), cols, &mut rows, &mut rhs);
        }

        let Some(sol) = linalg::solve(&rows, &rhs, pr, cols) else {
            return Ok(Extension::None);
        };
        let to_poly = |v: &[u64]| Poly::from_terms(pr, nb, unknowns.iter().cloned().zip(v.iter().copied()));
        let u = to_poly(&sol);

        // the map is determined by its values on B's monomials below p
        let mut value_rows: Vec<Vec<u64>> = Vec::new();
        for g in restricted_monomials(nb, pr.value() as u32) {
            let images: Vec<Poly> =
                unknowns.iter().map(|x| b.normal_form(&cartier(&Poly::monomial(pr, x.mul(&g), 1)))).collect();
            let mut dummy = Vec::new();
            push_equations(&images, None, cols, &mut value_rows, &mut dummy);
        }
        let kernel = linalg::nullspace(&rows, pr, cols);
        let moving: Vec<&Vec<u64>> = kernel
            .iter()
            .filter(|k| value_rows.iter().any(|r| r.iter().zip(k.iter()).fold(0, |s, (&a, &b)| pr.add(s, pr.mul(a, b))) != 0))
            .collect();
        if !moving.is_empty() {
            let mut out = vec![u.clone()];
            for k in moving.into_iter().take(8) {
                let v: Vec<u64> = sol.iter().zip(k).map(|(&a, &b)| pr.add(a, b)).collect();
                out.push(to_poly(&v));
            }
            return Ok(Extension::NonUnique(out));
        }
        let psi = Splitting::new(b.clone(), u)
            .map_err(|e| Error::BoundTooSmall(format!("solution at bound {bound} fails verification: {e}")))?;
        if !self.maps_compatible(phi, &psi)?.compatible {
            return Err(Error::BoundTooSmall(format!("solution at bound {bound} is not compatible")));
        }
        Ok(Extension::Unique(psi))
    }

    /// Conductor `{c in A : c * B ⊆ A}` of a finite birational map,
    /// computed exactly from the kernels of `A[Z] -> B, Z -> e`.
    pub fn conductor(&self) -> Result<Conductor> {
        let gens = self.module_generators()?;
        let a = &self.source;
        let na = a.nvars();
        let mut parts: Vec<(Poly, Vec<Poly>)> = Vec::new();
        let mut acc = Ideal::unit(a.clone());
        for e in &gens {
            let kernel = self.kernel_with(e);
            let basis = groebner::reduced_basis(&kernel, MonomialOrder::Block(1));
            let mut colon = Vec::new();
            for g in &basis {
                match g.degree_in(0) {
                    0 => colon.push(g.restrict_to(&(1..=na).collect::<Vec<_>>()).expect("free of Z")),
                    1 => {
                        let mut c = Poly::zero(a.prime(), na);
                        for (m, coef) in g.terms() {
                            if m.exponents()[0] == 1 {
                                c.add_term(Monomial::new(m.exponents()[1..].to_vec()), coef);
                            }
                        }
                        colon.push(c);
                    }
                    _ => {}
                }
            }
            acc = acc.intersection(&Ideal::new(a.clone(), colon)?)?;
            parts.push((e.clone(), basis));
        }
        let ideal = Ideal::new(a.clone(), acc.display_basis())?;
        let mut verified = true;
        'outer: for c in ideal.gens() {
            for (_, basis) in &parts {
                let cz = &c.embed(na + 1, 1) * &Poly::var(a.prime(), na + 1, 0);
                let r = groebner::normal_form(&cz, basis, MonomialOrder::Block(1));
                match r.restrict_to(&(1..=na).collect::<Vec<_>>()) {
                    Some(val) if ideal.contains(&val) => {}
                    _ => {
                        verified = false;
                        break 'outer;
                    }
                }
            }
        }
        Ok(Conductor { ideal, tag: if verified { ConductorTag::Verified } else { ConductorTag::Unverified } })
    }

    /// Generators of `ker(A[Z] -> B)` for `Z -> e`, in variables `[Z | A]`.
    fn kernel_with(&self, e: &Poly) -> Vec<Poly> {
        let nb = self.target.nvars();
        let na = self.source.nvars();
        let n = nb + 1 + na;
        let pr = self.source.prime();
        let mut gens: Vec<Poly> = self.target.relations().iter().map(|r| r.embed(n, 0)).collect();
        for (i, img) in self.images.iter().enumerate() {
            gens.push(&Poly::var(pr, n, nb + 1 + i) - &img.embed(n, 0));
        }
        gens.push(&Poly::var(pr, n, nb) - &e.embed(n, 0));
        gens.extend(self.source.relations().iter().map(|r| r.embed(n, nb + 1)));
        eliminate(&gens, nb)
    }
}

/// All monomials in `n` variables of total degree at most `d`.
pub fn monomials_up_to(n: usize, d: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(n)];
    let mut layer = vec![Monomial::one(n)];
    for _ in 0..d {
        let mut next: Vec<Monomial> = Vec::new();
        for m in &layer {
            let last = m.support().last().unwrap_or(0);
            for i in last..n {
                let mut e = m.exponents().to_vec();
                e[i] += 1;
                next.push(Monomial::new(e));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Append one equation per monomial: `sum_j c_j images[j] = target`.
fn push_equations(images: &[Poly], target: Option<&Poly>, cols: usize, rows: &mut Vec<Vec<u64>>, rhs: &mut Vec<u64>) {
    let mut monos: Vec<Monomial> = images.iter().flat_map(|g| g.terms().map(|(m, _)| m.clone())).collect();
    if let Some(t) = target {
        monos.extend(t.terms().map(|(m, _)| m.clone()));
    }
    monos.sort();
    monos.dedup();
    for m in monos {
        let row: Vec<u64> = (0..cols).map(|j| images[j].coeff_of(&m)).collect();
        rows.push(row);
        rhs.push(target.map(|t| t.coeff_of(&m)).unwrap_or(0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;
    use crate::parse::parse_poly;

    fn parse(r: &Ring, s: &str) -> Poly {
        parse_poly(s, r.var_names(), r.prime()).unwrap()
    }

    fn wild(p: u64) -> (FiniteRingMap, Splitting) {
        let pr = Prime::new(p).unwrap();
        let a = Ring::free("A", pr, &["w"]).into_arc();
        let b = Ring::free("B", pr, &["x"]).invert("x").unwrap().into_arc();
        let t_names = vec!["w".to_string(), "T".to_string()];
        let wit = parse_poly("T^2 - w*T + 1", &t_names, pr).unwrap();
        let map = FiniteRingMap::new("alpha", a.clone(), b.clone(), vec![parse(&b, "x + x_inv")], vec![(0, wit)]).unwrap();
        let u = if p == 2 { parse(&a, "w + w^2") } else { parse(&a, &format!("(w^2 - 4)^{}", (p - 1) / 2)) };
        (map, Splitting::new(a, u).unwrap())
    }

    #[test]
    fn wild_map_is_finite_and_extends() {
        let (map, phi) = wild(2);
        assert!(map.check_finite().finite, "{:?}", map.check_finite());
        assert!(map.witness(1).unwrap().derived);
        let b = map.target().clone();
        match map.extend_splitting(&phi, 4).unwrap() {
            Extension::Unique(psi) => {
                assert_eq!(psi.apply(&parse(&b, "x")).unwrap(), parse(&b, "x + 1"));
            }
            other => panic!("{other:?}"),
        }
        let psi = Splitting::from_anticanonical(b.clone(), parse(&b, "1 + x + x^2")).unwrap();
        assert!(map.maps_compatible(&phi, &psi).unwrap().compatible);
        let torus = Splitting::from_anticanonical(b.clone(), parse(&b, "x")).unwrap();
        assert!(!map.maps_compatible(&phi, &torus).unwrap().compatible);
        let v = Ideal::new(map.source().clone(), vec![parse(map.source(), "w")]).unwrap();
        assert_eq!(map.preimage_reduced(&v).unwrap().canonical_string(), "(x + 1, x_inv + 1)");
    }

    #[test]
    fn odd_analogue_extends_to_torus() {
        for p in [3u64, 5] {
            let (map, phi) = wild(p);
            let b = map.target().clone();
            let torus = Splitting::from_anticanonical(b.clone(), parse(&b, "x")).unwrap();
            assert!(map.maps_compatible(&phi, &torus).unwrap().compatible);
        }
    }

    fn normalization(p: u64) -> FiniteRingMap {
        let pr = Prime::new(p).unwrap();
        let a = Ring::free("X", pr, &["u", "v", "w"]);
        let f = parse(&a, "u*v*w - v^2 - w^2");
        let a = a.with_relations(vec![f]).unwrap().into_arc();
        let b = Ring::free("Ht", pr, &["w", "x"]).invert("x").unwrap().into_arc();
        let names: Vec<String> = ["u", "v", "w", "T"].iter().map(|s| s.to_string()).collect();
        let wit = parse_poly("T^2 - u*T + 1", &names, pr).unwrap();
        let images = vec![parse(&b, "x + x_inv"), parse(&b, "w*x"), parse(&b, "w")];
        FiniteRingMap::new("mu", a, b, images, vec![(1, wit)]).unwrap()
    }

    #[test]
    fn normalization_images_and_conductor() {
        let mu = normalization(2);
        assert!(mu.check_finite().finite, "{:?}", mu.check_finite());
        let b = mu.target().clone();
        let a = mu.source().clone();
        let lt = Ideal::new(b.clone(), vec![parse(&b, "w")]).unwrap();
        let l = Ideal::new(a.clone(), vec![parse(&a, "v"), parse(&a, "w")]).unwrap();
        assert_eq!(mu.image_ideal(&lt).unwrap(), l);
        let pt = Ideal::new(b.clone(), vec![parse(&b, "w"), parse(&b, "x + 1")]).unwrap();
        assert_eq!(mu.image_ideal(&pt).unwrap().canonical_string(), "(u, v, w)");
        assert_eq!(mu.preimage_reduced(&l).unwrap(), lt);
        for p in [2u64, 3, 5] {
            let c = normalization(p).conductor().unwrap();
            assert_eq!(c.tag, ConductorTag::Verified);
            assert_eq!(c.ideal.canonical_string(), "(v, w)");
        }
    }
}
