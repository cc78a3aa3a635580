//! Splittings in u-form: `phi(g) = T'(u * g)` modulo the relations.

use std::fmt;
use std::sync::Arc;

use crate::cartier::{cartier, frobenius_root_generators, restricted_monomials};
use crate::error::{Error, Result};
use crate::groebner;
use crate::ideal::Ideal;
use crate::order::MonomialOrder;
use crate::poly::{Monomial, Poly};
use crate::ring::{same_ring, Ring};
use crate::univariate::{self, UPoly, DEFAULT_SEED};

/// Outcome of checking a candidate u-form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Splitting,
    /// Well defined, but `phi(1)` is this value rather than 1.
    NearSplittingOnly { phi_one: Poly },
    /// `u * r` is not in `I_A^[p]` for this relation `r`.
    NotWellDefined { relation: Poly },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Splitting => "ok",
            Verdict::NearSplittingOnly { .. } => "near-only",
            Verdict::NotWellDefined { .. } => "not-well-defined",
        }
    }

    pub fn is_splitting(&self) -> bool {
        matches!(self, Verdict::Splitting)
    }
}

/// Check well-definedness `u * I_A ⊆ I_A^[p]` and the unit condition `T'(u) = 1`.
pub fn is_splitting(ring: &Ring, u: &Poly) -> Result<Verdict> {
    ring.check_poly(u)?;
    if !ring.is_free() {
        let frob: Vec<Poly> = ring.relations().iter().map(|r| r.frobenius()).collect();
        let basis = groebner::reduced_basis(&frob, MonomialOrder::GrevLex);
        for r in ring.relations() {
            if !groebner::normal_form(&(u * r), &basis, MonomialOrder::GrevLex).is_zero() {
                return Ok(Verdict::NotWellDefined { relation: r.clone() });
            }
        }
    }
    let one = ring.normal_form(&cartier(u));
    if one.is_one() {
        Ok(Verdict::Splitting)
    } else {
        Ok(Verdict::NearSplittingOnly { phi_one: one })
    }
}

#[derive(Clone)]
pub struct Splitting {
    ring: Arc<Ring>,
    u: Poly,
    section: Option<Poly>,
}

/// Result of a compatibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compatibility {
    pub compatible: bool,
    /// `(g, m, phi(m * g))` with `g` in the ideal and `phi(m * g)` outside it.
    pub certificate: Option<(Poly, Monomial, Poly)>,
}

impl Splitting {
    /// A verified splitting.
    pub fn new(ring: Arc<Ring>, u: Poly) -> Result<Splitting> {
        match is_splitting(&ring, &u)? {
            Verdict::Splitting => Ok(Splitting { ring, u, section: None }),
            Verdict::NearSplittingOnly { phi_one } => {
                Err(Error::NearSplittingOnly(format!("phi(1) = {}", ring.fmt_poly(&phi_one))))
            }
            Verdict::NotWellDefined { relation } => Err(Error::NotWellDefined(format!(
                "u times relation {} is not in the Frobenius power",
                ring.fmt_poly(&relation)
            ))),
        }
    }

    /// A well-defined near splitting; the unit condition is not required.
    pub fn near(ring: Arc<Ring>, u: Poly) -> Result<Splitting> {
        match is_splitting(&ring, &u)? {
            Verdict::NotWellDefined { relation } => Err(Error::NotWellDefined(format!(
                "u times relation {} is not in the Frobenius power",
                ring.fmt_poly(&relation)
            ))),
            _ => Ok(Splitting { ring, u, section: None }),
        }
    }

    /// The splitting induced by the `(p-1)`-st power of the anticanonical
    /// section `f / (dx_1 ^ ... ^ dx_n)` on the chart variables. On a
    /// localization `x_inv` is treated as `1/x`, which contributes the
    /// factor `(x * x_inv - 1)^(p-1)` of the complete intersection.
    pub fn from_anticanonical(ring: Arc<Ring>, f: Poly) -> Result<Splitting> {
        ring.check_poly(&f)?;
        if !ring.is_localization() {
            return Err(Error::Invalid(format!(
                "anticanonical sections need a free or localized ring, `{}` has other relations",
                ring.name()
            )));
        }
        let e = ring.p() - 1;
        let mut shifted = f.clone();
        let mut factor = ring.one();
        for &(x, xi) in ring.inverse_pairs() {
            shifted = &shifted * &ring.var_at(xi);
            factor = &factor * &(&(&ring.var_at(x) * &ring.var_at(xi)) - &ring.one());
        }
        let u = &factor.pow(e) * &ring.normal_form(&shifted).pow(e);
        let mut s = Splitting::new(ring, u)?;
        s.section = Some(f);
        Ok(s)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn u(&self) -> &Poly {
        &self.u
    }

    pub fn section(&self) -> Option<&Poly> {
        self.section.as_ref()
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    /// `phi(f)`, in normal form.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        self.ring.check_poly(f)?;
        Ok(self.apply_unchecked(f))
    }

    pub(crate) fn apply_unchecked(&self, f: &Poly) -> Poly {
        self.ring.normal_form(&cartier(&(&self.u * f)))
    }

    fn root_of_product(&self, j: &Ideal) -> Vec<Poly> {
        let prods: Vec<Poly> = j.lifted_gens().iter().map(|g| &self.u * g).collect();
        frobenius_root_generators(&prods)
    }

    /// Whether `phi(J) ⊆ J`, via `(u * (J + I_A))^[1/p] ⊆ J + I_A`.
    pub fn is_compatible(&self, j: &Ideal) -> Result<Compatibility> {
        same_ring(&self.ring, j.ring())?;
        if j.is_unit() {
            return Ok(Compatibility { compatible: true, certificate: None });
        }
        let ok = self.root_of_product(j).iter().all(|g| j.contains(g));
        if ok {
            return Ok(Compatibility { compatible: true, certificate: None });
        }
        let n = self.ring.nvars();
        let p = self.p() as u32;
        let mut gens: Vec<Poly> = j.gens().to_vec();
        gens.extend(self.ring.relations().iter().cloned());
        for m in restricted_monomials(n, p) {
            for g in &gens {
                let v = self.apply_unchecked(&g.mul_monomial(&m, 1));
                if !j.contains(&v) {
                    return Ok(Compatibility { compatible: false, certificate: Some((g.clone(), m, v)) });
                }
            }
        }
        unreachable!("a failing Frobenius root has a monomial witness")
    }

    /// The smallest compatible ideal containing `J`.
    pub fn compatible_closure(&self, j: &Ideal) -> Result<Ideal> {
        same_ring(&self.ring, j.ring())?;
        let mut cur = j.clone();
        loop {
            if cur.is_unit() {
                return Ok(cur);
            }
            let root = self.root_of_product(&cur);
            let new: Vec<Poly> = root.into_iter().filter(|g| !cur.contains(g)).collect();
            if new.is_empty() {
                return Ok(cur);
            }
            let mut gens = cur.basis().to_vec();
            gens.extend(new);
            cur = Ideal::new(self.ring.clone(), gens)?;
        }
    }

    /// Induced splitting on the coordinate subspace where the variables in
    /// `kill` vanish: `u' = sum_b x^b [x^b x_S^(p-1)] u`.
    pub fn restrict_to_coordinate_subspace(&self, kill: &[usize]) -> Result<Splitting> {
        if !self.ring.is_free() {
            return Err(Error::Invalid("coordinate restriction needs a free ring".into()));
        }
        let ideal = Ideal::of_vars(self.ring.clone(), kill);
        let c = self.is_compatible(&ideal)?;
        if !c.compatible {
            return Err(Error::NotCompatible(ideal.canonical_string()));
        }
        let n = self.ring.nvars();
        let keep: Vec<usize> = (0..n).filter(|i| !kill.contains(i)).collect();
        let e = self.p() as u32 - 1;
        let mut out = Poly::zero(self.ring.prime(), keep.len());
        for (m, coef) in self.u.terms() {
            if kill.iter().all(|&i| m.exponents()[i] == e) {
                out.add_term(Monomial::new(keep.iter().map(|&i| m.exponents()[i]).collect()), coef);
            }
        }
        let names: Vec<String> = keep.iter().map(|&i| self.ring.var_names()[i].clone()).collect();
        let killed: Vec<&str> = kill.iter().map(|&i| self.ring.var_names()[i].as_str()).collect();
        let ring = Ring::with_names(
            format!("{}/({})", self.ring.name(), killed.join(",")),
            self.ring.prime(),
            names,
        )?
        .into_arc();
        Splitting::new(ring, out)
    }

    /// The splitting on a one-variable chart as `phi(g) = T'(l * g)` for a
    /// univariate `l`, up to a power of the variable when it is inverted.
    fn univariate_uform(&self) -> Result<(usize, UPoly)> {
        let ring = &self.ring;
        let chart: Vec<usize> = (0..ring.nvars()).filter(|&i| !ring.is_inverse_var(i)).collect();
        if chart.len() != 1 {
            return Err(Error::Invalid(format!("ring `{}` is not a one-variable chart", ring.name())));
        }
        let x = chart[0];
        let inv = ring.inverse_pairs().iter().find(|(a, _)| *a == x).map(|&(_, b)| b);
        if ring.relations().len() != inv.iter().count() {
            return Err(Error::Invalid(format!("ring `{}` has relations beyond a localization", ring.name())));
        }
        if inv.is_none() {
            return Ok((x, UPoly::from_poly(&self.u, x).expect("single variable")));
        }
        let xi = inv.unwrap();
        let p = self.p() as i64;
        // Laurent exponent -> coefficient of l
        let mut laurent: std::collections::BTreeMap<i64, u64> = std::collections::BTreeMap::new();
        let pr = ring.prime();
        for b in 0..p {
            let v = self.apply_unchecked(&ring.var_at(x).pow(b as u64));
            for (m, c) in v.terms() {
                let j = m.exponents()[x] as i64 - m.exponents()[xi] as i64;
                let k = p - 1 - b + p * j;
                let e = laurent.entry(k).or_insert(0);
                *e = pr.add(*e, c);
            }
        }
        let low = laurent.keys().next().copied().unwrap_or(0).min(0);
        let high = laurent.keys().last().copied().unwrap_or(0);
        let mut coeffs = vec![0u64; (high - low + 1) as usize];
        for (k, c) in laurent {
            coeffs[(k - low) as usize] = c;
        }
        Ok((x, UPoly::new(pr, coeffs)))
    }

    /// Chart variable and the monic irreducible factors `q` of the u-form
    /// with `q^(p-1)` dividing it, excluding the inverted variable itself.
    pub fn split_factors_univariate(&self) -> Result<(usize, Vec<UPoly>)> {
        let (x, l) = self.univariate_uform()?;
        let localized = self.ring.inverse_pairs().iter().any(|(a, _)| *a == x);
        let need = self.p() as u32 - 1;
        let fac = univariate::factor(&l, DEFAULT_SEED)?;
        let out = fac
            .factors
            .into_iter()
            .filter(|(q, m)| *m >= need && !(localized && q.coeffs() == [0, 1]))
            .map(|(q, _)| q)
            .collect();
        Ok((x, out))
    }

    /// Compatibly split closed points of a one-variable chart: `(x - a)` is
    /// compatible iff `(x - a)^(p-1)` divides the u-form. Extension points
    /// are irreducible factors of degree 2 to `max_ext_degree` (at most 4).
    pub fn split_points_univariate(&self, max_ext_degree: usize) -> Result<SplitPoints> {
        let (x, factors) = self.split_factors_univariate()?;
        let mut rational = Vec::new();
        let mut extension = Vec::new();
        for q in factors {
            match q.degree() {
                Some(1) => rational.push(self.ring.prime().neg(q.coeffs()[0])),
                Some(d) if d >= 2 && d <= max_ext_degree.min(4) => extension.push(q),
                _ => {}
            }
        }
        rational.sort();
        Ok(SplitPoints { var: self.ring.var_names()[x].clone(), rational, extension })
    }
}

/// Split points on a line: F_p-rational values and irreducible factors
/// cutting out points over small extensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPoints {
    pub var: String,
    pub rational: Vec<u64>,
    pub extension: Vec<UPoly>,
}

impl fmt::Display for SplitPoints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.rational.iter().map(|a| format!("{}={a}", self.var)).collect();
        parts.extend(self.extension.iter().map(|q| format!("{}=0", q.display(&self.var))));
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Splitting(u = {} on {})", self.ring.fmt_poly(&self.u), self.ring)
    }
}
