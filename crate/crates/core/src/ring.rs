//! Presented rings `F_p[x_1..x_n] / I_A`.
//!
//! A localization at a variable `x` is encoded by an extra variable
//! `x_inv` together with the relation `x * x_inv - 1`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::field::Prime;
use crate::groebner;
use crate::order::MonomialOrder;
use crate::poly::Poly;

pub struct Ring {
    name: String,
    prime: Prime,
    vars: Vec<String>,
    relations: Vec<Poly>,
    inverses: Vec<(usize, usize)>,
    normal: bool,
    relation_basis: OnceLock<Vec<Poly>>,
}

impl Ring {
    /// A free polynomial ring.
    pub fn free(name: impl Into<String>, prime: Prime, vars: &[&str]) -> Ring {
        Ring {
            name: name.into(),
            prime,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            relations: Vec::new(),
            inverses: Vec::new(),
            normal: false,
            relation_basis: OnceLock::new(),
        }
    }

    pub fn with_names(name: impl Into<String>, prime: Prime, vars: Vec<String>) -> Result<Ring> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::Invalid(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Ring {
            name: name.into(),
            prime,
            vars,
            relations: Vec::new(),
            inverses: Vec::new(),
            normal: false,
            relation_basis: OnceLock::new(),
        })
    }

    /// Adjoin `var_inv` and the relation `var * var_inv - 1`.
    pub fn invert(mut self, var: &str) -> Result<Ring> {
        let i = self.index_of(var)?;
        let inv_name = format!("{var}_inv");
        if self.vars.contains(&inv_name) {
            return Err(Error::Invalid(format!("`{var}` is already inverted")));
        }
        self.vars.push(inv_name);
        let n = self.vars.len();
        for r in &mut self.relations {
            *r = r.embed(n, 0);
        }
        let j = n - 1;
        let x = Poly::var(self.prime, n, i);
        let y = Poly::var(self.prime, n, j);
        self.relations.push(&(&x * &y) - &Poly::one(self.prime, n));
        self.inverses.push((i, j));
        Ok(self)
    }

    pub fn with_relations(mut self, relations: Vec<Poly>) -> Result<Ring> {
        for r in &relations {
            if r.nvars() != self.vars.len() || r.prime() != self.prime {
                return Err(Error::RingMismatch(format!(
                    "relation does not live in ring `{}`",
                    self.name
                )));
            }
        }
        self.relations.extend(relations.into_iter().filter(|r| !r.is_zero()));
        Ok(self)
    }

    pub fn declare_normal(mut self, normal: bool) -> Ring {
        self.normal = normal;
        self
    }

    pub fn into_arc(self) -> Arc<Ring> {
        Arc::new(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn p(&self) -> u64 {
        self.prime.value()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    /// Pairs `(x, x_inv)` of variable indices introduced by localization.
    pub fn inverse_pairs(&self) -> &[(usize, usize)] {
        &self.inverses
    }

    pub fn is_inverse_var(&self, i: usize) -> bool {
        self.inverses.iter().any(|&(_, j)| j == i)
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_empty()
    }

    /// True when every relation comes from an inverted variable.
    pub fn is_localization(&self) -> bool {
        self.relations.len() == self.inverses.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownName { kind: "variable", name: name.to_string() })
    }

    pub fn var(&self, name: &str) -> Result<Poly> {
        Ok(Poly::var(self.prime, self.nvars(), self.index_of(name)?))
    }

    pub fn var_at(&self, i: usize) -> Poly {
        Poly::var(self.prime, self.nvars(), i)
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.prime, self.nvars())
    }

    pub fn one(&self) -> Poly {
        Poly::one(self.prime, self.nvars())
    }

    pub fn constant(&self, c: u64) -> Poly {
        Poly::constant(self.prime, self.nvars(), c)
    }

    /// Reduced grevlex Gröbner basis of the relation ideal.
    pub fn relation_basis(&self) -> &[Poly] {
        self.relation_basis
            .get_or_init(|| groebner::reduced_basis(&self.relations, MonomialOrder::GrevLex))
    }

    /// Canonical representative modulo the relations.
    pub fn normal_form(&self, f: &Poly) -> Poly {
        if self.relations.is_empty() {
            return f.clone();
        }
        groebner::normal_form(f, self.relation_basis(), MonomialOrder::GrevLex)
    }

    pub fn check_poly(&self, f: &Poly) -> Result<()> {
        if f.prime() != self.prime {
            return Err(Error::RingMismatch(format!(
                "polynomial over F_{} used in ring `{}` over F_{}",
                f.prime(),
                self.name,
                self.prime
            )));
        }
        if f.nvars() != self.nvars() {
            return Err(Error::ArityMismatch { expected: self.nvars(), got: f.nvars() });
        }
        Ok(())
    }

    pub fn fmt_poly(&self, f: &Poly) -> String {
        f.display(&self.vars)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Ring {
        Ring {
            name: name.into(),
            prime: self.prime,
            vars: self.vars.clone(),
            relations: self.relations.clone(),
            inverses: self.inverses.clone(),
            normal: self.normal,
            relation_basis: OnceLock::new(),
        }
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime && self.vars == other.vars && self.relations == other.relations
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ring")
            .field("name", &self.name)
            .field("prime", &self.prime.value())
            .field("vars", &self.vars)
            .field("relations", &self.relations.iter().map(|r| self.fmt_poly(r)).collect::<Vec<_>>())
            .finish()
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[{}]", self.prime, self.vars.join(", "))?;
        if !self.relations.is_empty() {
            let rels: Vec<String> = self.relations.iter().map(|r| self.fmt_poly(r)).collect();
            write!(f, "/({})", rels.join(", "))?;
        }
        Ok(())
    }
}

/// Rings are compared structurally; two handles on equal presentations are
/// interchangeable.
pub fn same_ring(a: &Ring, b: &Ring) -> Result<()> {
    if std::ptr::eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::RingMismatch(format!("`{}` vs `{}`", a.name, b.name)))
    }
}
