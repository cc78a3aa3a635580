//! Enumeration of compatibly split ideals by closure from seeds.
//!
//! Seeds are `(0)`, the components of the section's zero locus, singular
//! loci of members, and compatible points found by scanning. The member
//! set is closed under compatible closure, sums, intersections, colons and
//! minimal primes. Every member passes the compatibility gate.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::poly::{Monomial, Poly};
use crate::radical::minimal_primes;
use crate::splitting::Splitting;

#[derive(Debug, Clone)]
pub struct EnumConfig {
    /// Stop adding members beyond this count (the result is then heuristic).
    pub max_members: usize,
    /// Scan all F_p-points when `p^n` is at most this.
    pub point_scan_limit: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { max_members: 64, point_scan_limit: 5000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    CompleteVerified,
    Heuristic,
}

impl Completeness {
    pub fn label(&self) -> &'static str {
        match self {
            Completeness::CompleteVerified => "complete-verified",
            Completeness::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub members: Vec<Ideal>,
    pub completeness: Completeness,
    pub notes: Vec<String>,
}

impl fmt::Display for Enumeration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|m| m.canonical_string()).collect();
        write!(f, "{{{}}} [{}]", parts.join(", "), self.completeness.label())
    }
}

struct State<'a> {
    phi: &'a Splitting,
    cfg: &'a EnumConfig,
    members: Vec<Ideal>,
    queue: VecDeque<Ideal>,
    notes: Vec<String>,
    complete: bool,
}

impl State<'_> {
    fn note(&mut self, msg: String) {
        if !self.notes.contains(&msg) {
            self.notes.push(msg);
        }
    }

    fn known(&self, j: &Ideal) -> bool {
        self.members.iter().any(|m| m == j)
    }

    /// Close a candidate and add it if new; returns the index of the member.
    fn admit(&mut self, cand: &Ideal) -> Result<Option<usize>> {
        let c = self.phi.compatible_closure(cand)?;
        if c.is_unit() || self.known(&c) {
            return Ok(None);
        }
        if !self.phi.is_compatible(&c)?.compatible {
            self.note(format!("closure {} failed the compatibility gate", c.canonical_string()));
            self.complete = false;
            return Ok(None);
        }
        if self.members.len() >= self.cfg.max_members {
            self.note(format!("member cap {} reached", self.cfg.max_members));
            self.complete = false;
            return Ok(None);
        }
        self.members.push(c);
        Ok(Some(self.members.len() - 1))
    }

    fn expand(&mut self, k: usize) -> Result<()> {
        let c = self.members[k].clone();
        match minimal_primes(&c) {
            Ok(ps) => {
                for q in ps {
                    if let Some(s) = singular_locus(&q)? {
                        self.queue.push_back(s);
                    }
                    self.queue.push_back(q);
                }
            }
            Err(Error::Unsupported(msg)) => {
                self.note(format!("minimal primes of {}: {msg}", c.canonical_string()));
                self.complete = false;
            }
            Err(e) => return Err(e),
        }
        for j in 0..self.members.len() {
            if j == k {
                continue;
            }
            let m = self.members[j].clone();
            self.queue.push_back(c.sum(&m)?);
            self.queue.push_back(c.intersection(&m)?);
            self.queue.push_back(c.colon_ideal(&m)?);
            self.queue.push_back(m.colon_ideal(&c)?);
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        while let Some(cand) = self.queue.pop_front() {
            if let Some(k) = self.admit(&cand)? {
                self.expand(k)?;
            }
        }
        Ok(())
    }
}

/// Jacobian singular locus `P + (c x c minors)` of a prime, `c` its codimension.
pub fn singular_locus(prime: &Ideal) -> Result<Option<Ideal>> {
    let ring = prime.ring();
    let n = ring.nvars();
    let Some(dim) = prime.dimension() else {
        return Ok(None);
    };
    let c = n - dim;
    if c == 0 {
        return Ok(None);
    }
    let rows: Vec<&Poly> = prime.basis().iter().collect();
    if rows.len() < c {
        return Ok(None);
    }
    let jac: Vec<Vec<Poly>> = rows.iter().map(|g| (0..n).map(|v| g.derivative(v)).collect()).collect();
    let mut minors = Vec::new();
    for rs in subsets(rows.len(), c) {
        for cs in subsets(n, c) {
            let m: Vec<Vec<Poly>> = rs.iter().map(|&r| cs.iter().map(|&k| jac[r][k].clone()).collect()).collect();
            let d = determinant(&m);
            if !d.is_zero() {
                minors.push(d);
            }
        }
    }
    Ok(Some(prime.add_gens(&minors)?))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Laplace expansion along the first row.
pub fn determinant(m: &[Vec<Poly>]) -> Poly {
    match m.len() {
        0 => unreachable!("empty matrix"),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Poly::zero(m[0][0].prime(), m[0][0].nvars());
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
                let t = &m[0][j] * &determinant(&minor);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// Maximal ideal of an F_p-point on a free ring is compatible iff the
/// translated u-form has no term with all exponents below p other than
/// `(x_1 ... x_n)^(p-1)`.
fn free_point_compatible(phi: &Splitting, point: &[u64]) -> bool {
    let ring = phi.ring();
    let pr = ring.prime();
    let n = ring.nvars();
    let images: Vec<Poly> = (0..n).map(|i| &ring.var_at(i) + &ring.constant(point[i])).collect();
    let moved = phi.u().compose(&images).expect("same arity");
    let p = pr.value() as u32;
    let top = Monomial::new(vec![p - 1; n]);
    let ok = moved.terms().all(|(m, _)| *m == top || m.exponents().iter().any(|&e| e >= p));
    ok
}

fn point_ideal(phi: &Splitting, point: &[u64]) -> Ideal {
    let ring = phi.ring();
    let gens = (0..ring.nvars()).map(|i| &ring.var_at(i) - &ring.constant(point[i])).collect();
    Ideal::new(ring.clone(), gens).expect("ring polynomials")
}

/// Compatible F_p-points of `V(I_A)`, or `None` when the scan is too large.
pub fn compatible_points(phi: &Splitting, limit: u64) -> Result<Option<Vec<Vec<u64>>>> {
    let ring = phi.ring();
    let n = ring.nvars() as u32;
    let p = ring.p();
    let Some(total) = p.checked_pow(n) else {
        return Ok(None);
    };
    if total > limit {
        return Ok(None);
    }
    let mut out = Vec::new();
    let mut point = vec![0u64; n as usize];
    for idx in 0..total {
        let mut r = idx;
        for slot in point.iter_mut() {
            *slot = r % p;
            r /= p;
        }
        if ring.relations().iter().any(|g| g.evaluate(&point) != 0) {
            continue;
        }
        let ok = if ring.is_free() {
            free_point_compatible(phi, &point)
        } else {
            phi.is_compatible(&point_ideal(phi, &point))?.compatible
        };
        if ok {
            out.push(point.clone());
        }
    }
    Ok(Some(out))
}

/// Enumerate compatibly split ideals (radical, excluding `(1)`).
pub fn enumerate_compatible(phi: &Splitting, cfg: &EnumConfig) -> Result<Enumeration> {
    let ring = phi.ring().clone();
    let mut st = State { phi, cfg, members: Vec::new(), queue: VecDeque::new(), notes: Vec::new(), complete: true };
    let zero = Ideal::zero(ring.clone());
    st.queue.push_back(zero.clone());
    if let Some(s) = phi.section() {
        st.queue.push_back(Ideal::new(ring.clone(), vec![s.clone()])?);
    } else {
        st.queue.push_back(Ideal::new(ring.clone(), vec![phi.u().clone()])?);
    }
    st.run()?;

    let univariate = phi.split_factors_univariate();
    match &univariate {
        Ok((x, factors)) => {
            for q in factors {
                if q.degree().unwrap_or(0) > 4 {
                    st.note(format!("split point of degree {} over F_p not listed", q.degree().unwrap()));
                    st.complete = false;
                    continue;
                }
                st.queue.push_back(Ideal::new(ring.clone(), vec![q.to_poly(ring.nvars(), *x)])?);
            }
        }
        Err(_) => {
            match compatible_points(phi, cfg.point_scan_limit)? {
                Some(points) => {
                    for pt in points {
                        st.queue.push_back(point_ideal(phi, &pt));
                    }
                }
                None => st.note(format!("point scan skipped: p^n exceeds {}", cfg.point_scan_limit)),
            }
            st.complete = false;
        }
    }
    st.run()?;

    let mut members = st.members;
    members.sort_by(|a, b| {
        b.dimension().cmp(&a.dimension()).then_with(|| a.canonical_string().cmp(&b.canonical_string()))
    });
    let completeness = if st.complete && univariate.is_ok() {
        Completeness::CompleteVerified
    } else {
        Completeness::Heuristic
    };
    Ok(Enumeration { members, completeness, notes: st.notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;
    use crate::parse::parse_poly;
    use crate::ring::Ring;

    fn surface(p: u64) -> Splitting {
        let r = Ring::free("X", Prime::new(p).unwrap(), &["u", "v", "w"]).into_arc();
        let f = parse_poly("u*v*w - v^2 - w^2", r.var_names(), r.prime()).unwrap();
        Splitting::from_anticanonical(r, f).unwrap()
    }

    fn strings(e: &Enumeration) -> Vec<String> {
        e.members.iter().map(|m| m.canonical_string()).collect()
    }

    #[test]
    fn surface_lists() {
        let e = enumerate_compatible(&surface(2), &EnumConfig::default()).unwrap();
        assert_eq!(strings(&e), vec!["(0)", "(u*v*w + v^2 + w^2)", "(v, w)", "(u, v, w)"]);
        for p in [3u64, 5] {
            let e = enumerate_compatible(&surface(p), &EnumConfig::default()).unwrap();
            assert_eq!(strings(&e), vec!["(0)", "(u*v*w - v^2 - w^2)", "(v, w)"]);
        }
    }

    #[test]
    fn standard_line() {
        for p in [2u64, 3, 5, 7] {
            let r = Ring::free("L", Prime::new(p).unwrap(), &["x"]).into_arc();
            let x = r.var("x").unwrap();
            let phi = Splitting::new(r, x.pow(p - 1)).unwrap();
            let e = enumerate_compatible(&phi, &EnumConfig::default()).unwrap();
            assert_eq!(strings(&e), vec!["(0)", "(x)"]);
            assert_eq!(e.completeness, Completeness::CompleteVerified);
        }
    }

    #[test]
    fn determinant_of_small_matrix() {
        let r = Ring::free("R", Prime::new(7).unwrap(), &["a", "b"]);
        let p = |s: &str| parse_poly(s, r.var_names(), r.prime()).unwrap();
        let m = vec![vec![p("a"), p("b")], vec![p("1"), p("a")]];
        assert_eq!(determinant(&m), p("a^2 - b"));
    }
}
