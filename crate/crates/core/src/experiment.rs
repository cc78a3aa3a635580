//! Per-prime experiments: pulling compatibly split ideals back along a
//! finite map, and pushing them down a normalization square.

use std::fmt;

use crate::enumerate::{enumerate_compatible, EnumConfig};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::maps::FiniteRingMap;
use crate::poly::Poly;
use crate::splitting::Splitting;
use crate::trace::TraceContext;

#[derive(Debug, Clone)]
pub struct PullbackRow {
    pub v: Ideal,
    pub preimage: Ideal,
    pub compatible: bool,
    /// Whether `V` itself is compatible under `phi`; rows with a
    /// non-compatible source are reported but never count as failures.
    pub source_compatible: bool,
}

#[derive(Debug, Clone)]
pub struct PullbackReport {
    pub prime: u64,
    pub degree: Option<usize>,
    pub rows: Vec<PullbackRow>,
    /// `p > deg α` and both presentations are declared normal.
    pub threshold_note: bool,
}

impl PullbackReport {
    pub fn failing(&self) -> usize {
        self.rows.iter().filter(|r| r.source_compatible && !r.compatible).count()
    }

    /// Failing rows in the regime where every row must pass.
    pub fn violations(&self) -> Vec<&PullbackRow> {
        if self.threshold_note {
            self.rows.iter().filter(|r| r.source_compatible && !r.compatible).collect()
        } else {
            Vec::new()
        }
    }
}

impl fmt::Display for PullbackReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(
                f,
                "V {} PREIMAGE {} COMPATIBLE {}{}",
                r.v.canonical_string(),
                r.preimage.canonical_string(),
                if r.compatible { "yes" } else { "no" },
                if !r.source_compatible {
                    " SOURCE-INCOMPATIBLE"
                } else if self.threshold_note && !r.compatible {
                    " THEOREM-VIOLATION"
                } else {
                    ""
                }
            )?;
        }
        Ok(())
    }
}

fn require_compatible(map: &FiniteRingMap, phi: &Splitting, psi: &Splitting) -> Result<()> {
    let c = map.maps_compatible(phi, psi)?;
    if let Some((m, lhs, rhs)) = c.certificate {
        let a = map.source();
        let b = map.target();
        return Err(Error::IncompatiblePair(format!(
            "{} at {}: psi gives {}, phi gives {}",
            map.name(),
            a.fmt_poly(&Poly::monomial(a.prime(), m, 1)),
            b.fmt_poly(&lhs),
            b.fmt_poly(&rhs)
        )));
    }
    Ok(())
}

/// Degree of the map, when the function-field trace context exists.
pub fn map_degree(map: &FiniteRingMap) -> Option<usize> {
    TraceContext::new(map).ok().map(|c| c.degree())
}

pub fn pullback_experiment(
    map: &FiniteRingMap,
    phi: &Splitting,
    psi: &Splitting,
    vs: Option<Vec<Ideal>>,
    cfg: &EnumConfig,
) -> Result<PullbackReport> {
    require_compatible(map, phi, psi)?;
    let vs = match vs {
        Some(v) => v,
        None => enumerate_compatible(phi, cfg)?.members,
    };
    let mut rows = Vec::with_capacity(vs.len());
    for v in vs {
        let source_compatible = phi.is_compatible(&v)?.compatible;
        let preimage = map.preimage_reduced(&v)?;
        let compatible = psi.is_compatible(&preimage)?.compatible;
        rows.push(PullbackRow { v, preimage, compatible, source_compatible });
    }
    let degree = map_degree(map);
    let p = phi.p();
    let threshold_note = matches!(degree, Some(d) if p as usize > d)
        && map.source().is_normal()
        && map.target().is_normal();
    Ok(PullbackReport { prime: p, degree, rows, threshold_note })
}

/// A commuting square
///
/// ```text
///   X~ --alpha~--> Y~
///   ^              ^
///   mu             nu
///   |              |
///   X  --alpha-->  Y
/// ```
///
/// written on coordinate rings, so every arrow goes from the ring of the
/// base to the ring of the cover.
pub struct Square {
    pub alpha: FiniteRingMap,
    pub alpha_t: FiniteRingMap,
    pub mu: FiniteRingMap,
    pub nu: FiniteRingMap,
}

pub struct SquareSplittings {
    pub x: Splitting,
    pub y: Splitting,
    pub xt: Splitting,
    pub yt: Splitting,
}

impl Square {
    pub fn new(alpha: FiniteRingMap, alpha_t: FiniteRingMap, mu: FiniteRingMap, nu: FiniteRingMap) -> Result<Square> {
        let sq = Square { alpha, alpha_t, mu, nu };
        sq.check_commutes()?;
        Ok(sq)
    }

    fn check_commutes(&self) -> Result<()> {
        let x = self.alpha.source();
        let yt = self.nu.target();
        for i in 0..x.nvars() {
            let g = x.var_at(i);
            let down = self.nu.pullback(&self.alpha.pullback(&g)?)?;
            let up = self.alpha_t.pullback(&self.mu.pullback(&g)?)?;
            let diff = yt.normal_form(&(&down - &up));
            if !diff.is_zero() {
                return Err(Error::NonCommutingSquare(format!(
                    "on {}: {} vs {}",
                    x.var_names()[i],
                    yt.fmt_poly(&down),
                    yt.fmt_poly(&up)
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RouteRow {
    pub v: Ideal,
    /// `mu^{-1}(V)^red` on the normalization of X.
    pub upstairs: Ideal,
    pub upstairs_compatible: bool,
    /// `alpha~^{-1}` of the above on the normalization of Y.
    pub cover: Ideal,
    pub cover_compatible: bool,
    /// `nu` image of the above, compared with `alpha^{-1}(V)^red`.
    pub image: Ideal,
    pub image_matches: bool,
    pub image_compatible: bool,
}

impl RouteRow {
    pub fn ok(&self) -> bool {
        self.upstairs_compatible && self.cover_compatible && self.image_matches && self.image_compatible
    }
}

#[derive(Debug, Clone)]
pub struct RouteReport {
    pub rows: Vec<RouteRow>,
    /// Images on Y of the compatible ideals enumerated on the cover.
    pub images: Vec<Ideal>,
    /// Compatible ideals on Y not reached from the cover, with their
    /// reduced preimage upstairs.
    pub missed: Vec<(Ideal, Ideal)>,
}

impl RouteReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok())
    }
}

impl fmt::Display for RouteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        for r in &self.rows {
            writeln!(
                f,
                "V {} UPSTAIRS {} {} COVER {} {} IMAGE {} MATCH {} COMPATIBLE {}",
                r.v.canonical_string(),
                r.upstairs.canonical_string(),
                yn(r.upstairs_compatible),
                r.cover.canonical_string(),
                yn(r.cover_compatible),
                r.image.canonical_string(),
                yn(r.image_matches),
                yn(r.image_compatible)
            )?;
        }
        let imgs: Vec<String> = self.images.iter().map(|i| i.canonical_string()).collect();
        writeln!(f, "IMAGES {{{}}}", imgs.join(", "))?;
        for (v, pre) in &self.missed {
            writeln!(f, "MISSED {} PREIMAGE {} COMPATIBLE no", v.canonical_string(), pre.canonical_string())?;
        }
        Ok(())
    }
}

fn sort_canonical(v: &mut Vec<Ideal>) {
    v.sort_by(|a, b| b.dimension().cmp(&a.dimension()).then_with(|| a.canonical_string().cmp(&b.canonical_string())));
    v.dedup_by(|a, b| a == b);
}

pub fn normalization_route(
    sq: &Square,
    sp: &SquareSplittings,
    vs: Option<Vec<Ideal>>,
    cfg: &EnumConfig,
) -> Result<RouteReport> {
    require_compatible(&sq.alpha, &sp.x, &sp.y)?;
    require_compatible(&sq.alpha_t, &sp.xt, &sp.yt)?;
    require_compatible(&sq.mu, &sp.x, &sp.xt)?;
    require_compatible(&sq.nu, &sp.y, &sp.yt)?;
    let vs = match vs {
        Some(v) => v,
        None => enumerate_compatible(&sp.x, cfg)?.members,
    };
    let mut rows = Vec::new();
    for v in vs {
        let upstairs = sq.mu.preimage_reduced(&v)?;
        let upstairs_compatible = sp.xt.is_compatible(&upstairs)?.compatible;
        let cover = sq.alpha_t.preimage_reduced(&upstairs)?;
        let cover_compatible = sp.yt.is_compatible(&cover)?.compatible;
        let image = sq.nu.image_ideal(&cover)?;
        let expected = sq.alpha.preimage_reduced(&v)?;
        let image_matches = image == expected;
        let image_compatible = sp.y.is_compatible(&image)?.compatible;
        rows.push(RouteRow {
            v,
            upstairs,
            upstairs_compatible,
            cover,
            cover_compatible,
            image,
            image_matches,
            image_compatible,
        });
    }
    let mut images = Vec::new();
    for w in enumerate_compatible(&sp.yt, cfg)?.members {
        images.push(sq.nu.image_ideal(&w)?);
    }
    sort_canonical(&mut images);
    let mut missed = Vec::new();
    for v in enumerate_compatible(&sp.y, cfg)?.members {
        if !images.contains(&v) {
            let pre = sq.nu.preimage_reduced(&v)?;
            missed.push((v, pre));
        }
    }
    Ok(RouteReport { rows, images, missed })
}
