//! Executes scenario tasks and renders reports.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::enumerate::{enumerate_compatible, EnumConfig};
use crate::error::{Error, Result};
use crate::experiment::{normalization_route, pullback_experiment, Square, SquareSplittings};
use crate::ideal::Ideal;
use crate::maps::{ConductorTag, Extension, FiniteRingMap};
use crate::order::MonomialOrder;
use crate::parse::parse_poly;
use crate::ring::Ring;
use crate::scenario::{expand_p, Scenario, SplittingKind, Task, TaskKind};
use crate::splitting::{is_splitting, Splitting};
use crate::trace::{trace_lemma_suite, TraceContext};

pub const DEFAULT_SEED: u64 = 0x00f5_1e17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Tsv,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub order: MonomialOrder,
    pub max_degree: Option<usize>,
    pub seed: u64,
    pub parallel: bool,
    pub enumeration: EnumConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            order: MonomialOrder::GrevLex,
            max_degree: None,
            seed: DEFAULT_SEED,
            parallel: false,
            enumeration: EnumConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Unsupported,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unsupported => "UNSUPPORTED",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TaskResult {
    pub index: usize,
    pub kind: &'static str,
    pub line: usize,
    /// Machine lines as field lists.
    pub lines: Vec<Vec<String>>,
    pub status: Status,
    pub message: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub title: String,
    pub prime: Option<u64>,
    pub results: Vec<TaskResult>,
}

impl Report {
    /// 0 all pass, 1 a mathematical check failed, 2 an unsupported
    /// computation was reached.
    pub fn exit_code(&self) -> i32 {
        match self.results.iter().map(|r| r.status).max() {
            None | Some(Status::Pass) => 0,
            Some(Status::Fail) => 1,
            Some(Status::Unsupported) => 2,
        }
    }

    pub fn render(&self, format: Format) -> String {
        let sep = match format {
            Format::Text => " ",
            Format::Tsv => "\t",
        };
        let mut out = String::new();
        let prime = self.prime.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
        writeln!(out, "{}", ["SCENARIO", &self.title, "PRIME", &prime].join(sep)).unwrap();
        for r in &self.results {
            for l in &r.lines {
                writeln!(out, "{}", l.join(sep)).unwrap();
            }
            let mut status = vec!["TASK".to_string(), r.index.to_string(), r.kind.into(), r.status.label().into()];
            if let Some(m) = &r.message {
                status.push(m.clone());
            }
            writeln!(out, "{}", status.join(sep)).unwrap();
        }
        if format == Format::Text {
            let count = |s: Status| self.results.iter().filter(|r| r.status == s).count();
            writeln!(out).unwrap();
            writeln!(out, "{:<6} {:<16} {:<6} status", "task", "kind", "line").unwrap();
            for r in &self.results {
                writeln!(out, "{:<6} {:<16} {:<6} {}", r.index, r.kind, r.line, r.status.label()).unwrap();
            }
            writeln!(
                out,
                "{} tasks: {} pass, {} fail, {} unsupported",
                self.results.len(),
                count(Status::Pass),
                count(Status::Fail),
                count(Status::Unsupported)
            )
            .unwrap();
        }
        out
    }
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::Unsupported(_) | Error::BoundTooSmall(_) => Status::Unsupported,
        _ => Status::Fail,
    }
}

struct Ctx<'a> {
    sc: &'a Scenario,
    cfg: &'a RunConfig,
    splittings: HashMap<String, Result<Splitting>>,
}

type Lines = Vec<Vec<String>>;

fn line(fields: &[&str]) -> Vec<String> {
    fields.iter().map(|s| s.to_string()).collect()
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Parse `{(g, ...), (...)}` or a single `(g, ...)` as ideals of `ring`.
pub fn parse_ideal_list(text: &str, ring: &std::sync::Arc<Ring>) -> Result<Vec<Ideal>> {
    let text = text.trim();
    let text = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(text);
    let text = expand_p(text, ring.p())?;
    let inner = text.as_str();
    let mut groups = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => {
                if depth == 0 {
                    start = Some(i + 1);
                }
                depth += 1;
            }
            ')' => {
                depth = depth.checked_sub(1).ok_or_else(|| Error::Invalid(format!("unbalanced `{text}`")))?;
                if depth == 0 {
                    groups.push(&inner[start.take().unwrap()..i]);
                }
            }
            ',' | ' ' if depth == 0 => {}
            _ if depth == 0 => return Err(Error::Invalid(format!("expected an ideal list, got `{text}`"))),
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Invalid(format!("unbalanced `{text}`")));
    }
    let mut out = Vec::new();
    for g in groups {
        let mut gens = Vec::new();
        let mut d = 0usize;
        let mut last = 0;
        for (i, ch) in g.char_indices() {
            match ch {
                '(' => d += 1,
                ')' => d -= 1,
                ',' if d == 0 => {
                    gens.push(parse_poly(g[last..i].trim(), ring.var_names(), ring.prime())?);
                    last = i + 1;
                }
                _ => {}
            }
        }
        gens.push(parse_poly(g[last..].trim(), ring.var_names(), ring.prime())?);
        out.push(Ideal::new(ring.clone(), gens)?);
    }
    Ok(out)
}

fn same_set(a: &[Ideal], b: &[Ideal]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x)) && b.iter().all(|x| a.contains(x))
}

impl<'a> Ctx<'a> {
    fn new(sc: &'a Scenario, cfg: &'a RunConfig) -> Ctx<'a> {
        let mut ctx = Ctx { sc, cfg, splittings: HashMap::new() };
        for d in &sc.splittings {
            let s = match &d.kind {
                SplittingKind::UForm(u) => Splitting::new(d.ring.clone(), u.clone()),
                SplittingKind::Anticanonical(f) => Splitting::from_anticanonical(d.ring.clone(), f.clone()),
                SplittingKind::Extend { phi, map, bound } => ctx.extended(phi, map, *bound),
            };
            ctx.splittings.insert(d.name.clone(), s);
        }
        ctx
    }

    fn extended(&self, phi: &str, map: &str, bound: Option<usize>) -> Result<Splitting> {
        let phi = self.splitting(phi)?;
        let map = self.map(map)?;
        let d = bound.or(self.cfg.max_degree).unwrap_or_else(|| map.default_bound());
        match map.extend_splitting(&phi, d)? {
            Extension::Unique(psi) => Ok(psi),
            Extension::None => Err(Error::Invalid(format!("no extension along {} up to degree {d}", map.name()))),
            Extension::NonUnique(v) => Err(Error::Invalid(format!(
                "{} independent extensions along {} up to degree {d}",
                v.len() + 1,
                map.name()
            ))),
        }
    }

    fn splitting(&self, name: &str) -> Result<Splitting> {
        match self.splittings.get(name) {
            Some(r) => r.clone(),
            None => Err(Error::UnknownName { kind: "splitting", name: name.into() }),
        }
    }

    fn map(&self, name: &str) -> Result<FiniteRingMap> {
        match self.sc.map(name) {
            Some(r) => r.clone(),
            None => Err(Error::UnknownName { kind: "map", name: name.into() }),
        }
    }

    fn ideal(&self, name: &str) -> Result<Ideal> {
        self.sc.ideal(name).cloned().ok_or_else(|| Error::UnknownName { kind: "ideal", name: name.into() })
    }

    fn show(&self, i: &Ideal) -> String {
        i.canonical_string_in(self.cfg.order)
    }

    fn show_list(&self, v: &[Ideal]) -> String {
        let parts: Vec<String> = v.iter().map(|i| self.show(i)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn run_task(&self, index: usize, task: &Task) -> TaskResult {
        let mut lines = Vec::new();
        let (status, message) = match self.exec(task, &mut lines) {
            Ok(None) => (Status::Pass, None),
            Ok(Some(msg)) => (Status::Fail, Some(msg)),
            Err(e) => (status_of(&e), Some(e.to_string())),
        };
        TaskResult { index, kind: task.kind.label(), line: task.line, lines, status, message }
    }

    /// `Ok(None)` on success, `Ok(Some(reason))` on a failed check.
    fn exec(&self, task: &Task, out: &mut Lines) -> Result<Option<String>> {
        let expect = task.expect.as_deref();
        let mismatch = |got: &str| match expect {
            Some(e) if e != got => Some(format!("expected {e}, got {got}")),
            _ => None,
        };
        match &task.kind {
            TaskKind::CheckSplitting { s } => {
                let d = self.sc.splitting(s).unwrap();
                let label = match &d.kind {
                    SplittingKind::UForm(u) => is_splitting(&d.ring, u)?.label(),
                    _ => match self.splitting(s) {
                        Ok(_) => "ok",
                        Err(Error::NearSplittingOnly(_)) => "near-only",
                        Err(Error::NotWellDefined(_)) => "not-well-defined",
                        Err(e) => return Err(e),
                    },
                };
                out.push(line(&["SPLITTING", label, s]));
                Ok(match expect {
                    Some(_) => mismatch(label),
                    None if label != "ok" => Some(format!("verdict {label}")),
                    None => None,
                })
            }
            TaskKind::Compatible { s, ideal } => {
                let phi = self.splitting(s)?;
                let j = self.ideal(ideal)?;
                let c = phi.is_compatible(&j)?;
                out.push(line(&["COMPAT", s, &self.show(&j), yn(c.compatible)]));
                if let Some((g, m, val)) = &c.certificate {
                    let r = phi.ring();
                    let mg = g.mul_monomial(m, 1);
                    let arg = r.fmt_poly(&r.normal_form(&mg));
                    out.push(line(&["CERTIFICATE", s, &format!("phi({arg}) = {}", r.fmt_poly(val))]));
                }
                Ok(mismatch(yn(c.compatible)))
            }
            TaskKind::Enumerate { s } => {
                let phi = self.splitting(s)?;
                let e = enumerate_compatible(&phi, &self.cfg.enumeration)?;
                out.push(line(&["ENUM", s, &self.show_list(&e.members), e.completeness.label()]));
                for n in &e.notes {
                    out.push(line(&["NOTE", s, n]));
                }
                match expect {
                    Some(t) => {
                        let want = parse_ideal_list(t, phi.ring())?;
                        Ok((!same_set(&want, &e.members))
                            .then(|| format!("expected {}, got {}", self.show_list(&want), self.show_list(&e.members))))
                    }
                    None => Ok(None),
                }
            }
            TaskKind::Pullback { map, phi, psi, ideals } => {
                let m = self.map(map)?;
                let vs = match ideals {
                    Some(names) => Some(names.iter().map(|n| self.ideal(n)).collect::<Result<Vec<_>>>()?),
                    None => None,
                };
                let r = pullback_experiment(&m, &self.splitting(phi)?, &self.splitting(psi)?, vs, &self.cfg.enumeration)?;
                let degree = r.degree.map(|d| d.to_string()).unwrap_or_else(|| "?".into());
                out.push(line(&[
                    "PULLBACK",
                    map,
                    "DEGREE",
                    &degree,
                    "THRESHOLD",
                    yn(r.threshold_note),
                    "FAILING",
                    &r.failing().to_string(),
                ]));
                for row in &r.rows {
                    let mut l = line(&[
                        "V",
                        &self.show(&row.v),
                        "PREIMAGE",
                        &self.show(&row.preimage),
                        "COMPATIBLE",
                        yn(row.compatible),
                    ]);
                    if !row.source_compatible {
                        l.push("SOURCE-INCOMPATIBLE".into());
                    } else if r.threshold_note && !row.compatible {
                        l.push("THEOREM-VIOLATION".into());
                    }
                    out.push(l);
                }
                if !r.violations().is_empty() {
                    return Ok(Some(format!("{} THEOREM-VIOLATION rows", r.violations().len())));
                }
                Ok(mismatch(&r.failing().to_string()))
            }
            TaskKind::TraceLab { map, phi, psi, primes, samples } => {
                let m = self.map(map)?;
                let ctx = TraceContext::new(&m)?;
                let b = m.target();
                for i in 0..b.nvars() {
                    let tr = ctx.trace(&b.var_at(i))?;
                    out.push(line(&["TRACE", map, &format!("Tr({})", b.var_names()[i]), &ctx.fmt_fraction(&tr)]));
                }
                let ps = primes.iter().map(|n| self.ideal(n)).collect::<Result<Vec<_>>>()?;
                let r = trace_lemma_suite(
                    &ctx,
                    &self.splitting(phi)?,
                    &self.splitting(psi)?,
                    &[],
                    &ps,
                    *samples,
                    self.cfg.seed,
                )?;
                let frac = |c: &crate::trace::LemmaCheck| format!("{}/{}", c.passed, c.passed + c.failed);
                out.push(line(&[
                    "TRACE",
                    map,
                    "DEGREE",
                    &r.degree.to_string(),
                    "TR1",
                    &r.trace_of_one,
                    "FROBENIUS",
                    &frac(&r.frobenius),
                    "KEY",
                    &frac(&r.key),
                    "CONTAINMENT",
                    &frac(&r.containment),
                ]));
                if r.inseparable_or_p_divides {
                    out.push(line(&["NOTE", map, "inseparable or p | degree"]));
                }
                for f in r.frobenius.failures.iter().chain(&r.key.failures).chain(&r.containment.failures) {
                    out.push(line(&["TRACE-FAILURE", map, f]));
                }
                Ok((!r.ok()).then(|| "trace lemma failures".to_string()))
            }
            TaskKind::Conductor { map, s } => {
                let m = self.map(map)?;
                let c = m.conductor()?;
                let tag = match c.tag {
                    ConductorTag::Verified => "verified",
                    ConductorTag::Unverified => "unverified",
                };
                out.push(line(&["CONDUCTOR", map, &self.show(&c.ideal), tag]));
                let mut fail = (c.tag == ConductorTag::Unverified).then(|| "conductor not verified".to_string());
                if let Some(s) = s {
                    let ok = self.splitting(s)?.is_compatible(&c.ideal)?.compatible;
                    out.push(line(&["COMPAT", s, &self.show(&c.ideal), yn(ok)]));
                    if !ok {
                        fail = Some("conductor not compatible".into());
                    }
                }
                if let Some(t) = expect {
                    let want = parse_ideal_list(t, m.source())?;
                    if want.len() != 1 || want[0] != c.ideal {
                        fail = Some(format!("expected {t}, got {}", self.show(&c.ideal)));
                    }
                }
                Ok(fail)
            }
            TaskKind::Restrict { s, kill } => {
                let phi = self.splitting(s)?;
                let r = phi.ring();
                let idx = kill.iter().map(|v| r.index_of(v)).collect::<Result<Vec<_>>>()?;
                let res = phi.restrict_to_coordinate_subspace(&idx)?;
                let rr = res.ring();
                out.push(line(&["RESTRICT", s, rr.name(), &rr.fmt_poly(res.u())]));
                if rr.nvars() == 1 {
                    let pts = res.split_points_univariate(4)?;
                    out.push(line(&["SPLITPOINTS", s, &pts.to_string()]));
                }
                match expect {
                    Some(t) => {
                        let want = parse_poly(&expand_p(t, r.p())?, rr.var_names(), rr.prime())?;
                        Ok((want != *res.u()).then(|| format!("expected {}, got {}", rr.fmt_poly(&want), rr.fmt_poly(res.u()))))
                    }
                    None => Ok(None),
                }
            }
            TaskKind::Extend { map, phi, bound } => {
                let m = self.map(map)?;
                let d = bound.or(self.cfg.max_degree).unwrap_or_else(|| m.default_bound());
                let b = m.target();
                let label = match m.extend_splitting(&self.splitting(phi)?, d)? {
                    Extension::Unique(psi) => {
                        out.push(line(&["EXTEND", map, phi, "BOUND", &d.to_string(), "unique", &b.fmt_poly(psi.u())]));
                        for i in 0..b.nvars() {
                            let v = psi.apply(&b.var_at(i))?;
                            out.push(line(&["EXTEND", map, &format!("psi({})", b.var_names()[i]), &b.fmt_poly(&v)]));
                        }
                        "unique"
                    }
                    Extension::None => {
                        out.push(line(&["EXTEND", map, phi, "BOUND", &d.to_string(), "none"]));
                        "none"
                    }
                    Extension::NonUnique(v) => {
                        out.push(line(&["EXTEND", map, phi, "BOUND", &d.to_string(), "non-unique", &(v.len() + 1).to_string()]));
                        "non-unique"
                    }
                };
                Ok(mismatch(label))
            }
            TaskKind::Route { square, ideals } => {
                let d = self.sc.square(square).unwrap();
                let sq = Square::new(self.map(&d.alpha)?, self.map(&d.alpha_t)?, self.map(&d.mu)?, self.map(&d.nu)?)?;
                let [x, y, xt, yt] = &d.splittings;
                let sp = SquareSplittings {
                    x: self.splitting(x)?,
                    y: self.splitting(y)?,
                    xt: self.splitting(xt)?,
                    yt: self.splitting(yt)?,
                };
                let vs = match ideals {
                    Some(names) => Some(names.iter().map(|n| self.ideal(n)).collect::<Result<Vec<_>>>()?),
                    None => None,
                };
                let r = normalization_route(&sq, &sp, vs, &self.cfg.enumeration)?;
                let mut broken = 0;
                for row in &r.rows {
                    out.push(line(&[
                        "ROUTE",
                        "V",
                        &self.show(&row.v),
                        "UPSTAIRS",
                        &self.show(&row.upstairs),
                        yn(row.upstairs_compatible),
                        "COVER",
                        &self.show(&row.cover),
                        yn(row.cover_compatible),
                        "IMAGE",
                        &self.show(&row.image),
                        "MATCH",
                        yn(row.image_matches),
                        "COMPATIBLE",
                        yn(row.image_compatible),
                    ]));
                    // a compatible start upstairs must survive every later step
                    if row.upstairs_compatible && !row.ok() {
                        broken += 1;
                    }
                }
                out.push(line(&["ROUTE", "IMAGES", &self.show_list(&r.images)]));
                for (v, pre) in &r.missed {
                    out.push(line(&["ROUTE", "MISSED", &self.show(v), "PREIMAGE", &self.show(pre), "COMPATIBLE", "no"]));
                }
                if broken > 0 {
                    return Ok(Some(format!("{broken} route rows break after a compatible start")));
                }
                match expect {
                    Some(t) => {
                        let want = parse_ideal_list(t, sq.alpha.target())?;
                        let got: Vec<Ideal> = r.missed.iter().map(|(v, _)| v.clone()).collect();
                        Ok((!same_set(&want, &got))
                            .then(|| format!("expected missed {}, got {}", self.show_list(&want), self.show_list(&got))))
                    }
                    None => Ok(None),
                }
            }
        }
    }
}

pub fn run(sc: &Scenario, title: &str, cfg: &RunConfig) -> Report {
    let ctx = Ctx::new(sc, cfg);
    let results: Vec<TaskResult> = if cfg.parallel {
        sc.tasks.par_iter().enumerate().map(|(i, t)| ctx.run_task(i + 1, t)).collect()
    } else {
        sc.tasks.iter().enumerate().map(|(i, t)| ctx.run_task(i + 1, t)).collect()
    };
    Report { title: title.into(), prime: sc.prime.map(|p| p.value()), results }
}
