//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! prime 2
//! ring A vars w normal
//! ring B vars x invert x normal
//! ring H vars u, v, w relations u*v*w - v^2 - w^2
//! ideal V on A gens w
//! splitting phi on A u-form w + w^2
//! splitting psi on B anticanonical 1 + x + x^2
//! splitting chi on B extend phi along alpha
//! map alpha from A to B images w -> x + x_inv witness x: T^2 - w*T + 1
//! map id from H to H identity
//! square sq alpha id alpha_t idt mu mu nu mu splittings phi phi psi psi
//! task pullback alpha phi psi ideals V expect 1
//! ```
//!
//! Polynomial text may contain `{expr}` with `expr` an integer expression
//! in `p`, e.g. `(u*v*w - v^2 - w^2)^{p-1}`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Prime;
use crate::ideal::Ideal;
use crate::maps::FiniteRingMap;
use crate::parse::parse_poly;
use crate::poly::Poly;
use crate::ring::Ring;

#[derive(Debug, Clone)]
pub enum SplittingKind {
    UForm(Poly),
    Anticanonical(Poly),
    Extend { phi: String, map: String, bound: Option<usize> },
}

#[derive(Debug, Clone)]
pub struct SplittingDecl {
    pub name: String,
    pub ring: Arc<Ring>,
    pub kind: SplittingKind,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct SquareDecl {
    pub name: String,
    pub alpha: String,
    pub alpha_t: String,
    pub mu: String,
    pub nu: String,
    /// Splittings on X, Y, X~, Y~.
    pub splittings: [String; 4],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskKind {
    CheckSplitting { s: String },
    Compatible { s: String, ideal: String },
    Enumerate { s: String },
    Pullback { map: String, phi: String, psi: String, ideals: Option<Vec<String>> },
    TraceLab { map: String, phi: String, psi: String, primes: Vec<String>, samples: usize },
    Conductor { map: String, s: Option<String> },
    Restrict { s: String, kill: Vec<String> },
    Extend { map: String, phi: String, bound: Option<usize> },
    Route { square: String, ideals: Option<Vec<String>> },
}

impl TaskKind {
    pub fn label(&self) -> &'static str {
        match self {
            TaskKind::CheckSplitting { .. } => "check-splitting",
            TaskKind::Compatible { .. } => "compatible",
            TaskKind::Enumerate { .. } => "enumerate",
            TaskKind::Pullback { .. } => "pullback",
            TaskKind::TraceLab { .. } => "trace-lab",
            TaskKind::Conductor { .. } => "conductor",
            TaskKind::Restrict { .. } => "restrict",
            TaskKind::Extend { .. } => "extend",
            TaskKind::Route { .. } => "route",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Task {
    pub kind: TaskKind,
    pub expect: Option<String>,
    pub line: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Scenario {
    pub prime: Option<Prime>,
    pub rings: Vec<Arc<Ring>>,
    pub ideals: Vec<(String, Ideal)>,
    pub splittings: Vec<SplittingDecl>,
    pub maps: Vec<(String, std::result::Result<FiniteRingMap, Error>)>,
    pub squares: Vec<SquareDecl>,
    pub tasks: Vec<Task>,
}

impl Scenario {
    pub fn ring(&self, name: &str) -> Option<&Arc<Ring>> {
        self.rings.iter().find(|r| r.name() == name)
    }

    pub fn ideal(&self, name: &str) -> Option<&Ideal> {
        self.ideals.iter().find(|(n, _)| n == name).map(|(_, i)| i)
    }

    pub fn splitting(&self, name: &str) -> Option<&SplittingDecl> {
        self.splittings.iter().find(|s| s.name == name)
    }

    pub fn map(&self, name: &str) -> Option<&std::result::Result<FiniteRingMap, Error>> {
        self.maps.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn square(&self, name: &str) -> Option<&SquareDecl> {
        self.squares.iter().find(|s| s.name == name)
    }
}

/// A whitespace-delimited word with its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Word<'a> {
    text: &'a str,
    start: usize,
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    words: Vec<Word<'a>>,
}

impl<'a> Line<'a> {
    fn new(no: usize, text: &'a str) -> Line<'a> {
        let mut words = Vec::new();
        let mut start = None;
        for (i, ch) in text.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    words.push(Word { text: &text[s..i], start: s });
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            words.push(Word { text: &text[s..], start: s });
        }
        Line { no, text, words }
    }

    fn col(&self, byte: usize) -> usize {
        self.text[..byte].chars().count() + 1
    }

    fn err<T>(&self, byte: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.no, col: self.col(byte), msg: msg.into() })
    }

    fn end(&self) -> usize {
        self.text.len()
    }

    fn word(&self, i: usize, what: &str) -> Result<Word<'a>> {
        match self.words.get(i) {
            Some(w) => Ok(*w),
            None => self.err(self.end(), format!("expected {what}")),
        }
    }

    fn keyword(&self, i: usize, kw: &str) -> Result<()> {
        let w = self.word(i, &format!("`{kw}`"))?;
        if w.text != kw {
            return self.err(w.start, format!("expected `{kw}`, found `{}`", w.text));
        }
        Ok(())
    }

    /// Split the words from index `from` into clauses headed by keywords.
    /// Returns `(keyword, text, byte offset of text)`.
    fn clauses(&self, from: usize, keywords: &[&str]) -> Result<Vec<(&'a str, &'a str, usize)>> {
        let mut out: Vec<(&str, usize, usize)> = Vec::new();
        let mut i = from;
        if let Some(w) = self.words.get(i) {
            if !keywords.contains(&w.text) {
                return self.err(w.start, format!("unexpected `{}`", w.text));
            }
        }
        while i < self.words.len() {
            let w = self.words[i];
            if keywords.contains(&w.text) {
                if let Some(last) = out.last_mut() {
                    last.2 = w.start;
                }
                let body = self.words.get(i + 1).map(|n| n.start).unwrap_or(self.end());
                out.push((w.text, body, self.end()));
            }
            i += 1;
        }
        let mut res = Vec::new();
        for (kw, s, e) in out {
            let s = s.min(e);
            let body = &self.text[s..e];
            res.push((kw, body.trim_end(), s));
        }
        Ok(res)
    }
}

/// Evaluate `{expr}` blocks in `p`.
fn expand_macros(line: &Line, text: &str, offset: usize, p: u64) -> Result<String> {
    let mut out = String::new();
    let mut rest = text;
    let mut pos = offset;
    while let Some(i) = rest.find('{') {
        out.push_str(&rest[..i]);
        let Some(j) = rest[i..].find('}') else {
            return line.err(pos + i, "unclosed `{`");
        };
        let expr = &rest[i + 1..i + j];
        match eval_p(expr, p as i64) {
            Some(v) if v >= 0 => out.push_str(&v.to_string()),
            _ => return line.err(pos + i, format!("cannot evaluate `{expr}`")),
        }
        pos += i + j + 1;
        rest = &rest[i + j + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Expand `{expr}` blocks outside a scenario line.
pub fn expand_p(text: &str, p: u64) -> Result<String> {
    let line = Line::new(1, text);
    expand_macros(&line, text, 0, p)
}

fn eval_p(expr: &str, p: i64) -> Option<i64> {
    let toks: Vec<char> = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let v = eval_sum(&toks, &mut pos, p)?;
    (pos == toks.len()).then_some(v)
}

fn eval_sum(t: &[char], pos: &mut usize, p: i64) -> Option<i64> {
    let mut v = eval_prod(t, pos, p)?;
    while let Some(&c) = t.get(*pos) {
        match c {
            '+' => {
                *pos += 1;
                v += eval_prod(t, pos, p)?;
            }
            '-' => {
                *pos += 1;
                v -= eval_prod(t, pos, p)?;
            }
            _ => break,
        }
    }
    Some(v)
}

fn eval_prod(t: &[char], pos: &mut usize, p: i64) -> Option<i64> {
    let mut v = eval_atom(t, pos, p)?;
    while let Some(&c) = t.get(*pos) {
        match c {
            '*' => {
                *pos += 1;
                v *= eval_atom(t, pos, p)?;
            }
            '/' => {
                *pos += 1;
                let d = eval_atom(t, pos, p)?;
                if d == 0 || v % d != 0 {
                    return None;
                }
                v /= d;
            }
            _ => break,
        }
    }
    Some(v)
}

fn eval_atom(t: &[char], pos: &mut usize, p: i64) -> Option<i64> {
    match t.get(*pos)? {
        'p' => {
            *pos += 1;
            Some(p)
        }
        '(' => {
            *pos += 1;
            let v = eval_sum(t, pos, p)?;
            (t.get(*pos) == Some(&')')).then(|| *pos += 1)?;
            Some(v)
        }
        c if c.is_ascii_digit() => {
            let mut v: i64 = 0;
            while let Some(d) = t.get(*pos).and_then(|c| c.to_digit(10)) {
                v = v.checked_mul(10)?.checked_add(d as i64)?;
                *pos += 1;
            }
            Some(v)
        }
        _ => None,
    }
}

struct Parser {
    prime_override: Option<Prime>,
    sc: Scenario,
    names: HashMap<(&'static str, String), usize>,
}

impl Parser {
    fn prime(&self, line: &Line) -> Result<Prime> {
        match self.sc.prime {
            Some(p) => Ok(p),
            None => line.err(0, "`prime` must be declared before use"),
        }
    }

    fn declare(&mut self, line: &Line, w: Word, kind: &'static str) -> Result<()> {
        if self.names.insert((kind, w.text.to_string()), line.no).is_some() {
            return line.err(w.start, format!("duplicate {kind} `{}`", w.text));
        }
        Ok(())
    }

    fn lookup<'b, T>(&self, line: &Line, w: Word, kind: &'static str, found: Option<&'b T>) -> Result<&'b T> {
        match found {
            Some(x) => Ok(x),
            None => line.err(w.start, format!("unknown {kind} `{}`", w.text)),
        }
    }

    fn poly(&self, line: &Line, text: &str, offset: usize, names: &[String]) -> Result<Poly> {
        let p = self.prime(line)?;
        let expanded = expand_macros(line, text, offset, p.value())?;
        // columns inside a macro-expanded text are approximate past the macro
        parse_poly(&expanded, names, p).map_err(|e| match e {
            Error::Parse { col, msg, .. } => {
                let prefix: usize = line.text[..offset].chars().count();
                Error::Parse { line: line.no, col: prefix + col, msg }
            }
            other => other,
        })
    }

    fn list(&self, text: &str, offset: usize) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        let mut pos = offset;
        for part in text.split(',') {
            let lead = part.len() - part.trim_start().len();
            let t = part.trim();
            if !t.is_empty() {
                out.push((t.to_string(), pos + lead));
            }
            pos += part.len() + 1;
        }
        out
    }

    fn line(&mut self, line: &Line) -> Result<()> {
        let Some(head) = line.words.first() else { return Ok(()) };
        match head.text {
            "prime" => self.prime_line(line),
            "ring" => self.ring_line(line),
            "ideal" => self.ideal_line(line),
            "splitting" => self.splitting_line(line),
            "map" => self.map_line(line),
            "square" => self.square_line(line),
            "task" => self.task_line(line),
            other => line.err(head.start, format!("unknown keyword `{other}`")),
        }
    }

    fn prime_line(&mut self, line: &Line) -> Result<()> {
        let w = line.word(1, "a prime")?;
        let Ok(v) = w.text.parse::<u64>() else {
            return line.err(w.start, format!("`{}` is not an integer", w.text));
        };
        let p = match Prime::new(v) {
            Ok(p) => p,
            Err(e) => return line.err(w.start, e.to_string()),
        };
        if let Some(extra) = line.words.get(2) {
            return line.err(extra.start, "trailing input");
        }
        let p = self.prime_override.unwrap_or(p);
        if let Some(old) = self.sc.prime {
            if old != p {
                return line.err(w.start, format!("prime mismatch: already declared {}", old.value()));
            }
        }
        self.sc.prime = Some(p);
        Ok(())
    }

    fn ring_line(&mut self, line: &Line) -> Result<()> {
        let p = self.prime(line)?;
        let name = line.word(1, "a ring name")?;
        self.declare(line, name, "ring")?;
        let clauses = line.clauses(2, &["vars", "invert", "relations", "normal"])?;
        let mut vars: Option<Vec<String>> = None;
        let mut invert = Vec::new();
        let mut relations = None;
        let mut normal = false;
        for (kw, body, off) in clauses {
            match kw {
                "vars" => vars = Some(self.list(body, off).into_iter().map(|(v, _)| v).collect()),
                "invert" => invert = self.list(body, off),
                "relations" => relations = Some((body, off)),
                "normal" => {
                    if !body.is_empty() {
                        return line.err(off, "trailing input after `normal`");
                    }
                    normal = true;
                }
                _ => unreachable!(),
            }
        }
        let Some(vars) = vars else {
            return line.err(line.end(), "expected `vars`");
        };
        let mut ring = match Ring::with_names(name.text, p, vars) {
            Ok(r) => r,
            Err(e) => return line.err(name.start, e.to_string()),
        };
        for (v, off) in invert {
            ring = match ring.invert(&v) {
                Ok(r) => r,
                Err(e) => return line.err(off, e.to_string()),
            };
        }
        if let Some((body, off)) = relations {
            let mut rels = Vec::new();
            let mut pos = off;
            for part in body.split(';') {
                if !part.trim().is_empty() {
                    let lead = part.len() - part.trim_start().len();
                    rels.push(self.poly(line, part.trim(), pos + lead, ring.var_names())?);
                }
                pos += part.len() + 1;
            }
            ring = match ring.with_relations(rels) {
                Ok(r) => r,
                Err(e) => return line.err(off, e.to_string()),
            };
        }
        self.sc.rings.push(ring.declare_normal(normal).into_arc());
        Ok(())
    }

    fn ring_ref(&self, line: &Line, i: usize) -> Result<Arc<Ring>> {
        let w = line.word(i, "a ring name")?;
        Ok(self.lookup(line, w, "ring", self.sc.ring(w.text))?.clone())
    }

    fn ideal_line(&mut self, line: &Line) -> Result<()> {
        let name = line.word(1, "an ideal name")?;
        self.declare(line, name, "ideal")?;
        line.keyword(2, "on")?;
        let ring = self.ring_ref(line, 3)?;
        let clauses = line.clauses(4, &["gens"])?;
        let Some(&(_, body, off)) = clauses.first() else {
            return line.err(line.end(), "expected `gens`");
        };
        let mut gens = Vec::new();
        for (g, pos) in self.list(body, off) {
            gens.push(self.poly(line, &g, pos, ring.var_names())?);
        }
        let ideal = Ideal::new(ring, gens).or_else(|e| line.err(off, e.to_string()))?;
        self.sc.ideals.push((name.text.to_string(), ideal));
        Ok(())
    }

    fn splitting_line(&mut self, line: &Line) -> Result<()> {
        let name = line.word(1, "a splitting name")?;
        self.declare(line, name, "splitting")?;
        line.keyword(2, "on")?;
        let ring = self.ring_ref(line, 3)?;
        let kw = line.word(4, "`u-form`, `anticanonical` or `extend`")?;
        let kind = match kw.text {
            "u-form" | "uform" | "anticanonical" => {
                let start = line.word(5, "a polynomial")?.start;
                let f = self.poly(line, line.text[start..].trim_end(), start, ring.var_names())?;
                if kw.text == "anticanonical" {
                    SplittingKind::Anticanonical(f)
                } else {
                    SplittingKind::UForm(f)
                }
            }
            "extend" => {
                let phi = line.word(5, "a splitting name")?;
                self.lookup(line, phi, "splitting", self.sc.splitting(phi.text))?;
                line.keyword(6, "along")?;
                let map = line.word(7, "a map name")?;
                self.lookup(line, map, "map", self.sc.map(map.text))?;
                let bound = self.optional_bound(line, 8)?;
                SplittingKind::Extend { phi: phi.text.into(), map: map.text.into(), bound }
            }
            other => return line.err(kw.start, format!("unknown splitting form `{other}`")),
        };
        self.sc.splittings.push(SplittingDecl { name: name.text.into(), ring, kind, line: line.no });
        Ok(())
    }

    fn optional_bound(&self, line: &Line, i: usize) -> Result<Option<usize>> {
        match line.words.get(i) {
            None => Ok(None),
            Some(w) if w.text == "bound" => {
                let v = line.word(i + 1, "a degree bound")?;
                match v.text.parse::<usize>() {
                    Ok(d) if line.words.len() == i + 2 => Ok(Some(d)),
                    Ok(_) => line.err(line.words[i + 2].start, "trailing input"),
                    Err(_) => line.err(v.start, format!("`{}` is not a degree bound", v.text)),
                }
            }
            Some(w) => line.err(w.start, format!("unexpected `{}`", w.text)),
        }
    }

    fn map_line(&mut self, line: &Line) -> Result<()> {
        let name = line.word(1, "a map name")?;
        self.declare(line, name, "map")?;
        line.keyword(2, "from")?;
        let a = self.ring_ref(line, 3)?;
        line.keyword(4, "to")?;
        let b = self.ring_ref(line, 5)?;
        let clauses = line.clauses(6, &["images", "witness", "identity"])?;
        let mut images: Vec<Option<Poly>> = vec![None; a.nvars()];
        let mut witnesses = Vec::new();
        let mut identity = false;
        let mut t_names: Vec<String> = a.var_names().to_vec();
        t_names.push("T".into());
        for (kw, body, off) in clauses {
            match kw {
                "identity" => {
                    if a.var_names() != b.var_names() {
                        return line.err(off, "identity needs rings with the same variables");
                    }
                    identity = true;
                }
                "images" | "witness" => {
                    let sep = if kw == "images" { "->" } else { ":" };
                    let mut pos = off;
                    for part in body.split(';') {
                        let here = pos + part.len() - part.trim_start().len();
                        pos += part.len() + 1;
                        if part.trim().is_empty() {
                            continue;
                        }
                        let Some(k) = part.find(sep) else {
                            return line.err(here, format!("expected `<var> {sep} <poly>`"));
                        };
                        let var = part[..k].trim();
                        let rhs_off = pos - part.len() - 1 + k + sep.len();
                        let rhs = &line.text[rhs_off..rhs_off + part.len() - k - sep.len()];
                        let lead = rhs.len() - rhs.trim_start().len();
                        if kw == "images" {
                            let Ok(i) = a.index_of(var) else {
                                return line.err(here, format!("unknown variable `{var}` of {}", a.name()));
                            };
                            images[i] = Some(self.poly(line, rhs.trim(), rhs_off + lead, b.var_names())?);
                        } else {
                            let Ok(i) = b.index_of(var) else {
                                return line.err(here, format!("unknown variable `{var}` of {}", b.name()));
                            };
                            witnesses.push((i, self.poly(line, rhs.trim(), rhs_off + lead, &t_names)?));
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        let images: Vec<Poly> = if identity {
            (0..a.nvars()).map(|i| b.var_at(i)).collect()
        } else {
            let mut out = Vec::new();
            for (i, img) in images.into_iter().enumerate() {
                match img {
                    Some(f) => out.push(f),
                    None => {
                        return line.err(line.end(), format!("missing image of `{}`", a.var_names()[i]));
                    }
                }
            }
            out
        };
        let map = FiniteRingMap::new(name.text, a, b, images, witnesses);
        self.sc.maps.push((name.text.into(), map));
        Ok(())
    }

    fn square_line(&mut self, line: &Line) -> Result<()> {
        let name = line.word(1, "a square name")?;
        self.declare(line, name, "square")?;
        let mut maps: [String; 4] = Default::default();
        for (k, kw) in ["alpha", "alpha_t", "mu", "nu"].iter().enumerate() {
            line.keyword(2 + 2 * k, kw)?;
            let w = line.word(3 + 2 * k, "a map name")?;
            self.lookup(line, w, "map", self.sc.map(w.text))?;
            maps[k] = w.text.into();
        }
        line.keyword(10, "splittings")?;
        let mut sp: [String; 4] = Default::default();
        for (k, slot) in sp.iter_mut().enumerate() {
            let w = line.word(11 + k, "a splitting name")?;
            self.lookup(line, w, "splitting", self.sc.splitting(w.text))?;
            *slot = w.text.into();
        }
        if let Some(extra) = line.words.get(15) {
            return line.err(extra.start, "trailing input");
        }
        let [alpha, alpha_t, mu, nu] = maps;
        self.sc.squares.push(SquareDecl { name: name.text.into(), alpha, alpha_t, mu, nu, splittings: sp });
        Ok(())
    }

    fn name_of(&self, line: &Line, i: usize, kind: &'static str) -> Result<String> {
        let w = line.word(i, &format!("a {kind} name"))?;
        let known = match kind {
            "splitting" => self.sc.splitting(w.text).is_some(),
            "ideal" => self.sc.ideal(w.text).is_some(),
            "map" => self.sc.map(w.text).is_some(),
            "square" => self.sc.square(w.text).is_some(),
            _ => false,
        };
        if !known {
            return line.err(w.start, format!("unknown {kind} `{}`", w.text));
        }
        Ok(w.text.into())
    }

    fn ideal_list(&self, line: &Line, body: &str, off: usize) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for (n, pos) in self.list(body, off) {
            if self.sc.ideal(&n).is_none() {
                return line.err(pos, format!("unknown ideal `{n}`"));
            }
            out.push(n);
        }
        Ok(out)
    }

    fn task_line(&mut self, line: &Line) -> Result<()> {
        let kw = line.word(1, "a task kind")?;
        let (kind, rest) = match kw.text {
            "check-splitting" => (TaskKind::CheckSplitting { s: self.name_of(line, 2, "splitting")? }, 3),
            "compatible" => (
                TaskKind::Compatible { s: self.name_of(line, 2, "splitting")?, ideal: self.name_of(line, 3, "ideal")? },
                4,
            ),
            "enumerate" => (TaskKind::Enumerate { s: self.name_of(line, 2, "splitting")? }, 3),
            "pullback" | "trace-lab" => {
                let map = self.name_of(line, 2, "map")?;
                let phi = self.name_of(line, 3, "splitting")?;
                let psi = self.name_of(line, 4, "splitting")?;
                if kw.text == "pullback" {
                    (TaskKind::Pullback { map, phi, psi, ideals: None }, 5)
                } else {
                    (TaskKind::TraceLab { map, phi, psi, primes: Vec::new(), samples: 200 }, 5)
                }
            }
            "conductor" => {
                let map = self.name_of(line, 2, "map")?;
                match line.words.get(3) {
                    Some(w) if w.text != "expect" => {
                        (TaskKind::Conductor { map, s: Some(self.name_of(line, 3, "splitting")?) }, 4)
                    }
                    _ => (TaskKind::Conductor { map, s: None }, 3),
                }
            }
            "restrict" => (TaskKind::Restrict { s: self.name_of(line, 2, "splitting")?, kill: Vec::new() }, 3),
            "extend" => (
                TaskKind::Extend {
                    map: self.name_of(line, 2, "map")?,
                    phi: self.name_of(line, 3, "splitting")?,
                    bound: None,
                },
                4,
            ),
            "route" => (TaskKind::Route { square: self.name_of(line, 2, "square")?, ideals: None }, 3),
            other => return line.err(kw.start, format!("unknown task `{other}`")),
        };
        let mut kind = kind;
        let mut expect = None;
        let allowed: &[&str] = match &kind {
            TaskKind::Pullback { .. } | TaskKind::Route { .. } => &["ideals", "expect"],
            TaskKind::TraceLab { .. } => &["primes", "samples", "expect"],
            TaskKind::Restrict { .. } => &["kill", "expect"],
            TaskKind::Extend { .. } => &["bound", "expect"],
            _ => &["expect"],
        };
        for (k, body, off) in line.clauses(rest, allowed)? {
            match (k, &mut kind) {
                ("expect", _) => {
                    if body.is_empty() {
                        return line.err(off, "expected a value after `expect`");
                    }
                    expect = Some(body.to_string());
                }
                ("ideals", TaskKind::Pullback { ideals, .. }) | ("ideals", TaskKind::Route { ideals, .. }) => {
                    *ideals = Some(self.ideal_list(line, body, off)?);
                }
                ("primes", TaskKind::TraceLab { primes, .. }) => *primes = self.ideal_list(line, body, off)?,
                ("samples", TaskKind::TraceLab { samples, .. }) => match body.parse() {
                    Ok(n) => *samples = n,
                    Err(_) => return line.err(off, format!("`{body}` is not a sample count")),
                },
                ("bound", TaskKind::Extend { bound, .. }) => match body.parse() {
                    Ok(n) => *bound = Some(n),
                    Err(_) => return line.err(off, format!("`{body}` is not a degree bound")),
                },
                ("kill", TaskKind::Restrict { s, kill }) => {
                    let ring = &self.sc.splitting(s).unwrap().ring;
                    for (v, pos) in self.list(body, off) {
                        if ring.index_of(&v).is_err() {
                            return line.err(pos, format!("unknown variable `{v}` of {}", ring.name()));
                        }
                        kill.push(v);
                    }
                }
                _ => unreachable!(),
            }
        }
        if let TaskKind::Restrict { kill, .. } = &kind {
            if kill.is_empty() {
                return line.err(line.end(), "expected `kill <vars>`");
            }
        }
        self.sc.tasks.push(Task { kind, expect, line: line.no });
        Ok(())
    }
}

/// Parse a scenario; `prime_override` replaces the declared prime.
pub fn parse_scenario(text: &str, prime_override: Option<u64>) -> Result<Scenario> {
    let prime_override = prime_override.map(Prime::new).transpose()?;
    let mut parser = Parser { prime_override, sc: Scenario::default(), names: HashMap::new() };
    for (i, raw) in text.lines().enumerate() {
        let body = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        let line = Line::new(i + 1, body);
        parser.line(&line)?;
    }
    Ok(parser.sc)
}
