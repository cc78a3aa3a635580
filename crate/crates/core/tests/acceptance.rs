//! Acceptance criteria, one pass/fail line each.
//!
//! Every comparison is exact (polynomials and ideals over F_p); there are
//! no floating-point tolerances anywhere in the suite.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use frobsplit::cartier::restricted_monomials;
use frobsplit::enumerate::{enumerate_compatible, EnumConfig};
use frobsplit::experiment::{normalization_route, Square, SquareSplittings};
use frobsplit::field::Prime;
use frobsplit::ideal::Ideal;
use frobsplit::maps::{ConductorTag, Extension, FiniteRingMap};
use frobsplit::paper::SCENARIOS;
use frobsplit::parse::parse_poly;
use frobsplit::poly::{Monomial, Poly};
use frobsplit::ring::Ring;
use frobsplit::runner::{run, RunConfig, Status, DEFAULT_SEED};
use frobsplit::scenario::parse_scenario;
use frobsplit::splitting::{is_splitting, Splitting};
use frobsplit::trace::{trace_lemma_suite, TraceContext};
use frobsplit::univariate::UPoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn parse(r: &Ring, s: &str) -> Poly {
    parse_poly(s, r.var_names(), r.prime()).unwrap()
}

fn surface_ring(p: u64) -> Arc<Ring> {
    Ring::free("X", Prime::new(p).unwrap(), &["u", "v", "w"]).into_arc()
}

const F: &str = "u*v*w - v^2 - w^2";

fn surface(p: u64) -> Splitting {
    let r = surface_ring(p);
    let f = parse(&r, F);
    Splitting::from_anticanonical(r, f).unwrap()
}

fn wild_map(p: u64) -> FiniteRingMap {
    let pr = Prime::new(p).unwrap();
    let a = Ring::free("A", pr, &["w"]).declare_normal(true).into_arc();
    let b = Ring::free("B", pr, &["x"]).invert("x").unwrap().declare_normal(true).into_arc();
    let names: Vec<String> = vec!["w".into(), "T".into()];
    let wit = parse_poly("T^2 - w*T + 1", &names, pr).unwrap();
    FiniteRingMap::new("alpha", a, b.clone(), vec![parse(&b, "x + x_inv")], vec![(0, wit)]).unwrap()
}

fn wild_splittings(map: &FiniteRingMap) -> (Splitting, Splitting) {
    let a = map.source().clone();
    let b = map.target().clone();
    let p = a.p();
    if p == 2 {
        let phi = Splitting::new(a.clone(), parse(&a, "w + w^2")).unwrap();
        let psi = Splitting::from_anticanonical(b.clone(), parse(&b, "1 + x + x^2")).unwrap();
        (phi, psi)
    } else {
        let phi = Splitting::new(a.clone(), parse(&a, &format!("(w^2 - 4)^{}", (p - 1) / 2))).unwrap();
        let psi = Splitting::from_anticanonical(b.clone(), parse(&b, "x")).unwrap();
        (phi, psi)
    }
}

fn normalization(p: u64) -> (FiniteRingMap, Splitting, Splitting) {
    let pr = Prime::new(p).unwrap();
    let a = Ring::free("H", pr, &["u", "v", "w"]);
    let f = parse(&a, F);
    let a = a.with_relations(vec![f.clone()]).unwrap().into_arc();
    let b = Ring::free("Ht", pr, &["w", "x"]).invert("x").unwrap().declare_normal(true).into_arc();
    let names: Vec<String> = ["u", "v", "w", "T"].iter().map(|s| s.to_string()).collect();
    let wit = parse_poly("T^2 - u*T + 1", &names, pr).unwrap();
    let images = vec![parse(&b, "x + x_inv"), parse(&b, "w*x"), parse(&b, "w")];
    let mu = FiniteRingMap::new("mu", a.clone(), b.clone(), images, vec![(1, wit)]).unwrap();
    let phi = Splitting::new(a, f.pow(p - 1)).unwrap();
    let psi = Splitting::from_anticanonical(b.clone(), parse(&b, "w*x")).unwrap();
    (mu, phi, psi)
}

fn ideal(r: &Arc<Ring>, gens: &[&str]) -> Ideal {
    Ideal::new(r.clone(), gens.iter().map(|g| parse(r, g)).collect()).unwrap()
}

fn strings(v: &[Ideal]) -> Vec<String> {
    v.iter().map(|i| i.canonical_string()).collect()
}

fn c1_splitting_validity() -> Check {
    for p in [2u64, 3, 5, 7, 13] {
        let r = surface_ring(p);
        let u = parse(&r, F).pow(p - 1);
        let v = is_splitting(&r, &u).map_err(|e| e.to_string())?;
        ensure(v.is_splitting(), || format!("p={p}: verdict {}", v.label()))?;
    }
    Ok("f^(p-1) is a splitting for p in {2,3,5,7,13}".into())
}

fn c2_wild_values() -> Check {
    let map = wild_map(2);
    let (phi, psi) = wild_splittings(&map);
    let b = map.target().clone();
    let x = parse(&b, "x");
    let x1 = parse(&b, "x + 1");
    ensure(psi.apply(&x).unwrap() == x1, || "psi(x) != x + 1".into())?;
    ensure(psi.apply(&x1).unwrap() == x, || "psi(x + 1) != x".into())?;
    match map.extend_splitting(&phi, 4).map_err(|e| e.to_string())? {
        Extension::Unique(ext) => ensure(ext.apply(&x).unwrap() == x1, || "extension: psi(x) != x + 1".into())?,
        other => return Err(format!("extension not unique: {other:?}")),
    }
    let v = ideal(map.source(), &["w"]);
    let pre = map.preimage_reduced(&v).map_err(|e| e.to_string())?;
    ensure(pre == ideal(&b, &["x - 1", "x_inv - 1"]), || format!("preimage {pre}"))?;
    ensure(pre.dimension() == Some(0), || "preimage is not a point".into())?;
    let c = psi.is_compatible(&pre).map_err(|e| e.to_string())?;
    ensure(!c.compatible, || "preimage reported compatible".into())?;
    let (g, m, val) = c.certificate.ok_or("no certificate")?;
    let arg = b.normal_form(&g.mul_monomial(&m, 1));
    ensure(arg == x1 && val == x, || format!("certificate phi({}) = {}", b.fmt_poly(&arg), b.fmt_poly(&val)))?;
    Ok("psi(x)=x+1, psi(x+1)=x, preimage x=1, certificate phi(x+1)=x".into())
}

fn c3_enumeration() -> Check {
    let cfg = EnumConfig::default();
    let mut detail = Vec::new();
    for p in [2u64, 3, 5, 7] {
        let phi = surface(p);
        let r = phi.ring().clone();
        let mut want = vec![Ideal::zero(r.clone()), ideal(&r, &[F]), ideal(&r, &["v", "w"])];
        if p == 2 {
            want.push(ideal(&r, &["u", "v", "w"]));
        }
        let got = enumerate_compatible(&phi, &cfg).map_err(|e| e.to_string())?.members;
        let same = got.len() == want.len() && want.iter().all(|w| got.contains(w));
        ensure(same, || format!("p={p}: {:?}", strings(&got)))?;
        detail.push(format!("p={p}:{}", got.len()));
    }
    Ok(format!("exact lists ({})", detail.join(" ")))
}

fn c4_restriction() -> Check {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let phi = surface(p);
        let v = phi.ring().index_of("v").unwrap();
        let w = phi.ring().index_of("w").unwrap();
        let res = phi.restrict_to_coordinate_subspace(&[v, w]).map_err(|e| e.to_string())?;
        let rr = res.ring().clone();
        let want = if p == 2 { parse(&rr, "u") } else { parse(&rr, "u^2 - 4").pow((p - 1) / 2) };
        ensure(*res.u() == want, || format!("p={p}: got {}", rr.fmt_poly(res.u())))?;
    }
    Ok("u at p=2, (u^2-4)^((p-1)/2) for p in {3,5,7,11,13}".into())
}

fn c5_split_points() -> Check {
    for p in [2u64, 3, 5, 7] {
        let phi = surface(p);
        let r = phi.ring();
        let kill = [r.index_of("v").unwrap(), r.index_of("w").unwrap()];
        let res = phi.restrict_to_coordinate_subspace(&kill).map_err(|e| e.to_string())?;
        let pts = res.split_points_univariate(4).map_err(|e| e.to_string())?;
        let empty: Vec<UPoly> = Vec::new();
        if p == 2 {
            ensure(pts.rational == vec![0] && pts.extension == empty, || format!("p=2: {pts}"))?;
        } else {
            ensure(pts.rational.is_empty() && pts.extension == empty, || format!("p={p}: {pts}"))?;
        }
    }
    Ok("{u=0} at p=2, {} at p in {3,5,7}".into())
}

fn c6_trace_suite() -> Check {
    let mut detail = Vec::new();
    for p in [2u64, 3, 5] {
        let map = wild_map(p);
        let (phi, psi) = wild_splittings(&map);
        let ctx = TraceContext::new(&map).map_err(|e| e.to_string())?;
        let mut primes = vec![ideal(map.source(), &["w"])];
        if p != 2 {
            primes.push(ideal(map.source(), &["w - 2"]));
        }
        let r = trace_lemma_suite(&ctx, &phi, &psi, &[], &primes, 200, DEFAULT_SEED).map_err(|e| e.to_string())?;
        ensure(r.ok(), || format!("wild p={p}: {r}"))?;
        ensure(r.frobenius.passed >= 200, || format!("wild p={p}: too few samples"))?;
        detail.push(format!("wild@{p} {}/{}/{}", r.frobenius.passed, r.key.passed, r.containment.passed));

        let (mu, phi, psi) = normalization(p);
        let ctx = TraceContext::new(&mu).map_err(|e| e.to_string())?;
        let l = ideal(mu.source(), &["v", "w"]);
        let r = trace_lemma_suite(&ctx, &phi, &psi, &[], &[l], 200, DEFAULT_SEED).map_err(|e| e.to_string())?;
        ensure(r.ok(), || format!("normalization p={p}: {r}"))?;
        detail.push(format!("mu@{p} {}/{}/{}", r.frobenius.passed, r.key.passed, r.containment.passed));
    }
    Ok(format!("frobenius/key/containment passes: {}", detail.join(", ")))
}

fn c7_main_case() -> Check {
    let cfg = RunConfig::default();
    let mut regime_rows = 0;
    let mut scenarios = 0;
    for (name, text) in SCENARIOS {
        let sc = parse_scenario(text, None).map_err(|e| format!("{name}: {e}"))?;
        let report = run(&sc, name, &cfg);
        for res in report.results.iter().filter(|r| r.kind == "pullback") {
            ensure(res.status == Status::Pass, || format!("{name}: {:?}", res.message))?;
            let head = &res.lines[0];
            if head[5] == "yes" {
                scenarios += 1;
                ensure(head[7] == "0", || format!("{name}: {} failing rows", head[7]))?;
                regime_rows += res.lines.len() - 1;
                ensure(
                    res.lines.iter().all(|l| !l.iter().any(|f| f == "THEOREM-VIOLATION")),
                    || format!("{name}: THEOREM-VIOLATION"),
                )?;
            }
        }
    }
    ensure(scenarios >= 3, || format!("only {scenarios} scenarios in the p > deg regime"))?;
    Ok(format!("{scenarios} pullback tasks with p > deg and normal rings, {regime_rows} rows, 0 failing"))
}

fn random_poly(r: &Ring, rng: &mut ChaCha8Rng, terms: usize, degree: u32) -> Poly {
    let n = r.nvars();
    let mut f = r.zero();
    for _ in 0..terms {
        let mut e = vec![0u32; n];
        for _ in 0..rng.gen_range(0..=degree) {
            e[rng.gen_range(0..n)] += 1;
        }
        f.add_term(Monomial::new(e), rng.gen_range(1..r.p()));
    }
    f
}

/// `phi(J) ⊆ J` checked directly on the A^p-module generators `m g`.
fn brute_force(phi: &Splitting, j: &Ideal) -> bool {
    let r = phi.ring();
    let mons = restricted_monomials(r.nvars(), r.p() as u32);
    j.gens().iter().all(|g| mons.iter().all(|m| j.contains(&phi.apply(&g.mul_monomial(m, 1)).unwrap())))
}

fn c8_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let names = ["x", "y", "z"];
    let (mut yes, mut no, mut done, mut attempts) = (0, 0, 0, 0);
    while done < 100 {
        attempts += 1;
        ensure(attempts < 10_000, || "could not build instances".into())?;
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let n = rng.gen_range(1..=3);
        let r = Ring::free("R", Prime::new(p).unwrap(), &names[..n]).into_arc();
        // u = (h * x_1...x_n)^(p-1) plus noise of bounded degree
        let h = random_poly(&r, &mut rng, 2, 1);
        let h = if h.is_zero() { r.one() } else { h };
        let mut all = h.clone();
        for i in 0..n {
            if rng.gen_bool(0.7) {
                all = &all * &r.var_at(i);
            }
        }
        let mut u = all.pow(p - 1);
        if rng.gen_bool(0.3) {
            u = &u + &random_poly(&r, &mut rng, 2, (p as u32 - 1) * n as u32);
        }
        let Ok(phi) = Splitting::near(r.clone(), u) else { continue };
        let j = match rng.gen_range(0..4) {
            0 => {
                let k = rng.gen_range(1..=n);
                let vars: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
                Ideal::of_vars(r.clone(), &vars)
            }
            1 => Ideal::new(r.clone(), vec![h.clone()]).unwrap(),
            2 => Ideal::new(r.clone(), vec![random_poly(&r, &mut rng, 2, 2)]).unwrap(),
            _ => Ideal::new(r.clone(), vec![random_poly(&r, &mut rng, 2, 2), random_poly(&r, &mut rng, 1, 2)]).unwrap(),
        };
        let fast = phi.is_compatible(&j).map_err(|e| e.to_string())?.compatible;
        let slow = brute_force(&phi, &j);
        ensure(fast == slow, || format!("disagreement on u = {} J = {}", r.fmt_poly(phi.u()), j))?;
        if fast {
            yes += 1;
        } else {
            no += 1;
        }
        done += 1;
    }
    Ok(format!("100/100 agree ({yes} compatible, {no} not)"))
}

fn c9_conductor() -> Check {
    for p in [2u64, 3, 5] {
        let (mu, phi, _) = normalization(p);
        let c = mu.conductor().map_err(|e| e.to_string())?;
        ensure(c.tag == ConductorTag::Verified, || format!("p={p}: unverified"))?;
        let want = ideal(mu.source(), &["v", "w"]);
        ensure(c.ideal == want, || format!("p={p}: conductor {}", c.ideal))?;
        ensure(phi.is_compatible(&c.ideal).unwrap().compatible, || format!("p={p}: not compatible"))?;
    }
    Ok("(v, w) verified and compatible for p in {2,3,5}".into())
}

fn c10_route() -> Check {
    let (mu, phi, psi) = normalization(2);
    let a = mu.source().clone();
    let b = mu.target().clone();
    let id = |r: &Arc<Ring>| {
        let images = (0..r.nvars()).map(|i| r.var_at(i)).collect();
        FiniteRingMap::new("id", r.clone(), r.clone(), images, vec![]).unwrap()
    };
    let sq = Square::new(id(&a), id(&b), mu.clone(), mu).map_err(|e| e.to_string())?;
    let sp = SquareSplittings { x: phi.clone(), y: phi.clone(), xt: psi.clone(), yt: psi };
    let r = normalization_route(&sq, &sp, None, &EnumConfig::default()).map_err(|e| e.to_string())?;
    let h = Ideal::zero(a.clone());
    let l = ideal(&a, &["v", "w"]);
    ensure(r.images.contains(&h) && r.images.contains(&l), || format!("images {:?}", strings(&r.images)))?;
    for i in &r.images {
        ensure(phi.is_compatible(i).unwrap().compatible, || format!("image {i} not compatible"))?;
    }
    ensure(r.missed.len() == 1, || format!("missed {}", r.missed.len()))?;
    let (origin, pre) = &r.missed[0];
    ensure(*origin == ideal(&a, &["u", "v", "w"]), || format!("missed {origin}"))?;
    ensure(*pre == ideal(&b, &["w", "x + 1"]), || format!("preimage {pre}"))?;
    ensure(!sp.xt.is_compatible(pre).unwrap().compatible, || "preimage reported compatible".into())?;
    Ok("images {H, L} compatible; origin missed, preimage (w, x+1) not compatible".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("splitting validity", c1_splitting_validity),
        ("wild example values", c2_wild_values),
        ("enumeration golden lists", c3_enumeration),
        ("restriction closed form", c4_restriction),
        ("split points", c5_split_points),
        ("trace lemma suite", c6_trace_suite),
        ("p > deg pullback property", c7_main_case),
        ("compatibility oracle equivalence", c8_oracle),
        ("conductor", c9_conductor),
        ("normalization route diagnostic", c10_route),
    ];
    println!("acceptance: exact arithmetic over F_p, tolerance 0");
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({secs:.2}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {detail} ({secs:.2}s)", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
