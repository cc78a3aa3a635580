//! Bundled reproductions with golden expectations.

use crate::runner::{run, Report, RunConfig, Status, TaskResult};
use crate::scenario::parse_scenario;

/// Bundled scenario files by name.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("identity.fsp", include_str!("../scenarios/identity.fsp")),
    ("wild.fsp", include_str!("../scenarios/wild.fsp")),
    ("wild_lab.fsp", include_str!("../scenarios/wild_lab.fsp")),
    ("wild_p3.fsp", include_str!("../scenarios/wild_p3.fsp")),
    ("wild_p5.fsp", include_str!("../scenarios/wild_p5.fsp")),
    ("wild_p7.fsp", include_str!("../scenarios/wild_p7.fsp")),
    ("hsurface_p2.fsp", include_str!("../scenarios/hsurface_p2.fsp")),
    ("hsurface_p3.fsp", include_str!("../scenarios/hsurface_p3.fsp")),
    ("hsurface_p5.fsp", include_str!("../scenarios/hsurface_p5.fsp")),
    ("hsurface_p7.fsp", include_str!("../scenarios/hsurface_p7.fsp")),
    ("hrestrict.fsp", include_str!("../scenarios/hrestrict.fsp")),
    ("hsquare_p2.fsp", include_str!("../scenarios/hsquare_p2.fsp")),
    ("hsquare_p3.fsp", include_str!("../scenarios/hsquare_p3.fsp")),
    ("hsquare_p5.fsp", include_str!("../scenarios/hsquare_p5.fsp")),
];

pub fn scenario_text(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Blocks run by `paper_examples`: a bundled file and an optional prime
/// override.
const BLOCKS: &[(&str, Option<u64>)] = &[
    ("identity.fsp", None),
    ("wild.fsp", None),
    ("wild_lab.fsp", None),
    ("wild_p3.fsp", None),
    ("wild_p5.fsp", None),
    ("wild_p7.fsp", None),
    ("hsurface_p2.fsp", None),
    ("hsurface_p3.fsp", None),
    ("hsurface_p5.fsp", None),
    ("hsurface_p7.fsp", None),
    ("hrestrict.fsp", Some(11)),
    ("hrestrict.fsp", Some(13)),
    ("hsquare_p2.fsp", None),
    ("hsquare_p3.fsp", None),
    ("hsquare_p5.fsp", None),
];

pub fn paper_examples() -> Report {
    let cfg = RunConfig::default();
    let mut results: Vec<TaskResult> = Vec::new();
    for (name, prime) in BLOCKS {
        let title = match prime {
            Some(p) => format!("{name}@{p}"),
            None => name.to_string(),
        };
        let text = scenario_text(name).expect("bundled scenario");
        let sc = match parse_scenario(text, *prime) {
            Ok(sc) => sc,
            Err(e) => {
                results.push(TaskResult {
                    index: 0,
                    kind: "parse",
                    line: 0,
                    lines: vec![vec!["BLOCK".into(), title]],
                    status: Status::Fail,
                    message: Some(e.to_string()),
                });
                continue;
            }
        };
        let report = run(&sc, &title, &cfg);
        for (k, mut r) in report.results.into_iter().enumerate() {
            if k == 0 {
                r.lines.insert(0, vec!["BLOCK".into(), title.clone()]);
            }
            results.push(r);
        }
    }
    for (i, r) in results.iter_mut().enumerate() {
        r.index = i + 1;
    }
    Report { title: "paper-examples".into(), prime: None, results }
}
