#![allow(dead_code)]

use std::collections::BTreeMap;

use egeom::cli::report_from_args;
use egeom::report::ExperimentReport;

/// One pinned invocation of the binary per command.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("gme", &["gme", "--state", "w:3", "--seed", "7"]),
    ("net-bound", &["net-bound", "--state", "ghz:3", "--epsilon", "0.2"]),
    ("haar-tail", &["haar-tail", "--d", "4", "--eps", "0.2", "--samples", "20000", "--seed", "3"]),
    ("haar-gme", &["haar-gme", "--n", "3", "--samples", "6", "--seed", "5"]),
    ("theorem2-threshold", &["theorem2-threshold", "--n", "11", "--n-max", "16"]),
    ("cq", &["cq", "--n", "5", "--k", "2", "--samples", "2", "--max-subsets", "4", "--seed", "2"]),
    ("corr-bound", &["corr-bound", "--c", "2", "--p", "1.5", "--eps", "0.01"]),
    (
        "mbqc-enumerate",
        &["mbqc", "enumerate", "--state", "ghz:4", "--strategy", "adaptive-parity", "--verifier", "all-equal"],
    ),
    ("mbqc-coinflip", &["mbqc", "coinflip", "--n", "8", "--delta", "2", "--runs", "300", "--seed", "11"]),
    ("graph-bounds", &["graph", "bounds", "--family", "cycle:5"]),
    ("graph-corpus", &["graph", "corpus", "--max-vertices", "5"]),
    ("mera", &["mera", "--k", "2", "--d", "3", "--seed", "1"]),
];

/// Runs the command line `args` on `threads` workers.
pub fn run_cli(args: &[&str], threads: usize) -> ExperimentReport {
    let threads = threads.to_string();
    let argv = args.iter().copied().chain(["--threads", threads.as_str()]);
    report_from_args(argv).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

pub fn frozen_hashes() -> BTreeMap<String, String> {
    serde_json::from_str(include_str!("../golden/hashes.json")).expect("golden hashes parse")
}

/// Outcome of one golden case: hashes at 1 and 8 threads.
pub struct GoldenRun {
    pub name: &'static str,
    pub single: String,
    pub multi: String,
}

pub fn run_golden_cases() -> Vec<GoldenRun> {
    GOLDEN_CASES
        .iter()
        .map(|&(name, args)| GoldenRun {
            name,
            single: run_cli(args, 1).comparison_hash,
            multi: run_cli(args, 8).comparison_hash,
        })
        .collect()
}
