//! Adaptive single-site measurement strategies on a resource state, exact
//! enumeration of their outcome trees, and the classical coin-flip substitute.
//!
//! A strategy is a deterministic function from the outcome history to the
//! next (site, two-outcome basis) or to a halt with output bytes. Outcomes are
//! recorded as bits, so resources are qubit states.

mod strategies;
mod verifiers;

pub use strategies::{parse_strategy, AdaptiveParity, RandomAdaptive, Readout};
pub use verifiers::{
    parse_verifier, AcceptAll, AcceptExact, AcceptNone, AllEqual, Factoring, HashedDensity,
    PlantedPrefix, StepMeter, SubsetSum,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gme::EntanglementInterval;
use crate::seed::{derive_seed, rng_from_seed};
use crate::state::{measure_local, StateVector, C64};
use crate::{Error, Result};

/// Largest resource the exact enumerator accepts.
pub const MAX_ENUMERATION_SITES: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    /// Measure `site` (an index into the original resource) in `basis`; bit
    /// `k` is recorded when the outcome is `basis[k]`.
    Measure { site: usize, basis: [Vec<C64>; 2] },
    Halt(Vec<u8>),
}

pub trait Strategy: Sync {
    fn name(&self) -> String;
    fn decide(&self, num_sites: usize, history: &[u8]) -> Action;
}

pub trait Verifier: Sync {
    fn name(&self) -> String;
    /// Step allowance for one check of an `output_len`-byte candidate.
    fn cost_budget(&self, output_len: usize) -> u64;
    fn check(&self, output: &[u8], meter: &mut StepMeter) -> Result<bool>;

    /// Runs [`Verifier::check`] under a fresh meter.
    fn verify(&self, output: &[u8]) -> Result<bool> {
        let mut meter = StepMeter::new(self.cost_budget(output.len()));
        self.check(output, &mut meter)
    }
}

pub fn history_string(history: &[u8]) -> String {
    history.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

/// One leaf of the outcome tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub history: String,
    pub probability: f64,
    pub output: String,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSetReport {
    pub n: usize,
    /// Number of full `n`-bit outcome strings whose leaf verifies.
    pub good_count: u64,
    pub prob_quantum_g: f64,
    /// `good_count / 2^n`.
    pub prob_coin_g: f64,
    /// Sum of all leaf probabilities.
    pub total_probability: f64,
    /// Sorted by history.
    pub records: Vec<BranchRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationOptions {
    /// Visit outcome 1 before outcome 0.
    pub reverse_outcomes: bool,
}

/// Enumerates every outcome history of `strategy` on `psi` with exact Born
/// probabilities. Zero-probability branches are followed classically and
/// recorded with probability 0.
pub fn run_strategy_exact(psi: &StateVector, strategy: &dyn Strategy, verifier: &dyn Verifier) -> Result<GoodSetReport> {
    run_strategy_exact_with(psi, strategy, verifier, EnumerationOptions::default())
}

pub fn run_strategy_exact_with(
    psi: &StateVector,
    strategy: &dyn Strategy,
    verifier: &dyn Verifier,
    opts: EnumerationOptions,
) -> Result<GoodSetReport> {
    let n = psi.num_sites();
    if psi.local_dim() != 2 {
        return Err(Error::invalid("state", "two-outcome strategies need qubit resources"));
    }
    if n > MAX_ENUMERATION_SITES {
        return Err(Error::invalid("state", format!("enumeration supports at most {MAX_ENUMERATION_SITES} sites")));
    }
    let ctx = Walk { n, strategy, verifier, opts };
    let root = Node {
        state: Some(psi.clone()),
        remaining: (0..n).collect(),
        probability: 1.0,
        history: Vec::new(),
    };
    let mut records = ctx.visit(root, true)?;
    records.sort_by(|a, b| a.history.cmp(&b.history));

    let mut good_count = 0u64;
    let mut prob_quantum = 0.0;
    let mut total = 0.0;
    for r in &records {
        total += r.probability;
        if r.verified {
            good_count += 1u64 << (n - r.history.len());
            prob_quantum += r.probability;
        }
    }
    Ok(GoodSetReport {
        n,
        good_count,
        prob_quantum_g: prob_quantum,
        prob_coin_g: good_count as f64 / (1u64 << n) as f64,
        total_probability: total,
        records,
    })
}

struct Node {
    state: Option<StateVector>,
    /// Original labels of the unmeasured sites, in state order.
    remaining: Vec<usize>,
    probability: f64,
    history: Vec<u8>,
}

struct Walk<'a> {
    n: usize,
    strategy: &'a dyn Strategy,
    verifier: &'a dyn Verifier,
    opts: EnumerationOptions,
}

impl Walk<'_> {
    fn violation(&self, history: &[u8], reason: impl Into<String>) -> Error {
        Error::Strategy {
            history: history_string(history),
            reason: reason.into(),
        }
    }

    fn visit(&self, node: Node, top: bool) -> Result<Vec<BranchRecord>> {
        let (site, basis) = match self.strategy.decide(self.n, &node.history) {
            Action::Halt(output) => {
                let verified = self.verifier.verify(&output)?;
                return Ok(vec![BranchRecord {
                    history: history_string(&node.history),
                    probability: node.probability,
                    output: String::from_utf8_lossy(&output).into_owned(),
                    verified,
                }]);
            }
            Action::Measure { site, basis } => (site, basis),
        };
        if site >= self.n {
            return Err(self.violation(&node.history, format!("site {site} out of range")));
        }
        let Some(pos) = node.remaining.iter().position(|&s| s == site) else {
            return Err(self.violation(&node.history, format!("site {site} measured twice")));
        };
        let mut rest = node.remaining.clone();
        rest.remove(pos);

        let branches = match &node.state {
            Some(state) => measure_local(state, pos, &basis)
                .map_err(|e| self.violation(&node.history, e.to_string()))?
                .into_iter()
                .map(|b| (b.probability, b.state))
                .collect(),
            None => {
                crate::state::check_basis(&basis, 2).map_err(|e| self.violation(&node.history, e.to_string()))?;
                vec![(0.0, None), (0.0, None)]
            }
        };
        let mut children: Vec<Node> = branches
            .into_iter()
            .enumerate()
            .map(|(k, (p, state))| {
                let mut history = node.history.clone();
                history.push(k as u8);
                Node {
                    state,
                    remaining: rest.clone(),
                    probability: node.probability * p,
                    history,
                }
            })
            .collect();
        if self.opts.reverse_outcomes {
            children.reverse();
        }
        let parts: Vec<Result<Vec<BranchRecord>>> = if top {
            children.into_par_iter().map(|c| self.visit(c, false)).collect()
        } else {
            children.into_iter().map(|c| self.visit(c, false)).collect()
        };
        let mut out = Vec::new();
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }
}

/// `ceil(2^(delta+1) ln(1/p_f))`.
pub fn coinflip_trials(delta: f64, p_f: f64) -> Result<u64> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta", "must be a non-negative number"));
    }
    if !(p_f > 0.0 && p_f < 1.0) {
        return Err(Error::invalid("pf", "must lie in (0, 1)"));
    }
    Ok((2f64.powf(delta + 1.0) * (1.0 / p_f).ln()).ceil() as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinflipOutcome {
    pub success: bool,
    pub solution: Option<String>,
    /// Index of the first verified trial plus one, or `k` on failure.
    pub trials_used: u64,
    pub k: u64,
}

/// Plays `strategy` with fair coins in place of measurement outcomes, up to
/// `k` times, stopping at the first verified output. Trials run in parallel
/// with per-trial seeds; the lowest verified index wins.
pub fn coinflip_solve(
    num_sites: usize,
    strategy: &dyn Strategy,
    verifier: &dyn Verifier,
    delta: f64,
    p_f: f64,
    seed: u64,
) -> Result<CoinflipOutcome> {
    let k = coinflip_trials(delta, p_f)?;
    let trials = (0..k)
        .into_par_iter()
        .map(|i| {
            let output = coin_trial(num_sites, strategy, derive_seed(seed, i))?;
            Ok(verifier.verify(&output)?.then_some(output))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(match trials.into_iter().enumerate().find_map(|(i, t)| t.map(|o| (i, o))) {
        Some((i, output)) => CoinflipOutcome {
            success: true,
            solution: Some(String::from_utf8_lossy(&output).into_owned()),
            trials_used: i as u64 + 1,
            k,
        },
        None => CoinflipOutcome {
            success: false,
            solution: None,
            trials_used: k,
            k,
        },
    })
}

fn coin_trial(num_sites: usize, strategy: &dyn Strategy, seed: u64) -> Result<Vec<u8>> {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    let mut history = Vec::new();
    let mut measured = Vec::new();
    loop {
        match strategy.decide(num_sites, &history) {
            Action::Halt(output) => return Ok(output),
            Action::Measure { site, .. } => {
                if site >= num_sites || measured.contains(&site) {
                    return Err(Error::Strategy {
                        history: history_string(&history),
                        reason: format!("invalid site {site}"),
                    });
                }
                measured.push(site);
                history.push(rng.random_range(0..2u8));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinflipFailureRate {
    pub runs: u64,
    pub failures: u64,
    pub failure_rate: f64,
    pub k: u64,
    pub p_f: f64,
    /// `sqrt(p_f (1 - p_f) / runs)`.
    pub sigma: f64,
    pub within_bound: bool,
}

/// Repeats [`coinflip_solve`] `runs` times and compares the failure rate to `p_f + 3 sigma`.
pub fn coinflip_failure_rate(
    num_sites: usize,
    strategy: &dyn Strategy,
    verifier: &dyn Verifier,
    delta: f64,
    p_f: f64,
    runs: u64,
    seed: u64,
) -> Result<CoinflipFailureRate> {
    let k = coinflip_trials(delta, p_f)?;
    let failures = (0..runs)
        .into_par_iter()
        .map(|r| {
            coinflip_solve(num_sites, strategy, verifier, delta, p_f, derive_seed(seed, r))
                .map(|o| u64::from(!o.success))
        })
        .sum::<Result<u64>>()?;
    let rate = failures as f64 / runs as f64;
    let sigma = (p_f * (1.0 - p_f) / runs as f64).sqrt();
    Ok(CoinflipFailureRate {
        runs,
        failures,
        failure_rate: rate,
        k,
        p_f,
        sigma,
        within_bound: rate <= p_f + 3.0 * sigma,
    })
}

/// Margins of the counting inequalities for one strategy run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Record {
    pub n: usize,
    /// Certified lower bound on the resource's geometric measure.
    pub lower: f64,
    /// Largest `p_leaf / 2^(n - depth - lower)` over all leaves; at most 1.
    pub max_branch_ratio: f64,
    pub branch_violations: usize,
    pub prob_quantum_g: f64,
    pub prob_coin_g: f64,
    /// `prob_coin_g - prob_quantum_g * 2^(lower - n)`; never negative.
    pub counting_margin: f64,
    pub falsified: bool,
}

/// Checks that every leaf of depth `t` has probability at most
/// `2^(n - t - L)` and that `prob_coin(G) >= prob_quantum(G) 2^(L - n)`,
/// where `L` is the certified lower bound from `gme`.
pub fn theorem1_check(
    psi: &StateVector,
    strategy: &dyn Strategy,
    verifier: &dyn Verifier,
    gme: &EntanglementInterval,
) -> Result<Theorem1Record> {
    theorem1_check_with_lower(psi, strategy, verifier, gme.certified_lower())
}

pub fn theorem1_check_with_lower(
    psi: &StateVector,
    strategy: &dyn Strategy,
    verifier: &dyn Verifier,
    lower: f64,
) -> Result<Theorem1Record> {
    let report = run_strategy_exact(psi, strategy, verifier)?;
    Ok(theorem1_record(&report, lower))
}

pub fn theorem1_record(report: &GoodSetReport, lower: f64) -> Theorem1Record {
    const SLACK: f64 = 1e-9;
    let n = report.n;
    let mut max_ratio = 0.0f64;
    let mut violations = 0;
    for r in &report.records {
        let cap = 2f64.powf((n - r.history.len()) as f64 - lower);
        max_ratio = max_ratio.max(r.probability / cap);
        if r.probability > cap + SLACK {
            violations += 1;
        }
    }
    let margin = report.prob_coin_g - report.prob_quantum_g * 2f64.powf(lower - n as f64);
    Theorem1Record {
        n,
        lower,
        max_branch_ratio: max_ratio,
        branch_violations: violations,
        prob_quantum_g: report.prob_quantum_g,
        prob_coin_g: report.prob_coin_g,
        counting_margin: margin,
        falsified: violations > 0 || margin < -SLACK,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::haar_random_state;

    #[test]
    fn plus_state_readout() {
        for n in 1..=5 {
            let psi = StateVector::plus(n).unwrap();
            let target = "0".repeat(n);
            let r = run_strategy_exact(&psi, &Readout::z(), &AcceptExact::new(&target)).unwrap();
            let p = 0.5f64.powi(n as i32);
            assert_eq!(r.good_count, 1);
            assert!((r.prob_quantum_g - p).abs() < 1e-12);
            assert_eq!(r.prob_coin_g, p);
            assert!((r.total_probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_state_readout() {
        let psi = StateVector::zero(4, 2).unwrap();
        let r = run_strategy_exact(&psi, &Readout::z(), &AcceptExact::new("0000")).unwrap();
        assert_eq!(r.good_count, 1);
        assert!((r.prob_quantum_g - 1.0).abs() < 1e-12);
        assert_eq!(r.prob_coin_g, 1.0 / 16.0);
        assert_eq!(r.records.len(), 16);
        assert_eq!(r.records.iter().filter(|x| x.probability == 0.0).count(), 15);
    }

    #[test]
    fn ghz_all_equal() {
        for n in 2..=6 {
            let r = run_strategy_exact(&StateVector::ghz(n).unwrap(), &Readout::z(), &AllEqual).unwrap();
            assert_eq!(r.good_count, 2);
            assert!((r.prob_quantum_g - 1.0).abs() < 1e-12);
            assert_eq!(r.prob_coin_g, 2f64.powi(1 - n as i32));
        }
    }

    #[test]
    fn trial_count_formula() {
        assert_eq!(coinflip_trials(2.0, 0.01).unwrap(), 37);
        assert_eq!(coinflip_trials(0.0, 0.5).unwrap(), 2);
        assert!(coinflip_trials(-1.0, 0.1).is_err());
        assert!(coinflip_trials(1.0, 1.0).is_err());
    }

    #[test]
    fn coinflip_trivial_verifiers() {
        let yes = coinflip_solve(4, &Readout::z(), &AcceptAll, 2.0, 0.01, 1).unwrap();
        assert!(yes.success);
        assert_eq!(yes.trials_used, 1);
        let no = coinflip_solve(4, &Readout::z(), &AcceptNone, 2.0, 0.01, 1).unwrap();
        assert!(!no.success && no.solution.is_none());
        assert_eq!(no.trials_used, 37);
    }

    #[test]
    fn reversed_enumeration_matches() {
        let psi = haar_random_state(5, 2, 11).unwrap();
        let s = RandomAdaptive::new(3);
        let v = HashedDensity::new(0.3, 1).unwrap();
        let a = run_strategy_exact(&psi, &s, &v).unwrap();
        let b = run_strategy_exact_with(&psi, &s, &v, EnumerationOptions { reverse_outcomes: true }).unwrap();
        assert_eq!(a, b);
        assert!((a.total_probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn theorem1_examples() {
        let zero = StateVector::zero(3, 2).unwrap();
        let rec = theorem1_check_with_lower(&zero, &Readout::z(), &AcceptExact::new("000"), 0.0).unwrap();
        assert!(!rec.falsified);
        assert!(rec.counting_margin.abs() < 1e-15);

        let bell = StateVector::bell();
        let rec = theorem1_check_with_lower(&bell, &Readout::z(), &AcceptAll, 0.86).unwrap();
        assert!(!rec.falsified);
        assert!(rec.max_branch_ratio <= 1.0);
    }

    #[test]
    fn overclaimed_lower_bound_is_caught() {
        let rec = theorem1_check_with_lower(&StateVector::bell(), &Readout::z(), &AllEqual, 1.5).unwrap();
        assert!(rec.falsified);
    }

    struct Repeats;
    impl Strategy for Repeats {
        fn name(&self) -> String {
            "repeats".into()
        }
        fn decide(&self, _: usize, history: &[u8]) -> Action {
            if history.len() < 2 {
                Action::Measure { site: 0, basis: Readout::z_basis() }
            } else {
                Action::Halt(Vec::new())
            }
        }
    }

    #[test]
    fn repeated_site_is_reported() {
        let err = run_strategy_exact(&StateVector::plus(2).unwrap(), &Repeats, &AcceptAll).unwrap_err();
        match err {
            Error::Strategy { history, .. } => assert!(history == "0" || history == "1"),
            other => panic!("{other:?}"),
        }
    }
}
