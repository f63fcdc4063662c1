//! Monte Carlo and closed-form experiments on Haar-random states.
//!
//! * overlap tails of a Haar vector against a fixed vector, next to the exact
//!   Beta(1, d-1) tail and the exponential bound `exp(-(2d-1) eps)`;
//! * the entanglement threshold `n - 2 log2 n - 3` together with the
//!   validity condition `2 n l (1 - ln 2) > 4 ln(5n)` at `l = n - log2(3 n^2)`;
//! * the post-selected preparation ratio
//!   `sup ln |<alpha, beta|psi>|^2 / ||<beta|psi>||^2` over output registers;
//! * connected two-point correlators and the resource size implied by an
//!   inverse-polynomial correlation decay.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::density::{hermiticity_deviation, reduced_density};
use crate::gme::{als_estimate, net_overlap_bound_with, AlsOptions, NetOptions};
use crate::seed::{derive_seed, rng_from_seed};
use crate::state::{
    contract_site, environment_unchecked, haar_random_state_with_budget, ProductState,
    StateVector, C64,
};
use crate::config::TOLERANCES;
use crate::{Error, Result};

/// `P(|<phi|psi>|^2 >= eps) = (1 - eps)^(d-1)` for Haar `psi` in `C^d`.
pub fn exact_overlap_tail(d: usize, eps: f64) -> f64 {
    (1.0 - eps).max(0.0).powi(d as i32 - 1)
}

/// The exponential tail bound `exp(-(2d-1) eps)`.
pub fn exponential_tail_bound(d: usize, eps: f64) -> f64 {
    (-(2.0 * d as f64 - 1.0) * eps).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub d: usize,
    pub epsilon: f64,
    pub samples: u64,
    pub hits: u64,
    pub empirical_tail: f64,
    pub exact_tail: f64,
    pub paper_bound: f64,
    /// Three binomial standard deviations at the exact tail.
    pub three_sigma: f64,
    pub within_three_sigma: bool,
    pub seed: u64,
}

/// Fraction of Haar vectors in `C^d` whose squared overlap with `|0>` is at least `eps`.
pub fn haar_tail_experiment(d: usize, eps: f64, samples: u64, seed: u64) -> Result<TailReport> {
    if d < 2 {
        return Err(Error::invalid("d", "must be at least 2"));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::invalid("eps", "must lie in [0, 1]"));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    let budget = Budget::default();
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| {
            let psi = haar_random_state_with_budget(1, d, derive_seed(seed, i), budget)?;
            Ok(u64::from(psi.amplitudes()[0].norm_sqr() >= eps))
        })
        .sum::<Result<u64>>()?;
    let empirical = hits as f64 / samples as f64;
    let exact = exact_overlap_tail(d, eps);
    let three_sigma = 3.0 * (exact * (1.0 - exact) / samples as f64).sqrt();
    Ok(TailReport {
        d,
        epsilon: eps,
        samples,
        hits,
        empirical_tail: empirical,
        exact_tail: exact,
        paper_bound: exponential_tail_bound(d, eps),
        three_sigma,
        within_three_sigma: (empirical - exact).abs() <= three_sigma,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: usize,
    /// `n - log2(3 n^2)`.
    pub l: f64,
    /// `n - 2 log2(n) - 3`.
    pub threshold: f64,
    /// `2 n l (1 - ln 2)`.
    pub condition_lhs: f64,
    /// `4 ln(5 n)`.
    pub condition_rhs: f64,
    pub condition_holds: bool,
    /// The threshold is not positive, so the statement says nothing.
    pub vacuous: bool,
}

pub fn theorem2_threshold(n: usize) -> Result<ThresholdReport> {
    if n < 2 {
        return Err(Error::invalid("n", "must be at least 2"));
    }
    let nf = n as f64;
    let l = nf - (3.0 * nf * nf).log2();
    let threshold = nf - 2.0 * nf.log2() - 3.0;
    let lhs = 2.0 * nf * l * (1.0 - std::f64::consts::LN_2);
    let rhs = 4.0 * (5.0 * nf).ln();
    Ok(ThresholdReport {
        n,
        l,
        threshold,
        condition_lhs: lhs,
        condition_rhs: rhs,
        condition_holds: lhs > rhs,
        vacuous: threshold <= 0.0,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HaarGmeOptions {
    pub als: AlsOptions,
    /// Net slack for the certified lower bound, used when `n <= 6`.
    pub epsilon: Option<f64>,
    pub net: NetOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarGmeRow {
    pub sample: u64,
    pub state_seed: u64,
    pub upper: f64,
    pub lower: Option<f64>,
    pub below_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarGmeReport {
    pub n: usize,
    pub threshold: f64,
    pub samples: u64,
    pub mean_upper: f64,
    pub median_upper: f64,
    pub min_upper: f64,
    pub max_upper: f64,
    pub fraction_below_threshold: f64,
    pub rows: Vec<HaarGmeRow>,
}

/// Samples Haar `n`-qubit states and estimates their geometric measure.
pub fn haar_gme_experiment(
    n: usize,
    samples: u64,
    opts: &HaarGmeOptions,
    seed: u64,
    budget: Budget,
) -> Result<HaarGmeReport> {
    if samples == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    budget.check_dims(n, 2)?;
    let threshold = theorem2_threshold(n.max(2))?.threshold;
    let rows = (0..samples)
        .into_par_iter()
        .map(|i| {
            let state_seed = derive_seed(seed, 2 * i);
            let psi = haar_random_state_with_budget(n, 2, state_seed, budget)?;
            let als_opts = AlsOptions {
                seed: derive_seed(seed, 2 * i + 1),
                ..opts.als.clone()
            };
            let als = als_estimate(&psi, &als_opts)?;
            let lower = match opts.epsilon {
                Some(eps) if n <= 6 => {
                    match net_overlap_bound_with(&psi, eps, &opts.net, Some(als.best_overlap_sqr)) {
                        Ok(b) => Some(b.e_g_lower),
                        Err(Error::NetBudget { .. }) => None,
                        Err(e) => return Err(e),
                    }
                }
                _ => None,
            };
            Ok(HaarGmeRow {
                sample: i,
                state_seed,
                upper: als.upper,
                lower,
                below_threshold: als.upper < threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut uppers: Vec<f64> = rows.iter().map(|r| r.upper).collect();
    uppers.sort_by(f64::total_cmp);
    let m = uppers.len();
    let median = if m % 2 == 1 {
        uppers[m / 2]
    } else {
        0.5 * (uppers[m / 2 - 1] + uppers[m / 2])
    };
    Ok(HaarGmeReport {
        n,
        threshold,
        samples,
        mean_upper: uppers.iter().sum::<f64>() / m as f64,
        median_upper: median,
        min_upper: uppers[0],
        max_upper: uppers[m - 1],
        fraction_below_threshold: rows.iter().filter(|r| r.below_threshold).count() as f64 / m as f64,
        rows,
    })
}

/// `2 ln n - k - ln(1 - eps) + 3`.
pub fn cq_ratio_bound(n: usize, k: usize, eps: f64) -> f64 {
    2.0 * (n as f64).ln() - k as f64 - (1.0 - eps).ln() + 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CqOptions {
    /// Used for the final optimization of the conditional state.
    pub als: AlsOptions,
    /// Output registers tried per sample; all of them when `C(n, k)` is not larger.
    pub max_subsets: usize,
    /// Random starting points for the conditioning product.
    pub outer_restarts: usize,
    pub max_rounds: usize,
    pub tol: f64,
}

impl Default for CqOptions {
    fn default() -> Self {
        CqOptions {
            als: AlsOptions {
                restarts: Some(8),
                ..AlsOptions::default()
            },
            max_subsets: 500,
            outer_restarts: 4,
            max_rounds: 200,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqRow {
    pub sample: u64,
    pub register: Vec<usize>,
    /// Best `ln(|<alpha, beta|psi>|^2 / ||<beta|psi>||^2)` found.
    pub max_ln_ratio: f64,
    /// Base-2 geometric measure of the normalized conditional state at the optimum.
    pub conditional_e_g: f64,
    pub exceeds_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqReport {
    pub n: usize,
    pub k_out: usize,
    pub epsilon: f64,
    /// `2 ln n - k - ln(1 - eps) + 3`, natural-log units.
    pub bound_ln: f64,
    pub samples: u64,
    pub registers_per_sample: usize,
    pub exhaustive_registers: bool,
    /// Per-sample maximum over registers.
    pub sample_max_ln_ratio: Vec<f64>,
    pub fraction_exceeding: f64,
    /// Conditioning products skipped because `||<beta|psi>|| < 1e-14`.
    pub skipped_zero_norm: u64,
    pub rows: Vec<CqRow>,
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Output registers: every `k`-subset when there are at most `cap`, otherwise
/// `cap` distinct seeded random subsets, sorted.
pub fn output_registers(n: usize, k: usize, cap: usize, seed: u64) -> (Vec<Vec<usize>>, bool) {
    if binomial(n, k) <= cap as u128 {
        return (all_subsets(n, k), true);
    }
    let mut rng = rng_from_seed(seed);
    let mut chosen = std::collections::BTreeSet::new();
    while chosen.len() < cap {
        let mut s = sample_indices(&mut rng, n, k).into_vec();
        s.sort_unstable();
        chosen.insert(s);
    }
    (chosen.into_iter().collect(), false)
}

/// Maximizes the post-selected preparation ratio for every register of every sample.
pub fn cq_ratio_experiment(
    n: usize,
    k_out: usize,
    samples: u64,
    eps: f64,
    opts: &CqOptions,
    seed: u64,
    budget: Budget,
) -> Result<CqReport> {
    if k_out == 0 || k_out >= n {
        return Err(Error::invalid("k", "need 0 < k < n"));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid("eps", "must lie in [0, 1)"));
    }
    budget.check_dims(n, 2)?;
    let (registers, exhaustive) = output_registers(n, k_out, opts.max_subsets.max(1), derive_seed(seed, u64::MAX));
    let states = (0..samples)
        .map(|i| haar_random_state_with_budget(n, 2, derive_seed(seed, i), budget))
        .collect::<Result<Vec<_>>>()?;
    let mut report = cq_ratio_on_states(&states, &registers, eps, opts, seed)?;
    report.exhaustive_registers = exhaustive;
    Ok(report)
}

/// As [`cq_ratio_experiment`] on caller-supplied states.
pub fn cq_ratio_on_states(
    states: &[StateVector],
    registers: &[Vec<usize>],
    eps: f64,
    opts: &CqOptions,
    seed: u64,
) -> Result<CqReport> {
    let n = states.first().map_or(0, StateVector::num_sites);
    let k_out = registers.first().map_or(0, Vec::len);
    let bound = cq_ratio_bound(n, k_out, eps);
    let jobs: Vec<(usize, usize)> = (0..states.len())
        .flat_map(|s| (0..registers.len()).map(move |r| (s, r)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(s, r)| {
            let task = derive_seed(seed, (s * registers.len() + r) as u64);
            maximize_ratio(&states[s], &registers[r], opts, task)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(results.len());
    let mut sample_max = vec![f64::NEG_INFINITY; states.len()];
    let mut skipped = 0;
    for (&(s, r), res) in jobs.iter().zip(results) {
        skipped += res.skipped;
        sample_max[s] = sample_max[s].max(res.ln_ratio);
        rows.push(CqRow {
            sample: s as u64,
            register: registers[r].clone(),
            max_ln_ratio: res.ln_ratio,
            conditional_e_g: res.conditional_e_g,
            exceeds_bound: res.ln_ratio > bound,
        });
    }
    let exceeding = sample_max.iter().filter(|&&m| m > bound).count();
    Ok(CqReport {
        n,
        k_out,
        epsilon: eps,
        bound_ln: bound,
        samples: states.len() as u64,
        registers_per_sample: registers.len(),
        exhaustive_registers: true,
        fraction_exceeding: exceeding as f64 / states.len().max(1) as f64,
        sample_max_ln_ratio: sample_max,
        skipped_zero_norm: skipped,
        rows,
    })
}

struct RatioResult {
    ln_ratio: f64,
    conditional_e_g: f64,
    skipped: u64,
}

const ZERO_CONDITIONAL: f64 = 1e-14;

/// Block-coordinate ascent on `|<gamma|psi>|^2 / ||<beta|psi>||^2` where
/// `gamma = alpha (register) ⊗ beta (rest)`. Register factors take the
/// normalized environment; conditioning factors solve a 2x2 generalized
/// Rayleigh quotient. The final register product is re-optimized from scratch
/// on the normalized conditional state.
fn maximize_ratio(psi: &StateVector, register: &[usize], opts: &CqOptions, seed: u64) -> Result<RatioResult> {
    let n = psi.num_sites();
    let d = psi.local_dim();
    let in_register: Vec<bool> = (0..n).map(|s| register.contains(&s)).collect();
    let mut best: Option<(f64, f64)> = None;
    let mut skipped = 0;
    for restart in 0..opts.outer_restarts.max(1) {
        let mut rng = rng_from_seed(derive_seed(seed, restart as u64));
        let mut gamma = ProductState::haar_random(n, d, &mut rng);
        let mut prev = f64::NEG_INFINITY;
        let mut dead = false;
        for _ in 0..opts.max_rounds.max(1) {
            for site in 0..n {
                let env = environment_unchecked(psi.amplitudes(), d, n, &gamma, site);
                if in_register[site] {
                    gamma.set_factor(site, env);
                } else {
                    let gram = conditional_gram(psi, &gamma, &in_register, site);
                    if let Some(beta) = rayleigh_maximizer(&gram, &env) {
                        gamma.set_factor(site, beta);
                    }
                }
            }
            let Some(cond) = conditional_state(psi, &gamma, &in_register)? else {
                dead = true;
                break;
            };
            let ratio = register_overlap(&cond, &gamma, &in_register);
            let done = (ratio - prev).abs() <= opts.tol * ratio.abs().max(1e-300);
            prev = ratio;
            if done {
                break;
            }
        }
        if dead {
            skipped += 1;
            continue;
        }
        let cond = conditional_state(psi, &gamma, &in_register)?.expect("checked above");
        let als_opts = AlsOptions {
            seed: derive_seed(seed, 1 << 32 | restart as u64),
            ..opts.als.clone()
        };
        let start = register_product(&gamma, &in_register)?;
        let als = crate::gme::als_estimate_from(&cond, &als_opts, &[start])?;
        let ratio = als.best_overlap_sqr.min(1.0);
        if best.is_none_or(|(b, _)| ratio > b) {
            best = Some((ratio, als.upper));
        }
    }
    let (ratio, conditional_e_g) = best.unwrap_or((f64::NAN, f64::NAN));
    Ok(RatioResult {
        ln_ratio: ratio.ln(),
        conditional_e_g,
        skipped,
    })
}

/// `<beta|psi> / ||<beta|psi>||` on the register, or `None` if it vanishes.
fn conditional_state(psi: &StateVector, gamma: &ProductState, in_register: &[bool]) -> Result<Option<StateVector>> {
    let d = psi.local_dim();
    let mut amps = psi.amplitudes().to_vec();
    for s in (0..psi.num_sites()).rev().filter(|&s| !in_register[s]) {
        amps = contract_site(&amps, d, s, gamma.factor(s));
    }
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm_sqr.sqrt() < ZERO_CONDITIONAL {
        return Ok(None);
    }
    let k = in_register.iter().filter(|&&x| x).count();
    StateVector::new(k, d, amps).map(Some)
}

fn register_product(gamma: &ProductState, in_register: &[bool]) -> Result<ProductState> {
    ProductState::new(
        (0..in_register.len())
            .filter(|&s| in_register[s])
            .map(|s| gamma.factor(s).to_vec())
            .collect(),
    )
}

fn register_overlap(cond: &StateVector, gamma: &ProductState, in_register: &[bool]) -> f64 {
    register_product(gamma, in_register)
        .and_then(|alpha| crate::state::overlap(&alpha, cond))
        .map(|z| z.norm_sqr())
        .unwrap_or(0.0)
}

/// Gram matrix `G[b, c] = <chi_b|chi_c>` of the slices of `psi` contracted with
/// every conditioning factor except `site`, indexed by the digit at `site`.
fn conditional_gram(psi: &StateVector, gamma: &ProductState, in_register: &[bool], site: usize) -> DMatrix<C64> {
    let d = psi.local_dim();
    let n = psi.num_sites();
    let mut amps = psi.amplitudes().to_vec();
    let mut position = site;
    for s in (0..n).rev().filter(|&s| !in_register[s] && s != site) {
        amps = contract_site(&amps, d, s, gamma.factor(s));
        if s < site {
            position -= 1;
        }
    }
    let stride = d.pow(position as u32);
    let mut gram = DMatrix::<C64>::zeros(d, d);
    for chunk in amps.chunks_exact(stride * d) {
        for b in 0..d {
            for c in 0..d {
                let xb = &chunk[b * stride..(b + 1) * stride];
                let xc = &chunk[c * stride..(c + 1) * stride];
                gram[(b, c)] += xb.iter().zip(xc).map(|(x, y)| x.conj() * y).sum::<C64>();
            }
        }
    }
    gram
}

/// Conditioning factor maximizing `|<beta|u>|^2 / (y^† G y)` with `y = conj(beta)`:
/// `y ∝ G^+ conj(u)`.
fn rayleigh_maximizer(gram: &DMatrix<C64>, env: &[C64]) -> Option<Vec<C64>> {
    let eig = gram.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if !(top > 0.0) {
        return None;
    }
    let w = DVector::from_iterator(env.len(), env.iter().map(|u| u.conj()));
    let q = &eig.eigenvectors;
    let coeffs = q.adjoint() * &w;
    let mut y = DVector::<C64>::zeros(env.len());
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 1e-12 * top {
            y += q.column(i) * (coeffs[i] / C64::new(lambda, 0.0));
        }
    }
    let beta: Vec<C64> = y.iter().map(|v| v.conj()).collect();
    let norm: f64 = beta.iter().map(|b| b.norm_sqr()).sum();
    (norm > 1e-300).then_some(beta)
}

/// `f(x) = c / x^p` with `c > 0`, `p >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationModel {
    pub c: f64,
    pub p: f64,
}

impl CorrelationModel {
    pub fn new(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("c", "must be positive"));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::invalid("p", "must be at least 1"));
        }
        Ok(CorrelationModel { c, p })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c / x.powf(self.p)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (self.c / y).powf(1.0 / self.p)
    }
}

/// `ceil(f^-1(eps))`: the distance beyond which correlations drop below `eps`.
/// Returns 1 when `eps >= f(1)`.
pub fn correlation_size_bound(model: &CorrelationModel, eps: f64) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps", "must be positive"));
    }
    if eps >= model.eval(1.0) {
        return Ok(1);
    }
    let x = model.inverse(eps);
    // Absorb round-off so exact integers are not bumped up by one.
    let nearest = x.round();
    let value = if (x - nearest).abs() <= 1e-9 * nearest { nearest } else { x.ceil() };
    Ok(value.max(1.0) as u64)
}

/// Connected correlator `<M_j M_k> - <M_j><M_k>` for one observable on two sites.
pub fn two_point_correlation(psi: &StateVector, j: usize, k: usize, obs: &DMatrix<C64>) -> Result<f64> {
    let d = psi.local_dim();
    if obs.shape() != (d, d) {
        return Err(Error::Shape(format!("observable must be {d}x{d}")));
    }
    let dev = hermiticity_deviation(obs);
    if dev > TOLERANCES.hermiticity {
        return Err(Error::NonHermitian { deviation: dev });
    }
    if j == k {
        return Err(Error::invalid("k", "sites must differ"));
    }
    let joint = reduced_density(psi, &[j, k])?.expectation(&obs.kronecker(obs))?;
    let mj = reduced_density(psi, &[j])?.expectation(obs)?;
    let mk = reduced_density(psi, &[k])?.expectation(obs)?;
    let value = joint - mj * mk;
    debug_assert!(value.im.abs() <= 1e-10, "imaginary correlator {value}");
    Ok(value.re)
}
