//! Geometric measure of entanglement, `E_g(psi) = -log_d sup_alpha |<alpha|psi>|^2`.
//!
//! Two complementary routes are provided:
//!
//! * [`als_estimate`] runs alternating single-site maximization from many
//!   random product starts. Any product state it finds witnesses an overlap,
//!   so `-log` of the best one is an upper bound on `E_g`.
//! * [`net_overlap_bound`] exhausts a product net over the Bloch sphere and
//!   adds the covering slack, which gives a certified lower bound on `E_g`
//!   for qubits.
//!
//! [`e_g_interval`] runs both and reports the bracket.

mod net;

pub use net::{
    build_single_site_net, net_overlap_bound, net_overlap_bound_with, product_net_cardinality_bound,
    NetBound, NetOptions, SingleSiteNet,
};

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seed::{derive_seed, rng_from_seed};
use crate::state::{
    environment_unchecked, overlap, random_unit_vector, ProductState, StateVector, C64,
};
use crate::{Error, Result};

/// Options for [`als_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlsOptions {
    /// Random restarts; `None` means `max(50, 10 n)`.
    pub restarts: Option<usize>,
    pub max_iters: usize,
    /// Stop once the relative change of the overlap over one sweep drops below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AlsOptions {
    fn default() -> Self {
        AlsOptions {
            restarts: None,
            max_iters: 500,
            tol: 1e-12,
            seed: 0,
        }
    }
}

impl AlsOptions {
    pub fn with_seed(seed: u64) -> Self {
        AlsOptions {
            seed,
            ..Self::default()
        }
    }

    pub fn restarts_for(&self, num_sites: usize) -> usize {
        self.restarts.unwrap_or_else(|| (10 * num_sites).max(50)).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlsResult {
    /// `-log_d` of `best_overlap_sqr`, clamped at zero.
    pub upper: f64,
    pub best_overlap_sqr: f64,
    pub best_product: ProductState,
    pub restarts: usize,
    /// Sweeps summed over all restarts.
    pub iterations: usize,
    pub log_base: usize,
}

/// `-log_base(p)`, clamped at zero so round-off on product inputs reads as 0.
pub fn neg_log(p: f64, base: usize) -> f64 {
    (-(p.ln()) / (base as f64).ln()).max(0.0)
}

/// Upper estimate of `E_g(psi)` by multi-restart alternating maximization.
pub fn als_estimate(psi: &StateVector, opts: &AlsOptions) -> Result<AlsResult> {
    als_estimate_from(psi, opts, &[])
}

/// As [`als_estimate`], additionally running one restart from each of `starts`.
pub fn als_estimate_from(
    psi: &StateVector,
    opts: &AlsOptions,
    starts: &[ProductState],
) -> Result<AlsResult> {
    let n = psi.num_sites();
    let d = psi.local_dim();
    if n == 0 {
        return Err(Error::invalid("psi", "state has no sites"));
    }
    if opts.restarts == Some(0) {
        return Err(Error::invalid("restarts", "must be at least 1"));
    }
    if let Some(s) = starts.iter().find(|s| s.num_sites() != n || s.local_dim() != d) {
        return Err(Error::Shape(format!(
            "start has {} sites of dimension {}",
            s.num_sites(),
            s.local_dim()
        )));
    }
    let random = opts.restarts_for(n);
    let runs: Vec<Result<(f64, ProductState, usize)>> = (0..random + starts.len())
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(derive_seed(opts.seed, r as u64));
            let start = match r.checked_sub(random) {
                Some(i) => starts[i].clone(),
                None => ProductState::haar_random(n, d, &mut rng),
            };
            run_restart(psi, start, opts, &mut rng)
        })
        .collect();

    let mut best: Option<(f64, ProductState)> = None;
    let mut iterations = 0;
    for run in runs {
        let (value, product, iters) = run?;
        iterations += iters;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, product));
        }
    }
    let (_, best_product) = best.expect("at least one restart");
    let best_overlap_sqr = overlap(&best_product, psi)?.norm_sqr();
    Ok(AlsResult {
        upper: neg_log(best_overlap_sqr, d),
        best_overlap_sqr,
        best_product,
        restarts: random + starts.len(),
        iterations,
        log_base: d,
    })
}

fn run_restart<R: Rng>(
    psi: &StateVector,
    mut alpha: ProductState,
    opts: &AlsOptions,
    rng: &mut R,
) -> Result<(f64, ProductState, usize)> {
    let n = psi.num_sites();
    let d = psi.local_dim();
    let mut prev = overlap(&alpha, psi)?.norm_sqr();
    let mut sweeps = 0;
    while sweeps < opts.max_iters {
        sweeps += 1;
        let mut value = prev;
        let mut degenerate = 0;
        for site in 0..n {
            let env = environment_unchecked(psi.amplitudes(), d, n, &alpha, site);
            let norm_sqr: f64 = env.iter().map(|a| a.norm_sqr()).sum();
            if alpha.set_factor(site, env) {
                // Each local update is optimal for its factor, so it cannot lose overlap.
                debug_assert!(norm_sqr >= value - 1e-12 * value.max(1e-300));
                value = norm_sqr;
            } else {
                degenerate += 1;
                alpha.set_factor_unchecked(site, random_unit_vector(d, rng));
                value = 0.0;
            }
        }
        if degenerate == n {
            return Err(Error::OptimizerStall);
        }
        let converged = degenerate == 0 && (value - prev).abs() <= opts.tol * value;
        prev = value;
        if converged {
            break;
        }
    }
    Ok((prev, alpha, sweeps))
}

/// Certified lower bound on `E_g` from bipartite spectra: for every cut
/// `A|B`, `sup |<alpha|psi>|^2 <= sigma_max(psi_{A,B})^2`.
///
/// Every cut is tried for `n <= 12`; larger states use contiguous prefix cuts.
pub fn spectral_lower_bound(psi: &StateVector) -> f64 {
    let n = psi.num_sites();
    let d = psi.local_dim();
    if n < 2 {
        return 0.0;
    }
    let cuts: Vec<Vec<bool>> = if n <= 12 {
        // Masks containing site n-1 are complements of ones that do not.
        (1u32..(1 << (n - 1)))
            .map(|mask| (0..n).map(|s| mask >> s & 1 == 1).collect())
            .collect()
    } else {
        (1..n).map(|k| (0..n).map(|s| s < k).collect()).collect()
    };
    let min_top = cuts
        .iter()
        .map(|side| top_schmidt_sqr(psi, side))
        .fold(1.0f64, f64::min);
    neg_log(min_top, d)
}

fn top_schmidt_sqr(psi: &StateVector, side: &[bool]) -> f64 {
    let d = psi.local_dim();
    let a = side.iter().filter(|&&x| x).count();
    let rows = d.pow(a as u32);
    let cols = psi.amplitudes().len() / rows;
    let mut m = DMatrix::<C64>::zeros(rows, cols);
    for (flat, &amp) in psi.amplitudes().iter().enumerate() {
        let (mut rest, mut r, mut c, mut rw, mut cw) = (flat, 0, 0, 1, 1);
        for &in_a in side {
            let digit = rest % d;
            rest /= d;
            if in_a {
                r += digit * rw;
                rw *= d;
            } else {
                c += digit * cw;
                cw *= d;
            }
        }
        m[(r, c)] = amp;
    }
    let gram = if rows <= cols { &m * m.adjoint() } else { m.adjoint() * &m };
    gram.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max).min(1.0)
}

/// Options for [`e_g_interval`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntervalOptions {
    pub als: AlsOptions,
    pub epsilon: f64,
    pub net: NetOptions,
}

impl Default for IntervalOptions {
    fn default() -> Self {
        IntervalOptions {
            als: AlsOptions::default(),
            epsilon: 0.1,
            net: NetOptions::default(),
        }
    }
}

/// Certified lower bound and heuristic upper estimate of `E_g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementInterval {
    /// Net certificate, or 0 when no certificate could be produced.
    pub lower: f64,
    /// From the best product state found.
    pub upper: f64,
    pub certified: bool,
    /// Independent certified bound from bipartite spectra.
    pub spectral_lower: f64,
    pub best_product: ProductState,
    pub log_base: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub epsilon: f64,
    pub net_points_per_site: Option<usize>,
    pub net_nodes: Option<u64>,
    pub note: Option<String>,
}

impl EntanglementInterval {
    /// Tightest certified lower bound available.
    pub fn certified_lower(&self) -> f64 {
        self.lower.max(self.spectral_lower)
    }
}

/// Runs the optimizer and, for qubits, the net certificate.
pub fn e_g_interval(psi: &StateVector, opts: &IntervalOptions) -> Result<EntanglementInterval> {
    let als = als_estimate(psi, &opts.als)?;
    let spectral_lower = spectral_lower_bound(psi);
    let mut interval = EntanglementInterval {
        lower: 0.0,
        upper: als.upper,
        certified: false,
        spectral_lower,
        best_product: als.best_product,
        log_base: als.log_base,
        restarts: als.restarts,
        iterations: als.iterations,
        epsilon: opts.epsilon,
        net_points_per_site: None,
        net_nodes: None,
        note: None,
    };
    if psi.local_dim() != 2 {
        interval.note = Some("no certificate: nets are only built for qubits".into());
        return Ok(interval);
    }
    match net_overlap_bound_with(psi, opts.epsilon, &opts.net, Some(als.best_overlap_sqr)) {
        Ok(bound) => {
            interval.lower = bound.e_g_lower;
            interval.certified = true;
            interval.net_points_per_site = Some(bound.points_per_site);
            interval.net_nodes = Some(bound.nodes_explored);
        }
        Err(Error::NetBudget { explored, .. }) => {
            interval.net_nodes = Some(explored);
            interval.note = Some("no certificate: net enumeration exceeded its node budget".into());
        }
        Err(e) => return Err(e),
    }
    Ok(interval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::haar_random_state;

    #[test]
    fn product_state_has_zero_entanglement() {
        let psi = StateVector::zero(2, 2).unwrap();
        let res = als_estimate(&psi, &AlsOptions::with_seed(1)).unwrap();
        assert_eq!(res.upper, 0.0);
        let ov = overlap(&res.best_product, &psi).unwrap();
        assert!((ov.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_is_one_ebit() {
        let res = als_estimate(&StateVector::bell(), &AlsOptions::with_seed(2)).unwrap();
        assert!((res.upper - 1.0).abs() < 1e-9);
    }

    #[test]
    fn upper_is_recomputable() {
        let psi = haar_random_state(3, 2, 4).unwrap();
        let res = als_estimate(&psi, &AlsOptions::with_seed(3)).unwrap();
        let p = overlap(&res.best_product, &psi).unwrap().norm_sqr();
        assert_eq!(res.upper, neg_log(p, 2));
    }

    #[test]
    fn zero_restarts_rejected() {
        let opts = AlsOptions {
            restarts: Some(0),
            ..AlsOptions::default()
        };
        assert!(als_estimate(&StateVector::bell(), &opts).is_err());
    }

    #[test]
    fn default_restarts_grow_with_n() {
        let o = AlsOptions::default();
        assert_eq!(o.restarts_for(3), 50);
        assert_eq!(o.restarts_for(8), 80);
    }

    #[test]
    fn spectral_bound_examples() {
        assert!((spectral_lower_bound(&StateVector::bell()) - 1.0).abs() < 1e-12);
        assert!((spectral_lower_bound(&StateVector::ghz(4).unwrap()) - 1.0).abs() < 1e-12);
        assert_eq!(spectral_lower_bound(&StateVector::zero(3, 2).unwrap()), 0.0);
    }

    #[test]
    fn interval_for_product_state() {
        let psi = StateVector::zero(3, 2).unwrap();
        let iv = e_g_interval(&psi, &IntervalOptions::default()).unwrap();
        assert_eq!(iv.lower, 0.0);
        assert_eq!(iv.upper, 0.0);
        assert!(iv.certified);
    }

    #[test]
    fn interval_for_bell() {
        let opts = IntervalOptions {
            epsilon: 0.05,
            ..IntervalOptions::default()
        };
        let iv = e_g_interval(&StateVector::bell(), &opts).unwrap();
        assert!((iv.upper - 1.0).abs() < 1e-9);
        assert!(iv.lower >= 0.862 && iv.lower <= 1.0, "lower = {}", iv.lower);
    }

    #[test]
    fn qudit_interval_has_no_certificate() {
        let psi = haar_random_state(2, 3, 1).unwrap();
        let iv = e_g_interval(&psi, &IntervalOptions::default()).unwrap();
        assert!(!iv.certified);
        assert_eq!(iv.lower, 0.0);
        assert_eq!(iv.log_base, 3);
    }
}
