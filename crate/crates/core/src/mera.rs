//! Tree tensor-network states built from one two-site isometry.
//!
//! A unitary `U` on `C^d ⊗ C^d` defines `V|b> = U(|0> ⊗ |b>)`, an isometry from
//! one site into two. Starting from `|0>` on a single site and applying `V`
//! to every site `k` times gives a state on `2^k` sites. Site `s` of one layer
//! becomes sites `2s` (first output factor) and `2s + 1` of the next.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Budget, TOLERANCES};
use crate::gme::{als_estimate, als_estimate_from, neg_log, AlsOptions};
use crate::seed::{derive_seed, rng_from_seed};
use crate::state::{complex_gaussian, ProductState, StateVector, C64};
use crate::{Error, Result};

/// Haar-random `dim x dim` unitary: QR of a complex Gaussian matrix with the
/// phases fixed so the triangular factor has a positive diagonal.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<DMatrix<C64>> {
    if dim == 0 {
        return Err(Error::invalid("dim", "must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(&mut rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Largest entry of `|U^† U - I|`.
pub fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    let prod = u.adjoint() * u;
    let mut dev = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((prod[(i, j)] - target).norm());
        }
    }
    dev
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNetworkSpec {
    depth: usize,
    local_dim: usize,
    /// One shared unitary, or one per layer (root layer first).
    unitaries: Vec<DMatrix<C64>>,
    seed: Option<u64>,
}

impl TreeNetworkSpec {
    pub fn new(depth: usize, local_dim: usize, unitaries: Vec<DMatrix<C64>>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::invalid("k", "depth must be at least 1"));
        }
        if local_dim < 2 {
            return Err(Error::invalid("d", "must be at least 2"));
        }
        if unitaries.len() != 1 && unitaries.len() != depth {
            return Err(Error::invalid("unitaries", "give one shared unitary or one per layer"));
        }
        let dd = local_dim * local_dim;
        for u in &unitaries {
            if u.shape() != (dd, dd) {
                return Err(Error::Shape(format!("unitary must be {dd}x{dd}")));
            }
            let dev = unitarity_deviation(u);
            if dev > TOLERANCES.orthonormality {
                return Err(Error::NonOrthonormalBasis { deviation: dev });
            }
        }
        Ok(TreeNetworkSpec {
            depth,
            local_dim,
            unitaries,
            seed: None,
        })
    }

    /// Haar-random unitaries: one shared, or one per layer from derived seeds.
    pub fn haar(depth: usize, local_dim: usize, seed: u64, per_layer: bool) -> Result<Self> {
        let dd = local_dim * local_dim;
        let unitaries = if per_layer {
            (0..depth)
                .map(|l| haar_unitary(dd, derive_seed(seed, l as u64)))
                .collect::<Result<_>>()?
        } else {
            vec![haar_unitary(dd, seed)?]
        };
        let mut spec = TreeNetworkSpec::new(depth, local_dim, unitaries)?;
        spec.seed = Some(seed);
        Ok(spec)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn num_sites(&self) -> usize {
        1 << self.depth
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn unitaries(&self) -> &[DMatrix<C64>] {
        &self.unitaries
    }

    /// Unitary used by `layer` (0 is the root).
    pub fn layer_unitary(&self, layer: usize) -> &DMatrix<C64> {
        &self.unitaries[layer.min(self.unitaries.len() - 1)]
    }
}

/// Replaces `site` by two sites carrying `V|b>`, where `V[(x d + y), b]` is
/// the isometry; `x` lands on `site` and `y` on `site + 1`.
fn expand_site(amps: &[C64], d: usize, site: usize, v: &DMatrix<C64>) -> Vec<C64> {
    let lo = d.pow(site as u32);
    let hi = amps.len() / (lo * d);
    let mut out = vec![C64::new(0.0, 0.0); amps.len() * d];
    for h in 0..hi {
        for b in 0..d {
            for l in 0..lo {
                let a = amps[l + lo * (b + d * h)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for x in 0..d {
                    for y in 0..d {
                        out[l + lo * (x + d * y + d * d * h)] += v[(x * d + y, b)] * a;
                    }
                }
            }
        }
    }
    out
}

/// Columns `U(|0> ⊗ |b>)`, i.e. the first `d` columns of `U`.
fn isometry(u: &DMatrix<C64>, d: usize) -> DMatrix<C64> {
    u.columns(0, d).into_owned()
}

pub fn build_tree_state(spec: &TreeNetworkSpec) -> Result<StateVector> {
    build_tree_state_with_budget(spec, Budget::default())
}

pub fn build_tree_state_with_budget(spec: &TreeNetworkSpec, budget: Budget) -> Result<StateVector> {
    let d = spec.local_dim;
    budget.check_dims(spec.num_sites(), d)?;
    let mut amps = vec![C64::new(0.0, 0.0); d];
    amps[0] = C64::new(1.0, 0.0);
    let mut sites = 1;
    for layer in 0..spec.depth {
        let v = isometry(spec.layer_unitary(layer), d);
        for s in (0..sites).rev() {
            amps = expand_site(&amps, d, s, &v);
        }
        sites *= 2;
    }
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    debug_assert!((norm_sqr - 1.0).abs() < 1e-10, "isometry lost norm: {norm_sqr}");
    StateVector::new(sites, d, amps)
}

/// `sup |<a1, a2| V |b>|^2` over unit vectors, by alternating maximization
/// on the three-index tensor `V[x, y, b]` (normalized, then rescaled by `d`).
/// The best computational-basis triple is always one of the starting points.
pub fn isometry_sup_overlap(u: &DMatrix<C64>, restarts: usize, seed: u64) -> Result<f64> {
    let dd = u.nrows();
    let d = (dd as f64).sqrt().round() as usize;
    if d * d != dd || u.ncols() != dd {
        return Err(Error::Shape("unitary must be d^2 x d^2".into()));
    }
    let v = isometry(u, d);
    let mut amps = Vec::with_capacity(dd * d);
    let mut best_entry = (0.0, [0, 0, 0]);
    for b in 0..d {
        for y in 0..d {
            for x in 0..d {
                let a = v[(x * d + y, b)];
                if a.norm_sqr() > best_entry.0 {
                    best_entry = (a.norm_sqr(), [x, y, b]);
                }
                amps.push(a);
            }
        }
    }
    let tensor = StateVector::new(3, d, amps)?;
    let start = ProductState::basis(d, &best_entry.1)?;
    let opts = AlsOptions {
        restarts: Some(restarts.max(1)),
        seed,
        ..AlsOptions::default()
    };
    let als = als_estimate_from(&tensor, &opts, &[start])?;
    Ok((d as f64 * als.best_overlap_sqr).min(1.0))
}

/// Largest squared entry of the isometry: a floor on the sup overlap.
pub fn isometry_max_entry(u: &DMatrix<C64>) -> f64 {
    let d = (u.nrows() as f64).sqrt().round() as usize;
    isometry(u, d).iter().map(|a| a.norm_sqr()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedGme {
    /// `-(1/n) log_d` of the best product overlap found; an upper estimate.
    pub value: f64,
    /// `1 - 2^-k`.
    pub prediction: f64,
    pub best_overlap_sqr: f64,
    pub num_sites: usize,
    pub local_dim: usize,
}

pub fn normalized_gme(spec: &TreeNetworkSpec, opts: &AlsOptions) -> Result<NormalizedGme> {
    let psi = build_tree_state(spec)?;
    let als = als_estimate(&psi, opts)?;
    let n = psi.num_sites();
    Ok(NormalizedGme {
        value: neg_log(als.best_overlap_sqr, spec.local_dim) / n as f64,
        prediction: 1.0 - 0.5f64.powi(spec.depth as i32),
        best_overlap_sqr: als.best_overlap_sqr,
        num_sites: n,
        local_dim: spec.local_dim,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapTrendPoint {
    pub d: usize,
    pub mean_sup_overlap: f64,
    /// `d` times the mean; the asymptotic law predicts 1.
    pub scaled_mean: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapTrend {
    pub points: Vec<OverlapTrendPoint>,
    /// Least-squares slope of `ln(mean)` against `ln(d)`.
    pub log_log_slope: f64,
}

/// Mean sup overlap of Haar isometries over `seeds` unitaries for each `d`.
pub fn isometry_overlap_trend(dims: &[usize], seeds: u64, restarts: usize, master: u64) -> Result<OverlapTrend> {
    let points = dims
        .iter()
        .map(|&d| {
            let values = (0..seeds)
                .into_par_iter()
                .map(|s| {
                    let seed = derive_seed(derive_seed(master, d as u64), s);
                    let u = haar_unitary(d * d, seed)?;
                    isometry_sup_overlap(&u, restarts, derive_seed(seed, 1))
                })
                .collect::<Result<Vec<_>>>()?;
            let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
            Ok(OverlapTrendPoint {
                d,
                mean_sup_overlap: mean,
                scaled_mean: d as f64 * mean,
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = points.iter().map(|p| (p.d as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_sup_overlap.ln()).collect();
    Ok(OverlapTrend {
        log_log_slope: least_squares_slope(&xs, &ys),
        points,
    })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gme::{e_g_interval, IntervalOptions};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// CNOT (control on the first factor) after a Hadamard on the first factor.
    fn bell_maker() -> DMatrix<C64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = DMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)]);
        let hi = had.kronecker(&DMatrix::identity(2, 2));
        let mut cnot = DMatrix::<C64>::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            cnot[(i, j)] = c(1.0);
        }
        cnot * hi
    }

    #[test]
    fn haar_unitary_is_unitary() {
        for (dim, seed) in [(1, 0), (4, 1), (16, 2), (64, 3)] {
            let u = haar_unitary(dim, seed).unwrap();
            assert!(unitarity_deviation(&u) < 1e-10);
        }
        assert!((haar_unitary(1, 5).unwrap()[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert_eq!(haar_unitary(4, 9).unwrap(), haar_unitary(4, 9).unwrap());
    }

    #[test]
    fn identity_tree_is_product() {
        let spec = TreeNetworkSpec::new(1, 2, vec![DMatrix::identity(4, 4)]).unwrap();
        let psi = build_tree_state(&spec).unwrap();
        assert_eq!(psi.amplitudes()[0], c(1.0));
        let g = normalized_gme(&TreeNetworkSpec::new(2, 3, vec![DMatrix::identity(9, 9)]).unwrap(), &AlsOptions::default()).unwrap();
        assert!(g.value.abs() < 1e-12);
    }

    #[test]
    fn bell_tree() {
        let spec = TreeNetworkSpec::new(1, 2, vec![bell_maker()]).unwrap();
        let psi = build_tree_state(&spec).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = [s, 0.0, 0.0, s];
        for (a, w) in psi.amplitudes().iter().zip(want) {
            assert!((a - c(w)).norm() < 1e-12);
        }
        let iv = e_g_interval(&psi, &IntervalOptions::default()).unwrap();
        assert!(iv.lower <= 1.0 + 1e-9 && iv.upper >= 1.0 - 1e-9);
    }

    #[test]
    fn trees_are_normalized() {
        for seed in 0..50u64 {
            let k = 1 + (seed % 3) as usize;
            let d = 2 + (seed % 2) as usize;
            let spec = TreeNetworkSpec::haar(k, d, seed, seed % 2 == 0).unwrap();
            let psi = build_tree_state(&spec).unwrap();
            let norm: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_isometry_overlap_is_one() {
        for d in 2..=4 {
            let v = isometry_sup_overlap(&DMatrix::identity(d * d, d * d), 4, 0).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sup_overlap_bounds_and_phase() {
        for seed in 0..10 {
            let u = haar_unitary(16, seed).unwrap();
            let v = isometry_sup_overlap(&u, 20, seed).unwrap();
            assert!(v >= isometry_max_entry(&u) - 1e-12);
            assert!(v >= 1.0 / 16.0 && v <= 1.0 + 1e-12);
            let rotated = &u * C64::from_polar(1.0, 0.7);
            let w = isometry_sup_overlap(&rotated, 20, seed).unwrap();
            assert!((v - w).abs() < 1e-8);
        }
    }

    #[test]
    fn qubit_isometry_always_contains_a_product() {
        // A two-dimensional subspace of C^2 ⊗ C^2 always meets the product states.
        for seed in 0..10 {
            let u = haar_unitary(4, seed).unwrap();
            assert!(isometry_sup_overlap(&u, 20, seed).unwrap() > 1.0 - 1e-8);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(TreeNetworkSpec::new(0, 2, vec![DMatrix::identity(4, 4)]).is_err());
        assert!(TreeNetworkSpec::new(1, 2, vec![DMatrix::identity(3, 3)]).is_err());
        let mut bad = DMatrix::<C64>::identity(4, 4);
        bad[(0, 1)] = c(0.5);
        assert!(TreeNetworkSpec::new(1, 2, vec![bad]).is_err());
        assert!(build_tree_state_with_budget(&TreeNetworkSpec::haar(3, 4, 0, false).unwrap(), Budget::new(1000)).is_err());
    }
}
