use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{Float, One, Zero};
use serde::{Deserialize, Serialize};

use super::{als_estimate, neg_log, AlsOptions};
use crate::state::{bloch_vector, contract_site, StateVector, C64};
use crate::{Error, Result};

/// A finite set of qubit states covering the Bloch sphere: every qubit
/// state has a point at squared fidelity at least `1 - epsilon^2 / 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleSiteNet {
    pub epsilon: f64,
    pub fidelity_floor: f64,
    /// Bloch angles `(theta, phi)` of every point.
    pub angles: Vec<(f64, f64)>,
    pub points: Vec<Vec<C64>>,
}

impl SingleSiteNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest squared fidelity between `v` and any net point.
    pub fn best_fidelity(&self, v: &[C64]) -> f64 {
        self.points
            .iter()
            .map(|p| p.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr())
            .fold(0.0, f64::max)
    }
}

/// Latitude rings on the Bloch sphere.
///
/// Two Bloch directions at angle `g` have squared fidelity `cos^2(g/2)`, so the
/// floor holds once every direction is within `g_max = 2 asin(eps/2)` of a
/// point. Rings are spaced at most `g_max` apart and each ring places points
/// at most `g_max / sin(theta)` apart in azimuth; by the triangle inequality
/// any direction is then within `g_max/2 + g_max/2` of a point. The ring count
/// is even and every ring size a multiple of four, so the six Pauli
/// eigenstates are always included.
pub fn build_single_site_net(epsilon: f64) -> Result<SingleSiteNet> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid("epsilon", format!("{epsilon} is outside (0, 1]")));
    }
    let g_max = 2.0 * (epsilon / 2.0).asin();
    let mut rings = (PI / g_max).ceil() as usize;
    rings += rings % 2;
    let mut angles = Vec::new();
    for i in 0..=rings {
        let theta = PI * i as f64 / rings as f64;
        let count = if i == 0 || i == rings {
            1
        } else {
            let raw = (2.0 * PI * theta.sin() / g_max * (1.0 + 1e-9)).ceil() as usize;
            raw.div_ceil(4) * 4
        };
        for j in 0..count {
            angles.push((theta, 2.0 * PI * j as f64 / count as f64));
        }
    }
    let points = angles.iter().map(|&(t, p)| bloch_vector(t, p)).collect();
    Ok(SingleSiteNet {
        epsilon,
        fidelity_floor: 1.0 - epsilon * epsilon / 4.0,
        angles,
        points,
    })
}

/// `ceil((5k/eps)^(4k))`, evaluated exactly on the binary value of `eps`.
pub fn product_net_cardinality_bound(k: u32, epsilon: f64) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("epsilon", "must be positive and finite"));
    }
    // eps = mantissa * 2^exp exactly.
    let (mantissa, exp, _) = Float::integer_decode(epsilon);
    let power = 4 * k;
    let mut num = BigUint::from(5 * k as u64).pow(power);
    let mut den = BigUint::from(mantissa).pow(power);
    let shift = exp.unsigned_abs() as u64 * power as u64;
    if exp < 0 {
        num <<= shift;
    } else {
        den <<= shift;
    }
    let (q, r) = (&num / &den, &num % &den);
    let ceil = if r.is_zero() { q } else { q + 1u32 };
    Ok(if ceil.is_zero() { BigUint::one() } else { ceil })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetOptions {
    /// Maximum number of partial contractions before giving up.
    pub max_nodes: u64,
}

impl Default for NetOptions {
    fn default() -> Self {
        NetOptions {
            max_nodes: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetBound {
    /// Certified upper bound on `sup |<alpha|psi>|^2`, clamped to `[0, 1]`.
    pub sup_bound: f64,
    /// `-log2(sup_bound)`: certified lower bound on `E_g`.
    pub e_g_lower: f64,
    /// Best value over the net before the covering slack is added.
    pub net_max: f64,
    pub epsilon: f64,
    pub netted_sites: usize,
    pub points_per_site: usize,
    pub nodes_explored: u64,
}

/// Certified bound `sup_alpha |<alpha|psi>|^2 <= max_net + epsilon` for qubits.
///
/// The first `n - 2` sites range over a product of single-site nets, each
/// with fidelity floor `1 - eps^2/(4(n-2))`, so the composed net point is at
/// fidelity at least `1 - eps^2/4` and hence within trace distance `eps` of
/// any product state. The last two sites are optimized exactly through the
/// top singular value of the remaining `2x2` block. Branches whose partial
/// norm cannot beat the current best are pruned.
pub fn net_overlap_bound(psi: &StateVector, epsilon: f64) -> Result<NetBound> {
    net_overlap_bound_with(psi, epsilon, &NetOptions::default(), None)
}

/// As [`net_overlap_bound`]. `witnessed`, when given, must be `|<alpha|psi>|^2`
/// for some actual product state; it only seeds pruning.
pub fn net_overlap_bound_with(
    psi: &StateVector,
    epsilon: f64,
    opts: &NetOptions,
    witnessed: Option<f64>,
) -> Result<NetBound> {
    if psi.local_dim() != 2 {
        return Err(Error::invalid("psi", "nets are only built for qubits (d = 2)"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid("epsilon", format!("{epsilon} is outside (0, 1]")));
    }
    let n = psi.num_sites();
    let finish = |net_max: f64, netted: usize, points: usize, nodes: u64| {
        let sup_bound = (net_max + epsilon).clamp(0.0, 1.0);
        NetBound {
            sup_bound,
            e_g_lower: neg_log(sup_bound, 2),
            net_max,
            epsilon,
            netted_sites: netted,
            points_per_site: points,
            nodes_explored: nodes,
        }
    };
    match n {
        0 => return Err(Error::invalid("psi", "state has no sites")),
        1 => return Ok(finish(1.0, 0, 0, 0)),
        2 => return Ok(finish(top_singular_sqr_2x2(psi.amplitudes()), 0, 0, 1)),
        _ => {}
    }
    let netted = n - 2;
    let net = build_single_site_net(epsilon / (netted as f64).sqrt())?;
    let seed_value = match witnessed {
        Some(v) => v,
        None => {
            let opts = AlsOptions {
                restarts: Some(4),
                max_iters: 100,
                ..AlsOptions::default()
            };
            als_estimate(psi, &opts)?.best_overlap_sqr
        }
    };
    let mut search = Search {
        net: &net,
        best: seed_value.clamp(0.0, 1.0),
        nodes: 0,
        max_nodes: opts.max_nodes,
    };
    search.descend(psi.amplitudes(), netted)?;
    Ok(finish(search.best, netted, net.len(), search.nodes))
}

struct Search<'a> {
    net: &'a SingleSiteNet,
    best: f64,
    nodes: u64,
    max_nodes: u64,
}

impl Search<'_> {
    fn descend(&mut self, amps: &[C64], remaining: usize) -> Result<()> {
        if remaining == 0 {
            self.best = self.best.max(top_singular_sqr_2x2(amps));
            return Ok(());
        }
        for point in &self.net.points {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::NetBudget {
                    explored: self.nodes - 1,
                    best_so_far: self.best,
                });
            }
            let child = contract_site(amps, 2, 0, point);
            let bound: f64 = child.iter().map(|a| a.norm_sqr()).sum();
            if bound > self.best {
                self.descend(&child, remaining - 1)?;
            }
        }
        Ok(())
    }
}

/// Largest squared singular value of the 2x2 block `m[a + 2b]`.
fn top_singular_sqr_2x2(m: &[C64]) -> f64 {
    let frob: f64 = m.iter().map(|a| a.norm_sqr()).sum();
    let det = (m[0] * m[3] - m[1] * m[2]).norm_sqr();
    let disc = (frob * frob - 4.0 * det).max(0.0);
    0.5 * (frob + disc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use crate::state::random_unit_vector;

    #[test]
    fn epsilon_out_of_range() {
        assert!(build_single_site_net(2.0).is_err());
        assert!(build_single_site_net(0.0).is_err());
        assert!(build_single_site_net(-0.5).is_err());
    }

    #[test]
    fn coarse_net_contains_pauli_eigenstates() {
        let net = build_single_site_net(1.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let paulis = [
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(s, 0.0), C64::new(s, 0.0)],
            vec![C64::new(s, 0.0), C64::new(-s, 0.0)],
            vec![C64::new(s, 0.0), C64::new(0.0, s)],
            vec![C64::new(s, 0.0), C64::new(0.0, -s)],
        ];
        for p in &paulis {
            assert!(net.best_fidelity(p) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn sampled_covering_certificate() {
        for eps in [1.0, 0.5, 0.2] {
            let net = build_single_site_net(eps).unwrap();
            let mut rng = rng_from_seed(17);
            for _ in 0..10_000 {
                let v = random_unit_vector(2, &mut rng);
                assert!(1.0 - net.best_fidelity(&v) <= eps * eps / 4.0 + 1e-12);
            }
        }
    }

    #[test]
    fn net_size_within_cardinality_bound() {
        let net = build_single_site_net(0.5).unwrap();
        assert!(net.len() <= 10_000, "{}", net.len());
        for eps in [1.0, 0.7, 0.3, 0.1, 0.05] {
            let net = build_single_site_net(eps).unwrap();
            assert!((net.len() as f64) <= (5.0 / eps).powi(4));
        }
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(product_net_cardinality_bound(1, 1.0).unwrap(), BigUint::from(625u32));
        assert_eq!(
            product_net_cardinality_bound(2, 0.5).unwrap(),
            BigUint::from(25_600_000_000u64)
        );
        assert_eq!(product_net_cardinality_bound(1, 5.0).unwrap(), BigUint::one());
        // (5/0.3)^4 = 77160.49...
        assert_eq!(product_net_cardinality_bound(1, 0.3).unwrap(), BigUint::from(77161u32));
    }

    #[test]
    fn product_state_bound_clamps() {
        let b = net_overlap_bound(&StateVector::zero(2, 2).unwrap(), 0.1).unwrap();
        assert_eq!(b.sup_bound, 1.0);
        assert_eq!(b.e_g_lower, 0.0);
    }

    #[test]
    fn bell_bound() {
        let b = net_overlap_bound(&StateVector::bell(), 0.05).unwrap();
        assert!(b.sup_bound >= 0.5 && b.sup_bound <= 0.55);
        assert!(b.e_g_lower >= 0.862 && b.e_g_lower <= 1.0);
    }

    #[test]
    fn ghz3_bound() {
        let b = net_overlap_bound(&StateVector::ghz(3).unwrap(), 0.05).unwrap();
        assert!(b.e_g_lower >= 0.8, "{b:?}");
    }

    #[test]
    fn node_budget_is_typed() {
        let psi = crate::state::haar_random_state(5, 2, 2).unwrap();
        let err = net_overlap_bound_with(&psi, 0.1, &NetOptions { max_nodes: 100 }, None).unwrap_err();
        match err {
            Error::NetBudget { explored, best_so_far } => {
                assert_eq!(explored, 100);
                assert!(best_so_far > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn qudits_rejected() {
        let psi = crate::state::haar_random_state(2, 3, 2).unwrap();
        assert!(net_overlap_bound(&psi, 0.5).is_err());
    }
}
