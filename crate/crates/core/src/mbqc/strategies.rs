use std::f64::consts::PI;

use super::{history_string, Action, Strategy};
use crate::seed::derive_seed;
use crate::state::{bloch_vector, C64};
use crate::{Error, Result};

fn ascii_bits(history: &[u8]) -> Vec<u8> {
    history_string(history).into_bytes()
}

/// Measures every site in order in one fixed basis and outputs the outcome string.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    label: &'static str,
    basis: [Vec<C64>; 2],
}

impl Readout {
    pub fn z_basis() -> [Vec<C64>; 2] {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        [vec![one, zero], vec![zero, one]]
    }

    pub fn x_basis() -> [Vec<C64>; 2] {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        [vec![h, h], vec![h, -h]]
    }

    pub fn z() -> Self {
        Readout {
            label: "z-readout",
            basis: Self::z_basis(),
        }
    }

    pub fn x() -> Self {
        Readout {
            label: "x-readout",
            basis: Self::x_basis(),
        }
    }
}

impl Strategy for Readout {
    fn name(&self) -> String {
        self.label.to_string()
    }

    fn decide(&self, num_sites: usize, history: &[u8]) -> Action {
        if history.len() < num_sites {
            Action::Measure {
                site: history.len(),
                basis: self.basis.clone(),
            }
        } else {
            Action::Halt(ascii_bits(history))
        }
    }
}

/// Measures sites in order, switching to the X basis whenever the outcomes so
/// far have odd parity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AdaptiveParity;

impl Strategy for AdaptiveParity {
    fn name(&self) -> String {
        "adaptive-parity".into()
    }

    fn decide(&self, num_sites: usize, history: &[u8]) -> Action {
        if history.len() == num_sites {
            return Action::Halt(ascii_bits(history));
        }
        let odd = history.iter().filter(|&&b| b == 1).count() % 2 == 1;
        Action::Measure {
            site: history.len(),
            basis: if odd { Readout::x_basis() } else { Readout::z_basis() },
        }
    }
}

/// A pseudo-random adaptive strategy: site order, measurement axes and
/// stopping depth are all functions of a hash of the seed and the history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomAdaptive {
    seed: u64,
}

impl RandomAdaptive {
    pub fn new(seed: u64) -> Self {
        RandomAdaptive { seed }
    }

    fn key(&self, history: &[u8]) -> u64 {
        history
            .iter()
            .fold(derive_seed(self.seed, history.len() as u64), |h, &b| derive_seed(h, u64::from(b)))
    }

    fn choose_site(&self, remaining: &[usize], key: u64) -> usize {
        remaining[((key >> 8) % remaining.len() as u64) as usize]
    }
}

impl Strategy for RandomAdaptive {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn decide(&self, num_sites: usize, history: &[u8]) -> Action {
        let mut remaining: Vec<usize> = (0..num_sites).collect();
        for t in 0..history.len() {
            let site = self.choose_site(&remaining, self.key(&history[..t]));
            remaining.retain(|&s| s != site);
        }
        let key = self.key(history);
        let t = history.len();
        if remaining.is_empty() || (t > 0 && key.is_multiple_of(num_sites as u64 + 1)) {
            return Action::Halt(ascii_bits(history));
        }
        let theta = ((key >> 20) & 0xffff) as f64 / 65536.0 * PI;
        let phi = ((key >> 36) & 0xffff) as f64 / 65536.0 * 2.0 * PI;
        Action::Measure {
            site: self.choose_site(&remaining, key),
            basis: [bloch_vector(theta, phi), bloch_vector(PI - theta, phi + PI)],
        }
    }
}

/// `z-readout`, `x-readout`, `adaptive-parity` or `random:SEED`.
pub fn parse_strategy(spec: &str) -> Result<Box<dyn Strategy>> {
    let (name, param) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    let bad = || Error::invalid("strategy", format!("unknown strategy {spec:?}"));
    match (name, param) {
        ("z-readout", None) => Ok(Box::new(Readout::z())),
        ("x-readout", None) => Ok(Box::new(Readout::x())),
        ("adaptive-parity", None) => Ok(Box::new(AdaptiveParity)),
        ("random", Some(seed)) => Ok(Box::new(RandomAdaptive::new(seed.parse().map_err(|_| bad())?))),
        _ => Err(bad()),
    }
}
