use sha2::{Digest, Sha256};

use super::Verifier;
use crate::{Error, Result};

/// Counts verifier steps against a fixed allowance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepMeter {
    used: u64,
    budget: u64,
}

impl StepMeter {
    pub fn new(budget: u64) -> Self {
        StepMeter { used: 0, budget }
    }

    pub fn tick(&mut self, steps: u64) -> Result<()> {
        self.used = self.used.saturating_add(steps);
        if self.used > self.budget {
            return Err(Error::VerifierBudget { budget: self.budget });
        }
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

fn quadratic_budget(len: usize) -> u64 {
    let l = len as u64 + 1;
    16 * l * l + 64
}

fn bits_of(output: &[u8]) -> Option<Vec<bool>> {
    output
        .iter()
        .map(|&c| match c {
            b'0' => Some(false),
            b'1' => Some(true),
            _ => None,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AcceptAll;

impl Verifier for AcceptAll {
    fn name(&self) -> String {
        "accept-all".into()
    }
    fn cost_budget(&self, _: usize) -> u64 {
        1
    }
    fn check(&self, _: &[u8], meter: &mut StepMeter) -> Result<bool> {
        meter.tick(1)?;
        Ok(true)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AcceptNone;

impl Verifier for AcceptNone {
    fn name(&self) -> String {
        "accept-none".into()
    }
    fn cost_budget(&self, _: usize) -> u64 {
        1
    }
    fn check(&self, _: &[u8], meter: &mut StepMeter) -> Result<bool> {
        meter.tick(1)?;
        Ok(false)
    }
}

/// Accepts exactly one output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptExact {
    target: Vec<u8>,
}

impl AcceptExact {
    pub fn new(target: &str) -> Self {
        AcceptExact {
            target: target.as_bytes().to_vec(),
        }
    }
}

impl Verifier for AcceptExact {
    fn name(&self) -> String {
        format!("exact:{}", String::from_utf8_lossy(&self.target))
    }
    fn cost_budget(&self, len: usize) -> u64 {
        len as u64 + 1
    }
    fn check(&self, output: &[u8], meter: &mut StepMeter) -> Result<bool> {
        meter.tick(output.len() as u64 + 1)?;
        Ok(output == self.target.as_slice())
    }
}

/// Accepts non-empty outputs whose bytes are all equal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AllEqual;

impl Verifier for AllEqual {
    fn name(&self) -> String {
        "all-equal".into()
    }
    fn cost_budget(&self, len: usize) -> u64 {
        len as u64 + 1
    }
    fn check(&self, output: &[u8], meter: &mut StepMeter) -> Result<bool> {
        meter.tick(output.len() as u64 + 1)?;
        Ok(!output.is_empty() && output.iter().all(|&b| b == output[0]))
    }
}

/// Output bit `i` selects weight `i`; accepts when the selection sums to the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSum {
    pub target: u64,
    pub weights: Vec<u64>,
}

impl Verifier for SubsetSum {
    fn name(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(u64::to_string).collect();
        format!("subset-sum:{}:{}", self.target, w.join(","))
    }
    fn cost_budget(&self, len: usize) -> u64 {
        quadratic_budget(len)
    }
    fn check(&self, output: &[u8], meter: &mut StepMeter) -> Result<bool> {
        meter.tick(output.len() as u64 + 1)?;
        let Some(bits) = bits_of(output).filter(|b| b.len() == self.weights.len()) else {
            return Ok(false);
        };
        let mut sum = 0u128;
        for (&on, &w) in bits.iter().zip(&self.weights) {
            meter.tick(1)?;
            if on {
                sum += u128::from(w);
            }
        }
        Ok(sum == u128::from(self.target))
    }
}

/// Reads the output as two big-endian binary halves `a`, `b` and accepts a
/// nontrivial factorization `a b = N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factoring {
    pub modulus: u64,
}

impl Verifier for Factoring {
    fn name(&self) -> String {
        format!("factor:{}", self.modulus)
    }
    fn cost_budget(&self, len: usize) -> u64 {
        quadratic_budget(len)
    }
    fn check(&self, output: &[u8], meter: &mut StepMeter) -> Result<bool> {
        let Some(bits) = bits_of(output).filter(|b| !b.is_empty() && b.len() % 2 == 0 && b.len() <= 128) else {
            meter.tick(1)?;
            return Ok(false);
        };
        let half = bits.len() / 2;
        let read = |bs: &[bool]| bs.iter().fold(0u128, |acc, &b| acc << 1 | u128::from(b));
        let (a, b) = (read(&bits[..half]), read(&bits[half..]));
        // Schoolbook multiplication cost.
        meter.tick((half * half) as u64 + 1)?;
        Ok(a > 1 && b > 1 && a.checked_mul(b) == Some(u128::from(self.modulus)))
    }
}

/// Accepts bit strings whose first `delta + 1` bits are zero: density `2^-(delta+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantedPrefix {
    pub delta: usize,
}

impl Verifier for PlantedPrefix {
    fn name(&self) -> String {
        format!("planted:{}", self.delta)
    }
    fn cost_budget(&self, _: usize) -> u64 {
        self.delta as u64 + 2
    }
    fn check(&self, output: &[u8], meter: &mut StepMeter) -> Result<bool> {
        let prefix = self.delta + 1;
        meter.tick(prefix as u64)?;
        Ok(output.len() >= prefix && output[..prefix].iter().all(|&b| b == b'0'))
    }
}

/// Accepts an output when its salted SHA-256 falls below `density` of the range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HashedDensity {
    density: f64,
    salt: u64,
}

impl HashedDensity {
    pub fn new(density: f64, salt: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::invalid("density", "must lie in [0, 1]"));
        }
        Ok(HashedDensity { density, salt })
    }
}

impl Verifier for HashedDensity {
    fn name(&self) -> String {
        format!("hashed:{}:{}", self.density, self.salt)
    }
    fn cost_budget(&self, len: usize) -> u64 {
        len as u64 + 64
    }
    fn check(&self, output: &[u8], meter: &mut StepMeter) -> Result<bool> {
        meter.tick(output.len() as u64 + 64)?;
        let mut h = Sha256::new();
        h.update(self.salt.to_le_bytes());
        h.update(output);
        let digest = h.finalize();
        let top = u64::from_be_bytes(digest[..8].try_into().expect("digest is 32 bytes"));
        Ok((top as f64) < self.density * 2f64.powi(64))
    }
}

/// `accept-all`, `accept-none`, `all-equal`, `exact:BITS`,
/// `subset-sum:TARGET:W1,W2,..`, `factor:N`, `planted:DELTA`,
/// `hashed:DENSITY[:SALT]`.
pub fn parse_verifier(spec: &str) -> Result<Box<dyn Verifier>> {
    let bad = || Error::invalid("verifier", format!("cannot parse {spec:?}"));
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    Ok(match (name, args.as_slice()) {
        ("accept-all", []) => Box::new(AcceptAll),
        ("accept-none", []) => Box::new(AcceptNone),
        ("all-equal", []) => Box::new(AllEqual),
        ("exact", [bits]) => Box::new(AcceptExact::new(bits)),
        ("subset-sum", [target, weights]) => Box::new(SubsetSum {
            target: num(target)?,
            weights: weights.split(',').map(num).collect::<Result<_>>()?,
        }),
        ("factor", [modulus]) => Box::new(Factoring { modulus: num(modulus)? }),
        ("planted", [delta]) => Box::new(PlantedPrefix {
            delta: num(delta)? as usize,
        }),
        ("hashed", [density]) => Box::new(HashedDensity::new(density.parse().map_err(|_| bad())?, 0)?),
        ("hashed", [density, salt]) => Box::new(HashedDensity::new(density.parse().map_err(|_| bad())?, num(salt)?)?),
        _ => return Err(bad()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_problems() {
        let ss = parse_verifier("subset-sum:15:3,5,7,11").unwrap();
        assert!(!ss.verify(b"0110").unwrap());
        assert!(!ss.verify(b"1001").unwrap());
        assert!(!ss.verify(b"0101").unwrap());
        assert!(ss.verify(b"1110").unwrap());
        assert!(!ss.verify(b"111").unwrap());

        let f = parse_verifier("factor:15").unwrap();
        assert!(f.verify(b"011101").unwrap());
        assert!(f.verify(b"101011").unwrap());
        assert!(!f.verify(b"001111").unwrap());
        assert!(!f.verify(b"0111").unwrap());
    }

    #[test]
    fn planted_density() {
        let v = PlantedPrefix { delta: 2 };
        let accepted = (0..256u32)
            .filter(|x| v.verify(format!("{x:08b}").as_bytes()).unwrap())
            .count();
        assert_eq!(accepted, 32);
    }

    #[test]
    fn hashed_density_is_roughly_right() {
        let v = HashedDensity::new(0.25, 9).unwrap();
        let accepted = (0..4096u32)
            .filter(|x| v.verify(format!("{x:012b}").as_bytes()).unwrap())
            .count();
        assert!((accepted as f64 / 4096.0 - 0.25).abs() < 0.03);
    }

    #[test]
    fn meter_enforces_budget() {
        let mut m = StepMeter::new(3);
        m.tick(3).unwrap();
        assert!(matches!(m.tick(1), Err(Error::VerifierBudget { budget: 3 })));
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "exact", "factor:x", "planted", "hashed:2.0", "accept-all:1"] {
            assert!(parse_verifier(s).is_err(), "{s}");
        }
    }
}
