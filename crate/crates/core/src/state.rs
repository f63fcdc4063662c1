//! Dense pure states of `n` sites with local dimension `d`.
//!
//! Amplitudes are stored in a flat array. Site 0 is the least significant
//! digit of the flat index: basis state `|i_0 i_1 ... i_{n-1}>` lives at
//! `i_0 + d*i_1 + d^2*i_2 + ...`. Serialized states rely on this ordering.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::{Budget, TOLERANCES};
use crate::report::fmt_f64;
use crate::seed::rng_from_seed;
use crate::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_sites: usize,
    local_dim: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing unless the norm is
    /// already within tolerance of one (so stored states load bit-exact).
    pub fn new(num_sites: usize, local_dim: usize, amps: Vec<C64>) -> Result<Self> {
        if local_dim == 0 {
            return Err(Error::invalid("d", "local dimension must be positive"));
        }
        let expected = (local_dim as u128).checked_pow(num_sites as u32);
        if expected != Some(amps.len() as u128) {
            return Err(Error::Shape(format!(
                "{} amplitudes for n={num_sites}, d={local_dim}",
                amps.len()
            )));
        }
        let mut state = StateVector {
            num_sites,
            local_dim,
            amps,
        };
        state.normalize()?;
        Ok(state)
    }

    /// The zero-site state `[1]`, left over after the last site is measured.
    pub fn vacuum() -> Self {
        StateVector {
            num_sites: 0,
            local_dim: 2,
            amps: vec![C64::new(1.0, 0.0)],
        }
    }

    pub fn basis(num_sites: usize, local_dim: usize, index: usize) -> Result<Self> {
        let len = Budget::default().check_dims(num_sites, local_dim)?;
        if index >= len {
            return Err(Error::invalid("index", format!("{index} >= {len}")));
        }
        let mut amps = vec![ZERO; len];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(num_sites, local_dim, amps)
    }

    /// `|0...0>`.
    pub fn zero(num_sites: usize, local_dim: usize) -> Result<Self> {
        Self::basis(num_sites, local_dim, 0)
    }

    /// `(|0...0> + |1...1>)/sqrt(2)` on qubits.
    pub fn ghz(num_sites: usize) -> Result<Self> {
        let len = Budget::default().check_dims(num_sites, 2)?;
        let mut amps = vec![ZERO; len];
        amps[0] = C64::new(1.0, 0.0);
        amps[len - 1] = C64::new(1.0, 0.0);
        Self::new(num_sites, 2, amps)
    }

    pub fn bell() -> Self {
        Self::ghz(2).expect("two qubits always fit")
    }

    /// Equal superposition of all single-excitation qubit strings.
    pub fn w(num_sites: usize) -> Result<Self> {
        let len = Budget::default().check_dims(num_sites, 2)?;
        let mut amps = vec![ZERO; len];
        for s in 0..num_sites {
            amps[1 << s] = C64::new(1.0, 0.0);
        }
        Self::new(num_sites, 2, amps)
    }

    /// `|+>^n`.
    pub fn plus(num_sites: usize) -> Result<Self> {
        let len = Budget::default().check_dims(num_sites, 2)?;
        Self::new(num_sites, 2, vec![C64::new(1.0, 0.0); len])
    }

    pub fn from_product(product: &ProductState, budget: Budget) -> Result<Self> {
        let n = product.num_sites();
        let d = product.local_dim();
        budget.check_dims(n, d)?;
        let mut amps = vec![C64::new(1.0, 0.0)];
        // Prepend higher sites: new index = low + len * digit.
        for factor in product.factors() {
            let len = amps.len();
            let mut next = Vec::with_capacity(len * d);
            for &f in factor {
                next.extend(amps.iter().map(|&a| a * f));
            }
            debug_assert_eq!(next.len(), len * d);
            amps = next;
        }
        Self::new(n, d, amps)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Copy multiplied by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let z = C64::from_polar(1.0, phase);
        StateVector {
            num_sites: self.num_sites,
            local_dim: self.local_dim,
            amps: self.amps.iter().map(|a| a * z).collect(),
        }
    }

    fn normalize(&mut self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if !(norm_sqr > 1e-300) || !norm_sqr.is_finite() {
            return Err(Error::invalid("amps", "state has zero or non-finite norm"));
        }
        if (norm_sqr - 1.0).abs() > TOLERANCES.normalization {
            let inv = 1.0 / norm_sqr.sqrt();
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
        Ok(())
    }

    /// Serializes as `{"n":..,"d":..,"amps":[[re,im],...]}` with 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = format!("{{\"n\":{},\"d\":{},\"amps\":[", self.num_sites, self.local_dim);
        for (i, a) in self.amps.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            out.push_str(&fmt_f64(a.re));
            out.push(',');
            out.push_str(&fmt_f64(a.im));
            out.push(']');
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct StateFile {
            n: usize,
            d: usize,
            amps: Vec<[f64; 2]>,
        }
        let file: StateFile = serde_json::from_str(text)?;
        Self::new(
            file.n,
            file.d,
            file.amps.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        )
    }
}

/// A product of `n` single-site unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    factors: Vec<Vec<C64>>,
}

// Serialized as a list of factors, each a list of `[re, im]` pairs.
impl Serialize for ProductState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<Vec<[f64; 2]>> = self
            .factors
            .iter()
            .map(|f| f.iter().map(|a| [a.re, a.im]).collect())
            .collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProductState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let factors = pairs
            .into_iter()
            .map(|f| f.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        ProductState::new(factors).map_err(serde::de::Error::custom)
    }
}

impl ProductState {
    /// Normalizes every factor. All factors must share one dimension.
    pub fn new(factors: Vec<Vec<C64>>) -> Result<Self> {
        let d = factors.first().map_or(0, Vec::len);
        if d == 0 {
            return Err(Error::Shape("product state needs non-empty factors".into()));
        }
        let mut out = Vec::with_capacity(factors.len());
        for (site, mut f) in factors.into_iter().enumerate() {
            if f.len() != d {
                return Err(Error::Shape(format!("factor {site} has length {}, expected {d}", f.len())));
            }
            normalize_vec(&mut f)
                .ok_or_else(|| Error::invalid("factors", format!("factor {site} has zero norm")))?;
            out.push(f);
        }
        Ok(ProductState { factors: out })
    }

    /// Product of computational basis vectors, `digits[s]` on site `s`.
    pub fn basis(local_dim: usize, digits: &[usize]) -> Result<Self> {
        let factors = digits
            .iter()
            .map(|&k| {
                let mut v = vec![ZERO; local_dim];
                *v.get_mut(k).ok_or_else(|| Error::invalid("digits", format!("{k} >= {local_dim}")))? =
                    C64::new(1.0, 0.0);
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    /// Independent Haar-random factors.
    pub fn haar_random<R: Rng>(num_sites: usize, local_dim: usize, rng: &mut R) -> Self {
        let factors = (0..num_sites)
            .map(|_| random_unit_vector(local_dim, rng))
            .collect();
        ProductState { factors }
    }

    pub fn num_sites(&self) -> usize {
        self.factors.len()
    }

    pub fn local_dim(&self) -> usize {
        self.factors[0].len()
    }

    pub fn factors(&self) -> &[Vec<C64>] {
        &self.factors
    }

    pub fn factor(&self, site: usize) -> &[C64] {
        &self.factors[site]
    }

    /// Replaces one factor with `v / |v|`. Returns false (leaving the factor
    /// untouched) when `v` is numerically zero.
    pub fn set_factor(&mut self, site: usize, mut v: Vec<C64>) -> bool {
        if normalize_vec(&mut v).is_none() {
            return false;
        }
        self.factors[site] = v;
        true
    }

    pub(crate) fn set_factor_unchecked(&mut self, site: usize, v: Vec<C64>) {
        self.factors[site] = v;
    }
}

/// Scales `v` to unit norm, returning the original norm, or `None` if it vanishes.
pub(crate) fn normalize_vec(v: &mut [C64]) -> Option<f64> {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 1e-150) || !norm.is_finite() {
        return None;
    }
    let inv = 1.0 / norm;
    v.iter_mut().for_each(|a| *a *= inv);
    Some(norm)
}

/// Standard complex Gaussian via Box–Muller on two uniforms.
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    // 1 - U lies in (0, 1], keeping the logarithm finite.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    C64::new(r * t.cos(), r * t.sin())
}

/// Haar-random unit vector in `C^dim`.
pub fn random_unit_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if normalize_vec(&mut v).is_some() {
            return v;
        }
    }
}

/// Haar-random state on `n` sites of dimension `d`, within the default budget.
pub fn haar_random_state(n: usize, d: usize, seed: u64) -> Result<StateVector> {
    haar_random_state_with_budget(n, d, seed, Budget::default())
}

pub fn haar_random_state_with_budget(
    n: usize,
    d: usize,
    seed: u64,
    budget: Budget,
) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one site"));
    }
    if d < 2 {
        return Err(Error::invalid("d", "local dimension must be at least 2"));
    }
    let len = budget.check_dims(n, d)?;
    let mut rng = rng_from_seed(seed);
    let amps = (0..len).map(|_| complex_gaussian(&mut rng)).collect();
    StateVector::new(n, d, amps)
}

/// Contracts site `site` of a uniform-dimension tensor against `conj(v)`.
pub(crate) fn contract_site(amps: &[C64], d: usize, site: usize, v: &[C64]) -> Vec<C64> {
    let stride = d.pow(site as u32);
    let block = stride * d;
    let mut out = vec![ZERO; amps.len() / d];
    for (chunk, dst) in amps.chunks_exact(block).zip(out.chunks_exact_mut(stride)) {
        for (a, src) in chunk.chunks_exact(stride).enumerate() {
            let c = v[a].conj();
            for (o, s) in dst.iter_mut().zip(src) {
                *o += c * s;
            }
        }
    }
    out
}

fn check_product_shape(alpha: &ProductState, psi: &StateVector) -> Result<()> {
    if alpha.num_sites() != psi.num_sites() || alpha.local_dim() != psi.local_dim() {
        return Err(Error::Shape(format!(
            "product state ({} sites, d={}) vs state ({} sites, d={})",
            alpha.num_sites(),
            alpha.local_dim(),
            psi.num_sites(),
            psi.local_dim()
        )));
    }
    Ok(())
}

/// `<alpha|psi>` by contracting one site at a time.
pub fn overlap(alpha: &ProductState, psi: &StateVector) -> Result<C64> {
    check_product_shape(alpha, psi)?;
    let d = psi.local_dim();
    let mut cur = contract_site(psi.amplitudes(), d, 0, alpha.factor(0));
    for f in &alpha.factors()[1..] {
        cur = contract_site(&cur, d, 0, f);
    }
    Ok(cur[0])
}

/// Contraction of `psi` with every factor of `alpha` except `site`.
///
/// Setting factor `site` to the normalized result maximizes `|<alpha|psi>|`
/// over that factor, and the maximum equals the norm of the result.
pub fn environment_vector(psi: &StateVector, alpha: &ProductState, site: usize) -> Result<Vec<C64>> {
    check_product_shape(alpha, psi)?;
    let n = psi.num_sites();
    if site >= n {
        return Err(Error::invalid("site", format!("{site} >= {n}")));
    }
    Ok(environment_unchecked(psi.amplitudes(), psi.local_dim(), n, alpha, site))
}

pub(crate) fn environment_unchecked(
    amps: &[C64],
    d: usize,
    n: usize,
    alpha: &ProductState,
    site: usize,
) -> Vec<C64> {
    let mut cur: Option<Vec<C64>> = None;
    // Highest sites first so lower positions stay put.
    for s in (site + 1..n).rev() {
        let src = cur.as_deref().unwrap_or(amps);
        cur = Some(contract_site(src, d, s, alpha.factor(s)));
    }
    for s in (0..site).rev() {
        let src = cur.as_deref().unwrap_or(amps);
        cur = Some(contract_site(src, d, s, alpha.factor(s)));
    }
    cur.unwrap_or_else(|| amps.to_vec())
}

/// One outcome of a local projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    /// Normalized post-measurement state on the remaining sites, or `None`
    /// when the branch has zero probability.
    pub state: Option<StateVector>,
}

/// Checks that `basis` is `d` orthonormal vectors of length `d`.
pub fn check_basis(basis: &[Vec<C64>], d: usize) -> Result<()> {
    if basis.len() != d || basis.iter().any(|b| b.len() != d) {
        return Err(Error::Shape(format!("basis must hold {d} vectors of length {d}")));
    }
    let mut deviation = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((ip - target).norm());
        }
    }
    if deviation > TOLERANCES.orthonormality {
        return Err(Error::NonOrthonormalBasis { deviation });
    }
    Ok(())
}

/// Measures `site` in `basis`, returning one branch per basis vector with
/// Born probability `|(<b_k| ⊗ 1) psi|^2`. The measured site is removed.
pub fn measure_local(psi: &StateVector, site: usize, basis: &[Vec<C64>]) -> Result<Vec<Branch>> {
    let n = psi.num_sites();
    let d = psi.local_dim();
    if site >= n {
        return Err(Error::invalid("site", format!("{site} >= {n}")));
    }
    check_basis(basis, d)?;
    let branches = basis
        .iter()
        .map(|b| {
            let mut rest = contract_site(psi.amplitudes(), d, site, b);
            let probability: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
            let state = normalize_vec(&mut rest).map(|_| StateVector {
                num_sites: n - 1,
                local_dim: if n == 1 { 2 } else { d },
                amps: rest,
            });
            Branch { probability, state }
        })
        .collect();
    Ok(branches)
}

/// Computational basis of `C^d`.
pub fn computational_basis(d: usize) -> Vec<Vec<C64>> {
    (0..d)
        .map(|k| (0..d).map(|j| C64::new(if j == k { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

/// Qubit state `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
pub fn bloch_vector(theta: f64, phi: f64) -> Vec<C64> {
    vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}
