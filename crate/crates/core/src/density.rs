//! Reduced density matrices and the trace distance.

use nalgebra::DMatrix;

use crate::config::{Budget, TOLERANCES};
use crate::state::{StateVector, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace. Positivity is not checked here.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Shape("density matrix must be square and non-empty".into()));
        }
        let herm = hermiticity_deviation(&entries);
        if herm > TOLERANCES.hermiticity {
            return Err(Error::NonHermitian { deviation: herm });
        }
        let trace = entries.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TOLERANCES.trace {
            return Err(Error::invalid("entries", format!("trace {trace} is not 1")));
        }
        Ok(DensityMatrix { entries })
    }

    /// `|v><v|` for a unit vector `v`.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let col = nalgebra::DVector::from_column_slice(v);
        Self::new(&col * col.adjoint())
    }

    /// `1/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            entries: DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// `tr(rho * op)`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        if op.shape() != self.entries.shape() {
            return Err(Error::Shape("operator and density matrix differ in shape".into()));
        }
        Ok((&self.entries * op).trace())
    }
}

pub(crate) fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Partial trace of `|psi><psi|` onto the sites in `keep`.
///
/// The kept sites are ordered ascending and keep the little-endian digit
/// convention of [`StateVector`]: `keep[0]` is the least significant.
pub fn reduced_density(psi: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    reduced_density_with_budget(psi, keep, Budget::default())
}

pub fn reduced_density_with_budget(
    psi: &StateVector,
    keep: &[usize],
    budget: Budget,
) -> Result<DensityMatrix> {
    let n = psi.num_sites();
    let d = psi.local_dim();
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::invalid("keep", "must name at least one site"));
    }
    if let Some(&bad) = keep.iter().find(|&&s| s >= n) {
        return Err(Error::invalid("keep", format!("site {bad} >= {n}")));
    }
    budget.check_dims(2 * keep.len(), d)?;
    let kept_dim = d.pow(keep.len() as u32);
    let env_dim = psi.amplitudes().len() / kept_dim;
    let is_kept: Vec<bool> = (0..n).map(|s| keep.contains(&s)).collect();

    let mut m = DMatrix::<C64>::zeros(kept_dim, env_dim);
    for (flat, &amp) in psi.amplitudes().iter().enumerate() {
        let (mut rest, mut ki, mut ei, mut kw, mut ew) = (flat, 0, 0, 1, 1);
        for &kept in &is_kept {
            let digit = rest % d;
            rest /= d;
            if kept {
                ki += digit * kw;
                kw *= d;
            } else {
                ei += digit * ew;
                ew *= d;
            }
        }
        m[(ki, ei)] = amp;
    }
    let rho = &m * m.adjoint();
    DensityMatrix::new(rho)
}

/// `(1/2) ||rho - sigma||_1` from the eigenvalues of the Hermitian difference.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!("dims {} and {}", rho.dim(), sigma.dim())));
    }
    let diff = rho.entries() - sigma.entries();
    let eig = diff.symmetric_eigenvalues();
    Ok(0.5 * eig.iter().map(|e| e.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> bool {
        (a.entries() - b.entries()).iter().all(|x| x.norm() <= tol)
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = reduced_density(&StateVector::bell(), &[0]).unwrap();
        assert!(approx_eq(&rho, &DensityMatrix::maximally_mixed(2), 1e-15));
    }

    #[test]
    fn product_marginal_is_pure() {
        let rho = reduced_density(&StateVector::zero(2, 2).unwrap(), &[0]).unwrap();
        let zero = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(approx_eq(&rho, &zero, 1e-15));
    }

    #[test]
    fn ghz3_two_site_marginal() {
        let rho = reduced_density(&StateVector::ghz(3).unwrap(), &[0, 1]).unwrap();
        let mut expected = DMatrix::<C64>::zeros(4, 4);
        expected[(0, 0)] = C64::new(0.5, 0.0);
        expected[(3, 3)] = C64::new(0.5, 0.0);
        assert!(approx_eq(&rho, &DensityMatrix::new(expected).unwrap(), 1e-15));
    }

    #[test]
    fn budget_is_enforced() {
        let psi = crate::state::haar_random_state(6, 2, 1).unwrap();
        let err = reduced_density_with_budget(&psi, &[0, 1, 2, 3], Budget::new(64)).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn trace_distance_examples() {
        let zero = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let one = DensityMatrix::pure(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-15);
        assert!(trace_distance(&zero, &DensityMatrix::maximally_mixed(4)).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(0, 1)] = C64::new(0.3, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NonHermitian { .. })));
    }
}
