//! Resource size needed before power-law correlations drop below a target,
//! and a measured correlator on a small state.

use egeom::concentration::{correlation_size_bound, two_point_correlation, CorrelationModel};
use egeom::{StateVector, C64};
use nalgebra::DMatrix;

fn main() -> egeom::Result<()> {
    for (c, p) in [(1.0, 1.0), (1.0, 2.0), (3.0, 1.5)] {
        let model = CorrelationModel::new(c, p)?;
        let sizes: Vec<String> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&eps| Ok(format!("eps {eps}: {}", correlation_size_bound(&model, eps)?)))
            .collect::<egeom::Result<_>>()?;
        println!("f(x) = {c}/x^{p}  ->  {}", sizes.join(", "));
    }

    let z = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]);
    let ghz = StateVector::ghz(5)?;
    let w = StateVector::w(5)?;
    println!("ZZ connected correlator, sites 0 and 4: ghz5 {:.4}, w5 {:.4}",
        two_point_correlation(&ghz, 0, 4, &z)?,
        two_point_correlation(&w, 0, 4, &z)?);
    Ok(())
}
