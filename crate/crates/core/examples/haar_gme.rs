//! Distribution of the geometric measure over Haar-random qubit states,
//! compared with the threshold below which almost no state falls.

use egeom::concentration::{haar_gme_experiment, HaarGmeOptions};
use egeom::config::Budget;

fn main() -> egeom::Result<()> {
    let opts = HaarGmeOptions::default();
    for n in [3, 5, 8, 10] {
        let r = haar_gme_experiment(n, 30, &opts, 1, Budget::default())?;
        println!(
            "n={n:>2} mean {:.4} median {:.4} range [{:.4}, {:.4}] threshold {:>7.4} below {:.2}",
            r.mean_upper, r.median_upper, r.min_upper, r.max_upper, r.threshold, r.fraction_below_threshold
        );
    }
    Ok(())
}
