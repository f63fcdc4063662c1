//! Largest ratio between conditional and unconditional output probabilities
//! for random states, against the bound that makes them useless for
//! classical-quantum sampling.
//!
//! With a small register the free product state on the complement can
//! usually steer the conditional state onto a product state, so the maxima
//! sit at ln 1 = 0, far below the bound.

use egeom::concentration::{cq_ratio_bound, cq_ratio_experiment, CqOptions};
use egeom::config::Budget;

fn main() -> egeom::Result<()> {
    let opts = CqOptions {
        max_subsets: 20,
        ..CqOptions::default()
    };
    for (n, k) in [(5, 1), (6, 2), (8, 2)] {
        let r = cq_ratio_experiment(n, k, 3, 0.5, &opts, 9, Budget::default())?;
        let worst = r.sample_max_ln_ratio.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "n={n} k={k}: worst ln ratio {worst:.4}, bound {:.4}, {} registers per sample, exceeding {:.2}",
            cq_ratio_bound(n, k, 0.5),
            r.registers_per_sample,
            r.fraction_exceeding
        );
    }
    Ok(())
}
