//! Tree tensor networks built from Haar unitaries: sup overlap of the layer
//! isometry as the bond dimension grows, and the normalized measure of the
//! resulting state.

use egeom::gme::AlsOptions;
use egeom::mera::{isometry_overlap_trend, normalized_gme, TreeNetworkSpec};

fn main() -> egeom::Result<()> {
    let trend = isometry_overlap_trend(&[2, 3, 4, 6, 8], 10, 20, 1)?;
    for p in &trend.points {
        println!("d={:>2} mean sup overlap {:.4}  d*mean {:.3}", p.d, p.mean_sup_overlap, p.scaled_mean);
    }
    println!("log-log slope {:.3}\n", trend.log_log_slope);

    for (k, d) in [(1, 4), (2, 2), (2, 4), (3, 2)] {
        let spec = TreeNetworkSpec::haar(k, d, 5, false)?;
        let g = normalized_gme(&spec, &AlsOptions::with_seed(2))?;
        println!("k={k} d={d}: {} sites, normalized E_g {:.4} (prediction {:.3})", g.num_sites, g.value, g.prediction);
    }
    Ok(())
}
