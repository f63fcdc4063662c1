//! How the net certificate tightens as epsilon shrinks, and what it costs.

use egeom::gme::{build_single_site_net, net_overlap_bound, product_net_cardinality_bound};
use egeom::haar_random_state;

fn main() -> egeom::Result<()> {
    for eps in [0.5, 0.2, 0.1, 0.05] {
        let net = build_single_site_net(eps)?;
        println!(
            "eps {eps:<5} single-site net {:>6} points, product-net cardinality bound (k=4) {}",
            net.len(),
            product_net_cardinality_bound(4, eps)?
        );
    }

    let psi = haar_random_state(4, 2, 11)?;
    println!("\nHaar 4-qubit state, seed 11");
    for eps in [0.4, 0.2, 0.1] {
        let b = net_overlap_bound(&psi, eps)?;
        println!(
            "eps {eps:<4} net max {:.6}  sup bound {:.6}  E_g >= {:.6}  ({} nodes)",
            b.net_max, b.sup_bound, b.e_g_lower, b.nodes_explored
        );
    }
    Ok(())
}
