//! Monte Carlo overlap tail of Haar vectors against the exact law and the
//! exponential bound.

use egeom::concentration::haar_tail_experiment;

fn main() -> egeom::Result<()> {
    println!("{:>4} {:>5} {:>10} {:>10} {:>12} {:>6}", "d", "eps", "empirical", "exact", "exp. bound", "3sig");
    for d in [2, 4, 16, 64] {
        for eps in [0.1, 0.2, 0.5] {
            let r = haar_tail_experiment(d, eps, 100_000, 7)?;
            println!(
                "{d:>4} {eps:>5} {:>10.5} {:>10.5} {:>12.3e} {:>6}",
                r.empirical_tail, r.exact_tail, r.paper_bound, r.within_three_sigma
            );
        }
    }
    Ok(())
}
