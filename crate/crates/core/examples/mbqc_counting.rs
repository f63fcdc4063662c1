//! Exact outcome trees of measurement strategies, and the counting inequality
//! relating them to fair coin flips.
//!
//! A highly entangled resource spreads its outcome distribution so thinly
//! that replacing every measurement outcome by a coin flip finds a verified
//! answer almost as often.

use egeom::gme::{e_g_interval, IntervalOptions};
use egeom::mbqc::{run_strategy_exact, theorem1_check, AdaptiveParity, AllEqual, HashedDensity, RandomAdaptive, Readout, Strategy, Verifier};
use egeom::{haar_random_state, StateVector};

fn main() -> egeom::Result<()> {
    let ghz = StateVector::ghz(4)?;
    let report = run_strategy_exact(&ghz, &Readout::z(), &AllEqual)?;
    println!("ghz4, z readout, all-equal verifier");
    for r in &report.records {
        println!("  {} p={:.4} verified={}", r.history, r.probability, r.verified);
    }
    println!("  quantum {:.4} vs coin {:.4}\n", report.prob_quantum_g, report.prob_coin_g);

    let psi = haar_random_state(6, 2, 3)?;
    let interval = e_g_interval(&psi, &IntervalOptions::default())?;
    println!("haar6: certified E_g >= {:.4}", interval.certified_lower());
    let strategies: Vec<Box<dyn Strategy>> = vec![Box::new(Readout::x()), Box::new(AdaptiveParity), Box::new(RandomAdaptive::new(5))];
    let verifier = HashedDensity::new(0.2, 1)?;
    for s in &strategies {
        let rec = theorem1_check(&psi, s.as_ref(), &verifier, &interval)?;
        println!(
            "  {:<16} {:<12} quantum {:.4} coin {:.4} margin {:+.4} worst leaf ratio {:.3}",
            s.name(),
            verifier.name(),
            rec.prob_quantum_g,
            rec.prob_coin_g,
            rec.counting_margin,
            rec.max_branch_ratio
        );
    }
    Ok(())
}
