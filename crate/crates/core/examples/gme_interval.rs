//! Certified interval for the geometric measure of a few standard states.
//!
//! The upper end comes from the best product state the optimizer finds, the
//! lower end from an epsilon-net certificate (qubits only) or from bipartite
//! spectra when no net is affordable.

use egeom::{e_g_interval, haar_random_state, IntervalOptions, StateVector};

fn main() -> egeom::Result<()> {
    let states = [
        ("bell", StateVector::bell()),
        ("ghz4", StateVector::ghz(4)?),
        ("w3", StateVector::w(3)?),
        ("w5", StateVector::w(5)?),
        ("plus4", StateVector::plus(4)?),
        ("haar3", haar_random_state(3, 2, 7)?),
        ("haar-qutrit3", haar_random_state(3, 3, 7)?),
    ];
    let opts = IntervalOptions::default();
    println!("{:<14} {:>10} {:>10} {:>10}  note", "state", "lower", "upper", "spectral");
    for (name, psi) in &states {
        let iv = e_g_interval(psi, &opts)?;
        println!(
            "{name:<14} {:>10.6} {:>10.6} {:>10.6}  {}",
            iv.lower,
            iv.upper,
            iv.spectral_lower,
            iv.note.as_deref().unwrap_or("")
        );
    }
    println!("closed form for w3: {:.6}", -(4.0f64 / 9.0).log2());
    Ok(())
}
