use egeom::mbqc::{coinflip_failure_rate, coinflip_solve, coinflip_trials, Factoring, PlantedPrefix, Readout};

fn main() -> egeom::Result<()> {
    let (delta, p_f) = (2.0, 0.01);
    println!("k = {} trials for delta {delta}, p_f {p_f}", coinflip_trials(delta, p_f)?);

    let planted = PlantedPrefix { delta: 2 };
    let rate = coinflip_failure_rate(8, &Readout::z(), &planted, delta, p_f, 10_000, 1)?;
    println!(
        "planted density 1/8: {} failures in {} runs ({:.4}, limit {:.4})",
        rate.failures,
        rate.runs,
        rate.failure_rate,
        rate.p_f + 3.0 * rate.sigma
    );

    // 4+4 output bits read as two factors of 143 = 11 * 13.
    let out = coinflip_solve(8, &Readout::z(), &Factoring { modulus: 143 }, 6.0, 0.01, 4)?;
    println!("factoring 143 by coin flips: {:?} after {} of {} trials", out.solution, out.trials_used, out.k);
    Ok(())
}
