use egeom::concentration::theorem2_threshold;

fn main() -> egeom::Result<()> {
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}  condition", "n", "threshold", "l", "lhs", "rhs");
    for n in 2..=20 {
        let r = theorem2_threshold(n)?;
        println!(
            "{n:>3} {:>10.5} {:>10.5} {:>10.4} {:>10.4}  {}{}",
            r.threshold,
            r.l,
            r.condition_lhs,
            r.condition_rhs,
            r.condition_holds,
            if r.vacuous { " (vacuous)" } else { "" }
        );
    }
    Ok(())
}
