//! Lower cut-rank bound, optimizer estimate and Pauli persistency for graph
//! states of small graph families.

use egeom::gme::{als_estimate, AlsOptions};
use egeom::graph::{best_cut, egeom_lower_bound, graph_state_vector, pauli_persistency, replay, Graph, DEFAULT_SEARCH_NODES};

fn main() -> egeom::Result<()> {
    let families = [
        ("star5", Graph::star(5)?),
        ("path5", Graph::path(5)?),
        ("path6", Graph::path(6)?),
        ("cycle6", Graph::cycle(6)?),
        ("complete5", Graph::complete(5)?),
        ("cube", Graph::from_edges(8, &[(0, 1), (1, 3), (3, 2), (2, 0), (4, 5), (5, 7), (7, 6), (6, 4), (0, 4), (1, 5), (2, 6), (3, 7)])?),
    ];
    println!("{:<10} {:>6} {:>9} {:>12}  witness", "graph", "lower", "estimate", "persistency");
    for (name, g) in &families {
        let est = als_estimate(&graph_state_vector(g)?, &AlsOptions::with_seed(1))?;
        let p = pauli_persistency(g, DEFAULT_SEARCH_NODES)?;
        assert!(replay(g, &p.witness)?.is_edgeless());
        let witness: Vec<String> = p.witness.iter().map(|(v, q)| format!("{q}{v}")).collect();
        println!("{name:<10} {:>6.1} {:>9.5} {:>12}  {}", egeom_lower_bound(g), est.upper, p.value, witness.join(" "));
    }
    let (rank, part) = best_cut(&families[3].1);
    println!("\nbest cut of cycle6: {part:?} with rank {rank}");
    Ok(())
}
