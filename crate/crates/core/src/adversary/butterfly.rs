//! Paired port numbering of the clique butterfly.

use super::AdversaryError;
use crate::graph::generators::{butterfly_vertex, check_butterfly_params};
use crate::graph::{NodeId, PairedNumbering, Port, PortGraph};

/// Walecki decomposition of `K_k`, `k` odd, into `(k - 1) / 2` Hamiltonian
/// cycles. Vertex 0 is the hub; the others sit on a circle and each cycle is
/// the zig-zag path `c, c+1, c-1, c+2, c-2, …` rotated by `c`, closed through
/// the hub. Each cycle is listed once; it closes from its last vertex back to
/// its first.
pub fn hamiltonian_decomposition(k: usize) -> Vec<Vec<usize>> {
    assert!(k >= 3 && k % 2 == 1, "Walecki decomposition needs odd k >= 3");
    let m = (k - 1) / 2;
    let ring = 2 * m;
    (0..m)
        .map(|c| {
            let mut cycle = Vec::with_capacity(k);
            cycle.push(0);
            cycle.push(c + 1);
            for s in 1..m {
                cycle.push((c + s) % ring + 1);
                cycle.push((c + ring - s) % ring + 1);
            }
            cycle.push((c + m) % ring + 1);
            cycle
        })
        .collect()
}

/// Numbers the `k`-clique-`p`-butterfly so that every edge carries ports
/// `{q, Δ+1-q}` with `Δ = k + 3`.
///
/// Bridge edges into the next column leave by `p1` (to row `2i mod k`) and `p2`
/// (to row `2i+1 mod k`), so the backward bridges are `Δ+1-p1` and `Δ+1-p2`.
/// The clique edges use the remaining `(k-1)/2` pairs, one pair per Hamiltonian
/// cycle of `K_k`: walking the cycle forward leaves by `q`.
pub fn number_butterfly(
    k: usize,
    p: usize,
    p1: Port,
    p2: Port,
) -> Result<PairedNumbering, AdversaryError> {
    check_butterfly_params(k, p)?;
    let delta = (k + 3) as Port;
    let half = delta / 2;
    if p1 == p2 || !(1..=half).contains(&p1) || !(1..=half).contains(&p2) {
        return Err(AdversaryError::InvalidParams(format!(
            "bridge ports must be distinct and in 1..={half} (got {p1}, {p2})"
        )));
    }
    let clique_ports: Vec<Port> = (1..=half).filter(|&q| q != p1 && q != p2).collect();
    let cycles = hamiltonian_decomposition(k);
    debug_assert_eq!(clique_ports.len(), cycles.len());

    let n = k * p;
    let mut slots: Vec<Vec<Option<NodeId>>> = vec![vec![None; delta as usize]; n];
    let mut set = |v: NodeId, port: Port, w: NodeId| {
        let slot = &mut slots[v.index()][port as usize - 1];
        debug_assert!(slot.is_none(), "port {port} assigned twice at {v}");
        *slot = Some(w);
    };

    for j in 0..p {
        for i in 0..k {
            let v = butterfly_vertex(k, i, j);
            for (row, port) in [((2 * i) % k, p1), ((2 * i + 1) % k, p2)] {
                let w = butterfly_vertex(k, row, (j + 1) % p);
                set(v, port, w);
                set(w, delta + 1 - port, v);
            }
        }
        for (cycle, &q) in cycles.iter().zip(&clique_ports) {
            for (idx, &a) in cycle.iter().enumerate() {
                let b = cycle[(idx + 1) % cycle.len()];
                let (va, vb) = (butterfly_vertex(k, a, j), butterfly_vertex(k, b, j));
                set(va, q, vb);
                set(vb, delta + 1 - q, va);
            }
        }
    }

    let order: Vec<Vec<NodeId>> = slots
        .into_iter()
        .map(|row| row.into_iter().map(|w| w.expect("every port assigned")).collect())
        .collect();
    let graph = PortGraph::from_port_order(&order)?;
    Ok(PairedNumbering::new(graph)?)
}
