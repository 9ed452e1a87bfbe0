//! Structural checks for the shipped geometry family: sweep peak sizes,
//! lightcone disjointness, and mapped gate ranges.

use dualsim::circuits::geometry::{checkerboard, grid19, Geometry};
use dualsim::circuits::lightcone::past_lightcone;
use dualsim::circuits::mapping::map_2d_to_1d;
use dualsim::circuits::shallow2d::build_shallow_2d;
use dualsim::decoder::sweep::build_plan;
use dualsim::decoder::DecodingSchedule;

fn report(g: &Geometry, depth: usize) {
    let c = build_shallow_2d(g, depth, 1.0, 1).unwrap();
    let sched = DecodingSchedule::from_geometry(g);
    let plan = build_plan(&c, &sched).unwrap();
    let m = map_2d_to_1d(&c, g, &[g.probe]).unwrap();
    // probe vs far-column lightcones
    let probe_cone = past_lightcone(&c, g.probe);
    let x_max = g.qubits.iter().map(|q| q.0).max().unwrap();
    let far: Vec<usize> = (0..g.n_qubits())
        .filter(|&q| g.qubits[q].0 == x_max)
        .collect();
    let disjoint = far
        .iter()
        .all(|&q| past_lightcone(&c, q).intersection(&probe_cone).next().is_none());
    println!(
        "{} N={} T={depth}: peak_active={} r_max={} wires={} max_range={} far_cones_disjoint={}",
        g.name,
        g.n_qubits(),
        plan.peak_active,
        sched.r_max(),
        m.n_wires,
        m.max_gate_range,
        disjoint
    );
}

fn main() {
    for (name, w, h, trim) in [
        ("n12", 4, 6, 0),
        ("n24", 6, 8, 0),
        ("n40a", 8, 10, 0),
        ("n40b", 10, 8, 0),
        ("n58a", 12, 10, 2),
        ("n58b", 15, 8, 2),
        ("n58c", 16, 8, 6),
        ("n70a", 14, 10, 0),
        ("n70b", 18, 8, 2),
        ("n70c", 20, 7, 0),
    ] {
        let g = checkerboard(name, w, h, trim);
        report(&g, 5);
    }
    let g = grid19();
    report(&g, 5);
    report(&g, 3);
}
