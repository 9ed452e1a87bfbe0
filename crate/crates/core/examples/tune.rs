//! Exploration harness for the decoding-crossing experiment: runs the
//! sample-and-decode sweep over a rho grid for two system sizes and prints
//! S_proxy_sim(r_max - 1), the pairwise crossing, and collapse residuals.

use dualsim::circuits::geometry::{checkerboard, rect_grid, Geometry};
use dualsim::circuits::shallow2d::build_shallow_2d;
use dualsim::decoder::collapse::{collapse_residual, estimate_crossing, pairwise_crossings, SizeCurve};
use dualsim::decoder::sweep::{build_plan, run_sweep, ShotMode};
use dualsim::decoder::{s_proxy_of, DecodingSchedule};
use dualsim::rng::rng_for;
use rayon::prelude::*;

fn s_at_rmax_minus_1(geom: &Geometry, rho: f64, n_circ: usize, n_shot: usize, seed: u64) -> (f64, usize) {
    let sched = DecodingSchedule::from_geometry(geom);
    let r_pick = sched.r_max() - 1;
    let results: Vec<(f64, usize)> = (0..n_circ)
        .into_par_iter()
        .map(|ci| {
            let c = build_shallow_2d(geom, 5, rho, seed * 1000 + ci as u64).unwrap();
            let plan = build_plan(&c, &sched).unwrap();
            let mut acc = 0.0;
            for s in 0..n_shot {
                let mut rng = rng_for(seed, &[ci as u64, s as u64]);
                let out = run_sweep(&plan, ShotMode::Sample, None, &mut rng).unwrap();
                acc += out.a_z[r_pick].abs();
            }
            (acc, plan.peak_active)
        })
        .collect();
    let total: f64 = results.iter().map(|r| r.0).sum();
    let peak = results.iter().map(|r| r.1).max().unwrap();
    let zeta_sim = 2.0 * total / (n_circ * n_shot) as f64;
    (s_proxy_of(zeta_sim), peak)
}

fn scan(name: &str, g12: &Geometry, g24: &Geometry, n_circ: usize, n_shot: usize, seed: u64) {
    let rhos: Vec<f64> = (3..=10).map(|k| k as f64 / 10.0).collect();
    let mut curves = Vec::new();
    for (g, tag) in [(g12, "A"), (g24, "B")] {
        let mut pts = Vec::new();
        for &rho in &rhos {
            let (s, peak) = s_at_rmax_minus_1(g, rho, n_circ, n_shot, seed);
            println!("{name} {tag} N={} rho={rho:.1}: S = {s:.4} (peak {peak})", g.n_qubits());
            pts.push((rho, s));
        }
        curves.push(SizeCurve { n: g.n_qubits(), points: pts });
    }
    let xs = pairwise_crossings(&curves[0], &curves[1]);
    let grid: Vec<f64> = (0..21).map(|k| 0.5 + 0.025 * k as f64).collect();
    let est = estimate_crossing(&curves, &grid, 1.3);
    let r72 = collapse_residual(&curves, 0.72, 1.3);
    let r50 = collapse_residual(&curves, 0.50, 1.3);
    let r95 = collapse_residual(&curves, 0.95, 1.3);
    println!("{name}: crossings {xs:?}, rc_est {est:?}");
    println!("{name}: residual(0.72) {r72:?} vs (0.5) {r50:?}, (0.95) {r95:?}");
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("cb");
    let n_circ: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let n_shot: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed: u64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(42);
    match which {
        "cb" => {
            let g12 = checkerboard("n12", 4, 6, 0);
            let g24 = checkerboard("n24", 6, 8, 0);
            scan("cb(4x6/6x8)", &g12, &g24, n_circ, n_shot, seed);
        }
        "cb2" => {
            let g12 = checkerboard("n12", 6, 4, 0);
            let g24 = checkerboard("n24", 8, 6, 0);
            scan("cb(6x4/8x6)", &g12, &g24, n_circ, n_shot, seed);
        }
        "cb3" => {
            let g12 = checkerboard("n12", 5, 5, 1);
            let g24 = checkerboard("n24", 7, 7, 1);
            scan("cb(5x5/7x7)", &g12, &g24, n_circ, n_shot, seed);
        }
        "sq" => {
            let g12 = rect_grid("n12", 3, 4, 0);
            let g24 = rect_grid("n24", 4, 6, 0);
            scan("sq(3x4/4x6)", &g12, &g24, n_circ, n_shot, seed);
        }
        other => eprintln!("unknown config {other}"),
    }
}
