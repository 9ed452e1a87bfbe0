//! Exact mapping of a 2D shallow circuit with final measurements to a
//! quasi-1D monitored circuit with mid-circuit measure-and-reset.
//!
//! The register holds a sliding window of lattice columns. Columns are
//! finished left to right: a qubit's gates are applied lazily, in per-qubit
//! cycle order, pulling in right-neighbor columns only as dependencies
//! demand; a finished column is measured out and its wires are reused. The
//! wire of qubit (x, y) is `W*y + ((x0 - x) mod W)` (compacted), where `W`
//! is the window width found by a dry run and `x0` a residue shift that
//! places the probe column first; this keeps gates local on the chain.

use std::collections::BTreeMap;

use super::geometry::Geometry;
use super::{Circuit, CircuitMeta, Moment, Op};
use crate::error::{Result, SimError};

#[derive(Clone, Debug)]
pub struct MappedCircuit {
    /// 1D circuit over wires with mid-circuit MeasureReset ops
    pub circuit: Circuit,
    pub n_wires: usize,
    /// 2D qubit ids in mapped measurement order
    pub measure_order: Vec<usize>,
    /// wire carrying each measurement, parallel to `measure_order`
    pub measure_wire: Vec<usize>,
    /// (2D qubit, wire) pairs left unmeasured at the end
    pub keep: Vec<(usize, usize)>,
    /// maximum |wire_a - wire_b| over two-qubit gates
    pub max_gate_range: usize,
}

struct QubitOps {
    /// (cycle, op index in flat list) per qubit, time ordered
    ops: Vec<Vec<usize>>,
    next: Vec<usize>,
}

#[derive(Clone)]
enum FlatOp {
    G1(crate::gates::Gate1Q, usize, usize),        // gate, qubit, cycle
    G2(crate::gates::Gate2Q, usize, usize, usize), // gate, a, b, cycle
}

fn flatten(circ: &Circuit) -> Result<(Vec<FlatOp>, QubitOps)> {
    let mut flat = Vec::new();
    for m in &circ.moments {
        for op in &m.ops {
            match op {
                Op::Unitary1(g, q) => flat.push(FlatOp::G1(g.clone(), *q, m.cycle)),
                Op::Unitary2(g, a, b) => flat.push(FlatOp::G2(g.clone(), *a, *b, m.cycle)),
                Op::Measure(_) => {} // final measurement handled by the sweep
                _ => {
                    return Err(SimError::Circuit(
                        "mapping expects a unitary shallow circuit".into(),
                    ))
                }
            }
        }
    }
    let mut ops = vec![Vec::new(); circ.n_qubits];
    for (i, f) in flat.iter().enumerate() {
        match f {
            FlatOp::G1(_, q, _) => ops[*q].push(i),
            FlatOp::G2(_, a, b, _) => {
                ops[*a].push(i);
                ops[*b].push(i);
            }
        }
    }
    Ok((
        flat,
        QubitOps {
            ops,
            next: vec![0; circ.n_qubits],
        },
    ))
}

/// Map a shallow 2D circuit to its quasi-1D monitored form. Qubits in
/// `keep` (e.g. the final chain, or the probe during decoding) are never
/// measured; everything else is measured and reset in sweep order.
pub fn map_2d_to_1d(circ: &Circuit, geom: &Geometry, keep: &[usize]) -> Result<MappedCircuit> {
    if circ.n_qubits != geom.n_qubits() {
        return Err(SimError::Geometry(
            "circuit and geometry qubit counts differ".into(),
        ));
    }
    let n = circ.n_qubits;
    let keep_set: Vec<bool> = {
        let mut v = vec![false; n];
        for &q in keep {
            v[q] = true;
        }
        v
    };

    // column structure along x
    let mut columns: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &(x, y)) in geom.qubits.iter().enumerate() {
        columns.entry(x).or_default().push(i);
        let _ = y;
    }
    for col in columns.values_mut() {
        col.sort_by_key(|&i| geom.qubits[i].1);
    }
    let col_xs: Vec<i32> = columns.keys().copied().collect();

    // dry run to find the window width (max simultaneously-live columns)
    let width = sweep(circ, geom, &columns, &col_xs, &keep_set, None)?;

    // wire slots: W*y + residue, residue chosen so the probe's column gets
    // residue 0. Kept qubits whose slot a later column would reuse are
    // parked on dedicated wires, compacted in front of the modular block
    // (this places a kept probe at the chain end).
    let w = width.window;
    let y_min = geom.qubits.iter().map(|q| q.1).min().unwrap();
    let probe_x = geom.qubits[geom.probe].0;
    let x_max = geom.qubits.iter().map(|q| q.0).max().unwrap();
    let modular_slot = |q: usize| -> usize {
        let (x, y) = geom.qubits[q];
        let residue = (probe_x - x).rem_euclid(w as i32) as usize;
        (y - y_min) as usize * w + residue
    };
    let dedicated: Vec<usize> = (0..n)
        .filter(|&q| keep_set[q] && geom.qubits[q].0 + w as i32 <= x_max)
        .collect();
    let n_ded = dedicated.len();
    let mut used: Vec<usize> = (0..n)
        .filter(|q| !dedicated.contains(q))
        .map(modular_slot)
        .collect();
    used.sort_unstable();
    used.dedup();
    let n_wires = n_ded + used.len();
    let wire_of = |q: usize| -> usize {
        if let Some(k) = dedicated.iter().position(|&d| d == q) {
            k
        } else {
            n_ded + used.binary_search(&modular_slot(q)).unwrap()
        }
    };

    // verify no two simultaneously-live qubits share a wire, then emit
    let out = sweep(circ, geom, &columns, &col_xs, &keep_set, Some(&wire_of))?;
    let mut mapped = Circuit::new(
        n_wires,
        CircuitMeta {
            depth: circ.meta.depth,
            gate_density: circ.meta.gate_density,
            seed: circ.meta.seed,
            label: format!("mapped:{}", circ.meta.label),
        },
    );
    let mut max_range = 0usize;
    for (cycle, op) in out.ops {
        match &op {
            Op::Unitary2(_, a, b) => max_range = max_range.max(a.abs_diff(*b)),
            Op::Raw2(_, a, b) => max_range = max_range.max(a.abs_diff(*b)),
            _ => {}
        }
        mapped.moments.push(Moment {
            cycle,
            ops: vec![op],
        });
    }
    Ok(MappedCircuit {
        circuit: mapped,
        n_wires,
        measure_order: out.measure_order,
        measure_wire: out.measure_wire,
        keep: out.keep,
        max_gate_range: max_range,
    })
}

struct SweepOut {
    window: usize,
    ops: Vec<(usize, Op)>,
    measure_order: Vec<usize>,
    measure_wire: Vec<usize>,
    keep: Vec<(usize, usize)>,
}

fn sweep(
    circ: &Circuit,
    geom: &Geometry,
    columns: &BTreeMap<i32, Vec<usize>>,
    col_xs: &[i32],
    keep_set: &[bool],
    wire_of: Option<&dyn Fn(usize) -> usize>,
) -> Result<SweepOut> {
    let (flat, mut qops) = flatten(circ)?;
    let n = circ.n_qubits;
    let mut live = vec![false; n];
    let mut done = vec![false; flat.len()];
    let mut live_cols: Vec<i32> = Vec::new();
    let mut window = 0usize;
    let mut wire_busy: BTreeMap<usize, usize> = BTreeMap::new(); // wire -> qubit
    let mut out_ops: Vec<(usize, Op)> = Vec::new();
    let mut measure_order = Vec::new();
    let mut measure_wire = Vec::new();

    let enter = |q: usize,
                     live: &mut Vec<bool>,
                     live_cols: &mut Vec<i32>,
                     window: &mut usize,
                     wire_busy: &mut BTreeMap<usize, usize>|
     -> Result<()> {
        if live[q] {
            return Ok(());
        }
        live[q] = true;
        let x = geom.qubits[q].0;
        // kept qubits park on dedicated wires; they don't widen the window
        if !keep_set[q] && !live_cols.contains(&x) {
            live_cols.push(x);
            *window = (*window).max(live_cols.len());
        }
        if let Some(wf) = wire_of {
            let wir = wf(q);
            if let Some(&other) = wire_busy.get(&wir) {
                return Err(SimError::Circuit(format!(
                    "wire collision: qubits {other} and {q} both need wire {wir}"
                )));
            }
            wire_busy.insert(wir, q);
        }
        Ok(())
    };

    // apply all ops of `q` with flat (program-order) index <= cap,
    // recursing into partners so their earlier ops land first
    fn advance(
        q: usize,
        cap: usize,
        flat: &[FlatOp],
        qops: &mut QubitOps,
        done: &mut [bool],
        enter: &mut dyn FnMut(usize) -> Result<()>,
        emit: &mut dyn FnMut(&FlatOp) -> Result<()>,
    ) -> Result<()> {
        enter(q)?;
        while qops.next[q] < qops.ops[q].len() {
            let oi = qops.ops[q][qops.next[q]];
            if oi > cap {
                break;
            }
            if done[oi] {
                qops.next[q] += 1;
                continue;
            }
            match &flat[oi] {
                FlatOp::G1(..) => {
                    done[oi] = true;
                    emit(&flat[oi])?;
                    qops.next[q] += 1;
                }
                FlatOp::G2(_, a, b, _) => {
                    let partner = if *a == q { *b } else { *a };
                    advance(partner, oi.saturating_sub(1), flat, qops, done, enter, emit)?;
                    if !done[oi] {
                        done[oi] = true;
                        emit(&flat[oi])?;
                    }
                    qops.next[q] += 1;
                }
            }
        }
        Ok(())
    }

    let depth = circ.meta.depth;
    let all_ops_cap = usize::MAX;
    for &x in col_xs {
        // run every qubit of this column to completion
        for &q in &columns[&x] {
            let mut enter_cb = |qq: usize| {
                enter(qq, &mut live, &mut live_cols, &mut window, &mut wire_busy)
            };
            let mut emit_cb = |f: &FlatOp| -> Result<()> {
                if let Some(wf) = wire_of {
                    let op = match f {
                        FlatOp::G1(g, qq, c) => (*c, Op::Unitary1(g.clone(), wf(*qq))),
                        FlatOp::G2(g, a, b, c) => (*c, Op::Unitary2(g.clone(), wf(*a), wf(*b))),
                    };
                    out_ops.push(op);
                }
                Ok(())
            };
            advance(
                q,
                all_ops_cap,
                &flat,
                &mut qops,
                &mut done,
                &mut enter_cb,
                &mut emit_cb,
            )?;
        }
        // measure the column out (unless kept), freeing wires
        for &q in &columns[&x] {
            if keep_set[q] {
                continue;
            }
            live[q] = false;
            if let Some(wf) = wire_of {
                let wir = wf(q);
                wire_busy.remove(&wir);
                out_ops.push((depth + 1, Op::MeasureReset(wir)));
                measure_order.push(q);
                measure_wire.push(wir);
            } else {
                measure_order.push(q);
            }
        }
        live_cols.retain(|&cx| columns[&cx].iter().any(|&q| live[q] && !keep_set[q]));
    }
    let keep: Vec<(usize, usize)> = (0..n)
        .filter(|&q| keep_set[q])
        .map(|q| (q, wire_of.map(|wf| wf(q)).unwrap_or(0)))
        .collect();
    Ok(SweepOut {
        window,
        ops: out_ops,
        measure_order,
        measure_wire,
        keep,
    })
}
