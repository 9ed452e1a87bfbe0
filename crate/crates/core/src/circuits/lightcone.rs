//! Past lightcones: the minimal qubit set determining a final-time reduced
//! state, found by hopping backwards along the circuit's two-qubit gates.

use std::collections::BTreeSet;

use super::{Circuit, Op};

/// Past lightcone of `qubit` at the end of the circuit. Walks moments in
/// reverse; any two-qubit gate touching the current cone absorbs its partner.
/// Single-qubit gates, measurements and resets do not grow the cone.
pub fn past_lightcone(circ: &Circuit, qubit: usize) -> BTreeSet<usize> {
    past_lightcone_upto(circ, qubit, usize::MAX)
}

/// Lightcone truncated at `max_cycle` (inclusive); cycles above it are
/// ignored, which yields the cone "at depth t".
pub fn past_lightcone_upto(circ: &Circuit, qubit: usize, max_cycle: usize) -> BTreeSet<usize> {
    let mut cone = BTreeSet::from([qubit]);
    for m in circ.moments.iter().rev() {
        if m.cycle > max_cycle {
            continue;
        }
        for op in &m.ops {
            if let Op::Unitary2(_, a, b) | Op::Raw2(_, a, b) = op {
                if cone.contains(a) || cone.contains(b) {
                    cone.insert(*a);
                    cone.insert(*b);
                }
            }
        }
    }
    cone
}
