//! Circuit persistence: a JSON document of moments with gate labels and
//! parameters (angles as decimal radians, 12 significant digits). Only
//! label-reconstructible gates round-trip; raw linear maps do not.

use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitMeta, Moment, Op};
use crate::error::{Result, SimError};
use crate::gates::{fsim, z_pow, FsimParams, GateLabel};

#[derive(Serialize, Deserialize)]
struct OpDoc {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MomentDoc {
    cycle: usize,
    ops: Vec<OpDoc>,
}

#[derive(Serialize, Deserialize)]
pub struct CircuitDoc {
    n_qubits: usize,
    meta: CircuitMeta,
    moments: Vec<MomentDoc>,
}

fn sig12(x: f64) -> f64 {
    // decimal round to 12 significant digits
    format!("{x:.12e}").parse().unwrap_or(x)
}

fn encode_label(l: &GateLabel) -> Result<(String, Vec<f64>)> {
    Ok(match l {
        GateLabel::Fsim(p) => (
            "fsim".into(),
            vec![
                sig12(p.theta),
                sig12(p.phi),
                sig12(p.delta_plus),
                sig12(p.delta_minus),
                sig12(p.delta_minus_off),
            ],
        ),
        GateLabel::ZPow(h) => ("z_pow".into(), vec![sig12(*h)]),
        GateLabel::SqrtX(s) => (format!("sqrt_x^{s}"), vec![]),
        GateLabel::SqrtY(s) => (format!("sqrt_y^{s}"), vec![]),
        GateLabel::SqrtW(s) => (format!("sqrt_w^{s}"), vec![]),
        GateLabel::SqrtV(s) => (format!("sqrt_v^{s}"), vec![]),
        GateLabel::Swap => ("swap".into(), vec![]),
        GateLabel::Cnot => ("cnot".into(), vec![]),
        GateLabel::Hadamard => ("h".into(), vec![]),
        GateLabel::Pauli(c) => (format!("pauli_{c}"), vec![]),
        GateLabel::Cue | GateLabel::Other(_) => {
            return Err(SimError::Circuit(format!(
                "gate label {l:?} is not serializable"
            )))
        }
    })
}

fn decode_gate1(label: &str, params: &[f64]) -> Result<crate::gates::Gate1Q> {
    let sqrt = |which: char, s: i8| {
        let g = crate::gates::sq_gate_by_index(match (which, s) {
            ('x', 1) => 0,
            ('x', _) => 1,
            ('y', 1) => 2,
            ('y', _) => 3,
            ('w', 1) => 4,
            ('w', _) => 5,
            ('v', 1) => 6,
            _ => 7,
        });
        Ok(g)
    };
    match label {
        "z_pow" => Ok(z_pow(params[0])),
        "sqrt_x^1" => sqrt('x', 1),
        "sqrt_x^-1" => sqrt('x', -1),
        "sqrt_y^1" => sqrt('y', 1),
        "sqrt_y^-1" => sqrt('y', -1),
        "sqrt_w^1" => sqrt('w', 1),
        "sqrt_w^-1" => sqrt('w', -1),
        "sqrt_v^1" => sqrt('v', 1),
        "sqrt_v^-1" => sqrt('v', -1),
        other => Err(SimError::Circuit(format!("unknown 1q gate '{other}'"))),
    }
}

pub fn to_json(circ: &Circuit) -> Result<String> {
    let mut moments = Vec::new();
    for m in &circ.moments {
        let mut ops = Vec::new();
        for op in &m.ops {
            let doc = match op {
                Op::Unitary1(g, q) => {
                    let (label, params) = encode_label(&g.label)?;
                    OpDoc {
                        kind: "u1".into(),
                        label: Some(label),
                        qubits: vec![*q],
                        params,
                    }
                }
                Op::Unitary2(g, a, b) => {
                    let (label, params) = encode_label(&g.label)?;
                    OpDoc {
                        kind: "u2".into(),
                        label: Some(label),
                        qubits: vec![*a, *b],
                        params,
                    }
                }
                Op::Measure(q) => OpDoc {
                    kind: "measure".into(),
                    label: None,
                    qubits: vec![*q],
                    params: vec![],
                },
                Op::Reset(q) => OpDoc {
                    kind: "reset".into(),
                    label: None,
                    qubits: vec![*q],
                    params: vec![],
                },
                Op::MeasureReset(q) => OpDoc {
                    kind: "measure_reset".into(),
                    label: None,
                    qubits: vec![*q],
                    params: vec![],
                },
                Op::Raw2(..) | Op::BellPrep(..) | Op::BellPostselect(..) => {
                    return Err(SimError::Circuit(
                        "raw/Bell ops are not serializable".into(),
                    ))
                }
            };
            ops.push(doc);
        }
        moments.push(MomentDoc { cycle: m.cycle, ops });
    }
    Ok(serde_json::to_string_pretty(&CircuitDoc {
        n_qubits: circ.n_qubits,
        meta: circ.meta.clone(),
        moments,
    })?)
}

pub fn from_json(s: &str) -> Result<Circuit> {
    let doc: CircuitDoc = serde_json::from_str(s)?;
    let mut circ = Circuit::new(doc.n_qubits, doc.meta);
    for m in doc.moments {
        let mut ops = Vec::new();
        for op in m.ops {
            let parsed = match op.kind.as_str() {
                "u1" => {
                    let label = op.label.as_deref().unwrap_or_default();
                    Op::Unitary1(decode_gate1(label, &op.params)?, op.qubits[0])
                }
                "u2" => {
                    let label = op.label.as_deref().unwrap_or_default();
                    let g = match label {
                        "fsim" => fsim(&FsimParams::new(
                            op.params[0],
                            op.params[1],
                            op.params[2],
                            op.params[3],
                            op.params[4],
                        )),
                        "swap" => crate::gates::swap_gate(),
                        "cnot" => crate::gates::cnot(),
                        other => {
                            return Err(SimError::Circuit(format!(
                                "unknown 2q gate '{other}'"
                            )))
                        }
                    };
                    Op::Unitary2(g, op.qubits[0], op.qubits[1])
                }
                "measure" => Op::Measure(op.qubits[0]),
                "reset" => Op::Reset(op.qubits[0]),
                "measure_reset" => Op::MeasureReset(op.qubits[0]),
                other => {
                    return Err(SimError::Circuit(format!("unknown op kind '{other}'")))
                }
            };
            ops.push(parsed);
        }
        circ.push_moment(Moment { cycle: m.cycle, ops })?;
    }
    Ok(circ)
}
