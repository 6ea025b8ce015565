use crate::circuit::Gate;
use crate::table::BitTable;

use super::{circuit_with, controlled_write, match_controls, word_bits, BuildError, BuildInfo, BuilderKind, BuilderSpec, QramCircuit, QueryPorts};

/// Check-every-address lookup: one comparator per nonzero entry.
///
/// One-bit words are written by the comparator itself. Wider words go through
/// an ancilla `b` that is computed, fanned out and uncomputed per entry.
pub fn build_unary(table: &BitTable) -> Result<QramCircuit, BuildError> {
    let n = table.address_bits();
    let w = table.word_width();
    let needs_b = w > 1 && table.entries().iter().any(|&v| v != 0);
    let mut c = circuit_with(&[("addr", n), ("out", w), ("b", needs_b as usize)]);
    let addr = c.reg("addr")?;
    let out = c.reg("out")?;

    for i in 0..table.len() {
        let word = table.word(i);
        if word == 0 {
            continue;
        }
        let controls = match_controls(&addr, i);
        if w == 1 {
            c.push(Gate::multi_cnot(&controls, out[0]));
        } else {
            let b = c.qubit("b", 0)?;
            c.push(Gate::multi_cnot(&controls, b));
            controlled_write(&mut c, Some((b, false)), &out, &word_bits(word, w));
            c.push(Gate::multi_cnot(&controls, b));
        }
    }

    let spec = BuilderSpec::new(BuilderKind::Unary);
    Ok(QramCircuit {
        circuit: c,
        info: BuildInfo::new(&spec, table.len(), table.len(), w),
        spec,
        queries: vec![QueryPorts { address: addr, output: out }],
        memory: vec![],
        control: None,
        preset_ones: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn zero_table_has_no_gates() {
        let q = build_unary(&BitTable::from_bits(&[false; 4]).unwrap()).unwrap();
        assert_eq!(q.circuit.gate_count(), 0);
        assert_eq!(q.circuit.width(), 3);
    }

    #[test]
    fn single_one_is_a_toffoli() {
        let q = build_unary(&BitTable::from_bits(&[false, false, false, true]).unwrap()).unwrap();
        let gates: Vec<_> = q.circuit.gates().collect();
        assert_eq!(gates.len(), 1);
        assert_eq!(gates[0].kind, GateKind::MultiCnot);
        assert_eq!(gates[0].negated, vec![false, false]);
    }

    #[test]
    fn wide_words_use_ancilla() {
        let q = build_unary(&BitTable::new(vec![0, 3, 0, 1], 2).unwrap()).unwrap();
        assert!(q.circuit.register("b").is_some());
        // entry 1: compute, fanout, uncompute; entry 3: compute, cnot, uncompute
        assert_eq!(q.circuit.gate_count(), 6);
    }
}
