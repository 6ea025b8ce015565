use crate::circuit::{Circuit, Gate, Qubit};
use crate::table::BitTable;

use super::{
    circuit_with, controlled_write, reg_or_empty, word_bits, BuildError, BuildInfo, BuilderKind, BuilderSpec,
    QramCircuit, QueryPorts, UncomputeMode,
};

struct Ctx<'a> {
    table: &'a BitTable,
    addr: Vec<Qubit>,
    out: Vec<Qubit>,
    stack: Vec<Qubit>,
    mode: UncomputeMode,
}

impl Ctx<'_> {
    /// Lookup of entries `base..base + 2^m` under control `ctrl`, addressed
    /// by the low `m` address bits.
    fn lookup(&self, c: &mut Circuit, ctrl: Qubit, base: usize, m: usize) {
        if m == 0 {
            let word = self.table.word(base);
            controlled_write(c, Some((ctrl, false)), &self.out, &word_bits(word, self.table.word_width()));
            return;
        }
        let x = self.addr[m - 1];
        let a = self.stack[m - 1];
        let half = 1usize << (m - 1);
        c.push(Gate::and_compute(ctrl, x, [false, true], a));
        self.lookup(c, a, base, m - 1);
        c.push(Gate::cnot(ctrl, a));
        self.lookup(c, a, base + half, m - 1);
        c.push(match self.mode {
            UncomputeMode::MeasurementBased => Gate::and_uncompute(ctrl, x, [false, false], a),
            UncomputeMode::Coherent => Gate::toffoli(ctrl, x, [false, false], a),
        });
    }
}

/// Recursive controlled-unary lookup.
///
/// Each internal node of the address tree costs one AND gate; `controlled`
/// adds an outer control qubit `ctrl`. Tables are zero-padded to a power of
/// two.
pub fn build_recursive(table: &BitTable, controlled: bool, mode: UncomputeMode) -> Result<QramCircuit, BuildError> {
    let padded = table.padded_pow2();
    let n = padded.address_bits();
    let w = padded.word_width();
    let stack_size = if controlled { n } else { n - 1 };
    let mut c = circuit_with(&[("addr", n), ("out", w), ("ctrl", controlled as usize), ("stack", stack_size)]);
    let ctx = Ctx {
        table: &padded,
        addr: c.reg("addr")?,
        out: c.reg("out")?,
        stack: reg_or_empty(&c, "stack"),
        mode,
    };

    let control = if controlled {
        let ctrl = c.qubit("ctrl", 0)?;
        ctx.lookup(&mut c, ctrl, 0, n);
        Some(ctrl)
    } else {
        // The top bit acts as control for both halves.
        let top = ctx.addr[n - 1];
        let half = 1usize << (n - 1);
        c.push(Gate::x(top));
        ctx.lookup(&mut c, top, 0, n - 1);
        c.push(Gate::x(top));
        ctx.lookup(&mut c, top, half, n - 1);
        None
    };

    let spec = BuilderSpec::new(BuilderKind::Recursive).controlled(controlled).uncompute(mode);
    let mut info = BuildInfo::new(&spec, table.len(), padded.len(), w);
    info.controlled = Some(controlled);
    Ok(QramCircuit {
        queries: vec![QueryPorts { address: ctx.addr.clone(), output: ctx.out.clone() }],
        circuit: c,
        info,
        spec,
        memory: vec![],
        control,
        preset_ones: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::{count_resources, ResourceProfile};

    fn t_count(n: usize, controlled: bool) -> u64 {
        let t = BitTable::random(n, 1, 3).unwrap();
        let q = build_recursive(&t, controlled, UncomputeMode::MeasurementBased).unwrap();
        count_resources(&q.circuit, &ResourceProfile::UNIT_GATE).t_count
    }

    #[test]
    fn t_counts() {
        assert_eq!(t_count(2, false), 0);
        assert_eq!(t_count(8, false), 24);
        assert_eq!(t_count(8, true), 28);
    }

    #[test]
    fn pads_to_power_of_two() {
        let t = BitTable::from_bits(&[true, false, true]).unwrap();
        let q = build_recursive(&t, false, UncomputeMode::MeasurementBased).unwrap();
        assert_eq!((q.info.entries, q.info.padded_entries), (3, 4));
    }
}
