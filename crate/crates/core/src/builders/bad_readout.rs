use crate::circuit::Gate;
use crate::table::BitTable;

use super::bucket_brigade::Tree;
use super::{circuit_with, controlled_write, word_bits, BuildError, BuildInfo, BuilderKind, BuilderSpec, QramCircuit, QueryPorts};

/// Bucket-brigade variant with a parity readout.
///
/// After the address is loaded, a single |1⟩ token is routed down to the
/// `token` leaf layer. Every leaf whose entry has bit `b` set copies the token
/// into layer `lay[i][b]`, and the parity of each layer column is the output.
/// The parity is computed by a log-depth CNOT reduction onto `lay[0][b]`,
/// copied out and unreduced; as a unitary this equals a Hadamard-conjugated
/// fanout from the output onto the layer.
pub fn build_bad_readout_bb(table: &BitTable) -> Result<QramCircuit, BuildError> {
    let padded = table.padded_pow2();
    let n = padded.address_bits();
    let w = padded.word_width();
    let big = padded.len();
    let mut c = circuit_with(&[
        ("addr", n),
        ("out", w),
        ("route", big - 1),
        ("ctl", big - 1),
        ("token", big),
        ("lay", big * w),
    ]);
    let addr = c.reg("addr")?;
    let out = c.reg("out")?;
    let token = c.reg("token")?;
    let lay = c.reg("lay")?;
    let tree = Tree::new(&c, n)?;

    let mut load = c.empty_like();
    tree.load_address(&mut load, &addr);
    load.push(Gate::x(tree.r(1)));
    let mut up = c.empty_like();
    tree.route_up(&mut up, |i| token[i]);
    load.extend_from(&up.inverse(), Default::default())?;

    let mut write = c.empty_like();
    for i in 0..big {
        let cols: Vec<_> = (0..w).map(|b| lay[i * w + b]).collect();
        controlled_write(&mut write, Some((token[i], false)), &cols, &word_bits(padded.word(i), w));
    }

    c.extend_from(&load, Default::default())?;
    c.extend_from(&write, Default::default())?;
    for b in 0..w {
        let mut reduce = c.empty_like();
        let mut s = 1;
        while s < big {
            for i in (0..big).step_by(2 * s) {
                reduce.push(Gate::cnot(lay[(i + s) * w + b], lay[i * w + b]));
            }
            s *= 2;
        }
        c.extend_from(&reduce, Default::default())?;
        c.push(Gate::cnot(lay[b], out[b]));
        c.extend_from(&reduce.inverse(), Default::default())?;
    }
    c.extend_from(&write.inverse(), Default::default())?;
    c.extend_from(&load.inverse(), Default::default())?;

    let spec = BuilderSpec::new(BuilderKind::BadReadoutBb);
    let mut info = BuildInfo::new(&spec, table.len(), big, w);
    info.routing_ancillas = Some(2 * (big - 1));
    Ok(QramCircuit {
        circuit: c,
        info,
        spec,
        queries: vec![QueryPorts { address: addr, output: out }],
        memory: vec![],
        control: None,
        preset_ones: vec![],
    })
}
