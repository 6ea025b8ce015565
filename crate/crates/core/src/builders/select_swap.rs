use crate::circuit::{Circuit, Gate, Qubit};
use crate::table::BitTable;

use super::fanout_swap::{cascade_ancillas, swap_cascade};
use super::{
    build_unary, circuit_with, controlled_write, ladder_compute, ladder_uncompute, match_controls, reg_or_empty,
    BuildError, BuildInfo, BuilderKind, BuilderSpec, QramCircuit, QueryPorts, UncomputeMode,
};

struct Pages {
    /// Nonzero pages as (page index, bits of aux).
    pages: Vec<(usize, Vec<bool>)>,
    high: Vec<Qubit>,
    aux: Vec<Qubit>,
    ladder: Vec<Qubit>,
}

impl Pages {
    fn write(&self, c: &mut Circuit, mode: UncomputeMode) {
        for (p, bits) in &self.pages {
            let controls = match_controls(&self.high, *p);
            let lit = ladder_compute(c, &controls, &self.ladder);
            controlled_write(c, lit, &self.aux, bits);
            ladder_uncompute(c, &controls, &self.ladder, mode);
        }
    }

    /// The comparator work of the fixup lookup; its phase corrections are
    /// Clifford and not emitted.
    fn fixup(&self, c: &mut Circuit) {
        for (p, _) in &self.pages {
            let controls = match_controls(&self.high, *p);
            ladder_compute(c, &controls, &self.ladder);
            ladder_uncompute(c, &controls, &self.ladder, UncomputeMode::MeasurementBased);
        }
    }
}

/// Paged lookup: the high `n - ℓ` address bits select a page of `2^ℓ` words
/// that a unary lookup writes into `aux`; the low `ℓ` bits then pull the word
/// out of `aux` with a fanout-and-swap cascade.
///
/// Coherent mode clears `aux` by repeating the page lookup. Measurement-based
/// mode releases `aux` with a [`crate::circuit::GateKind::ClassicalPhaseFixup`]
/// marker followed by the comparator cost of the fixup lookup. `ℓ = 0` is the
/// unary lookup.
pub fn build_select_swap(table: &BitTable, page_log: usize, mode: UncomputeMode) -> Result<QramCircuit, BuildError> {
    let n = table.address_bits();
    if page_log > n {
        return Err(BuildError::PageLog { page_log, address_bits: n });
    }
    let spec = BuilderSpec::new(BuilderKind::SelectSwap).page_log(page_log).uncompute(mode);
    let w = table.word_width();
    let m = n - page_log;
    let page_size = 1usize << page_log;
    let page_count = 1usize << m;

    if page_log == 0 {
        let mut q = build_unary(table)?;
        q.spec = spec;
        q.info.kind = BuilderKind::SelectSwap;
        q.info.uncompute = mode;
        q.info.page_log = Some(0);
        q.info.page_count = Some(page_count);
        q.info.page_size = Some(1);
        return Ok(q);
    }

    let mut c = circuit_with(&[
        ("addr", n),
        ("out", w),
        ("aux", page_size * w),
        ("ladder", m.saturating_sub(1)),
        ("swap_anc", cascade_ancillas(page_log, w)),
    ]);
    let addr = c.reg("addr")?;
    let out = c.reg("out")?;
    let aux = c.reg("aux")?;
    let swap_anc = reg_or_empty(&c, "swap_anc");

    let pages = Pages {
        pages: (0..page_count)
            .map(|p| {
                let bits: Vec<bool> = (0..page_size * w)
                    .map(|k| {
                        let i = p * page_size + k / w;
                        i < table.len() && table.bit(i, k % w)
                    })
                    .collect();
                (p, bits)
            })
            .filter(|(_, bits)| bits.iter().any(|&b| b))
            .collect(),
        high: addr[page_log..].to_vec(),
        aux: aux.clone(),
        ladder: reg_or_empty(&c, "ladder"),
    };

    pages.write(&mut c, mode);
    let mut extract = c.empty_like();
    swap_cascade(&mut extract, &addr[..page_log], &aux, w, &swap_anc);
    c.extend_from(&extract, Default::default())?;
    for b in 0..w {
        c.push(Gate::cnot(aux[b], out[b]));
    }
    c.extend_from(&extract.inverse(), Default::default())?;
    match mode {
        UncomputeMode::Coherent => pages.write(&mut c, mode),
        UncomputeMode::MeasurementBased => {
            c.push(Gate::phase_fixup(aux.iter().copied()));
            pages.fixup(&mut c);
        }
    }

    let mut info = BuildInfo::new(&spec, table.len(), table.len(), w);
    info.page_log = Some(page_log);
    info.page_count = Some(page_count);
    info.page_size = Some(page_size);
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
