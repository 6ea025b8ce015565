use crate::circuit::{Circuit, Gate, Qubit};
use crate::table::BitTable;

use super::{circuit_with, BuildError, BuildInfo, BuilderKind, BuilderSpec, QramCircuit, QueryPorts};

/// Comparator stages of a bitonic sorting network on `m` (a power of two)
/// wires. Each pair `(lo, hi)` orders its wires so that `lo` holds the
/// smaller key; pairs within a stage are disjoint.
pub fn bitonic_comparators(m: usize) -> Vec<Vec<(usize, usize)>> {
    assert!(m.is_power_of_two(), "bitonic network needs a power-of-two width");
    let mut stages = Vec::new();
    let mut size = 2;
    while size <= m {
        let mut j = size / 2;
        while j >= 1 {
            let mut stage = Vec::with_capacity(m / 2);
            for i in 0..m {
                let l = i ^ j;
                if l > i {
                    stage.push(if i & size == 0 { (i, l) } else { (l, i) });
                }
            }
            stages.push(stage);
            j /= 2;
        }
        size *= 2;
    }
    stages
}

#[derive(Clone)]
struct Record {
    pad: Qubit,
    addr: Vec<Qubit>,
    data: Vec<Qubit>,
    flag: Qubit,
}

impl Record {
    fn fields(&self) -> impl Iterator<Item = Qubit> + '_ {
        std::iter::once(self.pad).chain(self.addr.iter().copied()).chain(self.data.iter().copied()).chain(std::iter::once(self.flag))
    }

    /// Sort key, most significant first: (qubit, compare inverted).
    fn key(&self) -> Vec<(Qubit, bool)> {
        let mut k = vec![(self.pad, false)];
        k.extend(self.addr.iter().rev().map(|&q| (q, false)));
        k.push((self.flag, true));
        k
    }
}

/// XORs `[key(a) > key(b)]` into `cmp`, using `diff` as scratch.
fn compare(c: &mut Circuit, a: &Record, b: &Record, cmp: Qubit, diff: &[Qubit]) {
    let (ka, kb) = (a.key(), b.key());
    let last = ka.len() - 1;
    let diffs = |c: &mut Circuit| {
        for h in 0..last {
            c.push(Gate::cnot(ka[h].0, diff[h]));
            c.push(Gate::cnot(kb[h].0, diff[h]));
        }
    };
    diffs(c);
    for h in 0..=last {
        let inv = ka[h].1;
        let mut controls = vec![(ka[h].0, inv), (kb[h].0, !inv)];
        controls.extend(diff[..h].iter().map(|&d| (d, true)));
        c.push(Gate::multi_cnot(&controls, cmp));
    }
    diffs(c);
}

fn swap_records(c: &mut Circuit, a: &Record, b: &Record, cmp: Qubit) {
    for (x, y) in a.fields().zip(b.fields()) {
        c.push(Gate::cswap(cmp, false, x, y));
    }
}

/// Parallel lookup of `k` addresses by sorting.
///
/// Queries `(i_j, 0, 0)` and memory records `(i, T_i, 1)` are sorted on a
/// bitonic network by (padding, address, memory-first). Every query then
/// copies the data of its left neighbour when the addresses match, in one
/// left-to-right pass, so runs of queries on the same address all receive
/// the word. Replaying the comparators in reverse restores the order and
/// clears the comparison bits.
pub fn build_parallel_sorted(table: &BitTable, k: usize) -> Result<QramCircuit, BuildError> {
    if k == 0 {
        return Err(BuildError::QueryCount);
    }
    let n = table.address_bits();
    let w = table.word_width();
    let big_n = table.len();
    let m = (big_n + k).next_power_of_two();
    let stages = bitonic_comparators(m);
    let comparators: usize = stages.iter().map(Vec::len).sum();
    let stored = m - k;
    let mut c = circuit_with(&[
        ("addr", k * n),
        ("out", k * w),
        ("rec_addr", stored * n),
        ("rec_data", stored * w),
        ("pad", m),
        ("flag", m),
        ("cmp", comparators),
        ("diff", (m / 2) * (n + 1)),
        ("eq", 1),
    ]);
    let addr = c.reg("addr")?;
    let out = c.reg("out")?;
    let rec_addr = c.reg("rec_addr")?;
    let rec_data = c.reg("rec_data")?;
    let pad = c.reg("pad")?;
    let flag = c.reg("flag")?;
    let cmp = c.reg("cmp")?;
    let diff = c.reg("diff")?;
    let eq = c.qubit("eq", 0)?;

    let slots: Vec<Record> = (0..m)
        .map(|s| {
            let (a, d) = if s < k {
                (addr[s * n..(s + 1) * n].to_vec(), out[s * w..(s + 1) * w].to_vec())
            } else {
                let r = s - k;
                (rec_addr[r * n..(r + 1) * n].to_vec(), rec_data[r * w..(r + 1) * w].to_vec())
            };
            Record { pad: pad[s], addr: a, data: d, flag: flag[s] }
        })
        .collect();

    // Memory and padding records.
    let mut init = c.empty_like();
    for (s, rec) in slots.iter().enumerate().skip(k) {
        let i = s - k;
        if i < big_n {
            for (b, &q) in rec.addr.iter().enumerate() {
                if (i >> b) & 1 == 1 {
                    init.push(Gate::x(q));
                }
            }
            for (b, &q) in rec.data.iter().enumerate() {
                if table.bit(i, b) {
                    init.push(Gate::x(q));
                }
            }
            init.push(Gate::x(rec.flag));
        } else {
            init.push(Gate::x(rec.pad));
        }
    }
    c.extend_from(&init, Default::default())?;

    let mut order = Vec::with_capacity(comparators);
    for stage in &stages {
        for (t, &(lo, hi)) in stage.iter().enumerate() {
            order.push((lo, hi, t));
        }
    }
    for (idx, &(lo, hi, t)) in order.iter().enumerate() {
        let d = &diff[t * (n + 1)..(t + 1) * (n + 1)];
        compare(&mut c, &slots[lo], &slots[hi], cmp[idx], d);
        swap_records(&mut c, &slots[lo], &slots[hi], cmp[idx]);
    }

    let d = &diff[..n];
    for p in 1..m {
        let (cur, prev) = (&slots[p], &slots[p - 1]);
        let mut same = c.empty_like();
        for ((&x, &y), &t) in cur.addr.iter().zip(&prev.addr).zip(d) {
            same.push(Gate::cnot(x, t));
            same.push(Gate::cnot(y, t));
        }
        let mut controls: Vec<(Qubit, bool)> = d.iter().map(|&q| (q, true)).collect();
        controls.push((cur.flag, true));
        controls.push((cur.pad, true));
        same.push(Gate::multi_cnot(&controls, eq));
        c.extend_from(&same, Default::default())?;
        for b in 0..w {
            c.push(Gate::toffoli(eq, prev.data[b], [false, false], cur.data[b]));
        }
        c.extend_from(&same.inverse(), Default::default())?;
    }

    for (idx, &(lo, hi, t)) in order.iter().enumerate().rev() {
        let d = &diff[t * (n + 1)..(t + 1) * (n + 1)];
        swap_records(&mut c, &slots[lo], &slots[hi], cmp[idx]);
        compare(&mut c, &slots[lo], &slots[hi], cmp[idx], d);
    }
    c.extend_from(&init.inverse(), Default::default())?;

    let queries = (0..k)
        .map(|j| QueryPorts { address: slots[j].addr.clone(), output: slots[j].data.clone() })
        .collect();
    let spec = BuilderSpec::new(BuilderKind::ParallelSorted).queries(k);
    let mut info = BuildInfo::new(&spec, big_n, big_n, w);
    info.query_count = Some(k);
    info.comparators = Some(comparators);
    Ok(QramCircuit { circuit: c, info, spec, queries, memory: vec![], control: None, preset_ones: vec![] })
}
