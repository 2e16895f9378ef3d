//! Brute-force reference implementations shared by the integration tests.
//! They only use table evaluation, never the library's search routines.
#![allow(dead_code)]

use std::collections::BTreeSet;

use minorlab::{Domain, Elem, Operation};

pub fn chain_min(k: usize, arity: usize, mask: u64) -> Operation {
    Operation::from_fn(Domain::new(k).unwrap(), arity, |args| {
        (0..arity).filter(|i| mask >> i & 1 == 1).map(|i| args[i]).min().unwrap()
    })
    .unwrap()
}

/// The `n`-ary part of the clone generated by `min` on the `k`-chain,
/// optionally with the constants 0 and `k-1`.
pub fn chain_part(k: usize, n: usize, zero: bool, top: bool) -> Vec<Operation> {
    let d = Domain::new(k).unwrap();
    let mut out: BTreeSet<Operation> = (1u64..1 << n).map(|mask| chain_min(k, n, mask)).collect();
    if zero {
        out.insert(Operation::constant(d, n, 0).unwrap());
    }
    if top {
        out.insert(Operation::constant(d, n, (k - 1) as Elem).unwrap());
    }
    out.into_iter().collect()
}

/// `g(h_1, ..., h_m)` straight from the definition of composition.
pub fn apply(g: &Operation, inner: &[&Operation]) -> Operation {
    let k = g.domain().size();
    let rows = inner[0].table().len();
    let table = (0..rows)
        .map(|r| g.table()[inner.iter().fold(0, |acc, h| acc * k + h.table()[r] as usize)])
        .collect();
    Operation::new(g.domain(), inner[0].arity(), table).unwrap()
}

/// Every tuple `part^m`, in lexicographic index order.
pub fn tuples(part_len: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = part_len.pow(m as u32);
    (0..total).map(move |mut t| {
        let mut out = vec![0; m];
        for slot in out.iter_mut().rev() {
            *slot = t % part_len;
            t /= part_len;
        }
        out
    })
}

/// `f ⊑ g` by trying every inner tuple drawn from `part` (the `f.arity()`-ary part).
pub fn is_minor(f: &Operation, g: &Operation, part: &[Operation]) -> bool {
    tuples(part.len(), g.arity()).any(|t| {
        let inner: Vec<&Operation> = t.iter().map(|&i| &part[i]).collect();
        apply(g, &inner) == *f
    })
}

/// Every operation of the given arity on a `k`-element domain.
pub fn all_ops(k: usize, n: usize) -> Vec<Operation> {
    let d = Domain::new(k).unwrap();
    let len = k.pow(n as u32);
    (0..k.pow(len as u32))
        .map(|mut code| {
            let mut table = vec![0; len];
            for slot in table.iter_mut().rev() {
                *slot = (code % k) as Elem;
                code /= k;
            }
            Operation::new(d, n, table).unwrap()
        })
        .collect()
}

/// Least `m` such that `f = g(h_1, ..., h_m)` for some `m`-ary `g` and
/// `h_i` in `part`; constants have degree 0.
pub fn degree(f: &Operation, part: &[Operation]) -> usize {
    if f.is_constant() {
        return 0;
    }
    let k = f.domain().size();
    for m in 1.. {
        for g in all_ops(k, m) {
            if is_minor(f, &g, part) {
                return m;
            }
        }
    }
    unreachable!()
}
