//! Finite domains, operations stored as value tables, composition, kernels
//! and semilattice validation.
//!
//! Tables are indexed row-major by the argument tuple `(a_1, ..., a_n)`
//! with `a_1` the most significant digit in radix `k`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A domain element. Domains hold at most 256 elements.
pub type Elem = u8;

/// Largest table (in entries) an operation may carry.
pub const MAX_TABLE_LEN: usize = 1 << 26;

/// The finite base set `{0, ..., k-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Domain(u16);

impl Domain {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > 256 {
            return Err(Error::InvalidDomain(size));
        }
        Ok(Domain(size as u16))
    }

    pub fn boolean() -> Self {
        Domain(2)
    }

    pub fn size(self) -> usize {
        self.0 as usize
    }

    pub fn elements(self) -> impl Iterator<Item = Elem> {
        (0..self.0).map(|a| a as Elem)
    }

    pub fn contains(self, a: Elem) -> bool {
        (a as usize) < self.size()
    }

    /// Number of argument tuples `k^n`, or an error when it exceeds [`MAX_TABLE_LEN`].
    pub fn tuple_count(self, arity: usize) -> Result<usize> {
        let too_large = Error::TooLarge { size: self.size(), arity };
        let n = u32::try_from(arity).map_err(|_| Error::TooLarge { size: self.size(), arity })?;
        match self.size().checked_pow(n) {
            Some(len) if len <= MAX_TABLE_LEN => Ok(len),
            _ => Err(too_large),
        }
    }

    /// Writes the digits of tuple `index` (most significant first) into `out`.
    pub fn decode(self, mut index: usize, out: &mut [Elem]) {
        let k = self.size();
        for slot in out.iter_mut().rev() {
            *slot = (index % k) as Elem;
            index /= k;
        }
    }

    pub fn encode(self, args: &[Elem]) -> usize {
        let k = self.size();
        args.iter().fold(0, |acc, &a| acc * k + a as usize)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{0..{}}}", self.size() - 1)
    }
}

/// An `n`-ary operation on a finite domain, stored as its full value table.
///
/// Equality is table equality together with domain and arity; operations of
/// different arities are never equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OperationJson", into = "OperationJson")]
pub struct Operation {
    domain: Domain,
    arity: usize,
    table: Vec<Elem>,
}

impl Ord for Operation {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.domain, self.arity, &self.table).cmp(&(other.domain, other.arity, &other.table))
    }
}

impl PartialOrd for Operation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Operation {
    pub fn new(domain: Domain, arity: usize, table: Vec<Elem>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::NullaryOperation);
        }
        let expected = domain.tuple_count(arity)?;
        if table.len() != expected {
            return Err(Error::TableLength { expected, found: table.len() });
        }
        if let Some(&bad) = table.iter().find(|&&v| !domain.contains(v)) {
            return Err(Error::ElementOutOfRange { elem: bad as usize, size: domain.size() });
        }
        Ok(Operation { domain, arity, table })
    }

    /// Builds the operation by evaluating `f` on every argument tuple in table order.
    pub fn from_fn(domain: Domain, arity: usize, mut f: impl FnMut(&[Elem]) -> Elem) -> Result<Self> {
        if arity == 0 {
            return Err(Error::NullaryOperation);
        }
        let len = domain.tuple_count(arity)?;
        let mut args = vec![0; arity];
        let mut table = Vec::with_capacity(len);
        for idx in 0..len {
            domain.decode(idx, &mut args);
            table.push(f(&args));
        }
        Operation::new(domain, arity, table)
    }

    pub fn constant(domain: Domain, arity: usize, value: Elem) -> Result<Self> {
        if !domain.contains(value) {
            return Err(Error::ElementOutOfRange { elem: value as usize, size: domain.size() });
        }
        if arity == 0 {
            return Err(Error::NullaryOperation);
        }
        Ok(Operation { domain, arity, table: vec![value; domain.tuple_count(arity)?] })
    }

    /// The projection `x_i^(n)`; `index` is 1-based.
    pub fn projection(domain: Domain, arity: usize, index: usize) -> Result<Self> {
        if index == 0 || index > arity {
            return Err(Error::ProjectionIndex { index, arity });
        }
        Operation::from_fn(domain, arity, |args| args[index - 1])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn into_table(self) -> Vec<Elem> {
        self.table
    }

    /// Value at a raw table index.
    #[inline]
    pub fn at(&self, index: usize) -> Elem {
        self.table[index]
    }

    pub fn eval(&self, args: &[Elem]) -> Result<Elem> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: args.len() });
        }
        if let Some(&bad) = args.iter().find(|&&a| !self.domain.contains(a)) {
            return Err(Error::ElementOutOfRange { elem: bad as usize, size: self.domain.size() });
        }
        Ok(self.table[self.domain.encode(args)])
    }

    /// `Some(c)` when the operation is constant with value `c`.
    pub fn constant_value(&self) -> Option<Elem> {
        let first = self.table[0];
        self.table.iter().all(|&v| v == first).then_some(first)
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// `self(inner_1, ..., inner_n)`: all inner operations share one arity `m`,
    /// and the result is `m`-ary.
    pub fn compose(&self, inner: &[Operation]) -> Result<Operation> {
        let refs: Vec<&Operation> = inner.iter().collect();
        self.compose_refs(&refs)
    }

    pub fn compose_refs(&self, inner: &[&Operation]) -> Result<Operation> {
        if inner.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: inner.len() });
        }
        let m = inner[0].arity;
        for h in inner {
            if h.domain != self.domain {
                return Err(Error::DomainMismatch(self.domain.size(), h.domain.size()));
            }
            if h.arity != m {
                return Err(Error::ArityMismatch { expected: m, found: h.arity });
            }
        }
        let k = self.domain.size();
        let len = inner[0].table.len();
        let table = (0..len)
            .map(|row| {
                let idx = inner.iter().fold(0usize, |acc, h| acc * k + h.table[row] as usize);
                self.table[idx]
            })
            .collect();
        Ok(Operation { domain: self.domain, arity: m, table })
    }

    /// `self(x_{map[0]+1}, ..., x_{map[n-1]+1})` as an operation of arity `new_arity`.
    /// `map` holds 0-based variable indices.
    pub fn substitute_variables(&self, map: &[usize], new_arity: usize) -> Result<Operation> {
        if map.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: map.len() });
        }
        let projections = map
            .iter()
            .map(|&v| Operation::projection(self.domain, new_arity, v + 1))
            .collect::<Result<Vec<_>>>()?;
        self.compose(&projections)
    }

    /// Zero-based indices of the variables the operation actually depends on.
    pub fn essential_variables(&self) -> Vec<usize> {
        let k = self.domain.size();
        (0..self.arity)
            .filter(|&var| {
                let stride = k.pow((self.arity - 1 - var) as u32);
                (0..self.table.len()).any(|idx| {
                    let digit = (idx / stride) % k;
                    digit > 0 && self.table[idx] != self.table[idx - stride]
                })
            })
            .collect()
    }

    /// The operation with its inessential variables deleted. Constants keep arity 1.
    pub fn without_dummies(&self) -> Operation {
        let essential = self.essential_variables();
        if essential.len() == self.arity {
            return self.clone();
        }
        if essential.is_empty() {
            return Operation { domain: self.domain, arity: 1, table: vec![self.table[0]; self.domain.size()] };
        }
        let new_arity = essential.len();
        let mut position = vec![0usize; self.arity];
        for (new, &old) in essential.iter().enumerate() {
            position[old] = new;
        }
        let mut args = vec![0; new_arity];
        let mut full = vec![0; self.arity];
        let len = self.domain.size().pow(new_arity as u32);
        let table = (0..len)
            .map(|idx| {
                self.domain.decode(idx, &mut args);
                for (old, slot) in full.iter_mut().enumerate() {
                    *slot = if essential.contains(&old) { args[position[old]] } else { 0 };
                }
                self.table[self.domain.encode(&full)]
            })
            .collect();
        Operation { domain: self.domain, arity: new_arity, table }
    }

    /// Fixes some coordinates to constants. Returns the residual function over
    /// the remaining coordinates (in their original order), or the value when
    /// every coordinate is fixed.
    pub fn fix_coordinates(&self, fixed: &[Option<Elem>]) -> Result<Residual> {
        if fixed.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: fixed.len() });
        }
        let free: Vec<usize> = (0..self.arity).filter(|&i| fixed[i].is_none()).collect();
        let mut full: Vec<Elem> = fixed.iter().map(|c| c.unwrap_or(0)).collect();
        if free.is_empty() {
            return Ok(Residual::Value(self.table[self.domain.encode(&full)]));
        }
        let mut args = vec![0; free.len()];
        let op = Operation::from_fn(self.domain, free.len(), |a| {
            args.copy_from_slice(a);
            for (slot, &var) in free.iter().enumerate() {
                full[var] = args[slot];
            }
            self.table[self.domain.encode(&full)]
        })?;
        Ok(Residual::Operation(op))
    }

    pub fn kernel(&self) -> Kernel {
        kernel_of(self)
    }

    /// Compact table text, e.g. `2:0001` for binary AND.
    pub fn digest(&self) -> String {
        let body = if self.domain.size() <= 10 {
            self.table.iter().map(|v| char::from(b'0' + v)).collect::<String>()
        } else {
            self.table.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(".")
        };
        format!("{}:{}", self.arity, body)
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.digest())
    }
}

/// Result of fixing coordinates of an operation to constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Residual {
    Value(Elem),
    Operation(Operation),
}

/// Wire form of an [`Operation`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationJson {
    pub domain: usize,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl TryFrom<OperationJson> for Operation {
    type Error = Error;

    fn try_from(json: OperationJson) -> Result<Self> {
        let domain = Domain::new(json.domain)?;
        let table = json
            .table
            .into_iter()
            .map(|v| {
                if v < domain.size() {
                    Ok(v as Elem)
                } else {
                    Err(Error::ElementOutOfRange { elem: v, size: domain.size() })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Operation::new(domain, json.arity, table)
    }
}

impl From<Operation> for OperationJson {
    fn from(op: Operation) -> Self {
        OperationJson {
            domain: op.domain.size(),
            arity: op.arity,
            table: op.table.into_iter().map(usize::from).collect(),
        }
    }
}

/// A partition of the argument-tuple indices `0..k^n`, stored as a canonical
/// labeling that maps every index to the smallest index of its block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Kernel {
    labels: Vec<u32>,
}

impl Kernel {
    /// Every index in its own block.
    pub fn discrete(len: usize) -> Self {
        Kernel { labels: (0..len as u32).collect() }
    }

    /// A single block.
    pub fn trivial(len: usize) -> Self {
        Kernel { labels: vec![0; len] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> usize {
        self.labels[index] as usize
    }

    /// Common refinement with the fibers of `values`.
    pub fn refine_by(&self, values: &[Elem]) -> Kernel {
        debug_assert_eq!(values.len(), self.labels.len());
        let mut first: HashMap<(u32, Elem), u32> = HashMap::new();
        let labels = self
            .labels
            .iter()
            .zip(values)
            .enumerate()
            .map(|(i, (&label, &v))| *first.entry((label, v)).or_insert(i as u32))
            .collect();
        Kernel { labels }
    }

    /// Joint kernel of a tuple of operations of equal arity: two tuples share a
    /// block iff every operation agrees on them.
    pub fn joint<'a>(len: usize, ops: impl IntoIterator<Item = &'a Operation>) -> Kernel {
        ops.into_iter().fold(Kernel::trivial(len), |acc, op| acc.refine_by(op.table()))
    }

    /// `true` iff every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Kernel) -> Result<bool> {
        if self.len() != other.len() {
            return Err(Error::ArityMismatch { expected: self.len(), found: other.len() });
        }
        Ok(self
            .labels
            .iter()
            .enumerate()
            .all(|(i, &rep)| other.labels[rep as usize] == other.labels[i]))
    }

    /// Blocks in order of their smallest element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut position: HashMap<u32, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &label) in self.labels.iter().enumerate() {
            let slot = *position.entry(label).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[slot].push(i);
        }
        blocks
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().enumerate().filter(|&(i, &l)| l as usize == i).count()
    }
}

pub fn kernel_of(op: &Operation) -> Kernel {
    Kernel::trivial(op.table.len()).refine_by(&op.table)
}

pub fn kernel_refines(p: &Kernel, q: &Kernel) -> Result<bool> {
    p.refines(q)
}

/// The first semilattice identity that fails on a binary table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    Idempotency(Elem),
    Commutativity(Elem, Elem),
    Associativity(Elem, Elem, Elem),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Idempotency(a) => write!(f, "idempotency fails at ({a},{a})"),
            Violation::Commutativity(a, b) => write!(f, "commutativity fails at ({a},{b})"),
            Violation::Associativity(a, b, c) => write!(f, "associativity fails at ({a},{b},{c})"),
        }
    }
}

/// Scans all `k^3` triples and reports the first failing identity.
pub fn semilattice_violation(op: &Operation) -> Option<Violation> {
    assert_eq!(op.arity(), 2, "semilattice check needs a binary operation");
    let k = op.domain.size();
    let m = |a: Elem, b: Elem| op.table[a as usize * k + b as usize];
    let elems: Vec<Elem> = op.domain.elements().collect();
    for &a in &elems {
        if m(a, a) != a {
            return Some(Violation::Idempotency(a));
        }
    }
    for &a in &elems {
        for &b in &elems {
            if m(a, b) != m(b, a) {
                return Some(Violation::Commutativity(a, b));
            }
        }
    }
    for &a in &elems {
        for &b in &elems {
            for &c in &elems {
                if m(a, m(b, c)) != m(m(a, b), c) {
                    return Some(Violation::Associativity(a, b, c));
                }
            }
        }
    }
    None
}

pub fn is_semilattice(op: &Operation) -> bool {
    op.arity() == 2 && semilattice_violation(op).is_none()
}

/// The element `e` with `e ∧ x = x` for all `x`.
pub fn find_identity(op: &Operation) -> Option<Elem> {
    let k = op.domain.size();
    op.domain
        .elements()
        .find(|&e| op.domain.elements().all(|x| op.table[e as usize * k + x as usize] == x))
}

/// The element `z` with `z ∧ x = z` for all `x`.
pub fn find_zero(op: &Operation) -> Option<Elem> {
    let k = op.domain.size();
    op.domain
        .elements()
        .find(|&z| op.domain.elements().all(|x| op.table[z as usize * k + x as usize] == z))
}

/// A validated semilattice `(A; ∧)` with its identity and zero, when they exist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SemilatticeJson", into = "SemilatticeJson")]
pub struct SemilatticeStructure {
    domain: Domain,
    meet: Operation,
    identity: Option<Elem>,
    zero: Option<Elem>,
}

impl SemilatticeStructure {
    pub fn new(meet: Operation) -> Result<Self> {
        if meet.arity() != 2 {
            return Err(Error::NotSemilattice(format!("arity {} is not 2", meet.arity())));
        }
        if let Some(v) = semilattice_violation(&meet) {
            return Err(Error::NotSemilattice(v.to_string()));
        }
        Ok(SemilatticeStructure {
            domain: meet.domain(),
            identity: find_identity(&meet),
            zero: find_zero(&meet),
            meet,
        })
    }

    /// `min` on the chain `0 < 1 < ... < k-1`.
    pub fn chain(size: usize) -> Result<Self> {
        let domain = Domain::new(size)?;
        SemilatticeStructure::new(Operation::from_fn(domain, 2, |a| a[0].min(a[1]))?)
    }

    /// Boolean AND.
    pub fn boolean() -> Self {
        SemilatticeStructure::chain(2).expect("the 2-chain is a semilattice")
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn meet_operation(&self) -> &Operation {
        &self.meet
    }

    pub fn identity(&self) -> Option<Elem> {
        self.identity
    }

    pub fn zero(&self) -> Option<Elem> {
        self.zero
    }

    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet.table[a as usize * self.domain.size() + b as usize]
    }

    /// Semilattice order: `a ≤ b` iff `a ∧ b = a`.
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.meet(a, b) == a
    }
}

/// Wire form of a [`SemilatticeStructure`]: the meet as a `k × k` matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemilatticeJson {
    pub domain: usize,
    pub meet: Vec<Vec<usize>>,
}

impl TryFrom<SemilatticeJson> for Operation {
    type Error = Error;

    fn try_from(json: SemilatticeJson) -> Result<Self> {
        let domain = Domain::new(json.domain)?;
        if json.meet.len() != domain.size() {
            return Err(Error::TableLength { expected: domain.size(), found: json.meet.len() });
        }
        let mut table = Vec::with_capacity(domain.size() * domain.size());
        for row in json.meet {
            if row.len() != domain.size() {
                return Err(Error::TableLength { expected: domain.size(), found: row.len() });
            }
            table.extend(row);
        }
        Operation::try_from(OperationJson { domain: domain.size(), arity: 2, table })
    }
}

impl TryFrom<SemilatticeJson> for SemilatticeStructure {
    type Error = Error;

    fn try_from(json: SemilatticeJson) -> Result<Self> {
        SemilatticeStructure::new(Operation::try_from(json)?)
    }
}

impl From<SemilatticeStructure> for SemilatticeJson {
    fn from(s: SemilatticeStructure) -> Self {
        let k = s.domain.size();
        SemilatticeJson {
            domain: k,
            meet: s.meet.table.chunks(k).map(|row| row.iter().map(|&v| v as usize).collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and() -> Operation {
        Operation::new(Domain::boolean(), 2, vec![0, 0, 0, 1]).unwrap()
    }

    fn xor() -> Operation {
        Operation::new(Domain::boolean(), 2, vec![0, 1, 1, 0]).unwrap()
    }

    fn min3() -> Operation {
        Operation::from_fn(Domain::new(3).unwrap(), 2, |a| a[0].min(a[1])).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(and().eval(&[1, 1]).unwrap(), 1);
        assert_eq!(and().eval(&[0, 1]).unwrap(), 0);
        assert_eq!(min3().eval(&[2, 1]).unwrap(), 1);
    }

    #[test]
    fn eval_errors() {
        assert!(matches!(and().eval(&[1]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(and().eval(&[2, 0]), Err(Error::ElementOutOfRange { .. })));
    }

    #[test]
    fn construction_errors() {
        let b = Domain::boolean();
        assert!(matches!(Operation::new(b, 2, vec![0, 1, 1]), Err(Error::TableLength { .. })));
        assert!(matches!(Operation::new(b, 1, vec![0, 2]), Err(Error::ElementOutOfRange { .. })));
        assert!(matches!(Operation::new(b, 0, vec![0]), Err(Error::NullaryOperation)));
        assert!(Domain::new(0).is_err());
    }

    #[test]
    fn projection_tables() {
        let b = Domain::boolean();
        assert_eq!(Operation::projection(b, 2, 1).unwrap().table(), &[0, 0, 1, 1]);
        assert_eq!(Operation::projection(b, 2, 2).unwrap().table(), &[0, 1, 0, 1]);
        assert_eq!(Operation::projection(Domain::new(3).unwrap(), 1, 1).unwrap().table(), &[0, 1, 2]);
        assert!(matches!(Operation::projection(b, 2, 3), Err(Error::ProjectionIndex { .. })));
        assert!(matches!(Operation::projection(b, 2, 0), Err(Error::ProjectionIndex { .. })));
    }

    #[test]
    fn compose_examples() {
        let b = Domain::boolean();
        let id = Operation::projection(b, 1, 1).unwrap();
        assert_eq!(and().compose(&[id.clone(), id.clone()]).unwrap(), id);

        let p1 = Operation::projection(b, 2, 1).unwrap();
        assert_eq!(p1.compose(&[and(), xor()]).unwrap(), and());

        let x = |i| Operation::projection(b, 3, i).unwrap();
        let inner = and().compose(&[x(2), x(3)]).unwrap();
        let and3 = and().compose(&[x(1), inner]).unwrap();
        let oracle = Operation::from_fn(b, 3, |a| a[0] & a[1] & a[2]).unwrap();
        assert_eq!(and3, oracle);
    }

    #[test]
    fn compose_errors() {
        let b = Domain::boolean();
        let x1 = Operation::projection(b, 1, 1).unwrap();
        let y1 = Operation::projection(b, 2, 1).unwrap();
        assert!(matches!(and().compose(std::slice::from_ref(&x1)), Err(Error::ArityMismatch { .. })));
        assert!(matches!(and().compose(&[x1.clone(), y1]), Err(Error::ArityMismatch { .. })));
        let z = Operation::projection(Domain::new(3).unwrap(), 1, 1).unwrap();
        assert!(matches!(and().compose(&[x1, z]), Err(Error::DomainMismatch(..))));
    }

    #[test]
    fn semilattice_examples() {
        assert!(is_semilattice(&and()));
        assert!(!is_semilattice(&xor()));
        assert_eq!(semilattice_violation(&xor()), Some(Violation::Idempotency(1)));
        assert!(is_semilattice(&min3()));
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(find_identity(&and()), Some(1));
        assert_eq!(find_zero(&and()), Some(0));
        assert_eq!(find_identity(&min3()), Some(2));
        assert_eq!(find_zero(&min3()), Some(0));

        // {a, b, ab} encoded as 0 = a, 1 = b, 2 = ab, with a ∧ b = ab.
        let d = Domain::new(3).unwrap();
        let meet = Operation::new(d, 2, vec![0, 2, 2, 2, 1, 2, 2, 2, 2]).unwrap();
        assert!(is_semilattice(&meet));
        // oracle: scan every candidate against every element
        let ident: Vec<Elem> =
            d.elements().filter(|&e| d.elements().all(|x| meet.eval(&[e, x]).unwrap() == x)).collect();
        let zero: Vec<Elem> =
            d.elements().filter(|&z| d.elements().all(|x| meet.eval(&[z, x]).unwrap() == z)).collect();
        assert!(ident.is_empty());
        assert_eq!(zero, vec![2]);
        assert_eq!(find_identity(&meet), None);
        assert_eq!(find_zero(&meet), Some(2));
    }

    #[test]
    fn chains_are_semilattices_and_mutants_are_not() {
        for k in 1..=4 {
            let s = SemilatticeStructure::chain(k).unwrap();
            let table = s.meet_operation().table().to_vec();
            for idx in 0..table.len() {
                for v in 0..k as Elem {
                    if v == table[idx] {
                        continue;
                    }
                    let mut mutated = table.clone();
                    mutated[idx] = v;
                    let op = Operation::new(s.domain(), 2, mutated).unwrap();
                    assert!(!is_semilattice(&op), "mutant {:?} accepted", op.table());
                }
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let b = Domain::boolean();
        let x1 = Operation::projection(b, 2, 1).unwrap();
        assert_eq!(x1.kernel().blocks(), vec![vec![0, 1], vec![2, 3]]);
        let c = Operation::constant(b, 2, 1).unwrap();
        assert_eq!(c.kernel().blocks(), vec![vec![0, 1, 2, 3]]);
        assert_eq!(and().kernel().blocks(), vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn kernel_refinement() {
        let q = and().kernel();
        assert!(Kernel::discrete(4).refines(&q).unwrap());
        assert!(q.refines(&Kernel::trivial(4)).unwrap());
        let x1 = Operation::projection(Domain::boolean(), 2, 1).unwrap();
        assert!(!x1.kernel().refines(&q).unwrap());
        assert!(Kernel::discrete(4).refines(&Kernel::trivial(8)).is_err());
    }

    #[test]
    fn kernel_labels_are_idempotent() {
        let k = xor().kernel();
        for i in 0..k.len() {
            assert_eq!(k.label(k.label(i)), k.label(i));
        }
    }

    #[test]
    fn essential_variables_and_reduction() {
        let b = Domain::boolean();
        let f = Operation::from_fn(b, 3, |a| a[0] & a[2]).unwrap();
        assert_eq!(f.essential_variables(), vec![0, 2]);
        assert_eq!(f.without_dummies(), and());
        let c = Operation::constant(b, 3, 1).unwrap();
        assert_eq!(c.without_dummies(), Operation::constant(b, 1, 1).unwrap());
    }

    #[test]
    fn fixing_coordinates() {
        let b = Domain::boolean();
        let and3 = Operation::from_fn(b, 3, |a| a[0] & a[1] & a[2]).unwrap();
        assert_eq!(and3.fix_coordinates(&[Some(1), None, None]).unwrap(), Residual::Operation(and()));
        assert_eq!(and3.fix_coordinates(&[Some(1), Some(1), Some(0)]).unwrap(), Residual::Value(0));
    }

    #[test]
    fn json_round_trip_and_rejects_bad_length() {
        let json = serde_json::to_string(&and()).unwrap();
        assert_eq!(json, r#"{"domain":2,"arity":2,"table":[0,0,0,1]}"#);
        let back: Operation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, and());
        assert!(serde_json::from_str::<Operation>(r#"{"domain":2,"arity":2,"table":[0,0,1]}"#).is_err());

        let s: SemilatticeStructure = serde_json::from_str(r#"{"domain":2,"meet":[[0,0],[0,1]]}"#).unwrap();
        assert_eq!(s.identity(), Some(1));
        assert_eq!(s.zero(), Some(0));
        assert!(serde_json::from_str::<SemilatticeStructure>(r#"{"domain":2,"meet":[[0,0],[0]]}"#).is_err());
        assert!(serde_json::from_str::<SemilatticeStructure>(r#"{"domain":2,"meet":[[0,1],[1,0]]}"#).is_err());
    }
}
