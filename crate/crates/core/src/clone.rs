//! Bounded clone generation and the generic minor machinery for an arbitrary
//! finitely generated clone: minor search, degrees, minimal decompositions
//! and functional dependence.

use std::collections::HashSet;

use crate::algebra::{kernel_of, Domain, Elem, Kernel, Operation};
use crate::error::{Error, Result};
use crate::semilattice::MeetClone;

/// Node budget for exhaustive searches. Exceeding it is a hard error, so an
/// absent result is always a proof of absence.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub const DEFAULT_LIMIT: u64 = 200_000_000;

    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.used)
    }

    /// Charges `nodes` spent under a separate budget.
    pub fn charge(&mut self, nodes: u64) -> Result<()> {
        self.used = self.used.saturating_add(nodes);
        if self.used > self.limit {
            return Err(Error::ResourceLimit { what: "search node budget", limit: self.limit });
        }
        Ok(())
    }

    pub fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::ResourceLimit { what: "search node budget", limit: self.limit });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Budget::DEFAULT_LIMIT)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CloneLimits {
    pub max_part_size: usize,
}

impl Default for CloneLimits {
    fn default() -> Self {
        CloneLimits { max_part_size: 1 << 16 }
    }
}

/// The parts `C^(1), ..., C^(N)` of a generated clone, each sorted in the
/// canonical operation order.
#[derive(Clone, Debug)]
pub struct CloneTable {
    domain: Domain,
    generators: Vec<Operation>,
    max_arity: usize,
    parts: Vec<Vec<Operation>>,
    meet_family: Option<MeetClone>,
}

impl CloneTable {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn generators(&self) -> &[Operation] {
        &self.generators
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    /// The `n`-ary part; empty outside `1..=max_arity`.
    pub fn part(&self, n: usize) -> &[Operation] {
        if n == 0 || n > self.max_arity {
            return &[];
        }
        &self.parts[n - 1]
    }

    pub fn contains(&self, op: &Operation) -> bool {
        op.domain() == self.domain && self.part(op.arity()).binary_search(op).is_ok()
    }

    /// Part-by-part inclusion up to the smaller arity bound.
    pub fn is_subclone_of(&self, other: &CloneTable) -> bool {
        let bound = self.max_arity.min(other.max_arity);
        (1..=bound).all(|n| self.part(n).iter().all(|op| other.contains(op)))
    }

    /// The clone between `⟨∧⟩` and `⟨∧,0,1⟩` this table was generated from, if any.
    pub fn meet_family(&self) -> Option<&MeetClone> {
        self.meet_family.as_ref()
    }

    pub(crate) fn set_meet_family(&mut self, family: MeetClone) {
        self.meet_family = Some(family);
    }

    fn check_arity(&self, f: &Operation) -> Result<()> {
        if f.domain() != self.domain {
            return Err(Error::DomainMismatch(f.domain().size(), self.domain.size()));
        }
        if f.arity() > self.max_arity {
            return Err(Error::ArityBound { arity: f.arity(), bound: self.max_arity });
        }
        Ok(())
    }
}

/// Closes the projections of each arity `n ≤ max_arity` under the generators.
///
/// Every `n`-ary term over the generators can be evaluated with all subterms
/// read as `n`-ary operations, so each part is the closure of the `n`-ary
/// projections under pointwise application of the generators.
pub fn generate_clone(
    domain: Domain,
    generators: &[Operation],
    max_arity: usize,
    limits: CloneLimits,
) -> Result<CloneTable> {
    if max_arity == 0 {
        return Err(Error::NullaryOperation);
    }
    for g in generators {
        if g.domain() != domain {
            return Err(Error::DomainMismatch(g.domain().size(), domain.size()));
        }
    }
    let mut parts = Vec::with_capacity(max_arity);
    for n in 1..=max_arity {
        let mut members: Vec<Operation> =
            (1..=n).map(|i| Operation::projection(domain, n, i)).collect::<Result<_>>()?;
        let mut seen: HashSet<Operation> = members.iter().cloned().collect();
        let mut done = 0;
        while done < members.len() {
            let frontier_end = members.len();
            for g in generators {
                let r = g.arity();
                let mut idx = vec![0usize; r];
                'tuples: loop {
                    // only tuples touching an element added in the last round
                    if idx.iter().any(|&i| i >= done) {
                        let inner: Vec<&Operation> = idx.iter().map(|&i| &members[i]).collect();
                        let h = g.compose_refs(&inner)?;
                        if seen.insert(h.clone()) {
                            members.push(h);
                            if members.len() > limits.max_part_size {
                                return Err(Error::ResourceLimit {
                                    what: "clone part size",
                                    limit: limits.max_part_size as u64,
                                });
                            }
                        }
                    }
                    for pos in (0..r).rev() {
                        idx[pos] += 1;
                        if idx[pos] < frontier_end {
                            continue 'tuples;
                        }
                        idx[pos] = 0;
                    }
                    break;
                }
            }
            done = frontier_end;
        }
        members.sort();
        parts.push(members);
    }
    Ok(CloneTable { domain, generators: generators.to_vec(), max_arity, parts, meet_family: None })
}

/// A presentation `f = outer(inner_1, ..., inner_m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub outer: Operation,
    pub inner: Vec<Operation>,
}

impl Decomposition {
    pub fn compose(&self) -> Result<Operation> {
        self.outer.compose(&self.inner)
    }

    pub fn decomposes(&self, f: &Operation) -> bool {
        self.compose().map(|h| &h == f).unwrap_or(false)
    }

    pub fn outer_arity(&self) -> usize {
        self.outer.arity()
    }
}

/// Small bitset over domain elements.
#[derive(Clone, Copy, Default, PartialEq, Eq)]
struct ValueSet([u64; 4]);

impl ValueSet {
    fn single(v: Elem) -> Self {
        let mut s = ValueSet::default();
        s.0[(v >> 6) as usize] |= 1 << (v & 63);
        s
    }

    fn union(&mut self, other: &ValueSet) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a |= b;
        }
    }

    #[inline]
    fn contains(&self, v: Elem) -> bool {
        self.0[(v >> 6) as usize] & (1 << (v & 63)) != 0
    }
}

/// For each prefix `(b_1, ..., b_j)` of arguments, the set of values the
/// outer operation can still take.
pub(crate) struct PrefixReach {
    levels: Vec<Vec<ValueSet>>,
}

impl PrefixReach {
    pub(crate) fn new(g: &Operation) -> Self {
        let k = g.domain().size();
        let m = g.arity();
        let mut levels = vec![Vec::new(); m + 1];
        levels[m] = g.table().iter().map(|&v| ValueSet::single(v)).collect();
        for j in (0..m).rev() {
            let below = &levels[j + 1];
            let level = (0..below.len() / k)
                .map(|p| {
                    let mut s = ValueSet::default();
                    for a in 0..k {
                        s.union(&below[p * k + a]);
                    }
                    s
                })
                .collect();
            levels[j] = level;
        }
        PrefixReach { levels }
    }

    #[inline]
    pub(crate) fn allows(&self, depth: usize, prefix: usize, value: Elem) -> bool {
        self.levels[depth][prefix].contains(value)
    }
}

/// Backtracking search for `f = g(h_1, ..., h_m)` with every `h_j` drawn from
/// `candidates` (all of `f`'s arity). Tuples are explored in lexicographic
/// order of candidate positions; the first witness is returned.
pub(crate) fn search_inner_tuple(
    f: &Operation,
    g: &Operation,
    candidates: &[&Operation],
    budget: &mut Budget,
) -> Result<Option<Vec<usize>>> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch(f.domain().size(), g.domain().size()));
    }
    let k = f.domain().size();
    let m = g.arity();
    let rows = f.table().len();
    let reach = PrefixReach::new(g);
    if !(0..rows).all(|r| reach.allows(0, 0, f.at(r))) {
        return Ok(None);
    }
    let mut prefixes = vec![vec![0usize; rows]; m + 1];
    let mut choice = vec![0usize; m];
    let mut depth = 0;
    // choice[depth] is the next candidate to try at depth
    loop {
        if choice[depth] == candidates.len() {
            if depth == 0 {
                return Ok(None);
            }
            choice[depth] = 0;
            depth -= 1;
            choice[depth] += 1;
            continue;
        }
        budget.tick()?;
        let h = candidates[choice[depth]];
        let (done, rest) = prefixes.split_at_mut(depth + 1);
        let prev = &done[depth];
        let next = &mut rest[0];
        let mut ok = true;
        for r in 0..rows {
            let p = prev[r] * k + h.at(r) as usize;
            if !reach.allows(depth + 1, p, f.at(r)) {
                ok = false;
                break;
            }
            next[r] = p;
        }
        if !ok {
            choice[depth] += 1;
            continue;
        }
        if depth + 1 == m {
            return Ok(Some(choice));
        }
        depth += 1;
    }
}

/// Decides `f ⊑_C g`, returning a witness `f = g(h_1, ..., h_m)` with all
/// `h_j ∈ C^(f.arity)`. Absence is exhaustive over that part.
pub fn is_c_minor(f: &Operation, g: &Operation, clone: &CloneTable, budget: &mut Budget) -> Result<Option<Decomposition>> {
    clone.check_arity(f)?;
    if g.domain() != clone.domain {
        return Err(Error::DomainMismatch(g.domain().size(), clone.domain.size()));
    }
    let candidates: Vec<&Operation> = clone.part(f.arity()).iter().collect();
    Ok(search_inner_tuple(f, g, &candidates, budget)?.map(|choice| Decomposition {
        outer: g.clone(),
        inner: choice.into_iter().map(|i| candidates[i].clone()).collect(),
    }))
}

pub fn c_equivalent(f: &Operation, g: &Operation, clone: &CloneTable, budget: &mut Budget) -> Result<bool> {
    clone.check_arity(g)?;
    Ok(is_c_minor(f, g, clone, budget)?.is_some() && is_c_minor(g, f, clone, budget)?.is_some())
}

/// The outer function `g` with `f = g(inner)`, if the joint kernel of `inner`
/// refines the kernel of `f`. Off the image of the inner tuple, `g` is 0.
pub fn factor_through(f: &Operation, inner: &[&Operation]) -> Result<Option<Operation>> {
    let Some(first) = inner.first() else {
        return Err(Error::ArityMismatch { expected: 1, found: 0 });
    };
    let domain = f.domain();
    for h in inner {
        if h.domain() != domain {
            return Err(Error::DomainMismatch(h.domain().size(), domain.size()));
        }
        if h.arity() != f.arity() {
            return Err(Error::ArityMismatch { expected: f.arity(), found: h.arity() });
        }
    }
    debug_assert_eq!(first.arity(), f.arity());
    let k = domain.size();
    let len = domain.tuple_count(inner.len())?;
    let mut table = vec![0 as Elem; len];
    let mut assigned = vec![false; len];
    for row in 0..f.table().len() {
        let idx = inner.iter().fold(0usize, |acc, h| acc * k + h.at(row) as usize);
        if assigned[idx] {
            if table[idx] != f.at(row) {
                return Ok(None);
            }
        } else {
            assigned[idx] = true;
            table[idx] = f.at(row);
        }
    }
    Operation::new(domain, inner.len(), table).map(Some)
}

/// Searches for the least `m` such that some `m` distinct nonconstant members
/// of `C^(n)` have a joint kernel refining `ker f`, returning their positions
/// in the part.
fn least_factoring_subset(f: &Operation, clone: &CloneTable, budget: &mut Budget) -> Result<Vec<usize>> {
    let part = clone.part(f.arity());
    let candidates: Vec<usize> = (0..part.len()).filter(|&i| !part[i].is_constant()).collect();
    let target = kernel_of(f);
    let rows = f.table().len();
    for m in 1..=candidates.len() {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        let mut kernels: Vec<Kernel> = vec![Kernel::trivial(rows)];
        let mut next = 0;
        loop {
            if chosen.len() == m || next + (m - chosen.len()) > candidates.len() {
                if chosen.len() == m && kernels.last().expect("nonempty").refines(&target)? {
                    return Ok(chosen.iter().map(|&c| candidates[c]).collect());
                }
                match chosen.pop() {
                    Some(last) => {
                        kernels.pop();
                        next = last + 1;
                        continue;
                    }
                    None => break,
                }
            }
            budget.tick()?;
            let refined = kernels.last().expect("nonempty").refine_by(part[candidates[next]].table());
            kernels.push(refined);
            chosen.push(next);
            next += 1;
        }
    }
    // the projections always factor a nonconstant f, so this is unreachable
    // for a genuine clone table
    Err(Error::VerificationFailed("no factoring tuple found among the clone members".into()))
}

/// The `C`-degree: 0 for constants, otherwise the least outer arity over all
/// `C`-decompositions.
pub fn c_degree(f: &Operation, clone: &CloneTable, budget: &mut Budget) -> Result<usize> {
    clone.check_arity(f)?;
    if f.is_constant() {
        return Ok(0);
    }
    Ok(least_factoring_subset(f, clone, budget)?.len())
}

pub fn minimal_decomposition(f: &Operation, clone: &CloneTable, budget: &mut Budget) -> Result<Decomposition> {
    clone.check_arity(f)?;
    if f.is_constant() {
        return Err(Error::ConstantFunction);
    }
    let part = clone.part(f.arity());
    let chosen = least_factoring_subset(f, clone, budget)?;
    let inner: Vec<&Operation> = chosen.iter().map(|&i| &part[i]).collect();
    let outer = factor_through(f, &inner)?
        .ok_or_else(|| Error::VerificationFailed("refining tuple failed to factor".into()))?;
    let decomposition = Decomposition { outer, inner: inner.into_iter().cloned().collect() };
    if !decomposition.decomposes(f) {
        return Err(Error::VerificationFailed("synthesized outer function does not reproduce f".into()));
    }
    Ok(decomposition)
}

/// `true` iff some member of the tuple is a function of the others.
pub fn is_functionally_dependent(tuple: &[Operation]) -> Result<bool> {
    if tuple.len() < 2 {
        return Err(Error::TooFewOperations(tuple.len()));
    }
    let first = &tuple[0];
    for op in tuple {
        if op.domain() != first.domain() {
            return Err(Error::DomainMismatch(op.domain().size(), first.domain().size()));
        }
        if op.arity() != first.arity() {
            return Err(Error::ArityMismatch { expected: first.arity(), found: op.arity() });
        }
    }
    let rows = first.table().len();
    for i in 0..tuple.len() {
        let rest = Kernel::joint(rows, tuple.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, op)| op));
        if rest.refines(&kernel_of(&tuple[i]))? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Domain {
        Domain::boolean()
    }

    fn op(arity: usize, f: impl FnMut(&[Elem]) -> Elem) -> Operation {
        Operation::from_fn(b(), arity, f).unwrap()
    }

    fn and2() -> Operation {
        op(2, |a| a[0] & a[1])
    }

    fn meet_clone(n: usize) -> CloneTable {
        generate_clone(b(), &[and2()], n, CloneLimits::default()).unwrap()
    }

    #[test]
    fn meet_clone_ternary_part_has_seven_members() {
        let c = meet_clone(3);
        assert_eq!(c.part(3).len(), 7);
        // cross-check: realizations of the nonempty subsets of {1,2,3}
        let mut terms: Vec<Operation> = (1u8..8)
            .map(|mask| op(3, |a| (0..3).filter(|i| mask >> i & 1 == 1).fold(1, |acc, i| acc & a[i])))
            .collect();
        terms.sort();
        assert_eq!(c.part(3), &terms[..]);
    }

    #[test]
    fn empty_generators_give_projections() {
        let c = generate_clone(b(), &[], 2, CloneLimits::default()).unwrap();
        assert_eq!(c.part(1), &[Operation::projection(b(), 1, 1).unwrap()]);
        let mut p2 = [Operation::projection(b(), 2, 1).unwrap(), Operation::projection(b(), 2, 2).unwrap()];
        p2.sort();
        assert_eq!(c.part(2), &p2[..]);
    }

    #[test]
    fn meet_with_constants_binary_part() {
        let gens = [and2(), Operation::constant(b(), 1, 0).unwrap(), Operation::constant(b(), 1, 1).unwrap()];
        let c = generate_clone(b(), &gens, 2, CloneLimits::default()).unwrap();
        let mut expected = [Operation::projection(b(), 2, 1).unwrap(),
            Operation::projection(b(), 2, 2).unwrap(),
            and2(),
            Operation::constant(b(), 2, 0).unwrap(),
            Operation::constant(b(), 2, 1).unwrap()];
        expected.sort();
        assert_eq!(c.part(2), &expected[..]);
    }

    #[test]
    fn clone_limits_are_hard_errors() {
        let xor = op(2, |a| a[0] ^ a[1]);
        let err = generate_clone(b(), &[and2(), xor], 3, CloneLimits { max_part_size: 10 }).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
        // generators wider than max_arity still act pointwise on the parts
        let unary = generate_clone(b(), &[op(3, |a| a[0] & a[1] & a[2])], 1, CloneLimits::default()).unwrap();
        assert_eq!(unary.part(1).len(), 1);
    }

    #[test]
    fn minor_examples() {
        let c = meet_clone(3);
        let mut budget = Budget::default();
        let xor = op(2, |a| a[0] ^ a[1]);
        let w = is_c_minor(&xor, &xor, &c, &mut budget).unwrap().unwrap();
        assert!(w.decomposes(&xor));

        let and3 = op(3, |a| a[0] & a[1] & a[2]);
        let w = is_c_minor(&and2(), &and3, &c, &mut budget).unwrap().unwrap();
        assert!(w.decomposes(&and2()));

        assert!(is_c_minor(&xor, &and2(), &c, &mut budget).unwrap().is_none());
    }

    #[test]
    fn minor_arity_bound_and_domain_errors() {
        let c = meet_clone(2);
        let and3 = op(3, |a| a[0] & a[1] & a[2]);
        assert!(matches!(is_c_minor(&and3, &and3, &c, &mut Budget::default()), Err(Error::ArityBound { .. })));
        let other = Operation::projection(Domain::new(3).unwrap(), 1, 1).unwrap();
        assert!(matches!(is_c_minor(&other, &other, &c, &mut Budget::default()), Err(Error::DomainMismatch(..))));
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let c = meet_clone(3);
        let xor3 = op(3, |a| a[0] ^ a[1] ^ a[2]);
        let err = is_c_minor(&xor3, &and2(), &c, &mut Budget::new(1)).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn equivalence_examples() {
        let c = meet_clone(2);
        let mut budget = Budget::default();
        let xor = op(2, |a| a[0] ^ a[1]);
        let id = Operation::projection(b(), 1, 1).unwrap();
        assert!(c_equivalent(&xor, &xor, &c, &mut budget).unwrap());
        assert!(c_equivalent(&and2(), &id, &c, &mut budget).unwrap());
        assert!(!c_equivalent(&xor, &and2(), &c, &mut budget).unwrap());
    }

    #[test]
    fn degree_examples() {
        let c = meet_clone(3);
        let mut budget = Budget::default();
        assert_eq!(c_degree(&Operation::constant(b(), 3, 1).unwrap(), &c, &mut budget).unwrap(), 0);
        let and3 = op(3, |a| a[0] & a[1] & a[2]);
        assert_eq!(c_degree(&and3, &c, &mut budget).unwrap(), 1);
        let xor = op(2, |a| a[0] ^ a[1]);
        assert_eq!(c_degree(&xor, &c, &mut budget).unwrap(), 2);
    }

    #[test]
    fn majority_degree_matches_exhaustive_oracle() {
        let c = meet_clone(3);
        let maj = op(3, |a| u8::from(a[0] + a[1] + a[2] >= 2));
        let degree = c_degree(&maj, &c, &mut Budget::default()).unwrap();
        // oracle: try every outer g of arity m and every m-tuple of ternary meets
        let terms = c.part(3).to_vec();
        let oracle = (1..=3usize)
            .find(|&m| {
                let outer_count = 1usize << (1 << m);
                (0..outer_count).any(|bits| {
                    let g = Operation::new(b(), m, (0..1 << m).map(|i| (bits >> i & 1) as Elem).collect()).unwrap();
                    let mut idx = vec![0usize; m];
                    loop {
                        let inner: Vec<Operation> = idx.iter().map(|&i| terms[i].clone()).collect();
                        if g.compose(&inner).unwrap() == maj {
                            return true;
                        }
                        let mut pos = m;
                        loop {
                            if pos == 0 {
                                return false;
                            }
                            pos -= 1;
                            idx[pos] += 1;
                            if idx[pos] < terms.len() {
                                break;
                            }
                            idx[pos] = 0;
                        }
                    }
                })
            })
            .unwrap();
        assert_eq!(oracle, 3);
        assert_eq!(degree, oracle);
    }

    #[test]
    fn minimal_decomposition_examples() {
        let c = meet_clone(2);
        let mut budget = Budget::default();
        let d = minimal_decomposition(&and2(), &c, &mut budget).unwrap();
        assert_eq!(d.outer, Operation::projection(b(), 1, 1).unwrap());
        assert_eq!(d.inner, vec![and2()]);

        let proj = generate_clone(b(), &[], 2, CloneLimits::default()).unwrap();
        let x1 = Operation::projection(b(), 2, 1).unwrap();
        let d = minimal_decomposition(&x1, &proj, &mut budget).unwrap();
        assert_eq!(d.outer, Operation::projection(b(), 1, 1).unwrap());
        assert_eq!(d.inner, vec![x1.clone()]);

        let xor = op(2, |a| a[0] ^ a[1]);
        let d = minimal_decomposition(&xor, &c, &mut budget).unwrap();
        assert_eq!(d.outer_arity(), 2);
        assert!(d.inner.contains(&x1) && d.inner.contains(&Operation::projection(b(), 2, 2).unwrap()));
        assert!(d.decomposes(&xor));

        assert!(matches!(
            minimal_decomposition(&Operation::constant(b(), 2, 0).unwrap(), &c, &mut budget),
            Err(Error::ConstantFunction)
        ));
    }

    #[test]
    fn dependence_examples() {
        let x1 = Operation::projection(b(), 2, 1).unwrap();
        let x2 = Operation::projection(b(), 2, 2).unwrap();
        let c0 = Operation::constant(b(), 2, 0).unwrap();
        assert!(is_functionally_dependent(&[x1.clone(), c0]).unwrap());
        assert!(is_functionally_dependent(&[x1.clone(), x2.clone(), x1.clone()]).unwrap());
        assert!(!is_functionally_dependent(&[x1.clone(), x2]).unwrap());
        assert!(matches!(is_functionally_dependent(&[x1]), Err(Error::TooFewOperations(1))));
    }

    #[test]
    fn factorization_criterion_agrees_with_exhaustive_outer_search() {
        // every pair of binary Boolean inner functions against every binary f
        let all2: Vec<Operation> =
            (0..16u32).map(|bits| Operation::new(b(), 2, (0..4).map(|i| (bits >> i & 1) as Elem).collect()).unwrap()).collect();
        let outers: Vec<Operation> = all2.clone();
        for f in &all2 {
            for h1 in &all2 {
                for h2 in &all2 {
                    let inner = [h1.clone(), h2.clone()];
                    let exists = outers.iter().any(|g| g.compose(&inner).unwrap() == *f);
                    let refines = Kernel::joint(4, &inner).refines(&f.kernel()).unwrap();
                    assert_eq!(exists, refines);
                    let synthesized = factor_through(f, &[h1, h2]).unwrap();
                    assert_eq!(synthesized.is_some(), refines);
                    if let Some(g) = synthesized {
                        assert_eq!(g.compose(&inner).unwrap(), *f);
                    }
                }
            }
        }
    }
}
