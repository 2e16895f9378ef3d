//! Minor search specialized to meet terms, with and without constants.

use std::collections::HashSet;

use super::term::{terms_to_string, ExtendedTerm, MeetTerm};
use crate::algebra::{Elem, Operation, Residual, SemilatticeStructure};
use crate::clone::{search_inner_tuple, Budget, Decomposition, PrefixReach};
use crate::error::{Error, Result};

/// `f = outer(t_1, ..., t_m)` with every `t_j` a meet term or a constant over
/// `arity` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermWitness {
    pub arity: usize,
    pub outer: Operation,
    pub terms: Vec<ExtendedTerm>,
}

impl TermWitness {
    pub fn decomposition(&self, s: &SemilatticeStructure) -> Result<Decomposition> {
        let inner = self.terms.iter().map(|t| t.realize(s, self.arity)).collect::<Result<Vec<_>>>()?;
        Ok(Decomposition { outer: self.outer.clone(), inner })
    }

    pub fn term_text(&self) -> String {
        terms_to_string(&self.terms)
    }

    pub fn uses_constants(&self) -> bool {
        self.terms.iter().any(|t| matches!(t, ExtendedTerm::Const(_)))
    }
}

fn check_domains(f: &Operation, g: &Operation, s: &SemilatticeStructure) -> Result<()> {
    for op in [f, g] {
        if op.domain() != s.domain() {
            return Err(Error::DomainMismatch(op.domain().size(), s.domain().size()));
        }
    }
    Ok(())
}

/// Decides `f ⊑_⟨∧⟩ g` by backtracking.
///
/// The search fixes, variable by variable, the set `X_i ⊆ [m]` of `g`'s
/// coordinates in which `x_i` occurs; `Φ_j = { i : j ∈ X_i }`. At every node
/// each argument tuple of `f` still constrains the search: coordinate `j` of
/// the inner tuple can only be the partial meet over assigned variables,
/// possibly lowered by a meet of the unassigned arguments. The node survives
/// only if some point of that box is mapped by `g` to the required value.
/// With an identity `e`, a tuple whose unassigned arguments all equal `e`
/// has a one-point box and is checked exactly, once.
pub fn fast_minor_check(
    f: &Operation,
    g: &Operation,
    s: &SemilatticeStructure,
    budget: &mut Budget,
) -> Result<Option<TermWitness>> {
    check_domains(f, g, s)?;
    let p = f.arity();
    let m = g.arity();
    if p > super::term::MAX_TERM_ARITY || m > 20 {
        return Err(Error::TooLarge { size: s.domain().size(), arity: p.max(m) });
    }
    let full_cover: u64 = (1u64 << m) - 1;
    let reach = PrefixReach::new(g);
    let rows = RowConstraints::new(f, s);

    // partial[d][r * m + j]: meet of the arguments of row r over the first d
    // variables whose X contains j
    let mut partial: Vec<Vec<Option<Elem>>> = vec![vec![None; rows.len() * m]];
    if !rows.consistent(0, &partial[0], m, g, &reach, s) {
        return Ok(None);
    }

    // An essential variable of f must occur in some term. When f is
    // symmetric in x_i and x_{i+1}, swapping X_i and X_{i+1} maps solutions
    // to solutions, so X_i ≤ X_{i+1} loses nothing and keeps the
    // lexicographically first witness.
    let essential = f.essential_variables();
    let first_choice: Vec<u64> = (0..p).map(|i| u64::from(essential.contains(&i))).collect();
    let symmetric_with_previous: Vec<bool> = (0..p).map(|i| i > 0 && swaps_to_itself(f, i - 1)).collect();
    let start = |depth: usize, cols: &[u64]| -> u64 {
        let base = first_choice[depth];
        if symmetric_with_previous[depth] {
            base.max(cols[depth - 1])
        } else {
            base
        }
    };

    let choices = 1u64 << m;
    let mut cols: Vec<u64> = Vec::with_capacity(p);
    let mut next: u64 = start(0, &cols);
    loop {
        if next == choices {
            match cols.pop() {
                Some(last) => {
                    partial.pop();
                    next = last + 1;
                    continue;
                }
                None => return Ok(None),
            }
        }
        budget.tick()?;
        let depth = cols.len() + 1;
        let mut acc = partial[depth - 1].clone();
        for (r, row) in rows.args.iter().enumerate() {
            let a = row[depth - 1];
            for j in (0..m).filter(|j| next >> j & 1 == 1) {
                let slot = &mut acc[r * m + j];
                *slot = Some(slot.map_or(a, |x| s.meet(x, a)));
            }
        }
        let covered = depth < p || cols.iter().fold(next, |acc, &c| acc | c) == full_cover;
        if !covered || !rows.consistent(depth, &acc, m, g, &reach, s) {
            next += 1;
            continue;
        }
        cols.push(next);
        partial.push(acc);
        if depth == p {
            let terms = (0..m)
                .map(|j| {
                    let mask = cols.iter().enumerate().filter(|(_, &c)| c >> j & 1 == 1).fold(0u64, |a, (i, _)| a | 1 << i);
                    MeetTerm::from_mask(p, mask).map(ExtendedTerm::Meet)
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Some(TermWitness { arity: p, outer: g.clone(), terms }));
        }
        next = start(depth, &cols);
    }
}

/// Whether exchanging variables `i` and `i + 1` (0-based) leaves `f` unchanged.
fn swaps_to_itself(f: &Operation, i: usize) -> bool {
    let mut map: Vec<usize> = (0..f.arity()).collect();
    map.swap(i, i + 1);
    f.substitute_variables(&map, f.arity()).map(|g| &g == f).unwrap_or(false)
}

/// Per-row data for the box test in [`fast_minor_check`].
struct RowConstraints {
    args: Vec<Vec<Elem>>,
    targets: Vec<Elem>,
    /// Rows still open at each depth: those with a non-identity argument at
    /// or after that position (all rows when there is no identity).
    open: Vec<Vec<usize>>,
    /// `lowered[r][d]`: meets of nonempty subsets of `args[r][d..]`.
    lowered: Vec<Vec<Vec<Elem>>>,
}

impl RowConstraints {
    fn new(f: &Operation, s: &SemilatticeStructure) -> Self {
        let p = f.arity();
        let domain = f.domain();
        let mut args = Vec::with_capacity(f.table().len());
        let mut digits = vec![0; p];
        for row in 0..f.table().len() {
            domain.decode(row, &mut digits);
            args.push(digits.clone());
        }
        let identity = s.identity();
        let level = |a: &[Elem]| match identity {
            Some(e) => a.iter().rposition(|&x| x != e).map_or(0, |i| i + 1),
            None => p,
        };
        let open = (0..=p).map(|d| (0..args.len()).filter(|&r| level(&args[r]) >= d).collect()).collect();
        let lowered = args
            .iter()
            .map(|a| {
                let mut out = vec![Vec::new(); p + 1];
                for d in (0..p).rev() {
                    let mut set: Vec<Elem> = out[d + 1].clone();
                    set.push(a[d]);
                    set.extend(out[d + 1].iter().map(|&u| s.meet(u, a[d])));
                    set.sort_unstable();
                    set.dedup();
                    out[d] = set;
                }
                out
            })
            .collect();
        RowConstraints { args, targets: f.table().to_vec(), open, lowered }
    }

    fn len(&self) -> usize {
        self.args.len()
    }

    fn consistent(
        &self,
        depth: usize,
        partial: &[Option<Elem>],
        m: usize,
        g: &Operation,
        reach: &PrefixReach,
        s: &SemilatticeStructure,
    ) -> bool {
        let mut boxes: Vec<Vec<Elem>> = vec![Vec::new(); m];
        self.open[depth].iter().all(|&r| {
            let low = &self.lowered[r][depth];
            for (j, b) in boxes.iter_mut().enumerate() {
                b.clear();
                match partial[r * m + j] {
                    Some(a) => {
                        b.push(a);
                        b.extend(low.iter().map(|&u| s.meet(a, u)));
                        b.sort_unstable();
                        b.dedup();
                    }
                    None => b.extend_from_slice(low),
                }
            }
            box_reaches(g, reach, &boxes, 0, 0, self.targets[r])
        })
    }
}

fn box_reaches(g: &Operation, reach: &PrefixReach, boxes: &[Vec<Elem>], j: usize, prefix: usize, target: Elem) -> bool {
    if !reach.allows(j, prefix, target) {
        return false;
    }
    if j == boxes.len() {
        return true;
    }
    let k = g.domain().size();
    boxes[j].iter().any(|&v| box_reaches(g, reach, boxes, j + 1, prefix * k + v as usize, target))
}

/// Constants the flags admit, zero first. Errors when a flag names a missing element.
pub fn permitted_constants(s: &SemilatticeStructure, allow_zero: bool, allow_identity: bool) -> Result<Vec<Elem>> {
    let mut out = Vec::new();
    if allow_zero {
        out.push(s.zero().ok_or(Error::MissingConstant("zero"))?);
    }
    if allow_identity {
        let e = s.identity().ok_or(Error::MissingConstant("identity"))?;
        if !out.contains(&e) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Minor search for a clone between `⟨∧⟩` and `⟨∧,0,1⟩`: each coordinate of
/// `g` receives a meet term or a permitted constant.
///
/// Constants are substituted into `g` first, in order of increasing number of
/// constant coordinates, and [`fast_minor_check`] runs on each residual.
pub fn with_constants(
    f: &Operation,
    g: &Operation,
    s: &SemilatticeStructure,
    allow_zero: bool,
    allow_identity: bool,
    budget: &mut Budget,
) -> Result<Option<TermWitness>> {
    check_domains(f, g, s)?;
    let constants = permitted_constants(s, allow_zero, allow_identity)?;
    let m = g.arity();
    let p = f.arity();
    let mut tried: HashSet<Residual> = HashSet::new();
    for count in 0..=m {
        if count > 0 && constants.is_empty() {
            break;
        }
        for pattern in constant_patterns(m, count, &constants) {
            let residual = g.fix_coordinates(&pattern)?;
            if !tried.insert(residual.clone()) {
                continue;
            }
            let found = match &residual {
                Residual::Value(v) => (f.constant_value() == Some(*v)).then(Vec::new),
                Residual::Operation(r) => fast_minor_check(f, r, s, budget)?.map(|w| w.terms),
            };
            if let Some(free_terms) = found {
                let mut free = free_terms.into_iter();
                let terms = pattern
                    .iter()
                    .map(|c| match c {
                        Some(v) => ExtendedTerm::Const(*v),
                        None => free.next().expect("one term per free coordinate"),
                    })
                    .collect();
                return Ok(Some(TermWitness { arity: p, outer: g.clone(), terms }));
            }
        }
    }
    Ok(None)
}

/// All ways of fixing exactly `count` of `m` coordinates to the given
/// constants, positions in lexicographic order.
pub(crate) fn constant_patterns(m: usize, count: usize, constants: &[Elem]) -> Vec<Vec<Option<Elem>>> {
    let mut out = Vec::new();
    let mut positions: Vec<usize> = (0..count).collect();
    if count > m {
        return out;
    }
    loop {
        let combos = constants.len().pow(count as u32);
        for mut code in 0..combos {
            let mut pattern = vec![None; m];
            for &pos in positions.iter().rev() {
                pattern[pos] = Some(constants[code % constants.len()]);
                code /= constants.len();
            }
            out.push(pattern);
        }
        // next combination of positions
        let mut i = count;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if positions[i] < m - count + i {
                positions[i] += 1;
                for t in i + 1..count {
                    positions[t] = positions[t - 1] + 1;
                }
                break;
            }
        }
        if count == 0 {
            return out;
        }
    }
}

/// Direct search over tuples of extended terms: every coordinate of `g` ranges
/// over all meet terms of `f`'s arity and the permitted constants.
pub fn with_constants_direct(
    f: &Operation,
    g: &Operation,
    s: &SemilatticeStructure,
    allow_zero: bool,
    allow_identity: bool,
    budget: &mut Budget,
) -> Result<Option<TermWitness>> {
    check_domains(f, g, s)?;
    let p = f.arity();
    if p > 16 {
        return Err(Error::TooLarge { size: s.domain().size(), arity: p });
    }
    let mut terms: Vec<ExtendedTerm> =
        (1u64..1 << p).map(|mask| MeetTerm::from_mask(p, mask).map(ExtendedTerm::Meet)).collect::<Result<_>>()?;
    terms.extend(permitted_constants(s, allow_zero, allow_identity)?.into_iter().map(ExtendedTerm::Const));
    let ops = terms.iter().map(|t| t.realize(s, p)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Operation> = ops.iter().collect();
    Ok(search_inner_tuple(f, g, &refs, budget)?.map(|choice| TermWitness {
        arity: p,
        outer: g.clone(),
        terms: choice.into_iter().map(|i| terms[i]).collect(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Domain;

    fn bool_op(arity: usize, f: impl FnMut(&[u8]) -> u8) -> Operation {
        Operation::from_fn(Domain::boolean(), arity, f).unwrap()
    }

    #[test]
    fn fast_check_examples() {
        let s = SemilatticeStructure::boolean();
        let mut budget = Budget::default();
        let and2 = bool_op(2, |a| a[0] & a[1]);
        let and3 = bool_op(3, |a| a[0] & a[1] & a[2]);
        let w = fast_minor_check(&and2, &and3, &s, &mut budget).unwrap().unwrap();
        assert_eq!(w.term_text(), "^{1} ^{2} ^{2}");
        assert!(w.decomposition(&s).unwrap().decomposes(&and2));

        let id = Operation::projection(Domain::boolean(), 1, 1).unwrap();
        let w = fast_minor_check(&id, &and2, &s, &mut budget).unwrap().unwrap();
        assert_eq!(w.term_text(), "^{1} ^{1}");

        let xor = bool_op(2, |a| a[0] ^ a[1]);
        for g in [&and2, &and3, &id] {
            assert!(fast_minor_check(&xor, g, &s, &mut budget).unwrap().is_none());
        }
    }

    #[test]
    fn fast_check_without_identity() {
        // {a, b, ab} with a ∧ b = ab: no identity element
        let d = Domain::new(3).unwrap();
        let s = SemilatticeStructure::new(Operation::new(d, 2, vec![0, 2, 2, 2, 1, 2, 2, 2, 2]).unwrap()).unwrap();
        assert_eq!(s.identity(), None);
        let meet = s.meet_operation().clone();
        let id = Operation::projection(d, 1, 1).unwrap();
        let mut budget = Budget::default();
        let w = fast_minor_check(&id, &meet, &s, &mut budget).unwrap().unwrap();
        assert!(w.decomposition(&s).unwrap().decomposes(&id));
        let w = fast_minor_check(&meet, &id, &s, &mut budget).unwrap().unwrap();
        assert!(w.decomposition(&s).unwrap().decomposes(&meet));
        let swap = Operation::from_fn(d, 1, |a| [1, 0, 2][a[0] as usize]).unwrap();
        assert!(fast_minor_check(&swap, &meet, &s, &mut budget).unwrap().is_none());
    }

    #[test]
    fn constant_examples() {
        let s = SemilatticeStructure::boolean();
        let mut budget = Budget::default();
        let and2 = bool_op(2, |a| a[0] & a[1]);
        let c0 = Operation::constant(Domain::boolean(), 2, 0).unwrap();
        let w = with_constants(&c0, &and2, &s, true, false, &mut budget).unwrap().unwrap();
        assert!(w.uses_constants());
        assert!(w.decomposition(&s).unwrap().decomposes(&c0));

        let id = Operation::projection(Domain::boolean(), 1, 1).unwrap();
        let w = with_constants(&id, &and2, &s, false, true, &mut budget).unwrap().unwrap();
        assert!(w.decomposition(&s).unwrap().decomposes(&id));
        let w = with_constants_direct(&id, &and2, &s, false, true, &mut budget).unwrap().unwrap();
        assert!(w.decomposition(&s).unwrap().decomposes(&id));

        let c1 = Operation::constant(Domain::boolean(), 1, 1).unwrap();
        assert!(with_constants(&c1, &and2, &s, true, false, &mut budget).unwrap().is_none());
        assert!(with_constants_direct(&c1, &and2, &s, true, false, &mut budget).unwrap().is_none());
    }

    #[test]
    fn missing_constant_is_an_error() {
        let d = Domain::new(3).unwrap();
        let s = SemilatticeStructure::new(Operation::new(d, 2, vec![0, 2, 2, 2, 1, 2, 2, 2, 2]).unwrap()).unwrap();
        let id = Operation::projection(d, 1, 1).unwrap();
        let err = with_constants(&id, &id, &s, false, true, &mut Budget::default()).unwrap_err();
        assert!(matches!(err, Error::MissingConstant("identity")));
    }

    #[test]
    fn constant_pattern_enumeration() {
        assert_eq!(constant_patterns(2, 0, &[0]), vec![vec![None, None]]);
        assert_eq!(constant_patterns(2, 1, &[0, 1]).len(), 4);
        assert_eq!(constant_patterns(3, 2, &[0, 1]).len(), 12);
        assert_eq!(constant_patterns(2, 2, &[0]), vec![vec![Some(0), Some(0)]]);
    }

    #[test]
    fn domain_mismatch() {
        let s = SemilatticeStructure::boolean();
        let other = Operation::projection(Domain::new(3).unwrap(), 1, 1).unwrap();
        assert!(fast_minor_check(&other, &other, &s, &mut Budget::default()).is_err());
    }
}
