//! The minor preorder over a finite universe of operations, its condensation
//! into equivalence classes, Hasse covers and down-set checks.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Domain, Elem, Operation};
use crate::clone::{Budget, CloneTable};
use crate::error::{Error, Result};
use crate::semilattice::{downset_representatives, DownsetConfig, ExtendedTerm, MeetClone, MeetTerm};

/// Largest number of operations `Universe::all` will enumerate.
pub const MAX_UNIVERSE: usize = 1 << 20;

/// A finite, duplicate-free set of operations on one domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UniverseJson", into = "UniverseJson")]
pub struct Universe {
    domain: Domain,
    operations: Vec<Operation>,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UniverseJson {
    domain: usize,
    operations: Vec<Operation>,
    #[serde(default)]
    provenance: String,
}

impl TryFrom<UniverseJson> for Universe {
    type Error = Error;

    fn try_from(json: UniverseJson) -> Result<Self> {
        Universe::new(Domain::new(json.domain)?, json.operations, json.provenance)
    }
}

impl From<Universe> for UniverseJson {
    fn from(u: Universe) -> Self {
        UniverseJson { domain: u.domain.size(), operations: u.operations, provenance: u.provenance }
    }
}

impl Universe {
    /// Keeps the first occurrence of each operation.
    pub fn new(domain: Domain, operations: Vec<Operation>, provenance: impl Into<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(operations.len());
        for op in operations {
            if op.domain() != domain {
                return Err(Error::DomainMismatch(domain.size(), op.domain().size()));
            }
            if seen.insert(op.clone()) {
                kept.push(op);
            }
        }
        Ok(Universe { domain, operations: kept, provenance: provenance.into() })
    }

    /// Every operation of each listed arity, in table order.
    pub fn all(domain: Domain, arities: &[usize]) -> Result<Self> {
        let k = domain.size();
        let mut ops = Vec::new();
        for &n in arities {
            let len = domain.tuple_count(n)?;
            let count = u32::try_from(len)
                .ok()
                .and_then(|l| k.checked_pow(l))
                .filter(|&c| ops.len() + c <= MAX_UNIVERSE)
                .ok_or(Error::ResourceLimit { what: "universe size", limit: MAX_UNIVERSE as u64 })?;
            let mut table = vec![0 as Elem; len];
            for _ in 0..count {
                ops.push(Operation::new(domain, n, table.clone())?);
                for slot in table.iter_mut().rev() {
                    *slot += 1;
                    if (*slot as usize) < k {
                        break;
                    }
                    *slot = 0;
                }
            }
        }
        let arity_list: Vec<String> = arities.iter().map(usize::to_string).collect();
        Universe::new(domain, ops, format!("all:{}:{}", k, arity_list.join(",")))
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn len(&self) -> usize {
        self.operations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operations.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn max_arity(&self) -> usize {
        self.operations.iter().map(Operation::arity).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Enumerate inner tuples from the generated clone table.
    Generic,
    /// Term-level search; needs a table generated from a [`MeetClone`].
    SemilatticeFast,
}

/// Fixed-width bitset over universe or class indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn difference_with(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetClass {
    pub members: Vec<usize>,
    /// Universe index of the least member by `(arity, table)`.
    pub representative: usize,
}

/// `≡_C` classes of a universe ordered by `⊑_C`.
#[derive(Clone, Debug)]
pub struct MinorPoset {
    operations: Vec<Operation>,
    /// `below[g]` holds every `f` with `f ⊑ g`.
    below: Vec<Bits>,
    class_of: Vec<usize>,
    classes: Vec<PosetClass>,
    /// Classes at or below each class.
    class_below: Vec<Bits>,
    hasse: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct PosetJson<'a> {
    classes: Vec<ClassJson<'a>>,
    hasse: &'a [(usize, usize)],
}

#[derive(Serialize)]
struct ClassJson<'a> {
    id: usize,
    members: &'a [usize],
    representative: &'a Operation,
}

/// Decides `⊑_C` for every ordered pair of the universe.
pub fn build_preorder(universe: &Universe, clone: &CloneTable, strategy: Strategy, node_limit: u64) -> Result<MinorPoset> {
    if universe.domain() != clone.domain() {
        return Err(Error::DomainMismatch(universe.domain().size(), clone.domain().size()));
    }
    let max = universe.max_arity();
    if max > clone.max_arity() {
        return Err(Error::ArityBound { arity: max, bound: clone.max_arity() });
    }
    let below = match strategy {
        Strategy::Generic => generic_matrix(universe, clone, node_limit)?,
        Strategy::SemilatticeFast => {
            let family = clone.meet_family().ok_or(Error::StrategyUnavailable)?;
            fast_matrix(universe, family, node_limit)?
        }
    };
    Ok(MinorPoset::from_matrix(universe.operations().to_vec(), below))
}

/// For each `g`, composes `g` with every tuple from `C^(n)` and looks the
/// result up in the universe.
fn generic_matrix(universe: &Universe, clone: &CloneTable, node_limit: u64) -> Result<Vec<Bits>> {
    let ops = universe.operations();
    let n_ops = ops.len();
    let mut index: HashMap<&Operation, usize> = HashMap::with_capacity(n_ops);
    for (i, op) in ops.iter().enumerate() {
        index.insert(op, i);
    }
    let arities: BTreeSet<usize> = ops.iter().map(Operation::arity).collect();
    ops.par_iter()
        .map(|g| {
            let mut budget = Budget::new(node_limit);
            let mut row = Bits::new(n_ops);
            for &n in &arities {
                for table in compositions(g, clone.part(n), &mut budget)? {
                    let h = Operation::new(g.domain(), n, table)?;
                    if let Some(&f) = index.get(&h) {
                        row.insert(f);
                    }
                }
            }
            Ok(row)
        })
        .collect()
}

/// Tables of `g(h_1, ..., h_m)` over all `h_i` drawn from `part`, deduplicated.
fn compositions(g: &Operation, part: &[Operation], budget: &mut Budget) -> Result<BTreeSet<Vec<Elem>>> {
    let m = g.arity();
    let k = g.domain().size();
    let mut out = BTreeSet::new();
    if part.is_empty() {
        return Ok(out);
    }
    let rows = part[0].table().len();
    // partial[d] holds the table-index prefix after fixing d coordinates
    let mut partial = vec![vec![0usize; rows]; m + 1];
    let mut choice = vec![0usize; m];
    let mut depth = 0;
    loop {
        if depth == m {
            budget.tick()?;
            out.insert(partial[m].iter().map(|&i| g.at(i)).collect());
            depth -= 1;
            choice[depth] += 1;
        } else if choice[depth] < part.len() {
            let h = part[choice[depth]].table();
            let (head, tail) = partial.split_at_mut(depth + 1);
            for ((next, &prev), &v) in tail[0].iter_mut().zip(&head[depth]).zip(h) {
                *next = prev * k + v as usize;
            }
            depth += 1;
            if depth < m {
                choice[depth] = 0;
            }
        } else if depth == 0 {
            break;
        } else {
            depth -= 1;
            choice[depth] += 1;
        }
    }
    Ok(out)
}

fn fast_matrix(universe: &Universe, family: &MeetClone, node_limit: u64) -> Result<Vec<Bits>> {
    let ops = universe.operations();
    let n_ops = ops.len();
    ops.par_iter()
        .map(|g| {
            let mut row = Bits::new(n_ops);
            for (i, f) in ops.iter().enumerate() {
                let mut budget = Budget::new(node_limit);
                if family.find_minor(f, g, &mut budget)?.is_some() {
                    row.insert(i);
                }
            }
            Ok(row)
        })
        .collect()
}

impl MinorPoset {
    fn from_matrix(operations: Vec<Operation>, below: Vec<Bits>) -> Self {
        let n = operations.len();
        let mut class_of = vec![usize::MAX; n];
        let mut raw: Vec<Vec<usize>> = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = below[g].iter().filter(|&f| below[f].contains(g)).collect();
            for &f in &members {
                class_of[f] = raw.len();
            }
            raw.push(members);
        }
        let representative = |members: &[usize]| *members.iter().min_by_key(|&&i| &operations[i]).expect("nonempty class");
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by_key(|&c| &operations[representative(&raw[c])]);
        let mut renumber = vec![0; raw.len()];
        for (new, &old) in order.iter().enumerate() {
            renumber[old] = new;
        }
        let classes: Vec<PosetClass> = order
            .iter()
            .map(|&old| PosetClass { members: raw[old].clone(), representative: representative(&raw[old]) })
            .collect();
        for c in class_of.iter_mut() {
            *c = renumber[*c];
        }

        let class_below: Vec<Bits> = classes
            .iter()
            .map(|c| {
                let mut bits = Bits::new(classes.len());
                for f in below[c.representative].iter() {
                    bits.insert(class_of[f]);
                }
                bits
            })
            .collect();

        let mut hasse = Vec::new();
        for (c, down) in class_below.iter().enumerate() {
            let mut strict = down.clone();
            strict.remove(c);
            let mut covers = strict.clone();
            for d in strict.iter() {
                let mut under = class_below[d].clone();
                under.remove(d);
                covers.difference_with(&under);
            }
            hasse.extend(covers.iter().map(|d| (d, c)));
        }
        hasse.sort_unstable();
        MinorPoset { operations, below, class_of, classes, class_below, hasse }
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn classes(&self) -> &[PosetClass] {
        &self.classes
    }

    pub fn class_of(&self, index: usize) -> usize {
        self.class_of[index]
    }

    pub fn representative(&self, class: usize) -> &Operation {
        &self.operations[self.classes[class].representative]
    }

    /// Hasse covers `(lower, upper)`, sorted.
    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    /// `operations[f] ⊑ operations[g]` as recorded in the preorder matrix.
    pub fn is_minor(&self, f: usize, g: usize) -> bool {
        self.below[g].contains(f)
    }

    /// Class order: `lower ≤ upper`.
    pub fn le(&self, lower: usize, upper: usize) -> bool {
        self.class_below[upper].contains(lower)
    }

    /// Number of classes at or below `class`.
    pub fn downset_size(&self, class: usize) -> Result<usize> {
        self.class_below.get(class).map(Bits::count).ok_or(Error::UnknownClass(class))
    }

    /// Same preorder matrix, member for member.
    pub fn same_preorder(&self, other: &MinorPoset) -> bool {
        self.operations == other.operations && self.below == other.below
    }

    /// Whether every reachability pair and every class of `self` survives in
    /// `other`, built over the same universe with a larger clone.
    pub fn is_coarsened_by(&self, other: &MinorPoset) -> bool {
        self.operations == other.operations
            && self.below.iter().zip(&other.below).all(|(a, b)| a.is_subset(b))
            && self.classes.iter().all(|c| c.members.iter().all(|&i| other.class_of[i] == other.class_of[c.members[0]]))
    }

    pub fn to_json(&self) -> String {
        let json = PosetJson {
            classes: self
                .classes
                .iter()
                .enumerate()
                .map(|(id, c)| ClassJson { id, members: &c.members, representative: &self.operations[c.representative] })
                .collect(),
            hasse: &self.hasse,
        };
        serde_json::to_string_pretty(&json).expect("poset JSON is serializable")
    }

    /// One line per class with its members and covers.
    pub fn to_text(&self, family: Option<&MeetClone>) -> String {
        let mut out = format!("{} operations, {} classes, {} covers\n", self.operations.len(), self.classes.len(), self.hasse.len());
        for (id, c) in self.classes.iter().enumerate() {
            let covers: Vec<String> =
                self.hasse.iter().filter(|&&(_, hi)| hi == id).map(|&(lo, _)| format!("c{lo}")).collect();
            let _ = writeln!(
                out,
                "c{id} {} members={:?} downset={} covers=[{}]",
                self.label(id, family),
                c.members,
                self.class_below[id].count(),
                covers.join(",")
            );
        }
        out
    }

    fn label(&self, class: usize, family: Option<&MeetClone>) -> String {
        let rep = self.representative(class);
        family.and_then(|fam| fam.describe(rep)).map(|t| t.to_string()).unwrap_or_else(|| rep.digest())
    }
}

/// DOT digraph with one node per class, edges from lower to upper cover.
pub fn export_dot(poset: &MinorPoset, family: Option<&MeetClone>) -> String {
    let mut out = String::from("digraph minors {\n  rankdir=BT;\n  node [shape=box];\n");
    for id in 0..poset.classes.len() {
        let label = poset.label(id, family).replace('\\', "\\\\").replace('"', "\\\"");
        let _ = writeln!(out, "  c{id} [label=\"{label}\"];");
    }
    for &(lo, hi) in &poset.hasse {
        let _ = writeln!(out, "  c{lo} -> c{hi};");
    }
    out.push_str("}\n");
    out
}

/// Cross-check of a poset against term-level down-sets.
#[derive(Clone, Debug)]
pub struct DccCheck<'a> {
    pub family: &'a MeetClone,
    /// Random out-of-universe minors drawn per checked class.
    pub samples: usize,
    /// Largest ambient arity of sampled inner terms.
    pub max_inner_arity: usize,
    pub seed: u64,
    pub downset: DownsetConfig,
    /// Classes whose representative has larger arity are skipped.
    pub max_function_arity: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DccReport {
    pub classes: usize,
    pub antisymmetric: bool,
    pub transitive: bool,
    pub largest_downset: usize,
    pub classes_cross_checked: usize,
    pub sampled_minors: usize,
    pub failures: Vec<String>,
}

impl DccReport {
    pub fn passed(&self) -> bool {
        self.antisymmetric && self.transitive && self.failures.is_empty()
    }
}

/// Checks that condensation is a partial order with finite down-sets and,
/// when `check` is given, that every in-universe minor and a sample of
/// out-of-universe minors of each class representative fall into exactly
/// one term-level down-set class.
pub fn verify_dcc(poset: &MinorPoset, check: Option<&DccCheck<'_>>) -> Result<DccReport> {
    let n_classes = poset.classes.len();
    let mut report = DccReport { classes: n_classes, antisymmetric: true, transitive: true, ..Default::default() };
    for c in 0..n_classes {
        for d in poset.class_below[c].iter() {
            if d != c && poset.le(c, d) {
                report.antisymmetric = false;
            }
        }
        report.largest_downset = report.largest_downset.max(poset.class_below[c].count());
    }
    for g in 0..poset.operations.len() {
        if poset.below[g].iter().any(|f| !poset.below[f].is_subset(&poset.below[g])) {
            report.transitive = false;
        }
    }
    let Some(check) = check else {
        return Ok(report);
    };

    let results: Vec<Result<(usize, Vec<String>)>> = (0..n_classes)
        .into_par_iter()
        .filter(|&c| poset.representative(c).arity() <= check.max_function_arity)
        .map(|c| cross_check_class(poset, c, check))
        .collect();
    for r in results {
        let (samples, failures) = r?;
        report.classes_cross_checked += 1;
        report.sampled_minors += samples;
        report.failures.extend(failures);
    }
    Ok(report)
}

fn cross_check_class(poset: &MinorPoset, class: usize, check: &DccCheck<'_>) -> Result<(usize, Vec<String>)> {
    let f = poset.representative(class);
    let ds = downset_representatives(f, check.family, check.downset)?;
    let mut failures = Vec::new();
    let mut seen = HashMap::new();
    for d in poset.class_below[class].iter() {
        let hits = ds.classify(poset.representative(d))?;
        match hits.as_slice() {
            [one] => {
                if let Some(prev) = seen.insert(*one, d) {
                    failures.push(format!("c{class}: classes c{prev} and c{d} share a down-set class"));
                }
            }
            _ => failures.push(format!("c{class}: c{d} matched {} down-set classes", hits.len())),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed ^ (class as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let constants = check.family.constants();
    let s = check.family.semilattice();
    for _ in 0..check.samples {
        let p = rng.gen_range(1..=check.max_inner_arity.max(1));
        let terms = random_terms(&mut rng, f.arity(), p, &constants);
        let inner = terms.iter().map(|t| t.realize(s, p)).collect::<Result<Vec<_>>>()?;
        let h = f.compose(&inner)?;
        let hits = ds.classify(&h)?;
        if hits.len() != 1 {
            let text: Vec<String> = terms.iter().map(ExtendedTerm::to_string).collect();
            failures.push(format!("c{class}: minor via ({}) matched {} classes", text.join(", "), hits.len()));
        }
    }
    Ok((check.samples, failures))
}

/// `count` random members of the clone's `p`-ary part, as terms.
pub fn random_terms(rng: &mut impl Rng, count: usize, p: usize, constants: &[Elem]) -> Vec<ExtendedTerm> {
    (0..count)
        .map(|_| {
            if !constants.is_empty() && rng.gen_ratio(1, 4) {
                ExtendedTerm::Const(constants[rng.gen_range(0..constants.len())])
            } else {
                let mask = rng.gen_range(1..1u64 << p);
                ExtendedTerm::Meet(MeetTerm::from_mask(p, mask).expect("nonempty mask within arity"))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SemilatticeStructure;
    use crate::clone::CloneLimits;

    fn boolean_table(preset: &str, arity: usize) -> (MeetClone, CloneTable) {
        let fam = MeetClone::preset(preset, SemilatticeStructure::boolean()).unwrap();
        let table = fam.table(arity, CloneLimits::default()).unwrap();
        (fam, table)
    }

    #[test]
    fn universe_enumeration() {
        let u = Universe::all(Domain::boolean(), &[1, 2]).unwrap();
        assert_eq!(u.len(), 4 + 16);
        assert_eq!(u.operations()[1].table(), &[0, 1]);
        assert!(Universe::all(Domain::new(3).unwrap(), &[3]).is_err());
        let dup = Operation::projection(Domain::boolean(), 1, 1).unwrap();
        assert_eq!(Universe::new(Domain::boolean(), vec![dup.clone(), dup], "").unwrap().len(), 1);
    }

    #[test]
    fn unary_universe_under_meet() {
        let u = Universe::all(Domain::boolean(), &[1]).unwrap();
        let (_, table) = boolean_table("meet", 2);
        let p = build_preorder(&u, &table, Strategy::Generic, Budget::DEFAULT_LIMIT).unwrap();
        // oracle: the only unary members of ⟨∧⟩ are x, so f ⊑ g iff f = g(x) = g
        assert_eq!(p.classes().len(), 4);
        assert!(p.hasse().is_empty());
        let q = build_preorder(&u, &table, Strategy::SemilatticeFast, Budget::DEFAULT_LIMIT).unwrap();
        assert!(p.same_preorder(&q));
    }

    #[test]
    fn single_class_universe() {
        let and = Operation::from_fn(Domain::boolean(), 2, |a| a[0] & a[1]).unwrap();
        let u = Universe::new(Domain::boolean(), vec![and], "").unwrap();
        let (fam, table) = boolean_table("meet", 2);
        let p = build_preorder(&u, &table, Strategy::Generic, Budget::DEFAULT_LIMIT).unwrap();
        assert_eq!(p.classes().len(), 1);
        assert_eq!(p.downset_size(0).unwrap(), 1);
        assert!(matches!(p.downset_size(1), Err(Error::UnknownClass(1))));
        assert_eq!(export_dot(&p, Some(&fam)), "digraph minors {\n  rankdir=BT;\n  node [shape=box];\n  c0 [label=\"^{1,2}\"];\n}\n");
    }

    #[test]
    fn two_class_chain_dot() {
        let d = Domain::boolean();
        let ops = vec![
            Operation::from_fn(d, 2, |a| a[0] | a[1]).unwrap(),
            Operation::from_fn(d, 2, |a| a[0]).unwrap(),
        ];
        let u = Universe::new(d, ops, "").unwrap();
        let (_, table) = boolean_table("meet", 2);
        let p = build_preorder(&u, &table, Strategy::Generic, Budget::DEFAULT_LIMIT).unwrap();
        assert_eq!(p.hasse(), &[(0, 1)]);
        let dot = export_dot(&p, None);
        assert!(dot.contains("c0 -> c1;"));
        assert!(dot.find("c0 [").unwrap() < dot.find("c1 [").unwrap());
    }

    #[test]
    fn fast_strategy_needs_meet_family() {
        let d = Domain::boolean();
        let and = Operation::from_fn(d, 2, |a| a[0] & a[1]).unwrap();
        let table = crate::clone::generate_clone(d, std::slice::from_ref(&and), 2, CloneLimits::default()).unwrap();
        let u = Universe::new(d, vec![and], "").unwrap();
        assert!(matches!(
            build_preorder(&u, &table, Strategy::SemilatticeFast, 1000),
            Err(Error::StrategyUnavailable)
        ));
    }

    #[test]
    fn arity_bound_enforced() {
        let u = Universe::all(Domain::boolean(), &[3]).unwrap();
        let (_, table) = boolean_table("meet", 2);
        assert!(matches!(
            build_preorder(&u, &table, Strategy::Generic, 1000),
            Err(Error::ArityBound { arity: 3, bound: 2 })
        ));
    }

    #[test]
    fn verify_dcc_on_binary_universe() {
        let u = Universe::all(Domain::boolean(), &[2]).unwrap();
        let (fam, table) = boolean_table("meet", 2);
        let p = build_preorder(&u, &table, Strategy::SemilatticeFast, Budget::DEFAULT_LIMIT).unwrap();
        let check = DccCheck {
            family: &fam,
            samples: 50,
            max_inner_arity: 4,
            seed: 0,
            downset: DownsetConfig::default(),
            max_function_arity: 3,
        };
        let report = verify_dcc(&p, Some(&check)).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.classes_cross_checked, p.classes().len());
    }
}
