//! Enumeration of the classes below a function.
//!
//! Every minor `f(h_1, ..., h_n)` under `⟨∧⟩` is equivalent to `f(Ψ_E)` with
//! `E = X(h_1, ..., h_n) ⊆ P([n])`, so the candidates `f(Ψ_E)` over all
//! covering systems `E` reach every class below `f`. With constants, the
//! constants are substituted into `f` first and the same enumeration runs on
//! each residual function.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::search::constant_patterns;
use super::system::{psi_of, SetSystem};
use super::MeetClone;
use crate::algebra::{Elem, Operation, Residual};
use crate::clone::Budget;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct DownsetConfig {
    /// Upper bound on the number of candidate set systems.
    pub e_cap: usize,
    /// Node budget for each individual minor check.
    pub check_budget: u64,
}

impl Default for DownsetConfig {
    fn default() -> Self {
        DownsetConfig { e_cap: 4096, check_budget: Budget::DEFAULT_LIMIT }
    }
}

/// How a candidate was formed: constants fixed into `f`, then `Ψ_E` applied
/// to the remaining coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Source {
    pub constants: Vec<Option<Elem>>,
    pub system: SetSystem,
}

impl Source {
    pub fn has_constants(&self) -> bool {
        self.constants.iter().any(Option::is_some)
    }
}

#[derive(Clone, Debug)]
pub struct DownsetClass {
    pub representative: Operation,
    pub source: Source,
    /// Number of enumerated candidates that fell into this class.
    pub class_size_sampled: usize,
    reduced: Operation,
}

/// Report line for a class.
#[derive(Clone, Debug, Serialize)]
pub struct DownsetEntry {
    pub representative: Operation,
    pub class_size_sampled: usize,
    #[serde(rename = "witness_E")]
    pub witness_e: SetSystem,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<Option<Elem>>>,
}

type Fingerprint = (Vec<Elem>, Vec<Vec<Elem>>);

/// The classes below a function, one representative each.
#[derive(Clone, Debug)]
pub struct Downset {
    function: Operation,
    clone: MeetClone,
    config: DownsetConfig,
    classes: Vec<DownsetClass>,
    buckets: HashMap<Fingerprint, Vec<usize>>,
    exact: HashMap<Operation, usize>,
    by_source: HashMap<Source, usize>,
    candidates: usize,
}

impl Downset {
    pub fn function(&self) -> &Operation {
        &self.function
    }

    pub fn classes(&self) -> &[DownsetClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates
    }

    /// The class containing the candidate built from `source`.
    pub fn class_of_source(&self, source: &Source) -> Option<usize> {
        self.by_source.get(source).copied()
    }

    /// The class holding `f` itself.
    pub fn top_class(&self) -> usize {
        let reduced = self.function.without_dummies();
        self.exact[&reduced]
    }

    /// Every class whose representative is equivalent to `h`. For a minor of
    /// the underlying function this has exactly one element.
    pub fn classify(&self, h: &Operation) -> Result<Vec<usize>> {
        let reduced = h.without_dummies();
        if let Some(&class) = self.exact.get(&reduced) {
            return Ok(vec![class]);
        }
        let fp = fingerprint(&reduced, &self.clone)?;
        let mut hits = Vec::new();
        for &c in self.buckets.get(&fp).map(Vec::as_slice).unwrap_or(&[]) {
            let mut budget = Budget::new(self.config.check_budget);
            if self.clone.equivalent(&reduced, &self.classes[c].reduced, &mut budget)? {
                hits.push(c);
            }
        }
        Ok(hits)
    }

    pub fn report(&self) -> Vec<DownsetEntry> {
        self.classes
            .iter()
            .map(|c| DownsetEntry {
                representative: c.representative.clone(),
                class_size_sampled: c.class_size_sampled,
                witness_e: c.source.system.clone(),
                constants: c.source.has_constants().then(|| c.source.constants.clone()),
            })
            .collect()
    }
}

/// Range plus the set of binary minors: both are invariant under equivalence.
fn fingerprint(h: &Operation, clone: &MeetClone) -> Result<Fingerprint> {
    let s = clone.semilattice();
    let d = s.domain();
    let mut range: Vec<Elem> = h.table().to_vec();
    range.sort_unstable();
    range.dedup();

    let mut binary_terms = vec![
        Operation::projection(d, 2, 1)?,
        Operation::projection(d, 2, 2)?,
        s.meet_operation().clone(),
    ];
    for c in clone.constants() {
        binary_terms.push(Operation::constant(d, 2, c)?);
    }
    binary_terms.sort();
    binary_terms.dedup();

    let p = h.arity();
    let k = d.size();
    let rows = k * k;
    let mut minors = std::collections::BTreeSet::new();
    let mut idx = vec![0usize; p];
    // partial[i][r]: table index contributed by the first i coordinates on row r
    let mut partial = vec![vec![0usize; rows]; p + 1];
    let mut depth = 0;
    loop {
        if depth == p {
            minors.insert(partial[p].iter().map(|&i| h.at(i)).collect::<Vec<_>>());
            // advance
            loop {
                if depth == 0 {
                    return Ok((range, minors.into_iter().collect()));
                }
                depth -= 1;
                idx[depth] += 1;
                if idx[depth] < binary_terms.len() {
                    break;
                }
                idx[depth] = 0;
            }
        }
        let t = &binary_terms[idx[depth]];
        let (before, after) = partial.split_at_mut(depth + 1);
        for r in 0..rows {
            after[0][r] = before[depth][r] * k + t.at(r) as usize;
        }
        depth += 1;
    }
}

struct Candidate {
    source: Source,
    op: Operation,
    reduced: Operation,
}

fn enumerate_candidates(f: &Operation, clone: &MeetClone, config: &DownsetConfig) -> Result<Vec<Candidate>> {
    let s = clone.semilattice();
    let n = f.arity();
    let constants = clone.constants();
    let mut patterns = vec![vec![None; n]];
    if !constants.is_empty() {
        for count in 1..=n {
            patterns.extend(constant_patterns(n, count, &constants));
        }
    }
    let cap_error = || Error::ResourceLimit { what: "down-set set-system enumeration", limit: config.e_cap as u64 };
    let mut total: usize = 0;
    for pattern in &patterns {
        let free = pattern.iter().filter(|c| c.is_none()).count();
        let families = if free == 0 {
            1
        } else if free >= 6 {
            return Err(cap_error());
        } else {
            1usize << (1usize << free)
        };
        total = total.saturating_add(families);
        if total > config.e_cap {
            return Err(cap_error());
        }
    }

    let mut out = Vec::new();
    for pattern in patterns {
        match f.fix_coordinates(&pattern)? {
            Residual::Value(v) => {
                let op = Operation::constant(s.domain(), 1, v)?;
                out.push(Candidate {
                    source: Source { constants: pattern, system: SetSystem::new(0, [])? },
                    reduced: op.clone(),
                    op,
                });
            }
            Residual::Operation(r) => {
                let q = r.arity();
                let subsets = 1usize << q;
                let systems: Vec<SetSystem> = (1u64..1u64 << subsets)
                    .map(|family| SetSystem::new(q, (0..subsets as u64).filter(|&set| family >> set & 1 == 1)))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .filter(SetSystem::covers)
                    .collect();
                let built = systems
                    .into_par_iter()
                    .map(|system| {
                        let psi = psi_of(&system)?;
                        let op = r.compose(&psi.realize(s)?)?;
                        let reduced = op.without_dummies();
                        Ok(Candidate { source: Source { constants: pattern.clone(), system }, op, reduced })
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.extend(built);
            }
        }
    }
    out.sort_by(|a, b| (a.reduced.arity(), &a.source).cmp(&(b.reduced.arity(), &b.source)));
    Ok(out)
}

/// One representative per class below `f` under `clone`.
pub fn downset_representatives(f: &Operation, clone: &MeetClone, config: DownsetConfig) -> Result<Downset> {
    if f.domain() != clone.semilattice().domain() {
        return Err(Error::DomainMismatch(f.domain().size(), clone.semilattice().domain().size()));
    }
    let candidates = enumerate_candidates(f, clone, &config)?;
    let candidate_count = candidates.len();

    // fingerprints for each distinct reduced table
    let mut distinct: Vec<&Operation> = candidates.iter().map(|c| &c.reduced).collect();
    distinct.sort();
    distinct.dedup();
    let prints: HashMap<Operation, Fingerprint> = distinct
        .into_par_iter()
        .map(|op| Ok((op.clone(), fingerprint(op, clone)?)))
        .collect::<Result<_>>()?;

    let mut downset = Downset {
        function: f.clone(),
        clone: clone.clone(),
        config,
        classes: Vec::new(),
        buckets: HashMap::new(),
        exact: HashMap::new(),
        by_source: HashMap::new(),
        candidates: candidate_count,
    };
    for cand in candidates {
        let class = match downset.exact.get(&cand.reduced) {
            Some(&c) => c,
            None => {
                let fp = &prints[&cand.reduced];
                let mut found = None;
                for &c in downset.buckets.get(fp).map(Vec::as_slice).unwrap_or(&[]) {
                    let mut budget = Budget::new(config.check_budget);
                    if clone.equivalent(&cand.reduced, &downset.classes[c].reduced, &mut budget)? {
                        found = Some(c);
                        break;
                    }
                }
                let c = match found {
                    Some(c) => c,
                    None => {
                        downset.classes.push(DownsetClass {
                            representative: cand.op.clone(),
                            source: cand.source.clone(),
                            class_size_sampled: 0,
                            reduced: cand.reduced.clone(),
                        });
                        let c = downset.classes.len() - 1;
                        downset.buckets.entry(fp.clone()).or_default().push(c);
                        c
                    }
                };
                downset.exact.insert(cand.reduced.clone(), c);
                c
            }
        };
        downset.classes[class].class_size_sampled += 1;
        downset.by_source.insert(cand.source, class);
    }
    Ok(downset)
}
