//! Minors under clones generated by a semilattice operation, optionally
//! extended by its zero and identity constants.

mod canon;
mod downset;
mod search;
mod system;
mod term;

pub use canon::{canonicalize, same_x_equivalent, Canonical, CanonicalWitness};
pub use downset::{downset_representatives, Downset, DownsetClass, DownsetConfig, DownsetEntry, Source};
pub use search::{fast_minor_check, permitted_constants, with_constants, with_constants_direct, TermWitness};
pub use system::{psi_of, x_columns, x_system, SetSystem, SetSystemJson};
pub use term::{terms_to_string, ExtendedTerm, MeetTerm, TermVector, TermVectorJson, MAX_TERM_ARITY};

use crate::algebra::{Elem, Operation, SemilatticeStructure};
use crate::clone::{generate_clone, Budget, CloneLimits, CloneTable};
use crate::error::{Error, Result};

const PROBE_NODES: u64 = 2000;

/// A clone `C` with `⟨∧⟩ ⊆ C ⊆ ⟨∧,0,1⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetClone {
    semilattice: SemilatticeStructure,
    zero: bool,
    identity: bool,
}

impl MeetClone {
    pub fn new(semilattice: SemilatticeStructure, zero: bool, identity: bool) -> Result<Self> {
        permitted_constants(&semilattice, zero, identity)?;
        Ok(MeetClone { semilattice, zero, identity })
    }

    /// `⟨∧⟩`.
    pub fn meet(semilattice: SemilatticeStructure) -> Self {
        MeetClone { semilattice, zero: false, identity: false }
    }

    /// Presets `meet`, `meet0`, `meet1` and `meet01`.
    pub fn preset(name: &str, semilattice: SemilatticeStructure) -> Result<Self> {
        let (zero, identity) = match name {
            "meet" => (false, false),
            "meet0" => (true, false),
            "meet1" => (false, true),
            "meet01" => (true, true),
            other => return Err(Error::Parse(format!("unknown clone preset {other:?}"))),
        };
        MeetClone::new(semilattice, zero, identity)
    }

    pub fn name(&self) -> &'static str {
        match (self.zero, self.identity) {
            (false, false) => "meet",
            (true, false) => "meet0",
            (false, true) => "meet1",
            (true, true) => "meet01",
        }
    }

    pub fn semilattice(&self) -> &SemilatticeStructure {
        &self.semilattice
    }

    pub fn allows_zero(&self) -> bool {
        self.zero
    }

    pub fn allows_identity(&self) -> bool {
        self.identity
    }

    pub fn constants(&self) -> Vec<Elem> {
        permitted_constants(&self.semilattice, self.zero, self.identity).expect("validated at construction")
    }

    /// The meet operation followed by unary constant generators.
    pub fn generators(&self) -> Vec<Operation> {
        let d = self.semilattice.domain();
        let mut gens = vec![self.semilattice.meet_operation().clone()];
        gens.extend(self.constants().into_iter().map(|c| Operation::constant(d, 1, c).expect("element of the domain")));
        gens
    }

    pub fn table(&self, max_arity: usize, limits: CloneLimits) -> Result<CloneTable> {
        let mut table = generate_clone(self.semilattice.domain(), &self.generators(), max_arity, limits)?;
        table.set_meet_family(self.clone());
        Ok(table)
    }

    /// `f ⊑_C g` with a term-level witness.
    pub fn find_minor(&self, f: &Operation, g: &Operation, budget: &mut Budget) -> Result<Option<TermWitness>> {
        if !self.zero && !self.identity {
            fast_minor_check(f, g, &self.semilattice, budget)
        } else {
            with_constants(f, g, &self.semilattice, self.zero, self.identity, budget)
        }
    }

    /// Both directions of `find_minor`. The reverse direction is first tried
    /// under a small budget, since non-equivalence is often refuted quickly
    /// there while the forward search is long.
    pub fn equivalent(&self, f: &Operation, g: &Operation, budget: &mut Budget) -> Result<bool> {
        let mut probe = Budget::new(PROBE_NODES.min(budget.remaining()));
        let reverse = match self.find_minor(g, f, &mut probe) {
            Ok(found) => Some(found.is_some()),
            Err(Error::ResourceLimit { .. }) => None,
            Err(e) => return Err(e),
        };
        budget.charge(probe.used())?;
        if reverse == Some(false) || self.find_minor(f, g, budget)?.is_none() {
            return Ok(false);
        }
        match reverse {
            Some(found) => Ok(found),
            None => Ok(self.find_minor(g, f, budget)?.is_some()),
        }
    }

    /// The term (or constant) realized by `op`, if it is a member of this clone.
    pub fn describe(&self, op: &Operation) -> Option<ExtendedTerm> {
        if op.domain() != self.semilattice.domain() {
            return None;
        }
        if let Some(c) = op.constant_value() {
            if self.constants().contains(&c) {
                return Some(ExtendedTerm::Const(c));
            }
        }
        let n = op.arity();
        if n > 16 {
            return None;
        }
        (1u64..1 << n)
            .filter_map(|mask| MeetTerm::from_mask(n, mask).ok())
            .find(|t| t.realize(&self.semilattice).map(|r| &r == op).unwrap_or(false))
            .map(ExtendedTerm::Meet)
    }
}
