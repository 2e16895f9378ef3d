//! Minor preorders, degrees and canonical decompositions of operations on
//! finite sets relative to clones of semilattice operations.
//!
//! ```
//! use minorlab::{MeetClone, Operation, SemilatticeStructure, Budget};
//!
//! let s = SemilatticeStructure::boolean();
//! let meet = MeetClone::meet(s.clone());
//! let and2 = Operation::from_fn(s.domain(), 2, |a| a[0] & a[1]).unwrap();
//! let and3 = Operation::from_fn(s.domain(), 3, |a| a[0] & a[1] & a[2]).unwrap();
//! let w = meet.find_minor(&and2, &and3, &mut Budget::unlimited()).unwrap().unwrap();
//! assert_eq!(w.term_text(), "^{1} ^{2} ^{2}");
//! ```

pub mod algebra;
pub mod clone;
pub mod error;
pub mod poset;
pub mod semilattice;

pub use algebra::{Domain, Elem, Kernel, Operation, Residual, SemilatticeStructure, Violation};
pub use clone::{
    c_degree, c_equivalent, factor_through, generate_clone, is_c_minor, is_functionally_dependent,
    minimal_decomposition, Budget, CloneLimits, CloneTable, Decomposition,
};
pub use error::{Error, Result};
pub use poset::{build_preorder, export_dot, verify_dcc, DccCheck, DccReport, MinorPoset, Strategy, Universe};
pub use semilattice::{
    canonicalize, downset_representatives, fast_minor_check, with_constants, Canonical, Downset, DownsetConfig,
    ExtendedTerm, MeetClone, MeetTerm, SetSystem, TermVector, TermWitness,
};
