//! The canonical form `f' = g(Ψ_E)` of a decomposition `f = g(φ_1, ..., φ_m)`
//! together with the two substitution witnesses relating `f` and `f'`.

use super::system::{psi_of, x_columns, x_system, SetSystem};
use super::term::{MeetTerm, TermVector};
use crate::algebra::{Operation, SemilatticeStructure};
use crate::error::{Error, Result};

/// Substitutions exhibiting `f ≡ f'`:
/// `f(x_{π(1)}, ..., x_{π(n)}) = f'` and `f'(ξ_1, ..., ξ_{|E|}) = f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalWitness {
    /// `π(i) = σ_E(X_i)`, 1-based, one entry per variable of `f`.
    pub pi: Vec<usize>,
    /// `ξ_t = ⋀ { x_i : X_i = σ_E^{-1}(t) }` over the `n` variables of `f`.
    pub xi: Vec<MeetTerm>,
}

#[derive(Clone, Debug)]
pub struct Canonical {
    pub f: Operation,
    pub f_prime: Operation,
    pub system: SetSystem,
    pub psi: TermVector,
    pub witness: CanonicalWitness,
}

pub fn canonicalize(g: &Operation, tv: &TermVector, s: &SemilatticeStructure) -> Result<Canonical> {
    if g.arity() != tv.len() {
        return Err(Error::ArityMismatch { expected: g.arity(), found: tv.len() });
    }
    if g.domain() != s.domain() {
        return Err(Error::DomainMismatch(g.domain().size(), s.domain().size()));
    }
    let n = tv.arity();
    let f = g.compose(&tv.realize(s)?)?;
    let columns = x_columns(tv);
    let system = x_system(tv);
    let psi = psi_of(&system)?;
    let f_prime = g.compose(&psi.realize(s)?)?;

    let pi: Vec<usize> = columns.iter().map(|&x| system.sigma(x).expect("X_i is a member of E")).collect();
    let xi = (1..=system.len())
        .map(|t| {
            let member = system.sigma_inverse(t).expect("t ≤ |E|");
            let block = (0..n).filter(|&i| columns[i] == member).map(|i| i + 1);
            MeetTerm::new(n, block)
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = CanonicalWitness { pi, xi };

    verify_terms(tv, &psi, &witness, system.len())?;
    let zero_based: Vec<usize> = witness.pi.iter().map(|p| p - 1).collect();
    if f.substitute_variables(&zero_based, system.len())? != f_prime {
        return Err(Error::VerificationFailed("f(x_π(1), ..., x_π(n)) differs from f'".into()));
    }
    let xi_ops = witness.xi.iter().map(|t| t.realize(s)).collect::<Result<Vec<_>>>()?;
    if f_prime.compose(&xi_ops)? != f {
        return Err(Error::VerificationFailed("f'(ξ_1, ..., ξ_|E|) differs from f".into()));
    }
    Ok(Canonical { f, f_prime, system, psi, witness })
}

/// Variable-set identities `φ_j(x_π) = ψ_j` and `ψ_j(ξ) = φ_j`.
fn verify_terms(tv: &TermVector, psi: &TermVector, w: &CanonicalWitness, width: usize) -> Result<()> {
    for (phi, psi_j) in tv.terms().iter().zip(psi.terms()) {
        if phi.substitute_variables(&w.pi, width)? != *psi_j {
            return Err(Error::VerificationFailed(format!("{phi} under π is not {psi_j}")));
        }
        if psi_j.compose(&w.xi)? != *phi {
            return Err(Error::VerificationFailed(format!("{psi_j} under ξ is not {phi}")));
        }
    }
    Ok(())
}

/// Sufficient test for `g(tv1) ≡ g(tv2)`: equal X-systems. Returns `false`
/// when the systems differ, which says nothing either way.
pub fn same_x_equivalent(
    g: &Operation,
    tv1: &TermVector,
    tv2: &TermVector,
    s: &SemilatticeStructure,
) -> Result<bool> {
    for tv in [tv1, tv2] {
        if tv.len() != g.arity() {
            return Err(Error::ArityMismatch { expected: g.arity(), found: tv.len() });
        }
    }
    if x_system(tv1) != x_system(tv2) {
        return Ok(false);
    }
    let c1 = canonicalize(g, tv1, s)?;
    let c2 = canonicalize(g, tv2, s)?;
    if c1.f_prime != c2.f_prime {
        return Err(Error::VerificationFailed("equal systems produced different canonical forms".into()));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Domain;

    fn bool_op(arity: usize, f: impl FnMut(&[u8]) -> u8) -> Operation {
        Operation::from_fn(Domain::boolean(), arity, f).unwrap()
    }

    #[test]
    fn ternary_and_example() {
        let s = SemilatticeStructure::boolean();
        let g = bool_op(3, |a| a[0] & a[1] & a[2]);
        let tv = TermVector::from_sets(3, &[&[1, 2], &[2, 3], &[2]]).unwrap();
        let c = canonicalize(&g, &tv, &s).unwrap();
        assert_eq!(c.system, SetSystem::from_sets(3, &[&[1], &[2], &[1, 2, 3]]).unwrap());
        assert_eq!(c.witness.pi, vec![1, 3, 2]);
        let xi: Vec<String> = c.witness.xi.iter().map(|t| t.to_string()).collect();
        assert_eq!(xi, ["^{1}", "^{3}", "^{2}"]);
        assert_eq!(c.f, g);
        assert_eq!(c.f_prime, g);
    }

    #[test]
    fn unused_variable_example() {
        let s = SemilatticeStructure::boolean();
        let g = bool_op(2, |a| a[0] & a[1]);
        let tv = TermVector::from_sets(3, &[&[1], &[1, 2]]).unwrap();
        let c = canonicalize(&g, &tv, &s).unwrap();
        assert_eq!(c.psi.to_string(), "^{3} ^{2,3}");
        let xi: Vec<String> = c.witness.xi.iter().map(|t| t.to_string()).collect();
        assert_eq!(xi, ["^{3}", "^{2}", "^{1}"]);
        // oracle tables: f = x1 ∧ x2, f' = x2 ∧ x3
        assert_eq!(c.f, bool_op(3, |a| a[0] & a[1]));
        assert_eq!(c.f_prime, bool_op(3, |a| a[1] & a[2]));
    }

    #[test]
    fn identity_example() {
        let s = SemilatticeStructure::boolean();
        let g = Operation::projection(Domain::boolean(), 1, 1).unwrap();
        let tv = TermVector::from_sets(1, &[&[1]]).unwrap();
        let c = canonicalize(&g, &tv, &s).unwrap();
        assert_eq!(c.f, g);
        assert_eq!(c.f_prime, g);
        assert_eq!(c.system, SetSystem::from_sets(1, &[&[1]]).unwrap());
    }

    #[test]
    fn canonicalization_reproduces_its_own_system() {
        let s = SemilatticeStructure::chain(3).unwrap();
        let g = Operation::from_fn(s.domain(), 2, |a| (a[0] + 2 * a[1]) % 3).unwrap();
        let tv = TermVector::from_sets(4, &[&[1, 2], &[2, 4]]).unwrap();
        let c = canonicalize(&g, &tv, &s).unwrap();
        let again = canonicalize(&g, &c.psi, &s).unwrap();
        assert_eq!(again.system, c.system);
        assert_eq!(again.f_prime, c.f_prime);
        assert_eq!(again.witness.pi, (1..=c.system.len()).collect::<Vec<_>>());
    }

    #[test]
    fn same_x_examples() {
        let s = SemilatticeStructure::boolean();
        let and = bool_op(2, |a| a[0] & a[1]);
        let tv = TermVector::from_sets(2, &[&[1], &[2]]).unwrap();
        assert!(same_x_equivalent(&and, &tv, &tv, &s).unwrap());
        let swapped = TermVector::from_sets(2, &[&[2], &[1]]).unwrap();
        assert!(same_x_equivalent(&and, &tv, &swapped, &s).unwrap());

        let x1 = Operation::projection(Domain::boolean(), 2, 1).unwrap();
        let a = TermVector::from_sets(2, &[&[1], &[1, 2]]).unwrap();
        let b = TermVector::from_sets(2, &[&[1, 2], &[1]]).unwrap();
        assert!(!same_x_equivalent(&x1, &a, &b, &s).unwrap());

        let short = TermVector::from_sets(2, &[&[1]]).unwrap();
        assert!(same_x_equivalent(&and, &short, &tv, &s).is_err());
    }

    #[test]
    fn arity_mismatch_rejected() {
        let s = SemilatticeStructure::boolean();
        let g = bool_op(2, |a| a[0] & a[1]);
        let tv = TermVector::from_sets(2, &[&[1]]).unwrap();
        assert!(matches!(canonicalize(&g, &tv, &s), Err(Error::ArityMismatch { .. })));
    }
}
