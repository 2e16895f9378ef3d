use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::term::{MeetTerm, TermVector};
use crate::error::{Error, Result};

/// A set `E` of subsets of `[m]`, each stored as a bitmask (bit `j-1` for `j`).
///
/// Members are kept sorted by their characteristic integer, which fixes the
/// bijection `σ_E`: the `t`-th member (1-based) is sent to `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SetSystemJson", into = "SetSystemJson")]
pub struct SetSystem {
    m: usize,
    members: Vec<u64>,
}

impl SetSystem {
    pub fn new(m: usize, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        if m > 63 {
            return Err(Error::InvalidTerm(format!("set system over [{m}] is too wide")));
        }
        let set: BTreeSet<u64> = members.into_iter().collect();
        if let Some(bad) = set.iter().find(|&&s| s >> m != 0) {
            return Err(Error::InvalidTerm(format!("member {bad:#b} is not a subset of [{m}]")));
        }
        Ok(SetSystem { m, members: set.into_iter().collect() })
    }

    /// From members given as lists of 1-based elements.
    pub fn from_sets(m: usize, sets: &[&[usize]]) -> Result<Self> {
        let masks = sets
            .iter()
            .map(|s| {
                s.iter().try_fold(0u64, |acc, &j| {
                    if j == 0 || j > m {
                        Err(Error::InvalidTerm(format!("element {j} outside 1..={m}")))
                    } else {
                        Ok(acc | 1 << (j - 1))
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SetSystem::new(m, masks)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in `σ_E` order.
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    /// `σ_E(S)`, 1-based.
    pub fn sigma(&self, member: u64) -> Option<usize> {
        self.members.binary_search(&member).ok().map(|p| p + 1)
    }

    /// `σ_E^{-1}(t)` for 1-based `t`.
    pub fn sigma_inverse(&self, t: usize) -> Option<u64> {
        t.checked_sub(1).and_then(|p| self.members.get(p)).copied()
    }

    /// Whether every `j ∈ [m]` lies in some member.
    pub fn covers(&self) -> bool {
        let all = if self.m == 0 { 0 } else { u64::MAX >> (64 - self.m) };
        self.members.iter().fold(0, |acc, &s| acc | s) == all
    }

    pub fn contains_empty(&self) -> bool {
        self.members.first() == Some(&0)
    }

    /// The system with the empty member removed.
    pub fn without_empty(&self) -> SetSystem {
        SetSystem { m: self.m, members: self.members.iter().copied().filter(|&s| s != 0).collect() }
    }

    pub fn member_sets(&self) -> Vec<Vec<usize>> {
        self.members.iter().map(|&s| mask_elements(s)).collect()
    }
}

fn mask_elements(mask: u64) -> Vec<usize> {
    (0..64).filter(|&j| mask >> j & 1 == 1).map(|j| j + 1).collect()
}

impl fmt::Display for SetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .members
            .iter()
            .map(|&s| {
                if s == 0 {
                    "∅".to_string()
                } else {
                    let elems: Vec<String> = mask_elements(s).iter().map(|j| j.to_string()).collect();
                    format!("{{{}}}", elems.join(","))
                }
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSystemJson {
    pub m: usize,
    pub members: Vec<Vec<usize>>,
}

impl TryFrom<SetSystemJson> for SetSystem {
    type Error = Error;

    fn try_from(json: SetSystemJson) -> Result<Self> {
        let sets: Vec<&[usize]> = json.members.iter().map(|v| v.as_slice()).collect();
        SetSystem::from_sets(json.m, &sets)
    }
}

impl From<SetSystem> for SetSystemJson {
    fn from(e: SetSystem) -> Self {
        SetSystemJson { m: e.m, members: e.member_sets() }
    }
}

/// `X_i = { j ∈ [m] : i ∈ Φ_j }` for each variable `i = 1..n`, uncollapsed.
pub fn x_columns(tv: &TermVector) -> Vec<u64> {
    (0..tv.arity())
        .map(|i| {
            tv.terms()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.mask() >> i & 1 == 1)
                .fold(0u64, |acc, (j, _)| acc | 1 << j)
        })
        .collect()
}

/// `X(φ_1, ..., φ_m) = {X_1, ..., X_n}` as a set.
pub fn x_system(tv: &TermVector) -> SetSystem {
    SetSystem::new(tv.len(), x_columns(tv)).expect("columns are subsets of [m]")
}

/// `Ψ_E = (ψ_1, ..., ψ_m)` with `ψ_j = ⋀_{j ∈ S ∈ E} x_{σ_E(S)}` over `|E|` variables.
pub fn psi_of(e: &SetSystem) -> Result<TermVector> {
    let n = e.len();
    let terms = (0..e.m())
        .map(|j| {
            let vars = e.members().iter().enumerate().filter(|(_, &s)| s >> j & 1 == 1).map(|(p, _)| p + 1);
            MeetTerm::new(n.max(1), vars).map_err(|_| Error::UncoveredCoordinate(j + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    if n == 0 {
        return Err(Error::UncoveredCoordinate(1));
    }
    TermVector::new(n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_system_examples() {
        let tv = TermVector::from_sets(3, &[&[1, 2], &[2, 3], &[2]]).unwrap();
        assert_eq!(x_columns(&tv), vec![0b001, 0b111, 0b010]);
        assert_eq!(x_system(&tv), SetSystem::from_sets(3, &[&[1], &[2], &[1, 2, 3]]).unwrap());

        let tv = TermVector::from_sets(3, &[&[1], &[1, 2]]).unwrap();
        let e = x_system(&tv);
        assert_eq!(e, SetSystem::from_sets(2, &[&[], &[2], &[1, 2]]).unwrap());
        assert_eq!(e.to_string(), "{∅,{2},{1,2}}");

        let tv = TermVector::from_sets(2, &[&[1, 2]]).unwrap();
        assert_eq!(x_system(&tv), SetSystem::from_sets(1, &[&[1]]).unwrap());
    }

    #[test]
    fn sigma_follows_characteristic_order() {
        let e = SetSystem::from_sets(3, &[&[1, 2, 3], &[2], &[1]]).unwrap();
        assert_eq!(e.sigma(0b001), Some(1));
        assert_eq!(e.sigma(0b010), Some(2));
        assert_eq!(e.sigma(0b111), Some(3));
        assert_eq!(e.sigma_inverse(3), Some(0b111));
        assert_eq!(e.sigma(0b100), None);
    }

    #[test]
    fn psi_examples() {
        let e = SetSystem::from_sets(3, &[&[1], &[2], &[1, 2, 3]]).unwrap();
        assert_eq!(psi_of(&e).unwrap().to_string(), "^{1,3} ^{2,3} ^{3}");

        let e = SetSystem::from_sets(2, &[&[], &[2], &[1, 2]]).unwrap();
        assert_eq!(psi_of(&e).unwrap().to_string(), "^{3} ^{2,3}");

        let e = SetSystem::from_sets(1, &[&[1]]).unwrap();
        assert_eq!(psi_of(&e).unwrap().to_string(), "^{1}");
    }

    #[test]
    fn psi_rejects_uncovered_coordinates() {
        let e = SetSystem::from_sets(3, &[&[1], &[1, 2]]).unwrap();
        assert!(!e.covers());
        assert!(matches!(psi_of(&e), Err(Error::UncoveredCoordinate(3))));
        let empty = SetSystem::new(1, []).unwrap();
        assert!(psi_of(&empty).is_err());
    }

    #[test]
    fn json_lists_members_in_sigma_order() {
        let e = SetSystem::from_sets(2, &[&[1, 2], &[], &[2]]).unwrap();
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"m":2,"members":[[],[2],[1,2]]}"#);
        let back: SetSystem = serde_json::from_str(r#"{"m":2,"members":[[1,2],[2]]}"#).unwrap();
        assert_eq!(back.members(), &[0b10, 0b11]);
        assert!(serde_json::from_str::<SetSystem>(r#"{"m":2,"members":[[3]]}"#).is_err());
    }
}
