use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, Operation, SemilatticeStructure};
use crate::error::{Error, Result};

/// Largest ambient arity a meet term can carry.
pub const MAX_TERM_ARITY: usize = 63;

/// `⋀_{i ∈ Φ} x_i^(n)` for a nonempty variable set `Φ ⊆ [n]`, stored as a
/// bitmask with bit `i-1` standing for `x_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeetTerm {
    n: usize,
    vars: u64,
}

impl MeetTerm {
    pub fn from_mask(n: usize, vars: u64) -> Result<Self> {
        if n == 0 || n > MAX_TERM_ARITY {
            return Err(Error::InvalidTerm(format!("ambient arity {n} outside 1..={MAX_TERM_ARITY}")));
        }
        if vars == 0 {
            return Err(Error::InvalidTerm("empty meet".into()));
        }
        if vars >> n != 0 {
            return Err(Error::InvalidTerm(format!("variable above x_{n}")));
        }
        Ok(MeetTerm { n, vars })
    }

    /// From 1-based variable indices.
    pub fn new(n: usize, vars: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = 0u64;
        for v in vars {
            if v == 0 || v > n {
                return Err(Error::InvalidTerm(format!("variable x_{v} outside 1..={n}")));
            }
            mask |= 1 << (v - 1);
        }
        MeetTerm::from_mask(n, mask)
    }

    pub fn variable(n: usize, i: usize) -> Result<Self> {
        MeetTerm::new(n, [i])
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.vars
    }

    /// 1-based variable indices in increasing order.
    pub fn vars(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.vars >> i & 1 == 1).map(|i| i + 1).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.n && self.vars >> (i - 1) & 1 == 1
    }

    /// `self(inner_1, ..., inner_n)`: the union of the inner variable sets.
    pub fn compose(&self, inner: &[MeetTerm]) -> Result<MeetTerm> {
        if inner.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, found: inner.len() });
        }
        let n = inner[0].n;
        let mut mask = 0;
        for (i, t) in inner.iter().enumerate() {
            if t.n != n {
                return Err(Error::ArityMismatch { expected: n, found: t.n });
            }
            if self.vars >> i & 1 == 1 {
                mask |= t.vars;
            }
        }
        MeetTerm::from_mask(n, mask)
    }

    /// `self(x_{map[0]}, ..., x_{map[n-1]})` over `new_n` variables (1-based map).
    pub fn substitute_variables(&self, map: &[usize], new_n: usize) -> Result<MeetTerm> {
        let inner = map.iter().map(|&v| MeetTerm::variable(new_n, v)).collect::<Result<Vec<_>>>()?;
        self.compose(&inner)
    }

    /// Evaluates the term on an argument tuple.
    #[inline]
    pub fn apply(&self, s: &SemilatticeStructure, args: &[Elem]) -> Elem {
        let mut acc: Option<Elem> = None;
        for (i, &a) in args.iter().enumerate() {
            if self.vars >> i & 1 == 1 {
                acc = Some(match acc {
                    None => a,
                    Some(x) => s.meet(x, a),
                });
            }
        }
        acc.expect("meet terms are nonempty")
    }

    pub fn realize(&self, s: &SemilatticeStructure) -> Result<Operation> {
        Operation::from_fn(s.domain(), self.n, |args| self.apply(s, args))
    }

    /// Parses `^{1,3}` over `n` variables.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let text = text.trim();
        let body = text
            .strip_prefix("^{")
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected ^{{...}}, got {text:?}")))?;
        let vars = body
            .split(',')
            .map(|v| v.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad variable index {v:?}"))))
            .collect::<Result<Vec<_>>>()?;
        MeetTerm::new(n, vars)
    }
}

impl fmt::Display for MeetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self.vars().iter().map(|v| v.to_string()).collect();
        write!(f, "^{{{}}}", vars.join(","))
    }
}

/// A member of a clone between `⟨∧⟩` and `⟨∧,0,1⟩`: a meet term or one of the
/// permitted constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedTerm {
    Meet(MeetTerm),
    Const(Elem),
}

impl ExtendedTerm {
    pub fn realize(&self, s: &SemilatticeStructure, n: usize) -> Result<Operation> {
        match self {
            ExtendedTerm::Meet(t) => {
                if t.arity() != n {
                    return Err(Error::ArityMismatch { expected: n, found: t.arity() });
                }
                t.realize(s)
            }
            ExtendedTerm::Const(c) => Operation::constant(s.domain(), n, *c),
        }
    }

    pub fn as_meet(&self) -> Option<&MeetTerm> {
        match self {
            ExtendedTerm::Meet(t) => Some(t),
            ExtendedTerm::Const(_) => None,
        }
    }

    /// Parses `^{...}` or `const c`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("const") {
            let c = rest.trim().parse::<Elem>().map_err(|_| Error::Parse(format!("bad constant {text:?}")))?;
            return Ok(ExtendedTerm::Const(c));
        }
        MeetTerm::parse(text, n).map(ExtendedTerm::Meet)
    }
}

impl fmt::Display for ExtendedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedTerm::Meet(t) => t.fmt(f),
            ExtendedTerm::Const(c) => write!(f, "const {c}"),
        }
    }
}

/// Formats a term tuple as space-separated term text.
pub fn terms_to_string(terms: &[ExtendedTerm]) -> String {
    terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

/// An inner tuple `(φ_1, ..., φ_m)` of meet terms over a common arity `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TermVectorJson", into = "TermVectorJson")]
pub struct TermVector {
    n: usize,
    terms: Vec<MeetTerm>,
}

impl TermVector {
    pub fn new(n: usize, terms: Vec<MeetTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidTerm("a term vector needs at least one term".into()));
        }
        if let Some(t) = terms.iter().find(|t| t.arity() != n) {
            return Err(Error::ArityMismatch { expected: n, found: t.arity() });
        }
        Ok(TermVector { n, terms })
    }

    /// From lists of 1-based variable indices.
    pub fn from_sets(n: usize, sets: &[&[usize]]) -> Result<Self> {
        let terms = sets.iter().map(|s| MeetTerm::new(n, s.iter().copied())).collect::<Result<Vec<_>>>()?;
        TermVector::new(n, terms)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[MeetTerm] {
        &self.terms
    }

    pub fn realize(&self, s: &SemilatticeStructure) -> Result<Vec<Operation>> {
        self.terms.iter().map(|t| t.realize(s)).collect()
    }
}

impl fmt::Display for TermVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermVectorJson {
    pub n: usize,
    pub terms: Vec<Vec<usize>>,
}

impl TryFrom<TermVectorJson> for TermVector {
    type Error = Error;

    fn try_from(json: TermVectorJson) -> Result<Self> {
        let terms = json.terms.into_iter().map(|t| MeetTerm::new(json.n, t)).collect::<Result<Vec<_>>>()?;
        TermVector::new(json.n, terms)
    }
}

impl From<TermVector> for TermVectorJson {
    fn from(tv: TermVector) -> Self {
        TermVectorJson { n: tv.n, terms: tv.terms.iter().map(|t| t.vars()).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        let t = MeetTerm::new(3, [1, 3]).unwrap();
        assert_eq!(t.to_string(), "^{1,3}");
        assert_eq!(MeetTerm::parse("^{1,3}", 3).unwrap(), t);
        assert_eq!(MeetTerm::parse(" ^{ 3, 1 } ", 3).unwrap(), t);
        assert!(MeetTerm::parse("^{}", 3).is_err());
        assert!(MeetTerm::parse("^{4}", 3).is_err());
        assert!(MeetTerm::parse("{1}", 3).is_err());
        assert_eq!(ExtendedTerm::parse("const 0", 2).unwrap(), ExtendedTerm::Const(0));
        assert_eq!(ExtendedTerm::Const(1).to_string(), "const 1");
    }

    #[test]
    fn empty_meet_rejected() {
        assert!(MeetTerm::new(2, []).is_err());
        assert!(TermVector::new(2, vec![]).is_err());
    }

    #[test]
    fn realization_is_pointwise_meet() {
        let s = SemilatticeStructure::chain(3).unwrap();
        let t = MeetTerm::new(3, [1, 3]).unwrap();
        let op = t.realize(&s).unwrap();
        let oracle = Operation::from_fn(s.domain(), 3, |a| a[0].min(a[2])).unwrap();
        assert_eq!(op, oracle);
    }

    #[test]
    fn term_composition_matches_tables() {
        let s = SemilatticeStructure::boolean();
        let outer = MeetTerm::new(2, [1, 2]).unwrap();
        let inner = [MeetTerm::new(3, [1]).unwrap(), MeetTerm::new(3, [2, 3]).unwrap()];
        let composed = outer.compose(&inner).unwrap();
        assert_eq!(composed.vars(), vec![1, 2, 3]);
        let tables: Vec<Operation> = inner.iter().map(|t| t.realize(&s).unwrap()).collect();
        assert_eq!(outer.realize(&s).unwrap().compose(&tables).unwrap(), composed.realize(&s).unwrap());
    }

    #[test]
    fn term_vector_json() {
        let tv: TermVector = serde_json::from_str(r#"{"n":3,"terms":[[1,2],[2,3],[2]]}"#).unwrap();
        assert_eq!(tv.to_string(), "^{1,2} ^{2,3} ^{2}");
        assert_eq!(serde_json::to_string(&tv).unwrap(), r#"{"n":3,"terms":[[1,2],[2,3],[2]]}"#);
        assert!(serde_json::from_str::<TermVector>(r#"{"n":2,"terms":[[]]}"#).is_err());
    }
}
