//! Full ground storage signatures: cell sorts and the content type of each.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::SignatureError;

/// Name of a cell sort.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(Arc<str>);

impl Sort {
    pub fn new(name: &str) -> Sort {
        Sort(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Full ground types: the types a cell may store.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundType {
    Empty,
    Sum(Box<GroundType>, Box<GroundType>),
    Unit,
    Product(Box<GroundType>, Box<GroundType>),
    Ref(Sort),
}

impl GroundType {
    /// `1 + 1`, with `inj1 ()` as true.
    pub fn bool() -> GroundType {
        GroundType::sum(GroundType::Unit, GroundType::Unit)
    }

    pub fn sum(a: GroundType, b: GroundType) -> GroundType {
        GroundType::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: GroundType, b: GroundType) -> GroundType {
        GroundType::Product(Box::new(a), Box::new(b))
    }

    pub fn mentions_ref(&self) -> bool {
        match self {
            GroundType::Empty | GroundType::Unit => false,
            GroundType::Ref(_) => true,
            GroundType::Sum(a, b) | GroundType::Product(a, b) => a.mentions_ref() || b.mentions_ref(),
        }
    }

    /// Sorts referenced anywhere in the type, in left-to-right order.
    pub fn referenced_sorts(&self, out: &mut Vec<Sort>) {
        match self {
            GroundType::Empty | GroundType::Unit => {}
            GroundType::Ref(s) => out.push(s.clone()),
            GroundType::Sum(a, b) | GroundType::Product(a, b) => {
                a.referenced_sorts(out);
                b.referenced_sorts(out);
            }
        }
    }
}

impl fmt::Display for GroundType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::syntax::print::write_type(f, &crate::syntax::Type::from(self), 0)
    }
}

/// A validated signature. Sort order is declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    decls: Vec<(Sort, GroundType)>,
}

impl Signature {
    pub fn empty() -> Signature {
        Signature { decls: Vec::new() }
    }

    /// Checks that sort names are distinct and every `ref` names a declared sort.
    /// Cycles between sorts are allowed.
    pub fn validate(decls: Vec<(Sort, GroundType)>) -> Result<Signature, SignatureError> {
        let mut seen = BTreeSet::new();
        for (name, _) in &decls {
            if name.as_str().is_empty() {
                return Err(SignatureError::EmptySortName);
            }
            if !seen.insert(name.clone()) {
                return Err(SignatureError::DuplicateSort(name.to_string()));
            }
        }
        for (_, ty) in &decls {
            let mut refs = Vec::new();
            ty.referenced_sorts(&mut refs);
            if let Some(missing) = refs.into_iter().find(|s| !seen.contains(s)) {
                return Err(SignatureError::UnknownSort(missing.to_string()));
            }
        }
        Ok(Signature { decls })
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> + '_ {
        self.decls.iter().map(|(s, _)| s)
    }

    pub fn decls(&self) -> &[(Sort, GroundType)] {
        &self.decls
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn contains(&self, sort: &Sort) -> bool {
        self.decls.iter().any(|(s, _)| s == sort)
    }

    pub fn lookup(&self, name: &str) -> Option<&Sort> {
        self.decls.iter().map(|(s, _)| s).find(|s| s.as_str() == name)
    }

    /// Content type of a sort. Panics on an undeclared sort; every sort reaching
    /// here has been resolved against this signature.
    pub fn typeof_sort(&self, sort: &Sort) -> &GroundType {
        self.decls
            .iter()
            .find(|(s, _)| s == sort)
            .map(|(_, t)| t)
            .unwrap_or_else(|| panic!("sort `{sort}` is not declared in this signature"))
    }

    pub fn try_typeof(&self, sort: &Sort) -> Option<&GroundType> {
        self.decls.iter().find(|(s, _)| s == sort).map(|(_, t)| t)
    }

    /// No content type mentions `ref`, so every cell's interpretation is a constant functor.
    pub fn is_constant(&self) -> bool {
        self.decls.iter().all(|(_, t)| !t.mentions_ref())
    }

    /// The linked-list signature: `data = bool`, `list = 1 + ref cell`,
    /// `cell = ref data * ref list`.
    pub fn linked_list() -> Signature {
        let data = Sort::new("data");
        let list = Sort::new("list");
        let cell = Sort::new("cell");
        Signature::validate(vec![
            (data.clone(), GroundType::bool()),
            (list.clone(), GroundType::sum(GroundType::Unit, GroundType::Ref(cell.clone()))),
            (cell, GroundType::product(GroundType::Ref(data), GroundType::Ref(list))),
        ])
        .expect("linked-list signature is well formed")
    }

    /// A single sort `d` holding booleans.
    pub fn constant_bool() -> Signature {
        Signature::validate(vec![(Sort::new("d"), GroundType::bool())]).expect("well formed")
    }

    /// Renders the signature back into the declaration syntax.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (s, t) in &self.decls {
            out.push_str(&format!("cell {s} = {t};\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linked_list_has_three_sorts() {
        let sig = Signature::linked_list();
        assert_eq!(sig.len(), 3);
        assert!(!sig.is_constant());
        let names: Vec<_> = sig.sorts().map(|s| s.to_string()).collect();
        assert_eq!(names, ["data", "list", "cell"]);
    }

    #[test]
    fn empty_is_valid() {
        let sig = Signature::validate(vec![]).unwrap();
        assert!(sig.is_empty());
        assert!(sig.is_constant());
    }

    #[test]
    fn unknown_sort_rejected() {
        let err = Signature::validate(vec![(Sort::new("a"), GroundType::Ref(Sort::new("b")))]).unwrap_err();
        assert_eq!(err, SignatureError::UnknownSort("b".into()));
    }

    #[test]
    fn duplicate_rejected() {
        let err = Signature::validate(vec![
            (Sort::new("a"), GroundType::Unit),
            (Sort::new("a"), GroundType::Empty),
        ])
        .unwrap_err();
        assert_eq!(err, SignatureError::DuplicateSort("a".into()));
    }

    #[test]
    fn constant_predicate_matches_ref_scan() {
        assert!(Signature::constant_bool().is_constant());
        let sig = Signature::validate(vec![
            (Sort::new("a"), GroundType::product(GroundType::Unit, GroundType::Empty)),
            (Sort::new("b"), GroundType::sum(GroundType::Unit, GroundType::Ref(Sort::new("a")))),
        ])
        .unwrap();
        assert!(!sig.is_constant());
        assert_eq!(sig.is_constant(), sig.decls().iter().all(|(_, t)| !t.mentions_ref()));
    }
}
