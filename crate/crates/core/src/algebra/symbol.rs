use rustc_hash::FxHashMap;

use super::AlgebraError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomKind {
    /// A polynomial variable.
    Symbol,
    /// A positive quantity carried with an affine exponent, `B^p`.
    WeightBase,
}

#[derive(Clone, Debug)]
struct Atom {
    name: String,
    kind: AtomKind,
}

/// Ordered registry of atoms. Ids follow registration order, which is the
/// total order used for monomials.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    atoms: Vec<Atom>,
    by_name: FxHashMap<String, SymId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn register(&mut self, name: &str, kind: AtomKind) -> SymId {
        if let Some(&id) = self.by_name.get(name) {
            return id;
        }
        let id = SymId(self.atoms.len() as u32);
        self.atoms.push(Atom { name: name.to_string(), kind });
        self.by_name.insert(name.to_string(), id);
        id
    }

    /// Registers a polynomial symbol; re-registering returns the existing id.
    pub fn symbol(&mut self, name: &str) -> SymId {
        self.register(name, AtomKind::Symbol)
    }

    pub fn weight_base(&mut self, name: &str) -> SymId {
        self.register(name, AtomKind::WeightBase)
    }

    pub fn lookup(&self, name: &str) -> Result<SymId, AlgebraError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| AlgebraError::UnknownSymbol(name.to_string()))
    }

    pub fn name(&self, id: SymId) -> &str {
        &self.atoms[id.0 as usize].name
    }

    pub fn kind(&self, id: SymId) -> AtomKind {
        self.atoms[id.0 as usize].kind
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymId> {
        (0..self.atoms.len() as u32).map(SymId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registration_order_is_deterministic() {
        let build = || {
            let mut t = SymbolTable::new();
            let a = t.symbol("y");
            let b = t.symbol("x");
            let c = t.weight_base("h");
            (a, b, c, t.symbol("y"))
        };
        let (a, b, c, a2) = build();
        assert_eq!(build(), (a, b, c, a2));
        assert!(a < b && b < c);
        assert_eq!(a, a2);
    }

    #[test]
    fn unknown_lookup() {
        let t = SymbolTable::new();
        assert_eq!(t.lookup("z"), Err(AlgebraError::UnknownSymbol("z".into())));
    }
}
