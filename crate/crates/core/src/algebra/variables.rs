use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Error;
use crate::Rational;

pub type VarId = u32;

/// What role a variable plays in `(ΛΨ)* ⊗ P ⊗ ΛΨ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    /// Generator of the base Poisson algebra `P`.
    Base,
    /// Dual of a resolution generator; `dual` is the resolution variable.
    Ghost { dual: VarId },
    /// Generator of `Ψ`; `dual` is its ghost.
    Resolution { dual: VarId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariableDecl {
    pub name: String,
    pub kind: VarKind,
    /// Ghost degree `r >= 0`.
    pub ghost: i32,
    /// Resolution degree `s <= 0`.
    pub resolution: i32,
    pub odd: bool,
    /// Internal grading used to cut the algebra into finite slices. Base
    /// variables weigh 1, a resolution variable weighs as much as its
    /// δ-image, and a ghost weighs `2 - weight(dual)`, so that the bracket
    /// lowers weight by exactly 2 and `{Q, ·}` preserves it.
    pub weight: i32,
}

impl VariableDecl {
    pub fn is_base(&self) -> bool {
        matches!(self.kind, VarKind::Base)
    }

    pub fn is_ghost(&self) -> bool {
        matches!(self.kind, VarKind::Ghost { .. })
    }

    pub fn is_resolution(&self) -> bool {
        matches!(self.kind, VarKind::Resolution { .. })
    }
}

/// Registry of variables together with the constant pairing that defines the
/// Poisson bracket on generators.
///
/// The pairing is stored in both orders; the reverse entry is filled in by
/// graded antisymmetry `{y, x} = -(-1)^{|x||y|} {x, y}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VariableTable {
    entries: Vec<VariableDecl>,
    pairing: BTreeMap<(VarId, VarId), Rational>,
}

impl VariableTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` canonical pairs named `q1..qn`, `p1..pn` with `{qi, pj} = δij`.
    pub fn canonical(n: usize) -> Self {
        let mut table = Self::new();
        let qs: Vec<_> = (1..=n)
            .map(|i| table.add_base(&format!("q{i}"), false).unwrap())
            .collect();
        let ps: Vec<_> = (1..=n)
            .map(|i| table.add_base(&format!("p{i}"), false).unwrap())
            .collect();
        for (q, p) in qs.into_iter().zip(ps) {
            table.set_pairing(q, p, Rational::from_integer(1.into())).unwrap();
        }
        table
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: VarId) -> &VariableDecl {
        &self.entries[id as usize]
    }

    pub fn entries(&self) -> &[VariableDecl] {
        &self.entries
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.entries.len() as VarId).into_iter()
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.entries
            .iter()
            .position(|d| d.name == name)
            .map(|i| i as VarId)
    }

    pub fn base_vars(&self) -> Vec<VarId> {
        self.ids().filter(|&v| self.get(v).is_base()).collect()
    }

    pub fn even_base_vars(&self) -> Vec<VarId> {
        self.ids()
            .filter(|&v| self.get(v).is_base() && !self.get(v).odd)
            .collect()
    }

    fn push(&mut self, decl: VariableDecl) -> Result<VarId, Error> {
        if decl.name.is_empty() || self.lookup(&decl.name).is_some() {
            return Err(Error::DuplicateVariable(decl.name));
        }
        self.entries.push(decl);
        Ok((self.entries.len() - 1) as VarId)
    }

    pub fn add_base(&mut self, name: &str, odd: bool) -> Result<VarId, Error> {
        self.push(VariableDecl {
            name: name.to_string(),
            kind: VarKind::Base,
            ghost: 0,
            resolution: 0,
            odd,
            weight: 1,
        })
    }

    /// Adds a resolution generator of degree `degree <= -1` together with its
    /// dual ghost of degree `-degree`, paired by `{ghost, generator} = 1`.
    /// Returns `(generator, ghost)`.
    pub fn add_resolution_pair(
        &mut self,
        generator_name: &str,
        ghost_name: &str,
        degree: i32,
        weight: i32,
    ) -> Result<(VarId, VarId), Error> {
        self.add_resolution_pair_with_parity(
            generator_name,
            ghost_name,
            degree,
            weight,
            degree.rem_euclid(2) == 1,
        )
    }

    /// As [`Self::add_resolution_pair`] with the parity given explicitly,
    /// which odd base variables can force away from the degree rule.
    pub fn add_resolution_pair_with_parity(
        &mut self,
        generator_name: &str,
        ghost_name: &str,
        degree: i32,
        weight: i32,
        odd: bool,
    ) -> Result<(VarId, VarId), Error> {
        assert!(degree <= -1, "resolution degree must be negative");
        let generator = self.len() as VarId;
        let ghost = generator + 1;
        self.push(VariableDecl {
            name: generator_name.to_string(),
            kind: VarKind::Resolution { dual: ghost },
            ghost: 0,
            resolution: degree,
            odd,
            weight,
        })?;
        self.push(VariableDecl {
            name: ghost_name.to_string(),
            kind: VarKind::Ghost { dual: generator },
            ghost: -degree,
            resolution: 0,
            odd,
            weight: 2 - weight,
        })?;
        self.set_pairing(ghost, generator, Rational::from_integer(1.into()))?;
        Ok((generator, ghost))
    }

    /// Sets `{a, b} = value` and the graded-antisymmetric reverse entry.
    pub fn set_pairing(&mut self, a: VarId, b: VarId, value: Rational) -> Result<(), Error> {
        let (da, db) = (self.get(a), self.get(b));
        let allowed = match (&da.kind, &db.kind) {
            (VarKind::Base, VarKind::Base) => true,
            (VarKind::Ghost { dual }, VarKind::Resolution { .. }) => *dual == b,
            (VarKind::Resolution { dual }, VarKind::Ghost { .. }) => *dual == a,
            _ => false,
        };
        if !allowed {
            return Err(Error::InvalidPairing(da.name.clone(), db.name.clone()));
        }
        if da.odd != db.odd {
            return Err(Error::InvalidPairing(da.name.clone(), db.name.clone()));
        }
        let both_odd = da.odd && db.odd;
        if a == b && !both_odd {
            return Err(Error::InvalidPairing(da.name.clone(), db.name.clone()));
        }
        let reverse = if both_odd { value.clone() } else { -value.clone() };
        self.pairing.insert((a, b), value);
        self.pairing.insert((b, a), reverse);
        Ok(())
    }

    pub fn pairing(&self, a: VarId, b: VarId) -> Option<&Rational> {
        self.pairing.get(&(a, b))
    }

    /// All `(b, {a, b})` with a nonzero entry.
    pub fn partners(&self, a: VarId) -> impl Iterator<Item = (VarId, &Rational)> {
        self.pairing
            .range((a, 0)..=(a, VarId::MAX))
            .map(|(&(_, b), v)| (b, v))
    }

    /// True when `self` is `other` with possibly more variables appended.
    pub fn extends(&self, other: &VariableTable) -> bool {
        other.entries.len() <= self.entries.len()
            && self.entries[..other.entries.len()] == other.entries[..]
    }
}

/// Returns whichever table extends the other, if either does.
pub(crate) fn common_table(
    a: &Arc<VariableTable>,
    b: &Arc<VariableTable>,
) -> Option<Arc<VariableTable>> {
    if Arc::ptr_eq(a, b) {
        return Some(a.clone());
    }
    if a.extends(b) {
        Some(a.clone())
    } else if b.extends(a) {
        Some(b.clone())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_pairing_is_antisymmetric() {
        let t = VariableTable::canonical(2);
        let one = Rational::from_integer(1.into());
        assert_eq!(t.pairing(0, 2), Some(&one));
        assert_eq!(t.pairing(2, 0), Some(&-one));
        assert_eq!(t.pairing(0, 3), None);
    }

    #[test]
    fn odd_pairs_are_symmetric() {
        let mut t = VariableTable::canonical(1);
        let (g, eta) = t.add_resolution_pair("P1", "eta1", -1, 2).unwrap();
        let one = Rational::from_integer(1.into());
        assert_eq!(t.pairing(eta, g), Some(&one));
        assert_eq!(t.pairing(g, eta), Some(&one));
        assert!(t.get(g).odd && t.get(eta).odd);
        assert_eq!(t.get(eta).weight, 0);
        let (t2, eta2) = t.add_resolution_pair("P2_1", "eta2_1", -2, 3).unwrap();
        assert!(!t.get(t2).odd);
        assert_eq!(t.pairing(t2, eta2), Some(&-one));
    }

    #[test]
    fn pairing_rules_are_enforced() {
        let mut t = VariableTable::canonical(1);
        let (g, _) = t.add_resolution_pair("P1", "eta1", -1, 2).unwrap();
        assert!(t.set_pairing(0, g, Rational::from_integer(1.into())).is_err());
        assert!(t.set_pairing(0, 0, Rational::from_integer(1.into())).is_err());
        assert!(t.add_base("q1", false).is_err());
    }
}
