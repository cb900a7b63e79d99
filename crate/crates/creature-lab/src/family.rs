//! The interface a creature family exposes to the generic framework.

use crate::creature::{Creature, FamilyKind, FunctionalSet, Valuation};
use crate::error::{Error, Result};
use crate::rational::{check_unit, Rational};

/// A measured creature family: creature validation, the averaging
/// functional of each creature, and the composition relation.
///
/// Compositions are reflexive and transitive; `sigma` enumerates them in a
/// deterministic order under the family's size guards, `sigma_contains`
/// decides membership without enumerating.
pub trait MeasuredFamily {
    fn kind(&self) -> FamilyKind;

    fn validate_creature(&self, t: &Creature) -> Result<()>;

    /// The averaging function of `t`, materialized as min-of-linear rows.
    fn functionals(&self, t: &Creature) -> Result<FunctionalSet>;

    /// All compositions of `t`, deterministically ordered.
    fn sigma(&self, t: &Creature) -> Result<Vec<Creature>>;

    /// Decides `s in sigma(t)`.
    fn sigma_contains(&self, t: &Creature, s: &Creature) -> Result<bool>;

    /// Averaging value on a partial valuation over pos(t): zero-pads to all
    /// of pos(t) and takes the minimum over the functional rows.
    fn eval(&self, t: &Creature, r: &Valuation) -> Result<Rational> {
        let pos: std::collections::BTreeSet<_> = t.pos().into_iter().collect();
        r.check_within(&pos, "valuation")?;
        for (node, value) in r.iter() {
            check_unit(value, &format!("valuation at {node}"))?;
        }
        Ok(self.functionals(t)?.eval(r))
    }
}

pub fn expect_family(t: &Creature, kind: FamilyKind) -> Result<()> {
    if t.family() != kind {
        return Err(Error::input(format!(
            "creature at {} belongs to the {} family, expected {}",
            t.stem,
            t.family(),
            kind
        )));
    }
    Ok(())
}
