//! The binary family: creatures over the two-letter alphabet with
//! arithmetic-mean averaging.
//!
//! This is the simplest nice family. Its averaging function is linear, so
//! the root measure of a candidate has a closed dyadic form, which makes
//! the family the source of an independent counting oracle for
//! differential testing of the backward-induction recursion.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::candidate::FiniteCandidate;
use crate::creature::{
    Creature, FamilyKind, FunctionalSet, Payload, RandomPayload, Row, RowLabel, Valuation,
};
use crate::error::{Error, Result};
use crate::family::{expect_family, MeasuredFamily};
use crate::node::{Letter, Node};
use crate::rational::{pow2_neg, rat, rat_int, Rational};

#[derive(Debug, Clone, Default)]
pub struct RandomFamily;

/// Builds a binary-family creature: norm equals the level, the averaging
/// function is the single row summing the retained possibilities and
/// halving.
pub fn creature_r(level: usize, stem: Node, p: BTreeSet<Letter>) -> Result<Creature> {
    if p.is_empty() {
        return Err(Error::input("retained letter set must be nonempty"));
    }
    for l in &p {
        match l {
            Letter::Index(0) | Letter::Index(1) => {}
            other => {
                return Err(Error::input(format!(
                    "letter {other} is not a binary letter"
                )))
            }
        }
    }
    if stem.len() != level {
        return Err(Error::input(format!(
            "stem {stem} has length {}, expected level {level}",
            stem.len()
        )));
    }
    Ok(Creature {
        level,
        stem,
        norm: rat_int(level as i64),
        payload: Payload::Random(RandomPayload { p }),
    })
}

/// All compositions: same stem, any nonempty retained subset.
pub fn sigma_r(t: &Creature) -> Result<Vec<Creature>> {
    let payload = t.random()?;
    let letters: Vec<Letter> = payload.p.iter().copied().collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << letters.len()) {
        let subset: BTreeSet<Letter> = letters
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &l)| l)
            .collect();
        out.push(creature_r(t.level, t.stem.clone(), subset)?);
    }
    out.sort();
    Ok(out)
}

impl MeasuredFamily for RandomFamily {
    fn kind(&self) -> FamilyKind {
        FamilyKind::Random
    }

    fn validate_creature(&self, t: &Creature) -> Result<()> {
        expect_family(t, FamilyKind::Random)?;
        let payload = t.random()?;
        if payload.p.is_empty() {
            return Err(Error::input(format!(
                "creature at {} has an empty letter set",
                t.stem
            )));
        }
        for l in &payload.p {
            if !matches!(l, Letter::Index(0) | Letter::Index(1)) {
                return Err(Error::input(format!(
                    "creature at {} holds non-binary letter {l}",
                    t.stem
                )));
            }
        }
        if t.stem.len() != t.level {
            return Err(Error::input(format!(
                "creature stem {} does not match level {}",
                t.stem, t.level
            )));
        }
        if t.norm != rat_int(t.level as i64) {
            return Err(Error::input(format!(
                "binary-family norm at {} must equal the level",
                t.stem
            )));
        }
        Ok(())
    }

    fn functionals(&self, t: &Creature) -> Result<FunctionalSet> {
        self.validate_creature(t)?;
        let coeffs: BTreeMap<Node, Rational> =
            t.pos().into_iter().map(|n| (n, rat(1, 2))).collect();
        FunctionalSet::new(vec![Row {
            label: RowLabel::Mean,
            coeffs,
        }])
    }

    fn sigma(&self, t: &Creature) -> Result<Vec<Creature>> {
        self.validate_creature(t)?;
        sigma_r(t)
    }

    fn sigma_contains(&self, t: &Creature, s: &Creature) -> Result<bool> {
        self.validate_creature(t)?;
        self.validate_creature(s)?;
        Ok(s.stem == t.stem && s.random()?.p.is_subset(&t.random()?.p))
    }
}

/// Root value of a binary-family candidate computed directly, without the
/// backward induction: each boundary node contributes its valuation scaled
/// by one half per level between root and boundary.
pub fn dyadic_oracle(s: &FiniteCandidate, f: &Valuation) -> Result<Rational> {
    if s.family() != Some(FamilyKind::Random) {
        return Err(Error::input("the dyadic oracle only covers the binary family"));
    }
    let depth = (s.height() - s.root().len()) as u64;
    let weight = pow2_neg(depth);
    let mut acc = Rational::zero();
    for node in s.boundary() {
        acc += f.get_or_zero(node) * weight.clone();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::mval;
    use crate::rational::rat;
    use num_traits::One;

    pub(crate) fn both() -> BTreeSet<Letter> {
        [Letter::Index(0), Letter::Index(1)].into_iter().collect()
    }

    #[test]
    fn mean_formula() {
        let t = creature_r(0, Node::root(), both()).unwrap();
        let fam = RandomFamily;
        let pos = t.pos();
        let ones = Valuation::constant(pos.iter(), Rational::one());
        assert_eq!(fam.eval(&t, &ones).unwrap(), Rational::one());

        let single = creature_r(0, Node::root(), [Letter::Index(0)].into_iter().collect()).unwrap();
        let r = Valuation::constant(single.pos().iter(), Rational::one());
        // the mean always halves, even with one retained letter
        assert_eq!(fam.eval(&single, &r).unwrap(), rat(1, 2));

        let mixed = Valuation::from_entries(vec![
            (pos[0].clone(), rat(1, 2)),
            (pos[1].clone(), rat(1, 4)),
        ])
        .unwrap();
        assert_eq!(fam.eval(&t, &mixed).unwrap(), rat(3, 8));
    }

    #[test]
    fn sigma_enumerates_subsets() {
        let t = creature_r(1, Node::root().child(Letter::Index(0)), both()).unwrap();
        let succ = sigma_r(&t).unwrap();
        assert_eq!(succ.len(), 3);
        let single = creature_r(1, t.stem.clone(), [Letter::Index(0)].into_iter().collect()).unwrap();
        assert_eq!(sigma_r(&single).unwrap().len(), 1);
        let fam = RandomFamily;
        assert!(fam.sigma_contains(&t, &single).unwrap());
    }

    #[test]
    fn sigma_transitive_exhaustively() {
        let fam = RandomFamily;
        for mask in 1u32..4 {
            let p: BTreeSet<Letter> = [Letter::Index(0), Letter::Index(1)]
                .into_iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, l)| l)
                .collect();
            let t = creature_r(0, Node::root(), p).unwrap();
            assert!(fam.sigma_contains(&t, &t).unwrap());
            for s in sigma_r(&t).unwrap() {
                for u in sigma_r(&s).unwrap() {
                    assert!(fam.sigma_contains(&t, &u).unwrap());
                }
            }
        }
    }

    #[test]
    fn oracle_matches_recursion_on_full_tree() {
        let fam = RandomFamily;
        let s = crate::candidate::tests::full_binary(0, 2);
        let ones = Valuation::constant(s.boundary(), Rational::one());
        assert_eq!(dyadic_oracle(&s, &ones).unwrap(), Rational::one());

        let mut f = ones.clone();
        let zeroed = s.boundary().next().unwrap().clone();
        f.insert(zeroed, Rational::zero()).unwrap();
        let direct = dyadic_oracle(&s, &f).unwrap();
        assert_eq!(direct, rat(3, 4));
        let m = mval(&fam, &s, &f).unwrap();
        assert_eq!(m.root_value(), &direct);
    }
}
