//! Greedy stabilization of a star creature.
//!
//! Starting from a constraint extension `g'`, the procedure repeatedly
//! searches all extensions by at most the budget many new coordinates for
//! one raising the normalized sum by the configured gain factor, compounded
//! from the initial sum. At the fixpoint the constraint becomes the output
//! creature's, the norm drops by one, and the retained letters shrink to
//! the compatible ones.
//!
//! The fixpoint gives exact two-sided control of every functional row of
//! the output: no row reaches the next compounded target, and a pigeonhole
//! over the completions of any row's new coordinates bounds every row from
//! below by `grown * (1 - (2^budget - 1) * gain)`. Both conclusions are
//! re-verified by full row enumeration and recorded in the certificate.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::creature::{Creature, FamilyKind, Valuation};
use crate::error::{Error, Result};
use crate::family::{expect_family, MeasuredFamily};
use crate::node::{Letter, Node, PartialBits};
use crate::rational::{fmt_rat, pow2, pow2_neg, Rational};

use super::StarFamily;

#[derive(Clone, Debug)]
pub struct StabilizeStep {
    pub chosen: PartialBits,
    pub normalized_sum: Rational,
    pub target: Rational,
}

#[derive(Clone, Debug)]
pub struct StabilizeCertificate {
    pub gain: Rational,
    /// initial normalized sum at the starting constraint
    pub initial: Rational,
    pub rounds: u64,
    /// compounded lower bound on the final normalized sum
    pub grown: Rational,
    pub steps: Vec<StabilizeStep>,
    /// configured stabilization floor and whether the initial sum met it
    pub threshold: Rational,
    pub hypothesis_met: bool,
    /// initial * (1+gain)^rounds stays within 1 (vacuous when initial = 0)
    pub growth_within_unit: bool,
    /// (1+gain)^rounds <= 1/threshold, the exact step-count bound
    pub step_bound_ok: bool,
    /// window loss (2^budget - 1) * gain of the row control
    pub window_loss: Rational,
    /// claimed floor grown * (1 - loss) on the output value, and verdict
    pub floor_claim: Rational,
    pub floor_ok: bool,
    /// claimed ceiling grown * (1 + gain) on every row, and verdict
    pub ceiling_claim: Rational,
    pub ceiling_ok: bool,
    /// multiplicative row window over the output value, when the loss
    /// stays below one
    pub window: Option<Rational>,
    pub window_ok: bool,
    /// output value and the extreme rows, by full enumeration
    pub value: Rational,
    pub row_min: Rational,
    pub row_max: Rational,
}

#[derive(Clone, Debug)]
pub struct Stabilized {
    pub creature: Creature,
    pub certificate: StabilizeCertificate,
}

impl StarFamily {
    fn normalized_sum(&self, t: &Creature, h: &PartialBits, r: &Valuation) -> Result<Rational> {
        let width = self.profile.toy_width(t.level)?;
        let mut acc = Rational::zero();
        for letter in &t.star()?.p {
            if h.constrains(letter) {
                acc += r.get_or_zero(&t.stem.child(*letter));
            }
        }
        Ok(acc * pow2_neg(width as u64 - h.len() as u64))
    }

    /// Extensions of `g` by 0..=budget new coordinates, sorted.
    fn greedy_moves(&self, level: usize, g: &PartialBits) -> Result<Vec<PartialBits>> {
        let width = self.profile.toy_width(level)?;
        let budget = self.profile.budget_at(level)? as usize;
        let free: Vec<u8> = (0..width).filter(|c| g.get(*c).is_none()).collect();
        let mut out = vec![g.clone()];
        let mut frontier = vec![g.clone()];
        for _ in 0..budget.min(free.len()) {
            let mut next = Vec::new();
            for base in &frontier {
                for &coord in &free {
                    if base.get(coord).is_some() {
                        continue;
                    }
                    // keep extensions canonical: only add coordinates above
                    // every previously added one
                    if base
                        .domain()
                        .filter(|c| g.get(*c).is_none())
                        .any(|c| c >= coord)
                    {
                        continue;
                    }
                    for bit in [false, true] {
                        let mut pairs = base.pairs().to_vec();
                        pairs.push((coord, bit));
                        let ext = PartialBits::new(pairs)?;
                        out.push(ext.clone());
                        next.push(ext);
                    }
                }
            }
            frontier = next;
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Runs the stabilization of `t` from the extension `gprime` under the
    /// valuation `r`, with the given gain. The starting extension must add
    /// at most the budget many coordinates to the creature's constraint.
    pub fn greedy_stabilize(
        &self,
        t: &Creature,
        gprime: &PartialBits,
        r: &Valuation,
        gain: &Rational,
    ) -> Result<Stabilized> {
        expect_family(t, FamilyKind::Star)?;
        self.validate_creature(t)?;
        let payload = t.star()?;
        if payload.n < 1 {
            return Err(Error::input("stabilization needs norm at least one"));
        }
        if gain <= &Rational::zero() {
            return Err(Error::input("the gain must be positive"));
        }
        if !payload.g.subset_of(gprime) {
            return Err(Error::input("the starting extension must extend the constraint"));
        }
        if (gprime.len() - payload.g.len()) as u64 > self.profile.budget_at(t.level)? {
            return Err(Error::input("the starting extension overruns the budget"));
        }
        let pos: BTreeSet<Node> = t.pos().into_iter().collect();
        r.check_within(&pos, "valuation")?;

        let level = t.level;
        let threshold = self.profile.stabilize_threshold(level)?;
        let initial = self.normalized_sum(t, gprime, r)?;
        let hypothesis_met = initial >= threshold;
        let one_plus = Rational::one() + gain.clone();

        let mut current = gprime.clone();
        let mut rounds: u64 = 0;
        let mut steps = Vec::new();
        if !initial.is_zero() {
            loop {
                let target = initial.clone() * pow_rat(&one_plus, rounds + 1);
                if target > Rational::one() {
                    break;
                }
                let mut best: Option<(Rational, PartialBits)> = None;
                for h in self.greedy_moves(level, &current)? {
                    let sum = self.normalized_sum(t, &h, r)?;
                    if sum < target {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some((b, bh)) => sum > *b || (sum == *b && h < *bh),
                    };
                    if better {
                        best = Some((sum, h));
                    }
                }
                match best {
                    None => break,
                    Some((sum, h)) => {
                        rounds += 1;
                        self.guards.check_search(rounds)?;
                        steps.push(StabilizeStep {
                            chosen: h.clone(),
                            normalized_sum: sum,
                            target,
                        });
                        current = h;
                    }
                }
            }
        }

        let grown = initial.clone() * pow_rat(&one_plus, rounds);
        let retained: BTreeSet<Letter> = payload
            .p
            .iter()
            .filter(|l| current.constrains(l))
            .copied()
            .collect();
        if retained.is_empty() {
            return Err(Error::infeasible(format!(
                "the stabilized constraint {current} is incompatible with every retained letter"
            )));
        }
        let n_out = payload.n - 1;
        let cap = self.profile.cap_at(level, level as u64 - n_out)?;
        if BigUint::from(current.len() as u64) > cap {
            return Err(Error::infeasible(format!(
                "stabilized constraint size {} exceeds the cap {cap} at deficiency {}",
                current.len(),
                level as u64 - n_out
            )));
        }
        let creature = self.creature(level, t.stem.clone(), n_out, current.clone(), retained)?;

        // conclusions, by full row enumeration of the output
        let rows = self.functionals(&creature)?;
        let r_out = r.restrict(|n| creature.pos().contains(n));
        let values = rows.row_values(&r_out);
        let value = values
            .iter()
            .map(|(_, v)| v.clone())
            .min()
            .expect("at least one row");
        let row_min = value.clone();
        let row_max = values
            .iter()
            .map(|(_, v)| v.clone())
            .max()
            .expect("at least one row");

        let budget = self.profile.budget_at(level)?;
        let window_loss = (pow2(budget) - Rational::one()) * gain.clone();
        let floor_claim = if window_loss < Rational::one() {
            grown.clone() * (Rational::one() - window_loss.clone())
        } else {
            Rational::zero()
        };
        let ceiling_claim = grown.clone() * one_plus.clone();
        let window = if window_loss < Rational::one() {
            Some((gain.clone() + window_loss.clone()) / (Rational::one() - window_loss.clone()))
        } else {
            None
        };
        let window_ok = match &window {
            Some(w) => row_max <= value.clone() * (Rational::one() + w.clone()),
            None => true,
        };
        let growth_within_unit = initial.is_zero() || grown <= Rational::one();
        let step_bound_ok =
            threshold.is_zero() || pow_rat(&one_plus, rounds) <= threshold.clone().recip();

        let certificate = StabilizeCertificate {
            gain: gain.clone(),
            initial: initial.clone(),
            rounds,
            grown: grown.clone(),
            steps,
            threshold,
            hypothesis_met,
            growth_within_unit,
            step_bound_ok,
            window_loss,
            floor_ok: value >= floor_claim || initial.is_zero(),
            floor_claim,
            ceiling_ok: initial.is_zero() || row_max < ceiling_claim,
            ceiling_claim,
            window,
            window_ok,
            value,
            row_min,
            row_max,
        };
        if !certificate.floor_ok || !certificate.ceiling_ok || !certificate.window_ok {
            return Err(Error::infeasible(format!(
                "stabilization conclusions failed verification: value {}, rows [{}, {}], claims [{}, {}]",
                fmt_rat(&certificate.value),
                fmt_rat(&certificate.row_min),
                fmt_rat(&certificate.row_max),
                fmt_rat(&certificate.floor_claim),
                fmt_rat(&certificate.ceiling_claim),
            )));
        }
        Ok(Stabilized {
            creature,
            certificate,
        })
    }
}

fn pow_rat(base: &Rational, exp: u64) -> Rational {
    let mut acc = Rational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b.clone();
        }
        b = b.clone() * b;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::tests::{family_n4, stem1};
    use crate::rational::rat;
    use num_traits::One;

    #[test]
    fn full_set_is_already_stable() {
        let fam = family_n4();
        let p: BTreeSet<Letter> = fam
            .letters_extending(1, &PartialBits::empty())
            .unwrap()
            .into_iter()
            .collect();
        let t = fam
            .creature(1, stem1(), 1, PartialBits::empty(), p)
            .unwrap();
        let ones = Valuation::constant(t.pos().iter(), Rational::one());
        let out = fam
            .greedy_stabilize(&t, &PartialBits::empty(), &ones, &rat(1, 2))
            .unwrap();
        // the initial sum is already 1, so no extension can compound it
        assert_eq!(out.certificate.rounds, 0);
        assert_eq!(out.certificate.value, Rational::one());
        assert!(out.certificate.floor_ok && out.certificate.ceiling_ok);
        assert_eq!(out.creature.star().unwrap().n, 0);
    }

    #[test]
    fn half_space_doubles_once() {
        // retained letters with leading bit zero: the greedy adds that bit
        // and the normalized sum climbs from 1/2 to 1
        let fam = family_n4();
        let p: BTreeSet<Letter> = fam
            .letters_extending(1, &PartialBits::new(vec![(0, false)]).unwrap())
            .unwrap()
            .into_iter()
            .collect();
        let t = fam
            .creature(1, stem1(), 1, PartialBits::empty(), p)
            .unwrap();
        let ones = Valuation::constant(t.pos().iter(), Rational::one());
        let out = fam
            .greedy_stabilize(&t, &PartialBits::empty(), &ones, &rat(1, 2))
            .unwrap();
        assert_eq!(out.certificate.initial, rat(1, 2));
        assert_eq!(out.certificate.rounds, 1);
        assert_eq!(
            out.certificate.steps[0].chosen,
            PartialBits::new(vec![(0, false)]).unwrap()
        );
        assert_eq!(out.certificate.steps[0].normalized_sum, Rational::one());
        assert_eq!(out.certificate.value, Rational::one());
        assert!(out.certificate.step_bound_ok);
    }

    #[test]
    fn zero_valuation_is_vacuous() {
        let fam = family_n4();
        let p: BTreeSet<Letter> = fam
            .letters_extending(1, &PartialBits::empty())
            .unwrap()
            .into_iter()
            .collect();
        let t = fam
            .creature(1, stem1(), 1, PartialBits::empty(), p)
            .unwrap();
        let zero = Valuation::new();
        let out = fam
            .greedy_stabilize(&t, &PartialBits::empty(), &zero, &rat(1, 8))
            .unwrap();
        assert_eq!(out.certificate.rounds, 0);
        assert!(!out.certificate.hypothesis_met);
        assert!(out.certificate.floor_ok && out.certificate.ceiling_ok);
    }

    #[test]
    fn incompatible_extension_is_diagnosed() {
        let fam = family_n4();
        let p: BTreeSet<Letter> = fam
            .letters_extending(1, &PartialBits::new(vec![(0, false)]).unwrap())
            .unwrap()
            .into_iter()
            .collect();
        let t = fam
            .creature(1, stem1(), 1, PartialBits::empty(), p)
            .unwrap();
        let zero = Valuation::new();
        let bad = PartialBits::new(vec![(0, true)]).unwrap();
        let err = fam.greedy_stabilize(&t, &bad, &zero, &rat(1, 8));
        assert!(matches!(err, Err(Error::Infeasible(_))));
    }
}
