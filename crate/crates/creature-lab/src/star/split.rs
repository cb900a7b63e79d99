//! Splitting a star creature by the two-stabilization case analysis.
//!
//! Both sides' normalized sums are compared against the stabilization
//! floor: two large sides stabilize separately, one small side leaves the
//! whole target to the other. Hypotheses are checked and reported, never
//! assumed; when the toy parameters starve the case analysis a diagnosis
//! is returned instead of a witness.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::creature::{Creature, FamilyKind, Valuation};
use crate::error::{Error, Result};
use crate::family::{expect_family, MeasuredFamily};
use crate::node::{Letter, Node};
use crate::rational::{fmt_rat, Rational};
use crate::split::SplitWitness;

use super::stabilize::StabilizeCertificate;
use super::StarFamily;

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum StarSplit {
    Witness {
        witness: SplitWitness,
        /// normalized side sums that drove the case analysis
        side_sums: [Rational; 2],
        /// value of the creature on `r` and the threshold it was checked
        /// against
        value: Rational,
        theta: Rational,
        certificates: Vec<StabilizeCertificate>,
    },
    Diagnosis {
        reason: String,
        value: Rational,
        side_sums: [Rational; 2],
    },
}

impl StarFamily {
    /// Restriction of `t` to the letters carrying positive side valuation.
    fn support_creature(&self, t: &Creature, side: &Valuation) -> Result<Option<Creature>> {
        let payload = t.star()?;
        let retained: BTreeSet<Letter> = payload
            .p
            .iter()
            .filter(|l| !side.get_or_zero(&t.stem.child(**l)).is_zero())
            .copied()
            .collect();
        if retained.is_empty() {
            return Ok(None);
        }
        Ok(Some(self.creature(
            t.level,
            t.stem.clone(),
            payload.n,
            payload.g.clone(),
            retained,
        )?))
    }

    /// Splits `r0 + r1 >= r` on `t` at the profile's splitting threshold,
    /// norm dropping by one through stabilization.
    pub fn split_star(
        &self,
        t: &Creature,
        r: &Valuation,
        r0: &Valuation,
        r1: &Valuation,
    ) -> Result<StarSplit> {
        expect_family(t, FamilyKind::Star)?;
        self.validate_creature(t)?;
        let payload = t.star()?;
        if payload.n < 1 {
            return Err(Error::input("splitting needs norm at least one"));
        }
        let pos: BTreeSet<Node> = t.pos().into_iter().collect();
        for (val, name) in [(r, "r"), (r0, "r0"), (r1, "r1")] {
            val.check_within(&pos, name)?;
        }
        for nu in &pos {
            if r0.get_or_zero(nu) + r1.get_or_zero(nu) < r.get_or_zero(nu) {
                return Err(Error::input(format!("r0 + r1 falls below r at {nu}")));
            }
        }

        let level = t.level;
        let theta = self.profile.beta_threshold(level);
        let floor = self.profile.stabilize_threshold(level)?;
        let gain = self.profile.thresholds.stabilize_gain.clone();
        let value = self.eval(t, r)?;
        let width = self.profile.toy_width(level)?;
        let g_weight =
            crate::rational::pow2_neg(width as u64 - payload.g.len() as u64);
        let sum = |side: &Valuation| -> Rational {
            let mut acc = Rational::zero();
            for nu in &pos {
                acc += side.get_or_zero(nu);
            }
            acc * g_weight.clone()
        };
        let side_sums = [sum(r0), sum(r1)];

        if value < theta {
            return Ok(StarSplit::Diagnosis {
                reason: format!(
                    "value {} below the splitting threshold {}",
                    fmt_rat(&value),
                    fmt_rat(&theta)
                ),
                value,
                side_sums,
            });
        }

        let target = (Rational::one() - theta.clone()) * value.clone();
        let mut achieved: [Option<(Creature, Rational)>; 2] = [None, None];
        let mut certificates = Vec::new();
        let sides = [r0, r1];
        for l in 0..2 {
            if side_sums[l] < floor {
                continue;
            }
            let shrunk = match self.support_creature(t, sides[l])? {
                Some(s) => s,
                None => continue,
            };
            let stabilized =
                self.greedy_stabilize(&shrunk, &payload.g, sides[l], &gain)?;
            let reached = stabilized.certificate.value.clone();
            certificates.push(stabilized.certificate.clone());
            achieved[l] = Some((stabilized.creature, reached));
        }

        if achieved.iter().all(|a| a.is_none()) {
            return Ok(StarSplit::Diagnosis {
                reason: format!(
                    "both side sums {} and {} fall below the stabilization floor {}",
                    fmt_rat(&side_sums[0]),
                    fmt_rat(&side_sums[1]),
                    fmt_rat(&floor)
                ),
                value,
                side_sums,
            });
        }

        let reached0 = achieved[0].as_ref().map(|(_, v)| v.clone()).unwrap_or_else(Rational::zero);
        let reached1 = achieved[1].as_ref().map(|(_, v)| v.clone()).unwrap_or_else(Rational::zero);
        if reached0.clone() + reached1.clone() < target {
            return Ok(StarSplit::Diagnosis {
                reason: format!(
                    "stabilized sides reach {} + {}, short of the target {}",
                    fmt_rat(&reached0),
                    fmt_rat(&reached1),
                    fmt_rat(&target)
                ),
                value,
                side_sums,
            });
        }

        // equality witness by proportional lowering: both stabilized sides
        // keep a share of the target
        let reached_sum = reached0.clone() + reached1.clone();
        let c0 = reached0.clone() * target.clone() / reached_sum;
        let c1 = target.clone() - c0.clone();
        let witness = SplitWitness {
            s0: if c0.is_zero() {
                None
            } else {
                achieved[0].as_ref().map(|(s, _)| s.clone())
            },
            s1: if c1.is_zero() {
                None
            } else {
                achieved[1].as_ref().map(|(s, _)| s.clone())
            },
            c0,
            c1,
            target,
        };
        witness.verify(self, t, [r0, r1], &Rational::one())?;
        Ok(StarSplit::Witness {
            witness,
            side_sums,
            value,
            theta,
            certificates,
        })
    }
}
