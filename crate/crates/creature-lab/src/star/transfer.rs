//! Averaging transfer: bounding the average of per-index best values
//! against the creature's own value.
//!
//! An instance carries a finite index set and, per possibility, a unit
//! value per index whose average dominates `gamma` times the possibility's
//! valuation. The plain mode takes, per index, the best composition value
//! within the norm-drop budget; the bit-split mode additionally pins one
//! letter coordinate per index. Strong finitarity turns the bounds'
//! suprema into maxima over the composition enumeration; the report
//! computes both sides exactly and never asserts the inequality.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::creature::{Creature, FamilyKind, Valuation};
use crate::error::{Error, Result};
use crate::family::{expect_family, MeasuredFamily};
use crate::node::Node;
use crate::rational::{beta_threshold, fmt_rat, pow2_neg, rat_int, Rational};

use super::StarFamily;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TransferMode {
    /// one best value per index
    Plain,
    /// indices paired with a pinned letter coordinate and bit
    BitSplit,
}

/// A transfer instance: creature, valuation, the factor `gamma`, the index
/// count, and the per-possibility unit values. In bit-split mode the index
/// set is the product of `y_size` base indices with the letter coordinates,
/// stored base-major.
#[derive(Clone, Debug)]
pub struct TransferInstance {
    pub creature: Creature,
    pub r: Valuation,
    pub gamma: Rational,
    pub y_size: usize,
    pub u: BTreeMap<Node, Vec<Rational>>,
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    pub mode: TransferMode,
    /// the creature's value on `r`
    pub value: Rational,
    /// per possibility: the averaging hypothesis gamma * r * |Y| <= sum u
    pub hypothesis_avg: Vec<(Node, bool)>,
    /// the size hypothesis gamma * value >= 2^(-6 * 2^k), recorded only
    pub hypothesis_size: bool,
    /// left side gamma * value * (1 - 2^(-2^k))
    pub lhs: Rational,
    /// right side: the average of the per-index best values
    pub rhs: Rational,
    pub holds: bool,
    /// the per-index best values, flattened in index order
    pub best: Vec<Rational>,
    /// compositions inspected
    pub inspected: u64,
}

impl StarFamily {
    /// Computes the transfer report for `inst` with the given norm drop.
    pub fn transfer_bound(
        &self,
        inst: &TransferInstance,
        mode: TransferMode,
        drop: &Rational,
    ) -> Result<TransferReport> {
        let t = &inst.creature;
        expect_family(t, FamilyKind::Star)?;
        self.validate_creature(t)?;
        let width = self.profile.toy_width(t.level)? as usize;
        if inst.y_size == 0 {
            return Err(Error::input("the index set must be nonempty"));
        }
        let slots = match mode {
            TransferMode::Plain => inst.y_size,
            TransferMode::BitSplit => inst.y_size * width,
        };
        let pos = t.pos();
        for nu in &pos {
            let row = inst
                .u
                .get(nu)
                .ok_or_else(|| Error::input(format!("missing unit values at {nu}")))?;
            if row.len() != slots {
                return Err(Error::input(format!(
                    "unit values at {nu} hold {} entries, expected {slots}",
                    row.len()
                )));
            }
            for v in row {
                crate::rational::check_unit(v, &format!("unit value at {nu}"))?;
            }
        }
        crate::rational::check_unit(&inst.gamma, "gamma")?;

        let value = self.eval(t, &inst.r)?;
        let y_total = rat_int(slots as i64);
        let hypothesis_avg: Vec<(Node, bool)> = pos
            .iter()
            .map(|nu| {
                let total: Rational = inst.u[nu].iter().cloned().sum();
                let need = inst.gamma.clone() * inst.r.get_or_zero(nu) * y_total.clone();
                (nu.clone(), total >= need)
            })
            .collect();
        let hypothesis_size =
            inst.gamma.clone() * value.clone() >= pow2_neg(6 * (1u64 << t.level));

        // enumerate the admissible compositions once
        let floor = t.norm.clone() - drop.clone();
        let compositions: Vec<Creature> = self
            .sigma(t)?
            .into_iter()
            .filter(|s| s.norm >= floor)
            .collect();
        let mut inspected = 0u64;

        let slot_valuation = |slot: usize| -> Valuation {
            pos.iter()
                .map(|nu| (nu.clone(), inst.u[nu][slot].clone()))
                .collect()
        };

        let mut best = Vec::with_capacity(slots);
        match mode {
            TransferMode::Plain => {
                for slot in 0..slots {
                    let uy = slot_valuation(slot);
                    let mut top = Rational::zero();
                    for s in &compositions {
                        inspected += 1;
                        let v = self.eval(s, &uy.restrict(|n| s.pos().contains(n)))?;
                        if v > top {
                            top = v;
                        }
                    }
                    best.push(top);
                }
            }
            TransferMode::BitSplit => {
                for y0 in 0..inst.y_size {
                    for y1 in 0..width {
                        let slot = y0 * width + y1;
                        let uy = slot_valuation(slot);
                        for bit in [false, true] {
                            let mut top = Rational::zero();
                            for s in &compositions {
                                if !s
                                    .letters()
                                    .iter()
                                    .all(|l| l.bit(y1 as u8) == bit)
                                {
                                    continue;
                                }
                                inspected += 1;
                                let v =
                                    self.eval(s, &uy.restrict(|n| s.pos().contains(n)))?;
                                if v > top {
                                    top = v;
                                }
                            }
                            best.push(top);
                        }
                    }
                }
            }
        }

        let count = rat_int(best.len() as i64);
        let rhs: Rational = best.iter().cloned().sum::<Rational>() / count;
        let lhs = inst.gamma.clone() * value.clone()
            * (Rational::one() - beta_threshold(t.level));
        let holds = lhs <= rhs;
        Ok(TransferReport {
            mode,
            value,
            hypothesis_avg,
            hypothesis_size,
            lhs,
            rhs,
            holds,
            best,
            inspected,
        })
    }
}

impl TransferReport {
    pub fn summary(&self) -> String {
        format!(
            "lhs {} {} rhs {}",
            fmt_rat(&self.lhs),
            if self.holds { "<=" } else { ">" },
            fmt_rat(&self.rhs)
        )
    }
}
