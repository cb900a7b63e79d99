//! Amalgamation: given a candidate, an antichain `B` and a replacement
//! part per `B`-node, produce either a sub-candidate avoiding `B` or one
//! meeting `B` in a front with a controlled measure loss.
//!
//! The construction runs a downward induction seeded at a front made of
//! `B` and the boundary: at each internal node the padded valuation `r*`
//! is split once to separate the dead side from the live side and once
//! more to split the live side between the avoiding and the hitting
//! trees. Every claimed bound is re-verified by direct backward induction
//! before a result is emitted; when a split is infeasible under the given
//! schedule the offending node is reported instead.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::candidate::{end_extends, validate_candidate, FiniteCandidate};
use crate::creature::{Creature, Valuation};
use crate::error::{Error, Result};
use crate::family::MeasuredFamily;
use crate::guard::Guards;
use crate::measure::{mval, MeasureMap};
use crate::node::Node;
use crate::rational::{default_schedule, fmt_rat, pow2_neg, Rational};
use crate::split::beta_split;

/// Per-level loss schedule for the downward induction.
#[derive(Clone, Debug)]
pub enum Schedule {
    /// the double-exponential default 2^(1-2^l)
    Default,
    /// a constant loss per level, for toy runs at shallow levels
    Constant(Rational),
    /// an explicit table, clamped at its last entry
    Table(Vec<Rational>),
}

impl Schedule {
    pub fn at(&self, level: usize) -> Rational {
        match self {
            Schedule::Default => default_schedule(level),
            Schedule::Constant(c) => c.clone(),
            Schedule::Table(v) => {
                if v.is_empty() {
                    default_schedule(level)
                } else {
                    v[level.min(v.len() - 1)].clone()
                }
            }
        }
    }
}

/// One replacement part: a candidate rooted at a `B`-node together with
/// its boundary valuation.
#[derive(Clone, Debug)]
pub struct Part {
    pub candidate: FiniteCandidate,
    pub valuation: Valuation,
}

#[derive(Clone, Debug)]
pub enum AmalgamCase {
    /// a sub-candidate disjoint from `B`
    Avoiding {
        candidate: FiniteCandidate,
        valuation: Valuation,
        claimed: Rational,
        verified_root: Rational,
    },
    /// a sub-candidate meeting `B` in one of its fronts, the parts grafted
    Hitting {
        candidate: FiniteCandidate,
        valuation: Valuation,
        claimed: Rational,
        verified_root: Rational,
        front: Vec<Node>,
    },
}

#[derive(Clone, Debug)]
pub struct HypothesisCheck {
    pub label: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct AmalgamReport {
    pub case: AmalgamCase,
    pub r0_root: Rational,
    pub r1_root: Rational,
    /// the bound the two roots' sum was driven toward
    pub sum_target: Rational,
    /// the case-two bar (1 - 2^-k0) times the root measure
    pub case_two_bar: Rational,
    pub hypotheses: Vec<HypothesisCheck>,
}

struct NodeData {
    r0: Rational,
    r1: Rational,
    s0: Option<Creature>,
    s1: Option<Creature>,
}

struct Amalgamator<'a> {
    family: &'a dyn MeasuredFamily,
    p: &'a FiniteCandidate,
    f: &'a Valuation,
    parts: &'a BTreeMap<Node, Part>,
    schedule: &'a Schedule,
    eps: &'a Rational,
    guards: &'a Guards,
    measures: MeasureMap,
    front: BTreeSet<Node>,
    in_b: BTreeSet<Node>,
    part_measure: BTreeMap<Node, Rational>,
}

impl Amalgamator<'_> {
    /// Product of (1 - 3 * schedule(l)) for l in [from, k), clamped at 0.
    fn damping(&self, from: usize) -> Rational {
        let mut acc = Rational::one();
        for level in from..self.p.height() {
            let factor = Rational::one() - Rational::from_integer(3.into()) * self.schedule.at(level);
            if factor <= Rational::zero() {
                return Rational::zero();
            }
            acc *= factor;
        }
        acc
    }

    fn threshold_bound(&self, node: &Node) -> Rational {
        self.measures.get(node).cloned().unwrap_or_else(Rational::zero)
            * (Rational::one() - self.eps.clone())
            * self.damping(node.len())
    }

    fn seed(&self, node: &Node) -> NodeData {
        if self.in_b.contains(node) {
            NodeData {
                r0: Rational::zero(),
                r1: self.part_measure[node].clone(),
                s0: None,
                s1: None,
            }
        } else {
            NodeData {
                r0: self.f.get_or_zero(node),
                r1: Rational::zero(),
                s0: None,
                s1: None,
            }
        }
    }

    fn induce(&self, node: &Node, data: &BTreeMap<Node, NodeData>) -> Result<NodeData> {
        let level = node.len();
        if self.threshold_bound(node) < self.schedule.at(level) {
            return Ok(NodeData {
                r0: Rational::zero(),
                r1: Rational::zero(),
                s0: None,
                s1: None,
            });
        }
        let t = self
            .p
            .creature_at(node)
            .ok_or_else(|| Error::input(format!("no creature at {node}")))?;
        let theta = self.schedule.at(level);
        let drop = Rational::one();
        let pos = t.pos();

        let sums: BTreeMap<Node, Rational> = pos
            .iter()
            .map(|nu| {
                let d = &data[nu];
                (nu.clone(), d.r0.clone() + d.r1.clone())
            })
            .collect();

        if level + 1 == self.p.height() || pos.iter().all(|nu| self.front.contains(nu)) {
            // every successor is seeded: one split separates the sides
            let r: Valuation = sums
                .iter()
                .map(|(n, v)| (n.clone(), v.clone().min(Rational::one())))
                .collect();
            let r0: Valuation = pos
                .iter()
                .map(|nu| (nu.clone(), data[nu].r0.clone()))
                .collect();
            let r1: Valuation = pos
                .iter()
                .map(|nu| (nu.clone(), data[nu].r1.clone()))
                .collect();
            let report = beta_split(self.family, t, &r, &r0, &r1, &theta, &drop, self.guards)?;
            let witness = report.witness.ok_or_else(|| {
                Error::infeasible(format!("split infeasible at {node} under the schedule"))
            })?;
            return Ok(NodeData {
                r0: witness.c0,
                r1: witness.c1,
                s0: witness.s0,
                s1: witness.s1,
            });
        }

        // pad dead successors with the next level's schedule value
        let pad = self.schedule.at(level + 1);
        let star: Valuation = pos
            .iter()
            .map(|nu| {
                let s = &sums[nu];
                let v = if s.is_zero() { pad.clone() } else { s.clone().min(Rational::one()) };
                (nu.clone(), v)
            })
            .collect();
        let dead: Valuation = star.restrict(|n| sums[n].is_zero());
        let live: Valuation = star.restrict(|n| !sums[n].is_zero());
        let first = beta_split(self.family, t, &star, &dead, &live, &theta, &drop, self.guards)?;
        let w1 = first.witness.ok_or_else(|| {
            Error::infeasible(format!("side separation infeasible at {node}"))
        })?;
        let live_creature = match (w1.c1.is_zero(), w1.s1) {
            (false, Some(s)) => s,
            _ => {
                return Err(Error::infeasible(format!(
                    "no live-side creature at {node} under the schedule"
                )))
            }
        };

        let live_pos: BTreeSet<Node> = live_creature.pos().into_iter().collect();
        let r: Valuation = star.restrict(|n| live_pos.contains(n));
        let r0: Valuation = pos
            .iter()
            .filter(|nu| live_pos.contains(*nu))
            .map(|nu| (nu.clone(), data[nu].r0.clone()))
            .collect();
        let r1: Valuation = pos
            .iter()
            .filter(|nu| live_pos.contains(*nu))
            .map(|nu| (nu.clone(), data[nu].r1.clone()))
            .collect();
        let second = beta_split(
            self.family,
            &live_creature,
            &r,
            &r0,
            &r1,
            &theta,
            &drop,
            self.guards,
        )?;
        let w2 = second.witness.ok_or_else(|| {
            Error::infeasible(format!("live-side split infeasible at {node}"))
        })?;
        Ok(NodeData {
            r0: w2.c0,
            r1: w2.c1,
            s0: w2.s0,
            s1: w2.s1,
        })
    }

    /// Assembles the side tree: follow the side creatures until the seeded
    /// front, grafting parts on the hitting side.
    fn build(
        &self,
        side: usize,
        data: &BTreeMap<Node, NodeData>,
    ) -> Result<(FiniteCandidate, Valuation, Vec<Node>)> {
        let mut creatures: Vec<Creature> = Vec::new();
        let mut valuation = Valuation::new();
        let mut hits = Vec::new();
        let mut stack = vec![self.p.root().clone()];
        while let Some(node) = stack.pop() {
            if self.front.contains(&node) {
                if self.in_b.contains(&node) {
                    let part = &self.parts[&node];
                    creatures.extend(part.candidate.creatures().values().cloned());
                    for b in part.candidate.boundary() {
                        valuation.insert(b.clone(), part.valuation.get_or_zero(b))?;
                    }
                    hits.push(node);
                } else {
                    valuation.insert(node.clone(), self.f.get_or_zero(&node))?;
                }
                continue;
            }
            let d = &data[&node];
            let chosen = if side == 0 { &d.s0 } else { &d.s1 };
            let chosen = chosen.as_ref().ok_or_else(|| {
                Error::infeasible(format!("side {side} has no creature at {node}"))
            })?;
            stack.extend(chosen.pos());
            creatures.push(chosen.clone());
        }
        let candidate =
            FiniteCandidate::from_creatures(self.p.root().clone(), self.p.height(), creatures)?;
        Ok((candidate, valuation, hits))
    }
}

/// Runs the amalgamation of `p` against the antichain `B` with the given
/// parts. Returns the avoiding case or the hitting case, every claim
/// re-verified, or an infeasibility diagnosis naming the blocking node.
#[allow(clippy::too_many_arguments)]
pub fn amalgamate(
    family: &dyn MeasuredFamily,
    p: &FiniteCandidate,
    f: &Valuation,
    b: &BTreeSet<Node>,
    parts: &BTreeMap<Node, Part>,
    eps: &Rational,
    schedule: &Schedule,
    guards: &Guards,
) -> Result<AmalgamReport> {
    let measures = mval(family, p, f)?;
    let root_measure = measures.root_value().clone();
    let k0 = p.root().len();
    let case_two_bar =
        (Rational::one() - pow2_neg(k0 as u64)) * root_measure.clone();

    let mut hypotheses = vec![
        HypothesisCheck {
            label: "root measure above one half".into(),
            holds: root_measure > Rational::new(1.into(), 2.into()),
            detail: fmt_rat(&root_measure),
        },
        HypothesisCheck {
            label: "root level above four".into(),
            holds: k0 > 4,
            detail: k0.to_string(),
        },
        HypothesisCheck {
            label: "eps within 2^-(1+k0)".into(),
            holds: *eps <= pow2_neg(1 + k0 as u64),
            detail: fmt_rat(eps),
        },
        HypothesisCheck {
            label: "all norms above two".into(),
            holds: p
                .creatures()
                .values()
                .all(|t| t.norm > Rational::from_integer(2.into())),
            detail: String::new(),
        },
    ];

    // trivial amalgam: nothing to avoid
    if b.is_empty() {
        return Ok(AmalgamReport {
            case: AmalgamCase::Avoiding {
                candidate: p.clone(),
                valuation: f.clone(),
                claimed: root_measure.clone(),
                verified_root: root_measure.clone(),
            },
            r0_root: root_measure.clone(),
            r1_root: Rational::zero(),
            sum_target: root_measure,
            case_two_bar,
            hypotheses,
        });
    }

    // validate the antichain and the parts
    for nu in b {
        if !p.nodes().contains(nu) {
            return Err(Error::input(format!("antichain node {nu} is not in the candidate")));
        }
        for mu in b {
            if mu != nu && (mu.is_prefix_of(nu) || nu.is_prefix_of(mu)) {
                return Err(Error::input(format!("{mu} and {nu} are comparable: not an antichain")));
            }
        }
        let part = parts
            .get(nu)
            .ok_or_else(|| Error::input(format!("no part supplied for {nu}")))?;
        if part.candidate.root() != nu {
            return Err(Error::input(format!("part at {nu} is rooted at {}", part.candidate.root())));
        }
        if part.candidate.height() != p.height() {
            return Err(Error::input(format!(
                "part at {nu} has height {}, expected {}",
                part.candidate.height(),
                p.height()
            )));
        }
        let report = validate_candidate(family, &part.candidate);
        if !report.ok() {
            return Err(Error::input(format!("part at {nu} is invalid: {}", report.violations[0])));
        }
        // a part refines the candidate below its root: tree contained,
        // creatures composing
        let within = p.subtree_at(nu)?;
        if !part.candidate.nodes().is_subset(within.nodes()) {
            return Err(Error::input(format!("part at {nu} leaves the candidate's tree")));
        }
        for (stem, c) in part.candidate.creatures() {
            let base = within
                .creature_at(stem)
                .ok_or_else(|| Error::input(format!("part creature at {stem} off the tree")))?;
            if !family.sigma_contains(base, c)? {
                return Err(Error::input(format!(
                    "part creature at {stem} is not a composition of the candidate's"
                )));
            }
        }
        part.valuation
            .check_total_on(&part.candidate.boundary_set(), &format!("part valuation at {nu}"))?;
    }
    for key in parts.keys() {
        if !b.contains(key) {
            return Err(Error::input(format!("part at {key} has no antichain node")));
        }
    }

    let mut part_measure = BTreeMap::new();
    for (nu, part) in parts {
        let m = mval(family, &part.candidate, &part.valuation)?;
        let value = m.root_value().clone();
        hypotheses.push(HypothesisCheck {
            label: format!("part at {nu} measures at least 1 - eps"),
            holds: value >= Rational::one() - eps.clone(),
            detail: fmt_rat(&value),
        });
        part_measure.insert(nu.clone(), value);
    }

    // the front: B together with the boundary nodes not beyond B
    let mut front: BTreeSet<Node> = b.clone();
    for leaf in p.boundary() {
        if !b.iter().any(|nu| nu.is_prefix_of(leaf)) {
            front.insert(leaf.clone());
        }
    }
    // nodes below the front
    let mut scope: BTreeSet<Node> = BTreeSet::new();
    for target in &front {
        for len in p.root().len()..=target.len() {
            scope.insert(target.prefix(len));
        }
    }

    let amalgamator = Amalgamator {
        family,
        p,
        f,
        parts,
        schedule,
        eps,
        guards,
        measures,
        front: front.clone(),
        in_b: b.clone(),
        part_measure,
    };

    let mut data: BTreeMap<Node, NodeData> = BTreeMap::new();
    let mut by_depth: Vec<&Node> = scope.iter().collect();
    by_depth.sort_by_key(|n| std::cmp::Reverse(n.len()));
    for node in by_depth {
        let d = if front.contains(node) {
            amalgamator.seed(node)
        } else {
            amalgamator.induce(node, &data)?
        };
        data.insert(node.clone(), d);
    }

    let root_data = &data[p.root()];
    let r0_root = root_data.r0.clone();
    let r1_root = root_data.r1.clone();
    let sum_target = amalgamator.threshold_bound(p.root());
    hypotheses.push(HypothesisCheck {
        label: "root sides cover the damped measure".into(),
        holds: r0_root.clone() + r1_root.clone() >= sum_target,
        detail: format!("{} + {}", fmt_rat(&r0_root), fmt_rat(&r1_root)),
    });

    let take_hitting = !r1_root.is_zero() && r1_root >= case_two_bar;
    let side = if take_hitting {
        1
    } else if !r0_root.is_zero() {
        0
    } else {
        return Err(Error::infeasible(
            "both sides vanish at the root under the schedule".to_string(),
        ));
    };

    let (candidate, valuation, hits) = amalgamator.build(side, &data)?;
    let verified = mval(family, &candidate, &valuation)?;
    let verified_root = verified.root_value().clone();
    let claimed = if side == 1 { r1_root.clone() } else { r0_root.clone() };
    if verified_root < claimed {
        return Err(Error::infeasible(format!(
            "re-verification found root measure {} below the claim {}",
            fmt_rat(&verified_root),
            fmt_rat(&claimed)
        )));
    }

    let case = if side == 1 {
        // structural checks: the hits are exactly B inside the tree and
        // form a front of the output; norms above them dropped by at most 2
        let inside: BTreeSet<Node> = candidate
            .nodes()
            .iter()
            .filter(|n| b.contains(*n))
            .cloned()
            .collect();
        let hit_set: BTreeSet<Node> = hits.iter().cloned().collect();
        if inside != hit_set {
            return Err(Error::infeasible("hit set differs from B inside the output"));
        }
        for leaf in candidate.boundary() {
            if !hits.iter().any(|nu| nu.is_prefix_of(leaf)) {
                return Err(Error::infeasible(format!(
                    "boundary node {leaf} misses the B-front"
                )));
            }
        }
        for (stem, c) in candidate.creatures() {
            if hits.iter().any(|nu| stem.is_strict_prefix_of(nu)) {
                let base = p.creature_at(stem).expect("within the candidate");
                if c.norm < base.norm.clone() - Rational::from_integer(2.into()) {
                    return Err(Error::infeasible(format!(
                        "norm at {stem} dropped by more than two"
                    )));
                }
            }
        }
        // grafted parts are kept verbatim
        for nu in &hits {
            let graft = candidate.subtree_at(nu)?;
            if !end_extends(&parts[nu].candidate, &graft) || graft != parts[nu].candidate {
                return Err(Error::infeasible(format!("graft at {nu} was altered")));
            }
        }
        AmalgamCase::Hitting {
            candidate,
            valuation,
            claimed,
            verified_root,
            front: hits,
        }
    } else {
        if candidate.nodes().iter().any(|n| b.contains(n)) {
            return Err(Error::infeasible("avoiding output still meets B"));
        }
        AmalgamCase::Avoiding {
            candidate,
            valuation,
            claimed,
            verified_root,
        }
    };

    Ok(AmalgamReport {
        case,
        r0_root,
        r1_root,
        sum_target,
        case_two_bar,
        hypotheses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::tests::full_binary;
    use crate::random_family::RandomFamily;
    use crate::rational::rat;

    fn ones(s: &FiniteCandidate) -> Valuation {
        Valuation::constant(s.boundary(), Rational::one())
    }

    #[test]
    fn empty_antichain_returns_the_candidate() {
        let p = full_binary(3, 5);
        let f = ones(&p);
        let report = amalgamate(
            &RandomFamily,
            &p,
            &f,
            &BTreeSet::new(),
            &BTreeMap::new(),
            &rat(1, 32),
            &Schedule::Default,
            &Guards::default(),
        )
        .unwrap();
        match report.case {
            AmalgamCase::Avoiding { candidate, .. } => assert_eq!(candidate, p),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn full_boundary_antichain_hits_in_a_front() {
        let p = full_binary(3, 4);
        let f = ones(&p);
        let b: BTreeSet<Node> = p.boundary_set();
        let parts: BTreeMap<Node, Part> = b
            .iter()
            .map(|nu| {
                let candidate =
                    FiniteCandidate::from_creatures(nu.clone(), 4, vec![]).unwrap();
                let valuation = Valuation::constant(candidate.boundary(), Rational::one());
                (nu.clone(), Part { candidate, valuation })
            })
            .collect();
        let report = amalgamate(
            &RandomFamily,
            &p,
            &f,
            &b,
            &parts,
            &rat(1, 32),
            &Schedule::Default,
            &Guards::default(),
        )
        .unwrap();
        match report.case {
            AmalgamCase::Hitting {
                front, verified_root, claimed, ..
            } => {
                assert!(!front.is_empty());
                assert!(verified_root >= claimed);
                assert!(report.r1_root >= report.case_two_bar);
            }
            other => panic!("expected the hitting case, got {other:?}"),
        }
    }

    #[test]
    fn single_deep_node_is_avoidable() {
        let p = full_binary(3, 5);
        let f = ones(&p);
        let target = p
            .nodes()
            .iter()
            .find(|n| n.len() == 4)
            .unwrap()
            .clone();
        let b: BTreeSet<Node> = [target.clone()].into_iter().collect();
        let q = p.subtree_at(&target).unwrap();
        let fq = Valuation::constant(q.boundary(), Rational::one());
        let parts: BTreeMap<Node, Part> =
            [(target.clone(), Part { candidate: q, valuation: fq })]
                .into_iter()
                .collect();
        let report = amalgamate(
            &RandomFamily,
            &p,
            &f,
            &b,
            &parts,
            &rat(1, 32),
            &Schedule::Default,
            &Guards::default(),
        )
        .unwrap();
        // with an all-ones valuation the hitting side keeps full measure,
        // so the case-two bar is met and the parts are grafted
        match &report.case {
            AmalgamCase::Hitting { candidate, front, .. } => {
                assert_eq!(front, &vec![target.clone()]);
                assert!(candidate.nodes().contains(&target));
            }
            AmalgamCase::Avoiding { candidate, .. } => {
                assert!(!candidate.nodes().contains(&target));
            }
        }
    }

    #[test]
    fn comparable_b_nodes_are_rejected() {
        let p = full_binary(3, 5);
        let f = ones(&p);
        let n4 = p.nodes().iter().find(|n| n.len() == 4).unwrap().clone();
        let n5 = p
            .nodes()
            .iter()
            .find(|n| n.len() == 5 && n4.is_prefix_of(n))
            .unwrap()
            .clone();
        let b: BTreeSet<Node> = [n4.clone(), n5.clone()].into_iter().collect();
        let parts: BTreeMap<Node, Part> = b
            .iter()
            .map(|nu| {
                let candidate = p.subtree_at(nu).unwrap();
                let valuation = Valuation::constant(candidate.boundary(), Rational::one());
                (nu.clone(), Part { candidate, valuation })
            })
            .collect();
        let err = amalgamate(
            &RandomFamily,
            &p,
            &f,
            &b,
            &parts,
            &rat(1, 32),
            &Schedule::Default,
            &Guards::default(),
        );
        assert!(matches!(err, Err(Error::Input(_))));
    }
}
