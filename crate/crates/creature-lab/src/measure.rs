//! Backward-induction measures on finite candidates.
//!
//! Given a boundary valuation, the measure of a node is the averaging
//! value of its successors' measures, computed by downward induction from
//! the boundary. Level fronts approximate the measure of a condition:
//! any front lies below some level front, and front refinement makes level
//! values a lower bound.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::candidate::{validate_candidate, FiniteCandidate};
use crate::creature::Valuation;
use crate::error::{Error, Result};
use crate::family::MeasuredFamily;
use crate::node::Node;
use crate::rational::{check_unit, special_floor, Rational};

/// Exact node-by-node measure of a candidate under a boundary valuation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MeasureMap {
    entries: BTreeMap<Node, Rational>,
    root: Node,
}

impl MeasureMap {
    pub fn get(&self, node: &Node) -> Option<&Rational> {
        self.entries.get(node)
    }

    pub fn root_value(&self) -> &Rational {
        &self.entries[&self.root]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Node, &Rational)> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &BTreeMap<Node, Rational> {
        &self.entries
    }

    pub fn into_entries(self) -> BTreeMap<Node, Rational> {
        self.entries
    }
}

fn require_valid(family: &dyn MeasuredFamily, s: &FiniteCandidate) -> Result<()> {
    let report = validate_candidate(family, s);
    if !report.ok() {
        return Err(Error::input(format!(
            "invalid candidate: {}",
            report
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    Ok(())
}

/// Downward induction: boundary nodes take the valuation, internal nodes
/// take the averaging value of their successors' entries.
pub fn mval(
    family: &dyn MeasuredFamily,
    s: &FiniteCandidate,
    f: &Valuation,
) -> Result<MeasureMap> {
    require_valid(family, s)?;
    f.check_total_on(&s.boundary_set(), "boundary valuation")?;
    mval_unchecked(family, s, f)
}

/// The recursion itself, callers having already validated candidate and
/// valuation.
pub(crate) fn mval_unchecked(
    family: &dyn MeasuredFamily,
    s: &FiniteCandidate,
    f: &Valuation,
) -> Result<MeasureMap> {
    let mut entries: BTreeMap<Node, Rational> = BTreeMap::new();
    let mut by_depth: Vec<&Node> = s.nodes().iter().collect();
    by_depth.sort_by_key(|n| std::cmp::Reverse(n.len()));
    for node in by_depth {
        if node.len() == s.height() {
            let v = f.get_or_zero(node);
            check_unit(&v, &format!("boundary valuation at {node}"))?;
            entries.insert(node.clone(), v);
        } else {
            let t = s
                .creature_at(node)
                .ok_or_else(|| Error::input(format!("no creature at {node}")))?;
            let succ: Valuation = t
                .pos()
                .into_iter()
                .map(|child| {
                    let v = entries
                        .get(&child)
                        .cloned()
                        .expect("children evaluated before parents");
                    (child, v)
                })
                .collect();
            entries.insert(node.clone(), family.eval(t, &succ)?);
        }
    }
    Ok(MeasureMap {
        entries,
        root: s.root().clone(),
    })
}

/// Root measure of the all-ones valuation on the level-`upto` front: the
/// finite approximant of the measure of a condition.
pub fn front_value(
    family: &dyn MeasuredFamily,
    s: &FiniteCandidate,
    upto: usize,
) -> Result<Rational> {
    require_valid(family, s)?;
    let cut = s.truncate(upto)?;
    let ones = Valuation::constant(cut.boundary(), Rational::one());
    Ok(mval_unchecked(family, &cut, &ones)?.root_value().clone())
}

/// Verdict of comparing a node assignment against the averaging of its
/// successors at every internal node.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SemiMeasureVerdict {
    /// equality at every internal node
    Exact,
    /// dominated at every internal node, strictly somewhere
    Semi,
    /// some internal node exceeds the averaging of its successors
    Neither,
}

impl std::fmt::Display for SemiMeasureVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SemiMeasureVerdict::Exact => write!(f, "exact"),
            SemiMeasureVerdict::Semi => write!(f, "semi"),
            SemiMeasureVerdict::Neither => write!(f, "neither"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SemiMeasureReport {
    pub verdict: SemiMeasureVerdict,
    /// internal nodes where the assignment is strictly below the averaging
    pub strict_nodes: Vec<Node>,
    /// internal nodes where the assignment exceeds the averaging
    pub excess_nodes: Vec<Node>,
}

/// Decides whether `mu` is a semi-measure (never exceeding the averaging
/// of its successors), an exact measure (equality everywhere), or neither.
pub fn check_semi_measure(
    family: &dyn MeasuredFamily,
    s: &FiniteCandidate,
    mu: &BTreeMap<Node, Rational>,
) -> Result<SemiMeasureReport> {
    require_valid(family, s)?;
    for node in s.nodes() {
        let v = mu
            .get(node)
            .ok_or_else(|| Error::input(format!("assignment is missing an entry at {node}")))?;
        check_unit(v, &format!("assignment at {node}"))?;
    }
    let mut strict = Vec::new();
    let mut excess = Vec::new();
    for node in s.internal() {
        let t = s.creature_at(node).expect("validated");
        let succ: Valuation = t
            .pos()
            .into_iter()
            .map(|child| {
                let v = mu[&child].clone();
                (child, v)
            })
            .collect();
        let avg = family.eval(t, &succ)?;
        let here = &mu[node];
        if *here < avg {
            strict.push(node.clone());
        } else if *here > avg {
            excess.push(node.clone());
        }
    }
    let verdict = if !excess.is_empty() {
        SemiMeasureVerdict::Neither
    } else if strict.is_empty() {
        SemiMeasureVerdict::Exact
    } else {
        SemiMeasureVerdict::Semi
    };
    Ok(SemiMeasureReport {
        verdict,
        strict_nodes: strict,
        excess_nodes: excess,
    })
}

/// Finds a node whose measure entry reaches `1 - eps`, preferring maximal
/// length and then the lexicographically least node. Returns `None` when no
/// node qualifies, which is possible at finite scale.
pub fn find_large_node(
    family: &dyn MeasuredFamily,
    s: &FiniteCandidate,
    f: &Valuation,
    eps: &Rational,
) -> Result<Option<(Node, Rational)>> {
    if eps <= &Rational::zero() || eps >= &Rational::one() {
        return Err(Error::input("eps must lie strictly between 0 and 1"));
    }
    let measures = mval(family, s, f)?;
    let bar = Rational::one() - eps;
    let mut best: Option<(Node, Rational)> = None;
    for (node, value) in measures.iter() {
        if *value >= bar {
            let better = match &best {
                None => true,
                Some((bn, _)) => {
                    node.len() > bn.len() || (node.len() == bn.len() && node < bn)
                }
            };
            if better {
                best = Some((node.clone(), value.clone()));
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct ClassifyReport {
    /// every measure entry is positive
    pub normal: bool,
    /// every entry at a length-l node clears 2^(-2^(l+1))
    pub special: bool,
    /// nodes with a zero entry
    pub zero_nodes: Vec<Node>,
    /// nodes falling below the special floor
    pub below_floor: Vec<(Node, Rational)>,
}

/// Classifies a candidate as normal and/or special under a boundary
/// valuation, listing the witnesses of failure per node.
pub fn classify_candidate(
    family: &dyn MeasuredFamily,
    s: &FiniteCandidate,
    f: &Valuation,
) -> Result<ClassifyReport> {
    let measures = mval(family, s, f)?;
    let mut zero_nodes = Vec::new();
    let mut below_floor = Vec::new();
    for (node, value) in measures.iter() {
        if value.is_zero() {
            zero_nodes.push(node.clone());
        }
        if *value < special_floor(node.len()) {
            below_floor.push((node.clone(), value.clone()));
        }
    }
    Ok(ClassifyReport {
        normal: zero_nodes.is_empty(),
        special: below_floor.is_empty(),
        zero_nodes,
        below_floor,
    })
}
