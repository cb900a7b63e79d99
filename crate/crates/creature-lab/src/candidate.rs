//! Finite candidates: uniform-height trees with a creature at every
//! internal node whose possibilities are exactly the node's successors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::creature::{Creature, FamilyKind};
use crate::error::{Error, Result};
use crate::family::MeasuredFamily;
use crate::node::Node;
use crate::rational::Rational;

/// A finite tree of fixed height with a creature at every internal node.
///
/// The node set is stored explicitly so that malformed trees can be
/// represented and reported by `validate_candidate` instead of being
/// unconstructible.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct FiniteCandidate {
    root: Node,
    height: usize,
    nodes: BTreeSet<Node>,
    creatures: BTreeMap<Node, Creature>,
}

/// One violated clause, anchored at the offending node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: Node,
    pub clause: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", self.node, self.clause)
    }
}

/// Result of validating a candidate: the violation list (empty means ok)
/// and the per-level minimum norm among the creatures of that level, the
/// finite shadow of the norm-divergence requirement on infinite trees.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub min_norm_by_level: BTreeMap<usize, Rational>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl FiniteCandidate {
    /// Builds a candidate from its creatures, deriving the node set as the
    /// closure of the root under each creature's possibilities.
    pub fn from_creatures(
        root: Node,
        height: usize,
        creatures: Vec<Creature>,
    ) -> Result<FiniteCandidate> {
        if root.len() > height {
            return Err(Error::input(format!(
                "root {root} is longer than the height {height}"
            )));
        }
        let by_stem: BTreeMap<Node, Creature> = creatures
            .into_iter()
            .map(|c| (c.stem.clone(), c))
            .collect();
        let mut nodes = BTreeSet::new();
        let mut frontier = vec![root.clone()];
        while let Some(node) = frontier.pop() {
            if !nodes.insert(node.clone()) {
                continue;
            }
            if node.len() == height {
                continue;
            }
            let creature = by_stem.get(&node).ok_or_else(|| {
                Error::input(format!("internal node {node} has no creature"))
            })?;
            for child in creature.pos() {
                frontier.push(child);
            }
        }
        let creatures = by_stem
            .into_iter()
            .filter(|(stem, _)| nodes.contains(stem) && stem.len() < height)
            .collect();
        Ok(FiniteCandidate {
            root,
            height,
            nodes,
            creatures,
        })
    }

    /// Builds a candidate from an explicit node set; nothing is checked
    /// beyond basic containment, so `validate_candidate` can report on it.
    pub fn from_raw_parts(
        root: Node,
        height: usize,
        nodes: BTreeSet<Node>,
        creatures: BTreeMap<Node, Creature>,
    ) -> FiniteCandidate {
        FiniteCandidate {
            root,
            height,
            nodes,
            creatures,
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn nodes(&self) -> &BTreeSet<Node> {
        &self.nodes
    }

    pub fn creatures(&self) -> &BTreeMap<Node, Creature> {
        &self.creatures
    }

    pub fn creature_at(&self, node: &Node) -> Option<&Creature> {
        self.creatures.get(node)
    }

    /// Nodes of maximal length; on a valid candidate these all sit at the
    /// height.
    pub fn boundary(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.len() == self.height)
    }

    pub fn boundary_set(&self) -> BTreeSet<Node> {
        self.boundary().cloned().collect()
    }

    pub fn internal(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.len() < self.height)
    }

    /// Family shared by the creatures; `None` on a creature-less candidate
    /// (a legal height-zero candidate is root-only).
    pub fn family(&self) -> Option<FamilyKind> {
        self.creatures.values().next().map(|c| c.family())
    }

    /// Children of `node` inside the stored node set. Descendants sort
    /// contiguously after their ancestor, so a range scan suffices.
    pub fn successors(&self, node: &Node) -> BTreeSet<Node> {
        self.nodes
            .range((std::ops::Bound::Excluded(node.clone()), std::ops::Bound::Unbounded))
            .take_while(|m| node.is_prefix_of(m))
            .filter(|m| m.len() == node.len() + 1)
            .cloned()
            .collect()
    }

    /// The candidate cut off at level `upto` (root level <= upto <= height).
    pub fn truncate(&self, upto: usize) -> Result<FiniteCandidate> {
        if upto < self.root.len() || upto > self.height {
            return Err(Error::input(format!(
                "truncation level {upto} outside [{}, {}]",
                self.root.len(),
                self.height
            )));
        }
        Ok(FiniteCandidate {
            root: self.root.clone(),
            height: upto,
            nodes: self.nodes.iter().filter(|n| n.len() <= upto).cloned().collect(),
            creatures: self
                .creatures
                .iter()
                .filter(|(n, _)| n.len() < upto)
                .map(|(n, c)| (n.clone(), c.clone()))
                .collect(),
        })
    }

    /// The sub-candidate rooted at `node`, keeping the height.
    pub fn subtree_at(&self, node: &Node) -> Result<FiniteCandidate> {
        if !self.nodes.contains(node) {
            return Err(Error::input(format!("{node} is not a node of the candidate")));
        }
        Ok(FiniteCandidate {
            root: node.clone(),
            height: self.height,
            nodes: self
                .nodes
                .iter()
                .filter(|m| node.is_prefix_of(m))
                .cloned()
                .collect(),
            creatures: self
                .creatures
                .iter()
                .filter(|(m, _)| node.is_prefix_of(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        })
    }
}

/// Checks the candidate clauses: tree closure above the root, uniform
/// boundary height, successor sets equal to the creatures' possibilities,
/// stem/level agreement, and per-family payload invariants. Reports every
/// violation with the offending node, plus the per-level minimum norm.
pub fn validate_candidate(
    family: &dyn MeasuredFamily,
    s: &FiniteCandidate,
) -> ValidationReport {
    let mut violations = Vec::new();
    let mut min_norm: BTreeMap<usize, Rational> = BTreeMap::new();

    if !s.nodes.contains(&s.root) {
        violations.push(Violation {
            node: s.root.clone(),
            clause: "root missing from the node set".into(),
        });
    }
    if s.root.len() > s.height {
        violations.push(Violation {
            node: s.root.clone(),
            clause: format!("root longer than the height {}", s.height),
        });
    }

    for node in &s.nodes {
        if !s.root.is_prefix_of(node) {
            violations.push(Violation {
                node: node.clone(),
                clause: "node does not extend the root".into(),
            });
            continue;
        }
        if node.len() > s.height {
            violations.push(Violation {
                node: node.clone(),
                clause: format!("node deeper than the height {}", s.height),
            });
        }
        if node.len() > s.root.len() {
            if let Some(parent) = node.parent() {
                if !s.nodes.contains(&parent) {
                    violations.push(Violation {
                        node: node.clone(),
                        clause: "initial segment missing (tree not closed)".into(),
                    });
                }
            }
        }
        let succ = s.successors(node);
        if succ.is_empty() && node.len() != s.height {
            violations.push(Violation {
                node: node.clone(),
                clause: format!("maximal node not at level {} (max(S) not at level m)", s.height),
            });
        }
        if node.len() < s.height {
            match s.creatures.get(node) {
                None => violations.push(Violation {
                    node: node.clone(),
                    clause: "internal node has no creature".into(),
                }),
                Some(t) => {
                    if t.stem != *node {
                        violations.push(Violation {
                            node: node.clone(),
                            clause: format!("creature stem {} differs from its node", t.stem),
                        });
                    }
                    if t.level != node.len() {
                        violations.push(Violation {
                            node: node.clone(),
                            clause: format!("creature level {} differs from node length", t.level),
                        });
                    }
                    if t.family() != family.kind() {
                        violations.push(Violation {
                            node: node.clone(),
                            clause: format!(
                                "creature family {} differs from {}",
                                t.family(),
                                family.kind()
                            ),
                        });
                    } else if let Err(e) = family.validate_creature(t) {
                        violations.push(Violation {
                            node: node.clone(),
                            clause: e.to_string(),
                        });
                    }
                    let pos: BTreeSet<Node> = t.pos().into_iter().collect();
                    if pos != succ {
                        violations.push(Violation {
                            node: node.clone(),
                            clause: "successors differ from the creature's possibilities".into(),
                        });
                    }
                    min_norm
                        .entry(node.len())
                        .and_modify(|m| {
                            if t.norm < *m {
                                *m = t.norm.clone();
                            }
                        })
                        .or_insert_with(|| t.norm.clone());
                }
            }
        } else if s.creatures.contains_key(node) {
            violations.push(Violation {
                node: node.clone(),
                clause: "boundary node carries a creature".into(),
            });
        }
    }

    for stem in s.creatures.keys() {
        if !s.nodes.contains(stem) {
            violations.push(Violation {
                node: stem.clone(),
                clause: "creature keyed at a node outside the tree".into(),
            });
        }
    }

    ValidationReport {
        violations,
        min_norm_by_level: min_norm,
    }
}

/// End-extension: equal roots, the taller tree contains the shorter one,
/// and the creatures agree on the shorter tree's internal nodes.
pub fn end_extends(s0: &FiniteCandidate, s1: &FiniteCandidate) -> bool {
    if s0.root != s1.root || s1.height < s0.height {
        return false;
    }
    if !s0.nodes.is_subset(&s1.nodes) {
        return false;
    }
    s0.creatures
        .iter()
        .all(|(node, c)| s1.creatures.get(node) == Some(c))
}
