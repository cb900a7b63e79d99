//! Template combinatorics above single candidates: coordinate-indexed
//! systems of candidates with derived tuple systems, restriction, proper
//! extension, canonical forms, coherent names, and the bit-block covering
//! maps of cover-shaped candidates.

use std::collections::{BTreeMap, BTreeSet};

use crate::candidate::{end_extends, FiniteCandidate};
use crate::creature::FamilyKind;
use crate::error::{Error, Result};
use crate::node::Node;

/// Which family a coordinate draws its candidates from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ZFlag {
    Random,
    Star,
}

impl ZFlag {
    pub fn family(self) -> FamilyKind {
        match self {
            ZFlag::Random => FamilyKind::Random,
            ZFlag::Star => FamilyKind::Star,
        }
    }
}

impl std::fmt::Display for ZFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZFlag::Random => write!(f, "random"),
            ZFlag::Star => write!(f, "star"),
        }
    }
}

/// One choice of boundary node per coordinate processed so far.
pub type YTuple = Vec<Node>;

/// A finite system of candidates over increasing coordinate labels: the
/// first coordinate holds one candidate, each later coordinate maps every
/// tuple of the previous system to a candidate, and the tuple systems are
/// derived by appending boundary nodes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PreTemplate {
    labels: Vec<u64>,
    flags: Vec<ZFlag>,
    heights: Vec<usize>,
    first: FiniteCandidate,
    later: Vec<BTreeMap<YTuple, FiniteCandidate>>,
    y: Vec<Vec<YTuple>>,
}

impl PreTemplate {
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn flags(&self) -> &[ZFlag] {
        &self.flags
    }

    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn first_candidate(&self) -> &FiniteCandidate {
        &self.first
    }

    pub fn later_candidates(&self) -> &[BTreeMap<YTuple, FiniteCandidate>] {
        &self.later
    }

    /// The tuple system at coordinate index `i`.
    pub fn y_system(&self, i: usize) -> &[YTuple] {
        &self.y[i]
    }

    /// The final tuple system.
    pub fn y_star(&self) -> &[YTuple] {
        self.y.last().expect("at least one coordinate")
    }

    /// The candidate at coordinate index `i` under the tuple `prefix` of
    /// choices at coordinates below `i`.
    pub fn candidate_at(&self, i: usize, prefix: &[Node]) -> Option<&FiniteCandidate> {
        if i == 0 {
            Some(&self.first)
        } else {
            self.later[i - 1].get(prefix)
        }
    }
}

fn family_matches(c: &FiniteCandidate, flag: ZFlag) -> bool {
    match c.family() {
        None => true,
        Some(kind) => kind == flag.family(),
    }
}

/// Builds and validates a pre-template. The later-coordinate maps must be
/// keyed by exactly the derived tuple systems, and every candidate must
/// carry its coordinate's declared height and family.
pub fn build_pretemplate(
    labels: Vec<u64>,
    flags: Vec<ZFlag>,
    heights: Vec<usize>,
    first: FiniteCandidate,
    later: Vec<BTreeMap<YTuple, FiniteCandidate>>,
) -> Result<PreTemplate> {
    if labels.is_empty() {
        return Err(Error::input("a pre-template needs at least one coordinate"));
    }
    if !labels.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::input("coordinate labels must increase strictly"));
    }
    if flags.len() != labels.len() || heights.len() != labels.len() {
        return Err(Error::input("labels, flags and heights must have equal length"));
    }
    if later.len() + 1 != labels.len() {
        return Err(Error::input(format!(
            "{} coordinates need {} later maps, got {}",
            labels.len(),
            labels.len() - 1,
            later.len()
        )));
    }
    if first.height() != heights[0] {
        return Err(Error::input(format!(
            "first candidate has height {}, coordinate declares {}",
            first.height(),
            heights[0]
        )));
    }
    if !family_matches(&first, flags[0]) {
        return Err(Error::input("first candidate's family differs from its flag"));
    }

    let mut y: Vec<Vec<YTuple>> = Vec::with_capacity(labels.len());
    y.push(first.boundary().map(|n| vec![n.clone()]).collect());
    for (i, map) in later.iter().enumerate() {
        let coord = i + 1;
        let expected: BTreeSet<&YTuple> = y[i].iter().collect();
        for key in map.keys() {
            if !expected.contains(key) {
                return Err(Error::input(format!(
                    "coordinate {coord} holds a candidate at a tuple outside the derived system"
                )));
            }
        }
        let mut next = Vec::new();
        for tuple in &y[i] {
            let c = map.get(tuple).ok_or_else(|| {
                Error::input(format!(
                    "coordinate {coord} is missing the candidate at one of its tuples"
                ))
            })?;
            if c.height() != heights[coord] {
                return Err(Error::input(format!(
                    "candidate at coordinate {coord} has height {}, declared {}",
                    c.height(),
                    heights[coord]
                )));
            }
            if !family_matches(c, flags[coord]) {
                return Err(Error::input(format!(
                    "candidate at coordinate {coord} contradicts its family flag"
                )));
            }
            for leaf in c.boundary() {
                let mut t = tuple.clone();
                t.push(leaf.clone());
                next.push(t);
            }
        }
        next.sort();
        y.push(next);
    }
    Ok(PreTemplate {
        labels,
        flags,
        heights,
        first,
        later,
        y,
    })
}

/// Coordinates with label below `bound` survive; labels are sorted, so the
/// restriction is a prefix of the template. Restricting away the first
/// coordinate is an error.
pub fn restrict_template(t: &PreTemplate, bound: u64) -> Result<PreTemplate> {
    let keep = t.labels.iter().take_while(|&&l| l < bound).count();
    if keep == 0 {
        return Err(Error::input(format!(
            "restriction below {bound} drops every coordinate"
        )));
    }
    Ok(PreTemplate {
        labels: t.labels[..keep].to_vec(),
        flags: t.flags[..keep].to_vec(),
        heights: t.heights[..keep].to_vec(),
        first: t.first.clone(),
        later: t.later[..keep - 1].to_vec(),
        y: t.y[..keep].to_vec(),
    })
}

/// Truncates each entry of a tuple over `large`'s coordinates down to
/// `small`'s coordinates and heights.
fn restrict_tuple(tuple: &[Node], small: &PreTemplate, large: &PreTemplate) -> YTuple {
    let mut out = Vec::new();
    for (i, node) in tuple.iter().enumerate() {
        if let Some(j) = small.labels.iter().position(|&l| l == large.labels[i]) {
            out.push(node.prefix(small.heights[j]));
        }
    }
    out
}

/// Decides whether `large` properly extends `small`: labels contained with
/// pointwise larger heights and matching flags, and every candidate of
/// `small` end-extended by the corresponding candidate of `large`, the
/// arguments restricted through the tuple systems.
pub fn properly_extends(small: &PreTemplate, large: &PreTemplate) -> bool {
    for (j, label) in small.labels.iter().enumerate() {
        match large.labels.iter().position(|l| l == label) {
            None => return false,
            Some(i) => {
                if small.heights[j] > large.heights[i] || small.flags[j] != large.flags[i] {
                    return false;
                }
            }
        }
    }

    for (i, label) in large.labels.iter().enumerate() {
        let Some(j) = small.labels.iter().position(|l| l == label) else {
            continue;
        };
        let prefixes: Vec<YTuple> = if i == 0 {
            vec![Vec::new()]
        } else {
            large.y[i - 1].clone()
        };
        for prefix in &prefixes {
            let Some(big) = large.candidate_at(i, prefix) else {
                return false;
            };
            let small_candidate = if j == 0 {
                Some(&small.first)
            } else {
                let restricted = restrict_tuple(prefix, small, large);
                let arg = restricted[..j].to_vec();
                if !small.y[j - 1].contains(&arg) {
                    return false;
                }
                small.candidate_at(j, &arg)
            };
            match small_candidate {
                Some(c) => {
                    if !end_extends(c, big) {
                        return false;
                    }
                }
                None => return false,
            }
        }
    }
    true
}

/// Relabels the coordinates to 0..n, preserving order; flags, heights,
/// candidates and tuple systems are carried unchanged.
pub fn canonical_form(t: &PreTemplate) -> PreTemplate {
    PreTemplate {
        labels: (0..t.labels.len() as u64).collect(),
        flags: t.flags.clone(),
        heights: t.heights.clone(),
        first: t.first.clone(),
        later: t.later.clone(),
        y: t.y.clone(),
    }
}

/// Order-isomorphism of pre-templates: equal canonical forms.
pub fn isomorphic(a: &PreTemplate, b: &PreTemplate) -> bool {
    canonical_form(a) == canonical_form(b)
}

/// A proper-extension chain of pre-templates with a coherent bit-string
/// name per final tuple: the level-n names have length n, and restricting
/// a tuple one level down restricts its name to a proper prefix.
#[derive(Clone, Debug)]
pub struct NamedPrefix {
    pub templates: Vec<PreTemplate>,
    pub names: Vec<BTreeMap<YTuple, Vec<bool>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixViolation {
    pub index: usize,
    pub clause: String,
}

/// Validates a named prefix, reporting one violation per failing index and
/// tuple.
pub fn validate_named_prefix(p: &NamedPrefix) -> Vec<PrefixViolation> {
    let mut out = Vec::new();
    if p.templates.len() != p.names.len() {
        out.push(PrefixViolation {
            index: 0,
            clause: "templates and name tables differ in length".into(),
        });
        return out;
    }
    for (n, (t, names)) in p.templates.iter().zip(&p.names).enumerate() {
        let tuples: BTreeSet<&YTuple> = t.y_star().iter().collect();
        for tuple in &tuples {
            match names.get(*tuple) {
                None => out.push(PrefixViolation {
                    index: n,
                    clause: format!("missing name for a tuple at level {n}"),
                }),
                Some(bits) if bits.len() != n => out.push(PrefixViolation {
                    index: n,
                    clause: format!("name length {} at level {n}", bits.len()),
                }),
                Some(_) => {}
            }
        }
        for key in names.keys() {
            if !tuples.contains(key) {
                out.push(PrefixViolation {
                    index: n,
                    clause: format!("name keyed at a tuple outside level {n}"),
                });
            }
        }
    }
    for n in 0..p.templates.len().saturating_sub(1) {
        let small = &p.templates[n];
        let large = &p.templates[n + 1];
        if !properly_extends(small, large) {
            out.push(PrefixViolation {
                index: n,
                clause: format!("template {} does not properly extend template {n}", n + 1),
            });
            continue;
        }
        for tuple in large.y_star() {
            let down = restrict_tuple(tuple, small, large);
            if !small.y_star().contains(&down) {
                out.push(PrefixViolation {
                    index: n,
                    clause: "restricted tuple leaves the lower tuple system".into(),
                });
                continue;
            }
            let (Some(lo), Some(hi)) = (p.names[n].get(&down), p.names[n + 1].get(tuple)) else {
                continue;
            };
            if hi.len() <= lo.len() || &hi[..lo.len()] != lo.as_slice() {
                out.push(PrefixViolation {
                    index: n,
                    clause: format!(
                        "name at level {} does not properly extend its restriction",
                        n + 1
                    ),
                });
            }
        }
    }
    out
}

/// The branch coding of a cover-shaped candidate: the root takes the empty
/// string and each node's possibilities, in letter order, take the next
/// bit block. Every retained-set size must be a power of two.
pub fn covering_map(s: &FiniteCandidate) -> Result<BTreeMap<Node, Vec<bool>>> {
    let mut out: BTreeMap<Node, Vec<bool>> = BTreeMap::new();
    out.insert(s.root().clone(), Vec::new());
    let mut stack = vec![s.root().clone()];
    while let Some(node) = stack.pop() {
        if node.len() == s.height() {
            continue;
        }
        let t = s
            .creature_at(&node)
            .ok_or_else(|| Error::input(format!("no creature at {node}")))?;
        let count = t.pos_count();
        if !count.is_power_of_two() {
            return Err(Error::input(format!(
                "retained-set size {count} at {node} is not a power of two"
            )));
        }
        let block = count.trailing_zeros() as usize;
        let base = out[&node].clone();
        for (i, child) in t.pos().into_iter().enumerate() {
            let mut code = base.clone();
            for b in (0..block).rev() {
                code.push(i >> b & 1 == 1);
            }
            out.insert(child.clone(), code);
            stack.push(child);
        }
    }
    Ok(out)
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::tests::full_binary;
    use crate::node::Letter;
    use crate::random_family::creature_r;

    fn single(label: u64, height: usize) -> PreTemplate {
        build_pretemplate(
            vec![label],
            vec![ZFlag::Random],
            vec![height],
            full_binary(0, height),
            vec![],
        )
        .unwrap()
    }

    fn pair(labels: [u64; 2]) -> PreTemplate {
        let first = full_binary(0, 1);
        let second: BTreeMap<YTuple, FiniteCandidate> = first
            .boundary()
            .map(|n| (vec![n.clone()], full_binary(0, 1)))
            .collect();
        build_pretemplate(
            labels.to_vec(),
            vec![ZFlag::Random, ZFlag::Random],
            vec![1, 1],
            first,
            vec![second],
        )
        .unwrap()
    }

    #[test]
    fn tuple_systems_multiply() {
        let t = single(5, 1);
        assert_eq!(t.y_star().len(), 2);
        let p = pair([3, 7]);
        assert_eq!(p.y_system(0).len(), 2);
        assert_eq!(p.y_star().len(), 4);
    }

    #[test]
    fn missing_argument_tuple_is_rejected() {
        let first = full_binary(0, 1);
        let mut second: BTreeMap<YTuple, FiniteCandidate> = first
            .boundary()
            .map(|n| (vec![n.clone()], full_binary(0, 1)))
            .collect();
        let dropped = second.keys().next().unwrap().clone();
        second.remove(&dropped);
        let err = build_pretemplate(
            vec![0, 1],
            vec![ZFlag::Random, ZFlag::Random],
            vec![1, 1],
            first,
            vec![second],
        );
        assert!(err.is_err());
    }

    #[test]
    fn canonical_form_and_isomorphism() {
        let a = pair([3, 7]);
        let b = pair([2, 9]);
        assert!(isomorphic(&a, &b));
        assert_eq!(canonical_form(&a), canonical_form(&canonical_form(&a)));
        assert_eq!(canonical_form(&a).labels(), &[0, 1]);

        // swapped flags break the isomorphism even with equal shapes: a
        // creature-less candidate leaves the family open, so both flags
        // build, but the canonical forms differ
        let bare = |label: u64, flag: ZFlag| {
            build_pretemplate(
                vec![label],
                vec![flag],
                vec![0],
                FiniteCandidate::from_creatures(Node::root(), 0, vec![]).unwrap(),
                vec![],
            )
            .unwrap()
        };
        assert!(isomorphic(&bare(4, ZFlag::Star), &bare(9, ZFlag::Star)));
        assert!(!isomorphic(&bare(4, ZFlag::Star), &bare(4, ZFlag::Random)));
        let c = single(5, 1);
        assert!(!isomorphic(&a, &c));
    }

    #[test]
    fn restriction_is_a_proper_prefix() {
        let t = pair([3, 7]);
        let r = restrict_template(&t, 7).unwrap();
        assert_eq!(r.labels(), &[3]);
        assert!(properly_extends(&r, &t));
        assert!(properly_extends(&t, &t));
        let all = restrict_template(&t, 100).unwrap();
        assert_eq!(&all, &t);
        assert!(restrict_template(&t, 3).is_err());
    }

    #[test]
    fn extension_sees_altered_creatures() {
        let small = single(0, 1);
        // same labels, but the candidate grew one level
        let big = build_pretemplate(
            vec![0],
            vec![ZFlag::Random],
            vec![2],
            full_binary(0, 2),
            vec![],
        )
        .unwrap();
        assert!(properly_extends(&small, &big));

        let pruned = {
            let root = Node::root();
            let only0 = [Letter::Index(0)].into_iter().collect();
            FiniteCandidate::from_creatures(
                root.clone(),
                1,
                vec![creature_r(0, root, only0).unwrap()],
            )
            .unwrap()
        };
        let altered = build_pretemplate(
            vec![0],
            vec![ZFlag::Random],
            vec![1],
            pruned,
            vec![],
        )
        .unwrap();
        assert!(!properly_extends(&small, &altered));
    }

    #[test]
    fn named_prefix_coherence() {
        let fixed = [true, false, true];
        let templates: Vec<PreTemplate> = (0..3).map(|_| pair([0, 1])).collect();
        let names: Vec<BTreeMap<YTuple, Vec<bool>>> = (0..3)
            .map(|n| {
                templates[n]
                    .y_star()
                    .iter()
                    .map(|t| (t.clone(), fixed[..n].to_vec()))
                    .collect()
            })
            .collect();
        let good = NamedPrefix {
            templates: templates.clone(),
            names,
        };
        assert!(validate_named_prefix(&good).is_empty());

        // flipping a level-1 name breaks its extension by level 2 (the
        // level-0 names are empty, so the lower pair stays coherent)
        let mut bad = good.clone();
        let key = bad.templates[1].y_star()[0].clone();
        bad.names[1].insert(key, vec![!fixed[0]]);
        let violations = validate_named_prefix(&bad);
        assert!(violations.iter().any(|v| v.index == 1 && v.clause.contains("extend")));
    }

    #[test]
    fn star_cover_blocks_are_two_bits() {
        use crate::guard::Guards;
        use crate::star::{simple_toy_profile, StarFamily};
        let fam = StarFamily::new(
            simple_toy_profile(vec![2], vec![1]).unwrap(),
            Guards::default(),
        );
        let p = fam
            .letters_extending(0, &crate::node::PartialBits::empty())
            .unwrap()
            .into_iter()
            .collect();
        let t = fam
            .creature(0, Node::root(), 0, crate::node::PartialBits::empty(), p)
            .unwrap();
        let s = FiniteCandidate::from_creatures(Node::root(), 1, vec![t]).unwrap();
        let map = covering_map(&s).unwrap();
        let codes: BTreeSet<String> = s.boundary().map(|n| bits_to_string(&map[n])).collect();
        let expect: BTreeSet<String> =
            ["00", "01", "10", "11"].into_iter().map(String::from).collect();
        assert_eq!(codes, expect);
    }

    #[test]
    fn odd_block_sizes_are_rejected() {
        use crate::guard::Guards;
        use crate::star::{simple_toy_profile, StarFamily};
        let fam = StarFamily::new(
            simple_toy_profile(vec![2], vec![1]).unwrap(),
            Guards::default(),
        );
        let letters: Vec<_> = fam
            .letters_extending(0, &crate::node::PartialBits::empty())
            .unwrap();
        let p = letters.into_iter().take(3).collect();
        let t = fam
            .creature(0, Node::root(), 0, crate::node::PartialBits::empty(), p)
            .unwrap();
        let s = FiniteCandidate::from_creatures(Node::root(), 1, vec![t]).unwrap();
        assert!(covering_map(&s).is_err());
    }

    #[test]
    fn covering_map_blocks() {
        let s = full_binary(0, 2);
        let map = covering_map(&s).unwrap();
        for leaf in s.boundary() {
            let code = &map[leaf];
            assert_eq!(code.len(), 2);
            // the code of a binary leaf is its own letter sequence
            let expect: Vec<bool> = leaf.letters().iter().map(|l| l.bit(0)).collect();
            assert_eq!(code, &expect);
        }
        // boundary codes are pairwise distinct and cover the full block
        let codes: BTreeSet<_> = s.boundary().map(|l| map[l].clone()).collect();
        assert_eq!(codes.len(), 4);
    }
}
