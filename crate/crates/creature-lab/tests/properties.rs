//! Property tests and independent brute-force oracles.
//!
//! The oracles here re-derive results along a second route: the averaging
//! transfer is recomputed with raw loops over constraint extensions, and
//! the amalgamation's avoiding case is compared against an exhaustive
//! search over all sub-candidates. Neither oracle shares code with the
//! implementation path it checks.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use creature_lab::amalgam::{amalgamate, AmalgamCase, Part, Schedule};
use creature_lab::candidate::FiniteCandidate;
use creature_lab::creature::{Creature, Valuation};
use creature_lab::family::MeasuredFamily;
use creature_lab::gen::{rand_star_candidate, rand_unit};
use creature_lab::guard::Guards;
use creature_lab::measure::{classify_candidate, mval};
use creature_lab::node::{Letter, Node, PartialBits};
use creature_lab::random_family::{creature_r, dyadic_oracle, sigma_r, RandomFamily};
use creature_lab::rational::{pow2_neg, rat, Rational};
use creature_lab::search::{specialize_search, SpecializeOutcome};
use creature_lab::star::transfer::{TransferInstance, TransferMode};
use creature_lab::star::{simple_toy_profile, StarFamily, toy_profile, Thresholds};

fn letters01() -> [Letter; 2] {
    [Letter::Index(0), Letter::Index(1)]
}

/// Builds a binary candidate from a shape word: each internal node reads
/// its subset choice from the stream.
fn candidate_from_choices(root_level: usize, height: usize, choices: &[u8]) -> FiniteCandidate {
    let root = Node::new(vec![Letter::Index(0); root_level]);
    let mut creatures = Vec::new();
    let mut frontier = vec![root.clone()];
    let mut at = 0usize;
    for level in root_level..height {
        let mut next = Vec::new();
        for n in &frontier {
            let pick = choices.get(at).copied().unwrap_or(2) % 3;
            at += 1;
            let p: BTreeSet<Letter> = match pick {
                0 => [Letter::Index(0)].into(),
                1 => [Letter::Index(1)].into(),
                _ => letters01().into(),
            };
            let c = creature_r(level, n.clone(), p).unwrap();
            next.extend(c.pos());
            creatures.push(c);
        }
        frontier = next;
    }
    FiniteCandidate::from_creatures(root, height, creatures).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The recursion agrees with the direct dyadic sum on arbitrary shapes
    /// and valuations.
    #[test]
    fn oracle_equivalence(
        root_level in 0usize..2,
        extra in 1usize..4,
        choices in proptest::collection::vec(0u8..3, 0..40),
        nums in proptest::collection::vec(0u32..=16, 0..40),
    ) {
        let s = candidate_from_choices(root_level, root_level + extra, &choices);
        let mut f = Valuation::new();
        for (i, leaf) in s.boundary().enumerate() {
            let num = nums.get(i).copied().unwrap_or(16);
            f.insert(leaf.clone(), rat(num as i64, 16)).unwrap();
        }
        let m = mval(&RandomFamily, &s, &f).unwrap();
        prop_assert_eq!(m.root_value(), &dyadic_oracle(&s, &f).unwrap());
    }

    /// Pointwise monotonicity of the recursion in the boundary valuation.
    #[test]
    fn measure_monotone(
        choices in proptest::collection::vec(0u8..3, 0..12),
        lows in proptest::collection::vec(0u32..=8, 0..20),
        slacks in proptest::collection::vec(0u32..=8, 0..20),
    ) {
        let s = candidate_from_choices(0, 3, &choices);
        let mut f0 = Valuation::new();
        let mut f1 = Valuation::new();
        for (i, leaf) in s.boundary().enumerate() {
            let low = rat(lows.get(i).copied().unwrap_or(0) as i64, 8);
            let slack = rat(slacks.get(i).copied().unwrap_or(0) as i64, 8);
            let high = (low.clone() + slack).min(Rational::one());
            f0.insert(leaf.clone(), low).unwrap();
            f1.insert(leaf.clone(), high).unwrap();
        }
        let m0 = mval(&RandomFamily, &s, &f0).unwrap();
        let m1 = mval(&RandomFamily, &s, &f1).unwrap();
        for (node, value) in m0.iter() {
            prop_assert!(value <= m1.get(node).unwrap());
        }
    }

    /// Exact positive homogeneity of the recursion.
    #[test]
    fn measure_scales(
        choices in proptest::collection::vec(0u8..3, 0..12),
        nums in proptest::collection::vec(0u32..=8, 0..20),
        b_num in 0u32..=8,
    ) {
        let s = candidate_from_choices(0, 3, &choices);
        let b = rat(b_num as i64, 8);
        let mut f = Valuation::new();
        let mut bf = Valuation::new();
        for (i, leaf) in s.boundary().enumerate() {
            let v = rat(nums.get(i).copied().unwrap_or(0) as i64, 8);
            f.insert(leaf.clone(), v.clone()).unwrap();
            bf.insert(leaf.clone(), b.clone() * v).unwrap();
        }
        let m = mval(&RandomFamily, &s, &f).unwrap();
        let mb = mval(&RandomFamily, &s, &bf).unwrap();
        for (node, value) in m.iter() {
            prop_assert_eq!(mb.get(node).unwrap(), &(b.clone() * value.clone()));
        }
    }

    /// Composition transitivity of the binary family, driven by arbitrary
    /// retained sets.
    #[test]
    fn sigma_transitive(level in 0usize..3, mask in 1u32..4) {
        let p: BTreeSet<Letter> = letters01()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, l)| l)
            .collect();
        let t = creature_r(level, Node::new(vec![Letter::Index(0); level]), p).unwrap();
        for s in sigma_r(&t).unwrap() {
            for u in sigma_r(&s).unwrap() {
                prop_assert!(RandomFamily.sigma_contains(&t, &u).unwrap());
            }
        }
    }
}

/// Raw re-computation of the averaging value: minimum over constraint
/// extensions of the normalized sum, by direct loops over packed letters.
fn raw_star_value(
    width: u8,
    budget: u64,
    g: &[(u8, bool)],
    values: &BTreeMap<u32, Rational>,
) -> Rational {
    let free: Vec<u8> = (0..width)
        .filter(|c| g.iter().all(|(d, _)| d != c))
        .collect();
    let mut best: Option<Rational> = None;
    let mut subsets: Vec<Vec<u8>> = vec![vec![]];
    for size in 1..=(budget as usize).min(free.len()) {
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((start, prefix)) = stack.pop() {
            if prefix.len() == size {
                subsets.push(prefix);
                continue;
            }
            for (i, coord) in free.iter().enumerate().skip(start) {
                let mut next = prefix.clone();
                next.push(*coord);
                stack.push((i + 1, next));
            }
        }
    }
    for u in subsets {
        for assignment in 0..(1u32 << u.len()) {
            let mut pins: Vec<(u8, bool)> = g.to_vec();
            for (j, &coord) in u.iter().enumerate() {
                pins.push((coord, assignment >> j & 1 == 1));
            }
            let mut sum = Rational::zero();
            for (bits, v) in values {
                let fits = pins
                    .iter()
                    .all(|&(c, b)| (bits >> (width - 1 - c)) & 1 == u32::from(b));
                if fits {
                    sum += v.clone();
                }
            }
            let value = sum * pow2_neg(width as u64 - pins.len() as u64);
            best = Some(match best {
                None => value,
                Some(b) => b.min(value),
            });
        }
    }
    best.expect("at least the bare constraint")
}

fn packed(letter: &Letter) -> u32 {
    match *letter {
        Letter::Word { bits, .. } => bits,
        Letter::Index(i) => i as u32,
    }
}

/// The transfer bound cross-checked against a fully independent brute
/// force over all compositions and indices.
#[test]
fn transfer_bound_matches_brute_force() {
    // the cap bounds constraints by two coordinates, matching the oracle's
    // pin enumeration below
    let fam = StarFamily::new(
        toy_profile(
            vec![2, 4],
            vec![vec![2, 2], vec![2, 2]],
            vec![1, 1],
            Thresholds::default(),
        )
        .unwrap(),
        Guards::default(),
    );
    let stem = Node::new(vec![Letter::word(2, 0)]);
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let letters = fam.letters_extending(1, &PartialBits::empty()).unwrap();
    for case in 0..6 {
        let keep = 3 + case % 2;
        let p: BTreeSet<Letter> = letters.iter().take(keep).copied().collect();
        let t = fam
            .creature(1, stem.clone(), 1, PartialBits::empty(), p.clone())
            .unwrap();
        let pos = t.pos();
        let gamma = rat(7, 8);
        let y_size = 2usize;
        // r and u drawn together so the averaging hypothesis holds:
        // u_nu(y) >= gamma * r_nu for every y
        let mut r = Valuation::new();
        let mut u: BTreeMap<Node, Vec<Rational>> = BTreeMap::new();
        for nu in &pos {
            let base = rand_unit(&mut rng, 8);
            r.insert(nu.clone(), base.clone()).unwrap();
            let mut per_index = Vec::new();
            for _ in 0..y_size {
                let floor = gamma.clone() * base.clone();
                let slack = rand_unit(&mut rng, 8) * (Rational::one() - floor.clone());
                per_index.push(floor + slack);
            }
            u.insert(nu.clone(), per_index);
        }
        let inst = TransferInstance {
            creature: t.clone(),
            r: r.clone(),
            gamma: gamma.clone(),
            y_size,
            u: u.clone(),
        };
        let report = fam
            .transfer_bound(&inst, TransferMode::Plain, &Rational::one())
            .unwrap();
        assert!(report.hypothesis_avg.iter().all(|(_, ok)| *ok));

        // independent oracle: enumerate compositions as raw triples
        // (norm, pins, retained subset) and evaluate with raw loops
        let width = 4u8;
        let budget = 1u64;
        let keep: Vec<u32> = p.iter().map(packed).collect();
        let mut best_per_y = vec![Rational::zero(); y_size];
        let all_pins = {
            let mut pins = vec![vec![]];
            for coord in 0..width {
                for bit in [false, true] {
                    pins.push(vec![(coord, bit)]);
                }
            }
            let mut two = Vec::new();
            for a in 0..width {
                for b in (a + 1)..width {
                    for ba in [false, true] {
                        for bb in [false, true] {
                            two.push(vec![(a, ba), (b, bb)]);
                        }
                    }
                }
            }
            pins.extend(two);
            pins
        };
        for pins in &all_pins {
            let compatible: Vec<u32> = keep
                .iter()
                .copied()
                .filter(|bits| {
                    pins.iter()
                        .all(|&(c, b)| (bits >> (width - 1 - c)) & 1 == u32::from(b))
                })
                .collect();
            if compatible.is_empty() {
                continue;
            }
            for mask in 1u32..(1 << compatible.len()) {
                let retained: Vec<u32> = compatible
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &b)| b)
                    .collect();
                // norms 0 and 1 both stay within the drop budget
                for y in 0..y_size {
                    let values: BTreeMap<u32, Rational> = retained
                        .iter()
                        .map(|&bits| {
                            let nu = stem.child(Letter::word(width, bits));
                            (bits, u[&nu][y].clone())
                        })
                        .collect();
                    let v = raw_star_value(width, budget, pins, &values);
                    if v > best_per_y[y] {
                        best_per_y[y] = v;
                    }
                }
            }
        }
        assert_eq!(report.best, best_per_y, "case {case}");
        let rhs: Rational =
            best_per_y.iter().cloned().sum::<Rational>() / rat(y_size as i64, 1);
        assert_eq!(report.rhs, rhs);
    }
}

/// Every sub-candidate of `p`, enumerated exhaustively: each internal node
/// replaced by any of its compositions, the tree following the choices.
fn all_subcandidates(p: &FiniteCandidate) -> Vec<FiniteCandidate> {
    fn dfs(
        p: &FiniteCandidate,
        pending: &mut Vec<Node>,
        chosen: &mut Vec<Creature>,
        results: &mut Vec<FiniteCandidate>,
    ) {
        let node = loop {
            match pending.pop() {
                None => {
                    results.push(
                        FiniteCandidate::from_creatures(
                            p.root().clone(),
                            p.height(),
                            chosen.clone(),
                        )
                        .unwrap(),
                    );
                    return;
                }
                Some(n) if n.len() == p.height() => continue,
                Some(n) => break n,
            }
        };
        let t = p.creature_at(&node).unwrap();
        for s in sigma_r(t).unwrap() {
            let mark = pending.len();
            pending.extend(s.pos());
            chosen.push(s);
            dfs(p, pending, chosen, results);
            chosen.pop();
            pending.truncate(mark);
        }
        pending.push(node);
    }

    let mut results = Vec::new();
    let mut pending = vec![p.root().clone()];
    let mut chosen = Vec::new();
    dfs(p, &mut pending, &mut chosen, &mut results);
    results
}

/// The amalgamation's emitted case checked against an exhaustive search
/// over all sub-candidates: the avoiding case never claims more than the
/// best avoiding sub-candidate achieves, and its own claim re-verifies.
#[test]
fn amalgam_case_matches_exhaustive_search() {
    let fam = RandomFamily;
    let g = Guards::default();
    let p = {
        // full binary rooted at level 5 with height 7: high enough for the
        // default schedule to bite
        let root_level = 5;
        let height = 7;
        let both: BTreeSet<Letter> = letters01().into();
        let root = Node::new(vec![Letter::Index(0); root_level]);
        let mut creatures = Vec::new();
        let mut frontier = vec![root.clone()];
        for level in root_level..height {
            let mut next = Vec::new();
            for n in &frontier {
                let c = creature_r(level, n.clone(), both.clone()).unwrap();
                next.extend(c.pos());
                creatures.push(c);
            }
            frontier = next;
        }
        FiniteCandidate::from_creatures(root, height, creatures).unwrap()
    };
    let f = Valuation::constant(p.boundary(), Rational::one());
    let target: Node = p.nodes().iter().find(|n| n.len() == 6).unwrap().clone();
    let b: BTreeSet<Node> = [target.clone()].into_iter().collect();
    let parts: BTreeMap<Node, Part> = [(target.clone(), {
        let candidate = p.subtree_at(&target).unwrap();
        let valuation = Valuation::constant(candidate.boundary(), Rational::one());
        Part { candidate, valuation }
    })]
    .into_iter()
    .collect();

    let out = amalgamate(&fam, &p, &f, &b, &parts, &rat(1, 128), &Schedule::Default, &g)
        .expect("amalgam");

    // exhaustive oracle: the best avoiding sub-candidate measure
    let mut best_avoiding = Rational::zero();
    for sub in all_subcandidates(&p) {
        if sub.nodes().contains(&target) {
            continue;
        }
        let fv = f.restrict(|n| sub.boundary_set().contains(n));
        let m = mval(&fam, &sub, &fv).unwrap();
        if m.root_value() > &best_avoiding {
            best_avoiding = m.root_value().clone();
        }
    }
    assert!(best_avoiding > Rational::zero());

    match &out.case {
        AmalgamCase::Avoiding {
            claimed,
            verified_root,
            candidate,
            valuation,
        } => {
            assert!(!candidate.nodes().contains(&target));
            let recomputed = mval(&fam, candidate, valuation).unwrap();
            assert_eq!(&recomputed.root_value().clone(), verified_root);
            assert!(claimed <= &best_avoiding, "claim beyond the exhaustive optimum");
        }
        AmalgamCase::Hitting { claimed, verified_root, .. } => {
            assert!(verified_root >= claimed);
            // the hitting bar was met; the avoiding optimum exists too
            assert!(out.r1_root >= out.case_two_bar);
        }
    }
}

/// A star candidate that only specializes after shrinking a retained set:
/// the dead letter's boundary entry breaks the floor, dropping it restores
/// every floor.
#[test]
fn star_specialization_prunes_the_dead_letter() {
    let fam = StarFamily::new(
        toy_profile(
            vec![2],
            vec![vec![2]],
            vec![1],
            Thresholds::default(),
        )
        .unwrap(),
        Guards::default(),
    );
    let letters = fam.letters_extending(0, &PartialBits::empty()).unwrap();
    let p: BTreeSet<Letter> = letters.iter().copied().collect();
    let t = fam
        .creature(0, Node::root(), 0, PartialBits::empty(), p)
        .unwrap();
    let s = FiniteCandidate::from_creatures(Node::root(), 1, vec![t]).unwrap();
    let dead = Node::new(vec![Letter::parse_word("11").unwrap()]);
    let f: Valuation = s
        .boundary()
        .map(|n| {
            let v = if n == &dead { Rational::zero() } else { Rational::one() };
            (n.clone(), v)
        })
        .collect();
    assert!(!classify_candidate(&fam, &s, &f).unwrap().special);
    match specialize_search(&fam, &s, &f, &Rational::zero(), &Guards::default()).unwrap() {
        SpecializeOutcome::Found { candidate, report, .. } => {
            assert!(report.special);
            assert!(!candidate.boundary_set().contains(&dead));
        }
        other => panic!("expected a special sub-candidate, got {other:?}"),
    }
}

/// Star candidates generated at random validate and keep exact front
/// monotonicity, mirroring the randomized acceptance sweeps.
#[test]
fn random_star_candidates_behave() {
    let fam = StarFamily::new(
        simple_toy_profile(vec![2, 2, 2], vec![1, 1, 1]).unwrap(),
        Guards::default(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..40 {
        let s = rand_star_candidate(&fam, &mut rng, 0, 2, 3).unwrap();
        let report = creature_lab::candidate::validate_candidate(&fam, &s);
        assert!(report.ok(), "{:?}", report.violations);
        let f = creature_lab::gen::rand_valuation(&mut rng, &s, 8);
        let m = mval(&fam, &s, &f).unwrap();
        assert!(m.root_value() >= &Rational::zero() && m.root_value() <= &Rational::one());
    }
}
