//! Amalgamation: against an antichain of replacement points, produce
//! either a sub-candidate avoiding it or one meeting it in a front with a
//! controlled measure loss — every claim re-verified by direct backward
//! induction before being returned.

use std::collections::{BTreeMap, BTreeSet};

use creature_lab::amalgam::{amalgamate, AmalgamCase, Part, Schedule};
use creature_lab::creature::Valuation;
use creature_lab::gen::full_binary_candidate;
use creature_lab::guard::Guards;
use creature_lab::node::Node;
use creature_lab::random_family::RandomFamily;
use creature_lab::rational::{fmt_rat, rat, Rational};
use num_traits::One;

fn main() -> creature_lab::Result<()> {
    let p = full_binary_candidate(5, 7);
    let f = Valuation::constant(p.boundary(), Rational::one());

    // hitting case: the whole boundary with full-measure parts
    let b: BTreeSet<Node> = p.boundary_set();
    let parts: BTreeMap<Node, Part> = b
        .iter()
        .map(|nu| {
            let candidate = p.subtree_at(nu).expect("subtree");
            let valuation = Valuation::constant(candidate.boundary(), Rational::one());
            (nu.clone(), Part { candidate, valuation })
        })
        .collect();
    let out = amalgamate(
        &RandomFamily,
        &p,
        &f,
        &b,
        &parts,
        &rat(1, 64),
        &Schedule::Default,
        &Guards::default(),
    )?;
    println!("antichain = the whole boundary:");
    println!("  r0 root = {}", fmt_rat(&out.r0_root));
    println!("  r1 root = {}", fmt_rat(&out.r1_root));
    println!("  bar     = {}", fmt_rat(&out.case_two_bar));
    match &out.case {
        AmalgamCase::Hitting { claimed, verified_root, front, .. } => {
            println!("  case    = hitting, front of {} nodes", front.len());
            println!("  claimed = {}, re-verified = {}", fmt_rat(claimed), fmt_rat(verified_root));
        }
        AmalgamCase::Avoiding { .. } => println!("  case    = avoiding"),
    }

    // avoiding case: a single deep node
    let target = p.nodes().iter().find(|n| n.len() == 6).unwrap().clone();
    let b: BTreeSet<Node> = [target.clone()].into_iter().collect();
    let parts: BTreeMap<Node, Part> = b
        .iter()
        .map(|nu| {
            let candidate = p.subtree_at(nu).expect("subtree");
            let valuation = Valuation::constant(candidate.boundary(), Rational::one());
            (nu.clone(), Part { candidate, valuation })
        })
        .collect();
    let out = amalgamate(
        &RandomFamily,
        &p,
        &f,
        &b,
        &parts,
        &rat(1, 64),
        &Schedule::Default,
        &Guards::default(),
    )?;
    println!("antichain = one node at level 6:");
    println!("  r0 root = {}", fmt_rat(&out.r0_root));
    println!("  r1 root = {}", fmt_rat(&out.r1_root));
    match &out.case {
        AmalgamCase::Avoiding { claimed, verified_root, candidate, .. } => {
            println!("  case    = avoiding ({} nodes kept)", candidate.nodes().len());
            println!("  claimed = {}, re-verified = {}", fmt_rat(claimed), fmt_rat(verified_root));
            println!("  avoided = {}", !candidate.nodes().contains(&target));
        }
        AmalgamCase::Hitting { .. } => println!("  case    = hitting"),
    }
    Ok(())
}
