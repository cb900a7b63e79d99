//! Template combinatorics: build a two-coordinate pre-template, take its
//! canonical form and restriction, attach coherent names, and code a
//! cover's branches into bit blocks.

use std::collections::BTreeMap;

use creature_lab::candidate::FiniteCandidate;
use creature_lab::gen::full_binary_candidate;
use creature_lab::guard::Guards;
use creature_lab::node::{Node, PartialBits};
use creature_lab::star::{simple_toy_profile, StarFamily};
use creature_lab::templates::{
    bits_to_string, build_pretemplate, canonical_form, covering_map, isomorphic,
    properly_extends, restrict_template, validate_named_prefix, NamedPrefix, YTuple, ZFlag,
};

fn main() -> creature_lab::Result<()> {
    let first = full_binary_candidate(0, 1);
    let second: BTreeMap<YTuple, FiniteCandidate> = first
        .boundary()
        .map(|n| (vec![n.clone()], full_binary_candidate(0, 1)))
        .collect();
    let t = build_pretemplate(
        vec![3, 7],
        vec![ZFlag::Random, ZFlag::Random],
        vec![1, 1],
        first,
        vec![second],
    )?;
    println!("coordinates  = {:?}", t.labels());
    println!("final tuples = {}", t.y_star().len());

    let c = canonical_form(&t);
    println!("canonical labels = {:?}", c.labels());
    println!("isomorphic to itself relabeled = {}", isomorphic(&t, &c));

    let r = restrict_template(&t, 7)?;
    println!(
        "restriction below 7 keeps {:?}, properly extended = {}",
        r.labels(),
        properly_extends(&r, &t)
    );

    // a coherent name chain: every level reads one more bit of a fixed word
    let fixed = [true, false, true];
    let chain: Vec<_> = (0..3).map(|_| t.clone()).collect();
    let names = (0..3)
        .map(|n| {
            chain[n]
                .y_star()
                .iter()
                .map(|tuple| (tuple.clone(), fixed[..n].to_vec()))
                .collect()
        })
        .collect();
    let prefix = NamedPrefix {
        templates: chain,
        names,
    };
    println!("named prefix violations = {}", validate_named_prefix(&prefix).len());

    // star cover: widen a candidate and code its branches
    let fam = StarFamily::new(simple_toy_profile(vec![2], vec![1])?, Guards::default());
    let g = PartialBits::new(vec![(0, false)])?;
    let pruned = fam.creature(0, Node::root(), 0, g, {
        let one = fam.letters_extending(0, &PartialBits::new(vec![(0, false)])?)?;
        [one[0]].into_iter().collect()
    })?;
    let s = FiniteCandidate::from_creatures(Node::root(), 1, vec![pruned])?;
    let cover = fam.cover(&s)?;
    println!(
        "cover widened the root from 1 to {} letters",
        cover.creature_at(&Node::root()).unwrap().pos_count()
    );
    let map = covering_map(&cover)?;
    for leaf in cover.boundary() {
        println!("  {leaf} -> {}", bits_to_string(&map[leaf]));
    }
    Ok(())
}
