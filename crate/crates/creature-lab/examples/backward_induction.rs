//! Backward-induction measures on a finite candidate: build a height-2
//! binary tree, evaluate a boundary valuation, read off front values and
//! the normal/special classification.

use creature_lab::creature::Valuation;
use creature_lab::gen::full_binary_candidate;
use creature_lab::measure::{classify_candidate, front_value, mval};
use creature_lab::node::{Letter, Node};
use creature_lab::random_family::{dyadic_oracle, RandomFamily};
use creature_lab::rational::{fmt_rat, Rational};
use num_traits::{One, Zero};

fn main() -> creature_lab::Result<()> {
    let s = full_binary_candidate(0, 2);
    let mut f = Valuation::constant(s.boundary(), Rational::one());
    f.insert(
        Node::new(vec![Letter::Index(0), Letter::Index(0)]),
        Rational::zero(),
    )?;

    let m = mval(&RandomFamily, &s, &f)?;
    println!("boundary valuation: ones with one dead leaf");
    for (node, value) in m.iter() {
        println!("  measure({node}) = {}", fmt_rat(value));
    }
    println!("root measure       = {}", fmt_rat(m.root_value()));
    println!("direct dyadic sum  = {}", fmt_rat(&dyadic_oracle(&s, &f)?));

    for level in 0..=2 {
        println!(
            "front value at level {level} = {}",
            fmt_rat(&front_value(&RandomFamily, &s, level)?)
        );
    }

    let class = classify_candidate(&RandomFamily, &s, &f)?;
    println!("normal  = {}", class.normal);
    println!("special = {} (floors 2^-2^(len+1) per node)", class.special);
    Ok(())
}
