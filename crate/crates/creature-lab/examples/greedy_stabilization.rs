//! Greedy stabilization: extend a star creature's constraint while the
//! normalized sum compounds by the gain factor, then read the certificate
//! with its exact two-sided row control.

use creature_lab::creature::Valuation;
use creature_lab::guard::Guards;
use creature_lab::node::{Letter, Node, PartialBits};
use creature_lab::rational::{fmt_rat, rat, Rational};
use creature_lab::star::{simple_toy_profile, StarFamily};
use num_traits::One;

fn main() -> creature_lab::Result<()> {
    // width-4 letters at level 1; retained: the eight letters whose
    // leading coordinate is zero
    let fam = StarFamily::new(simple_toy_profile(vec![2, 4], vec![1, 1])?, Guards::default());
    let p = fam
        .letters_extending(1, &PartialBits::new(vec![(0, false)])?)?
        .into_iter()
        .collect();
    let t = fam.creature(1, Node::new(vec![Letter::word(2, 0)]), 1, PartialBits::empty(), p)?;
    let ones = Valuation::constant(t.pos().iter(), Rational::one());

    let out = fam.greedy_stabilize(&t, &PartialBits::empty(), &ones, &rat(1, 2))?;
    let c = &out.certificate;
    println!("initial normalized sum = {}", fmt_rat(&c.initial));
    for (i, step) in c.steps.iter().enumerate() {
        println!(
            "round {}: chose {} at sum {} (target {})",
            i + 1,
            step.chosen,
            fmt_rat(&step.normalized_sum),
            fmt_rat(&step.target)
        );
    }
    println!("rounds                 = {}", c.rounds);
    println!("compounded floor       = {}", fmt_rat(&c.grown));
    println!("output constraint      = {}", out.creature.star()?.g);
    println!("output norm            = {}", out.creature.star()?.n);
    println!("output value           = {}", fmt_rat(&c.value));
    println!("rows within            = [{}, {}]", fmt_rat(&c.row_min), fmt_rat(&c.row_max));
    println!("floor claim            = {} (ok: {})", fmt_rat(&c.floor_claim), c.floor_ok);
    println!("ceiling claim          = {} (ok: {})", fmt_rat(&c.ceiling_claim), c.ceiling_ok);
    println!("step bound ok          = {}", c.step_bound_ok);
    Ok(())
}
