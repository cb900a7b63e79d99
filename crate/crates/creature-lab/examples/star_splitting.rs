//! Star-family splitting through the two-stabilization case analysis: an
//! all-ones valuation split along the leading letter bit yields two
//! creatures with complementary constraints sharing the target.

use creature_lab::creature::Valuation;
use creature_lab::guard::Guards;
use creature_lab::node::{Letter, Node, PartialBits};
use creature_lab::rational::{fmt_rat, rat, Rational};
use creature_lab::star::split::StarSplit;
use creature_lab::star::{toy_profile, StarFamily, Thresholds};
use num_traits::One;

fn main() -> creature_lab::Result<()> {
    let profile = toy_profile(
        vec![2, 4],
        vec![vec![2; 8], vec![4; 8]],
        vec![1, 1],
        Thresholds {
            beta: None,
            stabilize_threshold: Some(rat(1, 4)),
            stabilize_gain: rat(1, 8),
        },
    )?;
    let fam = StarFamily::new(profile, Guards::default());
    let p = fam.letters_extending(1, &PartialBits::empty())?.into_iter().collect();
    let t = fam.creature(1, Node::new(vec![Letter::word(2, 0)]), 1, PartialBits::empty(), p)?;

    let ones = Valuation::constant(t.pos().iter(), Rational::one());
    let by_bit = |want: bool| {
        ones.restrict(|nu| nu.last().map(|l| l.bit(0) == want).unwrap_or(false))
    };
    match fam.split_star(&t, &ones, &by_bit(false), &by_bit(true))? {
        StarSplit::Witness {
            witness,
            side_sums,
            value,
            theta,
            ..
        } => {
            println!("value            = {}", fmt_rat(&value));
            println!("theta            = {}", fmt_rat(&theta));
            println!(
                "side sums        = {} and {}",
                fmt_rat(&side_sums[0]),
                fmt_rat(&side_sums[1])
            );
            println!("c0 + c1          = {} + {}", fmt_rat(&witness.c0), fmt_rat(&witness.c1));
            let s0 = witness.s0.expect("side zero");
            let s1 = witness.s1.expect("side one");
            println!("side constraints = {} and {}", s0.star()?.g, s1.star()?.g);
            println!("side norms       = {} and {}", s0.star()?.n, s1.star()?.n);
        }
        StarSplit::Diagnosis { reason, .. } => println!("diagnosis: {reason}"),
    }
    Ok(())
}
