//! The JSON interchange formats: candidates, valuations, creatures and
//! profiles as versioned documents with rationals as exact `p/q` strings.

use creature_lab::creature::Valuation;
use creature_lab::gen::full_binary_candidate;
use creature_lab::json::{
    candidate_from_doc, candidate_to_doc, valuation_from_doc, valuation_to_doc,
};
use creature_lab::rational::rat;

fn main() -> creature_lab::Result<()> {
    let s = full_binary_candidate(0, 2);
    let mut f = Valuation::new();
    for (i, leaf) in s.boundary().enumerate() {
        f.insert(leaf.clone(), rat(i as i64, 4))?;
    }

    let cdoc = candidate_to_doc(&s);
    let vdoc = valuation_to_doc(&f);
    let ctext = serde_json::to_string_pretty(&cdoc).expect("serialize");
    let vtext = serde_json::to_string_pretty(&vdoc).expect("serialize");
    println!("candidate document:\n{ctext}\n");
    println!("valuation document:\n{vtext}\n");

    let back = candidate_from_doc(&serde_json::from_str(&ctext).expect("parse"))?;
    let fback = valuation_from_doc(&serde_json::from_str(&vtext).expect("parse"))?;
    println!("candidate round-trips: {}", back == s);
    println!("valuation round-trips: {}", fback == f);
    Ok(())
}
