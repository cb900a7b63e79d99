//! The paper-exact parameter profile: cap tables growing by a certified
//! integer increment, letter widths as tight powers of two. The numbers
//! explode double-exponentially, so bit lengths are reported.

use creature_lab::star::paper_profile;

fn main() -> creature_lab::Result<()> {
    let p = paper_profile(3, 8)?;
    for (k, row) in p.cap.iter().enumerate() {
        println!("level {k} (budget {}):", p.budget[k]);
        for (i, value) in row.iter().enumerate() {
            if value.bits() <= 64 {
                println!("  cap[{k}][{i}] = {value}");
            } else {
                println!("  cap[{k}][{i}] = <{} bits>", value.bits());
            }
        }
        let width = &p.width[k];
        if width.bits() <= 64 {
            println!("  width      = {width}");
        } else {
            println!("  width      = 2^{}", width.bits() - 1);
        }
    }
    println!();
    for line in &p.increment_certificate {
        println!("{line}");
    }
    Ok(())
}
