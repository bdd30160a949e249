//! The same run in f64 and in exact rationals. On small graphs the float
//! path agrees to within rounding.

use streammatch::gen::gen_planted;
use streammatch::waterfill::Water;
use streammatch::{run_multipass, run_multipass_exact, PassConfig};

fn main() -> streammatch::Result<()> {
    let g = gen_planted(12, 0.3, 5)?;
    let cfg = PassConfig::new(3);
    let fast = run_multipass(&g.stream, &cfg)?;
    let exact = run_multipass_exact(&g.stream, &cfg)?;
    let mut worst = 0f64;
    for (f, e) in fast.loads().iter().zip(exact.loads()) {
        worst = worst.max((f - e.as_f64()).abs());
    }
    println!("exact value {}", exact.matching_value(3));
    println!("float value {}", fast.matching_value(3));
    println!("largest load difference {worst:e}");
    Ok(())
}
