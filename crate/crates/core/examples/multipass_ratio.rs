//! Fractional value of k-pass water-filling on planted instances, next to
//! the closed-form guarantee.
//!
//!     cargo run --release --example multipass_ratio -- [n] [seed]

use streammatch::analysis::guarantee;
use streammatch::gen::gen_planted;
use streammatch::harness::{run_report, Mode};
use streammatch::{OrderPolicy, PassConfig};

fn main() -> streammatch::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(200, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let g = gen_planted(n, 0.05, seed)?;
    let stream = g.stream.reordered(OrderPolicy::Random, seed);
    println!("{:>3} {:>10} {:>10} {:>9}", "k", "value/opt", "guarantee", "rounded");
    for k in [1, 2, 3, 5, 8] {
        let r = run_report(&stream, &PassConfig::new(k), Mode::Float)?;
        println!(
            "{k:>3} {:>10.6} {:>10.6} {:>9}",
            r.fractional_ratio,
            guarantee(k),
            r.integral_size
        );
        assert!(r.passed());
    }
    Ok(())
}
