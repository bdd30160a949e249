//! The classic hard arrival order: u_i sees v_i..v_{n-1}. One pass lands
//! close to 1 - 1/e; more passes recover quickly.

use streammatch::analysis::guarantee;
use streammatch::gen::gen_upper_triangular;
use streammatch::harness::{run_report, Mode};
use streammatch::PassConfig;

fn main() -> streammatch::Result<()> {
    for n in [2, 50, 200, 500] {
        let s = gen_upper_triangular(n)?.stream;
        for k in [1, 2, 4] {
            let r = run_report(&s, &PassConfig::new(k), Mode::Float)?;
            println!(
                "n={n:<4} k={k}  ratio {:.6}  guarantee {:.6}",
                r.fractional_ratio,
                guarantee(k)
            );
        }
    }
    println!("1 - 1/e = {:.6}", 1.0 - (-1f64).exp());
    Ok(())
}
