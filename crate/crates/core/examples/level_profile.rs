//! Level profile after k passes against its lower bound m * integral of the
//! gamma tail, on a planted perfect-matching instance.

use streammatch::analysis::{profile_bound_points, LevelProfile};
use streammatch::gen::gen_planted;
use streammatch::{run_multipass, OrderPolicy, PassConfig};

fn main() -> streammatch::Result<()> {
    let k = 3;
    let g = gen_planted(200, 0.05, 4)?;
    let s = g.stream.reordered(OrderPolicy::Random, 4);
    let a = run_multipass(&s, &PassConfig::new(k))?;
    let p = LevelProfile::from_allocation(&a, k);
    let grid: Vec<f64> = (0..=12).map(|i| i as f64 * 0.25 * k as f64).collect();
    println!("{:>6} {:>12} {:>12}", "x", "mass", "bound");
    for pt in profile_bound_points(&p, 200, &grid) {
        println!(
            "{:>6.2} {:>12.4} {:>12.4} {}",
            pt.x,
            pt.profile_mass,
            pt.bound,
            if pt.holds { "" } else { "VIOLATED" }
        );
    }
    Ok(())
}
