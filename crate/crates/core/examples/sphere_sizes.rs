//! Prints sphere sizes of a group `𝒢_ω`.
//!
//! ```text
//! cargo run --release -p selfsim-core --example sphere_sizes -- 20 "(012)*"
//! ```

use selfsim_core::groups::{build_group, OracleSequence};
use selfsim_core::growth::{enumerate_ball_with, BallOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let radius: usize = args.next().as_deref().unwrap_or("16").parse()?;
    let oracle = OracleSequence::parse(args.next().as_deref().unwrap_or("(012)*"))?;
    let ctx = build_group(&oracle, 0);
    let start = std::time::Instant::now();
    let options = BallOptions {
        keep_elements: false,
        allow_partial: true,
        ..Default::default()
    };
    let table = enumerate_ball_with(&ctx, radius, &options)?;
    for (n, s) in table.spheres().iter().enumerate() {
        println!("{n:>3} {s:>10} {:>10}", table.ball(n));
    }
    eprintln!("{:.2?}, complete: {}", start.elapsed(), table.is_complete());
    Ok(())
}
