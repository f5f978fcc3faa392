//! Regenerates the bundled CSV fixtures:
//!
//! ```text
//! cargo run --example make_fixtures -- crates/core/fixtures
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use alestats::rng::{Purpose, SeededRng};

fn linear(rng: &mut SeededRng) -> String {
    // y = 2 + 3 x1 - 1.5 x2 + 0 x3 + group shift, no noise
    let n = 300;
    let x1 = rng.normals(n);
    let x2 = rng.normals(n);
    let mut s = String::from("x1,x2,x3,group,y\n");
    for i in 0..n {
        let x1 = round(x1[i]);
        let x2 = round(x2[i] + 0.5 * x1);
        let x3 = round(10.0 * rng.uniform_open());
        let (group, shift) = match rng.index(3) {
            0 => ("a", 0.0),
            1 => ("b", 1.0),
            _ => ("c", -2.0),
        };
        let y = 2.0 + 3.0 * x1 - 1.5 * x2 + shift;
        let _ = writeln!(s, "{x1},{x2},{x3},{group},{}", round(y));
    }
    s
}

fn nonlinear(rng: &mut SeededRng) -> String {
    // step in x, hump in w, logical shift, pure-noise column
    let n = 160;
    let eps = rng.normals(n);
    let noise = rng.normals(n);
    let mut s = String::from("x,w,flag,noise,y\n");
    for i in 0..n {
        let x = round(4.0 * rng.uniform_open() - 2.0);
        let w = round(3.0 * rng.uniform_open());
        let flag = rng.index(2) == 1;
        let step = if x > 0.0 { 4.0 } else { 0.0 };
        let hump = 2.0 * (-(w - 1.5) * (w - 1.5) * 2.0).exp();
        let shift = if flag { 1.0 } else { 0.0 };
        let y = 10.0 + step + hump + shift + 0.5 * eps[i];
        let flag = if flag { "TRUE" } else { "FALSE" };
        let _ = writeln!(s, "{x},{w},{flag},{},{}", round(noise[i]), round(y));
    }
    s
}

fn round(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    let mut rng = SeededRng::new(20240601, Purpose::Fixture);
    std::fs::write(dir.join("linear.csv"), linear(&mut rng))?;
    std::fs::write(dir.join("nonlinear.csv"), nonlinear(&mut rng))?;
    Ok(())
}
