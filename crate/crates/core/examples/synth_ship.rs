//! Regenerates `scenarios/ship.pgm`: a dark 16-bit sea with one bright,
//! elongated ship blob inside a faint glow.
//!
//! ```text
//! cargo run -p bmo-core --example synth_ship
//! ```

use bmo_core::landscape::pgm::{write_pgm, GrayImage};

const WIDTH: usize = 160;
const HEIGHT: usize = 100;

fn main() -> bmo_core::Result<()> {
    let mut samples = Vec::with_capacity(WIDTH * HEIGHT);
    for row in 0..HEIGHT {
        for col in 0..WIDTH {
            let (x, y) = (col as f64, row as f64);
            let glow =
                8000.0 * (-((x - 112.0).powi(2) + (y - 38.0).powi(2)) / (2.0 * 60.0 * 60.0)).exp();
            // Hull: ellipse centered at (112, 38), 14 px long, 5 px wide.
            let (u, v) = ((x - 112.0) / 14.0, (y - 38.0) / 5.0);
            let hull = 52000.0 * (-(u * u + v * v).powi(2)).exp();
            samples.push((4000.0 + glow + hull).round() as u16);
        }
    }
    let image = GrayImage::new(WIDTH, HEIGHT, 65535, samples)?;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/ship.pgm");
    write_pgm(path, &image)?;
    println!("wrote {path}");
    Ok(())
}
