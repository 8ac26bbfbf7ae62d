//! Estimate a saliency raster from synthetic auxiliary fixation data with a
//! bimodal ground truth, write it to JSON, and report where the estimated
//! mass concentrates.

use gazewalk::rng::{derive_rng, RngSpec};
use gazewalk::saliency::{default_bandwidth, estimate_saliency};
use gazewalk::{FixationSequence, Point, Window};
use rand::Rng;

fn main() -> gazewalk::Result<()> {
    let window = Window::unit_square();
    let mut rng = derive_rng(RngSpec::new(42, 0));
    let modes = [Point::new(0.25, 0.3), Point::new(0.75, 0.7)];

    // Ten auxiliary subjects, each fixating around the two modes.
    let aux: Vec<FixationSequence> = (0..10)
        .map(|s| {
            let pts = (0..40)
                .map(|_| {
                    let m = modes[rng.random_range(0..modes.len())];
                    let jitter = |rng: &mut rand_chacha::ChaCha8Rng| rng.random_range(-0.08..0.08);
                    Point::new(
                        (m.x + jitter(&mut rng)).clamp(0.0, 1.0),
                        (m.y + jitter(&mut rng)).clamp(0.0, 1.0),
                    )
                })
                .collect();
            let mut seq = FixationSequence::new(pts, window);
            seq.subject = Some(format!("subject{s}"));
            seq
        })
        .collect();

    let bw = default_bandwidth(&window);
    let map = estimate_saliency(&aux, bw, &window, 64, 64)?;
    gazewalk::io::write_raster_json(std::path::Path::new("saliency_example.json"), &map)?;

    for m in modes {
        println!("alpha at mode ({:.2}, {:.2}) = {:.3}", m.x, m.y, map.alpha_at(m)?);
    }
    println!(
        "alpha at empty corner (0.95, 0.05) = {:.3}",
        map.alpha_at(Point::new(0.95, 0.05))?
    );
    println!("raster written to saliency_example.json (bandwidth {bw})");
    Ok(())
}
