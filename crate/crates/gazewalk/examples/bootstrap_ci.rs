//! Parametric-bootstrap confidence intervals: fit the recurrence model to a
//! synthetic sequence, then refit 20 replicates simulated from the fitted
//! model and report the 90% percentile intervals.

use gazewalk::infer::{bootstrap_ci, fit_profile, FitFamily};
use gazewalk::quad::QuadratureGrid;
use gazewalk::rng::RngSpec;
use gazewalk::saliency::constant_map;
use gazewalk::sim::{simulate, FirstMode, SimulationConfig};
use gazewalk::{KernelParams, ModelSpec, Point, Window};

fn main() -> gazewalk::Result<()> {
    let window = Window::unit_square();
    let alpha = constant_map(&window);
    let quad = QuadratureGrid::with_default_dims(&window, &alpha)?;

    let cfg = SimulationConfig {
        n: 100,
        first: FirstMode::ConditionOn(vec![Point::new(0.22, 0.41), Point::new(0.4, 0.5)]),
        rng: RngSpec::new(3, 0),
        model: ModelSpec::RejectionRecurrence {
            kernel: KernelParams::gaussian(0.25),
            theta: 0.9,
            radius: 0.1,
        },
    };
    let seq = simulate(&cfg, &alpha)?;

    let sigma_grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.05).collect();
    let theta_grid: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let family = FitFamily::RejectionRecurrence {
        radius: 0.1,
        flat_kernel: false,
    };
    let fit = fit_profile(&seq, family, &sigma_grid, &theta_grid, &alpha, &quad, 10)?;
    println!(
        "point estimates: sigma = {:.2}, theta = {:.2}",
        fit.scale.unwrap(),
        fit.interaction
    );

    let ci = bootstrap_ci(&seq, &fit, 20, 0.90, RngSpec::new(99, 0), &alpha, &quad, 10)?;
    for p in &ci.params {
        println!(
            "{:<6} 90% CI [{:.2}, {:.2}]  (B = {})",
            p.name, p.lower, p.upper, ci.replicates
        );
    }
    Ok(())
}
