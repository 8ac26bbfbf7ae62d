//! Simulate a sequence from the recurrence-rejection model and recover its
//! parameters by profile-likelihood coordinate descent on grids.

use gazewalk::infer::{fit_profile, FitFamily};
use gazewalk::quad::QuadratureGrid;
use gazewalk::rng::RngSpec;
use gazewalk::saliency::constant_map;
use gazewalk::sim::{simulate, FirstMode, SimulationConfig};
use gazewalk::{KernelParams, ModelSpec, Point, Window};

fn main() -> gazewalk::Result<()> {
    let window = Window::unit_square();
    let alpha = constant_map(&window);
    let quad = QuadratureGrid::with_default_dims(&window, &alpha)?;

    let truth_sigma = 0.5; // variance 0.25, on the sigma grid
    let truth_theta = 0.9;
    let cfg = SimulationConfig {
        n: 100,
        first: FirstMode::ConditionOn(vec![Point::new(0.22, 0.41), Point::new(0.4, 0.5)]),
        rng: RngSpec::new(7, 0),
        model: ModelSpec::RejectionRecurrence {
            kernel: KernelParams::gaussian(truth_sigma * truth_sigma),
            theta: truth_theta,
            radius: 0.1,
        },
    };
    let seq = simulate(&cfg, &alpha)?;

    let sigma_grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.05).collect();
    let theta_grid: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let fit = fit_profile(
        &seq,
        FitFamily::RejectionRecurrence {
            radius: 0.1,
            flat_kernel: false,
        },
        &sigma_grid,
        &theta_grid,
        &alpha,
        &quad,
        10,
    )?;

    println!("truth:    sigma = {truth_sigma:.2}, theta = {truth_theta:.2}");
    println!(
        "estimate: sigma = {:.2}, theta = {:.2}  (loglik {:.3}, converged: {})",
        fit.scale.unwrap(),
        fit.interaction,
        fit.loglik,
        fit.converged
    );
    println!("descent trace:");
    for step in &fit.trace {
        println!(
            "  sigma = {:.2}, theta = {:.2}, loglik = {:.3}",
            step.scale.unwrap(),
            step.interaction,
            step.loglik
        );
    }
    Ok(())
}
