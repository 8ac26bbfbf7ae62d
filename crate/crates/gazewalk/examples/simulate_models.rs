//! Simulate one realization from each model family on the unit square and
//! print final coverage/recurrence summaries, illustrating how the
//! self-interaction terms reshape trajectories.

use gazewalk::rng::RngSpec;
use gazewalk::saliency::constant_map;
use gazewalk::sim::{simulate, FirstMode, SimulationConfig};
use gazewalk::summary::{
    ball_coverage_curve, cumulative_recurrence_curve, hull_coverage_curve, scanpath_length_curve,
};
use gazewalk::{CoverageType, KernelParams, ModelSpec, Point, Window};

fn main() -> gazewalk::Result<()> {
    let window = Window::unit_square();
    let alpha = constant_map(&window);
    let kernel = KernelParams::gaussian(0.3);
    let r = 0.1;

    let models: Vec<(&str, ModelSpec)> = vec![
        ("binomial", ModelSpec::Binomial),
        ("random walk", ModelSpec::RandomWalk { kernel }),
        ("rejection, hull rho=0.1", ModelSpec::RejectionHull { kernel, rho: 0.1 }),
        (
            "rejection, recurrence theta=0.9",
            ModelSpec::RejectionRecurrence {
                kernel,
                theta: 0.9,
                radius: r,
            },
        ),
        (
            "rejection, recurrence theta=0.1",
            ModelSpec::RejectionRecurrence {
                kernel,
                theta: 0.1,
                radius: r,
            },
        ),
        (
            "adapted, kappa=4",
            ModelSpec::HistoryAdapted {
                tau: 0.3,
                kappa: 4.0,
                coverage: CoverageType::Hull,
            },
        ),
    ];

    println!(
        "{:<34} {:>10} {:>10} {:>10} {:>10}",
        "model", "hull cov", "ball cov", "path len", "recurrence"
    );
    for (name, model) in models {
        let cfg = SimulationConfig {
            n: 100,
            first: FirstMode::ConditionOn(vec![Point::new(0.22, 0.41)]),
            rng: RngSpec::new(2024, 0),
            model,
        };
        let seq = simulate(&cfg, &alpha)?;
        let hull = hull_coverage_curve(&seq, true).values.last().copied().unwrap();
        let ball = ball_coverage_curve(&seq, r, true)?.values.last().copied().unwrap();
        let path = scanpath_length_curve(&seq).values.last().copied().unwrap();
        let rec = cumulative_recurrence_curve(&seq, r)?.values.last().copied().unwrap();
        println!("{name:<34} {hull:>10.3} {ball:>10.3} {path:>10.2} {rec:>10.0}");
    }
    Ok(())
}
