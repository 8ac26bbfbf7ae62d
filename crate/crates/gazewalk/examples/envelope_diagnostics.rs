//! Pointwise Monte Carlo envelope test: a trajectory from the theta = 0.9
//! recurrence model is compared against bands built from random-walk
//! replicates. The cumulative recurrence curve should escape the band.

use gazewalk::rng::RngSpec;
use gazewalk::saliency::constant_map;
use gazewalk::sim::{simulate, simulate_batch, FirstMode, SimulationConfig};
use gazewalk::summary::{band_exceedance, compute_curve, envelope_from_curves, StatisticTag};
use gazewalk::{KernelParams, ModelSpec, Point, Window};

fn main() -> gazewalk::Result<()> {
    let window = Window::unit_square();
    let alpha = constant_map(&window);
    let kernel = KernelParams::gaussian(0.3);
    let r = 0.1;
    let first = FirstMode::ConditionOn(vec![Point::new(0.22, 0.41), Point::new(0.4, 0.5)]);

    // "Data": one recurrent trajectory.
    let data = simulate(
        &SimulationConfig {
            n: 100,
            first: first.clone(),
            rng: RngSpec::new(11, 0),
            model: ModelSpec::RejectionRecurrence {
                kernel,
                theta: 0.9,
                radius: r,
            },
        },
        &alpha,
    )?;

    // Null band: 99 random-walk replicates on independent rng streams.
    let null_cfg = SimulationConfig {
        n: 100,
        first,
        rng: RngSpec::new(12, 0),
        model: ModelSpec::RandomWalk { kernel },
    };
    let replicas = simulate_batch(&null_cfg, &alpha, 99)?;

    for tag in [
        StatisticTag::BallCoverage { radius: r },
        StatisticTag::HullCoverage,
        StatisticTag::ScanpathLength,
        StatisticTag::CumulativeRecurrence { radius: r },
    ] {
        let curve = compute_curve(&data, tag, false)?;
        let curves = replicas
            .iter()
            .map(|s| compute_curve(s, tag, false))
            .collect::<gazewalk::Result<Vec<_>>>()?;
        let band = envelope_from_curves(&curves)?;
        let exc = band_exceedance(&curve, &band)?;
        println!(
            "{:<22} outside fraction {:.2}, first exit {:?}",
            tag.name(),
            exc.fraction,
            exc.first_exit
        );
    }
    Ok(())
}
