use moes::cli::RandomMixture;
use moes::dynamics::{ControlSequence, RobotModel, DEFAULT_START};
use moes::ergopt::{ergodic_search, ErgOptConfig, ErgodicProblem, Termination};
use moes::fourier::{map_coefficients, GaussianComponent, GaussianMixture, SpectralBasis};
use moes::moes::{scalarize, MapFamily, WeightVector};

#[test]
fn gaussian_at_start_converges_from_rest() {
    let basis = SpectralBasis::planar(1.0, 1.0, 10).unwrap();
    let model = RobotModel::default();
    let problem = ErgodicProblem::new(&model, &basis, DEFAULT_START);
    let map = GaussianMixture::new(vec![GaussianComponent::new([0.5, 0.5], 0.15, 1.0)])
        .rasterize(&[100, 100], &[1.0, 1.0])
        .unwrap();
    let target = map_coefficients(&map, &basis).unwrap();
    let cfg = ErgOptConfig::default();
    let out = ergodic_search(&problem, &target, &ControlSequence::zeros(100), &cfg).unwrap();
    assert_eq!(out.trace.termination, Termination::Converged, "{:?}", out.trace.metrics.last());
    assert!(out.trace.final_metric() <= cfg.epsilon);
    assert!(out.trace.iterations <= cfg.max_iters);
    assert!(out.controls.within_bounds(&model));
}

fn median(mut v: Vec<usize>) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2]) as f64
    }
}

#[test]
fn warm_start_from_adjacent_weight_needs_no_more_iterations() {
    let basis = SpectralBasis::planar(1.0, 1.0, 10).unwrap();
    let model = RobotModel::default();
    let problem = ErgodicProblem::new(&model, &basis, DEFAULT_START);
    let cfg = ErgOptConfig::default();
    let zero = ControlSequence::zeros(100);
    let source = RandomMixture::default();
    let (mut warm, mut cold) = (Vec::new(), Vec::new());
    for seed in 0..20 {
        let coeffs = (0..2)
            .map(|s| {
                let map = source.sample([1.0, 1.0], seed, s).rasterize(&[100, 100], &[1.0, 1.0]).unwrap();
                map_coefficients(&map, &basis).unwrap()
            })
            .collect();
        let family = MapFamily::new(coeffs, &basis).unwrap();
        let here = scalarize(&family, &WeightVector::new(vec![0.5, 0.5]).unwrap()).unwrap();
        let next = scalarize(&family, &WeightVector::new(vec![0.6, 0.4]).unwrap()).unwrap();
        let parent = ergodic_search(&problem, &here, &zero, &cfg).unwrap();
        warm.push(ergodic_search(&problem, &next, &parent.controls, &cfg).unwrap().trace.iterations);
        cold.push(ergodic_search(&problem, &next, &zero, &cfg).unwrap().trace.iterations);
    }
    assert!(median(warm.clone()) <= median(cold.clone()), "warm {warm:?} cold {cold:?}");
}
