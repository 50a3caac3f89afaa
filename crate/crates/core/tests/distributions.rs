use core::f64::consts::{FRAC_PI_2, PI};

use krqr_core::analytic::{
    averaged_series, full_width_half_max, narrow_antiresonant_energy, normalize_density, reconstruct_distribution,
    reconstruction_grid, square_l2_error,
};
use krqr_core::ensembles::{
    csbw_weights, make_bragg_superposition, make_gaussian, make_square, square_to_gaussian_width, xi_grid,
    QuadratureSpec,
};
use krqr_core::observables::{mean_energy, reduce_traces};
use krqr_core::params::{recommended_half_width, SimParams, TWO_PI};
use krqr_core::propagator::{trace_fiber, KickPlan};
use krqr_core::{Coherence, ObservableSeries};

#[test]
fn bragg_weights_follow_a_sine() {
    let p = SimParams::resonant(5.0, 2, 1);
    let xi = xi_grid(128);
    for (phi, n) in [(0.0, 0), (0.8, 0), (0.8, 3), (-2.0, -2)] {
        let dist = csbw_weights(&make_bragg_superposition(phi, n, &p).unwrap(), &xi, &p).unwrap();
        for (j, &x) in xi.iter().enumerate() {
            let want = (1.0 - (x - phi).sin()) / TWO_PI;
            assert!((dist.weight(0, j) - want).abs() < 1e-13, "phi {phi}, n {n}, xi {x}");
        }
        let (arg, _) = dist.row(0).iter().enumerate().fold((0, f64::MIN), |a, (j, &w)| if w > a.1 { (j, w) } else { a });
        let dev = (xi[arg] - (phi - FRAC_PI_2) + PI).rem_euclid(TWO_PI) - PI;
        assert!(dev.abs() <= TWO_PI / 128.0);
    }
}

#[test]
fn broad_coherent_gaussian_localizes_at_phase() {
    let p = SimParams::resonant(5.0, 2, 1).with_ladder(60);
    let phi = 1.2;
    let ens = make_gaussian(5.0, Coherence::Coherent, phi, &QuadratureSpec::midpoint(16), &p).unwrap();
    let xi = xi_grid(256);
    let dist = csbw_weights(&ens, &xi, &p).unwrap();
    let marginal: Vec<f64> = (0..256).map(|j| (0..dist.n_beta()).map(|k| dist.weight(k, j)).sum()).collect();
    let total: f64 = marginal.iter().sum::<f64>() * dist.dxi();
    assert!((total - 1.0).abs() < 1e-10);
    let near: f64 = xi
        .iter()
        .zip(&marginal)
        .filter(|(&x, _)| ((x - phi + PI).rem_euclid(TWO_PI) - PI).abs() < 0.5)
        .map(|(_, w)| w * dist.dxi())
        .sum();
    assert!(near > 0.99, "mass within 0.5 of phi: {near}");
}

#[test]
fn incoherent_weights_are_flat() {
    let p = SimParams::resonant(5.0, 2, 1).with_ladder(60);
    let ens = make_gaussian(5.0, Coherence::Incoherent, 1.2, &QuadratureSpec::midpoint(16), &p).unwrap();
    let dist = csbw_weights(&ens, &xi_grid(32), &p).unwrap();
    for k in 0..dist.n_beta() {
        let row = dist.row(k);
        assert!(row.iter().all(|w| (w - row[0]).abs() < 1e-15));
    }
}

#[test]
fn square_and_gaussian_share_energy() {
    let p = SimParams::resonant(5.0, 1, 1);
    for delta in [0.02, 0.08, 0.3] {
        let sq = make_square(delta, &QuadratureSpec::gauss_legendre(64), &p).unwrap();
        let sigma = square_to_gaussian_width(delta);
        let quad = QuadratureSpec::gauss_legendre(256);
        let g = make_gaussian(sigma, Coherence::Coherent, 0.0, &quad, &p).unwrap();
        let want = p.kbar * p.kbar * delta * delta / 24.0;
        assert!((mean_energy(&sq, &p) - want).abs() < 1e-12 * want.max(1.0));
        assert!((mean_energy(&g, &p) - want).abs() < 1e-8 * want, "delta {delta}");
    }
}

#[test]
fn quadrature_converges_for_narrow_gaussian() {
    let p = SimParams::resonant(10.0, 2, 200);
    let run = |n: usize| {
        let ens = make_gaussian(0.0115, Coherence::Coherent, 0.0, &QuadratureSpec::gauss_legendre(n), &p).unwrap();
        averaged_series(&csbw_weights(&ens, &xi_grid(64), &p).unwrap(), &p, 200).unwrap()
    };
    let (a, b) = (run(256), run(512));
    for t in 0..=200 {
        assert!((a.mean_e[t] - b.mean_e[t]).abs() < 1e-8 * b.mean_e[t].max(1.0), "t = {t}");
    }
}

fn reconstruct(series: &ObservableSeries, k: f64, grid: &[f64]) -> Vec<f64> {
    normalize_density(grid, &reconstruct_distribution(series, k, grid).unwrap())
}

#[test]
fn closed_form_series_recovers_square() {
    let p = SimParams::resonant(10.0, 1, 1);
    let delta = 0.02;
    let series = |t_max: usize| {
        let mut s = ObservableSeries::with_capacity(t_max + 1);
        for t in 0..=t_max {
            s.push(t, 0.0, narrow_antiresonant_energy(t, delta, 0.0, &p).unwrap());
        }
        s
    };
    let grid = reconstruction_grid(4001);
    let width = full_width_half_max(&grid, &reconstruct(&series(100), p.k, &grid));
    assert!((width - delta).abs() < 0.1 * delta, "width {width}");
    let errors: Vec<f64> =
        [25, 50, 100, 200].iter().map(|&t| square_l2_error(&grid, &reconstruct(&series(t), p.k, &grid), delta)).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn antiresonant_series_recovers_square_width() {
    let delta = 0.02;
    let kicks = 100;
    let p = SimParams::resonant(10.0, 1, kicks);
    let p = p.with_ladder(recommended_half_width(10.0, p.kbar, kicks, 1));
    let ens = make_square(delta, &QuadratureSpec::gauss_legendre(512), &p).unwrap();
    let plan = KickPlan::new(&p);
    let weights: Vec<f64> = ens.fibers().iter().map(|wf| wf.weight).collect();
    let traces: Vec<_> = ens.fibers().iter().map(|wf| trace_fiber(&wf.fiber, &p, &plan).unwrap()).collect();
    let series = reduce_traces(&weights, &traces);
    let grid = reconstruction_grid(4001);
    let rec = reconstruct(&series, p.k, &grid);
    let width = full_width_half_max(&grid, &rec);
    assert!((width - delta).abs() < 0.1 * delta, "width {width}");
    let centre = grid.iter().zip(&rec).map(|(b, r)| b * r).sum::<f64>() / rec.iter().sum::<f64>();
    assert!(centre.abs() < 1e-3);
}
