use std::f64::consts::PI;

use anderson_core::cavity::{
    dos_estimate, equilibrate, hopping_of, im_moment, init_population, integrate_panels, lower_tail_probe,
    mobility_edge, probe_samples, root_law, smoothed_gaussian_density, sweep, CavityParams, TailKind, BETA,
};

#[test]
fn theorem_constants() {
    assert!((hopping_of(2.0, 20) - 0.033381).abs() < 5e-7);
    assert!((mobility_edge(2.0).unwrap() - 1.5235).abs() < 5e-5);
    assert!((BETA - 0.102990).abs() < 1e-6);
    for d in 3..30 {
        assert!(hopping_of(1.0, d + 1) < hopping_of(1.0, d));
    }
}

/// Independent evaluation of the Poisson-smoothed Gaussian density by the
/// substitution v = E + η tan θ, which removes the Lorentzian peak.
fn smoothed_by_angle(energy: f64, eta: f64) -> f64 {
    let rho = |v: f64| (-0.5 * v * v).exp() / (2.0 * PI).sqrt();
    let half = PI / 2.0;
    let mut breaks: Vec<f64> = (0..=64).map(|k| -half + PI * k as f64 / 64.0).collect();
    // refine next to ±π/2, where tan θ sweeps the Gaussian scale
    for k in 1..40 {
        let gap = eta * 2f64.powi(k - 20);
        if gap < half {
            breaks.push(half - gap);
            breaks.push(-half + gap);
        }
    }
    breaks.sort_by(f64::total_cmp);
    integrate_panels(|th| rho(energy + eta * th.tan()) / PI, &breaks, 16)
}

#[test]
fn quadrature_oracles_agree() {
    for (e, eta) in [(0.0, 0.01), (0.0, 0.1), (1.3, 0.05), (-2.0, 0.3)] {
        let a = smoothed_gaussian_density(e, eta);
        let b = smoothed_by_angle(e, eta);
        assert!((a - b).abs() < 1e-9, "E = {e}, eta = {eta}: {a} vs {b}");
    }
    // Voigt profile values (unit Gaussian, Lorentzian half-width η)
    for (e, eta, want) in [(0.0, 0.01, 0.395_779_023_047), (0.0, 0.1, 0.369_004_682_480), (1.3, 0.05, 0.171_142_415_043)] {
        assert!((smoothed_gaussian_density(e, eta) - want).abs() < 1e-10);
    }
    let at_zero = smoothed_gaussian_density(0.0, 0.01);
    assert!(smoothed_gaussian_density(0.0, 1e-4) > at_zero);
}

#[test]
fn zero_hopping_population_matches_quadrature() {
    let p = CavityParams::new(20, 0.0, 0.0, 0.01, 21).unwrap().with_pool(50_000, 3).unwrap();
    let (pop, _) = equilibrate(&p).unwrap();
    let root = root_law(&pop, 4_000_000).unwrap();
    let dos = dos_estimate(&root);
    let exact = smoothed_gaussian_density(0.0, 0.01);
    let se = im_moment(&root, 1.0).unwrap().se / PI;
    assert!((dos - exact).abs() < 4.0 * se, "dos {dos} vs {exact} (se {se})");
    assert!((dos - exact).abs() < 0.01 * exact);
}

#[test]
fn zero_hopping_population_is_stationary() {
    let p = CavityParams::new(20, 0.0, 0.5, 0.1, 22).unwrap().with_pool(100_000, 0).unwrap();
    let a = init_population(&p).unwrap();
    let b = sweep(&a);
    // compare the two laws through Im moments
    let mean = |xs: &[anderson_core::c64], f: &dyn Fn(f64) -> f64| xs.iter().map(|g| f(g.im)).sum::<f64>() / xs.len() as f64;
    for f in [&(|y: f64| y) as &dyn Fn(f64) -> f64, &|y: f64| y.sqrt(), &|y: f64| y * y] {
        let (ma, mb) = (mean(a.samples(), f), mean(b.samples(), f));
        let sd = (a.samples().iter().map(|g| (f(g.im) - ma).powi(2)).sum::<f64>() / a.len() as f64).sqrt();
        let se = sd * (2.0 / a.len() as f64).sqrt();
        assert!((ma - mb).abs() < 4.0 * se, "{ma} vs {mb}");
    }
}

#[test]
fn delocalized_population_properties() {
    let t = hopping_of(2.0, 20);
    let p = CavityParams::new(20, t, 0.0, 0.01, 23).unwrap().with_pool(20_000, 100).unwrap();
    let (pop, conv) = equilibrate(&p).unwrap();
    assert!(conv.converged, "{conv:?}");
    assert!(pop.samples().iter().all(|g| g.im > 0.0 && g.im <= 1.0 / p.eta));
    let root = root_law(&pop, 20_000).unwrap();
    assert!(dos_estimate(&root) > 0.0);
    let probes = probe_samples(&pop);
    let ceiling = p.eta + t * t * 19.0 / p.eta;
    assert_eq!(probes.tail(TailKind::S, ceiling).unwrap().mean, 0.0);
    let mut previous = 0.0;
    for eps in [1e-3, 1e-2, 1e-1, 1.0] {
        let q = lower_tail_probe(&pop, eps).unwrap().mean;
        assert!(q >= previous);
        previous = q;
    }
}
