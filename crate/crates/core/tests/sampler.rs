mod common;

use common::{chi_square_critical, chi_square_uniform};
use hirsch_core::circle_dynamics::compute_g_measure;
use hirsch_core::diffusion::PathRng;
use hirsch_core::harmonic_measures::HarmonicMeasure;
use hirsch_core::stats::{ks_critical, ks_one_sample, upper_quantile, w1_to_cdf, PiecewiseCdf};
use hirsch_core::{ChartPoint, CircleMeasure, Cylinder, GFunction, MetricFamily};

const N: usize = 100_000;

fn draws(hm: &HarmonicMeasure, seed: u64) -> Vec<(f64, Cylinder, f64, f64, f64)> {
    let mut rng = PathRng::new(seed, 0);
    (0..N)
        .map(|_| {
            let p = hm.sample_point(&mut rng);
            let ChartPoint::Cyl { cyl, u, v } = p.p else { panic!("cylinder chart expected") };
            let l = hm.fam().pants_shape_at(p.z).unwrap().length(cyl);
            (p.label().turns(), cyl, u, v, l)
        })
        .collect()
}

fn bins(values: impl Iterator<Item = f64>) -> Vec<u64> {
    let mut counts = vec![0u64; 64];
    values.for_each(|x| counts[((x * 64.0) as usize).min(63)] += 1);
    counts
}

#[test]
fn constant_g_lebesgue_is_uniform_in_every_coordinate() {
    let hm = HarmonicMeasure::new(MetricFamily::new(GFunction::Constant2, None).unwrap(), CircleMeasure::uniform(12)).unwrap();
    let d = draws(&hm, 17);
    for (name, counts) in [
        ("label", bins(d.iter().map(|s| s.0))),
        ("u", bins(d.iter().map(|s| s.2))),
        ("v / L", bins(d.iter().map(|s| s.3 / s.4))),
    ] {
        let chi2 = chi_square_uniform(&counts);
        assert!(chi2 <= chi_square_critical(63.0, 0.01), "{name}: chi2 = {chi2}");
    }
    let c1 = d.iter().filter(|s| s.1 == Cylinder::C1).count() as f64;
    // binomial(N, 1/2): 2.576 standard deviations
    assert!((c1 - N as f64 / 2.0).abs() <= 2.576 * (N as f64 / 4.0).sqrt(), "{c1}");
}

#[test]
fn height_is_uniform_not_phi_weighted() {
    let fam = MetricFamily::new(GFunction::sine(0.3).unwrap(), None).unwrap();
    let mu = compute_g_measure(fam.g(), 12, 1e-12, 5000).unwrap().measure;
    let hm = HarmonicMeasure::new(fam, mu).unwrap();
    let mut h: Vec<f64> = draws(&hm, 23).iter().map(|s| s.3 / s.4).collect();
    h.sort_by(f64::total_cmp);
    let uniform = PiecewiseCdf::uniform();
    assert!(ks_one_sample(&h, &uniform) <= ks_critical(N, 0.01));
    // the e^{-v}-weighted law is far outside the band
    let mut wrong: Vec<f64> = h.iter().map(|x| -(1.0 - x * (1.0 - (-1.0f64).exp())).ln()).collect();
    wrong.sort_by(f64::total_cmp);
    assert!(ks_one_sample(&wrong, &uniform) > 10.0 * ks_critical(N, 0.01));
}

#[test]
fn transverse_marginal_within_bootstrap_band() {
    let fam = MetricFamily::new(GFunction::sine(0.3).unwrap(), None).unwrap();
    let mu = compute_g_measure(fam.g(), 12, 1e-12, 5000).unwrap().measure;
    let hm = HarmonicMeasure::new(fam, mu).unwrap();
    let mut labels: Vec<f64> = draws(&hm, 29).iter().map(|s| s.0).collect();
    labels.sort_by(f64::total_cmp);
    let w1 = w1_to_cdf(&labels, hm.marginal());
    let mut band: Vec<f64> = (0..200)
        .map(|b| {
            let mut rng = PathRng::new(1000 + b, 0);
            let mut xs: Vec<f64> = (0..N).map(|_| hm.marginal().quantile(rng.uniform())).collect();
            xs.sort_by(f64::total_cmp);
            w1_to_cdf(&xs, hm.marginal())
        })
        .collect();
    let m = band.iter().sum::<f64>() / band.len() as f64;
    let sd = (band.iter().map(|x| (x - m).powi(2)).sum::<f64>() / band.len() as f64).sqrt();
    assert!(w1 <= m + 3.0 * sd, "{w1} vs {m} + 3 x {sd}");
    assert!(w1 <= upper_quantile(&mut band, 0.99) + 3.0 * sd);
}
