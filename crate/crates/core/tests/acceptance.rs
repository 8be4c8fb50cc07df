//! Acceptance suite. Each criterion prints one PASS/FAIL line; the binary
//! exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use mixturecraft::analysis::quadrature::adaptive_gk;
use mixturecraft::analysis::{
    approximate_identity_curve, convergence_sweep, convolve_at, mixture_mass, sup_norm_diff_on_grid,
    young_inequality_check, Convolution, SweepTarget,
};
use mixturecraft::constructor::{
    approximate_lp, approximate_uniform, build_partition, discretize, truncate, BandwidthNorm,
};
use mixturecraft::{ApproxOptions, BoxRegion, DensitySpec, Evaluable, Mixture};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn d(spec: &str) -> DensitySpec {
    DensitySpec::parse(spec).unwrap()
}

fn phi(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// `sum_i c_i g((x - mu_i) / sigma_i) / sigma_i`, term by term, no index.
fn direct_1d(mix: &Mixture, x: f64) -> f64 {
    mix.components()
        .iter()
        .map(|c| c.weight * mix.kernel().value(&[(x - c.location[0]) / c.scale]) / c.scale)
        .sum()
}

fn random_continuous(rng: &mut ChaCha8Rng) -> DensitySpec {
    let mu: f64 = rng.gen_range(-1.0..1.0);
    let s: f64 = rng.gen_range(0.3..1.5);
    let spec = match rng.gen_range(0..4) {
        0 => format!("gaussian:{mu},{s}"),
        1 => format!("laplace:{mu},{s}"),
        2 => format!("triangular:{},{mu},{}", mu - s * rng.gen_range(0.5..1.5), mu + s * rng.gen_range(0.5..1.5)),
        _ => format!("epanechnikov:{mu},{s}"),
    };
    d(&spec)
}

fn random_box(rng: &mut ChaCha8Rng) -> BoxRegion {
    let a: f64 = rng.gen_range(-4.0..3.0);
    let b: f64 = rng.gen_range(a + 0.5..=4.0);
    BoxRegion::interval(a, b).unwrap()
}

fn certificate_soundness() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::NEG_INFINITY;
    for case in 0..50 {
        let f = random_continuous(&mut rng);
        let g = random_continuous(&mut rng);
        let k_box = random_box(&mut rng);
        let k = [2.0, 4.0, 8.0][rng.gen_range(0..3)];
        let delta = [0.2, 0.1, 0.05][rng.gen_range(0..3)];
        let h = truncate(&f, &k_box, 1.0, 0.5).unwrap();
        let part = build_partition(h.r, k, delta, 1).unwrap();
        let (mix, info) = discretize(&h, &g, k, &part, 1e-3, 8, 1e-14).unwrap();
        let conv = Convolution::new(&g, k, &h).unwrap();
        let grid = BoxRegion::interval(-h.r, h.r).unwrap().grid(2001).unwrap();
        let measured = sup_norm_diff_on_grid(&conv, &mix, &grid).unwrap().0;
        assert!(
            measured <= info.certified_bound + 1e-6,
            "case {case}: f={f} g={g} K={k_box:?} k={k} delta={delta}: measured {measured} > bound {}",
            info.certified_bound
        );
        worst = worst.max(measured - info.certified_bound);
    }
    format!("50 configurations, max(measured - bound) = {worst:.3e}")
}

fn bimodal_uniform() -> String {
    let f = d("gmix:0.5,-1,0.5,0.5,1,0.5");
    let g = d("gaussian:0,1");
    let (mix, report) = approximate_uniform(&f, &g, &BoxRegion::interval(-3.0, 3.0).unwrap(), 0.02, &ApproxOptions::default()).unwrap();
    let sup = (0..4096)
        .map(|i| {
            let x = -3.0 + 6.0 * i as f64 / 4095.0;
            (f.value(&[x]) - direct_1d(&mix, x)).abs()
        })
        .fold(0.0, f64::max);
    assert!(sup <= 0.02, "independent grid sup {sup}");
    assert!(report.measured_total <= 0.02);
    format!("k = {}, m = {}, reported {:.4e}, independent 4096-point sup {sup:.4e}", report.params.k, report.params.m, report.measured_total)
}

/// `int |f - mix|^p` over `[-R, R]` by adaptive quadrature, pinned at `breaks`.
fn lp_oracle(f: &DensitySpec, mix: &Mixture, p: f64, radius: f64, breaks: &[f64]) -> f64 {
    let mut pts = vec![-radius];
    pts.extend(breaks.iter().copied());
    pts.push(radius);
    let pieces: f64 = pts
        .windows(2)
        .map(|w| adaptive_gk(|x| (f.value(&[x]) - direct_1d(mix, x)).abs().powf(p), &[w[0], w[1]], 1e-10, 20_000).value)
        .sum();
    pieces.powf(1.0 / p)
}

fn lp_reproduction() -> String {
    let g = d("gaussian:0,1");
    let opts = ApproxOptions::default();

    let f = d("laplace:0,1");
    let (mix, rep) = approximate_lp(&f, &g, 1.0, 0.05, &opts).unwrap();
    // Outside [-40, 40] both densities carry less than 1e-15 of mass.
    let l1 = lp_oracle(&f, &mix, 1.0, 40.0, &[-1.0, 0.0, 1.0]);
    assert!(l1 <= 0.05 && rep.measured_total <= 0.05, "L1 {l1}, reported {}", rep.measured_total);

    let f = d("uniform:0,1");
    let (mix2, rep2) = approximate_lp(&f, &g, 2.0, 0.1, &opts).unwrap();
    let l2 = lp_oracle(&f, &mix2, 2.0, 40.0, &[0.0, 1.0]);
    assert!(l2 <= 0.1 && rep2.measured_total <= 0.1, "L2 {l2}, reported {}", rep2.measured_total);
    format!(
        "laplace L1 {l1:.4e} (k = {}, m = {}), uniform L2 {l2:.4e} (k = {}, m = {})",
        rep.params.k, rep.params.m, rep2.params.k, rep2.params.m
    )
}

fn identity_limit() -> String {
    let g = d("gaussian:0,1");
    let grid = BoxRegion::interval(-3.0, 3.0).unwrap().grid(2049).unwrap();
    let ks = [1.0, 2.0, 4.0, 8.0, 16.0];
    let table = approximate_identity_curve(&g, &g, &BandwidthNorm::Sup(grid), &ks).unwrap();
    let errs: Vec<f64> = table.rows().iter().map(|r| r.measured_sup.unwrap()).collect();
    let mut worst = 0.0_f64;
    for (k, e) in ks.iter().zip(&errs) {
        let closed = phi(0.0, 1.0) * (1.0 - (1.0 + k.powi(-2)).powf(-0.5));
        worst = worst.max((e - closed).abs());
        assert!((e - closed).abs() < 1e-5, "k = {k}: {e} vs {closed}");
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    format!("max deviation from closed form {worst:.3e}, strictly decreasing")
}

fn gaussian_oracle() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let s1: f64 = rng.gen_range(0.2..3.0);
        let s2: f64 = rng.gen_range(0.2..3.0);
        let x: f64 = rng.gen_range(-4.0..4.0);
        let g = d(&format!("gaussian:0,{s1}"));
        let h = d(&format!("gaussian:0,{s2}"));
        let v = convolve_at(&g, 1.0, &h, &[x]).unwrap();
        let want = phi(x, s1 * s1 + s2 * s2);
        worst = worst.max((v - want).abs());
        assert!((v - want).abs() <= 1e-6, "s1={s1} s2={s2} x={x}: {v} vs {want}");
    }
    format!("100 triples, max error {worst:.3e}")
}

fn structural_invariants() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_mass = 0.0_f64;
    for case in 0..100 {
        let f = random_continuous(&mut rng);
        let g = random_continuous(&mut rng);
        let k_box = random_box(&mut rng);
        let k = [1.0, 2.0, 4.0, 8.0][rng.gen_range(0..4)];
        let delta = [0.4, 0.2, 0.1][rng.gen_range(0..3)];
        let h = truncate(&f, &k_box, 1.0, 0.5).unwrap();
        let part = build_partition(h.r, k, delta, 1).unwrap();
        let (mix, _) = discretize(&h, &g, k, &part, 1e-3, 8, 1e-14).unwrap();
        let sum: f64 = mix.components().iter().map(|c| c.weight).sum();
        assert!((sum - 1.0).abs() <= 1e-12, "case {case}: weight sum {sum}");
        assert!(mix.components().iter().all(|c| c.weight >= 0.0 && c.scale > 0.0), "case {case}");
        let mass = mixture_mass(&mix).unwrap();
        worst_mass = worst_mass.max((mass - 1.0).abs());
        assert!((mass - 1.0).abs() <= 1e-3, "case {case}: mass {mass}");
        let back = Mixture::from_json(&mix.to_json()).unwrap();
        assert_eq!(back, mix, "case {case}: round trip");
    }
    format!("100 constructions, max |mass - 1| = {worst_mass:.3e}, round trips exact")
}

fn refinement_monotonicity() -> String {
    let g = d("gaussian:0,1");
    let mut lines = Vec::new();
    for f in [d("gaussian:0,1"), d("laplace:0.5,1"), d("triangular:-1,0,2")] {
        let target = SweepTarget::Uniform(BoxRegion::interval(-2.0, 2.0).unwrap());
        let settings = [(4.0, 0.4), (4.0, 0.2), (4.0, 0.1), (4.0, 0.05)];
        let table = convergence_sweep(&f, &g, &target, &settings, &ApproxOptions::default()).unwrap();
        let bounds: Vec<f64> = table.rows().iter().map(|r| r.certified_bound.unwrap()).collect();
        assert!(bounds.windows(2).all(|w| w[1] <= w[0]), "{f}: {bounds:?}");
        lines.push(format!("{:.3e}", bounds[3]));
    }
    format!("3 targets, certificates non-increasing (finest {})", lines.join(", "))
}

fn young_inequality() -> String {
    let one_d = [
        "gaussian:0,1",
        "laplace:0,1",
        "triangular:-1,0,1",
        "epanechnikov:0,1",
        "uniform:0,1",
        "gmix:0.5,-1,0.5,0.5,1,0.5",
    ];
    let two_d = ["gaussian2:0,0,1", "triangular2:-1,0,1"];
    let mut checks = 0;
    let mut tightest = f64::INFINITY;
    for family in [&one_d[..], &two_d[..]] {
        for f in family {
            for g in family {
                for p in [1.0, 2.0, 3.0] {
                    let c = young_inequality_check(&d(f), &d(g), p).unwrap();
                    assert!(c.holds && c.lhs <= c.rhs + 1e-6, "f={f} g={g} p={p}: {c:?}");
                    tightest = tightest.min(c.rhs - c.lhs);
                    checks += 1;
                }
            }
        }
    }
    format!("{checks} checks, min(rhs - lhs) = {tightest:.3e}")
}

fn main() {
    let criteria: [(&str, fn() -> String); 8] = [
        ("1 certificate soundness", certificate_soundness),
        ("2 uniform approximation of a bimodal target", bimodal_uniform),
        ("3 L_p approximation (laplace L1, uniform L2)", lp_reproduction),
        ("4 approximate-identity limit", identity_limit),
        ("5 gaussian convolution oracle", gaussian_oracle),
        ("6 structural invariants", structural_invariants),
        ("7 refinement monotonicity", refinement_monotonicity),
        ("8 Young's inequality", young_inequality),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} [{secs:.1}s]: {detail}"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL criterion {name} [{secs:.1}s]: {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
