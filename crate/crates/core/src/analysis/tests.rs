use super::*;
use crate::constructor::{ApproxOptions, BandwidthNorm};
use crate::density::{BoxRegion, DensitySpec, GridSpec};
use crate::error::Error;
use crate::eval::{Evaluable, FnEval, Zero};
use crate::mixture::{Mixture, MixtureComponent};

fn d(spec: &str) -> DensitySpec {
    DensitySpec::parse(spec).unwrap()
}

fn normal_pdf(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

#[test]
fn convolution_of_gaussians_is_gaussian() {
    let g = d("gaussian:0,1");
    let h = d("gaussian:0,1");
    let v = convolve_at(&g, 1.0, &h, &[0.0]).unwrap();
    assert!((v - 1.0 / (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-6, "{v}");
    for (s, k, x) in [(0.5, 1.0, 0.3), (2.0, 3.0, -1.7), (1.3, 0.5, 2.5)] {
        let h = d(&format!("gaussian:0,{s}"));
        let v = convolve_at(&g, k, &h, &[x]).unwrap();
        let want = normal_pdf(x, s * s + 1.0 / (k * k));
        assert!((v - want).abs() < 1e-6, "s={s} k={k} x={x}: {v} vs {want}");
    }
}

#[test]
fn convolution_of_zero_is_zero() {
    let g = d("gaussian:0,1");
    for x in [-3.0, 0.0, 0.25, 10.0] {
        assert_eq!(convolve_at(&g, 2.0, &Zero { dim: 1 }, &[x]).unwrap(), 0.0);
    }
}

#[test]
fn sharp_kernel_recovers_the_target() {
    let g = d("gaussian:0,1");
    let h = d("triangular:-1,0,1");
    let v = convolve_at(&g, 64.0, &h, &[0.0]).unwrap();
    assert!((v - 1.0).abs() < 0.02, "{v}");
}

#[test]
fn two_dimensional_convolution_factorizes() {
    let g = d("gaussian2:0,0,1");
    let h = d("gaussian2:0,0,0.7");
    for x in [[0.0, 0.0], [0.4, -1.1]] {
        let v = convolve_at(&g, 2.0, &h, &x).unwrap();
        let var = 0.49 + 0.25;
        let want = normal_pdf(x[0], var) * normal_pdf(x[1], var);
        assert!((v - want).abs() < 1e-6, "{x:?}: {v} vs {want}");
    }
}

#[test]
fn convolution_preserves_mass() {
    let g = d("gaussian:0,1");
    for spec in ["triangular:-1,0,1", "epanechnikov:0,1", "uniform:0,1", "triangular:-2,1,1.5"] {
        let h = d(spec);
        let conv = Convolution::with_tol(&g, 4.0, &h, 1e-10).unwrap();
        let reach = conv.radius();
        let mass = quadrature::adaptive_gk(|x| conv.value(&[x]), &[-reach, reach], 1e-9, 2000).value;
        assert!((mass - 1.0).abs() < 1e-6, "{spec}: {mass}");
    }
}

#[test]
fn sup_norm_examples() {
    let a = d("gaussian:0,1");
    let grid = BoxRegion::interval(-3.0, 3.0).unwrap().grid(2048).unwrap();
    assert_eq!(sup_norm_diff_on_grid(&a, &a, &grid).unwrap().0, 0.0);
    let (v, at) = sup_norm_diff_on_grid(&a, &Zero { dim: 1 }, &grid).unwrap();
    let nearest = (0..grid.len()).map(|i| grid.coord(0, i)).min_by(|x, y| x.abs().total_cmp(&y.abs())).unwrap();
    assert_eq!(at, vec![nearest]);
    assert!((v - 0.3989422804).abs() < 1e-6, "{v}");
}

#[test]
fn sup_norm_ties_break_lexicographically() {
    let flat = FnEval::new(2, 1.0, |_: &[f64]| 1.0);
    let grid = GridSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], 5).unwrap();
    let (v, at) = sup_norm_diff_on_grid(&flat, &Zero { dim: 2 }, &grid).unwrap();
    assert_eq!(v, 1.0);
    assert_eq!(at, vec![-1.0, -1.0]);
}

#[test]
fn sup_norm_of_round_trip_is_zero() {
    let mix = Mixture::new(
        d("gaussian:0,1"),
        vec![
            MixtureComponent::new(0.3, vec![-0.7], 0.4),
            MixtureComponent::new(0.7, vec![1.0 / 3.0], 1.1),
        ],
    )
    .unwrap();
    let back = Mixture::from_json(&mix.to_json()).unwrap();
    let grid = BoxRegion::interval(-4.0, 4.0).unwrap().grid(1001).unwrap();
    assert!(sup_norm_diff_on_grid(&mix, &back, &grid).unwrap().0 <= 1e-15);
}

#[test]
fn lp_norm_examples() {
    let a = d("gaussian:0,1");
    let one = lp_norm(&a, 1.0, 12.0, 0.0).unwrap();
    assert!((one - 1.0).abs() < 1e-6, "{one}");
    let two = lp_norm(&a, 2.0, 12.0, 0.0).unwrap();
    let want = (2.0 * std::f64::consts::PI.sqrt()).powf(-0.5);
    assert!((two - want).abs() < 1e-5, "{two} vs {want}");
    let u = lp_norm(&d("uniform:0,1"), 2.0, 2.0, 0.0).unwrap();
    assert!((u - 1.0).abs() < 1e-9, "{u}");
}

#[test]
fn lp_norm_adds_the_tail() {
    let a = d("uniform:0,1");
    let v = lp_norm(&a, 1.0, 2.0, 0.25).unwrap();
    assert!((v - 1.25).abs() < 1e-9);
    assert!(matches!(lp_norm(&a, 0.5, 2.0, 0.0), Err(Error::InvalidParameter(_))));
}

#[test]
fn young_examples() {
    let gauss = d("gaussian:0,1");
    let c = young_inequality_check(&gauss, &gauss, 1.0).unwrap();
    assert!(c.holds && (c.lhs - 1.0).abs() < 1e-6 && (c.rhs - 1.0).abs() < 1e-6, "{c:?}");

    let c = young_inequality_check(&gauss, &d("laplace:0,1"), 2.0).unwrap();
    assert!(c.holds && c.lhs < c.rhs, "{c:?}");

    let c = young_inequality_check(&d("triangular:-1,0,1"), &d("uniform:0,1"), 1.0).unwrap();
    assert!(c.holds && (c.lhs - 1.0).abs() < 1e-6 && (c.rhs - 1.0).abs() < 1e-6, "{c:?}");
}

#[test]
fn identity_curve_matches_closed_form() {
    let g = d("gaussian:0,1");
    let grid = BoxRegion::interval(-3.0, 3.0).unwrap().grid(2049).unwrap();
    let ks = [1.0, 2.0, 4.0, 8.0, 16.0];
    let table = approximate_identity_curve(&g, &g, &BandwidthNorm::Sup(grid), &ks).unwrap();
    let errs: Vec<f64> = table.rows().iter().map(|r| r.measured_sup.unwrap()).collect();
    for (k, e) in ks.iter().zip(&errs) {
        let want = normal_pdf(0.0, 1.0) * (1.0 - (1.0 + k.powi(-2)).powf(-0.5));
        assert!((e - want).abs() < 1e-5, "k={k}: {e} vs {want}");
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]));

    let grid = BoxRegion::interval(-3.0, 3.0).unwrap().grid(65).unwrap();
    let single = approximate_identity_curve(&g, &g, &BandwidthNorm::Sup(grid), &[3.0]).unwrap();
    assert_eq!(single.len(), 1);
    assert_eq!(single.rows()[0].label("k"), Some(3.0));
}

#[test]
fn identity_curve_in_l1_for_a_discontinuous_target() {
    let table = approximate_identity_curve(
        &d("uniform:0,1"),
        &d("gaussian:0,1"),
        &BandwidthNorm::Lp { p: 1.0 },
        &[1.0, 4.0, 16.0, 64.0],
    )
    .unwrap();
    let errs: Vec<f64> = table.rows().iter().map(|r| r.measured_lp.unwrap()).collect();
    assert!(errs[3] < 0.05 && errs[3] < errs[0], "{errs:?}");
}

#[test]
fn identity_curve_rejects_bad_ks() {
    let g = d("gaussian:0,1");
    let norm = BandwidthNorm::Lp { p: 1.0 };
    assert!(matches!(approximate_identity_curve(&g, &g, &norm, &[]), Err(Error::InvalidParameter(_))));
    assert!(matches!(approximate_identity_curve(&g, &g, &norm, &[2.0, 1.0]), Err(Error::InvalidParameter(_))));
}

#[test]
fn sweep_certificate_shrinks_with_delta() {
    let g = d("gaussian:0,1");
    let target = SweepTarget::Uniform(BoxRegion::interval(-3.0, 3.0).unwrap());
    let settings = [(4.0, 0.4), (4.0, 0.2), (4.0, 0.1), (4.0, 0.05)];
    let table = convergence_sweep(&g, &g, &target, &settings, &ApproxOptions::default()).unwrap();
    assert_eq!(table.len(), 4);
    let bounds: Vec<f64> = table.rows().iter().map(|r| r.certified_bound.unwrap()).collect();
    assert!(bounds.windows(2).all(|w| w[1] <= w[0]), "{bounds:?}");
    for (row, (k, delta)) in table.rows().iter().zip(settings) {
        assert_eq!(row.label("k"), Some(k));
        assert_eq!(row.label("delta"), Some(delta));
    }
}

#[test]
fn sweep_reaches_a_small_sup_error() {
    let g = d("gaussian:0,1");
    let target = SweepTarget::Uniform(BoxRegion::interval(-3.0, 3.0).unwrap());
    let settings = [(4.0, 0.2), (8.0, 0.05), (16.0, 0.0125)];
    let table = convergence_sweep(&g, &g, &target, &settings, &ApproxOptions::default()).unwrap();
    let last = table.rows().last().unwrap().measured_sup.unwrap();
    assert!(last <= 0.01, "{last}");
}

#[test]
fn sweep_keeps_row_errors_and_rejects_empty_settings() {
    let g = d("gaussian:0,1");
    let target = SweepTarget::Uniform(BoxRegion::interval(-1.0, 1.0).unwrap());
    let opts = ApproxOptions {
        max_components: 10,
        ..ApproxOptions::default()
    };
    let table = convergence_sweep(&g, &g, &target, &[(1.0, 1.0), (1.0, 0.01)], &opts).unwrap();
    assert!(table.rows()[0].error.is_none());
    assert!(table.rows()[1].error.as_deref().unwrap().contains("budget"));
    assert!(matches!(
        convergence_sweep(&g, &g, &target, &[], &opts),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn sweep_in_lp_records_the_lp_error() {
    let g = d("gaussian:0,1");
    let table = convergence_sweep(&d("laplace:0,1"), &g, &SweepTarget::Lp { p: 1.0 }, &[(8.0, 0.1)], &ApproxOptions::default()).unwrap();
    let row = &table.rows()[0];
    assert!(row.error.is_none(), "{:?}", row.error);
    assert!(row.measured_lp.unwrap() < 0.2);
}

#[test]
fn csv_layout() {
    let row = |k: f64, err: Option<f64>| SweepRow {
        labels: vec![("k".into(), k), ("delta".into(), 0.1)],
        certified_bound: Some(0.5),
        measured_sup: err,
        measured_lp: None,
        m: Some(12),
        elapsed_s: 1.25,
        error: None,
    };
    let mut table = SweepTable::new(vec![row(1.0, Some(1.0 / 3.0)), row(2.0, None)]).unwrap();
    table.zero_timing();
    let csv = table.to_csv();
    let lines: Vec<&str> = csv.split('\n').collect();
    assert_eq!(lines[0], "k,delta,certified_bound,measured_sup,measured_lp,m,elapsed_s");
    assert_eq!(lines[1], "1,0.10000000000000001,0.5,0.33333333333333331,,12,0");
    assert_eq!(lines[2], "2,0.10000000000000001,0.5,,,12,0");
    assert!(!csv.contains('\r'));
}

#[test]
fn table_rejects_mismatched_labels() {
    let row = |key: &str| SweepRow {
        labels: vec![(key.into(), 1.0)],
        certified_bound: None,
        measured_sup: None,
        measured_lp: None,
        m: None,
        elapsed_s: 0.0,
        error: None,
    };
    assert!(SweepTable::new(vec![row("k"), row("delta")]).is_err());
    assert!(SweepTable::new(vec![]).is_err());
}

#[test]
fn g17_matches_printf() {
    for (v, want) in [
        (0.1, "0.10000000000000001"),
        (1.0, "1"),
        (1e-5, "1.0000000000000001e-05"),
        (123456.0, "123456"),
        (1e17, "1e+17"),
        (0.0, "0"),
        (-2.5, "-2.5"),
        (1e-4, "0.0001"),
    ] {
        assert_eq!(format_g17(v), want, "{v}");
    }
}
