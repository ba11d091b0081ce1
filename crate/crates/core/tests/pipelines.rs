use kernel_extend::extension::{jodeit_bound, lp_extend, tau};
use kernel_extend::function::{extend, ClosedForm, DecayRule, Expr, FunctionSpec, GridConfig, SequenceSpec};
use kernel_extend::measure::{transfer, wiener_atom, TorusMeasure, DEFAULT_LAMBDAS, EPS_ATOM};
use kernel_extend::norms::{classify_s1, classify_s2, Space, Verdict};
use kernel_extend::{io, Error};
use num_complex::Complex64;

#[test]
fn spec_files_drive_an_extension() {
    let phi = io::parse_sequence_spec(r#"{"entries":{"-1":[0.5,0],"1":[0.5,0]},"support_radius":1}"#).unwrap();
    let k = io::parse_function_spec(r#"{"kind":"triangle","params":[0,1]}"#).unwrap();
    let w = extend(&phi, &k, &GridConfig::default()).unwrap();
    // Piecewise linear interpolation of φ: ½ at ±1, 0 at 0, linear in between.
    for (x, v) in w.iter() {
        let expected = match x.abs() {
            a if a <= 1.0 => 0.5 * a,
            a if a <= 2.0 => 0.5 * (2.0 - a),
            _ => 0.0,
        };
        assert!((v.re - expected).abs() < 1e-15, "ξ = {x}");
    }
}

#[test]
fn kernel_without_summable_periodization_is_rejected_with_evidence() {
    let sinc = FunctionSpec::from(Expr::sinc(1.0));
    let s2 = classify_s2(&sinc, &GridConfig::default()).unwrap();
    assert_eq!(s2.space, Space::S2);
    assert_ne!(s2.verdict, Verdict::Holds);
    match transfer(&TorusMeasure::dirac(0.0).unwrap(), &sinc, &GridConfig::default()) {
        Err(Error::Precondition { report: Some(r), .. }) => assert!(!r.holds()),
        other => panic!("expected a rejection, got {other:?}"),
    }
}

#[test]
fn transferred_atom_is_seen_by_wiener_averages() {
    let lambda = FunctionSpec::from(Expr::gaussian(1.0));
    let grid = GridConfig::default();
    assert!(classify_s1(&lambda, &grid).unwrap().holds());
    let nu = TorusMeasure::dirac(0.25).unwrap();
    let mu = transfer(&nu, &lambda, &grid).unwrap();
    // g = ĝ = e^{−πx²}; the atom at 1/4 carries e^{−π/16}.
    let expected = (-std::f64::consts::PI / 16.0).exp();
    assert!((mu.atom_at(0.25).re - expected).abs() < 1e-15);
    let spectrum = mu.fourier_transform(grid.tolerance).unwrap();
    let est = wiener_atom(|x| spectrum.eval(x), 0.25, &DEFAULT_LAMBDAS, EPS_ATOM).unwrap();
    assert!((est.estimate - Complex64::new(expected, 0.0)).norm() < 1e-3);
}

#[test]
fn extension_schemes_agree_on_w() {
    let grid = GridConfig::default();
    let s = FunctionSpec::from(Expr::raised_cosine(0.25, 0.75));
    let phi = SequenceSpec::closed(ClosedForm::new(DecayRule::Geometric { ratio: 0.5 })).unwrap();
    let a = jodeit_bound(&phi, &s, &grid).unwrap();
    let b = lp_extend(&phi, &s, 1.5, &[0.5, 0.9], &grid).unwrap();
    assert_eq!(a.w, b.w);
    let t = tau(&s, 1.0, &grid).unwrap();
    // ‖φ‖₁ = 3 for the two-sided geometric sequence with ratio ½.
    assert!((a.bound.value - 3.0 * t.value).abs() < 1e-9);
    let json = io::report_to_json(&b).unwrap();
    assert!(json.contains("\"q_hi\": \"6\""));
}
