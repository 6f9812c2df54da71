use weyl_core::classes::{make_test_symbol, ClassSpec, TestKind};
use rand::SeedableRng;
use weyl_core::grid::{Field, PhaseGrid, SymbolField};
use weyl_core::symbols::random_gaussian_mix;
use weyl_core::io::{read_binary, write_binary, Precision, Stored};
use weyl_core::quantization::{build_kernel, convert_quantization};
use weyl_core::schatten::{schatten_norm, singular_values, weyl_schatten};
use weyl_core::verify::{run_suite, ExperimentConfig, Report};

/// Samples only, so kernels interpolate midpoints the same way after storage or conversion.
fn symbol() -> SymbolField {
    let spec: ClassSpec = "-2,-2,1,1,0,0".parse().unwrap();
    make_test_symbol(PhaseGrid::new(1, 4.0, 64).unwrap(), &spec, TestKind::Oscillatory { omega: 1.0 })
        .unwrap()
        .without_generator()
}

#[test]
fn stored_symbol_keeps_its_schatten_norms() {
    let a = symbol();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.wfld");
    write_binary(&path, &Stored::Symbol(a.clone()), Precision::Double).unwrap();
    let Stored::Symbol(b) = read_binary(&path).unwrap() else { panic!("wrong kind") };
    assert!(b.values() == a.values());
    for p in [1.0, 2.0, f64::INFINITY] {
        assert_eq!(weyl_schatten(&a, p).unwrap(), weyl_schatten(&b, p).unwrap());
    }
}

#[test]
fn quantization_round_trip_preserves_the_spectrum() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let grid = PhaseGrid::new(1, 8.0, 64).unwrap();
    let a = SymbolField::from_generator(grid, random_gaussian_mix(2, &mut rng)).unwrap().without_generator();
    let s_weyl = singular_values(&build_kernel(&a, 0.5).unwrap()).unwrap();
    let b = convert_quantization(&a, 0.5, 0.0).unwrap();
    let s_kn = singular_values(&build_kernel(&b, 0.0).unwrap()).unwrap();
    let back = convert_quantization(&b, 0.0, 0.5).unwrap();
    let gap = back.values().iter().zip(a.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(gap < 1e-10, "{gap}");
    let (x, y) = (schatten_norm(&s_weyl, 2.0).unwrap(), schatten_norm(&s_kn, 2.0).unwrap());
    assert!((x - y).abs() < 1e-8 * x, "{x} {y}");
}

#[test]
fn report_json_round_trips() {
    let mut c = ExperimentConfig::default_for("symplectic-eigen").unwrap();
    c.cases = Some(2);
    let r = run_suite(&c).unwrap();
    let back: Report = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(back.cases, r.cases);
    assert_eq!(back.verdicts, r.verdicts);
    assert_eq!(back.config, c);
}
