use zygmund_core::basis::{auto_cd, theorem2_family};
use zygmund_core::maximal::{maximal_eval, orlicz_rhs, superlevel_lower_bound, TestFunction};
use zygmund_core::measure::{sparseness_witness, union_volume, MeasureMode, WitnessOrder};
use zygmund_core::{box_volume, DyadicRational};

#[test]
fn family_union_witness_and_maximal_agree() {
    let (d, k) = (4u32, 12u64);
    let fam = theorem2_family(d, k, auto_cd(d, k).unwrap()).unwrap();
    let boxes = fam.boxes().unwrap();

    let fast = union_volume(&boxes, MeasureMode::Certified, 128).unwrap();
    let wide = union_volume(&boxes, MeasureMode::Certified, 256).unwrap();
    assert!((fast.to_f64() - wide.to_f64()).abs() <= fast.error_bound + wide.error_bound);

    let vols: Vec<f64> = boxes.iter().map(|b| box_volume(b, 128).to_f64()).collect();
    let max = vols.iter().cloned().fold(0.0, f64::max);
    let sum: f64 = vols.iter().sum();
    assert!(max <= fast.to_f64() && fast.to_f64() <= sum);

    let w = sparseness_witness(&boxes, &WitnessOrder::LexDescending, MeasureMode::Certified, 128).unwrap();
    let parts: f64 = w.witness.iter().map(|m| m.to_f64()).sum();
    assert!((parts - fast.to_f64()).abs() < 1e-9 * fast.to_f64());
    assert!(w.c_min.to_f64() > 0.0);

    let f = TestFunction::new(d as usize, k as u32);
    let one = DyadicRational::from_i64(1);
    let level = superlevel_lower_bound(&boxes, &f, &one, MeasureMode::Certified, 128).unwrap();
    assert!((level.to_f64() - fast.to_f64()).abs() <= 2.0 * fast.error_bound);

    let origin = vec![DyadicRational::from_i64(0); d as usize];
    assert!(maximal_eval(&origin, &boxes, &f, 128).unwrap().to_f64() >= 1.0);
}

#[test]
fn orlicz_side_at_small_scale() {
    let f = TestFunction::new(4, 1);
    let r = orlicz_rhs(&f, 1.0, 128).unwrap().to_f64();
    assert!((r - (1f64.exp() + 16.0).ln()).abs() < 1e-12);
    assert_eq!(orlicz_rhs(&f, 0.0, 128).unwrap().to_f64(), 1.0);
}
