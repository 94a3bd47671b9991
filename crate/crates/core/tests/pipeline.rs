use std::collections::BTreeSet;

use zm_core::discriminant::DiscriminantModel;
use zm_core::pearson3::ThresholdTable;
use zm_core::pipeline::{run_pipeline, score_new};
use zm_core::synth::{generate, SyntheticConfig};
use zm_core::toy;

fn data() -> Vec<zm_core::transform::RatioRecord> {
    generate(&SyntheticConfig { records: 900, industries: 6, seed: 77, ..Default::default() })
}

#[test]
fn one_output_per_input_in_order() {
    let data = data();
    let out = run_pipeline(&data, None, &ThresholdTable::default()).unwrap();
    assert_eq!(out.records.len(), data.len());
    for (rec, input) in out.records.iter().zip(&data) {
        assert_eq!(&rec.input, input);
    }
    let industries: BTreeSet<u32> = data.iter().map(|r| r.industry).collect();
    assert_eq!(out.fits.keys().copied().collect::<BTreeSet<_>>(), industries);
}

#[test]
fn reruns_are_identical() {
    let data = data();
    let a = run_pipeline(&data, None, &ThresholdTable::default()).unwrap();
    let b = run_pipeline(&data, None, &ThresholdTable::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn industries_do_not_interact_under_fixed_weights() {
    let data = data();
    let model = DiscriminantModel::from_weights(toy::PUBLISHED_WEIGHTS.to_vec());
    let full = run_pipeline(&data, Some(&model), &ThresholdTable::default()).unwrap();
    let subset: Vec<_> = data.iter().filter(|r| r.industry % 2 == 0).cloned().collect();
    let part = run_pipeline(&subset, Some(&model), &ThresholdTable::default()).unwrap();
    let expected: Vec<_> = full.records.into_iter().filter(|r| r.input.industry % 2 == 0).collect();
    assert_eq!(part.records, expected);
}

#[test]
fn higher_score_never_gets_a_worse_grade_within_an_industry() {
    let out = run_pipeline(&data(), None, &ThresholdTable::default()).unwrap();
    for &industry in out.fits.keys() {
        let mut recs: Vec<_> = out.records.iter().filter(|r| r.input.industry == industry).collect();
        recs.sort_by(|a, b| a.z_m.total_cmp(&b.z_m));
        for w in recs.windows(2) {
            assert!(w[0].h <= w[1].h);
            assert!(w[0].grade <= w[1].grade);
        }
    }
}

#[test]
fn scoring_held_out_records_uses_stored_fits() {
    let data = data();
    let (train, test) = data.split_at(600);
    let fitted = run_pipeline(train, None, &ThresholdTable::default()).unwrap();
    let scored = score_new(test, &fitted.model, &fitted.fits, &ThresholdTable::default()).unwrap();
    assert_eq!(scored.len(), test.len());
    for r in &scored {
        assert_eq!(r.industry_fit, fitted.fits[&r.input.industry].params);
    }
}
