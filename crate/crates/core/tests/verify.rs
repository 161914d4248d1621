//! The verification oracles through the public API.

use ot_tension::verify::suites::{epsilon_observation, lemma4_suite, ot_alpha_suite};
use ot_tension::verify::{
    brute_force_alpha, lemma1_case_check, lemma4_appendix_check, lemma4_residual, ot_correlation,
    SubadditivityCase,
};
use ot_tension::{
    alpha_joint, conditional_entropy, mutual_information, Channel, Coupling, JointDist,
    OptimizerOptions, ProbVector,
};

#[test]
fn ot_correlation_identities() {
    let ot = ot_correlation(2).unwrap();
    assert_eq!((ot.joint.rows(), ot.joint.cols()), (16, 8));
    assert!((conditional_entropy(&ot.joint.transpose()) - 1.0).abs() < 1e-12);
    assert!((mutual_information(&ot.joint) - 2.0).abs() < 1e-12);
}

#[test]
fn lemma4_special_couplings_for_two_bit_strings() {
    let ot = ot_correlation(2).unwrap();
    for c in [Coupling::constant(16, 3), Coupling::copy(16, 16)] {
        assert!(lemma4_residual(&ot, &c).unwrap().abs() < 1e-12);
        assert!(lemma4_appendix_check(&ot, &c).unwrap() >= -1e-9);
    }
}

#[test]
fn lemma4_random_sampling_small() {
    for m in [1, 2] {
        for r in lemma4_suite(500, 11, m).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }
}

#[test]
fn alpha_of_ot_correlation_is_string_length() {
    let r = ot_alpha_suite(3, &OptimizerOptions::default()).unwrap();
    assert!(r.pass, "{r:?}");
    let ot = ot_correlation(2).unwrap();
    let opts = OptimizerOptions {
        restarts: 4,
        ..Default::default()
    };
    let v = alpha_joint(&ot.joint, 18, &opts).unwrap().value;
    assert!((2.0 - 1e-6..=2.0 + 1e-9).contains(&v), "{v}");
}

#[test]
fn brute_force_examples() {
    let indep = JointDist::independent(
        &ProbVector::binary(0.2).unwrap(),
        &ProbVector::binary(0.7).unwrap(),
    );
    assert!(brute_force_alpha(&indep, 2, 64).unwrap().abs() < 1e-12);
    let copy = JointDist::diagonal(&ProbVector::uniform(2));
    assert!(brute_force_alpha(&copy, 2, 64).unwrap().abs() < 1e-12);
    let j = JointDist::from_rows(vec![vec![0.3, 0.2], vec![0.05, 0.45]]).unwrap();
    let coarse = brute_force_alpha(&j, 2, 64).unwrap();
    let fine = brute_force_alpha(&j, 2, 256).unwrap();
    assert!(fine <= coarse && coarse - fine <= 5e-3);
}

#[test]
fn optimizer_agrees_with_oracle() {
    let j = JointDist::from_rows(vec![vec![0.3, 0.2], vec![0.05, 0.45]]).unwrap();
    let opt = alpha_joint(&j, 6, &OptimizerOptions::default())
        .unwrap()
        .value;
    let oracle = brute_force_alpha(&j, 2, 256).unwrap();
    assert!(
        (opt - oracle).abs() < 5e-3 && opt <= oracle + 1e-12,
        "{opt} vs {oracle}"
    );
}

#[test]
fn lemma1_examples() {
    let base = JointDist::from_rows(vec![vec![0.35, 0.15], vec![0.1, 0.4]]).unwrap();
    let useless = SubadditivityCase {
        base_joint: base.clone(),
        xmap: vec![1, 0],
        ch: Channel::from_rows(vec![vec![0.6, 0.4], vec![0.6, 0.4]]).unwrap(),
    };
    let opts = OptimizerOptions::default();
    let out = lemma1_case_check(&useless, 2, &opts, 1e-9).unwrap();
    assert!(out.pass, "{out:?}");

    let indep = SubadditivityCase {
        base_joint: JointDist::independent(
            &ProbVector::binary(0.5).unwrap(),
            &ProbVector::binary(0.3).unwrap(),
        ),
        xmap: vec![0, 1],
        ch: Channel::from_rows(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap(),
    };
    let out = lemma1_case_check(&indep, 2, &opts, 1e-2).unwrap();
    assert!(out.pass && out.rhs >= 0.0, "{out:?}");
}

#[test]
fn epsilon_relaxation_is_observed_non_increasing() {
    let r = epsilon_observation(
        5,
        &OptimizerOptions {
            restarts: 8,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.residuals.len(), 4);
    assert!((r.residuals[0] - 1.0).abs() < 1e-6);
}
