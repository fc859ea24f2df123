//! Cross-module integration: every preset against every decoder kind, with
//! the transcript invariants the proof machinery relies on.

use qreduce::codes::{gv_distance, gv_distance_plus, DEFAULT_BUDGET};
use qreduce::field::FqVector;
use qreduce::presets;
use qreduce::reduction::{run_pipeline, DecoderSpec, Mode, QEstMode, ReductionParams};

fn params_for(preset: &presets::Preset, decoder: DecoderSpec, coin_bits: usize) -> ReductionParams {
    ReductionParams {
        q: preset.code.q(),
        n: preset.code.n(),
        k: preset.code.k(),
        t: preset.t,
        coin_bits,
        u_override: None,
        decoder,
        shots: 300,
        seed: 2024,
        mode: Mode::Exploratory,
        q_est_mode: QEstMode::ExactPerCode,
        amplify: true,
        budget: DEFAULT_BUDGET,
    }
}

#[test]
fn presets_by_decoder_matrix() {
    for preset in [presets::repetition3(), presets::hamming6(), presets::ternary()] {
        for (decoder, coin_bits) in [
            (DecoderSpec::Exhaustive, 0usize),
            (DecoderSpec::Unreliable { epsilon_target: 0.5 }, 1),
            (DecoderSpec::Constant, 0),
        ] {
            let params = params_for(&preset, decoder, coin_bits);
            let tr = run_pipeline(&preset.code, &params).unwrap();

            // trace-distance lemma holds with the exact per-code quantities
            // (1e-7 slack: the inner-product distance has a sqrt-eps floor)
            assert!(
                tr.d_tr_decode <= tr.d_tr_bound + 1e-7,
                "{} {:?}: {} > {}",
                preset.name,
                decoder,
                tr.d_tr_decode,
                tr.d_tr_bound
            );
            // QFT is unitary: the distance is unchanged
            assert!((tr.d_tr_qft - tr.d_tr_decode).abs() < 1e-7);

            // unique-decoding fixtures have no collision excess
            assert_eq!(tr.x_collision, 0.0, "{}", preset.name);
            let coin_q_k =
                (1u64 << coin_bits) as f64 * (preset.code.q() as f64).powi(preset.code.k() as i32);
            assert!((tr.z - coin_q_k).abs() < 1e-9);

            // the simulated measurement formula matches the closed form
            assert!(tr.lemma_measure_max_dev <= 1e-8);

            // every recorded shot is re-verified against the generator rows
            for s in &tr.samples {
                let v = FqVector::from_residues(preset.code.q(), s.c_perp.clone()).unwrap();
                let verified = preset
                    .code
                    .generator()
                    .mul_vector(&v)
                    .unwrap()
                    .is_zero();
                assert_eq!(s.in_dual, verified);
                assert_eq!(s.success, verified && s.weight == tr.selected_u);
                assert_eq!(s.weight, v.hamming_weight());
            }

            // per-shot distributions sum to one
            let total: f64 = tr.weight_dist_final.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
            let total: f64 = tr.weight_dist_ideal_qft.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn perfect_decoding_measures_only_dual_words() {
    // with an exhaustive decoder inside unique decoding, the word register
    // collapses onto the dual code: every shot verifies membership
    for preset in [presets::repetition3(), presets::hamming6(), presets::ternary()] {
        let params = params_for(&preset, DecoderSpec::Exhaustive, 0);
        let tr = run_pipeline(&preset.code, &params).unwrap();
        assert_eq!(tr.dual_member_count, tr.shots, "{}", preset.name);
    }
}

#[test]
fn strict_selection_with_exact_estimate_amplifies_to_certainty() {
    // when the targeted weight is populated in the specific dual code, the
    // exact per-code estimate closes the rotation and every shot succeeds.
    // The self-dual tetracode has no weight-4 dual words, so its run forces
    // u = 3 (which still passes the strict assumption).
    let cases = [
        (presets::repetition3(), None, 2usize),
        (presets::hamming6(), None, 4),
        (presets::ternary(), Some(3usize), 3),
    ];
    for (preset, u_override, expected_u) in cases {
        let mut params = params_for(&preset, DecoderSpec::Exhaustive, 0);
        params.mode = Mode::Strict;
        params.u_override = u_override;
        let tr = run_pipeline(&preset.code, &params).unwrap();
        assert_eq!(tr.selected_u, expected_u, "{}", preset.name);
        assert!(tr.amplified, "{}", preset.name);
        assert_eq!(tr.success_count, tr.shots, "{}", preset.name);
    }
}

#[test]
fn unpopulated_target_weight_degrades_gracefully() {
    // exploratory selection on the repetition code picks the raw maximizer
    // u = 3, a weight its dual does not contain: no amplification, zero
    // successes, but the transcript and samples stay coherent
    let preset = presets::repetition3();
    let params = params_for(&preset, DecoderSpec::Exhaustive, 0);
    let tr = run_pipeline(&preset.code, &params).unwrap();
    assert_eq!(tr.selected_u, 3);
    assert_eq!(tr.q_est, 0.0);
    assert!(!tr.amplified);
    assert_eq!(tr.success_count, 0);
    assert_eq!(tr.dual_member_count, tr.shots);
}

#[test]
fn forced_u_override_reports_its_assumption() {
    let preset = presets::hamming6();
    let mut params = params_for(&preset, DecoderSpec::Exhaustive, 0);
    params.u_override = Some(4);
    let tr = run_pipeline(&preset.code, &params).unwrap();
    assert_eq!(tr.selected_u, 4);
    assert_eq!(tr.assumption.u, 4);
}

#[test]
fn dual_weight_band_is_ordered() {
    // the hard band of the dual code: gv(n, n-k) <= u < (q-1)k/q, and the
    // upper GV weight dominates the lower one
    for (q, n, k) in [(2u32, 6usize, 3usize), (2, 10, 5), (3, 8, 4)] {
        let lo = gv_distance(q, n, n - k);
        let hi = gv_distance_plus(q, n, n - k);
        assert!(lo <= hi);
        let band_high = (q as f64 - 1.0) / q as f64 * k as f64;
        assert!(band_high > 0.0);
    }
}
