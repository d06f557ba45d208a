use oversmooth::cepstral::{mel_cepstrogram, quefrency_power, MelWindow};
use oversmooth::spectral::LogMelSpectrogram;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn single(frame: Vec<f64>) -> LogMelSpectrogram {
    LogMelSpectrogram::from_frames(&[frame], None).unwrap()
}

fn frame_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-12.0f64..3.0, 80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn constant_offset_leaves_power_unchanged(frame in frame_strategy(), offset in -20.0f64..20.0) {
        let p = quefrency_power(&mel_cepstrogram(&single(frame.clone())).unwrap());
        let shifted: Vec<f64> = frame.iter().map(|v| v + offset).collect();
        let q = quefrency_power(&mel_cepstrogram(&single(shifted)).unwrap());
        let scale = p.power.iter().sum::<f64>().max(1.0);
        for (a, b) in p.power.iter().zip(&q.power) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn power_satisfies_parseval(frame in frame_strategy()) {
        let c = mel_cepstrogram(&single(frame.clone())).unwrap();
        let p = quefrency_power(&c);
        let mean = frame.iter().sum::<f64>() / 80.0;
        let window = MelWindow::Symmetric.coefficients(80);
        let energy: f64 = frame.iter().zip(&window).map(|(v, w)| ((v - mean) * w).powi(2)).sum();
        // one-sided spectrum of an even-length real frame: interior bins count twice
        let col = p.column(0);
        let spectral = (col[0] + col[40] + 2.0 * col[1..40].iter().sum::<f64>()) / 80.0;
        prop_assert!((spectral - energy).abs() <= 1e-6 * energy);
        prop_assert!(col.iter().all(|v| v.is_finite() && *v >= 0.0));
        prop_assert_eq!(c.frame(0)[0].im, 0.0);
    }
}

/// After mean removal the Hann window reintroduces a DC term of
/// `Σ (x_b - mean) w_b`; for white input it is small on average but not on
/// every frame, so the bound is checked as a high quantile.
#[test]
fn dc_share_is_small_on_white_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA5C);
    let frames: Vec<Vec<f64>> = (0..2000)
        .map(|_| (0..80).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let p = quefrency_power(&mel_cepstrogram(&LogMelSpectrogram::from_frames(&frames, None).unwrap()).unwrap());
    let shares: Vec<f64> = p.columns().map(|c| c[0] / c.iter().sum::<f64>()).collect();
    let over = shares.iter().filter(|&&s| s >= 0.05).count();
    let mean = shares.iter().sum::<f64>() / shares.len() as f64;
    assert!(mean < 0.02, "mean DC share {mean}");
    assert!(
        over * 100 <= 3 * shares.len(),
        "{over} of {} frames at or above 0.05",
        shares.len()
    );
}
