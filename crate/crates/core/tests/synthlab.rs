use std::time::Instant;

use oversmooth::osmetrics::{frame_metrics, MetricConfig, OversmoothingFrame};
use oversmooth::synthlab::{run_suite, DegradationKind, SuiteConfig};
use oversmooth::Result;

#[test]
fn default_suite_passes_and_is_fast() {
    let start = Instant::now();
    let report = run_suite(&SuiteConfig::default()).unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "{elapsed:?}");
    for p in report.properties.iter().filter(|p| p.gated) {
        assert!(p.passed(), "{p:?}");
    }
    assert!(report.all_passed());

    for metric in ["hqer", "cslope", "ccentroid", "croll95"] {
        let name = format!("framewise_monotone_{metric}");
        let blur = report.property(&name, Some(DegradationKind::MelGaussianBlur)).unwrap();
        assert_eq!(blur.checked, 100 * 60 * 4);
        assert_eq!(blur.violations, 0);
    }
    // 5 widths and 4 shrink factors per kind
    assert_eq!(report.sweep.len(), 5 + 5 + 4);
}

/// The boxcar's transfer function has sidelobes, so individual frames can
/// gain high-quefrency power as the width grows. Pinned so a change in the
/// filter or the noise generator is noticed.
#[test]
fn boxcar_framewise_violations_are_characterized() {
    let report = run_suite(&SuiteConfig::default()).unwrap();
    let counts: Vec<usize> = ["hqer", "cslope", "ccentroid", "croll95"]
        .iter()
        .map(|m| {
            let p = report
                .property(
                    &format!("framewise_monotone_{m}"),
                    Some(DegradationKind::MelMovingAverage),
                )
                .unwrap();
            assert!(!p.gated);
            p.violations
        })
        .collect();
    assert_eq!(counts, vec![1379, 6452, 384, 2701]);
}

fn growing_hqer(p: &[f64], cfg: &MetricConfig) -> Result<OversmoothingFrame> {
    let mut f = frame_metrics(p, cfg)?;
    // reward smoothness instead of penalizing it
    f.hqer = 1.0 - f.hqer;
    Ok(f)
}

#[test]
fn faulty_metric_is_caught() {
    let cfg = SuiteConfig {
        n_spectrograms: 10,
        metric_fn: growing_hqer,
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg).unwrap();
    assert!(!report.all_passed());
    let p = report
        .property("framewise_monotone_hqer", Some(DegradationKind::MelGaussianBlur))
        .unwrap();
    assert!(p.violations > 0);
}
