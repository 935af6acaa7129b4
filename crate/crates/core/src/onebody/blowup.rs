//! Blow-up detection on H^{1/2} time series, and the N-dependent
//! interaction cutoff alpha(N) = N^{-beta}.
//!
//! A fixed grid cannot follow a collapse to its blow-up time; detection
//! is declared when the norm crosses a threshold after rising
//! monotonically over a trailing window, and the threshold is part of the
//! verdict's provenance.

use super::OneBodyError;

#[derive(Debug, Clone)]
pub struct BlowupVerdict {
    pub blew_up: bool,
    /// Set iff `blew_up`.
    pub detection_time: Option<f64>,
    /// The monitored (t, H^{1/2} norm) series.
    pub h_half_series: Vec<(f64, f64)>,
}

/// Scan a (time, H^{1/2}) series for the first monotone crossing of
/// `threshold`: the norm must exceed the threshold after strictly rising
/// over the trailing `window` samples.
pub fn monitor_blowup(series: &[(f64, f64)], threshold: f64, window: usize) -> BlowupVerdict {
    for i in 0..series.len() {
        if series[i].1 <= threshold || i < window {
            continue;
        }
        let rising = (i - window..i).all(|j| series[j + 1].1 > series[j].1);
        if rising {
            return BlowupVerdict {
                blew_up: true,
                detection_time: Some(series[i].0),
                h_half_series: series.to_vec(),
            };
        }
    }
    BlowupVerdict { blew_up: false, detection_time: None, h_half_series: series.to_vec() }
}

/// The regularization cutoff alpha(N) = N^{-beta}, beta > 0.
pub fn regularization_alpha(n: u64, beta: f64) -> Result<f64, OneBodyError> {
    if !(beta > 0.0) {
        return Err(OneBodyError::BadBeta(beta));
    }
    Ok((n as f64).powf(-beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_never_blows_up() {
        let series: Vec<(f64, f64)> = (0..100).map(|i| (i as f64 * 0.1, 1.0)).collect();
        let v = monitor_blowup(&series, 10.0, 5);
        assert!(!v.blew_up);
        assert!(v.detection_time.is_none());
    }

    #[test]
    fn monotone_crossing_is_detected_at_first_time() {
        let series: Vec<(f64, f64)> = (0..100).map(|i| (i as f64 * 0.1, (0.1 * i as f64).exp())).collect();
        let v = monitor_blowup(&series, 20.0, 5);
        assert!(v.blew_up);
        let t = v.detection_time.unwrap();
        // first sample with value > 20: exp(0.1 i) > 20 at i = 30
        assert!((t - 3.0).abs() < 1e-12, "{t}");
    }

    #[test]
    fn spike_without_monotone_rise_is_ignored() {
        let mut series: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 1.0)).collect();
        series[30].1 = 100.0; // isolated spike, neighbors flat
        let v = monitor_blowup(&series, 20.0, 3);
        assert!(!v.blew_up);
    }

    #[test]
    fn alpha_schedule_arithmetic() {
        assert_eq!(regularization_alpha(1, 1.0).unwrap(), 1.0);
        assert!((regularization_alpha(16, 1.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for n in [1u64, 2, 4, 8, 16, 64, 256] {
            let a = regularization_alpha(n, 0.5).unwrap();
            assert!(a < prev || n == 1);
            prev = a;
        }
        assert!(regularization_alpha(4, 0.0).is_err());
        assert!(regularization_alpha(4, -1.0).is_err());
    }
}
