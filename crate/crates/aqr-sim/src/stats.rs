//! Replication-level summary statistics: paired accuracy differences and
//! normal Q-Q data.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::model::SimError;

/// Mean and standard error of the paired differences between two ISE
/// series from the same replications.
///
/// The standard error uses the paired-design denominator `(R−1)·R`, i.e.
/// `SE = √(Σ(dᵣ − d̄)² / ((R−1)·R))`.
pub fn diff_se(ise_bf: &[f64], ise_sbf: &[f64]) -> Result<(f64, f64), SimError> {
    if ise_bf.len() != ise_sbf.len() {
        return Err(SimError::LengthMismatch {
            expected: ise_bf.len(),
            got: ise_sbf.len(),
        });
    }
    let r = ise_bf.len();
    if r < 2 {
        return Err(SimError::TooFewValues { need: 2, got: r });
    }
    let diffs: Vec<f64> = ise_bf.iter().zip(ise_sbf).map(|(a, b)| a - b).collect();
    let mean = diffs.iter().sum::<f64>() / r as f64;
    let ss: f64 = diffs.iter().map(|d| (d - mean) * (d - mean)).sum();
    let se = (ss / ((r - 1) as f64 * r as f64)).sqrt();
    Ok((mean, se))
}

/// Normal Q-Q pairs for a replication sample: `(theoretical, sample)` with
/// theoretical plotting positions `Φ⁻¹((r − 1/2)/R)`.
///
/// The sample values are standardized by their sample mean and standard
/// deviation and then rescaled to the moments of the plotting positions, so
/// a perfectly normal sample lands on the identity line.  Correlation-based
/// diagnostics are unaffected by this affine convention.
pub fn qq_data(values: &[f64]) -> Result<Vec<(f64, f64)>, SimError> {
    let r = values.len();
    if r < 3 {
        return Err(SimError::TooFewValues { need: 3, got: r });
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let theoretical: Vec<f64> = (0..r)
        .map(|i| normal.inverse_cdf((i as f64 + 0.5) / r as f64))
        .collect();

    let moments = |xs: &[f64]| {
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        (mean, (ss / (xs.len() - 1) as f64).sqrt())
    };
    let (mean, sd) = moments(values);
    if !(sd > 0.0) {
        return Err(SimError::DegenerateValues);
    }
    let (t_mean, t_sd) = moments(&theoretical);

    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(theoretical
        .into_iter()
        .zip(sorted)
        .map(|(t, v)| (t, (v - mean) / sd * t_sd + t_mean))
        .collect())
}

/// Pearson correlation of paired samples.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, SimError> {
    if xs.len() != ys.len() {
        return Err(SimError::LengthMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(SimError::TooFewValues {
            need: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(SimError::DegenerateValues);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn identical_series_difference_is_exactly_zero() {
        let a = vec![0.3, 0.1, 0.7, 0.2];
        let (mean, se) = diff_se(&a, &a).unwrap();
        assert_eq!(mean, 0.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn constant_offset_has_zero_standard_error() {
        let a = vec![0.5, 0.9, 0.4, 1.3, 0.8];
        let b: Vec<f64> = a.iter().map(|v| v - 0.013).collect();
        let (mean, se) = diff_se(&a, &b).unwrap();
        assert_abs_diff_eq!(mean, 0.013, epsilon = 1e-15);
        assert_abs_diff_eq!(se, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn paired_standard_error_matches_hand_computation() {
        // Differences 1, 2, 3, 6: mean 3, squared deviations 4+1+0+9 = 14,
        // SE = √(14/(3·4)).
        let a = vec![2.0, 4.0, 6.0, 10.0];
        let b = vec![1.0, 2.0, 3.0, 4.0];
        let (mean, se) = diff_se(&a, &b).unwrap();
        assert_abs_diff_eq!(mean, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(se, (14.0f64 / 12.0).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn short_or_mismatched_series_are_rejected() {
        assert!(matches!(
            diff_se(&[1.0], &[2.0]),
            Err(SimError::TooFewValues { .. })
        ));
        assert!(matches!(
            diff_se(&[1.0, 2.0], &[2.0]),
            Err(SimError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn exact_normal_quantiles_sit_on_the_identity_line() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let r = 57;
        let values: Vec<f64> = (0..r)
            .map(|i| normal.inverse_cdf((i as f64 + 0.5) / r as f64))
            .collect();
        for (t, v) in qq_data(&values).unwrap() {
            assert_abs_diff_eq!(t, v, epsilon = 1e-12);
        }
    }

    #[test]
    fn qq_pairs_are_invariant_to_affine_input_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..40).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let shifted: Vec<f64> = values.iter().map(|v| 3.5 * v - 11.0).collect();
        let base = qq_data(&values).unwrap();
        let mapped = qq_data(&shifted).unwrap();
        for ((t1, v1), (t2, v2)) in base.iter().zip(&mapped) {
            assert_eq!(t1, t2);
            assert_abs_diff_eq!(*v1, *v2, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_or_tiny_qq_input_is_rejected() {
        assert!(matches!(
            qq_data(&[1.0, 2.0]),
            Err(SimError::TooFewValues { .. })
        ));
        assert!(matches!(
            qq_data(&[1.0, 1.0, 1.0, 1.0]),
            Err(SimError::DegenerateValues)
        ));
    }

    #[test]
    fn correlation_recovers_known_structure() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        let doubled: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let flipped: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_abs_diff_eq!(pearson(&xs, &doubled).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pearson(&xs, &flipped).unwrap(), -1.0, epsilon = 1e-12);
        assert!(matches!(
            pearson(&xs, &[1.0, 1.0, 1.0, 1.0]),
            Err(SimError::DegenerateValues)
        ));
    }
}
