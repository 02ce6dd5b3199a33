//! Riemann zeta function for real `s > 1`.

/// `B_{2k} / (2k)!` for `k = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
];

/// `ζ(s) = Σ_{r≥1} r^{-s}` by Euler–Maclaurin summation with ten explicit
/// terms; `NaN` for `s ≤ 1`.
pub fn zeta(s: f64) -> f64 {
    if !(s > 1.0) {
        return f64::NAN;
    }
    const N: f64 = 10.0;
    let head: f64 = (1..10).map(|n| (n as f64).powf(-s)).sum();
    let mut tail = N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    // Rising factorial s (s+1) ... (s+2k-2) times N^{-s-2k+1}.
    let mut rising = s;
    let mut power = N.powf(-s - 1.0);
    for (k, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail += c * rising * power;
        let m = 2.0 * k as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        power /= N * N;
    }
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn known_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(3.0) - 1.202_056_903_159_594_2).abs() < 1e-14);
        assert!(zeta(1.0).is_nan());
    }

    #[test]
    fn matches_direct_sum_near_one() {
        // Direct partial sum plus an integral tail estimate.
        let s = 1.25;
        let n = 2_000_000usize;
        let direct: f64 = (1..=n).map(|r| (r as f64).powf(-s)).sum::<f64>()
            + (n as f64).powf(1.0 - s) / (s - 1.0)
            - 0.5 * (n as f64).powf(-s);
        assert!((zeta(s) - direct).abs() / direct < 1e-9);
    }
}
