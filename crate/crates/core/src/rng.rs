//! Artifact-wide deterministic random number generator.
//!
//! Every random draw in the toolkit flows through [`SplitMix64`]: codec
//! weight initialization, camera sampling, trajectory simulation, and any
//! noise used by tests. SplitMix64 was chosen because the whole generator is
//! four integer operations per output — trivially reproducible in any
//! language — and a single `u64` of state seeds it completely.
//!
//! Derived draws use fixed, documented mappings so that streams are stable:
//!
//! * `next_f64` — `(next_u64() >> 11) / 2^53`, uniform in `[0, 1)`;
//! * `uniform(lo, hi)` — `lo + next_f64() * (hi - lo)`; a degenerate range
//!   `lo == hi` still consumes one draw and returns exactly `lo`;
//! * `normal()` — Box–Muller: two uniforms `u1, u2` (in that order), result
//!   `sqrt(-2 ln(1 - u1)) * cos(2π u2)`. Each call consumes exactly two
//!   draws; the sine partner is discarded so the stream layout stays flat.

/// SplitMix64 pseudo-random generator (public-domain algorithm by Steele,
/// Lea and Flood). State advances by the 64-bit golden-ratio constant; each
/// output is a finalizing mix of the new state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`. Consumes one draw even when `lo == hi`, in
    /// which case it returns exactly `lo`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }

    /// Standard normal via Box–Muller; consumes exactly two draws.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        // 1 - u1 is in (0, 1], so the log is finite.
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// First outputs for seed 0, cross-checked against an independent
    /// implementation of the published algorithm.
    #[test]
    fn reference_vectors_seed_zero() {
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn streams_are_reproducible() {
        let mut a = SplitMix64::new(0x360A_11CE);
        let mut b = SplitMix64::new(0x360A_11CE);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn next_f64_in_unit_interval() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..10_000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x), "x={x}");
        }
    }

    #[test]
    fn degenerate_uniform_returns_lo_exactly() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..100 {
            assert_eq!(rng.uniform(90.0, 90.0), 90.0);
        }
    }

    #[test]
    fn normal_moments_are_sane() {
        let mut rng = SplitMix64::new(42);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let z = rng.normal();
            sum += z;
            sum2 += z * z;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.02, "mean={mean}");
        assert!((var - 1.0).abs() < 0.03, "var={var}");
    }
}
