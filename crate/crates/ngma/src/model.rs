//! Scenario construction, complex-vector arithmetic, and seeded channel
//! generation.
//!
//! Channels are stored once as column vectors; the downlink conjugate-transpose
//! row form `h_k^H` is realized through [`inner_product`], which is
//! conjugate-linear in its first argument. Random channels come from a
//! ChaCha8 stream cipher RNG seeded with a caller-provided `u64`, so generated
//! scenarios are bit-identical across platforms and runs.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{NgmaError, Result};

/// A non-empty vector of finite complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVec {
    entries: Vec<Complex64>,
}

impl ComplexVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(NgmaError::DimensionError("empty complex vector".into()));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(NgmaError::InvalidSpec("non-finite vector entry".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_reals(reals: &[f64]) -> Result<Self> {
        Self::new(reals.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> ComplexVec {
        ComplexVec {
            entries: self.entries.iter().map(|z| c * z).collect(),
        }
    }

    /// Unit-norm copy. Errors on (numerically) zero vectors.
    pub fn normalized(&self) -> Result<ComplexVec> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(NgmaError::ZeroChannel(0));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }
}

/// `a^H b`: conjugate-linear in `a`, linear in `b`.
pub fn inner_product(a: &ComplexVec, b: &ComplexVec) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(NgmaError::DimensionError(format!(
            "inner product of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// `|a^H b|^2` as a real power gain.
pub fn cross_gain(a: &ComplexVec, b: &ComplexVec) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr())
}

/// The world every rate formula reads: antenna count, user channels, noise
/// powers, and the transmit power budget.
#[derive(Debug, Clone)]
pub struct Scenario {
    n_antennas: usize,
    channels: Vec<ComplexVec>,
    noise_powers: Vec<f64>,
    power_budget: f64,
}

impl Scenario {
    pub fn new(
        n_antennas: usize,
        channels: Vec<ComplexVec>,
        noise_powers: Vec<f64>,
        power_budget: f64,
    ) -> Result<Self> {
        if n_antennas == 0 || channels.is_empty() {
            return Err(NgmaError::InvalidSpec(
                "need at least one antenna and one user".into(),
            ));
        }
        if channels.iter().any(|h| h.len() != n_antennas) {
            return Err(NgmaError::DimensionError(
                "channel length must equal antenna count".into(),
            ));
        }
        if noise_powers.len() != channels.len() {
            return Err(NgmaError::DimensionError(
                "one noise power per user required".into(),
            ));
        }
        if noise_powers.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(NgmaError::InvalidSpec(
                "noise powers must be strictly positive".into(),
            ));
        }
        if !(power_budget > 0.0) || !power_budget.is_finite() {
            return Err(NgmaError::InvalidSpec(
                "power budget must be strictly positive".into(),
            ));
        }
        Ok(Self {
            n_antennas,
            channels,
            noise_powers,
            power_budget,
        })
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn n_users(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, k: usize) -> &ComplexVec {
        &self.channels[k]
    }

    pub fn channels(&self) -> &[ComplexVec] {
        &self.channels
    }

    pub fn noise_power(&self, k: usize) -> f64 {
        self.noise_powers[k]
    }

    pub fn noise_powers(&self) -> &[f64] {
        &self.noise_powers
    }

    pub fn power_budget(&self) -> f64 {
        self.power_budget
    }

    /// Single receiver noise power for uplink evaluation. The uplink model has
    /// one AWGN source at the BS, so per-user noise lists with differing values
    /// are rejected.
    pub fn uplink_noise_power(&self) -> Result<f64> {
        let s0 = self.noise_powers[0];
        if self.noise_powers.iter().any(|&s| s != s0) {
            return Err(NgmaError::InvalidSpec(
                "uplink evaluation requires a single common noise power".into(),
            ));
        }
        Ok(s0)
    }
}

/// How the channel list of a [`Scenario`] is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    /// Each entry drawn i.i.d. circularly-symmetric complex Gaussian with unit
    /// variance per complex dimension.
    IidComplexGaussian,
    /// Two users with exactly parallel channels: `h_1 = c * h_2`.
    CorrelatedPair,
    /// `2C` users in `C` pairs: `h_i = c_i * h_{C+i}` for `i < C`.
    ClusteredCorrelated,
    /// Channels given verbatim.
    Explicit,
}

/// Channel generation recipe: kind, correlation constants, optional explicit
/// base channels, per-user amplitude gains, and the RNG seed.
#[derive(Debug, Clone)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    /// The `c` / `c_1, c_2` constants for the correlated kinds.
    pub correlation_constants: Vec<Complex64>,
    /// For `Explicit`: all channels. For the correlated kinds: optional base
    /// (weak-user) channels; drawn from the seed when absent.
    pub explicit_values: Vec<ComplexVec>,
    /// Optional per-user amplitude multiplier applied after generation.
    pub gains: Option<Vec<f64>>,
    pub seed: u64,
}

impl ChannelSpec {
    pub fn iid(seed: u64) -> Self {
        Self {
            kind: ChannelKind::IidComplexGaussian,
            correlation_constants: vec![],
            explicit_values: vec![],
            gains: None,
            seed,
        }
    }

    pub fn explicit(channels: Vec<ComplexVec>) -> Self {
        Self {
            kind: ChannelKind::Explicit,
            correlation_constants: vec![],
            explicit_values: channels,
            gains: None,
            seed: 0,
        }
    }

    pub fn correlated_pair(c: Complex64, seed: u64) -> Self {
        Self {
            kind: ChannelKind::CorrelatedPair,
            correlation_constants: vec![c],
            explicit_values: vec![],
            gains: None,
            seed,
        }
    }
}

fn draw_channel(rng: &mut ChaCha8Rng, n: usize) -> ComplexVec {
    // Unit variance per complex entry: each real component is N(0, 1/2).
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    ComplexVec { entries }
}

/// Builds a [`Scenario`] from a [`ChannelSpec`]. Deterministic for a fixed
/// seed.
pub fn generate_scenario(
    spec: &ChannelSpec,
    n_antennas: usize,
    n_users: usize,
    noise_powers: Vec<f64>,
    power_budget: f64,
) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut channels: Vec<ComplexVec> = match spec.kind {
        ChannelKind::Explicit => {
            if spec.explicit_values.len() != n_users {
                return Err(NgmaError::InvalidSpec(format!(
                    "explicit kind needs {} channels, got {}",
                    n_users,
                    spec.explicit_values.len()
                )));
            }
            spec.explicit_values.clone()
        }
        ChannelKind::IidComplexGaussian => (0..n_users)
            .map(|_| draw_channel(&mut rng, n_antennas))
            .collect(),
        ChannelKind::CorrelatedPair => {
            if n_users != 2 {
                return Err(NgmaError::InvalidSpec(
                    "correlated_pair requires exactly two users".into(),
                ));
            }
            let c = match spec.correlation_constants.as_slice() {
                [c] => *c,
                _ => {
                    return Err(NgmaError::InvalidSpec(
                        "correlated_pair requires exactly one correlation constant".into(),
                    ))
                }
            };
            let base = match spec.explicit_values.as_slice() {
                [] => draw_channel(&mut rng, n_antennas),
                [h] => h.clone(),
                _ => {
                    return Err(NgmaError::InvalidSpec(
                        "correlated_pair takes at most one base channel".into(),
                    ))
                }
            };
            vec![base.scale(c), base]
        }
        ChannelKind::ClusteredCorrelated => {
            let n_clusters = spec.correlation_constants.len();
            if n_clusters == 0 || n_users != 2 * n_clusters {
                return Err(NgmaError::InvalidSpec(
                    "clustered_correlated requires one constant per cluster pair (K = 2C)".into(),
                ));
            }
            let bases: Vec<ComplexVec> = if spec.explicit_values.is_empty() {
                (0..n_clusters)
                    .map(|_| draw_channel(&mut rng, n_antennas))
                    .collect()
            } else if spec.explicit_values.len() == n_clusters {
                spec.explicit_values.clone()
            } else {
                return Err(NgmaError::InvalidSpec(
                    "clustered_correlated needs one base channel per cluster".into(),
                ));
            };
            let mut out: Vec<ComplexVec> = spec
                .correlation_constants
                .iter()
                .zip(&bases)
                .map(|(&c, h)| h.scale(c))
                .collect();
            out.extend(bases);
            out
        }
    };

    if let Some(gains) = &spec.gains {
        if gains.len() != n_users {
            return Err(NgmaError::InvalidSpec(
                "one gain multiplier per user required".into(),
            ));
        }
        for (h, &g) in channels.iter_mut().zip(gains) {
            if !(g > 0.0) || !g.is_finite() {
                return Err(NgmaError::InvalidSpec(
                    "gain multipliers must be positive and finite".into(),
                ));
            }
            *h = h.scale(Complex64::new(g, 0.0));
        }
    }

    for h in &channels {
        if h.len() != n_antennas {
            return Err(NgmaError::DimensionError(
                "channel length must equal antenna count".into(),
            ));
        }
    }

    Scenario::new(n_antennas, channels, noise_powers, power_budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(entries: &[(f64, f64)]) -> ComplexVec {
        ComplexVec::new(entries.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap()
    }

    #[test]
    fn inner_product_orthogonal_basis() {
        let a = cv(&[(1.0, 0.0), (0.0, 0.0)]);
        let b = cv(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(inner_product(&a, &b).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn inner_product_norm_squared_identity() {
        let a = cv(&[(1.0, 1.0), (0.0, 0.0)]);
        let ip = inner_product(&a, &a).unwrap();
        assert_eq!(ip, Complex64::new(2.0, 0.0));
        assert_eq!(ip.norm(), a.norm_sqr());
    }

    #[test]
    fn inner_product_hand_expanded() {
        // conj([1, 2i]) . [3, 1] = 3 - 2i
        let a = cv(&[(1.0, 0.0), (0.0, 2.0)]);
        let b = cv(&[(3.0, 0.0), (1.0, 0.0)]);
        assert_eq!(inner_product(&a, &b).unwrap(), Complex64::new(3.0, -2.0));
    }

    #[test]
    fn inner_product_length_mismatch() {
        let a = cv(&[(1.0, 0.0)]);
        let b = cv(&[(1.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            inner_product(&a, &b),
            Err(NgmaError::DimensionError(_))
        ));
    }

    #[test]
    fn explicit_passthrough_orthogonal() {
        let spec = ChannelSpec::explicit(vec![
            cv(&[(1.0, 0.0), (0.0, 0.0)]),
            cv(&[(0.0, 0.0), (1.0, 0.0)]),
        ]);
        let s = generate_scenario(&spec, 2, 2, vec![1.0, 1.0], 1.0).unwrap();
        let ip = inner_product(s.channel(0), s.channel(1)).unwrap();
        assert_eq!(ip.norm(), 0.0);
    }

    #[test]
    fn correlated_pair_scales_base() {
        let mut spec = ChannelSpec::correlated_pair(Complex64::new(2.0, 0.0), 0);
        spec.explicit_values = vec![cv(&[(1.0, 0.0), (0.0, 1.0)])];
        let s = generate_scenario(&spec, 2, 2, vec![1.0, 1.0], 1.0).unwrap();
        assert_eq!(s.channel(0), &cv(&[(2.0, 0.0), (0.0, 2.0)]));
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let spec = ChannelSpec::iid(7);
        let a = generate_scenario(&spec, 4, 3, vec![1.0; 3], 1.0).unwrap();
        let b = generate_scenario(&spec, 4, 3, vec![1.0; 3], 1.0).unwrap();
        for k in 0..3 {
            assert_eq!(a.channel(k).entries(), b.channel(k).entries());
        }
    }

    #[test]
    fn correlated_pair_channels_exactly_parallel() {
        let spec = ChannelSpec::correlated_pair(Complex64::new(0.3, 1.7), 42);
        let s = generate_scenario(&spec, 3, 2, vec![1.0, 1.0], 1.0).unwrap();
        let cross = cross_gain(s.channel(0), s.channel(1)).unwrap();
        let prod = s.channel(0).norm_sqr() * s.channel(1).norm_sqr();
        assert!((cross - prod).abs() <= 1e-12 * prod);
    }

    #[test]
    fn rejects_zero_noise() {
        let spec = ChannelSpec::iid(1);
        assert!(matches!(
            generate_scenario(&spec, 2, 2, vec![1.0, 0.0], 1.0),
            Err(NgmaError::InvalidSpec(_))
        ));
    }

    #[test]
    fn correlated_kind_without_constant_rejected() {
        let spec = ChannelSpec {
            kind: ChannelKind::CorrelatedPair,
            correlation_constants: vec![],
            explicit_values: vec![],
            gains: None,
            seed: 0,
        };
        assert!(matches!(
            generate_scenario(&spec, 2, 2, vec![1.0, 1.0], 1.0),
            Err(NgmaError::InvalidSpec(_))
        ));
    }
}
