//! Synthetic corpora.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(spec.seed)`, so a spec reproduces the same sequence on every
//! platform.

use std::path::PathBuf;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Uniform,
    Zipf,
    Markov,
    Periodic,
    File,
}

impl std::str::FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(SourceKind::Uniform),
            "zipf" => Ok(SourceKind::Zipf),
            "markov" => Ok(SourceKind::Markov),
            "periodic" => Ok(SourceKind::Periodic),
            "file" => Ok(SourceKind::File),
            other => Err(format!("unknown source kind {other:?}")),
        }
    }
}

fn default_skew() -> f64 {
    1.0
}

fn default_noise() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub kind: SourceKind,
    /// Alphabet size `n`; symbols are `0..n`.
    #[serde(default)]
    pub alphabet: usize,
    /// Sequence length `m`.
    #[serde(default)]
    pub length: usize,
    /// Markov order.
    #[serde(default)]
    pub order: usize,
    /// Zipf exponent.
    #[serde(default = "default_skew")]
    pub skew: f64,
    /// Markov: probability of replacing the scheduled successor by a uniform
    /// draw.
    #[serde(default = "default_noise")]
    pub noise: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl SourceSpec {
    fn base(kind: SourceKind, alphabet: usize, length: usize, seed: u64) -> Self {
        SourceSpec {
            kind,
            alphabet,
            length,
            order: 0,
            skew: default_skew(),
            noise: default_noise(),
            pattern: None,
            path: None,
            seed,
        }
    }

    pub fn uniform(alphabet: usize, length: usize, seed: u64) -> Self {
        Self::base(SourceKind::Uniform, alphabet, length, seed)
    }

    pub fn zipf(alphabet: usize, length: usize, skew: f64, seed: u64) -> Self {
        SourceSpec {
            skew,
            ..Self::base(SourceKind::Zipf, alphabet, length, seed)
        }
    }

    pub fn markov(alphabet: usize, length: usize, order: usize, noise: f64, seed: u64) -> Self {
        SourceSpec {
            order,
            noise,
            ..Self::base(SourceKind::Markov, alphabet, length, seed)
        }
    }

    pub fn periodic(pattern: &str, length: usize) -> Self {
        let alphabet = {
            let mut cs: Vec<char> = pattern.chars().collect();
            cs.sort_unstable();
            cs.dedup();
            cs.len()
        };
        SourceSpec {
            pattern: Some(pattern.to_owned()),
            ..Self::base(SourceKind::Periodic, alphabet, length, 0)
        }
    }

    pub fn file(path: impl Into<PathBuf>) -> Self {
        SourceSpec {
            path: Some(path.into()),
            ..Self::base(SourceKind::File, 0, 0, 0)
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self.kind {
            SourceKind::Uniform => {
                format!("uniform-n{}-m{}-s{}", self.alphabet, self.length, self.seed)
            }
            SourceKind::Zipf => {
                format!(
                    "zipf{}-n{}-m{}-s{}",
                    self.skew, self.alphabet, self.length, self.seed
                )
            }
            SourceKind::Markov => format!(
                "markov{}-n{}-m{}-e{}-s{}",
                self.order, self.alphabet, self.length, self.noise, self.seed
            ),
            SourceKind::Periodic => format!(
                "periodic-{}-m{}",
                self.pattern.as_deref().unwrap_or_default(),
                self.length
            ),
            SourceKind::File => format!(
                "file-{}",
                self.path
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default()
            ),
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        let bad = |why: &str| Err(BenchError::InvalidSpec(why.to_owned()));
        match self.kind {
            SourceKind::File => {
                if self.path.is_none() {
                    return bad("file source needs a path");
                }
                return Ok(());
            }
            SourceKind::Periodic => {
                if self.pattern.as_deref().is_none_or(str::is_empty) {
                    return bad("periodic source needs a non-empty pattern");
                }
            }
            _ => {
                if self.alphabet == 0 {
                    return bad("alphabet size must be at least 1");
                }
                if self.alphabet > u32::MAX as usize {
                    return bad("alphabet too large");
                }
            }
        }
        if self.length == 0 {
            return bad("length must be at least 1");
        }
        if self.kind == SourceKind::Zipf && !(self.skew.is_finite() && self.skew > 0.0) {
            return bad("zipf skew must be positive and finite");
        }
        if self.kind == SourceKind::Markov && !(0.0..=1.0).contains(&self.noise) {
            return bad("markov noise must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Produces the sequence a spec describes.
pub fn generate(spec: &SourceSpec) -> Result<Vec<u32>, BenchError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.alphabet as u32;
    let m = spec.length;
    Ok(match spec.kind {
        SourceKind::Uniform => (0..m).map(|_| rng.random_range(0..n)).collect(),
        SourceKind::Zipf => {
            let weights: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-spec.skew)).collect();
            let dist =
                WeightedIndex::new(&weights).map_err(|e| BenchError::InvalidSpec(e.to_string()))?;
            (0..m).map(|_| dist.sample(&mut rng) as u32).collect()
        }
        SourceKind::Markov => markov(spec, &mut rng),
        SourceKind::Periodic => {
            let pattern: Vec<u32> = spec
                .pattern
                .as_deref()
                .unwrap_or_default()
                .chars()
                .map(u32::from)
                .collect();
            pattern.iter().copied().cycle().take(m).collect()
        }
        SourceKind::File => {
            let path = spec.path.as_ref().expect("validated");
            std::fs::read(path)?.into_iter().map(u32::from).collect()
        }
    })
}

/// Order-k chain whose scheduled successor is a permutation of the last
/// symbol, offset by a hash of the earlier ones. The transition matrix is
/// doubly stochastic, so symbols stay close to uniform (high `H₀`) while the
/// order-k entropy is about `h(noise) + noise·log2 n`.
fn markov(spec: &SourceSpec, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let n = spec.alphabet as u32;
    let k = spec.order;
    let mut perm: Vec<u32> = (0..n).collect();
    perm.shuffle(rng);
    let mixers: Vec<u64> = (0..k).map(|_| rng.random::<u64>() | 1).collect();
    let mut out: Vec<u32> = Vec::with_capacity(spec.length);
    for i in 0..spec.length {
        let next = if i < k || rng.random_bool(spec.noise) || k == 0 {
            rng.random_range(0..n)
        } else {
            let ctx = &out[i - k..i];
            let offset = ctx[..k - 1]
                .iter()
                .zip(&mixers)
                .fold(0u64, |acc, (&s, &mx)| {
                    acc.wrapping_add((s as u64 + 1).wrapping_mul(mx))
                });
            let last = ctx[k - 1] as u64;
            perm[((last + offset % n as u64) % n as u64) as usize]
        };
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::profile;

    #[test]
    fn periodic_repeats_pattern() {
        let s = generate(&SourceSpec::periodic("abc", 9)).unwrap();
        let text: String = s.into_iter().map(|c| char::from_u32(c).unwrap()).collect();
        assert_eq!(text, "abcabcabc");
    }

    #[test]
    fn single_symbol_uniform_is_constant() {
        let s = generate(&SourceSpec::uniform(1, 50, 7)).unwrap();
        assert!(s.iter().all(|&x| x == 0));
        assert_eq!(profile(&s, 0).h[0], 0.0);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        for spec in [
            SourceSpec::uniform(16, 500, 3),
            SourceSpec::zipf(16, 500, 1.2, 3),
            SourceSpec::markov(16, 500, 2, 0.1, 3),
        ] {
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
            let other = SourceSpec {
                seed: 4,
                ..spec.clone()
            };
            assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
        }
    }

    #[test]
    fn symbols_stay_in_alphabet() {
        for spec in [
            SourceSpec::uniform(5, 1000, 1),
            SourceSpec::zipf(5, 1000, 2.0, 1),
            SourceSpec::markov(5, 1000, 3, 0.2, 1),
        ] {
            assert!(generate(&spec).unwrap().iter().all(|&x| x < 5));
        }
    }

    #[test]
    fn near_deterministic_markov_has_low_conditional_entropy() {
        let s = generate(&SourceSpec::markov(16, 20_000, 1, 0.02, 11)).unwrap();
        let p = profile(&s, 1);
        assert!(p.h[1] < 0.2 * p.h[0], "H1 {} vs H0 {}", p.h[1], p.h[0]);
        let s = generate(&SourceSpec::markov(16, 20_000, 2, 0.02, 11)).unwrap();
        let p = profile(&s, 2);
        assert!(p.h[2] < 0.2 * p.h[0], "H2 {} vs H0 {}", p.h[2], p.h[0]);
    }

    #[test]
    fn zipf_is_skewed() {
        let s = generate(&SourceSpec::zipf(256, 20_000, 1.5, 2)).unwrap();
        let h = profile(&s, 0).h[0];
        assert!(h < 6.0, "{h}");
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&SourceSpec::uniform(0, 10, 0)).is_err());
        assert!(generate(&SourceSpec::uniform(3, 0, 0)).is_err());
        assert!(generate(&SourceSpec::zipf(3, 10, -1.0, 0)).is_err());
        assert!(generate(&SourceSpec::markov(3, 10, 1, 1.5, 0)).is_err());
        assert!(generate(&SourceSpec::periodic("", 10)).is_err());
        let no_path = SourceSpec {
            path: None,
            ..SourceSpec::file("x")
        };
        assert!(generate(&no_path).is_err());
        assert!(matches!(
            generate(&SourceSpec::file("/nonexistent/corpus.bin")),
            Err(BenchError::Io(_))
        ));
    }

    #[test]
    fn spec_json_defaults() {
        let spec: SourceSpec =
            serde_json::from_str(r#"{"kind":"zipf","alphabet":4,"length":10}"#).unwrap();
        assert_eq!(spec.skew, 1.0);
        assert_eq!(spec.seed, 0);
        assert_eq!("markov".parse::<SourceKind>(), Ok(SourceKind::Markov));
    }
}
