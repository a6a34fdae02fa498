//! Synthetic per-(type, config) generators.

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use super::sample::{Measurement, TraceSample};
use crate::error::{Error, Result};

/// Distribution of encoding cycles for one (type, config) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ComplexityDist {
    /// `ln C ~ N(mu, sigma^2)`
    LogNormal { mu: f64, sigma: f64 },
    /// Discrete distribution over `values` with relative `weights`.
    Histogram { values: Vec<f64>, weights: Vec<f64> },
}

impl ComplexityDist {
    /// Lognormal with the given mean and coefficient of variation.
    pub fn lognormal_mean_cv(mean: f64, cv: f64) -> Self {
        let s2 = (1.0 + cv * cv).ln();
        ComplexityDist::LogNormal {
            mu: mean.ln() - s2 / 2.0,
            sigma: s2.sqrt(),
        }
    }

    pub fn point(value: f64) -> Self {
        ComplexityDist::Histogram {
            values: vec![value],
            weights: vec![1.0],
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ComplexityDist::LogNormal { mu, sigma } => (mu + sigma * sigma / 2.0).exp(),
            ComplexityDist::Histogram { values, weights } => {
                let total: f64 = weights.iter().sum();
                values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total
            }
        }
    }

    /// Same shape, every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            ComplexityDist::LogNormal { mu, sigma } => ComplexityDist::LogNormal {
                mu: mu + factor.ln(),
                sigma: *sigma,
            },
            ComplexityDist::Histogram { values, weights } => ComplexityDist::Histogram {
                values: values.iter().map(|v| v * factor).collect(),
                weights: weights.clone(),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ComplexityDist::LogNormal { mu, sigma } => {
                if !mu.is_finite() || !(sigma.is_finite() && *sigma >= 0.0) {
                    return Err(Error::Config(format!(
                        "lognormal({mu}, {sigma}) is invalid"
                    )));
                }
            }
            ComplexityDist::Histogram { values, weights } => {
                if values.is_empty() || values.len() != weights.len() {
                    return Err(Error::Config(
                        "histogram needs matching values and weights".into(),
                    ));
                }
                if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                    return Err(Error::Config(
                        "histogram cycle values must be positive".into(),
                    ));
                }
                if weights.iter().any(|&w| !(w >= 0.0)) || !(weights.iter().sum::<f64>() > 0.0) {
                    return Err(Error::Config(
                        "histogram weights must be non-negative, not all zero".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Normal distribution truncated to `[0, inf)` by clipping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClippedNormal {
    pub mean: f64,
    pub std: f64,
}

impl ClippedNormal {
    pub fn point(value: f64) -> Self {
        Self {
            mean: value,
            std: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellParams {
    pub complexity: ComplexityDist,
    pub bits: ClippedNormal,
    pub distortion: ClippedNormal,
}

/// Generator parameters indexed `[type][config]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub cells: Vec<Vec<CellParams>>,
}

impl SynthParams {
    pub fn n_types(&self) -> usize {
        self.cells.len()
    }

    pub fn n_configs(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    /// Every complexity distribution scaled by `factor`.
    pub fn scaled_complexity(&self, factor: f64) -> Self {
        Self {
            cells: self
                .cells
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| CellParams {
                            complexity: c.complexity.scaled(factor),
                            ..c.clone()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() || self.n_configs() == 0 {
            return Err(Error::Config(
                "synthetic trace needs at least one type and config".into(),
            ));
        }
        for (z, row) in self.cells.iter().enumerate() {
            if row.len() != self.n_configs() {
                return Err(Error::Config(format!(
                    "type {z} has {} configs, expected {}",
                    row.len(),
                    self.n_configs()
                )));
            }
            for c in row {
                c.complexity.validate()?;
                for n in [c.bits, c.distortion] {
                    if !n.mean.is_finite() || !(n.std.is_finite() && n.std >= 0.0) {
                        return Err(Error::Config(format!(
                            "normal({}, {}) is invalid",
                            n.mean, n.std
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Types in order P, B, I; configs ordered from the most expensive and
    /// highest quality to the cheapest and lowest quality.
    pub fn default_video() -> Self {
        // (mean cycles x 1e6, distortion, bits)
        let table: [[(f64, f64, f64); 3]; 3] = [
            [(16.0, 5.5, 136.0), (13.0, 6.2, 141.0), (10.5, 7.3, 147.0)],
            [(13.0, 5.0, 128.0), (11.0, 5.6, 134.0), (9.0, 6.6, 141.0)],
            [(24.0, 6.5, 168.0), (21.0, 7.0, 176.0), (18.0, 7.8, 186.0)],
        ];
        let cells = table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(c, d, b)| CellParams {
                        complexity: ComplexityDist::lognormal_mean_cv(c * 1e6, 0.35),
                        bits: ClippedNormal {
                            mean: b,
                            std: 0.1 * b,
                        },
                        distortion: ClippedNormal {
                            mean: d,
                            std: 0.1 * d,
                        },
                    })
                    .collect()
            })
            .collect();
        Self { cells }
    }
}

/// Parameters with their distributions pre-built for fast sampling.
#[derive(Clone, Debug)]
pub(crate) struct CompiledParams {
    cells: Vec<Vec<CompiledCell>>,
}

#[derive(Clone, Debug)]
enum Cycles {
    LogNormal(LogNormal<f64>),
    Histogram(Vec<f64>, WeightedIndex<f64>),
}

#[derive(Clone, Debug)]
struct CompiledCell {
    cycles: Cycles,
    bits: Normal<f64>,
    distortion: Normal<f64>,
}

impl CompiledParams {
    pub(crate) fn new(params: &SynthParams) -> Result<Self> {
        params.validate()?;
        let cfg = |e: &dyn std::fmt::Display| Error::Config(e.to_string());
        let cells = params
            .cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        let cycles = match &c.complexity {
                            ComplexityDist::LogNormal { mu, sigma } => {
                                Cycles::LogNormal(LogNormal::new(*mu, *sigma).map_err(|e| cfg(&e))?)
                            }
                            ComplexityDist::Histogram { values, weights } => Cycles::Histogram(
                                values.clone(),
                                WeightedIndex::new(weights).map_err(|e| cfg(&e))?,
                            ),
                        };
                        Ok(CompiledCell {
                            cycles,
                            bits: Normal::new(c.bits.mean, c.bits.std).map_err(|e| cfg(&e))?,
                            distortion: Normal::new(c.distortion.mean, c.distortion.std)
                                .map_err(|e| cfg(&e))?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { cells })
    }

    pub(crate) fn n_types(&self) -> usize {
        self.cells.len()
    }

    /// Draws cycles, bits, then distortion for each config in turn.
    pub(crate) fn draw<R: Rng + ?Sized>(
        &self,
        index: u64,
        z: usize,
        rng: &mut R,
    ) -> Result<TraceSample> {
        let row = self
            .cells
            .get(z)
            .ok_or_else(|| Error::InvalidInput(format!("type index {z} has no generator")))?;
        let configs = row
            .iter()
            .map(|cell| {
                let raw = match &cell.cycles {
                    Cycles::LogNormal(d) => d.sample(rng),
                    Cycles::Histogram(values, idx) => values[idx.sample(rng)],
                };
                let bits = cell.bits.sample(rng).max(0.0);
                let distortion = cell.distortion.sample(rng).max(0.0);
                Measurement {
                    bits,
                    distortion,
                    cycles: raw.round().max(1.0),
                }
            })
            .collect();
        Ok(TraceSample { index, z, configs })
    }
}

/// I.i.d. draws per cell, with types taken from `z_sequence`.
pub fn synth_stationary<R: Rng + ?Sized>(
    params: &SynthParams,
    z_sequence: &[usize],
    rng: &mut R,
) -> Result<Vec<TraceSample>> {
    let compiled = CompiledParams::new(params)?;
    z_sequence
        .iter()
        .enumerate()
        .map(|(n, &z)| compiled.draw(n as u64, z, rng))
        .collect()
}

/// One stationary regime lasting `duration` samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: u64,
    pub params: SynthParams,
}

pub(crate) fn validate_segments(segments: &[Segment]) -> Result<()> {
    if segments.is_empty() {
        return Err(Error::Config(
            "non-stationary trace needs at least one segment".into(),
        ));
    }
    if segments.iter().any(|s| s.duration == 0) {
        return Err(Error::Config("segment durations must be positive".into()));
    }
    let nz = segments[0].params.n_types();
    let nh = segments[0].params.n_configs();
    for s in segments {
        s.params.validate()?;
        if s.params.n_types() != nz || s.params.n_configs() != nh {
            return Err(Error::Config(
                "segments disagree on the number of types or configs".into(),
            ));
        }
    }
    Ok(())
}

/// Piecewise-stationary stream; after the last segment it restarts from the first.
pub fn synth_nonstationary<R: Rng + ?Sized>(
    segments: &[Segment],
    z_sequence: &[usize],
    rng: &mut R,
) -> Result<Vec<TraceSample>> {
    validate_segments(segments)?;
    let compiled = segments
        .iter()
        .map(|s| CompiledParams::new(&s.params))
        .collect::<Result<Vec<_>>>()?;
    let schedule = SegmentSchedule::new(segments);
    z_sequence
        .iter()
        .enumerate()
        .map(|(n, &z)| compiled[schedule.segment_at(n as u64)].draw(n as u64, z, rng))
        .collect()
}

#[derive(Clone, Debug)]
pub(crate) struct SegmentSchedule {
    ends: Vec<u64>,
}

impl SegmentSchedule {
    pub(crate) fn new(segments: &[Segment]) -> Self {
        let mut acc = 0;
        let ends = segments
            .iter()
            .map(|s| {
                acc += s.duration;
                acc
            })
            .collect();
        Self { ends }
    }

    pub(crate) fn segment_at(&self, n: u64) -> usize {
        let period = *self.ends.last().expect("non-empty schedule");
        let k = n % period;
        self.ends.partition_point(|&e| e <= k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point_params(c: f64) -> SynthParams {
        let cell = CellParams {
            complexity: ComplexityDist::point(c),
            bits: ClippedNormal::point(100.0),
            distortion: ClippedNormal::point(5.0),
        };
        SynthParams {
            cells: vec![vec![cell.clone(), cell]],
        }
    }

    #[test]
    fn point_masses_give_a_constant_stream() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = synth_stationary(&point_params(6e6), &[0; 100], &mut rng).unwrap();
        assert!(s.iter().all(|x| x.configs == s[0].configs));
        assert_eq!(s[0].configs[0].cycles, 6e6);
    }

    #[test]
    fn lognormal_mean_matches() {
        let p = SynthParams {
            cells: vec![vec![CellParams {
                complexity: ComplexityDist::lognormal_mean_cv(6e6, 0.35),
                bits: ClippedNormal::point(1.0),
                distortion: ClippedNormal::point(1.0),
            }]],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = synth_stationary(&p, &vec![0; 100_000], &mut rng).unwrap();
        let mean = s.iter().map(|x| x.configs[0].cycles).sum::<f64>() / s.len() as f64;
        assert!((mean / 6e6 - 1.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn disjoint_supports_stay_disjoint() {
        let mut p = point_params(1.0);
        p.cells[0][0].complexity = ComplexityDist::Histogram {
            values: vec![1e6, 2e6],
            weights: vec![1.0, 1.0],
        };
        p.cells[0][1].complexity = ComplexityDist::Histogram {
            values: vec![5e6, 6e6],
            weights: vec![1.0, 3.0],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in synth_stationary(&p, &[0; 1000], &mut rng).unwrap() {
            assert!(s.configs[0].cycles <= 2e6);
            assert!(s.configs[1].cycles >= 5e6);
        }
    }

    #[test]
    fn invalid_params_are_config_errors() {
        let mut p = point_params(1.0);
        p.cells[0][0].complexity = ComplexityDist::LogNormal {
            mu: 1.0,
            sigma: -1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            synth_stationary(&p, &[0], &mut rng),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            synth_nonstationary(&[], &[0], &mut rng),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn one_segment_equals_stationary() {
        let p = SynthParams::default_video();
        let zs: Vec<usize> = (0..500).map(|n| n % 3).collect();
        let a = synth_stationary(&p, &zs, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let seg = [Segment {
            duration: 77,
            params: p,
        }];
        let b = synth_nonstationary(&seg, &zs, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn switch_happens_at_the_boundary() {
        let segs = [
            Segment {
                duration: 300,
                params: point_params(4e6),
            },
            Segment {
                duration: 200,
                params: point_params(8e6),
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = synth_nonstationary(&segs, &[0; 1000], &mut rng).unwrap();
        assert_eq!(s[299].configs[0].cycles, 4e6);
        assert_eq!(s[300].configs[0].cycles, 8e6);
        assert_eq!(s[499].configs[0].cycles, 8e6);
        assert_eq!(s[500].configs[0].cycles, 4e6);
    }

    #[test]
    fn windowed_means_double_across_the_boundary() {
        let mk = |m: f64| SynthParams {
            cells: vec![vec![CellParams {
                complexity: ComplexityDist::lognormal_mean_cv(m, 0.3),
                bits: ClippedNormal::point(1.0),
                distortion: ClippedNormal::point(1.0),
            }]],
        };
        let segs = [
            Segment {
                duration: 20_000,
                params: mk(4e6),
            },
            Segment {
                duration: 20_000,
                params: mk(8e6),
            },
        ];
        let s = synth_nonstationary(&segs, &vec![0; 40_000], &mut ChaCha8Rng::seed_from_u64(5))
            .unwrap();
        let mean =
            |r: &[TraceSample]| r.iter().map(|x| x.configs[0].cycles).sum::<f64>() / r.len() as f64;
        let ratio = mean(&s[20_000..]) / mean(&s[..20_000]);
        assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn same_seed_same_stream() {
        let p = SynthParams::default_video();
        let zs: Vec<usize> = (0..200).map(|n| (n * 7) % 3).collect();
        let a = synth_stationary(&p, &zs, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = synth_stationary(&p, &zs, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
    }

    fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    #[test]
    fn halves_of_a_stationary_stream_agree() {
        let p = SynthParams::default_video();
        let zs: Vec<usize> = (0..30_000).map(|n| n % 3).collect();
        let s = synth_stationary(&p, &zs, &mut ChaCha8Rng::seed_from_u64(12)).unwrap();
        let (first, second) = s.split_at(15_000);
        for z in 0..3 {
            for h in 0..3 {
                let pick = |r: &[TraceSample]| {
                    r.iter()
                        .filter(|x| x.z == z)
                        .map(|x| x.configs[h].cycles)
                        .collect::<Vec<_>>()
                };
                // 5000 vs 5000 samples: the 0.1% critical value is about 0.039.
                assert!(ks_statistic(pick(first), pick(second)) < 0.04);
            }
        }
    }
}
