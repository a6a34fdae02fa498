//! Endless per-type sample streams consumed by the simulator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::csv_trace::ReplayTrace;
use super::sample::TraceSample;
use super::synth::{validate_segments, CompiledParams, Segment, SegmentSchedule, SynthParams};
use crate::error::{Error, Result};

/// A stream that hands out the next data unit of a requested type.
pub trait TraceSource: Send {
    fn next_sample(&mut self, z: usize) -> Result<TraceSample>;

    /// A finite sample whose per-(type, config) statistics stand for the whole
    /// stream, used to build the exact model. Does not advance the stream.
    fn reference_samples(&self, len: usize, seed: u64) -> Result<Vec<TraceSample>>;

    fn n_types(&self) -> usize;
}

pub struct StationarySource {
    params: CompiledParams,
    rng: ChaCha8Rng,
    next_index: u64,
}

impl StationarySource {
    pub fn new(params: &SynthParams, seed: u64) -> Result<Self> {
        Ok(Self {
            params: CompiledParams::new(params)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_index: 0,
        })
    }
}

impl TraceSource for StationarySource {
    fn next_sample(&mut self, z: usize) -> Result<TraceSample> {
        let s = self.params.draw(self.next_index, z, &mut self.rng)?;
        self.next_index += 1;
        Ok(s)
    }

    fn reference_samples(&self, len: usize, seed: u64) -> Result<Vec<TraceSample>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nz = self.params.n_types();
        (0..len)
            .map(|n| self.params.draw(n as u64, n % nz, &mut rng))
            .collect()
    }

    fn n_types(&self) -> usize {
        self.params.n_types()
    }
}

/// Regime-switching stream; the segment is chosen by the global sample index
/// and the schedule repeats once every segment has been played.
pub struct NonstationarySource {
    segments: Vec<CompiledParams>,
    durations: Vec<u64>,
    schedule: SegmentSchedule,
    rng: ChaCha8Rng,
    next_index: u64,
}

impl NonstationarySource {
    pub fn new(segments: &[Segment], seed: u64) -> Result<Self> {
        validate_segments(segments)?;
        Ok(Self {
            segments: segments
                .iter()
                .map(|s| CompiledParams::new(&s.params))
                .collect::<Result<_>>()?,
            durations: segments.iter().map(|s| s.duration).collect(),
            schedule: SegmentSchedule::new(segments),
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_index: 0,
        })
    }
}

impl TraceSource for NonstationarySource {
    fn next_sample(&mut self, z: usize) -> Result<TraceSample> {
        let seg = self.schedule.segment_at(self.next_index);
        let s = self.segments[seg].draw(self.next_index, z, &mut self.rng)?;
        self.next_index += 1;
        Ok(s)
    }

    /// Mixes the segments in proportion to their durations.
    fn reference_samples(&self, len: usize, seed: u64) -> Result<Vec<TraceSample>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nz = self.n_types();
        let period: u64 = self.durations.iter().sum();
        let mut out = Vec::with_capacity(len);
        let mut n = 0usize;
        for (k, seg) in self.segments.iter().enumerate() {
            let share = if k + 1 == self.segments.len() {
                len - n
            } else {
                (len as u128 * self.durations[k] as u128 / period as u128) as usize
            };
            for _ in 0..share {
                out.push(seg.draw(n as u64, n % nz, &mut rng)?);
                n += 1;
            }
        }
        Ok(out)
    }

    fn n_types(&self) -> usize {
        self.segments[0].n_types()
    }
}

/// Replays a recorded trace: a request for type `z` returns the next
/// recorded sample of that type, wrapping to the first one at the end.
pub struct ReplaySource {
    trace: ReplayTrace,
    by_type: Vec<Vec<usize>>,
    cursors: Vec<usize>,
    next_index: u64,
}

impl ReplaySource {
    pub fn new(trace: ReplayTrace, n_types: usize) -> Result<Self> {
        let mut by_type = vec![Vec::new(); n_types];
        for (i, s) in trace.samples().iter().enumerate() {
            by_type
                .get_mut(s.z)
                .ok_or_else(|| Error::InvalidInput(format!("sample type {} out of range", s.z)))?
                .push(i);
        }
        Ok(Self {
            trace,
            by_type,
            cursors: vec![0; n_types],
            next_index: 0,
        })
    }
}

impl TraceSource for ReplaySource {
    fn next_sample(&mut self, z: usize) -> Result<TraceSample> {
        let pool = self
            .by_type
            .get(z)
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::Coverage {
                missing: vec![format!("type index {z} absent from replayed trace")],
            })?;
        let mut s = self.trace.get(pool[self.cursors[z] % pool.len()]).clone();
        self.cursors[z] += 1;
        s.index = self.next_index;
        self.next_index += 1;
        Ok(s)
    }

    fn reference_samples(&self, _len: usize, _seed: u64) -> Result<Vec<TraceSample>> {
        Ok(self.trace.samples().to_vec())
    }

    fn n_types(&self) -> usize {
        self.by_type.len()
    }
}

/// I.i.d. resampling of a recorded trace: each request draws uniformly among
/// the recorded samples of the requested type.
pub struct ResampleSource {
    inner: ReplaySource,
    rng: ChaCha8Rng,
}

impl ResampleSource {
    pub fn new(trace: ReplayTrace, n_types: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            inner: ReplaySource::new(trace, n_types)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl TraceSource for ResampleSource {
    fn next_sample(&mut self, z: usize) -> Result<TraceSample> {
        let r = &mut self.inner;
        let pool = r
            .by_type
            .get(z)
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::Coverage {
                missing: vec![format!("type index {z} absent from resampled trace")],
            })?;
        let mut s = r
            .trace
            .get(pool[self.rng.random_range(0..pool.len())])
            .clone();
        s.index = r.next_index;
        r.next_index += 1;
        Ok(s)
    }

    fn reference_samples(&self, len: usize, seed: u64) -> Result<Vec<TraceSample>> {
        self.inner.reference_samples(len, seed)
    }

    fn n_types(&self) -> usize {
        self.inner.n_types()
    }
}
