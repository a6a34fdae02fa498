//! Per-data-unit rate, distortion and complexity measurements.

pub mod csv_trace;
pub mod empirical;
pub mod sample;
pub mod source;
pub mod synth;

pub use csv_trace::{load_csv, read_csv, write_csv, ReplayTrace};
pub use empirical::{empirical_arrival_distribution, ArrivalDistribution, DEFAULT_MIN_TRACE_LEN};
pub use sample::{Measurement, TraceSample};
pub use source::{
    NonstationarySource, ReplaySource, ResampleSource, StationarySource, TraceSource,
};
pub use synth::{
    synth_nonstationary, synth_stationary, CellParams, ClippedNormal, ComplexityDist, Segment,
    SynthParams,
};
