//! Per-trial seed derivation.
//!
//! `trial_seed(master, phase, index)` folds the three inputs through the
//! SplitMix64 finalizer. The mapping is fixed: changing it changes every
//! published ROC table, so treat it as part of the file format.

/// Which stream of a Monte Carlo sweep a buffer belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Noise-only buffers used to set the threshold.
    Calibration,
    /// Fresh noise-only buffers used to measure Pf.
    NullMeasurement,
    /// Clean primary-user waveform of an H1 trial.
    Signal,
    /// Channel noise of an H1 trial.
    SignalNoise,
}

impl Phase {
    fn tag(self) -> u64 {
        match self {
            Phase::Calibration => 0x43414c49,
            Phase::NullMeasurement => 0x4e554c4c,
            Phase::Signal => 0x5349474e,
            Phase::SignalNoise => 0x534e4f49,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(master_seed: u64, phase: Phase, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ phase.tag()) ^ trial)
}
