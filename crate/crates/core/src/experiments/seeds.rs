//! Counter-based seed derivation.
//!
//! Every stochastic draw in an experiment uses
//! `derive_seed(master, stream, index)`: SplitMix64 applied to the master seed
//! mixed with a stream tag and a task index. Draws therefore depend only on
//! their own coordinates, never on scheduling or on how many draws other
//! tasks made.

/// Independent random streams within one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Initial circuit parameters of optimization runs.
    Init = 1,
    /// Random target states for expressibility.
    Target = 2,
    /// SYK coupling draws.
    Disorder = 3,
    /// Parameter samples for gradient statistics.
    Sample = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: Stream, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ (stream as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93)) ^ index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn distinct_across_streams_and_indices() {
        let mut seen = HashSet::new();
        for stream in [
            Stream::Init,
            Stream::Target,
            Stream::Disorder,
            Stream::Sample,
        ] {
            for i in 0..1000 {
                assert!(seen.insert(derive_seed(42, stream, i)));
            }
        }
        assert_eq!(
            derive_seed(7, Stream::Init, 3),
            derive_seed(7, Stream::Init, 3)
        );
    }
}
