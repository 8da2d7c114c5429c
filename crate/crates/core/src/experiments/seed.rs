//! Seed schedule: every trial's generator seed is a pure function of the
//! master seed and the trial's coordinates, so results do not depend on the
//! order in which trials are executed.

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a of the experiment name.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// `splitmix(splitmix(splitmix(master ^ fnv(experiment)) ^ group) ^ trial)`
pub fn trial_seed(master: u64, experiment: &str, group: u64, trial: u64) -> u64 {
    let h = splitmix64(master ^ fnv1a(experiment));
    let h = splitmix64(h ^ group);
    splitmix64(h ^ trial)
}
