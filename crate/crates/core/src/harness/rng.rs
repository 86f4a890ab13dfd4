use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a random stream is used for. Streams with different tags never
/// overlap, so adding a consumer does not perturb the others.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamTag {
    Trial = 1,
    Baseline = 2,
    Calibration = 3,
    Training = 4,
    Aggregate = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream_id(cell: u64, trial: u64, tag: StreamTag) -> u64 {
    splitmix64(splitmix64(splitmix64(tag as u64) ^ cell) ^ trial)
}

/// Independent stream for one `(cell, trial, purpose)` under a master seed.
pub fn stream(seed: u64, cell: u64, trial: u64, tag: StreamTag) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(cell, trial, tag));
    rng
}
