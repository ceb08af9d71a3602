const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replication `r` under `master`. Injective in `r` for a fixed
/// master because `splitmix64` is a bijection.
pub fn replication_seed(master: u64, r: u64) -> u64 {
    splitmix64(master.wrapping_add(r.wrapping_add(1).wrapping_mul(GOLDEN)))
}
