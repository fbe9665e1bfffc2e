//! SplitMix64, the seeded bit source behind the generator and the
//! attribute filler.
//!
//! The algorithm is fixed so that every implementation reading the same seed
//! produces the same bits:
//!
//! ```text
//! state = state + 0x9E3779B97F4A7C15            (wrapping)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9      (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB      (wrapping)
//! out = z ^ (z >> 31)
//! ```
//!
//! A boolean draw is the most significant bit of `out`.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_bool(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}
