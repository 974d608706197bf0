//! Stable seed derivation.
//!
//! Seeds for trials, restarts and noise draws are hashed from a master seed
//! and a list of labelled parts, so adding a method or a noise level never
//! shifts the random stream of any other combination.

/// One component of a derived seed.
#[derive(Debug, Clone, Copy)]
pub enum SeedPart<'a> {
    Str(&'a str),
    Int(u64),
    Float(f64),
}

impl<'a> From<&'a str> for SeedPart<'a> {
    fn from(s: &'a str) -> Self {
        SeedPart::Str(s)
    }
}

impl From<u64> for SeedPart<'_> {
    fn from(v: u64) -> Self {
        SeedPart::Int(v)
    }
}

impl From<usize> for SeedPart<'_> {
    fn from(v: usize) -> Self {
        SeedPart::Int(v as u64)
    }
}

impl From<f64> for SeedPart<'_> {
    fn from(v: f64) -> Self {
        SeedPart::Float(v)
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut h: u64, bytes: &[u8]) -> u64 {
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and an ordered list of parts.
pub fn derive_seed(master: u64, parts: &[SeedPart<'_>]) -> u64 {
    let mut h = fnv1a(FNV_OFFSET, &master.to_le_bytes());
    for part in parts {
        // tag byte keeps ("ab", "c") distinct from ("a", "bc")
        h = match part {
            SeedPart::Str(s) => {
                let h = fnv1a(h, &[1]);
                let h = fnv1a(h, &(s.len() as u64).to_le_bytes());
                fnv1a(h, s.as_bytes())
            }
            SeedPart::Int(v) => fnv1a(fnv1a(h, &[2]), &v.to_le_bytes()),
            SeedPart::Float(v) => fnv1a(fnv1a(h, &[3]), &v.to_bits().to_le_bytes()),
        };
    }
    mix64(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_order_sensitive() {
        let a = derive_seed(7, &["multimodal".into(), 3usize.into()]);
        let b = derive_seed(7, &["multimodal".into(), 3usize.into()]);
        let c = derive_seed(7, &[3usize.into(), "multimodal".into()]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_seed(7, &["ab".into(), "c".into()]), derive_seed(7, &["a".into(), "bc".into()]));
        assert_ne!(derive_seed(1, &[]), derive_seed(2, &[]));
    }
}
