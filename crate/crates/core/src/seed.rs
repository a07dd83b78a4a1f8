//! Counter-based seed derivation.
//!
//! Every random quantity of an iteration is a pure function of the iteration
//! seed and a tuple of integers naming it (UE, node, TTI, ...). Results do
//! not depend on the order in which the engine asks for them.

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes `seed` together with `parts`; distinct tuples give independent
/// looking outputs.
pub fn derive(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(seed), |h, &p| {
        splitmix64(h ^ splitmix64(p.wrapping_add(0x632b_e59b_d9b4_e019)))
    })
}

/// Uniform in (0, 1].
pub fn unit_open0(h: u64) -> f64 {
    ((h >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in [0, 1).
pub fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_of_parts_matters() {
        assert_ne!(derive(1, &[2, 3]), derive(1, &[3, 2]));
        assert_ne!(derive(1, &[2]), derive(2, &[2]));
        assert_eq!(derive(5, &[7, 8]), derive(5, &[7, 8]));
    }

    #[test]
    fn uniforms_look_uniform() {
        let n = 100_000;
        let mean = (0..n).map(|i| unit(derive(9, &[i]))).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005);
        assert!((0..1000).all(|i| unit_open0(derive(1, &[i])) > 0.0));
    }
}
