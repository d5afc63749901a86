//! Seeded lattice value noise for terrain color variation.
//!
//! A hash of the integer lattice cell produces a value in [0, 1), bilinearly
//! interpolated between the four surrounding corners. Everything is integer
//! mixing plus one multiply, so the output is bit-exact for a given
//! (seed, salt, point, scale) on any platform.

/// splitmix64 finalizer; a solid cheap integer mixer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash one lattice corner to [0, 1). The coordinates are folded with
/// distinct odd multipliers before mixing; this runs in every ground pixel
/// of every camera frame, so it stays at two mix rounds.
pub fn lattice_hash(seed: i64, ix: i64, iy: i64, salt: u32) -> f64 {
    let h = (seed as u64 ^ 0x5bf0_3635_16f5_51c7)
        ^ (ix as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (iy as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f)
        ^ u64::from(salt).wrapping_mul(0x1656_67b1_9e37_79f9);
    let h = mix(mix(h));
    // Top 53 bits -> [0, 1).
    (h >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Bilinear value noise in [0, 1) at world point (x, y) with lattice cells of
/// `scale` meters.
pub fn value_noise(seed: i64, salt: u32, x: f64, y: f64, scale: f64) -> f64 {
    let u = x / scale;
    let v = y / scale;
    let ix = u.floor();
    let iy = v.floor();
    let fx = u - ix;
    let fy = v - iy;
    let (ix, iy) = (ix as i64, iy as i64);

    let h00 = lattice_hash(seed, ix, iy, salt);
    let h10 = lattice_hash(seed, ix + 1, iy, salt);
    let h01 = lattice_hash(seed, ix, iy + 1, salt);
    let h11 = lattice_hash(seed, ix + 1, iy + 1, salt);

    let top = h00 + (h10 - h00) * fx;
    let bottom = h01 + (h11 - h01) * fx;
    top + (bottom - top) * fy
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_in_unit_interval() {
        for i in -50..50 {
            for j in -50..50 {
                let n = value_noise(42, 0, i as f64 * 0.173, j as f64 * 0.311, 0.4);
                assert!((0.0..1.0).contains(&n));
            }
        }
    }

    #[test]
    fn deterministic_for_same_inputs() {
        let a = value_noise(7, 2, 3.25, -1.5, 0.5);
        let b = value_noise(7, 2, 3.25, -1.5, 0.5);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn seed_and_salt_change_output() {
        let base = value_noise(1, 0, 0.3, 0.7, 1.0);
        assert_ne!(base.to_bits(), value_noise(2, 0, 0.3, 0.7, 1.0).to_bits());
        assert_ne!(base.to_bits(), value_noise(1, 1, 0.3, 0.7, 1.0).to_bits());
    }

    #[test]
    fn interpolates_corner_values() {
        // At an exact lattice corner the noise equals the corner hash.
        let n = value_noise(9, 0, 3.0, 5.0, 1.0);
        assert_eq!(n.to_bits(), lattice_hash(9, 3, 5, 0).to_bits());
    }
}
