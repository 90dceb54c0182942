//! Gray-mapped 16-QAM.
//!
//! Bits `b0 b1 b2 b3` map to `(I + jQ) / sqrt(10)`, where `b0 b1` select the
//! in-phase level and `b2 b3` the quadrature level through the Gray table
//!
//! | bits | level |
//! |------|-------|
//! | 00   | -3    |
//! | 01   | -1    |
//! | 11   | +1    |
//! | 10   | +3    |
//!
//! Hard decisions are per axis. On a decision boundary the candidate with the
//! lexicographically smaller bit pattern wins; because the in-phase bits are
//! the more significant pair, the per-axis rule yields the globally smallest
//! pattern among all equidistant points (so `0 + 0j` demaps to `0101`).

use crate::{Cf64, Error, Result};

pub const BITS_PER_SYMBOL: usize = 4;

/// `1 / sqrt(10)`: unit average energy for the `{±1, ±3}²` lattice.
pub const QAM16_SCALE: f64 = 0.316_227_766_016_837_94;

const GRAY_LEVELS: [(u8, u8, f64); 4] = [(0, 0, -3.0), (0, 1, -1.0), (1, 1, 1.0), (1, 0, 3.0)];

fn level(b0: u8, b1: u8) -> f64 {
    GRAY_LEVELS
        .iter()
        .find(|(x, y, _)| *x == b0 && *y == b1)
        .map(|(_, _, l)| *l)
        .expect("bits are 0 or 1")
}

fn decide_axis(v: f64) -> (u8, u8) {
    // boundaries at -2, 0, +2 lattice units; ties go to the smaller bits
    let edge = 2.0 * QAM16_SCALE;
    if v <= -edge {
        (0, 0)
    } else if v <= 0.0 {
        (0, 1)
    } else if v < edge {
        (1, 1)
    } else {
        (1, 0)
    }
}

/// Maps a bit sequence (values 0/1) to unit-power 16-QAM symbols.
pub fn map_qam16(bits: &[u8]) -> Result<Vec<Cf64>> {
    if bits.len() % BITS_PER_SYMBOL != 0 {
        return Err(Error::InputShape(format!(
            "16-QAM needs a multiple of 4 bits, got {}",
            bits.len()
        )));
    }
    if let Some(pos) = bits.iter().position(|&b| b > 1) {
        return Err(Error::InputShape(format!(
            "bit {pos} has value {}, expected 0 or 1",
            bits[pos]
        )));
    }
    Ok(bits
        .chunks_exact(BITS_PER_SYMBOL)
        .map(|c| Cf64::new(level(c[0], c[1]), level(c[2], c[3])) * QAM16_SCALE)
        .collect())
}

/// Minimum-distance hard decision back to bits.
pub fn demap_qam16(symbols: &[Cf64]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * BITS_PER_SYMBOL);
    for s in symbols {
        let (b0, b1) = decide_axis(s.re);
        let (b2, b3) = decide_axis(s.im);
        bits.extend_from_slice(&[b0, b1, b2, b3]);
    }
    bits
}

/// The 16 constellation points, indexed by their 4-bit pattern read MSB first.
pub fn constellation() -> Vec<Cf64> {
    (0..16u8)
        .map(|p| {
            let bits = [(p >> 3) & 1, (p >> 2) & 1, (p >> 1) & 1, p & 1];
            map_qam16(&bits).expect("4 bits")[0]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn pattern(p: u8) -> [u8; 4] {
        [(p >> 3) & 1, (p >> 2) & 1, (p >> 1) & 1, p & 1]
    }

    #[test]
    fn all_patterns_round_trip() {
        for p in 0..16u8 {
            let bits = pattern(p);
            let sym = map_qam16(&bits).unwrap();
            assert_eq!(demap_qam16(&sym), bits.to_vec());
        }
    }

    #[test]
    fn points_lie_on_scaled_lattice_with_unit_power() {
        let pts = constellation();
        let allowed = [-3.0, -1.0, 1.0, 3.0];
        for p in &pts {
            let (i, q) = (p.re * 10f64.sqrt(), p.im * 10f64.sqrt());
            assert!(allowed.iter().any(|a| (a - i).abs() < 1e-12), "{p}");
            assert!(allowed.iter().any(|a| (a - q).abs() < 1e-12), "{p}");
        }
        let power: f64 = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / 16.0;
        assert!((power - 1.0).abs() < 1e-15);
        // all distinct
        for a in 0..16 {
            for b in a + 1..16 {
                assert!((pts[a] - pts[b]).norm() > 0.5);
            }
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        let pts = constellation();
        let min_d = 2.0 * QAM16_SCALE;
        for a in 0..16u8 {
            for b in 0..16u8 {
                if ((pts[a as usize] - pts[b as usize]).norm() - min_d).abs() < 1e-12 {
                    assert_eq!((a ^ b).count_ones(), 1);
                }
            }
        }
    }

    #[test]
    fn random_bits_have_unit_mean_power() {
        let mut rng = crate::rng::seeded(3);
        let bits: Vec<u8> = (0..40_000).map(|_| rng.random_range(0..2u8)).collect();
        let syms = map_qam16(&bits).unwrap();
        assert_eq!(syms.len(), 10_000);
        let p = syms.iter().map(|s| s.norm_sqr()).sum::<f64>() / syms.len() as f64;
        assert!((p - 1.0).abs() < 0.02, "mean power {p}");
    }

    #[test]
    fn small_perturbations_keep_decisions() {
        let half = QAM16_SCALE * 0.999;
        let mut rng = crate::rng::seeded(11);
        for p in 0..16u8 {
            let s = map_qam16(&pattern(p)).unwrap()[0];
            for _ in 0..50 {
                let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let r: f64 = rng.random_range(0.0..half);
                let noisy = s + Cf64::from_polar(r, ang);
                assert_eq!(demap_qam16(&[noisy]), pattern(p).to_vec());
            }
        }
    }

    #[test]
    fn origin_ties_to_smallest_pattern() {
        assert_eq!(demap_qam16(&[Cf64::new(0.0, 0.0)]), vec![0, 1, 0, 1]);
        // on the outer boundary the smaller pattern 00 beats 01
        let edge = Cf64::new(-2.0 * QAM16_SCALE, 2.0 * QAM16_SCALE);
        assert_eq!(demap_qam16(&[edge]), vec![0, 0, 1, 0]);
    }

    #[test]
    fn rejects_ragged_bit_counts() {
        assert!(matches!(map_qam16(&[0, 1, 1]), Err(Error::InputShape(_))));
        assert!(matches!(map_qam16(&[0, 1, 2, 0]), Err(Error::InputShape(_))));
    }
}
