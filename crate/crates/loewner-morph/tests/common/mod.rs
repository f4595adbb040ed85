// Shared by several test targets; not every target uses every helper.
#![allow(dead_code)]

use loewner_morph::sym2::{compose, eigendecompose, SpectralDecomp};
use loewner_morph::{RgbImage8, Sym2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_sym2(rng: &mut ChaCha8Rng) -> Sym2 {
    Sym2::new(
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
    )
}

pub fn random_multiset(rng: &mut ChaCha8Rng, min_len: usize, max_len: usize) -> Vec<Sym2> {
    let n = rng.gen_range(min_len..=max_len);
    (0..n).map(|_| random_sym2(rng)).collect()
}

pub fn random_image(rng: &mut ChaCha8Rng, width: u32, height: u32) -> RgbImage8 {
    let mut data = vec![0u8; (width * height * 3) as usize];
    rng.fill(&mut data[..]);
    RgbImage8::new(width as usize, height as usize, data)
}

/// True when every pair of spectral channels in the multiset keeps both the
/// eigenvalue spread and the eigendirection angle apart by the given margins.
/// Each matrix contributes two channels: (lambda, phi) and (mu, phi + pi/2).
pub fn eigen_structure_nondegenerate(items: &[Sym2], gap: f64, angle_gap: f64) -> bool {
    let channels: Vec<(f64, f64)> = items
        .iter()
        .flat_map(|x| {
            let d = eigendecompose(*x);
            [
                (d.lambda, d.phi),
                (d.mu, d.phi + std::f64::consts::FRAC_PI_2),
            ]
        })
        .collect();
    let top = channels
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, |acc, (l, _)| acc.max(l));
    for (i, &(li, pi_)) in channels.iter().enumerate() {
        for &(lj, pj) in &channels[i + 1..] {
            let dphi = (pi_ - pj).sin().abs();
            // Channels competing near the top must be angularly separated and
            // the runner-up must sit a clear gap below the winner.
            if dphi < angle_gap && (top - li).min(top - lj) < gap && (li - lj).abs() < gap {
                return false;
            }
            if dphi < angle_gap && (li - lj).abs() > 0.0 && (li - lj).abs() < gap {
                return false;
            }
        }
    }
    true
}

/// Random multiset whose spectral structure stays away from ties both in
/// eigenvalue and in eigendirection, built directly from spectral data.
pub fn nondegenerate_multiset(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Sym2> {
    loop {
        let n = rng.gen_range(1..=max_len);
        let items: Vec<Sym2> = (0..n)
            .map(|_| {
                let lambda = rng.gen_range(-1.0..=1.0);
                let mu = lambda - rng.gen_range(0.15..=1.0);
                let phi = rng.gen_range(-1.5..=1.5);
                compose(SpectralDecomp::new(lambda, mu, phi))
            })
            .collect();
        if eigen_structure_nondegenerate(&items, 0.1, 0.1) {
            return items;
        }
    }
}

pub fn frobenius_distance(a: Sym2, b: Sym2) -> f64 {
    (a - b).frobenius_norm()
}
