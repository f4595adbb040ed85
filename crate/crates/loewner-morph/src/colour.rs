//! The bijective chain RGB <-> HCL <-> bi-cone Cartesian <-> Sym(2).
//!
//! Colours are embedded into symmetric 2x2 matrices by first moving to the
//! hue/chroma/luminance bi-cone (luminance rescaled to [-1, 1]) and then
//! applying a linear map from Cartesian bi-cone coordinates to Sym(2).
//! Suprema of matrices may leave the colour solid, so a hue-preserving
//! projection back onto the bi-cone is provided for display/export.

use std::f64::consts::{PI, SQRT_2};

use crate::sym2::Sym2;

const TAU: f64 = 2.0 * PI;

/// An RGB colour with channels normalised to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgbColour {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl RgbColour {
    pub fn new(r: f64, g: f64, b: f64) -> Self {
        RgbColour { r, g, b }
    }

    pub fn from_bytes(r: u8, g: u8, b: u8) -> Self {
        RgbColour::new(r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0)
    }

    /// Quantises to bytes, rounding half away from zero.
    ///
    /// Tonal values are snapped to a 1e-9 grid first so that results that
    /// land exactly on a rounding boundary (common for suprema of quantised
    /// inputs) cannot flip a byte through sub-1e-9 arithmetic noise.
    pub fn to_bytes(self) -> (u8, u8, u8) {
        let q = |v: f64| {
            let t = ((v * 255.0) * 1e9).round() / 1e9;
            t.round().clamp(0.0, 255.0) as u8
        };
        (q(self.r), q(self.g), q(self.b))
    }
}

/// Hue (fraction of a turn), chroma and rescaled luminance `l~ = 2l - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HclColour {
    pub h: f64,
    pub c: f64,
    pub l_tilde: f64,
}

/// Cartesian coordinates in the bi-cone: `sqrt(x^2 + y^2) <= 1 - |z|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiconePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BiconePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BiconePoint { x, y, z }
    }

    pub fn chroma(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_in_gamut(&self, tol: f64) -> bool {
        self.z.abs() <= 1.0 + tol && self.chroma() <= 1.0 - self.z.abs() + tol
    }
}

/// RGB to hue/chroma/rescaled-luminance.
///
/// Achromatic colours (c = 0) get hue 0 by convention.
pub fn rgb_to_hcl(p: RgbColour) -> HclColour {
    let max = p.r.max(p.g).max(p.b);
    let min = p.r.min(p.g).min(p.b);
    let c = max - min;
    let l_tilde = max + min - 1.0;
    let h = if c <= 0.0 {
        0.0
    } else if max == p.r {
        ((p.g - p.b) / (6.0 * c)).rem_euclid(1.0)
    } else if max == p.g {
        ((p.b - p.r) / (6.0 * c) + 1.0 / 3.0).rem_euclid(1.0)
    } else {
        ((p.r - p.g) / (6.0 * c) + 2.0 / 3.0).rem_euclid(1.0)
    };
    HclColour { h, c, l_tilde }
}

/// Inverse of [`rgb_to_hcl`] via the standard hexagonal hue reconstruction.
pub fn hcl_to_rgb(p: HclColour) -> RgbColour {
    let min = 0.5 * (p.l_tilde + 1.0) - 0.5 * p.c;
    let hp = (p.h.rem_euclid(1.0)) * 6.0;
    let x = p.c * (1.0 - ((hp % 2.0) - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (p.c, x, 0.0),
        1 => (x, p.c, 0.0),
        2 => (0.0, p.c, x),
        3 => (0.0, x, p.c),
        4 => (x, 0.0, p.c),
        _ => (p.c, 0.0, x),
    };
    RgbColour::new(r1 + min, g1 + min, b1 + min)
}

/// Cylindrical-to-Cartesian on the bi-cone.
pub fn hcl_to_bicone(p: HclColour) -> BiconePoint {
    let angle = TAU * p.h;
    BiconePoint::new(p.c * angle.cos(), p.c * angle.sin(), p.l_tilde)
}

/// Cartesian-to-cylindrical; hue is 0 on (numerically) the grey axis.
pub fn bicone_to_hcl(p: BiconePoint) -> HclColour {
    let c = p.chroma();
    let h = if c < 1e-12 {
        0.0
    } else {
        (p.y.atan2(p.x) / TAU).rem_euclid(1.0)
    };
    HclColour {
        h,
        c,
        l_tilde: p.z,
    }
}

/// Linear map from bi-cone Cartesian coordinates to a symmetric matrix,
/// `A = (sqrt(2)/2) [[z - y, x], [x, z + y]]`. Defined on all of R^3.
pub fn bicone_to_sym2(p: BiconePoint) -> Sym2 {
    let s = SQRT_2 / 2.0;
    Sym2::new(s * (p.z - p.y), s * p.x, s * (p.z + p.y))
}

/// Exact linear inverse of [`bicone_to_sym2`] on all of R^3.
pub fn sym2_to_bicone(m: Sym2) -> BiconePoint {
    BiconePoint::new(
        SQRT_2 * m.a12,
        (m.a22 - m.a11) / SQRT_2,
        (m.a11 + m.a22) / SQRT_2,
    )
}

/// Projects a point onto the bi-cone, preserving hue.
///
/// `z` is clipped to [-1, 1]; a point whose chroma exceeds `1 - |z|` is then
/// moved to the nearest point of the bi-cone surface in the (chroma, z)
/// half-plane. Idempotent, and the identity on in-gamut points.
pub fn clamp_to_bicone(p: BiconePoint) -> BiconePoint {
    let z = p.z.clamp(-1.0, 1.0);
    let c = p.chroma();
    if c <= 1.0 - z.abs() {
        return BiconePoint::new(p.x, p.y, z);
    }
    // Nearest point on the boundary polyline {c = 1 - |z|, c >= 0} of the
    // (c, z) half-plane, considering both cone surface segments.
    let upper = project_to_segment(c, z, (1.0, 0.0), (0.0, 1.0));
    let lower = project_to_segment(c, z, (1.0, 0.0), (0.0, -1.0));
    let du = (upper.0 - c).hypot(upper.1 - z);
    let dl = (lower.0 - c).hypot(lower.1 - z);
    let (nc, nz) = if du <= dl { upper } else { lower };
    if c < 1e-12 {
        BiconePoint::new(0.0, 0.0, nz)
    } else {
        BiconePoint::new(p.x * nc / c, p.y * nc / c, nz)
    }
}

fn project_to_segment(c: f64, z: f64, a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let d = (b.0 - a.0, b.1 - a.1);
    let len2 = d.0 * d.0 + d.1 * d.1;
    let t = (((c - a.0) * d.0 + (z - a.1) * d.1) / len2).clamp(0.0, 1.0);
    (a.0 + t * d.0, a.1 + t * d.1)
}

/// The full forward chain RGB -> Sym(2).
pub fn rgb_to_sym2(p: RgbColour) -> Sym2 {
    bicone_to_sym2(hcl_to_bicone(rgb_to_hcl(p)))
}

/// The full inverse chain Sym(2) -> RGB, clamping to the bi-cone first.
pub fn sym2_to_rgb(m: Sym2) -> RgbColour {
    hcl_to_rgb(bicone_to_hcl(clamp_to_bicone(sym2_to_bicone(m))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_rgb_close(a: RgbColour, b: RgbColour, tol: f64) {
        assert!(
            (a.r - b.r).abs() < tol && (a.g - b.g).abs() < tol && (a.b - b.b).abs() < tol,
            "{a:?} vs {b:?}"
        );
    }

    #[test]
    fn rgb_to_hcl_primaries() {
        let blue = rgb_to_hcl(RgbColour::new(0.0, 0.0, 1.0));
        assert!((blue.h - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(blue.c, 1.0);
        assert_eq!(blue.l_tilde, 0.0);

        let green = rgb_to_hcl(RgbColour::new(0.0, 1.0, 0.0));
        assert!((green.h - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(green.c, 1.0);
        assert_eq!(green.l_tilde, 0.0);

        let white = rgb_to_hcl(RgbColour::new(1.0, 1.0, 1.0));
        assert_eq!((white.h, white.c, white.l_tilde), (0.0, 0.0, 1.0));
    }

    #[test]
    fn hcl_to_rgb_inverts() {
        assert_rgb_close(
            hcl_to_rgb(HclColour {
                h: 2.0 / 3.0,
                c: 1.0,
                l_tilde: 0.0,
            }),
            RgbColour::new(0.0, 0.0, 1.0),
            1e-12,
        );
        assert_rgb_close(
            hcl_to_rgb(HclColour {
                h: 0.0,
                c: 0.0,
                l_tilde: -1.0,
            }),
            RgbColour::new(0.0, 0.0, 0.0),
            1e-15,
        );
    }

    #[test]
    fn rgb_roundtrip_lattice() {
        for ri in 0..17 {
            for gi in 0..17 {
                for bi in 0..17 {
                    let p = RgbColour::new(ri as f64 / 16.0, gi as f64 / 16.0, bi as f64 / 16.0);
                    let q = hcl_to_rgb(rgb_to_hcl(p));
                    assert_rgb_close(p, q, 1e-9);
                }
            }
        }
    }

    #[test]
    fn bicone_coordinates() {
        let p = hcl_to_bicone(HclColour {
            h: 2.0 / 3.0,
            c: 1.0,
            l_tilde: 0.0,
        });
        assert!((p.x + 0.5).abs() < 1e-15);
        assert!((p.y + 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(p.z, 0.0);

        let q = hcl_to_bicone(HclColour {
            h: 1.0 / 3.0,
            c: 1.0,
            l_tilde: 0.0,
        });
        assert!((q.x + 0.5).abs() < 1e-15);
        assert!((q.y - 3f64.sqrt() / 2.0).abs() < 1e-15);

        let apex = hcl_to_bicone(HclColour {
            h: 0.0,
            c: 0.0,
            l_tilde: 1.0,
        });
        assert_eq!((apex.x, apex.y, apex.z), (0.0, 0.0, 1.0));
    }

    #[test]
    fn bicone_to_hcl_inverts() {
        let h = bicone_to_hcl(BiconePoint::new(-0.5, -3f64.sqrt() / 2.0, 0.0));
        assert!((h.h - 2.0 / 3.0).abs() < 1e-12);
        assert!((h.c - 1.0).abs() < 1e-12);
        let apex = bicone_to_hcl(BiconePoint::new(0.0, 0.0, 1.0));
        assert_eq!((apex.h, apex.c, apex.l_tilde), (0.0, 0.0, 1.0));
    }

    #[test]
    fn matrix_map_examples() {
        let zero = bicone_to_sym2(BiconePoint::new(0.0, 0.0, 0.0));
        assert_eq!(zero, Sym2::ZERO);

        let white = bicone_to_sym2(BiconePoint::new(0.0, 0.0, 1.0));
        assert!(white.max_entry_distance(&Sym2::scaled_identity(SQRT_2 / 2.0)) < 1e-15);

        let s = SQRT_2 / 2.0;
        let blue = bicone_to_sym2(BiconePoint::new(-0.5, -3f64.sqrt() / 2.0, 0.0));
        let expect = Sym2::new(s * 3f64.sqrt() / 2.0, -s * 0.5, -s * 3f64.sqrt() / 2.0);
        assert!(blue.max_entry_distance(&expect) < 1e-15);
    }

    #[test]
    fn matrix_map_inverse_and_linearity() {
        let back = sym2_to_bicone(Sym2::scaled_identity(SQRT_2 / 2.0));
        assert!((back.x.abs()).max(back.y.abs()).max((back.z - 1.0).abs()) < 1e-15);
        assert_eq!(sym2_to_bicone(Sym2::ZERO), BiconePoint::new(0.0, 0.0, 0.0));

        let p = BiconePoint::new(0.3, -0.4, 0.1);
        let q = BiconePoint::new(-0.9, 2.0, 0.7);
        let lhs = bicone_to_sym2(BiconePoint::new(
            2.0 * p.x - 3.0 * q.x,
            2.0 * p.y - 3.0 * q.y,
            2.0 * p.z - 3.0 * q.z,
        ));
        let rhs = 2.0 * bicone_to_sym2(p) + -3.0 * bicone_to_sym2(q);
        assert!(lhs.max_entry_distance(&rhs) < 1e-14);
    }

    #[test]
    fn roundtrip_bicone_sym2_random() {
        let mut state = 7u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        for _ in 0..500 {
            let p = BiconePoint::new(next(), next(), next());
            let q = sym2_to_bicone(bicone_to_sym2(p));
            assert!((p.x - q.x).abs() < 1e-14);
            assert!((p.y - q.y).abs() < 1e-14);
            assert!((p.z - q.z).abs() < 1e-14);
        }
    }

    #[test]
    fn clamp_examples() {
        let inside = BiconePoint::new(0.2, 0.1, -0.3);
        assert_eq!(clamp_to_bicone(inside), inside);

        let axis = clamp_to_bicone(BiconePoint::new(0.0, 0.0, 1.2));
        assert_eq!((axis.x, axis.y, axis.z), (0.0, 0.0, 1.0));

        let p = clamp_to_bicone(BiconePoint::new(1.0, 0.0, 0.5));
        assert!((p.x - 0.75).abs() < 1e-12);
        assert!(p.y.abs() < 1e-15);
        assert!((p.z - 0.25).abs() < 1e-12);
    }

    #[test]
    fn clamp_is_idempotent() {
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 6.0 - 3.0
        };
        for _ in 0..500 {
            let p = BiconePoint::new(next(), next(), next());
            let once = clamp_to_bicone(p);
            let twice = clamp_to_bicone(once);
            assert!(once.is_in_gamut(1e-9));
            assert!((once.x - twice.x).abs() < 1e-12);
            assert!((once.y - twice.y).abs() < 1e-12);
            assert!((once.z - twice.z).abs() < 1e-12);
        }
    }

    #[test]
    fn in_gamut_eigenvalues_bounded() {
        // Eigenvalues of colour matrices stay inside [-sqrt2/2, sqrt2/2].
        for ri in 0..9 {
            for gi in 0..9 {
                for bi in 0..9 {
                    let m = rgb_to_sym2(RgbColour::new(
                        ri as f64 / 8.0,
                        gi as f64 / 8.0,
                        bi as f64 / 8.0,
                    ));
                    let (lam, mu) = m.eigenvalues();
                    assert!(lam <= SQRT_2 / 2.0 + 1e-12);
                    assert!(mu >= -SQRT_2 / 2.0 - 1e-12);
                }
            }
        }
    }
}
