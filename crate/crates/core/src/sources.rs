//! Two antiparallel wires plus a uniform bias as a practical gradient source.
//!
//! The wires run along x through (y, z) = (±z_w, −z_w/2); the one at
//! y = +z_w carries +I_w x̂ and the other −I_w x̂. The bias B_b ẑ cancels
//! the wire field at the origin, leaving a quadrupole of gradient b there.

use std::f64::consts::PI;

use crate::analytic_strip::{b_field, corner_field, AppliedField, FieldPoint, StripState};
use crate::domain::StripSpec;
use crate::error::{Error, Result};
use crate::numerics::linear_fit;
use crate::units::MU0;

/// Series coefficient of the transverse gradient variation.
pub const ALPHA: f64 = 0.72;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirePairSpec {
    pub i_w: f64,
    pub z_w: f64,
}

impl WirePairSpec {
    pub fn new(i_w: f64, z_w: f64) -> Result<Self> {
        if !(i_w > 0.0 && z_w > 0.0 && i_w.is_finite() && z_w.is_finite()) {
            return Err(Error::domain(format!("wire pair needs I_w > 0 and z_w > 0, got {i_w:e}, {z_w:e}")));
        }
        Ok(WirePairSpec { i_w, z_w })
    }

    /// Wire pair with the depth that produces gradient `b` at current `i_w`.
    pub fn with_gradient(i_w: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::domain(format!("gradient must be positive, got {b:e}")));
        }
        WirePairSpec::new(i_w, depth_for_gradient(i_w, b))
    }

    /// Wire separation d_w = 4z_w.
    pub fn separation(&self) -> f64 {
        4.0 * self.z_w
    }

    fn wires(&self) -> [(f64, f64, f64); 2] {
        [(self.z_w, -0.5 * self.z_w, 1.0), (-self.z_w, -0.5 * self.z_w, -1.0)]
    }

    fn check_point(&self, p: FieldPoint) -> Result<()> {
        for (y0, z0, _) in self.wires() {
            if p.y == y0 && p.z == z0 {
                return Err(Error::domain(format!("point ({:e}, {:e}) is on a wire", p.y, p.z)));
            }
        }
        Ok(())
    }
}

/// Field of the two wires alone (B_y, B_z) [T].
pub fn wire_pair_field(p: FieldPoint, spec: &WirePairSpec) -> Result<(f64, f64)> {
    spec.check_point(p)?;
    let pre = MU0 * spec.i_w / (2.0 * PI * spec.z_w);
    let (yn, zn) = (p.y / spec.z_w, p.z / spec.z_w);
    let mut b = (0.0, 0.0);
    for j in 0..2 {
        let sign = if j == 0 { 1.0 } else { -1.0 };
        let dy = yn - sign;
        let dz = zn + 0.5;
        let r2 = dy * dy + dz * dz;
        b.0 += sign * (-dz / r2);
        b.1 += sign * (dy / r2);
    }
    Ok((pre * b.0, pre * b.1))
}

/// ∂_z B_z of the wires at `p` [T/m].
pub fn wire_pair_gradient(p: FieldPoint, spec: &WirePairSpec) -> Result<f64> {
    spec.check_point(p)?;
    let mut g = 0.0;
    for (y0, z0, s) in spec.wires() {
        let (dy, dz) = (p.y - y0, p.z - z0);
        let r2 = dy * dy + dz * dz;
        g += s * (-2.0 * dy * dz) / (r2 * r2);
    }
    Ok(MU0 * spec.i_w / (2.0 * PI) * g)
}

/// A_x of the wires, with the gauge fixed so the potential is odd in y.
pub fn wire_pair_potential(p: FieldPoint, spec: &WirePairSpec) -> Result<f64> {
    spec.check_point(p)?;
    let mut a = 0.0;
    for (y0, z0, s) in spec.wires() {
        a -= s * 0.5 * ((p.y - y0).powi(2) + (p.z - z0).powi(2)).ln();
    }
    Ok(MU0 * spec.i_w / (2.0 * PI) * a)
}

/// B_b = 4μ₀I_w/(5πz_w) [T].
pub fn bias_field(spec: &WirePairSpec) -> f64 {
    4.0 * MU0 * spec.i_w / (5.0 * PI * spec.z_w)
}

/// b = 16μ₀I_w/(25πz_w²) [T/m].
pub fn gradient_at_origin(spec: &WirePairSpec) -> f64 {
    16.0 * MU0 * spec.i_w / (25.0 * PI * spec.z_w * spec.z_w)
}

/// z_w such that `gradient_at_origin` equals `b`.
pub fn depth_for_gradient(i_w: f64, b: f64) -> f64 {
    (16.0 * MU0 * i_w / (25.0 * PI * b)).sqrt()
}

/// Wires plus bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedWirePair(pub WirePairSpec);

impl AppliedField for BiasedWirePair {
    fn evaluate(&self, p: FieldPoint) -> Result<(f64, f64, f64)> {
        let s = &self.0;
        let (by, bz) = wire_pair_field(p, s)?;
        let bb = bias_field(s);
        Ok((wire_pair_potential(p, s)? - bb * p.y, by, bz + bb))
    }
}

/// Gradient inhomogeneity across the strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inhomogeneity {
    /// α(w/z_w)².
    pub series: f64,
    /// ∂_zB_z(w/2, 0)/b − 1 evaluated from the field.
    pub exact: f64,
}

pub fn gradient_inhomogeneity(w: f64, spec: &WirePairSpec) -> Result<Inhomogeneity> {
    if w >= spec.z_w {
        return Err(Error::domain(format!("series needs w < z_w, got w={w:e}, z_w={:e}", spec.z_w)));
    }
    let r = spec.z_w;
    let exact = wire_pair_gradient(FieldPoint::new(0.5 * w, 0.0), spec)? / gradient_at_origin(spec) - 1.0;
    Ok(Inhomogeneity { series: ALPHA * (w / r).powi(2), exact })
}

/// Width ratio w/z_w giving series inhomogeneity ε.
pub fn width_for_inhomogeneity(eps: f64) -> f64 {
    (eps / ALPHA).sqrt()
}

/// Quadratic coefficient of ∂_zB_z(y, 0)/b in powers of (2y/z_w), from a
/// least-squares fit of the computed field over |2y/z_w| ≤ `span`.
pub fn fitted_alpha(spec: &WirePairSpec, span: f64) -> Result<f64> {
    let b = gradient_at_origin(spec);
    let n = 41;
    let mut u2 = Vec::with_capacity(n);
    let mut ratio = Vec::with_capacity(n);
    for k in 1..=n {
        let u = span * k as f64 / n as f64;
        let y = 0.5 * u * spec.z_w;
        let g = wire_pair_gradient(FieldPoint::new(y, 0.0), spec)? / b - 1.0;
        u2.push(u * u);
        ratio.push(g / (u * u));
    }
    // (g/u²) = α + c₄u² + …; the intercept is α.
    Ok(linear_fit(&u2, &ratio)?.0)
}

/// |B_w + B_b + B_K| at `p` with the strip driven by the gradient at the
/// origin [T].
pub fn total_field_with_strip(p: FieldPoint, spec: &WirePairSpec, z_m: f64, strip: &StripSpec) -> Result<f64> {
    let (_, by, bz) = BiasedWirePair(*spec).evaluate(p)?;
    let state = StripState::quadrupole(gradient_at_origin(spec), z_m);
    let (ky, kz) = b_field(p, &state, strip)?;
    Ok((by + ky).hypot(bz + kz))
}

/// True when the edge-enhanced field at the strip corner stays below B_c.
pub fn corner_field_safe(spec: &WirePairSpec, strip: &StripSpec) -> bool {
    corner_field(gradient_at_origin(spec), strip) < strip.b_c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nominal() -> WirePairSpec {
        WirePairSpec::new(1.0, 5.4e-6).unwrap()
    }

    #[test]
    fn origin_field() {
        let s = nominal();
        let (by, bz) = wire_pair_field(FieldPoint::new(0.0, 0.0), &s).unwrap();
        assert_eq!(by, 0.0);
        let expect = -0.8 * MU0 * s.i_w / (PI * s.z_w);
        assert!((bz / expect - 1.0).abs() < 1e-14);
        let (_, by, bz) = BiasedWirePair(s).evaluate(FieldPoint::new(0.0, 0.0)).unwrap();
        assert_eq!(by, 0.0);
        assert!(bz.abs() < 1e-17);
    }

    #[test]
    fn bias_value() {
        assert!((bias_field(&nominal()) - 59.26e-3).abs() < 1e-4);
    }

    #[test]
    fn superposition_oracle() {
        let s = nominal();
        let single = |y: f64, z: f64, y0: f64, z0: f64, i: f64| {
            let (dy, dz) = (y - y0, z - z0);
            let r2 = dy * dy + dz * dz;
            let k = MU0 * i / (2.0 * PI * r2);
            (-k * dz, k * dy)
        };
        for (y, z) in [(1.1e-6, 1e-6), (-3e-6, 2e-6), (7e-6, -4e-6)] {
            let a = single(y, z, s.z_w, -s.z_w / 2.0, s.i_w);
            let b = single(y, z, -s.z_w, -s.z_w / 2.0, -s.i_w);
            let (by, bz) = wire_pair_field(FieldPoint::new(y, z), &s).unwrap();
            let n = (a.0 + b.0).hypot(a.1 + b.1);
            assert!(((a.0 + b.0) - by).abs() / n < 1e-12);
            assert!(((a.1 + b.1) - bz).abs() / n < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_field_derivative() {
        let s = nominal();
        let h = 1e-4 * s.z_w;
        let bz = |z: f64| wire_pair_field(FieldPoint::new(0.0, z), &s).unwrap().1;
        let fd = (bz(h) - bz(-h)) / (2.0 * h);
        assert!((fd / gradient_at_origin(&s) - 1.0).abs() < 1e-8);
        let half = WirePairSpec::new(1.0, s.z_w / 2.0).unwrap();
        assert!((gradient_at_origin(&half) / gradient_at_origin(&s) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn depth_inversion() {
        let z = depth_for_gradient(1.0, 4.1e4);
        assert!((z - 2.50e-6).abs() < 0.01e-6);
        let s = WirePairSpec::with_gradient(1.0, 4.1e4).unwrap();
        assert!((gradient_at_origin(&s) / 4.1e4 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn alpha_recovered() {
        let a = fitted_alpha(&nominal(), 0.1).unwrap();
        assert!((a - ALPHA).abs() < 1e-3, "{a}");
    }

    #[test]
    fn inhomogeneity_inversion() {
        let eps = 0.05;
        let s = nominal();
        let w = width_for_inhomogeneity(eps) * s.z_w;
        let r = gradient_inhomogeneity(w, &s).unwrap();
        assert!((r.series - eps).abs() < 1e-15);
        assert!((r.exact / eps - 1.0).abs() < 0.1);
        assert!(gradient_inhomogeneity(1e-12, &s).unwrap().series < 1e-12);
    }

    #[test]
    fn total_field_near_coil_wire() {
        let s = WirePairSpec::with_gradient(1.0, 4.1e4).unwrap();
        let strip = StripSpec::new(100e-6, 1e-6, 50e-9, 0.14, 8.57e3, 39e-9, 38e-9).unwrap();
        let b = total_field_with_strip(FieldPoint::new(1.1e-6, 1e-6), &s, 0.0, &strip).unwrap();
        assert!((b / 62e-3 - 1.0).abs() < 0.2, "{b}");
        let b0 = total_field_with_strip(FieldPoint::new(0.0, 1e-15), &s, 0.0, &strip).unwrap();
        assert!(b0 < 1e-9);
        let mut prev = b;
        for k in 1..50 {
            let y = 1.1e-6 + 1e-9 * k as f64;
            let v = total_field_with_strip(FieldPoint::new(y, 1e-6), &s, 0.0, &strip).unwrap();
            assert!((v - prev).abs() < 1e-3 * b);
            prev = v;
        }
    }

    #[test]
    fn wire_singularity_rejected() {
        let s = nominal();
        assert!(wire_pair_field(FieldPoint::new(s.z_w, -s.z_w / 2.0), &s).is_err());
    }

    proptest! {
        #[test]
        fn divergence_and_curl_free(y in -20e-6f64..20e-6, z in -1e-6f64..20e-6) {
            let s = nominal();
            let h = 1e-5 * s.z_w;
            let f = |y: f64, z: f64| BiasedWirePair(s).evaluate(FieldPoint::new(y, z)).unwrap();
            let (_, by, bz) = f(y, z);
            let scale = by.hypot(bz).max(bias_field(&s) * 1e-3) / s.z_w;
            let dyby = (f(y + h, z).1 - f(y - h, z).1) / (2.0 * h);
            let dzbz = (f(y, z + h).2 - f(y, z - h).2) / (2.0 * h);
            let dzby = (f(y, z + h).1 - f(y, z - h).1) / (2.0 * h);
            let dybz = (f(y + h, z).2 - f(y - h, z).2) / (2.0 * h);
            prop_assert!((dyby + dzbz).abs() / scale < 1e-6);
            prop_assert!((dzby - dybz).abs() / scale < 1e-6);
        }

        #[test]
        fn mirror_symmetry(z in -1e-6f64..30e-6) {
            let (by, _) = wire_pair_field(FieldPoint::new(0.0, z), &nominal()).unwrap();
            prop_assert!(by.abs() < 1e-20);
        }

        #[test]
        fn bias_linear(i in 0.01f64..10.0) {
            let s = WirePairSpec::new(i, 5.4e-6).unwrap();
            prop_assert!((bias_field(&s) / i / bias_field(&nominal()) - 1.0).abs() < 1e-13);
        }
    }
}
