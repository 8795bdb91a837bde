//! Geometry and material descriptions, validity checks, and the derived
//! mechanical quantities.

use crate::error::{Error, Result};
use crate::units::HBAR;

/// Superconducting strip: geometry and material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripSpec {
    /// Length along x [m].
    pub l: f64,
    /// Width along y [m].
    pub w: f64,
    /// Thickness [m].
    pub t: f64,
    /// First critical field [T].
    pub b_c: f64,
    /// Mass density [kg/m³].
    pub rho: f64,
    /// London penetration depth [m].
    pub lambda_l: f64,
    /// Coherence length [m].
    pub xi: f64,
}

impl StripSpec {
    pub fn new(l: f64, w: f64, t: f64, b_c: f64, rho: f64, lambda_l: f64, xi: f64) -> Result<Self> {
        let s = StripSpec { l, w, t, b_c, rho, lambda_l, xi };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("L", self.l),
            ("w", self.w),
            ("t", self.t),
            ("B_c", self.b_c),
            ("rho", self.rho),
            ("xi", self.xi),
        ] {
            positive(name, v)?;
        }
        if !(self.lambda_l >= 0.0 && self.lambda_l.is_finite()) {
            return Err(Error::domain(format!("lambda_L must be non-negative, got {:e}", self.lambda_l)));
        }
        if !(self.l > self.w && self.w > self.t) {
            return Err(Error::domain(format!(
                "strip must satisfy L > w > t (L={:e}, w={:e}, t={:e})",
                self.l, self.w, self.t
            )));
        }
        Ok(())
    }

    /// Pearl length λ²/t.
    pub fn pearl_length(&self) -> f64 {
        self.lambda_l * self.lambda_l / self.t
    }
}

/// Cantilever carrying the strip and its fundamental flexural mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CantileverSpec {
    pub t0: f64,
    pub rho0: f64,
    /// Mechanical angular frequency [rad/s].
    pub omega: f64,
    /// Mechanical damping rate [rad/s].
    pub gamma: f64,
    /// Bath temperature [K].
    pub temperature: f64,
}

impl CantileverSpec {
    pub fn new(t0: f64, rho0: f64, omega: f64, gamma: f64, temperature: f64) -> Result<Self> {
        let c = CantileverSpec { t0, rho0, omega, gamma, temperature };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        // t0 = 0 describes a bare strip and is allowed.
        if !(self.t0 >= 0.0 && self.t0.is_finite()) {
            return Err(Error::domain(format!("t0 must be non-negative, got {:e}", self.t0)));
        }
        positive("rho0", self.rho0)?;
        positive("Omega", self.omega)?;
        positive("gamma", self.gamma)?;
        positive("T", self.temperature)
    }
}

/// Rectangular pick-up coil centred above the strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoilSpec {
    pub w_c: f64,
    pub z_c: f64,
    pub l_c: f64,
}

impl CoilSpec {
    pub fn new(w_c: f64, z_c: f64, l_c: f64) -> Result<Self> {
        let c = CoilSpec { w_c, z_c, l_c };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        positive("w_c", self.w_c)?;
        positive("z_c", self.z_c)?;
        positive("L_c", self.l_c)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v:e}")))
    }
}

/// Thresholds used to decide the "much smaller than" assumptions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub small_ratio: f64,
    pub min_aspect: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { small_ratio: 0.1, min_aspect: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub ratio: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Thin-film and Meissner-state validity checks for a strip.
///
/// For `lambda_or_pearl` the reported ratio is the smaller of λ/t and Λ/w.
pub fn validate_strip(strip: &StripSpec) -> ValidationReport {
    validate_strip_with(strip, Thresholds::default())
}

pub fn validate_strip_with(strip: &StripSpec, th: Thresholds) -> ValidationReport {
    let thin = strip.t / strip.w;
    let screening = (strip.lambda_l / strip.t).min(strip.pearl_length() / strip.w);
    let coherence = strip.xi / strip.t;
    let aspect = strip.l / strip.w;
    ValidationReport {
        checks: vec![
            Check { name: "thin_film", pass: thin < th.small_ratio, ratio: thin, threshold: th.small_ratio },
            Check {
                name: "lambda_or_pearl",
                pass: screening < th.small_ratio,
                ratio: screening,
                threshold: th.small_ratio,
            },
            Check { name: "thicker_than_xi", pass: coherence < 1.0, ratio: coherence, threshold: 1.0 },
            Check { name: "long_strip", pass: aspect >= th.min_aspect, ratio: aspect, threshold: th.min_aspect },
        ],
    }
}

/// M = L·w·(ρt + ρ₀t₀).
pub fn effective_mass(strip: &StripSpec, cant: &CantileverSpec) -> f64 {
    strip.l * strip.w * (strip.rho * strip.t + cant.rho0 * cant.t0)
}

/// √(ħ/(2MΩ)).
pub fn zero_point_motion(mass: f64, omega: f64) -> f64 {
    (HBAR / (2.0 * mass * omega)).sqrt()
}

/// Strip, cantilever and coil assembled into one device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    pub strip: StripSpec,
    pub cantilever: CantileverSpec,
    pub coil: CoilSpec,
}

impl SystemSpec {
    pub fn mass(&self) -> f64 {
        effective_mass(&self.strip, &self.cantilever)
    }

    pub fn z_zp(&self) -> f64 {
        zero_point_motion(self.mass(), self.cantilever.omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nb() -> StripSpec {
        StripSpec::new(100e-6, 1e-6, 50e-9, 0.14, 8.57e3, 39e-9, 38e-9).unwrap()
    }

    fn silica() -> CantileverSpec {
        CantileverSpec::new(0.5e-6, 2.3e3, 2.0 * std::f64::consts::PI * 1e6, 2.0 * std::f64::consts::PI, 0.05)
            .unwrap()
    }

    #[test]
    fn nb_passes_all_checks() {
        let r = validate_strip(&nb());
        assert_eq!(r.checks.len(), 4);
        assert!(r.all_pass());
        assert!((nb().pearl_length() / 1e-6 - 3.042e-2).abs() < 1e-4);
    }

    #[test]
    fn thick_strip_fails_thin_film() {
        let mut s = nb();
        s.t = s.w;
        let r = validate_strip(&s);
        assert!(!r.checks[0].pass);
        assert_eq!(r.checks[0].ratio, 1.0);
    }

    #[test]
    fn both_screening_branches_fail() {
        // λ = 10t and Λ = 100w.
        let s = StripSpec { l: 1e-4, w: 1e-8, t: 1e-8, b_c: 0.14, rho: 8.57e3, lambda_l: 1e-7, xi: 1e-9 };
        assert!((s.pearl_length() / s.w - 100.0).abs() < 1e-9);
        let c = &validate_strip(&s).checks[1];
        assert!(!c.pass);
        assert!((c.ratio - 10.0).abs() < 1e-12);
    }

    #[test]
    fn geometry_order_enforced() {
        assert!(StripSpec::new(1e-6, 2e-6, 50e-9, 0.14, 8.57e3, 39e-9, 38e-9).is_err());
        assert!(CoilSpec::new(0.0, 1e-6, 1e-4).is_err());
    }

    #[test]
    fn flagship_mass_and_zpm() {
        // Hand evaluation: 1e-4 * 1e-6 * (8.57e3*5e-8 + 2.3e3*5e-7) = 1.5785e-13.
        let m = effective_mass(&nb(), &silica());
        assert!((m - 1.5785e-13).abs() < 1e-18);
        let z = zero_point_motion(m, silica().omega);
        assert!((z - 7.2914e-15).abs() < 1e-18);
    }

    #[test]
    fn bare_strip_mass() {
        let mut c = silica();
        c.t0 = 0.0;
        let s = nb();
        assert_eq!(effective_mass(&s, &c), s.l * s.w * s.rho * s.t);
    }

    proptest! {
        #[test]
        fn mass_is_bilinear(k in 0.1f64..10.0) {
            let s = nb();
            let mut s2 = s;
            s2.l *= k;
            s2.w *= k;
            let c = silica();
            let ratio = effective_mass(&s2, &c) / effective_mass(&s, &c);
            prop_assert!((ratio / (k * k) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn zpm_exponents(m in 1e-16f64..1e-10, om in 1e3f64..1e9, k in 0.1f64..10.0) {
            let z = zero_point_motion(m, om);
            prop_assert!((zero_point_motion(k * m, om) * k.sqrt() / z - 1.0).abs() < 1e-12);
            prop_assert!((zero_point_motion(m, k * om) * k.sqrt() / z - 1.0).abs() < 1e-12);
        }

        #[test]
        fn validation_is_pure(t in 1e-9f64..9e-7) {
            let mut s = nb();
            s.t = t;
            prop_assert_eq!(validate_strip(&s), validate_strip(&s));
        }
    }
}
