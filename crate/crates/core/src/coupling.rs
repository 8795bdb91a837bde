//! Flux-tunable transmon readout of the strip motion.

use std::f64::consts::PI;

use crate::analytic_strip::{chi, eta, eta_star, FieldMode};
use crate::domain::{CantileverSpec, SystemSpec};
use crate::error::{Error, Result};
use crate::numerics::bisect;
use crate::units::{BOLTZMANN, HBAR};

/// Transmon-regime lower bound on E_J(0)/E_C.
pub const TRANSMON_MIN_RATIO: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitSpec {
    /// Single-junction Josephson energy [J].
    pub e_j1: f64,
    /// Charging energy [J].
    pub e_c: f64,
    /// Static flux bias Φ(0)/Φ₀.
    pub flux_bias: f64,
    pub q: f64,
}

impl CircuitSpec {
    pub fn new(e_j1: f64, e_c: f64, flux_bias: f64, q: f64) -> Result<Self> {
        let c = CircuitSpec { e_j1, e_c, flux_bias, q };
        c.check()?;
        Ok(c)
    }

    /// Circuit with ħω₀ = √(8E_J1E_C) and E_J(0)/E_C = `ej_over_ec` at the
    /// operating point `flux_bias`.
    pub fn from_omega0(omega0: f64, ej_over_ec: f64, flux_bias: f64, q: f64) -> Result<Self> {
        if !(omega0 > 0.0 && ej_over_ec > 0.0) {
            return Err(Error::domain("ω₀ and E_J/E_C must be positive"));
        }
        let c = (PI * flux_bias).cos();
        if !(c > 0.0 && flux_bias.abs() < 0.5) {
            return Err(Error::domain(format!("|Φ(0)/Φ₀| must be below 1/2, got {flux_bias}")));
        }
        // r = 2E_J1/E_C, and ħω₀ = √(8·(r/2)·E_C·E_C) = 2√r·E_C.
        let r = ej_over_ec / c;
        let e_c = HBAR * omega0 / (2.0 * r.sqrt());
        CircuitSpec::new(0.5 * r * e_c, e_c, flux_bias, q)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.e_j1 > 0.0 && self.e_c > 0.0 && self.q > 0.0) {
            return Err(Error::domain("E_J1, E_C and Q must be positive"));
        }
        if !(self.flux_bias.abs() < 0.5) {
            return Err(Error::domain(format!("|Φ(0)/Φ₀| must be below 1/2, got {}", self.flux_bias)));
        }
        Ok(())
    }

    /// ω₀ = √(8E_J1E_C)/ħ.
    pub fn omega0(&self) -> f64 {
        (8.0 * self.e_j1 * self.e_c).sqrt() / HBAR
    }

    /// E_J(0)/E_C.
    pub fn ej_over_ec(&self) -> f64 {
        2.0 * self.e_j1 * (PI * self.flux_bias).cos() / self.e_c
    }

    pub fn kappa(&self) -> f64 {
        self.omega0() / self.q
    }
}

/// ω = ([8·2E_J1cos(πf)·E_C]^½ − E_C)/ħ.
pub fn transmon_frequency(circuit: &CircuitSpec, flux_frac: f64) -> Result<f64> {
    let c = (PI * flux_frac).cos();
    if c <= 0.0 {
        return Err(Error::domain(format!("cos(πΦ/Φ₀) = {c:e} is not positive")));
    }
    Ok(((16.0 * circuit.e_j1 * c * circuit.e_c).sqrt() - circuit.e_c) / HBAR)
}

/// φ = π sin(πf)/√(2cos(πf)).
pub fn phi_sensitivity(flux_frac: f64) -> Result<f64> {
    let c = (PI * flux_frac).cos();
    if c <= 0.0 {
        return Err(Error::domain(format!("cos(πΦ/Φ₀) = {c:e} is not positive")));
    }
    Ok(PI * (PI * flux_frac).sin() / (2.0 * c).sqrt())
}

/// Flux bias in [0, 1/2) at which φ equals `phi`.
pub fn flux_bias_for_phi(phi: f64) -> Result<f64> {
    if !(phi >= 0.0 && phi.is_finite()) {
        return Err(Error::domain(format!("φ must be non-negative, got {phi:e}")));
    }
    if phi == 0.0 {
        return Ok(0.0);
    }
    bisect(|f| phi_sensitivity(f).unwrap_or(f64::INFINITY) - phi, 0.0, 0.5 - 1e-12, 1e-15)
}

/// g₀ = φω₀η.
pub fn single_photon_coupling(phi: f64, omega0: f64, eta: f64) -> f64 {
    phi * omega0 * eta
}

/// g₀/κ = φQη.
pub fn coupling_ratio(phi: f64, q: f64, eta: f64) -> f64 {
    phi * q * eta
}

/// Which mechanical frequency enters Γ = γk_BT/(ħΩ_eff).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaConvention {
    /// Ω_eff = Ω/2π.
    Cyclic,
    /// Ω_eff = Ω.
    Angular,
}

impl OmegaConvention {
    pub fn name(self) -> &'static str {
        match self {
            OmegaConvention::Cyclic => "cyclic",
            OmegaConvention::Angular => "angular",
        }
    }
}

pub fn mechanical_decoherence(cant: &CantileverSpec, convention: OmegaConvention) -> f64 {
    let omega_eff = match convention {
        OmegaConvention::Cyclic => cant.omega / (2.0 * PI),
        OmegaConvention::Angular => cant.omega,
    };
    cant.gamma * BOLTZMANN * cant.temperature / (HBAR * omega_eff)
}

/// 𝒞 = g₀²/(κΓ).
pub fn cooperativity(g0: f64, kappa: f64, gamma: f64) -> f64 {
    g0 * g0 / (kappa * gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub mode: FieldMode,
    /// Drive amplitude (b or B_a).
    pub amplitude: f64,
    /// Gradient used for η⋆.
    pub reference_gradient: f64,
    pub mass: f64,
    pub z_zp: f64,
    pub eta: f64,
    pub eta_star: f64,
    pub chi: f64,
    pub phi: f64,
    pub omega0: f64,
    pub omega: f64,
    pub g0: f64,
    pub kappa: f64,
    pub g0_over_kappa: f64,
    pub gamma_m: f64,
    pub cooperativity: f64,
    pub ej_over_ec: f64,
    pub transmon_regime: bool,
    pub convention: OmegaConvention,
}

/// Evaluate the full coupling chain. `reference_gradient` sets η⋆; for a
/// quadrupole drive pass the drive gradient itself.
pub fn coupling_report(
    sys: &SystemSpec,
    circuit: &CircuitSpec,
    amplitude: f64,
    mode: FieldMode,
    reference_gradient: f64,
    convention: OmegaConvention,
) -> Result<CouplingReport> {
    let w = sys.strip.w;
    let z_zp = sys.z_zp();
    let eta_v = eta(z_zp, amplitude, &sys.coil, w, mode);
    let phi = phi_sensitivity(circuit.flux_bias)?;
    let omega0 = circuit.omega0();
    let g0 = single_photon_coupling(phi, omega0, eta_v);
    let kappa = circuit.kappa();
    let gamma_m = mechanical_decoherence(&sys.cantilever, convention);
    let ratio = circuit.ej_over_ec();
    Ok(CouplingReport {
        mode,
        amplitude,
        reference_gradient,
        mass: sys.mass(),
        z_zp,
        eta: eta_v,
        eta_star: eta_star(z_zp, reference_gradient, sys.coil.l_c, w),
        chi: chi(sys.coil.w_c / w, sys.coil.z_c / w),
        phi,
        omega0,
        omega: transmon_frequency(circuit, circuit.flux_bias)?,
        g0,
        kappa,
        g0_over_kappa: coupling_ratio(phi, circuit.q, eta_v),
        gamma_m,
        cooperativity: cooperativity(g0, kappa, gamma_m),
        ej_over_ec: ratio,
        transmon_regime: ratio >= TRANSMON_MIN_RATIO,
        convention,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic_strip::{pickup_flux, StripState};
    use crate::domain::{CoilSpec, StripSpec};
    use crate::units::FLUX_QUANTUM;
    use proptest::prelude::*;

    fn circuit(f: f64) -> CircuitSpec {
        CircuitSpec::from_omega0(2.0 * PI * 6.3e9, 50.0, f, 1e6).unwrap()
    }

    #[test]
    fn omega0_round_trip() {
        let c = circuit(0.0);
        assert!((c.omega0() / (2.0 * PI * 6.3e9) - 1.0).abs() < 1e-13);
        assert!((c.ej_over_ec() - 50.0).abs() < 1e-10);
        let biased = circuit(0.3);
        assert!((biased.omega0() / (2.0 * PI * 6.3e9) - 1.0).abs() < 1e-13);
        assert!((biased.ej_over_ec() - 50.0).abs() < 1e-10);
    }

    #[test]
    fn frequency_maximum_and_parity() {
        let c = circuit(0.0);
        let w0 = transmon_frequency(&c, 0.0).unwrap();
        assert!((w0 - ((16.0 * c.e_j1 * c.e_c).sqrt() - c.e_c) / HBAR).abs() < 1e-3);
        for f in [0.1, 0.25, 0.4] {
            assert_eq!(transmon_frequency(&c, f).unwrap(), transmon_frequency(&c, -f).unwrap());
            assert!(transmon_frequency(&c, f).unwrap() < w0);
        }
        assert!(transmon_frequency(&c, 0.6).is_err());
    }

    #[test]
    fn frequency_slope_matches_phi() {
        let c = circuit(0.0);
        for f in [0.1, 0.25, 0.35] {
            let h = 1e-6;
            let d = (transmon_frequency(&c, f + h).unwrap() - transmon_frequency(&c, f - h).unwrap()) / (2.0 * h);
            let expect = -c.omega0() * phi_sensitivity(f).unwrap();
            assert!((d / expect - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi_sensitivity(0.0).unwrap(), 0.0);
        let p = phi_sensitivity(0.25).unwrap();
        let exact = PI * (PI / 4.0).sin() / (2.0 * (PI / 4.0).cos()).sqrt();
        assert!((p - exact).abs() < 1e-15);
        assert!((p - 1.868).abs() < 1e-3);
        let f = flux_bias_for_phi(2.0).unwrap();
        assert!((phi_sensitivity(f).unwrap() - 2.0).abs() < 1e-10);
        let mut prev = -1.0;
        for k in 0..=45 {
            let v = phi_sensitivity(0.01 * k as f64).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn g0_example() {
        let g0 = single_photon_coupling(1.87, 2.0 * PI * 6.3e9, 10.2e-6);
        assert!((g0 / (2.0 * PI * 120e3) - 1.0).abs() < 0.01);
        let (phi, q, eta) = (1.87, 1e6, 10.2e-6);
        let omega0 = 2.0 * PI * 6.3e9;
        let a = coupling_ratio(phi, q, eta);
        let b = single_photon_coupling(phi, omega0, eta) / (omega0 / q);
        assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decoherence_conventions() {
        let cant = CantileverSpec::new(0.5e-6, 2.3e3, 2.0 * PI * 1e6, 2.0 * PI, 0.05).unwrap();
        let g = mechanical_decoherence(&cant, OmegaConvention::Cyclic);
        assert!((g / (2.0 * PI * 6.5e3) - 1.0).abs() < 0.01);
        let ga = mechanical_decoherence(&cant, OmegaConvention::Angular);
        assert!((ga / (2.0 * PI * 1.04e3) - 1.0).abs() < 0.01);
    }

    #[test]
    fn end_to_end_chain() {
        let strip = StripSpec::new(100e-6, 1e-6, 50e-9, 0.14, 8.57e3, 39e-9, 38e-9).unwrap();
        let cant = CantileverSpec::new(0.5e-6, 2.3e3, 2.0 * PI * 1e6, 2.0 * PI, 0.05).unwrap();
        let coil = CoilSpec::new(2.2e-6, 1e-6, 100e-6).unwrap();
        let sys = SystemSpec { strip, cantilever: cant, coil };
        let c = circuit(0.25);
        let b = 2.0e5;
        let r = coupling_report(&sys, &c, b, FieldMode::Quadrupole, b, OmegaConvention::Cyclic).unwrap();
        let h = 1e-12;
        let flux = |zm: f64| pickup_flux(&coil, &StripState::quadrupole(b, zm), &strip).unwrap();
        let dphi_dz = (flux(h) - flux(-h)) / (2.0 * h);
        let df = 1e-7;
        let dw_df = (transmon_frequency(&c, 0.25 + df).unwrap() - transmon_frequency(&c, 0.25 - df).unwrap()) / (2.0 * df);
        let g = sys.z_zp() * (dw_df * dphi_dz / FLUX_QUANTUM).abs();
        assert!((g / r.g0 - 1.0).abs() < 1e-5, "{g} vs {}", r.g0);
        assert!((r.g0_over_kappa / (r.phi * c.q * r.eta) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn decoherence_linear(k in 0.1f64..10.0) {
            let cant = CantileverSpec::new(0.5e-6, 2.3e3, 2.0 * PI * 1e6, 2.0 * PI, 0.05).unwrap();
            let base = mechanical_decoherence(&cant, OmegaConvention::Cyclic);
            let mut hot = cant;
            hot.temperature *= k;
            prop_assert!((mechanical_decoherence(&hot, OmegaConvention::Cyclic) / base / k - 1.0).abs() < 1e-12);
            let mut damp = cant;
            damp.gamma *= k;
            prop_assert!((mechanical_decoherence(&damp, OmegaConvention::Cyclic) / base / k - 1.0).abs() < 1e-12);
        }

        #[test]
        fn cooperativity_quadratic(g in 1.0f64..1e7) {
            prop_assert!((cooperativity(2.0 * g, 3.0, 5.0) / cooperativity(g, 3.0, 5.0) - 4.0).abs() < 1e-12);
        }
    }
}
