//! Full scenario evaluation and its text and CSV renderings.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::analytic_strip::{
    chi, corner_field, eta_lambda_ratio, max_gradient, max_homogeneous_field, FieldMode, LambdaModel,
};
use crate::coupling::{coupling_report, CouplingReport, TRANSMON_MIN_RATIO};
use crate::error::Result;
use crate::noise::{
    flux_noise_psd, heating_rate, magnetic_spring, noise_amplification, noise_amplification_as_printed,
    numerical_amplification, zeta, zeta_field, NoiseInputs, NoiseReport, Psd,
};
use crate::scenario::{CircuitEnergies, Resolved, Scenario};
use crate::sources::{bias_field, corner_field_safe, gradient_at_origin, gradient_inhomogeneity, WirePairSpec};

/// Amplification factors and spring frequency commonly quoted for the
/// wire-pair design, compared against in the discrepancy flags.
pub const REFERENCE_A_I: f64 = 6.4e3;
pub const REFERENCE_A_B: f64 = 1.4e4;
pub const REFERENCE_OMEGA_M: f64 = 2.0 * PI * 59e3;
/// Quoted η/η⋆ for the uniform drive at z_c = w.
pub const REFERENCE_HOMOGENEOUS_RATIO: f64 = 1.9e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct WireDetails {
    pub spec: WirePairSpec,
    pub b_b: f64,
    /// Series and exact gradient inhomogeneity across the strip, when w < z_w.
    pub inhomogeneity: Option<(f64, f64)>,
    pub corner_safe: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub name: String,
    pub resolved: Resolved,
    pub coupling: CouplingReport,
    pub b_max: f64,
    pub b_a_max: f64,
    pub lambda_over_w: f64,
    pub lambda_model: LambdaModel,
    /// η_Λ/η at the strip's Pearl length.
    pub lambda_ratio: f64,
    /// Ω_m for a gradient drive.
    pub omega_m: Option<f64>,
    /// R₀→₂, when a current-noise level is given.
    pub r02: Option<f64>,
    pub wire: Option<WireDetails>,
    pub noise: Option<NoiseReport>,
    pub warnings: Vec<String>,
    pub flags: Vec<String>,
    pub assumptions: Vec<String>,
}

fn e(v: f64) -> String {
    format!("{v:.8e}")
}

fn khz(omega: f64) -> String {
    format!("2π×{:.4} kHz", omega / (2.0 * PI) / 1e3)
}

impl ScenarioReport {
    pub fn evaluate(scenario: &Scenario) -> Result<Self> {
        let r = scenario.resolve()?;
        let sys = r.system;
        let strip = sys.strip;
        let convention = scenario.options.convention;
        let coupling = coupling_report(&sys, &r.circuit, r.amplitude, r.mode, r.reference_gradient, convention)?;
        let lambda_over_w = strip.pearl_length() / strip.w;
        let lambda_model = scenario.options.lambda_model;
        let lambda_ratio = eta_lambda_ratio(lambda_over_w, &sys.coil, &strip, lambda_model)?;

        let mut warnings: Vec<String> = r
            .validation
            .failures()
            .map(|c| format!("validity: {} ratio {} against threshold {}", c.name, e(c.ratio), e(c.threshold)))
            .collect();
        if !coupling.transmon_regime {
            warnings.push(format!(
                "circuit: E_J(0)/E_C = {:.3} is below the transmon bound {TRANSMON_MIN_RATIO}",
                coupling.ej_over_ec
            ));
        }
        let mut flags = Vec::new();
        let mut assumptions = Vec::new();

        if let CircuitEnergies::Omega0 { omega0, ej_over_ec } = scenario.circuit.energies {
            assumptions.push(format!(
                "circuit: ω₀/2π = {:.4} GHz and E_J(0)/E_C = {ej_over_ec} are assumed inputs, not derived",
                omega0 / (2.0 * PI) / 1e9
            ));
        }
        assumptions.push(match convention {
            crate::coupling::OmegaConvention::Cyclic => {
                "decoherence: Γ = γk_BT/(ħΩ_eff) with Ω_eff = Ω/2π (cyclic convention)".to_string()
            }
            crate::coupling::OmegaConvention::Angular => {
                "decoherence: Γ = γk_BT/(ħΩ_eff) with Ω_eff = Ω (angular convention)".to_string()
            }
        });
        assumptions.push(format!(
            "η is evaluated for an infinitely long strip with Λ = 0; η_Λ/η uses the {} model",
            match lambda_model {
                LambdaModel::LondonThinFilm => "thin-film London",
                LambdaModel::EdgeFit => "edge-fit",
            }
        ));
        assumptions.push("noise: spectral densities are one-sided and relative to the carrier".to_string());

        if coupling.phi == 0.0 {
            flags.push("coupling off: φ = 0 at this flux bias, so g₀ = 0".to_string());
        }

        let b_max = max_gradient(&strip);
        let b_a_max = max_homogeneous_field(&strip);
        let over = |v: f64, lim: f64| v > lim * (1.0 + 1e-9);
        match r.mode {
            FieldMode::Quadrupole => {
                let bc = corner_field(r.amplitude, &strip);
                if over(bc, strip.b_c) {
                    warnings.push(format!("corner field {} T exceeds B_c = {} T", e(bc), e(strip.b_c)));
                }
            }
            FieldMode::Homogeneous => {
                if over(r.amplitude, b_a_max) {
                    warnings.push(format!("B_a = {} T exceeds B_a^max = {} T", e(r.amplitude), e(b_a_max)));
                }
                let ratio = coupling.eta / coupling.eta_star;
                flags.push(format!(
                    "homogeneous drive: η/η⋆ = {} against the reference value {} (ratio {:.3})",
                    e(ratio),
                    e(REFERENCE_HOMOGENEOUS_RATIO),
                    ratio / REFERENCE_HOMOGENEOUS_RATIO
                ));
            }
        }

        let omega_m = (r.mode == FieldMode::Quadrupole).then(|| magnetic_spring(r.amplitude, &strip, coupling.mass));
        let noise_cfg = scenario.noise.as_ref();
        let r02 = noise_cfg.map(|n| heating_rate(sys.cantilever.omega, Psd::from_asd(n.current_asd).at(2.0 * sys.cantilever.omega)));
        if let Some(rate) = r02 {
            if coupling.g0 > 0.0 && rate >= coupling.g0 / 100.0 {
                warnings.push(format!(
                    "heating: R₀→₂ = {} is not two orders of magnitude below g₀ = {}",
                    khz(rate),
                    khz(coupling.g0)
                ));
            }
        }

        let mut wire = None;
        let mut noise = None;
        if let Some(spec) = r.wire_pair {
            let b_b = bias_field(&spec);
            let inhomogeneity = gradient_inhomogeneity(strip.w, &spec).ok().map(|i| (i.series, i.exact));
            let corner_safe = corner_field_safe(&spec, &strip);
            if !corner_safe {
                warnings.push("wire pair: corner field exceeds B_c".to_string());
            }
            if let Some(d) = r.stated_depth {
                let nominal = gradient_at_origin(&WirePairSpec::new(spec.i_w, d)?);
                flags.push(format!(
                    "wire pair: gradient b = {} T/m at I_w = {} A requires z_w = {} m; \
                     the nominal z_w = {} m gives b = {} T/m. Downstream values use the pinned gradient",
                    e(r.amplitude),
                    e(spec.i_w),
                    e(spec.z_w),
                    e(d),
                    e(nominal)
                ));
                assumptions.push("wire pair: depth set by the pinned gradient, not the nominal depth".to_string());
            }
            if let Some(om) = omega_m {
                flags.push(format!(
                    "magnetic spring: Ω_m = {} against the reference value {}",
                    khz(om),
                    khz(REFERENCE_OMEGA_M)
                ));
            }
            let x = chi(sys.coil.w_c / strip.w, sys.coil.z_c / strip.w);
            let amplification = noise_amplification(&sys.coil, &spec, x, strip.w, b_b)?;
            let as_printed = noise_amplification_as_printed(&sys.coil, &spec, x, strip.w, b_b)?;
            let numeric = numerical_amplification(&sys.coil, &spec, &strip)?;
            flags.push(format!(
                "noise amplification: a_I = {}, a_B = {} against reference values {} and {} \
                 (ratios {:.3}, {:.3}); literal-form values {} and {}",
                e(amplification.a_i),
                e(amplification.a_b),
                e(REFERENCE_A_I),
                e(REFERENCE_A_B),
                amplification.a_i / REFERENCE_A_I,
                amplification.a_b / REFERENCE_A_B,
                e(as_printed.a_i),
                e(as_printed.a_b),
            ));
            if let Some(n) = noise_cfg {
                let inputs = NoiseInputs { s_i_rel: Psd::from_asd(n.current_asd), s_b_rel: Psd::from_asd(n.bias_asd) };
                noise = Some(NoiseReport {
                    zeta: zeta(&sys.coil, &spec)?,
                    zeta_field: zeta_field(&sys.coil, &spec)?,
                    amplification,
                    amplification_as_printed: as_printed,
                    amplification_numeric: numeric,
                    s_phi: n.frequencies.iter().map(|&w| (w, flux_noise_psd(&amplification, &inputs, w))).collect(),
                    omega_m: omega_m.unwrap_or(0.0),
                    r02: r02.unwrap_or(0.0),
                });
            }
            wire = Some(WireDetails { spec, b_b, inhomogeneity, corner_safe });
        }

        Ok(ScenarioReport {
            name: scenario.name.clone(),
            resolved: r,
            coupling,
            b_max,
            b_a_max,
            lambda_over_w,
            lambda_model,
            lambda_ratio,
            omega_m,
            r02,
            wire,
            noise,
            warnings,
            flags,
            assumptions,
        })
    }

    /// (key, value, unit) triples in display order.
    pub fn entries(&self) -> Vec<(&'static str, f64, &'static str)> {
        let c = &self.coupling;
        let sys = &self.resolved.system;
        let amp_unit = match c.mode {
            FieldMode::Quadrupole => "T/m",
            FieldMode::Homogeneous => "T",
        };
        let mut v = vec![
            ("drive_amplitude", c.amplitude, amp_unit),
            ("b_max", self.b_max, "T/m"),
            ("b_a_max", self.b_a_max, "T"),
            ("coil_width", sys.coil.w_c, "m"),
            ("coil_height", sys.coil.z_c, "m"),
            ("coil_length", sys.coil.l_c, "m"),
            ("mass", c.mass, "kg"),
            ("z_zp", c.z_zp, "m"),
            ("chi", c.chi, ""),
            ("eta_star", c.eta_star, ""),
            ("eta", c.eta, ""),
            ("two_eta", 2.0 * c.eta, ""),
            ("eta_over_eta_star", c.eta / c.eta_star, ""),
            ("lambda_over_w", self.lambda_over_w, ""),
            ("eta_lambda_over_eta", self.lambda_ratio, ""),
            ("flux_bias", self.resolved.circuit.flux_bias, "Phi0"),
            ("phi", c.phi, ""),
            ("omega0", c.omega0, "rad/s"),
            ("omega_transmon", c.omega, "rad/s"),
            ("ej_over_ec", c.ej_over_ec, ""),
            ("g0", c.g0, "rad/s"),
            ("kappa", c.kappa, "rad/s"),
            ("g0_over_kappa", c.g0_over_kappa, ""),
            ("gamma_m", c.gamma_m, "rad/s"),
            ("cooperativity", c.cooperativity, ""),
        ];
        if let Some(om) = self.omega_m {
            v.push(("omega_m", om, "rad/s"));
        }
        if let Some(r) = self.r02 {
            v.push(("r02", r, "rad/s"));
            if c.g0 > 0.0 {
                v.push(("r02_over_g0", r / c.g0, ""));
            }
        }
        if let Some(w) = &self.wire {
            v.push(("wire_current", w.spec.i_w, "A"));
            v.push(("wire_depth", w.spec.z_w, "m"));
            v.push(("bias_field", w.b_b, "T"));
            if let Some((s, x)) = w.inhomogeneity {
                v.push(("inhomogeneity_series", s, ""));
                v.push(("inhomogeneity_exact", x, ""));
            }
        }
        if let Some(n) = &self.noise {
            v.push(("zeta", n.zeta, ""));
            v.push(("zeta_field", n.zeta_field, ""));
            v.push(("a_i", n.amplification.a_i, ""));
            v.push(("a_b", n.amplification.a_b, ""));
            v.push(("a_i_numeric", n.amplification_numeric.a_i, ""));
            v.push(("a_b_numeric", n.amplification_numeric.a_b, ""));
            v.push(("a_i_literal", n.amplification_as_printed.a_i, ""));
            v.push(("a_b_literal", n.amplification_as_printed.a_b, ""));
        }
        v
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let c = &self.coupling;
        writeln!(out, "scenario  {}", self.name).unwrap();
        let mode = match c.mode {
            FieldMode::Quadrupole => "quadrupole",
            FieldMode::Homogeneous => "homogeneous",
        };
        writeln!(out, "mode      {mode}").unwrap();
        writeln!(out, "transmon  {}", if c.transmon_regime { "yes" } else { "no" }).unwrap();
        writeln!(out, "gamma_convention  {}", c.convention.name()).unwrap();
        writeln!(out).unwrap();
        let entries = self.entries();
        let width = entries.iter().map(|(k, _, _)| k.len()).max().unwrap_or(0);
        for (k, v, u) in &entries {
            writeln!(out, "{k:<width$}  {:>16}  {u}", e(*v)).unwrap();
        }
        if let Some(n) = &self.noise {
            if !n.s_phi.is_empty() {
                writeln!(out, "\nflux noise S_Phi/Phi0^2 [1/Hz]").unwrap();
                for (w, s) in &n.s_phi {
                    writeln!(out, "  omega {}  {}", e(*w), e(*s)).unwrap();
                }
            }
        }
        for (title, list) in [("warnings", &self.warnings), ("flags", &self.flags), ("assumptions", &self.assumptions)] {
            writeln!(out, "\n{title}").unwrap();
            if list.is_empty() {
                writeln!(out, "  none").unwrap();
            }
            for line in list.iter() {
                writeln!(out, "  - {line}").unwrap();
            }
        }
        out
    }

    /// Header and single data row.
    pub fn render_csv(&self) -> String {
        let entries = self.entries();
        let mut out = String::from("scenario");
        for (k, _, _) in &entries {
            out.push(',');
            out.push_str(k);
        }
        out.push('\n');
        out.push_str(&self.name);
        for (_, v, _) in &entries {
            out.push(',');
            out.push_str(&e(*v));
        }
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::bundled;

    #[test]
    fn flagship_headlines() {
        let r = ScenarioReport::evaluate(&bundled("paper-flagship").unwrap()).unwrap();
        assert!((2.0 * r.coupling.eta / 20.4e-6 - 1.0).abs() < 0.02);
        assert!((r.coupling.g0_over_kappa / 20.4 - 1.0).abs() < 0.02);
        assert!(r.flags.iter().all(|f| !f.starts_with("coupling off")));
        let text = r.render_text();
        assert!(text.contains("g0_over_kappa"));
        assert!(text.contains("assumed inputs"));
    }

    #[test]
    fn zero_phi_turns_coupling_off() {
        let mut s = bundled("paper-flagship").unwrap();
        s.circuit.operating_point = crate::scenario::FluxOperatingPoint::FluxBias(0.0);
        let r = ScenarioReport::evaluate(&s).unwrap();
        assert_eq!(r.coupling.g0, 0.0);
        assert!(r.flags.iter().any(|f| f.starts_with("coupling off")));
    }

    #[test]
    fn two_wire_flags_depth() {
        let r = ScenarioReport::evaluate(&bundled("paper-two-wire").unwrap()).unwrap();
        assert!(r.flags.iter().any(|f| f.starts_with("wire pair: gradient")));
        assert!(r.flags.iter().any(|f| f.starts_with("noise amplification")));
        assert!(r.flags.iter().any(|f| f.starts_with("magnetic spring")));
        let csv = r.render_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    }
}
