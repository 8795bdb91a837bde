//! Closed-form Meissner response of a long thin strip.
//!
//! The strip occupies |y| < w/2 at height `z_m` and carries a sheet current
//! K_x(y). With s = y + i(z − z_m) and a = w/2 the strip potential is
//!
//! ```text
//! A_x = D · (y − Re G(s)),   G(s) = s·√(1 − a²/s²)
//! ```
//!
//! where D is the uniform out-of-plane drive (b·z_m or B_a). G equals
//! sgn(y)·√(s² − a²) on the principal branch and is analytic everywhere
//! except on the strip itself, so no special case is needed at y = 0.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::domain::{CoilSpec, StripSpec, SystemSpec};
use crate::error::{Error, Result};
use crate::numerics::{bisect, integrate, maximize_golden};
use crate::units::{FLUX_QUANTUM, MU0};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldMode {
    /// b(−y ŷ + z ẑ); the amplitude is the gradient b [T/m].
    Quadrupole,
    /// Uniform B_a ẑ; the amplitude is B_a [T].
    Homogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub y: f64,
    pub z: f64,
}

impl FieldPoint {
    pub fn new(y: f64, z: f64) -> Self {
        FieldPoint { y, z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripState {
    pub z_m: f64,
    pub amplitude: f64,
    pub mode: FieldMode,
}

impl StripState {
    pub fn quadrupole(b: f64, z_m: f64) -> Self {
        StripState { z_m, amplitude: b, mode: FieldMode::Quadrupole }
    }

    pub fn homogeneous(b_a: f64, z_m: f64) -> Self {
        StripState { z_m, amplitude: b_a, mode: FieldMode::Homogeneous }
    }

    /// Uniform field seen by the strip [T].
    pub fn drive(&self) -> f64 {
        match self.mode {
            FieldMode::Quadrupole => self.amplitude * self.z_m,
            FieldMode::Homogeneous => self.amplitude,
        }
    }
}

fn g_fn(s: Complex64, a: f64) -> Complex64 {
    s * (Complex64::new(1.0, 0.0) - a * a / (s * s)).sqrt()
}

fn g_prime(s: Complex64, a: f64) -> Complex64 {
    Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - a * a / (s * s)).sqrt()
}

fn on_cut(p: FieldPoint, state: &StripState, strip: &StripSpec) -> bool {
    p.z == state.z_m && p.y.abs() <= 0.5 * strip.w
}

/// Sheet current K_x at transverse position `y` [A/m].
pub fn sheet_current(y: f64, state: &StripState, strip: &StripSpec) -> Result<f64> {
    let a = 0.5 * strip.w;
    if y.abs() >= a {
        return Err(Error::domain(format!("|y| = {:e} is not inside the strip half-width {a:e}", y.abs())));
    }
    Ok(state.drive() / MU0 * 2.0 * y / (a * a - y * y).sqrt())
}

/// Strip vector potential A_x [T·m].
///
/// On the strip itself Re G vanishes and A_x = D·y.
pub fn vector_potential(p: FieldPoint, state: &StripState, strip: &StripSpec) -> f64 {
    let a = 0.5 * strip.w;
    if p.y == 0.0 {
        return 0.0;
    }
    if on_cut(p, state, strip) {
        return state.drive() * p.y;
    }
    let s = Complex64::new(p.y, p.z - state.z_m);
    state.drive() * (p.y - g_fn(s, a).re)
}

/// Strip field (B_y, B_z) [T] from the analytic derivative of A_x.
pub fn b_field(p: FieldPoint, state: &StripState, strip: &StripSpec) -> Result<(f64, f64)> {
    if on_cut(p, state, strip) {
        return Err(Error::domain(format!("point ({:e}, {:e}) lies on the strip", p.y, p.z)));
    }
    let s = Complex64::new(p.y, p.z - state.z_m);
    let gp = g_prime(s, 0.5 * strip.w);
    let d = state.drive();
    Ok((d * gp.im, -d * (1.0 - gp.re)))
}

/// Coil flux 2·L_c·A_x(w_c/2, z_c) [Wb].
pub fn pickup_flux(coil: &CoilSpec, state: &StripState, strip: &StripSpec) -> Result<f64> {
    if coil.z_c <= 0.5 * strip.t {
        return Err(Error::domain("pick-up coil must sit above the strip (z_c > t/2)"));
    }
    Ok(2.0 * coil.l_c * vector_potential(FieldPoint::new(0.5 * coil.w_c, coil.z_c), state, strip))
}

fn coil_u(wc_over_w: f64, zc_over_w: f64) -> Complex64 {
    Complex64::new(wc_over_w, 2.0 * zc_over_w)
}

/// Geometric efficiency χ = w_c/w − Re√((w_c/w + 2i z_c/w)² − 1).
pub fn chi(wc_over_w: f64, zc_over_w: f64) -> f64 {
    let u = coil_u(wc_over_w, zc_over_w);
    wc_over_w - (u * u - 1.0).sqrt().re
}

/// Re{(−2z_c/w + i w_c/w)/√((w_c/w + 2i z_c/w)² − 1)}, the homogeneous
/// analogue of χ.
pub fn homogeneous_factor(wc_over_w: f64, zc_over_w: f64) -> f64 {
    let u = coil_u(wc_over_w, zc_over_w);
    (Complex64::new(-2.0 * zc_over_w, wc_over_w) / (u * u - 1.0).sqrt()).re
}

/// Homogeneous optimum g(x), x = z_c/w.
pub fn homogeneous_optimal_width(x: f64) -> f64 {
    ((3.0 + 20.0 * x * x - 4.0 * x * (3.0 + 16.0 * x * x).sqrt()) / 3.0).sqrt()
}

/// Coil width (in units of w) maximizing the coupling at height z_c/w.
pub fn optimal_coil_width(zc_over_w: f64, mode: FieldMode) -> f64 {
    match mode {
        FieldMode::Homogeneous => homogeneous_optimal_width(zc_over_w),
        FieldMode::Quadrupole => {
            maximize_golden(|x| chi(x, zc_over_w), 1e-3, 10.0 * (1.0 + zc_over_w), 1e-9)
        }
    }
}

/// Root of B_z,K(w_c/2, z_c) = 0 along y, in units of w.
pub fn zero_bz_half_width(zc_over_w: f64) -> Result<f64> {
    let strip_like = |x: f64| {
        let u = coil_u(x, zc_over_w);
        1.0 - (u / (u * u - 1.0).sqrt()).re
    };
    bisect(strip_like, 1e-9, 10.0 * (1.0 + zc_over_w), 1e-14)
}

/// f(x) = [1 + (√(2x) + x)(1 + x)]^(−1/2).
pub fn gradient_factor(x: f64) -> f64 {
    (1.0 + ((2.0 * x).sqrt() + x) * (1.0 + x)).powf(-0.5)
}

/// b^max = f(t/w)·2B_c/w [T/m].
pub fn max_gradient(strip: &StripSpec) -> f64 {
    gradient_factor(strip.t / strip.w) * 2.0 * strip.b_c / strip.w
}

/// |B| at the strip corner (w/2, t/2) using the edge-enhancement
/// approximation B_K ≈ √(w/2t)(bt/2)(ẑ − ŷ).
pub fn corner_field(b: f64, strip: &StripSpec) -> f64 {
    let (w, t) = (strip.w, strip.t);
    let k = (w / (2.0 * t)).sqrt() * b * t / 2.0;
    let by = -b * w / 2.0 - k;
    let bz = b * t / 2.0 + k;
    by.hypot(bz)
}

/// B_a^max = √(2t/w)·B_c [T].
pub fn max_homogeneous_field(strip: &StripSpec) -> f64 {
    (2.0 * strip.t / strip.w).sqrt() * strip.b_c
}

/// η⋆ = z_zp·b·L_c·w/Φ₀.
pub fn eta_star(z_zp: f64, b: f64, l_c: f64, w: f64) -> f64 {
    z_zp * b * l_c * w / FLUX_QUANTUM
}

/// η for either drive mode. `amplitude` is b or B_a.
pub fn eta(z_zp: f64, amplitude: f64, coil: &CoilSpec, w: f64, mode: FieldMode) -> f64 {
    let (x, zc) = (coil.w_c / w, coil.z_c / w);
    match mode {
        FieldMode::Quadrupole => eta_star(z_zp, amplitude, coil.l_c, w) * chi(x, zc),
        FieldMode::Homogeneous => {
            2.0 * amplitude * coil.l_c * z_zp / FLUX_QUANTUM * homogeneous_factor(x, zc)
        }
    }
}

/// η for an assembled system.
pub fn eta_system(sys: &SystemSpec, amplitude: f64, mode: FieldMode) -> f64 {
    eta(sys.z_zp(), amplitude, &sys.coil, sys.strip.w, mode)
}

/// h₁ of the finite-Λ edge fit.
pub fn h1(x: f64) -> f64 {
    0.25 - 0.63 * x.sqrt() + 1.2 * x.powf(0.8)
}

/// h₂ of the finite-Λ edge fit.
pub fn h2(x: f64) -> f64 {
    PI / 2.0 + x
}

/// Sheet current in a uniform field B_a for finite Pearl length, from the
/// closed-form edge fit.
pub fn sheet_current_finite_lambda(y: f64, b_a: f64, strip: &StripSpec) -> Result<f64> {
    let a = 0.5 * strip.w;
    if y.abs() > a {
        return Err(Error::domain(format!("|y| = {:e} exceeds the strip half-width {a:e}", y.abs())));
    }
    let lam = strip.pearl_length();
    Ok(fit_current(y, b_a, a, lam, strip.w))
}

fn fit_current(y: f64, b_a: f64, a: f64, lam: f64, w: f64) -> f64 {
    let x = lam / w;
    let den = h1(x) * (a * a - y * y) + h2(x) * lam * w;
    if den <= 0.0 {
        return if y == 0.0 { 0.0 } else { f64::INFINITY.copysign(y) };
    }
    b_a / MU0 * y / den.sqrt()
}

/// Current model used for η_Λ/η.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaModel {
    /// Panel solution of the thin-film London integral equation.
    LondonThinFilm,
    /// The closed-form edge fit of [`sheet_current_finite_lambda`].
    EdgeFit,
}

/// Piecewise-constant solution of
/// Λ·K(y) − (1/2π)∫K(y′) ln|y − y′| dy′ = B_a·y/μ₀ on |y| < w/2.
#[derive(Debug, Clone)]
pub struct LondonStrip {
    pub edges: Vec<f64>,
    /// K on each panel for unit B_a [A/m per T].
    pub current: Vec<f64>,
}

/// ∫ ln|u| du.
fn ln_panel(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.abs().ln() - u
    }
}

/// ∫ ½ ln(u² + d²) du.
fn ln_panel_offset(u: f64, d: f64) -> f64 {
    if d == 0.0 {
        return ln_panel(u);
    }
    0.5 * u * (u * u + d * d).ln() - u + d * (u / d).atan()
}

impl LondonStrip {
    pub fn solve(w: f64, pearl: f64, panels: usize) -> Result<Self> {
        let a = 0.5 * w;
        let n = panels.max(8);
        let edges: Vec<f64> = (0..=n)
            .map(|k| a * (-PI / 2.0 + PI * k as f64 / n as f64).sin())
            .collect();
        let mid: Vec<f64> = edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let log_int = ln_panel(mid[i] - edges[j]) - ln_panel(mid[i] - edges[j + 1]);
            let diag = if i == j { pearl } else { 0.0 };
            diag - log_int / (2.0 * PI)
        });
        let rhs = DVector::from_iterator(n, mid.iter().map(|y| y / MU0));
        let sol = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::numerical("singular thin-film London system"))?;
        Ok(LondonStrip { edges, current: sol.iter().copied().collect() })
    }

    /// A_x at (y, Δz) per unit B_a [m].
    pub fn potential(&self, y: f64, dz: f64) -> f64 {
        let s: f64 = self
            .current
            .iter()
            .zip(self.edges.windows(2))
            .map(|(k, e)| k * (ln_panel_offset(y - e[0], dz) - ln_panel_offset(y - e[1], dz)))
            .sum();
        -MU0 / (2.0 * PI) * s
    }
}

/// Number of panels for the London solve.
pub const LONDON_PANELS: usize = 400;

/// A_x of the edge-fit current at (y, Δz) per unit B_a, by quadrature.
fn fit_potential(y: f64, dz: f64, w: f64, pearl: f64) -> Result<f64> {
    let a = 0.5 * w;
    let f = |th: f64| {
        let yp = a * th.sin();
        let k = fit_current(yp, 1.0, a, pearl, w) * a * th.cos();
        -k * 0.5 * ((y - yp).powi(2) + dz * dz).ln()
    };
    Ok(MU0 / (2.0 * PI) * integrate(f, -PI / 2.0, PI / 2.0, 1e-16, 1e-12)?)
}

/// η_Λ/η for Pearl length Λ = `lambda_over_w`·w and the given coil.
///
/// Both numerator and denominator use the same discretization, which is
/// exact for Λ = 0.
pub fn eta_lambda_ratio(lambda_over_w: f64, coil: &CoilSpec, strip: &StripSpec, model: LambdaModel) -> Result<f64> {
    if !(lambda_over_w >= 0.0) {
        return Err(Error::domain(format!("Λ/w must be non-negative, got {lambda_over_w:e}")));
    }
    if lambda_over_w == 0.0 {
        return Ok(1.0);
    }
    let w = strip.w;
    let (y, dz) = (0.5 * coil.w_c, coil.z_c);
    let pearl = lambda_over_w * w;
    let r = match model {
        LambdaModel::LondonThinFilm => {
            let num = LondonStrip::solve(w, pearl, LONDON_PANELS)?.potential(y, dz);
            let den = LondonStrip::solve(w, 0.0, LONDON_PANELS)?.potential(y, dz);
            num / den
        }
        LambdaModel::EdgeFit => {
            let a0 = vector_potential(FieldPoint::new(y, dz), &StripState::homogeneous(1.0, 0.0), strip);
            fit_potential(y, dz, w, pearl)? / a0
        }
    };
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::numerical(format!("η_Λ/η evaluated to {r:e} at Λ/w = {lambda_over_w:e}")));
    }
    Ok(r)
}

/// Rectangular sampling region for field maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub ny: usize,
    pub nz: usize,
}

impl Region {
    pub fn points(&self) -> Vec<FieldPoint> {
        let ys = crate::numerics::linspace(self.y_min, self.y_max, self.ny);
        let zs = crate::numerics::linspace(self.z_min, self.z_max, self.nz);
        zs.iter()
            .flat_map(|&z| ys.iter().map(move |&y| FieldPoint::new(y, z)))
            .collect()
    }
}

/// A field source with a vector potential.
pub trait AppliedField: Sync {
    /// (A_x, B_y, B_z) at `p`.
    fn evaluate(&self, p: FieldPoint) -> Result<(f64, f64, f64)>;
}

/// The ideal quadrupole b(−y ŷ + z ẑ), with A_x = −b·y·z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrupole {
    pub b: f64,
}

impl AppliedField for Quadrupole {
    fn evaluate(&self, p: FieldPoint) -> Result<(f64, f64, f64)> {
        Ok((-self.b * p.y * p.z, -self.b * p.y, self.b * p.z))
    }
}

/// Uniform B_a ẑ, with A_x = −B_a·y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub b_a: f64,
}

impl AppliedField for Uniform {
    fn evaluate(&self, p: FieldPoint) -> Result<(f64, f64, f64)> {
        Ok((-self.b_a * p.y, 0.0, self.b_a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapContent {
    StripResponse,
    Applied,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub y: f64,
    pub z: f64,
    pub a_x: f64,
    pub b_y: f64,
    pub b_z: f64,
    pub masked: bool,
}

/// Field map over `region`, row-major with z outer and y inner.
///
/// Points inside the strip cross-section, or where the source is singular,
/// are masked and carry NaN values.
pub fn fieldmap(
    region: &Region,
    state: &StripState,
    strip: &StripSpec,
    source: Option<&dyn AppliedField>,
    content: MapContent,
) -> Vec<FieldRow> {
    let a = 0.5 * strip.w;
    let ht = 0.5 * strip.t;
    region
        .points()
        .into_par_iter()
        .map(|p| {
            let nan = FieldRow { y: p.y, z: p.z, a_x: f64::NAN, b_y: f64::NAN, b_z: f64::NAN, masked: true };
            if p.y.abs() <= a && (p.z - state.z_m).abs() <= ht {
                return nan;
            }
            let mut acc = (0.0, 0.0, 0.0);
            if content != MapContent::Applied {
                let Ok((by, bz)) = b_field(p, state, strip) else { return nan };
                acc = (vector_potential(p, state, strip), by, bz);
            }
            if content != MapContent::StripResponse {
                if let Some(src) = source {
                    let Ok((ax, by, bz)) = src.evaluate(p) else { return nan };
                    acc = (acc.0 + ax, acc.1 + by, acc.2 + bz);
                }
            }
            FieldRow { y: p.y, z: p.z, a_x: acc.0, b_y: acc.1, b_z: acc.2, masked: false }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nb() -> StripSpec {
        StripSpec::new(100e-6, 1e-6, 50e-9, 0.14, 8.57e3, 39e-9, 38e-9).unwrap()
    }

    #[test]
    fn sheet_current_values() {
        let s = nb();
        let st = StripState::quadrupole(1e5, 1e-9);
        assert_eq!(sheet_current(0.0, &st, &s).unwrap(), 0.0);
        let k = sheet_current(s.w / 4.0, &st, &s).unwrap();
        assert!((k / (1e5 * 1e-9 / MU0) - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!(sheet_current(s.w / 2.0, &st, &s).is_err());
        let zero = StripState::quadrupole(1e5, 0.0);
        assert_eq!(sheet_current(0.3e-6, &zero, &s).unwrap(), 0.0);
    }

    #[test]
    fn far_field_dipole_limit() {
        let s = nb();
        let st = StripState::quadrupole(1.0, 1.0);
        let y = 1e3 * s.w;
        let a = vector_potential(FieldPoint::new(y, 1.0), &st, &s);
        let dip = s.w * s.w / (8.0 * y);
        assert!((a / dip - 1.0).abs() < 1e-5);
    }

    #[test]
    fn symmetry_axis() {
        let s = nb();
        let st = StripState::quadrupole(1e5, 1e-8);
        for z in [-2e-6, 0.3e-6, 2e-6] {
            assert_eq!(vector_potential(FieldPoint::new(0.0, z), &st, &s), 0.0);
            let (by, bz) = b_field(FieldPoint::new(0.0, z), &st, &s).unwrap();
            assert_eq!(by, 0.0);
            assert!(bz < 0.0);
        }
    }

    #[test]
    fn expulsion_above_interior() {
        let s = nb();
        let st = StripState::quadrupole(1e5, 1e-8);
        let applied = st.drive();
        let mut sum = 0.0;
        let n = 181;
        for k in 0..n {
            let y = -0.45 * s.w + 0.9 * s.w * k as f64 / (n - 1) as f64;
            let z = st.z_m + 1e-6 * s.t;
            let (_, bz) = b_field(FieldPoint::new(y, z), &st, &s).unwrap();
            sum += ((bz + st.amplitude * z) / applied).abs();
        }
        assert!(sum / n as f64 <= 1e-3);
    }

    #[test]
    fn analytic_derivative_matches_differences() {
        let s = nb();
        let st = StripState::quadrupole(2e5, 3e-9);
        let h = 1e-6 * s.w;
        for (y, z) in [(1.1e-6, 1e-6), (-0.3e-6, 0.2e-6), (0.7e-6, -0.05e-6)] {
            let p = FieldPoint::new(y, z);
            let (by, bz) = b_field(p, &st, &s).unwrap();
            let a = |y: f64, z: f64| vector_potential(FieldPoint::new(y, z), &st, &s);
            let fy = (a(y, z + h) - a(y, z - h)) / (2.0 * h);
            let fz = -(a(y + h, z) - a(y - h, z)) / (2.0 * h);
            let scale = by.hypot(bz);
            assert!((fy - by).abs() / scale < 1e-6);
            assert!((fz - bz).abs() / scale < 1e-6);
        }
    }

    #[test]
    fn chi_limits_and_flagship_value() {
        assert!((chi(1.0 + 1e-9, 1e-9) - 1.0).abs() < 1e-3);
        assert!((chi(2.2, 1.0) - 0.121).abs() < 1e-3);
        let x = optimal_coil_width(1.0, FieldMode::Quadrupole);
        assert!((x - 2.1795).abs() < 1e-4);
        assert!((chi(x, 1.0) - 0.12137).abs() < 1e-5);
    }

    #[test]
    fn optimum_sits_on_zero_bz_line() {
        for zc in [0.2, 1.0, 3.0] {
            let x = optimal_coil_width(zc, FieldMode::Quadrupole);
            let r = zero_bz_half_width(zc).unwrap();
            assert!((x / r - 1.0).abs() < 1e-4, "zc={zc}: {x} vs {r}");
        }
    }

    #[test]
    fn homogeneous_optimum_maximizes_factor() {
        assert_eq!(homogeneous_optimal_width(0.0), 1.0);
        for zc in [0.25, 1.0, 4.0] {
            let g = homogeneous_optimal_width(zc);
            let m = maximize_golden(|x| homogeneous_factor(x, zc), 1e-3, 10.0 * (1.0 + zc), 1e-10);
            assert!((g - m).abs() < 1e-5, "zc={zc}: {g} vs {m}");
        }
        assert!((homogeneous_optimal_width(1.0) - 1.36191).abs() < 1e-5);
    }

    #[test]
    fn gradient_limits() {
        assert_eq!(gradient_factor(0.0), 1.0);
        assert!((gradient_factor(0.05) - 0.849860).abs() < 1e-6);
        let b = max_gradient(&nb());
        assert!((b / 2.4e5 - 1.0).abs() < 0.02);
        assert!((corner_field(b, &nb()) / nb().b_c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_field_limit() {
        let mut s = nb();
        assert!((max_homogeneous_field(&s) - 0.04427).abs() < 1e-5);
        s.t = s.w / 2.0;
        assert!((max_homogeneous_field(&s) - s.b_c).abs() < 1e-15);
    }

    #[test]
    fn finite_lambda_fit_reduces_at_zero() {
        let mut s = nb();
        s.lambda_l = 0.0;
        let st = StripState::homogeneous(0.01, 0.0);
        for y in [-0.4e-6, 0.1e-6, 0.49e-6] {
            let k0 = sheet_current(y, &st, &s).unwrap();
            let k = sheet_current_finite_lambda(y, 0.01, &s).unwrap();
            assert!((k / k0 - 1.0).abs() < 1e-12);
        }
        let s = nb();
        assert_eq!(sheet_current_finite_lambda(0.0, 0.01, &s).unwrap(), 0.0);
        let edge = sheet_current_finite_lambda(0.5e-6, 0.01, &s).unwrap();
        assert!(edge.is_finite() && edge > 0.0);
    }

    #[test]
    fn london_panels_reproduce_meissner_potential() {
        let s = nb();
        let sol = LondonStrip::solve(s.w, 0.0, LONDON_PANELS).unwrap();
        let st = StripState::homogeneous(1.0, 0.0);
        for (y, z) in [(1.1e-6, 1e-6), (0.3e-6, 0.5e-6)] {
            let exact = vector_potential(FieldPoint::new(y, z), &st, &s);
            let r = sol.potential(y, z) / exact;
            assert!((r - 1.0).abs() < 1e-4, "{r}");
        }
    }

    #[test]
    fn lambda_ratio_monotone() {
        let s = nb();
        let coil = CoilSpec::new(optimal_coil_width(1.0, FieldMode::Quadrupole) * s.w, s.w, s.l).unwrap();
        let mut prev = 1.0;
        for x in [0.0, 0.01, 0.03, 0.06, 0.1] {
            let r = eta_lambda_ratio(x, &coil, &s, LambdaModel::LondonThinFilm).unwrap();
            assert!(r <= prev && r > 0.0);
            prev = r;
        }
    }

    #[test]
    fn fieldmap_masks_strip() {
        let s = nb();
        let st = StripState::quadrupole(1e5, 0.0);
        let r = Region { y_min: -1e-6, y_max: 1e-6, z_min: 0.0, z_max: 0.0, ny: 3, nz: 1 };
        let rows = fieldmap(&r, &st, &s, None, MapContent::StripResponse);
        assert_eq!(rows.len(), 3);
        assert!(!rows[0].masked && rows[1].masked && !rows[2].masked);
        assert!(rows[1].a_x.is_nan());
        let one = Region { y_min: 0.0, y_max: 0.0, z_min: 2e-6, z_max: 2e-6, ny: 1, nz: 1 };
        let rows = fieldmap(&one, &st, &s, None, MapContent::StripResponse);
        assert_eq!(rows[0].a_x, 0.0);
    }

    proptest! {
        #[test]
        fn potential_is_odd(y in 1e-9f64..5e-6, z in -3e-6f64..3e-6) {
            let s = nb();
            let st = StripState::quadrupole(1e5, 1e-9);
            let a = vector_potential(FieldPoint::new(y, z), &st, &s);
            let b = vector_potential(FieldPoint::new(-y, z), &st, &s);
            prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1e-30));
        }

        #[test]
        fn current_is_odd(y in 0.0f64..0.4999e-6) {
            let s = nb();
            let st = StripState::quadrupole(1e5, 1e-9);
            prop_assert_eq!(sheet_current(y, &st, &s).unwrap(), -sheet_current(-y, &st, &s).unwrap());
        }

        #[test]
        fn chi_in_unit_interval_and_decreasing(x in 0.1f64..8.0, zc in 0.01f64..50.0) {
            let c = chi(x, zc);
            prop_assert!(c > 0.0 && c < 1.0);
            prop_assert!(chi(x, zc * 1.01) < c);
        }

        #[test]
        fn flux_linear_in_offset(zm in 1e-12f64..1e-9) {
            let s = nb();
            let coil = CoilSpec::new(2.2e-6, 1e-6, 1e-4).unwrap();
            let f1 = pickup_flux(&coil, &StripState::quadrupole(1e5, zm), &s).unwrap();
            let f2 = pickup_flux(&coil, &StripState::quadrupole(1e5, 2.0 * zm), &s).unwrap();
            // Moving the strip also shifts the geometry, so linearity holds to O(z_m/w).
            prop_assert!((f2 / f1 - 2.0).abs() < 1e-2);
        }
    }
}
