//! The report, sweep, field-map and MEM commands, rendered to strings.
//!
//! Work fans out over rayon but every output is assembled in index order,
//! so the bytes do not depend on the thread count.

use rayon::prelude::*;

use crate::analytic_strip::{fieldmap, zero_bz_half_width, AppliedField, FieldMode, MapContent, Quadrupole, Region, StripState, Uniform};
use crate::error::{Error, Result};
use crate::mem::eta_finite_length;
use crate::numerics::{linspace, logspace};
use crate::report::ScenarioReport;
use crate::scenario::Scenario;
use crate::sources::BiasedWirePair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
}

fn e(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn report(scenario: &Scenario, format: Format) -> Result<String> {
    let r = ScenarioReport::evaluate(scenario)?;
    Ok(match format {
        Format::Text => r.render_text(),
        Format::Csv => r.render_csv(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub path: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub log: bool,
}

pub const SWEEP_COLUMNS: &[&str] = &[
    "coil_width",
    "coil_height",
    "chi",
    "eta",
    "eta_star",
    "eta_over_eta_star",
    "eta_lambda_over_eta",
    "phi",
    "g0",
    "kappa",
    "g0_over_kappa",
    "gamma_m",
    "cooperativity",
];

/// One CSV row per step with every derived quantity recomputed.
pub fn sweep(scenario: &Scenario, spec: &SweepSpec) -> Result<String> {
    Scenario::path_dimension(&spec.path)?;
    let values = match (spec.steps, spec.log) {
        (0, _) => Vec::new(),
        (1, _) => vec![spec.from],
        (n, true) => {
            if !(spec.from > 0.0 && spec.to > 0.0) {
                return Err(Error::config("log-spaced sweep needs positive bounds"));
            }
            logspace(spec.from, spec.to, n)
        }
        (n, false) => linspace(spec.from, spec.to, n),
    };
    let rows: Vec<Result<String>> = values
        .par_iter()
        .map(|&v| {
            let s = scenario.with_parameter(&spec.path, v)?;
            let r = ScenarioReport::evaluate(&s)?;
            let c = &r.coupling;
            let coil = &r.resolved.system.coil;
            let cells = [
                v,
                coil.w_c,
                coil.z_c,
                c.chi,
                c.eta,
                c.eta_star,
                c.eta / c.eta_star,
                r.lambda_ratio,
                c.phi,
                c.g0,
                c.kappa,
                c.g0_over_kappa,
                c.gamma_m,
                c.cooperativity,
            ];
            Ok(cells.iter().map(|&x| e(x)).collect::<Vec<_>>().join(","))
        })
        .collect();
    let mut out = spec.path.clone();
    for c in SWEEP_COLUMNS {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row?);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldmapSpec {
    pub region: Region,
    pub content: MapContent,
    /// Strip displacement z_m [m].
    pub offset: f64,
    /// Append the optimal-coil locus y = w_c⋆(z)/2 for each row's z.
    pub locus: bool,
}

pub const FIELDMAP_HEADER: &str = "y_m,z_m_coord,A_x_Tm,B_y_T,B_z_T,masked";

/// Field map CSV of the scenario's source and strip.
pub fn fieldmap_csv(scenario: &Scenario, spec: &FieldmapSpec) -> Result<String> {
    let r = scenario.resolve()?;
    let g = &spec.region;
    if g.ny == 0 || g.nz == 0 || !(g.y_max >= g.y_min && g.z_max >= g.z_min) {
        return Err(Error::config("field-map region needs ny, nz ≥ 1 and ordered bounds"));
    }
    let strip = r.system.strip;
    let (state, source): (StripState, Box<dyn AppliedField>) = match (r.mode, r.wire_pair) {
        (FieldMode::Homogeneous, _) => {
            (StripState::homogeneous(r.amplitude, spec.offset), Box::new(Uniform { b_a: r.amplitude }))
        }
        (FieldMode::Quadrupole, Some(w)) => (StripState::quadrupole(r.amplitude, spec.offset), Box::new(BiasedWirePair(w))),
        (FieldMode::Quadrupole, None) => {
            (StripState::quadrupole(r.amplitude, spec.offset), Box::new(Quadrupole { b: r.amplitude }))
        }
    };
    let rows = fieldmap(g, &state, &strip, Some(source.as_ref()), spec.content);
    let mut out = String::from(FIELDMAP_HEADER);
    if spec.locus {
        out.push_str(",wc_star_half_width_m");
    }
    out.push('\n');
    let locus: Vec<String> = if spec.locus {
        let zs = linspace(g.z_min, g.z_max, g.nz);
        zs.par_iter()
            .map(|&z| {
                let dz = z - spec.offset;
                if dz > 0.0 {
                    zero_bz_half_width(dz / strip.w).map(|x| e(x * strip.w)).unwrap_or_else(|_| "NaN".into())
                } else {
                    "NaN".into()
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    for (k, row) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            e(row.y),
            e(row.z),
            e(row.a_x),
            e(row.b_y),
            e(row.b_z),
            u8::from(row.masked)
        ));
        if spec.locus {
            out.push(',');
            out.push_str(&locus[k / g.ny]);
        }
        out.push('\n');
    }
    Ok(out)
}

pub const MEM_HEADER: &str = "l_over_w,N,nx,ny,eta_L,eta_L_over_eta_analytic,extrapolated";

/// MEM convergence output and the warnings raised along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct MemOutput {
    pub csv: String,
    pub warnings: Vec<String>,
}

/// Per-N series and N → ∞ extrapolation for every aspect ratio. A failure
/// at one aspect ratio becomes a warning and the rest still run.
pub fn mem(scenario: &Scenario, aspects: &[f64], cells: &[usize]) -> Result<MemOutput> {
    if aspects.is_empty() || cells.is_empty() {
        return Err(Error::config("MEM needs at least one aspect ratio and one grid size"));
    }
    let r = scenario.resolve()?;
    if r.mode != FieldMode::Quadrupole {
        return Err(Error::domain("MEM convergence is defined for a gradient drive"));
    }
    let sys = r.system;
    let z_zp = sys.z_zp();
    let mut out = String::from(MEM_HEADER);
    out.push('\n');
    let mut warnings = Vec::new();
    for &a in aspects {
        match eta_finite_length(a, cells, &sys.strip, &sys.coil, r.amplitude, z_zp) {
            Ok(conv) => {
                let ext = conv.extrapolated.map(e).unwrap_or_default();
                for p in &conv.points {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        e(a),
                        p.cells,
                        p.nx,
                        p.ny,
                        e(p.eta_l),
                        e(p.ratio),
                        ext
                    ));
                }
                warnings.extend(conv.warnings);
            }
            Err(err) => warnings.push(format!("L/w = {a}: {err}")),
        }
    }
    Ok(MemOutput { csv: out, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::bundled;

    fn flagship() -> Scenario {
        bundled("paper-flagship").unwrap()
    }

    #[test]
    fn zero_step_sweep_is_header_only() {
        let spec = SweepSpec { path: "zc_over_w".into(), from: 0.1, to: 10.0, steps: 0, log: true };
        let csv = sweep(&flagship(), &spec).unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("zc_over_w,"));
    }

    #[test]
    fn sweep_rows_are_monotone_in_parameter() {
        let spec = SweepSpec { path: "zc_over_w".into(), from: 0.5, to: 5.0, steps: 6, log: true };
        let csv = sweep(&flagship(), &spec).unwrap();
        let xs: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(xs.len(), 6);
        assert!(xs.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn unknown_sweep_path() {
        let spec = SweepSpec { path: "coil.colour".into(), from: 0.0, to: 1.0, steps: 3, log: false };
        assert!(matches!(sweep(&flagship(), &spec), Err(Error::Config(_))));
    }

    #[test]
    fn fieldmap_layout() {
        let region = Region { y_min: -2e-6, y_max: 2e-6, z_min: -1e-6, z_max: 2e-6, ny: 9, nz: 7 };
        let spec = FieldmapSpec { region, content: MapContent::Total, offset: 0.1e-6, locus: true };
        let csv = fieldmap_csv(&flagship(), &spec).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), format!("{FIELDMAP_HEADER},wc_star_half_width_m"));
        assert_eq!(lines.count(), 63);
    }

    #[test]
    fn single_grid_mem_has_no_extrapolation() {
        let out = mem(&flagship(), &[5.0], &[256]).unwrap();
        let row = out.csv.lines().nth(1).unwrap();
        assert!(row.ends_with(','));
        assert!(!out.warnings.is_empty());
    }
}
