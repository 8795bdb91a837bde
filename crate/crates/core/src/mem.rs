//! Magnetic energy minimization for a strip of finite length.
//!
//! Each cell of a uniform nx×ny grid carries a circulating current g. The
//! sheet current crossing an internal cell boundary is the difference of
//! the two neighbouring g values, and it is spread uniformly over a band
//! reaching from one cell centre to the next (half a cell at the strip
//! edges). Band–band mutual inductances are exact coplanar plate integrals,
//! so no self-term regularization is needed. The Meissner state minimizes
//! E = ½gᵀCg + gᵀΦ_a.
//!
//! Cells are indexed `i·ny + j` with i along x and j along y. The applied
//! field is uniform, so g is even under both mirror reflections; the solver
//! works on one quadrant.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::analytic_strip::chi;
use crate::domain::{CoilSpec, StripSpec};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, linear_fit};
use crate::units::{FLUX_QUANTUM, MU0};

const K: f64 = MU0 / (4.0 * PI);

/// Plates further apart than this many of their largest dimensions are
/// integrated with Gauss–Legendre over filaments instead of the closed form.
const FAR: f64 = 6.0;

/// Gauss–Legendre order for band averages.
const GL_BAND: usize = 8;

/// Gauss–Legendre order across a band for the out-of-plane coil.
const GL_COIL: usize = 16;

/// ∫∫ dx dx′ / √((x − x′)² + d²) primitive: G(u, d) = u·asinh(u/d) − √(u² + d²).
fn g_prim(u: f64, d: f64) -> f64 {
    let au = u.abs();
    if d == 0.0 {
        if au == 0.0 {
            0.0
        } else {
            au * au.ln() - au
        }
    } else {
        u * (u / d).asinh() - u.hypot(d)
    }
}

/// Neumann integral of two parallel segments [a1, a2] and [b1, b2] at
/// perpendicular distance `d`, without the μ₀/4π prefactor.
pub fn parallel_segments(a1: f64, a2: f64, b1: f64, b2: f64, d: f64) -> f64 {
    g_prim(a2 - b1, d) - g_prim(a2 - b2, d) - g_prim(a1 - b1, d) + g_prim(a1 - b2, d)
}

fn f_prim(u: f64, v: f64) -> f64 {
    let (u, v) = (u.abs(), v.abs());
    let r = u.hypot(v);
    let t1 = if u > 0.0 { 0.5 * u * u * v * (v / u).asinh() } else { 0.0 };
    let t2 = if v > 0.0 { 0.5 * u * v * v * (u / v).asinh() } else { 0.0 };
    t1 + t2 - r * r * r / 6.0
}

/// Antiderivative in v of G(u, |v|), odd in v.
fn p_prim(u: f64, v: f64) -> f64 {
    let (u, av) = (u.abs(), v.abs());
    if av == 0.0 {
        return 0.0;
    }
    let r = u.hypot(av);
    let t1 = if u > 0.0 { 0.5 * u * u * (av / u).asinh() } else { 0.0 };
    let t2 = u * av * (u / av).asinh();
    (t1 + t2 - 0.5 * av * r) * v.signum()
}

fn combos(a1: f64, a2: f64, b1: f64, b2: f64) -> [(f64, f64); 4] {
    [(a2 - b1, 1.0), (a2 - b2, -1.0), (a1 - b1, -1.0), (a1 - b2, 1.0)]
}

/// Rectangle: `s` is the extent along the current, `t` across it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plate {
    pub s1: f64,
    pub s2: f64,
    pub t1: f64,
    pub t2: f64,
}

impl Plate {
    fn size(&self) -> f64 {
        (self.s2 - self.s1).max(self.t2 - self.t1)
    }

    fn centre(&self) -> (f64, f64) {
        (0.5 * (self.s1 + self.s2), 0.5 * (self.t1 + self.t2))
    }
}

/// Mutual inductance [H] of two coplanar plates carrying parallel uniform
/// currents, each normalized to unit total current.
pub fn plate_mutual(p: &Plate, q: &Plate) -> f64 {
    let (pc, qc) = (p.centre(), q.centre());
    let dist = (pc.0 - qc.0).hypot(pc.1 - qc.1);
    if dist > FAR * p.size().max(q.size()) {
        return plate_mutual_filaments(p, q);
    }
    let mut tot = 0.0;
    for (u, su) in combos(p.s1, p.s2, q.s1, q.s2) {
        for (v, sv) in combos(p.t1, p.t2, q.t1, q.t2) {
            tot += su * sv * f_prim(u, v);
        }
    }
    K * tot / ((p.t2 - p.t1) * (q.t2 - q.t1))
}

fn plate_mutual_filaments(p: &Plate, q: &Plate) -> f64 {
    let (x, w) = gauss_legendre(GL_BAND);
    let mut tot = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let tp = 0.5 * (p.t1 + p.t2) + 0.5 * (p.t2 - p.t1) * xi;
        for (xk, wk) in x.iter().zip(&w) {
            let tq = 0.5 * (q.t1 + q.t2) + 0.5 * (q.t2 - q.t1) * xk;
            tot += 0.25 * wi * wk * parallel_segments(p.s1, p.s2, q.s1, q.s2, (tp - tq).abs());
        }
    }
    K * tot
}

/// Mutual inductance [H] between a plate (unit total current) and a
/// parallel filament segment [s1, s2] at transverse coordinate `t0`,
/// lifted out of the plane by `h`.
pub fn plate_filament_mutual(p: &Plate, s1: f64, s2: f64, t0: f64, h: f64) -> f64 {
    let (pc, bw) = (p.centre(), p.t2 - p.t1);
    let near = (pc.0 - 0.5 * (s1 + s2)).hypot(pc.1 - t0).hypot(h) <= FAR * p.size().max(s2 - s1);
    if h == 0.0 && near {
        let mut tot = 0.0;
        for (u, su) in combos(p.s1, p.s2, s1, s2) {
            tot += su * (p_prim(u, p.t2 - t0) - p_prim(u, p.t1 - t0));
        }
        return K * tot / bw;
    }
    let n = if h == 0.0 { GL_BAND } else { GL_COIL };
    let (x, w) = gauss_legendre(n);
    let tot: f64 = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let t = pc.1 + 0.5 * bw * xi;
            0.5 * wi * parallel_segments(p.s1, p.s2, s1, s2, (t - t0).hypot(h))
        })
        .sum();
    K * tot
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemGrid {
    pub nx: usize,
    pub ny: usize,
    pub l: f64,
    pub w: f64,
}

impl MemGrid {
    pub fn new(nx: usize, ny: usize, l: f64, w: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::config(format!("MEM grid needs nx, ny ≥ 2, got {nx}×{ny}")));
        }
        if !(l > 0.0 && w > 0.0) {
            return Err(Error::config("MEM grid needs positive strip dimensions"));
        }
        Ok(MemGrid { nx, ny, l, w })
    }

    /// Near-square even grid with about `n` cells.
    pub fn with_cells(n: usize, l: f64, w: f64) -> Result<Self> {
        MemGrid::with_cell_aspect(n, l, w, 1.0)
    }

    /// Even grid with about `n` cells whose cells are `aspect` times longer
    /// in x than in y.
    pub fn with_cell_aspect(n: usize, l: f64, w: f64, aspect: f64) -> Result<Self> {
        let even = |v: f64| (2.0 * (v / 2.0).round()).max(2.0) as usize;
        let ny = even((n as f64 * aspect * w / l).sqrt());
        let nx = even(n as f64 / ny as f64);
        MemGrid::new(nx, ny, l, w)
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn dx(&self) -> f64 {
        self.l / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.w / self.ny as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn cell_centre(&self, i: usize, j: usize) -> (f64, f64) {
        (
            -0.5 * self.l + (i as f64 + 0.5) * self.dx(),
            -0.5 * self.w + (j as f64 + 0.5) * self.dy(),
        )
    }

    /// Mirror images of cell (i, j), without duplicates.
    fn orbit(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        let mut o = Vec::with_capacity(4);
        for c in [(i, j), (self.nx - 1 - i, j), (i, self.ny - 1 - j), (self.nx - 1 - i, self.ny - 1 - j)] {
            if !o.contains(&c) {
                o.push(c);
            }
        }
        o
    }
}

/// Band k (0..=n) across an axis of n cells of size h centred on 0.
fn band(k: usize, n: usize, h: f64) -> (f64, f64) {
    let lo = -0.5 * n as f64 * h;
    let edge = lo + k as f64 * h;
    let a = if k == 0 { lo } else { edge - 0.5 * h };
    let b = if k == n { -lo } else { edge + 0.5 * h };
    (a, b)
}

/// Band–band mutuals for edges running along one axis.
///
/// `seg` is the segment length along the current, `n` the cell count and
/// `h` the cell size across. Interior bands are translation invariant, so
/// only the band offset matters; the two half-width edge bands are
/// mirror images of each other.
struct AxisTable {
    n: usize,
    nb: usize,
    interior: Vec<f64>,
    boundary: Vec<f64>,
}

impl AxisTable {
    fn new(seg: f64, nseg: usize, h: f64, n: usize) -> Self {
        let nb = n + 1;
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..nseg)
            .into_par_iter()
            .map(|d| {
                let (s1, s2) = (d as f64 * seg, (d + 1) as f64 * seg);
                let base = Plate { s1: 0.0, s2: seg, t1: -0.5 * h, t2: 0.5 * h };
                let inner = (0..nb)
                    .map(|k| {
                        let c = k as f64 * h;
                        plate_mutual(&base, &Plate { s1, s2, t1: c - 0.5 * h, t2: c + 0.5 * h })
                    })
                    .collect();
                let (e1, e2) = band(0, n, h);
                let edge = Plate { s1: 0.0, s2: seg, t1: e1, t2: e2 };
                let outer = (0..nb)
                    .map(|k| {
                        let (t1, t2) = band(k, n, h);
                        plate_mutual(&edge, &Plate { s1, s2, t1, t2 })
                    })
                    .collect();
                (inner, outer)
            })
            .collect();
        let mut interior = Vec::with_capacity(nseg * nb);
        let mut boundary = Vec::with_capacity(nseg * nb);
        for (a, b) in rows {
            interior.extend(a);
            boundary.extend(b);
        }
        AxisTable { n, nb, interior, boundary }
    }

    fn get(&self, dseg: usize, a: usize, b: usize) -> f64 {
        let n = self.n;
        let row = dseg * self.nb;
        match (a == 0 || a == n, b == 0 || b == n) {
            (false, false) => self.interior[row + a.abs_diff(b)],
            (true, _) => self.boundary[row + if a == 0 { b } else { n - b }],
            (false, true) => self.boundary[row + if b == 0 { a } else { n - a }],
        }
    }

    /// Loop–loop term for two cells whose edge pairs start at `a` and `b`.
    fn loop_term(&self, dseg: usize, a: usize, b: usize) -> f64 {
        self.get(dseg, a, b) - self.get(dseg, a, b + 1) - self.get(dseg, a + 1, b) + self.get(dseg, a + 1, b + 1)
    }
}

/// Precomputed inductance data for one grid.
pub struct Kernel {
    pub grid: MemGrid,
    x_edges: AxisTable,
    y_edges: AxisTable,
}

impl Kernel {
    pub fn new(grid: MemGrid) -> Self {
        Kernel {
            grid,
            x_edges: AxisTable::new(grid.dx(), grid.nx, grid.dy(), grid.ny),
            y_edges: AxisTable::new(grid.dy(), grid.ny, grid.dx(), grid.nx),
        }
    }

    /// Mutual inductance between cell loops (i1, j1) and (i2, j2) [H].
    pub fn entry(&self, i1: usize, j1: usize, i2: usize, j2: usize) -> f64 {
        self.x_edges.loop_term(i1.abs_diff(i2), j1, j2) + self.y_edges.loop_term(j1.abs_diff(j2), i1, i2)
    }

    /// Full N×N matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let g = self.grid;
        let n = g.cells();
        let mut m = DMatrix::zeros(n, n);
        for p in 0..n {
            for q in 0..=p {
                let v = self.entry(p / g.ny, p % g.ny, q / g.ny, q % g.ny);
                m[(p, q)] = v;
                m[(q, p)] = v;
            }
        }
        m
    }
}

/// Full cell-loop inductance matrix [H].
pub fn assemble_kernel(grid: &MemGrid) -> DMatrix<f64> {
    Kernel::new(*grid).matrix()
}

#[derive(Debug, Clone)]
pub struct MemSolution {
    pub grid: MemGrid,
    /// Circulating current of every cell [A].
    pub cell_currents: Vec<f64>,
    pub b: f64,
    pub z_m: f64,
}

impl MemSolution {
    pub fn current(&self, i: usize, j: usize) -> f64 {
        self.cell_currents[self.grid.index(i, j)]
    }

    fn padded(&self, i: isize, j: isize) -> f64 {
        let g = &self.grid;
        if i < 0 || j < 0 || i >= g.nx as isize || j >= g.ny as isize {
            0.0
        } else {
            self.current(i as usize, j as usize)
        }
    }

    /// x-directed current on band j of column i [A].
    pub fn x_edge_current(&self, i: usize, j: usize) -> f64 {
        self.padded(i as isize, j as isize) - self.padded(i as isize, j as isize - 1)
    }

    /// y-directed current on band i of row j [A].
    pub fn y_edge_current(&self, i: usize, j: usize) -> f64 {
        self.padded(i as isize - 1, j as isize) - self.padded(i as isize, j as isize)
    }

    fn x_plate(&self, i: usize, j: usize) -> Plate {
        let g = &self.grid;
        let (t1, t2) = band(j, g.ny, g.dy());
        let s1 = -0.5 * g.l + i as f64 * g.dx();
        Plate { s1, s2: s1 + g.dx(), t1, t2 }
    }

    fn y_plate(&self, i: usize, j: usize) -> Plate {
        let g = &self.grid;
        let (t1, t2) = band(i, g.nx, g.dx());
        let s1 = -0.5 * g.w + j as f64 * g.dy();
        Plate { s1, s2: s1 + g.dy(), t1, t2 }
    }

    /// Flux through a rectangular loop [x1, x2]×[y1, y2] at height `h`
    /// above the strip, counted along +ẑ [Wb].
    pub fn loop_flux(&self, x1: f64, x2: f64, y1: f64, y2: f64, h: f64) -> f64 {
        let g = self.grid;
        let xs: f64 = (0..g.nx)
            .into_par_iter()
            .map(|i| {
                (0..=g.ny)
                    .map(|j| {
                        let c = self.x_edge_current(i, j);
                        if c == 0.0 {
                            return 0.0;
                        }
                        let p = self.x_plate(i, j);
                        c * (plate_filament_mutual(&p, x1, x2, y1, h) - plate_filament_mutual(&p, x1, x2, y2, h))
                    })
                    .sum::<f64>()
            })
            .collect::<Vec<_>>()
            .iter()
            .sum();
        let ys: f64 = (0..=g.nx)
            .into_par_iter()
            .map(|i| {
                (0..g.ny)
                    .map(|j| {
                        let c = self.y_edge_current(i, j);
                        if c == 0.0 {
                            return 0.0;
                        }
                        let p = self.y_plate(i, j);
                        c * (plate_filament_mutual(&p, y1, y2, x2, h) - plate_filament_mutual(&p, y1, y2, x1, h))
                    })
                    .sum::<f64>()
            })
            .collect::<Vec<_>>()
            .iter()
            .sum();
        xs + ys
    }

    /// Total B_z averaged over cell (i, j): the applied b·z_m plus the
    /// exact in-plane flux of the cell currents divided by the cell area [T].
    pub fn cell_average_bz(&self, i: usize, j: usize) -> f64 {
        let g = &self.grid;
        let (xc, yc) = g.cell_centre(i, j);
        let (hx, hy) = (0.5 * g.dx(), 0.5 * g.dy());
        let flux = self.loop_flux(xc - hx, xc + hx, yc - hy, yc + hy, 0.0);
        self.b * self.z_m + flux / (g.dx() * g.dy())
    }

    /// Sheet current K_x at the centres of the interior cells of column `i`,
    /// from central differences of g [A/m]. Returns (y, K_x) pairs.
    pub fn column_profile(&self, i: usize) -> Vec<(f64, f64)> {
        let g = &self.grid;
        (1..g.ny - 1)
            .map(|j| {
                let k = (self.current(i, j + 1) - self.current(i, j - 1)) / (2.0 * g.dy());
                (g.cell_centre(i, j).1, k)
            })
            .collect()
    }
}

fn applied_flux(grid: &MemGrid, b: f64, z_m: f64) -> f64 {
    b * z_m * grid.dx() * grid.dy()
}

/// Solve C·g = −Φ_a with a given full kernel.
pub fn solve_meissner(kernel: &DMatrix<f64>, grid: &MemGrid, b: f64, z_m: f64) -> Result<MemSolution> {
    let n = grid.cells();
    if kernel.nrows() != n || kernel.ncols() != n {
        return Err(Error::config("kernel does not match the grid"));
    }
    let chol = kernel
        .clone()
        .cholesky()
        .ok_or_else(|| Error::config(format!("MEM kernel for {}×{} grid is not positive definite", grid.nx, grid.ny)))?;
    let rhs = DVector::from_element(n, -applied_flux(grid, b, z_m));
    let g = chol.solve(&rhs);
    Ok(MemSolution { grid: *grid, cell_currents: g.iter().copied().collect(), b, z_m })
}

/// Solve on one quadrant using the mirror symmetry of the uniform drive.
pub fn solve_meissner_symmetric(grid: &MemGrid, b: f64, z_m: f64) -> Result<MemSolution> {
    let kernel = Kernel::new(*grid);
    let (hx, hy) = (grid.nx.div_ceil(2), grid.ny.div_ceil(2));
    let m = hx * hy;
    let orbits: Vec<Vec<(usize, usize)>> =
        (0..m).map(|p| grid.orbit(p / hy, p % hy)).collect();
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|p| {
            let (i1, j1) = (p / hy, p % hy);
            let weight = orbits[p].len() as f64;
            (0..=p)
                .map(|q| weight * orbits[q].iter().map(|&(i2, j2)| kernel.entry(i1, j1, i2, j2)).sum::<f64>())
                .collect()
        })
        .collect();
    let mut a = DMatrix::zeros(m, m);
    for (p, row) in rows.iter().enumerate() {
        for (q, v) in row.iter().enumerate() {
            a[(p, q)] = *v;
            a[(q, p)] = *v;
        }
    }
    let phi = applied_flux(grid, b, z_m);
    let rhs = DVector::from_iterator(m, orbits.iter().map(|o| -(o.len() as f64) * phi));
    let chol = a.cholesky().ok_or_else(|| {
        Error::numerical(format!("reduced MEM system for {}×{} grid is not positive definite", grid.nx, grid.ny))
    })?;
    let h = chol.solve(&rhs);
    let mut g = vec![0.0; grid.cells()];
    for (p, o) in orbits.iter().enumerate() {
        for &(i, j) in o {
            g[grid.index(i, j)] = h[p];
        }
    }
    Ok(MemSolution { grid: *grid, cell_currents: g, b, z_m })
}

/// E = ½gᵀCg + gᵀΦ_a [J].
pub fn energy(kernel: &DMatrix<f64>, sol: &MemSolution) -> f64 {
    let g = DVector::from_column_slice(&sol.cell_currents);
    let phi = applied_flux(&sol.grid, sol.b, sol.z_m);
    0.5 * g.dot(&(kernel * &g)) + phi * g.sum()
}

/// Pick-up coil flux [Wb] with the same sign convention as the analytic
/// 2L_cA_x(w_c/2, z_c), which counts flux along −ẑ.
pub fn coil_flux_from_cells(sol: &MemSolution, coil: &CoilSpec) -> f64 {
    let (hx, hy) = (0.5 * coil.l_c, 0.5 * coil.w_c);
    -sol.loop_flux(-hx, hx, -hy, hy, coil.z_c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemPoint {
    pub cells: usize,
    pub nx: usize,
    pub ny: usize,
    pub eta_l: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemConvergence {
    pub l_over_w: f64,
    pub points: Vec<MemPoint>,
    /// Intercept of the fit of η_L/η against 1/N over the three largest grids.
    pub extrapolated: Option<f64>,
    pub warnings: Vec<String>,
}

/// Relative tolerance on the grid series before it is called non-monotone.
const MONOTONE_TOL: f64 = 1e-3;

/// η_L(N) and its N → ∞ extrapolation for a strip of aspect `l_over_w`.
///
/// The strip length and coil length are both set to `l_over_w`·w; `z_zp`
/// is the zero-point motion to report η_L with.
pub fn eta_finite_length(
    l_over_w: f64,
    cells: &[usize],
    strip: &StripSpec,
    coil: &CoilSpec,
    b: f64,
    z_zp: f64,
) -> Result<MemConvergence> {
    if cells.is_empty() {
        return Err(Error::config("MEM needs at least one grid size"));
    }
    let w = strip.w;
    let l = l_over_w * w;
    let coil = CoilSpec { l_c: l, ..*coil };
    if coil.z_c <= 0.5 * strip.t {
        return Err(Error::domain("pick-up coil must sit above the strip (z_c > t/2)"));
    }
    // Flux per unit offset, so the strip position does not shift the geometry.
    let z_m = 1.0;
    let analytic = coil.l_c * w * b * z_m * chi(coil.w_c / w, coil.z_c / w);
    let mut sizes = cells.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut points = Vec::with_capacity(sizes.len());
    // Long strips get elongated cells so the width stays resolved.
    let aspect = (l_over_w / 5.0).sqrt().max(1.0);
    for &n in &sizes {
        let grid = MemGrid::with_cell_aspect(n, l, w, aspect)?;
        let sol = solve_meissner_symmetric(&grid, b, z_m)?;
        let flux = coil_flux_from_cells(&sol, &coil);
        let ratio = flux / analytic;
        points.push(MemPoint {
            cells: grid.cells(),
            nx: grid.nx,
            ny: grid.ny,
            eta_l: z_zp * flux / z_m / FLUX_QUANTUM,
            ratio,
        });
    }
    let mut warnings = Vec::new();
    let monotone_up = points.windows(2).all(|p| p[1].ratio >= p[0].ratio * (1.0 - MONOTONE_TOL));
    let monotone_down = points.windows(2).all(|p| p[1].ratio <= p[0].ratio * (1.0 + MONOTONE_TOL));
    if !(monotone_up || monotone_down) {
        warnings.push(format!("η_L series at L/w = {l_over_w} is not monotone in N"));
    }
    let extrapolated = if points.len() >= 3 {
        let tail = &points[points.len() - 3..];
        let x: Vec<f64> = tail.iter().map(|p| 1.0 / p.cells as f64).collect();
        let y: Vec<f64> = tail.iter().map(|p| p.ratio).collect();
        Some(linear_fit(&x, &y)?.0)
    } else {
        warnings.push(format!(
            "L/w = {l_over_w}: {} grid size(s) given, at least 3 are needed to extrapolate",
            points.len()
        ));
        None
    };
    Ok(MemConvergence { l_over_w, points, extrapolated, warnings })
}
