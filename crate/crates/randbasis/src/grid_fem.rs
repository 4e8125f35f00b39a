//! Structured quadrilateral grid over a rectangle with a conforming bilinear
//! (Q1) finite element space: mass matrix, time-indexed stiffness matrices,
//! right-hand-side vectors and the H1 inner-product matrix.
//!
//! Dirichlet degrees of freedom are eliminated from all assembled systems;
//! boundary data on the Dirichlet part is homogeneous throughout.

use crate::linalg::{SparseOperator, Vector};
use std::fs;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

const GAUSS_1D: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

#[derive(Debug, Error)]
pub enum FemError {
    #[error("diffusion coefficient is nonpositive ({value}) at quadrature point in cell {cell}")]
    NonpositiveDiffusion { cell: usize, value: f64 },
    #[error("grid has no Dirichlet boundary")]
    NoDirichletBoundary,
    #[error("malformed gridded time series: {0}")]
    MalformedTimeSeries(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

/// Overrides the default tag on the part of `side` whose edge midpoints fall
/// in `[lo, hi]` (in the coordinate running along that side).
#[derive(Debug, Clone, Copy)]
pub struct BoundarySegment {
    pub side: Side,
    pub lo: f64,
    pub hi: f64,
    pub tag: BoundaryTag,
}

/// Uniform quadrilateral grid on (x0,x1) x (y0,y1) with nx-by-ny cells and a
/// tag on every boundary edge.
#[derive(Debug, Clone)]
pub struct StructuredGrid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
    default_tag: BoundaryTag,
    segments: Vec<BoundarySegment>,
}

impl StructuredGrid {
    pub fn new(
        (x0, x1): (f64, f64),
        (y0, y1): (f64, f64),
        nx: usize,
        ny: usize,
        default_tag: BoundaryTag,
        segments: Vec<BoundarySegment>,
    ) -> Result<Self, FemError> {
        assert!(nx >= 2 && ny >= 2, "grid needs at least 2x2 cells");
        assert!(x1 > x0 && y1 > y0, "degenerate domain");
        let grid = Self {
            x0,
            x1,
            y0,
            y1,
            nx,
            ny,
            default_tag,
            segments,
        };
        let any_dirichlet = grid
            .boundary_edges()
            .any(|e| grid.edge_tag(e) == BoundaryTag::Dirichlet);
        if !any_dirichlet {
            return Err(FemError::NoDirichletBoundary);
        }
        Ok(grid)
    }

    /// Unit-square grid with Dirichlet conditions on the whole boundary.
    pub fn unit_square_dirichlet(n: usize) -> Self {
        Self::new((0.0, 1.0), (0.0, 1.0), n, n, BoundaryTag::Dirichlet, vec![]).unwrap()
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y1 - self.y0) / self.ny as f64
    }

    pub fn n_vertices(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn vertex_id(&self, ix: usize, iy: usize) -> usize {
        iy * (self.nx + 1) + ix
    }

    pub fn vertex_coords(&self, vid: usize) -> (f64, f64) {
        let ix = vid % (self.nx + 1);
        let iy = vid / (self.nx + 1);
        (
            self.x0 + ix as f64 * self.hx(),
            self.y0 + iy as f64 * self.hy(),
        )
    }

    /// Vertex ids of cell (cx, cy) in counterclockwise order starting at the
    /// lower-left corner.
    pub fn cell_vertices(&self, cx: usize, cy: usize) -> [usize; 4] {
        [
            self.vertex_id(cx, cy),
            self.vertex_id(cx + 1, cy),
            self.vertex_id(cx + 1, cy + 1),
            self.vertex_id(cx, cy + 1),
        ]
    }

    pub fn cell_id(&self, cx: usize, cy: usize) -> usize {
        cy * self.nx + cx
    }

    fn boundary_edges(&self) -> impl Iterator<Item = BoundaryEdge> + '_ {
        let bottom = (0..self.nx).map(|k| BoundaryEdge {
            side: Side::Bottom,
            k,
        });
        let top = (0..self.nx).map(|k| BoundaryEdge { side: Side::Top, k });
        let left = (0..self.ny).map(|k| BoundaryEdge {
            side: Side::Left,
            k,
        });
        let right = (0..self.ny).map(|k| BoundaryEdge {
            side: Side::Right,
            k,
        });
        bottom.chain(top).chain(left).chain(right)
    }

    fn edge_tag(&self, e: BoundaryEdge) -> BoundaryTag {
        let mid = self.edge_midpoint_along(e);
        for seg in &self.segments {
            if seg.side == e.side && mid >= seg.lo && mid <= seg.hi {
                return seg.tag;
            }
        }
        self.default_tag
    }

    fn edge_midpoint_along(&self, e: BoundaryEdge) -> f64 {
        match e.side {
            Side::Bottom | Side::Top => self.x0 + (e.k as f64 + 0.5) * self.hx(),
            Side::Left | Side::Right => self.y0 + (e.k as f64 + 0.5) * self.hy(),
        }
    }

    fn edge_vertices(&self, e: BoundaryEdge) -> (usize, usize) {
        match e.side {
            Side::Bottom => (self.vertex_id(e.k, 0), self.vertex_id(e.k + 1, 0)),
            Side::Top => (
                self.vertex_id(e.k, self.ny),
                self.vertex_id(e.k + 1, self.ny),
            ),
            Side::Left => (self.vertex_id(0, e.k), self.vertex_id(0, e.k + 1)),
            Side::Right => (
                self.vertex_id(self.nx, e.k),
                self.vertex_id(self.nx, e.k + 1),
            ),
        }
    }

    /// Cell adjacent to a boundary edge.
    fn edge_cell(&self, e: BoundaryEdge) -> usize {
        match e.side {
            Side::Bottom => self.cell_id(e.k, 0),
            Side::Top => self.cell_id(e.k, self.ny - 1),
            Side::Left => self.cell_id(0, e.k),
            Side::Right => self.cell_id(self.nx - 1, e.k),
        }
    }

    fn edge_length(&self, e: BoundaryEdge) -> f64 {
        match e.side {
            Side::Bottom | Side::Top => self.hx(),
            Side::Left | Side::Right => self.hy(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct BoundaryEdge {
    side: Side,
    k: usize,
}

/// Maps grid vertices to interior degree-of-freedom indices; vertices on the
/// Dirichlet boundary carry no DOF.
#[derive(Debug, Clone)]
pub struct DofMap {
    dof_of_vertex: Vec<Option<usize>>,
    n_dofs: usize,
}

impl DofMap {
    /// Eliminate Dirichlet vertices. DOFs are numbered with the shorter grid
    /// direction running fastest, which keeps the matrix bandwidth small.
    pub fn new(grid: &StructuredGrid) -> Self {
        let mut is_dirichlet = vec![false; grid.n_vertices()];
        for e in grid.boundary_edges() {
            if grid.edge_tag(e) == BoundaryTag::Dirichlet {
                let (a, b) = grid.edge_vertices(e);
                is_dirichlet[a] = true;
                is_dirichlet[b] = true;
            }
        }
        let mut dof_of_vertex = vec![None; grid.n_vertices()];
        let mut next = 0;
        let x_fastest = grid.nx <= grid.ny;
        let (outer, inner) = if x_fastest {
            (grid.ny + 1, grid.nx + 1)
        } else {
            (grid.nx + 1, grid.ny + 1)
        };
        for o in 0..outer {
            for i in 0..inner {
                let vid = if x_fastest {
                    grid.vertex_id(i, o)
                } else {
                    grid.vertex_id(o, i)
                };
                if !is_dirichlet[vid] {
                    dof_of_vertex[vid] = Some(next);
                    next += 1;
                }
            }
        }
        Self {
            dof_of_vertex,
            n_dofs: next,
        }
    }

    /// Keep every vertex as a DOF (pre-elimination assembly, used for
    /// integral identities on the full matrix).
    pub fn all_vertices(grid: &StructuredGrid) -> Self {
        Self {
            dof_of_vertex: (0..grid.n_vertices()).map(Some).collect(),
            n_dofs: grid.n_vertices(),
        }
    }

    pub fn dof(&self, vid: usize) -> Option<usize> {
        self.dof_of_vertex[vid]
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }
}

/// Scalar signal over the time grid.
#[derive(Debug, Clone)]
pub enum TimeSignal {
    Constant(f64),
    /// `value` on [t_on, t_off], zero outside.
    Boxcar {
        t_on: f64,
        t_off: f64,
        value: f64,
    },
    /// Ramps linearly from 0 to `value` on [t0, t1], holds on [t1, t2],
    /// ramps back to 0 on [t2, t3], zero outside.
    Trapezoid {
        t0: f64,
        t1: f64,
        t2: f64,
        t3: f64,
        value: f64,
    },
    /// One value per time index.
    Samples(Vec<f64>),
}

impl TimeSignal {
    pub fn eval(&self, l: usize, t: f64) -> f64 {
        match self {
            TimeSignal::Constant(v) => *v,
            TimeSignal::Boxcar { t_on, t_off, value } => {
                if t >= *t_on && t <= *t_off {
                    *value
                } else {
                    0.0
                }
            }
            TimeSignal::Trapezoid { t0, t1, t2, t3, value } => {
                if t <= *t0 || t >= *t3 {
                    0.0
                } else if t < *t1 {
                    value * (t - t0) / (t1 - t0)
                } else if t <= *t2 {
                    *value
                } else {
                    value * (t3 - t) / (t3 - t2)
                }
            }
            TimeSignal::Samples(v) => v[l],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TimeSignal::Constant(_))
    }
}

/// Spatial factor of a coefficient.
#[derive(Clone)]
pub enum SpatialField {
    Constant(f64),
    /// Piecewise constant per grid cell, length nx*ny, cell id = cy*nx + cx.
    Cells(Vec<f64>),
    Analytic(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for SpatialField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpatialField::Constant(v) => write!(f, "Constant({v})"),
            SpatialField::Cells(v) => write!(f, "Cells(len={})", v.len()),
            SpatialField::Analytic(_) => write!(f, "Analytic"),
        }
    }
}

impl SpatialField {
    /// Indicator of the rectangle [ax,bx] x [ay,by].
    pub fn box_indicator(ax: f64, bx: f64, ay: f64, by: f64) -> Self {
        SpatialField::Analytic(Arc::new(move |x, y| {
            if x >= ax && x <= bx && y >= ay && y <= by {
                1.0
            } else {
                0.0
            }
        }))
    }

    pub fn eval(&self, cell: usize, x: f64, y: f64) -> f64 {
        match self {
            SpatialField::Constant(v) => *v,
            SpatialField::Cells(v) => v[cell],
            SpatialField::Analytic(f) => f(x, y),
        }
    }
}

/// Space-time coefficient: kappa, advection components, reaction, source,
/// Neumann data.
#[derive(Debug, Clone)]
pub enum CoefficientField {
    Constant(f64),
    /// Sum of separable terms g_i(t) * h_i(x, y).
    SeparableSum(Vec<(TimeSignal, SpatialField)>),
    /// One cell-wise field per time index.
    GriddedTimeSeries {
        nx: usize,
        ny: usize,
        /// values[l][cell]
        values: Vec<Vec<f64>>,
    },
}

impl CoefficientField {
    pub fn separable(signal: TimeSignal, field: SpatialField) -> Self {
        CoefficientField::SeparableSum(vec![(signal, field)])
    }

    pub fn eval(&self, l: usize, t: f64, cell: usize, x: f64, y: f64) -> f64 {
        match self {
            CoefficientField::Constant(v) => *v,
            CoefficientField::SeparableSum(terms) => terms
                .iter()
                .map(|(g, h)| g.eval(l, t) * h.eval(cell, x, y))
                .sum(),
            CoefficientField::GriddedTimeSeries { values, .. } => values[l][cell],
        }
    }

    pub fn is_time_independent(&self) -> bool {
        match self {
            CoefficientField::Constant(_) => true,
            CoefficientField::SeparableSum(terms) => terms.iter().all(|(g, _)| g.is_constant()),
            CoefficientField::GriddedTimeSeries { values, .. } => values.len() <= 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CoefficientField::Constant(v) if *v == 0.0)
    }

    /// Load a per-cell time series from CSV: header `nx,ny,n_t`, then one
    /// row of nx*ny cell values per time index.
    pub fn gridded_from_csv(path: &Path) -> Result<Self, FemError> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| FemError::MalformedTimeSeries("empty file".into()))?;
        let dims: Vec<usize> = header
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|e| FemError::MalformedTimeSeries(format!("bad header: {e}")))?;
        if dims.len() != 3 {
            return Err(FemError::MalformedTimeSeries(
                "header must be nx,ny,n_t".into(),
            ));
        }
        let (nx, ny, n_t) = (dims[0], dims[1], dims[2]);
        let mut values = Vec::with_capacity(n_t);
        for (row_idx, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|e| {
                    FemError::MalformedTimeSeries(format!("bad value in row {row_idx}: {e}"))
                })?;
            if row.len() != nx * ny {
                return Err(FemError::MalformedTimeSeries(format!(
                    "row {row_idx} has {} values, expected {}",
                    row.len(),
                    nx * ny
                )));
            }
            values.push(row);
        }
        if values.len() != n_t {
            return Err(FemError::MalformedTimeSeries(format!(
                "found {} rows, expected {}",
                values.len(),
                n_t
            )));
        }
        Ok(CoefficientField::GriddedTimeSeries { nx, ny, values })
    }
}

/// Full space-time problem definition.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub grid: StructuredGrid,
    /// Final time T; the grid has n_time_points equidistant points t_l = l * dt.
    pub t_final: f64,
    pub n_time_points: usize,
    pub kappa: CoefficientField,
    pub b_x: CoefficientField,
    pub b_y: CoefficientField,
    pub c: CoefficientField,
    pub f: CoefficientField,
    pub g_n: CoefficientField,
    pub u0: SpatialField,
}

impl ProblemSpec {
    pub fn dt(&self) -> f64 {
        assert!(self.n_time_points >= 2);
        self.t_final / (self.n_time_points - 1) as f64
    }

    pub fn time(&self, l: usize) -> f64 {
        l as f64 * self.dt()
    }

    /// Nodal interpolation of the initial condition on the interior DOFs.
    pub fn discrete_u0(&self, dofmap: &DofMap) -> Vector {
        let grid = &self.grid;
        let mut u = Vector::zeros(dofmap.n_dofs());
        for vid in 0..grid.n_vertices() {
            if let Some(d) = dofmap.dof(vid) {
                let (x, y) = grid.vertex_coords(vid);
                let val = match &self.u0 {
                    SpatialField::Cells(cells) => {
                        // piecewise-constant data: average over adjacent cells
                        let ix = vid % (grid.nx + 1);
                        let iy = vid / (grid.nx + 1);
                        let mut acc = 0.0;
                        let mut n = 0;
                        for cx in ix.saturating_sub(1)..=ix.min(grid.nx - 1) {
                            for cy in iy.saturating_sub(1)..=iy.min(grid.ny - 1) {
                                acc += cells[grid.cell_id(cx, cy)];
                                n += 1;
                            }
                        }
                        acc / n as f64
                    }
                    other => other.eval(0, x, y),
                };
                u[d] = val;
            }
        }
        u
    }

    pub fn stiffness_time_independent(&self) -> bool {
        self.kappa.is_time_independent()
            && self.b_x.is_time_independent()
            && self.b_y.is_time_independent()
            && self.c.is_time_independent()
    }
}

/// Q1 shape functions at a reference point (xi, eta) in [-1,1]^2.
fn shape(xi: f64, eta: f64) -> [f64; 4] {
    [
        0.25 * (1.0 - xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 + eta),
        0.25 * (1.0 - xi) * (1.0 + eta),
    ]
}

/// Reference gradients (d/dxi, d/deta) of the Q1 shape functions.
fn shape_grad(xi: f64, eta: f64) -> [(f64, f64); 4] {
    [
        (-0.25 * (1.0 - eta), -0.25 * (1.0 - xi)),
        (0.25 * (1.0 - eta), -0.25 * (1.0 + xi)),
        (0.25 * (1.0 + eta), 0.25 * (1.0 + xi)),
        (-0.25 * (1.0 + eta), 0.25 * (1.0 - xi)),
    ]
}

/// Mass matrix M_ij = (phi_j, phi_i) on the DOFs of `dofmap`.
pub fn assemble_mass(grid: &StructuredGrid, dofmap: &DofMap) -> SparseOperator {
    let (hx, hy) = (grid.hx(), grid.hy());
    let jac = hx * hy / 4.0;
    let mut triplets = Vec::new();
    for cy in 0..grid.ny {
        for cx in 0..grid.nx {
            let verts = grid.cell_vertices(cx, cy);
            let mut local = [[0.0; 4]; 4];
            for &xi in &GAUSS_1D {
                for &eta in &GAUSS_1D {
                    let n = shape(xi, eta);
                    for a in 0..4 {
                        for b in 0..4 {
                            local[a][b] += n[a] * n[b] * jac;
                        }
                    }
                }
            }
            scatter(&verts, &local, dofmap, &mut triplets);
        }
    }
    SparseOperator::from_triplets(dofmap.n_dofs(), dofmap.n_dofs(), &triplets)
}

/// Stiffness matrix at time index l:
/// A_ij = (kappa grad phi_j, grad phi_i) + (b . grad phi_j, phi_i) + (c phi_j, phi_i).
pub fn assemble_stiffness(
    grid: &StructuredGrid,
    dofmap: &DofMap,
    kappa: &CoefficientField,
    b_x: &CoefficientField,
    b_y: &CoefficientField,
    c: &CoefficientField,
    l: usize,
    t: f64,
) -> Result<SparseOperator, FemError> {
    let (hx, hy) = (grid.hx(), grid.hy());
    let jac = hx * hy / 4.0;
    let mut triplets = Vec::new();
    for cy in 0..grid.ny {
        for cx in 0..grid.nx {
            let cell = grid.cell_id(cx, cy);
            let verts = grid.cell_vertices(cx, cy);
            let (x_lo, y_lo) = grid.vertex_coords(verts[0]);
            let mut local = [[0.0; 4]; 4];
            for &xi in &GAUSS_1D {
                for &eta in &GAUSS_1D {
                    let x = x_lo + (1.0 + xi) * hx / 2.0;
                    let y = y_lo + (1.0 + eta) * hy / 2.0;
                    let kap = kappa.eval(l, t, cell, x, y);
                    if kap <= 0.0 {
                        return Err(FemError::NonpositiveDiffusion { cell, value: kap });
                    }
                    let bx = b_x.eval(l, t, cell, x, y);
                    let by = b_y.eval(l, t, cell, x, y);
                    let cc = c.eval(l, t, cell, x, y);
                    let n = shape(xi, eta);
                    let g = shape_grad(xi, eta);
                    // physical gradients
                    let gx: Vec<f64> = g.iter().map(|&(dxi, _)| dxi * 2.0 / hx).collect();
                    let gy: Vec<f64> = g.iter().map(|&(_, deta)| deta * 2.0 / hy).collect();
                    for a in 0..4 {
                        for b in 0..4 {
                            let diff = kap * (gx[b] * gx[a] + gy[b] * gy[a]);
                            let adv = (bx * gx[b] + by * gy[b]) * n[a];
                            let reac = cc * n[b] * n[a];
                            local[a][b] += (diff + adv + reac) * jac;
                        }
                    }
                }
            }
            scatter(&verts, &local, dofmap, &mut triplets);
        }
    }
    Ok(SparseOperator::from_triplets(
        dofmap.n_dofs(),
        dofmap.n_dofs(),
        &triplets,
    ))
}

/// Right-hand side at time index l: volume source plus Neumann edge terms.
pub fn assemble_rhs(
    grid: &StructuredGrid,
    dofmap: &DofMap,
    f: &CoefficientField,
    g_n: &CoefficientField,
    l: usize,
    t: f64,
) -> Vector {
    let (hx, hy) = (grid.hx(), grid.hy());
    let jac = hx * hy / 4.0;
    let mut rhs = Vector::zeros(dofmap.n_dofs());
    if !f.is_zero() {
        for cy in 0..grid.ny {
            for cx in 0..grid.nx {
                let cell = grid.cell_id(cx, cy);
                let verts = grid.cell_vertices(cx, cy);
                let (x_lo, y_lo) = grid.vertex_coords(verts[0]);
                for &xi in &GAUSS_1D {
                    for &eta in &GAUSS_1D {
                        let x = x_lo + (1.0 + xi) * hx / 2.0;
                        let y = y_lo + (1.0 + eta) * hy / 2.0;
                        let fv = f.eval(l, t, cell, x, y);
                        if fv != 0.0 {
                            let n = shape(xi, eta);
                            for a in 0..4 {
                                if let Some(d) = dofmap.dof(verts[a]) {
                                    rhs[d] += fv * n[a] * jac;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if !g_n.is_zero() {
        for e in grid.boundary_edges() {
            if grid.edge_tag(e) != BoundaryTag::Neumann {
                continue;
            }
            let (va, vb) = grid.edge_vertices(e);
            let cell = grid.edge_cell(e);
            let len = grid.edge_length(e);
            let (xa, ya) = grid.vertex_coords(va);
            let (xb, yb) = grid.vertex_coords(vb);
            // 2-point Gauss on the edge; Q1 traces are linear hats
            for &xi in &GAUSS_1D {
                let s = (1.0 + xi) / 2.0;
                let x = xa + s * (xb - xa);
                let y = ya + s * (yb - ya);
                let gv = g_n.eval(l, t, cell, x, y);
                if gv != 0.0 {
                    let w = len / 2.0;
                    if let Some(d) = dofmap.dof(va) {
                        rhs[d] += gv * (1.0 - s) * w;
                    }
                    if let Some(d) = dofmap.dof(vb) {
                        rhs[d] += gv * s * w;
                    }
                }
            }
        }
    }
    rhs
}

/// H1 inner-product matrix M + K1, K1 the unit-diffusion stiffness.
pub fn h1_product(grid: &StructuredGrid, dofmap: &DofMap) -> SparseOperator {
    let m = assemble_mass(grid, dofmap);
    let k1 = assemble_stiffness(
        grid,
        dofmap,
        &CoefficientField::Constant(1.0),
        &CoefficientField::Constant(0.0),
        &CoefficientField::Constant(0.0),
        &CoefficientField::Constant(0.0),
        0,
        0.0,
    )
    .expect("unit diffusion is positive");
    m.add(&k1)
}

fn scatter(
    verts: &[usize; 4],
    local: &[[f64; 4]; 4],
    dofmap: &DofMap,
    triplets: &mut Vec<(usize, usize, f64)>,
) {
    for a in 0..4 {
        if let Some(i) = dofmap.dof(verts[a]) {
            for b in 0..4 {
                if let Some(j) = dofmap.dof(verts[b]) {
                    triplets.push((i, j, local[a][b]));
                }
            }
        }
    }
}
