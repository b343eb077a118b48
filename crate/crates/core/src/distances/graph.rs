//! Shortest paths of a metric density on domain-adapted grids, refined by
//! coarse-to-fine path smoothing.
//!
//! Grids live in a chart coordinate `ξ` with `z = F(ξ)`: Cartesian in `ζ` on
//! discs and conformal images, logarithmic-polar `ξ = log z` on the annulus and
//! the punctured disc. Edges join each node to its 16 nearest lattice
//! directions and carry `∫ β(F) |F′| |dξ|` along the straight chart segment.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::curve::adaptive_gauss;
use super::radial::RadialProfile;
use crate::domains::{ConformalDomain, Domain};
use crate::error::{Error, Result};
use crate::geometry::{contains, dist_to_boundary, ensure_finite};
use crate::kernel::quadrature::gauss_legendre;
use crate::kernel::MetricField;
use crate::ComplexPoint;

/// Default grid resolution (nodes across the chart's unit length scale).
pub const DEFAULT_RESOLUTION: usize = 64;

const STENCIL: [(i32, i32); 16] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (1, 2),
    (2, 1),
    (-1, 2),
    (-2, 1),
    (1, -2),
    (2, -1),
    (-1, -2),
    (-2, -1),
];

/// Endpoints join every node within this many grid spacings.
const ATTACH_RADIUS: f64 = 2.5;
const FIRST_LEVEL: usize = 8;
const LAST_LEVEL: usize = 128;
const MAX_SWEEPS: usize = 60;
const SEGMENT_NODES: usize = 6;

#[derive(Debug, Clone)]
enum Chart {
    /// `z = R ξ` on the disc of radius `R`.
    Scaled(f64),
    Conformal(ConformalDomain),
    /// `z = e^ξ` with `Im ξ` periodic.
    LogPolar,
}

impl Chart {
    fn map(&self, xi: Complex64) -> ComplexPoint {
        match self {
            Chart::Scaled(r) => xi * r,
            Chart::Conformal(c) => c.evaluate_map(xi).0,
            Chart::LogPolar => xi.exp(),
        }
    }

    fn map_with_derivative(&self, xi: Complex64) -> (ComplexPoint, Complex64) {
        match self {
            Chart::Scaled(r) => (xi * r, Complex64::new(*r, 0.0)),
            Chart::Conformal(c) => c.evaluate_map(xi),
            Chart::LogPolar => {
                let e = xi.exp();
                (e, e)
            }
        }
    }

    fn lift(&self, z: ComplexPoint) -> Result<Complex64> {
        match self {
            Chart::Scaled(r) => Ok(z / r),
            Chart::Conformal(c) => c.inverse_map(z),
            Chart::LogPolar => Ok(z.ln()),
        }
    }

    fn periodic(&self) -> bool {
        matches!(self, Chart::LogPolar)
    }
}

/// Nodes and precomputed edge weights for one `(domain, metric, resolution)`.
pub struct GeodesicGraph {
    chart: Chart,
    rows: usize,
    cols: usize,
    spacing: f64,
    origin: Complex64,
    /// Node is usable (inside the domain with a finite density).
    active: Vec<bool>,
    /// `weights[node * 16 + o]`, or per row for radial metrics on log-polar grids.
    weights: Vec<f64>,
    per_row: bool,
}

impl GeodesicGraph {
    fn build(domain: &Domain, metric: &dyn MetricField, resolution: usize, s_min: f64) -> Result<Self> {
        if resolution < 4 {
            return Err(Error::TooCoarse { n: resolution });
        }
        let (chart, rows, cols, spacing, origin) = match domain {
            Domain::Disc(d) => {
                let h = 2.0 / resolution as f64;
                let n = resolution + 1;
                (Chart::Scaled(d.radius()), n, n, h, Complex64::new(-1.0, -1.0))
            }
            Domain::Conformal(c) => {
                let h = 2.0 / resolution as f64;
                let n = resolution + 1;
                (Chart::Conformal(c.clone()), n, n, h, Complex64::new(-1.0, -1.0))
            }
            Domain::Annulus(a) => {
                // equal spacing in s and θ keeps the lattice conformal
                let cols = 4 * resolution;
                let h = 2.0 * PI / cols as f64;
                let width = a.log_modulus();
                let rows = (width / h).floor().max(3.0) as usize;
                let s_min = a.inner_radius().ln();
                let s0 = s_min + 0.5 * (width - (rows - 1) as f64 * h);
                (Chart::LogPolar, rows, cols, h, Complex64::new(s0, 0.0))
            }
            Domain::PuncturedDisc(_) => {
                let cols = 4 * resolution;
                let h = 2.0 * PI / cols as f64;
                let width = -s_min;
                let rows = (width / h).floor().max(3.0) as usize;
                let s0 = s_min + 0.5 * (width - (rows - 1) as f64 * h);
                (Chart::LogPolar, rows, cols, h, Complex64::new(s0, 0.0))
            }
        };

        let mut graph = Self {
            chart,
            rows,
            cols,
            spacing,
            origin,
            active: Vec::new(),
            weights: Vec::new(),
            per_row: false,
        };
        let (x, w) = gauss_legendre(4);
        let segment = |a: Complex64, b: Complex64| -> f64 {
            let mut s = 0.0;
            for (t, wt) in x.iter().zip(&w) {
                let xi = a + (b - a) * (0.5 + 0.5 * t);
                let (z, d) = graph.chart.map_with_derivative(xi);
                if !contains(domain, z) {
                    return f64::INFINITY;
                }
                match metric.density(z) {
                    Ok(beta) if beta.is_finite() => s += 0.5 * wt * beta * d.norm(),
                    _ => return f64::INFINITY,
                }
            }
            s * (b - a).norm()
        };

        let n = rows * cols;
        let node_ok = |idx: usize| -> bool {
            let z = graph.chart.map(graph.node_xi(idx));
            contains(domain, z)
                && dist_to_boundary(domain, z).is_ok_and(|d| d >= metric.floor())
                && metric.density(z).is_ok_and(f64::is_finite)
        };
        let active: Vec<bool> = if graph.chart.periodic() && metric.is_radial() {
            let row_ok: Vec<bool> = (0..rows).map(|i| node_ok(i * cols)).collect();
            (0..n).map(|idx| row_ok[idx / cols]).collect()
        } else {
            (0..n)
                .map(|idx| {
                    let xi = graph.node_xi(idx);
                    let inside_chart = match graph.chart {
                        Chart::Scaled(_) | Chart::Conformal(_) => xi.norm() < 1.0 - 0.25 * spacing,
                        Chart::LogPolar => true,
                    };
                    inside_chart && node_ok(idx)
                })
                .collect()
        };

        let per_row = graph.chart.periodic() && metric.is_radial();
        let weights = if per_row {
            let mut wts = vec![f64::INFINITY; rows * 16];
            for i in 0..rows {
                let a = graph.node_xi(i * cols);
                for (o, &(di, dj)) in STENCIL.iter().enumerate() {
                    let ii = i as i32 + di;
                    if ii < 0 || ii >= rows as i32 || !active[ii as usize * cols] {
                        continue;
                    }
                    let b = a + Complex64::new(di as f64, dj as f64) * spacing;
                    wts[i * 16 + o] = segment(a, b);
                }
            }
            wts
        } else {
            let mut wts = vec![f64::INFINITY; n * 16];
            for idx in 0..n {
                if !active[idx] {
                    continue;
                }
                let a = graph.node_xi(idx);
                for (o, &(di, dj)) in STENCIL.iter().enumerate() {
                    if let Some(nb) = graph.neighbour(idx, di, dj) {
                        if active[nb] {
                            let b = a + Complex64::new(di as f64, dj as f64) * spacing;
                            wts[idx * 16 + o] = segment(a, b);
                        }
                    }
                }
            }
            wts
        };
        graph.active = active;
        graph.weights = weights;
        graph.per_row = per_row;
        Ok(graph)
    }

    /// Chart coordinate of a node; `Re` indexes rows, `Im` columns.
    fn node_xi(&self, idx: usize) -> Complex64 {
        let (i, j) = (idx / self.cols, idx % self.cols);
        match self.chart {
            Chart::LogPolar => self.origin + Complex64::new(i as f64, j as f64) * self.spacing,
            _ => self.origin + Complex64::new(j as f64, i as f64) * self.spacing,
        }
    }

    fn neighbour(&self, idx: usize, di: i32, dj: i32) -> Option<usize> {
        let (i, j) = ((idx / self.cols) as i32, (idx % self.cols) as i32);
        match self.chart {
            Chart::LogPolar => {
                let ii = i + di;
                if ii < 0 || ii >= self.rows as i32 {
                    return None;
                }
                let jj = (j + dj).rem_euclid(self.cols as i32);
                Some(ii as usize * self.cols + jj as usize)
            }
            _ => {
                // Cartesian: (di, dj) are offsets in (x, y) = (column, row)
                let (ii, jj) = (i + dj, j + di);
                if ii < 0 || jj < 0 || ii >= self.rows as i32 || jj >= self.cols as i32 {
                    return None;
                }
                Some(ii as usize * self.cols + jj as usize)
            }
        }
    }

    fn weight(&self, idx: usize, o: usize) -> f64 {
        if self.per_row {
            self.weights[(idx / self.cols) * 16 + o]
        } else {
            self.weights[idx * 16 + o]
        }
    }

    /// Chart displacement from `a` to node `idx`, unwrapped for periodic grids.
    fn offset_to(&self, a: Complex64, idx: usize) -> Complex64 {
        let mut d = self.node_xi(idx) - a;
        if self.chart.periodic() {
            d.im -= 2.0 * PI * (d.im / (2.0 * PI)).round();
        }
        d
    }

    pub fn node_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shared graphs keyed by domain, metric name, resolution and depth window.
fn cached_graph(
    domain: &Domain,
    metric: &dyn MetricField,
    resolution: usize,
    s_min: f64,
) -> Result<Arc<GeodesicGraph>> {
    type Slot = Arc<OnceLock<Result<Arc<GeodesicGraph>>>>;
    static CACHE: OnceLock<Mutex<HashMap<(String, String, usize, i64), Slot>>> = OnceLock::new();
    let key = (
        domain.to_string(),
        metric.name().to_string(),
        resolution,
        (s_min * 1e6).round() as i64,
    );
    let slot = {
        let mut map = CACHE
            .get_or_init(Default::default)
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_default().clone()
    };
    slot.get_or_init(|| GeodesicGraph::build(domain, metric, resolution, s_min).map(Arc::new))
        .clone()
}

/// Result of a graph-geodesic computation before packaging.
#[derive(Debug, Clone)]
pub(crate) struct GeodesicPath {
    pub value: f64,
    pub previous: f64,
    pub points: Vec<ComplexPoint>,
}

pub(crate) fn shortest_path(
    domain: &Domain,
    metric: &dyn MetricField,
    z: ComplexPoint,
    w: ComplexPoint,
    resolution: usize,
) -> Result<GeodesicPath> {
    ensure_finite(z, "geodesic endpoint")?;
    ensure_finite(w, "geodesic endpoint")?;
    for p in [z, w] {
        if !contains(domain, p) {
            return Err(Error::PointOutsideDomain { z: p });
        }
        let d = dist_to_boundary(domain, p)?;
        if d < metric.floor() {
            return Err(Error::PointsTooCloseToBoundary {
                z: p,
                distance: d,
                floor: metric.floor(),
            });
        }
    }
    if z == w {
        return Ok(GeodesicPath {
            value: 0.0,
            previous: 0.0,
            points: vec![z, w],
        });
    }
    let s_min = match domain {
        // window down to a quarter of the innermost endpoint, rounded to a power of two
        Domain::PuncturedDisc(_) => {
            let m = z.norm().min(w.norm()).min(0.25) / 4.0;
            m.log2().floor().exp2().ln()
        }
        _ => 0.0,
    };
    let graph = cached_graph(domain, metric, resolution, s_min)?;
    let chart = &graph.chart;
    let xz = chart.lift(z)?;
    let xw = chart.lift(w)?;

    let segment = |a: Complex64, b: Complex64, tol: f64| -> Result<f64> {
        let len = (b - a).norm();
        if len == 0.0 {
            return Ok(0.0);
        }
        let f = |t: f64| -> Result<f64> {
            let (p, d) = chart.map_with_derivative(a + (b - a) * t);
            if !contains(domain, p) {
                return Err(Error::PointOutsideDomain { z: p });
            }
            Ok(metric.density(p)? * d.norm())
        };
        Ok(adaptive_gauss(&f, tol)? * len)
    };

    // Dijkstra on nodes plus two virtual endpoints.
    let n = graph.rows * graph.cols;
    let (src, dst) = (n, n + 1);
    let attach = ATTACH_RADIUS * graph.spacing;
    let attach_edges = |x: Complex64| -> Vec<(usize, f64, Complex64)> {
        let mut out = Vec::new();
        for idx in 0..n {
            if !graph.active[idx] {
                continue;
            }
            let d = graph.offset_to(x, idx);
            if d.norm() <= attach {
                if let Ok(c) = segment(x, x + d, 1e-8) {
                    if c.is_finite() {
                        out.push((idx, c, d));
                    }
                }
            }
        }
        out
    };
    let from_z = attach_edges(xz);
    let to_w: HashMap<usize, (f64, Complex64)> =
        attach_edges(xw).into_iter().map(|(i, c, d)| (i, (c, d))).collect();
    let direct = {
        let mut d = xw - xz;
        if chart.periodic() {
            d.im -= 2.0 * PI * (d.im / (2.0 * PI)).round();
        }
        if d.norm() <= attach {
            segment(xz, xz + d, 1e-8).ok().filter(|c| c.is_finite())
        } else {
            None
        }
    };

    let mut dist = vec![f64::INFINITY; n + 2];
    let mut prev = vec![usize::MAX; n + 2];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    for &(idx, c, _) in &from_z {
        if c < dist[idx] {
            dist[idx] = c;
            prev[idx] = src;
            heap.push(Entry { cost: c, node: idx });
        }
    }
    if let Some(c) = direct {
        dist[dst] = c;
        prev[dst] = src;
        heap.push(Entry { cost: c, node: dst });
    }
    while let Some(Entry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        if node == dst {
            break;
        }
        if let Some(&(c, _)) = to_w.get(&node) {
            let nc = cost + c;
            if nc < dist[dst] {
                dist[dst] = nc;
                prev[dst] = node;
                heap.push(Entry { cost: nc, node: dst });
            }
        }
        for (o, &(di, dj)) in STENCIL.iter().enumerate() {
            let wgt = graph.weight(node, o);
            if !wgt.is_finite() {
                continue;
            }
            let Some(nb) = graph.neighbour(node, di, dj) else {
                continue;
            };
            if !graph.active[nb] {
                continue;
            }
            let nc = cost + wgt;
            if nc < dist[nb] {
                dist[nb] = nc;
                prev[nb] = node;
                heap.push(Entry { cost: nc, node: nb });
            }
        }
    }
    if !dist[dst].is_finite() {
        return Err(Error::NoPath);
    }

    // Unwind into a continuous chart polyline from xz to the lift of w.
    let mut chain = Vec::new();
    let mut cur = prev[dst];
    while cur != src {
        chain.push(cur);
        cur = prev[cur];
    }
    chain.reverse();
    let mut path = vec![xz];
    let mut here = xz;
    for &idx in &chain {
        here += graph.offset_to(here, idx);
        path.push(here);
    }
    let mut end = xw - here;
    if chart.periodic() {
        end.im -= 2.0 * PI * (end.im / (2.0 * PI)).round();
    }
    path.push(here + end);

    let cost = |a: Complex64, b: Complex64| -> f64 {
        fixed_segment(chart, domain, metric, a, b).unwrap_or(f64::INFINITY)
    };
    let (mut value, mut previous, final_path) = smooth(path, &cost, &|a, b| segment(a, b, 1e-9))?;

    // Rotationally symmetric metrics on the annulus: solve for the exact
    // geodesic in the homotopy class found above.
    if let (Domain::Annulus(a), true) = (domain, metric.is_radial()) {
        let mu = |s: f64| -> Result<f64> {
            let rho = s.exp();
            Ok(metric.density(Complex64::new(rho, 0.0))? * rho)
        };
        if let Ok(Some(profile)) = RadialProfile::new(&mu, a.inner_radius().ln(), 0.0) {
            let sweep = final_path[final_path.len() - 1].im - final_path[0].im;
            if let Ok(exact) = profile.geodesic_length(xz.re, xw.re, sweep) {
                if exact.is_finite() && exact <= value {
                    previous = value;
                    value = exact;
                }
            }
        }
    }
    let mut points: Vec<ComplexPoint> = final_path.iter().map(|&x| chart.map(x)).collect();
    let last = points.len() - 1;
    points[0] = z;
    points[last] = w;
    Ok(GeodesicPath {
        value,
        previous,
        points,
    })
}

/// Fixed-order Gauss–Legendre cost of a straight chart segment.
fn fixed_segment(
    chart: &Chart,
    domain: &Domain,
    metric: &dyn MetricField,
    a: Complex64,
    b: Complex64,
) -> Result<f64> {
    thread_local! {
        static RULE: (Vec<f64>, Vec<f64>) = gauss_legendre(SEGMENT_NODES);
    }
    RULE.with(|(x, w)| {
        let mut s = 0.0;
        for (t, wt) in x.iter().zip(w) {
            let (p, d) = chart.map_with_derivative(a + (b - a) * (0.5 + 0.5 * t));
            if !contains(domain, p) {
                return Err(Error::PointOutsideDomain { z: p });
            }
            s += 0.5 * wt * metric.density(p)? * d.norm();
        }
        Ok(s * (b - a).norm())
    })
}

fn path_cost(path: &[Complex64], cost: &dyn Fn(Complex64, Complex64) -> f64) -> f64 {
    path.windows(2).map(|p| cost(p[0], p[1])).sum()
}

/// Redistributes vertices to equal metric length with `segments` pieces.
fn resample(path: &[Complex64], segments: usize, cost: &dyn Fn(Complex64, Complex64) -> f64) -> Vec<Complex64> {
    let pieces: Vec<f64> = path.windows(2).map(|p| cost(p[0], p[1])).collect();
    let total: f64 = pieces.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return path.to_vec();
    }
    let mut out = vec![path[0]];
    let mut acc = 0.0;
    let mut k = 0;
    for m in 1..segments {
        let target = total * m as f64 / segments as f64;
        while k < pieces.len() - 1 && acc + pieces[k] < target {
            acc += pieces[k];
            k += 1;
        }
        let frac = if pieces[k] > 0.0 {
            ((target - acc) / pieces[k]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(path[k] + (path[k + 1] - path[k]) * frac);
    }
    out.push(path[path.len() - 1]);
    out
}

/// Gauss–Seidel sweeps moving interior vertices along their normals.
fn relax(path: &mut [Complex64], cost: &dyn Fn(Complex64, Complex64) -> f64) {
    let n = path.len();
    if n < 3 {
        return;
    }
    let mut steps: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 || k == n - 1 {
                0.0
            } else {
                0.25 * (path[k] - path[k - 1]).norm().min((path[k + 1] - path[k]).norm())
            }
        })
        .collect();
    let mut total = path_cost(path, cost);
    for _ in 0..MAX_SWEEPS {
        for k in 1..n - 1 {
            let (a, b) = (path[k - 1], path[k + 1]);
            let chord = b - a;
            if chord.norm() == 0.0 {
                continue;
            }
            let normal = Complex64::new(-chord.im, chord.re) / chord.norm();
            let local = |t: f64| {
                let p = path[k] + normal * t;
                cost(a, p) + cost(p, b)
            };
            let delta = steps[k];
            if delta == 0.0 {
                continue;
            }
            let (cm, c0, cp) = (local(-delta), local(0.0), local(delta));
            let mut best = (c0, 0.0);
            let curvature = cm + cp - 2.0 * c0;
            if curvature > 0.0 && cm.is_finite() && cp.is_finite() {
                let t = (0.5 * delta * (cm - cp) / curvature).clamp(-2.0 * delta, 2.0 * delta);
                let ct = local(t);
                if ct < best.0 {
                    best = (ct, t);
                }
            }
            if cm < best.0 {
                best = (cm, -delta);
            }
            if cp < best.0 {
                best = (cp, delta);
            }
            if best.1 != 0.0 {
                path[k] += normal * best.1;
                steps[k] = (best.1.abs()).max(0.5 * delta);
            } else {
                steps[k] = 0.5 * delta;
            }
        }
        let updated = path_cost(path, cost);
        let gain = total - updated;
        total = updated;
        if gain <= 1e-13 * total {
            break;
        }
    }
}

/// Coarse-to-fine smoothing; returns the final accurate value, the value one
/// level earlier and the final chart polyline.
fn smooth(
    initial: Vec<Complex64>,
    cost: &dyn Fn(Complex64, Complex64) -> f64,
    accurate: &dyn Fn(Complex64, Complex64) -> Result<f64>,
) -> Result<(f64, f64, Vec<Complex64>)> {
    let raw = path_cost(&initial, cost);
    let mut path = resample(&initial, FIRST_LEVEL, cost);
    let mut previous;
    let mut current = raw;
    let mut segments = FIRST_LEVEL;
    loop {
        relax(&mut path, cost);
        let value = path_cost(&path, cost);
        previous = std::mem::replace(&mut current, value);
        if segments >= LAST_LEVEL {
            break;
        }
        segments *= 2;
        path = resample(&path, segments, cost);
    }
    let mut total = 0.0;
    for p in path.windows(2) {
        total += accurate(p[0], p[1])?;
    }
    if !total.is_finite() || !current.is_finite() {
        return Err(Error::NoPath);
    }
    Ok((total, previous, path))
}
