//! Parametric sweeps in `V2`: branch linking, exceptional points and
//! real-to-real crossings.
//!
//! Spectra are computed on a uniform `V2` grid. Intervals where the number of
//! real levels changes are subdivided before linking, so a branch only ends
//! where its roots are really gone. Roots at neighbouring grid points are
//! linked by an order-preserving alignment, which keeps the branches sorted
//! in energy; true crossings are then recovered from V-shaped minima of the
//! gap between adjacent branches and confirmed by minimising that gap with
//! the underlying solver before the branch tails are exchanged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::roots::linspace;
use crate::spectrum::{real_roots_in, real_spectrum, Method, SolverSettings};

/// Grid density of the local energy scans used for refinement.
pub const LOCAL_SCAN_POINTS: usize = 200;

/// Scan density of the shooting solver during sweeps.
pub const SWEEP_SCAN_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub v2_min: f64,
    pub v2_max: f64,
    /// Number of intervals of the uniform grid.
    pub steps: usize,
    pub method: Method,
    /// Largest energy jump linking two roots at neighbouring grid points;
    /// `None` means three times the mean level spacing at `v2_min`.
    pub match_gap: Option<f64>,
    /// Width of the final bracket of each exceptional point.
    pub ep_tol_v2: f64,
    /// Subdivision of intervals where the number of real levels changes.
    pub refine: usize,
    pub solver: SolverSettings,
}

impl SweepConfig {
    pub fn new(spec: &PotentialSpec, method: Method, v2_min: f64, v2_max: f64) -> Self {
        let mut solver = SolverSettings::for_spec(spec);
        solver.shooting.e_scan_points = SWEEP_SCAN_POINTS;
        SweepConfig {
            v2_min,
            v2_max,
            steps: 400,
            method,
            match_gap: None,
            ep_tol_v2: 1e-3,
            refine: 10,
            solver,
        }
    }

    pub fn with_steps(self, steps: usize) -> Self {
        SweepConfig { steps, ..self }
    }

    pub fn with_solver(self, solver: SolverSettings) -> Self {
        SweepConfig { solver, ..self }
    }

    pub fn validate(&self, spec: &PotentialSpec) -> Result<()> {
        spec.validate()?;
        self.method.check(spec.model)?;
        if !(self.v2_min.is_finite() && self.v2_max.is_finite() && self.v2_min <= self.v2_max) {
            return Err(Error::Config(format!(
                "need finite v2_min <= v2_max, got [{}, {}]",
                self.v2_min, self.v2_max
            )));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!("a sweep needs at least 2 steps, got {}", self.steps)));
        }
        if !(self.ep_tol_v2 > 0.0) {
            return Err(Error::Config(format!("ep_tol_v2 must be positive, got {}", self.ep_tol_v2)));
        }
        if let Some(g) = self.match_gap {
            if !(g > 0.0) {
                return Err(Error::Config(format!("match_gap must be positive, got {g}")));
            }
        }
        if self.refine == 0 {
            return Err(Error::Config("refine must be at least 1".into()));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        if self.v2_min == self.v2_max {
            vec![self.v2_min]
        } else {
            linspace(self.v2_min, self.v2_max, self.steps + 1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub label: usize,
    /// `(v2, E)` sorted by `v2`, one point per grid value where the branch is alive.
    pub points: Vec<(f64, f64)>,
}

impl Branch {
    pub fn first(&self) -> (f64, f64) {
        self.points[0]
    }

    pub fn last(&self) -> (f64, f64) {
        self.points[self.points.len() - 1]
    }

    /// Energy at grid value `v2`, if the branch is alive there.
    pub fn energy_at(&self, v2: f64) -> Option<f64> {
        self.points
            .binary_search_by(|p| p.0.partial_cmp(&v2).unwrap_or(std::cmp::Ordering::Less))
            .ok()
            .map(|i| self.points[i].1)
    }
}

/// Two branches that lose their roots between two neighbouring grid values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Termination {
    /// Lower branch first.
    pub labels: (usize, usize),
    /// Last grid value with both roots, first grid value without them.
    pub interval: (f64, f64),
}

/// A branch that ends alone: the topmost level reaching the continuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdExit {
    pub label: usize,
    pub interval: (f64, f64),
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurves {
    pub spec: PotentialSpec,
    pub method: Method,
    pub v2_grid: Vec<f64>,
    /// Indexed by label.
    pub branches: Vec<Branch>,
    pub terminations: Vec<Termination>,
    pub exits: Vec<ThresholdExit>,
    /// Linking gap used for the sweep.
    pub match_gap: f64,
    pub diagnostics: Vec<String>,
}

impl SpectralCurves {
    /// Energies alive at grid value `v2`, sorted ascending.
    pub fn spectrum_at(&self, v2: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self.branches.iter().filter_map(|b| b.energy_at(v2)).collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalPoint {
    pub v2c: f64,
    pub e_c: f64,
    pub branch_pair: (usize, usize),
    pub method: Method,
    /// Final `V2` bracket: both roots real at the left end, neither at the right.
    pub bracket: (f64, f64),
    /// Set when the real-root count inside the pair's window changed by
    /// other than two; the bracket is then the unrefined termination interval.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub v2_star: f64,
    pub e_star: f64,
    pub branch_pair: (usize, usize),
}

struct Sweeper<'a> {
    spec: PotentialSpec,
    cfg: &'a SweepConfig,
}

impl Sweeper<'_> {
    fn spectrum(&self, v2: f64) -> Result<Vec<f64>> {
        Ok(real_spectrum(&self.spec.with_v2(v2), self.cfg.method, &self.cfg.solver)?.eigenvalues)
    }

    fn roots_in(&self, v2: f64, lo: f64, hi: f64) -> Result<Vec<f64>> {
        real_roots_in(&self.spec.with_v2(v2), self.cfg.method, &self.cfg.solver, lo, hi, LOCAL_SCAN_POINTS)
    }

    fn spectra(&self, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
        grid.par_iter().map(|&v2| self.spectrum(v2)).collect()
    }
}

/// Largest branch-wise energy difference between `a` and the sweep `b` over
/// the mirrored range, taken at grid points `v2` of `a` whose mirror image
/// `-v2` is on the grid of `b` to rounding. `None` if the level counts differ
/// at any compared point or no point pairs up.
pub fn mirror_defect(a: &SpectralCurves, b: &SpectralCurves) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for &v2 in &a.v2_grid {
        let tol = 1e-9 * v2.abs().max(1.0);
        let Some(&w) = b.v2_grid.iter().find(|&&w| (w + v2).abs() <= tol) else {
            continue;
        };
        let (ea, eb) = (a.spectrum_at(v2), b.spectrum_at(w));
        if ea.len() != eb.len() {
            return None;
        }
        let d = ea.iter().zip(&eb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst = Some(worst.map_or(d, |m: f64| m.max(d)));
    }
    worst
}

/// Real spectra along the `V2` grid, linked into labelled branches.
pub fn sweep(spec: &PotentialSpec, cfg: &SweepConfig) -> Result<SpectralCurves> {
    cfg.validate(spec)?;
    let sw = Sweeper { spec: *spec, cfg };
    let mut diagnostics = Vec::new();

    let coarse = cfg.grid();
    let coarse_spectra = sw.spectra(&coarse)?;

    // subdivide every interval where the level count changes
    let mut extra = Vec::new();
    for i in 1..coarse.len() {
        if coarse_spectra[i].len() != coarse_spectra[i - 1].len() && cfg.refine > 1 {
            let (a, b) = (coarse[i - 1], coarse[i]);
            for j in 1..cfg.refine {
                extra.push((i, a + (b - a) * j as f64 / cfg.refine as f64));
            }
        }
    }
    let extra_spectra = sw.spectra(&extra.iter().map(|e| e.1).collect::<Vec<_>>())?;
    let mut grid = Vec::with_capacity(coarse.len() + extra.len());
    let mut spectra = Vec::with_capacity(grid.capacity());
    let mut it = extra.into_iter().zip(extra_spectra).peekable();
    for (i, (v2, s)) in coarse.into_iter().zip(coarse_spectra).enumerate() {
        while let Some(((_, x), es)) = it.next_if(|((k, _), _)| *k == i) {
            grid.push(x);
            spectra.push(es);
        }
        grid.push(v2);
        spectra.push(s);
    }

    repair_double_roots(&sw, &mut grid, &mut spectra, &mut diagnostics)?;

    let match_gap = cfg.match_gap.unwrap_or_else(|| default_match_gap(&spectra[0], spec.v1));
    let mut branches = link(&grid, &spectra, match_gap);
    resolve_crossings(&sw, &grid, &mut branches, &mut diagnostics)?;
    let (terminations, exits) = classify_ends(&grid, &branches, &mut diagnostics);

    for (i, w) in spectra.windows(2).enumerate() {
        if w[1].len() > w[0].len() {
            diagnostics.push(format!(
                "level count rose from {} to {} between v2 = {} and {}",
                w[0].len(),
                w[1].len(),
                grid[i],
                grid[i + 1]
            ));
        }
    }

    Ok(SpectralCurves {
        spec: *spec,
        method: cfg.method,
        v2_grid: grid,
        branches,
        terminations,
        exits,
        match_gap,
        diagnostics,
    })
}

fn default_match_gap(levels: &[f64], v1: f64) -> f64 {
    if levels.len() < 2 {
        return 0.1 * v1;
    }
    let mean = (levels[levels.len() - 1] - levels[0]) / (levels.len() - 1) as f64;
    3.0 * mean
}

/// A grid value that lands on an exact level coincidence shows two roots
/// fewer than both neighbours; it is re-evaluated slightly off the grid.
fn repair_double_roots(
    sw: &Sweeper<'_>,
    grid: &mut [f64],
    spectra: &mut [Vec<f64>],
    diagnostics: &mut Vec<String>,
) -> Result<()> {
    for i in 1..grid.len().saturating_sub(1) {
        let (l, c, r) = (spectra[i - 1].len(), spectra[i].len(), spectra[i + 1].len());
        if c + 2 == l && l == r {
            let shifted = grid[i] + 1e-3 * (grid[i + 1] - grid[i]);
            let s = sw.spectrum(shifted)?;
            if s.len() == l {
                diagnostics.push(format!("v2 = {} moved to {shifted} off a double root", grid[i]));
                grid[i] = shifted;
                spectra[i] = s;
            }
        }
    }
    Ok(())
}

/// Order-preserving alignment of `prev` predictions with `next` roots.
/// Returns, for each previous branch, the index of its continuation.
fn align(prev_last: &[f64], pred: &[f64], next: &[f64], gap: f64) -> Vec<Option<usize>> {
    let (m, n) = (pred.len(), next.len());
    let skip = gap * gap;
    let mut dp = vec![f64::INFINITY; (m + 1) * (n + 1)];
    let at = |i: usize, j: usize| i * (n + 1) + j;
    dp[0] = 0.0;
    for i in 0..=m {
        for j in 0..=n {
            let here = dp[at(i, j)];
            if !here.is_finite() {
                continue;
            }
            if i < m && j < n && (prev_last[i] - next[j]).abs() <= gap {
                let d = pred[i] - next[j];
                let c = here + d * d;
                if c < dp[at(i + 1, j + 1)] {
                    dp[at(i + 1, j + 1)] = c;
                }
            }
            if i < m && here + skip < dp[at(i + 1, j)] {
                dp[at(i + 1, j)] = here + skip;
            }
            if j < n && here + skip < dp[at(i, j + 1)] {
                dp[at(i, j + 1)] = here + skip;
            }
        }
    }
    let mut out = vec![None; m];
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        let here = dp[at(i, j)];
        if i > 0 && j > 0 && (prev_last[i - 1] - next[j - 1]).abs() <= gap {
            let d = pred[i - 1] - next[j - 1];
            if dp[at(i - 1, j - 1)] + d * d == here {
                out[i - 1] = Some(j - 1);
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dp[at(i - 1, j)] + skip == here {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    out
}

fn link(grid: &[f64], spectra: &[Vec<f64>], gap: f64) -> Vec<Branch> {
    let mut branches: Vec<Branch> = spectra[0]
        .iter()
        .enumerate()
        .map(|(label, &e)| Branch {
            label,
            points: vec![(grid[0], e)],
        })
        .collect();
    // labels of the branches alive at the previous grid value, in energy order
    let mut alive: Vec<usize> = (0..branches.len()).collect();

    for k in 1..grid.len() {
        let v2 = grid[k];
        let next = &spectra[k];
        let last: Vec<f64> = alive.iter().map(|&l| branches[l].last().1).collect();
        let pred: Vec<f64> = alive
            .iter()
            .map(|&l| {
                let p = &branches[l].points;
                let (x1, e1) = p[p.len() - 1];
                if p.len() < 2 {
                    return e1;
                }
                let (x0, e0) = p[p.len() - 2];
                let step = (e1 - e0) / (x1 - x0) * (v2 - x1);
                if step.abs() < 0.5 * gap {
                    e1 + step
                } else {
                    e1
                }
            })
            .collect();
        let map = align(&last, &pred, next, gap);

        let mut owner: Vec<Option<usize>> = vec![None; next.len()];
        for (slot, target) in map.iter().enumerate() {
            if let Some(j) = target {
                owner[*j] = Some(alive[slot]);
            }
        }
        let mut now = Vec::with_capacity(next.len());
        for (j, &e) in next.iter().enumerate() {
            let label = match owner[j] {
                Some(l) => l,
                None => {
                    branches.push(Branch {
                        label: branches.len(),
                        points: Vec::new(),
                    });
                    branches.len() - 1
                }
            };
            branches[label].points.push((v2, e));
            now.push(label);
        }
        alive = now;
    }
    branches
}

/// Gap between adjacent branches `p < q` at grid index `k`.
fn pair_gap(branches: &[Branch], p: usize, q: usize, v2: f64) -> Option<f64> {
    Some(branches[q].energy_at(v2)? - branches[p].energy_at(v2)?)
}

fn alive_sorted(branches: &[Branch], v2: f64) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = branches
        .iter()
        .filter_map(|b| b.energy_at(v2).map(|e| (b.label, e)))
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out
}

/// Largest minimum gap, relative to `max(1, |E|)`, always taken as a crossing.
const CROSSING_GAP_TOL: f64 = 1e-6;

/// Largest ratio of the minimum gap to the gap at the neighbouring grid
/// values still taken as a crossing. At a true crossing the two roots form a
/// double root, which root finding resolves only to the square root of the
/// noise in the matching function.
const CROSSING_GAP_RATIO: f64 = 1e-3;

fn resolve_crossings(
    sw: &Sweeper<'_>,
    grid: &[f64],
    branches: &mut [Branch],
    diagnostics: &mut Vec<String>,
) -> Result<()> {
    for k in 1..grid.len().saturating_sub(1) {
        let order = alive_sorted(branches, grid[k]);
        for w in order.windows(2) {
            let (p, q) = (w[0].0, w[1].0);
            let Some(candidate) = crossing_candidate(branches, grid, k, p, q) else {
                continue;
            };
            let (lo, hi) = candidate;
            let (v2m, gap, e) = minimise_gap(sw, branches, grid, k, p, lo, hi)?;
            let side = pair_gap(branches, p, q, lo)
                .zip(pair_gap(branches, p, q, hi))
                .map_or(0.0, |(a, b)| a.min(b));
            if gap <= (CROSSING_GAP_TOL * e.abs().max(1.0)).max(CROSSING_GAP_RATIO * side) {
                swap_tails(branches, p, q, v2m);
            } else {
                diagnostics.push(format!(
                    "branches {p} and {q} approach to {gap:.3e} near v2 = {v2m} without crossing"
                ));
            }
        }
    }
    Ok(())
}

/// `[v2_{k-1}, v2_{k+1}]` when the gap of the adjacent pair `(p, q)` has a
/// V-shaped minimum at grid index `k`: both side lines, extrapolated from
/// the outer points, reach zero inside the bracket.
fn crossing_candidate(branches: &[Branch], grid: &[f64], k: usize, p: usize, q: usize) -> Option<(f64, f64)> {
    let g = |i: usize| pair_gap(branches, p, q, grid[i]);
    let (gl, gc, gr) = (g(k - 1)?, g(k)?, g(k + 1)?);
    if !(gc < gl && gc <= gr) {
        return None;
    }
    let (lo, hi) = (grid[k - 1], grid[k + 1]);
    // outer lines: through (k-2, k-1) and (k+1, k+2) when available
    let left = match k.checked_sub(2).and_then(|i| Some((grid[i], g(i)?))) {
        Some((x, gx)) => (x, gx, grid[k - 1], gl),
        None => (grid[k - 1], gl, grid[k], gc),
    };
    let right = match (k + 2 < grid.len()).then(|| g(k + 2)).flatten() {
        Some(gx) => (grid[k + 1], gr, grid[k + 2], gx),
        None => (grid[k], gc, grid[k + 1], gr),
    };
    let zero = |(x0, g0, x1, g1): (f64, f64, f64, f64)| {
        let slope = (g1 - g0) / (x1 - x0);
        (slope, x1 - g1 / slope)
    };
    let (sl, zl) = zero(left);
    let (sr, zr) = zero(right);
    let slack = 0.5 * (hi - lo);
    let inside = |z: f64| z >= lo - slack && z <= hi + slack;
    (sl < 0.0 && sr > 0.0 && inside(zl) && inside(zr)).then_some((lo, hi))
}

/// Golden-section minimum over `[lo, hi]` of the gap between the two roots
/// of the pair, solved in an energy window that excludes the other branches.
/// Returns `(v2, gap, energy)`.
#[allow(clippy::too_many_arguments)]
fn minimise_gap(
    sw: &Sweeper<'_>,
    branches: &[Branch],
    grid: &[f64],
    k: usize,
    p: usize,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64, f64)> {
    let idx = [k - 1, k, k + 1];
    let mut e_lo = f64::INFINITY;
    let mut e_hi = f64::NEG_INFINITY;
    let mut margin = f64::INFINITY;
    for &i in &idx {
        let order = alive_sorted(branches, grid[i]);
        let pos = order.iter().position(|o| o.0 == p).expect("pair alive");
        let (ep, eq) = (order[pos].1, order[pos + 1].1);
        e_lo = e_lo.min(ep);
        e_hi = e_hi.max(eq);
        if pos > 0 {
            margin = margin.min(ep - order[pos - 1].1);
        }
        if let Some(next) = order.get(pos + 2) {
            margin = margin.min(next.1 - eq);
        }
        margin = margin.min((eq - ep).max(1e-6) * 4.0 + 1e-3);
    }
    let (w_lo, w_hi) = (e_lo - 0.5 * margin, e_hi + 0.5 * margin);

    let gap = |v2: f64| -> Result<(f64, f64)> {
        let roots = sw.roots_in(v2, w_lo, w_hi)?;
        if roots.len() < 2 {
            let e = roots.first().copied().unwrap_or(0.5 * (w_lo + w_hi));
            return Ok((0.0, e));
        }
        Ok(roots
            .windows(2)
            .map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1])))
            .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a }))
    };

    const R: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - R * (b - a);
    let mut x2 = a + R * (b - a);
    let (mut f1, mut f2) = (gap(x1)?, gap(x2)?);
    let tol = 1e-10 * lo.abs().max(hi.abs()).max(1.0);
    while b - a > tol && f1.0.min(f2.0) > 0.0 {
        if f1.0 < f2.0 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - R * (b - a);
            f1 = gap(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + R * (b - a);
            f2 = gap(x2)?;
        }
    }
    Ok(if f1.0 <= f2.0 { (x1, f1.0, f1.1) } else { (x2, f2.0, f2.1) })
}

fn swap_tails(branches: &mut [Branch], p: usize, q: usize, v2: f64) {
    let split = |b: &Branch| b.points.partition_point(|pt| pt.0 <= v2);
    let sp = split(&branches[p]);
    let sq = split(&branches[q]);
    let tail_p = branches[p].points.split_off(sp);
    let tail_q = branches[q].points.split_off(sq);
    branches[p].points.extend(tail_q);
    branches[q].points.extend(tail_p);
}

fn classify_ends(
    grid: &[f64],
    branches: &[Branch],
    diagnostics: &mut Vec<String>,
) -> (Vec<Termination>, Vec<ThresholdExit>) {
    let mut terminations = Vec::new();
    let mut exits = Vec::new();
    let end = *grid.last().expect("non-empty grid");
    for k in 0..grid.len() - 1 {
        let (v2, next) = (grid[k], grid[k + 1]);
        let order = alive_sorted(branches, v2);
        let ending: Vec<bool> = order
            .iter()
            .map(|(l, _)| branches[*l].last().0 == v2 && v2 < end)
            .collect();
        let mut i = 0;
        while i < order.len() {
            if !ending[i] {
                i += 1;
                continue;
            }
            let mut j = i;
            while j < order.len() && ending[j] {
                j += 1;
            }
            // run of adjacent ending branches [i, j): pair from the bottom
            let mut r = i;
            while r + 1 < j {
                terminations.push(Termination {
                    labels: (order[r].0, order[r + 1].0),
                    interval: (v2, next),
                });
                r += 2;
            }
            if r < j {
                let (label, energy) = order[r];
                if r + 1 == order.len() {
                    exits.push(ThresholdExit {
                        label,
                        interval: (v2, next),
                        energy,
                    });
                } else {
                    diagnostics.push(format!(
                        "branch {label} ends alone at E = {energy} between v2 = {v2} and {next}"
                    ));
                }
            }
            i = j;
        }
    }
    (terminations, exits)
}

/// Exceptional points bracketed from the pair terminations of `curves`.
pub fn locate_eps(spec: &PotentialSpec, curves: &SpectralCurves, cfg: &SweepConfig) -> Result<Vec<ExceptionalPoint>> {
    cfg.validate(spec)?;
    let sw = Sweeper { spec: *spec, cfg };
    let mut out = Vec::with_capacity(curves.terminations.len());
    for t in &curves.terminations {
        let (p, q) = t.labels;
        let (lo, hi) = t.interval;
        let ep = curves.branches[p].energy_at(lo).expect("alive at termination");
        let eq = curves.branches[q].energy_at(lo).expect("alive at termination");
        let order = alive_sorted(&curves.branches, lo);
        let pos = order.iter().position(|o| o.0 == p).expect("alive at termination");
        let gap = eq - ep;
        let mut margin = gap.max(1e-6);
        if pos > 0 {
            margin = margin.min(0.5 * (ep - order[pos - 1].1));
        }
        if let Some(n) = order.get(pos + 2) {
            margin = margin.min(0.5 * (n.1 - eq));
        }
        let window = (ep - margin, eq + margin);
        out.push(bisect_ep(&sw, window, (p, q), (lo, hi), (ep, eq))?);
    }
    out.sort_by(|a, b| a.v2c.total_cmp(&b.v2c));
    Ok(out)
}

fn bisect_ep(
    sw: &Sweeper<'_>,
    window: (f64, f64),
    pair: (usize, usize),
    interval: (f64, f64),
    energies: (f64, f64),
) -> Result<ExceptionalPoint> {
    let roots = |v2: f64| sw.roots_in(v2, window.0, window.1);
    let pair_mid = |r: &[f64]| {
        r.windows(2)
            .map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1])))
            .fold((f64::INFINITY, f64::NAN), |a, b| if b.0 < a.0 { b } else { a })
            .1
    };
    let (mut lo, mut hi) = interval;
    let mut last = roots(lo)?;
    let n_lo = last.len();
    let n_hi = roots(hi)?.len();
    let mut ambiguous = n_lo != n_hi + 2;
    if !ambiguous {
        while hi - lo > sw.cfg.ep_tol_v2 {
            let mid = 0.5 * (lo + hi);
            let r = roots(mid)?;
            if r.len() == n_lo {
                lo = mid;
                last = r;
            } else if r.len() == n_hi {
                hi = mid;
            } else {
                ambiguous = true;
                break;
            }
        }
    }
    let e_c = if ambiguous || last.len() < 2 {
        0.5 * (energies.0 + energies.1)
    } else {
        pair_mid(&last)
    };
    let bracket = if ambiguous { interval } else { (lo, hi) };
    Ok(ExceptionalPoint {
        v2c: 0.5 * (bracket.0 + bracket.1),
        e_c,
        branch_pair: pair,
        method: sw.cfg.method,
        bracket,
        ambiguous,
    })
}

/// Sign changes of `E_i - E_j` for every pair of branches on their common grid.
pub fn detect_crossings(curves: &SpectralCurves) -> Vec<CrossingEvent> {
    let mut out = Vec::new();
    for (i, bi) in curves.branches.iter().enumerate() {
        for bj in &curves.branches[i + 1..] {
            let common: Vec<(f64, f64, f64)> = bi
                .points
                .iter()
                .filter_map(|&(v2, ei)| bj.energy_at(v2).map(|ej| (v2, ei, ej)))
                .collect();
            let d: Vec<f64> = common.iter().map(|c| c.1 - c.2).collect();
            for k in 0..common.len().saturating_sub(1) {
                let (x0, a0, _) = common[k];
                let (x1, a1, b1) = common[k + 1];
                if d[k] != 0.0 && d[k + 1] != 0.0 && d[k].signum() != d[k + 1].signum() {
                    let t = d[k] / (d[k] - d[k + 1]);
                    out.push(CrossingEvent {
                        v2_star: x0 + t * (x1 - x0),
                        e_star: a0 + t * (a1 - a0),
                        branch_pair: (bi.label, bj.label),
                    });
                } else if d[k + 1] == 0.0 && k + 2 < common.len() {
                    // tie on the grid: a crossing only if the neighbours disagree
                    let after = d[k + 2];
                    if d[k] != 0.0 && after != 0.0 && d[k].signum() != after.signum() {
                        out.push(CrossingEvent {
                            v2_star: x1,
                            e_star: 0.5 * (a1 + b1),
                            branch_pair: (bi.label, bj.label),
                        });
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.v2_star.total_cmp(&b.v2_star));
    out
}
