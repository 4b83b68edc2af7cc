//! Singularity-line dynamics: numerical tracing of the zero sets of the
//! branch determinants, closed-form two-wave lines, the parameter ODE system
//! with its N = 2 closed form, seed points, and the Hamiltonian structure
//! check in action-angle variables.

use crate::determinants::{
    delta_branch_dt_single_row, delta_branch_partials, delta_branch_with_scale, Branch,
};
use crate::error::{Error, Result};
use crate::solutions::residue_at;
use crate::spectral::{c_constants, EquationKind, SpectralData};
use crate::tol;
use num_complex::Complex64 as C;

/// An ordered singularity trajectory with branch identity and residue type.
#[derive(Clone, Debug)]
pub struct SingularityLine {
    /// (t, x) samples, t strictly increasing.
    pub samples: Vec<(f64, f64)>,
    pub branch: Branch,
    pub residue_type: i8,
    /// Optional (t, p) parameter trace attached by the parametrization route.
    pub p_trace: Option<Vec<(f64, f64)>>,
}

impl SingularityLine {
    /// Linear interpolation of x at time t, if t lies inside the sample span.
    pub fn x_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        if s.len() < 2 || t < s[0].0 || t > s[s.len() - 1].0 {
            return None;
        }
        let idx = s.partition_point(|&(st, _)| st <= t).min(s.len() - 1).max(1);
        let (t0, x0) = s[idx - 1];
        let (t1, x1) = s[idx];
        if t1 == t0 {
            return Some(x0);
        }
        Some(x0 + (x1 - x0) * (t - t0) / (t1 - t0))
    }

    pub fn t_span(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum EventKind {
    Intersection,
    Generation,
    Annihilation,
}

#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub t: f64,
    pub x: f64,
}

/// Grid parameters for the tracer.
#[derive(Clone, Copy, Debug)]
pub struct TraceGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub slices: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub cells: usize,
}

impl TraceGrid {
    pub fn new(t_range: (f64, f64), slices: usize, x_range: (f64, f64), cells: usize) -> Self {
        TraceGrid {
            t_min: t_range.0,
            t_max: t_range.1,
            slices,
            x_min: x_range.0,
            x_max: x_range.1,
            cells,
        }
    }
}

/// Removes the constant phase of a slice of determinant values (for
/// conjugation-symmetric data the phase is global) and returns real values
/// suitable for sign-change bracketing.
fn realify(values: &[C]) -> Result<(Vec<f64>, C)> {
    let (imax, vmax) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .ok_or_else(|| Error::Domain("empty slice".into()))?;
    let _ = imax;
    if vmax.norm() == 0.0 {
        return Ok((vec![0.0; values.len()], C::new(1.0, 0.0)));
    }
    let phase = vmax / vmax.norm();
    let mut out = Vec::with_capacity(values.len());
    let mut worst = 0.0f64;
    for v in values {
        let r = v / phase;
        worst = worst.max(r.im.abs());
        out.push(r.re);
    }
    if worst > 1e-6 * vmax.norm() {
        return Err(Error::Domain(format!(
            "branch determinant is not realifiable (residual imag {worst:.2e}); \
             data is not conjugation-symmetric"
        )));
    }
    Ok((out, phase))
}

fn branch_value_realified(sd: &SpectralData, x: f64, t: f64, branch: Branch, phase: C) -> f64 {
    let (v, _) = delta_branch_with_scale(sd, x, t, branch);
    (v / phase).re
}

/// Bisects a sign change of the realified branch determinant to x-precision.
fn bisect_root(
    sd: &SpectralData,
    branch: Branch,
    phase: C,
    t: f64,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
) -> f64 {
    let mut _fb = 0.0;
    while b - a > tol::LINE_LOC {
        let m = 0.5 * (a + b);
        let fm = branch_value_realified(sd, m, t, branch, phase);
        if (fm >= 0.0) == (fa >= 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            _fb = fm;
        }
    }
    0.5 * (a + b)
}

/// All roots of the branch determinant on one t-slice: coarse bracketing over
/// the grid with 8x refinement windows around the predicted positions.
fn slice_roots(
    sd: &SpectralData,
    branch: Branch,
    t: f64,
    grid: &TraceGrid,
    predictions: &[f64],
) -> Result<Vec<f64>> {
    let n = grid.cells;
    let dx = (grid.x_max - grid.x_min) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| grid.x_min + dx * i as f64).collect();
    let values: Vec<C> = xs
        .iter()
        .map(|&x| delta_branch_with_scale(sd, x, t, branch).0)
        .collect();
    let (reals, phase) = realify(&values)?;
    let mut roots = Vec::new();
    for i in 0..n {
        if reals[i] == 0.0 {
            roots.push(xs[i]);
        } else if (reals[i] > 0.0) != (reals[i + 1] > 0.0) {
            roots.push(bisect_root(sd, branch, phase, t, xs[i], reals[i], xs[i + 1]));
        }
    }
    // Refine around predictions that found no root: tangencies and close
    // pairs can hide between grid nodes.
    for &p in predictions {
        if p < grid.x_min || p > grid.x_max {
            continue;
        }
        if roots.iter().any(|r| (r - p).abs() < 2.0 * dx) {
            continue;
        }
        let lo = (p - 2.0 * dx).max(grid.x_min);
        let hi = (p + 2.0 * dx).min(grid.x_max);
        let fine = 32;
        let fdx = (hi - lo) / fine as f64;
        let mut prev_x = lo;
        let mut prev_f = branch_value_realified(sd, lo, t, branch, phase);
        for i in 1..=fine {
            let x = lo + fdx * i as f64;
            let f = branch_value_realified(sd, x, t, branch, phase);
            if (prev_f > 0.0) != (f > 0.0) {
                roots.push(bisect_root(sd, branch, phase, t, prev_x, prev_f, x));
            }
            prev_x = x;
            prev_f = f;
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 10.0 * tol::LINE_LOC);
    Ok(roots)
}

struct OpenLine {
    samples: Vec<(f64, f64)>,
    velocity: f64,
}

/// Traces all singularity lines of both branch determinants over the grid.
/// Root-count changes away from the x-boundaries are recorded as generation
/// or annihilation events; intersections between lines of different branches
/// are located afterwards.
pub fn trace_lines(
    sd: &SpectralData,
    grid: &TraceGrid,
) -> Result<(Vec<SingularityLine>, Vec<TraceEvent>)> {
    let mut lines: Vec<SingularityLine> = Vec::new();
    let mut events: Vec<TraceEvent> = Vec::new();
    let dt = (grid.t_max - grid.t_min) / grid.slices as f64;
    let dx_cell = (grid.x_max - grid.x_min) / grid.cells as f64;
    let boundary_margin = 3.0 * dx_cell;
    // Natural velocity scale of the data: the free-line speeds.
    let v_typical = sd
        .omega
        .iter()
        .map(|&w| (sd.theta(w).re / w.re).abs())
        .fold(1.0, f64::max);
    for branch in [Branch::Delta1, Branch::Delta2] {
        let mut open: Vec<OpenLine> = Vec::new();
        for s in 0..=grid.slices {
            let t = grid.t_min + dt * s as f64;
            let predictions: Vec<f64> = open
                .iter()
                .map(|l| l.samples.last().unwrap().1 + l.velocity * dt)
                .collect();
            let roots = slice_roots(sd, branch, t, grid, &predictions)?;
            // Greedy nearest-prediction matching with a velocity-scaled gate.
            let mut claimed = vec![false; roots.len()];
            let mut matched: Vec<Option<usize>> = vec![None; open.len()];
            let mut order: Vec<usize> = (0..open.len()).collect();
            order.sort_by(|&a, &b| {
                open[a].velocity.abs().partial_cmp(&open[b].velocity.abs()).unwrap()
            });
            for li in order {
                let pred = open[li].samples.last().unwrap().1 + open[li].velocity * dt;
                let bootstrap = open[li].samples.len() < 2;
                let vmax = if bootstrap {
                    v_typical
                } else {
                    open[li].velocity.abs().max(v_typical)
                };
                let gate = 3.0 * vmax * dt + 3.0 * dx_cell;
                let mut best: Option<(usize, f64)> = None;
                for (ri, &r) in roots.iter().enumerate() {
                    if claimed[ri] {
                        continue;
                    }
                    let d = (r - pred).abs();
                    if d <= gate && best.map_or(true, |(_, bd)| d < bd) {
                        best = Some((ri, d));
                    }
                }
                if let Some((ri, _)) = best {
                    claimed[ri] = true;
                    matched[li] = Some(ri);
                }
            }
            // Close unmatched lines; interior closures are annihilations.
            let mut still_open = Vec::new();
            for (li, line) in open.into_iter().enumerate() {
                match matched[li] {
                    Some(ri) => {
                        let mut line = line;
                        let (pt, px) = *line.samples.last().unwrap();
                        let x = roots[ri];
                        line.velocity = if t > pt { (x - px) / (t - pt) } else { line.velocity };
                        line.samples.push((t, x));
                        still_open.push(line);
                    }
                    None => {
                        let (lt, lx) = *line.samples.last().unwrap();
                        // A root can exit through the x-boundary between two
                        // slices; allow for one extrapolated step when
                        // deciding interior vs truncated.
                        let exit_margin = boundary_margin + 2.0 * line.velocity.abs() * dt;
                        let interior = lx - grid.x_min > exit_margin
                            && grid.x_max - lx > exit_margin
                            && s < grid.slices;
                        if interior && line.samples.len() >= 2 {
                            events.push(TraceEvent {
                                kind: EventKind::Annihilation,
                                t: lt + 0.5 * dt,
                                x: lx,
                            });
                        }
                        finalize_line(sd, branch, line, &mut lines);
                    }
                }
            }
            open = still_open;
            // New roots open new lines; interior openings are generations.
            for (ri, &r) in roots.iter().enumerate() {
                if claimed[ri] {
                    continue;
                }
                let interior = r - grid.x_min > boundary_margin && grid.x_max - r > boundary_margin;
                if s > 0 && interior {
                    events.push(TraceEvent { kind: EventKind::Generation, t: t - 0.5 * dt, x: r });
                }
                open.push(OpenLine { samples: vec![(t, r)], velocity: 0.0 });
            }
        }
        for line in open {
            finalize_line(sd, branch, line, &mut lines);
        }
    }
    events.extend(detect_events(&lines));
    events.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    Ok((lines, events))
}

/// Intersection events between traced lines: pairs on different branches
/// (hence of opposite residue type) crossing in x at a common time.
/// Generation/annihilation events come from the tracer's slice bookkeeping.
pub fn detect_events(lines: &[SingularityLine]) -> Vec<TraceEvent> {
    let mut events = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if lines[i].branch == lines[j].branch {
                continue;
            }
            events.extend(find_intersections(&lines[i], &lines[j]));
        }
    }
    events
}

fn finalize_line(sd: &SpectralData, branch: Branch, line: OpenLine, out: &mut Vec<SingularityLine>) {
    if line.samples.len() < 3 {
        return;
    }
    // Classify the residue type at the healthiest interior sample.
    let mut residue_type = match branch {
        Branch::Delta1 => 1,
        Branch::Delta2 => -1,
    };
    let mid = line.samples.len() / 2;
    for probe in [mid, mid / 2, (mid + line.samples.len() - 1) / 2] {
        let (t, x) = line.samples[probe];
        if let Ok((_, ty)) = residue_at(sd, x, t, branch) {
            residue_type = ty;
            break;
        }
    }
    out.push(SingularityLine {
        samples: line.samples,
        branch,
        residue_type,
        p_trace: None,
    });
}

fn find_intersections(a: &SingularityLine, b: &SingularityLine) -> Vec<TraceEvent> {
    let mut events = Vec::new();
    let (a0, a1) = a.t_span();
    let (b0, b1) = b.t_span();
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if lo >= hi {
        return events;
    }
    let mut prev: Option<(f64, f64)> = None;
    for &(t, xa) in a.samples.iter().filter(|&&(t, _)| t >= lo && t <= hi) {
        if let Some(xb) = b.x_at(t) {
            let diff = xa - xb;
            if let Some((pt, pdiff)) = prev {
                if (pdiff > 0.0) != (diff > 0.0) {
                    let frac = pdiff.abs() / (pdiff.abs() + diff.abs()).max(1e-300);
                    let tc = pt + (t - pt) * frac;
                    let xc = a.x_at(tc).unwrap_or(xa);
                    events.push(TraceEvent { kind: EventKind::Intersection, t: tc, x: xc });
                }
            }
            prev = Some((t, diff));
        }
    }
    events
}

/// dx/dt on a singularity line from the implicit-function theorem with
/// analytic determinant partials. `None` marks a vertical tangent
/// (collision instant).
pub fn line_velocity(sd: &SpectralData, x: f64, t: f64, branch: Branch) -> Option<f64> {
    let (value, dx, dt) = delta_branch_partials(sd, x, t, branch);
    let _ = value;
    let scale = dt.norm().max(1.0);
    if dx.norm() <= 1e-9 * scale {
        return None;
    }
    Some(-(dt / dx).re)
}

/// Action variable p_i = Re Theta(omega_i) / Re omega_i.
pub fn action_variable(sd: &SpectralData, i: usize) -> f64 {
    let w = sd.omega[i];
    sd.theta(w).re / w.re
}

/// max_i |dx/dt - {x, H}| at a point on a line, with the Poisson bracket
/// evaluated through the action-angle partials dx/dq_i = (d delta/d q_i)/(d delta/d x)
/// and d delta/d q_i = -(single-row t-partial)/p_i.
pub fn hamiltonian_residual(sd: &SpectralData, x: f64, t: f64, branch: Branch) -> Result<f64> {
    let (_, ddx, ddt) = delta_branch_partials(sd, x, t, branch);
    if ddx.norm() < 1e-12 * ddt.norm().max(1.0) {
        return Err(Error::Domain("vertical tangent; velocity undefined".into()));
    }
    let velocity = -(ddt / ddx).re;
    let mut bracket = C::new(0.0, 0.0);
    for i in 0..sd.n() {
        let p_i = action_variable(sd, i);
        if p_i == 0.0 {
            return Err(Error::Domain("vanishing action variable".into()));
        }
        let row_dt = delta_branch_dt_single_row(sd, x, t, branch, i);
        let ddelta_dq = -row_dt / p_i;
        bracket += ddelta_dq / ddx * p_i;
    }
    Ok((velocity - bracket.re).abs())
}

/// Case selector for the two-wave closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoWaveCase {
    /// C1 C2 > 0: lines intersect once (attracting particles).
    Attract,
    /// C1 C2 < 0: lines avoid each other (repulsing particles).
    Repulse,
    /// omega_2 = conj(omega_1): oscillating bound state.
    Bound,
}

/// A closed-form line given as a parametric sample list (t need not be
/// monotone near folds).
#[derive(Clone, Debug)]
pub struct ClosedFormLine {
    pub samples: Vec<(f64, f64)>,
}

fn solve_2x2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<(f64, f64)> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < 1e-14 {
        return None;
    }
    Some((
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ))
}

/// Determines the applicable two-wave case from the spectral data.
pub fn two_wave_case(sd: &SpectralData) -> Result<TwoWaveCase> {
    if sd.n() != 2 {
        return Err(Error::Domain("two-wave closed forms require N = 2".into()));
    }
    if sd.omega[0].im != 0.0 || sd.omega[1].im != 0.0 {
        if (sd.omega[1] - sd.omega[0].conj()).norm() < 1e-12 {
            return Ok(TwoWaveCase::Bound);
        }
        return Err(Error::Domain("complex omegas must be a conjugate pair".into()));
    }
    let (signed, _) = c_constants(sd);
    let prod = (signed[0] * signed[1]).re;
    if prod > 0.0 {
        Ok(TwoWaveCase::Attract)
    } else {
        Ok(TwoWaveCase::Repulse)
    }
}

/// Closed-form N = 2 singularity lines, evaluated over a parameter grid and
/// mapped back to the (x, t) plane.
pub fn closed_form_lines_n2(
    sd: &SpectralData,
    case: TwoWaveCase,
    t_range: (f64, f64),
    samples: usize,
) -> Result<Vec<ClosedFormLine>> {
    if two_wave_case(sd)? != case {
        return Err(Error::Domain(format!(
            "parameter set implies case {:?}, not {case:?}",
            two_wave_case(sd)?
        )));
    }
    let (signed, _) = c_constants(sd);
    match case {
        TwoWaveCase::Attract | TwoWaveCase::Repulse => {
            let w1 = sd.omega[0].re;
            let w2 = sd.omega[1].re;
            let (w1, w2, c1, c2) = if w1 < w2 {
                (w1, w2, signed[0], signed[1])
            } else {
                (w2, w1, signed[1], signed[0])
            };
            let th1 = sd.theta(C::new(w1, 0.0)).re;
            let th2 = sd.theta(C::new(w2, 0.0)).re;
            let cfac = (w1 + w2) / (w2 - w1);
            let bx = 0.5 * (c1 * c2).norm().ln();
            let by = 0.5 * (c2 / c1).norm().ln();
            // X = (w1+w2) x + (th1+th2) t - bx; Y = (w2-w1) x + (th2-th1) t - by.
            let a = [[w1 + w2, th1 + th2], [w2 - w1, th2 - th1]];
            let mut out = Vec::new();
            for sign in [1.0, -1.0] {
                let mut line = Vec::new();
                // Y range wide enough to cover the requested t span.
                let yspan = {
                    let tmax = t_range.0.abs().max(t_range.1.abs());
                    (w2 - w1 + (th2 - th1).abs()) * (tmax + 40.0)
                };
                let m = samples.max(8);
                for i in 0..=m {
                    let y = -yspan + 2.0 * yspan * (i as f64) / (m as f64);
                    let x_of_y = match case {
                        TwoWaveCase::Attract => sign * (cfac * y.sinh()).asinh(),
                        TwoWaveCase::Repulse => {
                            let arg = cfac * y.cosh();
                            if arg < 1.0 {
                                continue;
                            }
                            sign * (arg + (arg * arg - 1.0).sqrt()).ln()
                        }
                        TwoWaveCase::Bound => unreachable!(),
                    };
                    if let Some((x, t)) = solve_2x2(a, [x_of_y + bx, y + by]) {
                        if t >= t_range.0 && t <= t_range.1 {
                            line.push((t, x));
                        }
                    }
                }
                line.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
                if !line.is_empty() {
                    out.push(ClosedFormLine { samples: line });
                }
            }
            Ok(out)
        }
        TwoWaveCase::Bound => {
            let w = if sd.omega[0].im > 0.0 { sd.omega[0] } else { sd.omega[1] };
            let cw = if sd.omega[0].im > 0.0 { signed[0] } else { signed[1] };
            let theta = sd.theta(w);
            let lnc = cw.ln();
            let ratio = w.re / w.im;
            // X + iY = 2 w x + 2 Theta(w) t - Ln C.
            let a = [[2.0 * w.re, 2.0 * theta.re], [2.0 * w.im, 2.0 * theta.im]];
            let mut out = Vec::new();
            for sign in [1.0, -1.0] {
                let mut line = Vec::new();
                let yspan = {
                    // t moves roughly linearly in Y; cover the span generously.
                    let tmax = t_range.0.abs().max(t_range.1.abs());
                    (2.0 * w.im.abs() + 2.0 * theta.im.abs()) * (tmax + 10.0)
                        / theta.im.abs().max(1e-6)
                };
                let m = samples.max(8);
                for i in 0..=m {
                    let y = -yspan + 2.0 * yspan * (i as f64) / (m as f64);
                    let x_of_y = sign * (ratio * y.sin()).asinh();
                    if let Some((x, t)) = solve_2x2(a, [x_of_y + lnc.re, y + lnc.im]) {
                        if t >= t_range.0 && t <= t_range.1 {
                            line.push((t, x));
                        }
                    }
                }
                if !line.is_empty() {
                    out.push(ClosedFormLine { samples: line });
                }
            }
            Ok(out)
        }
    }
}

/// Signed residual of the closed-form relation at a point (x, t): zero iff
/// the point lies on one of the closed-form lines. Used to measure traced
/// samples against the closed form without interpolation error.
pub fn closed_form_x_at(
    sd: &SpectralData,
    case: TwoWaveCase,
    t: f64,
    x_near: f64,
) -> Result<Option<f64>> {
    let (signed, _) = c_constants(sd);
    let g: Box<dyn Fn(f64) -> f64> = match case {
        TwoWaveCase::Attract | TwoWaveCase::Repulse => {
            let w1 = sd.omega[0].re.min(sd.omega[1].re);
            let w2 = sd.omega[0].re.max(sd.omega[1].re);
            let (c1, c2) = if sd.omega[0].re < sd.omega[1].re {
                (signed[0], signed[1])
            } else {
                (signed[1], signed[0])
            };
            let th1 = sd.theta(C::new(w1, 0.0)).re;
            let th2 = sd.theta(C::new(w2, 0.0)).re;
            let cfac = (w1 + w2) / (w2 - w1);
            let bx = 0.5 * (c1 * c2).norm().ln();
            let by = 0.5 * (c2 / c1).norm().ln();
            let attract = case == TwoWaveCase::Attract;
            Box::new(move |x: f64| {
                let xx = (w1 + w2) * x + (th1 + th2) * t - bx;
                let yy = (w2 - w1) * x + (th2 - th1) * t - by;
                if attract {
                    xx.abs() - (cfac * yy.sinh()).asinh().abs()
                } else {
                    let arg = cfac * yy.cosh();
                    xx.abs() - (arg + (arg * arg - 1.0).sqrt()).ln()
                }
            })
        }
        TwoWaveCase::Bound => {
            let w = if sd.omega[0].im > 0.0 { sd.omega[0] } else { sd.omega[1] };
            let cw = if sd.omega[0].im > 0.0 { signed[0] } else { signed[1] };
            let theta = sd.theta(w);
            let lnc = cw.ln();
            let ratio = w.re / w.im;
            Box::new(move |x: f64| {
                let xx = 2.0 * (w.re * x + theta.re * t) - lnc.re;
                let yy = 2.0 * (w.im * x + theta.im * t) - lnc.im;
                xx.abs() - (ratio * yy.sin()).asinh().abs()
            })
        }
    };
    // Bracket the zero of g around x_near and bisect.
    let h0 = 1e-4;
    let mut a = x_near - h0;
    let mut b = x_near + h0;
    let mut fa = g(a);
    let mut fb = g(b);
    let mut grow = 0;
    while (fa > 0.0) == (fb > 0.0) {
        a -= h0 * (1 << grow) as f64;
        b += h0 * (1 << grow) as f64;
        fa = g(a);
        fb = g(b);
        grow += 1;
        if grow > 16 {
            return Ok(None);
        }
    }
    let _ = fb;
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = g(m);
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Right-hand side of the parameter ODE system
/// dp_k/dt = (-1)^N prod_{i != k} p_i^2 prod_i (omega_i^2 - p_k^2)
///           / (prod omega_i^2 prod_{i != k} (p_k^2 - p_i^2)).
pub fn param_ode_rhs(omega: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    let n = omega.len();
    if p.len() + 1 != n {
        return Err(Error::Domain(format!(
            "need N-1 = {} parameters, got {}",
            n - 1,
            p.len()
        )));
    }
    let sigma: f64 = omega.iter().map(|w| w * w).product();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let mut num = 1.0f64;
        for (i, &pi) in p.iter().enumerate() {
            if i != k {
                num *= pi * pi;
            }
        }
        for &w in omega {
            num *= w * w - p[k] * p[k];
        }
        let mut den = sigma;
        for (i, &pi) in p.iter().enumerate() {
            if i != k {
                let d = p[k] * p[k] - pi * pi;
                if d.abs() < 1e-14 * (p[k] * p[k]).max(1.0) {
                    return Err(Error::Domain(format!(
                        "p_{k}^2 collides with p_{i}^2; the ODE right side is singular"
                    )));
                }
                den *= d;
            }
        }
        out.push(sign * num / den);
    }
    Ok(out)
}

/// Interval of the real axis (split by the +-omega thresholds) containing p.
/// `None` encodes the unbounded outer interval (a single interval through
/// infinity).
pub fn interval_of(omega: &[f64], p: f64) -> Option<usize> {
    let mut thresholds: Vec<f64> = omega.iter().flat_map(|&w| [w, -w]).collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if p < thresholds[0] || p > thresholds[thresholds.len() - 1] {
        return None;
    }
    Some(thresholds.partition_point(|&v| v < p))
}

/// One adaptive Dormand-Prince 5(4) trajectory of the parameter system, with
/// a per-step interval containment check; steps that would cross an interval
/// boundary are rejected and halved, and a persistent violation is reported.
pub fn integrate_param_ode(
    omega: &[f64],
    p0: &[f64],
    t0: f64,
    t1: f64,
    samples: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let intervals: Vec<Option<usize>> = p0.iter().map(|&p| interval_of(omega, p)).collect();
    {
        let mut seen: Vec<Option<usize>> = Vec::new();
        for iv in &intervals {
            if seen.contains(iv) {
                return Err(Error::Domain(
                    "two parameters share one interval; assignment invalid".into(),
                ));
            }
            seen.push(*iv);
        }
    }
    let f = |_t: f64, p: &[f64]| param_ode_rhs(omega, p);
    let mut out = Vec::with_capacity(samples + 1);
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let total = (t1 - t0).abs();
    let mut t = t0;
    let mut p = p0.to_vec();
    out.push((t, p.clone()));
    let sample_dt = total / samples.max(1) as f64;
    let mut h = sample_dt.min(0.05) * dir;
    let atol = 1e-12;
    let rtol = 1e-12;
    let mut steps = 0usize;
    for sample in 1..=samples.max(1) {
        let target = if sample == samples.max(1) { t1 } else { t0 + sample_dt * sample as f64 * dir };
        while (t - target) * dir < -1e-14 * total.max(1.0) {
            steps += 1;
            if steps > 2_000_000 {
                return Err(Error::Domain("parameter ODE integration stalled".into()));
            }
            if (t + h - target) * dir > 0.0 {
                h = target - t;
            }
            let (p_new, err) = dopri5_step(&f, t, &p, h)?;
            let scale: f64 = p
                .iter()
                .zip(&p_new)
                .map(|(a, b)| atol + rtol * a.abs().max(b.abs()))
                .fold(0.0, f64::max);
            let err_ratio = err / scale.max(1e-300);
            let in_intervals = p_new
                .iter()
                .zip(&intervals)
                .all(|(&pv, &iv)| interval_of(omega, pv) == iv);
            if err_ratio <= 1.0 && in_intervals {
                t += h;
                p = p_new;
                let grow = (0.9 * err_ratio.max(1e-10).powf(-0.2)).min(5.0);
                h *= grow;
            } else if !in_intervals && h.abs() < 1e-12 {
                return Err(Error::Domain(format!(
                    "trajectory reached an interval boundary near t = {t}: the \
                     invariance of the interval map is violated beyond tolerance"
                )));
            } else {
                h *= 0.5;
            }
        }
        out.push((t, p.clone()));
    }
    Ok(out)
}

type OdeRhs<'a> = &'a dyn Fn(f64, &[f64]) -> Result<Vec<f64>>;

/// One Dormand-Prince 5(4) step; returns (y_new, error_estimate).
fn dopri5_step(f: OdeRhs, t: f64, y: &[f64], h: f64) -> Result<(Vec<f64>, f64)> {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const E: [f64; 7] = [
        35.0 / 384.0 - 5179.0 / 57600.0,
        0.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    ];
    let dim = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(f(t, y)?);
    for s in 0..6 {
        let mut ys = y.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = A[s][j];
            if a != 0.0 {
                for d in 0..dim {
                    ys[d] += h * a * kj[d];
                }
            }
        }
        k.push(f(t + C[s] * h, &ys)?);
    }
    // The 5th-order weights coincide with the last A row; k[6] is the FSAL
    // stage at the new point and only enters the error estimate.
    const B5: [f64; 7] =
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    let mut y_new = y.to_vec();
    for d in 0..dim {
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                y_new[d] += h * B5[j] * kj[d];
            }
        }
    }
    let mut err = 0.0f64;
    for d in 0..dim {
        let mut e = 0.0;
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                e += E[j] * kj[d];
            }
        }
        err = err.max((h * e).abs());
    }
    Ok((y_new, err))
}

/// Closed-form time along the N = 2 parameter trajectory:
/// t - t0* = (w1^2 w2^2 / (2 (w2^2 - w1^2))) [ (1/w1) ln|(w1+p)/(w1-p)| - (1/w2) ln|(w2+p)/(w2-p)| ].
pub fn param_closed_form_n2(omega: &[f64], p: f64, t0star: f64) -> Result<f64> {
    if omega.len() != 2 {
        return Err(Error::Domain("closed form requires N = 2".into()));
    }
    let (w1, w2) = (omega[0].min(omega[1]), omega[0].max(omega[1]));
    if (p.abs() - w1).abs() < 1e-300 || (p.abs() - w2).abs() < 1e-300 {
        return Err(Error::Domain("p = +-omega_i is an infinite-time boundary".into()));
    }
    let k = w1 * w1 * w2 * w2 / (2.0 * (w2 * w2 - w1 * w1));
    let l1 = ((w1 + p) / (w1 - p)).abs().ln() / w1;
    let l2 = ((w2 + p) / (w2 - p)).abs().ln() / w2;
    Ok(t0star + k * (l1 - l2))
}

/// Solves the closed form for p(t) on a given interval (monotone there).
/// The outer interval is parametrized through u = 1/p.
pub fn param_p_of_t_n2(omega: &[f64], interval: Option<usize>, t0star: f64, t: f64) -> Result<f64> {
    let (w1, w2) = (omega[0].min(omega[1]), omega[0].max(omega[1]));
    let eps = 1e-13;
    let (mut a, mut b, through_inverse) = match interval {
        None => (-1.0 / w2 + eps, 1.0 / w2 - eps, true),
        Some(idx) => {
            let thresholds = [-w2, -w1, w1, w2];
            if idx == 0 || idx >= 4 {
                (-1.0 / w2 + eps, 1.0 / w2 - eps, true)
            } else {
                let lo = thresholds[idx - 1] + eps * w2;
                let hi = thresholds[idx] - eps * w2;
                (lo, hi, false)
            }
        }
    };
    let time_of = |v: f64| -> f64 {
        let p = if through_inverse {
            if v.abs() < 1e-300 {
                return t0star; // p -> infinity corresponds to the seed time
            }
            1.0 / v
        } else {
            v
        };
        param_closed_form_n2(omega, p, t0star).unwrap_or(f64::NAN)
    };
    let mut fa = time_of(a) - t;
    let fb = time_of(b) - t;
    if fa.is_nan() || fb.is_nan() || (fa > 0.0) == (fb > 0.0) {
        return Err(Error::Domain(format!(
            "t = {t} is outside the reachable time span of the interval"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = time_of(m) - t;
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let v = 0.5 * (a + b);
    Ok(if through_inverse { 1.0 / v } else { v })
}

/// The four solutions {0, infinity, +-p*} of the consistency condition
/// |(w1+p)/(w1-p)|^{w2} = |(w2+p)/(w2-p)|^{w1}; p* lies in ]w1, w2[ and is
/// located by bisection on the log difference.
#[derive(Clone, Copy, Debug)]
pub struct ConsistencyRoots {
    pub zero: f64,
    pub infinite: bool,
    pub p_star: f64,
}

pub fn consistency_roots(omega: &[f64]) -> Result<ConsistencyRoots> {
    if omega.len() != 2 {
        return Err(Error::Domain("consistency condition is for N = 2".into()));
    }
    let (w1, w2) = (omega[0].min(omega[1]), omega[0].max(omega[1]));
    if w1 <= 0.0 || w1 >= w2 {
        return Err(Error::Domain("need 0 < omega_1 < omega_2".into()));
    }
    let g = |p: f64| -> f64 {
        w2 * ((w1 + p) / (w1 - p)).abs().ln() - w1 * ((w2 + p) / (w2 - p)).abs().ln()
    };
    let mut a = w1 + 1e-9 * (w2 - w1);
    let mut b = w2 - 1e-9 * (w2 - w1);
    let fa = g(a);
    if (fa > 0.0) == (g(b) > 0.0) {
        return Err(Error::Inconsistency("no sign change in ]omega_1, omega_2[".into()));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (g(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(ConsistencyRoots { zero: 0.0, infinite: true, p_star: 0.5 * (a + b) })
}

/// Seed time t0* and the x-positions of the four seed points.
pub fn seed_point(sd: &SpectralData) -> Result<(f64, Vec<f64>)> {
    if sd.n() != 2 || sd.omega.iter().any(|w| w.im != 0.0) {
        return Err(Error::Domain("seed points require N = 2 real data".into()));
    }
    let (signed, _) = c_constants(sd);
    let (w1, w2, c1, c2) = if sd.omega[0].re < sd.omega[1].re {
        (sd.omega[0].re, sd.omega[1].re, signed[0], signed[1])
    } else {
        (sd.omega[1].re, sd.omega[0].re, signed[1], signed[0])
    };
    if (w1 - w2).abs() < 1e-12 {
        return Err(Error::Domain("omega_1 = omega_2 is degenerate".into()));
    }
    let lc1 = c1.norm().ln();
    let lc2 = c2.norm().ln();
    let t0star = w1 * w2 * (w2 * lc1 - w1 * lc2) / (2.0 * (w2 * w2 - w1 * w1));
    let roots = consistency_roots(&[w1, w2])?;
    let p_values = [0.0, f64::INFINITY, roots.p_star, -roots.p_star];
    let x0: Vec<f64> = p_values
        .iter()
        .map(|&p| {
            let log_ratio = if p.is_infinite() {
                // |(w1+p)/(w1-p)| -> 1
                0.0
            } else {
                ((w1 + p) / (w1 - p)).abs().ln()
            };
            (0.5 * log_ratio + 0.5 * lc1 - t0star / w1) / w1
        })
        .collect();
    Ok((t0star, x0))
}

/// x(t) from the parametrization: for each k,
/// x = (1/omega_k) [ (1/2) sum_i ln|(omega_k + p_i)/(omega_k - p_i)| + (1/2) ln|C_k| - Theta-term ],
/// with cross-k agreement required to 1e-8. The sign pattern of
/// C_k prod (omega_k + p_i)/(omega_k - p_i) must be consistent per k across
/// the trace (branch-assignment check).
pub fn line_from_params(
    sd: &SpectralData,
    p_trace: &[(f64, Vec<f64>)],
    branch: Branch,
) -> Result<SingularityLine> {
    if sd.omega.iter().any(|w| w.im != 0.0) {
        return Err(Error::Domain("the parametrization route requires real omegas".into()));
    }
    let (signed, _) = c_constants(sd);
    let n = sd.n();
    let mut samples = Vec::with_capacity(p_trace.len());
    let mut sign_pattern: Option<Vec<f64>> = None;
    for (t, p) in p_trace {
        let mut x_by_k = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        for k in 0..n {
            let w = sd.omega[k].re;
            let theta = sd.theta(sd.omega[k]).re;
            let mut log_sum = 0.0;
            let mut sgn = signed[k].re.signum();
            for &pi in p {
                let ratio = (w + pi) / (w - pi);
                log_sum += ratio.abs().ln();
                sgn *= ratio.signum();
            }
            let x = (0.5 * log_sum + 0.5 * signed[k].norm().ln() - theta * t) / w;
            x_by_k.push(x);
            signs.push(sgn);
        }
        let x0 = x_by_k[0];
        for (k, &xk) in x_by_k.iter().enumerate() {
            if (xk - x0).abs() > 1e-8 * x0.abs().max(1.0) {
                return Err(Error::InconsistentData(format!(
                    "cross-k disagreement at t = {t}: x_1 = {x0}, x_{} = {xk}",
                    k + 1
                )));
            }
        }
        // A real singularity needs one global exponential branch: the signs
        // of C_k prod (omega_k + p_i)/(omega_k - p_i) must agree across k.
        if signs.windows(2).any(|w| w[0].signum() != w[1].signum()) {
            return Err(Error::InconsistentData(format!(
                "branch assignment invalid at t = {t}: mixed parametrization signs {signs:?}"
            )));
        }
        match &sign_pattern {
            None => sign_pattern = Some(signs),
            Some(sp) => {
                if sp
                    .iter()
                    .zip(&signs)
                    .any(|(a, b)| a.signum() != b.signum())
                {
                    return Err(Error::InconsistentData(
                        "sign pattern of the parametrization changed along the trace".into(),
                    ));
                }
            }
        }
        samples.push((*t, x0));
    }
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(SingularityLine {
        samples,
        branch,
        residue_type: match branch {
            Branch::Delta1 => 1,
            Branch::Delta2 => -1,
        },
        p_trace: Some(
            p_trace
                .iter()
                .map(|(t, p)| (*t, p.first().copied().unwrap_or(0.0)))
                .collect(),
        ),
    })
}

/// Velocity of the interior line at the two-wave intersection, from the
/// closed-form derivative at p = 0.
pub fn two_wave_intersection_velocity(kind: EquationKind, w1: f64, w2: f64) -> f64 {
    let th1 = kind.theta(C::new(w1, 0.0)).re;
    let th2 = kind.theta(C::new(w2, 0.0)).re;
    (w1 * th2 * w2 * w2 - w2 * th1 * w1 * w1) / (w1 * w2 * (w1 * w1 - w2 * w2))
}
