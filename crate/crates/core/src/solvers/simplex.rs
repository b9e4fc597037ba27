//! Dense two-phase revised simplex for the equality-form programs every
//! total-variation and weighted-L¹ norm in this crate reduces to:
//! minimize cᵀx subject to Mx = b, x ≥ 0.
//!
//! Returned solutions are vertices, so a basis-pursuit reformulation with
//! split positive/negative parts yields basic optimal solutions with at most
//! one nonzero per constraint row. Pricing is Dantzig with lowest-index
//! tie-breaks; a streak of degenerate pivots switches to Bland's rule, which
//! also breaks ratio-test ties, so the method terminates deterministically.

use crate::error::{Error, Result};

pub(crate) struct LpInstance {
    /// Constraint columns, each of length `rhs.len()`.
    pub cols: Vec<Vec<f64>>,
    /// Nonnegative objective coefficients, one per column.
    pub cost: Vec<f64>,
    pub rhs: Vec<f64>,
}

pub(crate) struct LpOutcome {
    pub x: Vec<f64>,
    /// Dual vector on the original row indexing; rows dropped as redundant
    /// carry zero.
    pub dual: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub max_iters_hit: bool,
    /// ‖Mx − b‖_∞ over the original rows.
    pub residual: f64,
}

const PIVOT_TOL: f64 = 1e-11;
const RC_TOL: f64 = 1e-9;

pub(crate) fn solve_equality_lp(
    inst: &LpInstance,
    feas_tol: f64,
    max_iters: usize,
) -> Result<LpOutcome> {
    let n = inst.rhs.len();
    let ncols = inst.cols.len();
    assert_eq!(inst.cost.len(), ncols);
    for c in &inst.cols {
        assert_eq!(c.len(), n);
    }

    let b_norm = inst.rhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let feas_scaled = feas_tol * (1.0 + b_norm);

    // Row reduction: keep a maximal independent row set and verify the
    // dropped rows are consistent with the right-hand side.
    let (keep, drop_residual) = independent_rows(inst);
    if drop_residual > feas_scaled {
        return Err(Error::NotRepresentable {
            residual: drop_residual,
        });
    }
    let nk = keep.len();
    if nk == 0 {
        // All rows redundant and consistent: x = 0 is optimal.
        return Ok(LpOutcome {
            x: vec![0.0; ncols],
            dual: vec![0.0; n],
            objective: 0.0,
            iterations: 0,
            max_iters_hit: false,
            residual: b_norm,
        });
    }

    // Flip rows so the reduced right-hand side is nonnegative.
    let sign: Vec<f64> = keep
        .iter()
        .map(|&r| if inst.rhs[r] < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let col_at = |id: usize, r: usize| -> f64 {
        if id < ncols {
            sign[r] * inst.cols[id][keep[r]]
        } else if id - ncols == r {
            1.0
        } else {
            0.0
        }
    };
    let b: Vec<f64> = keep
        .iter()
        .zip(&sign)
        .map(|(&r, s)| s * inst.rhs[r])
        .collect();

    let mut st = SimplexState {
        nk,
        ncols,
        basis: (0..nk).map(|r| ncols + r).collect(),
        binv: identity(nk),
        xb: b.clone(),
        iterations: 0,
    };

    // Phase 1: minimize the sum of artificials.
    let phase1_cost = |id: usize| if id >= ncols { 1.0 } else { 0.0 };
    let p1 = run_phase(&mut st, &col_at, &phase1_cost, max_iters, &b)?;
    let infeasibility: f64 = st
        .basis
        .iter()
        .zip(&st.xb)
        .filter(|(id, _)| **id >= ncols)
        .map(|(_, v)| v.max(0.0))
        .sum();
    if p1 == PhaseEnd::MaxIters {
        return Ok(outcome_from_state(&st, inst, &keep, &sign, true));
    }
    if infeasibility > feas_scaled {
        return Err(Error::NotRepresentable {
            residual: infeasibility,
        });
    }
    drive_out_artificials(&mut st, &col_at, &b)?;

    // Phase 2: the real objective over real columns only.
    let phase2_cost = |id: usize| if id < ncols { inst.cost[id] } else { 0.0 };
    let p2 = run_phase(&mut st, &col_at, &phase2_cost, max_iters, &b)?;
    Ok(outcome_from_state(
        &st,
        inst,
        &keep,
        &sign,
        p2 == PhaseEnd::MaxIters,
    ))
}

/// Row indices forming a maximal independent set (ascending), plus the worst
/// right-hand-side inconsistency over the eliminated rows.
fn independent_rows(inst: &LpInstance) -> (Vec<usize>, f64) {
    let n = inst.rhs.len();
    let ncols = inst.cols.len();
    // Dense working copy of [M | b], row major.
    let w = ncols + 1;
    let mut work = vec![0.0; n * w];
    let mut scale = 0.0f64;
    for (j, col) in inst.cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            work[r * w + j] = v;
            scale = scale.max(v.abs());
        }
    }
    for (r, &v) in inst.rhs.iter().enumerate() {
        work[r * w + ncols] = v;
    }
    let tol = PIVOT_TOL * scale.max(1.0);

    let mut pivoted = vec![false; n];
    let mut kept = Vec::new();
    for c in 0..ncols {
        if kept.len() == n {
            break;
        }
        let mut best = tol;
        let mut best_row = usize::MAX;
        for r in 0..n {
            if !pivoted[r] && work[r * w + c].abs() > best {
                best = work[r * w + c].abs();
                best_row = r;
            }
        }
        if best_row == usize::MAX {
            continue;
        }
        pivoted[best_row] = true;
        kept.push(best_row);
        let piv = work[best_row * w + c];
        for r in 0..n {
            if pivoted[r] {
                continue;
            }
            let factor = work[r * w + c] / piv;
            if factor == 0.0 {
                continue;
            }
            for k in 0..w {
                work[r * w + k] -= factor * work[best_row * w + k];
            }
        }
    }
    let mut drop_residual = 0.0f64;
    for r in 0..n {
        if !pivoted[r] {
            drop_residual = drop_residual.max(work[r * w + ncols].abs());
        }
    }
    kept.sort_unstable();
    (kept, drop_residual)
}

struct SimplexState {
    nk: usize,
    ncols: usize,
    basis: Vec<usize>,
    /// Row-major basis inverse, nk × nk.
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
}

#[derive(PartialEq)]
enum PhaseEnd {
    Optimal,
    MaxIters,
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn run_phase(
    st: &mut SimplexState,
    col_at: &impl Fn(usize, usize) -> f64,
    cost: &impl Fn(usize) -> f64,
    max_iters: usize,
    b: &[f64],
) -> Result<PhaseEnd> {
    let nk = st.nk;
    let mut bland = false;
    let mut degenerate_streak = 0usize;
    loop {
        if st.iterations >= max_iters {
            return Ok(PhaseEnd::MaxIters);
        }
        // y = B⁻ᵀ c_B.
        let mut y = vec![0.0; nk];
        for (i, &id) in st.basis.iter().enumerate() {
            let ci = cost(id);
            if ci == 0.0 {
                continue;
            }
            for r in 0..nk {
                y[r] += ci * st.binv[i * nk + r];
            }
        }
        // Pricing over the real columns; artificials never re-enter.
        let mut entering = usize::MAX;
        let mut best_rc = -RC_TOL;
        for j in 0..st.ncols {
            if st.basis.contains(&j) {
                continue;
            }
            let mut rc = cost(j);
            for r in 0..nk {
                let a = col_at(j, r);
                if a != 0.0 {
                    rc -= y[r] * a;
                }
            }
            if rc < best_rc {
                entering = j;
                best_rc = rc;
                if bland {
                    break;
                }
            }
        }
        if entering == usize::MAX {
            return Ok(PhaseEnd::Optimal);
        }
        // Direction d = B⁻¹ a_enter.
        let mut d = vec![0.0; nk];
        for r in 0..nk {
            let a = col_at(entering, r);
            if a == 0.0 {
                continue;
            }
            for i in 0..nk {
                d[i] += st.binv[i * nk + r] * a;
            }
        }
        // Ratio test. Rows held by an artificial at value zero force a
        // degenerate exchange when the direction would move them (either
        // sign), so artificials never drift away from zero. Among rows
        // within a whisker of the minimal ratio the largest pivot magnitude
        // wins, keeping the next basis well conditioned; in Bland mode ties
        // go strictly to the lowest basic variable index.
        let mut leave = usize::MAX;
        let mut theta = f64::INFINITY;
        for i in 0..nk {
            let is_artificial = st.basis[i] >= st.ncols;
            let ratio = if d[i] > PIVOT_TOL {
                st.xb[i].max(0.0) / d[i]
            } else if is_artificial && d[i] < -PIVOT_TOL && st.xb[i].max(0.0) <= 1e-12 {
                0.0
            } else {
                continue;
            };
            let tie = (ratio - theta).abs() <= 1e-9 * (1.0 + theta.min(1e100));
            let better = if leave == usize::MAX || ratio < theta - 1e-9 * (1.0 + theta.min(1e100)) {
                true
            } else if tie {
                if bland {
                    st.basis[i] < st.basis[leave]
                } else {
                    d[i].abs() > d[leave].abs()
                }
            } else {
                false
            };
            if better {
                theta = theta.min(ratio);
                leave = i;
            }
        }
        if leave == usize::MAX {
            return Err(Error::Invalid("linear program is unbounded below".into()));
        }
        let theta = st.xb[leave].max(0.0) / d[leave];
        if theta.abs() <= 1e-13 {
            degenerate_streak += 1;
            if degenerate_streak > 2 * nk + 10 {
                bland = true;
            }
        } else {
            degenerate_streak = 0;
        }
        // Pivot, then rebuild the basis inverse and basic values from
        // scratch: desk-scale dimensions make a full refactorization per
        // pivot cheap, and it keeps B·x_B = b tight regardless of pivot
        // quality.
        st.basis[leave] = entering;
        st.iterations += 1;
        refactor(st, col_at, b)?;
    }
}

/// Rebuild B⁻¹ from scratch by Gauss-Jordan and refresh the basic values.
fn refactor(st: &mut SimplexState, col_at: &impl Fn(usize, usize) -> f64, b: &[f64]) -> Result<()> {
    let nk = st.nk;
    // Augmented [B | I].
    let w = 2 * nk;
    let mut aug = vec![0.0; nk * w];
    for (i, &id) in st.basis.iter().enumerate() {
        for r in 0..nk {
            aug[r * w + i] = col_at(id, r);
        }
    }
    for r in 0..nk {
        aug[r * w + nk + r] = 1.0;
    }
    for c in 0..nk {
        let mut best = 0.0;
        let mut best_row = usize::MAX;
        for r in c..nk {
            if aug[r * w + c].abs() > best {
                best = aug[r * w + c].abs();
                best_row = r;
            }
        }
        if best <= PIVOT_TOL {
            return Err(Error::Invalid("singular simplex basis".into()));
        }
        if best_row != c {
            for k in 0..w {
                aug.swap(c * w + k, best_row * w + k);
            }
        }
        let piv = aug[c * w + c];
        for k in 0..w {
            aug[c * w + k] /= piv;
        }
        for r in 0..nk {
            if r == c {
                continue;
            }
            let f = aug[r * w + c];
            if f == 0.0 {
                continue;
            }
            for k in 0..w {
                aug[r * w + k] -= f * aug[c * w + k];
            }
        }
    }
    for r in 0..nk {
        for c in 0..nk {
            st.binv[r * nk + c] = aug[r * w + nk + c];
        }
    }
    for i in 0..nk {
        let mut v = 0.0;
        for r in 0..nk {
            v += st.binv[i * nk + r] * b[r];
        }
        st.xb[i] = if v < 0.0 && v > -1e-11 { 0.0 } else { v };
    }
    Ok(())
}

/// Best-effort replacement of artificial variables still basic (at value
/// zero after a feasible phase 1) by real columns via degenerate pivots on
/// the largest available tableau entry. An artificial that cannot be
/// exchanged on a solid pivot stays basic at zero; the ratio-test guard
/// keeps it there.
fn drive_out_artificials(
    st: &mut SimplexState,
    col_at: &impl Fn(usize, usize) -> f64,
    b: &[f64],
) -> Result<()> {
    let nk = st.nk;
    for i in 0..nk {
        if st.basis[i] < st.ncols {
            continue;
        }
        let mut best_col = usize::MAX;
        let mut best_mag = 1e-7;
        for j in 0..st.ncols {
            if st.basis.contains(&j) {
                continue;
            }
            // Tableau entry (B⁻¹ a_j)_i.
            let mut dij = 0.0;
            for r in 0..nk {
                let a = col_at(j, r);
                if a != 0.0 {
                    dij += st.binv[i * nk + r] * a;
                }
            }
            if dij.abs() > best_mag {
                best_mag = dij.abs();
                best_col = j;
            }
        }
        if best_col == usize::MAX {
            continue;
        }
        st.basis[i] = best_col;
        st.iterations += 1;
        refactor(st, col_at, b)?;
    }
    Ok(())
}

fn outcome_from_state(
    st: &SimplexState,
    inst: &LpInstance,
    keep: &[usize],
    sign: &[f64],
    max_iters_hit: bool,
) -> LpOutcome {
    let n = inst.rhs.len();
    let ncols = inst.cols.len();
    let mut x = vec![0.0; ncols];
    for (i, &id) in st.basis.iter().enumerate() {
        if id < ncols {
            x[id] = st.xb[i].max(0.0);
        }
    }
    // Dual on the kept rows: y = B⁻ᵀ c_B, mapped back through row flips.
    let nk = st.nk;
    let mut y = vec![0.0; nk];
    for (i, &id) in st.basis.iter().enumerate() {
        let ci = if id < ncols { inst.cost[id] } else { 0.0 };
        if ci == 0.0 {
            continue;
        }
        for r in 0..nk {
            y[r] += ci * st.binv[i * nk + r];
        }
    }
    let mut dual = vec![0.0; n];
    for (r, (&row, s)) in keep.iter().zip(sign).enumerate() {
        dual[row] = s * y[r];
    }
    let objective = x.iter().zip(&inst.cost).map(|(xi, ci)| xi * ci).sum();
    let mut residual = 0.0f64;
    for r in 0..n {
        let mut lhs = 0.0;
        for (j, col) in inst.cols.iter().enumerate() {
            if x[j] != 0.0 {
                lhs += col[r] * x[j];
            }
        }
        residual = residual.max((lhs - inst.rhs[r]).abs());
    }
    LpOutcome {
        x,
        dual,
        objective,
        iterations: st.iterations,
        max_iters_hit,
        residual,
    }
}
