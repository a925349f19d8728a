//! Phase-1 simplex for small dense feasibility problems.
//!
//! Finds `x >= 0` with `A x <= b` (rows of other senses are rewritten), or
//! proves that none exists. The auxiliary problem adds one artificial
//! variable `a >= 0` to every row, `A x - a <= b`, and maximises `-a`. The
//! system is feasible exactly when the optimum is zero.
//!
//! The solver keeps a condensed dictionary (basic variables written in terms
//! of the nonbasic ones), so its size is `rows × (vars + 1)` no matter how
//! many slack variables there are. Entering and leaving variables follow
//! Bland's smallest-index rule, which rules out cycling on the heavily
//! degenerate systems produced by rate regions.

/// Sense of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        }
    }

    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint {
            coeffs,
            relation: Relation::Ge,
            rhs,
        }
    }

    /// Signed violation at `x`; positive means the constraint is broken.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs: f64 = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.relation {
            Relation::Le => lhs - self.rhs,
            Relation::Ge => self.rhs - lhs,
        }
    }
}

const PIVOT_EPS: f64 = 1e-12;
/// Largest artificial value still treated as zero at the phase-1 optimum.
const OPTIMUM_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

/// Returns a point `x >= 0` meeting every constraint, or `None`.
pub fn find_feasible_point(vars: usize, constraints: &[Constraint]) -> Option<Vec<f64>> {
    let rows = constraints.len();
    if rows == 0 {
        return Some(vec![0.0; vars]);
    }
    // Variable ids: 0..vars structural, `vars` artificial, then one slack per row.
    let artificial = vars;
    let cols = vars + 1;
    let mut nonbasic: Vec<usize> = (0..cols).collect();
    let mut basic: Vec<usize> = (0..rows).map(|r| cols + r).collect();
    // dictionary: basic_r = dict[r][0] + Σ_c dict[r][c + 1] · nonbasic_c
    let mut dict: Vec<Vec<f64>> = constraints
        .iter()
        .map(|c| {
            debug_assert_eq!(c.coeffs.len(), vars);
            let sign = if c.relation == Relation::Le {
                1.0
            } else {
                -1.0
            };
            let mut row = Vec::with_capacity(cols + 1);
            row.push(sign * c.rhs);
            row.extend(c.coeffs.iter().map(|&a| -sign * a));
            row.push(1.0);
            row
        })
        .collect();
    // objective: maximise w = -a
    let mut objective = vec![0.0; cols + 1];
    objective[cols] = -1.0;

    let (worst, &worst_rhs) = dict
        .iter()
        .map(|r| &r[0])
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
        .expect("nonempty");
    if worst_rhs >= 0.0 {
        return Some(vec![0.0; vars]);
    }
    pivot(
        &mut dict,
        &mut objective,
        &mut basic,
        &mut nonbasic,
        worst,
        artificial,
    );

    for _ in 0..MAX_PIVOTS {
        if let Some(pos) = basic.iter().position(|&b| b == artificial) {
            if dict[pos][0] <= OPTIMUM_EPS {
                // degenerate artificial at zero: the current basis is feasible
                break;
            }
        } else {
            break;
        }
        // Bland: smallest-index nonbasic with positive reduced cost
        let Some(enter) = (0..cols)
            .filter(|&c| objective[c + 1] > PIVOT_EPS)
            .min_by_key(|&c| nonbasic[c])
        else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..rows {
            let coef = dict[r][enter + 1];
            if coef < -PIVOT_EPS {
                let ratio = dict[r][0].max(0.0) / -coef;
                let better = match leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < best - PIVOT_EPS
                            || (ratio <= best + PIVOT_EPS
                                && leave_priority(basic[r], artificial)
                                    < leave_priority(basic[l], artificial))
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (row, _) = leave.expect("phase-1 objective is bounded above by zero");
        pivot(
            &mut dict,
            &mut objective,
            &mut basic,
            &mut nonbasic,
            row,
            enter,
        );
    }

    let artificial_value = basic
        .iter()
        .position(|&b| b == artificial)
        .map_or(0.0, |pos| dict[pos][0]);
    if artificial_value > OPTIMUM_EPS {
        return None;
    }
    let mut x = vec![0.0; vars];
    for (r, &b) in basic.iter().enumerate() {
        if b < vars {
            x[b] = dict[r][0].max(0.0);
        }
    }
    Some(x)
}

// The artificial variable leaves first on ties, then smallest index.
fn leave_priority(var: usize, artificial: usize) -> (bool, usize) {
    (var != artificial, var)
}

fn pivot(
    dict: &mut [Vec<f64>],
    objective: &mut [f64],
    basic: &mut [usize],
    nonbasic: &mut [usize],
    row: usize,
    col: usize,
) {
    let p = dict[row][col + 1];
    // Solve the pivot row for the entering variable.
    let mut new_row: Vec<f64> = dict[row].iter().map(|&v| -v / p).collect();
    new_row[col + 1] = 1.0 / p;
    let substitute = |target: &mut [f64]| {
        let factor = target[col + 1];
        if factor == 0.0 {
            return;
        }
        for (t, &n) in target.iter_mut().zip(&new_row) {
            *t += factor * n;
        }
        target[col + 1] = factor * new_row[col + 1];
    };
    for (r, other) in dict.iter_mut().enumerate() {
        if r != row {
            substitute(other);
        }
    }
    substitute(objective);
    dict[row] = new_row;
    std::mem::swap(&mut basic[row], &mut nonbasic[col]);
}
