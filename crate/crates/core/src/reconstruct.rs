//! Data reconstruction from any `k` node columns.
//!
//! The rows `i >= k_bar` of `M` have degree at most `k - 1`, so they are
//! interpolated directly. Their coefficients at `x^(i'u+u-1)` give, by the
//! symmetry of `M1`, the high-degree coefficients of the first `k_bar` rows;
//! once those are subtracted the first `k_bar` rows are degree `k - 1` as
//! well.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::layout::{Cell, CodeMatrix, CodeParams, MessageMatrix, NodeId};
use crate::linalg::{interpolate, solve_linear, Matrix};

/// One node's stored column as seen by a reader.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservedColumn {
    pub id: NodeId,
    pub symbols: Vec<Elem>,
}

impl ObservedColumn {
    pub fn new(id: NodeId, symbols: Vec<Elem>) -> Self {
        ObservedColumn { id, symbols }
    }

    /// Columns of `c` for `ids`, skipping erased ones.
    pub fn from_code(c: &CodeMatrix, ids: &[NodeId]) -> Vec<ObservedColumn> {
        ids.iter()
            .filter_map(|&id| c.column(id).map(|s| ObservedColumn::new(id, s.to_vec())))
            .collect()
    }
}

pub(crate) fn check_columns(params: &CodeParams, cols: &[ObservedColumn]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for c in cols {
        params.check_node(c.id)?;
        if !seen.insert(c.id) {
            return Err(Error::DuplicateNode(c.id));
        }
        if c.symbols.len() != params.alpha() {
            return Err(Error::SymbolCount(c.id));
        }
    }
    Ok(())
}

/// Recovers `M` from exactly `k` columns.
pub fn reconstruct(params: &CodeParams, cols: &[ObservedColumn]) -> Result<MessageMatrix> {
    let (k, u, d, k_bar) = (params.k(), params.u(), params.d(), params.k_bar());
    if cols.len() != k {
        return Err(Error::ColumnCount { expected: k, got: cols.len() });
    }
    check_columns(params, cols)?;
    let f = params.field();
    let mut sorted: Vec<&ObservedColumn> = cols.iter().collect();
    sorted.sort_by_key(|c| c.id);
    let points: Vec<Elem> = sorted.iter().map(|c| params.lambda(c.id)).collect();

    // low[i] holds the k coefficients of degree <= k-1 of f_i
    let mut low: Vec<Vec<Elem>> = vec![Vec::new(); d];
    for (i, row) in low.iter_mut().enumerate().skip(k_bar) {
        let values: Vec<Elem> = sorted.iter().map(|c| c.symbols[i]).collect();
        *row = interpolate(f, &points, &values)?.coeffs;
    }

    // high[i'][t - k_bar] = m_{i', tu+u-1} = m_{t, i'u+u-1}
    let high: Vec<Vec<Elem>> =
        (0..k_bar).map(|ip| (k_bar..d).map(|t| low[t][ip * u + u - 1]).collect()).collect();

    for ip in 0..k_bar {
        let values: Vec<Elem> = sorted
            .iter()
            .zip(&points)
            .map(|(c, &x)| {
                let known = (k_bar..d).fold(Elem::ZERO, |acc, t| {
                    f.mul_add(acc, high[ip][t - k_bar], f.pow_u(x, t * u + u - 1))
                });
                f.sub(c.symbols[ip], known)
            })
            .collect();
        low[ip] = interpolate(f, &points, &values)?.coeffs;
    }

    let exps = params.exponents();
    let mut m = Matrix::zeros(d, exps.len());
    for i in 0..d {
        for (c, &j) in exps.iter().enumerate() {
            m[(i, c)] = if j < k {
                low[i][j]
            } else if i < k_bar {
                high[i][j / u - k_bar]
            } else {
                Elem::ZERO
            };
        }
    }
    MessageMatrix::from_matrix(params, &m).map_err(|e| match e {
        Error::MessageStructure { .. } => Error::Integrity,
        other => other,
    })
}

/// Independent decoder: treats the `B` free entries of `M` as unknowns and
/// solves the linear system given by the observed symbols.
///
/// Accepts any number of columns; every observed symbol must be consistent
/// with the solution.
pub fn oracle_reconstruct(params: &CodeParams, cols: &[ObservedColumn]) -> Result<MessageMatrix> {
    if cols.len() < params.k() {
        return Err(Error::ColumnCount { expected: params.k(), got: cols.len() });
    }
    check_columns(params, cols)?;
    let f = params.field();
    let b = params.b();
    let exps = params.exponents();
    let ncols = exps.len();

    let mut equations = Vec::new();
    for c in cols {
        let x = params.lambda(c.id);
        for i in 0..params.d() {
            let mut row = vec![Elem::ZERO; b];
            for (pos, &j) in exps.iter().enumerate() {
                match params.cells()[i * ncols + pos] {
                    Cell::Free(idx) | Cell::Mirror(idx) => {
                        row[idx] = f.add(row[idx], f.pow_u(x, j));
                    }
                    Cell::Zero => {}
                }
            }
            equations.push((row, c.symbols[i]));
        }
    }

    // greedily keep equations that raise the rank
    let mut basis: Vec<(usize, Vec<Elem>)> = Vec::new();
    let mut chosen = Vec::new();
    for (eq_idx, (row, _)) in equations.iter().enumerate() {
        if chosen.len() == b {
            break;
        }
        let mut r = row.clone();
        for (pivot, brow) in &basis {
            let factor = r[*pivot];
            if !factor.is_zero() {
                for (x, &y) in r.iter_mut().zip(brow) {
                    *x = f.sub(*x, f.mul(factor, y));
                }
            }
        }
        if let Some(pivot) = r.iter().position(|x| !x.is_zero()) {
            let inv = f.inv(r[pivot])?;
            r.iter_mut().for_each(|x| *x = f.mul(*x, inv));
            basis.push((pivot, r));
            chosen.push(eq_idx);
        }
    }
    if chosen.len() < b {
        return Err(Error::Singular);
    }

    let a = Matrix::from_rows(b, b, chosen.iter().flat_map(|&e| equations[e].0.clone()).collect())?;
    let rhs: Vec<Elem> = chosen.iter().map(|&e| equations[e].1).collect();
    let data = solve_linear(f, &a, &rhs)?;
    if equations.iter().any(|(row, v)| f.dot(row, &data) != *v) {
        return Err(Error::Integrity);
    }
    MessageMatrix::fill(params, &data)
}
