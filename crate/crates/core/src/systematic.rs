//! Systematic form: the first `k` nodes hold the `B` data symbols uncoded.
//!
//! `C[k]` (the first `k` columns) has `k*d` cells but only `B` data
//! symbols; the remaining `k_bar(k_bar-1)/2` cells are redundant. They sit in
//! column `(e, u-1)` at rows `e+1..k_bar` for racks `e < k_bar - 1`.
//! Data fills the other cells column by column (node `(0,0)` rows
//! `0..d`, then node `(0,1)`, ...).
//!
//! To find the message matrix `M~` whose codeword has this shape, the
//! symmetric block `M~1` is solved from the leading coefficients of the
//! fully known local rows, the redundant cells are completed from `M~1`,
//! and `M~` is then reconstructed from the `k` complete columns.

use crate::encode::encode;
use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::layout::{CodeMatrix, CodeParams, MessageMatrix, NodeId};
use crate::linalg::{interpolate, solve_linear, vandermonde_solve, Matrix};
use crate::reconstruct::{reconstruct, ObservedColumn};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystematicLayout {
    /// `(row, node)` of data symbol `s`, in data order.
    pub data_positions: Vec<(usize, NodeId)>,
    pub redundant_positions: Vec<(usize, NodeId)>,
}

pub fn is_redundant(params: &CodeParams, row: usize, id: NodeId) -> bool {
    let k_bar = params.k_bar();
    id.slot == params.u() - 1 && id.rack + 1 < k_bar && row > id.rack && row < k_bar
}

pub fn systematic_layout(params: &CodeParams) -> SystematicLayout {
    let mut layout = SystematicLayout { data_positions: Vec::new(), redundant_positions: Vec::new() };
    for id in params.nodes().take(params.k()) {
        for i in 0..params.d() {
            if is_redundant(params, i, id) {
                layout.redundant_positions.push((i, id));
            } else {
                layout.data_positions.push((i, id));
            }
        }
    }
    layout
}

/// Leading coefficient of the polynomial through `(points[g], values[g])`.
fn leading(params: &CodeParams, points: &[Elem], values: &[Elem]) -> Result<Elem> {
    Ok(interpolate(params.field(), points, values)?.coeff(params.u() - 1))
}

/// Leading coefficients `h[i][e]` read off the data cells, for the rows
/// of rack `e < k_bar` that hold no redundant cell.
fn known_leading(params: &CodeParams, grid: &[Vec<Option<Elem>>]) -> Result<Vec<Vec<Option<Elem>>>> {
    let (d, k_bar) = (params.d(), params.k_bar());
    let mut h = vec![vec![None; k_bar]; d];
    for e in 0..k_bar {
        let ids: Vec<NodeId> = params.rack_nodes(e).collect();
        let points: Vec<Elem> = ids.iter().map(|&id| params.lambda(id)).collect();
        for (i, row) in h.iter_mut().enumerate() {
            if i <= e || i >= k_bar {
                let values: Vec<Elem> = ids
                    .iter()
                    .map(|&id| grid[params.node_index(id)][i].expect("known row"))
                    .collect();
                row[e] = Some(leading(params, &points, &values)?);
            }
        }
    }
    Ok(h)
}

/// Solves the symmetric block `M~1` (`d x d`) from the known leading
/// coefficients: `T~` first, then `S~` row by row.
fn solve_m1(params: &CodeParams, h: &[Vec<Option<Elem>>]) -> Result<Matrix> {
    let (d, k_bar) = (params.d(), params.k_bar());
    let f = params.field();
    let x: Vec<Elem> = (0..k_bar).map(|e| params.rack_point(e)).collect();
    let mut m1 = Matrix::zeros(d, d);

    // row i >= k_bar of M~1 is (T~[.][i-k_bar]^t, 0)
    for i in k_bar..d {
        let rhs: Vec<Elem> = h[i].iter().map(|v| v.expect("bottom rows known")).collect();
        let col = vandermonde_solve(f, &x, &rhs)?;
        for (t, v) in col.into_iter().enumerate() {
            m1[(i, t)] = v;
            m1[(t, i)] = v;
        }
    }

    // row r of S~: unknowns S[r][r..k_bar], equations from racks e in r..k_bar
    for r in 0..k_bar {
        let size = k_bar - r;
        let mut a = Matrix::zeros(size, size);
        let mut rhs = Vec::with_capacity(size);
        for e in r..k_bar {
            let xe = x[e];
            for t in r..k_bar {
                a[(e - r, t - r)] = f.pow_u(xe, t);
            }
            let known = (0..d)
                .filter(|&t| t < r || t >= k_bar)
                .fold(Elem::ZERO, |acc, t| f.mul_add(acc, m1[(r, t)], f.pow_u(xe, t)));
            rhs.push(f.sub(h[r][e].expect("row r known on racks e >= r"), known));
        }
        let sol = solve_linear(f, &a, &rhs)?;
        for (off, v) in sol.into_iter().enumerate() {
            m1[(r, r + off)] = v;
            m1[(r + off, r)] = v;
        }
    }
    Ok(m1)
}

/// Message matrix `M~` whose codeword carries `data` uncoded at the
/// layout's data positions.
pub fn systematic_message_matrix(params: &CodeParams, data: &[Elem]) -> Result<MessageMatrix> {
    if data.len() != params.b() {
        return Err(Error::DataLength { expected: params.b(), got: data.len() });
    }
    let (d, u) = (params.d(), params.u());
    let f = params.field();
    let layout = systematic_layout(params);

    let mut grid = vec![vec![None; d]; params.k()];
    for (&(i, id), &s) in layout.data_positions.iter().zip(data) {
        grid[params.node_index(id)][i] = Some(s);
    }

    let h = known_leading(params, &grid)?;
    let m1 = solve_m1(params, &h)?;

    for &(i, id) in &layout.redundant_positions {
        let lead = f.dot(m1.row(i), &params.rack_vector(id.rack));
        let mates: Vec<NodeId> = params.rack_nodes(id.rack).filter(|&g| g != id).collect();
        let points: Vec<Elem> = mates.iter().map(|&g| params.lambda(g)).collect();
        let residual: Vec<Elem> = mates
            .iter()
            .zip(&points)
            .map(|(&g, &x)| {
                let v = grid[params.node_index(g)][i].expect("mates are data cells");
                f.sub(v, f.mul(lead, f.pow_u(x, u - 1)))
            })
            .collect();
        let low = interpolate(f, &points, &residual)?;
        let x = params.lambda(id);
        grid[params.node_index(id)][i] = Some(f.mul_add(low.eval(f, x), lead, f.pow_u(x, u - 1)));
    }

    let cols: Vec<ObservedColumn> = grid
        .into_iter()
        .enumerate()
        .map(|(idx, col)| {
            ObservedColumn::new(params.node_at(idx), col.into_iter().map(|v| v.expect("complete")).collect())
        })
        .collect();
    reconstruct(params, &cols)
}

pub fn systematic_encode(params: &CodeParams, data: &[Elem]) -> Result<CodeMatrix> {
    Ok(encode(&systematic_message_matrix(params, data)?))
}

/// Reads the data symbols back from the systematic nodes of `c`.
pub fn read_systematic(params: &CodeParams, c: &CodeMatrix) -> Result<Vec<Elem>> {
    systematic_layout(params)
        .data_positions
        .iter()
        .map(|&(i, id)| c.get(i, id).ok_or(Error::NodeUnavailable(id)))
        .collect()
}

/// `P` with `unfill(M~(data)) = P * data`.
pub fn precoding_matrix(params: &CodeParams) -> Result<Matrix> {
    let b = params.b();
    let mut p = Matrix::zeros(b, b);
    let mut unit = vec![Elem::ZERO; b];
    for j in 0..b {
        unit[j] = Elem::ONE;
        let col = systematic_message_matrix(params, &unit)?.unfill();
        for (i, v) in col.into_iter().enumerate() {
            p[(i, j)] = v;
        }
        unit[j] = Elem::ZERO;
    }
    Ok(p)
}
