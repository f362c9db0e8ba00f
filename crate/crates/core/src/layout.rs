//! Code geometry: parameters, node addressing, evaluation points and the
//! layout of data symbols inside the message matrix.
//!
//! The message matrix `M` has `d` rows (`d` = helper racks per repair) and
//! one column per exponent in
//!
//! ```text
//! J1 = { t*u + u - 1 : 0 <= t < d }
//! J2 = [0, k-1] \ J1
//! J  = J1 ∪ J2   (ascending)
//! ```
//!
//! The columns in `J1` form the symmetric `d x d` block
//! `M1 = [[S, T], [T^t, 0]]` with `S` of size `k_bar x k_bar`.
//!
//! Data symbols are laid out column by column in ascending exponent order,
//! top to bottom within a column. A cell is skipped when it sits in the zero
//! block of `M1` or when it lies above the diagonal of `M1` (its value is
//! then the mirror of an earlier cell). This reproduces the 12-node example
//! layout exactly:
//!
//! ```text
//!   x^0  x^1  x^2  x^3  x^4  x^5  x^6  x^8
//!   s1   s4   s7   s10  s13  s8   s18  s9
//!   s2   s5   s8   s11  s14  s16  s19  s17
//!   s3   s6   s9   s12  s15  s17  s20  0
//! ```

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::gf::{is_prime, Elem, Field, MAX_PRIME};
use crate::linalg::Matrix;

/// Node `(e, g)`: slot `g` inside rack `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub rack: usize,
    pub slot: usize,
}

impl NodeId {
    pub const fn new(rack: usize, slot: usize) -> Self {
        NodeId { rack, slot }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rack, self.slot)
    }
}

/// Which field to build the code over.
#[derive(Clone, Debug, Default)]
pub enum FieldChoice {
    /// Smallest GF(2^m) with `u | 2^m - 1` and `2^m > n`, falling back to
    /// the smallest suitable prime field.
    #[default]
    Auto,
    Binary(u32),
    Prime(u32),
    Given(Field),
}

/// What a message-matrix cell holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Cell {
    /// Carries data symbol `idx` (first occurrence).
    Free(usize),
    /// Mirror of data symbol `idx` placed earlier by symmetry of `M1`.
    Mirror(usize),
    /// Structural zero of `M1`.
    Zero,
}

struct Inner {
    n: usize,
    k: usize,
    u: usize,
    racks: usize,
    k_bar: usize,
    u0: usize,
    d: usize,
    b: usize,
    field: Field,
    xi: Elem,
    eta: Elem,
    j1: Vec<usize>,
    j2: Vec<usize>,
    j: Vec<usize>,
    /// degree -> column position in `j`
    position: Vec<Option<usize>>,
    lambdas: Vec<Elem>,
    cells: Vec<Cell>,
    encoding: OnceLock<Matrix>,
}

/// Validated code parameters. Cheap to clone.
#[derive(Clone)]
pub struct CodeParams(Arc<Inner>);

impl fmt::Debug for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodeParams")
            .field("n", &self.n())
            .field("k", &self.k())
            .field("u", &self.u())
            .field("d", &self.d())
            .field("field", &self.field())
            .finish()
    }
}

impl PartialEq for CodeParams {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.n() == other.n()
                && self.k() == other.k()
                && self.u() == other.u()
                && self.d() == other.d()
                && self.field() == other.field())
    }
}

impl Eq for CodeParams {}

/// Picks the field used by [`FieldChoice::Auto`].
pub fn select_field(n: usize, u: usize) -> Result<Field> {
    for m in 1..=16u32 {
        let q = 1usize << m;
        if (q - 1).is_multiple_of(u) && q > n {
            return Field::binary(m);
        }
    }
    let start = (n + 1).max(3) as u32;
    (start..=MAX_PRIME)
        .find(|&p| is_prime(p) && (p as usize - 1).is_multiple_of(u))
        .map(Field::prime)
        .unwrap_or(Err(Error::NoField { n, u }))
}

impl CodeParams {
    /// Validates `(n, k, u, d)` with `beta = 1` and builds the derived
    /// quantities.
    pub fn new(n: usize, k: usize, u: usize, d: usize, field: FieldChoice) -> Result<Self> {
        if u < 2 {
            return Err(Error::RackSize(u));
        }
        if !n.is_multiple_of(u) {
            return Err(Error::RackDivisibility { n, u });
        }
        if k < u || k >= n {
            return Err(Error::ThresholdRange { n, k, u });
        }
        let racks = n / u;
        let k_bar = k / u;
        let u0 = k % u;
        if d < k_bar {
            return Err(Error::HelperRacksTooFew { d, k_bar });
        }
        if d > racks - 1 {
            return Err(Error::HelperRacksTooMany { d, max: racks - 1 });
        }
        let field = match field {
            FieldChoice::Auto => select_field(n, u)?,
            FieldChoice::Binary(m) => Field::binary(m)?,
            FieldChoice::Prime(p) => Field::prime(p)?,
            FieldChoice::Given(f) => f,
        };
        let q = field.q() as usize;
        if !(q - 1).is_multiple_of(u) || q <= n {
            return Err(Error::FieldUnsuitable { q: q as u32, u, n });
        }
        let xi = field.primitive_element();
        let eta = field.element_of_order(u as u32)?;

        let j1: Vec<usize> = (0..d).map(|t| t * u + u - 1).collect();
        let j2: Vec<usize> = (0..k).filter(|j| !j1.contains(j)).collect();
        let mut j: Vec<usize> = j1.iter().chain(&j2).copied().collect();
        j.sort_unstable();
        let max_degree = *j.last().expect("J is nonempty");
        let mut position = vec![None; max_degree + 1];
        for (pos, &deg) in j.iter().enumerate() {
            position[deg] = Some(pos);
        }

        let mut lambdas = Vec::with_capacity(n);
        for e in 0..racks {
            let xe = field.pow_u(xi, e);
            for g in 0..u {
                lambdas.push(field.mul(xe, field.pow_u(eta, g)));
            }
        }

        let b = k * d - k_bar * (k_bar.saturating_sub(1)) / 2;
        let cells = build_cells(u, d, k_bar, &j, &position);
        debug_assert_eq!(cells.iter().filter(|c| matches!(c, Cell::Free(_))).count(), b);

        Ok(CodeParams(Arc::new(Inner {
            n,
            k,
            u,
            racks,
            k_bar,
            u0,
            d,
            b,
            field,
            xi,
            eta,
            j1,
            j2,
            j,
            position,
            lambdas,
            cells,
            encoding: OnceLock::new(),
        })))
    }

    pub fn n(&self) -> usize {
        self.0.n
    }
    pub fn k(&self) -> usize {
        self.0.k
    }
    /// Nodes per rack.
    pub fn u(&self) -> usize {
        self.0.u
    }
    /// Number of racks, `n / u`.
    pub fn racks(&self) -> usize {
        self.0.racks
    }
    /// `floor(k / u)`
    pub fn k_bar(&self) -> usize {
        self.0.k_bar
    }
    /// `k mod u`
    pub fn u0(&self) -> usize {
        self.0.u0
    }
    /// Helper racks per repair.
    pub fn d(&self) -> usize {
        self.0.d
    }
    /// Symbols each helper rack sends; always 1.
    pub fn beta(&self) -> usize {
        1
    }
    /// Symbols stored per node, equal to `d`.
    pub fn alpha(&self) -> usize {
        self.0.d
    }
    /// Data symbols per stripe.
    pub fn b(&self) -> usize {
        self.0.b
    }
    /// Cross-rack symbols per single-node repair.
    pub fn gamma(&self) -> usize {
        self.0.d * self.beta()
    }
    pub fn field(&self) -> &Field {
        &self.0.field
    }
    pub fn xi(&self) -> Elem {
        self.0.xi
    }
    pub fn eta(&self) -> Elem {
        self.0.eta
    }

    /// `(J1, J2, J)`
    pub fn index_sets(&self) -> (&[usize], &[usize], &[usize]) {
        (&self.0.j1, &self.0.j2, &self.0.j)
    }

    /// Column exponents of the message matrix, ascending.
    pub fn exponents(&self) -> &[usize] {
        &self.0.j
    }

    /// Column position of exponent `degree` in the message matrix.
    pub fn position_of(&self, degree: usize) -> Option<usize> {
        self.0.position.get(degree).copied().flatten()
    }

    pub fn max_degree(&self) -> usize {
        self.0.position.len() - 1
    }

    pub fn check_node(&self, id: NodeId) -> Result<()> {
        if id.rack < self.0.racks && id.slot < self.0.u {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange(id))
        }
    }

    pub fn check_rack(&self, e: usize) -> Result<()> {
        if e < self.0.racks {
            Ok(())
        } else {
            Err(Error::RackOutOfRange(e))
        }
    }

    pub fn node_index(&self, id: NodeId) -> usize {
        id.rack * self.0.u + id.slot
    }

    pub fn node_at(&self, index: usize) -> NodeId {
        NodeId::new(index / self.0.u, index % self.0.u)
    }

    /// All nodes in ascending order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.0.n).map(|i| self.node_at(i))
    }

    pub fn rack_nodes(&self, e: usize) -> impl Iterator<Item = NodeId> {
        (0..self.0.u).map(move |g| NodeId::new(e, g))
    }

    /// `lambda_(e,g) = xi^e * eta^g`
    pub fn evaluation_point(&self, id: NodeId) -> Result<Elem> {
        self.check_node(id)?;
        Ok(self.0.lambdas[self.node_index(id)])
    }

    pub(crate) fn lambda(&self, id: NodeId) -> Elem {
        self.0.lambdas[self.node_index(id)]
    }

    /// `xi^(e*u)`, the rack-level point shared by every node of rack `e`
    /// after raising to the `u`-th power.
    pub fn rack_point(&self, e: usize) -> Elem {
        self.0.field.pow_u(self.0.xi, e * self.0.u)
    }

    /// `phi_e = (1, x_e, ..., x_e^(d-1))` with `x_e = xi^(e*u)`.
    pub fn rack_vector(&self, e: usize) -> Vec<Elem> {
        let f = &self.0.field;
        let x = self.rack_point(e);
        let mut out = Vec::with_capacity(self.0.d);
        let mut p = Elem::ONE;
        for _ in 0..self.0.d {
            out.push(p);
            p = f.mul(p, x);
        }
        out
    }

    pub(crate) fn cells(&self) -> &[Cell] {
        &self.0.cells
    }

    pub(crate) fn encoding_cache(&self) -> &OnceLock<Matrix> {
        &self.0.encoding
    }

    /// Storage overhead `n * alpha / B` as an exact fraction `(num, den)`.
    pub fn storage_overhead(&self) -> (usize, usize) {
        (self.0.n * self.alpha(), self.0.b)
    }
}

fn build_cells(
    u: usize,
    d: usize,
    k_bar: usize,
    j: &[usize],
    position: &[Option<usize>],
) -> Vec<Cell> {
    let cols = j.len();
    let mut cells = vec![Cell::Zero; d * cols];
    let mut next = 0;
    for (c, &deg) in j.iter().enumerate() {
        let in_j1 = deg % u == u - 1 && deg / u < d;
        for i in 0..d {
            let cell = if in_j1 {
                let t = deg / u;
                if i >= k_bar && t >= k_bar {
                    Cell::Zero
                } else if i < t {
                    let src_col = position[i * u + u - 1].expect("J1 exponent is in J");
                    match cells[t * cols + src_col] {
                        Cell::Free(idx) | Cell::Mirror(idx) => Cell::Mirror(idx),
                        Cell::Zero => Cell::Zero,
                    }
                } else {
                    next += 1;
                    Cell::Free(next - 1)
                }
            } else {
                next += 1;
                Cell::Free(next - 1)
            };
            cells[i * cols + c] = cell;
        }
    }
    cells
}

/// The `d x |J|` message matrix. Always structurally valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageMatrix {
    params: CodeParams,
    entries: Vec<Elem>,
}

impl MessageMatrix {
    pub fn zero(params: &CodeParams) -> Self {
        MessageMatrix {
            params: params.clone(),
            entries: vec![Elem::ZERO; params.d() * params.exponents().len()],
        }
    }

    /// Places `data` (exactly `B` symbols) into the message matrix.
    pub fn fill(params: &CodeParams, data: &[Elem]) -> Result<Self> {
        if data.len() != params.b() {
            return Err(Error::DataLength { expected: params.b(), got: data.len() });
        }
        let entries = params
            .cells()
            .iter()
            .map(|cell| match *cell {
                Cell::Free(idx) | Cell::Mirror(idx) => data[idx],
                Cell::Zero => Elem::ZERO,
            })
            .collect();
        Ok(MessageMatrix { params: params.clone(), entries })
    }

    /// Inverse of [`MessageMatrix::fill`].
    pub fn unfill(&self) -> Vec<Elem> {
        let mut data = vec![Elem::ZERO; self.params.b()];
        for (cell, &v) in self.params.cells().iter().zip(&self.entries) {
            if let Cell::Free(idx) = *cell {
                data[idx] = v;
            }
        }
        data
    }

    /// Builds a message matrix from a `d x |J|` matrix, rejecting anything
    /// that breaks the symmetry or zero block of `M1`.
    pub fn from_matrix(params: &CodeParams, m: &Matrix) -> Result<Self> {
        let cols = params.exponents().len();
        if m.rows() != params.d() || m.cols() != cols {
            return Err(Error::Dimension(format!(
                "message matrix must be {}x{}, got {}x{}",
                params.d(),
                cols,
                m.rows(),
                m.cols()
            )));
        }
        let entries: Vec<Elem> = (0..m.rows()).flat_map(|i| m.row(i).to_vec()).collect();
        let mut first = vec![None; params.b()];
        for (pos, cell) in params.cells().iter().enumerate() {
            if let Cell::Free(idx) = *cell {
                first[idx] = Some(entries[pos]);
            }
        }
        for (pos, cell) in params.cells().iter().enumerate() {
            let ok = match *cell {
                Cell::Free(_) => true,
                Cell::Mirror(idx) => first[idx] == Some(entries[pos]),
                Cell::Zero => entries[pos].is_zero(),
            };
            if !ok {
                let (row, c) = (pos / cols, pos % cols);
                return Err(Error::MessageStructure { row, col: params.exponents()[c] });
            }
        }
        Ok(MessageMatrix { params: params.clone(), entries })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn rows(&self) -> usize {
        self.params.d()
    }

    /// `m_{i,j}` for exponent `j`; zero when `j` is not in `J`.
    pub fn coeff(&self, i: usize, degree: usize) -> Elem {
        match self.params.position_of(degree) {
            Some(c) => self.entries[i * self.params.exponents().len() + c],
            None => Elem::ZERO,
        }
    }

    /// Entry `(i, t)` of the symmetric block `M1`.
    pub fn m1(&self, i: usize, t: usize) -> Elem {
        let u = self.params.u();
        self.coeff(i, t * u + u - 1)
    }

    /// `M1` as a `d x d` matrix.
    pub fn m1_matrix(&self) -> Matrix {
        let d = self.params.d();
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            for t in 0..d {
                m[(i, t)] = self.m1(i, t);
            }
        }
        m
    }

    /// Row `i` restricted to the columns in `J`.
    pub fn row(&self, i: usize) -> &[Elem] {
        let cols = self.params.exponents().len();
        &self.entries[i * cols..(i + 1) * cols]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_rows(self.params.d(), self.params.exponents().len(), self.entries.clone())
            .expect("entries sized at construction")
    }

    /// `a * self + other`
    pub fn scale_add(&self, a: Elem, other: &MessageMatrix) -> MessageMatrix {
        let f = self.params.field();
        let entries =
            self.entries.iter().zip(&other.entries).map(|(&x, &y)| f.mul_add(y, a, x)).collect();
        MessageMatrix { params: self.params.clone(), entries }
    }
}

/// The `d x n` code matrix; column `(e, g)` is what node `(e, g)` stores.
/// Columns may be erased.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeMatrix {
    params: CodeParams,
    columns: Vec<Option<Vec<Elem>>>,
}

impl CodeMatrix {
    pub fn from_matrix(params: &CodeParams, m: &Matrix) -> Result<Self> {
        if m.rows() != params.alpha() || m.cols() != params.n() {
            return Err(Error::Dimension(format!(
                "code matrix must be {}x{}, got {}x{}",
                params.alpha(),
                params.n(),
                m.rows(),
                m.cols()
            )));
        }
        let columns = (0..params.n()).map(|c| Some(m.column(c))).collect();
        Ok(CodeMatrix { params: params.clone(), columns })
    }

    /// All columns erased.
    pub fn empty(params: &CodeParams) -> Self {
        CodeMatrix { params: params.clone(), columns: vec![None; params.n()] }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn column(&self, id: NodeId) -> Option<&[Elem]> {
        if self.params.check_node(id).is_err() {
            return None;
        }
        self.columns[self.params.node_index(id)].as_deref()
    }

    pub fn set_column(&mut self, id: NodeId, symbols: Vec<Elem>) -> Result<()> {
        self.params.check_node(id)?;
        if symbols.len() != self.params.alpha() {
            return Err(Error::SymbolCount(id));
        }
        let idx = self.params.node_index(id);
        self.columns[idx] = Some(symbols);
        Ok(())
    }

    /// Drops the column of `id`, returning what it held.
    pub fn erase(&mut self, id: NodeId) -> Option<Vec<Elem>> {
        self.params.check_node(id).ok()?;
        let idx = self.params.node_index(id);
        self.columns[idx].take()
    }

    pub fn is_complete(&self) -> bool {
        self.columns.iter().all(Option::is_some)
    }

    /// Entry `(i, id)`, if the column is present.
    pub fn get(&self, i: usize, id: NodeId) -> Option<Elem> {
        self.column(id).and_then(|c| c.get(i).copied())
    }

    pub fn to_matrix(&self) -> Option<Matrix> {
        let mut m = Matrix::zeros(self.params.alpha(), self.params.n());
        for (c, col) in self.columns.iter().enumerate() {
            for (i, &v) in col.as_ref()?.iter().enumerate() {
                m[(i, c)] = v;
            }
        }
        Some(m)
    }
}
