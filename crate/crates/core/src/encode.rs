//! Encoder: row polynomials `f_i(x) = sum_{j in J} m_{i,j} x^j` evaluated at
//! every node's point, i.e. `C = M * Lambda`.

use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::layout::{CodeMatrix, CodeParams, MessageMatrix, NodeId};
use crate::linalg::{matmul, Matrix, Poly};

/// `Lambda[j][(e,g)] = lambda_(e,g)^j` for `j` in `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingMatrix(pub Matrix);

impl EncodingMatrix {
    pub fn new(params: &CodeParams) -> Self {
        let f = params.field();
        let exps = params.exponents();
        let mut m = Matrix::zeros(exps.len(), params.n());
        for (c, id) in params.nodes().enumerate() {
            let x = params.lambda(id);
            for (r, &j) in exps.iter().enumerate() {
                m[(r, c)] = f.pow_u(x, j);
            }
        }
        EncodingMatrix(m)
    }
}

/// Cached `Lambda` for `params`.
pub fn encoding_matrix(params: &CodeParams) -> &Matrix {
    params.encoding_cache().get_or_init(|| EncodingMatrix::new(params).0)
}

/// `f_i` as a dense coefficient vector up to `max(J)`.
pub fn row_polynomial(m: &MessageMatrix, i: usize) -> Result<Poly> {
    let params = m.params();
    if i >= params.d() {
        return Err(Error::RowOutOfRange(i));
    }
    let mut coeffs = vec![Elem::ZERO; params.max_degree() + 1];
    for (&j, &v) in params.exponents().iter().zip(m.row(i)) {
        coeffs[j] = v;
    }
    Ok(Poly::new(coeffs))
}

/// `C = M * Lambda`.
pub fn encode(m: &MessageMatrix) -> CodeMatrix {
    let params = m.params();
    let c = matmul(params.field(), &m.to_matrix(), encoding_matrix(params))
        .expect("message and encoding matrices agree in shape");
    CodeMatrix::from_matrix(params, &c).expect("product has code shape")
}

/// Same codeword as [`encode`], computed node by node with Horner's rule.
pub fn encode_by_evaluation(m: &MessageMatrix) -> CodeMatrix {
    let params = m.params();
    let polys: Vec<Poly> =
        (0..params.d()).map(|i| row_polynomial(m, i).expect("row in range")).collect();
    let mut c = CodeMatrix::empty(params);
    for id in params.nodes() {
        let x = params.lambda(id);
        let col = polys.iter().map(|p| p.eval(params.field(), x)).collect();
        c.set_column(id, col).expect("alpha symbols");
    }
    c
}

/// What node `id` stores, without materialising `Lambda`.
pub fn node_column(m: &MessageMatrix, id: NodeId) -> Result<Vec<Elem>> {
    let params = m.params();
    let x = params.evaluation_point(id)?;
    let f = params.field();
    let exps = params.exponents();
    // powers of x at each exponent in J, walked incrementally
    let mut powers = Vec::with_capacity(exps.len());
    let mut p = Elem::ONE;
    let mut deg = 0;
    for &j in exps {
        while deg < j {
            p = f.mul(p, x);
            deg += 1;
        }
        powers.push(p);
    }
    Ok((0..params.d()).map(|i| f.dot(m.row(i), &powers)).collect())
}
