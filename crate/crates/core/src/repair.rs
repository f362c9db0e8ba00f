//! Single-node repair at minimum cross-rack bandwidth.
//!
//! Inside rack `e` every row of the code agrees with a local polynomial
//! `h_i^(e)` of degree `< u`, because `lambda^(tu) = xi^(etu)` for every node
//! of the rack. The leading coefficients `h_e = (h_{0,u-1}^(e), ...)` satisfy
//! `h_e = M1 * phi_e` with `phi_e = (1, x_e, ..., x_e^(d-1))`, `x_e = xi^(eu)`,
//! which is a product-matrix MBR code across racks. A failed node is
//! regenerated by:
//!
//! 1. each of `d` helper racks computing `h_{e_i}` locally and sending the
//!    single symbol `phi_{e*}^t h_{e_i} = phi_{e_i}^t h_{e*}`,
//! 2. solving the `d x d` Vandermonde system for `h_{e*}`,
//! 3. interpolating the remaining degree `u - 2` part from the `u - 1`
//!    surviving nodes of the host rack.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::layout::{CodeMatrix, CodeParams, MessageMatrix, NodeId};
use crate::linalg::{interpolate, vandermonde_solve, Poly};
use crate::reconstruct::{check_columns, ObservedColumn};

/// Leading coefficients of rack `rack`'s local polynomials, one per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingVector {
    pub rack: usize,
    pub h: Vec<Elem>,
}

/// The one symbol a helper rack sends across racks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HelperSymbol {
    pub helper_rack: usize,
    pub target_rack: usize,
    pub value: Elem,
}

/// Symbol transfers during repair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BandwidthLedger {
    pub cross_rack_symbols: usize,
    /// Symbols read from host-rack survivors. Informational only.
    pub intra_rack_symbols: usize,
    pub per_helper: BTreeMap<usize, usize>,
}

impl BandwidthLedger {
    pub fn record_helper(&mut self, rack: usize, symbols: usize) {
        self.cross_rack_symbols += symbols;
        *self.per_helper.entry(rack).or_default() += symbols;
    }

    pub fn merge(&mut self, other: &BandwidthLedger) {
        self.cross_rack_symbols += other.cross_rack_symbols;
        self.intra_rack_symbols += other.intra_rack_symbols;
        for (&rack, &n) in &other.per_helper {
            *self.per_helper.entry(rack).or_default() += n;
        }
    }

    /// Sum over helpers; equals `cross_rack_symbols` when nothing was
    /// recorded outside [`BandwidthLedger::record_helper`].
    pub fn helper_total(&self) -> usize {
        self.per_helper.values().sum()
    }
}

/// `h_i^(e)` for every row `i`, from the message matrix directly.
pub fn local_polynomials(m: &MessageMatrix, e: usize) -> Result<Vec<Poly>> {
    let params = m.params();
    params.check_rack(e)?;
    let (u, u0, k_bar, d) = (params.u(), params.u0(), params.k_bar(), params.d());
    let f = params.field();
    let x = params.rack_point(e);
    let x_pows: Vec<Elem> = (0..=d.max(k_bar)).map(|t| f.pow_u(x, t)).collect();
    let polys = (0..d)
        .map(|i| {
            let coeffs = (0..u)
                .map(|j| {
                    let terms = if j < u0 {
                        k_bar + 1
                    } else if j < u - 1 {
                        k_bar
                    } else {
                        d
                    };
                    (0..terms).fold(Elem::ZERO, |acc, t| {
                        f.mul_add(acc, m.coeff(i, t * u + j), x_pows[t])
                    })
                })
                .collect();
            Poly::new(coeffs)
        })
        .collect();
    Ok(polys)
}

fn rack_columns<'a>(
    params: &CodeParams,
    e: usize,
    cols: &'a [ObservedColumn],
    skip: Option<usize>,
) -> Result<Vec<&'a ObservedColumn>> {
    params.check_rack(e)?;
    check_columns(params, cols)?;
    let expected = params.u() - usize::from(skip.is_some());
    if cols.len() != expected {
        return Err(Error::ColumnCount { expected, got: cols.len() });
    }
    (0..params.u())
        .filter(|&g| Some(g) != skip)
        .map(|g| {
            let id = NodeId::new(e, g);
            cols.iter().find(|c| c.id == id).ok_or(Error::MissingRackColumn { rack: e, missing: id })
        })
        .collect()
}

/// Leading vector of rack `e`, computed inside the rack from its `u`
/// stored columns.
pub fn rack_leading_vector(
    params: &CodeParams,
    e: usize,
    rack_cols: &[ObservedColumn],
) -> Result<LeadingVector> {
    let cols = rack_columns(params, e, rack_cols, None)?;
    let f = params.field();
    let points: Vec<Elem> = cols.iter().map(|c| params.lambda(c.id)).collect();
    let h = (0..params.d())
        .map(|i| {
            let values: Vec<Elem> = cols.iter().map(|c| c.symbols[i]).collect();
            interpolate(f, &points, &values).map(|p| p.coeff(params.u() - 1))
        })
        .collect::<Result<_>>()?;
    Ok(LeadingVector { rack: e, h })
}

/// `phi_{e*}^t h_{e_i}`: the whole cross-rack contribution of one helper.
pub fn helper_symbol(params: &CodeParams, target_rack: usize, hv: &LeadingVector) -> Result<HelperSymbol> {
    params.check_rack(target_rack)?;
    if hv.rack == target_rack {
        return Err(Error::HelperIsTarget(hv.rack));
    }
    if hv.h.len() != params.d() {
        return Err(Error::LengthMismatch { expected: params.d(), got: hv.h.len() });
    }
    let value = params.field().dot(&params.rack_vector(target_rack), &hv.h);
    Ok(HelperSymbol { helper_rack: hv.rack, target_rack, value })
}

/// Solves for `h_{e*}` from `d` helper symbols.
pub fn recover_leading_vector(
    params: &CodeParams,
    target_rack: usize,
    symbols: &[HelperSymbol],
) -> Result<LeadingVector> {
    params.check_rack(target_rack)?;
    if symbols.len() != params.d() {
        return Err(Error::HelperCount { expected: params.d(), got: symbols.len() });
    }
    let mut seen = BTreeSet::new();
    for s in symbols {
        params.check_rack(s.helper_rack)?;
        if s.helper_rack == target_rack {
            return Err(Error::HelperIsTarget(s.helper_rack));
        }
        if s.target_rack != target_rack {
            return Err(Error::RackMismatch { expected: target_rack, got: s.target_rack });
        }
        if !seen.insert(s.helper_rack) {
            return Err(Error::DuplicateHelper(s.helper_rack));
        }
    }
    let points: Vec<Elem> = symbols.iter().map(|s| params.rack_point(s.helper_rack)).collect();
    let rhs: Vec<Elem> = symbols.iter().map(|s| s.value).collect();
    let h = vandermonde_solve(params.field(), &points, &rhs)?;
    Ok(LeadingVector { rack: target_rack, h })
}

/// Regenerates node `(e*, g*)` from its `u - 1` rack mates and `h_{e*}`.
pub fn repair_local(
    params: &CodeParams,
    failed: NodeId,
    surviving: &[ObservedColumn],
    hv: &LeadingVector,
) -> Result<Vec<Elem>> {
    params.check_node(failed)?;
    if hv.rack != failed.rack {
        return Err(Error::RackMismatch { expected: failed.rack, got: hv.rack });
    }
    if hv.h.len() != params.d() {
        return Err(Error::LengthMismatch { expected: params.d(), got: hv.h.len() });
    }
    let cols = rack_columns(params, failed.rack, surviving, Some(failed.slot))?;
    let f = params.field();
    let top = params.u() - 1;
    let points: Vec<Elem> = cols.iter().map(|c| params.lambda(c.id)).collect();
    let lead_pows: Vec<Elem> = points.iter().map(|&x| f.pow_u(x, top)).collect();
    let target = params.lambda(failed);
    let target_lead = f.pow_u(target, top);
    (0..params.d())
        .map(|i| {
            let residual: Vec<Elem> = cols
                .iter()
                .zip(&lead_pows)
                .map(|(c, &xp)| f.sub(c.symbols[i], f.mul(hv.h[i], xp)))
                .collect();
            let low = interpolate(f, &points, &residual)?;
            Ok(f.mul_add(low.eval(f, target), hv.h[i], target_lead))
        })
        .collect()
}

/// Default helper policy: the lowest `d` rack indices other than `target`
/// for which `healthy` holds.
pub fn default_helpers(
    params: &CodeParams,
    target: usize,
    healthy: impl Fn(usize) -> bool,
) -> Result<Vec<usize>> {
    let helpers: Vec<usize> =
        (0..params.racks()).filter(|&e| e != target && healthy(e)).take(params.d()).collect();
    if helpers.len() < params.d() {
        return Err(Error::HelperCount { expected: params.d(), got: helpers.len() });
    }
    Ok(helpers)
}

pub(crate) fn check_helpers(params: &CodeParams, target: usize, helpers: &[usize]) -> Result<()> {
    if helpers.len() != params.d() {
        return Err(Error::HelperCount { expected: params.d(), got: helpers.len() });
    }
    let mut seen = BTreeSet::new();
    for &h in helpers {
        params.check_rack(h)?;
        if h == target {
            return Err(Error::HelperIsTarget(h));
        }
        if !seen.insert(h) {
            return Err(Error::DuplicateHelper(h));
        }
    }
    Ok(())
}

/// Regenerates the column of `failed` from the other columns of `c`.
///
/// The column of `failed` itself is never read. Requires every other node of
/// the host rack and every node of each helper rack; `helpers = None` uses
/// [`default_helpers`].
pub fn repair_node(
    c: &CodeMatrix,
    failed: NodeId,
    helpers: Option<&[usize]>,
) -> Result<(Vec<Elem>, BandwidthLedger)> {
    let params = c.params();
    params.check_node(failed)?;
    let e_star = failed.rack;
    let rack_complete = |e: usize| params.rack_nodes(e).all(|id| c.column(id).is_some());

    let survivors: Vec<NodeId> = params.rack_nodes(e_star).filter(|&id| id != failed).collect();
    if survivors.iter().any(|&id| c.column(id).is_none()) {
        return Err(Error::MultipleFailuresInRack { rack: e_star });
    }
    let helpers = match helpers {
        Some(h) => {
            check_helpers(params, e_star, h)?;
            if let Some(&bad) = h.iter().find(|&&e| !rack_complete(e)) {
                return Err(Error::HelperRackUnhealthy(bad));
            }
            h.to_vec()
        }
        None => default_helpers(params, e_star, rack_complete)?,
    };

    let mut ledger = BandwidthLedger::default();
    let mut symbols = Vec::with_capacity(helpers.len());
    for &e in &helpers {
        let ids: Vec<NodeId> = params.rack_nodes(e).collect();
        let hv = rack_leading_vector(params, e, &ObservedColumn::from_code(c, &ids))?;
        symbols.push(helper_symbol(params, e_star, &hv)?);
        ledger.record_helper(e, params.beta());
    }
    let hv = recover_leading_vector(params, e_star, &symbols)?;
    let local = ObservedColumn::from_code(c, &survivors);
    ledger.intra_rack_symbols = local.len() * params.alpha();
    let column = repair_local(params, failed, &local, &hv)?;

    if ledger.cross_rack_symbols != params.gamma() {
        return Err(Error::Bandwidth { expected: params.gamma(), got: ledger.cross_rack_symbols });
    }
    Ok((column, ledger))
}
