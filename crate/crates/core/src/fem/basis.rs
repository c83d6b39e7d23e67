use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

/// Equally spaced parent nodes `-1 + 2a/r`.
pub fn parent_nodes(order: usize) -> Vec<f64> {
    (0..=order)
        .map(|a| -1.0 + 2.0 * a as f64 / order as f64)
        .collect()
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if (1..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(Error::invalid(
            "order",
            format!("supported element orders are 1..={MAX_ORDER}, got {order}"),
        ))
    }
}

/// Fills `values` and `derivs` (length `order + 1`) with the Lagrange
/// shape functions and their parent-coordinate derivatives at `xi`.
pub(crate) fn eval_basis(order: usize, xi: f64, values: &mut [f64], derivs: &mut [f64]) {
    let n = order + 1;
    let node = |a: usize| -1.0 + 2.0 * a as f64 / order as f64;
    for a in 0..n {
        let xa = node(a);
        let mut value = 1.0;
        let mut deriv = 0.0;
        for b in (0..n).filter(|&b| b != a) {
            let xb = node(b);
            let factor = (xi - xb) / (xa - xb);
            // product rule, accumulated incrementally
            deriv = deriv * factor + value / (xa - xb);
            value *= factor;
        }
        values[a] = value;
        derivs[a] = deriv;
    }
}

/// Lagrange basis of degree `order` on equally spaced parent nodes,
/// evaluated at the parent coordinate `xi`.
pub fn reference_basis(order: usize, xi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_order(order)?;
    if !(-1.0..=1.0).contains(&xi) {
        return Err(Error::Domain {
            what: "xi",
            value: xi,
            lower: -1.0,
            upper: 1.0,
        });
    }
    let mut values = vec![0.0; order + 1];
    let mut derivs = vec![0.0; order + 1];
    eval_basis(order, xi, &mut values, &mut derivs);
    Ok((values, derivs))
}

/// Basis values and derivatives tabulated at the points of a quadrature rule.
#[derive(Debug, Clone)]
pub(crate) struct BasisTable {
    pub n_local: usize,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl BasisTable {
    pub fn new(order: usize, points: &[f64]) -> Self {
        let n_local = order + 1;
        let mut values = vec![0.0; n_local * points.len()];
        let mut derivs = vec![0.0; n_local * points.len()];
        for (q, &xi) in points.iter().enumerate() {
            let range = q * n_local..(q + 1) * n_local;
            eval_basis(order, xi, &mut values[range.clone()], &mut derivs[range]);
        }
        BasisTable {
            n_local,
            values,
            derivs,
        }
    }

    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_local..(q + 1) * self.n_local]
    }

    pub fn derivs(&self, q: usize) -> &[f64] {
        &self.derivs[q * self.n_local..(q + 1) * self.n_local]
    }
}
