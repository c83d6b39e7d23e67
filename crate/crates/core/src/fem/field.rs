use std::sync::Arc;

use super::basis::eval_basis;
use super::mesh::Mesh;
use crate::error::{Error, Result};

/// Nodal coefficients of a finite element function at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    mesh: Arc<Mesh>,
    coefficients: Vec<f64>,
    time: f64,
}

impl SolutionField {
    pub fn new(mesh: Arc<Mesh>, coefficients: Vec<f64>, time: f64) -> Result<Self> {
        if coefficients.len() != mesh.dof_count() {
            return Err(Error::InconsistentInput(format!(
                "{} coefficients for a mesh with {} degrees of freedom",
                coefficients.len(),
                mesh.dof_count()
            )));
        }
        if let Some(i) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(Error::InconsistentInput(format!(
                "coefficient {i} is not finite"
            )));
        }
        Ok(SolutionField {
            mesh,
            coefficients,
            time,
        })
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Arc<Mesh>, f: impl Fn(f64) -> f64, time: f64) -> Result<Self> {
        let coefficients = mesh.node_coords().iter().map(|&x| f(x)).collect();
        SolutionField::new(mesh, coefficients, time)
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn same_mesh(&self, mesh: &Mesh) -> bool {
        std::ptr::eq(self.mesh.as_ref(), mesh) || self.mesh.as_ref() == mesh
    }

    fn check_domain(&self, x: f64) -> Result<usize> {
        self.mesh.locate(x).ok_or(Error::Domain {
            what: "x",
            value: x,
            lower: self.mesh.x_min(),
            upper: self.mesh.x_max(),
        })
    }

    /// `(u_h(x), u_h'(x))` evaluated inside element `e`.
    pub fn eval_in_element(&self, e: usize, x: f64) -> (f64, f64) {
        let order = self.mesh.order();
        let mut values = [0.0; 5];
        let mut derivs = [0.0; 5];
        let xi = self.mesh.to_parent(e, x);
        eval_basis(order, xi, &mut values[..=order], &mut derivs[..=order]);
        let jac = 2.0 / self.mesh.element_width(e);
        let dofs = self.mesh.element_dofs(e);
        let coeffs = &self.coefficients[dofs];
        let value = coeffs.iter().zip(&values).map(|(c, v)| c * v).sum();
        let slope: f64 = coeffs.iter().zip(&derivs).map(|(c, d)| c * d).sum();
        (value, slope * jac)
    }

    /// `sum_i u_i N_i(x)`; exact at the nodes.
    pub fn value(&self, x: f64) -> Result<f64> {
        let e = self.check_domain(x)?;
        Ok(self.eval_in_element(e, x).0)
    }

    /// Spatial derivative, taken from the element to the right of an
    /// interior breakpoint.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let e = self.check_domain(x)?;
        Ok(self.eval_in_element(e, x).1)
    }

    /// Discrete L2 norm by Gauss quadrature with `order + 2` points per element.
    pub fn l2_norm(&self) -> f64 {
        let rule = super::quadrature::gauss_rule(self.mesh.order() + 2).expect("order <= 4");
        let mut sum = 0.0;
        for e in 0..self.mesh.n_elements() {
            let half = 0.5 * self.mesh.element_width(e);
            for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
                let x = self.mesh.to_physical(e, xi);
                let u = self.eval_in_element(e, x).0;
                sum += w * half * u * u;
            }
        }
        sum.sqrt()
    }
}
