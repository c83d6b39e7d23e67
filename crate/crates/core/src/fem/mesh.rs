use std::ops::RangeInclusive;

use super::basis::check_order;
use crate::error::{Error, Result};

/// One-dimensional partition with order-`r` Lagrange elements.
///
/// Element `e` owns the global degrees of freedom `e*r ..= e*r + r`; the
/// endpoints are shared with the neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    breaks: Vec<f64>,
    nodes: Vec<f64>,
    order: usize,
}

impl Mesh {
    /// Uniform mesh with `n_elements` elements of width `(x_max - x_min) / n_elements`.
    pub fn uniform(x_min: f64, x_max: f64, n_elements: usize, order: usize) -> Result<Mesh> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::invalid(
                "x_min",
                format!("degenerate interval [{x_min}, {x_max}]"),
            ));
        }
        if n_elements == 0 {
            return Err(Error::invalid("n_elements", "need at least one element"));
        }
        let width = (x_max - x_min) / n_elements as f64;
        let mut breaks: Vec<f64> = (0..=n_elements)
            .map(|i| x_min + width * i as f64)
            .collect();
        breaks[n_elements] = x_max;
        Mesh::from_breakpoints(breaks, order)
    }

    /// Mesh on an explicit, strictly increasing list of element endpoints.
    pub fn from_breakpoints(breaks: Vec<f64>, order: usize) -> Result<Mesh> {
        check_order(order)?;
        if breaks.len() < 2 {
            return Err(Error::invalid("breakpoints", "need at least two points"));
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "breakpoints",
                "must be finite and strictly increasing",
            ));
        }
        let n_elements = breaks.len() - 1;
        let mut nodes = Vec::with_capacity(n_elements * order + 1);
        for e in 0..n_elements {
            let (left, right) = (breaks[e], breaks[e + 1]);
            for a in 0..order {
                nodes.push(left + (right - left) * a as f64 / order as f64);
            }
        }
        nodes.push(breaks[n_elements]);
        Ok(Mesh {
            breaks,
            nodes,
            order,
        })
    }

    /// Moves the interior breakpoint closest to `x` onto `x`, unless `x`
    /// already is a breakpoint or lies outside the mesh.
    pub fn align_breakpoint(self, x: f64) -> Result<Mesh> {
        if x <= self.x_min() || x >= self.x_max() || self.n_elements() < 2 {
            return Ok(self);
        }
        let n = self.breaks.len();
        let nearest = (1..n - 1)
            .min_by(|&a, &b| {
                (self.breaks[a] - x)
                    .abs()
                    .total_cmp(&(self.breaks[b] - x).abs())
            })
            .expect("at least one interior breakpoint");
        if self.breaks[nearest] == x {
            return Ok(self);
        }
        let mut breaks = self.breaks;
        breaks[nearest] = x;
        Mesh::from_breakpoints(breaks, self.order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_elements(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn dof_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_coords(&self) -> &[f64] {
        &self.nodes
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn x_min(&self) -> f64 {
        self.breaks[0]
    }

    pub fn x_max(&self) -> f64 {
        self.breaks[self.breaks.len() - 1]
    }

    pub fn element_span(&self, e: usize) -> (f64, f64) {
        (self.breaks[e], self.breaks[e + 1])
    }

    pub fn element_spans(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breaks.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn element_width(&self, e: usize) -> f64 {
        self.breaks[e + 1] - self.breaks[e]
    }

    /// Largest element width `h`.
    pub fn h(&self) -> f64 {
        self.breaks
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn element_dofs(&self, e: usize) -> RangeInclusive<usize> {
        e * self.order..=e * self.order + self.order
    }

    /// Element containing `x`; interior breakpoints belong to the element on
    /// their right, `x_max` to the last element.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(x >= self.x_min() && x <= self.x_max()) {
            return None;
        }
        let idx = self.breaks.partition_point(|&b| b <= x);
        Some(idx.saturating_sub(1).min(self.n_elements() - 1))
    }

    /// Parent coordinate of `x` within element `e`, clamped to `[-1, 1]`.
    pub fn to_parent(&self, e: usize, x: f64) -> f64 {
        let (left, right) = self.element_span(e);
        (2.0 * (x - left) / (right - left) - 1.0).clamp(-1.0, 1.0)
    }

    pub fn to_physical(&self, e: usize, xi: f64) -> f64 {
        let (left, right) = self.element_span(e);
        left + 0.5 * (xi + 1.0) * (right - left)
    }
}

pub fn build_mesh(x_min: f64, x_max: f64, n_elements: usize, order: usize) -> Result<Mesh> {
    Mesh::uniform(x_min, x_max, n_elements, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_examples() {
        let m = build_mesh(0.0, 1.0, 4, 1).unwrap();
        assert_eq!(m.node_coords(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = build_mesh(-4.0, 4.0, 1024, 1).unwrap();
        assert_eq!(m.h(), 0.0078125);
        assert_eq!(m.dof_count(), 1025);
        let m = build_mesh(0.0, 1.0, 2, 3).unwrap();
        assert_eq!(m.dof_count(), 7);
        assert!(m.node_coords().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn invalid_meshes() {
        assert!(build_mesh(1.0, 1.0, 4, 1).is_err());
        assert!(build_mesh(0.0, 1.0, 0, 1).is_err());
        assert!(build_mesh(0.0, 1.0, 4, 5).is_err());
        assert!(Mesh::from_breakpoints(vec![0.0, 0.5, 0.5, 1.0], 1).is_err());
    }

    #[test]
    fn locate_and_parent_map() {
        let m = build_mesh(0.0, 1.0, 4, 2).unwrap();
        assert_eq!(m.locate(0.0), Some(0));
        assert_eq!(m.locate(0.25), Some(1));
        assert_eq!(m.locate(1.0), Some(3));
        assert_eq!(m.locate(1.1), None);
        assert!((m.to_parent(1, 0.375) - 0.0).abs() < 1e-15);
        assert_eq!(m.element_dofs(1), 2..=4);
        assert!((m.node_coords()[3] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn alignment_places_a_node() {
        let m = build_mesh(-1.0, 2.0, 5, 1).unwrap().align_breakpoint(0.0).unwrap();
        assert!(m.breakpoints().contains(&0.0));
        assert_eq!(m.n_elements(), 5);
        let untouched = build_mesh(-4.0, 4.0, 8, 1).unwrap();
        assert_eq!(untouched.clone().align_breakpoint(0.0).unwrap(), untouched);
    }
}
