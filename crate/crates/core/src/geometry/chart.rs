use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::sampling::halton_points;
use crate::symexpr::Binding;

/// Sign of the volume form on `(x^0, x^1, ...)` in coordinate order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// Coordinate chart: coordinate and parameter names, a sampling box per
/// coordinate, and margins that keep samples off singular loci.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    coords: Vec<String>,
    params: Vec<(String, f64)>,
    boxes: Vec<(f64, f64)>,
    margins: Vec<f64>,
    orientation: Orientation,
}

impl Chart {
    /// Chart with the given coordinates; every sampling box starts as `[0, 1]`.
    pub fn new(coords: &[&str]) -> Result<Chart> {
        let coords: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{}`", c)));
            }
        }
        let n = coords.len();
        Ok(Chart {
            coords,
            params: Vec::new(),
            boxes: vec![(0.0, 1.0); n],
            margins: vec![0.0; n],
            orientation: Orientation::Positive,
        })
    }

    pub fn with_box(mut self, coord: &str, lo: f64, hi: f64) -> Result<Chart> {
        let i = self.index_of(coord)?;
        self.boxes[i] = (lo, hi);
        Ok(self)
    }

    pub fn with_margin(mut self, coord: &str, eps: f64) -> Result<Chart> {
        let i = self.index_of(coord)?;
        self.margins[i] = eps;
        Ok(self)
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Result<Chart> {
        if self.coords.iter().any(|c| c == name) {
            return Err(Error::InvalidChart(format!(
                "parameter `{}` collides with a coordinate",
                name
            )));
        }
        match self.params.iter_mut().find(|(n, _)| n == name) {
            Some(p) => p.1 = value,
            None => self.params.push((name.to_string(), value)),
        }
        Ok(self)
    }

    pub fn with_orientation(mut self, o: Orientation) -> Chart {
        self.orientation = o;
        self
    }

    /// The same chart with one coordinate removed (parameters kept).
    pub fn without(&self, coord: &str) -> Result<Chart> {
        let i = self.index_of(coord)?;
        let mut c = self.clone();
        c.coords.remove(i);
        c.boxes.remove(i);
        c.margins.remove(i);
        Ok(c)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|p| p.1)
    }

    pub fn boxes(&self) -> &[(f64, f64)] {
        &self.boxes
    }

    pub fn margins(&self) -> &[f64] {
        &self.margins
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn index_of(&self, coord: &str) -> Result<usize> {
        self.coords
            .iter()
            .position(|c| c == coord)
            .ok_or_else(|| Error::InvalidChart(format!("unknown coordinate `{}`", coord)))
    }

    /// Sampling box with margins removed.
    pub fn sample_region(&self) -> Result<Vec<(f64, f64)>> {
        self.boxes
            .iter()
            .zip(&self.margins)
            .zip(&self.coords)
            .map(|((&(lo, hi), &m), c)| {
                let (a, b) = (lo + m, hi - m);
                if !(a < b) {
                    Err(Error::EmptySamplingRegion(c.clone()))
                } else {
                    Ok((a, b))
                }
            })
            .collect()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        match self.sample_region() {
            Ok(region) => point
                .iter()
                .zip(&region)
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi),
            Err(_) => false,
        }
    }

    /// `n` quasi-random points inside the sampling region.
    pub fn sample_points(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let region = self.sample_region()?;
        Ok(halton_points(&region, n, seed))
    }

    /// Names of all tape inputs: coordinates followed by parameters.
    pub fn input_names(&self) -> Vec<String> {
        self.coords
            .iter()
            .cloned()
            .chain(self.params.iter().map(|(n, _)| n.clone()))
            .collect()
    }

    /// Tape inputs for a coordinate point (parameters at their defaults).
    pub fn inputs_at(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .copied()
            .chain(self.params.iter().map(|p| p.1))
            .collect()
    }

    pub fn binding_at(&self, point: &[f64]) -> Binding {
        self.input_names().into_iter().zip(self.inputs_at(point)).collect()
    }
}
