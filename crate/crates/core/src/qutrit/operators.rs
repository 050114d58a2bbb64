use nalgebra::Matrix3;
use num_complex::Complex64;

use super::rays::Ray;
use super::Result;

/// Rank-one projector |r⟩⟨r| onto a normalized ray.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: Matrix3<Complex64>,
    source: Ray,
}

impl Projector {
    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.matrix
    }

    pub fn source(&self) -> &Ray {
        &self.source
    }

    /// Tr(P Q); equals |⟨p|q⟩|² for rank-one projectors.
    pub fn overlap(&self, other: &Projector) -> f64 {
        (self.matrix * other.matrix).trace().re
    }
}

/// Dichotomic observable A = I − 2B with spectrum {+1, +1, −1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: Matrix3<Complex64>,
    source: Ray,
}

impl Observable {
    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.matrix
    }

    pub fn source(&self) -> &Ray {
        &self.source
    }
}

pub fn projector(r: &Ray) -> Result<Projector> {
    let v = r.unit()?;
    Ok(Projector {
        matrix: v * v.adjoint(),
        source: r.clone(),
    })
}

pub fn observable(r: &Ray) -> Result<Observable> {
    let p = projector(r)?;
    Ok(Observable {
        matrix: Matrix3::identity() - p.matrix.scale(2.0),
        source: p.source,
    })
}

/// ‖AB − BA‖ in the max-entry norm.
pub fn commutator_norm(a: &Matrix3<Complex64>, b: &Matrix3<Complex64>) -> f64 {
    (a * b - b * a).camax()
}
