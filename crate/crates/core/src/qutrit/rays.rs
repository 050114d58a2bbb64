//! The thirteen Yu–Oh directions and general integer rays.
//!
//! Components (unnormalized) in the basis {|0⟩, |1⟩, |2⟩}:
//!
//! | label | components  |   | label | components  |
//! |-------|-------------|---|-------|-------------|
//! | z1    | ( 1, 0, 0)  |   | y3-   | ( 1,-1, 0)  |
//! | z2    | ( 0, 1, 0)  |   | y3+   | ( 1, 1, 0)  |
//! | z3    | ( 0, 0, 1)  |   | h0    | ( 1, 1, 1)  |
//! | y1-   | ( 0, 1,-1)  |   | h1    | (-1, 1, 1)  |
//! | y1+   | ( 0, 1, 1)  |   | h2    | ( 1,-1, 1)  |
//! | y2-   | (-1, 0, 1)  |   | h3    | ( 1, 1,-1)  |
//! | y2+   | ( 1, 0, 1)  |   |       |             |

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{QutritError, Result};

/// One of the thirteen Yu–Oh observables, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum YuOh {
    #[serde(rename = "z1")]
    Z1,
    #[serde(rename = "z2")]
    Z2,
    #[serde(rename = "z3")]
    Z3,
    #[serde(rename = "y1-")]
    Y1Minus,
    #[serde(rename = "y1+")]
    Y1Plus,
    #[serde(rename = "y2-")]
    Y2Minus,
    #[serde(rename = "y2+")]
    Y2Plus,
    #[serde(rename = "y3-")]
    Y3Minus,
    #[serde(rename = "y3+")]
    Y3Plus,
    #[serde(rename = "h0")]
    H0,
    #[serde(rename = "h1")]
    H1,
    #[serde(rename = "h2")]
    H2,
    #[serde(rename = "h3")]
    H3,
}

impl YuOh {
    pub const COUNT: usize = 13;

    pub const ALL: [YuOh; 13] = [
        YuOh::Z1,
        YuOh::Z2,
        YuOh::Z3,
        YuOh::Y1Minus,
        YuOh::Y1Plus,
        YuOh::Y2Minus,
        YuOh::Y2Plus,
        YuOh::Y3Minus,
        YuOh::Y3Plus,
        YuOh::H0,
        YuOh::H1,
        YuOh::H2,
        YuOh::H3,
    ];

    pub const H_RAYS: [YuOh; 4] = [YuOh::H0, YuOh::H1, YuOh::H2, YuOh::H3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            YuOh::Z1 => "z1",
            YuOh::Z2 => "z2",
            YuOh::Z3 => "z3",
            YuOh::Y1Minus => "y1-",
            YuOh::Y1Plus => "y1+",
            YuOh::Y2Minus => "y2-",
            YuOh::Y2Plus => "y2+",
            YuOh::Y3Minus => "y3-",
            YuOh::Y3Plus => "y3+",
            YuOh::H0 => "h0",
            YuOh::H1 => "h1",
            YuOh::H2 => "h2",
            YuOh::H3 => "h3",
        }
    }

    pub fn components(self) -> [i64; 3] {
        match self {
            YuOh::Z1 => [1, 0, 0],
            YuOh::Z2 => [0, 1, 0],
            YuOh::Z3 => [0, 0, 1],
            YuOh::Y1Minus => [0, 1, -1],
            YuOh::Y1Plus => [0, 1, 1],
            YuOh::Y2Minus => [-1, 0, 1],
            YuOh::Y2Plus => [1, 0, 1],
            YuOh::Y3Minus => [1, -1, 0],
            YuOh::Y3Plus => [1, 1, 0],
            YuOh::H0 => [1, 1, 1],
            YuOh::H1 => [-1, 1, 1],
            YuOh::H2 => [1, -1, 1],
            YuOh::H3 => [1, 1, -1],
        }
    }

    pub fn ray(self) -> Ray {
        Ray::new(self.label(), self.components())
    }

    /// Finds the Yu–Oh ray parallel (up to sign) to the given components.
    pub fn parallel_to(components: [i64; 3]) -> Option<Self> {
        let probe = Ray::new("probe", components);
        Self::ALL.into_iter().find(|y| y.ray().is_parallel(&probe))
    }
}

impl fmt::Display for YuOh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for YuOh {
    type Err = QutritError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|y| y.label() == s)
            .ok_or_else(|| QutritError::UnknownLabel(s.to_owned()))
    }
}

/// A direction in the qutrit space given by integer components.
///
/// Orthogonality is decided on these integers, never on normalized floats.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ray {
    pub label: String,
    pub components: [i64; 3],
}

impl Ray {
    pub fn new(label: impl Into<String>, components: [i64; 3]) -> Self {
        Self {
            label: label.into(),
            components,
        }
    }

    pub fn dot(&self, other: &Ray) -> i64 {
        self.components
            .iter()
            .zip(other.components.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> i64 {
        self.dot(self)
    }

    pub fn is_orthogonal(&self, other: &Ray) -> bool {
        self.dot(other) == 0
    }

    /// Parallel or antiparallel: the integer cross product vanishes.
    pub fn is_parallel(&self, other: &Ray) -> bool {
        let [a0, a1, a2] = self.components;
        let [b0, b1, b2] = other.components;
        self.norm_sqr() != 0
            && other.norm_sqr() != 0
            && a1 * b2 - a2 * b1 == 0
            && a2 * b0 - a0 * b2 == 0
            && a0 * b1 - a1 * b0 == 0
    }

    /// Integer cross product; orthogonal to both inputs.
    pub fn cross(&self, other: &Ray, label: impl Into<String>) -> Ray {
        let [a0, a1, a2] = self.components;
        let [b0, b1, b2] = other.components;
        Ray::new(
            label,
            [a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0],
        )
    }

    /// Components under the basis permutation |k⟩ → |perm[k]⟩.
    pub fn permuted(&self, perm: [usize; 3], label: impl Into<String>) -> Ray {
        let mut out = [0; 3];
        for (k, c) in self.components.iter().enumerate() {
            out[perm[k]] = *c;
        }
        Ray::new(label, out)
    }

    /// The normalized ket as a complex vector.
    pub fn unit(&self) -> Result<Vector3<Complex64>> {
        let n2 = self.norm_sqr();
        if n2 == 0 {
            return Err(QutritError::InvalidRay(self.label.clone()));
        }
        let n = (n2 as f64).sqrt();
        Ok(Vector3::from_iterator(
            self.components
                .iter()
                .map(|c| Complex64::new(*c as f64 / n, 0.0)),
        ))
    }

    pub fn yu_oh(&self) -> Option<YuOh> {
        self.label.parse().ok()
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.components;
        write!(f, "{}=({a},{b},{c})", self.label)
    }
}

/// The canonical 13 rays in order z1, z2, z3, y1-, y1+, y2-, y2+, y3-, y3+, h0..h3.
pub fn yu_oh_rays() -> Vec<Ray> {
    YuOh::ALL.iter().map(|y| y.ray()).collect()
}

/// Vectors completing {h_α, y3±} to an orthonormal basis:
/// h0c = (1,1,-2), h1c = (-1,1,-2), h2c = (1,-1,-2), h3c = (1,1,2), all over √6.
pub fn h_completion(h: YuOh) -> Option<Ray> {
    let (label, comps) = match h {
        YuOh::H0 => ("h0c", [1, 1, -2]),
        YuOh::H1 => ("h1c", [-1, 1, -2]),
        YuOh::H2 => ("h2c", [1, -1, -2]),
        YuOh::H3 => ("h3c", [1, 1, 2]),
        _ => return None,
    };
    Some(Ray::new(label, comps))
}
