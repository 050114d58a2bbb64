//! Closed-form quantum values of the two contextuality inequalities.
//!
//! The pair sum in `S = Σ A_i − ¼ Σ_⟨i,j⟩ A_i A_j` runs over *ordered*
//! compatible pairs, i.e. every one of the 24 edges enters twice. With that
//! weighting `S = (25/3)·I` and the noncontextual maximum is 8.

use nalgebra::Matrix3;
use num_complex::Complex64;

use super::graph::{yu_oh_graph, CompatibilityGraph};
use super::operators::{observable, projector};
use super::state::DensityMatrix;
use super::{QutritError, Result, YuOh};

/// Weight of each ordered compatible pair in `S`.
pub const PAIR_WEIGHT: f64 = 0.25;
/// Effective weight of one unordered edge (both orderings).
pub const EDGE_WEIGHT: f64 = 2.0 * PAIR_WEIGHT;

pub const CLASSICAL_BOUND_2: f64 = 8.0;
pub const QUANTUM_VALUE_2: f64 = 25.0 / 3.0;
pub const CLASSICAL_BOUND_3: f64 = 1.0;
pub const QUANTUM_VALUE_3: f64 = 4.0 / 3.0;

/// Imaginary residue above which an expectation value is considered invalid.
const IMAG_TOLERANCE: f64 = 1e-10;

/// `S` for an arbitrary ray set and its compatibility graph.
pub fn s_operator_for(graph: &CompatibilityGraph) -> Result<Matrix3<Complex64>> {
    let obs = graph
        .rays()
        .iter()
        .map(|r| observable(r).map(|o| *o.matrix()))
        .collect::<Result<Vec<_>>>()?;
    let singles = obs.iter().fold(Matrix3::zeros(), |acc, a| acc + a);
    let pairs = graph.edges().iter().fold(Matrix3::zeros(), |acc, &(i, j)| {
        acc + obs[i] * obs[j] + obs[j] * obs[i]
    });
    Ok(singles - pairs.scale(PAIR_WEIGHT))
}

pub fn s_operator() -> Matrix3<Complex64> {
    s_operator_for(&yu_oh_graph()).expect("canonical rays are nonzero")
}

/// `Σ_α B_{h_α}` using the rays labelled h0..h3 in `graph`.
pub fn h_projector_sum_for(graph: &CompatibilityGraph) -> Result<Matrix3<Complex64>> {
    YuOh::H_RAYS.iter().try_fold(Matrix3::zeros(), |acc, h| {
        let idx = graph
            .index_of(h.label())
            .ok_or_else(|| QutritError::UnknownLabel(h.label().to_owned()))?;
        Ok(acc + projector(&graph.rays()[idx])?.matrix())
    })
}

pub fn h_projector_sum() -> Matrix3<Complex64> {
    h_projector_sum_for(&yu_oh_graph()).expect("canonical rays present")
}

/// Born-rule expectation `Tr(ρ·op)`.
///
/// Panics if the imaginary residue exceeds 1e-10, which only happens for a
/// non-Hermitian `op`.
pub fn expectation(state: &DensityMatrix, op: &Matrix3<Complex64>) -> f64 {
    let v = (state.matrix() * op).trace();
    assert!(
        v.im.abs() < IMAG_TOLERANCE,
        "expectation has imaginary part {}; operator not Hermitian",
        v.im
    );
    v.re
}

/// Quantum left-hand side of `Σ⟨A_i⟩ − ¼ Σ⟨A_iA_j⟩ ≤ 8`.
pub fn evaluate_ineq2(state: &DensityMatrix) -> f64 {
    expectation(state, &s_operator())
}

/// Quantum left-hand side of `Σ_α ⟨B_{h_α}⟩ ≤ 1`.
pub fn evaluate_ineq3(state: &DensityMatrix) -> f64 {
    expectation(state, &h_projector_sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qutrit::{commutator_norm, compatibility, yu_oh_rays, Ket, Ray};

    fn identity_dev(m: &Matrix3<Complex64>, scale: f64) -> f64 {
        (m - Matrix3::<Complex64>::identity().scale(scale)).camax()
    }

    #[test]
    fn s_is_25_thirds_identity() {
        let s = s_operator();
        assert!(identity_dev(&s, 25.0 / 3.0) < 1e-12);
        assert!((s.trace().re - 25.0).abs() < 1e-12);
    }

    #[test]
    fn h_sum_is_4_thirds_identity() {
        let h = h_projector_sum();
        assert!(identity_dev(&h, 4.0 / 3.0) < 1e-12);
        assert!((h.trace().re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_state_values() {
        let rho = Ket::uniform().density();
        assert!((evaluate_ineq2(&rho) - 25.0 / 3.0).abs() < 1e-12);
        assert!((evaluate_ineq3(&rho) - 4.0 / 3.0).abs() < 1e-12);
        let hsum = h_projector_sum();
        assert!((expectation(&rho, &hsum) - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_values() {
        let rho = DensityMatrix::maximally_mixed();
        assert!((evaluate_ineq2(&rho) - 25.0 / 3.0).abs() < 1e-12);
        assert!((evaluate_ineq3(&rho) - 4.0 / 3.0).abs() < 1e-12);
        for r in yu_oh_rays() {
            let a = observable(&r).unwrap();
            assert!((expectation(&rho, a.matrix()) - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn born_rule_examples() {
        let a_z1 = observable(&YuOh::Z1.ray()).unwrap();
        let s = Ket::uniform().density();
        assert!((expectation(&s, a_z1.matrix()) - 1.0 / 3.0).abs() < 1e-14);
        let zero = Ket::basis(0).density();
        assert!((expectation(&zero, a_z1.matrix()) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn compatible_observables_commute() {
        let g = yu_oh_graph();
        let obs: Vec<_> = g.rays().iter().map(|r| observable(r).unwrap()).collect();
        for &(i, j) in g.edges() {
            assert!(commutator_norm(obs[i].matrix(), obs[j].matrix()) < 1e-12);
        }
    }

    #[test]
    fn perturbed_ray_breaks_identities() {
        let mut rays = yu_oh_rays();
        rays[YuOh::H0.index()] = Ray::new("h0", [1, 1, 0]);
        let g = compatibility(&rays);
        assert!(identity_dev(&s_operator_for(&g).unwrap(), 25.0 / 3.0) > 1e-3);
        assert!(identity_dev(&h_projector_sum_for(&g).unwrap(), 4.0 / 3.0) > 1e-3);
    }

    #[test]
    fn missing_h_ray_is_an_error() {
        let g = compatibility(&yu_oh_rays()[..9]);
        assert!(matches!(
            h_projector_sum_for(&g),
            Err(QutritError::UnknownLabel(_))
        ));
    }
}
