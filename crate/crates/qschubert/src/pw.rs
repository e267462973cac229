//! Peterson-Woodward comparison: the unique lift λ_B of a G/P degree class,
//! the correction factor ω_P ω_{P'}, and G/P structure constants computed
//! through the G/B engine.

use crate::cartan::{CorootVector, RootSystem};
use crate::qhring::QuantumEngine;
use crate::weyl::{self, ParabolicSubset, WeylElement};
use crate::{Error, Result};
use num::BigInt;

/// The lift of a degree class λ_P ∈ Q^∨/Q_P^∨ to the coroot lattice.
#[derive(Debug, Clone)]
pub struct PWLift {
    /// Δ_P.
    pub parabolic: ParabolicSubset,
    /// The representative of λ_P the lift was computed from.
    pub lambda_p: CorootVector,
    /// The unique λ_B with λ_B ≡ λ_P mod Q_P^∨ and ⟨γ, λ_B⟩ ∈ {0,−1}
    /// for all γ ∈ R_P⁺.
    pub lambda_b: CorootVector,
    /// Δ_{P'} = {β ∈ Δ_P : ⟨β, λ_B⟩ = 0}.
    pub delta_p_prime: ParabolicSubset,
    /// ω_P ω_{P'}.
    pub omega_factor: WeylElement,
}

/// Positive roots supported on Δ_P.
fn parabolic_positive_roots<'a>(
    rs: &'a RootSystem,
    parabolic: &'a ParabolicSubset,
) -> impl Iterator<Item = &'a crate::cartan::Root> {
    rs.positive_roots().iter().filter(move |root| {
        root.root_coords
            .iter()
            .enumerate()
            .all(|(j, &c)| c == 0 || parabolic.contains(j + 1))
    })
}

/// Compute the Peterson-Woodward lift of λ_P.
///
/// The given representative must be effective outside Δ_P. The lift is
/// found by zeroing the Δ_P-coordinates and searching the box
/// `0 ..= 2·max(coords)+3` over the Δ_P-coordinates; the certificate
/// ⟨γ, λ_B⟩ ∈ {0,−1} for every γ ∈ R_P⁺ is what establishes correctness,
/// and the search doubles as the uniqueness check (exactly one candidate
/// may survive; existence and uniqueness are a theorem, so anything else
/// is fatal).
pub fn lambda_b(
    rs: &RootSystem,
    parabolic: &ParabolicSubset,
    lambda_p: &CorootVector,
) -> Result<PWLift> {
    let n = rs.rank();
    if lambda_p.rank() != n {
        return Err(Error::Precondition("coroot vector rank mismatch".into()));
    }
    for j in 1..=n {
        if !parabolic.contains(j) && lambda_p.0[j - 1] < 0 {
            return Err(Error::Precondition(format!(
                "λ_P = {lambda_p} is not effective outside Δ_P = {parabolic}"
            )));
        }
    }
    let mut base = lambda_p.clone();
    for &j in parabolic.indices() {
        base.0[j - 1] = 0;
    }
    let bound = 2 * lambda_p.0.iter().map(|&c| c.max(0)).max().unwrap_or(0) + 3;
    let roots: Vec<_> = parabolic_positive_roots(rs, parabolic).collect();
    let free = parabolic.indices();
    let mut hits: Vec<CorootVector> = Vec::new();
    let mut assignment = vec![0i64; free.len()];
    loop {
        let mut cand = base.clone();
        for (pos, &j) in free.iter().enumerate() {
            cand.0[j - 1] = assignment[pos];
        }
        if roots
            .iter()
            .all(|g| matches!(rs.root_pairing(&g.root_coords, &cand), 0 | -1))
        {
            hits.push(cand);
        }
        // odometer over the box
        let mut pos = 0;
        loop {
            if pos == assignment.len() {
                break;
            }
            assignment[pos] += 1;
            if assignment[pos] <= bound {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
        if pos == assignment.len() {
            break;
        }
    }
    if hits.len() != 1 {
        return Err(Error::Invariant(format!(
            "λ_B search for λ_P = {lambda_p}, Δ_P = {parabolic} found {} candidates",
            hits.len()
        )));
    }
    let lambda_b = hits.pop().unwrap();
    let delta_p_prime = ParabolicSubset::new(
        parabolic
            .indices()
            .iter()
            .copied()
            .filter(|&beta| rs.pairing(beta, &lambda_b) == 0)
            .collect(),
        n,
    )?;
    let omega_p = weyl::longest_element(rs, parabolic);
    let omega_p_prime = weyl::longest_element(rs, &delta_p_prime);
    let omega_factor = omega_p.mul(rs, &omega_p_prime);
    Ok(PWLift {
        parabolic: parabolic.clone(),
        lambda_p: lambda_p.clone(),
        lambda_b,
        delta_p_prime,
        omega_factor,
    })
}

/// ψ_{Δ,Δ_P}: q_{λ_P} σ^w ↦ q_{λ_B} σ^{w ω_P ω_{P'}} for w ∈ W^P.
pub fn psi_lift(
    rs: &RootSystem,
    parabolic: &ParabolicSubset,
    lambda_p: &CorootVector,
    w: &WeylElement,
) -> Result<(CorootVector, WeylElement)> {
    if !weyl::is_min_rep(w, parabolic) {
        return Err(Error::Precondition(format!(
            "w = {} is not in W^P for Δ_P = {parabolic}",
            weyl::format_word(rs, w)
        )));
    }
    let lift = lambda_b(rs, parabolic, lambda_p)?;
    Ok((lift.lambda_b, w.mul(rs, &lift.omega_factor)))
}

/// G/P structure constant N_{u,v}^{w,λ_P} = N_{u,v}^{w ω_P ω_{P'}, λ_B},
/// evaluated on the G/B engine.
pub fn gp_coefficient(
    engine: &QuantumEngine,
    parabolic: &ParabolicSubset,
    u: &WeylElement,
    v: &WeylElement,
    w: &WeylElement,
    lambda_p: &CorootVector,
) -> Result<BigInt> {
    let rs = engine.root_system();
    for (name, x) in [("u", u), ("v", v), ("w", w)] {
        if !weyl::is_min_rep(x, parabolic) {
            return Err(Error::Precondition(format!(
                "{name} = {} is not in W^P for Δ_P = {parabolic}",
                weyl::format_word(rs, x)
            )));
        }
    }
    let (lift_lambda, lifted_w) = psi_lift(rs, parabolic, lambda_p, w)?;
    engine.coefficient(u, v, &lifted_w, &lift_lambda)
}

/// Box-enumeration uniqueness sweep: for every parabolic subset of the
/// system and every representative with coordinates in 0..=`max_coord`
/// outside Δ_P, the λ_B search must find exactly one candidate (the
/// search itself errors out otherwise).
pub fn verify_lambda_b_uniqueness(rs: &RootSystem, max_coord: i64) -> Result<crate::Report> {
    let n = rs.rank();
    let mut report = crate::Report::default();
    for mask in 0..(1u32 << n) {
        let subset: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let parabolic = ParabolicSubset::new(subset, n)?;
        let free: Vec<usize> = (1..=n).filter(|i| !parabolic.contains(*i)).collect();
        let mut assignment = vec![0i64; free.len()];
        loop {
            let mut rep = CorootVector::zero(n);
            for (pos, &j) in free.iter().enumerate() {
                rep.0[j - 1] = assignment[pos];
            }
            report.checks += 1;
            if let Err(e) = lambda_b(rs, &parabolic, &rep) {
                report
                    .violations
                    .push(format!("λ_B for Δ_P={parabolic}, λ_P={rep}: {e}"));
            }
            let mut pos = 0;
            loop {
                if pos == assignment.len() {
                    break;
                }
                assignment[pos] += 1;
                if assignment[pos] <= max_coord {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
            if pos == assignment.len() {
                break;
            }
        }
    }
    Ok(report.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{build_cartan, LieType};
    use crate::qhring::QuantumEngine;
    use crate::weyl::{from_one_line, from_word};
    use num::{One, Zero};
    use std::sync::Arc;

    #[test]
    fn gr24_degree_one_lift() {
        let rs = build_cartan(LieType::A, 3).unwrap();
        let p = ParabolicSubset::new(vec![1, 3], 3).unwrap();
        let lift = lambda_b(&rs, &p, &CorootVector(vec![0, 1, 0])).unwrap();
        assert_eq!(lift.lambda_b, CorootVector(vec![0, 1, 0]));
        assert!(lift.delta_p_prime.is_empty());
        assert_eq!(lift.omega_factor, from_word(&rs, &[1, 3]).unwrap());
    }

    #[test]
    fn singleton_parabolic_cases() {
        // ⟨α, β^∨⟩ = 0: lift is q_{β^∨} itself, no correction factor.
        let a3 = build_cartan(LieType::A, 3).unwrap();
        let p1 = ParabolicSubset::new(vec![1], 3).unwrap();
        let lift = lambda_b(&a3, &p1, &CorootVector(vec![0, 0, 1])).unwrap();
        assert_eq!(lift.lambda_b, CorootVector(vec![0, 0, 1]));
        assert!(lift.omega_factor.is_identity());

        // ⟨α, β^∨⟩ = -1: lift picks up s_α.
        let a2 = build_cartan(LieType::A, 2).unwrap();
        let p1 = ParabolicSubset::new(vec![1], 2).unwrap();
        let (lb, wl) = psi_lift(
            &a2,
            &p1,
            &CorootVector(vec![0, 1]),
            &WeylElement::identity(&a2),
        )
        .unwrap();
        assert_eq!(lb, CorootVector(vec![0, 1]));
        assert_eq!(wl, from_word(&a2, &[1]).unwrap());

        // ⟨α, β^∨⟩ = -2: lift is q_{α^∨} q_{β^∨}, no factor.
        let b2 = build_cartan(LieType::B, 2).unwrap();
        assert_eq!(b2.cartan_entry(1, 2), -2);
        let p1 = ParabolicSubset::new(vec![1], 2).unwrap();
        let lift = lambda_b(&b2, &p1, &CorootVector(vec![0, 1])).unwrap();
        assert_eq!(lift.lambda_b, CorootVector(vec![1, 1]));
        assert!(lift.omega_factor.is_identity());

        // ⟨α, β^∨⟩ = -3: lift is s_α q_{α^∨} q_{β^∨}.
        let g2 = build_cartan(LieType::G, 2).unwrap();
        assert_eq!(g2.cartan_entry(2, 1), -3);
        let p2 = ParabolicSubset::new(vec![2], 2).unwrap();
        let (lb, wl) = psi_lift(
            &g2,
            &p2,
            &CorootVector(vec![1, 0]),
            &WeylElement::identity(&g2),
        )
        .unwrap();
        assert_eq!(lb, CorootVector(vec![1, 1]));
        assert_eq!(wl, from_word(&g2, &[2]).unwrap());
    }

    #[test]
    fn zero_class_lifts_trivially() {
        let rs = build_cartan(LieType::A, 3).unwrap();
        let w = from_word(&rs, &[2]).unwrap();
        for sub in [vec![1], vec![1, 3], vec![1, 3], vec![3]] {
            let p = ParabolicSubset::new(sub, 3).unwrap();
            let (lb, wl) = psi_lift(&rs, &p, &CorootVector::zero(3), &w).unwrap();
            assert!(lb.is_zero());
            assert_eq!(wl, w);
        }
    }

    #[test]
    fn psi_lift_requires_min_rep() {
        let rs = build_cartan(LieType::A, 2).unwrap();
        let p = ParabolicSubset::new(vec![1], 2).unwrap();
        let s1 = from_word(&rs, &[1]).unwrap();
        assert!(psi_lift(&rs, &p, &CorootVector::zero(2), &s1).is_err());
    }

    #[test]
    fn gp_coefficient_examples() {
        let rs = Arc::new(build_cartan(LieType::A, 3).unwrap());
        let eng = QuantumEngine::new(rs.clone());
        let p = ParabolicSubset::new(vec![1, 3], 3).unwrap();

        // λ_P = 0, u = id: δ_{v,w}.
        let id = WeylElement::identity(&rs);
        let v = from_word(&rs, &[2]).unwrap();
        assert!(gp_coefficient(&eng, &p, &id, &v, &v, &CorootVector::zero(3))
            .unwrap()
            .is_one());
        assert!(gp_coefficient(&eng, &p, &id, &v, &id, &CorootVector::zero(3))
            .unwrap()
            .is_zero());

        // Gr(2,4): σ_{(1)} ⋆ σ_{(2,1)} has coefficient 1 on q σ_∅.
        let u = from_word(&rs, &[2]).unwrap();
        let v21 = from_one_line(&rs, &[2, 4, 1, 3]).unwrap();
        assert!(gp_coefficient(&eng, &p, &u, &v21, &id, &CorootVector(vec![0, 1, 0]))
            .unwrap()
            .is_one());

        // All degree-3 constants on Gr(2,4) vanish.
        let grass: Vec<_> = eng
            .full_group()
            .unwrap()
            .into_iter()
            .filter(|t| weyl::is_min_rep(t, &p))
            .collect();
        let d3 = CorootVector(vec![0, 3, 0]);
        for u in &grass {
            for v in &grass {
                for w in &grass {
                    assert!(gp_coefficient(&eng, &p, u, v, w, &d3).unwrap().is_zero());
                }
            }
        }

        // membership precondition
        let s1 = from_word(&rs, &[1]).unwrap();
        assert!(gp_coefficient(&eng, &p, &s1, &v, &v, &CorootVector::zero(3)).is_err());
    }

    #[test]
    fn lambda_b_unique_over_all_a3_parabolics() {
        let rs = build_cartan(LieType::A, 3).unwrap();
        let subsets: Vec<Vec<usize>> = vec![
            vec![],
            vec![1],
            vec![2],
            vec![3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3],
            vec![1, 2, 3],
        ];
        for sub in subsets {
            let p = ParabolicSubset::new(sub, 3).unwrap();
            // representatives with coordinates in 0..=2 outside Δ_P
            let mut reps = vec![CorootVector::zero(3)];
            for j in 1..=3usize {
                if !p.contains(j) {
                    for base in reps.clone() {
                        for c in 1..=2 {
                            let mut v = base.clone();
                            v.0[j - 1] = c;
                            reps.push(v);
                        }
                    }
                }
            }
            for rep in reps {
                // lambda_b errors out unless the box search finds exactly one.
                let lift = lambda_b(&rs, &p, &rep).unwrap();
                for j in 1..=3usize {
                    if !p.contains(j) {
                        assert_eq!(lift.lambda_b.0[j - 1], rep.0[j - 1]);
                    }
                }
            }
        }
    }

    #[test]
    fn degree_one_lift_degree_compatibility() {
        // For Gr(k, n+1): ⟨2ρ, λ_B⟩ + ℓ(ω_P ω_{P'}) = n+1 for the degree-1 class.
        for n in 1..=5usize {
            let rs = build_cartan(LieType::A, n).unwrap();
            for k in 1..=n {
                let p = ParabolicSubset::complement_of(k, n);
                let lift = lambda_b(&rs, &p, &CorootVector::simple(k, n)).unwrap();
                let total =
                    rs.two_rho(&lift.lambda_b) + i64::from(lift.omega_factor.length());
                assert_eq!(total, (n + 1) as i64, "Gr({k},{})", n + 1);
            }
        }
    }
}
