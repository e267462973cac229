//! Root-system arithmetic: Cartan matrices, positive roots, pairings, 2ρ.
//!
//! Everything is exact integer arithmetic. A [`RootSystem`] is immutable
//! after construction and safe to share across threads.

use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt;

/// Finite simple Lie type label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LieType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl LieType {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(LieType::A),
            "B" | "b" => Ok(LieType::B),
            "C" | "c" => Ok(LieType::C),
            "D" | "d" => Ok(LieType::D),
            "E" | "e" => Ok(LieType::E),
            "F" | "f" => Ok(LieType::F),
            "G" | "g" => Ok(LieType::G),
            other => Err(Error::Parse(format!("unknown Lie type {other:?}"))),
        }
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            LieType::A => 'A',
            LieType::B => 'B',
            LieType::C => 'C',
            LieType::D => 'D',
            LieType::E => 'E',
            LieType::F => 'F',
            LieType::G => 'G',
        };
        write!(f, "{c}")
    }
}

/// A positive root γ together with its coroot γ^∨ and the pairing ⟨2ρ, γ^∨⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    /// Coordinates of γ in the simple-root basis (all ≥ 0).
    pub root_coords: Vec<i64>,
    /// Coordinates of γ^∨ in the simple-coroot basis (all ≥ 0).
    pub coroot_coords: Vec<i64>,
    /// ⟨2ρ, γ^∨⟩ = 2 · (sum of coroot coordinates); ≥ 2, = 2 iff γ simple.
    pub two_rho_pairing: i64,
}

impl Root {
    /// True when γ = α_i for the 1-based simple index `i`.
    pub fn is_simple(&self) -> bool {
        self.root_coords.iter().sum::<i64>() == 1
    }
}

/// An integer vector λ = Σ aⱼ αⱼ^∨ in the coroot lattice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CorootVector(pub Vec<i64>);

impl CorootVector {
    pub fn zero(rank: usize) -> Self {
        CorootVector(vec![0; rank])
    }

    /// The simple coroot α_j^∨ (1-based `j`).
    pub fn simple(j: usize, rank: usize) -> Self {
        let mut v = vec![0; rank];
        v[j - 1] = 1;
        CorootVector(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Effective means every coordinate is ≥ 0; only effective degrees
    /// support nonzero invariants.
    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    /// |λ| = Σ aⱼ.
    pub fn weight(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &CorootVector) -> CorootVector {
        assert_eq!(self.0.len(), other.0.len());
        CorootVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CorootVector) -> CorootVector {
        assert_eq!(self.0.len(), other.0.len());
        CorootVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// λ ± α_j^∨ for a 1-based simple index.
    pub fn add_simple(&self, j: usize, sign: i64) -> CorootVector {
        let mut v = self.0.clone();
        v[j - 1] += sign;
        CorootVector(v)
    }

    pub fn parse(s: &str, rank: usize) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad coroot coordinate {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != rank {
            return Err(Error::Parse(format!(
                "coroot vector has {} coordinates, expected {rank}",
                coords.len()
            )));
        }
        Ok(CorootVector(coords))
    }
}

impl fmt::Display for CorootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Root datum of a finite simple Lie type: Cartan matrix, positive roots.
///
/// The Cartan matrix convention is `cartan[i][j] = ⟨α_i, α_j^∨⟩` (0-based
/// internally, 1-based in every public signature that names a simple root).
#[derive(Debug)]
pub struct RootSystem {
    lie_type: LieType,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    positive_roots: Vec<Root>,
    root_index: HashMap<Vec<i64>, usize>,
}

/// Expected |R⁺| for each finite type; used to certify closure generation.
fn expected_positive_count(t: LieType, n: usize) -> usize {
    match t {
        LieType::A => n * (n + 1) / 2,
        LieType::B | LieType::C => n * n,
        LieType::D => n * (n - 1),
        LieType::E => match n {
            6 => 36,
            7 => 63,
            _ => 120,
        },
        LieType::F => 24,
        LieType::G => 6,
    }
}

fn cartan_matrix(t: LieType, n: usize) -> Result<Vec<Vec<i64>>> {
    let valid = match t {
        LieType::A => n >= 1,
        LieType::B | LieType::C => n >= 2,
        LieType::D => n >= 4,
        LieType::E => (6..=8).contains(&n),
        LieType::F => n == 4,
        LieType::G => n == 2,
    };
    if !valid {
        return Err(Error::Config(format!("invalid type/rank combination {t}{n}")));
    }
    let mut c = vec![vec![0i64; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let bond = |c: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    match t {
        LieType::A => {
            for i in 0..n - 1 {
                bond(&mut c, i, i + 1);
            }
        }
        LieType::B => {
            // α_n short: ⟨α_{n-1}, α_n^∨⟩ = -2.
            for i in 0..n - 1 {
                bond(&mut c, i, i + 1);
            }
            c[n - 2][n - 1] = -2;
        }
        LieType::C => {
            // α_n long: ⟨α_n, α_{n-1}^∨⟩ = -2.
            for i in 0..n - 1 {
                bond(&mut c, i, i + 1);
            }
            c[n - 1][n - 2] = -2;
        }
        LieType::D => {
            for i in 0..n - 2 {
                bond(&mut c, i, i + 1);
            }
            bond(&mut c, n - 3, n - 1);
        }
        LieType::E => {
            // Bourbaki numbering: chain 1-3-4-5-...-n with 2 attached to 4.
            bond(&mut c, 0, 2);
            for i in 2..n - 1 {
                bond(&mut c, i, i + 1);
            }
            bond(&mut c, 1, 3);
        }
        LieType::F => {
            // α_1, α_2 long; α_3, α_4 short; ⟨α_2, α_3^∨⟩ = -2.
            for i in 0..3 {
                bond(&mut c, i, i + 1);
            }
            c[1][2] = -2;
        }
        LieType::G => {
            // ⟨α_1, α_2^∨⟩ = -1, ⟨α_2, α_1^∨⟩ = -3.
            c[0][1] = -1;
            c[1][0] = -3;
        }
    }
    Ok(c)
}

/// Build the root system for a valid finite (type, rank) pair.
///
/// Positive roots are generated by closing the simple roots under simple
/// reflections; the closure count is certified against the type's known
/// |R⁺| value.
pub fn build_cartan(lie_type: LieType, rank: usize) -> Result<RootSystem> {
    let cartan = cartan_matrix(lie_type, rank)?;
    // Closure under simple reflections, tracking (root, coroot) pairs.
    let mut pairs: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    for j in 0..rank {
        let mut e = vec![0i64; rank];
        e[j] = 1;
        seen.insert(e.clone(), pairs.len());
        pairs.push((e.clone(), e));
    }
    let mut head = 0;
    while head < pairs.len() {
        let (root, coroot) = pairs[head].clone();
        head += 1;
        for i in 0..rank {
            // s_i(β) = β - ⟨β, α_i^∨⟩ α_i, and the mirrored action on β^∨.
            let pair_root: i64 = (0..rank).map(|j| root[j] * cartan[j][i]).sum();
            let pair_coroot: i64 = (0..rank).map(|j| coroot[j] * cartan[i][j]).sum();
            let mut new_root = root.clone();
            new_root[i] -= pair_root;
            if new_root.iter().any(|&x| x < 0) {
                continue; // landed in -R⁺
            }
            let mut new_coroot = coroot.clone();
            new_coroot[i] -= pair_coroot;
            if !seen.contains_key(&new_root) {
                seen.insert(new_root.clone(), pairs.len());
                pairs.push((new_root, new_coroot));
            }
        }
    }
    let expected = expected_positive_count(lie_type, rank);
    if pairs.len() != expected {
        return Err(Error::Invariant(format!(
            "root closure for {lie_type}{rank} produced {} roots, expected {expected}",
            pairs.len()
        )));
    }
    // Sort by height then coordinates so the ordering is reproducible.
    pairs.sort_by(|a, b| {
        let ha: i64 = a.0.iter().sum();
        let hb: i64 = b.0.iter().sum();
        ha.cmp(&hb).then_with(|| a.0.cmp(&b.0))
    });
    let positive_roots: Vec<Root> = pairs
        .into_iter()
        .map(|(root_coords, coroot_coords)| {
            let two_rho_pairing = 2 * coroot_coords.iter().sum::<i64>();
            Root {
                root_coords,
                coroot_coords,
                two_rho_pairing,
            }
        })
        .collect();
    let root_index = positive_roots
        .iter()
        .enumerate()
        .map(|(i, r)| (r.root_coords.clone(), i))
        .collect();
    Ok(RootSystem {
        lie_type,
        rank,
        cartan,
        positive_roots,
        root_index,
    })
}

impl RootSystem {
    pub fn lie_type(&self) -> LieType {
        self.lie_type
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Cartan entry ⟨α_i, α_j^∨⟩ for 1-based indices.
    pub fn cartan_entry(&self, i: usize, j: usize) -> i64 {
        self.cartan[i - 1][j - 1]
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive_roots
    }

    /// Look up a positive root by its simple-root coordinates.
    pub fn find_root(&self, root_coords: &[i64]) -> Option<&Root> {
        self.root_index
            .get(root_coords)
            .map(|&i| &self.positive_roots[i])
    }

    /// The simple root α_i as a [`Root`] (1-based `i`).
    pub fn simple_root(&self, i: usize) -> &Root {
        let mut e = vec![0i64; self.rank];
        e[i - 1] = 1;
        self.find_root(&e).expect("simple root present")
    }

    /// ⟨α_i, λ⟩ = Σⱼ C[i][j] aⱼ for a 1-based simple index `i`.
    pub fn pairing(&self, i: usize, lambda: &CorootVector) -> i64 {
        assert!(
            (1..=self.rank).contains(&i),
            "simple index {i} out of range 1..={}",
            self.rank
        );
        assert_eq!(lambda.rank(), self.rank, "coroot vector rank mismatch");
        (0..self.rank).map(|j| self.cartan[i - 1][j] * lambda.0[j]).sum()
    }

    /// ⟨γ, λ⟩ for an arbitrary root given by simple-root coordinates.
    pub fn root_pairing(&self, root_coords: &[i64], lambda: &CorootVector) -> i64 {
        (0..self.rank)
            .map(|i| root_coords[i] * (0..self.rank).map(|j| self.cartan[i][j] * lambda.0[j]).sum::<i64>())
            .sum()
    }

    /// ⟨2ρ, λ⟩ = 2 Σⱼ aⱼ, from ⟨χ_i, α_j^∨⟩ = δ_ij and ρ = Σ χ_i.
    pub fn two_rho(&self, lambda: &CorootVector) -> i64 {
        2 * lambda.weight()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_cartan_and_root_count() {
        let rs = build_cartan(LieType::A, 2).unwrap();
        assert_eq!(rs.cartan_entry(1, 1), 2);
        assert_eq!(rs.cartan_entry(1, 2), -1);
        assert_eq!(rs.cartan_entry(2, 1), -1);
        assert_eq!(rs.positive_roots().len(), 3);
    }

    #[test]
    fn a3_root_count() {
        let rs = build_cartan(LieType::A, 3).unwrap();
        assert_eq!(rs.positive_roots().len(), 6);
    }

    #[test]
    fn g2_cartan_and_root_count() {
        let rs = build_cartan(LieType::G, 2).unwrap();
        assert_eq!(rs.cartan_entry(1, 1), 2);
        assert_eq!(rs.cartan_entry(1, 2), -1);
        assert_eq!(rs.cartan_entry(2, 1), -3);
        assert_eq!(rs.positive_roots().len(), 6);
    }

    #[test]
    fn closure_counts_all_types() {
        let cases = [
            (LieType::A, 1, 1),
            (LieType::A, 4, 10),
            (LieType::A, 5, 15),
            (LieType::B, 2, 4),
            (LieType::B, 3, 9),
            (LieType::C, 3, 9),
            (LieType::C, 4, 16),
            (LieType::D, 4, 12),
            (LieType::D, 5, 20),
            (LieType::E, 6, 36),
            (LieType::E, 7, 63),
            (LieType::E, 8, 120),
            (LieType::F, 4, 24),
            (LieType::G, 2, 6),
        ];
        for (t, n, count) in cases {
            let rs = build_cartan(t, n).unwrap();
            assert_eq!(rs.positive_roots().len(), count, "{t}{n}");
        }
    }

    #[test]
    fn invalid_configurations_rejected() {
        assert!(build_cartan(LieType::A, 0).is_err());
        assert!(build_cartan(LieType::D, 3).is_err());
        assert!(build_cartan(LieType::E, 9).is_err());
        assert!(build_cartan(LieType::F, 5).is_err());
        assert!(build_cartan(LieType::G, 3).is_err());
    }

    #[test]
    fn pairing_examples() {
        let a2 = build_cartan(LieType::A, 2).unwrap();
        assert_eq!(a2.pairing(1, &CorootVector::simple(1, 2)), 2);
        assert_eq!(a2.pairing(1, &CorootVector::simple(2, 2)), -1);
        let a3 = build_cartan(LieType::A, 3).unwrap();
        // row 3 of the A3 Cartan matrix against (1,1,1): 0 - 1 + 2 = 1
        assert_eq!(a3.pairing(3, &CorootVector(vec![1, 1, 1])), 1);
    }

    #[test]
    fn two_rho_examples() {
        let a2 = build_cartan(LieType::A, 2).unwrap();
        assert_eq!(a2.two_rho(&CorootVector::zero(2)), 0);
        assert_eq!(a2.two_rho(&CorootVector::simple(1, 2)), 2);
        assert_eq!(a2.two_rho(&CorootVector(vec![1, 1])), 4);
    }

    #[test]
    fn two_rho_pairing_at_least_two_with_equality_iff_simple() {
        for (t, n) in [
            (LieType::A, 3),
            (LieType::B, 3),
            (LieType::C, 3),
            (LieType::D, 4),
            (LieType::F, 4),
            (LieType::G, 2),
        ] {
            let rs = build_cartan(t, n).unwrap();
            for root in rs.positive_roots() {
                assert!(root.two_rho_pairing >= 2, "{t}{n}: {root:?}");
                assert_eq!(root.two_rho_pairing == 2, root.is_simple(), "{t}{n}: {root:?}");
                assert_eq!(
                    root.two_rho_pairing,
                    2 * root.coroot_coords.iter().sum::<i64>()
                );
            }
        }
    }

    #[test]
    fn cartan_invariants() {
        for (t, n) in [(LieType::A, 4), (LieType::B, 3), (LieType::G, 2)] {
            let rs = build_cartan(t, n).unwrap();
            for i in 1..=n {
                assert_eq!(rs.cartan_entry(i, i), 2);
                for j in 1..=n {
                    if i != j {
                        assert!(rs.cartan_entry(i, j) <= 0);
                        assert_eq!(rs.cartan_entry(i, j) == 0, rs.cartan_entry(j, i) == 0);
                    }
                }
            }
        }
    }

    #[test]
    fn coroot_vector_parse() {
        assert_eq!(
            CorootVector::parse("1,1,0", 3).unwrap(),
            CorootVector(vec![1, 1, 0])
        );
        assert!(CorootVector::parse("1,1", 3).is_err());
        assert!(CorootVector::parse("1,x,0", 3).is_err());
    }
}
