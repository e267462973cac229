//! Weyl group elements, lengths, descents, parabolic coset combinatorics.
//!
//! The canonical form of an element is the integer matrix of its action on
//! the coroot lattice in the simple-coroot basis; matrix equality is element
//! equality in every type. Right multiplication by a simple reflection is
//! the primitive operation. For type A a one-line-notation view is derived.

use crate::cartan::{CorootVector, LieType, Root, RootSystem};
use crate::{Error, Result};
use std::collections::HashSet;
use std::fmt;

/// Default ceiling for whole-group enumeration (|W(A6)| = 5040, doubled).
pub const DEFAULT_GROUP_CEILING: usize = 10_080;

/// A Weyl group element in canonical matrix form, with cached length.
///
/// Ordering is by (length, matrix entries); this is the total order used
/// for memo-key normalization and deterministic output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylElement {
    len: u32,
    /// Row-major n×n matrix; column j holds the coordinates of w(α_{j+1}^∨).
    mat: Vec<i32>,
}

/// A subset Δ_P ⊆ Δ of simple roots, stored as sorted 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParabolicSubset(Vec<usize>);

impl ParabolicSubset {
    pub fn new(mut indices: Vec<usize>, rank: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&i) = indices.iter().find(|&&i| i < 1 || i > rank) {
            return Err(Error::Parse(format!(
                "parabolic index {i} out of range 1..={rank}"
            )));
        }
        Ok(ParabolicSubset(indices))
    }

    pub fn empty() -> Self {
        ParabolicSubset(Vec::new())
    }

    /// All simple indices except `k` (the Grassmannian parabolic).
    pub fn complement_of(k: usize, rank: usize) -> Self {
        ParabolicSubset((1..=rank).filter(|&i| i != k).collect())
    }

    pub fn parse(s: &str, rank: usize) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Self::empty());
        }
        let indices = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad parabolic index {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices, rank)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ParabolicSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl WeylElement {
    pub fn identity(rs: &RootSystem) -> Self {
        let n = rs.rank();
        let mut mat = vec![0i32; n * n];
        for i in 0..n {
            mat[i * n + i] = 1;
        }
        WeylElement { len: 0, mat }
    }

    pub fn length(&self) -> u32 {
        self.len
    }

    pub fn is_identity(&self) -> bool {
        self.len == 0
    }

    fn n(&self) -> usize {
        (self.mat.len() as f64).sqrt() as usize
    }

    /// sgn_α(w): 1 iff ℓ(w s_i) < ℓ(w), equivalently iff w(α_i) ∈ -R⁺.
    ///
    /// The image w(α_i^∨) is ± a positive coroot, so its sign is the sign
    /// of any nonzero coordinate of column i-1.
    pub fn sgn(&self, i: usize) -> i64 {
        let n = self.n();
        let col = i - 1;
        debug_assert!(col < n, "simple index {i} out of range");
        let mut pos = false;
        let mut neg = false;
        for r in 0..n {
            let x = self.mat[r * n + col];
            pos |= x > 0;
            neg |= x < 0;
        }
        debug_assert!(!(pos && neg), "mixed-sign coroot image");
        i64::from(neg)
    }

    /// Right descent set as 1-based indices.
    pub fn descents(&self, rs: &RootSystem) -> Vec<usize> {
        (1..=rs.rank()).filter(|&i| self.sgn(i) == 1).collect()
    }

    /// Right multiplication w·s_i (1-based `i`); length changes by ±1.
    pub fn mul_simple(&self, rs: &RootSystem, i: usize) -> WeylElement {
        let n = self.n();
        let descent = self.sgn(i) == 1;
        let mut mat = self.mat.clone();
        // new column j = old column j - C[i][j] * old column i (0-based i).
        let ci = i - 1;
        for j in 0..n {
            let c = rs.cartan_entry(i, j + 1) as i32;
            if c == 0 {
                continue;
            }
            for r in 0..n {
                mat[r * n + j] -= c * self.mat[r * n + ci];
            }
        }
        let len = if descent { self.len - 1 } else { self.len + 1 };
        WeylElement { len, mat }
    }

    /// Left multiplication s_i·w (1-based `i`).
    pub fn left_mul_simple(&self, rs: &RootSystem, i: usize) -> WeylElement {
        let n = self.n();
        let ri = i - 1;
        let mut mat = self.mat.clone();
        for j in 0..n {
            let mut acc = 0i32;
            for k in 0..n {
                acc += rs.cartan_entry(i, k + 1) as i32 * self.mat[k * n + j];
            }
            mat[ri * n + j] = self.mat[ri * n + j] - acc;
        }
        let len = length_from_matrix(rs, &mat);
        WeylElement { len, mat }
    }

    /// General product self·other (composition of actions).
    pub fn mul(&self, rs: &RootSystem, other: &WeylElement) -> WeylElement {
        let n = self.n();
        assert_eq!(n, other.n(), "rank mismatch");
        let mut mat = vec![0i32; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.mat[r * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    mat[r * n + j] += a * other.mat[k * n + j];
                }
            }
        }
        let len = length_from_matrix(rs, &mat);
        WeylElement { len, mat }
    }

    pub fn inverse(&self, rs: &RootSystem) -> WeylElement {
        let mut word = self.canonical_word(rs);
        word.reverse();
        from_word(rs, &word).expect("reversed reduced word is valid")
    }

    /// Image of a coroot vector under the element's action.
    pub fn apply_coroot(&self, v: &CorootVector) -> CorootVector {
        let n = self.n();
        assert_eq!(v.rank(), n);
        let mut out = vec![0i64; n];
        for (r, o) in out.iter_mut().enumerate() {
            for k in 0..n {
                *o += i64::from(self.mat[r * n + k]) * v.0[k];
            }
        }
        CorootVector(out)
    }

    /// Lexicographically least reduced word, read left to right.
    ///
    /// This is the canonical serialization of an element: at each step the
    /// smallest 1-based left descent is peeled off.
    pub fn canonical_word(&self, rs: &RootSystem) -> Vec<usize> {
        let mut word = Vec::with_capacity(self.len as usize);
        let mut v = self.clone();
        while !v.is_identity() {
            let mut advanced = false;
            for i in 1..=rs.rank() {
                let cand = v.left_mul_simple(rs, i);
                if cand.len < v.len {
                    word.push(i);
                    v = cand;
                    advanced = true;
                    break;
                }
            }
            assert!(advanced, "no left descent on a non-identity element");
        }
        word
    }

    /// One-line notation (t(1),…,t(n+1)) for type A elements.
    pub fn one_line(&self, rs: &RootSystem) -> Vec<usize> {
        assert_eq!(rs.lie_type(), LieType::A, "one-line view requires type A");
        let n = self.n();
        let mut perm = vec![0usize; n + 1];
        for i in 0..n {
            // Column i is w(α_{i+1}^∨) = e_{π(i+1)} - e_{π(i+2)} in e-coords.
            let mut x = vec![0i32; n + 1];
            x[0] = self.mat[i];
            for m in 1..n {
                x[m] = self.mat[m * n + i] - self.mat[(m - 1) * n + i];
            }
            x[n] = -self.mat[(n - 1) * n + i];
            let plus = x.iter().position(|&v| v == 1).expect("unit image") + 1;
            let minus = x.iter().position(|&v| v == -1).expect("unit image") + 1;
            if i == 0 {
                perm[0] = plus;
            } else {
                debug_assert_eq!(perm[i], plus, "inconsistent one-line chain");
            }
            perm[i + 1] = minus;
        }
        perm
    }
}

/// Length from scratch: the number of positive roots sent to -R⁺.
fn length_from_matrix(rs: &RootSystem, mat: &[i32]) -> u32 {
    let n = rs.rank();
    let mut len = 0;
    for root in rs.positive_roots() {
        // image of γ^∨; negative iff any coordinate is < 0.
        'rows: for r in 0..n {
            let mut acc = 0i64;
            for k in 0..n {
                acc += i64::from(mat[r * n + k]) * root.coroot_coords[k];
            }
            match acc.cmp(&0) {
                std::cmp::Ordering::Less => {
                    len += 1;
                    break 'rows;
                }
                std::cmp::Ordering::Greater => break 'rows,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    len
}

/// Product of the listed simple reflections, in order; empty word → identity.
pub fn from_word(rs: &RootSystem, word: &[usize]) -> Result<WeylElement> {
    let mut w = WeylElement::identity(rs);
    for &i in word {
        if i < 1 || i > rs.rank() {
            return Err(Error::Parse(format!(
                "simple index {i} out of range 1..={}",
                rs.rank()
            )));
        }
        w = w.mul_simple(rs, i);
    }
    Ok(w)
}

/// The element with the given type-A one-line notation.
pub fn from_one_line(rs: &RootSystem, perm: &[usize]) -> Result<WeylElement> {
    if rs.lie_type() != LieType::A {
        return Err(Error::Parse("one-line notation requires type A".into()));
    }
    let n = rs.rank() + 1;
    if perm.len() != n {
        return Err(Error::Parse(format!(
            "one-line notation has {} entries, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n + 1];
    for &v in perm {
        if v < 1 || v > n || seen[v] {
            return Err(Error::Parse(format!("not a permutation of 1..={n}")));
        }
        seen[v] = true;
    }
    // Peel right descents: if π(i) > π(i+1) then π·s_i is shorter.
    let mut p = perm.to_vec();
    let mut word = Vec::new();
    loop {
        match (0..n - 1).find(|&i| p[i] > p[i + 1]) {
            Some(i) => {
                p.swap(i, i + 1);
                word.push(i + 1);
            }
            None => break,
        }
    }
    word.reverse();
    from_word(rs, &word)
}

/// The minimal-length representative of the coset w·W_P.
pub fn min_rep(rs: &RootSystem, w: &WeylElement, parabolic: &ParabolicSubset) -> WeylElement {
    let mut v = w.clone();
    loop {
        match parabolic.indices().iter().find(|&&i| v.sgn(i) == 1) {
            Some(&i) => v = v.mul_simple(rs, i),
            None => return v,
        }
    }
}

/// True iff w ∈ W^P (sends every α ∈ Δ_P to a positive root).
pub fn is_min_rep(w: &WeylElement, parabolic: &ParabolicSubset) -> bool {
    parabolic.indices().iter().all(|&i| w.sgn(i) == 0)
}

/// The longest element ω_P of the parabolic subgroup W_P, found by greedy
/// ascent: keep multiplying by a subgroup generator that increases length.
pub fn longest_element(rs: &RootSystem, parabolic: &ParabolicSubset) -> WeylElement {
    let mut w = WeylElement::identity(rs);
    loop {
        match parabolic.indices().iter().find(|&&i| w.sgn(i) == 0) {
            Some(&i) => w = w.mul_simple(rs, i),
            None => return w,
        }
    }
}

/// The reflection s_γ for a positive root γ of the system.
pub fn reflection(rs: &RootSystem, gamma: &Root) -> Result<WeylElement> {
    let n = rs.rank();
    if rs.find_root(&gamma.root_coords).is_none() {
        return Err(Error::Precondition(format!(
            "{:?} is not a positive root",
            gamma.root_coords
        )));
    }
    // s_γ(α_j^∨) = α_j^∨ - ⟨γ, α_j^∨⟩ γ^∨.
    let mut mat = vec![0i32; n * n];
    for j in 0..n {
        let mut pair = 0i64;
        for (i, &g) in gamma.root_coords.iter().enumerate() {
            pair += g * rs.cartan_entry(i + 1, j + 1);
        }
        for r in 0..n {
            let mut x = if r == j { 1 } else { 0 };
            x -= pair * gamma.coroot_coords[r];
            mat[r * n + j] = i32::try_from(x).expect("reflection entry fits i32");
        }
    }
    let len = length_from_matrix(rs, &mat);
    let w = WeylElement { len, mat };
    debug_assert!(w.mul(rs, &w).is_identity(), "s_γ² ≠ id");
    Ok(w)
}

/// Elements grouped by length, levels 0..=max_len (levels past ℓ(w₀) are
/// dropped). Errors out if the running total exceeds `ceiling`.
pub fn levels_up_to(
    rs: &RootSystem,
    max_len: usize,
    ceiling: usize,
) -> Result<Vec<Vec<WeylElement>>> {
    let mut levels: Vec<Vec<WeylElement>> = vec![vec![WeylElement::identity(rs)]];
    let mut total = 1usize;
    while levels.len() <= max_len {
        let last = levels.last().unwrap();
        let mut next: HashSet<WeylElement> = HashSet::new();
        for w in last {
            for i in 1..=rs.rank() {
                if w.sgn(i) == 0 {
                    next.insert(w.mul_simple(rs, i));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        total += next.len();
        if total > ceiling {
            return Err(Error::Precondition(format!(
                "group enumeration exceeds ceiling {ceiling}"
            )));
        }
        let mut level: Vec<WeylElement> = next.into_iter().collect();
        level.sort();
        levels.push(level);
    }
    Ok(levels)
}

/// The whole Weyl group, sorted by (length, matrix).
pub fn full_group(rs: &RootSystem, ceiling: usize) -> Result<Vec<WeylElement>> {
    let levels = levels_up_to(rs, usize::MAX, ceiling)?;
    Ok(levels.into_iter().flatten().collect())
}

/// Parse an element from word form ("2 1 2"), one-line form ("[3,1,2,4]",
/// type A only), or "e"/"id" for the identity.
pub fn parse_element(rs: &RootSystem, s: &str) -> Result<WeylElement> {
    let t = s.trim();
    if t.is_empty() || t == "e" || t == "id" {
        return Ok(WeylElement::identity(rs));
    }
    if let Some(inner) = t.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| Error::Parse(format!("unterminated one-line notation {t:?}")))?;
        let perm = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad one-line entry {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        return from_one_line(rs, &perm);
    }
    let word = t
        .split_whitespace()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad word letter {p:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    from_word(rs, &word)
}

/// Render the canonical word ("2 1 2"; identity renders as "e").
pub fn format_word(rs: &RootSystem, w: &WeylElement) -> String {
    let word = w.canonical_word(rs);
    if word.is_empty() {
        "e".to_string()
    } else {
        word.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
