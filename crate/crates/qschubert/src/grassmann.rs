//! Type-A Grassmannian specialization: the partition model with an
//! independent quantum Pieri oracle, the closed λ_B/ω-factor formulas for
//! Gr(k, n+1), the length-d² element x, and the quantum-to-classical
//! two-step flag correspondence.
//!
//! The Pieri oracle never touches the Chevalley engine; agreement between
//! the two routes is a verification target, not an assumption.

use crate::cartan::{CorootVector, LieType, RootSystem};
use crate::pw;
use crate::qhring::QuantumEngine;
use crate::weyl::{self, ParabolicSubset, WeylElement};
use crate::{Error, Report, Result};
use num::{BigInt, One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

/// A partition fitting a k×(n+1−k) box, stored without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parse(format!(
                "partition parts must be weakly decreasing: {parts:?}"
            )));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> i64 {
        self.0.iter().map(|&p| i64::from(p)).sum()
    }

    pub fn fits(&self, rows: usize, width: u32) -> bool {
        self.0.len() <= rows && self.0.first().map_or(true, |&p| p <= width)
    }

    /// CLI syntax: "2,1"; the empty partition is "0" or "".
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || t == "0" {
            return Ok(Partition::empty());
        }
        let parts = t
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad partition part {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

/// All partitions in a rows×width box.
pub fn partitions_in_box(rows: usize, width: u32) -> Vec<Partition> {
    fn go(rows: usize, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        out.push(Partition(prefix.iter().copied().filter(|&p| p > 0).collect()));
        if rows == 0 {
            return;
        }
        for p in (1..=max).rev() {
            prefix.push(p);
            go(rows - 1, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(rows, width, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// The Grassmannian permutation of a partition: u(k−i+1) = p_i + (k−i+1)
/// for i = 1..k, remaining values ascending.
pub fn permutation_of_partition(
    rs: &RootSystem,
    k: usize,
    p: &Partition,
) -> Result<WeylElement> {
    let n = rs.rank();
    let width = (n + 1 - k) as u32;
    if k < 1 || k > n {
        return Err(Error::Precondition(format!("k={k} out of range 1..={n}")));
    }
    if !p.fits(k, width) {
        return Err(Error::Precondition(format!(
            "partition {p} does not fit the {k}×{width} box"
        )));
    }
    let mut one_line = vec![0usize; n + 1];
    let mut used = vec![false; n + 2];
    for j in 1..=k {
        let val = p.part(k - j) as usize + j;
        one_line[j - 1] = val;
        used[val] = true;
    }
    let mut rest = (1..=n + 1).filter(|&v| !used[v]);
    for slot in one_line.iter_mut().skip(k) {
        *slot = rest.next().expect("complement values");
    }
    weyl::from_one_line(rs, &one_line)
}

/// Inverse dictionary; requires a single descent at position k.
pub fn partition_of_permutation(
    rs: &RootSystem,
    k: usize,
    w: &WeylElement,
) -> Result<Partition> {
    let n = rs.rank();
    for j in 1..=n {
        if j != k && w.sgn(j) == 1 {
            return Err(Error::Precondition(format!(
                "element has a descent at {j} ≠ k={k}"
            )));
        }
    }
    let one_line = w.one_line(rs);
    let parts: Vec<u32> = (1..=k)
        .map(|i| (one_line[k - i] - (k - i + 1)) as u32)
        .collect();
    Partition::new(parts)
}

/// Quantum Pieri row multiplication on Gr(k, n+1):
/// σ_{(r)} ⋆ σ_p = Σ σ_μ (horizontal strips in the box)
///              + q Σ σ_μ (p₁−1 ≥ μ₁ ≥ p₂−1 ≥ … ≥ p_k−1 ≥ μ_k ≥ 0),
/// with |μ| = |p|+r in the first sum and |p|+r−(n+1) in the second.
pub fn pieri_row(k: usize, n: usize, p: &Partition, r: u32) -> Result<Vec<(Partition, u32)>> {
    let width = (n + 1 - k) as u32;
    if !p.fits(k, width) {
        return Err(Error::Precondition(format!(
            "partition {p} does not fit the {k}×{width} box"
        )));
    }
    if i64::from(r) > i64::from(width) {
        return Err(Error::Precondition(format!(
            "row length {r} exceeds the box width {width}"
        )));
    }
    let mut out = Vec::new();
    // classical horizontal strips: p_i ≤ μ_i ≤ min(p_{i-1}, width)
    fn strips(
        row: usize,
        k: usize,
        width: u32,
        p: &Partition,
        remaining: i64,
        prefix: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        if row == k {
            if remaining == 0 {
                out.push(Partition(
                    prefix.iter().copied().filter(|&x| x > 0).collect(),
                ));
            }
            return;
        }
        let lo = p.part(row);
        let hi = if row == 0 { width } else { prefix[row - 1].min(p.part(row - 1)) };
        for m in lo..=hi {
            let used = i64::from(m - lo);
            if used > remaining {
                break;
            }
            prefix.push(m);
            strips(row + 1, k, width, p, remaining - used, prefix, out);
            prefix.pop();
        }
    }
    let mut classical = Vec::new();
    strips(0, k, width, p, i64::from(r), &mut Vec::new(), &mut classical);
    for mu in classical {
        out.push((mu, 0));
    }
    // quantum terms: interleaving chain below p shifted down by one column
    let q_weight = p.weight() + i64::from(r) - (n as i64 + 1);
    if q_weight >= 0 && r >= 1 {
        fn chains(
            row: usize,
            k: usize,
            p: &Partition,
            remaining: i64,
            prev: u32,
            prefix: &mut Vec<u32>,
            out: &mut Vec<Partition>,
        ) {
            if row == k {
                if remaining == 0 {
                    out.push(Partition(
                        prefix.iter().copied().filter(|&x| x > 0).collect(),
                    ));
                }
                return;
            }
            if p.part(row) == 0 {
                // the chain needs μ_row ≤ p_row − 1 < 0: no quantum term
                // unless the partition fills all k rows
                return;
            }
            let hi = (p.part(row) - 1).min(prev);
            let lo = if row + 1 < k { p.part(row + 1).saturating_sub(1) } else { 0 };
            for m in (lo..=hi).rev() {
                if i64::from(m) > remaining {
                    continue;
                }
                prefix.push(m);
                chains(row + 1, k, p, remaining - i64::from(m), m, prefix, out);
                prefix.pop();
            }
        }
        let mut quantum = Vec::new();
        chains(0, k, p, q_weight, u32::MAX, &mut Vec::new(), &mut quantum);
        for mu in quantum {
            out.push((mu, 1));
        }
    }
    Ok(out)
}

/// Full quantum products on Gr(k, n+1) derived from repeated Pieri rows by
/// an exact triangular expansion. Independent of the Chevalley engine.
pub struct PieriOracle {
    pub k: usize,
    pub n: usize,
    products: HashMap<(Partition, Partition), BTreeMap<(Partition, u32), BigInt>>,
}

impl PieriOracle {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        let width = (n + 1 - k) as u32;
        let mut order = partitions_in_box(k, width);
        // weight ascending, then first part descending: a product with a
        // shorter first row may need same-weight partitions with longer
        // first rows, never the converse.
        order.sort_by(|a, b| {
            a.weight()
                .cmp(&b.weight())
                .then(b.part(0).cmp(&a.part(0)))
                .then(a.cmp(b))
        });
        let mut oracle = PieriOracle {
            k,
            n,
            products: HashMap::new(),
        };
        let all = partitions_in_box(k, width);
        for q in &order {
            for p in &all {
                if oracle.products.contains_key(&key(p, q)) {
                    continue;
                }
                let result = oracle.expand(p, q)?;
                for (_, c) in &result {
                    assert!(!c.is_negative(), "negative Pieri-derived coefficient");
                }
                oracle.products.insert(key(p, q), result);
            }
        }
        Ok(oracle)
    }

    fn expand(
        &self,
        p: &Partition,
        q: &Partition,
    ) -> Result<BTreeMap<(Partition, u32), BigInt>> {
        if q.parts().len() <= 1 {
            let mut out = BTreeMap::new();
            for (mu, d) in pieri_row(self.k, self.n, p, q.part(0))? {
                *out.entry((mu, d)).or_insert_with(BigInt::zero) += 1;
            }
            out.retain(|_, c| !c.is_zero());
            return Ok(out);
        }
        let r = q.part(0);
        let q_bar = Partition(q.parts()[1..].to_vec());
        // σ_p ⋆ σ_q = (σ_p ⋆ σ_q̄) ⋆ σ_r − Σ_{ν≠q} σ_p ⋆ σ_ν − q Σ σ_p ⋆ σ_ρ
        let mut acc: BTreeMap<(Partition, u32), BigInt> = BTreeMap::new();
        let base = self
            .products
            .get(&key(p, &q_bar))
            .expect("lighter partition already expanded");
        for ((mu, d), c) in base {
            for (nu, d2) in pieri_row(self.k, self.n, mu, r)? {
                *acc.entry((nu, d + d2)).or_insert_with(BigInt::zero) += c;
            }
        }
        for (nu, d) in pieri_row(self.k, self.n, &q_bar, r)? {
            if d == 0 && nu == *q {
                continue;
            }
            let known = self
                .products
                .get(&key(p, &nu))
                .expect("triangular order covers this partition");
            for ((mu, dd), c) in known {
                let e = acc.entry((mu.clone(), dd + d)).or_insert_with(BigInt::zero);
                *e -= c;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(acc)
    }

    pub fn product(&self, p: &Partition, q: &Partition) -> &BTreeMap<(Partition, u32), BigInt> {
        self.products.get(&key(p, q)).expect("partitions in box")
    }

    pub fn coefficient(&self, p: &Partition, q: &Partition, r: &Partition, d: u32) -> BigInt {
        self.product(p, q)
            .get(&(r.clone(), d))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }
}

fn key(p: &Partition, q: &Partition) -> (Partition, Partition) {
    if p <= q {
        (p.clone(), q.clone())
    } else {
        (q.clone(), p.clone())
    }
}

// ---- Closed formulas for Gr(k, n+1) ----

fn word_u(m: usize, i: usize) -> Vec<usize> {
    // u_i^{(m)} = s_{m−i+1} ⋯ s_{m−1} s_m
    (m + 1 - i..=m).collect()
}

fn word_v(m: usize, i: usize) -> Vec<usize> {
    let mut w = word_u(m, i);
    w.reverse();
    w
}

/// The closed-formula Peterson-Woodward data for the degree-d class of
/// Gr(k, n+1): λ_B and the factor ω_P ω_{P'}.
///
/// Writing d = m₁k + r₁ = m₂(n−k+1) + r₂ with 1 ≤ r₁ ≤ k and
/// 1 ≤ r₂ ≤ n−k+1, the coordinates of λ_B are m₁·i + max(0, i−(k−r₁))
/// for i < k, exactly d at i = k, and m₂·(n+1−i) + max(0, (k+r₂)−i) for
/// i > k; the factor is u^{(k−1)}_{k−r₁} ⋯ u^{(k−r₁)}_{k−r₁} ·
/// v^{(n−r₂+1)}_{n+1−k−r₂} ⋯ v^{(n)}_{n+1−k−r₂}. Both are certified
/// against the ⟨γ, λ_B⟩ ∈ {0,−1} condition before being returned.
pub fn grass_lambda_b(
    rs: &RootSystem,
    k: usize,
    d: i64,
) -> Result<(CorootVector, WeylElement)> {
    let n = rs.rank();
    if rs.lie_type() != LieType::A {
        return Err(Error::Precondition("Grassmannian formulas require type A".into()));
    }
    if k < 1 || k > n {
        return Err(Error::Precondition(format!("k={k} out of range 1..={n}")));
    }
    if d < 1 {
        return Err(Error::Precondition(format!("degree d={d} must be ≥ 1")));
    }
    let m1 = (d - 1) / k as i64;
    let r1 = ((d - 1) % k as i64) + 1;
    let span2 = (n - k + 1) as i64;
    let m2 = (d - 1) / span2;
    let r2 = ((d - 1) % span2) + 1;
    let mut coords = vec![0i64; n];
    for i in 1..k {
        let i64i = i as i64;
        coords[i - 1] = m1 * i64i + (i64i - (k as i64 - r1)).max(0);
    }
    coords[k - 1] = d;
    for i in k + 1..=n {
        let i64i = i as i64;
        coords[i - 1] = m2 * (n as i64 + 1 - i64i) + ((k as i64 + r2) - i64i).max(0);
    }
    let lambda = CorootVector(coords);
    // certify against the defining condition on R_P⁺
    for root in rs.positive_roots() {
        if root.root_coords[k - 1] != 0 {
            continue;
        }
        let pairing = rs.root_pairing(&root.root_coords, &lambda);
        if pairing != 0 && pairing != -1 {
            return Err(Error::Invariant(format!(
                "closed-formula λ_B = {lambda} fails certification for Gr({k},{})",
                n + 1
            )));
        }
    }
    let mut word: Vec<usize> = Vec::new();
    let i1 = k as i64 - r1;
    if i1 > 0 {
        for m in (i1 as usize..=k - 1).rev() {
            word.extend(word_u(m, i1 as usize));
        }
    }
    let i2 = n as i64 + 1 - k as i64 - r2;
    if i2 > 0 {
        for m in (n + 1 - r2 as usize)..=n {
            word.extend(word_v(m, i2 as usize));
        }
    }
    let omega = weyl::from_word(rs, &word)?;
    Ok((lambda, omega))
}

/// The element x = v_d^{(k)} u_{d−1}^{(k+d−1)} v_{d−1}^{(k)} ⋯ v_2^{(k)}
/// u_1^{(k+1)} s_k of length d², equal to its own inverse, supported on
/// {s_{k−d+1}, …, s_{k+d−1}}.
#[derive(Debug, Clone)]
pub struct XElement {
    pub k: usize,
    pub d: i64,
    pub element: WeylElement,
}

pub fn x_element(rs: &RootSystem, k: usize, d: i64) -> Result<XElement> {
    let n = rs.rank();
    if d < 1 {
        return Err(Error::Precondition(format!("degree d={d} must be ≥ 1")));
    }
    let d_us = d as usize;
    if d_us > k || k + d_us - 1 > n {
        return Err(Error::Precondition(format!(
            "x(k={k}, d={d}) needs d ≤ k and k+d−1 ≤ rank={n}"
        )));
    }
    let mut word: Vec<usize> = Vec::new();
    for i in (2..=d_us).rev() {
        word.extend(word_v(k, i));
        word.extend(word_u(k + i - 1, i - 1));
    }
    word.push(k);
    let element = weyl::from_word(rs, &word)?;
    if i64::from(element.length()) != d * d {
        return Err(Error::Invariant(format!(
            "ℓ(x) = {} ≠ d² = {}",
            element.length(),
            d * d
        )));
    }
    if !element.mul(rs, &element).is_identity() {
        return Err(Error::Invariant("x² ≠ id".into()));
    }
    let window = (k + 1 - d_us)..=(k + d_us - 1);
    if !element
        .canonical_word(rs)
        .iter()
        .all(|i| window.contains(i))
    {
        return Err(Error::Invariant(format!(
            "x(k={k}, d={d}) leaves its support window"
        )));
    }
    Ok(XElement { k, d, element })
}

/// Outcome of the quantum-to-classical conversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Q2COutcome {
    /// The invariant is zero; the string names the failed condition.
    Vanishes(&'static str),
    /// N_{u,v}^{w,d} equals the classical constant N_{ux,vx}^{w̃,0} of the
    /// two-step flag variety with Δ_{P̄} = Δ \ {α_{k−d}, α_{k+d}}.
    Triple {
        ux: WeylElement,
        vx: WeylElement,
        w_tilde: WeylElement,
    },
}

/// Convert a degree-d Grassmannian invariant into a classical two-step
/// flag intersection number, or report that it vanishes.
///
/// Vanishing conditions, in order: d > min{k, n+1−k};
/// ℓ(ux) ≠ ℓ(u)−ℓ(x); ℓ(vx) ≠ ℓ(v)−ℓ(x); w̃ ∉ W^{P̄}.
pub fn quantum_to_classical(
    rs: &RootSystem,
    k: usize,
    u: &WeylElement,
    v: &WeylElement,
    w: &WeylElement,
    d: i64,
) -> Result<Q2COutcome> {
    let n = rs.rank();
    let parabolic = ParabolicSubset::complement_of(k, n);
    for (name, x) in [("u", u), ("v", v), ("w", w)] {
        if !weyl::is_min_rep(x, &parabolic) {
            return Err(Error::Precondition(format!(
                "{name} is not a Grassmannian class for k={k}"
            )));
        }
    }
    if d == 0 {
        return Ok(Q2COutcome::Triple {
            ux: u.clone(),
            vx: v.clone(),
            w_tilde: w.clone(),
        });
    }
    if d < 0 {
        return Ok(Q2COutcome::Vanishes("negative degree"));
    }
    if d > (k.min(n + 1 - k)) as i64 {
        return Ok(Q2COutcome::Vanishes("d > min{k, n+1-k}"));
    }
    let x = x_element(rs, k, d)?.element;
    let lx = i64::from(x.length());
    let ux = u.mul(rs, &x);
    if i64::from(ux.length()) != i64::from(u.length()) - lx {
        return Ok(Q2COutcome::Vanishes("ℓ(ux) ≠ ℓ(u) − ℓ(x)"));
    }
    let vx = v.mul(rs, &x);
    if i64::from(vx.length()) != i64::from(v.length()) - lx {
        return Ok(Q2COutcome::Vanishes("ℓ(vx) ≠ ℓ(v) − ℓ(x)"));
    }
    let (_, omega) = grass_lambda_b(rs, k, d)?;
    let w_tilde = w.mul(rs, &omega);
    let two_step = two_step_parabolic(n, k, d);
    if !weyl::is_min_rep(&w_tilde, &two_step) {
        return Ok(Q2COutcome::Vanishes("w̃ ∉ W^{P̄}"));
    }
    Ok(Q2COutcome::Triple { ux, vx, w_tilde })
}

/// Δ_{P̄} = Δ \ {α_{k−d}, α_{k+d}} for the two-step flag F_{k−d,k+d;n+1}.
pub fn two_step_parabolic(n: usize, k: usize, d: i64) -> ParabolicSubset {
    let lo = k as i64 - d;
    let hi = k as i64 + d;
    ParabolicSubset::new(
        (1..=n as i64)
            .filter(|&j| j != lo && j != hi)
            .map(|j| j as usize)
            .collect(),
        n,
    )
    .expect("indices in range")
}

/// One-line view of v·x: positions k−d+1 ..= k+d sorted increasingly.
pub fn sort_view(rs: &RootSystem, v: &WeylElement, k: usize, d: i64) -> Result<Vec<usize>> {
    let n = rs.rank();
    let parabolic = ParabolicSubset::complement_of(k, n);
    if !weyl::is_min_rep(v, &parabolic) {
        return Err(Error::Precondition(format!(
            "v is not a Grassmannian class for k={k}"
        )));
    }
    let d_us = d as usize;
    if d < 1 || d_us > k || k + d_us > n + 1 {
        return Err(Error::Precondition(format!(
            "sort window for k={k}, d={d} out of range"
        )));
    }
    let mut one_line = v.one_line(rs);
    one_line[k - d_us..k + d_us].sort_unstable();
    Ok(one_line)
}

// ---- Verification sweeps ----

/// Criterion sweep: Pieri-derived constants equal the Peterson-Woodward
/// transported constants for every (u, v, w, d) on Gr(k, rank+1).
pub fn verify_pw_agreement(engine: &QuantumEngine, k: usize) -> Result<Report> {
    let rs = engine.root_system();
    let n = rs.rank();
    let width = (n + 1 - k) as u32;
    let oracle = PieriOracle::new(k, n)?;
    let parabolic = ParabolicSubset::complement_of(k, n);
    let parts = partitions_in_box(k, width);
    let perms: HashMap<&Partition, WeylElement> = parts
        .iter()
        .map(|p| Ok((p, permutation_of_partition(rs, k, p)?)))
        .collect::<Result<_>>()?;
    let mut report = Report::default();
    for (i, p) in parts.iter().enumerate() {
        for q in &parts[i..] {
            let table = oracle.product(p, q);
            let dmax = (p.weight() + q.weight()) / (n as i64 + 1) + 1;
            for r in &parts {
                for d in 0..=dmax {
                    report.checks += 1;
                    let expected = table
                        .get(&(r.clone(), d as u32))
                        .cloned()
                        .unwrap_or_else(BigInt::zero);
                    let lambda_p = CorootVector::simple(k, n).0 .iter()
                        .map(|&c| c * d)
                        .collect::<Vec<_>>();
                    let got = pw::gp_coefficient(
                        engine,
                        &parabolic,
                        &perms[p],
                        &perms[q],
                        &perms[r],
                        &CorootVector(lambda_p),
                    )?;
                    if expected != got {
                        report.violations.push(format!(
                            "Gr({k},{}): σ_{p} ⋆ σ_{q} at (σ_{r}, q^{d}): Pieri {expected} ≠ PW {got}",
                            n + 1
                        ));
                    }
                }
            }
        }
    }
    Ok(report.finalize())
}

/// Criterion sweep: the quantum-to-classical statement, the degree bound,
/// and the two-step membership lemma on Gr(k, rank+1).
pub fn verify_q2c(engine: &QuantumEngine, k: usize) -> Result<Report> {
    let rs = engine.root_system();
    let n = rs.rank();
    let width = (n + 1 - k) as u32;
    let oracle = PieriOracle::new(k, n)?;
    let parts = partitions_in_box(k, width);
    let perms: Vec<(Partition, WeylElement)> = parts
        .iter()
        .map(|p| Ok((p.clone(), permutation_of_partition(rs, k, p)?)))
        .collect::<Result<_>>()?;
    let dmin = k.min(n + 1 - k) as i64;
    let zero = CorootVector::zero(n);
    let mut report = Report::default();
    for (pu, u) in &perms {
        for (pv, v) in &perms {
            for (pwp, w) in &perms {
                for d in 1..=dmin + 1 {
                    report.checks += 1;
                    let expected = oracle.coefficient(pu, pv, pwp, d as u32);
                    let got = match quantum_to_classical(rs, k, u, v, w, d)? {
                        Q2COutcome::Vanishes(_) => BigInt::zero(),
                        Q2COutcome::Triple { ux, vx, w_tilde } => {
                            engine.coefficient(&ux, &vx, &w_tilde, &zero)?
                        }
                    };
                    if expected != got {
                        report.violations.push(format!(
                            "q2c Gr({k},{}): N_{{{pu},{pv}}}^{{{pwp},{d}}} = {expected} but two-step gives {got}",
                            n + 1
                        ));
                    }
                }
            }
        }
    }
    // Lemma: vx ∈ W^{P̄} whenever ℓ(vx) = ℓ(v) − ℓ(x).
    for d in 1..=dmin {
        let x = x_element(rs, k, d)?.element;
        let two_step = two_step_parabolic(n, k, d);
        for (_, v) in &perms {
            let vx = v.mul(rs, &x);
            if i64::from(vx.length()) == i64::from(v.length()) - d * d {
                report.checks += 1;
                if weyl::min_rep(rs, &vx, &two_step) != vx {
                    report.violations.push(format!(
                        "two-step membership fails for v={}, k={k}, d={d}",
                        weyl::format_word(rs, v)
                    ));
                }
            }
        }
    }
    Ok(report.finalize())
}

/// x-element invariants for every k, d with d ≤ k and k+d−1 ≤ `max_rank`.
pub fn verify_x_invariants(max_rank: usize) -> Result<Report> {
    let mut report = Report::default();
    for k in 1..=max_rank {
        for d in 1..=k as i64 {
            if k + d as usize - 1 > max_rank {
                continue;
            }
            let rs = crate::cartan::build_cartan(LieType::A, max_rank)?;
            report.checks += 1;
            // x_element validates ℓ(x) = d², x = x⁻¹ and the support window
            if let Err(e) = x_element(&rs, k, d) {
                report.violations.push(format!("x(k={k}, d={d}): {e}"));
            }
        }
    }
    Ok(report.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::build_cartan;
    use crate::weyl::from_word;
    use std::sync::Arc;

    fn a(n: usize) -> RootSystem {
        build_cartan(LieType::A, n).unwrap()
    }

    fn pt(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn pieri_examples_gr24() {
        // (2,1) × (1) → σ_{(2,2)} + q σ_∅
        let got = pieri_row(2, 3, &pt(&[2, 1]), 1).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.contains(&(pt(&[2, 2]), 0)));
        assert!(got.contains(&(Partition::empty(), 1)));
        // p × (0) → p
        let got = pieri_row(2, 3, &pt(&[2, 1]), 0).unwrap();
        assert_eq!(got, vec![(pt(&[2, 1]), 0)]);
        // (2,2) × (1) → q σ_{(1)}
        let got = pieri_row(2, 3, &pt(&[2, 2]), 1).unwrap();
        assert_eq!(got, vec![(pt(&[1]), 1)]);
    }

    #[test]
    fn pieri_oracle_hand_checked_products_gr24() {
        let oracle = PieriOracle::new(2, 3).unwrap();
        // σ_1 ⋆ σ_1 = σ_2 + σ_{1,1}
        let p1 = pt(&[1]);
        let t = oracle.product(&p1, &p1);
        assert_eq!(t.len(), 2);
        assert!(t[&(pt(&[2]), 0)].is_one());
        assert!(t[&(pt(&[1, 1]), 0)].is_one());
        // σ_2 ⋆ σ_2 = σ_{2,2}
        let p2 = pt(&[2]);
        let t = oracle.product(&p2, &p2);
        assert_eq!(t.len(), 1);
        assert!(t[&(pt(&[2, 2]), 0)].is_one());
        // σ_2 ⋆ σ_{1,1} = q σ_∅
        let t = oracle.product(&p2, &pt(&[1, 1]));
        assert_eq!(t.len(), 1);
        assert!(t[&(Partition::empty(), 1)].is_one());
        // σ_{1,1} ⋆ σ_{1,1} = σ_{2,2}
        let t = oracle.product(&pt(&[1, 1]), &pt(&[1, 1]));
        assert_eq!(t.len(), 1);
        assert!(t[&(pt(&[2, 2]), 0)].is_one());
        // σ_{2,2} ⋆ σ_{2,2} = q² σ_∅ (point times point)
        let t = oracle.product(&pt(&[2, 2]), &pt(&[2, 2]));
        assert_eq!(t.len(), 1);
        assert!(t[&(Partition::empty(), 2)].is_one());
    }

    #[test]
    fn partition_permutation_dictionary() {
        let rs = a(3);
        let u = permutation_of_partition(&rs, 2, &pt(&[1])).unwrap();
        assert_eq!(u, from_word(&rs, &[2]).unwrap());
        let v = permutation_of_partition(&rs, 2, &pt(&[2, 1])).unwrap();
        assert_eq!(v.one_line(&rs), vec![2, 4, 1, 3]);
        assert_eq!(v.length(), 3);
        assert_eq!(partition_of_permutation(&rs, 2, &v).unwrap(), pt(&[2, 1]));
        assert_eq!(
            partition_of_permutation(&rs, 2, &WeylElement::identity(&rs)).unwrap(),
            Partition::empty()
        );
        // a two-descent element is rejected
        let bad = from_word(&rs, &[1, 3]).unwrap();
        assert!(partition_of_permutation(&rs, 2, &bad).is_err());
    }

    #[test]
    fn grass_lambda_b_examples() {
        let rs = a(3);
        let (lb, omega) = grass_lambda_b(&rs, 2, 1).unwrap();
        assert_eq!(lb, CorootVector(vec![0, 1, 0]));
        assert_eq!(omega, from_word(&rs, &[1, 3]).unwrap());

        let (lb, omega) = grass_lambda_b(&rs, 2, 2).unwrap();
        assert_eq!(lb, CorootVector(vec![1, 2, 1]));
        assert!(omega.is_identity());

        let rs2 = a(2);
        let (lb, omega) = grass_lambda_b(&rs2, 1, 1).unwrap();
        assert_eq!(lb, CorootVector(vec![1, 0]));
        assert_eq!(omega, from_word(&rs2, &[2]).unwrap());
    }

    #[test]
    fn grass_lambda_b_matches_generic_lift() {
        for n in 1..=5usize {
            let rs = a(n);
            for k in 1..=n {
                let parabolic = ParabolicSubset::complement_of(k, n);
                for d in 1..=n as i64 {
                    let (closed, omega) = grass_lambda_b(&rs, k, d).unwrap();
                    let mut rep = CorootVector::zero(n);
                    rep.0[k - 1] = d;
                    let lift = pw::lambda_b(&rs, &parabolic, &rep).unwrap();
                    assert_eq!(closed, lift.lambda_b, "Gr({k},{}) d={d}", n + 1);
                    assert_eq!(omega, lift.omega_factor, "Gr({k},{}) d={d}", n + 1);
                }
            }
        }
    }

    #[test]
    fn x_element_examples() {
        let rs = a(3);
        let x = x_element(&rs, 2, 1).unwrap();
        assert_eq!(x.element, from_word(&rs, &[2]).unwrap());
        assert_eq!(x.element.length(), 1);

        let x = x_element(&rs, 2, 2).unwrap();
        assert_eq!(x.element, from_word(&rs, &[2, 1, 3, 2]).unwrap());
        assert_eq!(x.element.length(), 4);
        assert!(x.element.mul(&rs, &x.element).is_identity());

        assert!(x_element(&rs, 2, 3).is_err());
    }

    #[test]
    fn sort_view_examples() {
        let rs = a(3);
        let v = weyl::from_one_line(&rs, &[2, 4, 1, 3]).unwrap();
        assert_eq!(sort_view(&rs, &v, 2, 1).unwrap(), vec![2, 1, 4, 3]);
        let id = WeylElement::identity(&rs);
        assert_eq!(sort_view(&rs, &id, 2, 1).unwrap(), vec![1, 2, 3, 4]);
        // already-sorted window: v unchanged
        let u = weyl::from_one_line(&rs, &[1, 3, 2, 4]).unwrap();
        assert_eq!(sort_view(&rs, &u, 2, 1).unwrap(), vec![1, 2, 3, 4]);
        // sorted view equals v·x when lengths subtract
        let x = x_element(&rs, 2, 1).unwrap().element;
        let vx = v.mul(&rs, &x);
        assert_eq!(vx.one_line(&rs), sort_view(&rs, &v, 2, 1).unwrap());
    }

    #[test]
    fn q2c_examples_gr24() {
        let rs = Arc::new(a(3));
        let eng = QuantumEngine::new(rs.clone());
        let s2 = from_word(&rs, &[2]).unwrap();
        let id = WeylElement::identity(&rs);

        // u = v = σ_(1), w = ∅, d = 1: the triple evaluates to 0, matching
        // the Pieri product σ_1 ⋆ σ_1 which has no q-term.
        match quantum_to_classical(&rs, 2, &s2, &s2, &id, 1).unwrap() {
            Q2COutcome::Triple { ux, vx, w_tilde } => {
                assert!(ux.is_identity());
                assert!(vx.is_identity());
                assert_eq!(w_tilde, from_word(&rs, &[1, 3]).unwrap());
                assert!(eng
                    .coefficient(&ux, &vx, &w_tilde, &CorootVector::zero(3))
                    .unwrap()
                    .is_zero());
            }
            other => panic!("unexpected outcome {other:?}"),
        }

        // u = σ_(1), v = σ_(2,1), w = ∅, d = 1: classical number 1.
        let v21 = permutation_of_partition(&rs, 2, &pt(&[2, 1])).unwrap();
        match quantum_to_classical(&rs, 2, &s2, &v21, &id, 1).unwrap() {
            Q2COutcome::Triple { ux, vx, w_tilde } => {
                let got = eng
                    .coefficient(&ux, &vx, &w_tilde, &CorootVector::zero(3))
                    .unwrap();
                assert!(got.is_one());
            }
            other => panic!("unexpected outcome {other:?}"),
        }

        // d = 3 exceeds min{2,2}
        assert_eq!(
            quantum_to_classical(&rs, 2, &s2, &s2, &id, 3).unwrap(),
            Q2COutcome::Vanishes("d > min{k, n+1-k}")
        );
    }

    #[test]
    fn verify_sweeps_clean_on_gr24() {
        let eng = QuantumEngine::new(Arc::new(a(3)));
        let pw_rep = verify_pw_agreement(&eng, 2).unwrap();
        assert!(pw_rep.ok(), "{:?}", pw_rep.violations);
        assert!(pw_rep.checks > 0);
        let q2c_rep = verify_q2c(&eng, 2).unwrap();
        assert!(q2c_rep.ok(), "{:?}", q2c_rep.violations);
        let x_rep = verify_x_invariants(5).unwrap();
        assert!(x_rep.ok(), "{:?}", x_rep.violations);
    }

    #[test]
    fn partition_parse_and_display() {
        assert_eq!(Partition::parse("2,1").unwrap(), pt(&[2, 1]));
        assert_eq!(Partition::parse("0").unwrap(), Partition::empty());
        assert_eq!(Partition::parse("").unwrap(), Partition::empty());
        assert!(Partition::parse("1,2").is_err());
        assert_eq!(pt(&[3, 1]).to_string(), "3,1");
        assert_eq!(Partition::empty().to_string(), "0");
    }
}
