//! Quantum cohomology engine for G/B: sparse elements, quantum Chevalley
//! multiplication, full products by divisor-expansion recursion, and
//! structure-constant extraction.
//!
//! Coefficients are arbitrary-precision integers; rationals appear only
//! inside the per-length linear solves that expand a Schubert class in
//! divisor products. Products of basis classes are checked on construction
//! for integrality, non-negativity and degree homogeneity, so a silent
//! arithmetic fault cannot propagate.

use crate::cartan::{CorootVector, RootSystem};
use crate::weyl::{self, WeylElement, DEFAULT_GROUP_CEILING};
use crate::{Error, Result};
use dashmap::DashMap;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex};

/// Label q_λ σ^w of one basis symbol of QH*(G/B).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKey {
    pub w: WeylElement,
    pub lambda: CorootVector,
}

/// A finite integer combination of basis symbols q_λ σ^w.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QHElement {
    terms: BTreeMap<BasisKey, BigInt>,
}

impl QHElement {
    pub fn zero() -> Self {
        QHElement::default()
    }

    /// The basis class σ^w.
    pub fn basis(w: WeylElement, rank: usize) -> Self {
        let mut e = QHElement::zero();
        e.add_term(w, CorootVector::zero(rank), BigInt::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: WeylElement, lambda: CorootVector, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let key = BasisKey { w, lambda };
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, w: &WeylElement, lambda: &CorootVector) -> BigInt {
        self.terms
            .get(&BasisKey {
                w: w.clone(),
                lambda: lambda.clone(),
            })
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisKey, &BigInt)> {
        self.terms.iter()
    }

    /// The λ = 0 truncation.
    pub fn classical_part(&self) -> QHElement {
        QHElement {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.lambda.is_zero())
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

/// One stored divisor expansion: σ^u = Σ c ·(σ^{s_i} ⋆ σ^{u'}) − correction,
/// with the correction supported on strictly smaller lengths.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub rows: Vec<(BigRational, usize, WeylElement)>,
    pub correction: Vec<(BigRational, CorootVector, WeylElement)>,
}

/// Snapshot of the expansions for every u with 2 ≤ ℓ(u) ≤ `up_to_length`.
#[derive(Debug, Clone)]
pub struct ExpansionTable {
    pub up_to_length: usize,
    pub entries: BTreeMap<WeylElement, Arc<Expansion>>,
}

struct LevelState {
    levels: Vec<Vec<WeylElement>>,
    complete: bool,
}

/// The quantum product engine for one root system.
///
/// Pure-function semantics: results are bit-identical regardless of memo
/// state or thread scheduling; the memo tables only cache.
pub struct QuantumEngine {
    rs: Arc<RootSystem>,
    reflections: Vec<WeylElement>,
    ceiling: usize,
    levels: Mutex<LevelState>,
    expansions_solved_to: Mutex<usize>,
    expansions: DashMap<WeylElement, Arc<Expansion>>,
    chevalley_memo: DashMap<(usize, WeylElement), Arc<QHElement>>,
    products: DashMap<(WeylElement, WeylElement), Arc<QHElement>>,
}

impl QuantumEngine {
    pub fn new(rs: Arc<RootSystem>) -> Self {
        Self::with_ceiling(rs, DEFAULT_GROUP_CEILING)
    }

    pub fn with_ceiling(rs: Arc<RootSystem>, ceiling: usize) -> Self {
        let reflections = rs
            .positive_roots()
            .iter()
            .map(|r| weyl::reflection(&rs, r).expect("stored roots are roots"))
            .collect();
        QuantumEngine {
            rs,
            reflections,
            ceiling,
            levels: Mutex::new(LevelState {
                levels: vec![],
                complete: false,
            }),
            expansions_solved_to: Mutex::new(1),
            expansions: DashMap::new(),
            chevalley_memo: DashMap::new(),
            products: DashMap::new(),
        }
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    /// Elements of the given length (empty past ℓ(w₀)).
    pub fn elements_of_length(&self, len: usize) -> Result<Vec<WeylElement>> {
        let mut state = self.levels.lock().unwrap();
        if state.levels.is_empty() {
            state.levels = vec![vec![WeylElement::identity(&self.rs)]];
        }
        while state.levels.len() <= len && !state.complete {
            let total: usize = state.levels.iter().map(Vec::len).sum();
            let last = state.levels.last().unwrap();
            let mut next: std::collections::HashSet<WeylElement> = Default::default();
            for w in last {
                for i in 1..=self.rs.rank() {
                    if w.sgn(i) == 0 {
                        next.insert(w.mul_simple(&self.rs, i));
                    }
                }
            }
            if next.is_empty() {
                state.complete = true;
                break;
            }
            if total + next.len() > self.ceiling {
                return Err(Error::Precondition(format!(
                    "group enumeration exceeds ceiling {}",
                    self.ceiling
                )));
            }
            let mut level: Vec<WeylElement> = next.into_iter().collect();
            level.sort();
            state.levels.push(level);
        }
        Ok(state.levels.get(len).cloned().unwrap_or_default())
    }

    /// The whole Weyl group, sorted by (length, matrix); guarded by the
    /// enumeration ceiling.
    pub fn full_group(&self) -> Result<Vec<WeylElement>> {
        let mut all = Vec::new();
        let mut len = 0;
        loop {
            let level = self.elements_of_length(len)?;
            if level.is_empty() {
                return Ok(all);
            }
            all.extend(level);
            len += 1;
        }
    }

    /// Quantum Chevalley product σ^{s_i} ⋆ σ^w (1-based `i`).
    ///
    /// σ^{s_i} ⋆ σ^w = Σ_{ℓ(w s_γ)=ℓ(w)+1} ⟨χ_i, γ^∨⟩ σ^{w s_γ}
    ///              + Σ_{ℓ(w s_γ)=ℓ(w)+1−⟨2ρ,γ^∨⟩} ⟨χ_i, γ^∨⟩ q_{γ^∨} σ^{w s_γ},
    /// both sums over γ ∈ R⁺, with ⟨χ_i, γ^∨⟩ the i-th coroot coordinate.
    pub fn chevalley(&self, i: usize, w: &WeylElement) -> Arc<QHElement> {
        assert!(
            (1..=self.rs.rank()).contains(&i),
            "simple index {i} out of range"
        );
        let key = (i, w.clone());
        if let Some(hit) = self.chevalley_memo.get(&key) {
            return hit.clone();
        }
        let mut e = QHElement::zero();
        let lw = i64::from(w.length());
        for (idx, root) in self.rs.positive_roots().iter().enumerate() {
            let chi = root.coroot_coords[i - 1];
            if chi == 0 {
                continue;
            }
            let wg = w.mul(&self.rs, &self.reflections[idx]);
            let lwg = i64::from(wg.length());
            if lwg == lw + 1 {
                e.add_term(wg, CorootVector::zero(self.rs.rank()), BigInt::from(chi));
            } else if lwg == lw + 1 - root.two_rho_pairing {
                e.add_term(
                    wg,
                    CorootVector(root.coroot_coords.clone()),
                    BigInt::from(chi),
                );
            }
        }
        let arc = Arc::new(e);
        self.chevalley_memo.insert(key, arc.clone());
        arc
    }

    /// Solve the classical Monk systems for every length in 2..=`len`.
    fn ensure_expansions(&self, len: usize) -> Result<()> {
        let mut solved = self.expansions_solved_to.lock().unwrap();
        while *solved < len {
            let target = *solved + 1;
            let columns = self.elements_of_length(target)?;
            if columns.is_empty() {
                break; // past ℓ(w₀); nothing to solve
            }
            if !columns.iter().all(|u| self.expansions.contains_key(u)) {
                self.solve_level(target, &columns)?;
            }
            *solved = target;
        }
        Ok(())
    }

    /// Row-reduce the classical Monk matrix for one length and store the
    /// resulting expansion of every σ^u at that length.
    fn solve_level(&self, len: usize, columns: &[WeylElement]) -> Result<()> {
        let prev = self.elements_of_length(len - 1)?;
        let col_index: HashMap<&WeylElement, usize> =
            columns.iter().enumerate().map(|(i, w)| (w, i)).collect();
        // Rows: classical part of chevalley(i, u') over the columns,
        // one row per (u', i), ordered deterministically.
        let mut row_labels: Vec<(usize, WeylElement)> = Vec::new();
        let mut matrix: Vec<Vec<BigRational>> = Vec::new();
        for uprime in &prev {
            for i in 1..=self.rs.rank() {
                let chev = self.chevalley(i, uprime);
                let mut row = vec![BigRational::zero(); columns.len()];
                for (key, coeff) in chev.terms() {
                    if key.lambda.is_zero() {
                        let c = col_index[&key.w];
                        row[c] = BigRational::from(coeff.clone());
                    }
                }
                row_labels.push((i, uprime.clone()));
                matrix.push(row);
            }
        }
        let ncols = columns.len();
        let nrows = matrix.len();
        // Augment with the identity to track row combinations.
        for (r, row) in matrix.iter_mut().enumerate() {
            for rr in 0..nrows {
                row.push(if rr == r {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
            }
        }
        // Full reduced row echelon form; every column must get a pivot
        // because degree-2 classes generate the cohomology.
        let mut pivot_row_of_col = vec![usize::MAX; ncols];
        let mut next_row = 0usize;
        for c in 0..ncols {
            let pivot = (next_row..nrows).find(|&r| !matrix[r][c].is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => {
                    return Err(Error::Invariant(format!(
                        "singular Monk system at length {len}"
                    )))
                }
            };
            matrix.swap(next_row, pivot);
            let inv = matrix[next_row][c].clone();
            for x in matrix[next_row].iter_mut() {
                *x /= &inv;
            }
            for r in 0..nrows {
                if r != next_row && !matrix[r][c].is_zero() {
                    let f = matrix[r][c].clone();
                    for j in 0..matrix[r].len() {
                        let delta = &f * &matrix[next_row][j];
                        matrix[r][j] -= delta;
                    }
                }
            }
            pivot_row_of_col[c] = next_row;
            next_row += 1;
        }
        for (c, u) in columns.iter().enumerate() {
            let r = pivot_row_of_col[c];
            debug_assert!(matrix[r][..ncols]
                .iter()
                .enumerate()
                .all(|(j, x)| if j == c { x.is_one() } else { x.is_zero() }));
            let mut rows = Vec::new();
            let mut correction: BTreeMap<(CorootVector, WeylElement), BigRational> =
                BTreeMap::new();
            for (orig, coeff) in matrix[r][ncols..].iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let (i, uprime) = row_labels[orig].clone();
                let chev = self.chevalley(i, &uprime);
                for (key, n) in chev.terms() {
                    if key.lambda.is_zero() {
                        continue;
                    }
                    debug_assert!((key.w.length() as usize) < len - 1);
                    let entry = correction
                        .entry((key.lambda.clone(), key.w.clone()))
                        .or_insert_with(BigRational::zero);
                    *entry += coeff * BigRational::from(n.clone());
                }
                rows.push((coeff.clone(), i, uprime));
            }
            let correction = correction
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((lambda, w), c)| (c, lambda, w))
                .collect();
            self.expansions
                .insert(u.clone(), Arc::new(Expansion { rows, correction }));
        }
        Ok(())
    }

    /// The stored expansion of σ^u (ℓ(u) ≥ 2).
    pub fn expansion(&self, u: &WeylElement) -> Result<Arc<Expansion>> {
        assert!(u.length() >= 2, "expansions exist for ℓ(u) ≥ 2 only");
        self.ensure_expansions(u.length() as usize)?;
        Ok(self
            .expansions
            .get(u)
            .expect("expansion solved for this length")
            .clone())
    }

    /// Expansion table snapshot for every u with 2 ≤ ℓ(u) ≤ `up_to_length`.
    pub fn build_expansion(&self, up_to_length: usize) -> Result<ExpansionTable> {
        let mut entries = BTreeMap::new();
        for len in 2..=up_to_length {
            for u in self.elements_of_length(len)? {
                let exp = self.expansion(&u)?;
                entries.insert(u, exp);
            }
        }
        Ok(ExpansionTable {
            up_to_length,
            entries,
        })
    }

    /// Core recursion: expand `a` (the driver argument) and distribute over
    /// `b`; `sub` supplies sub-products so callers control memoization.
    fn compute_product(
        &self,
        a: &WeylElement,
        b: &WeylElement,
        sub: &mut dyn FnMut(&WeylElement, &WeylElement) -> Result<Arc<QHElement>>,
    ) -> Result<QHElement> {
        let rank = self.rs.rank();
        if a.is_identity() {
            return Ok(QHElement::basis(b.clone(), rank));
        }
        if a.length() == 1 {
            let i = a.descents(&self.rs)[0];
            return Ok((*self.chevalley(i, b)).clone());
        }
        let exp = self.expansion(a)?;
        let mut acc: BTreeMap<BasisKey, BigRational> = BTreeMap::new();
        for (c, i, uprime) in &exp.rows {
            let p = sub(uprime, b)?;
            for (key, n) in p.terms() {
                let chev = self.chevalley(*i, &key.w);
                let scale = c * BigRational::from(n.clone());
                for (ckey, m) in chev.terms() {
                    let full = BasisKey {
                        w: ckey.w.clone(),
                        lambda: key.lambda.add(&ckey.lambda),
                    };
                    let entry = acc.entry(full).or_insert_with(BigRational::zero);
                    *entry += &scale * BigRational::from(m.clone());
                }
            }
        }
        for (c, mu, x) in &exp.correction {
            let p = sub(x, b)?;
            for (key, n) in p.terms() {
                let full = BasisKey {
                    w: key.w.clone(),
                    lambda: key.lambda.add(mu),
                };
                let entry = acc.entry(full).or_insert_with(BigRational::zero);
                *entry -= c * BigRational::from(n.clone());
            }
        }
        let total = i64::from(a.length()) + i64::from(b.length());
        let mut result = QHElement::zero();
        for (key, val) in acc {
            if val.is_zero() {
                continue;
            }
            assert!(
                val.is_integer(),
                "non-integer coefficient {val} in a basis product"
            );
            let n = val.to_integer();
            assert!(
                !n.is_negative(),
                "negative coefficient {n} of q_{}·σ at length {} in basis product",
                key.lambda,
                key.w.length()
            );
            assert!(
                key.lambda.is_effective(),
                "non-effective degree {} in basis product",
                key.lambda
            );
            assert_eq!(
                i64::from(key.w.length()) + self.rs.two_rho(&key.lambda),
                total,
                "inhomogeneous term in basis product"
            );
            result.add_term(key.w, key.lambda, n);
        }
        Ok(result)
    }

    /// The full quantum product σ^u ⋆ σ^v, memoized on the unordered pair.
    pub fn product(&self, u: &WeylElement, v: &WeylElement) -> Result<Arc<QHElement>> {
        let (a, b) = if u <= v {
            (u.clone(), v.clone())
        } else {
            (v.clone(), u.clone())
        };
        if let Some(hit) = self.products.get(&(a.clone(), b.clone())) {
            return Ok(hit.clone());
        }
        let e = self.compute_product(&a, &b, &mut |x, y| self.product(x, y))?;
        let arc = Arc::new(e);
        self.products.insert((a, b), arc.clone());
        Ok(arc)
    }

    /// Product computed by always expanding the first argument, with no
    /// key normalization. Used by the commutativity verification, where
    /// the public [`Self::product`] would hide an asymmetry bug.
    pub fn product_expanding_first(
        &self,
        u: &WeylElement,
        v: &WeylElement,
    ) -> Result<QHElement> {
        let mut memo: HashMap<(WeylElement, WeylElement), Arc<QHElement>> = HashMap::new();
        Ok((*self.pef(u, v, &mut memo)?).clone())
    }

    fn pef(
        &self,
        u: &WeylElement,
        v: &WeylElement,
        memo: &mut HashMap<(WeylElement, WeylElement), Arc<QHElement>>,
    ) -> Result<Arc<QHElement>> {
        let key = (u.clone(), v.clone());
        if let Some(hit) = memo.get(&key) {
            return Ok(hit.clone());
        }
        let mut taken = std::mem::take(memo);
        let e = self.compute_product(u, v, &mut |x, y| {
            Ok(self.pef(x, y, &mut taken)?)
        })?;
        *memo = taken;
        let arc = Arc::new(e);
        memo.insert(key, arc.clone());
        Ok(arc)
    }

    /// Structure constant N_{u,v}^{w,λ}.
    ///
    /// Degree-inhomogeneous or non-effective queries return 0 without
    /// computing a product.
    pub fn coefficient(
        &self,
        u: &WeylElement,
        v: &WeylElement,
        w: &WeylElement,
        lambda: &CorootVector,
    ) -> Result<BigInt> {
        if !lambda.is_effective() {
            return Ok(BigInt::zero());
        }
        if i64::from(w.length()) + self.rs.two_rho(lambda)
            != i64::from(u.length()) + i64::from(v.length())
        {
            return Ok(BigInt::zero());
        }
        Ok(self.product(u, v)?.coefficient(w, lambda))
    }

    /// The classical cup product σ^u ∪ σ^v (the λ = 0 truncation).
    pub fn classical_product(&self, u: &WeylElement, v: &WeylElement) -> Result<QHElement> {
        Ok(self.product(u, v)?.classical_part())
    }

    /// Product of two arbitrary ring elements.
    pub fn mul(&self, x: &QHElement, y: &QHElement) -> Result<QHElement> {
        let mut out = QHElement::zero();
        for (kx, nx) in x.terms() {
            for (ky, ny) in y.terms() {
                let p = self.product(&kx.w, &ky.w)?;
                let shift = kx.lambda.add(&ky.lambda);
                let scale = nx * ny;
                for (kp, np) in p.terms() {
                    out.add_term(kp.w.clone(), kp.lambda.add(&shift), np * &scale);
                }
            }
        }
        Ok(out)
    }

    /// Number of memoized basis products (diagnostics, cache sizing).
    pub fn memoized_products(&self) -> usize {
        self.products.len()
    }
}

// ---- Cache file ----

#[derive(Serialize, Deserialize)]
struct CacheRow {
    c: String,
    i: usize,
    uprime: String,
}

#[derive(Serialize, Deserialize)]
struct CacheCorrection {
    c: String,
    lambda: Vec<i64>,
    w: String,
}

#[derive(Serialize, Deserialize)]
struct CacheExpansion {
    u: String,
    rows: Vec<CacheRow>,
    correction: Vec<CacheCorrection>,
}

#[derive(Serialize, Deserialize)]
struct CacheTerm {
    w: String,
    lambda: Vec<i64>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct CacheProduct {
    u: String,
    v: String,
    terms: Vec<CacheTerm>,
}

/// Versioned on-disk memo: `{"version":1,"type":"A","rank":3,...}`.
#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    #[serde(rename = "type")]
    lie_type: String,
    rank: usize,
    expansions: Vec<CacheExpansion>,
    products: Vec<CacheProduct>,
}

const CACHE_VERSION: u32 = 1;

fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rational_from_string(s: &str) -> Result<BigRational> {
    let parse_int = |p: &str| {
        p.parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer {p:?} in cache")))
    };
    match s.split_once('/') {
        Some((n, d)) => Ok(BigRational::new(parse_int(n)?, parse_int(d)?)),
        None => Ok(BigRational::from(parse_int(s)?)),
    }
}

impl QuantumEngine {
    /// Cache file name for this engine's root system inside a cache dir.
    pub fn cache_file_name(&self) -> String {
        format!("qschubert-{}{}.json", self.rs.lie_type(), self.rs.rank())
    }

    /// Serialize the memo tables (expansions and basis products).
    pub fn save_cache(&self, path: &Path) -> std::io::Result<()> {
        let rs = &self.rs;
        let word = |w: &WeylElement| weyl::format_word(rs, w);
        let mut exp_keys: Vec<WeylElement> =
            self.expansions.iter().map(|e| e.key().clone()).collect();
        exp_keys.sort();
        let mut expansions: Vec<CacheExpansion> = Vec::new();
        for u in exp_keys {
            let exp = self.expansions.get(&u).unwrap().clone();
            expansions.push(CacheExpansion {
                u: word(&u),
                rows: exp
                    .rows
                    .iter()
                    .map(|(c, i, up)| CacheRow {
                        c: rational_to_string(c),
                        i: *i,
                        uprime: word(up),
                    })
                    .collect(),
                correction: exp
                    .correction
                    .iter()
                    .map(|(c, lambda, w)| CacheCorrection {
                        c: rational_to_string(c),
                        lambda: lambda.0.clone(),
                        w: word(w),
                    })
                    .collect(),
            });
        }
        let mut prod_keys: Vec<(WeylElement, WeylElement)> =
            self.products.iter().map(|e| e.key().clone()).collect();
        prod_keys.sort();
        let mut products = Vec::new();
        for key in prod_keys {
            let p = self.products.get(&key).unwrap().clone();
            products.push(CacheProduct {
                u: word(&key.0),
                v: word(&key.1),
                terms: p
                    .terms()
                    .map(|(k, n)| CacheTerm {
                        w: word(&k.w),
                        lambda: k.lambda.0.clone(),
                        coeff: n.to_string(),
                    })
                    .collect(),
            });
        }
        let file = CacheFile {
            version: CACHE_VERSION,
            lie_type: self.rs.lie_type().to_string(),
            rank: self.rs.rank(),
            expansions,
            products,
        };
        std::fs::write(path, serde_json::to_string(&file).unwrap())
    }

    /// Load a cache file; a missing file, or one with a mismatched version,
    /// type or rank, loads nothing (absent cache → recompute).
    pub fn load_cache(&self, path: &Path) -> Result<usize> {
        let data = match std::fs::read_to_string(path) {
            Ok(d) => d,
            Err(_) => return Ok(0),
        };
        let file: CacheFile = serde_json::from_str(&data)
            .map_err(|e| Error::Parse(format!("malformed cache file: {e}")))?;
        if file.version != CACHE_VERSION
            || file.lie_type != self.rs.lie_type().to_string()
            || file.rank != self.rs.rank()
        {
            return Ok(0);
        }
        let rs = &self.rs;
        let mut loaded = 0;
        for exp in file.expansions {
            let u = weyl::parse_element(rs, &exp.u)?;
            let rows = exp
                .rows
                .into_iter()
                .map(|r| {
                    Ok((
                        rational_from_string(&r.c)?,
                        r.i,
                        weyl::parse_element(rs, &r.uprime)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let correction = exp
                .correction
                .into_iter()
                .map(|c| {
                    Ok((
                        rational_from_string(&c.c)?,
                        CorootVector(c.lambda),
                        weyl::parse_element(rs, &c.w)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            self.expansions
                .insert(u, Arc::new(Expansion { rows, correction }));
            loaded += 1;
        }
        for prod in file.products {
            let u = weyl::parse_element(rs, &prod.u)?;
            let v = weyl::parse_element(rs, &prod.v)?;
            let mut e = QHElement::zero();
            for t in prod.terms {
                let w = weyl::parse_element(rs, &t.w)?;
                let coeff = t
                    .coeff
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {:?}", t.coeff)))?;
                e.add_term(w, CorootVector(t.lambda), coeff);
            }
            self.products.insert((u, v), Arc::new(e));
            loaded += 1;
        }
        Ok(loaded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{build_cartan, LieType};
    use crate::weyl::from_word;

    fn engine(n: usize) -> QuantumEngine {
        QuantumEngine::new(Arc::new(build_cartan(LieType::A, n).unwrap()))
    }

    fn elem(eng: &QuantumEngine, terms: &[(&[usize], &[i64], i64)]) -> QHElement {
        let mut e = QHElement::zero();
        for (word, lambda, coeff) in terms {
            e.add_term(
                from_word(eng.root_system(), word).unwrap(),
                CorootVector(lambda.to_vec()),
                BigInt::from(*coeff),
            );
        }
        e
    }

    #[test]
    fn chevalley_examples_a2() {
        let eng = engine(2);
        let rs = eng.root_system();
        let s1 = from_word(rs, &[1]).unwrap();
        // σ^{s1} ⋆ σ^{s1} = σ^{s2 s1} + q1 σ^{id}
        let got = eng.chevalley(1, &s1);
        assert_eq!(*got, elem(&eng, &[(&[2, 1], &[0, 0], 1), (&[], &[1, 0], 1)]));
        // σ^{s1} ⋆ σ^{w0} = q1 σ^{s1 s2} + q1 q2 σ^{id}
        let w0 = from_word(rs, &[1, 2, 1]).unwrap();
        let got = eng.chevalley(1, &w0);
        assert_eq!(*got, elem(&eng, &[(&[1, 2], &[1, 0], 1), (&[], &[1, 1], 1)]));
        // σ^{s_i} ⋆ σ^{id} = σ^{s_i}
        let got = eng.chevalley(2, &WeylElement::identity(rs));
        assert_eq!(*got, elem(&eng, &[(&[2], &[0, 0], 1)]));
    }

    #[test]
    fn expansion_reproduces_basis_classes() {
        // Re-evaluating Σ c (σ^{s_i} ⋆ σ^{u'}) − correction must give σ^u.
        for n in [2usize, 3] {
            let eng = engine(n);
            let top = n * (n + 1) / 2;
            let table = eng.build_expansion(top).unwrap();
            assert!(!table.entries.is_empty());
            for (u, exp) in &table.entries {
                let mut acc: BTreeMap<BasisKey, BigRational> = BTreeMap::new();
                for (c, i, uprime) in &exp.rows {
                    for (key, m) in eng.chevalley(*i, uprime).terms() {
                        let e = acc.entry(key.clone()).or_insert_with(BigRational::zero);
                        *e += c * BigRational::from(m.clone());
                    }
                }
                for (c, lambda, w) in &exp.correction {
                    let key = BasisKey {
                        w: w.clone(),
                        lambda: lambda.clone(),
                    };
                    let e = acc.entry(key).or_insert_with(BigRational::zero);
                    *e -= c;
                }
                acc.retain(|_, v| !v.is_zero());
                assert_eq!(acc.len(), 1, "σ^{:?}", u);
                let (key, val) = acc.into_iter().next().unwrap();
                assert_eq!(key.w, *u);
                assert!(key.lambda.is_zero());
                assert!(val.is_one());
                for (_, _, w) in &exp.correction {
                    assert!(w.length() < u.length());
                }
            }
        }
    }

    #[test]
    fn expansion_table_empty_below_length_two() {
        let eng = engine(2);
        let table = eng.build_expansion(1).unwrap();
        assert!(table.entries.is_empty());
    }

    #[test]
    fn product_examples_a2() {
        let eng = engine(2);
        let rs = eng.root_system();
        let id = WeylElement::identity(rs);
        let s1 = from_word(rs, &[1]).unwrap();
        let s2 = from_word(rs, &[2]).unwrap();
        let s2s1 = from_word(rs, &[2, 1]).unwrap();

        assert_eq!(
            *eng.product(&id, &s2s1).unwrap(),
            QHElement::basis(s2s1.clone(), 2)
        );
        // σ^{s1} ⋆ σ^{s2} = σ^{s2 s1} + σ^{s1 s2}
        assert_eq!(
            *eng.product(&s1, &s2).unwrap(),
            elem(&eng, &[(&[2, 1], &[0, 0], 1), (&[1, 2], &[0, 0], 1)])
        );
        // σ^{s1} ⋆ σ^{s2 s1} = q1 σ^{s2}
        assert_eq!(
            *eng.product(&s1, &s2s1).unwrap(),
            elem(&eng, &[(&[2], &[1, 0], 1)])
        );
        // expansion route: σ^{s2 s1} = σ^{s1} ⋆ σ^{s1} − q1 σ^{id}
        let mut lhs = (*eng.product(&s1, &s1).unwrap()).clone();
        lhs.add_term(id, CorootVector(vec![1, 0]), BigInt::from(-1));
        assert_eq!(lhs, QHElement::basis(s2s1, 2));
    }

    #[test]
    fn classical_product_examples() {
        let eng = engine(2);
        let rs = eng.root_system();
        let s1 = from_word(rs, &[1]).unwrap();
        let s2 = from_word(rs, &[2]).unwrap();
        let s2s1 = from_word(rs, &[2, 1]).unwrap();
        assert_eq!(
            eng.classical_product(&s1, &s2).unwrap(),
            elem(&eng, &[(&[2, 1], &[0, 0], 1), (&[1, 2], &[0, 0], 1)])
        );
        assert!(eng.classical_product(&s1, &s2s1).unwrap().is_zero());
        let v = from_word(rs, &[1, 2]).unwrap();
        assert_eq!(
            eng.classical_product(&WeylElement::identity(rs), &v).unwrap(),
            QHElement::basis(v, 2)
        );
    }

    #[test]
    fn coefficient_paper_values_fl4() {
        let eng = engine(3);
        let rs = eng.root_system();
        let u = from_word(rs, &[2, 1, 2]).unwrap();
        let w = from_word(rs, &[2, 3]).unwrap();
        assert_eq!(
            eng.coefficient(&u, &u, &w, &CorootVector(vec![1, 1, 0]))
                .unwrap(),
            BigInt::one()
        );
        let s2 = from_word(rs, &[2]).unwrap();
        let s3s2 = from_word(rs, &[3, 2]).unwrap();
        assert_eq!(
            eng.coefficient(&s2, &s2, &s3s2, &CorootVector::zero(3))
                .unwrap(),
            BigInt::one()
        );
        let id = WeylElement::identity(rs);
        assert_eq!(
            eng.coefficient(&id, &id, &id, &CorootVector::zero(3))
                .unwrap(),
            BigInt::one()
        );
        // short-circuits: non-effective and inhomogeneous queries
        assert_eq!(
            eng.coefficient(&id, &id, &id, &CorootVector(vec![-1, 0, 0]))
                .unwrap(),
            BigInt::zero()
        );
        assert_eq!(
            eng.coefficient(&id, &id, &id, &CorootVector(vec![1, 0, 0]))
                .unwrap(),
            BigInt::zero()
        );
    }

    #[test]
    fn chevalley_consistency_fl3() {
        let eng = engine(2);
        for w in eng.full_group().unwrap() {
            for i in 1..=2 {
                let s_i = from_word(eng.root_system(), &[i]).unwrap();
                assert_eq!(*eng.product(&s_i, &w).unwrap(), *eng.chevalley(i, &w));
            }
        }
    }

    #[test]
    fn commutativity_fl3_both_expansion_orders() {
        let eng = engine(2);
        let group = eng.full_group().unwrap();
        for u in &group {
            for v in &group {
                let uv = eng.product_expanding_first(u, v).unwrap();
                let vu = eng.product_expanding_first(v, u).unwrap();
                assert_eq!(uv, vu);
            }
        }
    }

    #[test]
    fn associativity_spot_checks_fl3() {
        let eng = engine(2);
        let group = eng.full_group().unwrap();
        for u in &group {
            for v in &group {
                for t in &group {
                    let uv = (*eng.product(u, v).unwrap()).clone();
                    let vt = (*eng.product(v, t).unwrap()).clone();
                    let lhs = eng.mul(&uv, &QHElement::basis(t.clone(), 2)).unwrap();
                    let rhs = eng.mul(&QHElement::basis(u.clone(), 2), &vt).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let eng = engine(2);
        let rs = eng.root_system();
        let s1 = from_word(rs, &[1]).unwrap();
        let w0 = from_word(rs, &[1, 2, 1]).unwrap();
        let expected = (*eng.product(&s1, &w0).unwrap()).clone();
        eng.save_cache(&path).unwrap();

        let eng2 = engine(2);
        let loaded = eng2.load_cache(&path).unwrap();
        assert!(loaded > 0);
        assert_eq!(*eng2.product(&s1, &w0).unwrap(), expected);

        // mismatched rank is ignored
        let eng3 = engine(3);
        assert_eq!(eng3.load_cache(&path).unwrap(), 0);
    }
}
