//! Grading, vanishing criteria, rewrite identities with audit traces, and
//! the quantum-to-classical reduction loop for Grassmannian classes.
//!
//! The two-variable grading
//! `gr_α(q_λ σ^w) = (sgn_α(w)+⟨α,λ⟩, ℓ(w)+⟨2ρ,λ⟩−sgn_α(w)−⟨α,λ⟩)`
//! is compared lexicographically. The rewrite rules preserve structure
//! constants:
//!
//! - `R1-BOTH`:        N_{u,v}^{w,λ} = N_{us_α,vs_α}^{w,λ−α^∨} when
//!   sgn_α(u) = sgn_α(v) = 1 and sgn_α(w)+⟨α,λ⟩ = 2.
//! - `R2-TRANSFER-V`:  N_{u,v}^{w,λ} = N_{u,vs_α}^{ws_α,λ−α^∨} (sgn_α(w)=0)
//!   or N_{u,vs_α}^{ws_α,λ} (sgn_α(w)=1), when sgn_α(v) = 1 and
//!   sgn_α(w)+⟨α,λ⟩ = sgn_α(u)+sgn_α(v).
//! - `R2-TRANSFER-U`:  the same with u and v swapped (valid since
//!   N_{u,v} = N_{v,u}).
//!
//! The transfer rules are implemented under the *equality* hypothesis with
//! any common value; the strict flag restricts to common value 2. The
//! generalized form is machine-verified exhaustively by
//! [`verify_transfer`], which fails loudly on any counterexample.

use crate::cartan::{CorootVector, LieType, RootSystem};
use crate::qhring::QuantumEngine;
use crate::weyl::{self, WeylElement};
use crate::{Error, Report, Result};
use num::{BigInt, Zero};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashSet};

/// A value of the grading map, compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Grading(pub i64, pub i64);

/// gr_α(q_λ σ^w) for a 1-based simple index.
pub fn gr(rs: &RootSystem, alpha: usize, lambda: &CorootVector, w: &WeylElement) -> Grading {
    let first = w.sgn(alpha) + rs.pairing(alpha, lambda);
    let total = i64::from(w.length()) + rs.two_rho(lambda);
    Grading(first, total - first)
}

/// The label (u, v, w, λ) of one structure constant N_{u,v}^{w,λ}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quad {
    pub u: WeylElement,
    pub v: WeylElement,
    pub w: WeylElement,
    pub lambda: CorootVector,
}

impl Quad {
    pub fn display(&self, rs: &RootSystem) -> String {
        format!(
            "(u={}, v={}, w={}, λ={})",
            weyl::format_word(rs, &self.u),
            weyl::format_word(rs, &self.v),
            weyl::format_word(rs, &self.w),
            self.lambda
        )
    }
}

/// Why a structure constant is known to vanish without computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VanishReason {
    /// λ has a negative coordinate.
    NonEffective,
    /// ℓ(w) + ⟨2ρ,λ⟩ ≠ ℓ(u) + ℓ(v).
    DegreeMismatch,
    /// sgn_α(w)+⟨α,λ⟩ > sgn_α(u)+sgn_α(v) at the witness index.
    SgnInequality { alpha: usize },
}

/// Verdict of the vanishing test. `NonzeroPossible` is not a guarantee of
/// nonzeroness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NonzeroPossible,
    Vanishes(VanishReason),
}

/// Test the effectivity, degree and sign vanishing criteria, in that order.
pub fn vanishing_check(rs: &RootSystem, quad: &Quad) -> Verdict {
    if !quad.lambda.is_effective() {
        return Verdict::Vanishes(VanishReason::NonEffective);
    }
    if i64::from(quad.w.length()) + rs.two_rho(&quad.lambda)
        != i64::from(quad.u.length()) + i64::from(quad.v.length())
    {
        return Verdict::Vanishes(VanishReason::DegreeMismatch);
    }
    for alpha in 1..=rs.rank() {
        let lhs = quad.w.sgn(alpha) + rs.pairing(alpha, &quad.lambda);
        let rhs = quad.u.sgn(alpha) + quad.v.sgn(alpha);
        if lhs > rhs {
            return Verdict::Vanishes(VanishReason::SgnInequality { alpha });
        }
    }
    Verdict::NonzeroPossible
}

/// The rewrite identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    R1Both,
    R2TransferV,
    R2TransferU,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Raise,
}

fn transfer_v_lower(rs: &RootSystem, q: &Quad, alpha: usize, strict: bool) -> Result<Quad> {
    if q.v.sgn(alpha) != 1 {
        return Err(Error::RuleNotApplicable(format!(
            "sgn_{alpha}(v) = 0; the transfer needs a descent of v at α_{alpha}"
        )));
    }
    let sw = q.w.sgn(alpha);
    let lhs = sw + rs.pairing(alpha, &q.lambda);
    let rhs = q.u.sgn(alpha) + 1;
    if lhs != rhs {
        return Err(Error::RuleNotApplicable(format!(
            "equality sgn_{alpha}(w)+⟨α_{alpha},λ⟩ = sgn_{alpha}(u)+sgn_{alpha}(v) fails: {lhs} ≠ {rhs}"
        )));
    }
    if strict && lhs != 2 {
        return Err(Error::RuleNotApplicable(format!(
            "strict mode requires common value 2, found {lhs}"
        )));
    }
    let lambda = if sw == 0 {
        q.lambda.add_simple(alpha, -1)
    } else {
        q.lambda.clone()
    };
    Ok(Quad {
        u: q.u.clone(),
        v: q.v.mul_simple(rs, alpha),
        w: q.w.mul_simple(rs, alpha),
        lambda,
    })
}

fn r1_lower(rs: &RootSystem, q: &Quad, alpha: usize) -> Result<Quad> {
    if q.u.sgn(alpha) != 1 || q.v.sgn(alpha) != 1 {
        return Err(Error::RuleNotApplicable(format!(
            "R1 needs sgn_{alpha}(u) = sgn_{alpha}(v) = 1"
        )));
    }
    let lhs = q.w.sgn(alpha) + rs.pairing(alpha, &q.lambda);
    if lhs != 2 {
        return Err(Error::RuleNotApplicable(format!(
            "R1 needs sgn_{alpha}(w)+⟨α_{alpha},λ⟩ = 2, found {lhs}"
        )));
    }
    Ok(Quad {
        u: q.u.mul_simple(rs, alpha),
        v: q.v.mul_simple(rs, alpha),
        w: q.w.clone(),
        lambda: q.lambda.add_simple(alpha, -1),
    })
}

fn swap_uv(q: &Quad) -> Quad {
    Quad {
        u: q.v.clone(),
        v: q.u.clone(),
        w: q.w.clone(),
        lambda: q.lambda.clone(),
    }
}

/// Apply one rewrite rule at the simple root α (1-based).
///
/// `Lower` applies the forward substitution; `Raise` the inverse one (the
/// degree q_λ increases). The structure constants of the input and output
/// quads are equal whenever the rule applies. With `strict` set, the
/// transfer rules demand the literal common value 2.
pub fn apply_rule(
    rs: &RootSystem,
    quad: &Quad,
    alpha: usize,
    kind: RuleKind,
    direction: Direction,
    strict: bool,
) -> Result<Quad> {
    if alpha < 1 || alpha > rs.rank() {
        return Err(Error::Precondition(format!(
            "simple index {alpha} out of range 1..={}",
            rs.rank()
        )));
    }
    match (kind, direction) {
        (RuleKind::R1Both, Direction::Lower) => r1_lower(rs, quad, alpha),
        (RuleKind::R1Both, Direction::Raise) => {
            if quad.u.sgn(alpha) != 0 || quad.v.sgn(alpha) != 0 {
                return Err(Error::RuleNotApplicable(format!(
                    "raising R1 needs sgn_{alpha}(u) = sgn_{alpha}(v) = 0"
                )));
            }
            let cand = Quad {
                u: quad.u.mul_simple(rs, alpha),
                v: quad.v.mul_simple(rs, alpha),
                w: quad.w.clone(),
                lambda: quad.lambda.add_simple(alpha, 1),
            };
            let back = r1_lower(rs, &cand, alpha)?;
            debug_assert_eq!(&back, quad);
            Ok(cand)
        }
        (RuleKind::R2TransferV, Direction::Lower) => transfer_v_lower(rs, quad, alpha, strict),
        (RuleKind::R2TransferV, Direction::Raise) => {
            if quad.v.sgn(alpha) != 0 {
                return Err(Error::RuleNotApplicable(format!(
                    "raising the transfer needs sgn_{alpha}(v) = 0"
                )));
            }
            let lambda = if quad.w.sgn(alpha) == 1 {
                quad.lambda.add_simple(alpha, 1)
            } else {
                quad.lambda.clone()
            };
            let cand = Quad {
                u: quad.u.clone(),
                v: quad.v.mul_simple(rs, alpha),
                w: quad.w.mul_simple(rs, alpha),
                lambda,
            };
            let back = transfer_v_lower(rs, &cand, alpha, strict)?;
            debug_assert_eq!(&back, quad);
            Ok(cand)
        }
        (RuleKind::R2TransferU, dir) => {
            let swapped = apply_rule(rs, &swap_uv(quad), alpha, RuleKind::R2TransferV, dir, strict)?;
            Ok(swap_uv(&swapped))
        }
    }
}

// ---- Reduction traces ----

/// Tag of one trace step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepTag {
    VanishSgn,
    VanishDeg,
    VanishEff,
    R1Both,
    R2TransferV,
    R2TransferU,
    Raise,
}

impl StepTag {
    pub fn as_str(self) -> &'static str {
        match self {
            StepTag::VanishSgn => "VANISH-SGN",
            StepTag::VanishDeg => "VANISH-DEG",
            StepTag::VanishEff => "VANISH-EFF",
            StepTag::R1Both => "R1-BOTH",
            StepTag::R2TransferV => "R2-TRANSFER-V",
            StepTag::R2TransferU => "R2-TRANSFER-U",
            StepTag::Raise => "RAISE",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "VANISH-SGN" => StepTag::VanishSgn,
            "VANISH-DEG" => StepTag::VanishDeg,
            "VANISH-EFF" => StepTag::VanishEff,
            "R1-BOTH" => StepTag::R1Both,
            "R2-TRANSFER-V" => StepTag::R2TransferV,
            "R2-TRANSFER-U" => StepTag::R2TransferU,
            "RAISE" => StepTag::Raise,
            other => return Err(Error::Parse(format!("unknown rule tag {other:?}"))),
        })
    }
}

/// One step of an auditable rewrite chain. Vanishing steps are terminal
/// and have no `after` quad.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub tag: StepTag,
    pub alpha: Option<usize>,
    pub before: Quad,
    pub after: Option<Quad>,
}

fn quad_to_json(rs: &RootSystem, q: &Quad) -> serde_json::Value {
    serde_json::json!({
        "u": weyl::format_word(rs, &q.u),
        "v": weyl::format_word(rs, &q.v),
        "w": weyl::format_word(rs, &q.w),
        "lambda": q.lambda.0,
    })
}

fn quad_from_json(rs: &RootSystem, v: &serde_json::Value) -> Result<Quad> {
    let field = |name: &str| {
        v.get(name)
            .and_then(|x| x.as_str())
            .ok_or_else(|| Error::Parse(format!("trace quad missing field {name:?}")))
    };
    let lambda = v
        .get("lambda")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Parse("trace quad missing lambda".into()))?
        .iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| Error::Parse("bad lambda entry".into()))
        })
        .collect::<Result<Vec<i64>>>()?;
    Ok(Quad {
        u: weyl::parse_element(rs, field("u")?)?,
        v: weyl::parse_element(rs, field("v")?)?,
        w: weyl::parse_element(rs, field("w")?)?,
        lambda: CorootVector(lambda),
    })
}

/// Serialize a trace as a JSON array of step records.
pub fn trace_to_json(rs: &RootSystem, trace: &[TraceStep]) -> serde_json::Value {
    serde_json::Value::Array(
        trace
            .iter()
            .map(|s| {
                serde_json::json!({
                    "rule": s.tag.as_str(),
                    "alpha": s.alpha,
                    "before": quad_to_json(rs, &s.before),
                    "after": s.after.as_ref().map(|q| quad_to_json(rs, q)),
                })
            })
            .collect(),
    )
}

/// Parse a trace serialized by [`trace_to_json`].
pub fn trace_from_json(rs: &RootSystem, v: &serde_json::Value) -> Result<Vec<TraceStep>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("trace is not an array".into()))?;
    arr.iter()
        .map(|s| {
            let tag = StepTag::parse(
                s.get("rule")
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| Error::Parse("trace step missing rule".into()))?,
            )?;
            let alpha = match s.get("alpha") {
                Some(serde_json::Value::Null) | None => None,
                Some(x) => Some(
                    x.as_u64()
                        .ok_or_else(|| Error::Parse("bad alpha in trace".into()))?
                        as usize,
                ),
            };
            let before = quad_from_json(rs, s.get("before").unwrap_or(&serde_json::Value::Null))?;
            let after = match s.get("after") {
                Some(serde_json::Value::Null) | None => None,
                Some(x) => Some(quad_from_json(rs, x)?),
            };
            Ok(TraceStep {
                tag,
                alpha,
                before,
                after,
            })
        })
        .collect()
}

// ---- The reduction algorithm ----

/// Result of a reduction run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReduceOutcome {
    /// Terminal quad with λ = 0; its classical constant equals the input's
    /// quantum constant.
    Reduced(Quad),
    /// The constant is zero.
    Vanishes(VanishReason),
}

fn check_reduce_preconditions(rs: &RootSystem, k: usize, quad: &Quad) -> Result<()> {
    if rs.lie_type() != LieType::A {
        return Err(Error::Precondition(
            "the reduction algorithm is stated for type A".into(),
        ));
    }
    if k < 1 || k > rs.rank() {
        return Err(Error::Precondition(format!(
            "descent position {k} out of range 1..={}",
            rs.rank()
        )));
    }
    for j in 1..=rs.rank() {
        if j != k && quad.u.sgn(j) == 1 {
            return Err(Error::Precondition(format!(
                "u is not Grassmannian with descent {k}: sgn_{j}(u) = 1"
            )));
        }
    }
    if !quad.lambda.is_effective() {
        return Err(Error::Precondition(format!(
            "λ = {} is not effective",
            quad.lambda
        )));
    }
    Ok(())
}

enum StepChoice {
    Vanish(usize),
    Transfer(usize),
}

/// Decide what the reduction loop does at `q` when index `m` is selected.
fn classify_step(rs: &RootSystem, k: usize, q: &Quad, m: usize, unique: bool) -> StepChoice {
    if unique {
        if m != k {
            // sgn_m(u) = 0 and ⟨α_m, λ⟩ ≥ 2 force a strict sign inequality.
            return StepChoice::Vanish(m);
        }
        let lhs = q.w.sgn(k) + rs.pairing(k, &q.lambda);
        let rhs = q.u.sgn(k) + q.v.sgn(k);
        debug_assert!(lhs >= rhs, "⟨α_k,λ⟩ ≥ 2 bounds the right side");
        if lhs != rhs {
            return StepChoice::Vanish(k);
        }
        StepChoice::Transfer(k)
    } else {
        let lhs = q.w.sgn(m) + rs.pairing(m, &q.lambda);
        if q.v.sgn(m) < lhs {
            StepChoice::Vanish(m)
        } else {
            StepChoice::Transfer(m)
        }
    }
}

/// Reduce a quad with Grassmannian u (descent k) to a classical one.
///
/// Loop on |λ| > 0: let M = {m : ⟨α_m, λ⟩ > 0} (nonempty for nonzero
/// effective λ). With several candidates, the smallest m ≠ k is taken and
/// either the constant vanishes by the sign criterion or the generalized
/// v-transfer applies at m. With a unique candidate m, the constant
/// vanishes unless m = k and the sign criterion holds with equality, in
/// which case the transfer applies at k. Every step lowers |λ| by one and
/// keeps λ effective.
pub fn reduce_grassmannian(
    rs: &RootSystem,
    k: usize,
    quad: &Quad,
) -> Result<(ReduceOutcome, Vec<TraceStep>)> {
    check_reduce_preconditions(rs, k, quad)?;
    let mut trace = Vec::new();
    if i64::from(quad.w.length()) + rs.two_rho(&quad.lambda)
        != i64::from(quad.u.length()) + i64::from(quad.v.length())
    {
        trace.push(TraceStep {
            tag: StepTag::VanishDeg,
            alpha: None,
            before: quad.clone(),
            after: None,
        });
        return Ok((ReduceOutcome::Vanishes(VanishReason::DegreeMismatch), trace));
    }
    let mut q = quad.clone();
    while !q.lambda.is_zero() {
        let m_set: Vec<usize> = (1..=rs.rank())
            .filter(|&m| rs.pairing(m, &q.lambda) > 0)
            .collect();
        assert!(
            !m_set.is_empty(),
            "a nonzero effective λ pairs positively with some simple root"
        );
        let (m, unique) = if m_set.len() > 1 {
            (*m_set.iter().find(|&&m| m != k).unwrap(), false)
        } else {
            (m_set[0], true)
        };
        match classify_step(rs, k, &q, m, unique) {
            StepChoice::Vanish(alpha) => {
                trace.push(TraceStep {
                    tag: StepTag::VanishSgn,
                    alpha: Some(alpha),
                    before: q,
                    after: None,
                });
                return Ok((
                    ReduceOutcome::Vanishes(VanishReason::SgnInequality { alpha }),
                    trace,
                ));
            }
            StepChoice::Transfer(alpha) => {
                let next = apply_rule(rs, &q, alpha, RuleKind::R2TransferV, Direction::Lower, false)
                    .expect("transfer conditions are forced at this point");
                debug_assert!(next.lambda.is_effective());
                debug_assert_eq!(next.lambda.weight(), q.lambda.weight() - 1);
                trace.push(TraceStep {
                    tag: StepTag::R2TransferV,
                    alpha: Some(alpha),
                    before: q,
                    after: Some(next.clone()),
                });
                q = next;
            }
        }
    }
    Ok((ReduceOutcome::Reduced(q), trace))
}

/// A terminal outcome of some admissible chain of choices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Vanish,
    Terminal(Quad),
}

/// Explore every admissible m-choice (all m ∈ M \ {k} when |M| > 1) and
/// collect the distinct terminal outcomes. Used to verify that the final
/// value does not depend on the tie-break.
pub fn reduce_all_outcomes(rs: &RootSystem, k: usize, quad: &Quad) -> Result<BTreeSet<Outcome>> {
    check_reduce_preconditions(rs, k, quad)?;
    let mut out = BTreeSet::new();
    if i64::from(quad.w.length()) + rs.two_rho(&quad.lambda)
        != i64::from(quad.u.length()) + i64::from(quad.v.length())
    {
        out.insert(Outcome::Vanish);
        return Ok(out);
    }
    let mut stack = vec![quad.clone()];
    let mut visited: HashSet<Quad> = HashSet::new();
    while let Some(q) = stack.pop() {
        if !visited.insert(q.clone()) {
            continue;
        }
        if q.lambda.is_zero() {
            out.insert(Outcome::Terminal(q));
            continue;
        }
        let m_set: Vec<usize> = (1..=rs.rank())
            .filter(|&m| rs.pairing(m, &q.lambda) > 0)
            .collect();
        let choices: Vec<(usize, bool)> = if m_set.len() > 1 {
            m_set
                .iter()
                .filter(|&&m| m != k)
                .map(|&m| (m, false))
                .collect()
        } else {
            vec![(m_set[0], true)]
        };
        for (m, unique) in choices {
            match classify_step(rs, k, &q, m, unique) {
                StepChoice::Vanish(_) => {
                    out.insert(Outcome::Vanish);
                }
                StepChoice::Transfer(alpha) => {
                    let next =
                        apply_rule(rs, &q, alpha, RuleKind::R2TransferV, Direction::Lower, false)
                            .expect("transfer conditions are forced");
                    stack.push(next);
                }
            }
        }
    }
    Ok(out)
}

// ---- Verification sweeps ----

/// All effective coroot vectors with the given coordinate sum.
pub fn effective_vectors(total: i64, rank: usize) -> Vec<CorootVector> {
    fn go(total: i64, parts: usize, prefix: &mut Vec<i64>, out: &mut Vec<CorootVector>) {
        if parts == 1 {
            prefix.push(total);
            out.push(CorootVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in 0..=total {
            prefix.push(a);
            go(total - a, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if total >= 0 {
        go(total, rank, &mut Vec::new(), &mut out);
    }
    out
}

/// Theorem-level sweep: no nonzero structure constant may violate the sign
/// inequality at any simple root.
pub fn verify_theorem1(engine: &QuantumEngine) -> Result<Report> {
    let rs = engine.root_system();
    let group = engine.full_group()?;
    let pairs: Vec<(usize, usize)> = (0..group.len())
        .flat_map(|i| (i..group.len()).map(move |j| (i, j)))
        .collect();
    let reports = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (u, v) = (&group[i], &group[j]);
            let mut rep = Report::default();
            let product = engine.product(u, v)?;
            for (key, _) in product.terms() {
                for alpha in 1..=rs.rank() {
                    rep.checks += 1;
                    let lhs = key.w.sgn(alpha) + rs.pairing(alpha, &key.lambda);
                    let rhs = u.sgn(alpha) + v.sgn(alpha);
                    if lhs > rhs {
                        rep.violations.push(format!(
                            "theorem1: α={alpha} {} has nonzero coefficient but {lhs} > {rhs}",
                            Quad {
                                u: u.clone(),
                                v: v.clone(),
                                w: key.w.clone(),
                                lambda: key.lambda.clone()
                            }
                            .display(rs)
                        ));
                    }
                }
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reports
        .into_iter()
        .fold(Report::default(), Report::merge)
        .finalize())
}

/// Rewrite-identity sweep over every homogeneous quad in degree range.
///
/// With `strict_only`, checks the three equalities of the "=2" identity.
/// Otherwise additionally checks the generalized transfer (equality at any
/// common value with sgn_α(v) = 1), both v- and u-sided.
pub fn verify_transfer(engine: &QuantumEngine, strict_only: bool) -> Result<Report> {
    let rs = engine.root_system();
    let rank = rs.rank();
    let group = engine.full_group()?;
    let pairs: Vec<(usize, usize)> = (0..group.len())
        .flat_map(|i| (0..group.len()).map(move |j| (i, j)))
        .collect();
    let reports = pairs
        .par_iter()
        .map(|&(ui, vi)| {
            let (u, v) = (&group[ui], &group[vi]);
            let mut rep = Report::default();
            let total = i64::from(u.length()) + i64::from(v.length());
            for w in &group {
                let q_deg = total - i64::from(w.length());
                if q_deg < 0 || q_deg % 2 != 0 {
                    continue;
                }
                for lambda in effective_vectors(q_deg / 2, rank) {
                    let quad = Quad {
                        u: u.clone(),
                        v: v.clone(),
                        w: w.clone(),
                        lambda,
                    };
                    for alpha in 1..=rank {
                        let su = quad.u.sgn(alpha);
                        let sv = quad.v.sgn(alpha);
                        let lhs = quad.w.sgn(alpha) + rs.pairing(alpha, &quad.lambda);
                        let strict_hyp = su + sv == 2 && lhs == 2;
                        if strict_hyp {
                            rep.checks += 1;
                            let n0 = engine.coefficient(&quad.u, &quad.v, &quad.w, &quad.lambda)?;
                            let r1 = apply_rule(
                                rs,
                                &quad,
                                alpha,
                                RuleKind::R1Both,
                                Direction::Lower,
                                true,
                            )?;
                            let n1 = engine.coefficient(&r1.u, &r1.v, &r1.w, &r1.lambda)?;
                            let tv = apply_rule(
                                rs,
                                &quad,
                                alpha,
                                RuleKind::R2TransferV,
                                Direction::Lower,
                                true,
                            )?;
                            let n2 = engine.coefficient(&tv.u, &tv.v, &tv.w, &tv.lambda)?;
                            if n0 != n1 || n0 != n2 {
                                rep.violations.push(format!(
                                    "strict =2 identity fails at α={alpha} {}: N={n0}, R1→{n1}, transfer→{n2}",
                                    quad.display(rs)
                                ));
                            }
                        }
                        if !strict_only && sv == 1 && lhs == su + sv {
                            rep.checks += 1;
                            let n0 = engine.coefficient(&quad.u, &quad.v, &quad.w, &quad.lambda)?;
                            let tv = apply_rule(
                                rs,
                                &quad,
                                alpha,
                                RuleKind::R2TransferV,
                                Direction::Lower,
                                false,
                            )?;
                            let n2 = engine.coefficient(&tv.u, &tv.v, &tv.w, &tv.lambda)?;
                            if n0 != n2 {
                                rep.violations.push(format!(
                                    "generalized transfer fails at α={alpha} {} → {}: N={n0} ≠ {n2}",
                                    quad.display(rs),
                                    tv.display(rs)
                                ));
                            }
                        }
                        if !strict_only && su == 1 && lhs == su + sv {
                            rep.checks += 1;
                            let n0 = engine.coefficient(&quad.u, &quad.v, &quad.w, &quad.lambda)?;
                            let tu = apply_rule(
                                rs,
                                &quad,
                                alpha,
                                RuleKind::R2TransferU,
                                Direction::Lower,
                                false,
                            )?;
                            let n2 = engine.coefficient(&tu.u, &tu.v, &tu.w, &tu.lambda)?;
                            if n0 != n2 {
                                rep.violations.push(format!(
                                    "generalized u-transfer fails at α={alpha} {} → {}: N={n0} ≠ {n2}",
                                    quad.display(rs),
                                    tu.display(rs)
                                ));
                            }
                        }
                    }
                }
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reports
        .into_iter()
        .fold(Report::default(), Report::merge)
        .finalize())
}

/// Reduction sweep: for every Grassmannian u (every descent position),
/// every v, w and every effective λ with deg(q_λ σ^w) ≤ 2ℓ(w₀), the
/// reduction verdict must match the engine, and all admissible tie-break
/// choices must yield the same value.
pub fn verify_theorem2(engine: &QuantumEngine) -> Result<Report> {
    let rs = engine.root_system();
    let rank = rs.rank();
    let group = engine.full_group()?;
    let top = group.iter().map(|w| w.length()).max().unwrap_or(0) as i64;
    let zero = CorootVector::zero(rank);
    let mut jobs: Vec<(usize, WeylElement)> = Vec::new();
    for k in 1..=rank {
        for u in &group {
            if (1..=rank).all(|j| j == k || u.sgn(j) == 0) {
                jobs.push((k, u.clone()));
            }
        }
    }
    let reports = jobs
        .par_iter()
        .map(|(k, u)| {
            let mut rep = Report::default();
            for v in &group {
                for w in &group {
                    let budget = 2 * top - i64::from(w.length());
                    if budget < 0 {
                        continue;
                    }
                    for s in 0..=budget / 2 {
                        for lambda in effective_vectors(s, rank) {
                            let quad = Quad {
                                u: u.clone(),
                                v: v.clone(),
                                w: w.clone(),
                                lambda,
                            };
                            rep.checks += 1;
                            let oracle =
                                engine.coefficient(&quad.u, &quad.v, &quad.w, &quad.lambda)?;
                            let (outcome, _) = reduce_grassmannian(rs, *k, &quad)?;
                            let verdict_value = match &outcome {
                                ReduceOutcome::Vanishes(_) => BigInt::zero(),
                                ReduceOutcome::Reduced(t) => {
                                    engine.coefficient(&t.u, &t.v, &t.w, &zero)?
                                }
                            };
                            if verdict_value != oracle {
                                rep.violations.push(format!(
                                    "reduction verdict {} for k={k} {} but engine gives {oracle}",
                                    verdict_value,
                                    quad.display(rs)
                                ));
                            }
                            let homogeneous = i64::from(quad.w.length())
                                + rs.two_rho(&quad.lambda)
                                == i64::from(quad.u.length()) + i64::from(quad.v.length());
                            if homogeneous && !quad.lambda.is_zero() {
                                for outcome in reduce_all_outcomes(rs, *k, &quad)? {
                                    let val = match outcome {
                                        Outcome::Vanish => BigInt::zero(),
                                        Outcome::Terminal(t) => {
                                            engine.coefficient(&t.u, &t.v, &t.w, &zero)?
                                        }
                                    };
                                    if val != oracle {
                                        rep.violations.push(format!(
                                            "choice-dependent value {val} ≠ {oracle} for k={k} {}",
                                            quad.display(rs)
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reports
        .into_iter()
        .fold(Report::default(), Report::merge)
        .finalize())
}

/// Filtration and leading-term sweep.
///
/// For every simple α: (a) every product term respects
/// gr_α(term) ≤ gr_α(σ^u)+gr_α(σ^v); (b) for u ∈ W^{P_α}, σ^u ⋆ σ^{s_α}
/// has leading term σ^{u s_α} with coefficient 1 and everything else
/// strictly below; (c) σ^{s_α} ⋆ σ^{s_α} contains q_{α^∨} σ^{id} with
/// coefficient 1 and everything else below (2,0); (d) terms of products of
/// two W^{P_α} classes with vanishing first grading component lie in the
/// image of ψ_α; (e) on every term, grading additivity holds exactly when
/// the sign equality does.
pub fn verify_filtration(engine: &QuantumEngine) -> Result<Report> {
    let rs = engine.root_system();
    let rank = rs.rank();
    let group = engine.full_group()?;
    let mut report = Report::default();

    for alpha in 1..=rank {
        let s_alpha = WeylElement::identity(rs).mul_simple(rs, alpha);
        // (b) leading term of σ^u ⋆ σ^{s_α} for minimal representatives
        for u in group.iter().filter(|u| u.sgn(alpha) == 0) {
            report.checks += 1;
            let us = u.mul_simple(rs, alpha);
            let product = engine.product(u, &s_alpha)?;
            let lead = product.coefficient(&us, &CorootVector::zero(rank));
            if lead != BigInt::from(1) {
                report.violations.push(format!(
                    "filtration(b): α={alpha} u={} leading coefficient {lead} ≠ 1",
                    weyl::format_word(rs, u)
                ));
            }
            let bound = gr(rs, alpha, &CorootVector::zero(rank), &us);
            for (key, _) in product.terms() {
                if key.w == us && key.lambda.is_zero() {
                    continue;
                }
                if gr(rs, alpha, &key.lambda, &key.w) >= bound {
                    report.violations.push(format!(
                        "filtration(b): α={alpha} u={} term q_{}σ^{} not strictly below",
                        weyl::format_word(rs, u),
                        key.lambda,
                        weyl::format_word(rs, &key.w)
                    ));
                }
            }
        }
        // (c) σ^{s_α} ⋆ σ^{s_α}
        report.checks += 1;
        let square = engine.product(&s_alpha, &s_alpha)?;
        let alpha_coroot = CorootVector(rs.simple_root(alpha).coroot_coords.clone());
        if square.coefficient(&WeylElement::identity(rs), &alpha_coroot) != BigInt::from(1) {
            report.violations.push(format!(
                "filtration(c): α={alpha} q_{{α^∨}}σ^id coefficient ≠ 1"
            ));
        }
        for (key, _) in square.terms() {
            if key.w.is_identity() && key.lambda == alpha_coroot {
                continue;
            }
            if gr(rs, alpha, &key.lambda, &key.w) >= Grading(2, 0) {
                report.violations.push(format!(
                    "filtration(c): α={alpha} term q_{}σ^{} not below (2,0)",
                    key.lambda,
                    weyl::format_word(rs, &key.w)
                ));
            }
        }
    }

    for (i, u) in group.iter().enumerate() {
        for v in &group[i..] {
            let product = engine.product(u, v)?;
            for alpha in 1..=rank {
                let su = u.sgn(alpha);
                let sv = v.sgn(alpha);
                let bound = Grading(
                    su + sv,
                    i64::from(u.length()) + i64::from(v.length()) - su - sv,
                );
                let both_minimal = su == 0 && sv == 0;
                for (key, _) in product.terms() {
                    report.checks += 1;
                    let g = gr(rs, alpha, &key.lambda, &key.w);
                    if g > bound {
                        report.violations.push(format!(
                            "filtration(a): α={alpha} u={} v={} term q_{}σ^{} exceeds the bound",
                            weyl::format_word(rs, u),
                            weyl::format_word(rs, v),
                            key.lambda,
                            weyl::format_word(rs, &key.w)
                        ));
                    }
                    // (e) grading additivity ⟺ sign equality, term by term
                    let sgn_eq = key.w.sgn(alpha) + rs.pairing(alpha, &key.lambda) == su + sv;
                    if (g == bound) != sgn_eq {
                        report.violations.push(format!(
                            "filtration(e): α={alpha} u={} v={} term q_{}σ^{} biconditional fails",
                            weyl::format_word(rs, u),
                            weyl::format_word(rs, v),
                            key.lambda,
                            weyl::format_word(rs, &key.w)
                        ));
                    }
                    if both_minimal && g.0 == 0 {
                        // (d) vertical-degree-0 terms lie in the image of ψ_α
                        let pairing = rs.pairing(alpha, &key.lambda);
                        let ok = (pairing == 0 || pairing == -1)
                            && key.w.sgn(alpha) == -pairing;
                        if !ok {
                            report.violations.push(format!(
                                "filtration(d): α={alpha} u={} v={} term q_{}σ^{} outside im ψ_α",
                                weyl::format_word(rs, u),
                                weyl::format_word(rs, v),
                                key.lambda,
                                weyl::format_word(rs, &key.w)
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(report.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::build_cartan;
    use crate::qhring::QuantumEngine;
    use crate::weyl::from_word;
    use num::One;
    use std::sync::Arc;

    fn a(n: usize) -> RootSystem {
        build_cartan(LieType::A, n).unwrap()
    }

    fn quad(rs: &RootSystem, u: &[usize], v: &[usize], w: &[usize], lambda: &[i64]) -> Quad {
        Quad {
            u: from_word(rs, u).unwrap(),
            v: from_word(rs, v).unwrap(),
            w: from_word(rs, w).unwrap(),
            lambda: CorootVector(lambda.to_vec()),
        }
    }

    #[test]
    fn gr_examples() {
        let rs = a(2);
        let id = WeylElement::identity(&rs);
        assert_eq!(gr(&rs, 1, &CorootVector::zero(2), &id), Grading(0, 0));
        let s2 = from_word(&rs, &[2]).unwrap();
        assert_eq!(gr(&rs, 1, &CorootVector(vec![1, 0]), &s2), Grading(2, 1));
        let s1 = from_word(&rs, &[1]).unwrap();
        assert_eq!(gr(&rs, 1, &CorootVector::zero(2), &s1), Grading(1, 0));
        // total degree invariant
        let g = gr(&rs, 1, &CorootVector(vec![1, 1]), &s2);
        assert_eq!(g.0 + g.1, 1 + 4);
    }

    #[test]
    fn grading_lex_order() {
        assert!(Grading(0, 5) < Grading(1, 0));
        assert!(Grading(1, 0) < Grading(1, 1));
        assert!(Grading(2, -1) > Grading(1, 99));
    }

    #[test]
    fn vanishing_check_examples() {
        let rs = a(2);
        // (s1, s1, s1, α1^∨) vanishes; the sign criterion is violated at α1
        // (1+2 > 1+1) and the degree criterion fires first (3 ≠ 2).
        let q1 = quad(&rs, &[1], &[1], &[1], &[1, 0]);
        assert!(matches!(vanishing_check(&rs, &q1), Verdict::Vanishes(_)));
        assert!(q1.w.sgn(1) + rs.pairing(1, &q1.lambda) > q1.u.sgn(1) + q1.v.sgn(1));
        // homogeneous quad where only the sign criterion can fire
        let q2 = quad(&rs, &[1], &[2], &[], &[1, 0]);
        assert_eq!(
            vanishing_check(&rs, &q2),
            Verdict::Vanishes(VanishReason::SgnInequality { alpha: 1 })
        );
        let rs3 = a(3);
        let paper = quad(&rs3, &[2, 1, 2], &[2, 1, 2], &[2, 3], &[1, 1, 0]);
        assert_eq!(vanishing_check(&rs3, &paper), Verdict::NonzeroPossible);
        let q3 = quad(&rs, &[], &[], &[], &[1, 0]);
        assert_eq!(
            vanishing_check(&rs, &q3),
            Verdict::Vanishes(VanishReason::DegreeMismatch)
        );
        let q4 = quad(&rs, &[], &[], &[], &[-1, 0]);
        assert_eq!(
            vanishing_check(&rs, &q4),
            Verdict::Vanishes(VanishReason::NonEffective)
        );
    }

    #[test]
    fn apply_rule_paper_chain_steps() {
        let rs = a(3);
        // raise at α3 from the worked quad
        let q0 = quad(&rs, &[2, 1, 2], &[2, 1, 2], &[2, 3], &[1, 1, 0]);
        let raised = apply_rule(&rs, &q0, 3, RuleKind::R2TransferV, Direction::Raise, false)
            .unwrap();
        assert_eq!(
            raised,
            quad(&rs, &[2, 1, 2], &[2, 1, 2, 3], &[2], &[1, 1, 1])
        );
        // the raise undoes the lower
        assert_eq!(
            apply_rule(&rs, &raised, 3, RuleKind::R2TransferV, Direction::Lower, false).unwrap(),
            q0
        );
        // u-transfer at α2
        let lowered = apply_rule(&rs, &raised, 2, RuleKind::R2TransferU, Direction::Lower, false)
            .unwrap();
        assert_eq!(
            lowered,
            quad(&rs, &[2, 1], &[2, 1, 2, 3], &[], &[1, 1, 1])
        );
    }

    #[test]
    fn apply_rule_r1_example() {
        let rs = a(2);
        let q0 = quad(&rs, &[1], &[2, 1], &[2], &[1, 0]);
        let r = apply_rule(&rs, &q0, 1, RuleKind::R1Both, Direction::Lower, false).unwrap();
        assert_eq!(r, quad(&rs, &[], &[2], &[2], &[0, 0]));
        // raise goes back
        assert_eq!(
            apply_rule(&rs, &r, 1, RuleKind::R1Both, Direction::Raise, false).unwrap(),
            q0
        );
    }

    #[test]
    fn apply_rule_errors_name_the_condition() {
        let rs = a(3);
        let q0 = quad(&rs, &[2, 1, 2], &[2, 1, 2], &[2, 3], &[1, 1, 0]);
        // sgn_3(v) = 0 here, so lowering the v-transfer at α3 must fail
        let err = apply_rule(&rs, &q0, 3, RuleKind::R2TransferV, Direction::Lower, false)
            .unwrap_err();
        assert!(err.to_string().contains("sgn_3(v)"));
        // strict mode rejects the worked example's common-value-1 raise
        let err = apply_rule(&rs, &q0, 3, RuleKind::R2TransferV, Direction::Raise, true)
            .unwrap_err();
        assert!(err.to_string().contains("common value 2"), "{err}");
    }

    #[test]
    fn reduce_grassmannian_a2_chain() {
        let rs = a(2);
        let q0 = quad(&rs, &[1], &[2, 1, 2], &[], &[1, 1]);
        let (outcome, trace) = reduce_grassmannian(&rs, 1, &q0).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(
            trace[0].after.as_ref().unwrap(),
            &quad(&rs, &[1], &[2, 1], &[2], &[1, 0])
        );
        let terminal = quad(&rs, &[1], &[2], &[2, 1], &[0, 0]);
        assert_eq!(trace[1].after.as_ref().unwrap(), &terminal);
        assert_eq!(outcome, ReduceOutcome::Reduced(terminal.clone()));
        // the terminal classical constant equals the quantum one (both 1)
        let eng = QuantumEngine::new(Arc::new(a(2)));
        assert!(eng
            .coefficient(&terminal.u, &terminal.v, &terminal.w, &CorootVector::zero(2))
            .unwrap()
            .is_one());
        assert!(eng
            .coefficient(&q0.u, &q0.v, &q0.w, &q0.lambda)
            .unwrap()
            .is_one());
    }

    #[test]
    fn reduce_grassmannian_trivial_and_vanishing() {
        let rs = a(2);
        let q0 = quad(&rs, &[1], &[2], &[2, 1], &[0, 0]);
        let (outcome, trace) = reduce_grassmannian(&rs, 1, &q0).unwrap();
        assert!(trace.is_empty());
        assert_eq!(outcome, ReduceOutcome::Reduced(q0));

        let qv = quad(&rs, &[1], &[1], &[1], &[1, 0]);
        let (outcome, trace) = reduce_grassmannian(&rs, 1, &qv).unwrap();
        assert!(matches!(outcome, ReduceOutcome::Vanishes(_)));
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].after, None);
    }

    #[test]
    fn reduce_grassmannian_preconditions() {
        let rs = a(3);
        // u = s1 s3 has two descents
        let bad_u = quad(&rs, &[1, 3], &[2], &[2], &[1, 0, 0]);
        assert!(reduce_grassmannian(&rs, 1, &bad_u).is_err());
        let bad_lambda = quad(&rs, &[1], &[2], &[2], &[-1, 0, 0]);
        assert!(reduce_grassmannian(&rs, 1, &bad_lambda).is_err());
        let b2 = build_cartan(LieType::B, 2).unwrap();
        let qb = Quad {
            u: WeylElement::identity(&b2),
            v: WeylElement::identity(&b2),
            w: WeylElement::identity(&b2),
            lambda: CorootVector::zero(2),
        };
        assert!(reduce_grassmannian(&b2, 1, &qb).is_err());
    }

    #[test]
    fn trace_json_round_trip() {
        let rs = a(2);
        let q0 = quad(&rs, &[1], &[2, 1, 2], &[], &[1, 1]);
        let (_, trace) = reduce_grassmannian(&rs, 1, &q0).unwrap();
        let json = trace_to_json(&rs, &trace);
        let back = trace_from_json(&rs, &json).unwrap();
        assert_eq!(back, trace);
    }

    #[test]
    fn grading_biconditional_arithmetic_sweep_a2() {
        // gr_α(σ^u)+gr_α(σ^v) = gr_α(q_λσ^w) iff degree and sign equalities
        // both hold, over arbitrary (not just product-supported) quads.
        let rs = a(2);
        let eng = QuantumEngine::new(Arc::new(a(2)));
        let group = eng.full_group().unwrap();
        let zero = CorootVector::zero(2);
        for u in &group {
            for v in &group {
                for w in &group {
                    for s in 0..=4 {
                        for lambda in effective_vectors(s, 2) {
                            for alpha in 1..=2 {
                                let sum = {
                                    let gu = gr(&rs, alpha, &zero, u);
                                    let gv = gr(&rs, alpha, &zero, v);
                                    Grading(gu.0 + gv.0, gu.1 + gv.1)
                                };
                                let gt = gr(&rs, alpha, &lambda, w);
                                let deg_eq = i64::from(w.length()) + rs.two_rho(&lambda)
                                    == i64::from(u.length()) + i64::from(v.length());
                                let sgn_eq = w.sgn(alpha) + rs.pairing(alpha, &lambda)
                                    == u.sgn(alpha) + v.sgn(alpha);
                                assert_eq!(sum == gt, deg_eq && sgn_eq);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn verify_sweeps_clean_on_fl3() {
        let eng = QuantumEngine::new(Arc::new(a(2)));
        let t1 = verify_theorem1(&eng).unwrap();
        assert!(t1.ok(), "{:?}", t1.violations);
        let tr = verify_transfer(&eng, false).unwrap();
        assert!(tr.ok(), "{:?}", tr.violations);
        assert!(tr.checks > 0);
        let t2 = verify_theorem2(&eng).unwrap();
        assert!(t2.ok(), "{:?}", t2.violations);
        let f = verify_filtration(&eng).unwrap();
        assert!(f.ok(), "{:?}", f.violations);
    }

    #[test]
    fn verify_filtration_clean_on_a1() {
        let eng = QuantumEngine::new(Arc::new(a(1)));
        let f = verify_filtration(&eng).unwrap();
        assert!(f.ok(), "{:?}", f.violations);
    }
}
