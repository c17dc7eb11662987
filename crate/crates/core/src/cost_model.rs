//! Closed-form time and cost model for the two interaction paradigms.
//!
//! Remoting (`DNR`): the client runs one request/response round trip per
//! server and downloads a proxy once. Mobile agent (`MA`): one agent carries
//! its code and every request, migrates through the nodes, invokes locally
//! and brings the results home.
//!
//! All metrics are linear in the node count `n`, so crossovers are solved
//! exactly. The simulator in [`crate::remoting`] and [`crate::agent`] is
//! validated against these functions.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest node/request count the model accepts.
pub const MAX_N: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("node count must be at least 1")]
    ZeroNodes,
    #[error("node count {0} exceeds the supported maximum of 2^32")]
    TooManyNodes(u64),
    #[error("parameter `{field}` must be finite and non-negative (got {value})")]
    InvalidParam { field: &'static str, value: f64 },
    #[error("result of `{0}` overflowed to a non-finite value")]
    Overflow(&'static str),
}

/// Every symbol of the analytical model in one place.
///
/// `alpha` and `beta` serve both paradigms: the primed MA sizes are taken
/// equal to the remoting ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// One-way transit time of a request or a response.
    pub tr: f64,
    /// Time to move the agent code across one link.
    pub ty: f64,
    /// Time to search the distributed object in an address space.
    pub t_obj: f64,
    /// One-time proxy download cost.
    pub t_proxy: f64,
    /// Request size (also the response size in the unified forms).
    pub alpha: f64,
    /// Response size, used only by the split forms.
    pub beta: f64,
    /// Cost of one network invocation.
    pub psi: f64,
    /// Cost of one local invocation.
    pub sigma: f64,
    /// Agent code size.
    pub code_size: f64,
}

impl Default for CostParams {
    /// The calibrated set documented in `docs/calibration.md`.
    fn default() -> Self {
        Self {
            tr: 1.0,
            ty: 1.0,
            t_obj: 0.0,
            t_proxy: 50.0,
            alpha: 100.0,
            beta: 100.0,
            psi: 10.0,
            sigma: 1.0,
            code_size: 500.0,
        }
    }
}

impl CostParams {
    pub fn zero() -> Self {
        Self {
            tr: 0.0,
            ty: 0.0,
            t_obj: 0.0,
            t_proxy: 0.0,
            alpha: 0.0,
            beta: 0.0,
            psi: 0.0,
            sigma: 0.0,
            code_size: 0.0,
        }
    }

    pub fn fields(&self) -> [(&'static str, f64); 9] {
        [
            ("tr", self.tr),
            ("ty", self.ty),
            ("t_obj", self.t_obj),
            ("t_proxy", self.t_proxy),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("psi", self.psi),
            ("sigma", self.sigma),
            ("code_size", self.code_size),
        ]
    }

    /// Mutable access by field name, used by config parsing and sweeps.
    pub fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "tr" => &mut self.tr,
            "ty" => &mut self.ty,
            "t_obj" => &mut self.t_obj,
            "t_proxy" => &mut self.t_proxy,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "psi" => &mut self.psi,
            "sigma" => &mut self.sigma,
            "code_size" => &mut self.code_size,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, value) in self.fields() {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::InvalidParam { field, value });
            }
        }
        Ok(())
    }

    /// Remote invocations cost more than local ones, the regime the model
    /// is built around.
    pub fn remote_dearer_than_local(&self) -> bool {
        self.psi > self.sigma
    }
}

/// How the object-search time enters the remoting round trips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ObjSearch {
    /// A single search over the whole run.
    Once,
    /// One search per visited node.
    PerNode,
    /// Search time dropped (local registry lookups).
    #[default]
    Negligible,
}

impl ObjSearch {
    /// Total search time contributed over `n` nodes.
    pub fn total(self, t_obj: f64, n: u64) -> f64 {
        match self {
            ObjSearch::Once => t_obj,
            ObjSearch::PerNode => n as f64 * t_obj,
            ObjSearch::Negligible => 0.0,
        }
    }
}

fn check_n(n: u64) -> Result<f64, ModelError> {
    match n {
        0 => Err(ModelError::ZeroNodes),
        n if n > MAX_N => Err(ModelError::TooManyNodes(n)),
        n => Ok(n as f64),
    }
}

fn finite(value: f64, what: &'static str) -> Result<f64, ModelError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::Overflow(what))
    }
}

/// Remoting communication time over `n` nodes: `2·n·tr` plus search time.
pub fn dnr_comm_time(p: &CostParams, n: u64, obj_search: ObjSearch) -> Result<f64, ModelError> {
    let nf = check_n(n)?;
    finite(2.0 * nf * p.tr + obj_search.total(p.t_obj, n), "dnr_comm_time")
}

/// Agent communication time: `(n-1)·(tr+ty)` to reach node `n`, plus one
/// more `(tr+ty)` when the return to the origin is included.
pub fn ma_comm_time(p: &CostParams, n: u64, include_return: bool) -> Result<f64, ModelError> {
    let nf = check_n(n)?;
    let legs = if include_return { nf } else { nf - 1.0 };
    finite(legs * (p.tr + p.ty), "ma_comm_time")
}

/// Remoting invocation cost `2·n·alpha + n·psi`, plus `t_proxy` when the
/// proxy download is charged.
pub fn dnr_invocation_cost(p: &CostParams, n: u64, with_proxy: bool) -> Result<f64, ModelError> {
    let nf = check_n(n)?;
    let proxy = if with_proxy { p.t_proxy } else { 0.0 };
    finite(2.0 * nf * p.alpha + proxy + nf * p.psi, "dnr_invocation_cost")
}

/// Remoting cost with distinct request and response sizes:
/// `n·alpha + n·beta + n·psi` (+ `t_proxy`).
pub fn dnr_invocation_cost_split(p: &CostParams, n: u64, with_proxy: bool) -> Result<f64, ModelError> {
    let nf = check_n(n)?;
    let proxy = if with_proxy { p.t_proxy } else { 0.0 };
    finite(
        nf * p.alpha + nf * p.beta + nf * p.psi + proxy,
        "dnr_invocation_cost_split",
    )
}

/// Agent invocation cost `(n+1)·alpha + code_size + n·sigma`.
pub fn ma_invocation_cost(p: &CostParams, n: u64) -> Result<f64, ModelError> {
    let nf = check_n(n)?;
    finite((nf + 1.0) * p.alpha + p.code_size + nf * p.sigma, "ma_invocation_cost")
}

/// Agent cost with a distinct response size: `n·alpha + n·sigma + code_size + beta`.
pub fn ma_invocation_cost_split(p: &CostParams, n: u64) -> Result<f64, ModelError> {
    let nf = check_n(n)?;
    finite(
        nf * p.alpha + nf * p.sigma + p.code_size + p.beta,
        "ma_invocation_cost_split",
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossoverKind {
    AlwaysMA,
    AlwaysDNR,
    Tie,
    /// Smallest `n` at which MA is no worse than DNR; always >= 2.
    ThresholdAt(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverResult {
    pub kind: CrossoverKind,
    /// DNR metric minus MA metric, at the threshold (or at `n = 1` when
    /// there is none).
    pub margin_at_threshold: f64,
    /// True when dominance does not depend on `n` at all.
    pub n_independent: bool,
    /// When MA wins at small `n` but loses for large `n` (local invocations
    /// dearer than remote ones), the first `n` at which DNR is strictly
    /// cheaper again.
    pub reverts_at: Option<u64>,
}

impl fmt::Display for CrossoverResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CrossoverKind::AlwaysMA => write!(f, "MA no worse for every n")?,
            CrossoverKind::AlwaysDNR => write!(f, "DNR strictly better for every n")?,
            CrossoverKind::Tie => write!(f, "tie for every n")?,
            CrossoverKind::ThresholdAt(n) => write!(f, "MA no worse from n = {n}")?,
        }
        write!(f, " (margin {})", self.margin_at_threshold)?;
        if self.n_independent {
            write!(f, "; dominance is independent of n")?;
        }
        if let Some(n) = self.reverts_at {
            write!(f, "; DNR cheaper again from n = {n}")?;
        }
        Ok(())
    }
}

/// Communication-time crossover. Both time metrics are homogeneous linear
/// in `n` (`2n·tr` against `n(tr+ty)`), so the winner is fixed by the sign
/// of `tr - ty`.
pub fn comm_crossover(p: &CostParams) -> CrossoverResult {
    let margin = p.tr - p.ty;
    let kind = if p.ty < p.tr {
        CrossoverKind::AlwaysMA
    } else if p.ty > p.tr {
        CrossoverKind::AlwaysDNR
    } else {
        CrossoverKind::Tie
    };
    CrossoverResult {
        kind,
        margin_at_threshold: margin,
        n_independent: true,
        reverts_at: None,
    }
}

fn cost_gap(p: &CostParams, n: u64) -> Result<f64, ModelError> {
    Ok(dnr_invocation_cost(p, n, true)? - ma_invocation_cost(p, n)?)
}

fn ma_no_worse(p: &CostParams, n: u64) -> Result<bool, ModelError> {
    Ok(ma_invocation_cost(p, n)? <= dnr_invocation_cost(p, n, true)?)
}

/// Invocation-cost crossover between the proxied remoting cost and the
/// agent cost.
///
/// The gap `DNR - MA` equals `n·d - k` with `d = alpha + psi - sigma` and
/// `k = code_size + alpha - t_proxy`; the threshold is `ceil(k / d)`,
/// nudged onto the exact integer satisfying the defining inequality.
pub fn cost_crossover(p: &CostParams) -> Result<CrossoverResult, ModelError> {
    p.validate()?;
    let slope = p.alpha + p.psi - p.sigma;
    let offset = p.code_size + p.alpha - p.t_proxy;
    let gap_at_one = cost_gap(p, 1)?;

    if slope > 0.0 {
        let bound = (offset / slope).ceil();
        if bound > MAX_N as f64 {
            return Ok(CrossoverResult {
                kind: CrossoverKind::AlwaysDNR,
                margin_at_threshold: gap_at_one,
                n_independent: false,
                reverts_at: None,
            });
        }
        let mut n = bound.max(1.0) as u64;
        // Rounding in the division can land one step off either way.
        while n < MAX_N && !ma_no_worse(p, n)? {
            n += 1;
        }
        while n > 1 && ma_no_worse(p, n - 1)? {
            n -= 1;
        }
        let kind = if n == 1 {
            CrossoverKind::AlwaysMA
        } else {
            CrossoverKind::ThresholdAt(n)
        };
        return Ok(CrossoverResult {
            kind,
            margin_at_threshold: cost_gap(p, n)?,
            n_independent: false,
            reverts_at: None,
        });
    }

    if slope == 0.0 {
        let kind = if gap_at_one > 0.0 {
            CrossoverKind::AlwaysMA
        } else if gap_at_one == 0.0 {
            CrossoverKind::Tie
        } else {
            CrossoverKind::AlwaysDNR
        };
        return Ok(CrossoverResult {
            kind,
            margin_at_threshold: gap_at_one,
            n_independent: true,
            reverts_at: None,
        });
    }

    // slope < 0: the gap shrinks with n.
    if gap_at_one < 0.0 {
        return Ok(CrossoverResult {
            kind: CrossoverKind::AlwaysDNR,
            margin_at_threshold: gap_at_one,
            n_independent: false,
            reverts_at: None,
        });
    }
    // Last n with gap >= 0 is floor(k / d) (both negative here); DNR wins after.
    let last = (offset / slope).floor().clamp(1.0, MAX_N as f64) as u64;
    let mut revert = last + 1;
    while revert > 2 && cost_gap(p, revert - 1)? < 0.0 {
        revert -= 1;
    }
    while revert <= MAX_N && cost_gap(p, revert)? >= 0.0 {
        revert += 1;
    }
    Ok(CrossoverResult {
        kind: CrossoverKind::AlwaysMA,
        margin_at_threshold: gap_at_one,
        n_independent: false,
        reverts_at: (revert <= MAX_N).then_some(revert),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    MA,
    DNR,
    Tie,
}

impl Winner {
    /// Lower value wins.
    fn of(dnr: f64, ma: f64) -> Self {
        if ma < dnr {
            Winner::MA
        } else if dnr < ma {
            Winner::DNR
        } else {
            Winner::Tie
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Overall {
    MaBest,
    DnrBest,
    Mixed,
    Tie,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::MA => "MA",
            Winner::DNR => "DNR",
            Winner::Tie => "Tie",
        })
    }
}

impl fmt::Display for Overall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Overall::MaBest => "MA_Best",
            Overall::DnrBest => "DNR_Best",
            Overall::Mixed => "Mixed",
            Overall::Tie => "Tie",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regime {
    pub time_winner: Winner,
    pub cost_winner: Winner,
    pub overall: Overall,
}

/// Compares both metrics at `n` (time without search term, return
/// included; cost with proxy).
pub fn classify_regime(p: &CostParams, n: u64) -> Result<Regime, ModelError> {
    let time_winner = Winner::of(dnr_comm_time(p, n, ObjSearch::Negligible)?, ma_comm_time(p, n, true)?);
    let cost_winner = Winner::of(dnr_invocation_cost(p, n, true)?, ma_invocation_cost(p, n)?);
    let overall = match (time_winner, cost_winner) {
        (Winner::Tie, Winner::Tie) => Overall::Tie,
        (Winner::MA, Winner::MA | Winner::Tie) | (Winner::Tie, Winner::MA) => Overall::MaBest,
        (Winner::DNR, Winner::DNR | Winner::Tie) | (Winner::Tie, Winner::DNR) => Overall::DnrBest,
        _ => Overall::Mixed,
    };
    Ok(Regime {
        time_winner,
        cost_winner,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn with(f: impl FnOnce(&mut CostParams)) -> CostParams {
        let mut p = CostParams::zero();
        f(&mut p);
        p
    }

    fn worked() -> CostParams {
        with(|p| {
            p.alpha = 100.0;
            p.psi = 10.0;
            p.sigma = 1.0;
            p.code_size = 500.0;
            p.t_proxy = 50.0;
        })
    }

    /// Independent scan: first n with the agent no dearer than remoting.
    fn scan_threshold(p: &CostParams, limit: u64) -> Option<u64> {
        (1..=limit).find(|&n| {
            let n = n as f64;
            let dnr = 2.0 * n * p.alpha + p.t_proxy + n * p.psi;
            let ma = (n + 1.0) * p.alpha + p.code_size + n * p.sigma;
            ma <= dnr
        })
    }

    #[test]
    fn dnr_time_examples() {
        let p = with(|p| p.tr = 1.0);
        assert_eq!(dnr_comm_time(&p, 5, ObjSearch::Negligible).unwrap(), 10.0);
        let p = with(|p| {
            p.tr = 1.0;
            p.t_obj = 3.0
        });
        assert_eq!(dnr_comm_time(&p, 1, ObjSearch::Once).unwrap(), 5.0);
        assert_eq!(dnr_comm_time(&p, 4, ObjSearch::PerNode).unwrap(), 8.0 + 12.0);
        let z = CostParams::zero();
        for mode in [ObjSearch::Once, ObjSearch::PerNode, ObjSearch::Negligible] {
            assert_eq!(dnr_comm_time(&z, 7, mode).unwrap(), 0.0);
        }
    }

    #[test]
    fn ma_time_examples() {
        let p = with(|p| {
            p.tr = 1.0;
            p.ty = 2.0
        });
        assert_eq!(ma_comm_time(&p, 5, true).unwrap(), 15.0);
        assert_eq!(ma_comm_time(&p, 1, false).unwrap(), 0.0);
        assert_eq!(ma_comm_time(&p, 5, false).unwrap(), 12.0);
        let p = with(|p| p.tr = 4.0);
        assert_eq!(ma_comm_time(&p, 3, true).unwrap(), 12.0);
    }

    #[test]
    fn cost_examples() {
        let p = worked();
        assert_eq!(dnr_invocation_cost(&p, 4, true).unwrap(), 890.0);
        assert_eq!(dnr_invocation_cost(&p, 1, false).unwrap(), 210.0);
        assert_eq!(dnr_invocation_cost(&CostParams::zero(), 9, true).unwrap(), 0.0);
        assert_eq!(ma_invocation_cost(&p, 4).unwrap(), 1004.0);
        assert_eq!(ma_invocation_cost(&p, 1).unwrap(), 701.0);
        assert_eq!(ma_invocation_cost(&CostParams::zero(), 3).unwrap(), 0.0);
    }

    #[test]
    fn split_forms_reduce_to_unified_when_sizes_match() {
        let mut p = worked();
        p.beta = p.alpha;
        for n in 1..20 {
            assert_eq!(
                dnr_invocation_cost_split(&p, n, true).unwrap(),
                dnr_invocation_cost(&p, n, true).unwrap()
            );
            assert_eq!(
                ma_invocation_cost_split(&p, n).unwrap(),
                ma_invocation_cost(&p, n).unwrap()
            );
        }
        p.beta = 7.0;
        assert_eq!(dnr_invocation_cost_split(&p, 2, false).unwrap(), 200.0 + 14.0 + 20.0);
        assert_eq!(ma_invocation_cost_split(&p, 2).unwrap(), 200.0 + 2.0 + 500.0 + 7.0);
    }

    #[test]
    fn zero_and_huge_n_rejected() {
        let p = worked();
        assert_eq!(dnr_comm_time(&p, 0, ObjSearch::Once), Err(ModelError::ZeroNodes));
        assert_eq!(ma_comm_time(&p, 0, true), Err(ModelError::ZeroNodes));
        assert_eq!(dnr_invocation_cost(&p, 0, true), Err(ModelError::ZeroNodes));
        assert_eq!(ma_invocation_cost(&p, 0), Err(ModelError::ZeroNodes));
        assert_eq!(
            ma_invocation_cost(&p, MAX_N + 1),
            Err(ModelError::TooManyNodes(MAX_N + 1))
        );
        assert!(ma_invocation_cost(&p, MAX_N).is_ok());
        let big = with(|p| p.alpha = f64::MAX);
        assert_eq!(
            ma_invocation_cost(&big, 10),
            Err(ModelError::Overflow("ma_invocation_cost"))
        );
    }

    #[test]
    fn validate_rejects_negative_and_nan() {
        assert!(worked().validate().is_ok());
        let p = with(|p| p.psi = -1.0);
        assert!(matches!(
            p.validate(),
            Err(ModelError::InvalidParam { field: "psi", .. })
        ));
        let p = with(|p| p.tr = f64::NAN);
        assert!(p.validate().is_err());
    }

    #[test]
    fn comm_crossover_cases() {
        let p = with(|p| {
            p.tr = 5.0;
            p.ty = 1.0
        });
        assert_eq!(comm_crossover(&p).kind, CrossoverKind::AlwaysMA);
        let p = with(|p| {
            p.tr = 1.0;
            p.ty = 1.0
        });
        assert_eq!(comm_crossover(&p).kind, CrossoverKind::Tie);
        let p = with(|p| {
            p.tr = 1.0;
            p.ty = 5.0
        });
        let r = comm_crossover(&p);
        assert_eq!(r.kind, CrossoverKind::AlwaysDNR);
        assert!(r.n_independent);
    }

    #[test]
    fn comm_crossover_matches_scan() {
        for (tr, ty) in [(5.0, 1.0), (1.0, 5.0), (2.0, 2.0), (0.3, 0.1)] {
            let p = with(|p| {
                p.tr = tr;
                p.ty = ty
            });
            let (mut ma, mut dnr, mut tie) = (0, 0, 0);
            for n in 1..=10_000u64 {
                let d = 2.0 * n as f64 * tr;
                let m = n as f64 * (tr + ty);
                if m < d {
                    ma += 1
                } else if d < m {
                    dnr += 1
                } else {
                    tie += 1
                }
            }
            let expected = match (ma, dnr, tie) {
                (10_000, 0, 0) => CrossoverKind::AlwaysMA,
                (0, 10_000, 0) => CrossoverKind::AlwaysDNR,
                (0, 0, 10_000) => CrossoverKind::Tie,
                other => panic!("time dominance changed with n: {other:?}"),
            };
            assert_eq!(comm_crossover(&p).kind, expected);
        }
    }

    #[test]
    fn cost_crossover_examples() {
        let r = cost_crossover(&worked()).unwrap();
        assert_eq!(r.kind, CrossoverKind::ThresholdAt(6));
        assert_eq!(scan_threshold(&worked(), 1_000_000), Some(6));
        assert_eq!(r.margin_at_threshold, 104.0);

        let p = with(|p| {
            p.alpha = 100.0;
            p.psi = 10.0;
            p.sigma = 1.0
        });
        assert_eq!(cost_crossover(&p).unwrap().kind, CrossoverKind::AlwaysMA);
        assert_eq!(scan_threshold(&p, 1_000_000), Some(1));

        let p = with(|p| {
            p.psi = 1.0;
            p.sigma = 1.0;
            p.code_size = 10.0
        });
        assert_eq!(cost_crossover(&p).unwrap().kind, CrossoverKind::AlwaysDNR);
        assert_eq!(scan_threshold(&p, 1_000_000), None);
    }

    #[test]
    fn cost_crossover_tie_and_reversal() {
        assert_eq!(cost_crossover(&CostParams::zero()).unwrap().kind, CrossoverKind::Tie);

        // Local invocations dearer than remote ones: MA only wins early.
        let p = with(|p| {
            p.sigma = 10.0;
            p.psi = 1.0;
            p.t_proxy = 50.0
        });
        let r = cost_crossover(&p).unwrap();
        assert_eq!(r.kind, CrossoverKind::AlwaysMA);
        // gap(n) = 50 - 9n: >= 0 up to n = 5, negative from 6.
        assert_eq!(r.reverts_at, Some(6));
    }

    #[test]
    fn regime_examples() {
        let mut p = worked();
        p.tr = 5.0;
        p.ty = 1.0;
        assert_eq!(classify_regime(&p, 8).unwrap().overall, Overall::MaBest);
        let r = classify_regime(&p, 2).unwrap();
        assert_eq!(r.time_winner, Winner::MA);
        assert_eq!(r.cost_winner, Winner::DNR);
        assert_eq!(r.overall, Overall::Mixed);
        assert_eq!(classify_regime(&CostParams::zero(), 3).unwrap().overall, Overall::Tie);
    }

    fn params() -> impl Strategy<Value = CostParams> {
        (
            (0.0..10.0f64, 0.0..10.0f64, 0.0..10.0f64, 0.0..1000.0f64),
            (
                0.0..1000.0f64,
                0.0..1000.0f64,
                0.0..100.0f64,
                0.0..100.0f64,
                0.0..5000.0f64,
            ),
        )
            .prop_map(
                |((tr, ty, t_obj, t_proxy), (alpha, beta, psi, sigma, code_size))| CostParams {
                    tr,
                    ty,
                    t_obj,
                    t_proxy,
                    alpha,
                    beta,
                    psi,
                    sigma,
                    code_size,
                },
            )
    }

    proptest! {
        #[test]
        fn metrics_nondecreasing_in_n(p in params(), n in 1u64..10_000) {
            for mode in [ObjSearch::Once, ObjSearch::PerNode, ObjSearch::Negligible] {
                prop_assert!(dnr_comm_time(&p, n + 1, mode)? >= dnr_comm_time(&p, n, mode)?);
            }
            prop_assert!(ma_comm_time(&p, n + 1, true)? >= ma_comm_time(&p, n, true)?);
            prop_assert!(dnr_invocation_cost(&p, n + 1, true)? >= dnr_invocation_cost(&p, n, true)?);
            prop_assert!(ma_invocation_cost(&p, n + 1)? >= ma_invocation_cost(&p, n)?);
        }

        #[test]
        fn metrics_nondecreasing_in_params(p in params(), n in 1u64..1000, bump in 0.0..50.0f64, which in 0usize..9) {
            let mut q = p;
            let name = p.fields()[which].0;
            *q.field_mut(name).unwrap() += bump;
            prop_assert!(dnr_comm_time(&q, n, ObjSearch::Once)? >= dnr_comm_time(&p, n, ObjSearch::Once)?);
            prop_assert!(ma_comm_time(&q, n, true)? >= ma_comm_time(&p, n, true)?);
            prop_assert!(dnr_invocation_cost(&q, n, true)? >= dnr_invocation_cost(&p, n, true)?);
            prop_assert!(ma_invocation_cost(&q, n)? >= ma_invocation_cost(&p, n)?);
        }

        #[test]
        fn threshold_persists(p in params()) {
            let r = cost_crossover(&p)?;
            if let CrossoverKind::ThresholdAt(t) = r.kind {
                prop_assert!(ma_invocation_cost(&p, t - 1)? > dnr_invocation_cost(&p, t - 1, true)?);
                for n in t..t + 200 {
                    prop_assert!(ma_invocation_cost(&p, n)? <= dnr_invocation_cost(&p, n, true)?);
                }
            }
        }

        #[test]
        fn closed_form_matches_scan(p in params()) {
            let r = cost_crossover(&p)?;
            let scanned = scan_threshold(&p, 100_000);
            match r.kind {
                CrossoverKind::ThresholdAt(t) if t <= 100_000 => prop_assert_eq!(scanned, Some(t)),
                CrossoverKind::ThresholdAt(_) | CrossoverKind::AlwaysDNR => prop_assert_eq!(scanned, None),
                CrossoverKind::AlwaysMA | CrossoverKind::Tie => prop_assert_eq!(scanned, Some(1)),
            }
        }
    }
}
