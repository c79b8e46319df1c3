//! Randomized generation-by-generation construction of the nested null sets
//! `F_n`, with exact measure acceptance and certified trapping at every
//! accepted generation.
//!
//! Each step subdivides `F_{n-1}` into closed cells of exact length `f_n`
//! (an exact divisor of `f_{n-1}`), keeps each cell independently with
//! probability `q_n`, and accepts the candidate only if the measure halves
//! and the verifier certifies the trapping property over the whole
//! parameter rectangle. Retries are explicit with a cap and full failure
//! reporting.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cantor::CantorSpec;
use crate::error::Error;
use crate::interval::IntervalSet;
use crate::rational::Rational;
use crate::rng::KeyedStream;
use crate::verifier::{self, Verdict};

/// Default per-generation retry cap.
pub const DEFAULT_RETRY_CAP: u32 = 64;
/// Default guard on the number of subdivision cells per generation.
pub const DEFAULT_CELL_CAP: u64 = 1 << 22;

/// Parameter rectangle `x in [a, b]`, `t in [t_lo, t_hi]`, canonical
/// positive-t form `0 < t_lo <= t_hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRect {
    pub a: Rational,
    pub b: Rational,
    pub t_lo: Rational,
    pub t_hi: Rational,
}

impl ParamRect {
    pub fn new(a: Rational, b: Rational, t_lo: Rational, t_hi: Rational) -> Result<Self, Error> {
        let rect = ParamRect { a, b, t_lo, t_hi };
        rect.validate()?;
        Ok(rect)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.a > self.b {
            return Err(Error::InvalidParams(format!(
                "rect needs a <= b, got [{}, {}]",
                self.a, self.b
            )));
        }
        if !self.t_lo.is_positive() || self.t_lo > self.t_hi {
            return Err(Error::InvalidParams(format!(
                "rect needs 0 < A <= B, got [{}, {}]",
                self.t_lo, self.t_hi
            )));
        }
        Ok(())
    }

    /// Canonicalize a same-sign-signed rectangle. Negative `t` reduces to
    /// positive `t` through `x + tC = (x + t) + |t|(1 - C)` and the
    /// reflection symmetry `1 - C = C`; the sheared image is covered by its
    /// bounding rectangle, so the certified region is a superset.
    pub fn from_signed(
        a: Rational,
        b: Rational,
        t0: Rational,
        t1: Rational,
    ) -> Result<Self, Error> {
        if t0 > t1 {
            return Err(Error::InvalidParams(format!(
                "rect needs A <= B, got [{t0}, {t1}]"
            )));
        }
        if t0.is_positive() {
            ParamRect::new(a, b, t0, t1)
        } else if t1.is_negative() {
            ParamRect::new(&a + &t0, &b + &t1, -t1, -t0)
        } else {
            Err(Error::InvalidParams(
                "t-range must not contain 0 (A, B nonzero and of the same sign)".into(),
            ))
        }
    }
}

/// Generation schedule `n -> phi(n)`, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields, rename_all = "snake_case")]
pub enum PhiRule {
    /// `phi(n) = floor(n^(1+eta))`, `eta > 0`, computed exactly.
    Power { eta: Rational },
    /// Small-scale override `phi(n) = n + delta`; runs with this schedule are
    /// outside the asymptotic regime of the bad-probability bound.
    Offset { delta: u64 },
    /// Explicit strictly increasing values for `n = 1, 2, ...`.
    Explicit { values: Vec<u64> },
}

impl PhiRule {
    pub fn validate(&self, depth: u32) -> Result<(), Error> {
        match self {
            PhiRule::Power { eta } => {
                if !eta.is_positive() {
                    return Err(Error::InvalidParams(format!("eta must be > 0, got {eta}")));
                }
                let denom = eta.denom().to_u32().unwrap_or(u32::MAX);
                let numer = eta.numer().to_u32().unwrap_or(u32::MAX);
                if denom > 64 || numer > 64 {
                    return Err(Error::InvalidParams(
                        "eta numerator/denominator too large for exact floor-power".into(),
                    ));
                }
                Ok(())
            }
            PhiRule::Offset { .. } => Ok(()),
            PhiRule::Explicit { values } => {
                if (values.len() as u32) < depth {
                    return Err(Error::InvalidParams(format!(
                        "explicit phi schedule has {} values, depth {depth} requested",
                        values.len()
                    )));
                }
                if values.is_empty() || values[0] == 0 {
                    return Err(Error::InvalidParams("phi(1) must be >= 1".into()));
                }
                if !values.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::InvalidParams(
                        "explicit phi schedule must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// True when the schedule is a small-scale experiment override rather
    /// than the asymptotic floor-power rule.
    pub fn is_override(&self) -> bool {
        !matches!(self, PhiRule::Power { .. })
    }

    /// `phi(n)` for `n >= 1`; `phi(0)` is 0 by convention.
    pub fn phi(&self, n: u32) -> u64 {
        if n == 0 {
            return 0;
        }
        match self {
            PhiRule::Power { eta } => floor_power(n as u64, eta),
            PhiRule::Offset { delta } => n as u64 + delta,
            PhiRule::Explicit { values } => values[n as usize - 1],
        }
    }
}

/// Exact `floor(n^(1+eta))` for rational `eta = p/q > 0`: the largest `m`
/// with `m^q <= n^(p+q)`, i.e. the floor of the q-th root of `n^(p+q)`.
pub fn floor_power(n: u64, eta: &Rational) -> u64 {
    let p = eta.numer().to_u64().expect("validated eta");
    let q = eta.denom().to_u64().expect("validated eta");
    let target = BigUint::from(n).pow((p + q) as u32);
    target
        .nth_root(q as u32)
        .to_u64()
        .expect("floor power fits u64 for sane inputs")
}

/// Retention probability schedule; values must stay below 1/4.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields, rename_all = "snake_case")]
pub enum QSchedule {
    /// `q_n = 1/(4 + isqrt(n))`: decreasing, below 1/4, slowly vanishing.
    Default,
    /// Constant `q` for every generation.
    Constant { q: Rational },
}

impl QSchedule {
    pub fn q(&self, n: u32) -> Rational {
        match self {
            QSchedule::Default => {
                Rational::one() / Rational::from(4 + (n as u64).sqrt())
            }
            QSchedule::Constant { q } => q.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self {
            QSchedule::Default => Ok(()),
            QSchedule::Constant { q } => {
                if !q.is_positive() || q >= &Rational::new(1, 4) {
                    Err(Error::InvalidParams(format!(
                        "q must satisfy 0 < q < 1/4, got {q}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Everything the construction leaves configurable on one rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionParams {
    pub rect: ParamRect,
    pub phi: PhiRule,
    #[serde(default = "default_q")]
    pub q_schedule: QSchedule,
    pub depth: u32,
    pub seed: u64,
    #[serde(default = "default_retry_cap")]
    pub retry_cap: u32,
    #[serde(default = "default_cell_cap")]
    pub cell_cap: u64,
}

fn default_q() -> QSchedule {
    QSchedule::Default
}
fn default_retry_cap() -> u32 {
    DEFAULT_RETRY_CAP
}
fn default_cell_cap() -> u64 {
    DEFAULT_CELL_CAP
}

impl ConstructionParams {
    pub fn validate(&self) -> Result<(), Error> {
        self.rect.validate()?;
        self.phi.validate(self.depth)?;
        self.q_schedule.validate()?;
        if self.retry_cap == 0 {
            return Err(Error::InvalidParams("retry cap must be >= 1".into()));
        }
        Ok(())
    }
}

/// One accepted (or candidate) generation of the construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationState {
    pub n: u32,
    pub phi_n: u64,
    pub f_n: Rational,
    /// Sorted global grid indices of the kept cells (pitch `f_n`).
    pub cells: Vec<u64>,
    /// The set `F_n`: union of the kept closed cells, normalized.
    pub kept: IntervalSet,
    pub measure: Rational,
    /// 1-based count of candidates tried before acceptance.
    pub attempts: u32,
    /// Exact check that distinct boundary-point images stay in distinct
    /// cells: `t_lo * min(ell_phi, d_phi) > f_n`. Automatic for thin specs.
    pub spacing_ok: bool,
    /// `min_p >= 2^(phi(n) - phi(n-1))` held for the accepted verdict.
    pub p_bound_ok: bool,
}

impl GenerationState {
    /// The root state `F_0 = [0, 1]`, `f_0 = 1`.
    pub fn root() -> Self {
        GenerationState {
            n: 0,
            phi_n: 0,
            f_n: Rational::one(),
            cells: vec![0],
            kept: IntervalSet::unit(),
            measure: Rational::one(),
            attempts: 0,
            spacing_ok: true,
            p_bound_ok: true,
        }
    }
}

/// The full run record: accepted states plus their certificates and the
/// per-generation bad-probability bound values.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionTrace {
    pub spec: CantorSpec,
    pub params: ConstructionParams,
    pub states: Vec<GenerationState>,
    /// One verdict per state; index 0 is the vacuous root certificate.
    pub verdicts: Vec<Verdict>,
    /// Exact bad-probability bound per constructed generation (n >= 1).
    pub bounds: Vec<Rational>,
}

/// Subdivision: smallest `k >= 1` with `f_prev/k <= (9/10) * t_lo * ell_phi`,
/// so `f_n = f_prev/k` divides `f_prev` exactly. When `k >= 2` the lower
/// bound `(9/20) * t_lo * ell_phi <= f_n` holds as well.
pub fn next_subdivision(
    f_prev: &Rational,
    t_lo: &Rational,
    ell_phi: &Rational,
) -> Result<(u64, Rational), Error> {
    assert!(f_prev.is_positive() && t_lo.is_positive() && ell_phi.is_positive());
    let bound = &(&Rational::new(9, 10) * t_lo) * ell_phi;
    let k = if f_prev <= &bound {
        1u64
    } else {
        let ratio = f_prev / &bound;
        let k = ratio.ceil_int();
        k.to_u64().ok_or(Error::CellCap {
            cells: u128::MAX,
            cap: u64::MAX,
        })?
    };
    let f_n = f_prev / &Rational::from(k);
    debug_assert!(f_n <= bound);
    debug_assert!(k == 1 || &(&bound / &Rational::from(2u32)) <= &f_n);
    Ok((k, f_n))
}

/// Exact spacing check behind the independence argument: for all
/// `t >= t_lo`, distinct points of `x + t * ∂C_phi` are at distance
/// `>= t_lo * min(ell_phi, d_phi)`, which must exceed `f_n`.
pub fn spacing_ok(spec: &CantorSpec, phi_n: u64, t_lo: &Rational, f_n: &Rational) -> bool {
    if phi_n == 0 {
        return true;
    }
    let ell = spec.ell(phi_n as u32);
    let gap = spec.gap(phi_n as u32);
    let min_dist = t_lo * &ell.min(gap);
    &min_dist > f_n
}

/// Grid cell indices (pitch `f_n`) covering `F_{n-1}`, sorted.
fn subdivision_cells(prev: &IntervalSet, f_n: &Rational, cap: u64) -> Result<Vec<u64>, Error> {
    let total = (&prev.measure() / f_n)
        .to_integer()
        .expect("f_n divides each component length");
    let total_u = total.to_u64().unwrap_or(u64::MAX);
    if total_u > cap {
        return Err(Error::CellCap {
            cells: total_u as u128,
            cap,
        });
    }
    let mut cells = Vec::with_capacity(total_u as usize);
    for comp in prev.components() {
        let start = (&comp.lo / f_n)
            .to_integer()
            .expect("components are grid aligned")
            .to_u64()
            .expect("cell index fits u64 under cell cap");
        let count = (&comp.length() / f_n)
            .to_integer()
            .expect("f_n divides component length")
            .to_u64()
            .expect("cell count fits u64 under cell cap");
        cells.extend(start..start + count);
    }
    Ok(cells)
}

/// One random candidate for `F_n` from the accepted `F_{n-1}`: subdivide
/// every maximal interval into `f_n`-cells and keep each independently with
/// probability `q_n`, using the stream keyed by `(seed, n, attempt, cell)`.
pub fn candidate_next(
    prev: &GenerationState,
    spec: &CantorSpec,
    params: &ConstructionParams,
    n: u32,
    attempt: u32,
    q_n: &Rational,
) -> Result<GenerationState, Error> {
    let phi_n = params.phi.phi(n);
    let ell_phi = spec.ell(phi_n as u32);
    let (_k, f_n) = next_subdivision(&prev.f_n, &params.rect.t_lo, &ell_phi)?;
    let candidates = subdivision_cells(&prev.kept, &f_n, params.cell_cap)?;
    let kept_cells: Vec<u64> = candidates
        .into_iter()
        .filter(|&j| {
            let mut stream = KeyedStream::new(params.seed, &[n as u64, attempt as u64, j]);
            stream.bernoulli(q_n)
        })
        .collect();
    let kept = IntervalSet::from_grid_cells(&f_n, &kept_cells);
    let measure = &f_n * &Rational::from(kept_cells.len() as u64);
    debug_assert_eq!(measure, kept.measure());
    let spacing = spacing_ok(spec, phi_n, &params.rect.t_lo, &f_n);
    Ok(GenerationState {
        n,
        phi_n,
        f_n,
        cells: kept_cells,
        kept,
        measure,
        attempts: attempt + 1,
        spacing_ok: spacing,
        p_bound_ok: false,
    })
}

/// Accepted generation plus its certificate, or a construction-failure error
/// carrying the best candidate's counterexample.
pub fn accept_or_retry(
    prev: &GenerationState,
    spec: &CantorSpec,
    params: &ConstructionParams,
    n: u32,
) -> Result<(GenerationState, Verdict), Error> {
    let q_n = params.q_schedule.q(n);
    let measure_bound = &(&Rational::from(2u32) * &q_n) * &prev.measure;
    let delta_phi = params.phi.phi(n) - prev.phi_n;
    let min_p_needed = 1u64.checked_shl(delta_phi.min(63) as u32).unwrap_or(u64::MAX);

    let mut last_failure: Option<(GenerationState, Verdict)> = None;
    for attempt in 0..params.retry_cap {
        let mut cand = candidate_next(prev, spec, params, n, attempt, &q_n)?;
        if cand.measure > measure_bound {
            continue;
        }
        let verdict = verifier::verify_all(
            &cand.kept,
            &prev.kept,
            &cand.f_n,
            spec,
            cand.phi_n as u32,
            &params.rect,
        )?;
        if verdict.holds {
            cand.p_bound_ok = verdict.faces_checked == 0 || verdict.min_p >= min_p_needed;
            return Ok((cand, verdict));
        }
        last_failure = Some((cand, verdict));
    }

    // exhausted: report the last measure-passing candidate, or the last
    // candidate outright if none passed the measure check
    let (best, verdict) = match last_failure {
        Some(pair) => pair,
        None => {
            let cand = candidate_next(prev, spec, params, n, params.retry_cap - 1, &q_n)?;
            let verdict = verifier::verify_all(
                &cand.kept,
                &prev.kept,
                &cand.f_n,
                spec,
                cand.phi_n as u32,
                &params.rect,
            )?;
            (cand, verdict)
        }
    };
    let (x, t) = verdict
        .counterexample
        .as_ref()
        .map(|c| (c.x.clone(), c.t.clone()))
        .unwrap_or((Rational::zero(), Rational::zero()));
    Err(Error::RetryCapExceeded {
        generation: n,
        cap: params.retry_cap,
        kept_cells: best.cells.len() as u64,
        x,
        t,
    })
}

/// End-to-end construction: `depth` accepted generations below the root,
/// each certified over the rectangle, with per-generation bound values.
pub fn run(spec: &CantorSpec, params: &ConstructionParams) -> Result<ConstructionTrace, Error> {
    spec.validate()?;
    params.validate()?;
    let mut states = vec![GenerationState::root()];
    let mut verdicts = vec![Verdict::vacuous()];
    let mut bounds = Vec::new();
    for n in 1..=params.depth {
        let (state, verdict) = accept_or_retry(states.last().unwrap(), spec, params, n)?;
        bounds.push(verifier::bad_probability_bound(n, params, spec)?);
        states.push(state);
        verdicts.push(verdict);
    }
    Ok(ConstructionTrace {
        spec: spec.clone(),
        params: params.clone(),
        states,
        verdicts,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn floor_power_examples() {
        assert_eq!(floor_power(4, &rat(1, 2)), 8); // 4^(3/2)
        assert_eq!(floor_power(1, &rat(7, 3)), 1);
        assert_eq!(floor_power(3, &rat(1, 2)), 5); // 27 between 25 and 36
        assert_eq!(floor_power(10, &rat(1, 2)), 31); // 10^1.5 = 31.62
        // strict monotonicity over a window, several eta values
        for eta in [rat(1, 2), rat(1, 3), rat(2, 3), rat(1, 1)] {
            let rule = PhiRule::Power { eta: eta.clone() };
            for n in 1..40u32 {
                assert!(rule.phi(n) < rule.phi(n + 1), "eta {eta} at n {n}");
            }
        }
    }

    #[test]
    fn next_subdivision_examples() {
        let (k, f) = next_subdivision(&rat(1, 1), &rat(1, 2), &rat(1, 3)).unwrap();
        assert_eq!((k, f), (7, rat(1, 7)));
        let (k, f) = next_subdivision(&rat(1, 1), &rat(1, 1), &rat(1, 3)).unwrap();
        assert_eq!((k, f), (4, rat(1, 4)));
        let (k, f) = next_subdivision(&rat(1, 7), &rat(1, 2), &rat(1, 100)).unwrap();
        assert_eq!((k, f), (32, rat(1, 224)));
        // k = 1 when already fine enough
        let (k, f) = next_subdivision(&rat(1, 100), &rat(1, 1), &rat(1, 2)).unwrap();
        assert_eq!((k, f), (1, rat(1, 100)));
    }

    #[test]
    fn q_schedule_examples() {
        let q = QSchedule::Default;
        assert_eq!(q.q(1), rat(1, 5));
        assert_eq!(q.q(9), rat(1, 7));
        for n in 1..200 {
            assert!(q.q(n) < rat(1, 4));
        }
        assert!(QSchedule::Constant { q: rat(1, 4) }.validate().is_err());
        assert!(QSchedule::Constant { q: rat(6, 25) }.validate().is_ok());
    }

    #[test]
    fn rect_validation_and_sign_mapping() {
        assert!(ParamRect::new(rat(0, 1), rat(1, 1), rat(1, 2), rat(1, 1)).is_ok());
        assert!(ParamRect::new(rat(0, 1), rat(1, 1), rat(0, 1), rat(1, 1)).is_err());
        assert!(ParamRect::new(rat(1, 1), rat(0, 1), rat(1, 2), rat(1, 1)).is_err());
        // negative same-sign range maps to the positive bounding rect
        let r = ParamRect::from_signed(rat(0, 1), rat(1, 1), rat(-1, 1), rat(-1, 2)).unwrap();
        assert_eq!(r, ParamRect::new(rat(-1, 1), rat(1, 2), rat(1, 2), rat(1, 1)).unwrap());
        assert!(ParamRect::from_signed(rat(0, 1), rat(1, 1), rat(-1, 2), rat(1, 2)).is_err());
    }

    fn toy_params(q: QSchedule) -> ConstructionParams {
        ConstructionParams {
            rect: ParamRect::new(rat(0, 1), rat(1, 1), rat(1, 2), rat(1, 1)).unwrap(),
            phi: PhiRule::Offset { delta: 1 },
            q_schedule: q,
            depth: 1,
            seed: 7,
            retry_cap: 4,
            cell_cap: DEFAULT_CELL_CAP,
        }
    }

    #[test]
    fn candidate_hooks() {
        let spec = CantorSpec::ternary();
        let params = toy_params(QSchedule::Default);
        let root = GenerationState::root();
        // q = 1: F_1 is F_0 re-gridded, measure unchanged
        let all = candidate_next(&root, &spec, &params, 1, 0, &Rational::one()).unwrap();
        assert_eq!(all.kept, IntervalSet::unit());
        assert_eq!(all.measure, Rational::one());
        assert_eq!(all.f_n, rat(1, 20));
        assert_eq!(all.cells.len(), 20);
        // q = 0: empty
        let none = candidate_next(&root, &spec, &params, 1, 0, &Rational::zero()).unwrap();
        assert!(none.kept.is_empty());
        assert!(none.measure.is_zero());
    }

    #[test]
    fn candidate_is_deterministic() {
        let spec = CantorSpec::ternary();
        let params = toy_params(QSchedule::Default);
        let root = GenerationState::root();
        let a = candidate_next(&root, &spec, &params, 1, 3, &rat(1, 5)).unwrap();
        let b = candidate_next(&root, &spec, &params, 1, 3, &rat(1, 5)).unwrap();
        assert_eq!(a.cells, b.cells);
        let c = candidate_next(&root, &spec, &params, 1, 4, &rat(1, 5)).unwrap();
        assert_ne!(a.cells, c.cells, "different attempts resample");
    }

    #[test]
    fn candidate_nests_in_parent() {
        let spec = CantorSpec::ternary();
        let params = toy_params(QSchedule::Default);
        let root = GenerationState::root();
        for attempt in 0..6 {
            let cand = candidate_next(&root, &spec, &params, 1, attempt, &rat(1, 5)).unwrap();
            assert!(cand.kept.is_subset_of(&root.kept));
            assert_eq!(cand.measure, &cand.f_n * &Rational::from(cand.cells.len() as u64));
        }
    }

    #[test]
    fn cell_cap_guard() {
        let spec = CantorSpec::ternary();
        let mut params = toy_params(QSchedule::Default);
        params.cell_cap = 10; // f_1 = 1/20 needs 20 cells
        let root = GenerationState::root();
        assert!(matches!(
            candidate_next(&root, &spec, &params, 1, 0, &rat(1, 5)),
            Err(Error::CellCap { .. })
        ));
    }

    #[test]
    fn spacing_flag() {
        let spec = CantorSpec::ternary();
        // ternary: min(ell, d) = ell; f <= 0.9 * t_lo * ell < t_lo * ell
        assert!(spacing_ok(&spec, 2, &rat(1, 2), &rat(1, 20)));
        // fat spec: d < ell can break the spacing guarantee
        let fat = CantorSpec::constant(rat(2, 5)).unwrap(); // d = ell/4... d = 1 - 2*2/5 = 1/5 ell=2/5
        let ell = fat.ell(1);
        let f = &(&rat(9, 10) * &rat(1, 2)) * &ell; // coarsest legal f
        assert!(!spacing_ok(&fat, 1, &rat(1, 2), &f));
    }
}
