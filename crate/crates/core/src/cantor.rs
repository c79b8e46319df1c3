//! Symmetric Cantor set specifications and their finite generations.
//!
//! A spec is a rule producing the contraction ratios `r_n ∈ (0, 1/2)`. The
//! n-th generation consists of `2^n` disjoint closed intervals of exact
//! length `ell_n = r_1 r_2 ... r_n`; each parent splits by removing a middle
//! open gap of length `d_n = ell_{n-1} - 2 ell_n > 0`.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::interval::{Interval, IntervalSet};
use crate::rational::Rational;

/// Default guard against the `2^n` interval blow-up.
pub const DEFAULT_DEPTH_CAP: u32 = 20;

fn default_depth_cap() -> u32 {
    DEFAULT_DEPTH_CAP
}

/// Tail rule for list-based ratio rules, applied at absolute index `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields, rename_all = "snake_case")]
pub enum TailRule {
    Constant { r: Rational },
    ReciprocalShift { shift: u64 },
}

/// Rule producing `r_n` for `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields, rename_all = "snake_case")]
pub enum RatioRule {
    /// `r_n = r` for all `n`.
    Constant { r: Rational },
    /// `r_n = 1/(n + shift)`.
    ReciprocalShift { shift: u64 },
    /// Explicit leading values, then the tail rule at absolute index.
    List { values: Vec<Rational>, tail: TailRule },
}

/// A symmetric Cantor set specification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorSpec {
    pub ratios: RatioRule,
    /// Generation cap for `generation`/`endpoints`; explicit override.
    #[serde(default = "default_depth_cap")]
    pub depth_cap: u32,
}

impl CantorSpec {
    pub fn new(ratios: RatioRule) -> Result<Self, Error> {
        let spec = CantorSpec {
            ratios,
            depth_cap: DEFAULT_DEPTH_CAP,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_depth_cap(mut self, cap: u32) -> Self {
        self.depth_cap = cap;
        self
    }

    /// The ternary Cantor set, `r = 1/3`.
    pub fn ternary() -> Self {
        CantorSpec::new(RatioRule::Constant {
            r: Rational::new(1, 3),
        })
        .expect("ternary is valid")
    }

    pub fn constant(r: Rational) -> Result<Self, Error> {
        CantorSpec::new(RatioRule::Constant { r })
    }

    /// Enforces `0 < r_n < 1/2` for every `n`. For the monotone rules this
    /// reduces to the first applicable index.
    pub fn validate(&self) -> Result<(), Error> {
        let half = Rational::new(1, 2);
        let check = |r: &Rational, ctx: &str| -> Result<(), Error> {
            if !r.is_positive() || r >= &half {
                return Err(Error::InvalidSpec(format!(
                    "ratio {r} {ctx} violates 0 < r_n < 1/2"
                )));
            }
            Ok(())
        };
        match &self.ratios {
            RatioRule::Constant { r } => check(r, "(constant rule)"),
            RatioRule::ReciprocalShift { shift } => {
                // r_1 = 1/(1+shift) must be < 1/2, so shift >= 2
                if *shift < 2 {
                    return Err(Error::InvalidSpec(format!(
                        "reciprocal shift {shift} gives r_1 = 1/{} >= 1/2",
                        1 + shift
                    )));
                }
                Ok(())
            }
            RatioRule::List { values, tail } => {
                if values.is_empty() {
                    return Err(Error::InvalidSpec("empty ratio list".into()));
                }
                for (i, r) in values.iter().enumerate() {
                    check(r, &format!("(list index {})", i + 1))?;
                }
                let first_tail_n = values.len() as u64 + 1;
                match tail {
                    TailRule::Constant { r } => check(r, "(list tail)"),
                    TailRule::ReciprocalShift { shift } => {
                        if first_tail_n + shift <= 2 {
                            return Err(Error::InvalidSpec(format!(
                                "list tail reciprocal shift {shift} gives r_{first_tail_n} >= 1/2"
                            )));
                        }
                        Ok(())
                    }
                }
            }
        }
    }

    /// `r_n`, `n >= 1`.
    pub fn ratio(&self, n: u32) -> Rational {
        assert!(n >= 1, "ratios are indexed from 1");
        match &self.ratios {
            RatioRule::Constant { r } => r.clone(),
            RatioRule::ReciprocalShift { shift } => {
                Rational::from_big((1u32).into(), (n as u64 + shift).into())
            }
            RatioRule::List { values, tail } => {
                if (n as usize) <= values.len() {
                    values[n as usize - 1].clone()
                } else {
                    match tail {
                        TailRule::Constant { r } => r.clone(),
                        TailRule::ReciprocalShift { shift } => {
                            Rational::from_big((1u32).into(), (n as u64 + shift).into())
                        }
                    }
                }
            }
        }
    }

    /// `ell_n = r_1 r_2 ... r_n`; `ell_0 = 1`.
    pub fn ell(&self, n: u32) -> Rational {
        let mut acc = Rational::one();
        for k in 1..=n {
            acc = &acc * &self.ratio(k);
        }
        acc
    }

    /// Middle-gap length `d_n = ell_{n-1} - 2 ell_n`, `n >= 1`; positive under
    /// the spec invariant.
    pub fn gap(&self, n: u32) -> Rational {
        assert!(n >= 1, "gaps are indexed from 1");
        let prev = self.ell(n - 1);
        let cur = self.ell(n);
        &prev - &(&Rational::from(2u32) * &cur)
    }

    /// Whether `r_n < 1/3` (equivalently `d_n > ell_n`) for all `n`. Exact:
    /// the supported rules are eventually monotone, so finitely many checks
    /// decide the flag.
    pub fn is_thin(&self) -> bool {
        let third = Rational::new(1, 3);
        match &self.ratios {
            RatioRule::Constant { r } => r < &third,
            RatioRule::ReciprocalShift { shift } => {
                // r_1 = 1/(1+shift) is the largest
                Rational::from_big((1u32).into(), (1 + shift).into()) < third
            }
            RatioRule::List { values, tail } => {
                values.iter().all(|r| r < &third)
                    && match tail {
                        TailRule::Constant { r } => r < &third,
                        TailRule::ReciprocalShift { shift } => {
                            let n1 = values.len() as u64 + 1;
                            Rational::from_big((1u32).into(), (n1 + shift).into()) < third
                        }
                    }
            }
        }
    }

    /// The generation `C_n`: `2^n` disjoint closed intervals of length
    /// `ell_n`, built by splitting each parent interval symmetrically.
    pub fn generation(&self, n: u32) -> Result<IntervalSet, Error> {
        if n > self.depth_cap {
            return Err(Error::DepthCap {
                requested: n,
                cap: self.depth_cap,
            });
        }
        let mut intervals = vec![Interval {
            lo: Rational::zero(),
            hi: Rational::one(),
        }];
        for k in 1..=n {
            let ell = self.ell(k);
            let mut next = Vec::with_capacity(intervals.len() * 2);
            for iv in &intervals {
                next.push(Interval {
                    lo: iv.lo.clone(),
                    hi: &iv.lo + &ell,
                });
                next.push(Interval {
                    lo: &iv.hi - &ell,
                    hi: iv.hi.clone(),
                });
            }
            intervals = next;
        }
        debug_assert!(intervals.windows(2).all(|w| w[0].hi < w[1].lo));
        Ok(IntervalSet::normalize(intervals))
    }

    /// Sorted boundary set `∂C_n = L_n ∪ R_n`, cardinality `2^{n+1}`.
    pub fn endpoints(&self, n: u32) -> Result<EndpointSet, Error> {
        let gen = self.generation(n)?;
        let mut points = Vec::with_capacity(gen.len() * 2);
        for iv in gen.components() {
            points.push(iv.lo.clone());
            points.push(iv.hi.clone());
        }
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Ok(EndpointSet {
            points,
            generation: n,
        })
    }

    /// Sorted left endpoints `L_n`, cardinality `2^n`.
    pub fn left_endpoints(&self, n: u32) -> Result<Vec<Rational>, Error> {
        Ok(self
            .generation(n)?
            .components()
            .iter()
            .map(|iv| iv.lo.clone())
            .collect())
    }

    /// Finite-N truncation of the Newhouse thickness `inf_n ell_n/d_n`,
    /// i.e. `min_{1<=n<=N} ell_n/d_n`. For the supported monotone ratio
    /// rules the infimum is attained inside the window or at its end.
    pub fn newhouse_thickness(&self, max_n: u32) -> Rational {
        assert!(max_n >= 1);
        // ell_n/d_n = r_n/(1 - 2 r_n), so no products are needed
        let two = Rational::from(2u32);
        let mut best: Option<Rational> = None;
        for n in 1..=max_n {
            let r = self.ratio(n);
            let term = &r / &(&Rational::one() - &(&two * &r));
            best = Some(match best {
                None => term,
                Some(b) => b.min(term),
            });
        }
        best.expect("max_n >= 1")
    }
}

/// Sorted boundary points of a generation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointSet {
    pub points: Vec<Rational>,
    pub generation: u32,
}

impl EndpointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
