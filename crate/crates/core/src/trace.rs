//! Persistence schema for construction traces.
//!
//! Kept cells are stored as `[start, end)` ranges of global grid indices at
//! pitch `f_n`, which keeps certificate files compact; the interval set is
//! rebuilt exactly on load. Round trips are field-exact.

use serde::{Deserialize, Serialize};

use crate::cantor::CantorSpec;
use crate::construction::{ConstructionParams, ConstructionTrace, GenerationState};
use crate::error::Error;
use crate::interval::IntervalSet;
use crate::rational::Rational;
use crate::verifier::{Counterexample, Verdict};

/// Verdict as persisted, with the generation's exact bad-probability bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictRecord {
    pub holds: bool,
    #[serde(rename = "S_n")]
    pub lines_count: u64,
    pub faces_checked: u64,
    pub min_p: u64,
    #[serde(rename = "K")]
    pub k_used: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Counterexample>,
}

impl VerdictRecord {
    pub fn from_verdict(v: &Verdict, bound: Option<Rational>) -> Self {
        VerdictRecord {
            holds: v.holds,
            lines_count: v.lines_count,
            faces_checked: v.faces_checked,
            min_p: v.min_p,
            k_used: v.k_used,
            bound,
            counterexample: v.counterexample.clone(),
        }
    }

    pub fn to_verdict(&self) -> Verdict {
        Verdict {
            holds: self.holds,
            lines_count: self.lines_count,
            faces_checked: self.faces_checked,
            min_p: self.min_p,
            k_used: self.k_used,
            counterexample: self.counterexample.clone(),
        }
    }
}

/// One generation as persisted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceGeneration {
    pub n: u32,
    pub phi_n: u64,
    pub f_n: Rational,
    /// Kept cells as `[start, end)` index ranges on the global `f_n` grid.
    pub cells: Vec<(u64, u64)>,
    pub measure: Rational,
    pub attempts: u32,
    pub spacing_ok: bool,
    pub p_bound_ok: bool,
    pub verdict: VerdictRecord,
}

/// Complete persisted run: inputs plus per-generation certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub spec: CantorSpec,
    pub params: ConstructionParams,
    /// Set when the phi schedule is a small-scale override; the
    /// bad-probability bound need not vanish for such runs.
    pub outside_asymptotic_regime: bool,
    pub generations: Vec<TraceGeneration>,
}

/// Merge sorted cell indices into `[start, end)` ranges.
pub fn cells_to_ranges(cells: &[u64]) -> Vec<(u64, u64)> {
    let mut ranges: Vec<(u64, u64)> = Vec::new();
    for &j in cells {
        match ranges.last_mut() {
            Some((_, end)) if *end == j => *end += 1,
            _ => ranges.push((j, j + 1)),
        }
    }
    ranges
}

/// Expand `[start, end)` ranges back to sorted indices; rejects unsorted or
/// overlapping ranges.
pub fn ranges_to_cells(ranges: &[(u64, u64)]) -> Result<Vec<u64>, Error> {
    let mut cells = Vec::new();
    let mut last_end: Option<u64> = None;
    for &(start, end) in ranges {
        if start >= end || last_end.is_some_and(|e| start < e) {
            return Err(Error::InvalidSpec(format!(
                "corrupt trace: bad cell range [{start}, {end})"
            )));
        }
        cells.extend(start..end);
        last_end = Some(end);
    }
    Ok(cells)
}

impl TraceFile {
    pub fn from_trace(trace: &ConstructionTrace) -> Self {
        let generations = trace
            .states
            .iter()
            .zip(&trace.verdicts)
            .map(|(st, v)| {
                let bound = if st.n >= 1 {
                    Some(trace.bounds[st.n as usize - 1].clone())
                } else {
                    None
                };
                TraceGeneration {
                    n: st.n,
                    phi_n: st.phi_n,
                    f_n: st.f_n.clone(),
                    cells: cells_to_ranges(&st.cells),
                    measure: st.measure.clone(),
                    attempts: st.attempts,
                    spacing_ok: st.spacing_ok,
                    p_bound_ok: st.p_bound_ok,
                    verdict: VerdictRecord::from_verdict(v, bound),
                }
            })
            .collect();
        TraceFile {
            spec: trace.spec.clone(),
            params: trace.params.clone(),
            outside_asymptotic_regime: trace.params.phi.is_override(),
            generations,
        }
    }

    /// Rebuild the in-memory run; validates ranges and measures.
    pub fn to_trace(&self) -> Result<ConstructionTrace, Error> {
        let mut states = Vec::with_capacity(self.generations.len());
        let mut verdicts = Vec::with_capacity(self.generations.len());
        let mut bounds = Vec::new();
        for g in &self.generations {
            let cells = ranges_to_cells(&g.cells)?;
            let kept = IntervalSet::from_grid_cells(&g.f_n, &cells);
            let measure = kept.measure();
            if measure != g.measure {
                return Err(Error::InvalidSpec(format!(
                    "corrupt trace: generation {} measure {} does not match cells ({})",
                    g.n, g.measure, measure
                )));
            }
            states.push(GenerationState {
                n: g.n,
                phi_n: g.phi_n,
                f_n: g.f_n.clone(),
                cells,
                kept,
                measure,
                attempts: g.attempts,
                spacing_ok: g.spacing_ok,
                p_bound_ok: g.p_bound_ok,
            });
            verdicts.push(g.verdict.to_verdict());
            if let Some(b) = &g.verdict.bound {
                bounds.push(b.clone());
            }
        }
        Ok(ConstructionTrace {
            spec: self.spec.clone(),
            params: self.params.clone(),
            states,
            verdicts,
            bounds,
        })
    }
}

/// Standalone verdict file written by the verify command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictFile {
    pub mode: String,
    pub all_hold: bool,
    pub generations: Vec<VerdictRecord>,
}
