//! Exact certification of the trapping property over a parameter rectangle.
//!
//! The verdict "some interval of `x + t*C_m` lies inside one maximal interval
//! of `F_n`" is constant on each open face of the line arrangement
//! `{x + t*a = b}` where `a` runs over the boundary points of `C_m` and `b`
//! over the subdivision endpoints of `F_{n-1}`: moving inside a face, no
//! image point crosses a subdivision point. Checking one interior sample per
//! face therefore certifies the whole closed rectangle (closed-cell
//! containment passes to face closures).
//!
//! Faces are enumerated by vertical decomposition: sort the abscissas of all
//! pairwise intersections and line/rectangle-boundary crossings; inside each
//! resulting column the crossing order is fixed, every t-gap is one face,
//! and a gap is a newly born face exactly when it does not extend past the
//! column's left edge. Each face is evaluated once, at its birth column.
//!
//! `brute_force_check` is the independent oracle: random admissible points
//! evaluated directly, sharing none of the arrangement machinery.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{CantorSpec, EndpointSet};
use crate::construction::{next_subdivision, ConstructionParams};
use crate::error::Error;
use crate::interval::IntervalSet;
use crate::rational::Rational;
use crate::rng::KeyedStream;

/// Cap on the exact evaluation of `(1 - q^K)^(2^dphi)`.
const EXPONENT_CAP: u32 = 20;

/// A cut line `x + t*a = b` in `(x, t)` parameter space. `a = 0` gives the
/// vertical line `x = b`; all coefficients here satisfy `a >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutLine {
    pub a: Rational,
    pub b: Rational,
}

impl CutLine {
    pub fn is_vertical(&self) -> bool {
        self.a.is_zero()
    }

    /// `t` value at abscissa `x` (slanted lines only).
    pub fn value_at(&self, x: &Rational) -> Rational {
        debug_assert!(!self.is_vertical());
        &(&self.b - x) / &self.a
    }

    /// Clipped x-extent inside the rectangle, if the line meets it.
    fn clipped_span(&self, rect: &ParamRectRef) -> Option<(Rational, Rational)> {
        if self.is_vertical() {
            if &self.b < rect.x_lo || &self.b > rect.x_hi {
                return None;
            }
            return Some((self.b.clone(), self.b.clone()));
        }
        // x = b - t*a decreases in t for a > 0
        let enter = (&self.b - &(&self.a * rect.t_hi)).max(rect.x_lo.clone());
        let exit = (&self.b - &(&self.a * rect.t_lo)).min(rect.x_hi.clone());
        (enter <= exit).then_some((enter, exit))
    }
}

/// One sampled parameter point inside a face (or on the boundary sweep of a
/// degenerate rectangle).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceSample {
    pub x: Rational,
    pub t: Rational,
    /// Whether `x + tC ⊆ [0, 1]`, i.e. `x >= 0` and `x + t <= 1`.
    pub admissible: bool,
}

/// Point of the rectangle witnessing a trapping failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub x: Rational,
    pub t: Rational,
}

/// Certificate for one generation over one rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    /// Number of cut lines meeting the rectangle.
    #[serde(rename = "S_n")]
    pub lines_count: u64,
    /// Distinct admissible faces evaluated.
    pub faces_checked: u64,
    /// Minimum over checked faces of the count of image intervals contained
    /// in a single maximal interval of `F_{n-1}`; 0 when no face was checked.
    pub min_p: u64,
    /// Worst-case number of `f_n`-cells needed to cover one image interval.
    #[serde(rename = "K")]
    pub k_used: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    /// Trivial certificate for the root state `F_0 = [0, 1]`.
    pub fn vacuous() -> Self {
        Verdict {
            holds: true,
            lines_count: 0,
            faces_checked: 0,
            min_p: 0,
            k_used: 0,
            counterexample: None,
        }
    }
}

/// Outcome of a single-point trapping evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCheck {
    pub holds: bool,
    /// Number of image intervals contained in a single component of `F`.
    pub contained: u64,
    /// True when `x + tC ⊄ [0, 1]`; such points need no certification.
    pub vacuous: bool,
}

struct ParamRectRef<'a> {
    x_lo: &'a Rational,
    x_hi: &'a Rational,
    t_lo: &'a Rational,
    t_hi: &'a Rational,
}

impl<'a> From<&'a crate::construction::ParamRect> for ParamRectRef<'a> {
    fn from(r: &'a crate::construction::ParamRect) -> Self {
        ParamRectRef {
            x_lo: &r.a,
            x_hi: &r.b,
            t_lo: &r.t_lo,
            t_hi: &r.t_hi,
        }
    }
}

/// Trapping check at one `(x, t)`, `t > 0`: counts intervals of
/// `x + t*generation(spec, m)` contained in a single component of `f_set`.
pub fn property_a_at(
    f_set: &IntervalSet,
    spec: &CantorSpec,
    m: u32,
    x: &Rational,
    t: &Rational,
) -> Result<PointCheck, Error> {
    if !t.is_positive() {
        return Err(Error::InvalidParams(format!(
            "trapping check needs t > 0, got {t}"
        )));
    }
    let gen = spec.generation(m)?;
    Ok(property_a_with(&gen, f_set, x, t))
}

/// Same check against a precomputed generation set.
pub fn property_a_with(
    gen_set: &IntervalSet,
    f_set: &IntervalSet,
    x: &Rational,
    t: &Rational,
) -> PointCheck {
    let vacuous = x.is_negative() || &(x + t) > &Rational::one();
    let image = gen_set
        .affine_image(x, t)
        .expect("t > 0 checked by callers");
    let contained = image
        .components()
        .iter()
        .filter(|iv| f_set.component_containing(iv).is_some())
        .count() as u64;
    PointCheck {
        holds: contained >= 1,
        contained,
        vacuous,
    }
}

/// Cell endpoints of the `f`-subdivision of `prev`, sorted.
pub fn subdivision_endpoints(prev: &IntervalSet, f: &Rational) -> Vec<Rational> {
    let mut grid = Vec::new();
    for comp in prev.components() {
        let count = (&comp.length() / f)
            .to_integer()
            .expect("f divides component length")
            .to_u64()
            .expect("cell count fits u64");
        for i in 0..=count {
            grid.push(&comp.lo + &(&Rational::from(i) * f));
        }
    }
    grid.sort();
    grid.dedup();
    grid
}

/// All cut lines `x + t*a = b` meeting the rectangle, for `a` in the
/// boundary set and `b` in the grid, plus the admissibility boundaries
/// `x = 0` (a=0, b=0) and `x + t = 1` (a=1, b=1). Deduplicated, sorted.
pub fn cut_lines(
    endpoint_set: &EndpointSet,
    grid: &[Rational],
    rect: &crate::construction::ParamRect,
) -> Vec<CutLine> {
    let rr = ParamRectRef::from(rect);
    let mut lines = Vec::with_capacity(endpoint_set.len() * grid.len() + 2);
    for a in &endpoint_set.points {
        for b in grid {
            lines.push(CutLine {
                a: a.clone(),
                b: b.clone(),
            });
        }
    }
    lines.push(CutLine {
        a: Rational::zero(),
        b: Rational::zero(),
    });
    lines.push(CutLine {
        a: Rational::one(),
        b: Rational::one(),
    });
    lines.sort_by(|p, q| p.a.cmp(&q.a).then_with(|| p.b.cmp(&q.b)));
    lines.dedup();
    lines.retain(|l| l.clipped_span(&rr).is_some());
    lines
}

/// Abscissas partitioning the rectangle into sweep columns: rectangle edges,
/// vertical lines, clipped span endpoints, and all pairwise intersections
/// inside the closed rectangle.
fn breakpoints(lines: &[CutLine], rr: &ParamRectRef) -> Vec<Rational> {
    let mut xs = vec![rr.x_lo.clone(), rr.x_hi.clone()];
    let spans: Vec<(Rational, Rational)> = lines
        .iter()
        .map(|l| l.clipped_span(rr).expect("pre-filtered"))
        .collect();
    for (enter, exit) in &spans {
        xs.push(enter.clone());
        xs.push(exit.clone());
    }
    // pairwise intersections, parallel over the first index
    let mut crossings: Vec<Vec<Rational>> = Vec::new();
    (0..lines.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Vec::new();
            let li = &lines[i];
            for lj in &lines[i + 1..] {
                if li.a == lj.a {
                    continue; // parallel (distinct b after dedup)
                }
                // t = (b_i - b_j)/(a_i - a_j); either line may be vertical
                let t = &(&li.b - &lj.b) / &(&li.a - &lj.a);
                if &t < rr.t_lo || &t > rr.t_hi {
                    continue;
                }
                let x = &li.b - &(&t * &li.a);
                if &x < rr.x_lo || &x > rr.x_hi {
                    continue;
                }
                acc.push(x);
            }
            acc
        })
        .collect_into_vec(&mut crossings);
    for v in crossings {
        xs.extend(v);
    }
    xs.retain(|x| x >= rr.x_lo && x <= rr.x_hi);
    xs.sort();
    xs.dedup();
    xs
}

/// The sweep columns of the rectangle: `(left, right, sample abscissa)`.
/// Degenerate rectangles collapse to a single zero-width column.
fn columns(xs: &[Rational]) -> Vec<(Rational, Rational, Rational)> {
    if xs.len() == 1 {
        return vec![(xs[0].clone(), xs[0].clone(), xs[0].clone())];
    }
    xs.windows(2)
        .map(|w| {
            let mid = &(&w[0] + &w[1]) / &Rational::from(2u32);
            (w[0].clone(), w[1].clone(), mid)
        })
        .collect()
}

/// Crossing t-values at abscissa `x` of the slanted lines active there,
/// clamped to lines whose clipped span contains `x`; sorted, deduplicated.
fn crossings_at(
    lines: &[CutLine],
    spans: &[(Rational, Rational)],
    x: &Rational,
) -> Vec<Rational> {
    let mut vals: Vec<Rational> = lines
        .iter()
        .zip(spans)
        .filter(|(l, (enter, exit))| !l.is_vertical() && enter <= x && x <= exit)
        .map(|(l, _)| l.value_at(x))
        .collect();
    vals.sort();
    vals.dedup();
    vals
}

/// Gap list for a column sample: midpoints between consecutive crossing
/// values with the rectangle's t-edges as sentinels. For a degenerate
/// t-range this is the single boundary value.
fn gaps_with_sentinels(vals: &[Rational], t_lo: &Rational, t_hi: &Rational) -> Vec<(Rational, Rational)> {
    if t_lo == t_hi {
        return vec![(t_lo.clone(), t_hi.clone())];
    }
    let mut bounds = Vec::with_capacity(vals.len() + 2);
    bounds.push(t_lo.clone());
    for v in vals {
        if v > t_lo && v < t_hi {
            bounds.push(v.clone());
        }
    }
    bounds.push(t_hi.clone());
    bounds.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

/// Every face of the arrangement restricted to the rectangle contains at
/// least one of these samples: one per t-gap per vertical column. Samples
/// are emitted for inadmissible faces too, flagged.
pub fn face_samples(
    lines: &[CutLine],
    rect: &crate::construction::ParamRect,
) -> Vec<FaceSample> {
    let rr = ParamRectRef::from(rect);
    let lines: Vec<CutLine> = lines
        .iter()
        .filter(|l| l.clipped_span(&rr).is_some())
        .cloned()
        .collect();
    let spans: Vec<(Rational, Rational)> = lines
        .iter()
        .map(|l| l.clipped_span(&rr).expect("filtered"))
        .collect();
    let xs = breakpoints(&lines, &rr);
    let mut out = Vec::new();
    for (_, _, mid) in columns(&xs) {
        let vals = crossings_at(&lines, &spans, &mid);
        for (g_lo, g_hi) in gaps_with_sentinels(&vals, rr.t_lo, rr.t_hi) {
            let t = &(&g_lo + &g_hi) / &Rational::from(2u32);
            let admissible = !mid.is_negative() && &(&mid + &t) <= &Rational::one();
            out.push(FaceSample {
                x: mid.clone(),
                t,
                admissible,
            });
        }
    }
    out
}

/// Side pattern of a point with respect to every line: `+1`/`-1` per line,
/// `None` if the point lies on some line. Two off-line points share a face
/// exactly when their sign vectors agree.
pub fn sign_vector(lines: &[CutLine], x: &Rational, t: &Rational) -> Option<Vec<i8>> {
    let mut v = Vec::with_capacity(lines.len());
    for l in lines {
        let lhs = x + &(t * &l.a);
        match lhs.cmp(&l.b) {
            std::cmp::Ordering::Less => v.push(-1),
            std::cmp::Ordering::Greater => v.push(1),
            std::cmp::Ordering::Equal => return None,
        }
    }
    Some(v)
}

struct ColumnOutcome {
    faces: u64,
    min_p: u64,
    counterexample: Option<(Rational, Rational, u64)>, // x, t, faces before failure
}

/// Exact whole-rectangle certification of generation `m` trapping for `f_n`
/// against the `f_len`-subdivision of `f_prev`.
///
/// Every admissible face of the cut-line arrangement is evaluated exactly
/// once, at the column where it is born; `min_p` is recorded against
/// `f_prev`'s maximal intervals. Column processing is parallel and the
/// verdict (including the first counterexample in column-then-gap order) is
/// deterministic regardless of worker count.
pub fn verify_all(
    f_n: &IntervalSet,
    f_prev: &IntervalSet,
    f_len: &Rational,
    spec: &CantorSpec,
    m: u32,
    rect: &crate::construction::ParamRect,
) -> Result<Verdict, Error> {
    let rr = ParamRectRef::from(rect);
    let gen = spec.generation(m)?;
    let grid = subdivision_endpoints(f_prev, f_len);
    let endpoints = spec.endpoints(m)?;
    let lines = cut_lines(&endpoints, &grid, rect);
    let spans: Vec<(Rational, Rational)> = lines
        .iter()
        .map(|l| l.clipped_span(&rr).expect("pre-filtered"))
        .collect();
    let vertical_xs: Vec<Rational> = lines
        .iter()
        .filter(|l| l.is_vertical())
        .map(|l| l.b.clone())
        .collect();

    let xs = breakpoints(&lines, &rr);
    let cols = columns(&xs);
    let one = Rational::one();

    let outcomes: Vec<ColumnOutcome> = cols
        .par_iter()
        .map(|(left, right, mid)| {
            let mut out = ColumnOutcome {
                faces: 0,
                min_p: u64::MAX,
                counterexample: None,
            };
            // whole column inadmissible: x < 0 or x + t > 1 for every t
            if mid.is_negative() || &(mid + rr.t_lo) > &one {
                return out;
            }
            let degenerate = left == right;
            // birth census is possible only with a clean left edge
            let census = !degenerate
                && left != rr.x_lo
                && vertical_xs.binary_search(left).is_err();

            // crossing values at the sample abscissa, with the value at the
            // left edge alongside when the census needs it
            let mut actives: Vec<(Rational, Rational)> = lines
                .iter()
                .zip(&spans)
                .filter(|(l, (enter, exit))| !l.is_vertical() && enter <= mid && mid <= exit)
                .map(|(l, _)| {
                    let v_mid = l.value_at(mid);
                    let v_left = if census { l.value_at(left) } else { Rational::zero() };
                    (v_mid, v_left)
                })
                .collect();
            actives.sort_by(|p, q| p.0.cmp(&q.0));
            let at_left: Vec<Rational> = if census {
                crossings_at(&lines, &spans, left)
            } else {
                Vec::new()
            };

            // gap bounds: (value at mid, value at left edge), with sentinels
            let mut bounds: Vec<(Rational, Rational)> =
                Vec::with_capacity(actives.len() + 2);
            bounds.push((rr.t_lo.clone(), rr.t_lo.clone()));
            for (v_mid, v_left) in actives {
                if &v_mid > rr.t_lo && &v_mid < rr.t_hi {
                    bounds.push((v_mid, v_left));
                }
            }
            bounds.push((rr.t_hi.clone(), rr.t_hi.clone()));
            let single_t = rr.t_lo == rr.t_hi;

            for w in bounds.windows(2) {
                let (g_lo, alpha) = &w[0];
                let (g_hi, beta) = &w[1];
                if g_lo == g_hi && !single_t {
                    continue;
                }
                let t = &(g_lo + g_hi) / &Rational::from(2u32);
                if &(mid + &t) > &one {
                    continue; // inadmissible gap (faces never straddle x+t=1)
                }
                let is_new = if !census {
                    true
                } else if alpha >= beta {
                    true // pinched at a vertex: face born here
                } else {
                    // a line piercing the left edge would also birth a face
                    let lo_idx = at_left.partition_point(|v| v <= alpha);
                    at_left.get(lo_idx).map_or(false, |v| v < beta)
                };
                if !is_new {
                    continue;
                }
                let check_n = property_a_with(&gen, f_n, mid, &t);
                if !check_n.holds {
                    out.counterexample = Some((mid.clone(), t, out.faces));
                    return out;
                }
                let check_prev = property_a_with(&gen, f_prev, mid, &t);
                out.min_p = out.min_p.min(check_prev.contained);
                out.faces += 1;
            }
            out
        })
        .collect();

    let mut faces_checked = 0u64;
    let mut min_p = u64::MAX;
    let mut counterexample = None;
    for oc in outcomes {
        if let Some((x, t, before)) = oc.counterexample {
            faces_checked += before;
            counterexample = Some(Counterexample { x, t });
            break;
        }
        faces_checked += oc.faces;
        min_p = min_p.min(oc.min_p);
    }
    if faces_checked == 0 {
        min_p = 0;
    } else if min_p == u64::MAX {
        min_p = 0;
    }

    let k_used = covering_count(&spec.ell(m), f_len, &rect.t_hi);
    Ok(Verdict {
        holds: counterexample.is_none(),
        lines_count: lines.len() as u64,
        faces_checked,
        min_p,
        k_used,
        counterexample,
    })
}

/// Worst-case number of `f`-cells required to cover one image interval over
/// the rectangle: `ceil(t_hi * ell_m / f) + 1`.
pub fn covering_count(ell_m: &Rational, f: &Rational, t_hi: &Rational) -> u64 {
    let ratio = &(t_hi * ell_m) / f;
    let k = ratio.ceil_int();

    k.to_u64().unwrap_or(u64::MAX).saturating_add(1)
}

/// Independent sampling oracle: evaluates `samples` random admissible dyadic
/// points directly and returns every violation. Makes at most
/// `1000 * samples` draws when admissible points are scarce.
pub fn brute_force_check(
    f_n: &IntervalSet,
    spec: &CantorSpec,
    m: u32,
    rect: &crate::construction::ParamRect,
    samples: u64,
    seed: u64,
) -> Result<Vec<Counterexample>, Error> {
    let gen = spec.generation(m)?;
    let width = &rect.b - &rect.a;
    let height = &rect.t_hi - &rect.t_lo;
    let one = Rational::one();
    let mut violations = Vec::new();
    let mut found = 0u64;
    let mut draws = 0u64;
    let max_draws = samples.saturating_mul(1000);
    let mut stream_idx = 0u64;
    while found < samples && draws < max_draws {
        let mut s = KeyedStream::new(seed, &[0xB1u64, stream_idx]);
        stream_idx += 1;
        draws += 1;
        let x = &rect.a + &(&s.dyadic_unit() * &width);
        let t = &rect.t_lo + &(&s.dyadic_unit() * &height);
        if x.is_negative() || &(&x + &t) > &one {
            continue; // inadmissible draws are skipped, not counted
        }
        found += 1;
        let check = property_a_with(&gen, f_n, &x, &t);
        if !check.holds {
            violations.push(Counterexample { x, t });
        }
    }
    Ok(violations)
}

/// Exact bad-probability bound for generation `n`:
/// `(1 - q_n^K)^(2^(phi(n)-phi(n-1))) * 2^(2 phi(n)) * ell_phi^(-2)`,
/// with `K` the worst-case covering count over the rectangle.
pub fn bad_probability_bound(
    n: u32,
    params: &ConstructionParams,
    spec: &CantorSpec,
) -> Result<Rational, Error> {
    let q = params.q_schedule.q(n);
    let phi_n = params.phi.phi(n);
    let delta_phi = phi_n - params.phi.phi(n - 1);
    let ell_phi = spec.ell(phi_n as u32);
    let f_n = f_chain(params, spec, n)?;
    let k = covering_count(&ell_phi, &f_n, &params.rect.t_hi);
    bad_probability_bound_parts(&q, k, delta_phi, phi_n, &ell_phi)
}

/// The bound from its ingredients; exact for `delta_phi` up to the cap.
pub fn bad_probability_bound_parts(
    q: &Rational,
    k: u64,
    delta_phi: u64,
    phi_n: u64,
    ell_phi: &Rational,
) -> Result<Rational, Error> {
    if delta_phi > EXPONENT_CAP as u64 {
        return Err(Error::ExponentCap {
            delta_phi,
            cap: EXPONENT_CAP,
        });
    }
    let survival = &Rational::one() - &q.pow_u64(k);
    let first = survival.pow_u64(1u64 << delta_phi);
    let second = Rational::from(2u32).pow_u64(2 * phi_n);
    let third = &Rational::one() / &(ell_phi * ell_phi);
    Ok(&(&first * &second) * &third)
}

/// Display-only log-form decomposition of the bound:
/// `(log(1-q^K) * 2^dphi, 2 phi(n) log 2, -2 log ell_phi)`.
pub fn bad_probability_log_terms(
    q: &Rational,
    k: u64,
    delta_phi: u64,
    phi_n: u64,
    ell_phi: &Rational,
) -> (f64, f64, f64) {
    let survival = &Rational::one() - &q.pow_u64(k);
    let first = if survival.is_positive() {
        survival.ln_f64() * 2f64.powi(delta_phi as i32)
    } else {
        f64::NEG_INFINITY
    };
    (
        first,
        2.0 * phi_n as f64 * std::f64::consts::LN_2,
        -2.0 * ell_phi.ln_f64(),
    )
}

/// Recompute the exact subdivision chain `f_1, ..., f_n`.
pub fn f_chain(params: &ConstructionParams, spec: &CantorSpec, n: u32) -> Result<Rational, Error> {
    let mut f = Rational::one();
    for i in 1..=n {
        let phi_i = params.phi.phi(i);
        let (_k, fi) = next_subdivision(&f, &params.rect.t_lo, &spec.ell(phi_i as u32))?;
        f = fi;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::ParamRect;
    use crate::rational::rat;

    fn rect_unit_half() -> ParamRect {
        ParamRect::new(rat(0, 1), rat(1, 1), rat(1, 2), rat(1, 1)).unwrap()
    }

    #[test]
    fn property_a_examples() {
        let spec = CantorSpec::ternary();
        // F = [0,1]: every admissible point holds with p = 2^m
        let unit = IntervalSet::unit();
        let pc = property_a_at(&unit, &spec, 3, &rat(1, 10), &rat(1, 2)).unwrap();
        assert!(pc.holds && !pc.vacuous);
        assert_eq!(pc.contained, 8);
        // F empty: fails with p = 0
        let pc = property_a_at(&IntervalSet::empty(), &spec, 2, &rat(0, 1), &rat(1, 2)).unwrap();
        assert!(!pc.holds);
        assert_eq!(pc.contained, 0);
        // m = 1, F = [0, 1/7], x = 0, t = 3/10: [0, 1/10] fits
        let f = IntervalSet::from_pairs(vec![(rat(0, 1), rat(1, 7))]).unwrap();
        let pc = property_a_at(&f, &spec, 1, &rat(0, 1), &rat(3, 10)).unwrap();
        assert!(pc.holds);
        assert_eq!(pc.contained, 1);
        // vacuous flag
        let pc = property_a_at(&unit, &spec, 1, &rat(3, 4), &rat(1, 2)).unwrap();
        assert!(pc.vacuous);
        assert!(property_a_at(&unit, &spec, 1, &rat(0, 1), &rat(0, 1)).is_err());
    }

    #[test]
    fn cut_lines_counts_and_bounds() {
        let spec = CantorSpec::ternary();
        let eps = spec.endpoints(1).unwrap(); // 4 boundary points
        let grid = vec![rat(0, 1), rat(1, 2), rat(1, 1)];
        let rect = ParamRect::new(rat(-10, 1), rat(10, 1), rat(1, 100), rat(100, 1)).unwrap();
        let lines = cut_lines(&eps, &grid, &rect);
        // wide rectangle keeps all 12 products plus admissibility lines
        // (x=0 dedupes with (a=0,b=0); x+t=1 dedupes with (a=1,b=1))
        assert!(lines.len() <= 12 + 2);
        assert!(lines.len() >= 12);
        // narrow rectangle far away drops everything
        let far = ParamRect::new(rat(50, 1), rat(60, 1), rat(1, 3), rat(1, 2)).unwrap();
        assert!(cut_lines(&eps, &grid, &far).is_empty());
    }

    #[test]
    fn face_samples_trivial_cases() {
        let rect = rect_unit_half();
        // no lines: single sample at the rectangle center
        let s = face_samples(&[], &rect);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].x, rat(1, 2));
        assert_eq!(s[0].t, rat(3, 4));
        // one slanted line through the rectangle: samples on both sides
        let line = CutLine { a: rat(1, 1), b: rat(1, 1) };
        let s = face_samples(std::slice::from_ref(&line), &rect);
        assert!(s.len() >= 2);
        let mut signs = std::collections::HashSet::new();
        for fs in &s {
            if let Some(v) = sign_vector(std::slice::from_ref(&line), &fs.x, &fs.t) {
                signs.insert(v);
            }
        }
        assert_eq!(signs.len(), 2);
    }

    #[test]
    fn degenerate_rectangles_reduce_to_sweeps() {
        let line = CutLine { a: rat(1, 1), b: rat(1, 1) };
        // zero-width x range
        let rect = ParamRect::new(rat(1, 4), rat(1, 4), rat(1, 2), rat(1, 1)).unwrap();
        let s = face_samples(std::slice::from_ref(&line), &rect);
        assert_eq!(s.len(), 2); // the line crosses t = 3/4 at x = 1/4
        // zero-height t range
        let rect = ParamRect::new(rat(0, 1), rat(1, 1), rat(1, 2), rat(1, 2)).unwrap();
        let s = face_samples(std::slice::from_ref(&line), &rect);
        assert_eq!(s.len(), 2); // split by x = 1/2
        // fully degenerate
        let rect = ParamRect::new(rat(1, 4), rat(1, 4), rat(1, 2), rat(1, 2)).unwrap();
        let s = face_samples(std::slice::from_ref(&line), &rect);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn verify_trivial_and_empty() {
        let spec = CantorSpec::ternary();
        let rect = rect_unit_half();
        let unit = IntervalSet::unit();
        let v = verify_all(&unit, &unit, &rat(1, 20), &spec, 2, &rect).unwrap();
        assert!(v.holds);
        assert!(v.faces_checked > 0);
        assert_eq!(v.min_p, 4, "all 4 intervals of C_2 land in [0,1]");
        assert!(v.counterexample.is_none());

        let v = verify_all(&IntervalSet::empty(), &unit, &rat(1, 20), &spec, 2, &rect).unwrap();
        assert!(!v.holds);
        let ce = v.counterexample.unwrap();
        let pc = property_a_at(&IntervalSet::empty(), &spec, 2, &ce.x, &ce.t).unwrap();
        assert!(!pc.holds && !pc.vacuous);
    }

    #[test]
    fn verify_known_generation_one_configs() {
        // the two 9-cell runs are the only valid F_1 configurations at
        // f = 1/20 over [0,1]x[1/2,1]; check one passes and a shifted
        // variant fails
        let spec = CantorSpec::ternary();
        let rect = rect_unit_half();
        let f = rat(1, 20);
        let unit = IntervalSet::unit();
        let good = IntervalSet::from_grid_cells(&f, &(3..12).collect::<Vec<_>>());
        let v = verify_all(&good, &unit, &f, &spec, 2, &rect).unwrap();
        assert!(v.holds, "9-run at cells 3..11 must certify");
        assert!(v.min_p >= 4);

        let bad = IntervalSet::from_grid_cells(&f, &(2..11).collect::<Vec<_>>());
        let v = verify_all(&bad, &unit, &f, &spec, 2, &rect).unwrap();
        assert!(!v.holds);
        let ce = v.counterexample.unwrap();
        let pc = property_a_at(&bad, &spec, 2, &ce.x, &ce.t).unwrap();
        assert!(!pc.holds && !pc.vacuous, "counterexample re-checks");
    }

    #[test]
    fn brute_force_agrees_on_certified_set() {
        let spec = CantorSpec::ternary();
        let rect = rect_unit_half();
        let f = rat(1, 20);
        let good = IntervalSet::from_grid_cells(&f, &(3..12).collect::<Vec<_>>());
        let violations = brute_force_check(&good, &spec, 2, &rect, 2000, 11).unwrap();
        assert!(violations.is_empty());

        let violations =
            brute_force_check(&IntervalSet::empty(), &spec, 2, &rect, 50, 11).unwrap();
        assert_eq!(violations.len(), 50);
        for v in &violations {
            let pc = property_a_at(&IntervalSet::empty(), &spec, 2, &v.x, &v.t).unwrap();
            assert!(!pc.holds);
        }
    }

    #[test]
    fn bound_evaluation_examples() {
        // q = 1/5, K = 3, dphi = 3, phi = 4, ell = 1/81:
        // (124/125)^8 * 2^8 * 81^2
        let b = bad_probability_bound_parts(&rat(1, 5), 3, 3, 4, &rat(1, 81)).unwrap();
        let expect = &rat(124, 125).pow_u64(8) * &rat(1679616, 1);
        assert_eq!(b, expect);
        let approx = b.to_f64();
        assert!((approx - 1.575e6).abs() < 2e4, "got {approx}");
        // q = 1 collapses the bound to 0
        let z = bad_probability_bound_parts(&rat(1, 1), 3, 3, 4, &rat(1, 81)).unwrap();
        assert!(z.is_zero());
        // monotone decreasing in dphi beyond the crossover
        let b1 = bad_probability_bound_parts(&rat(1, 5), 3, 6, 4, &rat(1, 81)).unwrap();
        let b2 = bad_probability_bound_parts(&rat(1, 5), 3, 10, 4, &rat(1, 81)).unwrap();
        assert!(b2 < b1);
        assert!(matches!(
            bad_probability_bound_parts(&rat(1, 5), 3, 64, 4, &rat(1, 81)),
            Err(Error::ExponentCap { .. })
        ));
    }

    #[test]
    fn covering_count_example() {
        // B*ell/f = (1/9)/(1/20) = 20/9 -> ceil + 1 = 4
        assert_eq!(covering_count(&rat(1, 9), &rat(1, 20), &rat(1, 1)), 4);
        assert_eq!(covering_count(&rat(1, 27), &rat(1, 60), &rat(1, 1)), 4);
    }
}
