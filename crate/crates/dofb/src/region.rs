//! Exact rational DoF outer-bound regions.
//!
//! A region is the subset of the unit square `0 ≤ D1, D2 ≤ 1` cut out by
//! half-planes `a·D1 + b·D2 ≤ c` with non-negative rational coefficients.
//! Every bottleneck certificate contributes the half-plane
//! `ρ·D_i + D_ī ≤ ρ`. All arithmetic is exact rational — no floating
//! point anywhere in this module.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::bottleneck::{BottleneckCertificate, Dest};

/// An exact rational point `(D1, D2)`.
pub type Point = (Rational64, Rational64);

/// Half-plane constraint `a·D1 + b·D2 ≤ c` with non-negative rational
/// coefficients, `(a, b) ≠ (0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlane {
    pub a: Rational64,
    pub b: Rational64,
    pub c: Rational64,
}

impl HalfPlane {
    /// Builds a half-plane, checking the sign and degeneracy invariants.
    ///
    /// # Panics
    /// Panics if any coefficient is negative or if `a = b = 0`.
    pub fn new(a: Rational64, b: Rational64, c: Rational64) -> Self {
        assert!(
            a >= Rational64::zero() && b >= Rational64::zero() && c >= Rational64::zero(),
            "half-plane coefficients must be non-negative"
        );
        assert!(
            !(a.is_zero() && b.is_zero()),
            "half-plane must constrain at least one coordinate"
        );
        HalfPlane { a, b, c }
    }

    /// The bottleneck bound `ρ·D_i + D_ī ≤ ρ` for destination `i`.
    ///
    /// # Panics
    /// Panics if `rho < 1`.
    pub fn dof_bound(dest: Dest, rho: i64) -> Self {
        assert!(rho >= 1, "bottleneck ranks are positive");
        let r = Rational64::from_integer(rho);
        match dest {
            Dest::D1 => HalfPlane::new(r, Rational64::one(), r),
            Dest::D2 => HalfPlane::new(Rational64::one(), r, r),
        }
    }

    /// The unit-box upper bounds `D1 ≤ 1` and `D2 ≤ 1`.
    pub fn unit_box() -> [HalfPlane; 2] {
        let (zero, one) = (Rational64::zero(), Rational64::one());
        [
            HalfPlane::new(one, zero, one),
            HalfPlane::new(zero, one, one),
        ]
    }

    /// True iff `(x, y)` satisfies the constraint.
    pub fn contains(&self, point: Point) -> bool {
        self.a * point.0 + self.b * point.1 <= self.c
    }

    /// Classifies the plane as a bottleneck bound: `Some((dest, coef))`
    /// when it reads `coef·D_i + D_ī ≤ coef`. The symmetric plane
    /// `D1 + D2 ≤ 1` classifies as a `D1` bound.
    pub fn bound_form(&self) -> Option<(Dest, Rational64)> {
        let one = Rational64::one();
        if self.b == one && self.a == self.c && self.a >= one {
            Some((Dest::D1, self.a))
        } else if self.a == one && self.b == self.c && self.b >= one {
            Some((Dest::D2, self.b))
        } else {
            None
        }
    }
}

impl fmt::Display for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        for (coef, name) in [(self.a, "D1"), (self.b, "D2")] {
            if coef.is_zero() {
                continue;
            }
            if coef.is_one() {
                terms.push(name.to_string());
            } else {
                terms.push(format!("{coef} {name}"));
            }
        }
        write!(f, "{} <= {}", terms.join(" + "), self.c)
    }
}

/// A bounded DoF outer region: stored constraints (the unit-box upper
/// bounds always among them, redundant planes retained) plus the derived
/// counter-clockwise vertex list. Non-negativity of `D1, D2` is part of
/// the region semantics rather than a stored constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofRegion {
    pub constraints: Vec<HalfPlane>,
    pub vertices: Vec<Point>,
}

impl DofRegion {
    /// Intersects the unit square with the given half-planes. Redundant
    /// planes stay listed in `constraints`; `vertices` holds exactly the
    /// extreme points, counter-clockwise from the lexicographically
    /// smallest.
    pub fn from_constraints(planes: Vec<HalfPlane>) -> DofRegion {
        let mut constraints: Vec<HalfPlane> = HalfPlane::unit_box().to_vec();
        constraints.extend(planes);
        let vertices = enumerate_vertices(&constraints);
        DofRegion {
            constraints,
            vertices,
        }
    }

    /// True iff `(x, y)` lies in the region.
    pub fn contains(&self, point: Point) -> bool {
        point.0 >= Rational64::zero()
            && point.1 >= Rational64::zero()
            && self.constraints.iter().all(|h| h.contains(point))
    }
}

/// Builds the outer-bound region of a certificate list: the unit square
/// intersected with `ρ·D_i + D_ī ≤ ρ` for every certificate.
pub fn build_region(certs: &[BottleneckCertificate]) -> DofRegion {
    let planes = certs
        .iter()
        .map(|c| HalfPlane::dof_bound(c.dest, c.rho as i64))
        .collect();
    DofRegion::from_constraints(planes)
}

/// Maximum of `D1 + D2` over the region, exact.
///
/// # Panics
/// Panics on an empty region (none arises from non-negative constraints,
/// which always admit the origin).
pub fn sum_dof(region: &DofRegion) -> Rational64 {
    region
        .vertices
        .iter()
        .map(|&(x, y)| x + y)
        .max()
        .expect("region contains the origin")
}

/// Membership in `S = {2(1 − 1/k) : k ≥ 1 integer} ∪ {2}`: the exact set
/// of sum-DoF values realizable by the bounds of this crate's certificate
/// form.
pub fn in_s(x: Rational64) -> bool {
    let two = Rational64::from_integer(2);
    if x == two {
        return true;
    }
    if x >= two {
        return false;
    }
    // x = 2 − 2/k  ⇔  k = 2/(2 − x), which must be a positive integer.
    let k = two / (two - x);
    k.is_integer() && k >= Rational64::one()
}

/// A natural number extended with infinity (no bound).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extended {
    Nat(u64),
    Infinite,
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Nat(n) => write!(f, "{n}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

/// Verdict of [`expressible_by_bottleneck_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expressibility {
    pub expressible: bool,
    /// Witness pair `(m1, m2)` when expressible.
    pub witness: Option<(Extended, Extended)>,
}

/// Decides whether `region` equals
/// `box ∩ {m1·D1 + D2 ≤ m1} ∩ {D1 + m2·D2 ≤ m2}` for some
/// `m1, m2 ∈ ℕ ∪ {∞}` (`∞` meaning no bound on that side).
///
/// The search is finite: a finite `m_i` participating in such a
/// description is tight on an edge of the region, so it is determined by
/// some vertex with `D_i < 1` via `m = D_ī / (1 − D_i)`, and only
/// positive-integer values qualify. Candidates are tried in ascending
/// order with `∞` last, `m1` outermost, and the first match is returned.
pub fn expressible_by_bottleneck_bounds(region: &DofRegion) -> Expressibility {
    let one = Rational64::one();
    let mut m1_cands: BTreeSet<u64> = BTreeSet::new();
    let mut m2_cands: BTreeSet<u64> = BTreeSet::new();
    for &(x, y) in &region.vertices {
        if x < one {
            let cand = y / (one - x);
            if cand.is_integer() && cand >= one {
                m1_cands.insert(cand.to_integer() as u64);
            }
        }
        if y < one {
            let cand = x / (one - y);
            if cand.is_integer() && cand >= one {
                m2_cands.insert(cand.to_integer() as u64);
            }
        }
    }
    let extend = |cands: BTreeSet<u64>| -> Vec<Extended> {
        cands
            .into_iter()
            .map(Extended::Nat)
            .chain([Extended::Infinite])
            .collect()
    };
    let m1_list = extend(m1_cands);
    let m2_list = extend(m2_cands);
    for &m1 in &m1_list {
        for &m2 in &m2_list {
            let mut planes = Vec::new();
            if let Extended::Nat(n) = m1 {
                planes.push(HalfPlane::dof_bound(Dest::D1, n as i64));
            }
            if let Extended::Nat(n) = m2 {
                planes.push(HalfPlane::dof_bound(Dest::D2, n as i64));
            }
            let candidate = DofRegion::from_constraints(planes);
            if candidate.vertices == region.vertices {
                return Expressibility {
                    expressible: true,
                    witness: Some((m1, m2)),
                };
            }
        }
    }
    Expressibility {
        expressible: false,
        witness: None,
    }
}

/// Errors from bound comparison.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegionError {
    /// The two bounds constrain different destinations.
    #[error("bounds constrain different destinations")]
    MismatchedDestination,
}

/// Comparison of a certificate bound against a prior cut-size bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub dest: Dest,
    pub new: HalfPlane,
    pub prior: HalfPlane,
    /// `D_i` value where the new bound meets `D_ī = 1`, i.e. `1 − 1/a`.
    pub new_intercept: Rational64,
    /// Same intercept for the prior bound.
    pub prior_intercept: Rational64,
    /// `new_intercept − prior_intercept` (non-positive when the new bound
    /// is at least as tight).
    pub gap: Rational64,
}

/// Compares two bounds of the form `a·D_i + D_ī ≤ a` for the same `i` by
/// their `D_i`-intercepts at `D_ī = 1`.
///
/// # Panics
/// Panics if either plane is not of bottleneck-bound form.
pub fn compare_bounds(new: &HalfPlane, prior: &HalfPlane) -> Result<GapReport, RegionError> {
    let intercept = |coef: Rational64| Rational64::one() - coef.recip();
    let (new_dest, new_coef) = new
        .bound_form()
        .unwrap_or_else(|| panic!("not a bottleneck bound: {new}"));
    let (prior_dest, prior_coef) = prior
        .bound_form()
        .unwrap_or_else(|| panic!("not a bottleneck bound: {prior}"));
    // The symmetric plane D1 + D2 ≤ 1 classifies as D1 but is equally a
    // D2 bound; let it match either side.
    let symmetric = |p: &HalfPlane| p.a == p.b && p.b == p.c;
    let dest = if new_dest == prior_dest {
        new_dest
    } else if symmetric(new) {
        prior_dest
    } else if symmetric(prior) {
        new_dest
    } else {
        return Err(RegionError::MismatchedDestination);
    };
    let new_intercept = intercept(new_coef);
    let prior_intercept = intercept(prior_coef);
    Ok(GapReport {
        dest,
        new: new.clone(),
        prior: prior.clone(),
        new_intercept,
        prior_intercept,
        gap: new_intercept - prior_intercept,
    })
}

/// Enumerates the extreme points of `{(x,y) : x,y ≥ 0}` intersected with
/// the constraint list: every vertex is the intersection of two tight
/// lines, so pairwise intersection plus a feasibility filter finds them
/// all, and any feasible intersection of two distinct lines is extreme.
fn enumerate_vertices(constraints: &[HalfPlane]) -> Vec<Point> {
    let zero = Rational64::zero();
    // Lines a·x + b·y = c: the two axes plus every constraint boundary.
    let mut lines: Vec<(Rational64, Rational64, Rational64)> = vec![
        (Rational64::one(), zero, zero),
        (zero, Rational64::one(), zero),
    ];
    lines.extend(constraints.iter().map(|h| (h.a, h.b, h.c)));

    let feasible =
        |p: Point| p.0 >= zero && p.1 >= zero && constraints.iter().all(|h| h.contains(p));

    let mut points: BTreeSet<Point> = BTreeSet::new();
    for (i, &(a1, b1, c1)) in lines.iter().enumerate() {
        for &(a2, b2, c2) in &lines[i + 1..] {
            let det = a1 * b2 - a2 * b1;
            if det.is_zero() {
                continue;
            }
            let x = (c1 * b2 - c2 * b1) / det;
            let y = (a1 * c2 - a2 * c1) / det;
            if feasible((x, y)) {
                points.insert((x, y));
            }
        }
    }
    ccw_from_lex_min(points.into_iter().collect())
}

/// Sorts vertices counter-clockwise around their centroid, rotated to
/// start at the lexicographically smallest. Zero-, one-, and two-point
/// sets are returned in lexicographic order.
fn ccw_from_lex_min(mut points: Vec<Point>) -> Vec<Point> {
    points.sort();
    if points.len() <= 2 {
        return points;
    }
    let n = Rational64::from_integer(points.len() as i64);
    let cx = points.iter().fold(Rational64::zero(), |s, p| s + p.0) / n;
    let cy = points.iter().fold(Rational64::zero(), |s, p| s + p.1) / n;
    let zero = Rational64::zero();
    // Half 0: angles in [0, π) measured from the positive x-axis; half 1:
    // the rest. Within a half, p precedes q iff the cross product of
    // their direction vectors is positive.
    let half = |p: &Point| -> u8 {
        let (dx, dy) = (p.0 - cx, p.1 - cy);
        if dy > zero || (dy == zero && dx > zero) {
            0
        } else {
            1
        }
    };
    points.sort_by(|p, q| {
        half(p).cmp(&half(q)).then_with(|| {
            let cross = (p.0 - cx) * (q.1 - cy) - (q.0 - cx) * (p.1 - cy);
            cross.cmp(&zero).reverse()
        })
    });
    let start = points
        .iter()
        .enumerate()
        .min_by_key(|&(_, p)| p)
        .map(|(i, _)| i)
        .expect("non-empty");
    points.rotate_left(start);
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn cert(dest: Dest, rho: usize) -> BottleneckCertificate {
        BottleneckCertificate {
            dest,
            node: crate::network::NodeId::from("v"),
            layer: 3,
            m_set: vec![],
            rho,
            prior_m_size: rho,
        }
    }

    fn pts(raw: &[(i64, i64, i64, i64)]) -> Vec<Point> {
        raw.iter().map(|&(a, b, c, d)| (r(a, b), r(c, d))).collect()
    }

    #[test]
    fn half_plane_display_styles() {
        assert_eq!(
            HalfPlane::dof_bound(Dest::D1, 3).to_string(),
            "3 D1 + D2 <= 3"
        );
        assert_eq!(
            HalfPlane::dof_bound(Dest::D2, 2).to_string(),
            "D1 + 2 D2 <= 2"
        );
        assert_eq!(
            HalfPlane::dof_bound(Dest::D1, 1).to_string(),
            "D1 + D2 <= 1"
        );
        let [bx, by] = HalfPlane::unit_box();
        assert_eq!(bx.to_string(), "D1 <= 1");
        assert_eq!(by.to_string(), "D2 <= 1");
        assert_eq!(
            HalfPlane::new(r(1, 2), r(0, 1), r(3, 2)).to_string(),
            "1/2 D1 <= 3/2"
        );
    }

    #[test]
    fn single_d1_certificate_region() {
        let region = build_region(&[cert(Dest::D1, 3)]);
        assert_eq!(
            region.vertices,
            pts(&[(0, 1, 0, 1), (1, 1, 0, 1), (2, 3, 1, 1), (0, 1, 1, 1)])
        );
        assert_eq!(sum_dof(&region), r(5, 3));
        // Box planes + the certificate plane, in that order.
        assert_eq!(region.constraints.len(), 3);
        assert_eq!(region.constraints[2].to_string(), "3 D1 + D2 <= 3");
    }

    #[test]
    fn empty_certificate_list_gives_the_unit_square() {
        let region = build_region(&[]);
        assert_eq!(
            region.vertices,
            pts(&[(0, 1, 0, 1), (1, 1, 0, 1), (1, 1, 1, 1), (0, 1, 1, 1)])
        );
        assert_eq!(sum_dof(&region), r(2, 1));
    }

    #[test]
    fn twin_certificates_meet_on_the_diagonal() {
        for m in 2..=6 {
            let region = build_region(&[cert(Dest::D1, m), cert(Dest::D2, m)]);
            let mm = m as i64;
            let corner = (r(mm, mm + 1), r(mm, mm + 1));
            assert!(region.vertices.contains(&corner), "m = {m}");
            assert_eq!(sum_dof(&region), r(2, 1) - r(2, mm + 1));
        }
    }

    #[test]
    fn redundant_planes_are_retained_but_do_not_add_vertices() {
        let tight = build_region(&[cert(Dest::D1, 3)]);
        let padded = build_region(&[cert(Dest::D1, 3), cert(Dest::D1, 5)]);
        assert_eq!(padded.constraints.len(), 4);
        assert_eq!(tight.vertices, padded.vertices);
    }

    #[test]
    fn region_membership() {
        let region = build_region(&[cert(Dest::D1, 2)]);
        assert!(region.contains((r(1, 2), r(1, 1))));
        assert!(region.contains((r(0, 1), r(0, 1))));
        assert!(!region.contains((r(3, 4), r(1, 1))));
        assert!(!region.contains((r(-1, 10), r(0, 1))));
        assert_eq!(sum_dof(&region), r(3, 2));
    }

    #[test]
    fn in_s_matches_the_closed_form() {
        for (value, expected) in [
            (r(0, 1), true),  // k = 1
            (r(1, 1), true),  // k = 2
            (r(4, 3), true),  // k = 3
            (r(3, 2), true),  // k = 4
            (r(5, 3), true),  // k = 6
            (r(7, 4), true),  // k = 8
            (r(9, 5), true),  // k = 10
            (r(11, 6), true), // k = 12
            (r(2, 1), true),  // the isolated point
            (r(151, 100), false),
            (r(5, 4), false),
            (r(-1, 2), false),
            (r(21, 10), false),
            (r(3, 1), false),
        ] {
            assert_eq!(in_s(value), expected, "value {value}");
        }
    }

    #[test]
    fn expressibility_of_a_single_bound_region() {
        let region = build_region(&[cert(Dest::D1, 3)]);
        let verdict = expressible_by_bottleneck_bounds(&region);
        assert!(verdict.expressible);
        assert_eq!(
            verdict.witness,
            Some((Extended::Nat(3), Extended::Infinite))
        );
    }

    #[test]
    fn expressibility_of_the_unit_square() {
        let verdict = expressible_by_bottleneck_bounds(&build_region(&[]));
        assert!(verdict.expressible);
        assert_eq!(
            verdict.witness,
            Some((Extended::Infinite, Extended::Infinite))
        );
    }

    #[test]
    fn three_halves_simplex_is_not_expressible() {
        let region = DofRegion::from_constraints(vec![HalfPlane::new(r(1, 1), r(1, 1), r(3, 2))]);
        assert_eq!(
            region.vertices,
            pts(&[
                (0, 1, 0, 1),
                (1, 1, 0, 1),
                (1, 1, 1, 2),
                (1, 2, 1, 1),
                (0, 1, 1, 1)
            ])
        );
        let verdict = expressible_by_bottleneck_bounds(&region);
        assert!(!verdict.expressible);
        assert_eq!(verdict.witness, None);
    }

    #[test]
    fn twin_bound_regions_are_expressible() {
        let region = build_region(&[cert(Dest::D1, 4), cert(Dest::D2, 4)]);
        let verdict = expressible_by_bottleneck_bounds(&region);
        assert!(verdict.expressible);
        assert_eq!(verdict.witness, Some((Extended::Nat(4), Extended::Nat(4))));
    }

    #[test]
    fn gap_between_new_and_prior_bounds() {
        let new = HalfPlane::dof_bound(Dest::D1, 3);
        let prior = HalfPlane::dof_bound(Dest::D1, 4);
        let report = compare_bounds(&new, &prior).unwrap();
        assert_eq!(report.dest, Dest::D1);
        assert_eq!(report.new_intercept, r(2, 3));
        assert_eq!(report.prior_intercept, r(3, 4));
        assert_eq!(report.gap, r(-1, 12));

        let same = compare_bounds(&new, &new).unwrap();
        assert_eq!(same.gap, r(0, 1));

        assert_eq!(
            compare_bounds(&new, &HalfPlane::dof_bound(Dest::D2, 4)),
            Err(RegionError::MismatchedDestination)
        );
        // The symmetric bound D1 + D2 ≤ 1 matches either destination.
        let sym = HalfPlane::dof_bound(Dest::D1, 1);
        assert_eq!(
            compare_bounds(&sym, &HalfPlane::dof_bound(Dest::D2, 4))
                .unwrap()
                .dest,
            Dest::D2
        );
    }

    #[test]
    fn rationals_print_without_denominator_one() {
        assert_eq!(r(2, 1).to_string(), "2");
        assert_eq!(r(5, 3).to_string(), "5/3");
        assert_eq!(r(2, 3).to_string(), "2/3");
    }

    #[test]
    fn vertex_order_starts_lexicographically_smallest() {
        // A degenerate region: the single point (0, 0).
        let region = DofRegion::from_constraints(vec![HalfPlane::new(r(1, 1), r(1, 1), r(0, 1))]);
        assert_eq!(region.vertices, pts(&[(0, 1, 0, 1)]));
        // A segment: D2 = 0, 0 ≤ D1 ≤ 1.
        let region = DofRegion::from_constraints(vec![HalfPlane::new(r(0, 1), r(1, 1), r(0, 1))]);
        assert_eq!(region.vertices, pts(&[(0, 1, 0, 1), (1, 1, 0, 1)]));
    }
}
