//! Convex hulls of finitely many payoff points, queried through the simplex.

use num_traits::{One, Zero};

use crate::lp::{Lp, LpResult, Rel};
use crate::num::{Ext, Q};

/// A point `Σ α_k points[k]` of the hull with `p >= lower`, minimizing coordinate `obj`.
/// `lower[j] = -inf` leaves coordinate `j` free; `+inf` makes the problem infeasible.
/// Returns the optimal value and the weights α.
pub fn min_in_hull(points: &[Vec<Q>], lower: &[Ext], obj: usize) -> Option<(Q, Vec<Q>)> {
    hull_lp(points, lower, &[], obj)
}

/// Like [`min_in_hull`] with additional upper bounds `p_j <= upper[j]`.
pub fn hull_lp(points: &[Vec<Q>], lower: &[Ext], upper: &[(usize, Q)], obj: usize) -> Option<(Q, Vec<Q>)> {
    if points.is_empty() || lower.iter().any(|l| *l == Ext::PosInf) {
        return None;
    }
    let k = points.len();
    let mut lp = Lp::new(k).minimize(points.iter().map(|p| p[obj].clone()).collect());
    lp.push(vec![Q::one(); k], Rel::Eq, Q::one());
    for (j, l) in lower.iter().enumerate() {
        if let Ext::Fin(x) = l {
            lp.push(points.iter().map(|p| p[j].clone()).collect(), Rel::Ge, x.clone());
        }
    }
    for (j, u) in upper {
        lp.push(points.iter().map(|p| p[*j].clone()).collect(), Rel::Le, u.clone());
    }
    match lp.solve() {
        LpResult::Optimal { x, value } => Some((value, x)),
        _ => None,
    }
}

pub fn combine(points: &[Vec<Q>], alpha: &[Q]) -> Vec<Q> {
    let d = points.first().map_or(0, Vec::len);
    let mut out = vec![Q::zero(); d];
    for (p, a) in points.iter().zip(alpha) {
        if a.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(p) {
            *o += a * x;
        }
    }
    out
}

/// Whether `x` is a limit-inferior payoff of plays combining the points: for every
/// coordinate `j` some hull point dominates `x` and matches it on `j`.
pub fn in_lower_seal(points: &[Vec<Q>], x: &[Q]) -> bool {
    let lower: Vec<Ext> = x.iter().cloned().map(Ext::Fin).collect();
    (0..x.len()).all(|j| matches!(min_in_hull(points, &lower, j), Some((v, _)) if v == x[j]))
}
