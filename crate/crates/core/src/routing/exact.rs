//! Exact minimum-total-length tours for small instances.
//!
//! A Held-Karp table gives the best closed dock tour through every subset of
//! cluster heads; a second subset DP then splits the full set into one
//! nonempty subset per UAV. Both are exhaustive, so the result is the global
//! optimum over all partitions and orderings.

use super::{RoutePlan, RouteProblem};
use crate::error::{Error, Result};

pub const EXACT_MAX_CHS: usize = 10;
pub const EXACT_MAX_UAVS: usize = 3;

struct SubsetTours {
    /// Best closed-tour length per subset mask.
    length: Vec<f64>,
    parent: Vec<Vec<usize>>,
    last: Vec<usize>,
}

impl SubsetTours {
    fn build(dist: &[Vec<f64>], n: usize) -> Self {
        let full = 1usize << n;
        let mut dp = vec![vec![f64::INFINITY; n]; full];
        let mut parent = vec![vec![usize::MAX; n]; full];
        for j in 0..n {
            dp[1 << j][j] = dist[0][j + 1];
        }
        for mask in 1..full {
            for j in 0..n {
                if mask & (1 << j) == 0 || dp[mask][j].is_infinite() {
                    continue;
                }
                let base = dp[mask][j];
                for k in 0..n {
                    if mask & (1 << k) != 0 {
                        continue;
                    }
                    let next = mask | (1 << k);
                    let cand = base + dist[j + 1][k + 1];
                    if cand < dp[next][k] {
                        dp[next][k] = cand;
                        parent[next][k] = j;
                    }
                }
            }
        }
        let mut length = vec![f64::INFINITY; full];
        let mut last = vec![usize::MAX; full];
        for mask in 1..full {
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let cand = dp[mask][j] + dist[j + 1][0];
                if cand < length[mask] {
                    length[mask] = cand;
                    last[mask] = j;
                }
            }
        }
        Self {
            length,
            parent,
            last,
        }
    }

    fn order(&self, mut mask: usize) -> Vec<usize> {
        let mut rev = Vec::new();
        let mut j = self.last[mask];
        while mask != 0 {
            rev.push(j);
            let p = self.parent[mask][j];
            mask &= !(1 << j);
            j = p;
        }
        rev.reverse();
        rev
    }
}

/// Globally shortest total length over every split of the cluster heads into
/// `uavs` nonempty ordered routes.
///
/// Routes come out in canonical form: each is oriented so its first index is
/// below its last, and the routes are sorted lexicographically.
pub fn brute_force_mtsp(problem: &RouteProblem) -> Result<RoutePlan> {
    problem.validate()?;
    let n = problem.chs.len();
    let u = problem.uavs;
    if n > EXACT_MAX_CHS || u > EXACT_MAX_UAVS {
        return Err(Error::InstanceTooLarge { chs: n, uavs: u });
    }
    let dist = problem.distance_matrix();
    let tours = SubsetTours::build(&dist, n);
    let full = (1usize << n) - 1;

    // best[k][mask]: cheapest split of `mask` into k nonempty tours
    let mut best = vec![tours.length.clone()];
    let mut choice: Vec<Vec<usize>> = vec![(0..=full).collect()];
    for k in 2..=u {
        let prev = &best[k - 2];
        let mut cur = vec![f64::INFINITY; full + 1];
        let mut pick = vec![0usize; full + 1];
        for mask in 1..=full {
            if (mask as u32).count_ones() < k as u32 {
                continue;
            }
            let low = mask & mask.wrapping_neg();
            let rest_bits = mask ^ low;
            // enumerate subsets containing the lowest element
            let mut sub = rest_bits;
            loop {
                let first = sub | low;
                let rest = mask ^ first;
                if rest != 0 {
                    let cand = tours.length[first] + prev[rest];
                    if cand < cur[mask] {
                        cur[mask] = cand;
                        pick[mask] = first;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest_bits;
            }
        }
        best.push(cur);
        choice.push(pick);
    }

    let mut routes = Vec::with_capacity(u);
    let mut mask = full;
    for k in (1..=u).rev() {
        let first = if k == 1 { mask } else { choice[k - 1][mask] };
        routes.push(tours.order(first));
        mask ^= first;
    }
    canonicalize(&mut routes);
    Ok(problem.plan_from_routes(routes))
}

pub(crate) fn canonicalize(routes: &mut [Vec<usize>]) {
    for r in routes.iter_mut() {
        if r.first() > r.last() {
            r.reverse();
        }
    }
    routes.sort();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{distance, Point3};

    fn problem(chs: Vec<Point3>, dock: Point3, uavs: usize) -> RouteProblem {
        RouteProblem::new(chs, dock, uavs, 200.0, 10.0)
    }

    #[test]
    fn single_ch_is_out_and_back() {
        let dock = Point3::ground(0.0, 0.0);
        let ch = Point3::ground(3000.0, 4000.0);
        let plan = brute_force_mtsp(&problem(vec![ch], dock, 1)).unwrap();
        assert_eq!(plan.routes, vec![vec![0]]);
        assert!((plan.total_length - 2.0 * distance(&dock, &ch)).abs() < 1e-9);
    }

    #[test]
    fn unit_square_corners() {
        let km = 1000.0;
        let chs = vec![
            Point3::ground(0.0, 0.0),
            Point3::ground(km, 0.0),
            Point3::ground(km, km),
            Point3::ground(0.0, km),
        ];
        let plan = brute_force_mtsp(&problem(chs, Point3::ground(km / 2.0, km / 2.0), 1)).unwrap();
        let expected = 2.0 * 0.5f64.sqrt() * km + 3.0 * km;
        assert!((plan.total_length - expected).abs() < 1e-6);
        assert!((plan.total_length / km - 4.4142).abs() < 1e-4);
    }

    #[test]
    fn symmetric_pair_splits_between_two_uavs() {
        let chs = vec![Point3::ground(-2000.0, 0.0), Point3::ground(2000.0, 0.0)];
        let plan = brute_force_mtsp(&problem(chs, Point3::ground(0.0, 0.0), 2)).unwrap();
        assert_eq!(plan.routes, vec![vec![0], vec![1]]);
        assert!((plan.total_length - 8000.0).abs() < 1e-9);
        assert_eq!(plan.std_dev, 0.0);
    }

    #[test]
    fn guard_rejects_large_instances() {
        let chs: Vec<Point3> = (0..11).map(|i| Point3::ground(i as f64, 0.0)).collect();
        assert!(matches!(
            brute_force_mtsp(&problem(chs.clone(), Point3::ground(0.0, 0.0), 1)),
            Err(Error::InstanceTooLarge { .. })
        ));
        assert!(matches!(
            brute_force_mtsp(&problem(chs[..5].to_vec(), Point3::ground(0.0, 0.0), 4)),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn canonical_orientation() {
        let chs = vec![
            Point3::ground(1000.0, 0.0),
            Point3::ground(1000.0, 1000.0),
            Point3::ground(0.0, 1000.0),
        ];
        let plan = brute_force_mtsp(&problem(chs, Point3::ground(0.0, 0.0), 1)).unwrap();
        assert_eq!(plan.routes, vec![vec![0, 1, 2]]);
    }
}
