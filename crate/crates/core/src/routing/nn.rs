use super::{RoutePlan, RouteProblem};
use crate::error::Result;

/// Greedy nearest-neighbor tours.
///
/// With one UAV: from the dock, repeatedly fly to the closest unvisited
/// cluster head, then return. With several, the UAVs take turns round-robin,
/// each extending its own route by the cluster head closest to its current
/// position. Ties go to the lowest cluster-head index.
pub fn nearest_neighbor_route(problem: &RouteProblem) -> Result<RoutePlan> {
    problem.validate()?;
    let dist = problem.distance_matrix();
    let n = problem.chs.len();
    let mut visited = vec![false; n];
    let mut routes: Vec<Vec<usize>> = vec![Vec::new(); problem.uavs];
    // matrix node of each UAV's current position (0 = dock)
    let mut at = vec![0usize; problem.uavs];

    for turn in 0..n {
        let u = turn % problem.uavs;
        let row = &dist[at[u]];
        let mut pick = None;
        let mut best = f64::INFINITY;
        for ch in (0..n).filter(|&c| !visited[c]) {
            if row[ch + 1] < best {
                best = row[ch + 1];
                pick = Some(ch);
            }
        }
        let ch = pick.expect("an unvisited cluster head remains");
        visited[ch] = true;
        routes[u].push(ch);
        at[u] = ch + 1;
    }
    Ok(problem.plan_from_routes(routes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::routing::brute_force_mtsp;

    fn problem(chs: Vec<Point3>, uavs: usize) -> RouteProblem {
        RouteProblem::new(chs, Point3::ground(0.0, 0.0), uavs, 200.0, 10.0)
    }

    #[test]
    fn collinear_heads_in_order() {
        let chs = vec![
            Point3::ground(2000.0, 0.0),
            Point3::ground(3000.0, 0.0),
            Point3::ground(1000.0, 0.0),
        ];
        let plan = nearest_neighbor_route(&problem(chs, 1)).unwrap();
        assert_eq!(plan.routes, vec![vec![2, 0, 1]]);
        assert!((plan.total_length - 6000.0).abs() < 1e-9);
    }

    #[test]
    fn never_beats_exact_on_square() {
        let chs = vec![
            Point3::ground(-500.0, -500.0),
            Point3::ground(500.0, -500.0),
            Point3::ground(500.0, 500.0),
            Point3::ground(-500.0, 500.0),
        ];
        let p = problem(chs, 1);
        let nn = nearest_neighbor_route(&p).unwrap();
        let exact = brute_force_mtsp(&p).unwrap();
        assert!(nn.total_length >= exact.total_length - 1e-9);
    }

    #[test]
    fn equidistant_tie_takes_lowest_index() {
        let chs = vec![Point3::ground(0.0, 1000.0), Point3::ground(1000.0, 0.0)];
        let plan = nearest_neighbor_route(&problem(chs, 1)).unwrap();
        assert_eq!(plan.routes, vec![vec![0, 1]]);
    }

    #[test]
    fn round_robin_gives_every_uav_a_head() {
        let chs: Vec<Point3> = (1..=7).map(|i| Point3::ground(i as f64 * 100.0, (i * i) as f64)).collect();
        let plan = nearest_neighbor_route(&problem(chs, 3)).unwrap();
        assert_eq!(plan.routes.len(), 3);
        assert!(plan.routes.iter().all(|r| !r.is_empty()));
        let mut all: Vec<usize> = plan.routes.concat();
        all.sort();
        assert_eq!(all, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_more_uavs_than_heads() {
        assert!(nearest_neighbor_route(&problem(vec![Point3::ground(1.0, 0.0)], 2)).is_err());
    }
}
