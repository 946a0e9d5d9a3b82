//! Dijkstra shortest paths on a regular 8-connected grid with per-edge
//! weights supplied by a closure. Used as a rigorous-upper-bound distance
//! oracle: every graph path is a concatenation of straight segments, so its
//! metric length dominates the geodesic distance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(PartialEq)]
struct QueueEntry {
    cost: f64,
    node: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on cost via reversed comparison; ties broken by node index
        // for determinism.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest path between two nodes of an `nx × ny` grid, 8-neighbor
/// connectivity, edge weights from `weight(ix0, iy0, ix1, iy1)`.
pub(crate) fn grid_shortest_path(
    nx: usize,
    ny: usize,
    start: (usize, usize),
    goal: (usize, usize),
    weight: &impl Fn(usize, usize, usize, usize) -> f64,
) -> f64 {
    let idx = |ix: usize, iy: usize| ix * ny + iy;
    let start_id = idx(start.0, start.1);
    let goal_id = idx(goal.0, goal.1);
    let mut dist = vec![f64::INFINITY; nx * ny];
    let mut done = vec![false; nx * ny];
    let mut heap = BinaryHeap::new();
    dist[start_id] = 0.0;
    heap.push(QueueEntry {
        cost: 0.0,
        node: start_id,
    });
    const OFFSETS: [(isize, isize); 8] = [
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    ];
    while let Some(QueueEntry { cost, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        if node == goal_id {
            return cost;
        }
        let ix = node / ny;
        let iy = node % ny;
        for &(dx, dy) in &OFFSETS {
            let jx = ix as isize + dx;
            let jy = iy as isize + dy;
            if jx < 0 || jy < 0 || jx as usize >= nx || jy as usize >= ny {
                continue;
            }
            let (jx, jy) = (jx as usize, jy as usize);
            let j = idx(jx, jy);
            if done[j] {
                continue;
            }
            let next = cost + weight(ix, iy, jx, jy);
            if next < dist[j] {
                dist[j] = next;
                heap.push(QueueEntry {
                    cost: next,
                    node: j,
                });
            }
        }
    }
    dist[goal_id]
}
