use super::instance::{Instance, Time};

/// Greedy cliques of the conflict graph, one grown from every job.
///
/// Each clique starts at a seed job and repeatedly adds the longest
/// remaining neighbour adjacent to every member. Duplicates are removed and
/// members are sorted.
pub fn greedy_cliques(inst: &Instance) -> Vec<Vec<usize>> {
    let n = inst.n_jobs();
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for seed in 0..n {
        if inst.degree(seed) == 0 {
            continue;
        }
        let mut candidates: Vec<usize> = inst.neighbors(seed).to_vec();
        candidates.sort_by(|&a, &b| inst.p(b).cmp(&inst.p(a)).then(a.cmp(&b)));
        let mut clique = vec![seed];
        for c in candidates {
            if clique.iter().all(|&q| inst.in_conflict(q, c)) {
                clique.push(c);
            }
        }
        clique.sort_unstable();
        if !cliques.contains(&clique) {
            cliques.push(clique);
        }
    }
    cliques
}

/// Admissible lower bound on the optimal makespan: the largest of the
/// average machine load, the longest job, and the heaviest greedy conflict
/// clique (clique members must run one after another).
pub fn minmax_lower_bound(inst: &Instance) -> Time {
    let m = inst.n_machines() as Time;
    let total = inst.total_processing();
    let load = (total + m - 1) / m;
    let longest = inst.proc_times().iter().copied().max().unwrap_or(0);
    let clique = greedy_cliques(inst)
        .iter()
        .map(|c| c.iter().map(|&j| inst.p(j)).sum::<Time>())
        .max()
        .unwrap_or(0);
    load.max(longest).max(clique)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_and_longest_job() {
        let inst = Instance::new(2, vec![3, 2], []).unwrap();
        assert_eq!(minmax_lower_bound(&inst), 3);
    }

    #[test]
    fn conflict_pair_clique() {
        let inst = Instance::new(2, vec![3, 3], [(0, 1)]).unwrap();
        assert_eq!(minmax_lower_bound(&inst), 6);
    }

    #[test]
    fn triangle_clique() {
        let inst = Instance::new(3, vec![2, 2, 2], [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(minmax_lower_bound(&inst), 6);
        assert_eq!(greedy_cliques(&inst), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::new(3, vec![], []).unwrap();
        assert_eq!(minmax_lower_bound(&inst), 0);
    }
}
