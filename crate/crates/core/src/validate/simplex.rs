//! Primal network simplex for the uncapacitated transportation problem on a
//! complete bipartite graph, with block-search pivoting and a spanning tree
//! kept in parent/thread form (strongly feasible trees, so no cycling).

const STATE_TREE: i8 = 0;
const STATE_LOWER: i8 = 1;
const DIR_UP: i8 = 1;
const DIR_DOWN: i8 = -1;
const NONE: usize = usize::MAX;

pub(crate) struct Solution {
    /// flow on arc i * n2 + j
    pub flow: Vec<f64>,
}

struct Simplex<'a> {
    n1: usize,
    n2: usize,
    arcs: usize,
    cost: &'a [f64],
    art_src: Vec<usize>,
    art_tgt: Vec<usize>,
    art_cost: Vec<f64>,
    flow: Vec<f64>,
    state: Vec<i8>,
    pi: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    pred_dir: Vec<i8>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    dirty: Vec<usize>,
    block: usize,
    next_arc: usize,
    eps: f64,
    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: f64,
}

impl<'a> Simplex<'a> {
    #[inline]
    fn source(&self, e: usize) -> usize {
        if e < self.arcs {
            e / self.n2
        } else {
            self.art_src[e - self.arcs]
        }
    }

    #[inline]
    fn target(&self, e: usize) -> usize {
        if e < self.arcs {
            self.n1 + e % self.n2
        } else {
            self.art_tgt[e - self.arcs]
        }
    }

    #[inline]
    fn arc_cost(&self, e: usize) -> f64 {
        if e < self.arcs {
            self.cost[e]
        } else {
            self.art_cost[e - self.arcs]
        }
    }

    fn new(supply: &[f64], n1: usize, n2: usize, cost: &'a [f64]) -> Self {
        let n = n1 + n2;
        let arcs = n1 * n2;
        let root = n;
        let max_cost = cost.iter().cloned().fold(0.0, f64::max);
        let art = (max_cost + 1.0) * n as f64;
        let mut s = Simplex {
            n1,
            n2,
            arcs,
            cost,
            art_src: vec![0; n],
            art_tgt: vec![0; n],
            art_cost: vec![0.0; n],
            flow: vec![0.0; arcs + n],
            state: vec![STATE_LOWER; arcs + n],
            pi: vec![0.0; n + 1],
            parent: vec![root; n + 1],
            pred: vec![NONE; n + 1],
            pred_dir: vec![DIR_UP; n + 1],
            thread: vec![0; n + 1],
            rev_thread: vec![0; n + 1],
            succ_num: vec![1; n + 1],
            last_succ: vec![0; n + 1],
            dirty: Vec::new(),
            block: ((arcs as f64).sqrt().ceil() as usize).max(10).min(arcs.max(1)),
            next_arc: 0,
            eps: 1e-12 * (max_cost.max(1e-300)),
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0.0,
        };
        s.parent[root] = NONE;
        s.thread[root] = 0;
        s.rev_thread[0] = root;
        s.succ_num[root] = n + 1;
        s.last_succ[root] = root - 1;
        for u in 0..n {
            let e = arcs + u;
            s.thread[u] = u + 1;
            s.rev_thread[u + 1] = u;
            s.last_succ[u] = u;
            s.pred[u] = e;
            s.state[e] = STATE_TREE;
            if supply[u] >= 0.0 {
                s.pred_dir[u] = DIR_UP;
                s.art_src[u] = u;
                s.art_tgt[u] = root;
                s.flow[e] = supply[u];
                s.pi[u] = 0.0;
            } else {
                s.pred_dir[u] = DIR_DOWN;
                s.art_src[u] = root;
                s.art_tgt[u] = u;
                s.art_cost[u] = art;
                s.flow[e] = -supply[u];
                s.pi[u] = art;
            }
        }
        s
    }

    #[inline]
    fn reduced(&self, e: usize) -> f64 {
        // real arcs only; their state is TREE (0) or LOWER (1)
        let i = e / self.n2;
        let j = self.n1 + e % self.n2;
        self.state[e] as f64 * (self.cost[e] + self.pi[i] - self.pi[j])
    }

    fn find_entering(&mut self) -> bool {
        let mut min = -self.eps;
        let mut found = NONE;
        let mut cnt = self.block;
        let m = self.arcs;
        let mut e = self.next_arc;
        for _ in 0..m {
            let c = self.reduced(e);
            if c < min {
                min = c;
                found = e;
            }
            e += 1;
            if e == m {
                e = 0;
            }
            cnt -= 1;
            if cnt == 0 {
                if found != NONE {
                    break;
                }
                cnt = self.block;
            }
        }
        if found == NONE {
            return false;
        }
        self.in_arc = found;
        self.next_arc = e;
        true
    }

    fn find_join(&mut self) {
        let mut u = self.source(self.in_arc);
        let mut v = self.target(self.in_arc);
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    fn find_leaving(&mut self) -> bool {
        let first = self.source(self.in_arc);
        let second = self.target(self.in_arc);
        let mut delta = f64::INFINITY;
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == DIR_UP { self.flow[e] } else { f64::INFINITY };
            if d < delta {
                delta = d;
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == DIR_DOWN { self.flow[e] } else { f64::INFINITY };
            if d <= delta {
                delta = d;
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }
        if result == 0 {
            return false;
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        self.delta = delta;
        true
    }

    fn change_flow(&mut self) {
        let val = self.delta;
        if val > 0.0 {
            self.flow[self.in_arc] += val;
            let mut u = self.source(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] -= self.pred_dir[u] as f64 * val;
                u = self.parent[u];
            }
            let mut u = self.target(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] += self.pred_dir[u] as f64 * val;
                u = self.parent[u];
            }
        }
        self.state[self.in_arc] = STATE_TREE;
        let out = self.pred[self.u_out];
        self.state[out] = STATE_LOWER;
        self.flow[out] = 0.0;
    }

    fn update_tree(&mut self) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let join = self.join;
        let in_arc = self.in_arc;
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source(in_arc) { DIR_UP } else { DIR_DOWN };
            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };
            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty.clear();
            self.dirty.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty.push(last);
                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;
                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;
                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;
            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }
            for i in 0..self.dirty.len() {
                let u = self.dirty[i];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }
            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                tmp_sc = tmp_sc + self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source(in_arc) { DIR_UP } else { DIR_DOWN };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }
        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }
        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let u_in = self.u_in;
        let sigma = self.pi[self.v_in] - self.pi[u_in] - self.pred_dir[u_in] as f64 * self.arc_cost(self.in_arc);
        let end = self.thread[self.last_succ[u_in]];
        let mut u = u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }
}

/// Minimizes sum cost[i*n2+j] * flow over plans with row sums `a` and column
/// sums `b` (both nonnegative with equal totals).
pub(crate) fn solve(a: &[f64], b: &[f64], cost: &[f64], max_iter: usize) -> Option<Solution> {
    let n1 = a.len();
    let n2 = b.len();
    let supply: Vec<f64> = a.iter().copied().chain(b.iter().map(|v| -v)).collect();
    let mut s = Simplex::new(&supply, n1, n2, cost);
    let mut it = 0;
    while s.find_entering() {
        s.find_join();
        if !s.find_leaving() {
            return None;
        }
        s.change_flow();
        s.update_tree();
        s.update_potential();
        it += 1;
        if it > max_iter {
            return None;
        }
    }
    let mut flow = s.flow;
    flow.truncate(n1 * n2);
    Some(Solution { flow })
}
