"""Depth-first branch-and-bound core shared by every engine objective.

One recursive search handles three modes:

  mode 0  minimize the peak number of simultaneously operating routes,
          optionally under a cap on the number of distinct start slots;
  mode 1  decide feasibility of: peak <= z_cap and, for every counting cap
          (theta, k), at most k schools with disutility > theta;
  mode 2  minimize total disutility subject to peak <= z_cap.

Branching is interleaved: a school's start slot, then each of its morning
arrivals (longest route first), then each of its afternoon departures, then
the next school. Identical-duration routes of one school are forced into
nondecreasing arrival order, which removes permutation symmetry without
losing any schedule shape. The peak so far travels down the recursion as an
argument, so backtracking undoes it for free.

This file is valid Cython "pure Python mode": setup.py compiles a copy of it
as ``bellsched.engine._search_c`` when possible, and the package falls back
to interpreting this very file otherwise. Keep it import-light and free of
Python features Cython cannot compile.
"""

import time
from array import array

try:
    import cython
except ImportError:  # pragma: no cover - exercised only without cython
    from bellsched.engine import _cyshim as cython

INFEASIBLE_PEAK = 1 << 28

MODE_MIN_PEAK = 0
MODE_DECIDE = 1
MODE_MIN_SUM = 2


def int_array(values):
    return array("i", values)


def double_array(values):
    return array("d", values)


@cython.cclass
class Search:
    mode: cython.int
    n_schools: cython.int
    n_am: cython.int
    n_pm: cython.int
    m_slots: cython.int
    pmin: cython.int
    pmax: cython.int
    alpha: cython.int
    beta: cython.int
    lam: cython.int
    mu: cython.int
    stride: cython.int
    z_cap: cython.int
    distinct_cap: cython.int
    use_seed: cython.int
    n_caps: cython.int
    lb: cython.int
    deadline: cython.double

    order: cython.int[:]
    dom_flat: cython.int[:]
    dom_off: cython.int[:]
    delta: cython.int[:]
    am_dur: cython.int[:]
    am_off: cython.int[:]
    pm_dur: cython.int[:]
    pm_off: cython.int[:]
    disut: cython.double[:]
    caps_theta: cython.double[:]
    caps_k: cython.int[:]
    seed_starts: cython.int[:]
    suffix_min: cython.double[:]
    am_forced: cython.int[:]
    pm_forced: cython.int[:]
    pm_stride: cython.int

    am_occ: cython.int[:]
    pm_occ: cython.int[:]
    cap_cnt: cython.int[:]
    slot_use: cython.int[:]
    cur_start: cython.int[:]
    cur_am: cython.int[:]
    cur_pm: cython.int[:]
    best_start: cython.int[:]
    best_am: cython.int[:]
    best_pm: cython.int[:]

    n_distinct: cython.int
    found: cython.int
    timed_out: cython.int
    best_peak: cython.int
    best_sum: cython.double
    nodes: cython.longlong

    def __init__(
        self,
        mode,
        n_schools,
        m_slots,
        pmin,
        pmax,
        alpha,
        beta,
        lam,
        mu,
        order,
        dom_flat,
        dom_off,
        delta,
        am_dur,
        am_off,
        pm_dur,
        pm_off,
        disut,
        caps_theta,
        caps_k,
        n_caps,
        z_cap,
        distinct_cap,
        seed_starts,
        use_seed,
        suffix_min,
        am_forced,
        pm_forced,
        lb,
        best_peak_init,
        best_sum_init,
        deadline,
    ):
        self.mode = mode
        self.n_schools = n_schools
        self.n_am = len(am_dur)
        self.n_pm = len(pm_dur)
        self.m_slots = m_slots
        self.pmin = pmin
        self.pmax = pmax
        self.alpha = alpha
        self.beta = beta
        self.lam = lam
        self.mu = mu
        self.stride = m_slots + 1
        self.z_cap = z_cap
        self.distinct_cap = distinct_cap
        self.use_seed = use_seed
        self.n_caps = n_caps
        self.lb = lb
        self.deadline = deadline

        self.order = order
        self.dom_flat = dom_flat
        self.dom_off = dom_off
        self.delta = delta
        self.am_dur = am_dur
        self.am_off = am_off
        self.pm_dur = pm_dur
        self.pm_off = pm_off
        self.disut = disut
        self.caps_theta = caps_theta
        self.caps_k = caps_k
        self.seed_starts = seed_starts
        self.suffix_min = suffix_min
        self.am_forced = am_forced
        self.pm_forced = pm_forced
        self.pm_stride = pmax - pmin + 1

        self.am_occ = int_array([0] * (m_slots + 2))
        self.pm_occ = int_array([0] * max(pmax - pmin + 1, 1))
        self.cap_cnt = int_array([0] * max(n_caps, 1))
        self.slot_use = int_array([0] * (m_slots + 2))
        self.cur_start = int_array([0] * max(n_schools, 1))
        self.cur_am = int_array([0] * max(self.n_am, 1))
        self.cur_pm = int_array([0] * max(self.n_pm, 1))
        self.best_start = int_array([0] * max(n_schools, 1))
        self.best_am = int_array([0] * max(self.n_am, 1))
        self.best_pm = int_array([0] * max(self.n_pm, 1))

        self.n_distinct = 0
        self.found = 0
        self.timed_out = 0
        self.best_peak = best_peak_init
        self.best_sum = best_sum_init
        self.nodes = 0

    def run(self):
        rc = self._school(0, 0, 0.0)
        if rc == 2:
            self.timed_out = 1
        return rc

    def result(self):
        return {
            "found": self.found != 0,
            "timed_out": self.timed_out != 0,
            "nodes": int(self.nodes),
            "best_peak": int(self.best_peak),
            "best_sum": float(self.best_sum),
            "starts": [self.best_start[i] for i in range(self.n_schools)],
            "am": [self.best_am[i] for i in range(self.n_am)],
            "pm": [self.best_pm[i] for i in range(self.n_pm)],
        }

    @cython.cfunc
    def _tick(self) -> cython.int:
        self.nodes += 1
        if self.deadline > 0.0 and (self.nodes & 4095) == 0:
            if time.monotonic() >= self.deadline:
                return 1
        return 0

    @cython.cfunc
    def _record(self) -> cython.int:
        i: cython.int
        for i in range(self.n_schools):
            self.best_start[i] = self.cur_start[i]
        for i in range(self.n_am):
            self.best_am[i] = self.cur_am[i]
        for i in range(self.n_pm):
            self.best_pm[i] = self.cur_pm[i]
        return 0

    @cython.cfunc
    def _leaf(self, peak: cython.int, sm: cython.double) -> cython.int:
        if self.mode == 0:
            if peak < self.best_peak:
                self.best_peak = peak
                self.found = 1
                self._record()
            if self.best_peak <= self.lb:
                return 1
            return 0
        if self.mode == 1:
            self.found = 1
            self._record()
            return 1
        if sm < self.best_sum - 1e-12:
            self.best_sum = sm
            self.found = 1
            self._record()
            if sm <= self.suffix_min[0] + 1e-12:
                return 1
        return 0

    @cython.cfunc
    def _school(self, pos: cython.int, peak: cython.int, sm: cython.double) -> cython.int:
        s: cython.int
        di: cython.int
        m: cython.int
        t: cython.int
        cap: cython.int
        base: cython.int
        seed: cython.int
        rc: cython.int
        if pos == self.n_schools:
            return self._leaf(peak, sm)
        # slots every unplaced route must cover, no matter which start its
        # school picks: if one already busts the cap, the subtree is dead
        cap = self.best_peak - 1 if self.mode == 0 else self.z_cap
        base = pos * self.stride
        for t in range(1, self.m_slots + 1):
            if self.am_occ[t] + self.am_forced[base + t] > cap:
                return 0
        base = pos * self.pm_stride
        for t in range(self.pm_stride):
            if self.pm_occ[t] + self.pm_forced[base + t] > cap:
                return 0
        s = self.order[pos]
        seed = -1
        if self.mode == 1 and self.use_seed != 0:
            seed = self.seed_starts[s]
        if seed >= 0:
            rc = self._try_start(pos, s, seed, peak, sm)
            if rc == 1 or rc == 2:
                return rc
        for di in range(self.dom_off[s], self.dom_off[s + 1]):
            m = self.dom_flat[di]
            if m == seed:
                continue
            rc = self._try_start(pos, s, m, peak, sm)
            if rc == 1 or rc == 2:
                return rc
            if rc == 3:
                break
        return 0

    @cython.cfunc
    def _try_start(
        self, pos: cython.int, s: cython.int, m: cython.int,
        peak: cython.int, sm: cython.double,
    ) -> cython.int:
        val: cython.double
        d: cython.double
        ci: cython.int
        rc: cython.int
        if self._tick() != 0:
            return 2
        val = 0.0
        if self.mode == 2:
            val = self.disut[s * self.stride + m]
            # domain is sorted by disutility, so the rest cannot improve
            if sm + val + self.suffix_min[pos + 1] >= self.best_sum - 1e-12:
                return 3
        if self.mode == 1 and self.n_caps > 0:
            d = self.disut[s * self.stride + m]
            for ci in range(self.n_caps):
                if d > self.caps_theta[ci] + 1e-9 and self.cap_cnt[ci] + 1 > self.caps_k[ci]:
                    return 0
            for ci in range(self.n_caps):
                if d > self.caps_theta[ci] + 1e-9:
                    self.cap_cnt[ci] += 1
        if self.mode == 0 and self.distinct_cap > 0:
            if self.slot_use[m] == 0 and self.n_distinct >= self.distinct_cap:
                return 0
            self.slot_use[m] += 1
            if self.slot_use[m] == 1:
                self.n_distinct += 1
        self.cur_start[s] = m
        rc = self._place_am(pos, s, self.am_off[s], peak, sm + val)
        if self.mode == 0 and self.distinct_cap > 0:
            self.slot_use[m] -= 1
            if self.slot_use[m] == 0:
                self.n_distinct -= 1
        if self.mode == 1 and self.n_caps > 0:
            d = self.disut[s * self.stride + m]
            for ci in range(self.n_caps):
                if d > self.caps_theta[ci] + 1e-9:
                    self.cap_cnt[ci] -= 1
        return rc

    @cython.cfunc
    def _place_am(
        self, pos: cython.int, s: cython.int, idx: cython.int,
        peak: cython.int, sm: cython.double,
    ) -> cython.int:
        r: cython.int
        lo: cython.int
        hi: cython.int
        a: cython.int
        t: cython.int
        t0: cython.int
        mx: cython.int
        new_peak: cython.int
        ok: cython.int
        rc: cython.int
        if idx == self.am_off[s + 1]:
            return self._place_pm(pos, s, self.pm_off[s], peak, sm)
        r = self.am_dur[idx]
        lo = self.cur_start[s] - self.alpha
        if lo < 1:
            lo = 1
        hi = self.cur_start[s] - self.beta
        if idx > self.am_off[s] and self.am_dur[idx - 1] == r:
            if self.cur_am[idx - 1] > lo:
                lo = self.cur_am[idx - 1]
        for a in range(lo, hi + 1):
            if self._tick() != 0:
                return 2
            t0 = a - r + 1
            if t0 < 1:
                t0 = 1
            mx = 0
            for t in range(t0, a + 1):
                self.am_occ[t] += 1
                if self.am_occ[t] > mx:
                    mx = self.am_occ[t]
            new_peak = peak
            if mx > new_peak:
                new_peak = mx
            if self.mode == 0:
                ok = 1 if new_peak < self.best_peak else 0
            else:
                ok = 1 if new_peak <= self.z_cap else 0
            rc = 0
            if ok != 0:
                self.cur_am[idx] = a
                rc = self._place_am(pos, s, idx + 1, new_peak, sm)
            for t in range(t0, a + 1):
                self.am_occ[t] -= 1
            if rc != 0:
                return rc
        return 0

    @cython.cfunc
    def _place_pm(
        self, pos: cython.int, s: cython.int, idx: cython.int,
        peak: cython.int, sm: cython.double,
    ) -> cython.int:
        r: cython.int
        lo: cython.int
        hi: cython.int
        dep: cython.int
        t: cython.int
        t1: cython.int
        mx: cython.int
        new_peak: cython.int
        ok: cython.int
        rc: cython.int
        end: cython.int
        if idx == self.pm_off[s + 1]:
            return self._school(pos + 1, peak, sm)
        r = self.pm_dur[idx]
        end = self.cur_start[s] + self.delta[s]
        lo = end + self.lam
        hi = end + self.mu
        if hi > self.pmax:
            hi = self.pmax
        if idx > self.pm_off[s] and self.pm_dur[idx - 1] == r:
            if self.cur_pm[idx - 1] > lo:
                lo = self.cur_pm[idx - 1]
        for dep in range(lo, hi + 1):
            if self._tick() != 0:
                return 2
            t1 = dep + r - 1
            if t1 > self.pmax:
                t1 = self.pmax
            mx = 0
            for t in range(dep, t1 + 1):
                self.pm_occ[t - self.pmin] += 1
                if self.pm_occ[t - self.pmin] > mx:
                    mx = self.pm_occ[t - self.pmin]
            new_peak = peak
            if mx > new_peak:
                new_peak = mx
            if self.mode == 0:
                ok = 1 if new_peak < self.best_peak else 0
            else:
                ok = 1 if new_peak <= self.z_cap else 0
            rc = 0
            if ok != 0:
                self.cur_pm[idx] = dep
                rc = self._place_pm(pos, s, idx + 1, new_peak, sm)
            for t in range(dep, t1 + 1):
                self.pm_occ[t - self.pmin] -= 1
            if rc != 0:
                return rc
        return 0


def run_search(
    mode,
    n_schools,
    m_slots,
    pmin,
    pmax,
    alpha,
    beta,
    lam,
    mu,
    order,
    dom_flat,
    dom_off,
    delta,
    am_dur,
    am_off,
    pm_dur,
    pm_off,
    disut,
    caps_theta,
    caps_k,
    n_caps,
    z_cap,
    distinct_cap,
    seed_starts,
    use_seed,
    suffix_min,
    am_forced,
    pm_forced,
    lb,
    best_peak_init,
    best_sum_init,
    deadline,
):
    """Build, run, and read out one search. All sequences must be arrays of
    the right typecode ('i' for ints, 'd' for doubles) and non-empty."""
    search = Search(
        mode, n_schools, m_slots, pmin, pmax, alpha, beta, lam, mu,
        order, dom_flat, dom_off, delta, am_dur, am_off, pm_dur, pm_off,
        disut, caps_theta, caps_k, n_caps, z_cap, distinct_cap,
        seed_starts, use_seed, suffix_min, am_forced, pm_forced,
        lb, best_peak_init, best_sum_init, deadline,
    )
    search.run()
    return search.result()


def kernel_tag():
    """'compiled' when running as the cythonized twin, else 'pure'."""
    return "compiled" if cython.compiled else "pure"
