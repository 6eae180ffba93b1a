"""Trace how the iteration count falls as more pairs are solved per round.

One run per q in {1, 2, 4, 8} on a 2000-sample problem, all against the same
tight reference objective. More simultaneous pairs means fewer outer
iterations to reach a given relative error; the per-iteration cost grows, so
the sweet spot depends on how expensive a kernel column is to compute.
"""

import time

from parsmo import SolverConfig, relative_error, train

from problems import onehot_spec

TARGETS = (1e-1, 1e-2, 1e-3)


def first_hit(reports, fstar, target):
    for r in reports:
        if relative_error(r.fval, fstar) <= target:
            return r.k
    return None


def main():
    spec = onehot_spec()
    print(f"n = {spec.n}, gaussian kernel, C = {spec.C}; reference run at eta = 1e-8 ...")
    ref = train(spec, SolverConfig(q=1, eta=1e-8, cache_capacity=500))
    fstar = ref.state.fval
    print(f"reference objective {fstar:.10f} ({len(ref.reports)} iterations)\n")

    header = f"{'q':>3} {'iters':>6} {'seconds':>8}" + "".join(f"{f'RE<={t:g}':>10}" for t in TARGETS)
    print(header)
    for q in (1, 2, 4, 8):
        started = time.perf_counter()
        res = train(spec, SolverConfig(q=q, eta=1e-6, cache_capacity=500))
        elapsed = time.perf_counter() - started
        hits = [first_hit(res.reports, fstar, t) for t in TARGETS]
        cells = "".join(f"{'-' if h is None else h:>10}" for h in hits)
        print(f"{q:>3} {len(res.reports):>6} {elapsed:>8.2f}{cells}")


if __name__ == "__main__":
    main()
