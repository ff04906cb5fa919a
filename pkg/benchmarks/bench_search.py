"""Compare the compiled search kernel against the pure-Python twin.

Both kernels run the identical branch-and-bound decision probe, capped by a
wall-clock budget tight enough that neither finishes, so the printed
nodes/second figures measure raw search throughput. Run from the repository
root after an editable install:

    python3 benchmarks/bench_search.py [--schools N] [--am-routes R] [--budget S]
"""

import argparse
import importlib
import sys
import time

import bellsched as bs
from bellsched.engine import _Problem, _run_kernel, lower_bound, start_domains


def _load_kernels():
    pure = importlib.import_module("bellsched.engine._search")
    kernels = [("pure", pure)]
    try:
        compiled = importlib.import_module("bellsched.engine._search_c")
    except ImportError:
        compiled = None
    if compiled is not None and compiled.kernel_tag() == "compiled":
        kernels.append(("compiled", compiled))
    return kernels


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--schools", type=int, default=6)
    ap.add_argument("--am-routes", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=float, default=10.0,
                    help="seconds per kernel (default 10)")
    args = ap.parse_args(argv)

    inst = bs.generate_instance(
        bs.GeneratorSpec(scenario="III", schools=args.schools,
                         am_routes=args.am_routes),
        seed=args.seed,
    )
    domains, _ = start_domains(inst)
    problem = _Problem(inst, domains)

    # probing at the combinatorial lower bound keeps both kernels busy for
    # the whole budget on any instance this size
    z_cap = max(lower_bound(inst, domains), 1)

    print(f"instance: scenario III, {args.schools} schools, "
          f"{args.am_routes}+{args.am_routes} routes, seed {args.seed}")
    print(f"decision probe at z_cap={z_cap}, budget {args.budget:.1f}s per kernel")
    print()

    rates = {}
    for tag, mod in _load_kernels():
        t0 = time.time()
        res = _run_kernel(
            problem, 1, z_cap=z_cap,
            deadline=time.monotonic() + args.budget,
            kernel=mod,
        )
        dt = time.time() - t0
        rate = res["nodes"] / dt if dt > 0 else float("inf")
        rates[tag] = rate
        if res["found"]:
            state = "found a schedule"
        elif res["timed_out"]:
            state = "time limit"
        else:
            state = "exhausted"
        print(f"{tag:>9}: {res['nodes']:>14,} nodes in {dt:6.2f}s "
              f"= {rate:12,.0f} nodes/s ({state})")

    if "compiled" in rates and rates.get("pure", 0) > 0:
        print()
        print(f"speedup: {rates['compiled'] / rates['pure']:.1f}x")
    elif "compiled" not in rates:
        print()
        print("compiled kernel not built; reinstall with Cython to compare")
    return 0


if __name__ == "__main__":
    sys.exit(main())
