"""Walk through the four-variable instance, the smallest problem that shows
both faces of block selection.

The Hessian is the identity, so the optimum x = (1,1,1,1) is obvious by hand.
Picking violating pairs solves it in one parallel iteration. Solving the fixed
partition {(0,1), (2,3)} instead goes nowhere: each block holds samples of one
label only, the equality constraint pins every block subproblem to its anchor,
and the iterate never leaves the origin. Forcing the worst violating pair into
the selection breaks the deadlock immediately.
"""

from parsmo import SolverConfig, train, violation_view

from problems import four_variable_spec


def show(title, res):
    print(f"\n{title}")
    print(f"  status {res.status} after {len(res.reports)} iteration(s)")
    for r in res.reports[:5]:
        print(
            f"  k={r.k} blocks={r.blocks} alpha={r.alpha:g} "
            f"f={r.fval:.6f} gap={r.gmax - r.gmin:g}"
        )
    print(f"  x = {res.state.x}")


def main():
    spec = four_variable_spec()
    print("four samples, y = (+1,+1,-1,-1), C = 1; optimum x = (1,1,1,1), f = -2")

    pairs = train(spec, SolverConfig(q=2, eta=1e-6))
    show("two violating pairs per iteration", pairs)

    stuck = train(
        spec,
        SolverConfig(variant="blocks", block_size=2, descent_period=10**9, eta=1e-6, max_iter=100),
    )
    show("fixed partition {(0,1), (2,3)}, never forced", stuck)
    view = violation_view(spec, stuck.state, 1e-12)
    print(f"  still maximally violated: gap = {view.gmax - view.gmin:g} at pair {view.mvp}")

    freed = train(
        spec,
        SolverConfig(variant="blocks", block_size=2, descent_period=0, eta=1e-6),
    )
    show("same partition, worst pair forced every iteration", freed)


if __name__ == "__main__":
    main()
