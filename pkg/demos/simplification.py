"""Effect of contour simplification on breakpoints, conditioning and cost.

Counts the collocation points each contour needs before u(-10; 1, 2) is
accurate to a relative 1e-8.

    python3 demos/simplification.py
"""

from rhdeform.collocation import assemble, contour_pieces, solve
from rhdeform.pipeline import finite_contour, painleve2_pipeline


def u_on(contour, n):
    return solve(assemble(finite_contour(contour), n), cond_limit=None).u_painleve2()


def points_needed(contour, ref, tol=1e-8):
    pieces = len(contour_pieces(finite_contour(contour)))
    for n in range(4, 42, 2):
        if abs(u_on(contour, n) - ref) < tol * abs(ref):
            return n, n * pieces
    return None, None


def main() -> None:
    res = painleve2_pipeline(-10, 1, 2)
    opt, simp = res.stage("lensed2"), res.stage("simplified")
    ref = u_on(opt.rhp, 48)
    for s in (opt, simp):
        n, total = points_needed(s.rhp, ref)
        print(f"{s.name:>10}: {s.rhp.breakpoint_count():4d} breakpoints, kappa {s.kappa:8.3g}, "
              f"n = {n} per piece, {total} collocation points")


if __name__ == "__main__":
    main()
