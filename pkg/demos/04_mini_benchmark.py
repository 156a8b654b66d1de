#
# A miniature benchmark through the library API: two seeded instances,
# three algorithms, deterministic iteration budgets, one table.  The CLI
# (`fendec bench`) wraps the same loop with CSV output and plots.
#
# Usage:
#
# $ python demos/04_mini_benchmark.py
#

from fendec import GenConfig, SfdOptions, direct_solve, generate, instance_name, sfd_solve

header = f"{'instance':12s} {'algorithm':9s} {'objective':>12s} {'gap%':>9s} {'mips':>6s} {'cuts':>5s}"
print(header)
print("-" * len(header))

for tag in "ab":
    cfg = GenConfig(n1=6, n2=5, m1=5, m2=5, scenarios=5, seed=9, tag=tag)
    program = generate(cfg)
    results = {
        "sfd": sfd_solve(program, SfdOptions(use_reduction=False, max_iterations=40)),
        "sfd-r": sfd_solve(program, SfdOptions(use_reduction=True, max_iterations=40)),
        "direct": direct_solve(program),
    }
    for alg, res in results.items():
        print(f"{instance_name(cfg):12s} {alg:9s} {res.objective:12.4f} "
              f"{res.gap_pct:9.2e} {res.mips_solved:6d} {res.fenchel_cuts:5d}")
