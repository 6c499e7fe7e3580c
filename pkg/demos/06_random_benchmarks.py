"""
Lengths on random instances
===========================

On random problems the recovered length r is usually much smaller than
the number m of equations.  The benchmark harness reports the observed
values with a histogram.
"""

from momrec.cli.bench import format_table, run_bench

# moment problems with off-sphere samples: some instances are infeasible
print(format_table(run_bench(3, 3, 4, trials=20, seed=0)))
print()
# the same with samples projected onto the sphere
print(format_table(run_bench(3, 3, 4, trials=20, seed=0, sphere_samples=True)))
print()
# signed tensor recovery with planted right-hand sides
print(format_table(run_bench(3, 5, 4, trials=20, mode="trp-general", seed=0)))
