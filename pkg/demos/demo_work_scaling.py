"""
How the work of the fast sampler grows
======================================

Count edge relaxations on random 4-regular graphs and divide by m log2 n.
A flat ratio means near-linear work.
"""
from fastckr.cli import bench_scaling, run_bench

rep = run_bench("regular", [1000, 4000, 16000, 64000], seeds=3, master=0)
print("     n       m   relaxations   /(m log2 n)   inserts/n")
fit = bench_scaling(rep)
for (n, m, relax, ins), ratio in zip(rep.sizes(), fit.ratios):
    print(f"{n:6d}  {m:6d}  {relax:12.0f}  {ratio:12.3f}  {ins / n:10.2f}")
print(f"least-squares coefficient {fit.coefficient:.3f}; growth flag {'raised' if fit.flagged else 'clear'}")
