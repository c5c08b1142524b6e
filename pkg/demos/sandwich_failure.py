"""Two ways the expected height-count sandwich breaks.

For the two-squares bundle the per-fibre constant c_t, normalized by
t^(2+alpha)/pi, should sit between positive constants if fibre counts
grew uniformly.  It does not: it vanishes for every prime t = 3 mod 4
(no lower bound), and along products of primes = 1 mod 4 it grows like
(4/3)^omega (no upper bound).  Separately, a steep enough height model
on a difference-of-squares bundle carries a section whose height tends
to zero, so even Northcott finiteness fails below height 1.

Run:  python3 demos/sandwich_failure.py
"""

from conic_census import bt_probe, northcott_probe

rep = bt_probe(alpha=1, t_max=50)

print("normalized constants tau * t^3 / pi over squarefree t <= 50:\n")
print(f"  {'t':>3}  {'omega':>5}  {'normalized':>10}  note")
for row in rep.rows:
    if row.t > 30 and row.soluble and not row.admissible:
        continue
    note = ""
    if not row.soluble:
        note = "insoluble: constant vanishes"
    elif row.admissible:
        note = f"admissible, formula {row.formula:.6f}"
    print(f"  {row.t:>3}  {row.omega:>5}  {row.normalized:>10.6f}  {note}")

print(f"\nlower bound fails at primes 3 mod 4: {rep.lower_violations}")
print(f"closed-formula agreement on admissible t: {rep.formula_max_rel_err:.2e} worst relative error\n")

print("upper bound fails along t_k = product of first k primes = 1 mod 4:")
print(f"  {'k':>2}  {'t_k':>9}  {'normalized':>11}  {'(6/pi^2)(4/3)^k':>15}")
for k, tk, value, floor in rep.growth:
    print(f"  {k:>2}  {tk:>9}  {value:>11.6f}  {floor:>15.6f}")
print(f"  strictly increasing and above the floor: {rep.growth_monotone}\n")

print("-" * 64)
nrep = northcott_probe(a=12, count=25)
print(f"\nNorthcott failure on x0^2 - x1^2 = f(y) x2^2 with weights (0, 0, {nrep.a}):")
print(f"  alpha = {nrep.alpha}, section (1 : -1 : 0) has height H(y)^{nrep.exponent}\n")
print(f"  {'y':>8}  height")
for coords, h in nrep.rows[:12]:
    print(f"  {str(coords):>8}  {h}")
print(f"\n  {nrep.unit_count} points at height exactly 1, all {len(nrep.rows)} at height <= 1;")
print("  extending the enumeration pushes arbitrarily many below any epsilon.")
