# %% [markdown]
# # Checking the guarantees on a run
#
# verify_run evaluates every inequality whose numeric hypotheses hold for the
# instance and reports the rest as "not applicable". A passing error-bound
# check certifies that the end point is within (8/n) rho of the maximizer.

# %%
from phasesync import (GpmConfig, build_instance, error_bound_to_maximizer, second_order_check,
                       solve_to_maximizer, verify_run)

n = 256
inst = build_instance(n, n ** 0.25 / 936, seed=4)
sol = solve_to_maximizer(inst, GpmConfig(step_tol=0.0, record_iterates=True))
print("label:", sol.label)
radius = error_bound_to_maximizer(sol.criticality.rho, n)
print(f"rho(z_final) = {sol.criticality.rho:.3e} -> certified radius {radius:.3e}")
print(f"smallest tangent eigenvalue = {sol.criticality.min_tangent_eig:.3f} (n = {n})")

# %%
report = verify_run(inst, sol.trace)
print(report.summary())

# %% [markdown]
# With heavy noise the hypotheses fail, so the gated checks step aside
# instead of reporting false failures.

# %%
noisy = build_instance(60, 8.0, seed=2)
loud = solve_to_maximizer(noisy, GpmConfig(record_iterates=True))
print(loud.label, second_order_check(noisy.C, loud.z).is_second_order)
for name, verdict in verify_run(noisy, loud.trace).verdicts().items():
    print(f"  {name:<26} {verdict}")
