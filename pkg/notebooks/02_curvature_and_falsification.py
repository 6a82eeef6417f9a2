# %% [markdown]
# # Curvature lower bounds along geodesics
#
# On the round sphere (K = 1) the entropy is strictly more concave than on
# the line, and every comparison check passes with room to spare.  On the
# hyperbolic plane, checking against K = 0 is a wrong claim: the EDI margin
# turns negative, which shows the checks are not vacuous.
#
# Run with `python notebooks/02_curvature_and_falsification.py`.

# %%
from wasserlab import check_edi_epdi, check_jacobian, check_sturm, load_config, prepare

(_, sphere, params, series), = prepare(load_config("sphere-K1"))
edi, _ = check_edi_epdi(series, params, sphere.theta)
print(f"sphere K = {params.K}: EDI {edi.verdict}, min margin {edi.min_margin:.4f}")

# %% [markdown]
# Sturm's inequality for S_N' and the concavity of the Jacobian J^{1/N}
# along the transport rays, for several dimensions.

# %%
for N in (2, 3, 5):
    s = check_sturm(sphere, params, N)
    j = check_jacobian(sphere, params, N)
    print(f"N = {N}: sturm {s.verdict} ({s.min_margin:.2e}), jacobian {j.verdict} "
          f"({j.min_margin:.2e})")

# %%
(_, hyp, params, series), = prepare(load_config("falsification-hyperbolic"))
edi, _ = check_edi_epdi(series, params, hyp.theta)
print(f"hyperbolic checked at K = {params.K}: EDI {edi.verdict}, "
      f"min margin {edi.min_margin:.4f}")
