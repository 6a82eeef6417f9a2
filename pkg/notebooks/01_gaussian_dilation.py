# %% [markdown]
# # Gaussian dilation: an equality case
#
# On the flat line the displacement interpolation from N(0, 1) to N(0, 4) is
# the dilation x -> (1 + t) x.  Its entropy is H(t) = log(1 + t) + const, so
# -H'' = H'^2 exactly: the entropy dissipation inequality with m = 1, K = 0
# is saturated and the entropy power N_1 = exp(H) is affine in t.
#
# Run with `python notebooks/01_gaussian_dilation.py`.

# %%
import numpy as np

from wasserlab import check_edi_epdi, check_power_bound, load_config, prepare, rigidity_probe

(label, path, params, series), = prepare(load_config("gaussian-dilation"))
print(f"engine {label}, W2 distance {path.theta:.8f}")

# %% [markdown]
# The analytic dissipation formulas give H' = I and -H'' = int Gamma_2 rho.
# Compare them with 1/(1 + t) and 1/(1 + t)^2.

# %%
t = series.times
print("max |I - 1/(1+t)|        ", np.max(np.abs(series.I - 1 / (1 + t))))
print("max |Gamma2 - 1/(1+t)^2| ", np.max(np.abs(series.gamma2_rho - 1 / (1 + t) ** 2)))
print("max |dH_fd - I|          ", np.max(np.abs(series.dH - series.I)))

# %% [markdown]
# The EDI margin vanishes, so the verdict is "equality", and the rigidity
# probe confirms the Hessian soliton structure.

# %%
edi, epdi = check_edi_epdi(series, params, path.theta)
print(edi.check_id, edi.verdict, f"min margin {edi.min_margin:.2e}")
print(epdi.check_id, epdi.verdict, f"min margin {epdi.min_margin:.2e}")
print(rigidity_probe(path, series, params, edi))

# %%
bound = check_power_bound(series, params, path.theta)
print(bound.check_id, bound.verdict, f"ODE agreement {bound.diagnostics['ode_agreement']:.1e}")
