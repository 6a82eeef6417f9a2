# %% [markdown]
# # W-entropy and the NIW identity
#
# On the model Gaussian path the W-entropy vanishes identically.  On a
# weighted line with m = 3 > n = 1 the potential term carries a sign that
# only one convention makes consistent with the second derivative of the
# entropy power; `resolve_w_sign` finds it numerically.
#
# Run with `python notebooks/03_w_entropy.py`.

# %%
import numpy as np

from wasserlab import (check_niw, load_config, prepare, resolve_w_sign, w_entropy_profile)

(_, path, params, series), = prepare(load_config("model-gaussian"))
w, rep = w_entropy_profile(series, path, params)
print(f"model Gaussian: max |W_1| = {np.max(np.abs(w.Wm)):.2e}")

# %%
(_, path, params, series), = prepare(load_config("weighted-m3"))
for sign in ("plus", "minus"):
    w, rep = w_entropy_profile(series, path, params, w_sign=sign)
    niw = check_niw(series, w, params)
    print(f"sign {sign:5s}: NIW {niw.verdict}, residual {niw.max_residual:.2e}, "
          f"dW/dt <= {np.max(w.dWm):.3f}")
print("consistent sign:", resolve_w_sign(series, path, params))
