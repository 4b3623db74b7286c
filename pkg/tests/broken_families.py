"""Deliberately defective spectral families, one per validator condition.

Each fixture violates exactly one of the three family conditions while
honestly satisfying the other two at the validator's probe sets, so a
correct validator must name the one broken condition and no other.
"""

import math

import numpy as np

from dnormlab.spectral import REAL_LINE, SpectralFamily

SQRT_2PI = math.sqrt(2.0 * math.pi)


class ScaledWedgeFamily(SpectralFamily):
    """g(s, t) = 2.2 s: slices integrate to 1.1, not 1.

    Continuity holds trivially (no t dependence) and the envelope integral
    is the finite 1.1, so only the normalization condition can fail.
    """

    label = "broken_scaled_wedge"
    sup_bound = 2.2

    def slice_matrix(self, s, t):
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        inside = (s >= 0.0) & (s <= 1.0)
        return np.where(inside, 2.2 * s, 0.0)[:, None] * np.ones_like(t)[None, :]

    def descriptor(self):
        return {"type": "broken_scaled_wedge"}


class HalfSwapWedgeFamily(SpectralFamily):
    """Wedge pointing up for t < 1/2 and down from t = 1/2 on.

    Each slice is an exact density and the envelope 2 max(s, 1-s) has
    integral 3/2, but the jump across t = 1/2 has size 2|1 - 2s| at every
    refinement, so only the continuity condition can fail.
    """

    label = "broken_halfswap_wedge"
    sup_bound = 2.0

    def slice_matrix(self, s, t):
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        inside = (s >= 0.0) & (s <= 1.0)
        up = np.where(inside, 2.0 * s, 0.0)
        down = np.where(inside, 2.0 * (1.0 - s), 0.0)
        late = t >= 0.5
        return np.where(late[None, :], down[:, None], up[:, None])

    def descriptor(self):
        return {"type": "broken_halfswap_wedge"}


class RunawayShiftFamily(SpectralFamily):
    """Unit normal slices whose centers escape to infinity inside [0, 1].

    The center mu(t) = 1/|t* - t| - 1/t* (t* irrational) sweeps all of
    [0, infinity) as t approaches t*, so the true sup envelope equals the
    normal peak height on the whole right half-line and its integral
    diverges.  Every slice remains an exact density, and the jump between
    adjacent t-grid slices at any fixed probe s halves under refinement
    (near t* both straddling slices vanish at bounded s), so conditions
    (i) and (ii) hold at the probes; only envelope integrability fails,
    and it must be reported as a non-convergent integral.
    """

    label = "broken_runaway_shift"
    domain = REAL_LINE
    sup_bound = 1.0 / SQRT_2PI

    _T_STAR = 1.0 / math.sqrt(2.0)

    def _mu(self, t):
        gap = np.abs(self._T_STAR - t)
        with np.errstate(divide="ignore"):
            return np.where(gap > 0.0, 1.0 / gap - 1.0 / self._T_STAR, np.inf)

    def slice_matrix(self, s, t):
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        mu = self._mu(t)
        arg = s[:, None] - mu[None, :]
        out = np.zeros((len(s), len(t)))
        finite = np.isfinite(arg)
        out[finite] = np.exp(-0.5 * np.square(arg[finite])) / SQRT_2PI
        return out

    def envelope_values(self, s):
        # centers cover [0, inf): peak height to the right, one normal
        # profile to the left of the smallest center
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        left = np.exp(-0.5 * np.square(np.minimum(s, 0.0))) / SQRT_2PI
        return np.where(s >= 0.0, 1.0 / SQRT_2PI, left)

    def envelope_support_hint(self):
        return (-8.0, 8.0)

    def slice_support(self, t):
        mu = float(self._mu(np.asarray([t]))[0])
        if not math.isfinite(mu):
            return None
        return (mu - 12.0, mu + 12.0)

    def descriptor(self):
        return {"type": "broken_runaway_shift"}
