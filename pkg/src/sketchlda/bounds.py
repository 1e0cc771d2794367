"""Mean-squared prediction error bounds for sketched LDA.

All matrix quantities (condition number, Frobenius norm, residual) refer to
the augmented training design whose first column is all ones.  The expected
squared spectral norm of the new-data block enters every bound as a plain
multiplier; see :func:`estimate_spectral_norm_sq` for ways to supply it.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BoundInvalidError, ValidationError
from .lda_rk import LEVERAGE, ROW_WEIGHT, UNIFORM, canonical_scheme
from .linalg import as_matrix, as_vector, pinv_gram_norm, scaled_condition_number, \
    solve_least_squares, spectral_norm_sq

PLUG_IN = "plug_in"
GAUSSIAN_ASYMPTOTIC = "gaussian_asymptotic"


@dataclass(frozen=True)
class BoundInputs:
    kappa: float
    frob_sq: float
    alpha_tilde: float
    r_star: float
    exp_xtilde_sq: float
    eps0: float
    n: int
    p: int

    @property
    def r(self):
        return self.r_star / self.frob_sq


class RateHorizon(NamedTuple):
    rate_factor: float
    horizon: float


def alpha_lower_bound(X, scheme, n_features):
    """Lower bound on ``||x_i||^2 / p_i`` for the given sampling scheme."""
    scheme = canonical_scheme(scheme)
    X = as_matrix(X)
    if scheme == ROW_WEIGHT:
        return float(np.sum(X * X))
    if scheme == UNIFORM:
        return float(X.shape[0] * np.min(np.einsum("ij,ij->i", X, X)))
    return float(n_features / pinv_gram_norm(X))


def bound_inputs(X, y, scheme, exp_xtilde_sq, beta0=None, intercept=True) -> BoundInputs:
    """Collect every quantity the bounds need from an (augmented) design."""
    X = as_matrix(X)
    y = as_vector(y, "y")
    n, d = X.shape
    p = d - 1 if intercept else d
    beta_hat = solve_least_squares(X, y)
    resid = X @ beta_hat - y
    b0 = np.zeros(d) if beta0 is None else as_vector(beta0, "beta0")
    return BoundInputs(
        kappa=scaled_condition_number(X),
        frob_sq=float(np.sum(X * X)),
        alpha_tilde=alpha_lower_bound(X, scheme, p),
        r_star=float(resid @ resid),
        exp_xtilde_sq=float(exp_xtilde_sq),
        eps0=float(np.sum((b0 - beta_hat) ** 2)),
        n=n,
        p=p,
    )


def _theorem1_parts(inputs: BoundInputs, c):
    """``(decrement, horizon)`` with contraction factor ``1 - decrement``."""
    slack = 1.0 - c / inputs.alpha_tilde * inputs.frob_sq
    if not c > 0:
        raise BoundInvalidError(f"step size must be positive, got {c}")
    if not slack > 0:
        raise BoundInvalidError(
            f"step size {c} violates c < alpha_tilde / ||X||_F^2 = "
            f"{inputs.alpha_tilde / inputs.frob_sq:.6g}"
        )
    decrement = 2.0 * c / inputs.kappa * slack
    horizon = c / inputs.alpha_tilde * inputs.kappa / slack * inputs.exp_xtilde_sq * inputs.r_star
    return decrement, horizon


def _decay(decrement, k):
    # (1 - d)^k without losing d when it is below machine epsilon
    if k == 0:
        return 1.0
    if decrement >= 1.0:
        return (1.0 - decrement) ** k
    return math.exp(k * math.log1p(-decrement))


def theorem1_components(inputs: BoundInputs, c) -> RateHorizon:
    """Per-iteration contraction factor and additive horizon of the general bound."""
    decrement, horizon = _theorem1_parts(inputs, c)
    return RateHorizon(1.0 - decrement, horizon)


def theorem1_bound(inputs: BoundInputs, c, k):
    """Upper bound on ``E ||Xt b_k - Xt b_LS||^2`` after ``k`` iterations."""
    decrement, horizon = _theorem1_parts(inputs, c)
    return _decay(decrement, k) * inputs.exp_xtilde_sq * inputs.eps0 + horizon


def _corollary_parts(inputs: BoundInputs, scheme, c):
    scheme = canonical_scheme(scheme)
    kap, E, r = inputs.kappa, inputs.exp_xtilde_sq, inputs.r
    if not c > 0:
        raise BoundInvalidError(f"step size must be positive, got {c}")
    if scheme == ROW_WEIGHT:
        if not c < 1:
            raise BoundInvalidError(f"row-weight sampling needs c < 1, got {c}")
        return 2.0 * c * (1.0 - c) / kap, c / (1.0 - c) * kap * E * r
    if scheme == UNIFORM:
        limit = min(1.0, inputs.n / kap)
        if not c < limit:
            raise BoundInvalidError(f"uniform sampling needs c < min(1, n/kappa) = {limit:.6g}, got {c}")
        q = c / inputs.n * kap
        return 2.0 * c * (1.0 / kap - c / inputs.n), q / (1.0 - q) * kap * E * r
    limit = inputs.p / kap
    if not c < limit:
        raise BoundInvalidError(f"leverage sampling needs c < p/kappa = {limit:.6g}, got {c}")
    return 2.0 * c / kap * (1.0 - c * kap / inputs.p), c * kap / (inputs.p - c * kap) * kap * E * r


def horizon_and_rate(inputs: BoundInputs, scheme, c) -> RateHorizon:
    """Scheme-specific contraction factor and horizon."""
    decrement, horizon = _corollary_parts(inputs, scheme, c)
    return RateHorizon(1.0 - decrement, horizon)


def corollary_bound(inputs: BoundInputs, scheme, c, k):
    decrement, horizon = _corollary_parts(inputs, scheme, c)
    return _decay(decrement, k) * inputs.exp_xtilde_sq * inputs.eps0 + horizon


class Prescription(NamedTuple):
    step_size: float
    iterations: int


def prescribe(inputs: BoundInputs, eps) -> Prescription:
    """Step size and iteration count that push the general bound below ``eps``."""
    if not eps > 0:
        raise ValidationError(f"tolerance must be positive, got {eps}")
    kap, E, rs, F = inputs.kappa, inputs.exp_xtilde_sq, inputs.r_star, inputs.frob_sq
    c = eps * inputs.alpha_tilde / (2.0 * kap * E * rs + 2.0 * eps * F)
    if inputs.eps0 == 0.0:
        return Prescription(c, 0)
    ratio = 2.0 * inputs.eps0 * E / eps
    if ratio <= 1.0:
        return Prescription(c, 0)
    factor = 2.0 * kap * (kap * E * rs + eps * F) ** 2 / (eps * inputs.alpha_tilde * (2.0 * kap * E * rs + eps * F))
    k = int(math.ceil(math.log(ratio) * factor))
    if theorem1_bound(inputs, c, k) > eps:
        # the closed form is tight up to rounding; solve the evaluated bound instead
        decrement, horizon = _theorem1_parts(inputs, c)
        room = eps - horizon
        if room > 0 and 0 < decrement < 1:
            k = max(k, int(math.ceil(math.log(room / (E * inputs.eps0)) / math.log1p(-decrement))))
        for _ in range(1000):
            if theorem1_bound(inputs, c, k) <= eps:
                break
            k += max(1, k >> 40)
    return Prescription(c, k)


def estimate_spectral_norm_sq(source, mode=PLUG_IN):
    """Estimate ``E ||Xt||_2^2`` for new data.

    ``plug_in`` takes the realised block and returns its squared spectral
    norm.  ``gaussian_asymptotic`` takes ``(N, p)`` and returns
    ``N (1 + sqrt(p/N))^2``, the limit for i.i.d. standard normal entries.
    """
    if mode == PLUG_IN:
        return spectral_norm_sq(source)
    if mode == GAUSSIAN_ASYMPTOTIC:
        if isinstance(source, np.ndarray):
            N, p = source.shape
        else:
            N, p = source
        if not 1 <= p <= N:
            raise ValidationError(f"asymptotic estimate needs 1 <= p <= N, got N={N}, p={p}")
        return float(N * (1.0 + math.sqrt(p / N)) ** 2)
    raise ValidationError(f"unknown estimation mode {mode!r}")
