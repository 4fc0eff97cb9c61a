"""Gaussian stealthiness and destructiveness metrics.

For a zero-mean attack with covariance T against measurements with
covariance sigma_yy and precision S = sigma_yy^-1:

    kl = 1/2 ( -log|I + S^1/2 T S^1/2| + tr(S^1/2 T S^1/2) )

is the divergence between attacked and clean measurement distributions (the
detectability proxy), and

    mi = 1/2 log|I + U^1/2 (sigma2 I + T)^-1 U^1/2|,   U = H sigma_xx H^T,

is the information the operator still obtains about the states.  Both are
reported in nats.  Log-determinants are evaluated from eigenvalues of the
symmetrized inner matrices, which stays robust as T approaches the PSD
boundary.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .attack_engine import attack_covariances, IncompletenessSpec
from .errors import DomainError, NotPSDError, SingularityError

# Negative eigenvalues above the error threshold are treated as roundoff and
# clamped; below it the matrix is genuinely indefinite and surfaced.
PSD_ERROR_SCALE = 1e-6
PSD_CLAMP_SCALE = 1e-9


@dataclass(frozen=True)
class MetricsPoint:
    """KL divergence and mutual information (nats) plus their optima."""

    kl: float
    mi: float
    kl_opt: float
    mi_opt: float


def _checked_eigvals(mat, context):
    """Eigenvalues of a symmetric matrix, clamped to the PSD cone."""
    w = np.linalg.eigvalsh((mat + mat.T) / 2.0)
    scale = max(1.0, float(w[-1]))
    if w[0] < -PSD_ERROR_SCALE * scale:
        raise NotPSDError(
            f"{context}: min eigenvalue {w[0]:.3e} below -{PSD_ERROR_SCALE:g}*scale"
        )
    return np.clip(w, 0.0, None)


def sym_sqrt(mat):
    """Symmetric PSD square root via eigendecomposition.

    Small negative eigenvalues (roundoff) are clamped to zero before
    rooting; genuinely indefinite input raises :class:`NotPSDError`.
    """
    mat = np.asarray(mat, dtype=float)
    asym = np.abs(mat - mat.T).max() if mat.size else 0.0
    if asym > 1e-10 * max(1.0, np.abs(mat).max()):
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    sym = (mat + mat.T) / 2.0
    w, v = np.linalg.eigh(sym)
    scale = max(1.0, float(w[-1]))
    if w[0] < -PSD_ERROR_SCALE * scale:
        raise NotPSDError(
            f"min eigenvalue {w[0]:.3e} below -{PSD_ERROR_SCALE:g}*scale"
        )
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return (root + root.T) / 2.0


def kl_divergence(precision, cov_attack, *, precision_sqrt=None):
    """Divergence between attacked and clean measurement distributions.

    ``precision`` is the inverse clean-measurement covariance; a cached
    square root can be supplied to amortize sweeps.
    """
    s_half = sym_sqrt(precision) if precision_sqrt is None else precision_sqrt
    inner = s_half @ cov_attack @ s_half
    lam = _checked_eigvals(inner, "kl divergence inner matrix")
    kl = 0.5 * float(np.sum(lam - np.log1p(lam)))
    return 0.0 if -1e-12 <= kl < 0.0 else kl


def mutual_information(cov_signal, cov_attack, sigma2, *, signal_sqrt=None):
    """Information the operator obtains from attacked measurements."""
    if sigma2 <= 0.0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    u_half = sym_sqrt(cov_signal) if signal_sqrt is None else signal_sqrt
    m = u_half.shape[0]
    noisy = cov_attack + sigma2 * np.eye(m)
    try:
        cho = scipy.linalg.cho_factor((noisy + noisy.T) / 2.0)
    except scipy.linalg.LinAlgError as exc:
        raise SingularityError(f"sigma2 I + T not PD: {exc}") from None
    inner = u_half @ scipy.linalg.cho_solve(cho, u_half)
    lam = _checked_eigvals(inner, "mutual information inner matrix")
    return 0.5 * float(np.sum(np.log1p(lam)))


def integrity_cost(cov_attack, stats):
    """Attacker's objective: information leakage plus detectability.

    Convex in the attack covariance with minimum at cov_signal, the optimal
    complete-information attack.
    """
    return (
        mutual_information(stats.cov_signal, cov_attack, stats.sigma2)
        + kl_divergence(stats.sigma_yy_inv, cov_attack)
    )


def optimal_metrics(model, stats):
    """(kl, mi) of the complete-information attack (zero ratio vector)."""
    art = attack_covariances(model, stats, IncompletenessSpec.uniform(model.l, 0.0))
    t0 = art.cov_via_delta
    return (
        kl_divergence(stats.sigma_yy_inv, t0),
        mutual_information(stats.cov_signal, t0, stats.sigma2),
    )


def evaluate(model, stats, spec, *, baseline=None):
    """Metrics of the incomplete-information attack described by ``spec``.

    ``baseline`` is the (kl_opt, mi_opt) pair; pass a precomputed one when
    evaluating many specs against the same scenario.
    """
    art = attack_covariances(model, stats, spec)
    t = art.cov_via_delta
    kl = kl_divergence(stats.sigma_yy_inv, t)
    mi = mutual_information(stats.cov_signal, t, stats.sigma2)
    if baseline is None:
        baseline = optimal_metrics(model, stats)
    return MetricsPoint(kl=kl, mi=mi, kl_opt=baseline[0], mi_opt=baseline[1])
