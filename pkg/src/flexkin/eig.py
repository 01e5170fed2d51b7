"""Dense symmetric generalized eigensolver and Rayleigh-quotient utilities.

The eigenproblem  k phi = lambda W phi  with diagonal positive W is reduced
to standard form through W^(-1/2), solved with the LAPACK symmetric QR
driver (tridiagonalization plus implicit shifts), and the eigenvectors are
mapped back, which makes them W-orthonormal.  Everything is deterministic:
equal inputs give bit-equal outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import DofMetric, ModalBasis, StiffnessMatrix, _as_vector
from .errors import InvalidArgumentError, ModelSingularError

#: Eigenvalues at or below this fraction of the largest one count as zero.
SINGULAR_RTOL = 1e-12


def rayleigh_quotient(k: StiffnessMatrix, metric: DofMetric, u) -> float:
    """Energy measure  (u^T k u) / (u^T W u)  of a displacement field.

    Invariant under scaling of ``u``; equals the i-th eigenvalue when ``u``
    is the i-th eigenvector.
    """
    if metric.n != k.n:
        raise InvalidArgumentError(
            f"metric size {metric.n} does not match matrix size {k.n}"
        )
    v = _as_vector(u, k.n, "displacement")
    denom = float((v * metric.diag) @ v)
    if denom == 0.0:
        raise InvalidArgumentError("Rayleigh quotient of the zero vector is undefined")
    return float(v @ k.values @ v) / denom


def eig_sym(k: StiffnessMatrix, metric: DofMetric) -> ModalBasis:
    """Full ascending spectrum of  k phi = lambda W phi.

    Eigenvectors are W-orthonormal and follow a deterministic sign
    convention: the largest-magnitude entry of each vector is positive,
    ties resolved to the lowest index.

    Raises :class:`ModelSingularError` if any eigenvalue falls at or below
    ``SINGULAR_RTOL`` times the largest one.
    """
    if metric.n != k.n:
        raise InvalidArgumentError(
            f"metric size {metric.n} does not match matrix size {k.n}"
        )
    inv_sqrt = 1.0 / np.sqrt(metric.diag)
    a = inv_sqrt[:, None] * k.values * inv_sqrt[None, :]
    a = 0.5 * (a + a.T)
    eigenvalues, y = scipy.linalg.eigh(a, driver="ev")
    vectors = inv_sqrt[:, None] * y

    top = eigenvalues[-1]
    if top <= 0.0:
        raise ModelSingularError(
            "matrix is not positive definite: the whole spectrum is non-positive "
            "(mode 1 is a zero-energy mode)",
            mode_index=1,
        )
    bad = np.nonzero(eigenvalues <= SINGULAR_RTOL * top)[0]
    if bad.size:
        idx = int(bad[0]) + 1
        raise ModelSingularError(
            f"matrix is not positive definite: mode {idx} has eigenvalue "
            f"{eigenvalues[bad[0]]:g} at or below the numerical zero "
            f"({SINGULAR_RTOL:g} of max eigenvalue {top:g})",
            mode_index=idx,
        )

    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0.0:
            vectors[:, j] = -col
    return ModalBasis(eigenvalues=eigenvalues, eigenvectors=vectors, metric=metric)


@dataclass(frozen=True)
class CertificateReport:
    """Monte-Carlo check that no sampled quotient undercuts the first
    eigenvalue (minimum-energy property of the first eigenvector)."""

    seed: int
    samples: int
    lambda1: float
    min_quotient: float
    bound: float
    passed: bool


def min_rayleigh_certificate(
    k: StiffnessMatrix,
    metric: DofMetric,
    basis: ModalBasis,
    samples: int,
    seed: int = 0,
) -> CertificateReport:
    """Evaluate the Rayleigh quotient on ``samples`` random unit vectors.

    Every sample must stay at or above ``lambda_1 - 1e-10 * lambda_1``; the
    sampled minimum and the outcome are returned.  The generator seed is part
    of the report so the certificate is reproducible.
    """
    samples = int(samples)
    if samples < 1:
        raise InvalidArgumentError(f"samples must be >= 1, got {samples}")
    if basis.n != k.n or metric.n != k.n:
        raise InvalidArgumentError("matrix, metric and basis sizes must agree")

    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, k.n))
    norms = np.linalg.norm(x, axis=1)
    norms[norms == 0.0] = 1.0
    x /= norms[:, None]

    num = np.einsum("ij,jk,ik->i", x, k.values, x)
    den = np.einsum("ij,j,ij->i", x, metric.diag, x)
    quotients = num / den

    lam1 = float(basis.eigenvalues[0])
    bound = lam1 - 1e-10 * lam1
    min_q = float(quotients.min())
    return CertificateReport(
        seed=int(seed),
        samples=samples,
        lambda1=lam1,
        min_quotient=min_q,
        bound=bound,
        passed=bool(min_q >= bound),
    )
