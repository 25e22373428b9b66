import numpy as np


def multiset_close(got, want, tol=1e-10) -> bool:
    """Compare complex multisets up to tol, robust to roundoff reordering.

    Plain lexicographic complex sorting mispairs conjugate eigenvalues whose
    real parts differ only by noise; sorting on rounded keys avoids that.
    """
    got = np.asarray(got, dtype=complex).reshape(-1)
    want = np.asarray(want, dtype=complex).reshape(-1)
    if got.shape != want.shape:
        return False
    key = lambda z: (np.round(z.real, 8), np.round(z.imag, 8))
    gs = sorted(got, key=key)
    ws = sorted(want, key=key)
    return max(abs(a - b) for a, b in zip(gs, ws)) <= tol
