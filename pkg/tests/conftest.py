import numpy as np


def assert_spectrum_close(got, expected, tol=1e-9):
    """Multiset comparison of spectra by greedy nearest matching.

    Plain lexicographic sorting misorders degenerate eigenvalues whose real
    parts tie only up to rounding noise, so tolerance-aware matching is used
    instead.
    """
    got = list(np.asarray(got, dtype=complex))
    expected = list(np.asarray(expected, dtype=complex))
    assert len(got) == len(expected)
    for v in expected:
        dists = [abs(w - v) for w in got]
        j = int(np.argmin(dists))
        assert dists[j] <= tol, (
            f"no match for {v} within {tol}; nearest {got[j]} at {dists[j]:.3e}")
        got.pop(j)
