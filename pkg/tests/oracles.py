"""Independent reference implementations used to cross-check the package.

Everything here is written from the defining formulas, deliberately
avoiding the package's own computational shortcuts (FFT convolution,
banded solves, closed-form spectra) so agreement is meaningful.
"""

import numpy as np
from numpy.polynomial import Polynomial

BETA_L = {
    # characteristic roots beta_n * L of the Euler-Bernoulli frequency
    # equations, standard tabulated values
    "pinned-pinned": lambda n: n * np.pi,
    "clamped-free": lambda n: (1.8751040687119611, 4.6940911329741746,
                               7.8547574382376126)[n - 1],
    "clamped-clamped": lambda n: (4.7300407448627040, 7.8532046240958376,
                                  10.995607838001671)[n - 1],
}


def analytic_beam_frequencies(modulus, inertia, density, area, length,
                              boundary="pinned-pinned", n_modes=3):
    """f_n = (beta_n L)^2 / (2 pi L^2) * sqrt(EI / rho A)."""
    root = BETA_L[boundary]
    c = np.sqrt(modulus * inertia / (density * area)) / (2.0 * np.pi * length**2)
    return np.array([root(n) ** 2 * c for n in range(1, n_modes + 1)])


def testfn_poly(p, m, deriv, h):
    """Sampled derivative of (1 - (y/c)^2)^p via expanded polynomials."""
    poly = Polynomial([1.0, 0.0, -1.0]) ** p
    for _ in range(deriv):
        poly = poly.deriv()
    u = np.arange(-m, m + 1, dtype=float) / m
    return poly(u) / (m * h) ** deriv


def dense_weak_system(grid, library, basis, scales=(1.0, 1.0, 1.0),
                      query_points=None):
    """Direct-summation weak-form assembly.

    Every entry is an explicit windowed sum
        (-1)^(i+k) * (X/N_x) * (T/N_t) * sum_ab W^q[ix+a, it+b]
                     * phi_x^(i)(a h_x) * phi_t^(k)(b h_t)
    on the scaled field and axes.  No convolution theorems involved.
    """
    gw, gx, gt = scales
    w = gw * grid.values
    h_x = gx * grid.dx
    h_t = gt * grid.dt
    n_x, n_t = grid.values.shape
    m_x, m_t = basis.m_x, basis.m_t
    weight = (gx * grid.x_extent / n_x) * (gt * grid.t_extent / n_t)

    if query_points is None:
        xs = np.arange(m_x, n_x - m_x, basis.s_x)
        ts = np.arange(m_t, n_t - m_t, basis.s_t)
        query_points = np.array([(ix, it) for ix in xs for it in ts])

    def phix(i):
        return testfn_poly(basis.p_x, m_x, i, h_x)

    def phit(k):
        return testfn_poly(basis.p_t, m_t, k, h_t)

    def inner(term, ix, it):
        window = w[ix - m_x : ix + m_x + 1, it - m_t : it + m_t + 1] ** term.power
        fx = phix(term.dx_order)
        ft = phit(term.dt_order)
        sign = (-1.0) ** (term.dx_order + term.dt_order)
        return sign * weight * np.einsum("ab,a,b->", window, fx, ft)

    K = len(query_points)
    b = np.array([inner(library.lhs, ix, it) for ix, it in query_points])
    G = np.empty((K, library.n_terms))
    for j, term in enumerate(library.terms):
        G[:, j] = [inner(term, ix, it) for ix, it in query_points]
    return G, b, np.asarray(query_points)
