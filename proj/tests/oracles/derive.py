"""Independent oracle for frozen test values.

Uses SciPy only: ODE shooting for radial ground states, second-order finite
differences on the full line for the linearized operators, dense generalized
eigenproblems for the constrained coercivity minimum. Nothing here touches the
C++ library. Prints the values that tests/oracle_values.hpp freezes.
"""
import json

import numpy as np
from scipy import integrate, linalg, optimize


def townes_eta0():
    # eta'' + eta'/r = eta - eta^3 in d = 2; find eta(0) whose orbit decays.
    def shoot(e0):
        def rhs(r, y):
            return [y[1], y[0] - y[0] ** 3 - (y[1] / r if r > 0 else 0.0)]

        def crossed(r, y):
            return y[0]

        def rising(r, y):
            return y[1]

        crossed.terminal = True
        rising.terminal = True
        r0 = 1e-8
        y0 = [e0 + 0.25 * (e0 - e0 ** 3) * r0 ** 2, 0.5 * (e0 - e0 ** 3) * r0]
        sol = integrate.solve_ivp(rhs, [r0, 30.0], y0, events=[crossed, rising], rtol=1e-12, atol=1e-14)
        return 1.0 if sol.t_events[0].size else -1.0

    lo, hi = 2.0, 2.5
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if shoot(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def line_operators(n, L):
    x = np.linspace(-L, L, n + 2)[1:-1]
    h = x[1] - x[0]
    eta = np.sqrt(2.0) / np.cosh(x)
    lap_d = np.full(n, 2.0 / h**2)
    lap_o = np.full(n - 1, -1.0 / h**2)
    return x, h, eta, lap_d, lap_o


def poschl_teller(n=6000, L=30.0):
    x, h, eta, d, o = line_operators(n, L)
    l1 = linalg.eigh_tridiagonal(d + 1.0 - 3.0 * eta**2, o, select="i", select_range=(0, 2))[0]
    l2 = linalg.eigh_tridiagonal(d + 1.0 - eta**2, o, select="i", select_range=(0, 1))[0]
    return l1.tolist(), l2.tolist()


def coercivity(n, L=25.0):
    x, h, eta, d, o = line_operators(n, L)
    lap = np.diag(d) + np.diag(o, 1) + np.diag(o, -1)
    eye = np.eye(n)
    deta = -np.sqrt(2.0) * np.tanh(x) / np.cosh(x)
    dmu = 0.5 * (eta + x * deta)  # scaling derivative of sqrt(2 mu) sech(sqrt(mu) x) at mu = 1
    gram = lap + eye
    best = np.inf
    for pot, cons in ((3.0 * eta**2, [eta, x * eta]), (eta**2, [deta, dmu])):
        A = lap + eye - np.diag(pot)
        Q = linalg.null_space(np.array(cons))
        vals = linalg.eigh(Q.T @ A @ Q, Q.T @ gram @ Q, eigvals_only=True, subset_by_index=[0, 0])
        best = min(best, vals[0])
    unconstrained = linalg.eigh(lap + eye - np.diag(3.0 * eta**2), gram, eigvals_only=True, subset_by_index=[0, 0])[0]
    return best, unconstrained


def sech_integrals():
    f = lambda t: 2.0 / np.cosh(t) ** 2
    g = lambda t: 2.0 * np.tanh(t) ** 2 / np.cosh(t) ** 2
    return integrate.quad(f, -50, 50, epsabs=1e-14)[0], integrate.quad(g, -50, 50, epsabs=1e-14)[0]


def cosine_period(kappa, amplitude):
    # a'' = -2 V'(a), V = A cos(kappa a); small oscillation about the minimum at 0.
    def rhs(t, y):
        return [y[1], 2.0 * amplitude * kappa * np.sin(kappa * y[0])]

    a0 = 0.01 / kappa

    def back(t, y):
        return y[1]

    back.direction = -1
    sol = integrate.solve_ivp(rhs, [0, 1e4], [a0, 0.0], events=back, rtol=1e-12, atol=1e-14)
    return next(t for t in sol.t_events[0] if t > 1.0)


def main():
    out = {}
    out["eta0_d2_cubic"] = townes_eta0()
    l1, l2 = poschl_teller()
    out["L1_lowest"] = l1
    out["L2_lowest"] = l2
    coarse, unc = coercivity(1500)
    fine, _ = coercivity(3000)
    out["rho_cubic_1d"] = {"n1500": coarse, "n3000": fine, "richardson": (4 * fine - coarse) / 3}
    out["unconstrained_min"] = unc
    out["int_eta2"], out["int_deta2"] = sech_integrals()
    kappa = 0.1
    out["cosine_period_kappa0.1"] = cosine_period(kappa, -0.5)
    out["cosine_period_linear"] = 2 * np.pi / (kappa * np.sqrt(2 * 0.5))
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
