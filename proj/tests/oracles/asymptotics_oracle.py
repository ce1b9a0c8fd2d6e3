"""Skew oracle: second derivative of phi(eps * rho phi0') by finite differences of
the continuous functional, independent of the closed-form skew formulas."""
import numpy as np
from scipy import integrate


def lift_unit(h, t):
    return np.sqrt(2 * h) / (h + 0.5) * t ** (h + 0.5)


def phi_index(w, sig, eta, hs, price_vel, vol_vel, eps):
    terms = []
    for i in range(len(w)):
        a, b = price_vel[i] * eps, vol_vel[i] * eps
        val = integrate.quad(lambda t: sig[i] * np.exp(eta[i] * b * lift_unit(hs[i], t)) * a,
                             0, 1, epsabs=1e-15, epsrel=1e-14, limit=200)[0]
        terms.append(w[i] * np.exp(val))
    return np.log(sum(terms))


def skew(w, sig, eta, hs, rho, two_factor=False):
    n = len(w)
    w, sig = np.array(w), np.array(sig)
    phi0 = np.zeros(rho.shape[0])
    phi0[:n] = w * sig
    k = rho @ phi0
    var = phi0 @ rho @ phi0
    price_vel = k[:n]
    vol_vel = k[n:] if two_factor else k[:n]
    d = 1e-3
    f = lambda e: phi_index(w, sig, eta, hs, price_vel, vol_vel, e)
    # phi(0)=0; second derivative by 4th-order central difference
    d2 = (-f(2*d) + 16*f(d) - 30*0 + 16*f(-d) - f(-2*d)) / (12*d*d)
    return var, d2 / var


def equi(n, r):
    m = np.full((n, n), r)
    np.fill_diagonal(m, 1)
    return m


if __name__ == "__main__":
    print("N1", skew([1], [0.2], [-1], [0.1], np.eye(1)))
    print("N2 sig .2 .3 rho .5 eta -1 -0.5 H .1 .3", skew([.5, .5], [.2, .3], [-1, -.5], [.1, .3], equi(2, .5)))
    print("N2 eta0 rho .5", skew([.5, .5], [.2, .2], [0, 0], [.1, .1], equi(2, .5)))
    print("3asset", skew([.5, .3, .2], [.2, .25, .3], [-1, -1.5, -.8], [.1, .2, .3], equi(3, .4)))
    # two-factor N=1, eta=1, c=-0.5
    rho = np.array([[1, -.5], [-.5, 1]])
    print("2F N1 c=-.5 eta=1", skew([1], [.2], [1], [.1], rho, True))
    rho = np.array([[1, -.99], [-.99, 1]])
    print("2F N1 c=-.99 eta=1", skew([1], [.2], [1], [.1], rho, True))
    # two-factor 3 asset: price equicorr 0.4, vol-price own -0.7, cross 0.4*-0.7, vol-vol 0.4
    n = 3
    R = np.zeros((6, 6))
    P = equi(3, .4)
    R[:3, :3] = P; R[3:, 3:] = P
    C = -0.7 * P
    R[:3, 3:] = C; R[3:, :3] = C.T
    print("min eig 2F3", np.linalg.eigvalsh(R).min())
    print("2F 3asset", skew([.5, .3, .2], [.2, .25, .3], [1, 1.5, .8], [.1, .2, .3], R, True))
