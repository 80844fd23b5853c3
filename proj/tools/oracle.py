"""Reference values for the unit tests, evaluated with mpmath from the model
and controller formulas independently of the C++ code."""
import mpmath as mp
import numpy as np

mp.mp.dps = 40
P = dict(eps=mp.mpf(0), q=mp.mpf('0.5'), delta=mp.mpf(1), kappa=mp.mpf('0.526'),
         p=mp.mpf('0.667'), alpha=mp.mpf('0.244'), eta=mp.mpf('0.244'), zeta=mp.mpf('0.98'))


def dyn(z, u, beta, th=P):
    z1, z2, z3, z4, z5 = z
    force = beta * z1 * (th['eps'] * z2 + (1 - th['q']) * z3 + th['delta'] * z4)
    return [-force - z1 * u[0],
            force - th['kappa'] * z2,
            th['p'] * th['kappa'] * z2 - th['alpha'] * z3 - u[1] * z3,
            (1 - th['p']) * th['kappa'] * z2 - th['eta'] * z4,
            th['alpha'] * th['zeta'] * z3 + z1 * u[0] + z3 * u[1] + th['eta'] * z4]


def r0_spectral(beta, n0, th=P):
    F = np.array([[float(beta * n0 * th['eps']), float(beta * n0 * (1 - th['q'])), float(beta * n0 * th['delta'])],
                  [0, 0, 0], [0, 0, 0]])
    V = np.array([[float(th['kappa']), 0, 0],
                  [-float(th['p'] * th['kappa']), float(th['alpha']), 0],
                  [-float((1 - th['p']) * th['kappa']), 0, float(th['eta'])]])
    return max(abs(np.linalg.eigvals(F @ np.linalg.inv(V))))


def clf(zh, beta, zd, dzd, lam, kr, th=P):
    z1, z2, z3, z4, _ = zh
    Y1 = -beta * th['eps'] * z1 * z2 - beta * (1 - th['q']) * z1 * z3 - beta * th['delta'] * z1 * z4
    Y2 = th['p'] * th['kappa'] * z2 - th['alpha'] * z3
    e = [z1 - zd[0], z3 - zd[1]]
    V = (e[0] ** 2 + e[1] ** 2) / 2
    LfV = e[0] * (Y1 - dzd[0]) + e[1] * (Y2 - dzd[1])
    LgV = [-e[0] * z1, -e[1] * z3]
    phi0 = LfV + lam * V
    rob = phi0 + kr * mp.sqrt(e[0] ** 2 + e[1] ** 2)
    return dict(Y1=Y1, Y2=Y2, V=V, LfV=LfV, LgV1=LgV[0], LgV2=LgV[1], phi0=phi0, phi0_rob=rob)


if __name__ == '__main__':
    z = [mp.mpf(v) for v in (15000, 200, 500, 300, 0)]
    print('dynamics beta=5e-5 u=0:', [mp.nstr(v, 17) for v in dyn(z, [0, 0], mp.mpf('5e-5'))])
    print('dynamics beta=5e-5 u=(0.3,0.4):', [mp.nstr(v, 17) for v in dyn(z, [mp.mpf('0.3'), mp.mpf('0.4')], mp.mpf('5e-5'))])
    n0 = mp.mpf(16000)
    s = P['eps'] / P['kappa'] + P['p'] * (1 - P['q']) / P['alpha'] + (1 - P['p']) * P['delta'] / P['eta']
    beta = mp.mpf('1.8') / (n0 * s)
    print('calibrated beta:', mp.nstr(beta, 17), ' spectral R0 check:', r0_spectral(beta, n0))
    print('R0 at beta=5e-5:', r0_spectral(5e-5, 16000))
    zh = [mp.mpf(v) for v in (11000, 800, 1000, 700, 2500)]
    for k, v in clf(zh, beta, [0, 0], [0, 0], 1, 2).items():
        print('clf', k, mp.nstr(v, 17))
