"""Brute-force reference computations, kept free of the code they check."""


def autocorr(x, m):
    n = len(x)
    return [sum(x[k] * x[k + tau] for k in range(n - tau)) / n for tau in range(m)]


def crosscorr(s, x, m):
    n = len(x)
    return [sum(s[k + tau] * x[k] for k in range(n - tau)) / n for tau in range(m)]


def convolve(h, x):
    """Causal FIR output, zero initial state, same length as x."""
    out = []
    for k in range(len(x)):
        acc = 0.0
        for i in range(min(k, len(h) - 1) + 1):
            acc += h[i] * x[k - i]
        out.append(acc)
    return out


def kalman_step(x, P, z, q, r, dt):
    """Predict + update written out element by element, no matrix library."""
    xp = [x[0] + dt * x[1], x[1]]
    # A P A^T with A = [[1, dt], [0, 1]]
    p00 = P[0][0] + dt * (P[1][0] + P[0][1]) + dt * dt * P[1][1] + q
    p01 = P[0][1] + dt * P[1][1]
    p10 = P[1][0] + dt * P[1][1]
    p11 = P[1][1] + q
    p01 = p10 = (p01 + p10) / 2
    s = p00 + r
    k0, k1 = p00 / s, p10 / s
    innov = z - xp[0]
    xn = [xp[0] + k0 * innov, xp[1] + k1 * innov]
    Pn = [[(1 - k0) * p00, (1 - k0) * p01],
          [-k1 * p00 + p10, -k1 * p01 + p11]]
    sym = (Pn[0][1] + Pn[1][0]) / 2
    Pn[0][1] = Pn[1][0] = sym
    return xn, Pn, [k0, k1]
