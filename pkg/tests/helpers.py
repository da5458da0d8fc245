"""Independent reference implementations shared by the test modules.

Everything here is written in plain Python loops over floats, deliberately
avoiding the library's vectorized code paths, so that agreement between the
two routes is evidence and not tautology.
"""

from __future__ import annotations

import math


def oracle_adam(grads, alpha, beta1, beta2, eps, amsgrad=False, theta0=None):
    """Scalar-loop Adam over a list of gradient vectors (lists of floats).

    Returns the list of parameter vectors after each step.
    """
    d = len(grads[0])
    theta = list(theta0) if theta0 is not None else [0.0] * d
    m = [0.0] * d
    v = [0.0] * d
    vhat = [0.0] * d
    out = []
    for t, g in enumerate(grads, start=1):
        for j in range(d):
            m[j] = beta1 * m[j] + (1.0 - beta1) * g[j]
            v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j]
            if amsgrad:
                vhat[j] = max(vhat[j], v[j])
                dv = vhat[j]
            else:
                dv = v[j]
            mhat = m[j] / (1.0 - beta1 ** t)
            dvc = dv / (1.0 - beta2 ** t)
            theta[j] = theta[j] - alpha * mhat / (math.sqrt(dvc) + eps)
        out.append(list(theta))
    return out


def oracle_tadam(grads, alpha, beta1, beta2, eps, nu, amsgrad=False, theta0=None):
    """Scalar-loop student-t update over a list of gradient vectors.

    Returns (parameter vectors after each step, list of (D, w, beta_w)).
    """
    d = len(grads[0])
    theta = list(theta0) if theta0 is not None else [0.0] * d
    m = [0.0] * d
    v = [0.0] * d
    vhat = [0.0] * d
    W = beta1 / (1.0 - beta1)
    out = []
    diags = []
    for t, g in enumerate(grads, start=1):
        D = 0.0
        for j in range(d):
            r = g[j] - m[j]
            D += r * r / (v[j] + eps)
        w = (nu + d) / (nu + D)
        bw = W / (W + w)
        for j in range(d):
            m[j] = bw * m[j] + (w / (W + w)) * g[j]
        W = ((2.0 * beta1 - 1.0) / beta1) * W + w
        for j in range(d):
            v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j]
            if amsgrad:
                vhat[j] = max(vhat[j], v[j])
                dv = vhat[j]
            else:
                dv = v[j]
            mhat = m[j] / (1.0 - beta1 ** t)
            dvc = dv / (1.0 - beta2 ** t)
            theta[j] = theta[j] - alpha * mhat / (math.sqrt(dvc) + eps)
        out.append(list(theta))
        diags.append((D, w, bw))
    return out, diags


def central_difference_grads(f, x, h=1e-5):
    """Central finite differences of a scalar function over a flat list."""
    g = []
    for j in range(len(x)):
        xp = list(x)
        xm = list(x)
        xp[j] += h
        xm[j] -= h
        g.append((f(xp) - f(xm)) / (2.0 * h))
    return g
