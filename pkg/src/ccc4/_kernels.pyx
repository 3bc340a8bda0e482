# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled descent kernel; algorithmic twin of _kernels_py.py.

Projected-gradient descent of U(v, w) = sum u_k / p_k over S^2 x S^2 with
Barzilai-Borwein trial steps, Armijo backtracking, and renormalization
retraction.  The loop runs without the GIL, so threaded multistart scales.
"""

from libc.math cimport INFINITY, fabs, sqrt

CONVERGED = 0
MAXITER = 1
STALLED = 2

cdef int _CONVERGED = 0
cdef int _MAXITER = 1
cdef int _STALLED = 2

cdef double _ARMIJO = 1e-4
cdef int _MAX_BACKTRACK = 40


cdef inline double _eval(double v1, double v2, double v3,
                         double w1, double w2, double w3,
                         double u1, double u2, double u3,
                         double u4, double u5, double u6,
                         double* p) nogil:
    """Fills p[0:6]; returns U or INFINITY outside the feasible region."""
    p[0] = 0.5 * (v1 + w1)
    p[1] = 0.5 * (v2 + w2)
    p[2] = 0.5 * (v3 + w3)
    p[3] = 0.5 * (v3 - w3)
    p[4] = 0.5 * (w2 - v2)
    p[5] = 0.5 * (v1 - w1)
    if (p[0] <= 0.0 or p[1] <= 0.0 or p[2] <= 0.0
            or p[3] <= 0.0 or p[4] <= 0.0 or p[5] <= 0.0):
        return INFINITY
    return (u1 / p[0] + u2 / p[1] + u3 / p[2]
            + u4 / p[3] + u5 / p[4] + u6 / p[5])


def eval_potential(v, w, u):
    """Potential and its Euclidean gradient with respect to (v, w)."""
    cdef double v1 = v[0], v2 = v[1], v3 = v[2]
    cdef double w1 = w[0], w2 = w[1], w3 = w[2]
    cdef double u1 = u[0], u2 = u[1], u3 = u[2]
    cdef double u4 = u[3], u5 = u[4], u6 = u[5]
    cdef double p[6]
    cdef double U = _eval(v1, v2, v3, w1, w2, w3, u1, u2, u3, u4, u5, u6, p)
    if U == INFINITY:
        return U, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]
    cdef double q1 = -u1 / (p[0] * p[0])
    cdef double q2 = -u2 / (p[1] * p[1])
    cdef double q3 = -u3 / (p[2] * p[2])
    cdef double q4 = -u4 / (p[3] * p[3])
    cdef double q5 = -u5 / (p[4] * p[4])
    cdef double q6 = -u6 / (p[5] * p[5])
    gv = [0.5 * (q1 + q6), 0.5 * (q2 - q5), 0.5 * (q3 + q4)]
    gw = [0.5 * (q1 - q6), 0.5 * (q2 + q5), 0.5 * (q3 - q4)]
    return U, gv, gw


def descend(v, w, u, double gtol, int max_iter):
    """Minimize U over S^2 x S^2 from (v, w); see the pure-python twin for
    the status conventions."""
    cdef double v1 = v[0], v2 = v[1], v3 = v[2]
    cdef double w1 = w[0], w2 = w[1], w3 = w[2]
    cdef double u1 = u[0], u2 = u[1], u3 = u[2]
    cdef double u4 = u[3], u5 = u[4], u6 = u[5]

    cdef double p[6]
    cdef double U, rgnorm, n, uscale
    cdef double q1, q2, q3, q4, q5, q6
    cdef double gv1, gv2, gv3, gw1, gw2, gw3, cv, cw
    cdef double d1, d2, d3, e1, e2, e3, g2
    cdef double pv1 = 0.0, pv2 = 0.0, pv3 = 0.0, pw1 = 0.0, pw2 = 0.0, pw3 = 0.0
    cdef double pd1 = 0.0, pd2 = 0.0, pd3 = 0.0, pe1 = 0.0, pe2 = 0.0, pe3 = 0.0
    cdef double s1, s2, s3, s4, s5, s6, y1, y2, y3, y4, y5, y6, ss, sy
    cdef double alpha, a, Ut
    cdef double t1, t2, t3, r1, r2, r3
    cdef bint have_prev = False, accepted
    cdef int iters = 0, status = _MAXITER, bt

    with nogil:
        n = sqrt(v1 * v1 + v2 * v2 + v3 * v3)
        v1 /= n; v2 /= n; v3 /= n
        n = sqrt(w1 * w1 + w2 * w2 + w3 * w3)
        w1 /= n; w2 /= n; w3 /= n

        U = _eval(v1, v2, v3, w1, w2, w3, u1, u2, u3, u4, u5, u6, p)
        rgnorm = INFINITY
        if U == INFINITY:
            status = _STALLED
        else:
            while iters < max_iter:
                q1 = -u1 / (p[0] * p[0])
                q2 = -u2 / (p[1] * p[1])
                q3 = -u3 / (p[2] * p[2])
                q4 = -u4 / (p[3] * p[3])
                q5 = -u5 / (p[4] * p[4])
                q6 = -u6 / (p[5] * p[5])
                gv1 = 0.5 * (q1 + q6)
                gv2 = 0.5 * (q2 - q5)
                gv3 = 0.5 * (q3 + q4)
                gw1 = 0.5 * (q1 - q6)
                gw2 = 0.5 * (q2 + q5)
                gw3 = 0.5 * (q3 - q4)
                cv = gv1 * v1 + gv2 * v2 + gv3 * v3
                cw = gw1 * w1 + gw2 * w2 + gw3 * w3
                d1 = gv1 - cv * v1
                d2 = gv2 - cv * v2
                d3 = gv3 - cv * v3
                e1 = gw1 - cw * w1
                e2 = gw2 - cw * w2
                e3 = gw3 - cw * w3
                g2 = d1 * d1 + d2 * d2 + d3 * d3 + e1 * e1 + e2 * e2 + e3 * e3
                rgnorm = sqrt(g2)
                uscale = fabs(U)
                if uscale < 1.0:
                    uscale = 1.0
                if rgnorm <= gtol * uscale:
                    status = _CONVERGED
                    break

                if have_prev:
                    s1 = v1 - pv1
                    s2 = v2 - pv2
                    s3 = v3 - pv3
                    s4 = w1 - pw1
                    s5 = w2 - pw2
                    s6 = w3 - pw3
                    y1 = d1 - pd1
                    y2 = d2 - pd2
                    y3 = d3 - pd3
                    y4 = e1 - pe1
                    y5 = e2 - pe2
                    y6 = e3 - pe3
                    ss = s1 * s1 + s2 * s2 + s3 * s3 + s4 * s4 + s5 * s5 + s6 * s6
                    sy = s1 * y1 + s2 * y2 + s3 * y3 + s4 * y4 + s5 * y5 + s6 * y6
                    if sy > 0.0:
                        alpha = ss / sy
                        if alpha < 1e-14:
                            alpha = 1e-14
                        elif alpha > 1e4:
                            alpha = 1e4
                    else:
                        alpha = 1e-2
                else:
                    alpha = 0.1 / (1.0 + rgnorm)

                pv1 = v1; pv2 = v2; pv3 = v3
                pw1 = w1; pw2 = w2; pw3 = w3
                pd1 = d1; pd2 = d2; pd3 = d3
                pe1 = e1; pe2 = e2; pe3 = e3
                have_prev = True

                accepted = False
                a = alpha
                for bt in range(_MAX_BACKTRACK):
                    t1 = v1 - a * d1
                    t2 = v2 - a * d2
                    t3 = v3 - a * d3
                    n = sqrt(t1 * t1 + t2 * t2 + t3 * t3)
                    t1 /= n; t2 /= n; t3 /= n
                    r1 = w1 - a * e1
                    r2 = w2 - a * e2
                    r3 = w3 - a * e3
                    n = sqrt(r1 * r1 + r2 * r2 + r3 * r3)
                    r1 /= n; r2 /= n; r3 /= n
                    Ut = _eval(t1, t2, t3, r1, r2, r3, u1, u2, u3, u4, u5, u6, p)
                    if Ut <= U - _ARMIJO * a * g2:
                        accepted = True
                        break
                    a *= 0.5
                if not accepted:
                    status = _STALLED
                    break
                v1 = t1; v2 = t2; v3 = t3
                w1 = r1; w2 = r2; w3 = r3
                U = Ut
                iters += 1

    return ([v1, v2, v3], [w1, w2, w3], U, rgnorm, iters, status)
