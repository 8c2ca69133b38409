"""Compiled per-mode kernels.

Arrays are flattened to ``(ncomp, N)`` with ``N = n**d``.  Symmetric
matrices use the upper-triangular row-major component order of
:class:`strainspace.spectral.SymMatrixField`.
"""

import numpy as np
from numba import njit

ST, HESS, ID_TILDE, TRDIVFREE = 0, 1, 2, 3
_SQRT2 = np.sqrt(2.0)


@njit(cache=True)
def sym_index(d):
    idx = np.empty((d, d), dtype=np.int64)
    s = 0
    for i in range(d):
        for j in range(i, d):
            idx[i, j] = s
            idx[j, i] = s
            s += 1
    return idx


# ------------------------------------------------------------ closed form


BLOCK = 512


@njit(cache=True, fastmath=True)
def _parts_block(src, s0, nb, xh, null, d, idx, w, q, cid, dst, t0, wts, acc, accumulate):
    """Closed-form parts of modes ``s0 .. s0+nb`` of ``src`` into ``dst[:, :, t0 ..]``.

    With unit frequency ``x``, ``w = M x``, ``q = x.w`` and ``w_perp = w - q x``:
    strain ``x w_perp^T + w_perp x^T``, Hessian ``q x x^T``, adjusted identity
    ``(tr M - q)/(d-1) (I - x x^T)`` and the remainder.  Null modes have
    ``x = 0``, which leaves strain and Hessian parts at zero; their identity
    coefficient is ``tr M / d``.

    With ``accumulate`` set, ``acc[0:16]`` gathers the 4x4 Gram matrix (row
    major), ``acc[16]`` the squared norm of ``src`` and ``acc[17]`` the squared
    completeness residual, all weighted by ``wts``.
    """
    for i in range(d):
        for b in range(nb):
            w[i, b] = 0.0
        for j in range(d):
            c = idx[i, j]
            for b in range(nb):
                w[i, b] += src[c, s0 + b] * xh[j, s0 + b]
    for b in range(nb):
        q[b] = 0.0
    for i in range(d):
        for b in range(nb):
            q[b] += xh[i, s0 + b] * w[i, b]
    for i in range(d):
        for b in range(nb):
            w[i, b] -= q[b] * xh[i, s0 + b]
    for b in range(nb):
        tr = 0j
        for i in range(d):
            tr += src[idx[i, i], s0 + b]
        if null[s0 + b]:
            cid[b] = tr / d
        else:
            cid[b] = (tr - q[b]) / (d - 1)
    for i in range(d):
        for j in range(i, d):
            c = idx[i, j]
            dl = 1.0 if i == j else 0.0
            for b in range(nb):
                k = s0 + b
                xx = xh[i, k] * xh[j, k]
                st = xh[i, k] * w[j, b] + w[i, b] * xh[j, k]
                h = q[b] * xx
                it = cid[b] * (dl - xx)
                m = src[c, k]
                rem = m - st - h - it
                dst[ST, c, t0 + b] = st
                dst[HESS, c, t0 + b] = h
                dst[ID_TILDE, c, t0 + b] = it
                dst[TRDIVFREE, c, t0 + b] = rem
                if accumulate:
                    wc = wts[c]
                    r = st + h + it + rem - m
                    acc[0] += wc * (st.real * st.real + st.imag * st.imag)
                    acc[1] += wc * (st.real * h.real + st.imag * h.imag)
                    acc[2] += wc * (st.real * it.real + st.imag * it.imag)
                    acc[3] += wc * (st.real * rem.real + st.imag * rem.imag)
                    acc[5] += wc * (h.real * h.real + h.imag * h.imag)
                    acc[6] += wc * (h.real * it.real + h.imag * it.imag)
                    acc[7] += wc * (h.real * rem.real + h.imag * rem.imag)
                    acc[10] += wc * (it.real * it.real + it.imag * it.imag)
                    acc[11] += wc * (it.real * rem.real + it.imag * rem.imag)
                    acc[15] += wc * (rem.real * rem.real + rem.imag * rem.imag)
                    acc[16] += wc * (m.real * m.real + m.imag * m.imag)
                    acc[17] += wc * (r.real * r.real + r.imag * r.imag)


@njit(cache=True)
def sym_parts(M, xh, null, out, wts, accumulate):
    """Closed-form decomposition of every mode into ``out`` of shape ``(4, nc, N)``.

    Returns ``(gram, norm_sq, completeness_sq)``; these are zero unless
    ``accumulate`` is set.
    """
    nc, N = M.shape
    d = xh.shape[0]
    idx = sym_index(d)
    w = np.empty((d, BLOCK), dtype=np.complex128)
    q = np.empty(BLOCK, dtype=np.complex128)
    cid = np.empty(BLOCK, dtype=np.complex128)
    acc = np.zeros(18)
    for s0 in range(0, N, BLOCK):
        nb = min(N, s0 + BLOCK) - s0
        _parts_block(M, s0, nb, xh, null, d, idx, w, q, cid, out, s0, wts, acc, accumulate)
    gram = acc[:16].copy().reshape(4, 4)
    for p in range(4):
        for p2 in range(p + 1, 4):
            gram[p2, p] = gram[p, p2]
    return gram, acc[16], acc[17]


# ------------------------------------------------------------ oracle


@njit(cache=True)
def frame_at(x, d, frame):
    """Orthonormal frame with ``frame[0] = x``.

    The next vector comes from Gram-Schmidt on the standard axis least aligned
    with ``x`` (lowest index on ties).  In three dimensions the last vector is
    the cross product of the first two; otherwise Gram-Schmidt continues,
    always taking the unused axis with the largest residual.
    """
    for a in range(d):
        frame[0, a] = x[a]
    used = np.zeros(d, dtype=np.bool_)
    v = np.empty(d)
    for r in range(1, d):
        if d == 3 and r == 2:
            frame[2, 0] = frame[0, 1] * frame[1, 2] - frame[0, 2] * frame[1, 1]
            frame[2, 1] = frame[0, 2] * frame[1, 0] - frame[0, 0] * frame[1, 2]
            frame[2, 2] = frame[0, 0] * frame[1, 1] - frame[0, 1] * frame[1, 0]
            break
        best = -1.0
        besta = -1
        for a in range(d):
            if used[a]:
                continue
            nrm2 = 1.0
            for q in range(r):
                nrm2 -= frame[q, a] ** 2
            if nrm2 > best + 1e-15:
                best = nrm2
                besta = a
        used[besta] = True
        for b in range(d):
            v[b] = 1.0 if b == besta else 0.0
        for q in range(r):
            proj = frame[q, besta]
            for b in range(d):
                v[b] -= proj * frame[q, b]
        nrm = 0.0
        for b in range(d):
            nrm += v[b] * v[b]
        nrm = np.sqrt(nrm)
        for b in range(d):
            frame[r, b] = v[b] / nrm


@njit(cache=True)
def span_tables_at(frame, d, tables, counts):
    """Orthonormal span matrices per subspace (strain, Hessian, adjusted identity, tr&divfree).

    ``tables`` has shape ``(4, d(d+1)/2, d, d)``; ``counts[s]`` is the span dimension.
    The diagonal-difference family is orthonormalised within its span.
    """
    x = frame[0]
    counts[:] = 0
    # strain: symmetrised xi_hat with each complement vector
    for k in range(1, d):
        b = counts[ST]
        for i in range(d):
            for j in range(d):
                tables[ST, b, i, j] = (x[i] * frame[k, j] + frame[k, i] * x[j]) / _SQRT2
        counts[ST] += 1
    # Hessian
    for i in range(d):
        for j in range(d):
            tables[HESS, 0, i, j] = x[i] * x[j]
    counts[HESS] = 1
    # adjusted identity
    s = 1.0 / np.sqrt(d - 1.0)
    for i in range(d):
        for j in range(d):
            tables[ID_TILDE, 0, i, j] = ((1.0 if i == j else 0.0) - x[i] * x[j]) * s
    counts[ID_TILDE] = 1
    # trace-free diagonal differences, then Gram-Schmidt within their span
    for k in range(1, d - 1):
        b = counts[TRDIVFREE]
        for i in range(d):
            for j in range(d):
                tables[TRDIVFREE, b, i, j] = (
                    frame[k, i] * frame[k, j] - frame[k + 1, i] * frame[k + 1, j]
                ) / _SQRT2
        for q in range(b):
            ip = 0.0
            for i in range(d):
                for j in range(d):
                    ip += tables[TRDIVFREE, q, i, j] * tables[TRDIVFREE, b, i, j]
            for i in range(d):
                for j in range(d):
                    tables[TRDIVFREE, b, i, j] -= ip * tables[TRDIVFREE, q, i, j]
        nrm = 0.0
        for i in range(d):
            for j in range(d):
                nrm += tables[TRDIVFREE, b, i, j] ** 2
        nrm = np.sqrt(nrm)
        for i in range(d):
            for j in range(d):
                tables[TRDIVFREE, b, i, j] /= nrm
        counts[TRDIVFREE] += 1
    # off-diagonal complement pairs
    for j0 in range(1, d):
        for k0 in range(j0 + 1, d):
            b = counts[TRDIVFREE]
            for i in range(d):
                for j in range(d):
                    tables[TRDIVFREE, b, i, j] = (
                        frame[j0, i] * frame[k0, j] + frame[k0, i] * frame[j0, j]
                    ) / _SQRT2
            counts[TRDIVFREE] += 1


@njit(cache=True)
def null_tables_at(d, tables, counts):
    """Span tables for a mode with zero frequency.

    Constants are divergence-free, so the identity direction belongs to the
    adjusted-identity space and the trace-free directions to tr&divfree.
    """
    counts[:] = 0
    for i in range(d):
        for j in range(d):
            tables[ID_TILDE, 0, i, j] = (1.0 if i == j else 0.0) / np.sqrt(d * 1.0)
    counts[ID_TILDE] = 1
    frame = np.eye(d)
    for k in range(d - 1):
        b = counts[TRDIVFREE]
        for i in range(d):
            for j in range(d):
                tables[TRDIVFREE, b, i, j] = (frame[k, i] * frame[k, j] - frame[k + 1, i] * frame[k + 1, j]) / _SQRT2
        for q in range(b):
            ip = 0.0
            for i in range(d):
                for j in range(d):
                    ip += tables[TRDIVFREE, q, i, j] * tables[TRDIVFREE, b, i, j]
            for i in range(d):
                for j in range(d):
                    tables[TRDIVFREE, b, i, j] -= ip * tables[TRDIVFREE, q, i, j]
        nrm = 0.0
        for i in range(d):
            for j in range(d):
                nrm += tables[TRDIVFREE, b, i, j] ** 2
        nrm = np.sqrt(nrm)
        for i in range(d):
            for j in range(d):
                tables[TRDIVFREE, b, i, j] /= nrm
        counts[TRDIVFREE] += 1
    for j0 in range(d):
        for k0 in range(j0 + 1, d):
            b = counts[TRDIVFREE]
            for i in range(d):
                for j in range(d):
                    tables[TRDIVFREE, b, i, j] = (frame[j0, i] * frame[k0, j] + frame[k0, i] * frame[j0, j]) / _SQRT2
            counts[TRDIVFREE] += 1


@njit(cache=True)
def tables_for_mode(x, isnull, d, frame, tables, counts):
    if isnull:
        null_tables_at(d, tables, counts)
    else:
        frame_at(x, d, frame)
        span_tables_at(frame, d, tables, counts)


@njit(cache=True)
def _oracle_at(m, x, isnull, d, idx, frame, tables, counts, res):
    """Project one mode onto each span by Frobenius inner products."""
    nc = m.shape[0]
    tables_for_mode(x, isnull, d, frame, tables, counts)
    for p in range(4):
        for c in range(nc):
            res[p, c] = 0.0
        for b in range(counts[p]):
            coef = 0j
            for i in range(d):
                for j in range(d):
                    coef += m[idx[i, j]] * tables[p, b, i, j]
            for i in range(d):
                for j in range(i, d):
                    res[p, idx[i, j]] += coef * tables[p, b, i, j]


@njit(cache=True)
def oracle_parts(M, xh, null, out):
    """Brute-force span projections of every mode; ``out`` has shape ``(4, nc, N)``."""
    nc, N = M.shape
    d = xh.shape[0]
    idx = sym_index(d)
    m = np.empty(nc, dtype=np.complex128)
    x = np.empty(d)
    frame = np.empty((d, d))
    tables = np.zeros((4, nc, d, d))
    counts = np.zeros(4, dtype=np.int64)
    res = np.empty((4, nc), dtype=np.complex128)
    for k in range(N):
        for c in range(nc):
            m[c] = M[c, k]
        for a in range(d):
            x[a] = xh[a, k]
        _oracle_at(m, x, null[k], d, idx, frame, tables, counts, res)
        for p in range(4):
            for c in range(nc):
                out[p, c, k] = res[p, c]


# ------------------------------------------------------------ diagnostics


@njit(cache=True, fastmath=True)
def compose_sums(parts, xh, null, wts):
    """``out[a, b] = sum |P_b(part_a) - delta_ab part_a|^2`` (idempotence and annihilation)."""
    _, nc, N = parts.shape
    d = xh.shape[0]
    idx = sym_index(d)
    w = np.empty((d, BLOCK), dtype=np.complex128)
    q = np.empty(BLOCK, dtype=np.complex128)
    cid = np.empty(BLOCK, dtype=np.complex128)
    scratch = np.empty((4, nc, BLOCK), dtype=np.complex128)
    acc = np.zeros(18)
    out = np.zeros((4, 4))
    for s0 in range(0, N, BLOCK):
        nb = min(N, s0 + BLOCK) - s0
        for p in range(4):
            _parts_block(parts[p], s0, nb, xh, null, d, idx, w, q, cid, scratch, 0, wts, acc, False)
            for p2 in range(4):
                for c in range(nc):
                    s = 0.0
                    for b in range(nb):
                        r = scratch[p2, c, b]
                        if p2 == p:
                            r -= parts[p, c, s0 + b]
                        s += r.real * r.real + r.imag * r.imag
                    out[p, p2] += wts[c] * s
    return out


@njit(cache=True)
def oracle_sums(M, parts, xh, null, wts):
    """Squared distance per subspace between ``parts`` and the brute-force projections of ``M``."""
    nc, N = M.shape
    d = xh.shape[0]
    idx = sym_index(d)
    m = np.empty(nc, dtype=np.complex128)
    x = np.empty(d)
    frame = np.empty((d, d))
    tables = np.zeros((4, nc, d, d))
    counts = np.zeros(4, dtype=np.int64)
    res = np.empty((4, nc), dtype=np.complex128)
    out = np.zeros(4)
    for k in range(N):
        for c in range(nc):
            m[c] = M[c, k]
        for a in range(d):
            x[a] = xh[a, k]
        _oracle_at(m, x, null[k], d, idx, frame, tables, counts, res)
        for p in range(4):
            for c in range(nc):
                r = res[p, c] - parts[p, c, k]
                out[p] += wts[c] * (r.real * r.real + r.imag * r.imag)
    return out


@njit(cache=True)
def operator_sums(xh, null, wts, check_basis, check_compose):
    """Exhaustive per-mode comparison of the closed-form operators with the span oracle.

    At every mode the closed-form decomposition is applied to each orthonormal
    span matrix ``B`` and to each resulting part.  Returned maxima over modes,
    all as Frobenius norms of operator differences in orthonormal coordinates:

    * ``oracle[a]``: ``P_a - O_a`` where ``O_a`` projects onto the span of ``a``,
    * ``compose[a, b]``: ``P_b P_a - delta_ab P_a``,
    * ``complete``: ``sum_a P_a - I``,
    * ``basis``: ``G - I`` for the Gram matrix ``G`` of the span matrices,
    * ``dims``: span dimensions per subspace (minimum over non-null modes).
    """
    d = xh.shape[0]
    N = xh.shape[1]
    nc = d * (d + 1) // 2
    idx = sym_index(d)
    frame = np.empty((d, d))
    tables = np.zeros((4, nc, d, d))
    counts = np.zeros(4, dtype=np.int64)
    per = BLOCK // nc
    ncol = per * nc
    src = np.empty((nc, ncol), dtype=np.complex128)
    xrep = np.empty((d, ncol))
    nrep = np.empty(ncol, dtype=np.bool_)
    label = np.empty(ncol, dtype=np.int64)
    dst = np.empty((4, nc, ncol), dtype=np.complex128)
    scratch = np.empty((4, nc, ncol), dtype=np.complex128)
    w = np.empty((d, ncol), dtype=np.complex128)
    q = np.empty(ncol, dtype=np.complex128)
    cid = np.empty(ncol, dtype=np.complex128)
    acc = np.zeros(18)
    x = np.empty(d)
    oracle = np.zeros(4)
    compose = np.zeros((4, 4))
    complete = 0.0
    basis = 0.0
    dims = np.full(4, nc, dtype=np.int64)
    m_or = np.zeros(4)
    m_co = np.zeros((4, 4))
    for k0 in range(0, N, per):
        nm = min(N, k0 + per) - k0
        col = 0
        for t in range(nm):
            k = k0 + t
            for a in range(d):
                x[a] = xh[a, k]
            tables_for_mode(x, null[k], d, frame, tables, counts)
            if not null[k]:
                for p in range(4):
                    dims[p] = min(dims[p], counts[p])
            for p in range(4):
                for b in range(counts[p]):
                    for i in range(d):
                        for j in range(i, d):
                            src[idx[i, j], col] = tables[p, b, i, j]
                    for a in range(d):
                        xrep[a, col] = x[a]
                    nrep[col] = null[k]
                    label[col] = p
                    col += 1
            if check_basis:
                # Gram matrix of this mode's span matrices
                c0 = col - nc
                for b1 in range(nc):
                    for b2 in range(b1, nc):
                        g = 0.0
                        for c in range(nc):
                            g += wts[c] * src[c, c0 + b1].real * src[c, c0 + b2].real
                        basis = max(basis, abs(g - (1.0 if b1 == b2 else 0.0)))
        _parts_block(src, 0, col, xrep, nrep, d, idx, w, q, cid, dst, 0, wts, acc, False)
        for t in range(nm):
            c0 = t * nc
            m_or[:] = 0.0
            m_co[:, :] = 0.0
            m_cp = 0.0
            for b in range(nc):
                cc = c0 + b
                for c in range(nc):
                    tot = -src[c, cc]
                    for p in range(4):
                        r = dst[p, c, cc] - (src[c, cc] if label[cc] == p else 0.0)
                        m_or[p] += wts[c] * (r.real * r.real + r.imag * r.imag)
                        tot += dst[p, c, cc]
                    m_cp += wts[c] * (tot.real * tot.real + tot.imag * tot.imag)
            for p in range(4):
                oracle[p] = max(oracle[p], np.sqrt(m_or[p]))
            complete = max(complete, np.sqrt(m_cp))
        if not check_compose:
            continue
        for p in range(4):
            _parts_block(dst[p], 0, col, xrep, nrep, d, idx, w, q, cid, scratch, 0, wts, acc, False)
            for t in range(nm):
                c0 = t * nc
                for p2 in range(4):
                    s = 0.0
                    for b in range(nc):
                        cc = c0 + b
                        for c in range(nc):
                            r = scratch[p2, c, cc] - (dst[p, c, cc] if p2 == p else 0.0)
                            s += wts[c] * (r.real * r.real + r.imag * r.imag)
                    compose[p, p2] = max(compose[p, p2], np.sqrt(s))
    return oracle, compose, complete, basis, dims


# ------------------------------------------------------------ random fields


@njit(cache=True)
def hermitian_noise(rng, n, d, decay, out):
    """Fill ``out`` (nc, n**d) with Hermitian complex Gaussian coefficients.

    Each mode gets unit expected power times ``(1+|k|)^-decay``; modes on a
    Nyquist plane stay zero.
    """
    nc, N = out.shape
    half = n // 2
    digits = np.empty(d, dtype=np.int64)
    inv_sqrt2 = 1.0 / _SQRT2
    for k in range(N):
        rem = k
        for a in range(d - 1, -1, -1):
            digits[a] = rem % n
            rem //= n
        nyq = False
        r2 = 0.0
        p = 0
        for a in range(d):
            i = digits[a]
            if i == half:
                nyq = True
            kk = i if i < half else i - n
            r2 += kk * kk
            p = p * n + ((n - i) % n)
        if nyq or p < k:
            continue
        amp = (1.0 + np.sqrt(r2)) ** (-decay)
        for c in range(nc):
            if p == k:
                out[c, k] = rng.standard_normal() * amp
            else:
                z = (rng.standard_normal() + 1j * rng.standard_normal()) * (amp * inv_sqrt2)
                out[c, k] = z
                out[c, p] = np.conj(z)


# ------------------------------------------------------------ pointwise eigenvectors


@njit(cache=True)
def _jacobi3(a, vec):
    """Cyclic Jacobi on a symmetric 3x3 ``a`` (overwritten with its diagonal form)."""
    for i in range(3):
        for j in range(3):
            vec[i, j] = 1.0 if i == j else 0.0
    for _ in range(50):
        off = a[0, 1] * a[0, 1] + a[0, 2] * a[0, 2] + a[1, 2] * a[1, 2]
        diag = a[0, 0] * a[0, 0] + a[1, 1] * a[1, 1] + a[2, 2] * a[2, 2]
        if off <= 1e-34 * diag or off == 0.0:
            return
        for p in range(2):
            for q in range(p + 1, 3):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(3):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(3):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(3):
                    vkp = vec[k, p]
                    vkq = vec[k, q]
                    vec[k, p] = c * vkp - s * vkq
                    vec[k, q] = s * vkp + c * vkq


@njit(cache=True)
def min_eigvec3(G, out):
    """Unit eigenvector of the smallest eigenvalue of each symmetric ``G[:, k]`` (6 components).

    Closed-form eigenvalue and cross products of shifted rows; points whose
    smallest eigenvalue is nearly degenerate fall back to Jacobi rotations.
    """
    N = G.shape[1]
    a = np.empty((3, 3))
    vec = np.empty((3, 3))
    for k in range(N):
        a00 = G[0, k]
        a01 = G[1, k]
        a02 = G[2, k]
        a11 = G[3, k]
        a12 = G[4, k]
        a22 = G[5, k]
        m = (a00 + a11 + a22) / 3.0
        b00 = a00 - m
        b11 = a11 - m
        b22 = a22 - m
        p2 = (b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * (a01 * a01 + a02 * a02 + a12 * a12)) / 6.0
        done = False
        if p2 > 0.0:
            p = np.sqrt(p2)
            det = (
                b00 * (b11 * b22 - a12 * a12)
                - a01 * (a01 * b22 - a12 * a02)
                + a02 * (a01 * a12 - b11 * a02)
            )
            r = det / (2.0 * p2 * p)
            r = min(1.0, max(-1.0, r))
            phi = np.arccos(r) / 3.0
            lam1 = m + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
            # rows of G - lam1 I
            r0x, r0y, r0z = a00 - lam1, a01, a02
            r1x, r1y, r1z = a01, a11 - lam1, a12
            r2x, r2y, r2z = a02, a12, a22 - lam1
            c0x, c0y, c0z = r0y * r1z - r0z * r1y, r0z * r1x - r0x * r1z, r0x * r1y - r0y * r1x
            c1x, c1y, c1z = r0y * r2z - r0z * r2y, r0z * r2x - r0x * r2z, r0x * r2y - r0y * r2x
            c2x, c2y, c2z = r1y * r2z - r1z * r2y, r1z * r2x - r1x * r2z, r1x * r2y - r1y * r2x
            n0 = c0x * c0x + c0y * c0y + c0z * c0z
            n1 = c1x * c1x + c1y * c1y + c1z * c1z
            n2 = c2x * c2x + c2y * c2y + c2z * c2z
            best, cx, cy, cz = n0, c0x, c0y, c0z
            if n1 > best:
                best, cx, cy, cz = n1, c1x, c1y, c1z
            if n2 > best:
                best, cx, cy, cz = n2, c2x, c2y, c2z
            # the cross product scales like gap^2; accept when well separated
            if best > 1e-6 * (p2 * p2 * 36.0):
                inv = 1.0 / np.sqrt(best)
                out[0, k] = cx * inv
                out[1, k] = cy * inv
                out[2, k] = cz * inv
                done = True
        if not done:
            a[0, 0] = a00
            a[0, 1] = a01
            a[0, 2] = a02
            a[1, 1] = a11
            a[1, 2] = a12
            a[2, 2] = a22
            a[1, 0] = a01
            a[2, 0] = a02
            a[2, 1] = a12
            _jacobi3(a, vec)
            j = 0
            if a[1, 1] < a[j, j]:
                j = 1
            if a[2, 2] < a[j, j]:
                j = 2
            for i in range(3):
                out[i, k] = vec[i, j]


@njit(cache=True)
def min_eigvec_plane(G, out):
    """Minimising unit vector of ``v^T G v`` over ``v = (0, cos t, sin t)``."""
    N = G.shape[1]
    for k in range(N):
        b = G[3, k]
        c = G[4, k]
        e = G[5, k]
        # minimiser angle of b cos^2 + 2 c cos sin + e sin^2
        t = 0.5 * np.arctan2(-2.0 * c, -(b - e))
        out[0, k] = 0.0
        out[1, k] = np.cos(t)
        out[2, k] = np.sin(t)
