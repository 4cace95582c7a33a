# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled colored-walk kernel.  Must stay arithmetically identical to _walk_py."""

from libc.stdint cimport int64_t


def colored_walk(const int64_t[::1] vc_ptr, const int64_t[::1] slot_color,
                 const int64_t[::1] slot_ptr, const int64_t[::1] edge_dst,
                 const double[::1] alpha, const double[::1] beta,
                 Py_ssize_t x0, const double[::1] uniforms, double increment,
                 Py_ssize_t target, int64_t[::1] color_counts,
                 int64_t[::1] edge_counts, int64_t[::1] path, double[::1] trace):
    cdef Py_ssize_t n = path.shape[0]
    cdef Py_ssize_t t, k, e, s0, s1, i = x0, c, chosen_k, chosen_e
    cdef double w, ctot, etot, acc, r, wt, p
    cdef Py_ssize_t done = n
    with nogil:
        for t in range(n):
            s0 = vc_ptr[i]
            s1 = vc_ptr[i + 1]
            if s0 == s1:
                done = t
                break
            ctot = 0.0
            for k in range(s0, s1):
                c = slot_color[k]
                ctot = ctot + (alpha[c] + increment * <double>color_counts[c])
            if target >= 0:
                p = 0.0
                for k in range(s0, s1):
                    for e in range(slot_ptr[k], slot_ptr[k + 1]):
                        if edge_dst[e] == target:
                            c = slot_color[k]
                            etot = 0.0
                            for chosen_e in range(slot_ptr[k], slot_ptr[k + 1]):
                                etot = etot + (beta[chosen_e] + increment * <double>edge_counts[chosen_e])
                            wt = beta[e] + increment * <double>edge_counts[e]
                            p = ((alpha[c] + increment * <double>color_counts[c]) / ctot) * (wt / etot)
                trace[t] = p
            r = uniforms[2 * t] * ctot
            acc = 0.0
            chosen_k = s1 - 1
            for k in range(s0, s1):
                c = slot_color[k]
                acc = acc + (alpha[c] + increment * <double>color_counts[c])
                if r < acc:
                    chosen_k = k
                    break
            etot = 0.0
            for e in range(slot_ptr[chosen_k], slot_ptr[chosen_k + 1]):
                etot = etot + (beta[e] + increment * <double>edge_counts[e])
            r = uniforms[2 * t + 1] * etot
            acc = 0.0
            chosen_e = slot_ptr[chosen_k + 1] - 1
            for e in range(slot_ptr[chosen_k], slot_ptr[chosen_k + 1]):
                acc = acc + (beta[e] + increment * <double>edge_counts[e])
                if r < acc:
                    chosen_e = e
                    break
            color_counts[slot_color[chosen_k]] += 1
            edge_counts[chosen_e] += 1
            i = edge_dst[chosen_e]
            path[t] = i
    return done
