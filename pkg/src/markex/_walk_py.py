"""Pure-Python twin of the compiled colored-walk kernel (same arithmetic, same order)."""


def colored_walk(vc_ptr, slot_color, slot_ptr, edge_dst, alpha, beta, x0, uniforms,
                 increment, target, color_counts, edge_counts, path, trace):
    vc_ptr = vc_ptr.tolist()
    slot_color = slot_color.tolist()
    slot_ptr = slot_ptr.tolist()
    edge_dst = edge_dst.tolist()
    alpha = alpha.tolist()
    beta = beta.tolist()
    u = uniforms.tolist()
    cc = color_counts.tolist()
    ec = edge_counts.tolist()
    increment = float(increment)
    n = len(path)
    out = [0] * n
    tr = [0.0] * n
    i = x0
    done = n
    for t in range(n):
        s0, s1 = vc_ptr[i], vc_ptr[i + 1]
        if s0 == s1:
            done = t
            break
        ctot = 0.0
        for k in range(s0, s1):
            c = slot_color[k]
            ctot = ctot + (alpha[c] + increment * cc[c])
        if target >= 0:
            p = 0.0
            for k in range(s0, s1):
                for e in range(slot_ptr[k], slot_ptr[k + 1]):
                    if edge_dst[e] == target:
                        c = slot_color[k]
                        etot = 0.0
                        for e2 in range(slot_ptr[k], slot_ptr[k + 1]):
                            etot = etot + (beta[e2] + increment * ec[e2])
                        wt = beta[e] + increment * ec[e]
                        p = ((alpha[c] + increment * cc[c]) / ctot) * (wt / etot)
            tr[t] = p
        r = u[2 * t] * ctot
        acc = 0.0
        chosen_k = s1 - 1
        for k in range(s0, s1):
            c = slot_color[k]
            acc = acc + (alpha[c] + increment * cc[c])
            if r < acc:
                chosen_k = k
                break
        lo, hi = slot_ptr[chosen_k], slot_ptr[chosen_k + 1]
        etot = 0.0
        for e in range(lo, hi):
            etot = etot + (beta[e] + increment * ec[e])
        r = u[2 * t + 1] * etot
        acc = 0.0
        chosen_e = hi - 1
        for e in range(lo, hi):
            acc = acc + (beta[e] + increment * ec[e])
            if r < acc:
                chosen_e = e
                break
        cc[slot_color[chosen_k]] += 1
        ec[chosen_e] += 1
        i = edge_dst[chosen_e]
        out[t] = i
    path[:done] = out[:done]
    trace[:done] = tr[:done]
    color_counts[:] = cc
    edge_counts[:] = ec
    return done
