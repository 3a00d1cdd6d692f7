"""Pure-Python coordinate-descent kernel, used when the compiled
extension is unavailable. Mirrors hdlp._cd_fast.lasso_cd_gram operation
for operation so both backends give bit-identical iterates."""

_EPS = 1e-14


def lasso_cd_gram(gram, q, weight, lam, beta, gb, max_sweeps, tol):
    n = beta.shape[0]
    max_delta = 0.0
    for sweep in range(max_sweeps):
        max_delta = 0.0
        for j in range(n):
            g_jj = gram[j, j]
            if g_jj <= _EPS:
                continue  # degenerate column, coefficient frozen at 0
            b_old = beta[j]
            c = q[j] - gb[j] + g_jj * b_old
            thr = lam * weight[j]
            if c > thr:
                b_new = (c - thr) / g_jj
            elif c < -thr:
                b_new = (c + thr) / g_jj
            else:
                b_new = 0.0
            d = b_new - b_old
            if d != 0.0:
                beta[j] = b_new
                gb += gram[:, j] * d
                d = abs(d)
                if d > max_delta:
                    max_delta = d
        if max_delta < tol:
            return sweep + 1, max_delta
    return max_sweeps, max_delta
