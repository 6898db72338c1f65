"""Reference implementations that share no code with the package."""

POLYS = {8: 0x11D, 16: 0x1100B}


def clmul(a, b, f):
    """Shift-and-add carry-less product, reduced modulo the field polynomial."""
    poly = POLYS[f]
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a >> f:
            a ^= poly
    return acc


def clpow(a, k, f):
    out = 1
    for _ in range(k):
        out = clmul(out, a, f)
    return out


def symbols(data, f):
    if f == 8:
        return list(data)
    padded = bytes(data) + b"\x00" * (len(data) % 2)
    return [padded[i] | (padded[i + 1] << 8) for i in range(0, len(padded), 2)]


def naive_signature(data, f, n_sig):
    """Component j = sum over i of p_i * (alpha^j)^i, with alpha = 2."""
    out = []
    syms = symbols(data, f)
    for j in range(1, n_sig + 1):
        beta = clpow(2, j, f)
        acc = 0
        power = 1
        for p in syms:
            power = clmul(power, beta, f)
            acc ^= clmul(p, power, f)
        out.append(acc)
    return tuple(out)


def nested_pairs(r_keys, s_keys):
    return {(i, j) for i, a in enumerate(r_keys) for j, b in enumerate(s_keys) if a == b}
