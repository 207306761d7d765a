"""Independent high-precision values frozen into the C++ tests."""

import mpmath as mp

mp.mp.dps = 40


def hex_series(x):
    # f(x) = sum over a, b of x^(a^2 + ab + b^2)
    total = mp.mpf(0)
    bound = 60
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            total += x ** (a * a + a * b + b * b)
    return total


def main():
    # Nearest sign change of f to 0 on (-1, 0): bracket by a coarse scan, then refine.
    x0 = mp.mpf("-0.001")
    prev = hex_series(x0)
    x = x0
    while x > -0.999:
        nxt = x - mp.mpf("0.01")
        val = hex_series(nxt)
        if (val < 0) != (prev < 0):
            break
        x, prev = nxt, val
    root = mp.findroot(hex_series, (nxt, x), solver="bisect")
    print("x_star =", mp.nstr(root, 22))
    print("q_star =", mp.nstr(1 / root, 22))


if __name__ == "__main__":
    main()
