"""Generate the quantum-exponential conformance corpus.

Independent oracle: evaluates the defining infinite product with mpmath at
40 significant digits, at two truncation depths fixed in advance (1500 and
3000 factors).  A row is emitted only when the two depths agree to 1e-25,
so every recorded value is correct to far below the 1e-10 replay
tolerance.  Points of the singular set {-1, -q^-2, -q^-4, ...} take the
defined value -1 (the product degenerates to 0/0 there).  The library's
own evaluation path is never imported here.

Rows cover the M=16, q=0.5 grid, the special values (0 and the singular
points), the imaginary unit, and the approach to the singular set along
gamma_eps = q^-2 e^{i(pi - eps)}.

Usage: python3 tools/make_fq_corpus.py [out_csv]
"""

import csv
import sys

import mpmath as mp

mp.mp.dps = 40

Q = mp.mpf("0.5")
DEPTHS = (1500, 3000)
AGREE = mp.mpf("1e-25")


def is_singular(k: int, theta_num_pi) -> bool:
    return theta_num_pi == 1 and k <= 0 and k % 2 == 0


def product_value(k: int, theta_num_pi, depth: int):
    """Truncated product for gamma = q^k e^{i pi t}, t = theta_num_pi."""
    gamma = Q**k * mp.e ** (1j * mp.pi * mp.mpf(theta_num_pi))
    gbar = mp.conj(gamma)
    out = mp.mpc(1)
    w = mp.mpf(1)
    q2 = Q * Q
    for _ in range(depth):
        out *= (1 + w * gbar) / (1 + w * gamma)
        w *= q2
    return out


def certified(k: int, theta_num_pi):
    if is_singular(k, theta_num_pi):
        return mp.mpc(-1)
    a = product_value(k, theta_num_pi, DEPTHS[0])
    b = product_value(k, theta_num_pi, DEPTHS[1])
    if abs(a - b) > AGREE:
        raise RuntimeError(f"two-depth disagreement at k={k}, t={theta_num_pi}: {abs(a - b)}")
    return b


def centered(k: int, M: int) -> int:
    return (k + M // 2) % M - M // 2


def main(out_path: str) -> None:
    rows = []
    M = 16
    for k in range(M):
        for j in range(M):
            t = mp.mpf(2 * j) / M   # theta = 2 pi j / M as a multiple of pi
            val = certified(centered(k, M), t)
            rows.append(("grid", centered(k, M), float(t), val))
    # the zero point of the closure; the value is 1 by definition
    rows.append(("zero", 0, 0.0, mp.mpc(1)))
    for m in (0, 1, 2):
        rows.append(("singular", -2 * m, 1.0, mp.mpc(-1)))
    # the imaginary unit: gamma = i = q^0 e^{i pi/2}
    rows.append(("pin", 0, 0.5, certified(0, mp.mpf("0.5"))))
    # approach to the singular point -q^-2 along its circle
    for eps in ("0.4", "0.2", "0.1", "0.05"):
        t = 1 - mp.mpf(eps) / mp.pi
        rows.append(("continuity", -2, float(t), certified(-2, t)))

    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "kind", "k", "theta_numerator_pi", "re_Fq", "im_Fq"])
        for kind, k, t, val in rows:
            writer.writerow([
                "0.5", kind, k, repr(float(t)),
                mp.nstr(val.real, 20, strip_zeros=False),
                mp.nstr(val.imag, 20, strip_zeros=False),
            ])
    print(f"wrote {len(rows)} rows to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/qazb/data/fq_conformance.csv")
