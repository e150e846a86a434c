"""Smoke test for the compiled `shaping` extension module."""

import math

import shaping


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    u = shaping.Pmf.uniform(2)
    e = shaping.ConstraintSet.hamming(0.3)
    ch = shaping.Channel.bsc(0.1)

    close(u.entropy(), 1.0, 1e-15)
    proj = shaping.project(u, e)
    close(proj.q_star[1], 0.3, 1e-9)
    h = -(0.3 * math.log2(0.3) + 0.7 * math.log2(0.7))
    close(proj.rs_min_bits, 1.0 - h, 1e-9)

    r = shaping.rate_report(u, e, ch)
    close(r.r_matched_bits, 0.456, 5e-4)
    for v in (r.r_gallager_bits, r.r_mjt_bits, r.r_naive_bits):
        close(v, 0.41229, 1e-5)

    q, c = shaping.constrained_capacity_baa(ch, shaping.ConstraintSet.hamming(0.6))
    hb = -(0.1 * math.log2(0.1) + 0.9 * math.log2(0.9))
    close(c, 1.0 - hb, 1e-8)

    levels = shaping.pam(4)
    awgn = shaping.Channel.quantized_awgn(levels, 1.0, 0.5, points_per_sigma=8)
    assert awgn.input_size == 4
    close(sum(awgn.rows[0]), 1.0, 1e-12)

    est = shaping.estimate_ps(20, 0.3, u, e, 2000, seed=7)
    again = shaping.estimate_ps(20, 0.3, u, e, 2000, seed=7)
    assert est["successes"] == again["successes"]
    assert est["ci"][0] <= est["ps_hat"] <= est["ci"][1]

    try:
        shaping.Pmf([0.5, 0.6])
    except ValueError:
        pass
    else:
        raise AssertionError("unnormalized pmf accepted")

    print("smoke test passed:", r)


if __name__ == "__main__":
    main()
