"""Quick end-to-end check of the grdm Python extension."""

import cmath
import json
import sys

import grdm


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def max_diff(x, y):
    return max(abs(a - b) for ra, rb in zip(x, y) for a, b in zip(ra, rb))


def main():
    m = 3
    one = grdm.Element.one(m)
    psibar1 = grdm.Element.generator(m, 1, barred=True)
    psi1 = grdm.Element.generator(m, 1)

    # CAR: psi_1 * psibar_1 + psibar_1 * psi_1 = 1
    anti = psi1 * psibar1 + psibar1 * psi1
    assert anti.max_abs_diff(one) == 0.0, anti.terms()

    # trace of the identity is 2^m
    assert close(grdm.trace_integral(one), 2**m)

    # theta round trip on a random element
    a = grdm.Element.random(m, seed=1)
    back = grdm.theta(grdm.theta_inverse(a))
    assert back.max_abs_diff(a) < 1e-10

    # pdms agree between the Fock and Grassmann pictures
    rho = grdm.random_density(m, seed=2)
    g, big = grdm.pdms_from_rho(rho)
    density = grdm.theta(rho)
    g2, big2 = grdm.density_pdms(density)
    assert max_diff(g, g2) < 1e-10 and max_diff(big, big2) < 1e-10

    reports = grdm.check_pdms(g, big) + grdm.check_density(density)
    assert all(r["pass"] for r in reports), reports
    assert [r["condition"] for r in reports[:6]] == ["first-order", "P", "Q", "G", "T1", "T2"]

    # quasifree density reproduces gamma and obeys Wick
    q = grdm.build_quasifree(g)
    g3, _ = grdm.density_pdms(q)
    assert max_diff(g, g3) < 1e-9
    assert grdm.verify_quasifree(q, g, 6) < 1e-9

    # JSON round trip
    assert grdm.Element.from_json(q.to_json()).max_abs_diff(q) == 0.0
    json.loads(q.to_json())

    # generator change by a phase is an automorphism of the trace
    phase = cmath.exp(0.3j)
    u = [[phase if i == j else 0 for j in range(m)] for i in range(m)]
    assert close(a.change_generators(u).trace_integral(), a.trace_integral())

    summary = grdm.fuzz(3, 5, seed=7)
    assert summary["failures"] == 0, summary

    assert all(passed for _, _, passed, _ in grdm.run_selftest(m=3))
    assert not all(passed for _, _, passed, _ in grdm.run_selftest(m=3, flip_sign=True))

    try:
        grdm.Element.generator(m, 5)
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range generator accepted")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
