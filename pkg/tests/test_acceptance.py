"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import math
import random
import time
from fractions import Fraction

from fracseq import (
    MODE_EXACT,
    Exponent,
    FiniteSequence,
    MatrixSource,
    StabilizationPolicy,
    beta_dual_transform,
    coefficient_prefix,
    criterion_linf_domain,
    criterion_linf_target,
    dual_norm,
    forward_transform,
    hat_matrix,
    inverse_transform,
    mnc_c,
    mnc_c0,
    mnc_l1,
    opnorm_to_l1,
    opnorm_to_linf,
    table_criterion,
)
from fracseq.coefficients import raw_prefix

from helpers import pre_inverted_source, triangle_source

HALF = Fraction(1, 2)


def _finish(num, started, limit, detail):
    elapsed = time.perf_counter() - started
    print(f"criterion {num}: PASS ({elapsed:.2f}s < {limit}s) {detail}", flush=True)
    assert elapsed < limit, f"criterion {num} exceeded its runtime budget: {elapsed:.2f}s"


def test_criterion_1_coefficient_golden_tables():
    started = time.perf_counter()
    golden = {
        Fraction(1, 2): [Fraction(1), Fraction(-1, 2), Fraction(-1, 8),
                         Fraction(-1, 16), Fraction(-5, 128)],
        Fraction(-1, 2): [Fraction(1), Fraction(1, 2), Fraction(3, 8),
                          Fraction(5, 16), Fraction(35, 128)],
        Fraction(2, 3): [Fraction(1), Fraction(-2, 3), Fraction(-1, 9),
                         Fraction(-4, 81), Fraction(-7, 243)],
    }
    for order, expected in golden.items():
        table = coefficient_prefix(order, 5, MODE_EXACT)
        assert list(table.entries) == expected
    _finish(1, started, 1.0, "three printed expansions reproduced exactly")


def test_criterion_2_convolution_inverse():
    started = time.perf_counter()
    orders = [Fraction(1, 2), Fraction(2, 3), Fraction(5, 4)]
    for order in orders:
        fwd = raw_prefix(order, 200)
        inv = raw_prefix(-order, 200)
        for k in range(200):
            acc = sum(fwd[i] * inv[k - i] for i in range(k + 1))
            assert acc == (1 if k == 0 else 0)
    worst = 0.0
    for order in orders:
        fwd = raw_prefix(float(order), 200)
        inv = raw_prefix(-float(order), 200)
        for k in range(200):
            acc = sum(fwd[i] * inv[k - i] for i in range(k + 1))
            worst = max(worst, abs(acc - (1.0 if k == 0 else 0.0)))
    assert worst < 1e-12
    _finish(2, started, 5.0, f"exact deltas; float deviation {worst:.2e}")


def test_criterion_3_round_trip_property():
    started = time.perf_counter()
    rng = random.Random(1003)
    orders = [0.3, 0.5, 2 / 3, 1.5]
    worst = 0.0
    for _ in range(500):
        n = rng.randrange(1, 101)
        x = FiniteSequence([rng.uniform(-1.0, 1.0) for _ in range(n)])
        for order in orders:
            back = inverse_transform(forward_transform(x, order, n), order, n)
            err = max(abs(a - b) for a, b in zip(x.entries, back.entries))
            worst = max(worst, err)
    assert worst < 1e-12
    _finish(3, started, 30.0, f"500 sequences x 4 orders, max abs error {worst:.2e}")


def test_criterion_4_duality_identity_and_dual_norm():
    started = time.perf_counter()
    rng = random.Random(1004)
    order = 0.6
    worst = 0.0
    for _ in range(200):
        n = rng.randrange(1, 65)
        a = FiniteSequence([rng.uniform(-1.0, 1.0) for _ in range(n)])
        x = FiniteSequence([rng.uniform(-1.0, 1.0) for _ in range(n)])
        y = forward_transform(x, order, n)
        abar = beta_dual_transform(a, order)
        lhs = sum(a[k] * x[k] for k in range(n))
        rhs = sum(abar[k] * y[k] for k in range(n))
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    assert worst < 1e-12

    # independent conjugate-norm evaluation, bit-identical to dual_norm
    def reference_norm(values, q):
        if math.isinf(q):
            best = 0.0
            for v in values:
                if abs(v) > best:
                    best = abs(v)
            return best
        total = 0.0
        for v in values:
            total += abs(v) ** q
        return total ** (1.0 / q)

    for p in (1, 1.5, 2, 3):
        q = Exponent(p).q
        for _ in range(50):
            n = rng.randrange(1, 65)
            a = FiniteSequence([rng.uniform(-1.0, 1.0) for _ in range(n)])
            expected = reference_norm(beta_dual_transform(a, order).as_floats(), q)
            assert dual_norm(a, order, p) == expected
    _finish(4, started, 10.0, f"200 pairs, max residual {worst:.2e}; dual norms bit-identical")


def test_criterion_5_master_consistency():
    started = time.perf_counter()
    rng = random.Random(1005)
    orders = [0.3, 0.5, 2 / 3, 1.5]
    worst = 0.0
    for trial in range(50):
        order = orders[trial % len(orders)]
        bw = rng.randrange(1, 6)
        offsets = list(range(-bw, bw + 1))
        diagonals = [[rng.uniform(-1.0, 1.0) for _ in range(32)] for _ in offsets]
        A = MatrixSource.banded(offsets, diagonals)
        window = hat_matrix(A, order, 32, 64)
        depth = max(len(r) for r in window.rows)
        n = rng.randrange(1, 33)
        x = FiniteSequence([rng.uniform(-1.0, 1.0) for _ in range(n)])
        xf = x.as_floats()
        y = forward_transform(x, order, depth)
        for row_index in range(32):
            row = A.row(row_index)
            lhs = sum(v * (xf[j] if j < n else 0.0) for j, v in enumerate(row))
            rhs = sum(float(v) * y[j] for j, v in enumerate(window.rows[row_index]))
            rel = abs(lhs - rhs) / max(1.0, abs(lhs))
            worst = max(worst, rel)
    assert worst < 1e-11
    _finish(5, started, 30.0, f"50 banded windows, max per-entry error {worst:.2e}")


def test_criterion_6_operator_norm_agreement():
    started = time.perf_counter()
    rng = random.Random(1006)
    orders = [0.4, 0.5, 2 / 3, 1.2]
    ps = [1, 1.5, 2, "inf"]
    worst = 0.0
    for trial in range(20):
        order = orders[trial % len(orders)]
        p = ps[trial % len(ps)]
        if trial % 2 == 0:
            rows = [[rng.uniform(-1.0, 1.0) for _ in range(12)] for _ in range(12)]
            A = MatrixSource.dense_window(rows)
        else:
            bw = rng.randrange(1, 4)
            offsets = list(range(-bw, bw + 1))
            diagonals = [[rng.uniform(-1.0, 1.0) for _ in range(12)] for _ in offsets]
            A = MatrixSource.banded(offsets, diagonals)
        norm = opnorm_to_linf(A, order, p, 12, 16)
        report = mnc_c0(A, order, p, r_grid=[0, 1, 2, 3], row_count=12, column_bound=16)
        gap = abs(norm - report.grid.values[0])
        worst = max(worst, gap / max(1.0, norm))
        assert gap <= 1e-12 * max(1.0, norm)
    _finish(6, started, 10.0, f"20 windows, max normalized gap {worst:.2e}")


def test_criterion_7_compactness_verdict_suite():
    started = time.perf_counter()

    # finite rank: compact under every applicable criterion
    rows = [[1.0, 2.0, 0.5], [0.25, -1.0]] + [[] for _ in range(14)]
    FR = MatrixSource.dense_window(rows, row_bound=2)
    verdicts = []
    for item in (1, 2, 3, 4):
        verdicts.append(table_criterion(item, FR, HALF, p=2, r_grid=range(0, 14, 2),
                                        row_count=16, column_bound=8).verdict)
    for item in (5, 6):
        verdicts.append(table_criterion(item, FR, HALF, r_grid=range(0, 14, 2),
                                        row_count=16, column_bound=8).verdict)
    verdicts.append(table_criterion(7, FR, HALF, m_grid=range(2, 14, 2),
                                    row_count=16, column_bound=8).verdict)
    verdicts.append(criterion_linf_domain(FR, HALF, r_grid=range(0, 14, 2),
                                          row_count=16, column_bound=8).verdict)
    assert verdicts == ["compact"] * 8

    # identity-derived hat window: noncompact under T1, T3, T7, LINF-DOMAIN
    tri = triangle_source(HALF, 64)
    t1 = table_criterion(1, tri, HALF, p=2, r_grid=range(0, 64, 8),
                         row_count=64, column_bound=64)
    t3 = table_criterion(3, tri, HALF, p=2, r_grid=range(0, 64, 8),
                         row_count=64, column_bound=64)
    t7 = table_criterion(7, tri, HALF, m_grid=range(4, 44, 4),
                         row_count=64, column_bound=48)
    dom = criterion_linf_domain(tri, HALF, r_grid=range(0, 64, 8),
                                row_count=64, column_bound=64)
    assert [t1.verdict, t3.verdict, t7.verdict, dom.verdict] == ["noncompact"] * 4
    assert t1.upper_value == 1.0 and dom.upper_value == 1.0

    # geometric decay, row direction: values match the closed form 2^-r
    target = [[Fraction(0)] * k + [Fraction(1, 2**k)] for k in range(54)]
    G = pre_inverted_source(target, HALF)
    rows_report = mnc_c0(G, HALF, 2, r_grid=range(0, 54, 6), row_count=54, column_bound=54)
    assert rows_report.verdict == "compact"
    for r, v in zip(rows_report.grid.r_values, rows_report.grid.values):
        assert abs(v - 2.0 ** (-r)) < 1e-8

    # geometric decay, column direction: l2 tails match the closed form
    target = [[Fraction(1, 2**k) for k in range(r + 1)] for r in range(52)]
    C = pre_inverted_source(target, HALF)
    cols_report = criterion_linf_target(C, HALF, 2, r_grid=range(0, 52, 5),
                                        row_count=52, column_bound=52)
    assert cols_report.verdict == "compact"
    for r, v in zip(cols_report.grid.r_values, cols_report.grid.values):
        assert abs(v - math.sqrt(4.0 ** (-(r + 1)) / 0.75)) < 1e-8

    # absolute column tails at base 3 match (1/2) * 3^-r
    target = [[Fraction(1, 3**k) for k in range(r + 1)] for r in range(40)]
    D = pre_inverted_source(target, HALF)
    dom_report = criterion_linf_domain(D, HALF, r_grid=range(0, 40, 4),
                                       row_count=40, column_bound=40)
    assert dom_report.verdict == "compact"
    for r, v in zip(dom_report.grid.r_values, dom_report.grid.values):
        assert abs(v - 0.5 * 3.0 ** (-r)) < 1e-8

    _finish(7, started, 60.0,
            "finite-rank compact x8, identity noncompact x4, geometric oracles within 1e-8")


def test_criterion_8_bound_factors():
    started = time.perf_counter()
    tri = triangle_source(HALF, 16)
    FR = MatrixSource.dense_window([[1.0, 2.0], [0.5]], row_bound=2)
    for A, rc, cb in ((tri, 16, 16), (FR, 12, 6)):
        c_report = mnc_c(A, HALF, 2, r_grid=range(0, rc - 2, 2), row_count=rc, column_bound=cb)
        assert c_report.upper_value == 2.0 * c_report.lower_value
        l1_report = mnc_l1(A, HALF, 2, r_grid=range(0, rc - 2, 2), row_count=rc, column_bound=cb)
        assert l1_report.upper_value == 4.0 * l1_report.lower_value
    _finish(8, started, 5.0, "factor-2 and factor-4 bounds hold exactly")


def test_criterion_9_subset_sup_oracle():
    started = time.perf_counter()
    rng = random.Random(1009)
    equal_cases = 0
    for trial in range(100):
        nonneg = trial % 2 == 0
        p = (2, 1.5, "inf")[trial % 3]
        if nonneg:
            # nonnegative hat rows via pre-inversion of a nonnegative target
            target = [[Fraction(rng.randrange(0, 100), 100) for _ in range(8)] for _ in range(10)]
            A = pre_inverted_source(target, HALF)
            order = HALF
        else:
            A = MatrixSource.dense_window(
                [[rng.uniform(-1.0, 1.0) for _ in range(8)] for _ in range(10)]
            )
            order = 0.7
        ex_value, ex_cert = opnorm_to_l1(A, order, p, 10, 8, method="exhaustive")
        gr_value, gr_cert = opnorm_to_l1(A, order, p, 10, 8, method="greedy")
        assert gr_value <= ex_value * (1.0 + 1e-12)
        assert ex_cert and gr_cert
        if nonneg:
            assert math.isclose(gr_value, ex_value, rel_tol=1e-12)
            equal_cases += 1
    assert equal_cases == 50
    _finish(9, started, 60.0, "greedy <= exhaustive on 100 windows, equality on sign-aligned half")
