"""Acceptance criteria 1-11, one test each, each printing a PASS/FAIL line.

The random suite is 100 centered polytopes in dimensions 2-4 with at most
12 facets, drawn by ``suite_specs(100, seed=1)``.
"""

import math
import time

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES, SQRT3
from conevol import (
    Subspace,
    build_from_vertices,
    check_recursion,
    check_scc,
    check_u_inequality,
    cone_volume_measure,
    detect_direct_sum_split,
    divergence_identity,
    first_moment,
    generate,
    is_constant_section,
    is_parallelotope,
    run_verify,
    sigma_k_power,
    translate,
    u_functional,
    xray_piecewise,
)
from conevol.generators import perturbed, random_product_spec, suite_specs
from conevol.scc import EQUALITY
from conevol.ufunctional import sigma_k_power_ordered

SUITE_SEED = 1
SUITE_SIZE = 100


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def suite():
    start = time.perf_counter()
    specs = suite_specs(SUITE_SIZE, seed=SUITE_SEED)
    polys = [generate(s) for s in specs]
    return {"specs": specs, "polys": polys, "build_time": time.perf_counter() - start}


@pytest.fixture(scope="module")
def reports(suite):
    return [run_verify(P, seed=i, descriptor=str(s))
            for i, (s, P) in enumerate(zip(suite["specs"], suite["polys"]))]


@pytest.fixture(scope="module")
def products():
    rng = np.random.default_rng(SUITE_SEED + 100)
    out = []
    for i in range(20):
        spec = random_product_spec((2, 3, 4)[i % 3], int(rng.integers(2**31 - 1)))
        first = spec.factors[0].dim
        P = generate(spec)
        out.append((spec, P, Subspace.coordinate(P.dim, range(first)),
                    Subspace.coordinate(P.dim, range(first, P.dim))))
    return out


def test_criterion_1_volume_decomposition(suite):
    start = time.perf_counter()
    worst = 0.0
    for P in suite["polys"]:
        mu = cone_volume_measure(P)
        worst = max(worst, abs(mu.total - P.volume) / P.volume)
    elapsed = suite["build_time"] + time.perf_counter() - start
    facets = max(len(P.facets) for P in suite["polys"])
    ok = worst <= 1e-12 and elapsed < 10 and len(suite["polys"]) == SUITE_SIZE and facets <= 12
    record(1, ok, f"worst relative residual {worst:.2e}, max facets {facets}, {elapsed:.2f}s")


def test_criterion_2_scc(suite, products):
    start = time.perf_counter()
    violations = sum(len(check_scc(P, tol=1e-9).violations) for P in suite["polys"])
    mismatched, unwitnessed, surviving = [], 0, 0
    for spec, P, L1, L2 in products:
        rows = [r for r in check_scc(P).rows if r.status == EQUALITY]
        unwitnessed += sum(r.witness is None for r in rows)
        exact = (len(rows) == 2 and all(
            min(r.subspace.distance(L) for L in (L1, L2)) <= 1e-8 and r.subspace.dim in (L1.dim, L2.dim)
            for r in rows))
        if not exact:
            mismatched.append(str(spec))
        Q = perturbed(P, seed=len(mismatched) + surviving)
        surviving += sum(r.status == EQUALITY for r in check_scc(Q).rows)
    elapsed = time.perf_counter() - start
    ok = violations == 0 and not mismatched and unwitnessed == 0 and surviving == 0 and elapsed < 60
    record(2, ok, f"{violations} violations on suite; products: {len(mismatched)} mismatched equality "
                  f"sets, {unwitnessed} unwitnessed, {surviving} equalities after perturbation; "
                  f"{elapsed:.1f}s")


def test_criterion_3_u_inequality(suite):
    below, strict_fail, ratios = 0, [], []
    for P in suite["polys"]:
        rep = check_u_inequality(P)
        below += rep.u < rep.bound - 1e-9 * rep.volume
        if not rep.parallelotope:
            ratios.append(rep.ratio)
            if rep.ratio < 1 + 1e-6:
                strict_fail.append(rep.ratio)
    par_bad = 0
    for i in range(20):
        P = generate(f"parallelotope:dim={(2, 3, 4)[i % 3]}:seed={1000 + i}")
        rep = check_u_inequality(P)
        par_bad += not (abs(rep.ratio - 1) <= 1e-9 and is_parallelotope(P))
    square = generate("named:cube:dim=2")
    cube = generate("named:cube:dim=3")
    tri = generate("named:triangle")
    witnesses = []
    for P, expect in ((square, 2 * math.sqrt(2)), (cube, (1024 / 9) ** (1 / 3))):
        mu = cone_volume_measure(P)
        brute = sigma_k_power_ordered(mu, P.dim) ** (1 / P.dim)
        witnesses += [abs(u_functional(mu) - expect), abs(brute - expect)]
    witnesses.append(abs(check_u_inequality(tri).ratio - 2 / SQRT3))
    ok = below == 0 and not strict_fail and par_bad == 0 and max(witnesses) <= 1e-9
    record(3, ok, f"{below} below bound, {par_bad}/20 parallelotopes off equality, "
                  f"min non-parallelotope ratio {min(ratios):.6f}, worst witness error {max(witnesses):.1e}")


def test_criterion_4_ordered_oracle(suite):
    worst, count = 0.0, 0
    for P in suite["polys"]:
        mu = cone_volume_measure(P)
        if len(mu) > 10 or P.dim > 3:
            continue
        count += 1
        n = P.dim
        brute = oracles.ordered_tuple_sum(mu.normals, mu.weights, n)
        worst = max(worst, abs(sigma_k_power(mu, n) - brute) / brute)
    record(4, worst <= 1e-12 and count > 0, f"{count} instances, worst relative difference {worst:.1e}")


def test_criterion_5_centro_affine(suite):
    rng = np.random.default_rng(SUITE_SEED + 5)
    worst = 0.0
    for P in suite["polys"][:50]:
        n = P.dim
        while True:
            T = rng.normal(size=(n, n))
            if np.linalg.cond(T) < 100:
                break
        T /= abs(np.linalg.det(T)) ** (1 / n)
        U = u_functional(cone_volume_measure(P))
        UT = u_functional(cone_volume_measure(build_from_vertices(P.vertices @ T.T)))
        worst = max(worst, abs(UT - U) / U)
    record(5, worst <= 1e-8, f"50 pairs, worst relative change {worst:.1e}")


def test_criterion_6_divergence_identity(reports):
    worst, count = 0.0, 0
    for rep in reports:
        for d in rep.directions:
            count += 1
            worst = max(worst, d.divergence.residual / rep.volume)
    per_instance = min(sum(d.source.startswith("random") for d in r.directions) for r in reports)
    tri = divergence_identity(generate("named:triangle"), [1, 0])
    tri_ok = abs(tri.lhs - SQRT3 / 2) <= 1e-12 and abs(tri.rhs - SQRT3 / 2) <= 1e-12
    ok = worst <= 1e-8 and tri_ok and per_instance == 20
    record(6, ok, f"{count} directions, worst residual {worst:.1e} V, triangle lhs {tri.lhs:.15f} "
                  f"rhs {tri.rhs:.15f}")


def test_criterion_7_gradient_moment(suite, reports):
    worst, disagree, equal_cases = -math.inf, [], 0
    for P, rep in zip(suite["polys"], reports):
        for d in rep.directions:
            g = d.gradient_moment / rep.volume
            worst = max(worst, g)
            eq = abs(g) <= 1e-8
            equal_cases += eq
            const = is_constant_section(P, Subspace(d.direction[:, None]))
            if eq != const:
                disagree.append((rep.input, d.source, g))
    ok = worst <= 1e-10 and not disagree
    record(7, ok, f"max G/V {worst:.1e}, {equal_cases} equality directions, "
                  f"{len(disagree)} disagreements with constant-section test")


def test_criterion_8_interpolation(reports):
    held = max(d.held_out_residual for r in reports for d in r.directions)
    integral = max(d.integral_residual for r in reports for d in r.directions)
    ok = held <= 1e-8 and integral <= 1e-9
    record(8, ok, f"worst held-out residual {held:.1e} of max f, worst integral error {integral:.1e}")


def test_criterion_9_first_moment(reports):
    worst = max(abs(d.first_moment) / (r.volume * d.diameter) for r in reports for d in r.directions)
    shifted = build_from_vertices([[0, 0], [3, 0], [0, 3]])
    m = first_moment(xray_piecewise(shifted, [1, 0]))
    P = translate(generate("sphere:dim=3:size=7:seed=5"), [0.2, 0, 0])
    m3 = first_moment(xray_piecewise(P, [1, 0, 0]))
    ok = worst <= 1e-9 and m > 1e-6 * shifted.volume * shifted.diameter and abs(m3) > 1e-3
    record(9, ok, f"worst |first moment| {worst:.1e} V diam; shifted triangle {m:.6f}, shifted 3-polytope {m3:.6f}")


def test_criterion_10_split_equivalence(products):
    agree, cases = 0, 0
    details = []
    for i, (spec, P, L1, _) in enumerate(products):
        Q = perturbed(P, seed=i)
        for body, expected in ((P, True), (Q, False)):
            const = is_constant_section(body, L1)
            split = detect_direct_sum_split(body, L1) is not None
            cases += 1
            agree += const == split
            if const != expected or split != expected:
                details.append((str(spec), expected, const, split))
    ok = agree == cases == 40 and not details
    record(10, ok, f"{agree}/{cases} agree, {len(details)} unexpected outcomes")


def test_criterion_11_recursion(suite):
    worst = math.inf
    for P in suite["polys"]:
        for m in check_recursion(P):
            worst = min(worst, m.margin / m.scale)
    par = 0.0
    for i in range(20):
        P = generate(f"parallelotope:dim={(2, 3, 4)[i % 3]}:seed={2000 + i}")
        par = max(par, max(abs(m.margin) / m.scale for m in check_recursion(P)))
    ok = worst >= -1e-9 and par <= 1e-9
    record(11, ok, f"min relative margin {worst:.2e}, worst parallelotope |margin| {par:.1e}")
