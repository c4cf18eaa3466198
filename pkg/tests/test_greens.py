import math

import numpy as np
import pytest

from invoreduce.greens import (
    DiskSpec,
    KernelFn,
    KernelSingularity,
    SeriesTruncation,
    apply_R_heat_termwise,
    biharm_apply_R,
    biharm_discrepancy,
    biharm_family,
    biharm_g1,
    biharm_navier_g3,
    eigen_norm_sq,
    g1_poisson_disk,
    g2_helmholtz_disk,
    g3_compose,
    g3_heat_disk,
    g4_heat_disk,
    grid_values,
    heat_R_multipliers,
    printed_biharm_g2,
    printed_biharm_g4,
    printed_biharm_g6,
    write_grid_csv,
)
from invoreduce.numverify import fd_apply_R_heat, hg_apply
from invoreduce.specfun import bessel_j, bessel_zero

SPEC = DiskSpec(1.0, 1.0, 0.5)
# pi * J_1(mu_01)^2 from the arbitrary-precision oracle
NORM_01 = 0.8467035918146152


def lap5(f, x, y, h):
    return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / (h * h)


def test_spec_validation():
    with pytest.raises(ValueError):
        DiskSpec(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        DiskSpec(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        SeriesTruncation(-1, 3)


# ------------------------------------------------------------ Poisson


def test_g1_vanishes_on_boundary():
    G = g1_poisson_disk(DiskSpec(1.7, 1.0, 0.5))
    rng = np.random.default_rng(0)
    phi = rng.uniform(0, 2 * np.pi, 50)
    rs, ps = rng.uniform(0, 1.6, 50), rng.uniform(0, 2 * np.pi, 50)
    assert np.max(np.abs(G.polar(1.7, phi, rs, ps))) <= 1e-14


def test_g1_symmetric_and_singular():
    G = g1_poisson_disk(SPEC)
    a, b = (0.3, 1.0), (0.7, -2.0)
    assert G(a, b) == pytest.approx(G(b, a), rel=1e-14)
    with pytest.raises(KernelSingularity, match="kernel singularity"):
        G(a, a)
    # source at the center is allowed
    assert G((0.5, 0.0), (0.0, 0.0)) == pytest.approx(math.log(0.5) / (2 * math.pi), rel=1e-14)


def test_g1_harmonic_away_from_source():
    G = g1_poisson_disk(SPEC)
    sx, sy = 0.2, -0.1
    f = lambda x, y: G.xy(x, y, sx, sy)
    for x, y in ((0.6, 0.3), (-0.4, 0.5), (0.1, -0.7)):
        scale = abs(f(x, y))
        assert abs(lap5(f, x, y, 1e-3)) <= 1e-4 * max(scale, 1.0)


def test_hg1_of_one_at_origin():
    u = hg_apply(g1_poisson_disk(SPEC), lambda r, p: np.ones_like(r), (np.array([0.0]), np.array([0.0])))
    assert u[0] == pytest.approx(-0.25, abs=1e-3)


# ----------------------------------------------------------- Helmholtz


def test_norm_value():
    mu = bessel_zero(0, 1)
    assert eigen_norm_sq(0, mu, 1.0) == pytest.approx(NORM_01, abs=1e-14)


def w11(r, p):
    return bessel_j(1, bessel_zero(1, 1) * r) * np.cos(p)


def test_eigen_load():
    G = g2_helmholtz_disk(SPEC, SeriesTruncation(8, 8))
    mu = bessel_zero(1, 1)
    a, b = SPEC.alpha, SPEC.beta
    f = lambda r, p: (a * a * mu * mu + 2 * a * b) * w11(r, p)
    r, p = np.meshgrid(np.linspace(0.05, 0.95, 10), np.linspace(0, 2 * np.pi, 16, endpoint=False), indexing="ij")
    u = hg_apply(G, f, (r, p))
    ex = w11(r, p)
    assert np.linalg.norm(u - ex) / np.linalg.norm(ex) <= 1e-6


def test_g2_boundary_and_convergence():
    G = g2_helmholtz_disk(SPEC)
    assert abs(G((1.0, 0.4), (0.5, 1.0))) <= 1e-14
    field = (np.array([0.3, 0.5, 0.8]), np.array([0.1, 2.0, -1.0]))
    src = (np.array([0.6, 0.2, 0.45]), np.array([1.0, 0.3, 2.5]))
    vals = [g2_helmholtz_disk(SPEC, SeriesTruncation(20, m)).polar(*field, *src) for m in (5, 10, 20, 40)]
    changes = [np.max(np.abs(b - a)) for a, b in zip(vals, vals[1:])]
    assert changes[0] > changes[1] > changes[2]


def test_R_multipliers():
    trunc = SeriesTruncation(3, 2)
    c, s = heat_R_multipliers(DiskSpec(1.0, 2.0, 0.0), trunc)
    assert np.array_equal(c, s)
    c, s = heat_R_multipliers(SPEC, trunc)
    assert np.allclose(c - s, 2 * SPEC.beta)
    R = apply_R_heat_termwise(SPEC, trunc)
    assert np.all(R.modes.c_sin[R.modes.n == 0] == 0)


def test_R_termwise_matches_finite_differences():
    rng = np.random.default_rng(11)
    G2 = g2_helmholtz_disk(SPEC)
    RG = apply_R_heat_termwise(SPEC)
    fr, fp = rng.uniform(0.2, 0.8, 8), rng.uniform(0, 2 * np.pi, 8)
    sr, sp = rng.uniform(0.2, 0.8, 8), fp + np.pi  # well separated
    assert np.max(np.abs(RG.polar(fr, fp, sr, sp) - fd_apply_R_heat(G2, SPEC, (fr, fp), (sr, sp)))) <= 1e-4


# --------------------------------------------------------- compositions


def test_composition_with_mollifier():
    eps = 0.01

    def bump(x, y, sx, sy):
        return np.exp(-((x - sx) ** 2 + (y - sy) ** 2) / (eps * eps)) / (math.pi * eps * eps)

    G2 = g2_helmholtz_disk(SPEC, SeriesTruncation(10, 10))
    comp = g3_compose(G2, KernelFn("mollifier", func=bump, spec=SPEC), SPEC)
    src = (0.4, 0.7)
    for field in ((0.2, 2.0), (0.7, -1.0), (0.5, 3.5)):
        assert comp(field, src) == pytest.approx(G2(field, src), rel=1e-3)


def test_g3_finite_and_zero_on_boundary():
    G3 = g3_heat_disk(SPEC)
    vals = G3.polar(np.array([0.2, 0.5, 0.9, 1.0]), np.array([0.0, 1.0, 2.0, 3.0]), 0.5, 0.2)
    assert np.all(np.isfinite(vals))
    assert abs(vals[-1]) <= 1e-6 * np.max(np.abs(vals))


def test_navier_composition():
    G1 = g1_poisson_disk(SPEC)
    nav = g3_compose(G1, G1, SPEC)
    r = np.array([0.0, 0.3, 0.6, 0.9])
    u = hg_apply(nav, lambda r, p: np.ones_like(r), (r, np.zeros_like(r)))
    assert np.max(np.abs(u - (1 - r**2) * (3 - r**2) / 64)) <= 1e-3


def test_g4_boundary_and_poisson_degeneration():
    G4 = g4_heat_disk(SPEC)
    inner = abs(G4((0.3, 0.5), (0.6, 1.0)))
    assert abs(G4((1.0, 0.5), (0.6, 1.0))) <= 1e-6 * inner
    spec0 = DiskSpec(1.0, 2.0, 0.0)
    r = np.array([0.0, 0.3, 0.6, 0.9])
    u = hg_apply(g4_heat_disk(spec0), lambda r, p: np.ones_like(r), (r, np.full_like(r, 0.7)))
    assert np.max(np.abs(u - (r**2 - 1) / (4 * spec0.alpha))) <= 1e-3


def test_kernels_deterministic():
    G4 = g4_heat_disk(SPEC, SeriesTruncation(6, 6))
    a = G4.polar(np.array([0.3, 0.6]), np.array([0.1, 2.0]), 0.4, 1.0)
    b = G4.polar(np.array([0.3, 0.6]), np.array([0.1, 2.0]), 0.4, 1.0)
    assert np.array_equal(a, b)


# --------------------------------------------------------- biharmonic


def test_biharm_g1_values_and_laplacian():
    G = biharm_g1()
    assert G.xy(1.0, 0.0, 0.0, 0.0) == 0.0
    xi = (0.1, -0.2)
    f = lambda x, y: G.xy(x, y, *xi)
    for r in (0.3, 0.7, 1.5):
        x, y = xi[0] + r * math.cos(0.4), xi[1] + r * math.sin(0.4)
        assert abs(lap5(f, x, y, 1e-3 * r) - (math.log(r) + 1) / (2 * math.pi)) <= 1e-6
        assert abs(G.laplacian(x, y, *xi) - (math.log(r) + 1) / (2 * math.pi)) <= 1e-14


@pytest.mark.parametrize("mu,nu", [(0.0, 0.0), (-1.3, 2.0), (0.7, -0.4)])
def test_family_biharmonic_off_diagonal(mu, nu):
    G = biharm_family(mu, nu)
    xi = (0.0, 0.3)
    f = lambda x, y: G.xy(x, y, *xi)
    for r in (0.5, 0.9, 1.5):
        x, y = xi[0] + r * math.cos(1.1), xi[1] + r * math.sin(1.1)
        h = 1e-2 * r
        bilap = lap5(lambda a, b: lap5(f, a, b, h), x, y, h)
        assert abs(bilap) <= 1e-4


def test_family_instances():
    assert biharm_family(0.0, 0.0).xy(0.3, 0.4, 1.0, -1.0) == biharm_g1().xy(0.3, 0.4, 1.0, -1.0)
    rho = 1.7
    G3 = biharm_navier_g3(rho)
    assert float(G3.xy(rho, 0.0, 0.0, 0.0)) == pytest.approx(rho * rho * math.log(rho) / (4 * math.pi), rel=1e-14)


def test_biharm_R_on_axis_matches_printed():
    spec = DiskSpec(1.0, 3.0, 2.0)
    RG = biharm_apply_R(spec, biharm_g1())
    printed = printed_biharm_g2(spec)
    for x, sx, sy in ((0.4, -0.3, 0.8), (2.0, 0.5, -0.1)):
        assert RG.xy(x, 0.0, sx, sy) == pytest.approx(float(printed.xy(x, 0.0, sx, sy)), abs=1e-12)


def test_biharm_R_off_axis():
    a = b = 1.5
    RG = biharm_apply_R(DiskSpec(1.0, a, b), biharm_g1())
    eta, xi = (0.3, 0.4), (-0.2, 0.1)
    d = math.dist(eta, xi)
    dA = math.dist((eta[0], -eta[1]), xi)
    assert float(RG.xy(*eta, *xi)) == pytest.approx(b * (math.log(dA) - math.log(d)) / (2 * math.pi), rel=1e-12)
    RG0 = biharm_apply_R(DiskSpec(1.0, 2.0, 0.0), biharm_g1())
    assert float(RG0.xy(*eta, *xi)) == pytest.approx(-2.0 * (math.log(d) + 1) / (2 * math.pi), rel=1e-12)
    with pytest.raises(ValueError):
        biharm_apply_R(SPEC, g1_poisson_disk(SPEC))


def test_printed_forms_and_discrepancy():
    rho, spec = 1.0, DiskSpec(1.0, 3.0, 2.0)
    assert float(printed_biharm_g4(rho).xy(0.5, 0.0, 0.0, 0.0)) == pytest.approx(math.log(0.5) / (2 * math.pi))
    assert float(printed_biharm_g6(-1.0).xy(0.5, 0.0, 0.0, 0.0)) == pytest.approx(math.log(0.5) / (2 * math.pi))
    pts = [((0.3, 0.0), (0.1, 0.2)), ((0.3, 0.4), (0.1, 0.2)), ((-0.5, 0.2), (0.3, -0.6))]
    rep = biharm_discrepancy(spec, biharm_g1(), printed_biharm_g2(spec), pts)
    assert rep["on_axis_pairs"] == 1 and rep["on_axis_max_abs_diff"] <= 1e-12
    assert rep["off_axis_pairs"] == 2 and rep["off_axis_max_abs_diff"] > 1e-3


def test_csv_export(tmp_path):
    r, phi = np.array([0.25, 0.75]), np.array([0.0, np.pi])
    vals = grid_values(g1_poisson_disk(SPEC), r, phi, (0.5, 0.5))
    out = tmp_path / "g.csv"
    write_grid_csv(out, r, phi, vals)
    lines = out.read_text().splitlines()
    assert lines[0] == "r,phi,value"
    assert len(lines) == 5
    assert lines[2].startswith("0.25,3.1415926535897931,")
    assert float(lines[3].split(",")[2]) == vals[1, 0]
