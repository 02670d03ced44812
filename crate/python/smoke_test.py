"""Smoke test for the herglotz_py extension.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/herglotz_py-*.whl
"""

import math

import herglotz_py as hg


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b, tol)


def test_functions():
    f = hg.HPFunction.periodic()
    close(f(1j), 1j * math.pi / math.tanh(math.pi), 1e-12)
    close(f(0.25 + 1e-30j).real, -math.pi, 1e-12)
    g = hg.HPFunction.represented([(0.0, 1.0), (2.0, 0.5)], a=1.0, b=0.3)
    z = 0.7 + 0.4j
    expected = z + 0.3 + 1 / (0 - z) + 0.5 * (1 / (2 - z) - 2 / 5)
    close(g(z), expected, 1e-12)
    assert g(z).imag > 0
    back = hg.HPFunction.from_json(g.to_json())
    close(back(z), g(z), 0.0)
    w = hg.mobius_to_disk(z)
    close(hg.mobius_to_halfplane(w), z, 1e-12)
    try:
        hg.HPFunction.quasi_periodic([1.0], [1.0, 2.0], [0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("length mismatch accepted")


def test_processes():
    s = hg.sample_poisson(500.0, 1.0, seed=3)
    assert abs(len(s) - 1000) < 150
    assert s.points == sorted(s.points)
    again = hg.PointSample.from_json_line(s.to_json_line())
    assert again.points == s.points
    v = hg.extrapolated_transform(s, 30j, 400.0)
    close(v, math.pi * 1j, 0.6)
    t = hg.truncated_transform(s, 1 + 1j, 400.0)
    c, _ = hg.corrected_transform(s, 1 + 1j, 400.0)
    close(t, c, 1e-9)
    eig = hg.sample_gue_spectrum(200, seed=1)
    assert len(eig) == 200 and eig == sorted(eig)
    assert max(abs(e) for e in eig) < 2.3
    close(hg.tridiagonal_eigenvalues([0.0, 0.0], [1.0])[1], 1.0, 1e-14)
    sk = hg.sample_sine_kernel(30.0, seed=2)
    assert 40 < len(sk) < 80


def test_statistics():
    xs = hg.shift_distribution(hg.HPFunction.periodic(), 1000.0, 20000, seed=7)
    re, im = hg.fit_cauchy_quantile(xs)
    close(re, 0.0, 0.1)
    close(im, math.pi, 0.1)
    ks, p = hg.ks_test_cauchy(xs, 0.0, math.pi)
    assert p > 0.001, (ks, p)
    close(complex(*hg.fit_cauchy_charfn(xs)), math.pi * 1j, 0.15)
    close(hg.estimate_gamma_inverse(xs), math.pi * 1j, 0.15)
    assert hg.ks_two_sample(xs, xs) == 0.0
    close(complex(*hg.predicted_gamma("gue", e0=0.0)), math.pi * 1j, 1e-12)
    # PV integral of the normal density against 1/(v - 0.5), over the density.
    re0, _ = hg.predicted_gamma(
        "diagonal", density={"law": "standard-normal"}, e0=0.5
    )
    close(re0, -1.3075535919720829, 1e-8)
    measure, exact, err = hg.boole_verify([(0.0, 1.0), (3.0, 2.0)], 1.0)
    close(measure, exact, 1e-9 * exact)
    assert err < 1e-9


def test_metrics():
    a = [(0.0, 1.0)]
    b = [(0.5, 1.0)]
    close(hg.wasserstein_circle(a, b), 0.5, 1e-12)
    assert hg.flat_distance(a, b) <= hg.variational_distance(a, b) + 1e-12
    close(hg.variational_distance(a, a), 0.0, 0.0)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok   {name}")
    print("smoke test passed")
