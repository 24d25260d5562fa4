"""Shared fixtures and the acceptance summary hook."""

from __future__ import annotations

from collections import defaultdict

import pytest
from _reference import C_K, N_MODES, N_SPACE, P0, P1, REF, T0

from fracwear.evolution import LoadProfile, ModelParams
from fracwear.initial_state import InitialState, prescribed_initial_profile, project_initial
from fracwear.spectrum import KernelSpec, compute_spectrum

# {{{ reference configuration


@pytest.fixture(scope="session")
def log_kernel() -> KernelSpec:
    return KernelSpec.log_kernel(REF["a"], C_K)


@pytest.fixture(scope="session")
def basis(log_kernel):
    return compute_spectrum(log_kernel, N_SPACE)


@pytest.fixture(scope="session")
def ref_params() -> ModelParams:
    return ModelParams(**REF)


@pytest.fixture(scope="session")
def ref_load() -> LoadProfile:
    return LoadProfile.transitional_cosine(P0, P1, T0)


@pytest.fixture(scope="session")
def semicircle(basis) -> InitialState:
    return prescribed_initial_profile("semicircle", P0, basis.grid)


@pytest.fixture(scope="session")
def semicircle_coeffs(basis, semicircle):
    return project_initial(semicircle, basis, N_MODES)


@pytest.fixture(scope="session")
def skewed(basis, semicircle) -> InitialState:
    """Semicircle tilted by ``1 + 0.3 x``: same load, both parities present."""
    g = basis.grid
    return InitialState(
        grid=g,
        p0=semicircle.p0 * (1.0 + 0.3 * g.nodes / g.a),
        delta0=0.0,
        load=P0,
        square_integrable=True,
    )


@pytest.fixture(scope="session")
def skewed_coeffs(basis, skewed):
    return project_initial(skewed, basis, N_MODES)


# }}}


# {{{ acceptance summary

_OUTCOMES: dict[int, list[tuple[str, str]]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    crit = int(marker.args[0])
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            state = "known-fail" if rep.skipped else "xpass"
        else:
            state = rep.outcome
        _OUTCOMES[crit].append((item.name, state))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_OUTCOMES):
        results = _OUTCOMES[crit]
        states = [s for _, s in results]
        verdict = "PASS" if all(s == "passed" for s in states) else "FAIL"
        detail = ", ".join(f"{states.count(s)} {s}" for s in dict.fromkeys(states))
        tr.write_line(f"criterion {crit}: {verdict} ({detail})")
        for name, state in results:
            if state != "passed":
                tr.write_line(f"    {state}: {name}")


# }}}
