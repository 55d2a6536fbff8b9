import functools
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from quasirandom.groups import make_group
from quasirandom.setfun import Subset

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

# groups with n <= 200 used across the suite
SMALL = ["cyclic:1", "cyclic:2", "cyclic:7", "cyclic:12", "dihedral:3", "dihedral:6", "sym:3", "sym:4", "alt:4", "alt:5", "psl2:5", "psl2:7", "cyclic:3*sym:3"]


@functools.lru_cache(maxsize=None)
def group(descriptor: str):
    return make_group(descriptor)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_subset(G, rng, density=None):
    if density is None:
        density = rng.uniform(0.05, 0.95)
    return Subset.random(G.order, density, rng)


def catalog(max_n: int, max_classes: int | None = None) -> list[str]:
    """Descriptors of every catalog group with order at most ``max_n``
    (optionally with at most ``max_classes`` conjugacy classes)."""
    from math import factorial

    from sympy import primerange

    out = [f"cyclic:{n}" for n in range(1, max_n + 1)]
    out += [f"dihedral:{n}" for n in range(3, max_n // 2 + 1)]
    out += [f"sym:{m}" for m in range(2, 9) if factorial(m) <= max_n]
    out += [f"alt:{m}" for m in range(3, 9) if factorial(m) // 2 <= max_n]
    out += [f"psl2:{q}" for q in primerange(5, 40) if q * (q * q - 1) // 2 <= max_n]
    if max_classes is not None:
        out = [d for d in out if _class_count(d) <= max_classes]
    return out


def _class_count(descriptor: str) -> int:
    kind, n = descriptor.split(":")
    n = int(n)
    if kind == "cyclic":
        return n
    if kind == "dihedral":
        return (n + 6) // 2 if n % 2 == 0 else (n + 3) // 2
    from quasirandom.groups import conjugacy_classes

    return len(conjugacy_classes(group(descriptor)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
