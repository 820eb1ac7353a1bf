import numpy as np
import pytest
from hypothesis import settings

from proframes.frames import Frame
from proframes.hilbert_module import ModuleSpace, Multiplier
from proframes.prosystem import SeminormChain

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

SQ3 = np.sqrt(3.0)


def scalar_frame(vectors, chain=None):
    """A frame over the one-level chain C (or any chain of 1x1 blocks, same vector in each block)."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    chain = chain or SeminormChain.single((1,))
    space = ModuleSpace(chain, vectors.shape[1])
    hs = [
        Multiplier.from_blocks(space, [v.reshape(-1, 1) for _ in chain.top_shape])
        for v in vectors
    ]
    return Frame(space, hs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def mercedes():
    return scalar_frame([[1, 0], [-0.5, SQ3 / 2], [-0.5, -SQ3 / 2]])


@pytest.fixture
def two_ones():
    return scalar_frame([[1], [1]])


@pytest.fixture
def three_level_chain():
    # (2) <- (2, 1) <- (3, 2, 1)
    return SeminormChain(((2,), (2, 1), (3, 2, 1)), ((0,), (1, 2)))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, title, detail = results[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{n:2d}] {title}: {detail}")
