import math
import warnings

import numpy as np
import pytest

from schottkylab.schottky import cylinder_group, group_from_matrices, symmetric_group, width_for_translation_length

ACCEPTANCE_LINES = []


def integer_group(pairs):
    """Generators [[y, -xy-1], [1, -x]]: unit isometric circles at x and y."""
    return group_from_matrices([[[y, -x * y - 1], [1, -x]] for x, y in pairs])


@pytest.fixture(scope="session")
def sym2():
    """Symmetric p=2 group whose generators translate by 4."""
    return symmetric_group(2, width_for_translation_length(4.0))


@pytest.fixture(scope="session")
def cyl2():
    return cylinder_group(2.0)


@pytest.fixture(scope="session")
def delta2(sym2):
    from schottkylab.zeta import eigenvalue_dimension

    return eigenvalue_dimension(sym2)


@pytest.fixture(scope="session")
def spec2(sym2):
    from schottkylab.words import length_spectrum

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return length_spectrum(sym2, 24.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
