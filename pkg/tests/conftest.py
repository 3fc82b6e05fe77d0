import sys
import os

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from arpopt import set_precision


@pytest.fixture(autouse=True)
def default_precision():
    """Every test starts from the library default of 512 mantissa bits."""
    set_precision(512)
    yield
    set_precision(512)
