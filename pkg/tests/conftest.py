import random

import hypothesis
import pytest

hypothesis.settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    derandomize=True,
)
hypothesis.settings.load_profile("suite")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0x5EED)
