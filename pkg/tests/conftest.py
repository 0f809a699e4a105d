import pytest

from progcode import EncoderParams


@pytest.fixture(scope="session")
def params1() -> EncoderParams:
    return EncoderParams.create(1)


@pytest.fixture(scope="session")
def params2() -> EncoderParams:
    return EncoderParams.create(2)


@pytest.fixture(scope="session")
def params3() -> EncoderParams:
    return EncoderParams.create(3)
