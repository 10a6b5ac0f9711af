import pytest

from erw import StepDistribution, moment_set


@pytest.fixture
def rademacher():
    return StepDistribution.rademacher()


@pytest.fixture
def bernoulli03():
    return StepDistribution.bernoulli(0.3)


@pytest.fixture
def uniform01():
    return StepDistribution.uniform(0.0, 1.0)


@pytest.fixture
def skewed_two_point():
    # the documented JSON example: mean 0.2, support {-1, 2}
    return StepDistribution.discrete((-1.0, 2.0), (0.6, 0.4))


@pytest.fixture
def standard_moment_sets(rademacher, bernoulli03, uniform01):
    return {
        "rademacher": moment_set(rademacher),
        "bernoulli": moment_set(bernoulli03),
        "uniform": moment_set(uniform01),
    }
