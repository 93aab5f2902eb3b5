import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

from permcluster import Permutation

settings.register_profile(
    "research",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("research")


def permutations_up_to(max_n: int, min_n: int = 1):
    """Strategy drawing a Permutation of any length in [min_n, max_n]."""
    return st.integers(min_n, max_n).flatmap(
        lambda n: st.permutations(tuple(range(1, n + 1)))
    ).map(lambda vals: Permutation(tuple(vals)))
