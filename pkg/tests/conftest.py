from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(max_num=20, max_den=9):
    return st.builds(Fraction, st.integers(-max_num, max_num), st.integers(1, max_den))
