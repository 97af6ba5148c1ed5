"""Shared test configuration.

Hypothesis runs a small, fixed number of examples per property so the whole
suite stays fast and deterministic in CI; statistical end-to-end checks live
in test_acceptance.py and manage their own budgets.
"""
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")
