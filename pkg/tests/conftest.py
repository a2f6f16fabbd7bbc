import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: long demonstration runs (failure-mode evidence)")
