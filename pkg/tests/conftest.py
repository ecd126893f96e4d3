import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def path_example():
    from rwlab.instances import path_example_allocations, path_example_graph, path_example_valuations
    return path_example_valuations(), path_example_graph(), path_example_allocations()
