import pytest

from memepipe import fixtures


@pytest.fixture(scope="session")
def fixture_raw(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixture-raw")
    fixtures.write_fixture_raw(root)
    return root


@pytest.fixture(scope="session")
def fixture_store(tmp_path_factory, fixture_raw):
    store_dir = tmp_path_factory.mktemp("fixture-store")
    return fixtures.run_fixture_pipeline(store_dir, fixture_raw, workers=4)
