import pytest

from tcellsim.dataio import load_active_table, packaged_actives_path


@pytest.fixture(scope="session")
def actives():
    return load_active_table(packaged_actives_path())
