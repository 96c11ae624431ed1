from __future__ import annotations

from pathlib import Path

import pytest

from glanoir import taxonomy

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fragment_graph() -> taxonomy.TaxonomyGraph:
    return taxonomy.load_graph(str(FIXTURES / "ccs_fragment.graphml"))


@pytest.fixture(scope="session")
def ccs_graph() -> taxonomy.TaxonomyGraph:
    from importlib import resources

    data = resources.files("glanoir") / "data" / "acm_ccs1998.graphml"
    with data.open("rb") as fh:
        return taxonomy.load_graph(fh)
