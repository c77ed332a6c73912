import json

import pytest

from providertestutil import make_corpus


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    return make_corpus(tmp_path_factory.mktemp("corpus"))


@pytest.fixture()
def stance_model_file(tmp_path):
    model = {
        "kind": "linear-stance",
        "weights": [[3.0, 1.0, 1.0, -1.0],
                    [1.0, 0.5, 0.5, 2.0],
                    [0.0, 0.0, 0.0, 0.0]],
        "bias": [0.0, -0.5, 0.5],
        "provenance": "unit-test weights",
    }
    path = tmp_path / "stance.json"
    path.write_text(json.dumps(model), encoding="utf-8")
    return str(path)
