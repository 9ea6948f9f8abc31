import logging

import numpy as np
import pytest

from app.core.logging_config import _HANDLER_MARK
from app.services.hmm_model import HmmModel, Tagset
from app.services.hmm_service import sample_corpus
from tests.utils import generator_model


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, _HANDLER_MARK, False):
            root.removeHandler(handler)
            handler.close()


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture
def two_tag_model():
    """Tags {A, B}, pi = (0.5, 0.5), e(x|A) = 0.2, e(x|B) = 0.1"""
    tagset = Tagset.from_names(["A", "B"])
    return HmmModel.from_mapping(
        tagset,
        initial=[0.5, 0.5],
        transitions=[[0.5, 0.5], [0.5, 0.5]],
        emissions={"x": {"A": 0.2, "B": 0.1}, "y": {"A": 0.8}, "z": {"B": 0.9}},
    )


@pytest.fixture
def tie_model():
    """'x' hòa tuyệt đối giữa A và B; 'y' chỉ có nhãn A"""
    tagset = Tagset.from_names(["A", "B"])
    return HmmModel.from_mapping(
        tagset,
        initial=[0.5, 0.5],
        transitions=[[0.5, 0.5], [0.5, 0.5]],
        emissions={"x": {"A": 0.5, "B": 0.5}, "y": {"A": 0.5}},
    )


@pytest.fixture
def toy_corpus_text():
    return "the/DT dog/NN barks/VBZ\nthe/DT cat/NN sleeps/VBZ\na/DT dog/NN sleeps/VBZ\nthe/DT barks/NN\n"


@pytest.fixture(scope="session")
def generator():
    return generator_model(np.random.default_rng(7))


@pytest.fixture(scope="session")
def calibration_sample(generator):
    """Mẫu lớn (>= 50k token, đều nhập nhằng) sinh từ mô hình sinh"""
    return sample_corpus(generator, n_sentences=2100, length=25, rng=np.random.default_rng(11))


@pytest.fixture(scope="session")
def heldout_sample(generator):
    return sample_corpus(generator, n_sentences=2100, length=25, rng=np.random.default_rng(12))


@pytest.fixture(scope="session")
def small_sample(generator):
    return sample_corpus(generator, n_sentences=120, length=15, rng=np.random.default_rng(13))
