"""Sklearn-facade estimators: params, cloning, fit state, outputs."""
import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from artigen import DiffusionGenerator, PatchFeatureExtractor, RetrievalAssembler
from artigen.conditioning import ForegroundMask, PatchFeatureGrid
from artigen.core import ArticulatedAbstraction
from artigen.data import make_cabinets
from artigen.retrieval import AssembledObject


def tiny_generator(**overrides):
    params = dict(layers=2, heads=4, hidden=32, timesteps=10, epochs=1,
                  batch_size=2, timesteps_per_object=2, seed=0)
    params.update(overrides)
    return DiffusionGenerator(**params)


def test_get_params_round_trip_and_clone():
    gen = tiny_generator(omega=1.5)
    params = gen.get_params()
    assert params["omega"] == 1.5 and params["hidden"] == 32
    copy = clone(gen)
    assert copy.get_params() == params
    copy.set_params(omega=0.0)
    assert gen.omega == 1.5


def test_feature_extractor_transform():
    recs = make_cabinets(2, seed=0)
    ext = PatchFeatureExtractor(camera_seed=3).fit(recs)
    pairs = ext.transform(recs)
    assert len(pairs) == 2
    for grid, mask in pairs:
        assert isinstance(grid, PatchFeatureGrid)
        assert isinstance(mask, ForegroundMask)
        assert mask.count() > 0
    again = PatchFeatureExtractor(camera_seed=3).fit_transform(recs)
    assert np.array_equal(pairs[0][0].features, again[0][0].features)
    other = PatchFeatureExtractor(camera_seed=4).fit_transform(recs)
    assert not np.array_equal(pairs[0][0].features, other[0][0].features)


def test_generator_fit_sample_predict():
    recs = make_cabinets(2, seed=1)
    gen = tiny_generator().fit(recs)
    assert len(gen.history_) >= 1
    graphs = [recs[0].obj.graph, recs[1].obj.graph]
    objs = gen.predict(graphs)
    assert len(objs) == 2
    for obj, rec in zip(objs, recs):
        assert isinstance(obj, ArticulatedAbstraction)
        assert len(obj.parts) == len(rec.obj.parts)
    repeat = gen.predict(graphs)
    for a, b in zip(objs, repeat):
        for pa, pb in zip(a.sorted_parts(), b.sorted_parts()):
            assert np.array_equal(pa.bbox.center(), pb.bbox.center())
    with pytest.raises(TypeError):
        gen.predict([recs[0]])


def test_generator_requires_fit():
    gen = tiny_generator()
    with pytest.raises(NotFittedError):
        gen.predict([])
    with pytest.raises(NotFittedError):
        gen.sample(None)


def test_assembler_fit_transform():
    recs = make_cabinets(3, seed=2)
    asm = RetrievalAssembler().fit(recs)
    out = asm.transform([recs[1].obj])
    assert len(out) == 1
    assert isinstance(out[0], AssembledObject)
    assert out[0].candidate_id == recs[1].object_id
    assert asm.predict([recs[1].obj])[0].candidate_id == recs[1].object_id
    with pytest.raises(NotFittedError):
        RetrievalAssembler().transform([recs[0].obj])
