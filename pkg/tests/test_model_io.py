import json
from fractions import Fraction as F

import pytest

from grim_belief import corpus
from grim_belief.model_io import DocumentError, parse_model, read_model, serialize


def optimistic():
    return json.loads((corpus.corpus_dir() / "pd_optimistic.json").read_text())


@pytest.mark.parametrize("name", corpus.corpus_names())
def test_corpus_round_trip(name):
    text = (corpus.corpus_dir() / f"{name}.json").read_text()
    doc = parse_model(text)
    assert serialize(doc) == text


@pytest.mark.parametrize("name", corpus.corpus_names())
def test_corpus_matches_builders(name):
    assert serialize(corpus.BUILDERS[name]()) == (corpus.corpus_dir() / f"{name}.json").read_text()


def test_belief_sum_error_has_path():
    data = optimistic()
    data["belief_space"]["types"][0][1]["belief"] = {"4": "1/3", "5": "65/99"}
    with pytest.raises(DocumentError) as exc:
        parse_model(json.dumps(data))
    assert exc.value.path.startswith("$.belief_space.types[0][1].belief")


def test_decimals_are_exact():
    data = optimistic()
    text = json.dumps(data).replace('[3, 3]', '[3.1, "3.0"]')
    doc = parse_model(text)
    assert doc.game.payoffs[(1, 1)] == (F(31, 10), F(3))


def test_python_floats_are_rejected():
    from grim_belief.model_io import load_document
    data = optimistic()
    data["stage_game"]["payoffs"][1][1] = [3.1, 3]
    with pytest.raises(DocumentError, match="rational"):
        load_document(data)


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d.pop("stage_game"), "$"),
    (lambda d: d["cooperation"].update(sigma=["C", "C"]), "$.cooperation"),
    (lambda d: d["cooperation"].update(tau=["X", "C"]), "$.cooperation"),
    (lambda d: d["belief_space"]["types"][1][0].update(worlds=[0, 3]), "$.belief_space"),
])
def test_structural_errors(mutate, where):
    data = optimistic()
    mutate(data)
    with pytest.raises(DocumentError) as exc:
        parse_model(json.dumps(data))
    assert exc.value.path.startswith(where)


def test_generator_documents_expand(tmp_path):
    doc = read_model(corpus.resolve("pd_continuous_grid"))
    assert doc.model.n == 1000 * 1000
    assert doc.generator == {"kind": "uniform-grid", "cells": 1000}


def test_not_json():
    with pytest.raises(DocumentError):
        parse_model("{not json")
